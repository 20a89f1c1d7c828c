# config_loader.py

from pathlib import Path
from typing import Union

from YMLEditor.yaml_reader import ConfigLoader

from PolyAchieve.schema import CATALOG_SCHEMA, PolyAchieveValidator
from PolyAchieve.verify_logger import get_logger


def load_catalog_config(config_filepath: Union[str, Path]) -> dict:
    """
    Loads, validates, and normalizes a PolyAchieve catalog file.

    Wraps the generic ConfigLoader with the catalog schema and validator, asking
    for normalized output so that every default is filled in.

    Raises:
        FileNotFoundError: If the catalog file does not exist.
        ValueError: If the catalog has validation errors.
    """
    loader = ConfigLoader(CATALOG_SCHEMA, validator_class=PolyAchieveValidator)
    config = loader.read(config_file=Path(config_filepath), normalize=True)
    get_logger().debug(f"Catalog {config_filepath}: {len(config.get('ANIMALS', {}))} animals")
    return config
