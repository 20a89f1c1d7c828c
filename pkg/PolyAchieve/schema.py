# schema.py

import re

from cerberus import Validator

ANIMAL_NAME = re.compile(r"^[TP]\d+,\d+$")
GAME_TEXT = re.compile(r"^\s*\d+\s*(->\s*\d+\s*)?,\s*\d+\s*$")
WINDOW_TEXT = re.compile(r"^\s*\d+\s*(x\s*\d+\s*)?$")

WITNESS_KINDS = ["surround", "twostep", "small_bias", "proof", "paving", "priority", "solver", "reduce"]
FILE_WITNESSES = ["proof", "paving", "priority"]


# --- Custom Validator - catalog naming and game syntax ---
class PolyAchieveValidator(Validator):
    """
    Cerberus Validator enforcing the catalog's conventions for animal names,
    game strings and witness arguments.
    """

    def _check_with_animal_name(self, field, value):
        """Animal names read T<size>,<index> (polyiamonds) or P<size>,<index> (polyominoes)."""
        if not ANIMAL_NAME.fullmatch(value):
            self._error(field, f"'{value}' must look like T4,1 or P4,5.")

    def _check_with_game(self, field, value):
        """Games are written 'a,b' or 'a->c,b'."""
        if not GAME_TEXT.fullmatch(value):
            self._error(field, f"'{value}' must be a game such as '2,3' or '1->2,1'.")

    def _check_with_window(self, field, value):
        if not WINDOW_TEXT.fullmatch(value):
            self._error(field, f"'{value}' must be a window such as '7x7' or '6'.")

    def _check_with_threshold(self, field, value):
        """Integers followed by a single trailing 'inf'."""
        if not value or str(value[-1]).lower() != "inf":
            self._error(field, "must end with 'inf'.")
            return
        for item in value[:-1]:
            if not isinstance(item, int) or isinstance(item, bool):
                self._error(field, f"entry '{item}' before 'inf' must be an integer.")

    def _check_with_claim(self, field, value):
        """Certificate witnesses need a FILE, derived claims name the claim they come FROM."""
        kind = value.get("WITNESS")
        if kind in FILE_WITNESSES and not value.get("FILE"):
            self._error(field, f"a '{kind}' witness needs a FILE.")
        if kind == "reduce" and not value.get("FROM"):
            self._error(field, "a 'reduce' witness needs FROM, the game it is derived from.")


# Claim Section
claim_schema = {
    'GAME': {'type': 'string', 'required': True, 'check_with': 'game'},
    'VERDICT': {'type': 'string', 'required': True, 'allowed': ['maker', 'breaker']},
    'WITNESS': {'type': 'string', 'required': True, 'allowed': WITNESS_KINDS},
    'FILE': {'type': 'string', 'required': False},
    'FROM': {'type': 'string', 'required': False, 'check_with': 'game'},
    'ARGS': {
        'type': 'dict', 'default': {}, 'schema': {
            'A': {'type': 'integer', 'min': 1},
            'B': {'type': 'integer', 'min': 0},
            'PER_SET': {'type': 'integer', 'min': 1},
            'AUX_LEVEL': {'type': 'integer', 'allowed': [0, 1]},
            'WINDOW': {'type': 'string', 'check_with': 'window'},
            'MAX_TURNS': {'type': 'integer', 'min': 1},
            'BREAKER_MOVES': {'type': 'string', 'allowed': ['maximal', 'all']},
            'BLOCKS': {'type': 'integer', 'min': 1},
        }
    },
}

# Animal Section
animal_schema = {
    'POLYFORM': {'type': 'string', 'required': True},
    'THRESHOLD': {
        'type': 'list', 'required': True, 'check_with': 'threshold',
        'schema': {'type': ['integer', 'string']}
    },
    'CLAIMS': {
        'type': 'list', 'default': [],
        'schema': {'type': 'dict', 'schema': claim_schema, 'check_with': 'claim'}
    },
}

# Settings Section
settings_schema = {
    'JOBS': {'type': 'integer', 'min': 1, 'default': 1},
    'SOLVER': {
        'type': 'dict', 'default': {}, 'schema': {
            'SQUARE_WINDOW': {'type': 'string', 'check_with': 'window', 'default': '7x7'},
            'TRIANGULAR_WINDOW': {'type': 'string', 'check_with': 'window', 'default': '6'},
            'MAX_TURNS': {'type': 'integer', 'min': 1, 'default': 6},
            'CROSS_CHECK_MAX_SIZE': {'type': 'integer', 'min': 0, 'default': 3},
            'CROSS_CHECK_MAX_TURNS': {'type': 'integer', 'min': 1, 'default': 4},
            'CROSS_CHECK_MAX_A': {'type': 'integer', 'min': 1, 'default': 1},
            'CROSS_CHECK_MAX_B': {'type': 'integer', 'min': 0, 'default': 3},
            'CROSS_CHECK_SQUARE_WINDOW': {'type': 'string', 'check_with': 'window', 'default': '5x5'},
            'CROSS_CHECK_TRIANGULAR_WINDOW': {'type': 'string', 'check_with': 'window', 'default': '4'},
        }
    },
    'PRIORITY': {
        'type': 'dict', 'default': {}, 'schema': {
            'MAX_POSITIONS': {'type': 'integer', 'min': 1, 'nullable': True, 'default': None},
        }
    },
}

# Top Level Section
CATALOG_SCHEMA = {
    'config_type': {'type': 'string', 'required': True, 'allowed': ["PolyAchieve"]},
    'SETTINGS': {'type': 'dict', 'schema': settings_schema, 'default': {}},
    'ANIMALS': {
        'type': 'dict', 'default': {},
        'keysrules': {'type': 'string', 'check_with': 'animal_name'},
        'valuesrules': {'type': 'dict', 'schema': animal_schema}
    },
    'SUBFORMS': {
        'type': 'list', 'default': [],
        'schema': {
            'type': 'list', 'minlength': 2, 'maxlength': 2,
            'schema': {'type': 'string', 'check_with': 'animal_name'}
        }
    },
    'OVERVIEW': {'type': 'string', 'required': False},
}
