# PolyAchieve: verifiable certificates for biased polyform achievement games.
