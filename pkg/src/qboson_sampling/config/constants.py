"""Numeric caps, tolerances and names shared across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Constants:
    """Application constants."""

    # q -> 1 closed forms dispatch to their polynomial limit below this distance
    Q_ONE_TOLERANCE: float = 1e-12
    UNITARY_TOLERANCE: float = 1e-10
    NORM_TOLERANCE: float = 1e-10
    DISTRIBUTION_TOLERANCE: float = 1e-8

    SECTOR_SIZE_CAP: int = 100_000
    NAIVE_PERMANENT_CAP: int = 14
    RYSER_PERMANENT_CAP: int = 28
    Q_PERMANENT_CAP: int = 12
    SUBSTITUTION_PHOTON_CAP: int = 5
    SUBSTITUTION_MODE_CAP: int = 6

    WEAK_KERR_RATIO: float = 0.1
    KERR_MAPPING_RATIO_CAP: float = 0.5
    TRANSMON_REGIME_RATIO: float = 20.0

    THEOREM1_SLOPE_THRESHOLD: float = 1.8
    THEOREM1_MAX_DELTA: float = 0.2
    THEOREM1_MIN_POINTS: int = 4
    GAP_NOISE_FLOOR: float = 1e-12

    DEFAULT_SEED: int = 0
    OUTPUT_DIR_ENV: str = "QBOSON_OUTPUT_DIR"
    FLOAT_FORMAT: str = ".17g"
