"""Transmon, Kerr and q-boson spectra and the Kerr <-> q identification.

Energies are in arbitrary consistent units with hbar = 1.

The transmon levels use the perturbative result
    E_m = sqrt(8 E_J E_C) (m + 1/2) - (E_C / 2) (m^2 + m + 1/2)
whose second difference is exactly -E_C. A coefficient E_C/12 on the same
polynomial, which appears in some write-ups of this expansion, does not
reproduce that anharmonicity and is not used.
"""

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config.constants import Constants
from .errors import RegimeWarning
from .qalgebra import (
    CharacteristicF,
    QDeformation,
    Species,
    characteristic_f,
    ladder_matrices,
    q_number,
)


class SpectrumModel(Enum):
    TRANSMON = "transmon"
    KERR = "kerr"
    QBOSON = "qboson"


@dataclass(frozen=True)
class TransmonParams:
    """Device energies of a transmon. ``ng`` is kept for the record but unused."""

    ej: float
    ec: float
    ng: float = 0.0

    def __post_init__(self) -> None:
        if self.ej <= 0 or self.ec <= 0:
            raise ValueError(f"E_J and E_C must be positive, got E_J={self.ej}, E_C={self.ec}")

    @property
    def ratio(self) -> float:
        return self.ej / self.ec

    @property
    def in_transmon_regime(self) -> bool:
        return self.ratio >= Constants.TRANSMON_REGIME_RATIO


@dataclass(frozen=True)
class KerrParams:
    """Bare frequency omega and Kerr strength K (negative for transmons)."""

    omega: float
    kerr: float

    def __post_init__(self) -> None:
        if self.omega <= 0:
            raise ValueError(f"Oscillator frequency must be positive, got omega={self.omega}")

    @property
    def ratio(self) -> float:
        return self.kerr / self.omega

    @property
    def is_weak(self) -> bool:
        return abs(self.ratio) <= Constants.WEAK_KERR_RATIO


@dataclass(frozen=True)
class SpectrumTable:
    """Energies of levels 0..len-1 for one model."""

    model: SpectrumModel
    energies: tuple[float, ...]

    def __post_init__(self) -> None:
        if not all(math.isfinite(e) for e in self.energies):
            raise ValueError(f"{self.model.value} spectrum has non-finite energies")

    @property
    def levels(self) -> list[tuple[int, float]]:
        return list(enumerate(self.energies))

    def spacings(self) -> list[float]:
        """Level spacings E_n - E_{n-1} for n >= 1."""
        return [b - a for a, b in zip(self.energies, self.energies[1:])]


@dataclass(frozen=True)
class ComparisonRow:
    index: int
    kerr_energy: float
    qboson_energy: float
    gap: float
    relative_gap: float


@dataclass(frozen=True)
class ComparisonTable:
    """Kerr and q-boson spectra side by side at q = 1 + K/omega."""

    params: KerrParams
    q: float
    rows: tuple[ComparisonRow, ...]

    @property
    def max_gap(self) -> float:
        return max(row.gap for row in self.rows)


def transmon_harmonic_frequency(p: TransmonParams) -> float:
    """Plasma frequency sqrt(8 E_J E_C) of the harmonic part."""
    return math.sqrt(8.0 * p.ej * p.ec)


def transmon_levels(p: TransmonParams, m_max: int) -> SpectrumTable:
    """Perturbative transmon energies for m = 0..m_max, constant -E_J dropped.

    Args:
        p: Transmon energies.
        m_max: Highest level, at least 2.

    Returns:
        SpectrumTable tagged TRANSMON.

    Raises:
        ValueError: If m_max < 2.
    """
    if m_max < 2:
        raise ValueError(f"Transmon spectrum needs m_max >= 2, got {m_max}")
    if not p.in_transmon_regime:
        warnings.warn(
            f"E_J/E_C = {p.ratio:.3g} is below {Constants.TRANSMON_REGIME_RATIO:g}; "
            f"the perturbative transmon spectrum is unreliable",
            RegimeWarning,
            stacklevel=2,
        )
    plasma = transmon_harmonic_frequency(p)
    energies = tuple(
        plasma * (m + 0.5) - 0.5 * p.ec * (m * m + m + 0.5) for m in range(m_max + 1)
    )
    return SpectrumTable(SpectrumModel.TRANSMON, energies)


def kerr_from_transmon(p: TransmonParams) -> KerrParams:
    """Kerr oscillator equivalent: omega = sqrt(8 E_J E_C) - E_C, K = -E_C."""
    return KerrParams(omega=transmon_harmonic_frequency(p) - p.ec, kerr=-p.ec)


def kerr_levels(p: KerrParams, n_max: int) -> SpectrumTable:
    """Kerr oscillator energies E_n = omega n + (K/2) n (n - 1) for n = 0..n_max.

    Raises:
        ValueError: If n_max < 1.
    """
    if n_max < 1:
        raise ValueError(f"Kerr spectrum needs n_max >= 1, got {n_max}")
    energies = tuple(p.omega * n + 0.5 * p.kerr * n * (n - 1) for n in range(n_max + 1))
    return SpectrumTable(SpectrumModel.KERR, energies)


def qboson_levels(omega: float, d: QDeformation, n_max: int) -> SpectrumTable:
    """q-boson energies E_n = omega [n]_q in the flavor of ``d``.

    Raises:
        ValueError: If n_max < 1.
    """
    if n_max < 1:
        raise ValueError(f"q-boson spectrum needs n_max >= 1, got {n_max}")
    energies = tuple(omega * q_number(n, d) for n in range(n_max + 1))
    return SpectrumTable(SpectrumModel.QBOSON, energies)


def map_kerr_to_q(p: KerrParams) -> QDeformation:
    """Identify a Kerr oscillator with an Arik-Coon q-boson, q = 1 + K/omega.

    Args:
        p: Kerr parameters with |K|/omega <= 0.5.

    Returns:
        Arik-Coon QDeformation.

    Raises:
        ValueError: If |K|/omega exceeds 0.5, where the first-order
            identification no longer means anything.
    """
    if abs(p.ratio) > Constants.KERR_MAPPING_RATIO_CAP:
        raise ValueError(
            f"|K|/omega = {abs(p.ratio):.3g} exceeds {Constants.KERR_MAPPING_RATIO_CAP}; "
            f"q = 1 + K/omega is a first-order identification and does not apply"
        )
    if not p.is_weak:
        warnings.warn(
            f"|K|/omega = {abs(p.ratio):.3g} is above {Constants.WEAK_KERR_RATIO}; "
            f"Kerr and q-boson spectra diverge visibly",
            RegimeWarning,
            stacklevel=2,
        )
    return QDeformation(1.0 + p.ratio)


def transmon_to_q(p: TransmonParams) -> QDeformation:
    """Deformation of the q-boson matched to a transmon."""
    return map_kerr_to_q(kerr_from_transmon(p))


def kerr_ratio_from_EJ_EC(ej: float, ec: float) -> float:  # noqa: N802
    """Estimate K/omega as 1 / (sqrt(8 E_J / E_C) - 1).

    Raises:
        ValueError: If E_J/E_C <= 1 or either energy is not positive.
    """
    if ej <= 0 or ec <= 0 or ej / ec <= 1:
        raise ValueError(f"Need E_J/E_C > 1 with positive energies, got E_J={ej}, E_C={ec}")
    return 1.0 / (math.sqrt(8.0 * ej / ec) - 1.0)


def spectrum_compare(omega: float, kerr: float, n_max: int) -> ComparisonTable:
    """Compare the Kerr spectrum with omega [n]_q at q = 1 + K/omega.

    The gap at level n is omega |[n]_q - n - (q-1) n (n-1)/2|, second order in K/omega.

    Args:
        omega: Bare frequency.
        kerr: Kerr strength.
        n_max: Highest level, at least 2.

    Returns:
        ComparisonTable with one row per level.

    Raises:
        ValueError: If n_max < 2 or the ratio is outside the mapping regime.
    """
    if n_max < 2:
        raise ValueError(f"Spectrum comparison needs n_max >= 2, got {n_max}")
    params = KerrParams(omega, kerr)
    d = map_kerr_to_q(params)
    kerr_table = kerr_levels(params, n_max)
    q_table = qboson_levels(omega, d, n_max)

    rows = []
    for n, (e_kerr, e_q) in enumerate(zip(kerr_table.energies, q_table.energies)):
        gap = abs(e_q - e_kerr)
        relative = gap / abs(e_kerr) if e_kerr != 0 else 0.0
        rows.append(ComparisonRow(n, e_kerr, e_q, gap, relative))
    return ComparisonTable(params, d.q, tuple(rows))


def level_spacings(table: SpectrumTable) -> list[tuple[int, float]]:
    """Spacings (n, E_n - E_{n-1}) for n >= 1."""
    return list(enumerate(table.spacings(), start=1))


def divergence_table(omega: float, ratios: list[float], n_max: int) -> list[ComparisonTable]:
    """Run spectrum_compare across a sweep of K/omega values."""
    return [spectrum_compare(omega, ratio * omega, n_max) for ratio in ratios]


def phi4_moment(m: int, oracle_dim: int) -> tuple[float, float]:
    """<m|(a + a^dagger)^4|m> in closed form 6m^2 + 6m + 3 and by matrix powers.

    Args:
        m: Level index.
        oracle_dim: Truncation of the standard ladder matrices, at least m + 5.

    Returns:
        (closed form, truncated-matrix value).

    Raises:
        ValueError: If the truncation would touch the matrix element.
    """
    if m < 0:
        raise ValueError(f"Level index must be nonnegative, got m={m}")
    if oracle_dim < m + 5:
        raise ValueError(f"Oracle dimension {oracle_dim} too small for m={m}; need >= {m + 5}")

    f: CharacteristicF = characteristic_f(Species.standard(), oracle_dim - 1)
    rep = ladder_matrices(f, oracle_dim)
    x = rep.annihilation + rep.creation
    oracle = np.linalg.matrix_power(x, 4)[m, m].real
    return float(6 * m * m + 6 * m + 3), float(oracle)
