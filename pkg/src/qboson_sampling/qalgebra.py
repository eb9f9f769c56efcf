"""q-deformed numbers, characteristic functions and ladder-operator matrices.

Conventions:
    Arik-Coon q-number      [n]_q = (q^n - 1) / (q - 1)
    symmetric q-number      [n]_q = (q^n - q^-n) / (q - q^-1)
    generalized Fock state  |n> = (a^dagger)^n |0> / f(n), with f(0) = 1

Everything here is a pure function over frozen values.
"""

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .config.constants import Constants
from .errors import IllConditionedError


class Flavor(Enum):
    """Which q-number closed form a deformation uses."""

    ARIK_COON = "arik-coon"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class QDeformation:
    """Deformation parameter q together with its q-number flavor."""

    q: float
    flavor: Flavor = Flavor.ARIK_COON

    def __post_init__(self) -> None:
        if not math.isfinite(self.q) or self.q <= 0:
            raise ValueError(f"Deformation parameter must be positive and finite, got q={self.q}")

    @property
    def delta(self) -> float:
        """Distance from the undeformed point, q - 1."""
        return self.q - 1.0

    @property
    def is_trivial(self) -> bool:
        return _near_one(self.q)


def _near_one(q: float) -> bool:
    return abs(q - 1.0) < Constants.Q_ONE_TOLERANCE


def _check_level(n: int) -> None:
    if n < 0:
        raise ValueError(f"Level index must be nonnegative, got n={n}")


def q_number(n: int, d: QDeformation) -> float:
    """Evaluate the q-number [n]_q in the flavor carried by ``d``.

    Args:
        n: Nonnegative level index.
        d: Deformation. Within 1e-12 of q = 1 both flavors return n exactly.

    Returns:
        The q-number as a float.

    Raises:
        ValueError: If n is negative.
    """
    _check_level(n)
    if d.is_trivial:
        return float(n)
    q = d.q
    if d.flavor is Flavor.SYMMETRIC:
        return (q**n - q ** (-n)) / (q - 1.0 / q)
    return (q**n - 1.0) / (q - 1.0)


def q_factorial(n: int, d: QDeformation) -> float:
    """Product [1]_q [2]_q ... [n]_q; the empty product is 1.

    Raises:
        ValueError: If n is negative.
        OverflowError: If the product leaves the float range.
    """
    _check_level(n)
    result = 1.0
    for k in range(1, n + 1):
        result *= q_number(k, d)
        if math.isinf(result):
            raise OverflowError(f"q-factorial of {n} overflows at q={d.q}")
    return result


def q_number_first_order(n: int, q: float) -> float:
    """First-order expansion n + (q - 1) n (n - 1) / 2 of the Arik-Coon q-number."""
    _check_level(n)
    return n + 0.5 * (q - 1.0) * n * (n - 1)


@dataclass(frozen=True)
class ErrorMetrics:
    """Absolute and relative deviation of [n]_q from n, with their upper bounds.

    For 0 < q < 1 the bounds are strict from n = 3 on and attained at n = 2,
    where n - [n]_q = 1 - q. For q > 1 the deviations are negative and
    ``within_bounds`` is False.
    """

    n: int
    q: float
    delta_abs: float
    delta_rel: float
    abs_bound: float
    rel_bound: float

    @property
    def within_bounds(self) -> bool:
        return (
            0.0 < self.delta_abs
            and 0.0 < self.delta_rel
            and _at_most(self.delta_abs, self.abs_bound)
            and _at_most(self.delta_rel, self.rel_bound)
        )


def _at_most(value: float, bound: float) -> bool:
    return value < bound or math.isclose(value, bound, rel_tol=1e-9)


def error_metrics(n: int, q: float) -> ErrorMetrics:
    """Compute n - [n]_q and (n - [n]_q) / n for the Arik-Coon flavor.

    Args:
        n: Level index, at least 1 (the relative error divides by n).
        q: Deformation parameter in (0, 1) or (1, inf).

    The leading Taylor term of n - [n]_q is n(n-1)(1-q)/2, which is also the
    bound. The coefficient n^2/2 that is sometimes quoted overstates it; only the
    exact values and the n(n-1)/2 bound are used here.

    Returns:
        ErrorMetrics with the deviations and the bounds n(n-1)(1-q)/2 and (n-1)(1-q)/2.

    Raises:
        ValueError: If n < 1, q <= 0 or q == 1.
    """
    if n < 1:
        raise ValueError(f"Relative error is undefined at n={n}; need n >= 1")
    if q <= 0 or _near_one(q):
        raise ValueError(f"Error metrics need q in (0, 1) or (1, inf), got q={q}")

    delta_abs = n - q_number(n, QDeformation(q))
    return ErrorMetrics(
        n=n,
        q=q,
        delta_abs=delta_abs,
        delta_rel=delta_abs / n,
        abs_bound=0.5 * n * (n - 1) * (1.0 - q),
        rel_bound=0.5 * (n - 1) * (1.0 - q),
    )


def symmetric_gap(n: int, q: float) -> float:
    """Difference between the symmetric and the Arik-Coon q-numbers at level n.

    The symmetric form is invariant under q -> 1/q and so has no first-order
    term; for q = 1 + delta the gap behaves as -n(n-1)/2 * delta.

    Raises:
        ValueError: If n is negative or q is 1 (the limit value there is 0).
    """
    _check_level(n)
    if q <= 0 or _near_one(q):
        raise ValueError(f"Symmetric gap needs q > 0 and q != 1, got q={q}; the q=1 limit is 0")
    symmetric = q_number(n, QDeformation(q, Flavor.SYMMETRIC))
    return symmetric - q_number(n, QDeformation(q))


@dataclass(frozen=True)
class BurbanParams:
    """Structure constants of the (q; alpha, beta, gamma; nu) oscillator family."""

    alpha: float
    beta: float
    gamma: float
    nu: float
    f0: float = 0.0
    q: float = 1.0

    def with_q(self, q: float) -> "BurbanParams":
        return dataclasses.replace(self, q=q)


def burban_f(n: int, p: BurbanParams) -> float:
    """Evaluate the structure function f(n) of the Burban family.

    The alpha == gamma branch is selected only on exact equality.

    Args:
        n: Nonnegative level index.
        p: Structure constants with q > 0.

    Returns:
        f(n).

    Raises:
        ValueError: If n < 0 or q <= 0.
        IllConditionedError: If q^gamma equals q^alpha although alpha != gamma.
    """
    _check_level(n)
    q = p.q
    if q <= 0:
        raise ValueError(f"Burban structure needs q > 0, got q={q}")

    sign = (-1.0) ** n
    if p.alpha == p.gamma:
        scale = q ** (p.gamma * (n - 1) + p.beta)
        return p.f0 * q ** (p.gamma * n) + n * scale + 2 * p.nu * scale * (1 - sign) / 2

    q_gamma, q_alpha = q**p.gamma, q**p.alpha
    gap = q_gamma - q_alpha
    if abs(gap) <= Constants.Q_ONE_TOLERANCE * max(abs(q_gamma), abs(q_alpha)):
        raise IllConditionedError(
            f"q^gamma and q^alpha coincide at q={q} (alpha={p.alpha}, gamma={p.gamma}); "
            f"the alpha != gamma closed form is singular here"
        )
    q_gamma_n, q_alpha_n = q ** (p.gamma * n), q ** (p.alpha * n)
    bracket = (q_gamma_n - q_alpha_n) / gap + 2 * p.nu * (q_gamma_n - sign * q_alpha_n) / (
        q_gamma + q_alpha
    )
    return p.f0 * q_gamma_n + q**p.beta * bracket


class AdmissibilityStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GapSample:
    """Gaps f(n) - [n]_q at q = 1 + delta for the lowest three levels."""

    delta: float
    gap0: float
    gap1: float
    gap2: float

    @property
    def leading(self) -> float:
        return max(abs(self.gap1), abs(self.gap2))


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the low-level gap scaling test for a Burban oscillator."""

    params: BurbanParams
    samples: tuple[GapSample, ...]
    slope: float
    intercept: float
    status: AdmissibilityStatus

    @property
    def passed(self) -> bool:
        return self.status is AdmissibilityStatus.PASS


def check_delta_grid(deltas: list[float]) -> None:
    """Reject delta grids the slope fit cannot use.

    Raises:
        ValueError: If there are fewer than four values, a value is outside
            (0, 0.2] or the grid spans less than a decade.
    """
    if len(deltas) < Constants.THEOREM1_MIN_POINTS:
        raise ValueError(
            f"Need at least {Constants.THEOREM1_MIN_POINTS} delta values, got {len(deltas)}"
        )
    if any(not 0 < d <= Constants.THEOREM1_MAX_DELTA for d in deltas):
        raise ValueError(f"Delta values must lie in (0, {Constants.THEOREM1_MAX_DELTA}]")
    if max(deltas) < 10 * min(deltas):
        raise ValueError("Delta grid must span at least a decade")


def theorem1_check(p: BurbanParams, deltas: list[float]) -> AdmissibilityReport:
    """Test whether a Burban oscillator matches [n]_q to second order at low levels.

    For each delta the gaps f(n) - [n]_q are evaluated at q = 1 + delta for
    n = 0, 1, 2. The log of max(|gap(1)|, |gap(2)|) is fitted against log delta.
    f(1) = q^beta (1 + 2 nu) carries no alpha or gamma dependence, so level 2 is
    where a violated alpha + gamma = 1 shows up. The check passes when the slope
    reaches the threshold and gap(0) vanishes identically.

    Args:
        p: Structure constants; its q is ignored.
        deltas: At least four values in (0, 0.2] spanning a decade.

    Returns:
        AdmissibilityReport with the fit and a pass/fail/indeterminate status.

    Raises:
        ValueError: If alpha == gamma or the delta grid is unusable.
    """
    if p.alpha == p.gamma:
        raise ValueError("The admissibility check is restricted to alpha != gamma")
    check_delta_grid(deltas)

    samples = []
    for delta in sorted(deltas):
        shifted = p.with_q(1.0 + delta)
        d = QDeformation(1.0 + delta)
        gaps = [burban_f(n, shifted) - q_number(n, d) for n in range(3)]
        samples.append(GapSample(delta, *gaps))

    usable = [s for s in samples if s.leading > Constants.GAP_NOISE_FLOOR]
    if len(usable) < 2:
        return AdmissibilityReport(
            p, tuple(samples), math.nan, math.nan, AdmissibilityStatus.INDETERMINATE
        )

    slope, intercept = np.polyfit(
        np.log([s.delta for s in usable]), np.log([s.leading for s in usable]), 1
    )
    gap0_vanishes = all(s.gap0 == 0.0 for s in samples)
    passed = slope >= Constants.THEOREM1_SLOPE_THRESHOLD and gap0_vanishes
    status = AdmissibilityStatus.PASS if passed else AdmissibilityStatus.FAIL
    return AdmissibilityReport(p, tuple(samples), float(slope), float(intercept), status)


class SpeciesKind(Enum):
    STANDARD = "standard"
    QBOSON = "qboson"
    SPIN = "spin"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Species:
    """A generalized boson species: what fixes its characteristic function."""

    kind: SpeciesKind
    deformation: QDeformation | None = None
    spin: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind is SpeciesKind.QBOSON and self.deformation is None:
            raise ValueError("A q-boson species needs a deformation")
        if self.kind is SpeciesKind.SPIN:
            if self.spin is None or self.spin <= 0 or (2 * self.spin).denominator != 1:
                raise ValueError(f"Spin must be a positive half-integer, got S={self.spin}")

    @classmethod
    def standard(cls) -> "Species":
        return cls(SpeciesKind.STANDARD)

    @classmethod
    def qboson(cls, q: float, flavor: Flavor = Flavor.ARIK_COON) -> "Species":
        return cls(SpeciesKind.QBOSON, deformation=QDeformation(q, flavor))

    @classmethod
    def spin_s(cls, spin: Fraction | float | str) -> "Species":
        return cls(SpeciesKind.SPIN, spin=Fraction(spin).limit_denominator(2))

    @classmethod
    def parse(cls, text: str) -> "Species":
        """Parse ``standard``, ``q:<float>[:sym]`` or ``spin:<S>`` (S like ``1/2``).

        Raises:
            ValueError: If the text matches none of the forms.
        """
        kind, _, rest = text.strip().lower().partition(":")
        try:
            if kind == "standard" and not rest:
                return cls.standard()
            if kind == "q" and rest:
                value, _, flavor = rest.partition(":")
                if flavor not in ("", "sym", "symmetric"):
                    raise ValueError(f"unknown flavor '{flavor}'")
                return cls.qboson(float(value), Flavor.SYMMETRIC if flavor else Flavor.ARIK_COON)
            if kind == "spin" and rest:
                spin = Fraction(rest)
                if (2 * spin).denominator != 1:
                    raise ValueError(f"S={rest} is not a half-integer")
                return cls.spin_s(spin)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid species '{text}': {e}") from e
        raise ValueError(
            f"Invalid species '{text}'\nExpected format: standard | q:<float> | spin:<S>"
        )

    @property
    def max_occupation(self) -> int | None:
        """Largest allowed occupation of one mode, or None when unbounded."""
        if self.kind is SpeciesKind.SPIN and self.spin is not None:
            return int(2 * self.spin)
        return None

    @property
    def label(self) -> str:
        if self.kind is SpeciesKind.QBOSON and self.deformation is not None:
            suffix = ":sym" if self.deformation.flavor is Flavor.SYMMETRIC else ""
            return f"q:{self.deformation.q!r}{suffix}"
        if self.kind is SpeciesKind.SPIN:
            return f"spin:{self.spin}"
        return self.kind.value


@dataclass(frozen=True)
class CharacteristicF:
    """Tabulated normalization f(0..d) of a generalized boson species.

    ``table`` may be shorter than ``cutoff + 1`` for spin species, whose Fock
    space ends at 2S.
    """

    species: Species
    table: tuple[float, ...]
    cutoff: int

    def __post_init__(self) -> None:
        if not self.table or self.table[0] != 1.0:
            raise ValueError("Characteristic function must satisfy f(0) = 1")
        if any(not math.isfinite(v) or v <= 0 for v in self.table):
            raise ValueError("Characteristic function values must be positive and finite")

    @classmethod
    def custom(cls, table: list[float] | tuple[float, ...]) -> "CharacteristicF":
        values = tuple(float(v) for v in table)
        return cls(Species(SpeciesKind.CUSTOM), values, len(values) - 1)

    @property
    def max_level(self) -> int:
        """Highest level with a stored value."""
        return len(self.table) - 1

    def __call__(self, n: int) -> float:
        if not 0 <= n <= self.max_level:
            raise ValueError(f"f({n}) is outside the stored levels 0..{self.max_level}")
        return self.table[n]

    def raise_ratio(self, n: int) -> float:
        """Matrix element <n+1|a^dagger|n> = f(n+1) / f(n); zero past the last level."""
        if n + 1 > self.max_level:
            if self.species.max_occupation is not None and n >= self.species.max_occupation:
                return 0.0
            raise ValueError(f"Level {n + 1} exceeds the characteristic function cutoff")
        return self.table[n + 1] / self.table[n]


def characteristic_f(species: Species, cutoff: int) -> CharacteristicF:
    """Tabulate f(0..cutoff) for a species.

    Standard bosons use sqrt(n!), q-bosons sqrt([n]_q!) and spin-S bosons
    sqrt(n! (2S)! / (2S - n)!).

    Args:
        species: Which generalized boson to tabulate.
        cutoff: Highest level d, at least 1. Spin species allow d <= 2S + 1 and
            store levels up to 2S only.

    Returns:
        CharacteristicF with f(0) = 1.

    Raises:
        ValueError: For d < 1, a spin cutoff beyond 2S + 1, or a custom species.
    """
    if cutoff < 1:
        raise ValueError(f"Cutoff must be at least 1, got {cutoff}")

    if species.kind is SpeciesKind.STANDARD:
        table = tuple(math.sqrt(math.factorial(n)) for n in range(cutoff + 1))
    elif species.kind is SpeciesKind.QBOSON and species.deformation is not None:
        d = species.deformation
        table = tuple(math.sqrt(q_factorial(n, d)) for n in range(cutoff + 1))
    elif species.kind is SpeciesKind.SPIN and species.spin is not None:
        two_s = int(2 * species.spin)
        if cutoff > two_s + 1:
            raise ValueError(
                f"Spin S={species.spin} Fock space ends at {two_s}; cutoff {cutoff} exceeds 2S+1"
            )
        top = math.factorial(two_s)
        table = tuple(
            math.sqrt(math.factorial(n) * top / math.factorial(two_s - n))
            for n in range(min(cutoff, two_s) + 1)
        )
    else:
        raise ValueError("Custom species are built with CharacteristicF.custom(table)")

    return CharacteristicF(species, table, cutoff)


def commutator_F(f: CharacteristicF, n: int) -> float:
    """Same-site commutator spectrum F(n) = f(n+1)^2/f(n)^2 - f(n)^2/f(n-1)^2.

    The second term is 0 at n = 0. Standard bosons give 1, q-bosons q^n and
    spin-S bosons 2S - 2n. Tables that quote F(n) = n - 2S for spin-S do not
    match f(n) = sqrt(n! (2S)! / (2S - n)!); the value here follows from f.

    Raises:
        ValueError: If n < 0 or n + 1 is past the stored levels.
    """
    _check_level(n)
    if n + 1 > f.max_level:
        raise ValueError(f"F({n}) needs f({n + 1}); stored levels end at {f.max_level}")
    up = (f(n + 1) / f(n)) ** 2
    down = (f(n) / f(n - 1)) ** 2 if n > 0 else 0.0
    return up - down


@dataclass(frozen=True, eq=False)
class LadderRep:
    """Truncated matrices of a, a^dagger and N on levels 0..dim-1."""

    dim: int
    annihilation: np.ndarray
    creation: np.ndarray
    number: np.ndarray


def ladder_matrices(f: CharacteristicF, dim: int) -> LadderRep:
    """Build the ladder matrices with <n-1|a|n> = f(n) / f(n-1).

    Args:
        f: Characteristic function of the species.
        dim: Number of levels kept, at most the stored levels of f.

    Returns:
        LadderRep with creation equal to the conjugate transpose of annihilation.

    Raises:
        ValueError: If dim is not in 1..f.max_level + 1.
    """
    if not 1 <= dim <= f.max_level + 1:
        raise ValueError(f"Dimension {dim} needs levels up to {dim - 1}; f stops at {f.max_level}")

    elements = np.array([f(n) / f(n - 1) for n in range(1, dim)], dtype=complex)
    annihilation = np.diag(elements, k=1)
    return LadderRep(
        dim=dim,
        annihilation=annihilation,
        creation=annihilation.conj().T,
        number=np.diag(np.arange(dim, dtype=float)).astype(complex),
    )
