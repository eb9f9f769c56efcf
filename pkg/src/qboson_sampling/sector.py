"""Fixed-photon-number sectors, outcome distributions and their distance."""

import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .config.constants import Constants
from .errors import SizeLimitError

OccupationVector = tuple[int, ...]


def check_occupation(counts: Sequence[int]) -> OccupationVector:
    """Validate an occupation vector and return it as a tuple.

    Raises:
        ValueError: If it is empty or holds a negative or non-integer entry.
    """
    occupation = tuple(counts)
    if not occupation:
        raise ValueError("Occupation vector must cover at least one mode")
    for count in occupation:
        if isinstance(count, bool) or not isinstance(count, (int, np.integer)) or count < 0:
            raise ValueError(f"Occupations must be nonnegative integers, got {occupation}")
    return tuple(int(c) for c in occupation)


@dataclass(frozen=True)
class SectorBasis:
    """Lexicographically ordered occupation vectors of m modes holding n quanta."""

    modes: int
    photons: int
    states: tuple[OccupationVector, ...]
    max_occupation: int | None = None
    _index: dict[OccupationVector, int] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[OccupationVector]:
        return iter(self.states)

    def __contains__(self, state: object) -> bool:
        return state in self._index

    def index(self, state: Sequence[int]) -> int:
        """Position of a state in the basis.

        Raises:
            ValueError: If the state is not in this sector.
        """
        key = tuple(state)
        if key not in self._index:
            raise ValueError(
                f"State {key} is not in the {self.modes}-mode, n={self.photons} sector"
            )
        return self._index[key]


def _compositions(modes: int, photons: int, cap: int) -> Iterator[OccupationVector]:
    if modes == 1:
        if photons <= cap:
            yield (photons,)
        return
    for first in range(min(photons, cap) + 1):
        for rest in _compositions(modes - 1, photons - first, cap):
            yield (first, *rest)


def sector_size(modes: int, photons: int) -> int:
    return math.comb(photons + modes - 1, photons)


def sector_basis(modes: int, photons: int, max_occupation: int | None = None) -> SectorBasis:
    """Enumerate every occupation vector with the given total, in lexicographic order.

    Args:
        modes: Number of modes, at least 1.
        photons: Total number of quanta, at least 0.
        max_occupation: Optional per-mode cap (hard-core species).

    Returns:
        SectorBasis of size C(n+m-1, n) when uncapped.

    Raises:
        ValueError: If modes < 1 or photons < 0.
        SizeLimitError: If the uncapped sector is larger than the configured cap.
    """
    if modes < 1 or photons < 0:
        raise ValueError(f"Need modes >= 1 and photons >= 0, got m={modes}, n={photons}")
    size = sector_size(modes, photons)
    if size > Constants.SECTOR_SIZE_CAP:
        raise SizeLimitError(
            f"Sector with m={modes}, n={photons} has {size} states; "
            f"cap is {Constants.SECTOR_SIZE_CAP}"
        )
    cap = photons if max_occupation is None else max_occupation
    states = tuple(_compositions(modes, photons, cap))
    return SectorBasis(modes, photons, states, max_occupation)


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probability of every basis state of a sector."""

    basis: SectorBasis
    probs: np.ndarray

    def __post_init__(self) -> None:
        if self.probs.shape != (len(self.basis),):
            raise ValueError(
                f"Distribution has {self.probs.shape} entries for a basis of {len(self.basis)}"
            )
        if np.any(self.probs < 0):
            raise ValueError("Probabilities must be nonnegative")
        total = float(self.probs.sum())
        if abs(total - 1.0) > Constants.DISTRIBUTION_TOLERANCE:
            raise ValueError(f"Probabilities sum to {total!r}, not 1")

    def prob(self, state: Sequence[int]) -> float:
        key = tuple(state)
        return float(self.probs[self.basis.index(key)]) if key in self.basis else 0.0

    def as_dict(self) -> dict[OccupationVector, float]:
        return {s: float(p) for s, p in zip(self.basis.states, self.probs)}

    @property
    def total(self) -> float:
        return float(self.probs.sum())


def tv_distance(
    p: OutcomeDistribution, r: OutcomeDistribution | Mapping[OccupationVector, float]
) -> float:
    """Total variation distance 1/2 sum |p - r|.

    Args:
        p: Reference distribution.
        r: Distribution over the same basis, or empirical counts keyed by
            occupation vector (normalized here).

    Returns:
        Distance in [0, 1].

    Raises:
        ValueError: If the bases differ, a count key is outside the basis, or
            the counts are empty.
    """
    if isinstance(r, OutcomeDistribution):
        if r.basis.states != p.basis.states:
            raise ValueError("Distributions are defined over different bases")
        other = r.probs
    else:
        total = float(sum(r.values()))
        if total <= 0:
            raise ValueError("Empirical counts are empty")
        other = np.zeros(len(p.basis))
        for state, count in r.items():
            if tuple(state) not in p.basis:
                raise ValueError(f"Sampled state {tuple(state)} is outside the basis")
            other[p.basis.index(state)] += count / total
    return float(0.5 * np.abs(p.probs - other).sum())
