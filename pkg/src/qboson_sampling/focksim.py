"""Exact fixed-sector simulation of generalized bosons in linear mode-mixing circuits.

A target unitary is decomposed into a rectangular mesh of two-mode layers. Each
layer is the exponential exp(-i G) of the generator

    G = theta (e^{i phi} a_i^dagger a_j + e^{-i phi} a_j^dagger a_i)

built from the ladder action of the species' characteristic function, followed
by output phases exp(i sum_k phi_k N_k). On one photon a layer acts on modes
(i, j) as

    [[cos theta, -i e^{i phi} sin theta], [-i e^{-i phi} sin theta, cos theta]]

so theta = pi/4, phi = 0 is the balanced beamsplitter. Deformed sampling runs
the mesh decomposed at q = 1 with deformed generators; ``substitution_oracle``
gives the alternative that expands the input creation operators directly.

Random numbers come from PCG64 generators. Independent streams for one seed are
derived with ``numpy.random.SeedSequence(seed).spawn(k)`` (``spawn_rngs``): the
CLI draws its Haar unitary and its samples from two children of the job seed,
and the engine check gives every mode count of a seed its own child.
"""

import math
from collections import defaultdict
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
import scipy.linalg

from .config.constants import Constants
from .errors import SizeLimitError
from .permanent import ModeUnitary, distribution_permanent
from .qalgebra import CharacteristicF, Species, characteristic_f
from .sector import (
    OccupationVector,
    OutcomeDistribution,
    SectorBasis,
    check_occupation,
    sector_basis,
    tv_distance,
)

__all__ = [
    "BeamsplitterLayer",
    "EquivalenceReport",
    "MeshCircuit",
    "OutcomeDistribution",
    "SectorBasis",
    "StateVector",
    "balanced_mesh",
    "beamsplitter_generator",
    "clements_decompose",
    "distribution_from_state",
    "engine_equivalence",
    "evolve",
    "haar_unitary",
    "input_state",
    "mesh_outcome_distribution",
    "mesh_reconstruct",
    "outcome_distribution",
    "rng",
    "sample_outcomes",
    "sector_basis",
    "sector_for",
    "spawn_rngs",
    "species_f",
    "substitution_oracle",
    "tv_distance",
]


def rng(seed: int) -> np.random.Generator:
    """Portable PCG64 generator for a seed."""
    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent child streams of one seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


SeedLike = int | np.random.Generator


def _generator(seed: SeedLike) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else rng(seed)


@dataclass(frozen=True)
class BeamsplitterLayer:
    """Two-mode mixing layer on modes (i, j)."""

    i: int
    j: int
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError(f"Beamsplitter needs two distinct modes, got ({self.i}, {self.j})")
        if self.i < 0 or self.j < 0:
            raise ValueError("Mode indices must be nonnegative")
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("Beamsplitter angles must be finite")


@dataclass(frozen=True)
class MeshCircuit:
    """Layers in application order followed by one output phase per mode."""

    modes: int
    layers: tuple[BeamsplitterLayer, ...]
    phases: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.phases) != self.modes:
            raise ValueError(f"Mesh needs {self.modes} output phases, got {len(self.phases)}")
        for layer in self.layers:
            if max(layer.i, layer.j) >= self.modes:
                raise ValueError(
                    f"Layer on modes ({layer.i}, {layer.j}) exceeds {self.modes} modes"
                )


@dataclass(frozen=True, eq=False)
class StateVector:
    basis: SectorBasis
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, state: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.basis.index(state)])


def _block(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [[c, -1j * np.exp(1j * phi) * s], [-1j * np.exp(-1j * phi) * s, c]], dtype=complex
    )


def _embed(modes: int, layer: BeamsplitterLayer) -> np.ndarray:
    out = np.eye(modes, dtype=complex)
    idx = [layer.i, layer.j]
    out[np.ix_(idx, idx)] = _block(layer.theta, layer.phi)
    return out


def balanced_mesh() -> MeshCircuit:
    """Single balanced layer on two modes."""
    return MeshCircuit(2, (BeamsplitterLayer(0, 1, math.pi / 4, 0.0),), (0.0, 0.0))


def mesh_reconstruct(mesh: MeshCircuit) -> ModeUnitary:
    """Multiply the embedded layers in order, then the output phase diagonal."""
    u = np.eye(mesh.modes, dtype=complex)
    for layer in mesh.layers:
        u = _embed(mesh.modes, layer) @ u
    return ModeUnitary(np.diag(np.exp(1j * np.asarray(mesh.phases))) @ u)


def _null_from_right(v: np.ndarray, row: int, col: int) -> BeamsplitterLayer:
    # v @ T^-1 on columns (col, col+1) zeroes v[row, col]
    a, b = v[row, col], v[row, col + 1]
    if abs(a) == 0:
        return BeamsplitterLayer(col, col + 1, 0.0, 0.0)
    theta = math.atan2(abs(a), abs(b))
    phi = float(np.angle(b) - np.angle(a) - math.pi / 2)
    return BeamsplitterLayer(col, col + 1, theta, phi)


def _null_from_left(v: np.ndarray, row: int, col: int) -> BeamsplitterLayer:
    # T @ v on rows (row-1, row) zeroes v[row, col]
    a, b = v[row - 1, col], v[row, col]
    if abs(b) == 0:
        return BeamsplitterLayer(row - 1, row, 0.0, 0.0)
    theta = math.atan2(abs(b), abs(a))
    phi = float(np.angle(a) - np.angle(b) + math.pi / 2)
    return BeamsplitterLayer(row - 1, row, theta, phi)


def clements_decompose(u: ModeUnitary) -> MeshCircuit:
    """Decompose a unitary into m(m-1)/2 nearest-neighbour layers plus output phases.

    Elements below the diagonal are nulled alternately from the right and from
    the left, in the rectangular order. The left-hand layers are then moved
    through the remaining diagonal: T(theta, phi)^-1 D = D T(theta, phi') with
    phi' = phi + pi + arg d_j - arg d_i.

    Args:
        u: Target unitary.

    Returns:
        MeshCircuit whose reconstruction equals ``u`` to about 1e-12.
    """
    m = u.dim
    v = u.matrix.copy()
    right: list[BeamsplitterLayer] = []
    left: list[BeamsplitterLayer] = []
    for k, i in enumerate(range(m - 2, -1, -1)):
        if k % 2 == 0:
            for j in reversed(range(m - 1 - i)):
                layer = _null_from_right(v, i + j + 1, j)
                v = v @ _embed(m, layer).conj().T
                right.append(layer)
        else:
            for j in range(m - 1 - i):
                layer = _null_from_left(v, i + j + 1, j)
                v = _embed(m, layer) @ v
                left.append(layer)

    diagonal = np.diag(v)
    pushed = [
        BeamsplitterLayer(
            layer.i,
            layer.j,
            layer.theta,
            float(
                layer.phi + math.pi + np.angle(diagonal[layer.j]) - np.angle(diagonal[layer.i])
            ),
        )
        for layer in reversed(left)
    ]
    phases = tuple(float(p) for p in np.angle(diagonal))
    return MeshCircuit(m, tuple(right + pushed), phases)


def species_f(species: Species, photons: int) -> CharacteristicF:
    """Characteristic function covering every occupation reachable with ``photons``."""
    cutoff = max(1, photons)
    if species.max_occupation is not None:
        cutoff = min(cutoff, species.max_occupation + 1)
    return characteristic_f(species, cutoff)


def sector_for(f: CharacteristicF, modes: int, photons: int) -> SectorBasis:
    """Sector basis restricted to the occupations the species allows."""
    return sector_basis(modes, photons, f.species.max_occupation)


def _check_cutoff(f: CharacteristicF, basis: SectorBasis) -> None:
    highest = max((max(s) for s in basis.states), default=0)
    if highest > f.max_level:
        raise ValueError(
            f"Sector reaches occupation {highest}; characteristic function stops at {f.max_level}"
        )


def input_state(source: Sequence[int], f: CharacteristicF, basis: SectorBasis) -> StateVector:
    """Unit vector on the generalized Fock state of the input occupation.

    Raises:
        ValueError: If an occupation exceeds the species cutoff or the state is
            outside the basis.
    """
    occupation = check_occupation(source)
    cap = f.species.max_occupation
    if cap is not None and max(occupation) > cap:
        raise ValueError(f"Occupation {occupation} exceeds the {f.species.label} limit of {cap}")
    if max(occupation) > f.max_level:
        raise ValueError(f"Occupation {occupation} exceeds the cutoff {f.max_level}")
    amplitudes = np.zeros(len(basis), dtype=complex)
    amplitudes[basis.index(occupation)] = 1.0
    return StateVector(basis, amplitudes)


def beamsplitter_generator(
    layer: BeamsplitterLayer, f: CharacteristicF, basis: SectorBasis
) -> np.ndarray:
    """Hermitian generator of one layer on a fixed-number sector.

    The hop moving one quantum from mode j to mode i has matrix element
    theta e^{i phi} (f(n_i+1)/f(n_i)) (f(n_j)/f(n_j-1)).
    """
    if max(layer.i, layer.j) >= basis.modes:
        raise ValueError(f"Layer on modes ({layer.i}, {layer.j}) exceeds {basis.modes} modes")
    _check_cutoff(f, basis)

    hop = np.zeros((len(basis), len(basis)), dtype=complex)
    for col, state in enumerate(basis.states):
        if state[layer.j] == 0:
            continue
        target = list(state)
        target[layer.i] += 1
        target[layer.j] -= 1
        if tuple(target) not in basis:
            continue
        coef = f.raise_ratio(state[layer.i]) * f.raise_ratio(state[layer.j] - 1)
        hop[basis.index(target), col] += coef
    hop *= layer.theta * np.exp(1j * layer.phi)
    return hop + hop.conj().T


def _layer_propagator(generator: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = scipy.linalg.eigh(generator)
    return (vectors * np.exp(-1j * eigenvalues)) @ vectors.conj().T


def evolve(state: StateVector, mesh: MeshCircuit, f: CharacteristicF) -> StateVector:
    """Propagate a sector state through every mesh layer and the output phases.

    Raises:
        ValueError: If the state's mode count differs from the mesh's.
    """
    basis = state.basis
    if basis.modes != mesh.modes:
        raise ValueError(f"State has {basis.modes} modes, mesh has {mesh.modes}")
    amplitudes = state.amplitudes.copy()
    for layer in mesh.layers:
        if layer.theta == 0.0:
            continue
        amplitudes = _layer_propagator(beamsplitter_generator(layer, f, basis)) @ amplitudes
    occupations = np.array(basis.states, dtype=float).reshape(len(basis), basis.modes)
    amplitudes = np.exp(1j * (occupations @ np.asarray(mesh.phases))) * amplitudes
    return StateVector(basis, amplitudes)


def distribution_from_state(state: StateVector) -> OutcomeDistribution:
    """Born-rule probabilities in the orthonormal generalized Fock basis."""
    return OutcomeDistribution(state.basis, np.abs(state.amplitudes) ** 2)


def mesh_outcome_distribution(
    mesh: MeshCircuit, source: Sequence[int], f: CharacteristicF
) -> OutcomeDistribution:
    """Outcome distribution of an explicit mesh."""
    occupation = check_occupation(source)
    basis = sector_for(f, len(occupation), sum(occupation))
    return distribution_from_state(evolve(input_state(occupation, f, basis), mesh, f))


def outcome_distribution(
    u: ModeUnitary, source: Sequence[int], f: CharacteristicF
) -> OutcomeDistribution:
    """Outcome distribution of the mesh that realizes ``u`` at q = 1, run with species ``f``.

    A single photon only sees the hop factor f(1)^2. It is 1 for standard bosons,
    q-bosons of either flavor and spin-1/2, so one photon follows |U[j, i]|^2 for
    all of them. Spin S >= 1 has f(1)^2 = 2S and every layer angle is scaled by 2S,
    so its single-photon distribution differs from the standard one.

    Raises:
        ValueError: If the input does not match the unitary's modes or the species.
    """
    occupation = check_occupation(source)
    if len(occupation) != u.dim:
        raise ValueError(f"Input occupation has {len(occupation)} modes, unitary has {u.dim}")
    return mesh_outcome_distribution(clements_decompose(u), occupation, f)


def substitution_oracle(
    u: ModeUnitary, source: Sequence[int], f: CharacteristicF
) -> StateVector:
    """Expand prod_i (sum_j U[j, i] a_j^dagger)^{l_i} |0> with generalized ladder actions.

    The result is normalized. For standard bosons it equals the mesh evolution;
    for deformed species the two definitions generally differ.

    Raises:
        SizeLimitError: If n > 5 or m > 6.
        ValueError: If the expansion vanishes.
    """
    occupation = check_occupation(source)
    m, n = len(occupation), sum(occupation)
    if m != u.dim:
        raise ValueError(f"Input occupation has {m} modes, unitary has {u.dim}")
    if n > Constants.SUBSTITUTION_PHOTON_CAP or m > Constants.SUBSTITUTION_MODE_CAP:
        raise SizeLimitError(
            f"Substitution oracle is capped at n <= {Constants.SUBSTITUTION_PHOTON_CAP}, "
            f"m <= {Constants.SUBSTITUTION_MODE_CAP}; got n={n}, m={m}"
        )
    basis = sector_for(f, m, n)
    _check_cutoff(f, basis)

    terms: dict[OccupationVector, complex] = {(0,) * m: 1.0 + 0j}
    for mode, count in enumerate(occupation):
        for _ in range(count):
            expanded: dict[OccupationVector, complex] = defaultdict(complex)
            for state, amp in terms.items():
                for j in range(m):
                    ratio = f.raise_ratio(state[j])
                    if ratio == 0.0 or u.matrix[j, mode] == 0:
                        continue
                    raised = state[:j] + (state[j] + 1,) + state[j + 1 :]
                    expanded[raised] += amp * u.matrix[j, mode] * ratio
            terms = expanded
        terms = {s: a / f(count) for s, a in terms.items()}

    amplitudes = np.zeros(len(basis), dtype=complex)
    for state, amp in terms.items():
        amplitudes[basis.index(state)] += amp
    norm = np.linalg.norm(amplitudes)
    if norm < Constants.NORM_TOLERANCE:
        raise ValueError("Substituted input state vanishes for this species")
    return StateVector(basis, amplitudes / norm)


def haar_unitary(m: int, seed: SeedLike) -> ModeUnitary:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix.

    The phases of R's diagonal are folded into Q so the distribution is uniform.
    """
    if m < 1:
        raise ValueError(f"Need at least one mode, got m={m}")
    gen = _generator(seed)
    z = (gen.standard_normal((m, m)) + 1j * gen.standard_normal((m, m))) / math.sqrt(2)
    q, r = scipy.linalg.qr(z)
    d = np.diag(r)
    return ModeUnitary(q * (d / np.abs(d)))


def sample_outcomes(
    dist: OutcomeDistribution, seed: SeedLike, count: int
) -> list[OccupationVector]:
    """Draw ``count`` i.i.d. outcomes by inverse-CDF lookup from a seed or a generator."""
    if count < 0:
        raise ValueError(f"Sample count must be nonnegative, got {count}")
    if count == 0:
        return []
    cdf = np.cumsum(dist.probs)
    cdf /= cdf[-1]
    picks = np.searchsorted(cdf, _generator(seed).random(count), side="right")
    picks = np.minimum(picks, len(cdf) - 1)
    return [dist.basis.states[i] for i in picks]


def _spread_photons(modes: int, photons: int) -> OccupationVector:
    counts = [0] * modes
    for k in range(photons):
        counts[k % modes] += 1
    return tuple(counts)


@dataclass(frozen=True)
class EquivalenceCase:
    seed: int
    modes: int
    source: OccupationVector
    tv_permanent_mesh: float
    tv_mesh_substitution: float
    tv_permanent_substitution: float

    @property
    def worst(self) -> float:
        return max(
            self.tv_permanent_mesh, self.tv_mesh_substitution, self.tv_permanent_substitution
        )


@dataclass(frozen=True)
class EquivalenceReport:
    cases: tuple[EquivalenceCase, ...]

    @property
    def max_tv(self) -> float:
        return max((c.worst for c in self.cases), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_tv < Constants.DISTRIBUTION_TOLERANCE


def _equivalence_cases(seed: int, max_modes: int, max_photons: int) -> list[EquivalenceCase]:
    cases = []
    streams = spawn_rngs(seed, max_modes - 1)
    for m in range(2, max_modes + 1):
        u = haar_unitary(m, streams[m - 2])
        for n in range(1, max_photons + 1):
            source = _spread_photons(m, n)
            f = species_f(Species.standard(), n)
            by_permanent = distribution_permanent(u, source)
            by_mesh = outcome_distribution(u, source, f)
            by_substitution = distribution_from_state(substitution_oracle(u, source, f))
            cases.append(
                EquivalenceCase(
                    seed,
                    m,
                    source,
                    tv_distance(by_permanent, by_mesh),
                    tv_distance(by_mesh, by_substitution),
                    tv_distance(by_permanent, by_substitution),
                )
            )
    return cases


def engine_equivalence(
    seeds: Sequence[int], max_modes: int = 4, max_photons: int = 3, workers: int = 1
) -> EquivalenceReport:
    """Compare the permanent, mesh and substitution engines for standard bosons.

    Every seed draws one Haar unitary per mode count 2..max_modes and runs every
    photon number 1..max_photons. Seeds run in up to ``workers`` processes and
    results are collected in seed order.
    """
    if max_modes < 2 or max_photons < 1:
        raise ValueError("Need max_modes >= 2 and max_photons >= 1")
    run = partial(_equivalence_cases, max_modes=max_modes, max_photons=max_photons)
    if workers <= 1 or len(seeds) <= 1:
        per_seed = [run(seed) for seed in seeds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_seed = list(pool.map(run, seeds))
    return EquivalenceReport(tuple(case for cases in per_seed for case in cases))
