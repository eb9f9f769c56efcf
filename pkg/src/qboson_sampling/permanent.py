"""Permanent and q-permanent kernels and the permanent-based outcome engine."""

import itertools
import math
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import partial

import numpy as np

from .config.constants import Constants
from .errors import SizeLimitError
from .sector import (
    OccupationVector,
    OutcomeDistribution,
    check_occupation,
    sector_basis,
)


class PermanentAlgorithm(Enum):
    NAIVE = "naive"
    RYSER = "ryser"


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """An m x m unitary mixing m modes; U[j, i] is the amplitude from input i to output j."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"Mode unitary must be square, got shape {u.shape}")
        deviation = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max(initial=0.0)
        if deviation > Constants.UNITARY_TOLERANCE:
            raise ValueError(f"Matrix is not unitary (max |U^dagger U - I| = {deviation:.3g})")
        object.__setattr__(self, "matrix", u)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def _square(a: np.ndarray, cap: int, label: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{label} needs a square matrix, got shape {a.shape}")
    if a.shape[0] > cap:
        raise SizeLimitError(f"{label} of a {a.shape[0]}x{a.shape[0]} matrix exceeds cap {cap}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{label} needs finite entries")
    return a


def _naive(a: np.ndarray) -> complex:
    n = a.shape[0]
    rows = a.tolist()
    return complex(
        sum(math.prod(rows[i][s[i]] for i in range(n)) for s in itertools.permutations(range(n)))
    )


def _ryser_range(a: np.ndarray, start: int, stop: int) -> complex:
    """Signed Ryser terms for Gray-code steps start..stop-1.

    Row sums are rebuilt from scratch at ``start`` so ranges are independent.
    """
    n = a.shape[0]
    gray = start ^ (start >> 1)
    columns = [j for j in range(n) if gray >> j & 1]
    row_sums = a[:, columns].sum(axis=1) if columns else np.zeros(n, dtype=complex)
    total = 0j
    for k in range(start, stop):
        if k != start:
            j = (k & -k).bit_length() - 1
            gray ^= 1 << j
            if gray >> j & 1:
                row_sums += a[:, j]
            else:
                row_sums -= a[:, j]
        if gray:
            term = complex(np.prod(row_sums))
            total += -term if gray.bit_count() & 1 else term
    return total


def ryser_parallel(a: np.ndarray, partitions: int = 1, workers: int = 1) -> complex:
    """Ryser permanent over contiguous Gray-code ranges.

    Partial sums are reduced in range order, so the result is bit-stable for a
    fixed partition count regardless of the worker count.

    Args:
        a: Square complex matrix.
        partitions: Number of contiguous ranges the 2^n subsets are split into.
        workers: Worker processes; ranges run in separate processes when above 1.

    Returns:
        The permanent.
    """
    a = _square(a, Constants.RYSER_PERMANENT_CAP, "Ryser permanent")
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    if partitions < 1 or workers < 1:
        raise ValueError("Partitions and workers must be positive")

    subsets = 1 << n
    partitions = min(partitions, subsets)
    bounds = [subsets * i // partitions for i in range(partitions + 1)]
    ranges = list(zip(bounds[:-1], bounds[1:]))
    if workers == 1 or partitions == 1:
        partials = [_ryser_range(a, lo, hi) for lo, hi in ranges]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(partial(_ryser_range, a), bounds[:-1], bounds[1:]))

    total = 0j
    for part in partials:
        total += part
    return -total if n & 1 else total


def permanent(
    a: np.ndarray, algorithm: PermanentAlgorithm = PermanentAlgorithm.RYSER
) -> complex:
    """Permanent sum over permutations of prod_i A[i, sigma(i)].

    Args:
        a: Square complex matrix, n <= 14 for NAIVE and n <= 28 for RYSER.
        algorithm: NAIVE enumerates S_n; RYSER iterates subsets in Gray-code order.

    Returns:
        The permanent; 1 for the empty matrix.

    Raises:
        ValueError: If the matrix is not square or not finite.
        SizeLimitError: If n exceeds the algorithm's cap.
    """
    if algorithm is PermanentAlgorithm.NAIVE:
        return _naive(_square(a, Constants.NAIVE_PERMANENT_CAP, "Naive permanent"))
    return ryser_parallel(a)


def inversion_number(sigma: Sequence[int]) -> int:
    """Number of pairs i < j with sigma(i) > sigma(j)."""
    return sum(1 for i, j in itertools.combinations(range(len(sigma)), 2) if sigma[i] > sigma[j])


def q_permanent(
    a: np.ndarray,
    q: float,
    statistic: Callable[[Sequence[int]], int] = inversion_number,
) -> complex:
    """Permanent with each permutation weighted by q ** statistic(sigma).

    With the default inversion-number statistic, q = 1 gives the permanent and
    q = 0 the product of the diagonal.

    Raises:
        ValueError: If the matrix is not square or not finite.
        SizeLimitError: If n exceeds 12.
    """
    a = _square(a, Constants.Q_PERMANENT_CAP, "q-permanent")
    n = a.shape[0]
    rows = a.tolist()
    total = 0j
    for sigma in itertools.permutations(range(n)):
        total += q ** statistic(sigma) * math.prod(rows[i][sigma[i]] for i in range(n))
    return complex(total)


def _photon_totals(outcome: OccupationVector, source: OccupationVector, modes: int) -> int:
    if len(outcome) != modes or len(source) != modes:
        raise ValueError(f"Occupations must cover all {modes} modes")
    n = sum(source)
    if sum(outcome) != n:
        raise ValueError(f"Photon number mismatch: outcome has {sum(outcome)}, input has {n}")
    return n


def build_lambda(u: ModeUnitary, outcome: Sequence[int], source: Sequence[int]) -> np.ndarray:
    """Submatrix with column i of U repeated l_i times and row j repeated k_j times.

    Repeats are adjacent and modes ascend, so the layout is reproducible.

    Args:
        u: Mode unitary.
        outcome: Output occupation k.
        source: Input occupation l.

    Returns:
        The n x n matrix Lambda[k|l].

    Raises:
        ValueError: If the occupations are invalid, mismatched or empty.
    """
    outputs, inputs = check_occupation(outcome), check_occupation(source)
    n = _photon_totals(outputs, inputs, u.dim)
    if n < 1:
        raise ValueError("Lambda[k|l] needs at least one photon")
    rows = [j for j, count in enumerate(outputs) for _ in range(count)]
    cols = [i for i, count in enumerate(inputs) for _ in range(count)]
    return u.matrix[np.ix_(rows, cols)]


def _factorial_product(occupation: OccupationVector) -> int:
    return math.prod(math.factorial(c) for c in occupation)


def prob_outcome(u: ModeUnitary, outcome: Sequence[int], source: Sequence[int]) -> float:
    """Probability |Perm(Lambda[k|l])|^2 / (prod l_i! prod k_i!) of outcome k from input l."""
    lam = build_lambda(u, outcome, source)
    weight = _factorial_product(check_occupation(outcome)) * _factorial_product(
        check_occupation(source)
    )
    return abs(permanent(lam)) ** 2 / weight


def distribution_permanent(u: ModeUnitary, source: Sequence[int]) -> OutcomeDistribution:
    """Outcome probabilities of every k in the input's sector from permanents.

    Raises:
        SizeLimitError: If the outcome space is larger than the sector cap.
    """
    inputs = check_occupation(source)
    if len(inputs) != u.dim:
        raise ValueError(f"Input occupation has {len(inputs)} modes, unitary has {u.dim}")
    basis = sector_basis(u.dim, sum(inputs))
    probs = np.array([prob_outcome(u, k, inputs) for k in basis.states])
    return OutcomeDistribution(basis, probs)


def random_complex_matrix(n: int, seed: int) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussian entries, reproducible for a seed."""
    gen = np.random.Generator(np.random.PCG64(seed))
    return (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / math.sqrt(2)


@dataclass(frozen=True)
class BenchmarkRow:
    size: int
    algorithm: PermanentAlgorithm
    wall_time_ns: int
    value: complex


def benchmark(
    sizes: Sequence[int],
    algorithms: Sequence[PermanentAlgorithm],
    seed: int,
    repeats: int = 1,
    workers: int = 1,
) -> list[BenchmarkRow]:
    """Time each algorithm on one random matrix per size; keeps the fastest repeat."""
    rows = []
    for n in sizes:
        a = random_complex_matrix(n, seed + n)
        for algorithm in algorithms:
            best = None
            value = 0j
            for _ in range(max(1, repeats)):
                started = time.perf_counter_ns()
                if algorithm is PermanentAlgorithm.RYSER:
                    value = ryser_parallel(a, partitions=workers, workers=workers)
                else:
                    value = permanent(a, algorithm)
                elapsed = time.perf_counter_ns() - started
                best = elapsed if best is None else min(best, elapsed)
            rows.append(BenchmarkRow(n, algorithm, best or 0, value))
    return rows
