"""Tests for qalgebra module."""

import math

import numpy as np
import pytest

from qboson_sampling.errors import IllConditionedError
from qboson_sampling.qalgebra import (
    AdmissibilityStatus,
    BurbanParams,
    CharacteristicF,
    Flavor,
    QDeformation,
    Species,
    SpeciesKind,
    burban_f,
    characteristic_f,
    commutator_F,
    error_metrics,
    ladder_matrices,
    q_factorial,
    q_number,
    q_number_first_order,
    symmetric_gap,
    theorem1_check,
)

DELTAS = [0.1, 0.03, 0.01, 0.003, 0.001]


class TestQNumber:
    """Tests for q_number function."""

    def test_arik_coon_value(self) -> None:
        """Should sum 1 + q + q^2 + q^3 for n = 4."""
        assert q_number(4, QDeformation(0.99)) == pytest.approx(3.940399, rel=1e-12)

    def test_symmetric_value(self) -> None:
        """Should give q + 1/q for n = 2 in the symmetric flavor."""
        d = QDeformation(2.0, Flavor.SYMMETRIC)
        assert q_number(2, d) == pytest.approx(2.5)

    @pytest.mark.parametrize("flavor", list(Flavor))
    def test_undeformed_limit(self, flavor: Flavor) -> None:
        """Should return n exactly at q = 1 and within the dispatch tolerance."""
        for n in range(8):
            assert q_number(n, QDeformation(1.0, flavor)) == n
            assert q_number(n, QDeformation(1.0 + 1e-13, flavor)) == n

    @pytest.mark.parametrize("flavor", list(Flavor))
    def test_low_levels(self, flavor: Flavor) -> None:
        """Should give [0] = 0 and [1] = 1 for any q."""
        d = QDeformation(0.7, flavor)
        assert q_number(0, d) == pytest.approx(0.0, abs=1e-15)
        assert q_number(1, d) == pytest.approx(1.0)

    def test_rejects_negative_level(self) -> None:
        """Should raise ValueError for n < 0."""
        with pytest.raises(ValueError, match="nonnegative"):
            q_number(-1, QDeformation(0.9))

    def test_rejects_nonpositive_q(self) -> None:
        """Should refuse to build a deformation with q <= 0."""
        with pytest.raises(ValueError, match="positive"):
            QDeformation(0.0)


class TestQFactorial:
    """Tests for q_factorial function."""

    def test_empty_product(self) -> None:
        """Should return 1 for n = 0."""
        assert q_factorial(0, QDeformation(0.5)) == 1.0

    def test_value(self) -> None:
        """Should multiply [1][2][3] = 1 * 3 * 7 at q = 2."""
        assert q_factorial(3, QDeformation(2.0)) == pytest.approx(21.0)

    def test_reduces_to_factorial(self) -> None:
        """Should equal n! at q = 1."""
        assert q_factorial(6, QDeformation(1.0)) == 720.0

    def test_overflow(self) -> None:
        """Should raise OverflowError once the product leaves the float range."""
        with pytest.raises(OverflowError, match="overflows"):
            q_factorial(200, QDeformation(10.0))

    @pytest.mark.parametrize("q", [1.05, 1.5, 2.0])
    def test_outgrows_n_times_previous(self, q: float) -> None:
        """Should give q_factorial(n+1) > q_factorial(n) * n for q > 1."""
        d = QDeformation(q)
        for n in range(1, 25):
            assert q_factorial(n + 1, d) > q_factorial(n, d) * n


class TestFirstOrder:
    """Tests for q_number_first_order function."""

    def test_matches_to_second_order(self) -> None:
        """Should differ from [n]_q by O((q-1)^2)."""
        for delta in (1e-2, 1e-3):
            gap = abs(q_number(5, QDeformation(1 + delta)) - q_number_first_order(5, 1 + delta))
            assert gap < 20 * delta**2


class TestErrorMetrics:
    """Tests for error_metrics function."""

    def test_example_value(self) -> None:
        """Should give 4 - [4]_0.99 below the bound 0.06."""
        m = error_metrics(4, 0.99)
        assert m.delta_abs == pytest.approx(0.059601, rel=1e-9)
        assert m.delta_rel == pytest.approx(0.059601 / 4, rel=1e-9)
        assert m.abs_bound == pytest.approx(0.06)
        assert m.within_bounds

    @pytest.mark.parametrize("q", [0.5, 0.9, 0.99])
    def test_bounds_hold_on_grid(self, q: float) -> None:
        """Should stay within both bounds for n = 2..30."""
        violations = [n for n in range(2, 31) if not error_metrics(n, q).within_bounds]
        assert violations == []

    @pytest.mark.parametrize("q", [0.5, 0.9, 0.99])
    def test_bound_is_strict_from_three(self, q: float) -> None:
        """Should stay strictly below the absolute bound for n >= 3."""
        for n in range(3, 31):
            m = error_metrics(n, q)
            assert 0 < m.delta_abs < m.abs_bound

    def test_deformation_above_one(self) -> None:
        """Should report negative deviations outside the bounds for q > 1."""
        m = error_metrics(5, 1.05)
        assert m.delta_abs < 0
        assert not m.within_bounds

    def test_rejects_level_zero(self) -> None:
        """Should raise ValueError for n = 0."""
        with pytest.raises(ValueError, match="n >= 1"):
            error_metrics(0, 0.9)

    def test_rejects_q_one(self) -> None:
        """Should raise ValueError at q = 1."""
        with pytest.raises(ValueError, match="q in"):
            error_metrics(3, 1.0)


class TestSymmetricGap:
    """Tests for symmetric_gap function."""

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_first_order_slope(self, n: int) -> None:
        """Should approach -n(n-1)/2 * delta as q -> 1."""
        delta = 1e-4
        assert symmetric_gap(n, 1 + delta) / delta == pytest.approx(-n * (n - 1) / 2, rel=1e-2)

    def test_zero_below_level_two(self) -> None:
        """Should vanish for n = 0 and n = 1."""
        assert symmetric_gap(0, 1.2) == pytest.approx(0.0, abs=1e-15)
        assert symmetric_gap(1, 1.2) == pytest.approx(0.0, abs=1e-15)

    def test_rejects_q_one(self) -> None:
        """Should raise ValueError at q = 1."""
        with pytest.raises(ValueError, match="q != 1"):
            symmetric_gap(3, 1.0)


class TestBurbanF:
    """Tests for burban_f function."""

    def test_equal_exponent_branch(self) -> None:
        """Should give n q^(n-1) for alpha = gamma = 1."""
        p = BurbanParams(1.0, 0.0, 1.0, 0.0, q=1.1)
        assert burban_f(3, p) == pytest.approx(3 * 1.1**2)
        assert burban_f(3, p.with_q(1.0)) == pytest.approx(3.0)

    def test_reproduces_arik_coon(self) -> None:
        """Should equal [n]_q for alpha = 1, gamma = 0."""
        p = BurbanParams(1.0, 0.0, 0.0, 0.0, q=0.8)
        for n in range(6):
            assert burban_f(n, p) == pytest.approx(q_number(n, QDeformation(0.8)), abs=1e-12)

    def test_ill_conditioned_at_q_one(self) -> None:
        """Should raise IllConditionedError when q^alpha = q^gamma with alpha != gamma."""
        with pytest.raises(IllConditionedError, match="coincide"):
            burban_f(2, BurbanParams(0.3, 0.0, 0.7, 0.0, q=1.0))

    def test_rejects_nonpositive_q(self) -> None:
        """Should raise ValueError for q <= 0."""
        with pytest.raises(ValueError, match="q > 0"):
            burban_f(2, BurbanParams(0.3, 0.0, 0.7, 0.0, q=-1.0))


class TestTheorem1Check:
    """Tests for theorem1_check function."""

    def test_admissible_point_passes(self) -> None:
        """Should pass with slope near 2 when all four conditions hold."""
        report = theorem1_check(BurbanParams(0.3, 0.0, 0.7, 0.0), DELTAS)
        assert report.status is AdmissibilityStatus.PASS
        assert report.passed
        assert report.slope == pytest.approx(2.0, abs=0.1)
        assert all(s.gap0 == 0.0 for s in report.samples)

    @pytest.mark.parametrize(
        "params",
        [
            BurbanParams(0.3, 0.0, 0.9, 0.0),
            BurbanParams(0.3, 0.5, 0.7, 0.0),
            BurbanParams(0.3, 0.0, 0.7, 0.2),
            BurbanParams(0.3, 0.0, 0.7, 0.0, f0=0.5),
        ],
        ids=["alpha_plus_gamma", "beta", "nu", "f0"],
    )
    def test_single_violation_fails(self, params: BurbanParams) -> None:
        """Should fail when exactly one condition is broken."""
        assert theorem1_check(params, DELTAS).status is AdmissibilityStatus.FAIL

    def test_randomized_draws(self) -> None:
        """Should pass every admissible draw and fail every single violation."""
        gen = np.random.Generator(np.random.PCG64(11))
        for _ in range(50):
            alpha = gen.uniform(0.1, 0.4) if gen.random() < 0.5 else gen.uniform(0.6, 0.9)
            base = BurbanParams(alpha, 0.0, 1.0 - alpha, 0.0)
            assert theorem1_check(base, DELTAS).passed

            lo, hi = sorted((alpha, 1.0 - alpha))
            violations = [
                BurbanParams(lo, 0.0, hi + gen.uniform(0.1, 0.3), 0.0),
                BurbanParams(alpha, gen.uniform(0.2, 1.0), 1.0 - alpha, 0.0),
                BurbanParams(alpha, 0.0, 1.0 - alpha, gen.uniform(0.1, 0.5)),
                BurbanParams(alpha, 0.0, 1.0 - alpha, 0.0, f0=gen.uniform(0.1, 1.0)),
            ]
            for params in violations:
                assert theorem1_check(params, DELTAS).status is AdmissibilityStatus.FAIL

    def test_exact_match_is_indeterminate(self) -> None:
        """Should report INDETERMINATE when every gap is below the noise floor."""
        report = theorem1_check(BurbanParams(1.0, 0.0, 0.0, 0.0), DELTAS)
        assert report.status is AdmissibilityStatus.INDETERMINATE
        assert math.isnan(report.slope)

    def test_rejects_equal_exponents(self) -> None:
        """Should raise ValueError for alpha == gamma."""
        with pytest.raises(ValueError, match="alpha != gamma"):
            theorem1_check(BurbanParams(0.5, 0.0, 0.5, 0.0), DELTAS)

    def test_rejects_short_grid(self) -> None:
        """Should raise ValueError with fewer than four deltas."""
        with pytest.raises(ValueError, match="at least 4"):
            theorem1_check(BurbanParams(0.3, 0.0, 0.7, 0.0), [0.1, 0.01, 0.001])

    def test_rejects_narrow_grid(self) -> None:
        """Should raise ValueError when the grid spans less than a decade."""
        with pytest.raises(ValueError, match="decade"):
            theorem1_check(BurbanParams(0.3, 0.0, 0.7, 0.0), [0.1, 0.09, 0.08, 0.07])


class TestSpecies:
    """Tests for Species parsing."""

    def test_parses_standard(self) -> None:
        """Should parse 'standard'."""
        assert Species.parse("standard").kind is SpeciesKind.STANDARD

    def test_parses_qboson(self) -> None:
        """Should parse q:<float> with the Arik-Coon flavor by default."""
        species = Species.parse("q:0.9")
        assert species.deformation == QDeformation(0.9)
        assert Species.parse("q:0.9:sym").deformation == QDeformation(0.9, Flavor.SYMMETRIC)

    def test_parses_half_integer_spin(self) -> None:
        """Should parse spin:1/2 with a hard-core cap of one."""
        species = Species.parse("spin:1/2")
        assert species.kind is SpeciesKind.SPIN
        assert species.max_occupation == 1
        assert Species.parse("spin:3/2").max_occupation == 3

    @pytest.mark.parametrize("text", ["boson", "q:", "q:-1", "q:abc", "spin:0.7", "spin:0"])
    def test_rejects_invalid(self, text: str) -> None:
        """Should raise ValueError naming the bad text."""
        with pytest.raises(ValueError, match="Invalid species"):
            Species.parse(text)


class TestCharacteristicF:
    """Tests for characteristic_f and CharacteristicF."""

    def test_standard_values(self) -> None:
        """Should tabulate sqrt(n!)."""
        f = characteristic_f(Species.standard(), 4)
        assert f(4) == pytest.approx(math.sqrt(24))
        assert f.raise_ratio(2) == pytest.approx(math.sqrt(3))

    def test_spin_table_ends_at_two_s(self) -> None:
        """Should store levels up to 2S and give zero raise ratio at the top."""
        f = characteristic_f(Species.spin_s("1/2"), 2)
        assert f.max_level == 1
        assert f.raise_ratio(1) == 0.0

    def test_spin_cutoff_limit(self) -> None:
        """Should reject a cutoff beyond 2S + 1."""
        with pytest.raises(ValueError, match="exceeds 2S\\+1"):
            characteristic_f(Species.spin_s(1), 4)

    def test_custom_requires_unit_ground(self) -> None:
        """Should reject a custom table with f(0) != 1."""
        with pytest.raises(ValueError, match="f\\(0\\) = 1"):
            CharacteristicF.custom([2.0, 1.0])

    def test_custom_rejects_nonpositive(self) -> None:
        """Should reject nonpositive entries."""
        with pytest.raises(ValueError, match="positive"):
            CharacteristicF.custom([1.0, 0.0])

    def test_raise_past_cutoff(self) -> None:
        """Should raise ValueError past the cutoff of an unbounded species."""
        f = characteristic_f(Species.standard(), 2)
        with pytest.raises(ValueError, match="cutoff"):
            f.raise_ratio(2)


class TestCommutatorF:
    """Tests for commutator_F function."""

    def test_standard_is_one(self) -> None:
        """Should give F(n) = 1 for standard bosons."""
        f = characteristic_f(Species.standard(), 8)
        for n in range(8):
            assert commutator_F(f, n) == pytest.approx(1.0, abs=1e-12)

    def test_qboson_is_q_power(self) -> None:
        """Should give F(n) = q^n for q-bosons."""
        f = characteristic_f(Species.qboson(0.9), 8)
        for n in range(8):
            assert commutator_F(f, n) == pytest.approx(0.9**n, abs=1e-12)

    def test_spin(self) -> None:
        """Should give F(n) = 2S - 2n for spin-S bosons."""
        f = characteristic_f(Species.spin_s("3/2"), 3)
        for n in range(3):
            assert commutator_F(f, n) == pytest.approx(3 - 2 * n, abs=1e-12)


class TestLadderMatrices:
    """Tests for ladder_matrices function."""

    def test_q_commutation_off_boundary(self) -> None:
        """Should satisfy a a^dagger - q a^dagger a = I away from the truncation edge."""
        q = 0.8
        rep = ladder_matrices(characteristic_f(Species.qboson(q), 6), 6)
        relation = rep.annihilation @ rep.creation - q * rep.creation @ rep.annihilation
        assert np.allclose(relation[:5, :5], np.eye(5), atol=1e-12)

    def test_creation_is_adjoint(self) -> None:
        """Should return creation as the conjugate transpose of annihilation."""
        rep = ladder_matrices(characteristic_f(Species.standard(), 4), 5)
        assert np.array_equal(rep.creation, rep.annihilation.conj().T)
        assert np.allclose(np.diag(rep.number), np.arange(5))

    def test_rejects_oversized_dimension(self) -> None:
        """Should raise ValueError when f has too few levels."""
        with pytest.raises(ValueError, match="f stops at"):
            ladder_matrices(characteristic_f(Species.standard(), 3), 5)
