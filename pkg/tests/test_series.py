import gmpy2
import pytest
from gmpy2 import mpfr

from boxeig.numerics import make_context, to_real, working_context
from boxeig.oracle import square_well_energy
from boxeig.potential import parse_potential
from boxeig.series import (boundary_det, boundary_even, boundary_odd,
                           boundary_value, evaluate_series,
                           series_coefficients, wavefunction_samples)

CTX = make_context(30)


class TestRecurrence:
    def test_free_particle_is_cosine(self, free_particle):
        # V=0, seed (1,0): a_{2m} = (-E)^m / (2m)!  -> psi = cos(sqrt(E) x)
        sol = series_coefficients(free_particle, 1, 1, 0, 6, CTX)
        import math

        for m in range(6):
            expect = (-1.0) ** m / math.factorial(2 * m)
            assert abs(float(sol.a[2 * m]) - expect) < 1e-25
        assert all(sol.a[l] == 0 for l in range(1, sol.degree + 1, 2))

    def test_even_parity_degree_counts_seed(self, quartic):
        sol = series_coefficients(quartic, 1, 1, 0, 25, CTX)
        assert sol.degree == 48
        assert sol.nonzero_terms == 25

    def test_odd_parity_degree(self, quartic):
        sol = series_coefficients(quartic, 1, 0, 1, 25, CTX)
        assert sol.degree == 49
        assert sol.a[0] == 0 and sol.a[1] == 1

    def test_general_seed_fills_all_indices(self):
        p = parse_potential("x^2 - x^3")
        sol = series_coefficients(p, 1, 1, 0, 10, CTX)
        assert sol.degree == 9
        assert any(sol.a[l] != 0 for l in range(3, 10, 2))

    def test_recurrence_identity_spot_check(self, quartic):
        # l(l-1) a_l == v_2 a_{l-4} + v_4 a_{l-6} - E a_{l-2} at l=8
        E = to_real("2.5", CTX)
        sol = series_coefficients(quartic, E, 1, 0, 10, CTX)
        a = sol.a
        with working_context(CTX):
            lhs = 8 * 7 * a[8]
            rhs = a[4] + a[2] - E * a[6]
            assert abs(lhs - rhs) <= abs(lhs) * mpfr("1e-25")

    def test_terms_validation(self, quartic):
        with pytest.raises(ValueError):
            series_coefficients(quartic, 1, 1, 0, 0, CTX)


class TestEvaluate:
    def test_polynomial_value(self, free_particle):
        sol = series_coefficients(free_particle, 0, 1, 0, 1, CTX)
        v, mx = evaluate_series(sol, 2, CTX)
        assert v == 1 and mx == 1

    def test_audit_tracks_largest_term(self, quartic):
        sol = series_coefficients(quartic, 50, 1, 0, 40, CTX)
        v, mx = evaluate_series(sol, 5, CTX)
        assert mx > abs(v)  # alternating sum cancels


class TestBoundaryFunctionals:
    def test_even_root_at_box_ground_state(self, free_particle):
        # empty box: even functional vanishes at E = (pi/2L)^2
        E = square_well_energy(2, 1, CTX)
        be = boundary_even(free_particle, E, 2, 60, CTX)
        assert abs(be.value) < mpfr("1e-25")
        assert be.cancellation_digits >= 0

    def test_odd_root_at_second_level(self, free_particle):
        E = square_well_energy(2, 2, CTX)
        bo = boundary_odd(free_particle, E, 2, 60, CTX)
        assert abs(bo.value) < mpfr("1e-24")

    def test_even_odd_reject_asymmetric(self):
        p = parse_potential("x^3")
        for fn in (boundary_even, boundary_odd):
            with pytest.raises(ValueError):
                fn(p, 1, 1, 10, CTX)

    def test_sign_change_brackets_root(self, quartic):
        lo = boundary_even(quartic, 1, 5, 120, CTX)
        hi = boundary_even(quartic, 2, 5, 120, CTX)
        assert gmpy2.sign(lo.value) != gmpy2.sign(hi.value)

    def test_determinant_matches_parity_split(self, free_particle):
        # symmetric potential: det root coincides with the even-series root
        E = square_well_energy(2, 1, CTX)
        bd = boundary_det(free_particle, E, 2, 120, CTX)
        assert abs(bd.value) < mpfr("1e-20") * bd.max_term_magnitude

    def test_determinant_audit_compounds(self, quartic):
        bd = boundary_det(quartic, 1, 5, 240, CTX)
        per_sum = boundary_even(quartic, 1, 5, 120, CTX)
        assert bd.cancellation_digits >= per_sum.cancellation_digits

    def test_dispatch(self, free_particle):
        E = square_well_energy(2, 1, CTX)
        a = boundary_value(free_particle, E, 2, 60, "even", CTX)
        b = boundary_even(free_particle, E, 2, 60, CTX)
        assert a.value == b.value
        with pytest.raises(ValueError):
            boundary_value(free_particle, E, 2, 60, "both", CTX)


class TestWavefunctionSamples:
    def test_grid_shape_and_endpoints(self, free_particle):
        E = square_well_energy(2, 1, CTX)
        rows = wavefunction_samples(free_particle, E, 2, 60, (1, 0), 21, CTX)
        assert len(rows) == 21
        assert rows[0][0] == -2 and rows[-1][0] == 2
        # converged eigenfunction vanishes at both walls
        assert abs(rows[0][1]) < mpfr("1e-24")
        assert abs(rows[-1][1]) < mpfr("1e-24")

    def test_even_seed_gives_even_function(self, quartic):
        rows = wavefunction_samples(quartic, 1, 2, 60, (1, 0), 9, CTX)
        mid = rows[4][1]
        assert mid != 0
        for i in range(4):
            assert abs(rows[i][1] - rows[8 - i][1]) < abs(mid) * mpfr("1e-24")

    def test_npoints_validation(self, free_particle):
        with pytest.raises(ValueError):
            wavefunction_samples(free_particle, 1, 1, 10, (1, 0), 1, CTX)
