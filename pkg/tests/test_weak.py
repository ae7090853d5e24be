import numpy as np
import pytest

from rdlab import (
    BumpTestFunction,
    CoverageError,
    Field,
    MarginError,
    bump_integral,
    constant_field,
    discrete_residual_max,
    fd_consistency_report,
    make_builtin,
    make_grid,
    make_problem,
    pair,
    required_depth,
    sbp_identity_gap,
    sbp_terms,
    solve,
    weak_residual,
)
from rdlab.grid import level_width
from rdlab.weak import riemann_sum

INNER_BUMP = BumpTestFunction(0.0, 0.5, 1.0, 0.4)  # support inside t > 0


def heat_field_at(dx, x_window=1.0, t_top=0.9, alpha=0.25):
    dt = alpha * dx * dx
    spec = make_grid(dx, dt, required_depth(x_window, t_top, dx, dt))
    return solve(spec, make_problem("gaussian", "zero"))


class TestPair:
    def test_zero_field_pairs_to_zero(self):
        spec = make_grid(0.1, 0.0025, 400)
        assert pair(constant_field(spec, 0.0), INNER_BUMP) == 0.0

    def test_constant_field_approximates_integral(self):
        spec = make_grid(0.1, 0.0025, required_depth(1.0, 0.9, 0.1, 0.0025))
        got = pair(constant_field(spec, 2.5), INNER_BUMP)
        assert got == pytest.approx(2.5 * bump_integral(INNER_BUMP), rel=1e-3)

    def test_bounded_by_sup_times_phi_mass(self, heat_field):
        lump = abs(pair(heat_field, INNER_BUMP))
        spec = heat_field.spec
        phi_mass = riemann_sum(
            lambda x, t: np.abs(INNER_BUMP.value(x, t)), spec, 1.5, 0.0, 1.0
        )
        assert lump <= heat_field.max_abs() * phi_mass + 1e-15

    def test_linear_in_field_and_bump(self, heat_field):
        spec = heat_field.spec
        ones = constant_field(spec, 1.0)
        mixed = Field(
            spec=spec,
            rows=tuple(2.0 * r + 3.0 for r in heat_field.rows),
        )
        lhs = pair(mixed, INNER_BUMP)
        rhs = 2.0 * pair(heat_field, INNER_BUMP) + 3.0 * pair(ones, INNER_BUMP)
        assert lhs == pytest.approx(rhs, rel=1e-12)
        doubled = BumpTestFunction(0.0, 0.5, 1.0, 0.4, amplitude=2.0)
        assert pair(heat_field, doubled) == pytest.approx(
            2.0 * pair(heat_field, INNER_BUMP), rel=1e-12
        )

    def test_coverage_error_names_corner(self):
        spec = make_grid(0.1, 0.0025, 50)  # covers t <= 0.125 at x=0
        field = constant_field(spec, 1.0)
        with pytest.raises(CoverageError, match=r"t=0.9"):
            pair(field, INNER_BUMP)
        with pytest.raises(CoverageError, match=r"t=-"):
            pair(field, BumpTestFunction(0.0, 0.0, 0.2, 0.05))

    def test_reproducible_bit_for_bit(self, heat_field):
        assert pair(heat_field, INNER_BUMP) == pair(heat_field, INNER_BUMP)


class TestWeakResidual:
    def test_zero_everything_gives_exact_zero(self):
        spec = make_grid(0.1, 0.0025, 400)
        prob = make_problem("constant", "zero", initial_param=0.0)
        rep = weak_residual(solve(spec, prob), prob, INNER_BUMP)
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.residual == 0.0

    def test_heat_residual_shrinks_under_refinement(self):
        prob = make_problem("gaussian", "zero")
        res = {"exact-derivatives": [], "finite-differences": []}
        for dx in (0.1, 0.05):
            field = heat_field_at(dx)
            for mode in res:
                rep = weak_residual(field, prob, INNER_BUMP, mode)
                assert rep.rhs == 0.0  # support inside t > 0
                res[mode].append(abs(rep.residual))
        assert res["exact-derivatives"][0] >= 2 * res["exact-derivatives"][1]
        assert res["finite-differences"][0] >= 2 * res["finite-differences"][1]

    def test_modes_differ_within_taylor_error_budget(self):
        prob = make_problem("gaussian", "zero")
        field = heat_field_at(0.1)
        spec = field.spec
        r_ex = weak_residual(field, prob, INNER_BUMP, "exact-derivatives")
        r_fd = weak_residual(field, prob, INNER_BUMP, "finite-differences")
        eps_t, eps_xx = fd_consistency_report(
            INNER_BUMP,
            spec,
            (-1 - spec.dx, 1 + spec.dx, 0.1 - spec.dt, 0.9 + spec.dt),
        )
        area = 2.0 * 0.8
        budget = (eps_t + eps_xx) * field.max_abs() * (area + 1.0)
        assert abs(r_ex.residual - r_fd.residual) <= budget

    def test_logistic_straddling_bump_example(self, logistic_problem):
        # initial data enters through the rhs; values frozen from the
        # oracle build: |residual| ~ 2.1e-5, 2.1e-5, 5.7e-6
        phi = BumpTestFunction(0.0, 0.0, 1.5, 0.3)
        seen = []
        for dx in (0.1, 0.05, 0.025):
            dt = 0.25 * dx * dx
            spec = make_grid(dx, dt, required_depth(1.5, 0.3, dx, dt))
            field = solve(spec, logistic_problem)
            rep = weak_residual(field, logistic_problem, phi)
            assert rep.rhs != 0.0
            seen.append(abs(rep.residual))
        assert seen[1] < 5e-2
        assert seen[0] >= seen[1] >= seen[2]

    def test_fd_mode_residual_equals_sbp_interior_term(self, heat_field,
                                                       heat_problem):
        rep = weak_residual(
            heat_field, heat_problem, INNER_BUMP, "finite-differences"
        )
        terms = sbp_terms(heat_field, INNER_BUMP)
        assert abs(rep.residual - terms.interior_term) <= 1e-12 * (
            1.0 + abs(rep.lhs)
        )

    def test_rejects_unknown_mode(self, heat_field, heat_problem):
        with pytest.raises(ValueError, match="mode"):
            weak_residual(heat_field, heat_problem, INNER_BUMP, "spectral")

    def test_coverage_checked_after_clipping_to_t_nonneg(self, heat_problem):
        # below t = 0 is fine for a straddling bump, above the triangle not
        field = heat_field_at(0.1, x_window=1.0, t_top=0.2)
        ok = BumpTestFunction(0.0, 0.0, 0.5, 0.15)
        weak_residual(field, heat_problem, ok)
        too_tall = BumpTestFunction(0.0, 0.0, 0.5, 0.5)
        with pytest.raises(CoverageError, match="t=0.5"):
            weak_residual(field, heat_problem, too_tall)

    def test_report_serialization_keys(self, heat_field, heat_problem):
        rep = weak_residual(heat_field, heat_problem, INNER_BUMP)
        assert set(rep.to_json_dict()) == {
            "mode", "dx", "dt", "lhs", "rhs", "residual",
        }


class TestSbpIdentity:
    BUMPS = [
        BumpTestFunction(0.0, 0.5, 1.0, 0.4),
        BumpTestFunction(0.5, 0.3, 0.8, 0.5),
        BumpTestFunction(0.0, 0.0, 1.5, 0.3),  # nonzero at t = 0
        BumpTestFunction(-1.0, 0.6, 1.2, 0.35),
        BumpTestFunction(0.3, 0.9, 0.6, 0.25),
    ]

    def test_exact_for_heat_fields(self, heat_field):
        for phi in self.BUMPS:
            terms = sbp_terms(heat_field, phi)
            assert terms.gap <= 1e-12 * (1.0 + abs(terms.t_sum))

    def test_zero_field_gap_zero(self):
        spec = make_grid(0.1, 0.0025, 600)
        assert sbp_identity_gap(constant_field(spec, 0.0), self.BUMPS[0]) == 0.0

    def test_exact_for_arbitrary_rows(self):
        # the identity is algebra, not a property of scheme solutions
        rng = np.random.default_rng(3)
        spec = make_grid(0.5, 0.0625, 60)
        rows = tuple(
            rng.standard_normal(level_width(spec, n))
            for n in range(spec.big_n + 1)
        )
        field = Field(spec=spec, rows=rows)
        phi = BumpTestFunction(0.0, 1.5, 2.0, 1.4)
        terms = sbp_terms(field, phi)
        assert terms.gap <= 1e-12 * (1.0 + abs(terms.t_sum))

    def test_margin_violation_raises(self):
        spec = make_grid(0.1, 0.0025, 100)  # top at t = 0.25
        field = constant_field(spec, 1.0)
        with pytest.raises(MarginError, match="margin"):
            sbp_terms(field, BumpTestFunction(0.0, 0.2, 0.5, 0.1))

    def test_single_defect_is_weighed_by_shifted_phi(self):
        # dyadic meshes make the defect injection exact: rows are zero up
        # to level n0, then constant c = dt*delta, so the scheme defect is
        # exactly delta on level n0 and zero elsewhere
        dx, dt, big_n, n0, delta = 0.5, 0.0625, 24, 6, 1.0
        spec = make_grid(dx, dt, big_n)
        c = dt * delta
        rows = tuple(
            np.full(level_width(spec, n), 0.0 if n <= n0 else c)
            for n in range(big_n + 1)
        )
        field = Field(spec=spec, rows=rows)
        assert discrete_residual_max(field, make_builtin("zero")) == delta

        # narrower than dx: the only grid column inside the support is m=0
        phi = BumpTestFunction(0.0, (n0 + 1) * dt + 0.1, 0.2, 0.25)
        terms = sbp_terms(field, phi)
        expected = delta * phi.value(0.0, (n0 + 1) * dt) * dx * dt
        assert terms.interior_term == expected
        assert terms.gap <= 1e-12 * (1.0 + abs(terms.t_sum))


class TestAgainstBruteForce:
    """Dumb whole-triangle loops cross-check the windowed vector sums."""

    @pytest.fixture(scope="class")
    @staticmethod
    def small():
        dx = 0.2
        dt = 0.25 * dx * dx
        spec = make_grid(dx, dt, required_depth(1.2, 0.6, dx, dt))
        problem = make_problem("gaussian", "sine")
        return solve(spec, problem), problem

    def test_pair_matches_naive_sum(self, small):
        field, _ = small
        phi = BumpTestFunction(0.1, 0.3, 0.7, 0.25)
        naive = 0.0
        for n, row in enumerate(field.rows):
            w = field.half_width(n)
            for i, u in enumerate(row):
                naive += u * phi.value((i - w) * field.spec.dx, field.t(n))
        naive *= field.spec.dx * field.spec.dt
        got = pair(field, phi)
        assert got == pytest.approx(naive, rel=1e-13, abs=1e-18)

    def test_weak_residual_matches_naive_sum(self, small):
        field, problem = small
        phi = BumpTestFunction(0.0, 0.0, 1.0, 0.25)  # straddles t = 0
        spec = field.spec
        f = problem.reaction.evaluate
        lhs = 0.0
        for n, row in enumerate(field.rows):
            w = field.half_width(n)
            for i, u in enumerate(row):
                x, t = (i - w) * spec.dx, field.t(n)
                val, d_t, d_xx = phi.evaluate(x, t)
                lhs += u * (-spec.diffusion * d_xx - d_t) - f(u) * val
        lhs *= spec.dx * spec.dt
        rhs = 0.0
        for m in range(-spec.big_n, spec.big_n + 1):
            x = m * spec.dx
            rhs += problem.initial(x) * phi.value(x, 0.0)
        rhs *= spec.dx
        rep = weak_residual(field, problem, phi)
        assert rep.lhs == pytest.approx(lhs, rel=1e-13, abs=1e-18)
        assert rep.rhs == pytest.approx(rhs, rel=1e-13, abs=1e-18)


class TestGridSumConvergence:
    def test_smooth_compact_sum_approaches_integral(self):
        phi = BumpTestFunction(0.0, 0.45, 1.0, 0.4)
        exact = bump_integral(phi)
        errs = []
        for dx in (0.4, 0.2, 0.1):
            spec = make_grid(dx, 0.25 * dx * dx, 10)
            got = riemann_sum(phi.value, spec, 1.2, 0.0, 0.9)
            errs.append(abs(got - exact))
        assert errs[0] >= 2 * errs[1]
        assert errs[1] >= 2 * errs[2]
