import numpy as np
import pytest
from numpy.testing import assert_allclose

from chebforge import Basis, ChebSeries, catalog, to_monomial
from chebforge.errors import (
    BasisMismatchError,
    ContractError,
    NonEquioscillatingError,
    SingularPointError,
)
from chebforge.relerr import (
    FitConfig,
    deviation_series,
    equilibrate,
    jacobian,
    locate_extrema,
    newton_fit,
    relative_error_curve,
)
from chebforge.truncation import divide

from reference_values import (
    COS_LIFTED_B,
    COS_LIFTED_ESTIMATES,
    EXP_B_D,
    EXP_SHIFTED_K3_B,
    EXP_SHIFTED_K12,
    EXP_SHIFTED_K12_EQUILIBRATED_B12,
    EXP_SHIFTED_K12_ERRORS,
    J0_B14_CORRECTED,
    J0_B_D,
    SIN4_ESTIMATES,
    SIN4_INITIAL,
    SIN8_B,
    SIN8_ESTIMATE,
    SIN16_B,
    SIN16_EQUILIBRATED_B16,
    SIN16_MAX_R,
)


def graded_close(got, expect):
    """Relative 1e-10 above 1e-8 in magnitude, relative 1e-4 below."""
    tol = 1e-10 if abs(expect) > 1e-8 else 1e-4
    return abs(got - expect) <= tol * abs(expect)


def assert_graded(got, table):
    bad = {n: (got[n], v) for n, v in table.items() if not graded_close(got[n], v)}
    assert not bad, bad


@pytest.fixture(scope="module")
def sinc():
    return catalog("sinc_pi2", 80)


@pytest.fixture(scope="module")
def exp_shifted():
    return catalog("exp_shifted", 80)


class TestConfig:
    def test_default_N(self):
        assert FitConfig(5).N == 18

    @pytest.mark.parametrize("kwargs", [dict(k=-1), dict(k=4, N=7), dict(k=2, newton_tol=0),
                                        dict(k=2, extremum_grid=1)])
    def test_rejects(self, kwargs):
        with pytest.raises(ContractError):
            FitConfig(**kwargs)

    def test_target_checks(self):
        with pytest.raises(ContractError):
            newton_fit(ChebSeries([0.0, 1.0]), FitConfig(1, 4))
        with pytest.raises(ContractError):
            newton_fit(ChebSeries([1.0]), FitConfig(2, 4))


class TestJacobian:
    @pytest.mark.parametrize("name,k,N", [("exp_std", 4, 10), ("sinc_pi2", 4, 8),
                                          ("exp_shifted", 3, 9)])
    def test_against_finite_differences(self, name, k, N):
        f = catalog(name, 40)
        b = ChebSeries(f.coeffs[: k + 1] * np.linspace(1, 1.1, k + 1), f.basis)
        a = divide(f, b, N, refine_steps=3)
        jac = jacobian(b, a, N, k)
        for j in range(1, k + 1):
            h = 1e-6 * max(abs(b.coeffs[j]), 1e-3)
            up, dn = b.coeffs.copy(), b.coeffs.copy()
            up[j] += h
            dn[j] -= h
            fd = (divide(f, ChebSeries(up, f.basis), N, refine_steps=3).coeffs
                  - divide(f, ChebSeries(dn, f.basis), N, refine_steps=3).coeffs) / (2 * h)
            scale = np.max(np.abs(fd))
            assert_allclose(jac[:, j - 1], fd, atol=1e-5 * scale)

    def test_degree_zero(self):
        f = catalog("exp_std", 10)
        b = ChebSeries(f.coeffs[:1])
        assert jacobian(b, divide(f, b, 4), 4, 0).shape == (5, 0)


class TestNewton:
    def test_b0_bit_invariant(self, sinc, exp_shifted):
        for f, cfg in ((sinc, FitConfig(8, 16)), (exp_shifted, FitConfig(5, 15))):
            res = newton_fit(f, cfg)
            assert res.b.coeffs[0] == f.coeffs[0]
            eq = equilibrate(f, res, cfg)
            assert eq.b.coeffs[0] == f.coeffs[0]

    def test_sin4_initial_deviation(self, sinc):
        res = newton_fit(sinc, FitConfig(4, 8, max_newton_iters=0))
        dev = res.deviation.coeffs[::2].copy()
        dev[0] /= 2
        assert_allclose(dev, SIN4_INITIAL, rtol=1.5e-2)
        assert_allclose(res.relerr_estimate, SIN4_ESTIMATES[0], rtol=5e-3)

    def test_sin4_one_step_tail_and_estimate(self, sinc):
        res = newton_fit(sinc, FitConfig(4, 8, max_newton_iters=1))
        dev = res.deviation.coeffs[::2]
        assert_allclose(dev[3:], [-1.08e-4, -1.11e-5], rtol=1e-2)
        assert np.all(np.abs(dev[:3]) < 1e-10)
        assert_allclose(res.relerr_estimate, SIN4_ESTIMATES[1], rtol=5e-3)

    def test_sin8(self, sinc):
        res = newton_fit(sinc, FitConfig(8, 16, max_newton_iters=4))
        assert_graded(res.b.unprimed(), SIN8_B)
        assert abs(res.relerr_estimate / SIN8_ESTIMATE - 1) < 0.1

    def test_sin16(self, sinc):
        res = newton_fit(sinc, FitConfig(16, 32))
        b = res.b.unprimed()
        d = to_monomial(res.b).coeffs
        assert_graded(b, {n: v[0] for n, v in SIN16_B.items()})
        assert_graded(d, {n: v[1] for n, v in SIN16_B.items()})
        assert np.all(res.b.coeffs[1::2] == 0)
        assert res.relerr_estimate == pytest.approx(SIN16_MAX_R[0], rel=0.05)

    def test_history_decreases(self, sinc):
        res = newton_fit(sinc, FitConfig(8, 16))
        # a_1..a_k settle at rounding level relative to a_0 = 2
        assert res.history[-1] < 1e-15 < res.history[0]

    def test_exp_standard(self):
        res = newton_fit(catalog("exp_std", 80), FitConfig(14, 42))
        assert_graded(res.b.unprimed(), {n: v[0] for n, v in enumerate(EXP_B_D)})
        assert_graded(to_monomial(res.b).coeffs, {n: v[1] for n, v in enumerate(EXP_B_D)})

    def test_exp_shifted_k3(self, exp_shifted):
        res = newton_fit(exp_shifted, FitConfig(3, 9, max_newton_iters=4))
        assert_graded(res.b.unprimed(), dict(enumerate(EXP_SHIFTED_K3_B)))
        assert res.relerr_estimate == pytest.approx(4.0e-4, rel=0.05)

    def test_exp_shifted_k12(self, exp_shifted):
        res = newton_fit(exp_shifted, FitConfig(12, 36))
        assert_graded(res.b.unprimed(), {n: v[0] for n, v in enumerate(EXP_SHIFTED_K12)})
        assert_graded(to_monomial(res.b).coeffs, {n: v[1] for n, v in enumerate(EXP_SHIFTED_K12)})
        assert res.relerr_estimate == pytest.approx(EXP_SHIFTED_K12_ERRORS[0], rel=0.05)

    def test_j0(self):
        res = newton_fit(catalog("j0_pi2", 80), FitConfig(16, 48))
        b = res.b.unprimed()
        table = {n: v[0] for n, v in J0_B_D.items()}
        table[14] = J0_B14_CORRECTED
        big = {n: v for n, v in table.items() if abs(v) > 1e-15}
        assert_graded(b, big)
        for n, v in table.items():
            if n not in big:
                assert np.sign(b[n]) == np.sign(v)
                assert 0.1 < b[n] / v < 10
        assert_graded(to_monomial(res.b).coeffs, {n: v[1] for n, v in J0_B_D.items()})

    def test_j0_printed_exponent(self):
        # mantissa agrees with the corrected value; exponent is off by one
        printed = J0_B_D[14][0]
        assert printed / J0_B14_CORRECTED == pytest.approx(10.0, rel=1e-15)

    def test_cos_lifted(self):
        f = catalog("cos_pi2_lifted", 80)
        start = newton_fit(f, FitConfig(4, 8, max_newton_iters=0))
        res = newton_fit(f, FitConfig(4, 8, max_newton_iters=4))
        assert_allclose(res.b.unprimed()[::2], COS_LIFTED_B, rtol=1e-10)
        assert start.relerr_estimate == pytest.approx(COS_LIFTED_ESTIMATES[0], rel=0.05)
        assert res.relerr_estimate == pytest.approx(COS_LIFTED_ESTIMATES[1], rel=0.05)


class TestDeviation:
    def test_matches_direct_subtraction(self, exp_shifted):
        res = newton_fit(exp_shifted, FitConfig(3, 9))
        dev = deviation_series(res.b, res.residual)
        assert dev.coeffs[0] == pytest.approx(res.residual.coeffs[0] - 2, abs=1e-15)
        assert_allclose(dev.coeffs[1:], res.residual.coeffs[1:])


class TestEquilibrate:
    def test_sin16_max_error_falls(self, sinc):
        cfg = FitConfig(16, 32)
        res = equilibrate(sinc, newton_fit(sinc, cfg), cfg)
        traj = res.trajectory
        assert all(b <= a for a, b in zip(traj, traj[1:]))
        assert traj[0] == pytest.approx(SIN16_MAX_R[0], rel=0.05)
        assert res.max_abs_error == pytest.approx(SIN16_MAX_R[1], rel=0.05)
        b16 = res.b.unprimed()[16]
        assert np.sign(b16) == np.sign(SIN16_EQUILIBRATED_B16)
        assert b16 / SIN16_EQUILIBRATED_B16 == pytest.approx(1.0, abs=1e-3)

    def test_exp_shifted_k12(self, exp_shifted):
        cfg = FitConfig(12, 36)
        res = equilibrate(exp_shifted, newton_fit(exp_shifted, cfg), cfg)
        assert res.trajectory[0] == pytest.approx(EXP_SHIFTED_K12_ERRORS[0], rel=0.05)
        assert res.max_abs_error <= EXP_SHIFTED_K12_ERRORS[1] * 1.05
        b12 = res.b.unprimed()[12]
        assert np.sign(b12) == np.sign(EXP_SHIFTED_K12_EQUILIBRATED_B12)
        assert b12 / EXP_SHIFTED_K12_EQUILIBRATED_B12 == pytest.approx(1.0, abs=1e-2)

    def test_extrema_levelled(self, exp_shifted):
        cfg = FitConfig(6, 18, equilibrate_iters=6)
        res = equilibrate(exp_shifted, newton_fit(exp_shifted, cfg), cfg)
        _, ys = locate_extrema(lambda x: relative_error_curve(exp_shifted, res.b, 18, x), 0, 1, 4001)
        assert np.min(np.abs(ys)) > 0.9 * np.max(np.abs(ys))

    def test_too_few_extrema(self):
        # f = b exactly: R vanishes, so no alternating extrema exist
        f = ChebSeries([2.0, 0.5, 0.25, 0.125]).padded(9)
        cfg = FitConfig(3, 8)
        with pytest.raises(NonEquioscillatingError):
            equilibrate(f, newton_fit(f, cfg), cfg)


class TestCurve:
    def test_identical_polynomial_gives_zero(self):
        b = ChebSeries([4.0, 0.5, 0.25])
        assert np.all(relative_error_curve(b, b, 10, np.linspace(-1, 1, 11)) == 0)

    def test_series_and_callable_agree(self, exp_shifted):
        res = newton_fit(exp_shifted, FitConfig(4, 12))
        xs = np.linspace(0, 1, 9)
        r1 = relative_error_curve(exp_shifted, res.b, 60, xs)
        r2 = relative_error_curve(np.exp, res.b, 60, xs)
        assert_allclose(r1, r2, atol=1e-15)
        assert np.max(np.abs(r1)) < 2 * res.relerr_estimate

    def test_singular_point(self):
        b = ChebSeries([0.0, 1.0])
        with pytest.raises(SingularPointError) as info:
            relative_error_curve(ChebSeries([2.0]), b, 4, [0.5, 0.0])
        assert info.value.x == 0.0

    def test_basis_mismatch(self):
        with pytest.raises(BasisMismatchError):
            relative_error_curve(ChebSeries([2.0]), ChebSeries([2.0], Basis.SHIFTED), 4, [0.5])

    def test_locate_extrema(self):
        xs, ys = locate_extrema(lambda x: np.cos(3 * np.pi * x), -1, 1, 201)
        assert_allclose(xs, np.linspace(-1, 1, 7), atol=1e-5)
        assert_allclose(np.abs(ys), 1.0)
