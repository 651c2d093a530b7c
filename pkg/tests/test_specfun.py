"""Tests for the special-function layer.

The Gamma identities here are classical; the parabolic cylinder and
Kummer evaluations are validated against independent oracles (direct
ODE integration of the defining equations) on top of the identity and
asymptote checks.
"""

import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import solve_ivp

from twolevel import specfun as sf


def gamma(z):
    return cmath.exp(sf.log_gamma(z))


class TestLogGamma:
    def test_trivial_values(self):
        assert abs(sf.log_gamma(1.0)) < 1e-15
        assert_allclose(sf.log_gamma(0.5).real, math.log(math.sqrt(math.pi)), rtol=1e-14)
        assert abs(sf.log_gamma(0.5).imag) < 1e-15

    def test_modulus_identity_on_one_line(self):
        # |Gamma(1 - i a)| = sqrt(pi a / sinh(pi a))
        a = 0.7
        assert_allclose(
            abs(gamma(1 - 1j * a)),
            math.sqrt(math.pi * a / math.sinh(math.pi * a)),
            rtol=1e-13,
        )

    def test_modulus_identity_on_half_line(self):
        # |Gamma(1/2 + i a)| = sqrt(pi / cosh(pi a)) for a in [0, 10]
        for a in np.linspace(0.0, 10.0, 21):
            assert_allclose(
                abs(gamma(0.5 + 1j * a)),
                math.sqrt(math.pi / math.cosh(math.pi * a)),
                rtol=1e-12,
            )

    def test_duplication_identity(self):
        z = 0.3 + 0.4j
        lhs = gamma(z) * gamma(z + 0.5)
        rhs = math.sqrt(math.pi) * 2 ** (1 - 2 * z) * gamma(2 * z)
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def test_recurrence_on_grid(self):
        # log Gamma(z+1) = log Gamma(z) + log z, checked where no branch
        # crossing occurs (right half plane).
        for re in np.linspace(0.5, 5.0, 7):
            for im in np.linspace(-20.0, 20.0, 9):
                z = complex(re, im)
                lhs = sf.log_gamma(z + 1)
                rhs = sf.log_gamma(z) + cmath.log(z)
                assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_pole_rejection(self):
        for z in (0.0, -1.0, -7.0):
            with pytest.raises(ValueError):
                sf.log_gamma(z)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            sf.log_gamma(complex(math.nan, 0.0))


class TestArgGamma:
    def test_real_positive_axis(self):
        for z in (0.3, 1.0, 2.5, 10.0):
            assert sf.arg_gamma(z) == 0.0

    def test_principal_range(self):
        for im in np.linspace(-40.0, 40.0, 17):
            a = sf.arg_gamma(complex(1.0, im))
            assert -math.pi < a <= math.pi

    def test_stirling_limit_of_arg_difference(self):
        # arg Gamma(1 - ix) - arg Gamma(1/2 - ix) -> -pi/4 as x -> inf.
        # Use the continuous imaginary part of log Gamma for the difference.
        x = 50.0
        diff = sf.log_gamma(1 - 1j * x).imag - sf.log_gamma(0.5 - 1j * x).imag
        assert abs(diff - (-math.pi / 4)) < 5e-3
        # the wrapped difference agrees once folded into (-pi, pi]
        wrapped = math.remainder(sf.arg_gamma(1 - 1j * x) - sf.arg_gamma(0.5 - 1j * x), 2 * math.pi)
        assert_allclose(wrapped, diff, atol=1e-12)


class TestErf:
    def test_trivials(self):
        assert sf.erf(0.0) == 0.0
        assert abs(sf.erf(6.0) - 1.0) <= 1e-14
        assert sf.erf(-2.0) == -sf.erf(2.0)

    def test_against_taylor_series(self):
        # erf(1) from the Maclaurin series, summed to machine precision.
        x = 1.0
        total, term, k = 0.0, x, 0
        while abs(term) > 1e-20:
            total += term / (2 * k + 1)
            k += 1
            term *= -x * x / k
        expected = 2.0 / math.sqrt(math.pi) * total
        assert_allclose(sf.erf(1.0), expected, rtol=1e-15)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            sf.erf(math.inf)


class TestParabolicCylinderD:
    def test_order_zero_is_gaussian(self):
        z = 1 + 1j
        assert abs(sf.parabolic_cylinder_D(0.0, z) - cmath.exp(-z * z / 4)) < 1e-12

    def test_value_at_origin(self):
        # D_nu(0) = 2^(nu/2) sqrt(pi) / Gamma((1-nu)/2)
        nu = 0.3j
        expected = 2 ** (nu / 2) * math.sqrt(math.pi) / gamma((1 - nu) / 2)
        assert abs(sf.parabolic_cylinder_D(nu, 0.0) - expected) < 1e-12

    def test_large_argument_asymptote(self):
        # Leading strong-coupling term: D_{i w^2/2}(T sqrt2 e^{-i pi/4})
        # ~ cos(theta) exp(pi w^2 / 8 + i eta), theta = atan2(w, T)/2,
        # eta = -w^2/4 + (w^2/2) ln[(T + sqrt(w^2+T^2))/sqrt2]
        #       + (T/2) sqrt(w^2+T^2).
        w, T = 0.35, 10.0
        nu = 1j * w * w / 2
        z = T * math.sqrt(2) * cmath.exp(-1j * math.pi / 4)
        r = math.hypot(w, T)
        theta = 0.5 * math.atan2(w, T)
        eta = -w * w / 4 + (w * w / 2) * math.log((T + r) / math.sqrt(2)) + T * r / 2
        leading = math.cos(theta) * cmath.exp(math.pi * w * w / 8 + 1j * eta)
        value = sf.parabolic_cylinder_D(nu, z)
        assert abs(value - leading) / abs(leading) < 1e-3

    def test_weber_ode_residual(self):
        # d^2 D/dz^2 + (nu + 1/2 - z^2/4) D = 0, finite differences in z.
        h = 1e-4
        for nu in (0.0, 0.5j, 2j, -1.3 + 0.2j):
            for z0 in (0.5, 2 + 1j, 5 * cmath.exp(-1j * math.pi / 4), 10.0):
                d0 = sf.parabolic_cylinder_D(nu, z0)
                dp = sf.parabolic_cylinder_D(nu, z0 + h)
                dm = sf.parabolic_cylinder_D(nu, z0 - h)
                second = (dp - 2 * d0 + dm) / (h * h)
                residual = second + (nu + 0.5 - z0 * z0 / 4) * d0
                assert abs(residual) <= 1e-6 * max(1.0, abs(d0))

    def test_against_ode_integration_oracle(self):
        # Integrate the Weber equation along the ray z = t e^{-i pi/4}
        # from 0 with exact initial data, compare at the endpoint.
        w = 0.8
        nu = 1j * w * w / 2
        direction = cmath.exp(-1j * math.pi / 4)
        d_at_0 = sf.parabolic_cylinder_D(nu, 0.0)
        # D_nu'(0) = -2^{(nu+1)/2} sqrt(pi) / Gamma(-nu/2); sanity anchor:
        # nu = 1 gives D_1 = z e^{-z^2/4} whose slope at 0 is 1.
        dp_at_0 = -(2 ** ((nu + 1) / 2)) * math.sqrt(math.pi) / gamma(-nu / 2)

        def rhs(t, y):
            z = t * direction
            d = complex(y[0], y[1])
            dd = complex(y[2], y[3])
            acc = -(nu + 0.5 - z * z / 4) * d * direction * direction
            return [dd.real, dd.imag, acc.real, acc.imag]

        t_end = 12.0
        y0 = [d_at_0.real, d_at_0.imag, (dp_at_0 * direction).real, (dp_at_0 * direction).imag]
        sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=1e-12, atol=1e-14)
        oracle = complex(sol.y[0, -1], sol.y[1, -1])
        value = sf.parabolic_cylinder_D(nu, t_end * direction)
        assert abs(value - oracle) / abs(oracle) < 1e-9

    def test_domain_rejection(self):
        with pytest.raises(ValueError):
            sf.parabolic_cylinder_D(0.0, 60.0)
        with pytest.raises(ValueError):
            sf.parabolic_cylinder_D(60.0j, 1.0)


class TestKummerM:
    def test_series_constant_term(self):
        for a, b in [(0.3 + 0.2j, 1.0 + 0.5j), (1j, 2j), (-0.5, 0.25)]:
            assert sf.kummer_M(a, b, 0.0) == 1.0

    def test_exponential_reduction(self):
        # M(a, a, z) = e^z
        z = 0.7 + 2.3j
        assert abs(sf.kummer_M(1.5, 1.5, z) - cmath.exp(z)) < 1e-12 * abs(cmath.exp(z))

    def test_large_s_asymptote(self):
        # M(i vp/2, i vp, i s) ~ (is)^(-i vp/2) Gamma(i vp)/Gamma(i vp/2)
        #                        (e^{is} + e^{-pi vp/2}) for s >> vp
        vp, s = 0.4, 200.0
        value = sf.kummer_M(1j * vp / 2, 1j * vp, 1j * s)
        ratio = cmath.exp(sf.log_gamma(1j * vp) - sf.log_gamma(1j * vp / 2))
        asym = (1j * s) ** (-1j * vp / 2) * ratio * (cmath.exp(1j * s) + math.exp(-math.pi * vp / 2))
        assert abs(value - asym) / abs(asym) < 1e-2

    def test_kummer_ode_residual(self):
        # z M'' + (b - z) M' - a M = 0 via fourth-order central stencils
        # (second-order differences are too blunt at |z| ~ 80).
        h = 5e-3
        cases = [
            (1j * 0.2, 1j * 0.4, 3j),
            (1j * 5.0, 1j * 10.0, 80j),
            (0.3, 1.7, -2.0 + 1.0j),
        ]
        for a, b, z0 in cases:
            m0 = sf.kummer_M(a, b, z0)
            mp1 = sf.kummer_M(a, b, z0 + h)
            mm1 = sf.kummer_M(a, b, z0 - h)
            mp2 = sf.kummer_M(a, b, z0 + 2 * h)
            mm2 = sf.kummer_M(a, b, z0 - 2 * h)
            first = (-mp2 + 8 * mp1 - 8 * mm1 + mm2) / (12 * h)
            second = (-mp2 + 16 * mp1 - 30 * m0 + 16 * mm1 - mm2) / (12 * h * h)
            residual = z0 * second + (b - z0) * first - a * m0
            assert abs(residual) <= 1e-8 * max(1.0, abs(m0))

    def test_against_ode_integration_oracle(self):
        # Integrate z M'' + (b - z) M' = a M along the imaginary axis from
        # a small offset (regular singular point at 0 is handled by the
        # series for the initial data: M(0)=1, M'(0)=a/b).
        vp = 6.0
        a, b = 1j * vp / 2, 1j * vp
        s0, s1 = 1e-3, 400.0

        def rhs(s, y):
            z = 1j * s
            m = complex(y[0], y[1])
            d = complex(y[2], y[3])  # dM/ds
            # dM/dz = d / i; M'' in z: from the ODE
            mz = d / 1j
            mzz = (a * m - (b - z) * mz) / z
            dds = mzz * (1j) ** 2
            return [d.real, d.imag, dds.real, dds.imag]

        m_init = sf.kummer_M(a, b, 1j * s0)
        # dM/ds = i dM/dz; series derivative at small z
        h = 1e-6
        md = (sf.kummer_M(a, b, 1j * (s0 + h)) - sf.kummer_M(a, b, 1j * (s0 - h))) / (2 * h)
        y0 = [m_init.real, m_init.imag, md.real, md.imag]
        sol = solve_ivp(rhs, (s0, s1), y0, method="DOP853", rtol=1e-12, atol=1e-14)
        oracle = complex(sol.y[0, -1], sol.y[1, -1])
        value = sf.kummer_M(a, b, 1j * s1)
        assert abs(value - oracle) / abs(oracle) < 1e-8

    def test_pole_and_domain_rejection(self):
        with pytest.raises(ValueError):
            sf.kummer_M(0.1, -2.0, 1.0)
        with pytest.raises(ValueError):
            sf.kummer_M(0.1, 0.0, 1.0)
        with pytest.raises(ValueError):
            sf.kummer_M(0.1, 1.0, 600j)
