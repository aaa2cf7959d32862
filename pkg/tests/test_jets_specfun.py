import random
from fractions import Fraction

import pytest
from mpmath import mp

from maassjacobi.errors import DomainError, PoleError
from maassjacobi.jets import Jet, JetSpace
from maassjacobi.precision import to_mpf
from maassjacobi.specfun import (
    bessel_I,
    bessel_I_jet,
    bessel_J,
    bessel_J_jet,
    e_profile,
    e_profile_jet,
    h_profile,
    h_profile_jet,
    monotone_precision_digits,
    upper_incomplete_gamma,
    whittaker_M_jet,
    whittaker_M_renorm,
    whittaker_ode_residual,
    whittaker_W_jet,
    whittaker_W_renorm,
)


def test_jet_arithmetic(ctx):
    with ctx.working():
        sp = JetSpace(3, 4)
        x = Jet.variable(sp, 0, mp.mpf("0.7"))
        y = Jet.variable(sp, 1, mp.mpc("0.2", "0.5"))
        z = Jet.variable(sp, 2, mp.mpf("-1.1"))
        f = (x * y + z).exp()
        g = f * f.reciprocal()
        assert abs(g.value - 1) < mp.mpf("1e-35")
        assert g.nilpotent_part().max_abs() < mp.mpf("1e-35")
        p = (x * x + 2).pow_scalar(mp.mpf("0.5"))
        assert (p * p - (x * x + 2)).max_abs() < mp.mpf("1e-35")
        lg = f.log()
        assert (lg - (x * y + z)).max_abs() < mp.mpf("1e-33")
        # mixed partial of exp(xy + z): d^3/dx dy dz = (1 + xy) exp(..)
        d = f.derivative_at_base((1, 1, 1))
        expect = (1 + x.value * y.value) * mp.exp(x.value * y.value + z.value)
        assert abs(d - expect) < mp.mpf("1e-33")


def test_jet_compose(ctx):
    with ctx.working():
        sp = JetSpace(2, 4)
        a = Jet.variable(sp, 0, mp.mpf("0.3"))
        b = Jet.variable(sp, 1, mp.mpf("0.9"))
        inner1 = a * b + 1          # value 1.27
        inner2 = (a + b) * mp.mpf("0.5")
        outer_space = JetSpace(2, 4)
        u = Jet.variable(outer_space, 0, inner1.value)
        v = Jet.variable(outer_space, 1, inner2.value)
        outer = (u * u + v).exp()
        composed = outer.compose([inner1, inner2])
        direct = (inner1 * inner1 + inner2).exp()
        assert (composed - direct).max_abs() < mp.mpf("1e-30")


def test_whittaker_closed_forms(ctx):
    with ctx.working():
        # M with kappa = 0, s = 1: 2 sinh(|t|/2), both signs of t
        for t in (mp.mpf("0.7"), mp.mpf("-1.3"), mp.mpf("2.5")):
            v = whittaker_M_renorm(1, 0, t, ctx)
            assert abs(v - 2 * mp.sinh(abs(t) / 2)) < mp.mpf("1e-40")
        # W at the duality parameters: e^{-y/2} for y > 0, incomplete gamma
        # for y < 0 (checked at weights mirrored under k <-> N+2-k)
        for (N, k) in ((1, 3), (2, 4), (1, -2), (1, 3 - 3), (2, 4 - 4 + 2)):
            s = Fraction(1) + Fraction(N, 4) - Fraction(k, 2)
            kap = Fraction(k) - Fraction(N, 2)
            y = mp.mpf("1.7")
            assert abs(whittaker_W_renorm(s, kap, y, ctx) - mp.exp(-y / 2)) \
                < mp.mpf("1e-25")
            y = mp.mpf("-1.3")
            expect = mp.exp(-y / 2) * mp.gammainc(to_mpf(Fraction(N + 2, 2) - k), -y)
            assert abs(whittaker_W_renorm(s, kap, y, ctx) - expect) < mp.mpf("1e-25")


def test_whittaker_sign_symmetry(ctx):
    with ctx.working():
        # flipping t flips the first Whittaker index: at -t the value is
        # |t|^{-kap/2} M_{-kap/2, s-1/2}(|t|), checked against the direct
        # Kummer series
        s, kap = Fraction(9, 4), Fraction(3, 2)
        t = mp.mpf("1.9")
        v_neg = whittaker_M_renorm(s, kap, -t, ctx)
        mu = to_mpf(s - Fraction(1, 2))
        kk = to_mpf(-kap / 2)
        direct = mp.power(t, to_mpf(-kap / 2)) * (
            mp.exp(-t / 2) * mp.power(t, mu + mp.mpf("0.5"))
            * mp.hyp1f1(mu - kk + mp.mpf("0.5"), 1 + 2 * mu, t))
        assert abs(v_neg - direct) < mp.mpf("1e-38")
        # and at +t the first index is +kap/2
        v_pos = whittaker_M_renorm(s, kap, t, ctx)
        kk = to_mpf(kap / 2)
        direct = mp.power(t, to_mpf(-kap / 2)) * (
            mp.exp(-t / 2) * mp.power(t, mu + mp.mpf("0.5"))
            * mp.hyp1f1(mu - kk + mp.mpf("0.5"), 1 + 2 * mu, t))
        assert abs(v_pos - direct) < mp.mpf("1e-38")


def test_whittaker_small_t_growth(ctx):
    # M_{s,kappa}(y) ~ y^{Re s - kappa/2} as y -> 0: the renormalized seed
    # estimate exponent with kappa = k - N/2 is Re(s) - (2k - N)/4
    with ctx.working():
        N, k = 1, 2
        s = Fraction(5, 2)
        kap = Fraction(k) - Fraction(N, 2)
        expo = to_mpf(s - Fraction(2 * k - N, 4))
        vals = []
        for y in (mp.mpf("1e-3"), mp.mpf("1e-4")):
            vals.append(whittaker_M_renorm(s, kap, y, ctx) / mp.power(y, expo))
        assert abs(vals[0] - vals[1]) / abs(vals[1]) < mp.mpf("1e-2")


def test_whittaker_ode_residuals(ctx):
    worst = mp.mpf(0)
    with ctx.working():
        for kind in ("M", "W"):
            for s in (Fraction(5, 2), Fraction(3, 2), Fraction(7, 4)):
                for kap in (Fraction(1, 2), Fraction(-3, 2), Fraction(2)):
                    for t in (mp.mpf("0.8"), mp.mpf("-2.1"), mp.mpf("3.3")):
                        worst = max(worst, whittaker_ode_residual(kind, s, kap, t, ctx))
        assert worst < mp.mpf("1e-20")


def test_whittaker_pole_and_domain_errors(ctx):
    with pytest.raises(PoleError):
        whittaker_M_renorm(Fraction(-1), 0, mp.mpf(1), ctx)
    with pytest.raises(DomainError):
        whittaker_M_renorm(Fraction(1), 0, 0, ctx)


def test_whittaker_jets_vs_fd(ctx):
    with ctx.working():
        s, kap, t = Fraction(9, 4), Fraction(1, 2), mp.mpf("1.3")
        jets = whittaker_M_jet(s, kap, t, 4, ctx)
        h = mp.mpf("1e-7")
        fd = (whittaker_M_renorm(s, kap, t + h, ctx)
              - whittaker_M_renorm(s, kap, t - h, ctx)) / (2 * h)
        assert abs(jets[1] - fd) < mp.mpf("1e-10")
        jets = whittaker_W_jet(s, kap, -t, 4, ctx)
        fd = (whittaker_W_renorm(s, kap, -t + h, ctx)
              - whittaker_W_renorm(s, kap, -t - h, ctx)) / (2 * h)
        assert abs(jets[1] - fd) < mp.mpf("1e-10")


def test_bessel(ctx):
    with ctx.working():
        x = mp.mpf(1)
        assert abs(bessel_J(Fraction(1, 2), x, ctx)
                   - mp.sqrt(2 / (mp.pi * x)) * mp.sin(x)) < mp.mpf("1e-30")
        assert bessel_I(Fraction(7, 3), mp.mpf("2.2"), ctx) > 0
        # recurrence J_{nu-1} + J_{nu+1} = (2 nu / x) J_nu at random points
        rng = random.Random(4)
        for _ in range(10):
            nu = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            x = mp.mpf(rng.uniform(0.3, 5.0))
            lhs = bessel_J(nu - 1, x, ctx) + bessel_J(nu + 1, x, ctx)
            rhs = 2 * to_mpf(nu) / x * bessel_J(nu, x, ctx)
            assert abs(lhs - rhs) < mp.mpf("1e-30")
        # ODE residuals from jets
        for nu in (Fraction(7, 3), Fraction(-1, 2), Fraction(2)):
            nuv = to_mpf(nu)
            for x in (mp.mpf("0.9"), mp.mpf("2.7")):
                dj = bessel_J_jet(nu, x, 4, ctx)
                assert abs(x ** 2 * dj[2] + x * dj[1] + (x ** 2 - nuv ** 2) * dj[0]) \
                    < mp.mpf("1e-20")
                di = bessel_I_jet(nu, x, 4, ctx)
                assert abs(x ** 2 * di[2] + x * di[1] - (x ** 2 + nuv ** 2) * di[0]) \
                    < mp.mpf("1e-20")
    with pytest.raises(DomainError):
        bessel_J(1, -1, ctx)


def test_incomplete_gamma(ctx):
    with ctx.working():
        x = mp.mpf("0.9")
        assert abs(upper_incomplete_gamma(1, x, ctx) - mp.exp(-x)) < mp.mpf("1e-35")
        # Gamma(a, x) -> Gamma(a) as x -> 0+ for a > 0
        a = Fraction(7, 4)
        assert abs(upper_incomplete_gamma(a, mp.mpf("1e-30"), ctx)
                   - mp.gamma(to_mpf(a))) < mp.mpf("1e-25")
        # recurrence
        r = upper_incomplete_gamma(a + 1, x, ctx) \
            - to_mpf(a) * upper_incomplete_gamma(a, x, ctx) \
            - mp.power(x, to_mpf(a)) * mp.exp(-x)
        assert abs(r) < mp.mpf("1e-35")


def test_h_profile(ctx):
    with ctx.working():
        # y < 0: e^{-y} Gamma(1 - k - N/2, -2y), quadrature cross check
        rng = random.Random(8)
        for _ in range(20):
            k = Fraction(rng.randint(-3, 4), rng.choice([1, 2]))
            N = rng.choice([1, 2])
            y = mp.mpf(rng.uniform(-3.0, -0.2))
            a = k + Fraction(N, 2)
            v = h_profile(k, N, y, ctx)
            q = mp.exp(-y) * mp.quad(
                lambda t: mp.exp(-t) * mp.power(t, -to_mpf(a)), [-2 * y, mp.inf])
            assert abs(v - q) / abs(q) < mp.mpf("1e-20")
        # k + N/2 = 0 gives e^y on both sides of 0
        for y in (mp.mpf("0.8"), mp.mpf("-0.6")):
            assert abs(h_profile(Fraction(-1), 2, y, ctx) - mp.exp(y)) < mp.mpf("1e-35")
        # divergence refused
        with pytest.raises(DomainError):
            h_profile(Fraction(2), 1, mp.mpf("0.5"), ctx)
        # jets match finite differences of the scalar version
        k, N, y = Fraction(2), 1, mp.mpf("-1.2")
        dj = h_profile_jet(k, N, y, 4, ctx)
        h = mp.mpf("1e-6")
        fd = (h_profile(k, N, y + h, ctx) - h_profile(k, N, y - h, ctx)) / (2 * h)
        assert abs(dj[1] - fd) < mp.mpf("1e-10")


def test_e_profile(ctx):
    with ctx.working():
        assert e_profile(0, ctx) == 0
        for z in (mp.mpf("0.3"), mp.mpf("1.7")):
            assert abs(e_profile(z, ctx) + e_profile(-z, ctx)) < mp.mpf("1e-40")
        q = 2 * mp.quad(lambda u: mp.exp(-mp.pi * u ** 2), [0, 1])
        assert abs(e_profile(1, ctx) - q) < mp.mpf("1e-25")
        assert e_profile(mp.mpf(30), ctx) - 1 < mp.mpf("1e-50")
        # monotone increasing
        assert e_profile(mp.mpf("0.4"), ctx) < e_profile(mp.mpf("0.5"), ctx)
        # jets vs finite differences
        z = mp.mpf("0.4")
        dj = e_profile_jet(z, 4, ctx)
        h = mp.mpf("1e-6")
        fd = (e_profile(z + h, ctx) - e_profile(z - h, ctx)) / (2 * h)
        assert abs(dj[1] - fd) < mp.mpf("1e-10")


def test_monotone_precision(ctx):
    checks = [
        lambda c: whittaker_M_renorm(Fraction(5, 2), Fraction(3, 2), mp.mpf("1.7"), c),
        lambda c: whittaker_W_renorm(Fraction(5, 2), Fraction(3, 2), mp.mpf("-2.3"), c),
        lambda c: bessel_J(Fraction(7, 3), mp.mpf("2.2"), c),
        lambda c: h_profile(Fraction(2), 1, mp.mpf("-1.2"), c),
        lambda c: e_profile(mp.mpf("0.77"), c),
    ]
    for fn in checks:
        assert monotone_precision_digits(fn, ctx)


def test_incomplete_gamma_jet(ctx):
    from maassjacobi.specfun import upper_incomplete_gamma_jet

    with ctx.working():
        a, x = Fraction(7, 4), mp.mpf("1.3")
        dj = upper_incomplete_gamma_jet(a, x, 4, ctx)
        # first derivative closed form
        expect = -mp.power(x, to_mpf(a - 1)) * mp.exp(-x)
        assert abs(dj[1] - expect) < mp.mpf("1e-35")
        h = mp.mpf("1e-7")
        fd2 = (upper_incomplete_gamma(a, x + h, ctx)
               - 2 * upper_incomplete_gamma(a, x, ctx)
               + upper_incomplete_gamma(a, x - h, ctx)) / h ** 2
        assert abs(dj[2] - fd2) < mp.mpf("1e-10")


def test_whittaker_W_large_t_decay(ctx):
    # leading order W ~ e^{-|t|/2} |t|^{sgn(t) kap/2 - kap/2}: checked as a
    # two-point asymptotic-ratio oracle (the 1/t correction shrinks)
    with ctx.working():
        s, kap = Fraction(9, 4), Fraction(3, 2)
        for sgn in (1, -1):
            def reduced(t):
                x = abs(t)
                lead = mp.exp(-x / 2) * mp.power(
                    x, to_mpf(Fraction(sgn, 2) * kap - kap / 2))
                return whittaker_W_renorm(s, kap, t, ctx) / lead
            r50 = reduced(mp.mpf(50) * sgn)
            r100 = reduced(mp.mpf(100) * sgn)
            # ratios tend to 1 with O(1/t) error
            assert abs(r50 - 1) < mp.mpf("0.1")
            assert abs(r100 - 1) < abs(r50 - 1)
            assert abs(r100 - 1) < mp.mpf("0.05")
