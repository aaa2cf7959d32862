import random
from fractions import Fraction
from itertools import product

import pytest
from mpmath import mp

from maassjacobi.errors import DomainError, NotSemiHolomorphicError
from maassjacobi.fourier import (
    FourierExpansion,
    FourierIndex,
    casimir_residual,
    eigenfunction_ratio_residual,
    heat_residual,
    maass_fourier_term,
    mixed_mock_term,
    phi_seed,
    residue_classes,
    residue_reduce,
    skew_fourier_term,
    specialization_chain_rule_residual,
    specialize_torsion,
    theta_decompose_semi,
    theta_decompose_skew,
    theta_klr,
    theta_lmu,
    theta_reassemble,
)
from maassjacobi.gaussian import GaussianRational
from maassjacobi.lattice import GramLattice, discriminant
from maassjacobi.series import casimir_eigenvalue

PTS1 = [(mp.mpc("0.13", "0.9"), [mp.mpc("0.21", "0.17")]),
        (mp.mpc("-0.4", "1.3"), [mp.mpc("-0.3", "0.4")]),
        (mp.mpc("0.05", "0.72"), [mp.mpc("0.4", "-0.2")])]


def test_theta_lmu_examples():
    L2 = GramLattice([[2]])
    th = theta_lmu(L2, [0], 2)
    got = {(i.n, i.r): c for i, (t, p, c) in th.terms.items()}
    assert got == {
        (Fraction(0), (0,)): GaussianRational(1),
        (Fraction(1, 2), (2,)): GaussianRational(1),
        (Fraction(1, 2), (-2,)): GaussianRational(1),
        (Fraction(2), (4,)): GaussianRational(1),
        (Fraction(2), (-4,)): GaussianRational(1),
    }
    th = theta_lmu(L2, [1], 1)
    assert sorted((i.n, i.r) for i in th.terms) == \
        [(Fraction(1, 8), (-1,)), (Fraction(1, 8), (1,))]
    assert len(theta_lmu(L2, [1], 0)) == 0
    with pytest.raises(DomainError):
        theta_lmu(GramLattice([[1, Fraction(1, 2)], [Fraction(1, 2), 1]]), [0, 0], 1)


def test_theta_lmu_term_count_oracle():
    # enumeration completeness vs naive box enumeration for bound <= 4
    for entries, mu in [([[1]], [0]), ([[2]], [1]), ([[3]], [2]),
                        ([[2, 1], [1, 2]], [1, 0]), ([[1, 0], [0, 2]], [0, 1])]:
        L = GramLattice(entries)
        for bound in (1, 2, 4):
            th = theta_lmu(L, mu, bound)
            count = 0
            for r in product(range(-14, 15), repeat=L.N):
                diff = [a - b for a, b in zip(r, mu)]
                lam = L.inv_apply(diff)
                if all(x.denominator == 1 for x in lam) and L.inv_quad(r) <= 4 * bound:
                    count += 1
            assert len(th) == count, (entries, mu, bound)


def test_theta_klr():
    L1 = GramLattice([[1]])
    assert len(theta_klr(3, L1, [0], 6)) == 0           # k odd, r = 0
    th = theta_klr(2, L1, [0], 4)
    got = {(i.n, i.r): c for i, (t, p, c) in th.terms.items()}
    assert got == {
        (Fraction(0), (0,)): GaussianRational(2),
        (Fraction(1), (2,)): GaussianRational(2),
        (Fraction(1), (-2,)): GaussianRational(2),
        (Fraction(4), (4,)): GaussianRational(2),
        (Fraction(4), (-4,)): GaussianRational(2),
    }
    # lambda = 0 contributes (1 + (-1)^k) zeta^r
    th = theta_klr(2, L1, [1], 0)
    assert th.terms[FourierIndex.of(0, (1,))][2] == GaussianRational(2)
    # variant flag changes the second family's vector
    tha = theta_klr(2, L1, [1], 2)
    thb = theta_klr(2, L1, [1], 2, zeta_variant=True)
    assert tha != thb


def test_expansion_json_round_trip():
    th = theta_klr(2, GramLattice([[2, 1], [1, 2]]), [1, 0], 3)
    s = th.to_json()
    back = FourierExpansion.from_json(s)
    assert back == th
    assert back.to_json() == s


def test_residue_classes_and_reduce():
    for entries in ([[1]], [[2]], [[3]], [[2, 1], [1, 2]], [[2, 0], [0, 2]]):
        L = GramLattice(entries)
        cls = residue_classes(L)
        assert len(cls) == int(L.det)
        # reduction is constant on cosets and lands in the class list
        rng = random.Random(0)
        for _ in range(20):
            r = [rng.randint(-6, 6) for _ in range(L.N)]
            lam = [rng.randint(-3, 3) for _ in range(L.N)]
            shift = [int(a + b) for a, b in zip(r, L.apply(lam))]
            assert residue_reduce(L, r) == residue_reduce(L, shift)
            assert residue_reduce(L, r) in cls


def test_theta_decomposition_round_trip():
    LL = GramLattice([[2, 1], [1, 2]])
    rng = random.Random(5)
    f = FourierExpansion(LL)
    coefmap = {}
    for _ in range(25):
        n = Fraction(rng.randint(0, 6))
        r = (rng.randint(-3, 3), rng.randint(-3, 3))
        key = (residue_reduce(LL, r), discriminant(LL, n, r))
        if key not in coefmap:
            coefmap[key] = GaussianRational(rng.randint(-5, 5), rng.randint(-5, 5))
        if coefmap[key]:
            f.terms[FourierIndex.of(n, r)] = ("constant", {}, coefmap[key])
    comp = theta_decompose_semi(f)
    assert theta_reassemble(comp, f) == f
    comp = theta_decompose_skew(f)
    assert theta_reassemble(comp, f, conjugate=True) == f
    # component exponents are D/(4|L|)
    for mu, c in comp.items():
        for expo, (_, indices) in c.items():
            for idx in indices:
                assert expo == discriminant(LL, idx.n, idx.r) / (4 * LL.det)


def test_theta_decomposition_delta_and_violation():
    LL = GramLattice([[2, 1], [1, 2]])
    th = theta_lmu(LL, [1, 0], 3)
    comp = theta_decompose_semi(th)
    mu0 = residue_reduce(LL, (1, 0))
    assert set(comp.keys()) == {mu0}
    assert set(comp[mu0].keys()) == {Fraction(0)}
    assert comp[mu0][Fraction(0)][0] == GaussianRational(1)

    bad = FourierExpansion(LL)
    r, rp = (1, 0), (3, 1)
    n = Fraction(1)
    D = discriminant(LL, n, r)
    npf = (D / LL.det + LL.inv_quad(rp)) / 4
    assert discriminant(LL, npf, rp) == D
    bad.terms[FourierIndex.of(n, r)] = ("constant", {}, GaussianRational(1))
    bad.terms[FourierIndex.of(npf, rp)] = ("constant", {}, GaussianRational(2))
    with pytest.raises(NotSemiHolomorphicError):
        theta_decompose_semi(bad)


def test_maass_fourier_terms(ctx):
    L = GramLattice([[1]])
    with pytest.raises(DomainError):
        maass_fourier_term("c0", 2, L, 1, [1])   # D != 0
    with pytest.raises(DomainError):
        maass_fourier_term("c-", 2, L, 1, [2])   # D = 0
    with pytest.raises(DomainError):
        maass_fourier_term("oops", 2, L, 1, [1])
    with ctx.working():
        f = maass_fourier_term("c+", 2, L, 1, [1])
        assert casimir_residual(f, 2, PTS1, ctx) < mp.mpf("1e-10")
        f = maass_fourier_term("c-", 2, L, -1, [1])
        assert casimir_residual(f, 2, PTS1, ctx) < mp.mpf("1e-8")
        f = maass_fourier_term("c0", 2, L, 1, [2])
        assert casimir_residual(f, 2, PTS1, ctx) < mp.mpf("1e-10")


def test_skew_term_heat_annihilation(ctx):
    L = GramLattice([[1]])
    f = skew_fourier_term(L, 1, [1])
    assert heat_residual(f, PTS1, ctx) < mp.mpf("1e-10")
    L2 = GramLattice([[2, 1], [1, 2]])
    f = skew_fourier_term(L2, 1, [1, 0])
    pts = [(t, [z[0], mp.mpc("0.1", "0.05")]) for t, z in PTS1]
    assert heat_residual(f, pts, ctx) < mp.mpf("1e-10")


def test_phi_seed_eigen(ctx):
    L = GramLattice([[1]])
    with pytest.raises(DomainError):
        phi_seed(2, L, Fraction(5, 2), 1, [2])  # D = 0
    for (k, s, n, r) in [(2, Fraction(5, 2), 1, [0]),
                         (3, Fraction(5, 4), -1, [1]),
                         (0, Fraction(5, 4), 1, [0]),
                         (4, Fraction(7, 2), 1, [1])]:
        f = phi_seed(k, L, s, n, r)
        ev = casimir_eigenvalue(k, 1, s)
        assert casimir_residual(f, k, PTS1, ctx, eigenvalue=ev) < mp.mpf("1e-10")


def test_mixed_mock_terms(ctx):
    # E(0) = 0 at nu = 0, h = 0: the term vanishes identically
    L = GramLattice([[1]])
    f0 = mixed_mock_term(1, L, 1, [1], 0, [0])
    with ctx.working():
        assert abs(f0.evaluate(mp.mpc("0.2", "0.9"), [mp.mpc("0.1", "0.2")], ctx)) == 0
    # matched parameters (D = -2|L| nu^2, h = 0): annihilated iff k = 1
    L2 = GramLattice([[2]])
    f = mixed_mock_term(1, L2, 0, [2], 1, [0])
    assert casimir_residual(f, 1, PTS1, ctx) < mp.mpf("1e-8")
    f2 = mixed_mock_term(2, L2, 0, [2], 1, [0])
    assert casimir_residual(f2, 2, PTS1, ctx) > mp.mpf("1e-3")
    # ratio-based eigen test gives the same verdict
    probe = (mp.mpc("0.3", "1.05"), [mp.mpc("0.2", "0.3")])
    r1, _ = eigenfunction_ratio_residual(f, 1, probe, PTS1, ctx)
    assert r1 < mp.mpf("1e-8")


def test_specialize_torsion(ctx):
    L = GramLattice([[2]])
    th = theta_lmu(L, [1], 2)
    # q^n zeta^r -> q^{n + r lam} e(r mu)
    lam, mu = [Fraction(1, 3)], [Fraction(1, 2)]
    terms = specialize_torsion(th, lam, mu)
    for (expo, coeff, phase) in terms:
        matched = [i for i in th.terms
                   if i.n + Fraction(i.r[0], 3) == expo
                   and Fraction(i.r[0], 2) == phase]
        assert matched
    # lam = mu = 0 restricts to z = 0
    def fn(tau, z):
        return th.evaluate(tau, z, ctx)
    h = specialize_torsion(fn, [0], [0])
    with ctx.working():
        tau = mp.mpc("0.2", "1.2")
        assert abs(h(tau) - th.evaluate(tau, [mp.mpc(0)], ctx)) == 0
    # chain rule jet check
    res = specialization_chain_rule_residual(th, lam, mu, mp.mpc("0.2", "1.1"), ctx)
    with ctx.working():
        assert res < mp.mpf("1e-8")


def test_theta_exponent_denominators():
    # exponents produced by the theta routines have denominator dividing 4|L|
    for entries, mu in [([[2]], [1]), ([[3]], [2]), ([[2, 1], [1, 2]], [1, 0])]:
        L = GramLattice(entries)
        th = theta_lmu(L, mu, 3)
        for idx in th.terms:
            assert (4 * L.det) % idx.n.denominator == 0


def test_theta_lmu_satisfies_heat_equation(ctx):
    # every q^{L^{-1}[r]/4} zeta^r term has D = 0, so the theta series lies
    # in the heat operator's kernel
    for entries, mu in [([[2]], [1]), ([[2, 1], [1, 2]], [1, 0])]:
        L = GramLattice(entries)
        th = theta_lmu(L, mu, 2)
        pts = [(mp.mpc("0.2", "1.1"), [mp.mpc("0.1", "0.2")] * L.N),
               (mp.mpc("-0.3", "0.8"), [mp.mpc("-0.2", "0.1")] * L.N)]
        assert heat_residual(th, pts, ctx) < mp.mpf("1e-30")
