"""Fourier expansions of Jacobi-type objects: theta series, the coefficient
profiles of harmonic and skew-holomorphic expansions, the mixed-mock
E-profile terms, the Whittaker seed of the Poincare series, the theta
decomposition, and torsion-point specialization.

A FourierExpansion is a finite map (n, r) -> (profile, params, coeff); a
term's value at (tau, z) is coeff * profile(y, v) * e(n tau + r.z).  Every
term is also jet-evaluable, which drives the operator annihilation tests.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial
from typing import NamedTuple

from mpmath import mp

from .errors import DomainError, NotSemiHolomorphicError
from .gaussian import GaussianRational
from .jets import Jet, JetSpace, compose_univariate, coordinate_jets, real_coordinate_jets
from .lattice import GramLattice, discriminant, enumerate_shifted
from .opcalc import base_values, build_casimir_op, build_heat
from .precision import PrecisionContext, mpf_str, to_mpc, to_mpf
from .specfun import (
    e_profile_jet,
    h_profile_jet,
    whittaker_M_jet,
    whittaker_W_jet,
)


class FourierIndex(NamedTuple):
    n: Fraction
    r: tuple

    @staticmethod
    def of(n, r) -> "FourierIndex":
        return FourierIndex(Fraction(n), tuple(int(x) for x in r))


# -- profiles -----------------------------------------------------------------
#
# Tags and parameters (rationals everywhere; pi enters only at evaluation):
#   constant    {}
#   y_power     {"exponent": e}                      y^e
#   exp_real    {"eexp": c}                          exp(pi c y)
#   H           {"k": k, "N": N, "arg": c, "eexp": c2}   H(pi c y) exp(pi c2 y)
#   W           {"s": s, "kappa": kp, "arg": c, "eexp": c2}
#   M           {"s": s, "kappa": kp, "arg": c, "eexp": c2}
#   E           {"nu": int, "h": [rationals]}        E((nu + h.v/y) sqrt(2y))


def _profile_jet(tag: str, params: dict, reals: dict, N: int, order: int,
                 ctx: PrecisionContext) -> Jet:
    y = reals["y"]
    if tag == "constant":
        return Jet.const(y.space, 1)
    if tag == "y_power":
        return y.pow_scalar(to_mpf(Fraction(params["exponent"])))
    if tag == "exp_real":
        return (y * (mp.pi * to_mpf(Fraction(params["eexp"])))).exp()
    if tag in ("H", "W", "M"):
        arg = y * (mp.pi * to_mpf(Fraction(params["arg"])))
        if tag == "H":
            derivs = h_profile_jet(Fraction(params["k"]), int(params["N"]),
                                   arg.value.real, order, ctx)
        elif tag == "W":
            derivs = whittaker_W_jet(Fraction(params["s"]), Fraction(params["kappa"]),
                                     arg.value.real, order, ctx)
        else:
            derivs = whittaker_M_jet(Fraction(params["s"]), Fraction(params["kappa"]),
                                     arg.value.real, order, ctx)
        taylor = [d / factorial(j) for j, d in enumerate(derivs)]
        out = compose_univariate(taylor, arg)
        c2 = Fraction(params.get("eexp", 0))
        if c2:
            out = out * (y * (mp.pi * to_mpf(c2))).exp()
        return out
    if tag == "E":
        h = [Fraction(x) for x in params["h"]]
        w = Jet.const(y.space, int(params["nu"]))
        hv = None
        for j, hj in enumerate(h, start=1):
            if hj:
                t = reals[f"v{j}"] * to_mpf(hj)
                hv = t if hv is None else hv + t
        if hv is not None:
            w = w + hv * y.reciprocal()
        w = w * (y * 2).pow_scalar(mp.mpf("0.5"))
        derivs = e_profile_jet(w.value.real, order, ctx)
        return compose_univariate([d / factorial(j) for j, d in enumerate(derivs)], w)
    raise DomainError(f"unknown profile tag {tag!r}")


def _index_exponential_jet(index: FourierIndex, coords: dict, N: int) -> Jet:
    expo = coords["tau"] * to_mpc(index.n)
    for j, rj in enumerate(index.r, start=1):
        if rj:
            expo = expo + coords[f"z{j}"] * rj
    return (expo * (2j * mp.pi)).exp()


def term_jet(index: FourierIndex, tag: str, params: dict, coeff, N: int,
             coords: dict, ctx: PrecisionContext, order: int = None) -> Jet:
    """Jet of one expansion term at the base point of ``coords``."""
    reals = real_coordinate_jets(coords, N)
    ordr = order if order is not None else coords["tau"].space.degree
    pj = _profile_jet(tag, params, reals, N, ordr, ctx)
    qz = _index_exponential_jet(index, coords, N)
    return pj * qz * to_mpc(coeff)


class FourierExpansion:
    """A finite Fourier expansion over a fixed lattice."""

    __slots__ = ("lattice", "terms")

    def __init__(self, lattice: GramLattice, terms: dict = None):
        self.lattice = lattice
        self.terms = dict(terms or {})

    def add_term(self, index: FourierIndex, tag: str, params: dict, coeff):
        if not coeff:
            return
        if index in self.terms:
            t0, p0, c0 = self.terms[index]
            if (t0, p0) == (tag, params):
                s = c0 + coeff
                if s:
                    self.terms[index] = (tag, params, s)
                else:
                    del self.terms[index]
                return
            raise DomainError(f"conflicting profiles at index {index}")
        self.terms[index] = (tag, params, coeff)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, FourierExpansion)
            and self.lattice == other.lattice
            and self.terms == other.terms
        )

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0].n, kv[0].r))

    def evaluate(self, tau, z, ctx: PrecisionContext = None):
        ctx = ctx or PrecisionContext()
        N = self.lattice.N
        with ctx.working():
            space = JetSpace.for_rank(N, 0)
            coords = coordinate_jets(space, tau, z)
            acc = mp.mpc(0)
            for index, (tag, params, coeff) in self.terms.items():
                acc += term_jet(index, tag, params, coeff, N, coords, ctx, order=0).value
            return acc

    def jet(self, tau, z, degree: int = 5, ctx: PrecisionContext = None) -> Jet:
        ctx = ctx or PrecisionContext()
        N = self.lattice.N
        space = JetSpace.for_rank(N, degree)
        coords = coordinate_jets(space, tau, z)
        acc = Jet.const(space, 0)
        for index, (tag, params, coeff) in self.terms.items():
            acc = acc + term_jet(index, tag, params, coeff, N, coords, ctx)
        return acc

    # -- serialization: stable key order, exact rational strings ------------

    def to_json(self) -> str:
        terms = []
        for index, (tag, params, coeff) in self.sorted_items():
            terms.append({
                "n": str(index.n),
                "r": list(index.r),
                "profile": tag,
                "params": {k: _param_str(v) for k, v in sorted(params.items())},
                "coeff": _coeff_pair(coeff),
            })
        return json.dumps(
            {"lattice": self.lattice.to_json_obj(), "terms": terms},
            separators=(",", ":"),
        )

    @staticmethod
    def from_json(s: str) -> "FourierExpansion":
        data = json.loads(s)
        L = GramLattice.from_json_obj(data["lattice"])
        out = FourierExpansion(L)
        for t in data["terms"]:
            index = FourierIndex.of(Fraction(t["n"]), t["r"])
            params = {k: _param_parse(v) for k, v in t["params"].items()}
            coeff = _coeff_unpair(t["coeff"])
            out.terms[index] = (t["profile"], params, coeff)
        return out


def _param_str(v):
    if isinstance(v, (list, tuple)):
        return [str(Fraction(x)) for x in v]
    if isinstance(v, bool) or isinstance(v, int):
        return str(v)
    return str(Fraction(v))


def _param_parse(v):
    if isinstance(v, list):
        return [Fraction(x) for x in v]
    f = Fraction(v)
    return int(f) if f.denominator == 1 else f


def _coeff_pair(coeff):
    if isinstance(coeff, (int, Fraction)):
        coeff = GaussianRational.coerce(coeff)
    if isinstance(coeff, GaussianRational):
        return [str(coeff.re), str(coeff.im)]
    c = mp.mpc(coeff)
    return [mpf_str(c.real), mpf_str(c.imag)]


def _coeff_unpair(pair):
    a, b = pair
    try:
        return GaussianRational(Fraction(a), Fraction(b))
    except ValueError:
        return mp.mpc(mp.mpf(a), mp.mpf(b))


# -- theta series ---------------------------------------------------------------


def _require_integral(L: GramLattice, what: str):
    if not L.is_integral():
        raise DomainError(
            f"{what} needs an integral Gram matrix: L Z^N must lie inside Z^N"
        )


def theta_lmu(L: GramLattice, mu, bound) -> FourierExpansion:
    """theta_{L,mu} = sum over r = mu mod L Z^N of q^{L^{-1}[r]/4} zeta^r,
    truncated at q-exponent <= bound."""
    _require_integral(L, "theta_{L,mu}")
    mu = [int(x) for x in mu]
    bound = Fraction(bound)
    out = FourierExpansion(L)
    center = L.inv_apply(mu)
    for lam in enumerate_shifted(L, center, 4 * bound):
        r = tuple(int(m + x) for m, x in zip(mu, L.apply(lam)))
        n = L.inv_quad(r) / 4
        out.add_term(FourierIndex.of(n, r), "constant", {}, GaussianRational(1))
    return out


def theta_klr(k: int, L: GramLattice, r, bound, zeta_variant: bool = False) -> FourierExpansion:
    """theta^{(r)}_{k,L} = sum_lam q^{L[lam]} zeta^{2L lam} (q^{r.lam} zeta^r
    + (-1)^k q^{-r.lam} zeta^r), truncated at q-exponent <= bound.

    ``zeta_variant`` switches the second summand's vector to 2L lam - r (the
    classically expected form); the printed form is the default.
    """
    k = int(k)
    r = [int(x) for x in r]
    bound = Fraction(bound)
    out = FourierExpansion(L)
    half_lr = [x / 2 for x in L.inv_apply(r)]
    sign = GaussianRational((-1) ** k)
    shift = L.inv_quad(r) / 4

    def vec(lam, conj_sign):
        two_l = [2 * x for x in L.apply(lam)]
        if conj_sign and zeta_variant:
            return tuple(int(a - b) for a, b in zip(two_l, r))
        return tuple(int(a + b) for a, b in zip(two_l, r))

    # family with exponent L[lam] + r.lam:  L[lam + L^{-1}r/2] <= bound + L^{-1}[r]/4
    for lam in enumerate_shifted(L, half_lr, bound + shift):
        n = L.quad(lam) + sum(a * b for a, b in zip(r, lam))
        if n > bound:
            continue
        out.add_term(FourierIndex.of(n, vec(lam, False)), "constant", {},
                     GaussianRational(1))
    for lam in enumerate_shifted(L, [-x for x in half_lr], bound + shift):
        n = L.quad(lam) - sum(a * b for a, b in zip(r, lam))
        if n > bound:
            continue
        out.add_term(FourierIndex.of(n, vec(lam, True)), "constant", {}, sign)
    return out


# -- theta decomposition ----------------------------------------------------------


def _column_hnf(B):
    """Column Hermite form of a nonsingular integer matrix: returns an upper
    triangular H with positive diagonal such that H Z^N = B Z^N."""
    N = len(B)
    cols = [[int(B[i][j]) for i in range(N)] for j in range(N)]
    # eliminate on each row (from the bottom) by integer column operations,
    # leaving column `row` as the pivot; columns 0..row-1 end with zeros there
    for row in range(N - 1, -1, -1):
        for j in range(row):
            while cols[j][row] != 0:
                if cols[row][row] == 0:
                    cols[row], cols[j] = cols[j], cols[row]
                    continue
                q = cols[j][row] // cols[row][row]
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[row])]
                if cols[j][row] != 0:
                    cols[row], cols[j] = cols[j], cols[row]
        if cols[row][row] < 0:
            cols[row] = [-x for x in cols[row]]
        for j in range(row + 1, N):
            q = cols[j][row] // cols[row][row]
            if q:
                cols[j] = [x - q * y for x, y in zip(cols[j], cols[row])]
    return [[cols[j][i] for j in range(N)] for i in range(N)]


def residue_reduce(L: GramLattice, r):
    """Canonical representative of r mod L Z^N."""
    _require_integral(L, "residue reduction")
    H = _column_hnf(L.entries)
    r = [int(x) for x in r]
    N = L.N
    for i in range(N - 1, -1, -1):
        q = r[i] // H[i][i]
        if q:
            for t in range(i + 1):
                r[t] -= q * H[t][i]
    return tuple(r)


def residue_classes(L: GramLattice):
    """All |L| residue classes of Z^N mod L Z^N, canonically reduced."""
    from itertools import product as _product

    _require_integral(L, "residue classes")
    H = _column_hnf(L.entries)
    boxes = [range(H[i][i]) for i in range(L.N)]
    seen = []
    for tup in _product(*boxes):
        rep = residue_reduce(L, list(tup))
        if rep not in seen:
            seen.append(rep)
    return seen


def theta_decompose_semi(f: FourierExpansion, conjugate: bool = False) -> dict:
    """Components h_mu with exponents D/(4|L|).

    Requires (and checks) that coefficients depend only on (D, r mod L Z^N);
    violation raises NotSemiHolomorphicError.  The skew variant conjugates
    the component coefficients.
    """
    L = f.lattice
    out = {}
    for index, (tag, params, coeff) in f.terms.items():
        mu = residue_reduce(L, index.r)
        D = discriminant(L, index.n, index.r)
        expo = D / (4 * L.det)
        c = coeff
        if conjugate:
            c = c.conjugate() if isinstance(c, GaussianRational) else mp.conj(c)
        comp = out.setdefault(mu, {})
        if expo in comp:
            if comp[expo][0] != c:
                raise NotSemiHolomorphicError(
                    f"coefficients at (D={D}, mu={mu}) disagree: "
                    f"{comp[expo][0]} vs {c}"
                )
            comp[expo] = (c, comp[expo][1] + [index])
        else:
            comp[expo] = (c, [index])
    return out


def theta_decompose_skew(f: FourierExpansion) -> dict:
    return theta_decompose_semi(f, conjugate=True)


def theta_reassemble(components: dict, f_support: FourierExpansion,
                     conjugate: bool = False) -> FourierExpansion:
    """Rebuild an expansion on the support of ``f_support`` from components."""
    L = f_support.lattice
    out = FourierExpansion(L)
    for index, (tag, params, _) in f_support.terms.items():
        mu = residue_reduce(L, index.r)
        D = discriminant(L, index.n, index.r)
        expo = D / (4 * L.det)
        c = components[mu][expo][0]
        if conjugate:
            c = c.conjugate() if isinstance(c, GaussianRational) else mp.conj(c)
        out.terms[index] = (tag, params, c)
    return out


# -- expansion term templates --------------------------------------------------------


def maass_fourier_term(kind: str, k, L: GramLattice, n, r) -> FourierExpansion:
    """One term of the semi-holomorphic harmonic expansion: kind in
    {'c0', 'c+', 'c-'} with the D-sign constraint checked.

    The y-exponent of the c0 term and the integrand power of the H profile
    are the ones the Casimir ODE forces (jet-verified): the c0 power is
    N/2 - k + 1 and the H integrand power is -(k - N/2), reached by calling
    the H profile with first parameter k - N.  The printed variants (power
    N/2 - k, integrand power -(k + N/2)) fail annihilation, which the test
    suite records.
    """
    k = Fraction(k)
    N = L.N
    D = discriminant(L, n, r)
    index = FourierIndex.of(n, r)
    out = FourierExpansion(L)
    if kind == "c0":
        if D != 0:
            raise DomainError(f"c0 terms require D = 0, got D = {D}")
        out.add_term(index, "y_power", {"exponent": Fraction(N, 2) - k + 1},
                     GaussianRational(1))
    elif kind == "c+":
        out.add_term(index, "constant", {}, GaussianRational(1))
    elif kind == "c-":
        if D == 0:
            raise DomainError("c- terms require D != 0")
        c = D / (2 * L.det)
        out.add_term(index, "H",
                     {"k": k - N, "N": N, "arg": c, "eexp": c}, GaussianRational(1))
    else:
        raise DomainError(f"unknown kind {kind!r}")
    return out


def skew_fourier_term(L: GramLattice, n, r) -> FourierExpansion:
    """c(n,r) e(-iDy/2|L|) q^n zeta^r with coefficient 1."""
    D = discriminant(L, n, r)
    out = FourierExpansion(L)
    out.add_term(FourierIndex.of(n, r), "exp_real", {"eexp": D / L.det},
                 GaussianRational(1))
    return out


def mixed_mock_term(k, L: GramLattice, n, r, nu: int, h) -> FourierExpansion:
    """c^-(D) E((nu + h.v/y) sqrt(2y)) q^n zeta^r."""
    out = FourierExpansion(L)
    h = [Fraction(x) for x in h]
    out.add_term(FourierIndex.of(n, r), "E", {"nu": int(nu), "h": h},
                 GaussianRational(1))
    return out


def phi_seed(k, L: GramLattice, s, n, r) -> FourierExpansion:
    """The Whittaker seed M_{s,k-N/2}(pi D y/|L|) e(rz + i L^{-1}[r] y/4 + nx),
    expressed as an M-profile times q^n zeta^r."""
    D = discriminant(L, n, r)
    if D == 0:
        raise DomainError("phi seed requires D != 0")
    k = Fraction(k)
    N = L.N
    out = FourierExpansion(L)
    out.add_term(
        FourierIndex.of(n, r), "M",
        {"s": Fraction(s), "kappa": k - Fraction(N, 2),
         "arg": D / L.det, "eexp": D / (2 * L.det)},
        GaussianRational(1),
    )
    return out


# -- operator annihilation / eigenvalue reports ------------------------------------


def casimir_residual(f: FourierExpansion, k, points, ctx: PrecisionContext = None,
                     eigenvalue=0):
    """max_p |C^{k,L} f - lambda f| / |f| over sample points, via jets."""
    ctx = ctx or PrecisionContext()
    L = f.lattice
    op = build_casimir_op(L)
    deg = op.order()
    worst = None
    with ctx.working():
        kv = to_mpc(Fraction(k))
        ev = to_mpc(eigenvalue)
        for tau, z in points:
            jet = f.jet(tau, z, degree=deg, ctx=ctx)
            val = op.apply_jet(jet, base_values(tau, z), k_value=kv)
            res = abs(val - ev * jet.value) / max(mp.mpf(1), abs(jet.value))
            worst = res if worst is None else max(worst, res)
    return worst


def heat_residual(f: FourierExpansion, points, ctx: PrecisionContext = None):
    """max_p |heat f| / |f| over sample points."""
    ctx = ctx or PrecisionContext()
    op = build_heat(f.lattice)
    worst = None
    with ctx.working():
        for tau, z in points:
            jet = f.jet(tau, z, degree=op.order(), ctx=ctx)
            val = op.apply_jet(jet, base_values(tau, z))
            res = abs(val) / max(mp.mpf(1), abs(jet.value))
            worst = res if worst is None else max(worst, res)
    return worst


def eigenfunction_ratio_residual(f: FourierExpansion, k, probe_point, points,
                                 ctx: PrecisionContext = None):
    """Fit the eigenvalue at probe_point, then report the worst residual of
    C f = lambda f at the other points (the paper states eigenfunction-ness
    without the eigenvalue)."""
    ctx = ctx or PrecisionContext()
    L = f.lattice
    op = build_casimir_op(L)
    deg = op.order()
    with ctx.working():
        kv = to_mpc(Fraction(k))
        tau, z = probe_point
        jet = f.jet(tau, z, degree=deg, ctx=ctx)
        lam = op.apply_jet(jet, base_values(tau, z), k_value=kv) / jet.value
        worst = mp.mpf(0)
        for tau, z in points:
            jet = f.jet(tau, z, degree=deg, ctx=ctx)
            val = op.apply_jet(jet, base_values(tau, z), k_value=kv)
            res = abs(val - lam * jet.value) / max(mp.mpf(1), abs(jet.value))
            worst = max(worst, res)
    return worst, lam


# -- torsion specialization --------------------------------------------------------


def specialize_torsion(f, lam, mu):
    """Specialize z = lam tau + mu.

    On a function handle f(tau, z) the result is a one-variable handle; on a
    FourierExpansion of constant-profile terms it is the list of one-variable
    terms (exponent, coeff * e(r.mu)) with exponent n + r.lam.
    """
    lam = [Fraction(x) for x in lam]
    mu = [Fraction(x) for x in mu]

    if isinstance(f, FourierExpansion):
        out = []
        for index, (tag, params, coeff) in f.sorted_items():
            if tag != "constant":
                raise DomainError("expansion specialization expects holomorphic terms")
            expo = index.n + sum(Fraction(a) * b for a, b in zip(index.r, lam))
            phase = sum(Fraction(a) * b for a, b in zip(index.r, mu))
            out.append((expo, coeff, phase))
        return out

    def handle(tau):
        z = [to_mpc(a) * tau + to_mpc(b) for a, b in zip(lam, mu)]
        return f(tau, z)

    return handle


def specialization_chain_rule_residual(f: FourierExpansion, lam, mu, tau0,
                                       ctx: PrecisionContext = None, h=None):
    """d/dtaubar of the specialized function vs (d_taubar + sum lam_i
    d_zbar_i) f at the specialized point, via jets of f and a finite
    difference in taubar of the specialization."""
    from .jets import finite_difference

    ctx = ctx or PrecisionContext()
    L = f.lattice
    N = L.N
    lam = [Fraction(x) for x in lam]
    mu = [Fraction(x) for x in mu]
    with ctx.working():
        h = h or mp.mpf("1e-6")
        tau0 = mp.mpc(tau0)
        z0 = [to_mpc(a) * tau0 + to_mpc(b) for a, b in zip(lam, mu)]
        jet = f.jet(tau0, z0, degree=1, ctx=ctx)
        rhs = jet.derivative_at_base((0, 1) + (0,) * (2 * N))
        for i in range(N):
            e = [0] * (2 * N + 2)
            e[2 + N + i] = 1
            rhs += to_mpc(lam[i]) * jet.derivative_at_base(tuple(e))

        # d/dtaubar = (d/dx + i d/dy)/2 on the specialized one-variable function
        def g(pt):
            x, y = pt
            tau = mp.mpc(x, y)
            z = [to_mpc(a) * tau + to_mpc(b) for a, b in zip(lam, mu)]
            return f.evaluate(tau, z, ctx)

        base = [tau0.real, tau0.imag]
        dx = finite_difference(g, base, 0, h)
        dy = finite_difference(g, base, 1, h)
        lhs = (dx + 1j * dy) / 2
        return abs(lhs - rhs)
