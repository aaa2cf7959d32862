"""The centrally extended real Jacobi group: product, inverse, exponential
map, matrix embeddings, the action on H x C^N, and the scalar cocycles that
define the slash actions.

Elements carry either exact Gaussian-rational entries or mpmath numbers;
the mode is chosen at construction and never inferred.  Algebraic formulas
(product, inverse, embeddings, the a-cocycle) stay exact on exact input.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp

from . import linalg
from .errors import DomainError, MalformedElementError
from .gaussian import GaussianRational
from .precision import PrecisionContext, to_mpc

J2 = ((0, -1), (1, 0))

NUMERIC_TOL = 1e-9


def _is_exact(entries) -> bool:
    return all(
        isinstance(x, (int, Fraction, GaussianRational)) for r in entries for x in r
    )


def _as_exact(rows):
    return linalg.to_gaussian(rows)


def _j2(exact: bool):
    if exact:
        return _as_exact(J2)
    return tuple(tuple(mp.mpc(x) for x in r) for r in J2)


def _sym_defect(m):
    n = len(m)
    return max(
        (abs(complex(m[i][j] - m[j][i])) for i in range(n) for j in range(i + 1, n)),
        default=0.0,
    )


class GroupElement:
    """(M, X, kappa) with det M = 1 and kappa + X J2 X^T / 2 symmetric."""

    __slots__ = ("M", "X", "kappa", "N", "exact")

    def __init__(self, M, X, kappa, check: bool = True):
        M = linalg.mat(M)
        X = linalg.mat(X)
        kappa = linalg.mat(kappa)
        self.exact = _is_exact(M) and _is_exact(X) and _is_exact(kappa)
        if self.exact:
            M, X, kappa = _as_exact(M), _as_exact(X), _as_exact(kappa)
        self.M, self.X, self.kappa = M, X, kappa
        self.N = len(X)
        if check:
            self._validate()

    def _validate(self):
        if linalg.dims(self.M) != (2, 2):
            raise MalformedElementError("M must be 2x2")
        if linalg.dims(self.X) != (self.N, 2) or linalg.dims(self.kappa) != (self.N, self.N):
            raise MalformedElementError("X must be Nx2 and kappa NxN")
        d = linalg.det(self.M)
        sym = linalg.add(self.kappa, linalg.scale(_half(self.exact),
                         linalg.mul(linalg.mul(self.X, _j2(self.exact)),
                                    linalg.transpose(self.X))))
        if self.exact:
            if d != GaussianRational(1):
                raise MalformedElementError(f"det(M) = {d} != 1")
            if sym != linalg.transpose(sym):
                raise MalformedElementError("kappa + X J2 X^T / 2 is not symmetric")
        else:
            if abs(complex(d) - 1) > NUMERIC_TOL:
                raise MalformedElementError(f"det(M) deviates from 1 by {abs(complex(d)-1)}")
            if _sym_defect(sym) > NUMERIC_TOL:
                raise MalformedElementError("kappa + X J2 X^T / 2 is not symmetric")

    def __repr__(self):
        return f"GroupElement(M={self.M}, X={self.X}, kappa={self.kappa})"

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.M == other.M and self.X == other.X and self.kappa == other.kappa
        )

    def to_numeric(self) -> "GroupElement":
        """Copy with entries converted to mpc at current working precision."""
        conv = lambda m: tuple(tuple(to_mpc(x) for x in r) for r in m)
        return GroupElement(conv(self.M), conv(self.X), conv(self.kappa), check=False)


def _half(exact: bool):
    return GaussianRational(Fraction(1, 2)) if exact else mp.mpf("0.5")


def jacobi_identity_element(N: int, exact: bool = True) -> GroupElement:
    one = GaussianRational(1) if exact else mp.mpf(1)
    zero = GaussianRational(0) if exact else mp.mpf(0)
    return GroupElement(
        linalg.identity(2, one, zero), linalg.zeros(N, 2, zero), linalg.zeros(N, N, zero)
    )


def jacobi_mul(g: GroupElement, h: GroupElement) -> GroupElement:
    """(M, X, k)(M', X', k') = (MM', XM' + X', k + k' - X M' J2 X'^T)."""
    if g.N != h.N:
        raise MalformedElementError("rank mismatch")
    exact = g.exact and h.exact
    MM = linalg.mul(g.M, h.M)
    XX = linalg.add(linalg.mul(g.X, h.M), h.X)
    cross = linalg.mul(linalg.mul(linalg.mul(g.X, h.M), _j2(exact)),
                       linalg.transpose(h.X))
    kk = linalg.sub(linalg.add(g.kappa, h.kappa), cross)
    return GroupElement(MM, XX, kk, check=False)


def jacobi_inv(g: GroupElement) -> GroupElement:
    """Inverse; for M in SL2 the central part is -kappa - X J2 X^T."""
    Minv = linalg.inverse(g.M)
    Xinv = linalg.neg(linalg.mul(g.X, Minv))
    kinv = linalg.neg(linalg.add(
        g.kappa,
        linalg.mul(linalg.mul(g.X, _j2(g.exact)), linalg.transpose(g.X)),
    ))
    return GroupElement(Minv, Xinv, kinv, check=False)


class AlgebraElement:
    """(M, X, kappa) with tr M = 0 and kappa symmetric."""

    __slots__ = ("M", "X", "kappa", "N", "exact")

    def __init__(self, M, X, kappa, check: bool = True):
        M = linalg.mat(M)
        X = linalg.mat(X)
        kappa = linalg.mat(kappa)
        self.exact = _is_exact(M) and _is_exact(X) and _is_exact(kappa)
        if self.exact:
            M, X, kappa = _as_exact(M), _as_exact(X), _as_exact(kappa)
        self.M, self.X, self.kappa = M, X, kappa
        self.N = len(X)
        if check:
            tr = M[0][0] + M[1][1]
            if self.exact:
                if tr != GaussianRational(0):
                    raise MalformedElementError("M is not traceless")
                if kappa != linalg.transpose(kappa):
                    raise MalformedElementError("kappa is not symmetric")
            else:
                if abs(complex(tr)) > NUMERIC_TOL or _sym_defect(kappa) > NUMERIC_TOL:
                    raise MalformedElementError("algebra element invariants violated")

    def bracket(self, other: "AlgebraElement") -> "AlgebraElement":
        """([M,M'], XM' - X'M, X' J2 X^T - X J2 X'^T)."""
        exact = self.exact and other.exact
        j2 = _j2(exact)
        Mb = linalg.sub(linalg.mul(self.M, other.M), linalg.mul(other.M, self.M))
        Xb = linalg.sub(linalg.mul(self.X, other.M), linalg.mul(other.X, self.M))
        kb = linalg.sub(
            linalg.mul(linalg.mul(other.X, j2), linalg.transpose(self.X)),
            linalg.mul(linalg.mul(self.X, j2), linalg.transpose(other.X)),
        )
        return AlgebraElement(Mb, Xb, kb, check=False)

    def scale(self, c) -> "AlgebraElement":
        return AlgebraElement(
            linalg.scale(c, self.M), linalg.scale(c, self.X), linalg.scale(c, self.kappa),
            check=False,
        )

    def add(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(
            linalg.add(self.M, other.M), linalg.add(self.X, other.X),
            linalg.add(self.kappa, other.kappa), check=False,
        )

    def basis_coefficients(self) -> dict:
        """Coordinates over {E, F, H, e_i, f_i, Z_ij} (exact elements only)."""
        if not self.exact:
            raise DomainError("basis coordinates require exact entries")
        out = {"E": self.M[0][1], "F": self.M[1][0], "H": self.M[0][0]}
        for i in range(self.N):
            out[f"e{i + 1}"] = self.X[i][1]
            out[f"f{i + 1}"] = self.X[i][0]
        for i in range(self.N):
            for j in range(i, self.N):
                c = self.kappa[i][j]
                out[f"Z{i + 1}{j + 1}"] = c if i == j else 2 * c
        return out

    @staticmethod
    def from_basis(N: int, coeffs: dict) -> "AlgebraElement":
        z = GaussianRational(0)
        M = [[z, z], [z, z]]
        X = [[z, z] for _ in range(N)]
        K = [[z for _ in range(N)] for _ in range(N)]
        half = GaussianRational(Fraction(1, 2))
        for name, c in coeffs.items():
            c = GaussianRational.coerce(c)
            if name == "E":
                M[0][1] = M[0][1] + c
            elif name == "F":
                M[1][0] = M[1][0] + c
            elif name == "H":
                M[0][0] = M[0][0] + c
                M[1][1] = M[1][1] - c
            elif name.startswith("e"):
                X[int(name[1:]) - 1][1] = X[int(name[1:]) - 1][1] + c
            elif name.startswith("f"):
                X[int(name[1:]) - 1][0] = X[int(name[1:]) - 1][0] + c
            elif name.startswith("Z"):
                i, j = int(name[1]) - 1, int(name[2]) - 1
                if i == j:
                    K[i][i] = K[i][i] + c
                else:
                    K[i][j] = K[i][j] + c * half
                    K[j][i] = K[j][i] + c * half
            else:
                raise ValueError(f"unknown generator {name}")
        return AlgebraElement(M, X, K)

    def __repr__(self):
        return f"AlgebraElement(M={self.M}, X={self.X}, kappa={self.kappa})"


class Point:
    """A point (tau, z) of H x C^N."""

    __slots__ = ("tau", "z")

    def __init__(self, tau, z=()):
        self.tau = tau
        self.z = tuple(z)
        if _imag(tau) <= 0:
            raise DomainError("Im(tau) must be positive")

    @property
    def N(self):
        return len(self.z)

    def __repr__(self):
        return f"Point({self.tau}, {self.z})"


def _imag(x):
    if isinstance(x, GaussianRational):
        return x.im
    return mp.mpc(x).imag


def mobius(M, tau):
    a, b = M[0]
    c, d = M[1]
    return (a * tau + b) / (c * tau + d)


def cocycle_beta(M, tau):
    """beta(M, tau) = (c tau + d)^{-1}."""
    c, d = M[1]
    den = c * tau + d
    if isinstance(den, GaussianRational):
        return den.inverse()
    return 1 / den


def act(g, p: Point) -> Point:
    """Left action (M, X)(tau, z) = (M tau, beta (z + X1 tau + X2))."""
    M, X = g.M, g.X
    beta = cocycle_beta(M, p.tau)
    znew = tuple(
        beta * (zj + X[j][0] * p.tau + X[j][1]) for j, zj in enumerate(p.z)
    )
    return Point(mobius(M, p.tau), znew)


def cocycle_a(g: GroupElement, p: Point):
    """The symmetric-matrix-valued cocycle underlying alpha_L."""
    M, X, kappa = g.M, g.X, g.kappa
    N = g.N
    c = M[1][0]
    beta = cocycle_beta(M, p.tau)
    x1 = tuple(X[j][0] for j in range(N))
    x2 = tuple(X[j][1] for j in range(N))
    w = tuple(p.z[j] + x1[j] * p.tau + x2[j] for j in range(N))
    rows = []
    for i in range(N):
        row = []
        for j in range(N):
            val = (
                kappa[i][j]
                + x2[i] * x1[j]
                + x1[i] * p.z[j] + p.z[i] * x1[j]
                + x1[i] * x1[j] * p.tau
                - c * beta * w[i] * w[j]
            )
            row.append(val)
        rows.append(tuple(row))
    return tuple(rows)


def cocycle_alpha(L, g: GroupElement, p: Point, ctx: PrecisionContext = None):
    """alpha_L = exp(2 pi i tr(L a(g, p))), evaluated numerically."""
    ctx = ctx or PrecisionContext()
    a = cocycle_a(g, p)
    with ctx.working():
        Lm = tuple(tuple(to_mpc(x) for x in r) for r in linalg.mat(L))
        am = tuple(tuple(to_mpc(x) for x in r) for r in a)
        tr = linalg.trace(linalg.mul(Lm, am))
        return mp.exp(2j * mp.pi * tr)


def slash(f, k, kprime, L, g: GroupElement, ctx: PrecisionContext = None):
    """Right slash action on function handles.

    Returns p -> beta^(k-k') |beta|^(2k') alpha_L(g,p) f(g p).  Requires
    k - k' to be an integer; the split keeps the power single-valued for
    arbitrary rational weights.
    """
    ctx = ctx or PrecisionContext()
    k = Fraction(k)
    kprime = Fraction(kprime)
    if (k - kprime).denominator != 1:
        raise DomainError("slash action requires k - k' to be an integer")
    kk = int(k - kprime)

    def slashed(p: Point):
        with ctx.working():
            gm = g if not g.exact else g.to_numeric()
            tau = to_mpc(p.tau)
            pm = Point(tau, tuple(to_mpc(zj) for zj in p.z))
            beta = cocycle_beta(gm.M, tau)
            w = beta ** kk
            if kprime:
                w *= (beta * mp.conj(beta)).real ** (
                    mp.mpf(kprime.numerator) / kprime.denominator
                )
            w *= cocycle_alpha(L, gm, pm, ctx)
            return w * f(act(gm, pm))

    return slashed


# -- exponential map and embeddings -------------------------------------------


_EXP_NORM_BOUND = 8


def _mat_norm(M):
    return max(sum(abs(complex(x)) for x in row) for row in M)


def _exp_series_2x2(M, ctx: PrecisionContext):
    """exp, g, h power series on a 2x2 matrix with rigorous tail control.

    g(z) = (e^z - 1)/z and h(z) = (e^z - z - 1)/z^2, summed jointly as
    sum M^n/n!, sum M^n/(n+1)!, sum M^n/(n+2)!.
    """
    one = linalg.identity(2, mp.mpf(1), mp.mpf(0))
    term = one
    exp_acc = one
    g_acc = linalg.scale(mp.mpf(1), one)
    h_acc = linalg.scale(mp.mpf("0.5"), one)
    norm = _mat_norm(M)
    bound = mp.mpf(norm)
    fact = mp.mpf(1)
    tol = mp.mpf(2) ** (-(ctx.bits + 16))
    n = 0
    while True:
        n += 1
        if n > ctx.max_terms:
            ctx.exhausted("matrix exponential series")
        term = linalg.mul(term, M)
        fact *= n
        exp_acc = linalg.add(exp_acc, linalg.scale(1 / fact, term))
        g_acc = linalg.add(g_acc, linalg.scale(1 / (fact * (n + 1)), term))
        h_acc = linalg.add(h_acc, linalg.scale(1 / (fact * (n + 1) * (n + 2)), term))
        # once the ratio bound norm/(n+1) < 1/2, the remaining tail is below
        # twice the next term bound
        tail = bound ** (n + 1) / (fact * (n + 1))
        if norm < (n + 1) / 2 and tail < tol:
            break
    return exp_acc, g_acc, h_acc


def jacobi_exp(Y: AlgebraElement, ctx: PrecisionContext = None) -> GroupElement:
    """exp(M, X, kappa) = (e^M, X g(M), kappa - X h(M) J2 X^T).

    Inputs with ||M|| beyond the series bound are halved recursively and
    recombined with the group law (exact squaring in the group).
    """
    ctx = ctx or PrecisionContext()
    with ctx.working():
        M = tuple(tuple(to_mpc(x) for x in r) for r in Y.M)
        X = tuple(tuple(to_mpc(x) for x in r) for r in Y.X)
        kappa = tuple(tuple(to_mpc(x) for x in r) for r in Y.kappa)
        if _mat_norm(M) > _EXP_NORM_BOUND:
            half = AlgebraElement(
                linalg.scale(mp.mpf("0.5"), M),
                linalg.scale(mp.mpf("0.5"), X),
                linalg.scale(mp.mpf("0.5"), kappa),
                check=False,
            )
            ghalf = jacobi_exp(half, ctx)
            return jacobi_mul(ghalf, ghalf)
        eM, gM, hM = _exp_series_2x2(M, ctx)
        j2 = _j2(False)
        Xg = linalg.mul(X, gM)
        corr = linalg.mul(linalg.mul(linalg.mul(X, hM), j2), linalg.transpose(X))
        return GroupElement(eM, Xg, linalg.sub(kappa, corr), check=False)


def expm(A, ctx: PrecisionContext = None):
    """Scaling-and-squaring exponential of a general square matrix.

    Kept independent of jacobi_exp on purpose: it is the oracle the
    exponential map is tested against.
    """
    ctx = ctx or PrecisionContext()
    with ctx.working():
        n = len(A)
        A = tuple(tuple(to_mpc(x) for x in r) for r in A)
        s = 0
        while _mat_norm(A) > mp.mpf("0.5"):
            A = linalg.scale(mp.mpf("0.5"), A)
            s += 1
        one = linalg.identity(n, mp.mpf(1), mp.mpf(0))
        acc = one
        term = one
        tol = mp.mpf(2) ** (-(ctx.bits + 16))
        k = 0
        while True:
            k += 1
            if k > ctx.max_terms:
                ctx.exhausted("expm series")
            term = linalg.scale(1 / mp.mpf(k), linalg.mul(term, A))
            acc = linalg.add(acc, term)
            if _mat_norm(term) < tol and k > 4:
                break
        for _ in range(s):
            acc = linalg.mul(acc, acc)
        return acc


def embed_group(g: GroupElement):
    """(2N+2)-dimensional matrix embedding of the group."""
    N = g.N
    exact = g.exact
    one = GaussianRational(1) if exact else mp.mpf(1)
    zero = GaussianRational(0) if exact else mp.mpf(0)
    MJX = linalg.neg(linalg.mul(linalg.mul(g.M, _j2(exact)), linalg.transpose(g.X)))
    return _blocks(N, linalg.identity(N, one, zero), g.X, g.kappa,
                   g.M, MJX, linalg.identity(N, one, zero), zero)


def embed_algebra(Y: AlgebraElement):
    """(2N+2)-dimensional matrix embedding of the Lie algebra."""
    N = Y.N
    exact = Y.exact
    zero = GaussianRational(0) if exact else mp.mpf(0)
    JX = linalg.neg(linalg.mul(_j2(exact), linalg.transpose(Y.X)))
    return _blocks(N, linalg.zeros(N, N, zero), Y.X, Y.kappa,
                   Y.M, JX, linalg.zeros(N, N, zero), zero)


def _blocks(N, tl, X, kappa, M, corner, br, zero):
    size = 2 * N + 2
    rows = []
    for i in range(N):
        rows.append(tuple(tl[i]) + tuple(X[i]) + tuple(kappa[i]))
    for i in range(2):
        rows.append(tuple(zero for _ in range(N)) + tuple(M[i]) + tuple(corner[i]))
    for i in range(N):
        rows.append(tuple(zero for _ in range(N + 2)) + tuple(br[i]))
    assert len(rows) == size
    return linalg.mat(rows)
