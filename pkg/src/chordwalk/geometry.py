"""Convex bodies in intrinsic coordinates, with membership and chord oracles.

Every body is presented in a full-dimensional, *isometric* chart of R^d
centred at its reference point x* (so ``x_star`` is the origin for all
catalogued bodies):

* ``ball:d``       unit ball.
* ``box:d``        unit cube ``[-1/2, 1/2]^d``.
* ``simplex:n``    probability simplex; chart is an orthonormal (Helmert)
                   basis of the sum-zero hyperplane around the barycenter.
* ``stochastic:n`` column-stochastic n x n matrices (n simplex charts).
* ``birkhoff:n``   bistochastic matrices; chart is ``V X V^T`` with ``V`` the
                   Helmert basis, so rows and columns of the completed
                   matrix sum to one by construction.
* ``density:n``    n x n density matrices in Bloch coordinates.
* ``ppt:k``        states on C^k (x) C^k with positive partial transpose.
* ``lifted``       region under a density graph, ``{(x, y): 0 < y <= f(x)}``.

Distances in every chart equal Euclidean / Hilbert-Schmidt distances of the
ambient objects, so the radii ``r`` and ``R`` are the geometric ones.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .quantum import bloch_to_density, density_to_bloch, partial_transpose, su_generators

LIN_SLACK = 1e-12
EIG_SLACK = 1e-11
BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200

KINDS = ("ball", "box", "simplex", "stochastic", "birkhoff", "density", "ppt", "lifted")


class BodyError(ValueError):
    """Invalid body descriptor or construction parameters."""


class OutsideBodyError(ValueError):
    """A point handed to a chord oracle or a step is not in the body."""


class ChordError(RuntimeError):
    """Chord search failed (unbounded or inconsistent membership)."""


class Chord(NamedTuple):
    """Parameter interval ``[t_min, t_max]`` of ``x + t e`` inside the body."""

    t_min: float
    t_max: float

    @property
    def length(self) -> float:
        return self.t_max - self.t_min

    @property
    def degenerate(self) -> bool:
        return self.t_max <= self.t_min


@dataclass(frozen=True)
class BodyMetadata:
    d: int
    x_star: np.ndarray
    r: float
    R: float
    k: int | None = None
    basis: np.ndarray | None = None  # shape (l, d), unit rows

    def __post_init__(self):
        if not 0 < self.r <= self.R:
            raise BodyError(f"need 0 < r <= R, got r={self.r}, R={self.R}")
        if self.basis is not None:
            B = np.asarray(self.basis, dtype=float)
            if B.ndim != 2 or B.shape[1] != self.d:
                raise BodyError(f"basis must have shape (l, {self.d})")
            if not np.allclose(np.linalg.norm(B, axis=1), 1.0, atol=1e-12):
                raise BodyError("basis vectors must have unit length")
            if np.linalg.matrix_rank(B) < self.d:
                raise BodyError("basis does not span R^d")

    @property
    def l(self) -> int | None:
        return None if self.basis is None else len(self.basis)

    @property
    def mu(self) -> float:
        return self.r / self.R


# --------------------------------------------------------------------------
# descriptors

_PARAM_KEYS = {
    "ball": "d", "box": "d", "simplex": "n", "stochastic": "n",
    "birkhoff": "n", "density": "n", "ppt": "k",
}


@dataclass(frozen=True)
class BodyDescriptor:
    """Body kind plus its parameters.

    Text grammar (version 1)::

        ball:d=3  box:d=8  simplex:n=5  stochastic:n=4  birkhoff:n=3
        density:n=3  ppt:k=2  lifted:density=tent@ball:d=1
    """

    kind: str
    params: dict = field(default_factory=dict)

    GRAMMAR_VERSION = 1

    @classmethod
    def parse(cls, text: str) -> "BodyDescriptor":
        text = text.strip()
        if text.startswith("lifted:"):
            head, sep, inner = text[len("lifted:"):].partition("@")
            m = re.fullmatch(r"density=([A-Za-z_][\w-]*)", head)
            if not sep or m is None:
                raise ValueError(f"bad lifted descriptor {text!r}; expected lifted:density=NAME@INNER")
            return cls("lifted", {"density": m.group(1), "inner": cls.parse(inner)})
        m = re.fullmatch(r"([a-z]+)(?::(.*))?", text)
        if m is None:
            raise ValueError(f"bad body descriptor {text!r}")
        kind, rest = m.group(1), m.group(2)
        params = {}
        for item in filter(None, (rest or "").split(",")):
            key, eq, value = item.partition("=")
            if not eq or not re.fullmatch(r"[a-z]+", key.strip()):
                raise ValueError(f"bad parameter {item!r} in {text!r}")
            try:
                params[key.strip()] = int(value)
            except ValueError:
                raise ValueError(f"parameter {key}={value!r} is not an integer") from None
        return cls(kind, params)

    def __str__(self) -> str:
        if self.kind == "lifted":
            return f"lifted:density={self.params['density']}@{self.params['inner']}"
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in self.params.items())


# --------------------------------------------------------------------------
# chord search

def _bisect_endpoint(inside: Callable[[float], bool], t_hint: float, tol: float,
                     t_cap: float | None, max_iter: int) -> float:
    """Largest ``t >= 0`` with ``inside(t)``, assuming ``inside(0)``."""
    lo, hi = 0.0, float(t_hint)
    n = 0
    while inside(hi):
        lo, hi = hi, 2.0 * hi
        n += 1
        if (t_cap is not None and lo > t_cap) or n > max_iter:
            raise ChordError(f"chord bracket exceeded cap {t_cap}; body unbounded or membership inconsistent")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return lo


def chord_bisect(membership: Callable[[np.ndarray], bool], x, e, t_hint: float = 1.0,
                 tol: float = BISECT_TOL, t_cap: float | None = None,
                 max_iter: int = BISECT_MAX_ITER) -> Chord:
    """Chord of a convex set known only through a membership predicate.

    Each endpoint is bracketed by doubling from ``t_hint`` (giving up past
    ``t_cap``) and then bisected to width ``tol``.  The returned endpoints
    are the inner ends of the final brackets, so they are members.
    """
    x = np.asarray(x, dtype=float)
    e = np.asarray(e, dtype=float)
    if t_hint <= 0 or tol <= 0:
        raise ValueError("t_hint and tol must be positive")
    if not membership(x):
        raise OutsideBodyError("chord_bisect: start point is not a member")
    t_max = _bisect_endpoint(lambda t: membership(x + t * e), t_hint, tol, t_cap, max_iter)
    t_min = _bisect_endpoint(lambda t: membership(x - t * e), t_hint, tol, t_cap, max_iter)
    return Chord(-t_min, t_max)


# --------------------------------------------------------------------------
# bodies

class Body:
    """Convex body with a membership oracle and a chord oracle.

    Subclasses implement ``_contains``, ``_contains_many`` and ``_chord``;
    the public methods add argument checking.  Bodies are immutable.
    """

    kind = "body"

    def __init__(self, meta: BodyMetadata, descriptor: BodyDescriptor | None = None):
        self.meta = meta
        self.descriptor = descriptor

    @property
    def d(self) -> int:
        return self.meta.d

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor or self.kind} d={self.d}>"

    def _vec(self, x, name="x") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValueError(f"{name} must have shape ({self.d},), got {x.shape}")
        return x

    def contains(self, x) -> bool:
        return bool(self._contains(self._vec(x)))

    def contains_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise ValueError(f"points must have shape (n, {self.d}), got {X.shape}")
        return self._contains_many(X)

    def _contains_many(self, X) -> np.ndarray:
        return np.fromiter((self._contains(x) for x in X), dtype=bool, count=len(X))

    def chord(self, x, e) -> Chord:
        x = self._vec(x)
        e = self._vec(e, "e")
        n = float(np.sqrt(e @ e))
        if n == 0.0:
            raise ValueError("zero direction")
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"direction must have unit norm, got {n}")
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._chord(x, e)

    def chord_by_bisection(self, x, e, tol: float = BISECT_TOL) -> Chord:
        """Reference chord from the membership oracle alone."""
        x = self._vec(x)
        e = self._vec(e, "e")
        return chord_bisect(self._contains, x, e, t_hint=self.meta.r, tol=tol, t_cap=2 * self.meta.R)

    def to_ambient(self, x) -> np.ndarray:
        """Ambient representation (vector or matrix) of chart coordinates."""
        return np.array(x, dtype=float)

    def from_ambient(self, a) -> np.ndarray:
        return np.array(a, dtype=float)

    # subclass hooks
    def _contains(self, x) -> bool:
        raise NotImplementedError

    def _chord(self, x, e) -> Chord:
        raise NotImplementedError


def _axis_basis(d: int) -> np.ndarray:
    B = np.eye(d)
    B.setflags(write=False)
    return B


class Ball(Body):
    kind = "ball"

    def __init__(self, d: int, radius: float = 1.0, descriptor=None):
        self.radius = float(radius)
        meta = BodyMetadata(d=d, x_star=np.zeros(d), r=self.radius, R=self.radius, k=d, basis=_axis_basis(d))
        super().__init__(meta, descriptor)

    def _contains(self, x) -> bool:
        return x @ x <= self.radius ** 2 + LIN_SLACK

    def _contains_many(self, X):
        return np.einsum("ij,ij->i", X, X) <= self.radius ** 2 + LIN_SLACK

    def _chord(self, x, e) -> Chord:
        b = float(x @ e)
        c = float(x @ x) - self.radius ** 2
        if c > LIN_SLACK:
            raise OutsideBodyError("point outside ball")
        h = math.sqrt(b * b - min(c, 0.0))
        return Chord(-b - h, -b + h)


class Polytope(Body):
    """``{x : A x <= b}`` with rows of ``A`` normalized to unit length.

    Chords are closed form: with slack ``s = b - A x`` and rate ``q = A e``,
    ``t_max = min_{q_i > 0} s_i / q_i`` and ``t_min = max_{q_i < 0} s_i / q_i``.
    """

    kind = "polytope"

    def __init__(self, A, b, meta: BodyMetadata, descriptor=None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise BodyError("zero constraint row")
        self.A = A / norms[:, None]
        self.b = b / norms
        self.A.setflags(write=False)
        self.b.setflags(write=False)
        super().__init__(meta, descriptor)

    def _contains(self, x) -> bool:
        return (self.A @ x - self.b).max() <= LIN_SLACK

    def _contains_many(self, X):
        return (X @ self.A.T - self.b).max(axis=1) <= LIN_SLACK

    def _chord(self, x, e) -> Chord:
        s = self.b - self.A @ x
        if s.min() < -LIN_SLACK:
            raise OutsideBodyError("point violates a linear constraint")
        np.maximum(s, 0.0, out=s)
        # q/s is +-inf on active faces and nan where both vanish; fmax/fmin skip nan
        q = (self.A @ e) / s
        qmax = np.fmax.reduce(q)
        qmin = np.fmin.reduce(q)
        if not (qmax > 0.0 and qmin < 0.0):
            raise ChordError("unbounded chord; polytope is not bounded")
        return Chord(float(1.0 / qmin), float(1.0 / qmax))


class Box(Polytope):
    kind = "box"

    def __init__(self, d: int, descriptor=None):
        I = np.eye(d)
        meta = BodyMetadata(d=d, x_star=np.zeros(d), r=0.5, R=math.sqrt(d) / 2, k=d, basis=_axis_basis(d))
        super().__init__(np.vstack([I, -I]), np.full(2 * d, 0.5), meta, descriptor)


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of the sum-zero hyperplane of R^n."""
    V = np.zeros((n, n - 1))
    for j in range(1, n):
        V[:j, j - 1] = 1.0
        V[j, j - 1] = -float(j)
        V[:, j - 1] /= math.sqrt(j * (j + 1))
    return V


def _simplex_radii(n: int) -> tuple[float, float]:
    return 1.0 / math.sqrt(n * (n - 1)), math.sqrt((n - 1) / n)


def _simplex_moves(n: int, V: np.ndarray) -> np.ndarray:
    """Unit moves along ``e_i - e_n`` (edges from the last vertex), in the chart."""
    E = np.zeros((n - 1, n))
    E[np.arange(n - 1), np.arange(n - 1)] = 1.0
    E[:, -1] = -1.0
    return (E @ V) / math.sqrt(2.0)


class Simplex(Polytope):
    """Probability simplex of n-point distributions, dimension n - 1."""

    kind = "simplex"

    def __init__(self, n: int, descriptor=None):
        self.n = n
        self.V = helmert_basis(n)
        r, R = _simplex_radii(n)
        meta = BodyMetadata(d=n - 1, x_star=np.zeros(n - 1), r=r, R=R, k=n - 1, basis=_simplex_moves(n, self.V))
        super().__init__(-self.V, np.full(n, 1.0 / n), meta, descriptor)

    def to_ambient(self, x):
        return 1.0 / self.n + np.asarray(x) @ self.V.T

    def from_ambient(self, p):
        return (np.asarray(p, dtype=float) - 1.0 / self.n) @ self.V


class StochasticMatrices(Polytope):
    """Column-stochastic n x n matrices: a product of n simplices.

    Chart coordinates are the n simplex charts of the columns, concatenated.
    """

    kind = "stochastic"

    def __init__(self, n: int, descriptor=None):
        self.n = n
        self.V = helmert_basis(n)
        m = n - 1
        d = n * m
        A = np.zeros((n * n, d))
        basis = np.zeros((d, d))
        moves = _simplex_moves(n, self.V)
        for j in range(n):
            A[j * n:(j + 1) * n, j * m:(j + 1) * m] = -self.V
            basis[j * m:(j + 1) * m, j * m:(j + 1) * m] = moves
        r, R = _simplex_radii(n)
        meta = BodyMetadata(d=d, x_star=np.zeros(d), r=r, R=math.sqrt(n) * R, k=d, basis=basis)
        super().__init__(A, np.full(n * n, 1.0 / n), meta, descriptor)

    def to_ambient(self, x):
        x = np.asarray(x, dtype=float)
        cols = 1.0 / self.n + x.reshape(x.shape[:-1] + (self.n, self.n - 1)) @ self.V.T
        return np.swapaxes(cols, -1, -2)

    def from_ambient(self, T):
        T = np.asarray(T, dtype=float)
        cols = (np.swapaxes(T, -1, -2) - 1.0 / self.n) @ self.V
        return cols.reshape(cols.shape[:-2] + (-1,))


def birkhoff_moves(n: int) -> np.ndarray:
    """All moves ``C_{i a b g}`` (i != g, a != b) as flattened n x n matrices.

    ``C`` has -1 at (i, a) and (g, b), +1 at (i, b) and (g, a); rows and
    columns sum to zero.  There are n^2 (n-1)^2 of them.
    """
    out = []
    for i in range(n):
        for a in range(n):
            for b in range(n):
                for g in range(n):
                    if i == g or a == b:
                        continue
                    C = np.zeros((n, n))
                    C[i, a] = C[g, b] = -1.0
                    C[i, b] = C[g, a] = 1.0
                    out.append(C.ravel())
    return np.array(out)


class Birkhoff(Polytope):
    """Bistochastic n x n matrices, dimension (n-1)^2.

    The chart maps ``x`` (reshaped to (n-1) x (n-1)) to ``J/n + V X V^T``.
    Facets are ``M_ij >= 0``, each at distance ``1/(n-1)`` from ``J/n``.
    """

    kind = "birkhoff"

    def __init__(self, n: int, descriptor=None):
        self.n = n
        self.V = helmert_basis(n)
        self.W = np.kron(self.V, self.V)  # (n*n, (n-1)^2), orthonormal columns
        d = (n - 1) ** 2
        moves = birkhoff_moves(n) @ self.W / 2.0
        meta = BodyMetadata(d=d, x_star=np.zeros(d), r=1.0 / (n - 1), R=math.sqrt(n - 1),
                            k=(n - 1) ** 3, basis=moves)
        super().__init__(-self.W, np.full(n * n, 1.0 / n), meta, descriptor)

    def to_ambient(self, x):
        x = np.asarray(x, dtype=float)
        M = 1.0 / self.n + x @ self.W.T
        return M.reshape(x.shape[:-1] + (self.n, self.n))

    def from_ambient(self, M):
        M = np.asarray(M, dtype=float)
        flat = M.reshape(M.shape[:-2] + (self.n * self.n,))
        return (flat - 1.0 / self.n) @ self.W

    def from_free_block(self, F):
        """Chart coordinates of the completion of top-left blocks ``F``."""
        return self.from_ambient(complete_bistochastic(F))


def complete_bistochastic(F) -> np.ndarray:
    """Complete (n-1) x (n-1) blocks to n x n matrices with unit row/column sums."""
    F = np.asarray(F, dtype=float)
    m = F.shape[-1]
    M = np.zeros(F.shape[:-2] + (m + 1, m + 1))
    M[..., :m, :m] = F
    M[..., :m, m] = 1.0 - F.sum(axis=-1)
    M[..., m, :m] = 1.0 - F.sum(axis=-2)
    M[..., m, m] = 1.0 - M[..., :m, m].sum(axis=-1)
    return M


class DensityMatrices(Body):
    """Density matrices of size N in Bloch coordinates.

    Membership is ``lambda_min(rho) >= -EIG_SLACK * ||rho||``.  Chords are
    exact: for ``rho`` positive definite, ``rho + t D >= 0`` iff
    ``1 + t mu >= 0`` for every eigenvalue ``mu`` of ``L^-1 D L^-H``
    (``rho = L L^H``).  Points on the boundary, where the Cholesky factor
    does not exist, fall back to bisection; ``chord_method="bisect"``
    forces bisection everywhere.
    """

    kind = "density"

    def __init__(self, N: int, descriptor=None, chord_method: str = "eig", accessible: bool = True):
        if chord_method not in ("eig", "bisect"):
            raise BodyError(f"unknown chord_method {chord_method!r}")
        self.N = N
        self.basis = su_generators(N)
        self.chord_method = chord_method
        d = N * N - 1
        self._families = [self.basis.generators]
        self._eye = np.eye(N) / N
        meta = BodyMetadata(d=d, x_star=np.zeros(d), r=1.0 / math.sqrt(N * (N - 1)), R=math.sqrt((N - 1) / N),
                            k=d if accessible else None, basis=_axis_basis(d) if accessible else None)
        super().__init__(meta, descriptor)

    def rho(self, x) -> np.ndarray:
        return bloch_to_density(x, self.basis)

    def to_ambient(self, x):
        return self.rho(x)

    def from_ambient(self, rho):
        return density_to_bloch(rho, self.basis)

    def _matrices(self, x):
        return [self._eye + np.tensordot(x, G, axes=(-1, 0)) for G in self._families]

    def _contains(self, x) -> bool:
        for M in self._matrices(x):
            w = np.linalg.eigvalsh(M)
            if w[0] < -EIG_SLACK * max(abs(w[0]), abs(w[-1])):
                return False
        return True

    def _contains_many(self, X):
        ok = np.ones(len(X), dtype=bool)
        for M in self._matrices(X):
            w = np.linalg.eigvalsh(M)
            ok &= w[:, 0] >= -EIG_SLACK * np.maximum(np.abs(w[:, 0]), np.abs(w[:, -1]))
        return ok

    def _chord(self, x, e) -> Chord:
        if self.chord_method == "bisect":
            return self._chord_bisect(x, e)
        t_lo, t_hi = -math.inf, math.inf
        for G in self._families:
            M = self._eye + np.tensordot(x, G, axes=(0, 0))
            D = np.tensordot(e, G, axes=(0, 0))
            try:
                L = np.linalg.cholesky(M)
            except np.linalg.LinAlgError:
                return self._chord_bisect(x, e)
            Li = np.linalg.inv(L)
            mu = np.linalg.eigvalsh(Li @ D @ Li.conj().T)
            if mu[0] < 0:
                t_hi = min(t_hi, -1.0 / float(mu[0]))
            if mu[-1] > 0:
                t_lo = max(t_lo, -1.0 / float(mu[-1]))
        return Chord(t_lo, t_hi)

    def _chord_bisect(self, x, e) -> Chord:
        return chord_bisect(self._contains, x, e, t_hint=self.meta.r, tol=BISECT_TOL, t_cap=2 * self.meta.R)


class PPTStates(DensityMatrices):
    """States on C^K (x) C^K whose partial transpose is positive.

    No accessibility constant is known, so the body carries no move basis.
    """

    kind = "ppt"

    def __init__(self, K: int, descriptor=None, chord_method: str = "eig"):
        self.K = K
        super().__init__(K * K, descriptor, chord_method, accessible=False)
        G_t = partial_transpose(self.basis.generators, K)
        G_t.setflags(write=False)
        self._families = [self.basis.generators, G_t]


# --------------------------------------------------------------------------
# lifted bodies

class LiftedBody(Body):
    """Region ``{(x, y): x in inner, 0 < y <= f(x)}`` of dimension d + 1.

    Uniform samples project onto ``f``-distributed samples of the inner body.
    Chords are intervals only when every line meets the region in one piece:
    axis-parallel lines need ``f`` quasi-concave, arbitrary lines need ``f``
    concave.  ``shape`` records which of the two the caller asserts.
    """

    kind = "lifted"

    def __init__(self, inner: Body, f: Callable[[np.ndarray], float], f_max: float,
                 shape: str = "quasi-concave", descriptor=None, n_probe: int = 256):
        if shape not in ("concave", "quasi-concave"):
            raise BodyError(f"shape must be 'concave' or 'quasi-concave', got {shape!r}")
        if not f_max > 0:
            raise BodyError("f_max must be positive")
        self.inner = inner
        self.f = f
        self.f_max = float(f_max)
        self.shape = shape
        im = inner.meta
        f_star = float(f(im.x_star))
        if not f_star > 0:
            raise BodyError("density must be positive at the reference point")
        if f_star > self.f_max * (1 + 1e-12):
            raise BodyError(f"f(x*) = {f_star} exceeds f_max = {self.f_max}")
        # lower bound of f on a shrunken inscribed ball, estimated by probing
        rho = im.r / 2
        probe_rng = np.random.default_rng(0x5EED)
        dirs = probe_rng.standard_normal((n_probe, im.d))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        probes = np.vstack([dirs, np.eye(im.d), -np.eye(im.d)]) * rho + im.x_star
        m = min(f_star, min(float(f(p)) for p in probes))
        if not m > 0:
            raise BodyError("density vanishes near the reference point")
        y_star = m / 2
        basis = None
        if im.basis is not None:
            basis = np.zeros((im.l + 1, im.d + 1))
            basis[:-1, :-1] = im.basis
            basis[-1, -1] = 1.0
        meta = BodyMetadata(
            d=im.d + 1,
            x_star=np.append(im.x_star, y_star),
            r=min(rho, m / 2),
            R=math.hypot(im.R, max(y_star, self.f_max - y_star)),
            k=None,
            basis=basis,
        )
        super().__init__(meta, descriptor)

    def _contains(self, z) -> bool:
        x, y = z[:-1], z[-1]
        return 0.0 < y <= self.f_max and bool(self.inner._contains(x)) and y <= self.f(x)

    def _chord(self, z, e) -> Chord:
        if not self._contains(z):
            raise OutsideBodyError("point outside lifted body")
        x, y = z[:-1], z[-1]
        ex, ey = e[:-1], float(e[-1])
        # linear limits: inner chord (closed form) and 0 < y + t ey <= f_max
        lo, hi = -math.inf, math.inf
        if np.any(ex):
            nx = float(np.sqrt(ex @ ex))
            c = self.inner._chord(x, ex / nx)
            lo, hi = c.t_min / nx, c.t_max / nx
        if ey > 0:
            lo, hi = max(lo, -y / ey), min(hi, (self.f_max - y) / ey)
        elif ey < 0:
            lo, hi = max(lo, (self.f_max - y) / ey), min(hi, -y / ey)
        f = self.f

        def gap(t):
            return f(x + t * ex) - (y + t * ey)

        return Chord(-self._endpoint(lambda t: gap(-t), -lo), self._endpoint(gap, hi))

    @staticmethod
    def _endpoint(gap, t_lin: float) -> float:
        """Largest ``t`` in ``[0, t_lin]`` with ``gap(t) >= 0``, given ``gap(0) >= 0``.

        ``gap`` is the height of the density graph above the line; it has a
        single sign change on the bracket, found by Brent's method.
        """
        if gap(t_lin) >= 0.0:
            return t_lin
        if gap(0.0) <= 0.0:
            return 0.0
        t = brentq(gap, 0.0, t_lin, xtol=BISECT_TOL, maxiter=BISECT_MAX_ITER)
        # brentq may land on the outer side of the crossing
        while t > 0.0 and gap(t) < 0.0:
            t = max(0.0, t - BISECT_TOL)
        return t


def lift_density(inner: Body, f: Callable[[np.ndarray], float], f_max: float,
                 shape: str = "quasi-concave") -> LiftedBody:
    """Body whose uniform law projects to the density ``f`` (known up to scale) on ``inner``."""
    return LiftedBody(inner, f, f_max, shape=shape)


def _tent(R: float):
    return lambda x: max(0.0, 1.0 - math.sqrt(float(x @ x)) / R)


def _gaussian(x) -> float:
    return math.exp(-0.5 * float(x @ x))


# name -> (factory(inner) -> f, f_max, shape)
NAMED_DENSITIES = {
    "tent": (lambda inner: _tent(inner.meta.R), 1.0, "concave"),
    "gaussian": (lambda inner: _gaussian, 1.0, "quasi-concave"),
    "uniform": (lambda inner: (lambda x: 1.0), 1.0, "concave"),
}


# --------------------------------------------------------------------------
# factory and module-level operations

def make_body(descriptor: BodyDescriptor | str) -> Body:
    """Construct a catalogued body from a descriptor or its text form."""
    if isinstance(descriptor, str):
        descriptor = BodyDescriptor.parse(descriptor)
    kind, params = descriptor.kind, dict(descriptor.params)
    if kind not in KINDS:
        raise BodyError(f"unsupported body kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind == "lifted":
        name = params.get("density")
        if name not in NAMED_DENSITIES:
            raise BodyError(f"unknown density {name!r}; expected one of {', '.join(NAMED_DENSITIES)}")
        inner = make_body(params["inner"])
        factory, f_max, shape = NAMED_DENSITIES[name]
        return LiftedBody(inner, factory(inner), f_max, shape=shape, descriptor=descriptor)
    key = _PARAM_KEYS[kind]
    if set(params) != {key}:
        raise BodyError(f"{kind} takes exactly one parameter {key!r}, got {sorted(params)}")
    v = params[key]
    if kind in ("ball", "box"):
        if v < 1:
            raise BodyError(f"{kind} needs d >= 1, got {v}")
        return (Ball if kind == "ball" else Box)(v, descriptor=descriptor)
    if v < 2:
        raise BodyError(f"{kind} needs {key} >= 2, got {v}")
    cls = {"simplex": Simplex, "stochastic": StochasticMatrices, "birkhoff": Birkhoff,
           "density": DensityMatrices, "ppt": PPTStates}[kind]
    return cls(v, descriptor=descriptor)


def contains(body: Body, x) -> bool:
    return body.contains(x)


def chord(body: Body, x, e) -> Chord:
    return body.chord(x, e)
