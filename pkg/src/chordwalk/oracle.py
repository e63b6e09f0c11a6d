"""Ground-truth samplers used to validate chain output.

Exact samplers exist for the ball, box, simplex and stochastic matrices.
Birkhoff polytopes (n <= 4), density matrices (n <= 3) and PPT states
(k = 2) use rejection:

* ``birkhoff:n``: the free (n-1) x (n-1) block is proposed uniformly on
  the unit cube and kept iff its completion is non-negative.
* ``density:n``: Bloch vectors are proposed uniformly in the ball of radius
  ``R = sqrt((n-1)/n)`` (which contains the body) and kept iff positive.
* ``ppt:k=2``: Hilbert-Schmidt distributed 4 x 4 states (normalized
  Ginibre products, exact) are kept iff their partial transpose is
  positive.  Bloch-ball rejection is hopeless here: it accepts about
  3.5e-5 of proposals for n = 4.

All samplers return chart coordinates of the body, shape ``(n, d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Body, complete_bistochastic
from .quantum import density_to_bloch, is_ppt, random_hs_density

DEFAULT_MAX_TRIES = 10 ** 7


class RejectionError(RuntimeError):
    """Too many consecutive rejections; the acceptance probability is vanishing."""


@dataclass
class AcceptanceStats:
    proposed: int = 0
    accepted: int = 0

    @property
    def rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else math.nan

    @property
    def stderr(self) -> float:
        p, n = self.rate, self.proposed
        return math.sqrt(p * (1 - p) / n) if n else math.nan

    def __str__(self):
        return f"acceptance {self.rate:.4g} +- {self.stderr:.2g} ({self.accepted}/{self.proposed})"


def exact_ball(d: int, r: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform points in the ball of radius ``r``: Gaussian direction times ``r U^(1/d)``."""
    n = 1 if size is None else size
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1)[:, None]
    x = g * (r * rng.random(n) ** (1.0 / d))[:, None]
    return x[0] if size is None else x


def exact_simplex(N: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Dirichlet(1, ..., 1) points of the probability simplex (ambient coordinates)."""
    n = 1 if size is None else size
    g = rng.standard_exponential((n, N))
    p = g / g.sum(axis=1)[:, None]
    return p[0] if size is None else p


def rejection(proposal: Callable[[np.random.Generator], np.ndarray],
              membership: Callable[[np.ndarray], bool],
              rng: np.random.Generator,
              max_tries: int = DEFAULT_MAX_TRIES,
              stats: AcceptanceStats | None = None) -> np.ndarray:
    """First proposal that passes ``membership``.

    ``proposal`` must be uniform on a superset of the target.  Every try is
    recorded in ``stats`` when given.
    """
    for _ in range(max_tries):
        x = proposal(rng)
        ok = bool(membership(x))
        if stats is not None:
            stats.proposed += 1
            stats.accepted += ok
        if ok:
            return x
    raise RejectionError(f"no acceptance in {max_tries} tries")


@dataclass
class Oracle:
    """Batch sampler ``sample(n, rng) -> (n, d)`` in the body's chart."""

    name: str
    exact: bool
    draw: Callable[[int, np.random.Generator], np.ndarray]
    stats: AcceptanceStats | None = None

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.draw(n, rng)


@dataclass
class RejectionSampler:
    """Vectorized rejection: batches of proposals filtered by a vectorized test.

    ``max_tries`` caps the number of consecutive rejections.
    """

    propose: Callable[[int, np.random.Generator], np.ndarray]
    accept: Callable[[np.ndarray], np.ndarray]
    max_tries: int = DEFAULT_MAX_TRIES
    batch: int = 65536
    stats: AcceptanceStats = field(default_factory=AcceptanceStats)

    def __call__(self, n: int, rng: np.random.Generator) -> np.ndarray:
        out, have, misses = [], 0, 0
        while have < n:
            if self.stats.accepted:
                m = int(min(self.batch * 16, max(1024, 1.2 * (n - have) / self.stats.rate)))
            else:
                m = max(1024, min(self.batch, 2 * (n - have)))
            cand = self.propose(m, rng)
            ok = np.asarray(self.accept(cand), dtype=bool)
            self.stats.proposed += m
            self.stats.accepted += int(ok.sum())
            idx = np.flatnonzero(ok)
            if idx.size == 0:
                misses += m
            else:
                misses = m - 1 - idx[-1]
                out.append(cand[idx])
                have += idx.size
            if misses > self.max_tries:
                raise RejectionError(f"{misses} consecutive rejections ({self.stats})")
        return np.concatenate(out)[:n]


def _ball_oracle(body):
    return Oracle("exact ball", True, lambda n, rng: exact_ball(body.d, body.radius, rng, n))


def _box_oracle(body):
    return Oracle("exact box", True, lambda n, rng: rng.random((n, body.d)) - 0.5)


def _simplex_oracle(body):
    return Oracle("exact simplex (normalized exponentials)", True,
                  lambda n, rng: body.from_ambient(exact_simplex(body.n, rng, n)))


def _stochastic_oracle(body):
    def draw(n, rng):
        cols = exact_simplex(body.n, rng, n * body.n).reshape(n, body.n, body.n)
        return body.from_ambient(np.swapaxes(cols, 1, 2))
    return Oracle("exact product of simplices", True, draw)


def _birkhoff_oracle(body):
    m = body.n - 1

    def propose(k, rng):
        return rng.random((k, m, m))

    def accept(F):
        M = complete_bistochastic(F)
        return (M[:, :, -1] >= 0).all(axis=1) & (M[:, -1, :] >= 0).all(axis=1)

    rs = RejectionSampler(propose, accept)
    return Oracle("rejection: uniform free block", False, lambda n, rng: body.from_free_block(rs(n, rng)), rs.stats)


def _density_oracle(body):
    R = body.meta.R
    rs = RejectionSampler(lambda k, rng: exact_ball(body.d, R, rng, k), body.contains_many)
    return Oracle("rejection: uniform Bloch ball", False, rs, rs.stats)


def _ppt_oracle(body):
    K = body.K

    def propose(k, rng):
        return random_hs_density(K * K, rng, k)

    rs = RejectionSampler(propose, lambda rho: is_ppt(rho, K))
    return Oracle("rejection: Hilbert-Schmidt states with PPT test", False,
                  lambda n, rng: density_to_bloch(rs(n, rng), body.basis), rs.stats)


def oracle_for(body: Body) -> Oracle | None:
    """Ground-truth sampler for ``body``, or ``None`` when none is available."""
    kind = body.kind
    if kind == "ball":
        return _ball_oracle(body)
    if kind == "box":
        return _box_oracle(body)
    if kind == "simplex":
        return _simplex_oracle(body)
    if kind == "stochastic":
        return _stochastic_oracle(body)
    if kind == "birkhoff" and body.n <= 4:
        return _birkhoff_oracle(body)
    if kind == "density" and body.N <= 3:
        return _density_oracle(body)
    if kind == "ppt" and body.K == 2:
        return _ppt_oracle(body)
    return None
