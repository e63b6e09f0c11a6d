"""Chord-walk Markov chains on convex bodies.

One step from ``x``: pick a direction ``e``, compute the chord
``[t_min, t_max]`` of the body through ``x`` along ``e``, and move to
``x + t e`` with ``t`` uniform on the chord.  Two direction rules:

``fixed_basis``
    ``e`` is one of the body's ``l`` unit moves, chosen uniformly.
``random_direction``
    ``e`` is uniform on the unit sphere (normalized Gaussian vector).

Random draw order per step (fixed, so streams are reproducible):

1. the direction: ``rng.integers(l)`` (fixed basis) or
   ``rng.standard_normal(d)`` (random direction);
2. ``u = rng.random()`` in ``[0, 1)``, and ``t = t_min + u (t_max - t_min)``.

``u`` is drawn even when the chord is degenerate; the point is then held
in place.  Chain ``j`` of a run seeded with ``s`` uses
``np.random.SeedSequence([s, j])``, a hash of the parent seed and the
chain index.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .geometry import Body, OutsideBodyError

ALGORITHMS = ("fixed_basis", "random_direction")
MAX_SEED = 2 ** 64


def make_rng(seed: int, chain: int = 0) -> np.random.Generator:
    """Independent stream for chain ``chain`` of a run seeded with ``seed``."""
    if not 0 <= seed < MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if chain < 0:
        raise ValueError("chain index must be >= 0")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(chain)])))


@dataclass(frozen=True)
class ChainConfig:
    algorithm: str = "random_direction"
    steps: int = 1000
    burn_in: int = 0
    thin: int = 1
    seed: int = 0
    start: np.ndarray | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if not 0 <= self.seed < MAX_SEED:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def n_emitted(self) -> int:
        return self.steps // self.thin


def sample_direction(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the unit sphere in R^d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    while True:
        v = rng.standard_normal(d)
        n = np.sqrt(v @ v)
        if n > 0.0:
            return v / n


def _move(x, e, ch, u):
    if ch.t_max <= ch.t_min:
        return x
    return x + (ch.t_min + u * (ch.t_max - ch.t_min)) * e


def step_fixed_basis(body: Body, x, rng: np.random.Generator) -> np.ndarray:
    """One step of the fixed-basis walk (uniform move index, uniform point on the chord)."""
    basis = body.meta.basis
    if basis is None:
        raise ValueError(f"{body!r} has no move basis; use the random_direction algorithm")
    x = np.asarray(x, dtype=float)
    e = basis[rng.integers(len(basis))]
    ch = body.chord(x, e)
    return _move(x, e, ch, rng.random())


def step_random_direction(body: Body, x, rng: np.random.Generator) -> np.ndarray:
    """One step of the random-direction walk (hit-and-run)."""
    x = np.asarray(x, dtype=float)
    e = sample_direction(body.d, rng)
    ch = body.chord(x, e)
    return _move(x, e, ch, rng.random())


def run_chain(body: Body, config: ChainConfig, chain: int = 0) -> Iterator[np.ndarray]:
    """Yield ``config.steps // config.thin`` points after ``config.burn_in`` steps.

    Deterministic for fixed ``(body, config, chain)``.
    """
    if config.algorithm == "fixed_basis" and body.meta.basis is None:
        raise ValueError(f"{body.descriptor or body.kind} has no move basis (no known accessibility); "
                         "use the random_direction algorithm")
    rng = make_rng(config.seed, chain)
    x = body.meta.x_star if config.start is None else config.start
    x = np.array(x, dtype=float)
    if not body.contains(x):
        raise OutsideBodyError("start point is not in the body")
    d = body.d
    fixed = config.algorithm == "fixed_basis"
    basis = body.meta.basis
    l = 0 if basis is None else len(basis)
    chord = body._chord
    thin = config.thin
    total = config.burn_in + config.steps
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(1, total + 1):
            if fixed:
                e = basis[rng.integers(l)]
            else:
                e = rng.standard_normal(d)
                e /= np.sqrt(e @ e)
            t_min, t_max = chord(x, e)
            u = rng.random()
            if t_max > t_min:
                x = x + (t_min + u * (t_max - t_min)) * e
            k = i - config.burn_in
            if k > 0 and k % thin == 0:
                yield x


def sample_chain(body: Body, config: ChainConfig, chain: int = 0) -> np.ndarray:
    """Run a chain and collect the emitted points, shape ``(steps // thin, d)``."""
    out = np.empty((config.n_emitted, body.d))
    for i, x in enumerate(run_chain(body, config, chain)):
        out[i] = x
    return out
