"""Uniform sampling in convex bodies with chord-walk Markov chains."""
from __future__ import annotations

__version__ = "0.1.0"

from .bounds import RateBound, body_bound, bound_fixed_basis, bound_random_direction, steps_to_tolerance, tv_envelope
from .geometry import Body, BodyDescriptor, BodyError, BodyMetadata, Chord, lift_density, make_body
from .oracle import oracle_for
from .sampler import ChainConfig, run_chain, sample_chain

__all__ = [
    "__version__",
    "Body", "BodyDescriptor", "BodyError", "BodyMetadata", "Chord", "lift_density", "make_body",
    "ChainConfig", "run_chain", "sample_chain",
    "RateBound", "body_bound", "bound_fixed_basis", "bound_random_direction", "steps_to_tolerance", "tv_envelope",
    "oracle_for",
]
