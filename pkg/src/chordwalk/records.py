"""Sample files written by ``chordwalk sample`` and a reader for them.

CSV::

    # chordwalk v0.1.0 body=ball:d=3 algorithm=random_direction seed=7
    # steps=5 burn_in=0 thin=1 chains=1 grammar=1
    chain,step,c0,c1,c2
    0,1,0.12...,...

JSONL: a header object ``{"chordwalk": ..., "body": ..., ...}`` followed by
one object per point with keys ``chain``, ``step``, ``c0``, ``c1``, ...

Chart coordinates are written with 17 significant digits (CSV) or Python's
shortest round-trip repr (JSONL); both parse back to the identical doubles.
With ``ambient`` the flattened ambient representation follows as columns
``a0, a1, ...`` (complex entries as consecutive real/imaginary pairs).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import IO

import numpy as np

from . import __version__


@dataclass
class SampleTable:
    header: dict
    chain: np.ndarray
    step: np.ndarray
    coords: np.ndarray
    ambient: np.ndarray | None = None


def flatten_ambient(A) -> np.ndarray:
    """Rows of ambient objects as real vectors (complex -> re, im pairs)."""
    A = np.asarray(A)
    flat = A.reshape(len(A), -1)
    if np.iscomplexobj(flat):
        out = np.empty((len(flat), 2 * flat.shape[1]))
        out[:, 0::2] = flat.real
        out[:, 1::2] = flat.imag
        return out
    return flat.astype(float)


def header_fields(body: str, config, chains: int) -> dict:
    return {
        "chordwalk": __version__,
        "body": body,
        "algorithm": config.algorithm,
        "seed": config.seed,
        "steps": config.steps,
        "burn_in": config.burn_in,
        "thin": config.thin,
        "chains": chains,
        "grammar": 1,
    }


def _fmt(v: float) -> str:
    return "%.17g" % v


def write_csv(fh: IO[str], header: dict, blocks) -> None:
    """``blocks``: iterable of ``(chain_id, coords, ambient_or_None)``."""
    fh.write(f"# chordwalk v{header['chordwalk']} body={header['body']} "
             f"algorithm={header['algorithm']} seed={header['seed']}\n")
    fh.write(" ".join(["#"] + [f"{k}={header[k]}" for k in ("steps", "burn_in", "thin", "chains", "grammar")]) + "\n")
    wrote_columns = False
    for cid, X, amb in blocks:
        if not wrote_columns:
            cols = ["chain", "step"] + [f"c{i}" for i in range(X.shape[1])]
            if amb is not None:
                cols += [f"a{i}" for i in range(amb.shape[1])]
            fh.write(",".join(cols) + "\n")
            wrote_columns = True
        rows = X if amb is None else np.hstack([X, amb])
        steps = np.arange(1, len(X) + 1) * header["thin"]
        for s, row in zip(steps, rows):
            fh.write(f"{cid},{s}," + ",".join(map(_fmt, row)) + "\n")


def write_jsonl(fh: IO[str], header: dict, blocks) -> None:
    fh.write(json.dumps(header) + "\n")
    for cid, X, amb in blocks:
        steps = np.arange(1, len(X) + 1) * header["thin"]
        for i, s in enumerate(steps):
            obj = {"chain": int(cid), "step": int(s)}
            obj.update((f"c{j}", float(v)) for j, v in enumerate(X[i]))
            if amb is not None:
                obj.update((f"a{j}", float(v)) for j, v in enumerate(amb[i]))
            fh.write(json.dumps(obj) + "\n")


def digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _split(cols, values):
    names = list(cols)
    c_idx = [i for i, n in enumerate(names) if n.startswith("c") and n[1:].isdigit()]
    a_idx = [i for i, n in enumerate(names) if n.startswith("a") and n[1:].isdigit()]
    ci, si = names.index("chain"), names.index("step")
    V = values
    return (V[:, ci].astype(int), V[:, si].astype(int), V[:, c_idx],
            V[:, a_idx] if a_idx else None)


def read_samples(path) -> SampleTable:
    """Parse a CSV or JSONL sample file back to full precision."""
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("{"):
            header = json.loads(first)
            rows = [json.loads(line) for line in fh if line.strip()]
            if not rows:
                return SampleTable(header, np.zeros(0, int), np.zeros(0, int), np.zeros((0, 0)))
            cols = list(rows[0])
            values = np.array([[r[c] for c in cols] for r in rows], dtype=float)
            return SampleTable(header, *_split(cols, values))
        header = {}
        line = first
        while line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    header[k] = v
                elif tok.startswith("v"):
                    header["chordwalk"] = tok[1:]
            line = fh.readline()
        cols = line.strip().split(",")
        values = np.loadtxt(fh, delimiter=",", ndmin=2)
    if values.size == 0:
        values = np.zeros((0, len(cols)))
    return SampleTable(header, *_split(cols, values))
