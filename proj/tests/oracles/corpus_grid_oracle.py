#!/usr/bin/env python3
"""Brute-force grid minimizer for the synthetic corpus.

Reads the instance coefficients from the fixtures file, evaluates every
instance on a uniform grid of its box (endpoints included) and writes the best
grid point, its value, the grid spacing and a Lipschitz bound back into the
"oracle" entry of each instance.

    python3 tests/oracles/corpus_grid_oracle.py data/corpus.json
"""

import itertools
import json
import sys

import numpy as np

RESOLUTION = 1e-3
CHUNK = 2_000_000


def branches(inst):
    n = inst["dimension"]
    if inst.get("structure", "branches") != "separable":
        for b in inst["branches"]:
            yield np.array(b["hessian"], float), np.array(b["linear"], float), float(b.get("constant", 0.0))
        return
    smooth = inst["smooth"]
    H0 = np.array(smooth["hessian"], float)
    p0 = np.array(smooth["linear"], float)
    r0 = float(smooth.get("constant", 0.0))
    w = np.array(inst["weights"], float)
    pieces = inst["pieces"]
    for sel in itertools.product(range(len(pieces)), repeat=n):
        H, p, r = H0.copy(), p0.copy(), r0
        for i, k in enumerate(sel):
            H[i, i] += w[i] * pieces[k]["k"]
            p[i] += w[i] * pieces[k]["b"]
            r += w[i] * pieces[k]["c"]
        yield H, p, r


def evaluate(inst, pts):
    """Combined value at the rows of pts."""
    combine = np.maximum if inst["combiner"] == "max" else np.minimum
    out = None
    for H, p, r in branches(inst):
        v = 0.5 * np.einsum("ij,jk,ik->i", pts, H, pts) + pts @ p + r
        out = v if out is None else combine(out, v)
    return out


def lipschitz(inst, lower, upper):
    radius = np.linalg.norm(np.maximum(np.abs(lower), np.abs(upper)))
    return max(np.linalg.norm(H, 2) * radius + np.linalg.norm(p) for H, p, _ in branches(inst))


def grid_minimum(inst):
    lower = np.array(inst["box"]["lower"], float)
    upper = np.array(inst["box"]["upper"], float)
    axes = [lo + RESOLUTION * np.arange(int(np.floor((hi - lo) / RESOLUTION + 1e-9)) + 1)
            for lo, hi in zip(lower, upper)]
    best_f, best_x = np.inf, None
    if len(axes) == 1:
        pts = axes[0][:, None]
        vals = evaluate(inst, pts)
        k = int(np.argmin(vals))
        return pts[k], float(vals[k]), lower, upper
    # Two dimensions: sweep rows of the first coordinate in chunks.
    x2 = axes[1]
    rows = max(1, CHUNK // len(x2))
    for start in range(0, len(axes[0]), rows):
        x1 = axes[0][start:start + rows]
        pts = np.stack(np.meshgrid(x1, x2, indexing="ij"), axis=-1).reshape(-1, 2)
        vals = evaluate(inst, pts)
        k = int(np.argmin(vals))
        if vals[k] < best_f:
            best_f, best_x = float(vals[k]), pts[k]
    return best_x, best_f, lower, upper


def main(path):
    with open(path) as fh:
        doc = json.load(fh)
    for inst in doc["instances"]:
        if inst["dimension"] > 2:
            raise SystemExit(f"{inst['id']}: grid oracle only handles n <= 2")
        x, f, lower, upper = grid_minimum(inst)
        inst["oracle"] = {
            "x": [round(float(v), 12) for v in x],
            "f": f,
            "resolution": RESOLUTION,
            "lipschitz": float(lipschitz(inst, lower, upper)),
        }
        print(f"{inst['id']}: x* = {inst['oracle']['x']}, f* = {f:.12g}, "
              f"L = {inst['oracle']['lipschitz']:.6g}")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/corpus.json")
