#!/usr/bin/env python3
"""Writes the bundled JSON fixtures. All probabilities are exact dyadic rationals."""

import itertools
import json
import pathlib
import sys
from fractions import Fraction

OUT = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "fixtures"

QUARTER = Fraction(1, 4)


def bern(p, bit):
    return p if bit else 1 - p


def flat(sizes, weight):
    """Row-major table over (S1, S2, Y1, Y2) from a weight function."""
    cells = [Fraction(0)] * (sizes[0] * sizes[1] * sizes[2] * sizes[3])
    for idx in itertools.product(*(range(n) for n in sizes)):
        s1, s2, y1, y2 = idx
        cells[((s1 * sizes[1] + s2) * sizes[2] + y1) * sizes[3] + y2] += weight(*idx)
    assert sum(cells) == 1, sum(cells)
    return [float(c) for c in cells]


def config(name, sizes, weight, objective="corollary1", **extra):
    cfg = {
        "name": name,
        "kind": "OneDistortion",
        "objective": objective,
        "alphabets": dict(zip(["S1", "S2", "Y1", "Y2"], sizes)),
        "axis_order": ["S1", "S2", "Y1", "Y2"],
        "pmf": flat(sizes, weight),
        "d1": "hamming",
        "D1": 0.0,
    }
    cfg.update(extra)
    return cfg


def example1(s1, s2, y1, y2):
    # four fair bits; S1 = (X1, X3), S2 = (X2, X4), Y1 = (X1, X2, X4), Y2 = X3
    x1, x3 = s1 >> 1, s1 & 1
    x2, x4 = s2 >> 1, s2 & 1
    return Fraction(1, 16) if (y1 == x1 * 4 + x2 * 2 + x4 and y2 == x3) else 0


def comp_delivery(s1, s2, y1, y2):
    return QUARTER if (y1 == s2 and y2 == s1) else 0


def degraded_bsc(s1, s2, y1, y2):
    # Y1 = (S1 xor Z1, S2), Y2 = S2 xor Z2 computed from Y1
    a, b = y1 >> 1, y1 & 1
    if b != s2:
        return 0
    return QUARTER * bern(QUARTER, a ^ s1) * bern(QUARTER, y2 ^ b)


def y1_absent(s1, s2, y1, y2):
    pair = {(0, 0): Fraction(1, 2), (0, 1): Fraction(1, 4), (1, 0): Fraction(1, 8), (1, 1): Fraction(1, 8)}
    return pair[(s1, s2)] * Fraction(1, 2) if y2 == s1 else 0


def y2_absent(s1, s2, y1, y2):
    return QUARTER * bern(QUARTER, y1 ^ s1) * Fraction(1, 2)


def functional_y2(s1, s2, y1, y2):
    # S2 uniform on four symbols, S1 = lsb(S2) xor Z, Y1 = S1, Y2 = msb(S2)
    if y1 != s1 or y2 != s2 >> 1:
        return 0
    return QUARTER * bern(QUARTER, s1 ^ (s2 & 1))


def channel(s1, s2, u0, u1, pick):
    probs = []
    for a in range(s1):
        for b in range(s2):
            row = [0.0] * (u0 * u1)
            row[pick(a, b)] = 1.0
            probs.extend(row)
    return {
        "kind": "OneDistortion",
        "given_order": ["S1", "S2"],
        "output_order": ["U0", "U1"],
        "alphabets": {"S1": s1, "S2": s2, "U0": u0, "U1": u1},
        "probs": probs,
    }


FIXTURES = {
    "example1.json": config(
        "example1", (4, 4, 8, 2), example1,
        optimizer={"u0_card": 2, "u1_card": 1, "grid_step": 1, "restarts": 64, "seed": 1},
        simulator={"n": [4, 8, 12], "epsilon": 0.2, "trials": 10000, "seed": 1, "margin": 0.5},
    ),
    "comp-delivery.json": config(
        "comp-delivery", (2, 2, 2, 2), comp_delivery,
        optimizer={"u0_card": 4, "u1_card": 1, "grid_step": 0.125, "restarts": 16, "seed": 1},
    ),
    "degraded-bsc.json": config(
        "degraded-bsc", (2, 2, 4, 2), degraded_bsc, objective="theorem1", D1=0.1,
        optimizer={"u0_card": 1, "u1_card": 2, "grid_step": 0.125, "restarts": 16, "seed": 1},
    ),
    "y1-absent.json": config("y1-absent", (2, 2, 2, 2), y1_absent),
    "y2-absent.json": config("y2-absent", (2, 2, 2, 2), y2_absent),
    "functional-y2.json": config("functional-y2", (2, 4, 2, 2), functional_y2),
    "channel_u0_empty.json": channel(4, 4, 1, 1, lambda a, b: 0),
    "channel_u0_s1.json": channel(4, 4, 4, 1, lambda a, b: a),
    "channel_u0_x3.json": channel(4, 4, 2, 1, lambda a, b: a & 1),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in FIXTURES.items():
        (OUT / name).write_text(json.dumps(doc, indent=1) + "\n")
        print(OUT / name)


if __name__ == "__main__":
    main()
