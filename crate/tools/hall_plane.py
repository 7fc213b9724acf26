#!/usr/bin/env python3
"""Writes the Hall plane of order 9 in the plane text format.

The plane is the translation plane over the exceptional nearfield of
order 9 (GF(9) with x*m = x*m when m is a square and x^3*m otherwise).
The script checks the plane axioms and searches for a failing Desargues
configuration before writing, so a bad build never reaches data/.

usage: hall_plane.py [OUTPUT]    (default data/planes/hall9.plane)
"""

import itertools
import random
import sys

# GF(9) = GF(3)[i] / (i^2 + 1); element a + b*i stored as 3*b + a.
Q = 9


def add(x, y):
    return ((x % 3 + y % 3) % 3) + 3 * ((x // 3 + y // 3) % 3)


def neg(x):
    return ((-(x % 3)) % 3) + 3 * ((-(x // 3)) % 3)


def mul(x, y):
    a, b, c, d = x % 3, x // 3, y % 3, y // 3
    return ((a * c - b * d) % 3) + 3 * ((a * d + b * c) % 3)


def power(x, k):
    r = 1
    for _ in range(k):
        r = mul(r, x)
    return r


SQUARES = {mul(x, x) for x in range(1, Q)}


def near(x, m):
    """Nearfield product, right distributive over addition in x."""
    if m == 0:
        return 0
    return mul(x, m) if m in SQUARES else mul(power(x, 3), m)


def field_mul(x, m):
    return mul(x, m)


def translation_plane(product):
    """Points: affine (x, y) as 9x + y, slopes 81 + m, infinity 90."""
    lines = []
    for m in range(Q):
        for b in range(Q):
            line = [9 * x + add(product(x, m), b) for x in range(Q)]
            lines.append(sorted(line + [81 + m]))
    for c in range(Q):
        lines.append(sorted([9 * c + y for y in range(Q)] + [90]))
    lines.append(list(range(81, 91)))
    return sorted(lines)


def check_axioms(lines):
    n = Q * Q + Q + 1
    assert len(lines) == n and all(len(l) == Q + 1 for l in lines)
    seen = {}
    for k, line in enumerate(lines):
        for a, b in itertools.combinations(line, 2):
            assert (a, b) not in seen, f"points {a} and {b} lie on two lines"
            seen[(a, b)] = k
    assert len(seen) == n * (n - 1) // 2, "some pair of points shares no line"


def desargues_failure(lines, trials, seed=1):
    """Random central Desargues configurations; returns a failing one."""
    n = Q * Q + Q + 1
    through = {}
    for k, line in enumerate(lines):
        for a, b in itertools.combinations(line, 2):
            through[(a, b)] = through[(b, a)] = k
    on = [set(l) for l in lines]

    def join(a, b):
        return through[(a, b)]

    def meet(l, m):
        common = on[l] & on[m]
        return next(iter(common))

    def collinear(a, b, c):
        return c in on[join(a, b)]

    rng = random.Random(seed)
    for _ in range(trials):
        o = rng.randrange(n)
        rays = rng.sample([l for l in range(n) if o in on[l]], 3)
        pts = []
        for r in rays:
            pts.append(rng.sample(sorted(on[r] - {o}), 2))
        (a, a2), (b, b2), (c, c2) = pts
        if collinear(a, b, c) or collinear(a2, b2, c2):
            continue
        p = meet(join(a, b), join(a2, b2))
        q = meet(join(b, c), join(b2, c2))
        r = meet(join(a, c), join(a2, c2))
        if len({p, q, r}) == 3 and not collinear(p, q, r):
            return (o, a, b, c, a2, b2, c2)
    return None


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/planes/hall9.plane"
    field = translation_plane(field_mul)
    check_axioms(field)
    assert desargues_failure(field, 20000) is None, "checker rejects PG(2,9)"
    hall = translation_plane(near)
    check_axioms(hall)
    witness = desargues_failure(hall, 20000)
    assert witness is not None, "no Desargues failure found"
    with open(out, "w") as f:
        f.write(f"plane {Q}\n")
        for line in hall:
            f.write(" ".join(map(str, line)) + "\n")
    print(f"wrote {out}; Desargues fails at {witness}")


if __name__ == "__main__":
    main()
