"""Regenerate tests/data/parser_corpus.txt (200 expressions, fixed seed)."""

import random
import sys
from pathlib import Path

VARS = ["z1", "z2", "z1bar", "z2bar", "conj(z1)", "conj(z2)"]


def coeff(rng):
    k = rng.randrange(6)
    if k == 0:
        return str(rng.randint(1, 9))
    if k == 1:
        return f"({rng.randint(-9, 9)}/{rng.randint(1, 12)})"
    if k == 2:
        return f"{rng.randint(0, 3)}.{rng.randint(0, 99):02d}"
    if k == 3:
        return f"({rng.randint(1, 5)}*i)"
    if k == 4:
        return f"({rng.randint(-4, 4)} + {rng.randint(1, 4)}*i)"
    return "1"


def atom(rng, depth):
    k = rng.randrange(8 if depth < 1 else 3)
    if k == 0:
        return rng.choice(VARS)
    if k == 1:
        return f"{rng.choice(VARS)}^{rng.randint(1, 4)}"
    if k == 2:
        return f"|{rng.choice(['z1', 'z2'])}|^{2 * rng.randint(1, 3)}"
    if k == 3:
        return f"Re({expr(rng, depth + 1)})"
    if k == 4:
        return f"Im({expr(rng, depth + 1)})"
    if k == 5:
        return f"|{expr(rng, depth + 1)}|^2"
    if k == 6:
        return f"({expr(rng, depth + 1)})^{rng.randint(0, 2)}"
    return f"conj({expr(rng, depth + 1)})"


def term(rng, depth):
    parts = [atom(rng, depth) for _ in range(rng.randint(1, 3))]
    t = "*".join(parts)
    if rng.random() < 0.6:
        t = f"{coeff(rng)}*{t}"
    if rng.random() < 0.15:
        t = f"{t}/{rng.randint(2, 9)}"
    return t


def expr(rng, depth=0):
    n = rng.randint(1, 4 if depth == 0 else 2)
    out = term(rng, depth)
    for _ in range(n - 1):
        out += rng.choice([" + ", " - "]) + term(rng, depth)
    if rng.random() < 0.1:
        out = "-" + out
    return out


def main(path):
    rng = random.Random(20240611)
    lines = [expr(rng) for _ in range(200)]
    Path(path).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/parser_corpus.txt")
