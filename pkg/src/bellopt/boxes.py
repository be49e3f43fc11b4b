"""Reference behaviors of the (2,2,2) scenario used in tests and reports.

All constructors return plain 16-vectors in the standard index order.
"""

from __future__ import annotations

import itertools

import numpy as np

from .space import DIM, vector_index

SQRT2 = float(np.sqrt(2.0))


def uniform_box() -> np.ndarray:
    """Both parties toss fair coins regardless of the settings: p = 1/4."""
    return np.full(DIM, 0.25)


def biased_marginal_box(p_b0: float = 0.25) -> np.ndarray:
    """Alice tosses a fair coin, Bob a biased one (P[b=0] = p_b0), for any setting."""
    if not 0.0 <= p_b0 <= 1.0:
        raise ValueError("p_b0 must be a probability")
    v = np.empty(DIM)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        v[vector_index(a, b, x, y)] = 0.5 * (p_b0 if b == 0 else 1.0 - p_b0)
    return v


def setting_copy_box() -> np.ndarray:
    """Bob's outcome equals Alice's setting, Alice tosses a fair coin.

    Purely signaling from Alice to Bob: p = (1/2) delta_{b=x}.
    """
    v = np.zeros(DIM)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        if b == x:
            v[vector_index(a, b, x, y)] = 0.5
    return v


def shared_coin_box() -> np.ndarray:
    """Perfectly correlated fair outcomes for every setting: p = (1/2) delta_{a=b}."""
    v = np.zeros(DIM)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        if a == b:
            v[vector_index(a, b, x, y)] = 0.5
    return v


def pr_box() -> np.ndarray:
    """The maximally nonlocal nonsignaling box: p = (1/2) delta_{a xor b = xy}."""
    v = np.zeros(DIM)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        if (a + b) % 2 == (x * y) % 2:
            v[vector_index(a, b, x, y)] = 0.5
    return v


def tsirelson_box() -> np.ndarray:
    """Quantum behavior saturating the CHSH quantum bound.

    Correlators E_xy = +-1/sqrt(2) with the CHSH sign pattern (minus at
    x = y = 1), uniform marginals: p = (1/4)(1 + (-1)^(a+b) E_xy).
    """
    v = np.empty(DIM)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        e = -1.0 / SQRT2 if x == 1 and y == 1 else 1.0 / SQRT2
        v[vector_index(a, b, x, y)] = 0.25 * (1.0 + (-1.0) ** (a + b) * e)
    return v


def correlator_box(e: np.ndarray) -> np.ndarray:
    """Uniform-marginal behavior with the given 2x2 correlator table e[x][y]."""
    e = np.asarray(e, dtype=float)
    if e.shape != (2, 2) or np.max(np.abs(e)) > 1.0 + 1e-12:
        raise ValueError("need a 2x2 correlator table with entries in [-1, 1]")
    v = np.empty(DIM)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        v[vector_index(a, b, x, y)] = 0.25 * (1.0 + (-1.0) ** (a + b) * e[x, y])
    return v


def local_vertex(f0: int, f1: int, g0: int, g1: int) -> np.ndarray:
    """Deterministic strategy a = f(x), b = g(y)."""
    v = np.zeros(DIM)
    f, g = (f0, f1), (g0, g1)
    for x in range(2):
        for y in range(2):
            v[vector_index(f[x], g[y], x, y)] = 1.0
    return v


def local_vertices() -> list[np.ndarray]:
    """All 16 deterministic local behaviors."""
    return [local_vertex(*bits) for bits in itertools.product(range(2), repeat=4)]


def pr_box_vertices() -> list[np.ndarray]:
    """The 8 extremal nonlocal boxes p = (1/2) delta_{a xor b = xy xor ax xor by xor c}."""
    out = []
    for al, be, ga in itertools.product(range(2), repeat=3):
        v = np.zeros(DIM)
        for a, x, y in itertools.product(range(2), repeat=3):
            b = (a + x * y + al * x + be * y + ga) % 2
            v[vector_index(a, b, x, y)] = 0.5
        out.append(v)
    return out


def nonsignaling_vertices() -> list[np.ndarray]:
    """The 24 vertices of the nonsignaling polytope."""
    return local_vertices() + pr_box_vertices()


def random_nonsignaling(rng: np.random.Generator) -> np.ndarray:
    """Random behavior in the nonsignaling polytope (convex mix of vertices)."""
    verts = nonsignaling_vertices()
    w = rng.dirichlet(np.ones(len(verts)))
    return np.sum([wi * v for wi, v in zip(w, verts)], axis=0)
