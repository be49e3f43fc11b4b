"""Coefficient space of the (2,2,2) Bell scenario.

A behavior p_{ab|xy} (outcomes a, b given settings x, y, all binary) is stored
as a 16-vector in the fixed index order ``a + 2b + 4x + 8y``.  The same layout
holds the coefficients of a Bell expression, so distributions and inequalities
share all the algebra below.

The sign-character basis Q_{ijkl}(ab|xy) = i^a j^b k^x l^y (i, j, k, l = +-1)
diagonalizes the action of the relabeling group and splits R^16 into six
invariant subspaces: three normalization pieces, the marginals, the
correlations, and the signaling piece.  ``decompose`` returns that split.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass

import numpy as np

DIM = 16

#: absolute tolerance for exact linear algebra on 16-dim vectors
ATOL_EXACT = 1e-12


def vector_index(a: int, b: int, x: int, y: int) -> int:
    """Position of the (a, b | x, y) cell in the 16-vector."""
    return a + 2 * b + 4 * x + 8 * y


#: cell labels "abxy" in index order: 0000, 1000, 0100, 1100, 0010, ...
INDEX_LABELS = tuple(
    f"{a}{b}{x}{y}"
    for y in range(2) for x in range(2) for b in range(2) for a in range(2)
)

# per-cell outcome/setting values in index order, used to vectorize formulas
_A = np.tile([0, 1], 8)
_B = np.tile(np.repeat([0, 1], 2), 4)
_X = np.tile(np.repeat([0, 1], 4), 2)
_Y = np.repeat([0, 1], 8)


def as_vector(v) -> np.ndarray:
    """Coerce to a finite float vector of length 16 (copy)."""
    arr = np.array(v, dtype=float).reshape(-1)
    if arr.shape != (DIM,):
        raise ValueError(f"expected 16 components, got shape {np.shape(v)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def block_indices(x: int, y: int) -> np.ndarray:
    """Indices of the four (a, b) cells of the setting block (x, y)."""
    return np.array([vector_index(a, b, x, y) for b in range(2) for a in range(2)])


_SIGNS = (1, -1)


def q_basis(i: int, j: int, k: int, l: int) -> np.ndarray:
    """Sign-character basis vector with entries i^a j^b k^x l^y."""
    for s in (i, j, k, l):
        if s not in _SIGNS:
            raise ValueError(f"signs must be +1 or -1, got {(i, j, k, l)}")
    return (
        float(i) ** _A * float(j) ** _B * float(k) ** _X * float(l) ** _Y
    )


def alpha_coefficients(v) -> dict[tuple[int, int, int, int], float]:
    """Expansion coefficients of ``v`` in the Q basis.

    Returns the 16 coefficients alpha_{ijkl} = (1/16) sum_{abxy} i^a j^b k^x
    l^y v_{abxy}, keyed by the sign tuple, so that
    ``v == sum(alpha[s] * q_basis(*s) for s in alpha)``.
    """
    arr = as_vector(v)
    return {
        s: float(q_basis(*s) @ arr) / DIM
        for s in itertools.product(_SIGNS, repeat=4)
    }


class Subspace(enum.Enum):
    """Invariant subspaces of the relabeling action (fine and coarse labels)."""

    NO1 = "NO1"
    NO2 = "NO2"
    NO3 = "NO3"
    MARG_A = "marg_A"
    MARG_B = "marg_B"
    CORR = "corr"
    SI_TO_B = "SI_to_B"
    SI_TO_A = "SI_to_A"
    # coarse groupings (derived views of the fine split)
    NO = "NO"
    MARG = "marg"
    NS = "NS"
    SI = "SI"


FINE_SUBSPACES = (
    Subspace.NO1, Subspace.NO2, Subspace.NO3,
    Subspace.MARG_A, Subspace.MARG_B, Subspace.CORR,
    Subspace.SI_TO_B, Subspace.SI_TO_A,
)

_FINE_SIGNS = {
    Subspace.NO1: ((1, 1, 1, 1),),
    Subspace.NO2: ((1, 1, 1, -1), (1, 1, -1, 1)),
    Subspace.NO3: ((1, 1, -1, -1),),
    Subspace.MARG_A: ((-1, 1, 1, 1), (-1, 1, -1, 1)),
    Subspace.MARG_B: ((1, -1, 1, 1), (1, -1, 1, -1)),
    Subspace.CORR: ((-1, -1, 1, 1), (-1, -1, 1, -1), (-1, -1, -1, 1), (-1, -1, -1, -1)),
    Subspace.SI_TO_B: ((1, -1, -1, 1), (1, -1, -1, -1)),
    Subspace.SI_TO_A: ((-1, 1, 1, -1), (-1, 1, -1, -1)),
}

_COARSE_PARTS = {
    Subspace.NO: (Subspace.NO1, Subspace.NO2, Subspace.NO3),
    Subspace.MARG: (Subspace.MARG_A, Subspace.MARG_B),
    Subspace.NS: (Subspace.MARG_A, Subspace.MARG_B, Subspace.CORR),
    Subspace.SI: (Subspace.SI_TO_B, Subspace.SI_TO_A),
}


def subspace_signs(s: Subspace) -> tuple[tuple[int, int, int, int], ...]:
    """Sign tuples of the Q vectors spanning the subspace."""
    if s in _FINE_SIGNS:
        return _FINE_SIGNS[s]
    return tuple(
        sig for part in _COARSE_PARTS[s] for sig in _FINE_SIGNS[part]
    )


def subspace_dimension(s: Subspace) -> int:
    return len(subspace_signs(s))


@functools.lru_cache(maxsize=None)
def projector(s: Subspace) -> np.ndarray:
    """Orthogonal projector onto the subspace, (1/16) sum Q Q^T over its basis."""
    P = np.zeros((DIM, DIM))
    for sig in subspace_signs(s):
        q = q_basis(*sig)
        P += np.outer(q, q) / DIM
    P.flags.writeable = False
    return P


def project(v, s: Subspace) -> np.ndarray:
    """Orthogonal projection of ``v`` onto the subspace ``s``."""
    return projector(s) @ as_vector(v)


@dataclass(frozen=True)
class Decomposition:
    """The split of a vector into its six (fine: eight) invariant components."""

    components: dict  # Subspace -> np.ndarray, fine labels only

    def __getitem__(self, s: Subspace) -> np.ndarray:
        if s in self.components:
            return self.components[s]
        return np.sum([self.components[p] for p in _COARSE_PARTS[s]], axis=0)

    @property
    def no(self) -> np.ndarray:
        return self[Subspace.NO]

    @property
    def ns(self) -> np.ndarray:
        return self[Subspace.NS]

    @property
    def si(self) -> np.ndarray:
        return self[Subspace.SI]

    def recompose(self) -> np.ndarray:
        return np.sum(list(self.components.values()), axis=0)

    def norms(self) -> dict:
        return {s: float(np.linalg.norm(c)) for s, c in self.components.items()}

    def nonzero_labels(self, tol: float = 1e-9) -> tuple[Subspace, ...]:
        return tuple(s for s, n in self.norms().items() if n > tol)


def decompose(v) -> Decomposition:
    """Unique split of ``v`` into the invariant subspaces (fine labels)."""
    arr = as_vector(v)
    return Decomposition({s: projector(s) @ arr for s in FINE_SUBSPACES})


def bell_value(beta, p) -> float:
    """Inner product of a coefficient vector with a behavior vector."""
    coeffs = getattr(beta, "coeffs", beta)
    return float(as_vector(coeffs) @ as_vector(p))


# --- behavior predicates -------------------------------------------------

def check_distribution(v, tol: float = ATOL_EXACT) -> np.ndarray:
    """Validate nonnegativity and per-block normalization; return the vector."""
    arr = as_vector(v)
    if np.min(arr) < -tol:
        raise ValueError(f"negative probability {np.min(arr):g}")
    for x in range(2):
        for y in range(2):
            s = arr[block_indices(x, y)].sum()
            if abs(s - 1.0) > tol:
                raise ValueError(f"block ({x},{y}) sums to {s!r}, expected 1")
    return arr


def is_distribution(v, tol: float = ATOL_EXACT) -> bool:
    try:
        check_distribution(v, tol)
    except ValueError:
        return False
    return True


def marginal_a(v, a: int, x: int, y: int) -> float:
    """Alice marginal sum_b p_{ab|xy}, computed from the given y block."""
    arr = as_vector(v)
    return float(sum(arr[vector_index(a, b, x, y)] for b in range(2)))


def marginal_b(v, b: int, x: int, y: int) -> float:
    """Bob marginal sum_a p_{ab|xy}, computed from the given x block."""
    arr = as_vector(v)
    return float(sum(arr[vector_index(a, b, x, y)] for a in range(2)))


def is_nonsignaling(v, tol: float = ATOL_EXACT) -> bool:
    """Literal marginal tests: each party's marginals do not depend on the
    other party's setting choice.  Independent of the subspace machinery."""
    for x in range(2):
        for a in range(2):
            if abs(marginal_a(v, a, x, 0) - marginal_a(v, a, x, 1)) > tol:
                return False
    for y in range(2):
        for b in range(2):
            if abs(marginal_b(v, b, 0, y) - marginal_b(v, b, 1, y)) > tol:
                return False
    return True


def correlator(v, x: int, y: int) -> float:
    """E_xy = sum_ab (-1)^(a+b) p_{ab|xy}."""
    arr = as_vector(v)
    return float(sum(
        (-1.0) ** (a + b) * arr[vector_index(a, b, x, y)]
        for a in range(2) for b in range(2)
    ))


def correlator_pattern(x: int, y: int) -> np.ndarray:
    """Unit-trace correlation pattern E_vec_xy = (1/16) sum_kl k^x l^y Q_{--kl}.

    The correlation component of any vector is sum_xy correlator(v,x,y) *
    correlator_pattern(x,y).
    """
    out = np.zeros(DIM)
    for k in _SIGNS:
        for l in _SIGNS:
            out += (float(k) ** x) * (float(l) ** y) * q_basis(-1, -1, k, l)
    return out / DIM


# --- JSON codec ----------------------------------------------------------

def vector_to_json(v) -> dict:
    """Canonical JSON object for a 16-vector: {"coeffs": [...], "labels": [...]}."""
    return {"coeffs": [float(c) for c in as_vector(v)], "labels": ["abxy-order"]}


def vector_from_json(obj: dict) -> np.ndarray:
    if "coeffs" not in obj:
        raise ValueError("missing 'coeffs' field")
    labels = obj.get("labels", ["abxy-order"])
    if labels != ["abxy-order"]:
        raise ValueError(f"unsupported index labels {labels!r}")
    return as_vector(obj["coeffs"])
