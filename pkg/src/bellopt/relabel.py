"""The 128-element relabeling group of the (2,2,2) scenario.

A relabeling may swap the two parties, permute each party's settings, and
permute each party's outcomes separately per setting.  Group elements are
kept in that structured form; their linear action on 16-vectors is the
induced coordinate permutation.

Composition follows the tree-transformation reading of nested (wreath)
permutations: ``compose(g, h)`` applies ``h`` first, then ``g``.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
from dataclasses import dataclass

import numpy as np

from .space import DIM, Subspace, projector, q_basis, subspace_signs, vector_index

_PERMS2 = ((0, 1), (1, 0))  # the two permutations of {0, 1}


def _perm_compose(p: tuple, q: tuple) -> tuple:
    """(p after q): x -> p[q[x]]."""
    return (p[q[0]], p[q[1]])


def _perm_inverse(p: tuple) -> tuple:
    inv = [0, 0]
    inv[p[0]], inv[p[1]] = 0, 1
    return tuple(inv)


@dataclass(frozen=True)
class PartyRelabeling:
    """One party's relabeling: a setting permutation plus one outcome
    permutation per (original) setting."""

    setting_perm: tuple = (0, 1)
    outcome_perms: tuple = ((0, 1), (0, 1))

    def apply(self, a: int, x: int) -> tuple[int, int]:
        return self.outcome_perms[x][a], self.setting_perm[x]

    def compose(self, other: "PartyRelabeling") -> "PartyRelabeling":
        """self after other."""
        return PartyRelabeling(
            _perm_compose(self.setting_perm, other.setting_perm),
            tuple(
                _perm_compose(self.outcome_perms[other.setting_perm[x]], other.outcome_perms[x])
                for x in range(2)
            ),
        )

    def inverse(self) -> "PartyRelabeling":
        inv_setting = _perm_inverse(self.setting_perm)
        return PartyRelabeling(
            inv_setting,
            tuple(_perm_inverse(self.outcome_perms[inv_setting[x]]) for x in range(2)),
        )


@dataclass(frozen=True)
class Relabeling:
    """A full scenario relabeling: optional party swap plus per-party data.

    With a swap, the new Alice labels are produced by the Bob component
    applied to the old Bob labels (and vice versa): the per-party components
    are indexed by the slot the content comes from.
    """

    party_swap: bool = False
    alice: PartyRelabeling = PartyRelabeling()
    bob: PartyRelabeling = PartyRelabeling()

    def apply_labels(self, a: int, b: int, x: int, y: int) -> tuple[int, int, int, int]:
        new_a, new_x = self.alice.apply(a, x)
        new_b, new_y = self.bob.apply(b, y)
        if self.party_swap:
            return new_b, new_a, new_y, new_x
        return new_a, new_b, new_x, new_y

    def compose(self, other: "Relabeling") -> "Relabeling":
        """self after other (tree semantics: apply ``other`` first)."""
        # the component of ``self`` seen by content starting at party M is the
        # one at the slot ``other`` sends M to
        if other.party_swap:
            comp_a = self.bob.compose(other.alice)
            comp_b = self.alice.compose(other.bob)
        else:
            comp_a = self.alice.compose(other.alice)
            comp_b = self.bob.compose(other.bob)
        return Relabeling(self.party_swap != other.party_swap, comp_a, comp_b)

    def inverse(self) -> "Relabeling":
        if self.party_swap:
            return Relabeling(True, self.bob.inverse(), self.alice.inverse())
        return Relabeling(False, self.alice.inverse(), self.bob.inverse())


IDENTITY = Relabeling()


@functools.lru_cache(maxsize=None)
def permutation_of(g: Relabeling) -> np.ndarray:
    """Index permutation of the action: entry i of v lands at perm[i] in v^g."""
    perm = np.empty(DIM, dtype=np.intp)
    for a, b, x, y in itertools.product(range(2), repeat=4):
        perm[vector_index(a, b, x, y)] = vector_index(*g.apply_labels(a, b, x, y))
    perm.flags.writeable = False
    return perm


def act(g: Relabeling, v) -> np.ndarray:
    """The relabeled vector v^g (a pure coordinate permutation)."""
    arr = np.asarray(v, dtype=float)
    out = np.empty_like(arr)
    out[permutation_of(g)] = arr
    return out


def matrix_of(g: Relabeling) -> np.ndarray:
    """16x16 permutation matrix M with M @ v == act(g, v)."""
    M = np.zeros((DIM, DIM))
    M[permutation_of(g), np.arange(DIM)] = 1.0
    return M


def _party_relabelings() -> list[PartyRelabeling]:
    return [
        PartyRelabeling(sp, (o0, o1))
        for sp in _PERMS2 for o0 in _PERMS2 for o1 in _PERMS2
    ]


@functools.lru_cache(maxsize=1)
def enumerate_group() -> tuple[Relabeling, ...]:
    """All 128 relabelings: 2 (swap) x 8 x 8 (per-party components)."""
    parts = _party_relabelings()
    return tuple(
        Relabeling(swap, ga, gb)
        for swap in (False, True) for ga in parts for gb in parts
    )


GLOBAL_OUTCOME_FLIP = Relabeling(
    False,
    PartyRelabeling((0, 1), ((1, 0), (1, 0))),
    PartyRelabeling((0, 1), ((1, 0), (1, 0))),
)

#: the six blocks that the group leaves invariant (party swap mixes the A/B
#: halves of the marginal and signaling pieces, so those count as one block)
INVARIANT_BLOCKS = (
    Subspace.NO1, Subspace.NO2, Subspace.NO3,
    Subspace.MARG, Subspace.CORR, Subspace.SI,
)


def spans_subspace(vecs, signs) -> bool:
    """True iff every vector lies in the span of the given Q sign vectors."""
    basis = np.stack([q_basis(*s) for s in signs], axis=1) / 4.0
    P = basis @ basis.T
    return all(np.allclose(P @ v, v, atol=1e-12) for v in vecs)


def verify_invariance(block: Subspace, elements=None) -> bool:
    """Check that acting with every group element keeps the block inside itself."""
    if elements is None:
        elements = enumerate_group()
    signs = subspace_signs(block)
    basis = [q_basis(*s) for s in signs]
    for g in elements:
        if not spans_subspace([act(g, q) for q in basis], signs):
            return False
    return True


def invariance_report(elements=None) -> dict:
    return {block.value: verify_invariance(block, elements) for block in INVARIANT_BLOCKS}


def averaging_projector(elements=None) -> np.ndarray:
    """Group average of the action matrices; projects onto the trivial component."""
    if elements is None:
        elements = enumerate_group()
    return np.mean([matrix_of(g) for g in elements], axis=0)


def commutant_dimension(elements=None) -> int:
    """Dimension of {M : M A_g = A_g M for all g}, by a dense null-space count.

    Stacks the 256-unknown linear constraints of every element and counts the
    zero singular values.  Equals the number of irreducible components when
    the representation is multiplicity-free.
    """
    if elements is None:
        elements = enumerate_group()
    eye = np.eye(DIM)
    rows = []
    for g in elements:
        A = matrix_of(g)
        rows.append(np.kron(A, eye) - np.kron(eye, A.T))
    K = np.concatenate(rows, axis=0)
    svals = np.linalg.svd(K, compute_uv=False)
    return int(np.sum(svals < 1e-9 * max(1.0, svals[0])))


def cayley_checksum(elements=None) -> str:
    """SHA-256 of the composition table in canonical element order."""
    if elements is None:
        elements = enumerate_group()
    order = {g: i for i, g in enumerate(elements)}
    h = hashlib.sha256()
    for g in elements:
        for k in elements:
            h.update(order[g.compose(k)].to_bytes(2, "big"))
    return h.hexdigest()


def group_axioms_hold(elements=None) -> bool:
    """Exhaustive closure / identity / inverse check, plus action consistency."""
    if elements is None:
        elements = enumerate_group()
    elems = set(elements)
    if IDENTITY not in elems or len(elems) != len(elements):
        return False
    for g in elements:
        if g.compose(g.inverse()) != IDENTITY or g.inverse().compose(g) != IDENTITY:
            return False
    for g in elements:
        pg = permutation_of(g)
        for k in elements:
            gk = g.compose(k)
            if gk not in elems:
                return False
            if not np.array_equal(permutation_of(gk), pg[permutation_of(k)]):
                return False
    return True
