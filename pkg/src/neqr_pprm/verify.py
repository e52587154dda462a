"""Exhaustive Boolean evaluation of NEQR circuits.

All data gates are classically controlled X gates, so the grayscale value a
circuit writes at coordinate ``k`` is a plain XOR of gate firings there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bitplane import GrayImage
from .circuit import Circuit, ProductTerm
from .rm_transform import butterfly_words, pack_bits, unpack_bits


class DimensionMismatch(ValueError):
    pass


def eval_plane(gates: Iterable[ProductTerm], assignment: int) -> int:
    bit = 0
    for g in gates:
        bit ^= g.matches(assignment)
    return int(bit)


def _subsets(mask: int) -> np.ndarray:
    subs = np.zeros(1, dtype=np.int64)
    bit = 1
    while mask >= bit:
        if mask & bit:
            subs = np.concatenate([subs, subs | bit])
        bit <<= 1
    return subs


def plane_truth_table(pos: np.ndarray, neg: np.ndarray, m: int) -> np.ndarray:
    """Value of one grayscale qubit at every coordinate, as a uint8 array.

    Full-polarity minterms land directly on their coordinate. Positive-only
    terms are collected as Reed-Muller coefficients and expanded once with
    the butterfly. Mixed terms go whichever way touches fewer entries:
    expanding the negative literals into positive terms, or enumerating the
    don't-care variables.
    """
    size = 1 << m
    full = size - 1
    pos = np.asarray(pos, dtype=np.uint64)
    neg = np.asarray(neg, dtype=np.uint64)
    care = pos | neg
    minterm = care == np.uint64(full)
    positive = (neg == 0) & ~minterm

    table = (np.bincount(pos[minterm].astype(np.int64), minlength=size) & 1).astype(np.uint8)
    coeff = (np.bincount(pos[positive].astype(np.int64), minlength=size) & 1).astype(np.uint8)

    for p, g in zip(pos[~(minterm | positive)].tolist(), neg[~(minterm | positive)].tolist()):
        free = full & ~(p | g)
        if g.bit_count() <= free.bit_count():
            coeff[p | _subsets(g)] ^= 1
        else:
            table[p | _subsets(free)] ^= 1

    if coeff.any():
        table ^= unpack_bits(butterfly_words(pack_bits(coeff), m), m)
    return table


def truth_tables(c: Circuit) -> np.ndarray:
    """Shape (q, 4**n) array of every plane's values."""
    return np.stack([plane_truth_table(p, g, c.m) for p, g in zip(c.positive, c.negative)])


def reconstruct_image(c: Circuit) -> GrayImage:
    pixels = np.zeros(1 << c.m, dtype=np.uint32)
    for i, plane in enumerate(truth_tables(c)):
        pixels |= plane.astype(np.uint32) << i
    return GrayImage(c.n, c.q, pixels)


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    plane: int | None = None
    coordinate: int | None = None

    def __bool__(self):
        return self.equivalent


def equivalent(c1: Circuit, c2: Circuit) -> Equivalence:
    """Compare two circuits on every plane and coordinate.

    On failure the first counterexample in (plane, coordinate) order is
    reported.
    """
    if (c1.n, c1.q) != (c2.n, c2.q):
        raise DimensionMismatch(f"(n, q) = {(c1.n, c1.q)} vs {(c2.n, c2.q)}")
    for i in range(c1.q):
        t1 = plane_truth_table(c1.positive[i], c1.negative[i], c1.m)
        t2 = plane_truth_table(c2.positive[i], c2.negative[i], c2.m)
        diff = np.flatnonzero(t1 != t2)
        if diff.size:
            return Equivalence(False, i, int(diff[0]))
    return Equivalence(True)
