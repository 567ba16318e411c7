"""Global alignment against an exhaustive enumeration oracle."""

import numpy as np
import pytest

from dtibench.alignment import (
    GAP_EXTEND,
    GAP_OPEN,
    align_residue_indices,
    needleman_wunsch,
    substitution_score,
)
from dtibench.errors import InsufficientOverlapError
from dtibench.rng import generator

AMINO = "ARNDCQEGHILKMFPSTWYV"


def brute_force_score(a, b):
    """Max score over every global alignment, affine gaps, no length limit.

    Enumerates move sequences (match, gap-in-a, gap-in-b); a gap run of
    length k costs open + (k-1)*extend.  Exponential, so lengths <= 6 only.
    """
    best = [-np.inf]

    def rec(i, j, prev, score):
        if i == len(a) and j == len(b):
            best[0] = max(best[0], score)
            return
        if i < len(a) and j < len(b):
            rec(i + 1, j + 1, "M", score + substitution_score(a[i], b[j]))
        if i < len(a):
            rec(i + 1, j, "X", score + (GAP_EXTEND if prev == "X" else GAP_OPEN))
        if j < len(b):
            rec(i, j + 1, "Y", score + (GAP_EXTEND if prev == "Y" else GAP_OPEN))

    rec(0, 0, None, 0.0)
    return best[0]


def test_score_matches_exhaustive_enumeration():
    rng = generator(0, "nw-oracle")
    cases = [("HEAGAWGHEE"[:4], "PAWHEAE"[:4])]
    for _ in range(40):
        la, lb = rng.integers(1, 7), rng.integers(1, 7)
        a = "".join(AMINO[i] for i in rng.integers(0, 20, la))
        b = "".join(AMINO[i] for i in rng.integers(0, 20, lb))
        cases.append((a, b))
    for a, b in cases:
        score, _ = needleman_wunsch(a, b)
        assert score == pytest.approx(brute_force_score(a, b)), (a, b)


def test_identical_sequences_align_residue_by_residue():
    seq = "MKTAYIAKQR"
    score, pairs = needleman_wunsch(seq, seq)
    assert pairs == [(i, i) for i in range(len(seq))]
    assert score == sum(substitution_score(c, c) for c in seq)


def test_gap_run_cost_is_affine():
    # aligning X against XAAX forces a 2-run or two 1-runs; affine prefers one run
    score, _ = needleman_wunsch("MW", "MAAW")
    expected = (substitution_score("M", "M") + GAP_OPEN + GAP_EXTEND
                + substitution_score("W", "W"))
    assert score == pytest.approx(expected)


def test_pairs_are_strictly_increasing_in_both_sequences():
    rng = generator(1, "nw-pairs")
    for _ in range(20):
        a = "".join(AMINO[i] for i in rng.integers(0, 20, 12))
        b = "".join(AMINO[i] for i in rng.integers(0, 20, 9))
        _, pairs = needleman_wunsch(a, b)
        for (i1, j1), (i2, j2) in zip(pairs, pairs[1:]):
            assert i1 < i2 and j1 < j2


def test_unknown_residue_scores_as_x():
    assert substitution_score("J", "A") == substitution_score("X", "A")


def test_alignment_mapping_requires_three_pairs():
    with pytest.raises(InsufficientOverlapError):
        align_residue_indices("W", "W")


def test_alignment_mapping_on_overlapping_sequences():
    mapping = align_residue_indices("MKTAYI", "KTAY")
    assert mapping == [(1, 0), (2, 1), (3, 2), (4, 3)]
