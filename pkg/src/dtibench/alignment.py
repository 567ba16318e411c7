"""Global sequence alignment (Needleman-Wunsch, affine gaps, BLOSUM62)."""

import numpy as np

from .errors import InsufficientOverlapError, ValidationError

GAP_OPEN = -10.0   # cost of the first residue of a gap
GAP_EXTEND = -1.0  # each additional gapped residue

# BLOSUM62, NCBI layout.
_BLOSUM62_TABLE = """
   A  R  N  D  C  Q  E  G  H  I  L  K  M  F  P  S  T  W  Y  V  B  Z  X
A  4 -1 -2 -2  0 -1 -1  0 -2 -1 -1 -1 -1 -2 -1  1  0 -3 -2  0 -2 -1  0
R -1  5  0 -2 -3  1  0 -2  0 -3 -2  2 -1 -3 -2 -1 -1 -3 -2 -3 -1  0 -1
N -2  0  6  1 -3  0  0  0  1 -3 -3  0 -2 -3 -2  1  0 -4 -2 -3  3  0 -1
D -2 -2  1  6 -3  0  2 -1 -1 -3 -4 -1 -3 -3 -1  0 -1 -4 -3 -3  4  1 -1
C  0 -3 -3 -3  9 -3 -4 -3 -3 -1 -1 -3 -1 -2 -3 -1 -1 -2 -2 -1 -3 -3 -2
Q -1  1  0  0 -3  5  2 -2  0 -3 -2  1  0 -3 -1  0 -1 -2 -1 -2  0  3 -1
E -1  0  0  2 -4  2  5 -2  0 -3 -3  1 -2 -3 -1  0 -1 -3 -2 -2  1  4 -1
G  0 -2  0 -1 -3 -2 -2  6 -2 -4 -4 -2 -3 -3 -2  0 -2 -2 -3 -3 -1 -2 -1
H -2  0  1 -1 -3  0  0 -2  8 -3 -3 -1 -2 -1 -2 -1 -2 -2  2 -3  0  0 -1
I -1 -3 -3 -3 -1 -3 -3 -4 -3  4  2 -3  1  0 -3 -2 -1 -3 -1  3 -3 -3 -1
L -1 -2 -3 -4 -1 -2 -3 -4 -3  2  4 -2  2  0 -3 -2 -1 -2 -1  1 -4 -3 -1
K -1  2  0 -1 -3  1  1 -2 -1 -3 -2  5 -1 -3 -1  0 -1 -3 -2 -2  0  1 -1
M -1 -1 -2 -3 -1  0 -2 -3 -2  1  2 -1  5  0 -2 -1 -1 -1 -1  1 -3 -1 -1
F -2 -3 -3 -3 -2 -3 -3 -3 -1  0  0 -3  0  6 -4 -2 -2  1  3 -1 -3 -3 -1
P -1 -2 -2 -1 -3 -1 -1 -2 -2 -3 -3 -1 -2 -4  7 -1 -1 -4 -3 -2 -2 -1 -2
S  1 -1  1  0 -1  0  0  0 -1 -2 -2  0 -1 -2 -1  4  1 -3 -2 -2  0  0  0
T  0 -1  0 -1 -1 -1 -1 -2 -2 -1 -1 -1 -1 -2 -1  1  5 -2 -2  0 -1 -1  0
W -3 -3 -4 -4 -2 -2 -3 -2 -2 -3 -2 -3 -1  1 -4 -3 -2 11  2 -3 -4 -3 -2
Y -2 -2 -2 -3 -2 -1 -2 -3  2 -1 -1 -2 -1  3 -3 -2 -2  2  7 -1 -3 -2 -1
V  0 -3 -3 -3 -1 -2 -2 -3 -3  3  1 -2  1 -1 -2 -2  0 -3 -1  4 -3 -2 -1
B -2 -1  3  4 -3  0  1 -1  0 -3 -4  0 -3 -3 -2  0 -1 -4 -3 -3  4  1 -1
Z -1  0  0  1 -3  3  4 -2  0 -3 -3  1 -1 -3 -1  0 -1 -3 -2 -2  1  4 -1
X  0 -1 -1 -1 -2 -1 -1 -1 -1 -1 -1 -1 -1 -1 -2  0  0 -2 -1 -1 -1 -1 -1
"""


def _parse_blosum(table: str) -> dict[tuple[str, str], float]:
    lines = [ln for ln in table.strip().splitlines()]
    cols = lines[0].split()
    scores = {}
    for line in lines[1:]:
        parts = line.split()
        row = parts[0]
        for col, val in zip(cols, parts[1:]):
            scores[(row, col)] = float(val)
    return scores


BLOSUM62 = _parse_blosum(_BLOSUM62_TABLE)


def substitution_score(a: str, b: str) -> float:
    """BLOSUM62 score; residues outside the table fall back to 'X'."""
    a = a if (a, a) in BLOSUM62 else "X"
    b = b if (b, b) in BLOSUM62 else "X"
    return BLOSUM62[(a, b)]


def needleman_wunsch(
    seq_a: str,
    seq_b: str,
    gap_open: float = GAP_OPEN,
    gap_extend: float = GAP_EXTEND,
) -> tuple[float, list[tuple[int, int]]]:
    """Global alignment score and aligned index pairs.

    Affine gap cost: a run of k gapped residues scores
    ``gap_open + (k-1)*gap_extend``.  Returns (score, pairs) where pairs are
    the non-gap columns, strictly increasing in both coordinates.
    """
    n, m = len(seq_a), len(seq_b)
    if n == 0 or m == 0:
        raise ValidationError("cannot align an empty sequence")
    neg = -np.inf
    # State 0: a_i aligned to b_j.  State 1: gap in B (consumes A).
    # State 2: gap in A (consumes B).
    M = np.full((n + 1, m + 1), neg)
    Ix = np.full((n + 1, m + 1), neg)
    Iy = np.full((n + 1, m + 1), neg)
    M[0, 0] = 0.0
    for i in range(1, n + 1):
        Ix[i, 0] = gap_open + (i - 1) * gap_extend
    for j in range(1, m + 1):
        Iy[0, j] = gap_open + (j - 1) * gap_extend
    # Traceback: which predecessor state produced each cell.
    from_m = np.zeros((n + 1, m + 1), dtype=np.int8)
    from_ix = np.zeros((n + 1, m + 1), dtype=np.int8)
    from_iy = np.zeros((n + 1, m + 1), dtype=np.int8)
    from_ix[1:, 0] = 1
    from_iy[0, 1:] = 2

    for i in range(1, n + 1):
        for j in range(1, m + 1):
            s = substitution_score(seq_a[i - 1], seq_b[j - 1])
            options = (M[i - 1, j - 1], Ix[i - 1, j - 1], Iy[i - 1, j - 1])
            k = int(np.argmax(options))
            M[i, j] = options[k] + s
            from_m[i, j] = k

            options = (M[i - 1, j] + gap_open, Ix[i - 1, j] + gap_extend, Iy[i - 1, j] + gap_open)
            k = int(np.argmax(options))
            Ix[i, j] = options[k]
            from_ix[i, j] = k

            options = (M[i, j - 1] + gap_open, Ix[i, j - 1] + gap_open, Iy[i, j - 1] + gap_extend)
            k = int(np.argmax(options))
            Iy[i, j] = options[k]
            from_iy[i, j] = k

    finals = (M[n, m], Ix[n, m], Iy[n, m])
    state = int(np.argmax(finals))
    score = float(finals[state])

    pairs = []
    i, j = n, m
    while i > 0 or j > 0:
        if state == 0:
            prev = int(from_m[i, j])
            pairs.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif state == 1:
            prev = int(from_ix[i, j])
            i -= 1
        else:
            prev = int(from_iy[i, j])
            j -= 1
        state = prev
    pairs.reverse()
    return score, pairs


def align_residue_indices(seq_a: str, seq_b: str) -> list[tuple[int, int]]:
    """Aligned (i, j) residue pairs; errors when fewer than 3 align."""
    _, pairs = needleman_wunsch(seq_a, seq_b)
    if len(pairs) < 3:
        raise InsufficientOverlapError(
            f"global alignment produced only {len(pairs)} aligned pairs (need >= 3)"
        )
    return pairs
