"""Protein structures: PDB C-alpha parsing, quality filtering, superposition.

Distances are pairwise C-alpha RMSD after least-squares rigid superposition
with iterative outlier rejection (sequence correspondence from global
alignment).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .alignment import align_residue_indices
from .chem import SimilarityMatrix
from .errors import InsufficientOverlapError, ParseError, ValidationError

log = logging.getLogger(__name__)

REFINE_CYCLES = 5
REJECT_CUTOFF = 2.0  # angstrom, per-pair deviation above which a pair is dropped
MAX_RESOLUTION = 2.0
MIN_PLDDT = 70.0

THREE_TO_ONE = {
    "ALA": "A", "ARG": "R", "ASN": "N", "ASP": "D", "CYS": "C",
    "GLN": "Q", "GLU": "E", "GLY": "G", "HIS": "H", "ILE": "I",
    "LEU": "L", "LYS": "K", "MET": "M", "PHE": "F", "PRO": "P",
    "SER": "S", "THR": "T", "TRP": "W", "TYR": "Y", "VAL": "V",
    # common non-standard residues
    "MSE": "M", "SEC": "U", "PYL": "O",
}


class StructureSource(Enum):
    XRAY = "xray"
    ALPHAFOLD = "alphafold"


@dataclass
class ProteinStructure:
    protein_id: str
    sequence: str                      # one-letter codes, file order
    coords: np.ndarray                 # (n, 3) C-alpha coordinates, angstrom
    source: StructureSource | None = None
    quality: float | None = None       # resolution (XRay) or mean pLDDT (AlphaFold)
    chain: str = ""

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.shape != (len(self.sequence), 3):
            raise ValidationError(
                f"{self.protein_id}: {len(self.sequence)} residues but coords {self.coords.shape}"
            )
        if self.coords.size and not np.isfinite(self.coords).all():
            raise ValidationError(f"{self.protein_id}: non-finite coordinates")

    @property
    def n_residues(self) -> int:
        return len(self.sequence)


def parse_pdb_ca(path, protein_id: str | None = None, chain: str | None = None) -> ProteinStructure:
    """Extract one C-alpha per residue from fixed-column ATOM records.

    First model only, first alternate location per residue, single chain
    (the first seen unless ``chain`` is given).  Resolution is read from
    ``REMARK   2`` when present; AlphaFold files are recognized from their
    header and their mean C-alpha B-factor is kept as the pLDDT quality.
    """
    path = Path(path)
    if protein_id is None:
        protein_id = path.stem
    sequence: list[str] = []
    coords: list[tuple[float, float, float]] = []
    bfactors: list[float] = []
    seen_residues: set[tuple[str, str]] = set()
    picked_chain = chain
    resolution = None
    is_alphafold = False
    is_xray = False
    in_first_model = True
    model_seen = False

    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            rec = line[:6]
            if rec == "MODEL ":
                if model_seen:
                    in_first_model = False
                model_seen = True
                continue
            if rec == "ENDMDL":
                in_first_model = False
                continue
            if rec == "EXPDTA":
                if "X-RAY" in line.upper():
                    is_xray = True
                continue
            if rec in ("TITLE ", "REMARK", "DBREF ", "COMPND"):
                if "ALPHAFOLD" in line.upper():
                    is_alphafold = True
                if rec == "REMARK" and line[7:10].strip() == "2" and "RESOLUTION." in line:
                    token = line.split("RESOLUTION.", 1)[1].strip().split()
                    if token and token[0] not in ("NOT",):
                        try:
                            resolution = float(token[0])
                        except ValueError:
                            pass
                continue
            if rec != "ATOM  " or not in_first_model:
                continue
            atom_name = line[12:16].strip()
            if atom_name != "CA":
                continue
            chain_id = line[21:22]
            if picked_chain is None:
                picked_chain = chain_id
            if chain_id != picked_chain:
                continue
            res_key = (line[22:26], line[26:27])  # resSeq + iCode
            if res_key in seen_residues:
                continue  # first altLoc / first CA of the residue wins
            try:
                x = float(line[30:38])
                y = float(line[38:46])
                z = float(line[46:54])
            except ValueError:
                raise ParseError("malformed coordinate field", path, lineno) from None
            try:
                b = float(line[60:66])
            except ValueError:
                b = np.nan
            seen_residues.add(res_key)
            sequence.append(THREE_TO_ONE.get(line[17:20].strip(), "X"))
            coords.append((x, y, z))
            bfactors.append(b)

    if not coords:
        raise ParseError("no CA atoms found", path)

    source = None
    quality = None
    if is_alphafold:
        source = StructureSource.ALPHAFOLD
        finite = [b for b in bfactors if np.isfinite(b)]
        quality = float(np.mean(finite)) if finite else None
    elif is_xray:
        source = StructureSource.XRAY
        quality = resolution

    return ProteinStructure(
        protein_id=protein_id,
        sequence="".join(sequence),
        coords=np.array(coords, dtype=float),
        source=source,
        quality=quality,
        chain=picked_chain or "",
    )


@dataclass
class QualityReport:
    kept: list[str] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)  # (id, reason)


def quality_filter(
    structures,
    max_resolution: float = MAX_RESOLUTION,
    min_plddt: float = MIN_PLDDT,
) -> tuple[list[ProteinStructure], QualityReport]:
    """Keep X-ray structures with resolution < max and AlphaFold models with
    mean pLDDT > min (both strict); everything else is rejected with a reason."""
    report = QualityReport()
    kept = []
    for s in structures:
        if s.source is None or s.quality is None:
            report.rejected.append((s.protein_id, "unknown-quality"))
            continue
        if s.source is StructureSource.XRAY:
            if s.quality < max_resolution:
                kept.append(s)
                report.kept.append(s.protein_id)
            else:
                report.rejected.append((s.protein_id, f"resolution {s.quality:g} >= {max_resolution:g}"))
        else:
            if s.quality > min_plddt:
                kept.append(s)
                report.kept.append(s.protein_id)
            else:
                report.rejected.append((s.protein_id, f"mean pLDDT {s.quality:g} <= {min_plddt:g}"))
    return kept, report


@dataclass
class Superposition:
    rotation: np.ndarray     # (3, 3), proper rotation, det = +1
    translation: np.ndarray  # (3,)
    rmsd: float
    degenerate: bool = False

    def apply(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation


def kabsch_superpose(P: np.ndarray, Q: np.ndarray) -> Superposition:
    """Least-squares rigid superposition of P onto Q.

    Reflections are corrected by flipping the sign of the smallest singular
    value, so the rotation is always proper.  Rank-deficient geometry (e.g.
    collinear points) is still solved but flagged degenerate.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape or P.ndim != 2 or P.shape[1] != 3:
        raise ValidationError(f"coordinate shapes differ or are not (n,3): {P.shape} vs {Q.shape}")
    n = P.shape[0]
    if n < 3:
        raise ValidationError("need at least 3 points to superpose")
    p_mean = P.mean(axis=0)
    q_mean = Q.mean(axis=0)
    Pc = P - p_mean
    Qc = Q - q_mean
    if not (Pc.any() or Qc.any()):
        raise ValidationError("all points coincident")
    H = Pc.T @ Qc
    U, S, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    if d == 0:
        d = 1.0
    D = np.diag([1.0, 1.0, d])
    R = Vt.T @ D @ U.T
    degenerate = S[1] <= 1e-9 * max(S[0], 1e-300)
    diff = Pc @ R.T - Qc
    rmsd = float(np.sqrt((diff ** 2).sum() / n))
    t = q_mean - R @ p_mean
    return Superposition(rotation=R, translation=t, rmsd=rmsd, degenerate=degenerate)


def rmsd_refined(
    a: ProteinStructure,
    b: ProteinStructure,
    cycles: int = REFINE_CYCLES,
    reject_cutoff: float = REJECT_CUTOFF,
) -> float:
    """C-alpha RMSD after alignment-based matching and outlier rejection.

    Repeats up to ``cycles`` times: superpose on the current pair set, drop
    pairs deviating more than ``reject_cutoff``; stops early when nothing is
    dropped or fewer than 3 pairs would remain (the previous set is kept).
    """
    if a.n_residues < 3 or b.n_residues < 3:
        raise InsufficientOverlapError(
            f"structures too short to superpose: {a.protein_id}({a.n_residues}), "
            f"{b.protein_id}({b.n_residues})"
        )
    mapping = align_residue_indices(a.sequence, b.sequence)
    idx_a = np.array([i for i, _ in mapping])
    idx_b = np.array([j for _, j in mapping])
    sup = kabsch_superpose(a.coords[idx_a], b.coords[idx_b])
    for _ in range(cycles):
        deviations = np.linalg.norm(sup.apply(a.coords[idx_a]) - b.coords[idx_b], axis=1)
        keep = deviations <= reject_cutoff
        if keep.all():
            break
        if keep.sum() < 3:
            break
        idx_a, idx_b = idx_a[keep], idx_b[keep]
        sup = kabsch_superpose(a.coords[idx_a], b.coords[idx_b])
    return sup.rmsd


def pairwise_rmsd(
    structures,
    cycles: int = REFINE_CYCLES,
    reject_cutoff: float = REJECT_CUTOFF,
    cache_path=None,
) -> SimilarityMatrix:
    """All-pairs refined RMSD over the sorted protein-id list.

    Pairs without sufficient alignment overlap are stored as NaN ("NA" on
    disk) and excluded from downstream windows.  When ``cache_path`` exists
    it is loaded instead of recomputing; otherwise the result is written
    there (floats serialized with full round-trip precision).
    """
    structs = sorted(structures, key=lambda s: s.protein_id)
    if len(structs) < 2:
        raise ValidationError("need at least 2 structures for a pairwise matrix")
    ids = [s.protein_id for s in structs]
    if cache_path is not None and Path(cache_path).exists():
        cached = SimilarityMatrix.read_tsv(cache_path, kind="rmsd")
        if cached.ids == ids:
            return cached
        log.warning("rmsd cache %s covers different ids; recomputing", cache_path)
    n = len(structs)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            try:
                r = rmsd_refined(structs[i], structs[j], cycles, reject_cutoff)
            except InsufficientOverlapError:
                log.warning("no usable overlap: (%s, %s)", ids[i], ids[j])
                r = np.nan
            values[i, j] = values[j, i] = r
    matrix = SimilarityMatrix(ids=ids, values=values, kind="rmsd")
    if cache_path is not None:
        matrix.write_tsv(cache_path)
    return matrix
