"""Drug fingerprint ingestion, Tanimoto similarity and histogram data."""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError

log = logging.getLogger(__name__)

FINGERPRINT_BITS = 2048


@dataclass(frozen=True)
class Fingerprint:
    """Fixed-width bit vector; ``bits`` packs them into a Python int."""

    drug_id: str
    bits: int
    width: int = FINGERPRINT_BITS

    def __post_init__(self):
        if self.width < 1:
            raise ValidationError("fingerprint width must be >= 1")
        if self.bits < 0 or self.bits >> self.width:
            raise ValidationError(f"bits out of range for width {self.width}")

    @property
    def popcount(self) -> int:
        return self.bits.bit_count()


@dataclass
class SimilarityMatrix:
    """Symmetric pairwise matrix keyed by a sorted id list.

    ``kind`` is "tanimoto" (values in [0,1], unit diagonal) or "rmsd"
    (angstroms, zero diagonal, NaN for incomparable pairs).
    """

    ids: tuple[str, ...]
    values: np.ndarray
    kind: str = "tanimoto"

    def __post_init__(self):
        self.ids = tuple(self.ids)
        n = len(self.ids)
        if self.values.shape != (n, n):
            raise ValidationError(f"matrix shape {self.values.shape} does not match {n} ids")
        if np.isinf(self.values).any():
            raise ValidationError("matrix contains non-finite entries")
        if self.kind == "tanimoto" and np.isnan(self.values).any():
            raise ValidationError("tanimoto matrix cannot contain NA entries")

    @property
    def index(self) -> dict[str, int]:
        cached = getattr(self, "_index", None)
        if cached is None or len(cached) != len(self.ids):
            cached = {name: i for i, name in enumerate(self.ids)}
            object.__setattr__(self, "_index", cached)
        return cached

    def at(self, a: str, b: str) -> float:
        idx = self.index
        return float(self.values[idx[a], idx[b]])

    def row(self, a: str) -> np.ndarray:
        return self.values[self.index[a]]

    def offdiagonal_values(self) -> np.ndarray:
        """Upper-triangle values, NaN entries dropped."""
        iu = np.triu_indices(len(self.ids), k=1)
        vals = self.values[iu]
        return vals[~np.isnan(vals)]

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("id\t" + "\t".join(self.ids) + "\n")
            for i, name in enumerate(self.ids):
                cells = [
                    "NA" if math.isnan(v) else repr(float(v)) for v in self.values[i]
                ]
                fh.write(name + "\t" + "\t".join(cells) + "\n")

    @classmethod
    def read_tsv(cls, path, kind: str) -> "SimilarityMatrix":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            if not header or header[0] != "id":
                raise ParseError("expected 'id' header", path, 1)
            ids = header[1:]
            values = np.full((len(ids), len(ids)), np.nan)
            for lineno, raw in enumerate(fh, start=2):
                cols = raw.rstrip("\n").split("\t")
                if len(cols) != len(ids) + 1:
                    raise ParseError("wrong column count", path, lineno)
                row = lineno - 2
                if row >= len(ids) or cols[0] != ids[row]:
                    raise ParseError(f"unexpected row id {cols[0]!r}", path, lineno)
                for j, cell in enumerate(cols[1:]):
                    values[row, j] = np.nan if cell == "NA" else float(cell)
        return cls(ids=ids, values=values, kind=kind)


def load_fingerprints(path, width: int = FINGERPRINT_BITS) -> list[Fingerprint]:
    """Read ``drug_id<TAB>hex`` rows; the hex string must encode ``width`` bits."""
    path = Path(path)
    hex_len = width // 4
    seen: dict[str, Fingerprint] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise ParseError("expected 2 tab-separated columns", path, lineno)
            drug_id, hexstr = cols[0].strip(), cols[1].strip().lower()
            if len(hexstr) != hex_len:
                raise ParseError(
                    f"fingerprint hex length {len(hexstr)}, expected {hex_len}", path, lineno
                )
            try:
                bits = int(hexstr, 16)
            except ValueError:
                raise ParseError("invalid hex digits", path, lineno) from None
            fp = Fingerprint(drug_id, bits, width)
            if drug_id in seen:
                if seen[drug_id].bits != bits:
                    raise ParseError(f"conflicting duplicate fingerprint for {drug_id!r}", path, lineno)
                continue
            if bits == 0:
                log.warning("%s:%d: zero fingerprint for %s", path, lineno, drug_id)
            seen[drug_id] = fp
            order.append(drug_id)
    if not order:
        raise ParseError("file contains no fingerprints", path)
    return [seen[d] for d in order]


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; a pair of all-zero vectors scores 1.0."""
    if a.width != b.width:
        raise ValidationError(f"fingerprint width mismatch: {a.width} vs {b.width}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        log.warning("tanimoto of two zero fingerprints (%s, %s): defined as 1.0", a.drug_id, b.drug_id)
        return 1.0
    return (a.bits & b.bits).bit_count() / union


def pairwise_tanimoto(fingerprints) -> SimilarityMatrix:
    """All-pairs Tanimoto over the sorted drug-id list."""
    fps = sorted(fingerprints, key=lambda f: f.drug_id)
    if len(fps) < 2:
        raise ValidationError("need at least 2 fingerprints for a pairwise matrix")
    n = len(fps)
    values = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            s = tanimoto(fps[i], fps[j])
            values[i, j] = values[j, i] = s
    return SimilarityMatrix(ids=[f.drug_id for f in fps], values=values, kind="tanimoto")


def histogram(values, bin_width: float, lo: float = 0.0, hi: float | None = None):
    """Fixed-width bins [lo+k*w, lo+(k+1)*w); the last bin includes ``hi``.

    Returns a list of (bin_low, bin_high, count); counts sum to len(values).
    """
    if bin_width <= 0:
        raise ValidationError("bin width must be positive")
    values = np.asarray(list(values), dtype=float)
    if hi is None:
        top = float(values.max()) if values.size else lo + bin_width
        n_bins = max(1, math.ceil((top - lo) / bin_width - 1e-12))
    else:
        n_bins = max(1, math.ceil((hi - lo) / bin_width - 1e-12))
    edges = lo + bin_width * np.arange(n_bins + 1)
    if hi is not None:
        edges[-1] = hi
    counts = [0] * n_bins
    for v in values:
        if v < lo or v > edges[-1]:
            raise ValidationError(f"value {v} outside histogram range [{lo}, {edges[-1]}]")
        idx = min(int((v - lo) // bin_width), n_bins - 1)
        counts[idx] += 1
    return [(float(edges[i]), float(edges[i + 1]), counts[i]) for i in range(n_bins)]


def write_histogram_csv(bins, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "count"])
        for low, high, count in bins:
            writer.writerow([repr(low), repr(high), count])
