"""Negative-edge construction for interaction graphs.

Two samplers: uniform random over the non-edge set, and a structure-aware
window scheme.  The window scheme anchors on each positive (drug, protein)
pair, ranks every other protein by RMSD to the anchor protein, discards
near-identical structures, holds out the plausible 2.5-5 A band for
evaluation, and draws training negatives from the 5-t A band.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chem import SimilarityMatrix
from .errors import MissingNodeError, SamplingError, ValidationError
from .graph import DTIGraph, Edge
from .metrics import aggregate, format_aggregate
from .rng import generator

log = logging.getLogger(__name__)

DISCARD_MAX = 2.5
HOLDOUT_MAX = 5.0
TRAIN_MAX_CAP = 20.0

TSV_HEADER = ["drug_id", "protein_id", "label", "window", "rmsd", "provenance"]


@dataclass(frozen=True)
class WindowConfig:
    train_max: float
    discard_max: float = DISCARD_MAX
    holdout_max: float = HOLDOUT_MAX
    ratio: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.discard_max < self.holdout_max < self.train_max <= TRAIN_MAX_CAP:
            raise ValidationError(
                "window bounds must satisfy 0 < discard < holdout < train <= "
                f"{TRAIN_MAX_CAP:g}, got ({self.discard_max}, {self.holdout_max}, "
                f"{self.train_max})"
            )
        if self.ratio < 1:
            raise ValidationError(f"ratio must be >= 1, got {self.ratio}")


@dataclass(frozen=True)
class NegativeRecord:
    drug_id: str
    protein_id: str
    window: str            # "train" or "holdout"
    rmsd: float            # NaN when unknown (random fallback without a matrix value)
    provenance: str        # "random", "rmsd-window", "fallback-extended", "fallback-random"
    anchor: Edge | None    # the positive that triggered this negative

    @property
    def edge(self) -> Edge:
        return (self.drug_id, self.protein_id)


@dataclass
class SampledDataset:
    positives: frozenset
    train_negatives: frozenset
    holdout_negatives: frozenset
    records: tuple = ()
    n_fallback: int = 0

    def __post_init__(self):
        if self.train_negatives & self.positives or self.holdout_negatives & self.positives:
            raise ValidationError("sampled negatives intersect the positive set")
        if self.train_negatives & self.holdout_negatives:
            raise ValidationError("train and holdout negatives intersect")

    def labeled_training_edges(self) -> list:
        """(edge, label) rows for classifier training, canonical order."""
        rows = [(e, 1) for e in sorted(self.positives)]
        rows += [(e, 0) for e in sorted(self.train_negatives)]
        return rows

    def write_tsv(self, path) -> None:
        by_edge = {r.edge: r for r in self.records}
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\t".join(TSV_HEADER) + "\n")
            for e in sorted(self.positives):
                fh.write(f"{e[0]}\t{e[1]}\t1\t-\tNA\tpositive\n")
            negatives = sorted(self.train_negatives | self.holdout_negatives)
            for e in negatives:
                r = by_edge[e]
                rmsd = "NA" if math.isnan(r.rmsd) else repr(r.rmsd)
                fh.write(f"{e[0]}\t{e[1]}\t0\t{r.window}\t{rmsd}\t{r.provenance}\n")

    @classmethod
    def read_tsv(cls, path) -> "SampledDataset":
        positives, train_neg, holdout_neg, records = set(), set(), set(), []
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            if header != TSV_HEADER:
                raise ValidationError(f"unexpected sample header in {path}: {header}")
            for line in fh:
                d, p, label, window, rmsd, prov = line.rstrip("\n").split("\t")
                if label == "1":
                    positives.add((d, p))
                    continue
                value = float("nan") if rmsd == "NA" else float(rmsd)
                records.append(NegativeRecord(d, p, window, value, prov, None))
                (train_neg if window == "train" else holdout_neg).add((d, p))
        return cls(
            positives=frozenset(positives),
            train_negatives=frozenset(train_neg),
            holdout_negatives=frozenset(holdout_neg),
            records=tuple(records),
            n_fallback=sum(1 for r in records if r.provenance.startswith("fallback")),
        )


def sample_random(g: DTIGraph, ratio: int = 1, seed: int = 0) -> SampledDataset:
    """Uniform negative sampling without replacement over all non-edges."""
    if ratio < 1:
        raise ValidationError(f"ratio must be >= 1, got {ratio}")
    drugs = sorted(g.drugs)
    proteins = sorted(g.proteins)
    n_pairs = len(drugs) * len(proteins)
    wanted = ratio * g.n_edges
    if n_pairs - g.n_edges < wanted:
        raise SamplingError(
            f"need {wanted} negatives but only {n_pairs - g.n_edges} non-edges exist"
        )
    d_index = {d: i for i, d in enumerate(drugs)}
    p_index = {p: i for i, p in enumerate(proteins)}
    mask = np.ones(n_pairs, dtype=bool)
    for d, p in g.edges:
        mask[d_index[d] * len(proteins) + p_index[p]] = False
    non_edges = np.flatnonzero(mask)
    rng = generator(seed, "sample-random")
    picked = rng.choice(non_edges, size=wanted, replace=False)
    negatives = sorted((drugs[i // len(proteins)], proteins[i % len(proteins)]) for i in picked)
    records = tuple(
        NegativeRecord(d, p, "train", float("nan"), "random", None) for d, p in negatives
    )
    return SampledDataset(
        positives=frozenset(g.edges),
        train_negatives=frozenset(negatives),
        holdout_negatives=frozenset(),
        records=records,
    )


def sample_rmsd_window(g: DTIGraph, rmsd: SimilarityMatrix, cfg: WindowConfig) -> SampledDataset:
    """Window-based negative sampling anchored on each positive pair.

    Candidate proteins are binned by RMSD to the anchor protein:
    [0, discard) dropped, [discard, holdout) all become held-out negatives,
    [holdout, t] yields one training negative per anchor drawn uniformly.
    When the train window is empty the bound is raised 1 A at a time up to
    the cap; failing that a uniform random non-edge for the drug is used and
    the record is tagged fallback-random.  NA distances never qualify.
    """
    proteins = sorted(g.proteins)
    missing = [p for p in proteins if p not in rmsd.index]
    if missing:
        raise MissingNodeError("protein", missing[0], "the rmsd matrix")
    positives = frozenset(g.edges)
    anchors = sorted(positives)
    holdout: dict = {}
    train: dict = {}
    taken = {d: set() for d, _ in anchors}  # negatives already used per drug

    # holdout pass first so train picks can avoid every holdout pair
    for d, t_star in anchors:
        for p in proteins:
            if p == t_star or (d, p) in positives:
                continue
            r = rmsd.at(t_star, p)
            if math.isnan(r):
                continue
            if cfg.discard_max <= r < cfg.holdout_max and (d, p) not in holdout:
                holdout[(d, p)] = NegativeRecord(d, p, "holdout", r, "rmsd-window", (d, t_star))
    for d, p in holdout:
        taken[d].add(p)

    n_fallback = 0
    for d, t_star in anchors:
        for pick in range(cfg.ratio):
            rng = generator(cfg.seed, "rmsd-window", d, t_star, pick)
            record = _draw_train_negative(
                d, t_star, proteins, positives, taken[d], rmsd, cfg, rng
            )
            if record is None:
                raise SamplingError(f"no negative candidates remain for drug {d}")
            if record.provenance.startswith("fallback"):
                n_fallback += 1
            train[record.edge] = record
            taken[d].add(record.protein_id)

    records = tuple(
        sorted(list(train.values()) + list(holdout.values()), key=lambda r: r.edge)
    )
    return SampledDataset(
        positives=positives,
        train_negatives=frozenset(train),
        holdout_negatives=frozenset(holdout),
        records=records,
        n_fallback=n_fallback,
    )


def _draw_train_negative(d, t_star, proteins, positives, taken, rmsd, cfg, rng):
    def in_window(p, upper):
        if p == t_star or (d, p) in positives or p in taken:
            return False
        r = rmsd.at(t_star, p)
        return not math.isnan(r) and cfg.holdout_max <= r <= upper

    upper = cfg.train_max
    candidates = [p for p in proteins if in_window(p, upper)]
    provenance = "rmsd-window"
    while not candidates and upper < TRAIN_MAX_CAP:
        upper = min(upper + 1.0, TRAIN_MAX_CAP)
        candidates = [p for p in proteins if in_window(p, upper)]
        provenance = "fallback-extended"
    if candidates:
        p = candidates[rng.integers(len(candidates))]
        return NegativeRecord(d, p, "train", rmsd.at(t_star, p), provenance, (d, t_star))
    anything = [p for p in proteins if p != t_star and (d, p) not in positives and p not in taken]
    if not anything:
        return None
    p = anything[rng.integers(len(anything))]
    return NegativeRecord(d, p, "train", rmsd.at(t_star, p), "fallback-random", (d, t_star))


@dataclass
class SweepRow:
    sampler: str           # "rmsd-window" or "random"
    t: float | None
    n_runs: int
    auroc_mean: float
    auroc_std: float

    @property
    def formatted(self) -> str:
        return format_aggregate(self.auroc_mean, self.auroc_std)


def window_sweep(
    g: DTIGraph,
    rmsd: SimilarityMatrix,
    runner,
    t_values=tuple(range(6, 21)),
    repeats: int = 5,
    seed: int = 0,
) -> list:
    """AUC table over train-window upper bounds plus a random baseline row.

    ``runner(dataset, seed) -> auroc`` is supplied by the pipeline (it embeds,
    trains, and scores).  One row per t with mean and std over repeats; the
    trend over t is reported as data, never asserted.
    """
    rows = []
    for t in t_values:
        scores = []
        for rep in range(repeats):
            cfg = WindowConfig(train_max=float(t), seed=generator(seed, "sweep", t, rep).integers(2 ** 32))
            ds = sample_rmsd_window(g, rmsd, cfg)
            scores.append(runner(ds, generator(seed, "sweep-run", t, rep).integers(2 ** 32)))
        mean, std = aggregate(scores)
        rows.append(SweepRow("rmsd-window", float(t), repeats, mean, std))
    scores = []
    for rep in range(repeats):
        ds = sample_random(g, 1, generator(seed, "sweep", "random", rep).integers(2 ** 32))
        scores.append(runner(ds, generator(seed, "sweep-run", "random", rep).integers(2 ** 32)))
    mean, std = aggregate(scores)
    rows.append(SweepRow("random", None, repeats, mean, std))
    return rows


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sampler", "t", "n_runs", "auroc_mean", "auroc_std", "auroc"])
        for r in rows:
            writer.writerow([
                r.sampler,
                "" if r.t is None else repr(r.t),
                r.n_runs,
                repr(r.auroc_mean),
                repr(r.auroc_std),
                r.formatted,
            ])


def score_holdout(predictor, pairs, seeds) -> list:
    """Per-pair prediction table over independently seeded runs.

    ``predictor(seed) -> {(drug, protein): probability}`` must cover every
    requested pair.  Rows come back sorted by mean probability descending,
    each as (drug, protein, per-run probabilities, mean, std).
    """
    pairs = sorted(pairs)
    runs = [predictor(s) for s in seeds]
    rows = []
    for d, p in pairs:
        probs = [float(run[(d, p)]) for run in runs]
        mean, std = aggregate(probs)
        rows.append((d, p, probs, mean, std))
    rows.sort(key=lambda r: (-r[3], r[0], r[1]))
    return rows


def write_holdout_csv(rows, path) -> None:
    n_runs = len(rows[0][2]) if rows else 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["drug_id", "protein_id"]
            + [f"run_{i}" for i in range(n_runs)]
            + ["mean", "std"]
        )
        for d, p, probs, mean, std in rows:
            writer.writerow([d, p] + [repr(x) for x in probs] + [repr(mean), repr(std)])
