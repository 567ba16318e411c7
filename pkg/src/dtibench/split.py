"""Constrained train/val/test fold generation over interaction graphs.

Three modes: Sp partitions edges freely, Sd keeps drug sets disjoint between
train+val and test, St does the same for proteins.  Node-constrained modes
pack nodes by degree so realized edge fractions track the requested ratios.
The validation fold is carved out of the train side afterwards, so the node
constraint binds train+val against test as one unit.
"""

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import NotEnoughEdgesError, OverlapViolationError, ParseError, ValidationError
from .graph import DTIGraph, Edge
from .rng import generator

RATIO_TOL = 1e-9


class SplitMode(Enum):
    SP = "Sp"
    SD = "Sd"
    ST = "St"


@dataclass(frozen=True)
class Fold:
    train: frozenset
    val: frozenset
    test: frozenset

    def as_mapping(self) -> dict:
        return {
            "train": [list(e) for e in sorted(self.train)],
            "val": [list(e) for e in sorted(self.val)],
            "test": [list(e) for e in sorted(self.test)],
        }

    @classmethod
    def from_mapping(cls, m: dict) -> "Fold":
        return cls(
            train=frozenset(tuple(e) for e in m["train"]),
            val=frozenset(tuple(e) for e in m["val"]),
            test=frozenset(tuple(e) for e in m["test"]),
        )


@dataclass(frozen=True)
class FoldPlan:
    mode: SplitMode
    seed: int
    ratios: tuple
    folds: tuple

    def as_mapping(self) -> dict:
        return {
            "mode": self.mode.value,
            "seed": self.seed,
            "ratios": list(self.ratios),
            "folds": [f.as_mapping() for f in self.folds],
        }

    def to_json(self) -> str:
        # canonical form: sorted keys, no whitespace, sorted edge arrays
        return json.dumps(self.as_mapping(), sort_keys=True, separators=(",", ":"))

    def write_json(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def from_mapping(cls, m: dict) -> "FoldPlan":
        try:
            mode = SplitMode(m["mode"])
            folds = tuple(Fold.from_mapping(f) for f in m["folds"])
            ratios = tuple(float(r) for r in m["ratios"])
            seed = int(m["seed"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed plan: {exc}") from None
        return cls(mode=mode, seed=seed, ratios=ratios, folds=folds)

    @classmethod
    def read_json(cls, path) -> "FoldPlan":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}", path=str(path)) from None
        return cls.from_mapping(raw)


def _check_ratios(ratios) -> tuple:
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3:
        raise ValidationError(f"expected (train, val, test) ratios, got {len(ratios)} values")
    if any(r < 0 for r in ratios):
        raise ValidationError(f"negative ratio in {ratios}")
    if abs(sum(ratios) - 1.0) > RATIO_TOL:
        raise ValidationError(f"ratios {ratios} do not sum to 1")
    return ratios


def largest_remainder(n: int, ratios) -> tuple:
    """Integer apportionment of n items by ratio.

    Floors the quotas, hands leftovers to the largest fractional parts, then
    guarantees every positive-ratio bin at least one item by taking from the
    largest bin.  Raises when n cannot cover the positive-ratio bins.
    """
    quotas = [n * r for r in ratios]
    counts = [int(q) for q in quotas]
    leftover = n - sum(counts)
    order = sorted(range(len(ratios)), key=lambda i: (counts[i] - quotas[i], i))
    for i in range(leftover):
        counts[order[i % len(order)]] += 1
    needy = [i for i, r in enumerate(ratios) if r > 0]
    if n < len(needy):
        raise NotEnoughEdgesError(
            f"{n} edges cannot populate {len(needy)} folds"
        )
    for i in needy:
        while counts[i] == 0:
            donor = max(range(len(counts)), key=lambda j: (counts[j], -j))
            if counts[donor] <= 1:
                raise NotEnoughEdgesError(f"cannot guarantee an edge for fold {i}")
            counts[donor] -= 1
            counts[i] += 1
    return tuple(counts)


def _pack_nodes(degrees: dict, targets, rng) -> list:
    """Greedy bin packing of nodes by degree, descending, into the bin with
    the largest remaining edge deficit.  Returns one node set per target."""
    nodes = sorted(d for d, k in degrees.items() if k > 0)
    shuffled = [nodes[i] for i in rng.permutation(len(nodes))]
    shuffled.sort(key=lambda nd: -degrees[nd])  # stable: seeded order within equal degree
    bins = [set() for _ in targets]
    loads = [0] * len(targets)
    for nd in shuffled:
        best = max(
            range(len(targets)),
            key=lambda b: (targets[b] - loads[b], targets[b], -b),
        )
        bins[best].add(nd)
        loads[best] += degrees[nd]
    return bins


def _carve_val(edges, train_ratio: float, val_ratio: float, rng):
    """Split an edge list into (train, val) honoring relative ratios."""
    if val_ratio <= 0:
        return list(edges), []
    total = train_ratio + val_ratio
    counts = largest_remainder(len(edges), (train_ratio / total, val_ratio / total))
    order = sorted(edges)
    perm = rng.permutation(len(order))
    picked = [order[i] for i in perm]
    return picked[: counts[0]], picked[counts[0]:]


def _neet_check(fold: Fold, ratios) -> None:
    for name, part, r in (("train", fold.train, ratios[0]),
                          ("val", fold.val, ratios[1]),
                          ("test", fold.test, ratios[2])):
        if r > 0 and not part:
            raise NotEnoughEdgesError(f"{name} fold received zero positive edges")


def split(g: DTIGraph, mode: SplitMode, ratios, seed: int) -> FoldPlan:
    """Single train/val/test fold under the given mode.

    Sp permutes edges and cuts by ratio.  Sd/St first pack drug/protein nodes
    into a train+val bin and a test bin weighted by degree, assign each edge
    to its node's bin, then carve val from the train+val edges at random.
    Any fold with a positive ratio that ends up empty raises the
    not-enough-edges error.
    """
    ratios = _check_ratios(ratios)
    mode = SplitMode(mode)
    edges = g.sorted_edges()
    if not edges:
        raise NotEnoughEdgesError("graph has no positive edges")
    counts = largest_remainder(len(edges), ratios)

    if mode is SplitMode.SP:
        rng = generator(seed, "split", mode.value, "edges")
        perm = rng.permutation(len(edges))
        shuffled = [edges[i] for i in perm]
        train = shuffled[: counts[0]]
        val = shuffled[counts[0]: counts[0] + counts[1]]
        test = shuffled[counts[0] + counts[1]:]
    else:
        degrees = g.drug_degrees() if mode is SplitMode.SD else g.protein_degrees()
        node_of = (lambda e: e[0]) if mode is SplitMode.SD else (lambda e: e[1])
        rng = generator(seed, "split", mode.value, "nodes")
        bins = _pack_nodes(degrees, (counts[0] + counts[1], counts[2]), rng)
        trainval = [e for e in edges if node_of(e) in bins[0]]
        test = [e for e in edges if node_of(e) in bins[1]]
        carve_rng = generator(seed, "split", mode.value, "val-carve")
        train, val = _carve_val(trainval, ratios[0], ratios[1], carve_rng)

    fold = Fold(train=frozenset(train), val=frozenset(val), test=frozenset(test))
    _neet_check(fold, ratios)
    return FoldPlan(mode=mode, seed=seed, ratios=ratios, folds=(fold,))


def tvt_baseline_split(g: DTIGraph, seed: int) -> FoldPlan:
    """Random edge split at the 0.75/0.15/0.10 baseline ratios."""
    return split(g, SplitMode.SP, (0.75, 0.15, 0.10), seed)


def kfold(
    g: DTIGraph,
    mode: SplitMode,
    k: int = 10,
    repeats: int = 5,
    seed: int = 0,
    val_fraction: float = 0.0,
) -> list:
    """Repeated k-fold schedule: one plan per repeat, each with k folds.

    Within a repeat the k test sets partition the edge set (Sp) or are
    induced by a partition of the drug/protein nodes (Sd/St), so every
    edge/node lands in exactly one test fold.  ``val_fraction`` optionally
    carves validation edges out of each fold's train side.
    """
    mode = SplitMode(mode)
    if k < 2:
        raise ValidationError(f"k must be >= 2, got {k}")
    if repeats < 1:
        raise ValidationError(f"repeats must be >= 1, got {repeats}")
    if not 0 <= val_fraction < 1:
        raise ValidationError(f"val_fraction must be in [0, 1), got {val_fraction}")
    edges = g.sorted_edges()
    if not edges:
        raise NotEnoughEdgesError("graph has no positive edges")
    test_r = 1.0 / k
    ratios = ((1 - test_r) * (1 - val_fraction), (1 - test_r) * val_fraction, test_r)

    plans = []
    for rep in range(repeats):
        targets = largest_remainder(len(edges), [1.0 / k] * k)
        if mode is SplitMode.SP:
            rng = generator(seed, "kfold", mode.value, rep, "edges")
            perm = rng.permutation(len(edges))
            shuffled = [edges[i] for i in perm]
            chunks = []
            at = 0
            for c in targets:
                chunks.append(shuffled[at: at + c])
                at += c
        else:
            degrees = g.drug_degrees() if mode is SplitMode.SD else g.protein_degrees()
            node_of = (lambda e: e[0]) if mode is SplitMode.SD else (lambda e: e[1])
            n_active = sum(1 for v in degrees.values() if v > 0)
            if n_active < k:
                raise NotEnoughEdgesError(
                    f"{mode.value} with {n_active} populated nodes cannot fill {k} folds"
                )
            rng = generator(seed, "kfold", mode.value, rep, "nodes")
            bins = _pack_nodes(degrees, targets, rng)
            chunks = [[e for e in edges if node_of(e) in b] for b in bins]
        folds = []
        for i, test in enumerate(chunks):
            if not test:
                raise NotEnoughEdgesError(f"test fold {i} of repeat {rep} is empty")
            rest = [e for j, c in enumerate(chunks) if j != i for e in c]
            carve_rng = generator(seed, "kfold", mode.value, rep, i, "val-carve")
            train, val = _carve_val(rest, ratios[0], ratios[1], carve_rng)
            fold = Fold(train=frozenset(train), val=frozenset(val), test=frozenset(test))
            _neet_check(fold, ratios)
            folds.append(fold)
        plans.append(FoldPlan(mode=mode, seed=seed, ratios=ratios, folds=tuple(folds)))
    return plans


@dataclass
class ScPairReport:
    shared_drugs: tuple
    shared_proteins: tuple
    removed_edges: tuple
    test_graph: DTIGraph

    @property
    def overlap(self) -> tuple:
        return (len(self.shared_drugs), len(self.shared_proteins))


def sc_pair(train_g: DTIGraph, test_g: DTIGraph, strict: bool = True) -> ScPairReport:
    """Cross-dataset pairing check: train and test must share no nodes.

    Strict mode raises on any overlap.  Permissive mode drops overlapping
    nodes (and their edges) from the test graph and reports the removals;
    a test graph left with no edges raises the not-enough-edges error.
    """
    shared_d = tuple(sorted(set(train_g.drugs) & set(test_g.drugs)))
    shared_p = tuple(sorted(set(train_g.proteins) & set(test_g.proteins)))
    if strict:
        if shared_d or shared_p:
            raise OverlapViolationError(
                f"shared nodes between train and test: {len(shared_d)} drugs, "
                f"{len(shared_p)} proteins"
            )
        return ScPairReport(shared_d, shared_p, (), test_g)
    drop_d, drop_p = set(shared_d), set(shared_p)
    removed = tuple(sorted(e for e in test_g.edges if e[0] in drop_d or e[1] in drop_p))
    kept_edges = frozenset(test_g.edges) - set(removed)
    if not kept_edges:
        raise NotEnoughEdgesError("test graph empty after removing shared nodes")
    pruned = DTIGraph(
        drugs=tuple(d for d in test_g.drugs if d not in drop_d),
        proteins=tuple(p for p in test_g.proteins if p not in drop_p),
        edges=kept_edges,
        name=test_g.name,
    )
    return ScPairReport(shared_d, shared_p, removed, pruned)


def verify_plan(g: DTIGraph, plan: FoldPlan) -> list:
    """Recheck a plan against its graph from scratch; returns violations.

    Checks per fold: sets pairwise disjoint, edges all belong to the graph,
    the three sets cover every edge exactly once, and the mode's node
    disjointness (train+val vs test).  For multi-fold plans the test sets
    must also partition the edges (Sp) or the populated drug/protein nodes
    (Sd/St) across folds.
    """
    problems = []
    graph_edges = frozenset(g.edges)
    for i, fold in enumerate(plan.folds):
        parts = {"train": fold.train, "val": fold.val, "test": fold.test}
        for name, part in parts.items():
            stray = part - graph_edges
            if stray:
                problems.append(f"fold {i}: {name} has {len(stray)} edges not in the graph")
        if fold.train & fold.val or fold.train & fold.test or fold.val & fold.test:
            problems.append(f"fold {i}: train/val/test overlap")
        union = fold.train | fold.val | fold.test
        if union != graph_edges:
            missing = len(graph_edges - union)
            extra = len(union - graph_edges)
            problems.append(f"fold {i}: cover mismatch ({missing} missing, {extra} extra)")
        if plan.mode is SplitMode.SD:
            tv = {e[0] for e in fold.train | fold.val}
            te = {e[0] for e in fold.test}
            both = tv & te
            if both:
                names = ", ".join(sorted(both)[:5])
                problems.append(
                    f"fold {i}: {len(both)} drugs shared between train+val and test ({names})"
                )
        elif plan.mode is SplitMode.ST:
            tv = {e[1] for e in fold.train | fold.val}
            te = {e[1] for e in fold.test}
            both = tv & te
            if both:
                names = ", ".join(sorted(both)[:5])
                problems.append(
                    f"fold {i}: {len(both)} proteins shared between train+val and test ({names})"
                )
    if len(plan.folds) >= 2:
        if plan.mode is SplitMode.SP:
            seen = {}
            for i, fold in enumerate(plan.folds):
                for e in fold.test:
                    seen.setdefault(e, []).append(i)
            dup = sum(1 for v in seen.values() if len(v) > 1)
            if dup:
                problems.append(f"{dup} edges appear in multiple test folds")
            if set(seen) != graph_edges:
                problems.append("test folds do not cover the edge set")
        else:
            side = 0 if plan.mode is SplitMode.SD else 1
            populated = {e[side] for e in graph_edges}
            seen = {}
            for i, fold in enumerate(plan.folds):
                for nd in {e[side] for e in fold.test}:
                    seen.setdefault(nd, []).append(i)
            dup = sum(1 for v in seen.values() if len(v) > 1)
            if dup:
                problems.append(f"{dup} nodes appear in multiple test folds")
            if set(seen) != populated:
                problems.append("test folds do not cover all populated nodes")
    return problems
