"""End-to-end experiment protocols built from the lower-level modules.

The leakage matrix deliberately reproduces a flawed evaluation regime on its
diagonal: embeddings are computed on the full graph before the 70/30 edge
split, so test edges have already shaped the representation.  Off-diagonal
cells train on one dataset and score a different one (its own embeddings),
where no such shortcut exists.
"""

import logging

import numpy as np

from .embed import EmbeddingTable, Node2VecParams, embed_graph, pair_features
from .errors import ValidationError
from .graph import DTIGraph
from .metrics import LeakageMatrix, auroc
from .model import SNNParams, forward, train
from .rng import derive_seed, generator
from .sampling import SampledDataset, sample_random, window_sweep

log = logging.getLogger(__name__)


def balanced_xy(g: DTIGraph, emb: EmbeddingTable, seed: int):
    """Features and labels for positives plus an equal random negative set."""
    ds = sample_random(g, ratio=1, seed=seed)
    rows = ds.labeled_training_edges()
    X = pair_features(emb, [e for e, _ in rows])
    y = np.array([label for _, label in rows], dtype=float)
    return X, y


def dataset_xy(ds: SampledDataset, emb: EmbeddingTable):
    rows = ds.labeled_training_edges()
    X = pair_features(emb, [e for e, _ in rows])
    y = np.array([label for _, label in rows], dtype=float)
    return X, y


def _diagonal_cell(g, emb, snn: SNNParams, seed: int) -> float:
    """70/30 within-dataset AUROC with full-graph embeddings (leaky by design)."""
    X, y = balanced_xy(g, emb, derive_seed(seed, "diag-sample", g.name))
    rng = generator(seed, "diag-split", g.name)
    order = rng.permutation(len(y))
    cut = int(round(0.7 * len(y)))
    tr, te = order[:cut], order[cut:]
    params = SNNParams(**{**snn.as_dict(), "dim_in": X.shape[1],
                          "seed": derive_seed(seed, "diag-train", g.name)})
    model, _ = train(X[tr], y[tr], params)
    return auroc(forward(model, X[te])[0], y[te])


def _cross_cell(train_g, train_emb, test_g, test_emb, snn: SNNParams, seed: int) -> float:
    """Train on one dataset, score another with its own embeddings."""
    Xa, ya = balanced_xy(train_g, train_emb, derive_seed(seed, "cross-sample", train_g.name))
    Xb, yb = balanced_xy(test_g, test_emb, derive_seed(seed, "cross-sample", test_g.name))
    params = SNNParams(**{**snn.as_dict(), "dim_in": Xa.shape[1],
                          "seed": derive_seed(seed, "cross-train", train_g.name, test_g.name)})
    model, _ = train(Xa, ya, params)
    return auroc(forward(model, Xb)[0], yb)


def leakage_matrix(
    graphs,
    n2v: Node2VecParams,
    snn: SNNParams,
    seed: int = 0,
    repeats: int = 1,
    embeddings: dict | None = None,
) -> LeakageMatrix:
    """Train-on-row, test-on-column AUROC grid, averaged over repeats.

    Embeddings are built once per (dataset, repeat) on the full graph.  Pass
    ``embeddings`` keyed by (name, repeat) to reuse precomputed tables.
    """
    graphs = list(graphs)
    if len(graphs) < 2:
        raise ValidationError("leakage matrix needs at least 2 datasets")
    names = [g.name for g in graphs]
    if len(set(names)) != len(names):
        raise ValidationError("datasets must have distinct names")
    if embeddings is None:
        embeddings = {}
        for g in graphs:
            for rep in range(repeats):
                params = Node2VecParams(**{**n2v.as_dict(),
                                           "seed": derive_seed(seed, "embed", g.name, rep)})
                log.info("embedding %s (repeat %d)", g.name, rep)
                embeddings[(g.name, rep)] = embed_graph(g, params)
    values = np.zeros((len(graphs), len(graphs)))
    for i, ga in enumerate(graphs):
        for j, gb in enumerate(graphs):
            cells = []
            for rep in range(repeats):
                cell_seed = derive_seed(seed, "cell", ga.name, gb.name, rep)
                if i == j:
                    cells.append(_diagonal_cell(ga, embeddings[(ga.name, rep)], snn, cell_seed))
                else:
                    cells.append(_cross_cell(
                        ga, embeddings[(ga.name, rep)],
                        gb, embeddings[(gb.name, rep)],
                        snn, cell_seed,
                    ))
            values[i, j] = float(np.mean(cells))
    return LeakageMatrix(labels=names, values=values)


def make_sweep_runner(g: DTIGraph, emb: EmbeddingTable, snn: SNNParams):
    """Runner for the window sweep: 70/30 split, train, test AUROC.

    The embedding table is fixed across windows so rows differ only in how
    their training negatives were chosen.
    """
    def runner(ds: SampledDataset, seed: int) -> float:
        X, y = dataset_xy(ds, emb)
        rng = generator(seed, "sweep-split")
        order = rng.permutation(len(y))
        cut = int(round(0.7 * len(y)))
        tr, te = order[:cut], order[cut:]
        params = SNNParams(**{**snn.as_dict(), "dim_in": X.shape[1],
                              "seed": derive_seed(seed, "sweep-train")})
        model, _ = train(X[tr], y[tr], params)
        return auroc(forward(model, X[te])[0], y[te])

    return runner


def run_window_sweep(
    g: DTIGraph,
    rmsd,
    n2v: Node2VecParams,
    snn: SNNParams,
    t_values=tuple(range(6, 21)),
    repeats: int = 5,
    seed: int = 0,
):
    """Embed once, then sweep the train-window bound plus a random baseline."""
    emb = embed_graph(g, Node2VecParams(**{**n2v.as_dict(), "seed": derive_seed(seed, "embed", g.name)}))
    runner = make_sweep_runner(g, emb, snn)
    return window_sweep(g, rmsd, runner, t_values=t_values, repeats=repeats, seed=seed)


def grid_folds_for_dims(
    g: DTIGraph,
    dims,
    n2v: Node2VecParams,
    seed: int = 0,
    ratios=(0.75, 0.15, 0.10),
) -> dict:
    """Per-dimension (Xtr, ytr, Xva, yva, Xte, yte) from one shared labeled set.

    The positive/negative edge sets and their fold assignment are fixed once
    so every dimension sees the same split; only the features change.
    """
    ds = sample_random(g, ratio=1, seed=derive_seed(seed, "grid-sample", g.name))
    rows = ds.labeled_training_edges()
    labels = {e: lab for e, lab in rows}
    edges = [e for e, _ in rows]
    rng = generator(seed, "grid-folds", g.name)
    order = rng.permutation(len(edges))
    n = len(edges)
    n_tr = int(round(ratios[0] * n))
    n_va = int(round(ratios[1] * n))
    parts = {
        "train": [edges[i] for i in order[:n_tr]],
        "val": [edges[i] for i in order[n_tr: n_tr + n_va]],
        "test": [edges[i] for i in order[n_tr + n_va:]],
    }
    for name, part in parts.items():
        ys = {labels[e] for e in part}
        if ys != {0, 1}:
            raise ValidationError(f"grid {name} fold lacks both classes; use a larger dataset")
    folds = {}
    for dim in dims:
        params = Node2VecParams(**{**n2v.as_dict(), "dim": dim,
                                   "seed": derive_seed(seed, "embed", g.name, dim)})
        log.info("embedding %s at d=%d", g.name, dim)
        emb = embed_graph(g, params)
        folds[dim] = (
            pair_features(emb, parts["train"]),
            np.array([labels[e] for e in parts["train"]], dtype=float),
            pair_features(emb, parts["val"]),
            np.array([labels[e] for e in parts["val"]], dtype=float),
            pair_features(emb, parts["test"]),
            np.array([labels[e] for e in parts["test"]], dtype=float),
        )
    return folds
