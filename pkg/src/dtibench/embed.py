"""Graph embeddings: second-order biased random walks + skip-gram training.

Walk tokens are namespaced node keys ("drug:<id>", "protein:<id>") so the
two id spaces cannot collide.  Training is plain numpy, batched, and
deterministic under a fixed seed; scatter-adds accumulate gradients so batch
order inside an update cannot change the result.
"""

import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import MissingNodeError, ParseError, ValidationError
from .graph import DTIGraph
from .rng import generator

log = logging.getLogger(__name__)

DRUG_PREFIX = "drug"
PROTEIN_PREFIX = "protein"
# small batches keep summed updates close to per-sample SGD; large ones let
# frequent nodes accumulate huge same-direction steps and diverge
_BATCH = 256


def drug_key(drug_id: str) -> str:
    return f"{DRUG_PREFIX}:{drug_id}"


def protein_key(protein_id: str) -> str:
    return f"{PROTEIN_PREFIX}:{protein_id}"


def parse_node_key(key: str) -> tuple[str, str]:
    kind, sep, rest = key.partition(":")
    if not sep or kind not in (DRUG_PREFIX, PROTEIN_PREFIX):
        raise ValidationError(f"not a namespaced node key: {key!r}")
    return kind, rest


@dataclass(frozen=True)
class Node2VecParams:
    dim: int = 128
    p: float = 1.0
    q: float = 1.0
    walks_per_node: int = 10
    walk_length: int = 80
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"dim must be >= 1, got {self.dim}")
        if self.p <= 0 or self.q <= 0:
            raise ValidationError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if self.walk_length < 2:
            raise ValidationError(f"walk_length must be >= 2, got {self.walk_length}")
        for name in ("walks_per_node", "window", "negatives", "epochs"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.lr <= 0:
            raise ValidationError(f"lr must be positive, got {self.lr}")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class EmbeddingTable:
    ids: list[str]
    vectors: np.ndarray
    params: dict
    isolated: frozenset = frozenset()

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        if self.vectors.shape[0] != len(self.ids):
            raise ValidationError("one vector per id required")
        if self.vectors.size and not np.isfinite(self.vectors).all():
            raise ValidationError("embedding vectors must be finite")
        self._index = {k: i for i, k in enumerate(self.ids)}

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def vector(self, key: str) -> np.ndarray:
        if key not in self._index:
            raise MissingNodeError("node", key, "the embedding table")
        return self.vectors[self._index[key]]

    def save_text(self, path) -> None:
        """word2vec text format: "n d" header, one node per line."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self.ids)} {self.dim}\n")
            for key, vec in zip(self.ids, self.vectors):
                fh.write(key + " " + " ".join(repr(float(x)) for x in vec) + "\n")

    @classmethod
    def load_text(cls, path, params: dict | None = None) -> "EmbeddingTable":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            head = fh.readline().split()
            if len(head) != 2:
                raise ParseError("expected 'n d' header", path, 1)
            n, d = int(head[0]), int(head[1])
            ids, rows = [], []
            for lineno, line in enumerate(fh, start=2):
                cols = line.rstrip("\n").split(" ")
                if len(cols) != d + 1:
                    raise ParseError(f"expected {d + 1} columns", path, lineno)
                ids.append(cols[0])
                rows.append([float(x) for x in cols[1:]])
        if len(ids) != n:
            raise ParseError(f"header claims {n} rows, found {len(ids)}", path)
        vectors = np.array(rows, dtype=float) if rows else np.zeros((0, d))
        isolated = frozenset(k for k, v in zip(ids, vectors) if not v.any())
        return cls(ids=ids, vectors=vectors, params=params or {}, isolated=isolated)


def _adjacency(g: DTIGraph) -> dict:
    adj = {drug_key(d): [] for d in g.drugs}
    adj.update({protein_key(t): [] for t in g.proteins})
    for d, t in g.edges:
        adj[drug_key(d)].append(protein_key(t))
        adj[protein_key(t)].append(drug_key(d))
    return {k: sorted(v) for k, v in adj.items()}


def transition_weights(adj: dict, prev: str | None, cur: str, p: float, q: float):
    """Normalized second-order step distribution out of ``cur``.

    Unnormalized weight per neighbor: 1/p to step back to ``prev``, 1 to a
    neighbor of ``prev``, 1/q otherwise.  First step (no prev) is uniform.
    """
    neighbors = adj[cur]
    if not neighbors:
        return neighbors, np.array([])
    if prev is None:
        probs = np.full(len(neighbors), 1.0 / len(neighbors))
        return neighbors, probs
    prev_nbrs = set(adj[prev])
    weights = np.array([
        1.0 / p if nbr == prev else (1.0 if nbr in prev_nbrs else 1.0 / q)
        for nbr in neighbors
    ])
    return neighbors, weights / weights.sum()


def generate_walks(g: DTIGraph, params: Node2VecParams) -> list:
    """Biased walk corpus: walks_per_node walks from every connected node."""
    if g.n_nodes == 0:
        raise ValidationError("cannot walk an empty graph")
    adj = _adjacency(g)
    starts = sorted(k for k, v in adj.items() if v)
    walks = []
    for start in starts:
        for w in range(params.walks_per_node):
            rng = generator(params.seed, "walk", start, w)
            walk = [start]
            prev = None
            while len(walk) < params.walk_length:
                cur = walk[-1]
                neighbors, probs = transition_weights(adj, prev, cur, params.p, params.q)
                if not neighbors:
                    break
                nxt = neighbors[rng.choice(len(neighbors), p=probs)]
                walk.append(nxt)
                prev = cur
            walks.append(walk)
    return walks


def _stable_softplus(x: np.ndarray) -> np.ndarray:
    # log(1 + e^x) without overflow
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def sgns_loss_and_grad(w_in, w_out, centers, contexts, negatives):
    """Skip-gram negative-sampling loss and full gradients for one batch.

    Loss per pair: -log sigmoid(u.v) - sum_k log sigmoid(-u.v_k), summed
    over the batch so a batched update moves the tables exactly as far per
    pair as per-sample SGD would.  Returns (loss, grad_in, grad_out) with
    grads shaped like the weight tables.
    """
    centers = np.asarray(centers)
    contexts = np.asarray(contexts)
    negatives = np.asarray(negatives)
    u = w_in[centers]                       # (B, d)
    v_pos = w_out[contexts]                 # (B, d)
    v_neg = w_out[negatives]                # (B, k, d)
    pos_dot = (u * v_pos).sum(axis=1)       # (B,)
    neg_dot = np.einsum("bd,bkd->bk", u, v_neg)
    loss = float((_stable_softplus(-pos_dot) + _stable_softplus(neg_dot).sum(axis=1)).sum())
    sig_pos = 0.5 * (1.0 + np.tanh(0.5 * pos_dot))
    sig_neg = 0.5 * (1.0 + np.tanh(0.5 * neg_dot))
    d_pos = sig_pos - 1.0                   # dL/d pos_dot
    d_neg = sig_neg                         # dL/d neg_dot
    grad_u = d_pos[:, None] * v_pos + np.einsum("bk,bkd->bd", d_neg, v_neg)
    grad_vpos = d_pos[:, None] * u
    grad_vneg = d_neg[:, :, None] * u[:, None, :]
    grad_in = np.zeros_like(w_in)
    grad_out = np.zeros_like(w_out)
    np.add.at(grad_in, centers, grad_u)
    np.add.at(grad_out, contexts, grad_vpos)
    np.add.at(grad_out, negatives.reshape(-1), grad_vneg.reshape(-1, w_out.shape[1]))
    return loss, grad_in, grad_out


def _window_pairs(walks, vocab_index, window):
    """Directed (center, context) index pairs under a fixed window."""
    centers, contexts = [], []
    for walk in walks:
        idx = [vocab_index[t] for t in walk]
        for i in range(len(idx)):
            lo = max(0, i - window)
            hi = min(len(idx), i + window + 1)
            for j in range(lo, hi):
                if j != i:
                    centers.append(idx[i])
                    contexts.append(idx[j])
    return np.array(centers, dtype=np.int64), np.array(contexts, dtype=np.int64)


def train_sgns(walks, params: Node2VecParams) -> EmbeddingTable:
    """Skip-gram with negative sampling over a walk corpus.

    Noise distribution is unigram frequency^0.75.  Learning rate decays
    linearly to 1e-4 of the start value over all scheduled updates.
    """
    if not walks or not any(walks):
        raise ValidationError("empty walk corpus")
    vocab = sorted({t for walk in walks for t in walk})
    vocab_index = {t: i for i, t in enumerate(vocab)}
    V, d = len(vocab), params.dim

    counts = np.zeros(V)
    for walk in walks:
        for t in walk:
            counts[vocab_index[t]] += 1
    noise = counts ** 0.75
    noise /= noise.sum()

    init_rng = generator(params.seed, "sgns", "init")
    w_in = (init_rng.random((V, d)) - 0.5) / d
    w_out = np.zeros((V, d))

    centers, contexts = _window_pairs(walks, vocab_index, params.window)
    n_pairs = len(centers)
    total_updates = params.epochs * n_pairs
    done = 0
    for epoch in range(params.epochs):
        rng = generator(params.seed, "sgns", "epoch", epoch)
        order = rng.permutation(n_pairs)
        for at in range(0, n_pairs, _BATCH):
            batch = order[at: at + _BATCH]
            negs = rng.choice(V, size=(len(batch), params.negatives), p=noise)
            lr = params.lr * max(1.0 - done / total_updates, 1e-4)
            _, grad_in, grad_out = sgns_loss_and_grad(
                w_in, w_out, centers[batch], contexts[batch], negs
            )
            w_in -= lr * grad_in
            w_out -= lr * grad_out
            done += len(batch)
    return EmbeddingTable(ids=vocab, vectors=w_in, params=params.as_dict())


def embed_graph(g: DTIGraph, params: Node2VecParams) -> EmbeddingTable:
    """Full pipeline: walks, training, zero vectors for isolated nodes."""
    walks = generate_walks(g, params)
    all_keys = sorted([drug_key(x) for x in g.drugs] + [protein_key(x) for x in g.proteins])
    if not walks:
        log.warning("graph %s has no edges; all embeddings are zero", g.name)
        vectors = np.zeros((len(all_keys), params.dim))
        return EmbeddingTable(all_keys, vectors, params.as_dict(), frozenset(all_keys))
    trained = train_sgns(walks, params)
    isolated = frozenset(k for k in all_keys if k not in trained)
    if isolated:
        log.info("%d isolated nodes get zero embeddings in %s", len(isolated), g.name)
    vectors = np.zeros((len(all_keys), params.dim))
    for i, key in enumerate(all_keys):
        if key in trained:
            vectors[i] = trained.vector(key)
    return EmbeddingTable(all_keys, vectors, params.as_dict(), isolated)


def pair_features(emb: EmbeddingTable, edges) -> np.ndarray:
    """Feature rows: drug vector then protein vector, length 2d each."""
    edges = list(edges)
    X = np.zeros((len(edges), 2 * emb.dim))
    for i, (d, t) in enumerate(edges):
        X[i, : emb.dim] = emb.vector(drug_key(d))
        X[i, emb.dim:] = emb.vector(protein_key(t))
    return X
