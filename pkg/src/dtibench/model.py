"""Shallow two-layer classifier over concatenated node embeddings.

Forward pass: sigmoid(relu(X W1 + b1) W2 + b2).  Losses work on logits with
the log-sum-exp trick so extreme scores cannot overflow.  The grid search
enumerates the full hyperparameter lattice and ranks configurations by
validation AUROC, never test.
"""

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, SingleClassError, ValidationError
from .metrics import auroc
from .rng import derive_seed, generator

ARCH_HIDDEN = {1: 32, 2: 64, 3: 128, 4: 256}
EPOCH_LATTICE = (2, 5, 10, 50)
BATCH_FRACTIONS = (1.0 / 16, 1.0 / 64)
LOSSES = ("bce", "focal")
DIM_LATTICE = (25, 90, 180, 256, 480, 720)


@dataclass(frozen=True)
class SNNParams:
    dim_in: int
    arch_type: int = 1
    loss: str = "bce"
    epochs: int = 10
    batch_fraction: float = 1.0 / 16
    lr: float = 1e-3
    weight: float = 1.0          # per-sample rescaling weight w_k
    gamma: float = 2.0
    alpha: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.dim_in < 1:
            raise ValidationError(f"dim_in must be >= 1, got {self.dim_in}")
        if self.arch_type not in ARCH_HIDDEN:
            raise ValidationError(f"arch_type must be one of {sorted(ARCH_HIDDEN)}")
        if self.loss not in LOSSES:
            raise ValidationError(f"loss must be one of {LOSSES}, got {self.loss!r}")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if not 0 < self.batch_fraction <= 1:
            raise ValidationError(f"batch_fraction must be in (0, 1], got {self.batch_fraction}")
        if self.lr <= 0 or self.weight <= 0:
            raise ValidationError("lr and weight must be positive")

    @property
    def hidden(self) -> int:
        return ARCH_HIDDEN[self.arch_type]

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SNNModel:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: float

    def __post_init__(self):
        self.W1 = np.asarray(self.W1, dtype=float)
        self.b1 = np.asarray(self.b1, dtype=float)
        self.W2 = np.asarray(self.W2, dtype=float)
        self.b2 = float(self.b2)
        n = self.W1.shape[1]
        if self.b1.shape != (n,) or self.W2.shape != (n,):
            raise ValidationError("inconsistent model shapes")
        for arr in (self.W1, self.b1, self.W2):
            if not np.isfinite(arr).all():
                raise ValidationError("model weights must be finite")

    @property
    def n_params(self) -> int:
        return self.W1.size + self.b1.size + self.W2.size + 1

    def to_json(self) -> str:
        obj = {
            "dim_in": self.W1.shape[0],
            "hidden": self.W1.shape[1],
            "W1": [repr(float(x)) for x in self.W1.ravel()],
            "b1": [repr(float(x)) for x in self.b1],
            "W2": [repr(float(x)) for x in self.W2],
            "b2": repr(self.b2),
        }
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    def write_json(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, text: str) -> "SNNModel":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}") from None
        dim_in, hidden = int(obj["dim_in"]), int(obj["hidden"])
        return cls(
            W1=np.array([float(x) for x in obj["W1"]]).reshape(dim_in, hidden),
            b1=np.array([float(x) for x in obj["b1"]]),
            W2=np.array([float(x) for x in obj["W2"]]),
            b2=float(obj["b2"]),
        )

    @classmethod
    def read_json(cls, path) -> "SNNModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def init_model(params: SNNParams) -> SNNModel:
    rng = generator(params.seed, "snn-init")
    n = params.hidden
    scale1 = np.sqrt(2.0 / params.dim_in)
    scale2 = np.sqrt(2.0 / n)
    return SNNModel(
        W1=rng.normal(0.0, scale1, size=(params.dim_in, n)),
        b1=np.zeros(n),
        W2=rng.normal(0.0, scale2, size=n),
        b2=0.0,
    )


def forward(model: SNNModel, X: np.ndarray):
    """Probabilities and logits for a feature batch."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.W1.shape[0]:
        raise ValidationError(
            f"expected feature width {model.W1.shape[0]}, got {X.shape}"
        )
    hidden = np.maximum(X @ model.W1 + model.b1, 0.0)
    logits = hidden @ model.W2 + model.b2
    # |logit| beyond 60 saturates a double anyway; clipping avoids exp overflow
    probs = 1.0 / (1.0 + np.exp(-np.clip(logits, -60.0, 60.0)))
    return probs, logits


def _stable_nll(z: np.ndarray, y: np.ndarray) -> np.ndarray:
    # -[y log h + (1-y) log(1-h)] computed from logits
    return np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))


def bce_loss(logits, labels, weight: float = 1.0) -> float:
    """Weighted binary cross-entropy from logits, mean over the batch."""
    z = np.asarray(logits, dtype=float)
    y = np.asarray(labels, dtype=float)
    return float((weight * _stable_nll(z, y)).mean())


def bce_grad(logits, labels, weight: float = 1.0) -> np.ndarray:
    """d(mean loss)/d logits."""
    z = np.asarray(logits, dtype=float)
    y = np.asarray(labels, dtype=float)
    sig = 1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0)))
    return weight * (sig - y) / len(z)


def focal_loss(logits, labels, gamma: float = 2.0, alpha: float = 0.25) -> float:
    """Mean focal loss: alpha_t (1 - p_t)^gamma times the log loss.

    alpha weights the positive class only; gamma=0 with alpha=1 reduces to
    plain binary cross-entropy.
    """
    z = np.asarray(logits, dtype=float)
    y = np.asarray(labels, dtype=float)
    sign = 2.0 * y - 1.0
    nll = _stable_nll(z, y)                       # = -log p_t
    p_t = 1.0 / (1.0 + np.exp(-np.clip(sign * z, -60.0, 60.0)))
    alpha_t = np.where(y == 1, alpha, 1.0)
    return float((alpha_t * (1.0 - p_t) ** gamma * nll).mean())


def focal_grad(logits, labels, gamma: float = 2.0, alpha: float = 0.25) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    y = np.asarray(labels, dtype=float)
    sign = 2.0 * y - 1.0
    nll = _stable_nll(z, y)
    p_t = 1.0 / (1.0 + np.exp(-np.clip(sign * z, -60.0, 60.0)))
    one_minus = 1.0 - p_t
    alpha_t = np.where(y == 1, alpha, 1.0)
    # dL/dp_t = alpha_t [ -gamma (1-p_t)^(g-1) nll - (1-p_t)^g / p_t ]
    if gamma == 0:
        d_pt = alpha_t * (-1.0 / p_t)
    else:
        d_pt = alpha_t * (-gamma * one_minus ** (gamma - 1.0) * nll - one_minus ** gamma / p_t)
    dpt_dz = sign * p_t * one_minus
    return d_pt * dpt_dz / len(z)


def _loss_and_grad(params: SNNParams, logits, labels):
    if params.loss == "bce":
        return (
            bce_loss(logits, labels, params.weight),
            bce_grad(logits, labels, params.weight),
        )
    return (
        focal_loss(logits, labels, params.gamma, params.alpha),
        focal_grad(logits, labels, params.gamma, params.alpha),
    )


class _Adam:
    def __init__(self, shapes, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, tensors, grads):
        self.t += 1
        out = []
        for i, (x, g) in enumerate(zip(tensors, grads)):
            self.m[i] = self.b1 * self.m[i] + (1 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1 - self.b2) * g * g
            m_hat = self.m[i] / (1 - self.b1 ** self.t)
            v_hat = self.v[i] / (1 - self.b2 ** self.t)
            out.append(x - self.lr * m_hat / (np.sqrt(v_hat) + self.eps))
        return out


@dataclass
class TraceRow:
    epoch: int
    mean_loss: float
    val_auroc: float | None


def train(X, y, params: SNNParams, X_val=None, y_val=None):
    """Mini-batch Adam training; returns the model and a per-epoch trace."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise ValidationError(f"feature/label shape mismatch: {X.shape} vs {y.shape}")
    if len(np.unique(y)) < 2:
        raise SingleClassError("training set must contain both classes")
    if X.shape[1] != params.dim_in:
        raise ValidationError(f"params.dim_in={params.dim_in} but features are {X.shape[1]} wide")
    model = init_model(params)
    batch = max(1, int(round(len(X) * params.batch_fraction)))
    adam = _Adam(
        [model.W1.shape, model.b1.shape, model.W2.shape, ()],
        lr=params.lr,
    )
    trace = []
    for epoch in range(params.epochs):
        rng = generator(params.seed, "snn-epoch", epoch)
        order = rng.permutation(len(X))
        losses = []
        for at in range(0, len(order), batch):
            rows = order[at: at + batch]
            Xb, yb = X[rows], y[rows]
            z1 = Xb @ model.W1 + model.b1
            a = np.maximum(z1, 0.0)
            logits = a @ model.W2 + model.b2
            loss, dz = _loss_and_grad(params, logits, yb)
            losses.append(loss)
            dW2 = a.T @ dz
            db2 = dz.sum()
            da = np.outer(dz, model.W2)
            dz1 = da * (z1 > 0)
            dW1 = Xb.T @ dz1
            db1 = dz1.sum(axis=0)
            model.W1, model.b1, model.W2, b2 = adam.step(
                [model.W1, model.b1, model.W2, np.asarray(model.b2)],
                [dW1, db1, dW2, np.asarray(db2)],
            )
            model.b2 = float(b2)
        val = None
        if X_val is not None and y_val is not None and len(np.unique(y_val)) == 2:
            val = auroc(forward(model, X_val)[0], y_val)
        trace.append(TraceRow(epoch=epoch, mean_loss=float(np.mean(losses)), val_auroc=val))
    return model, trace


def write_trace_csv(trace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss", "val_auroc"])
        for row in trace:
            writer.writerow([
                row.epoch,
                repr(row.mean_loss),
                "" if row.val_auroc is None else repr(row.val_auroc),
            ])


@dataclass(frozen=True)
class GridRow:
    dim: int
    arch_type: int
    hidden: int
    epochs: int
    loss: str
    batch_fraction: float
    n_params: int
    val_mean: float
    val_std: float
    test_mean: float
    test_std: float


GRID_CSV_FIELDS = [
    "dim", "arch_type", "hidden", "epochs", "loss", "batch_fraction",
    "n_params", "val_auroc_mean", "val_auroc_std", "test_auroc_mean",
    "test_auroc_std",
]


def _grid_cell(task):
    (dim, arch, epochs, loss, bf, seeds, Xtr, ytr, Xva, yva, Xte, yte, lr, gamma, alpha) = task
    vals, tests = [], []
    n_params = None
    for s in seeds:
        params = SNNParams(
            dim_in=Xtr.shape[1], arch_type=arch, loss=loss, epochs=epochs,
            batch_fraction=bf, lr=lr, gamma=gamma, alpha=alpha, seed=s,
        )
        model, _ = train(Xtr, ytr, params)
        vals.append(auroc(forward(model, Xva)[0], yva))
        tests.append(auroc(forward(model, Xte)[0], yte))
        n_params = model.n_params
    val_mean = float(np.mean(vals))
    val_std = 0.0 if len(vals) == 1 else float(np.std(vals, ddof=1))
    test_mean = float(np.mean(tests))
    test_std = 0.0 if len(tests) == 1 else float(np.std(tests, ddof=1))
    return GridRow(
        dim=dim, arch_type=arch, hidden=ARCH_HIDDEN[arch], epochs=epochs,
        loss=loss, batch_fraction=bf, n_params=n_params,
        val_mean=val_mean, val_std=val_std, test_mean=test_mean, test_std=test_std,
    )


def grid_search(
    folds_by_dim: dict,
    seed: int = 0,
    repeats: int = 1,
    dims=None,
    arch_types=tuple(sorted(ARCH_HIDDEN)),
    epoch_lattice=EPOCH_LATTICE,
    losses=LOSSES,
    batch_fractions=BATCH_FRACTIONS,
    lr: float = 1e-3,
    gamma: float = 2.0,
    alpha: float = 0.25,
    jobs: int = 1,
):
    """Full-factorial sweep over the hyperparameter lattice.

    ``folds_by_dim`` maps embedding dimension -> (Xtr, ytr, Xva, yva, Xte,
    yte).  Returns rows in ranked order: validation AUROC descending, ties
    broken by fewer parameters, then canonical config order.  Test AUROC is
    carried per row but never used for ranking.
    """
    if dims is None:
        dims = sorted(folds_by_dim)
    missing = [d for d in dims if d not in folds_by_dim]
    if missing:
        raise ValidationError(f"no folds supplied for dims {missing}")
    tasks = []
    for dim in dims:
        Xtr, ytr, Xva, yva, Xte, yte = folds_by_dim[dim]
        for arch in arch_types:
            for epochs in epoch_lattice:
                for loss in losses:
                    for bf in batch_fractions:
                        seeds = [
                            derive_seed(seed, "grid", dim, arch, epochs, loss, repr(bf), r)
                            for r in range(repeats)
                        ]
                        tasks.append((dim, arch, epochs, loss, bf, seeds,
                                      Xtr, ytr, Xva, yva, Xte, yte, lr, gamma, alpha))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_grid_cell, tasks, chunksize=4))
    else:
        rows = [_grid_cell(t) for t in tasks]
    order = {id(r): i for i, r in enumerate(rows)}
    rows.sort(key=lambda r: (-r.val_mean, r.n_params, order[id(r)]))
    return rows


def write_grid_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GRID_CSV_FIELDS)
        for r in rows:
            writer.writerow([
                r.dim, r.arch_type, r.hidden, r.epochs, r.loss,
                repr(r.batch_fraction), r.n_params,
                repr(r.val_mean), repr(r.val_std),
                repr(r.test_mean), repr(r.test_std),
            ])
