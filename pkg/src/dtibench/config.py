"""Run configuration: one JSON document drives a whole pipeline run.

Validation collects every problem before raising so a bad config is fixed
in one pass.  The seed is mandatory; nothing in the toolkit falls back to
wall-clock randomness.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from .embed import Node2VecParams
from .errors import ParseError, ValidationError
from .model import SNNParams
from .sampling import WindowConfig

DEFAULT_GRID_DIMS = (25, 90, 180, 256, 480, 720)


@dataclass
class RunConfig:
    seed: int
    output_dir: str
    edges: str | None = None
    fingerprints: str | None = None
    structures_dir: str | None = None
    rmsd_matrix: str | None = None
    split_mode: str = "Sp"
    ratios: tuple = (0.75, 0.15, 0.10)
    k: int = 10
    repeats: int = 5
    sampler: str = "random"
    window: dict = field(default_factory=dict)
    node2vec: dict = field(default_factory=dict)
    snn: dict = field(default_factory=dict)
    grid_dims: tuple = DEFAULT_GRID_DIMS
    jobs: int = 1
    deterministic: bool = True

    def node2vec_params(self, **overrides) -> Node2VecParams:
        merged = {"seed": self.seed, **self.node2vec, **overrides}
        return Node2VecParams(**merged)

    def snn_params(self, dim_in: int, **overrides) -> SNNParams:
        merged = {"seed": self.seed, **self.snn, **overrides}
        merged["dim_in"] = dim_in
        return SNNParams(**merged)

    def window_config(self, **overrides) -> WindowConfig:
        merged = {"train_max": 6.0, "seed": self.seed, **self.window, **overrides}
        return WindowConfig(**merged)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "edges": self.edges,
            "fingerprints": self.fingerprints,
            "structures_dir": self.structures_dir,
            "rmsd_matrix": self.rmsd_matrix,
            "split_mode": self.split_mode,
            "ratios": list(self.ratios),
            "k": self.k,
            "repeats": self.repeats,
            "sampler": self.sampler,
            "window": dict(self.window),
            "node2vec": dict(self.node2vec),
            "snn": dict(self.snn),
            "grid_dims": list(self.grid_dims),
            "jobs": self.jobs,
            "deterministic": self.deterministic,
        }


KNOWN_KEYS = set(RunConfig(seed=0, output_dir=".").as_dict())


def validate_config(raw: dict) -> RunConfig:
    """Build a RunConfig, reporting every problem at once."""
    problems = []
    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        problems.append(f"unknown config keys: {', '.join(unknown)}")
    if "seed" not in raw or raw.get("seed") is None:
        problems.append("seed is required (no wall-clock default)")
    elif not isinstance(raw["seed"], int):
        problems.append(f"seed must be an integer, got {raw['seed']!r}")
    if not raw.get("output_dir"):
        problems.append("output_dir is required")
    for key in ("edges", "fingerprints", "rmsd_matrix"):
        value = raw.get(key)
        if value is not None and not Path(value).is_file():
            problems.append(f"{key}: no such file: {value}")
    sdir = raw.get("structures_dir")
    if sdir is not None and not Path(sdir).is_dir():
        problems.append(f"structures_dir: no such directory: {sdir}")
    mode = raw.get("split_mode", "Sp")
    if mode not in ("Sp", "Sd", "St"):
        problems.append(f"split_mode must be Sp, Sd or St, got {mode!r}")
    ratios = raw.get("ratios", (0.75, 0.15, 0.10))
    try:
        ratios = tuple(float(r) for r in ratios)
        if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1) > 1e-9:
            problems.append(f"ratios must be 3 non-negative values summing to 1, got {ratios}")
    except (TypeError, ValueError):
        problems.append(f"ratios not numeric: {ratios!r}")
        ratios = (0.75, 0.15, 0.10)
    k = raw.get("k", 10)
    if not isinstance(k, int) or k < 2:
        problems.append(f"k must be an integer >= 2, got {k!r}")
    repeats = raw.get("repeats", 5)
    if not isinstance(repeats, int) or repeats < 1:
        problems.append(f"repeats must be an integer >= 1, got {repeats!r}")
    sampler = raw.get("sampler", "random")
    if sampler not in ("random", "rmsd-window"):
        problems.append(f"sampler must be 'random' or 'rmsd-window', got {sampler!r}")
    if sampler == "rmsd-window" and not (raw.get("rmsd_matrix") or raw.get("structures_dir")):
        problems.append("rmsd-window sampler needs rmsd_matrix or structures_dir")
    jobs = raw.get("jobs", 1)
    if not isinstance(jobs, int) or jobs < 1:
        problems.append(f"jobs must be an integer >= 1, got {jobs!r}")
    for key in ("node2vec", "window", "snn"):
        section = raw.get(key, {})
        if not isinstance(section, dict):
            problems.append(f"{key} must be an object, got {type(section).__name__}")
    if problems:
        raise ValidationError(problems)
    cfg = RunConfig(
        seed=raw["seed"],
        output_dir=raw["output_dir"],
        edges=raw.get("edges"),
        fingerprints=raw.get("fingerprints"),
        structures_dir=raw.get("structures_dir"),
        rmsd_matrix=raw.get("rmsd_matrix"),
        split_mode=mode,
        ratios=ratios,
        k=k,
        repeats=repeats,
        sampler=sampler,
        window=dict(raw.get("window", {})),
        node2vec=dict(raw.get("node2vec", {})),
        snn=dict(raw.get("snn", {})),
        grid_dims=tuple(raw.get("grid_dims", DEFAULT_GRID_DIMS)),
        jobs=jobs,
        deterministic=bool(raw.get("deterministic", True)),
    )
    return cfg


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Read a JSON config file; CLI flag overrides win over file keys."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}", path=str(path)) from None
    if not isinstance(raw, dict):
        raise ValidationError(f"config root must be an object, got {type(raw).__name__}")
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(raw)
