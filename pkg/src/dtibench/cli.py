"""Command-line surface: one subcommand per pipeline operation.

Every command writes its artifacts under --out together with a run.json
provenance record.  Failures surface as machine-readable JSON on stderr
({"error": <kind>, ...}) with a nonzero exit code.  Figures accompany the
delimited outputs unless --no-figures is passed; all figure rendering lives
in the report module, never in the computation code.
"""

import csv
import datetime
import functools
import json
import sys
from pathlib import Path

import click

from . import __version__
from .chem import SimilarityMatrix, histogram, load_fingerprints, pairwise_tanimoto, write_histogram_csv
from .config import load_config
from .embed import EmbeddingTable, Node2VecParams, embed_graph
from .errors import DTIBenchError, ValidationError
from .graph import GraphStats, NodeKind, compute_stats, degree_histogram, load_edge_list
from .metrics import auprc, auroc, format_aggregate
from .model import (
    SNNParams, forward, grid_search, train, write_grid_csv, write_trace_csv,
)
from .pipeline import dataset_xy, grid_folds_for_dims, leakage_matrix, run_window_sweep
from .registry import RegistryManifest, fetch_dataset
from .rng import derive_seed, generator
from .sampling import (
    SampledDataset, WindowConfig, sample_random, sample_rmsd_window, write_sweep_csv,
)
from .split import FoldPlan, SplitMode, kfold, split, verify_plan
from .structure import parse_pdb_ca, pairwise_rmsd, quality_filter


def _fail(err: DTIBenchError) -> None:
    click.echo(json.dumps(err.payload(), sort_keys=True), err=True)
    sys.exit(1)


def _cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DTIBenchError as err:
            _fail(err)
    return wrapper


def _outdir(out) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_run_record(out: Path, command: str, seed, params: dict) -> None:
    record = {
        "command": command,
        "argv": sys.argv[1:],
        "seed": seed,
        "params": params,
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    (out / "run.json").write_text(
        json.dumps(record, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _load_graph(edges, swap=False, name=None):
    graph, report = load_edge_list(edges, swap=swap, name=name)
    if report.n_duplicates:
        click.echo(f"note: collapsed {report.n_duplicates} duplicate rows", err=True)
    return graph


def _flag_given(ctx, name) -> bool:
    return ctx.get_parameter_source(name) is click.core.ParameterSource.COMMANDLINE


def _merged(ctx, name, flag_value, cfg_value):
    """Config supplies a default; an explicit flag wins over it."""
    if cfg_value is None or _flag_given(ctx, name):
        return flag_value
    return cfg_value


def _require_seed(seed) -> int:
    if seed is None:
        raise ValidationError("a seed is required (flag --seed or config key 'seed')")
    return int(seed)


def _parse_range(text: str) -> tuple[int, ...]:
    """Accept '6..20' (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(text)
    except ValueError:
        raise ValidationError(f"bad range {text!r}, expected 'LO..HI'") from None
    if lo > hi:
        raise ValidationError(f"bad range {text!r}: lower bound exceeds upper")
    return tuple(range(lo, hi + 1))


@click.group()
@click.version_option(version=__version__, prog_name="dtibench")
def main():
    """Benchmarking toolkit for drug-target interaction networks."""


@main.command()
@click.option("--edges", "edges_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False), help="Edge-list TSV (repeatable).")
@click.option("--swap", is_flag=True, help="Columns are protein<TAB>drug.")
@click.option("--exclude-isolated", is_flag=True,
              help="Leave isolated nodes out of the component count.")
@click.option("--out", default="stats-out", show_default=True, help="Output directory.")
@click.option("--no-figures", is_flag=True, help="Skip figure rendering.")
@_cli_errors
def stats(edges_paths, swap, exclude_isolated, out, no_figures):
    """Network statistics table (one row per dataset)."""
    out = _outdir(out)
    rows = []
    graphs = []
    for path in edges_paths:
        g = _load_graph(path, swap=swap)
        graphs.append(g)
        s = compute_stats(g, include_isolated_components=not exclude_isolated)
        rows.append({"dataset": g.name, **s.as_row()})
    fields = ["dataset"] + [label for label, _ in GraphStats.CSV_FIELDS]
    with open(out / "stats.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    if not no_figures:
        from . import report
        for g in graphs:
            for side in (NodeKind.DRUG, NodeKind.PROTEIN):
                hist = degree_histogram(g, side)
                report.render_degree_histogram(
                    hist, out / f"degree_{g.name}_{side.value}.png",
                    side.value, f"{g.name}: {side.value} degree distribution",
                )
    _write_run_record(out, "stats", None, {"edges": list(edges_paths), "swap": swap})
    click.echo(str(out / "stats.csv"))


@main.command(name="split")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON run config; explicit flags override its keys.")
@click.option("--edges", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--mode", type=click.Choice(["Sp", "Sd", "St"]), default="Sp", show_default=True)
@click.option("--ratios", default="0.75,0.15,0.10", show_default=True,
              help="train,val,test fractions for a single split.")
@click.option("--k", type=int, default=None, help="Fold count; enables repeated k-fold mode.")
@click.option("--repeats", type=int, default=5, show_default=True)
@click.option("--val-fraction", type=float, default=0.0, show_default=True,
              help="Fraction of each k-fold train side carved out as validation.")
@click.option("--seed", type=int, default=None, help="Required here or in the config.")
@click.option("--out", default="split-out", show_default=True)
@click.pass_context
@_cli_errors
def split_cmd(ctx, config_path, edges, mode, ratios, k, repeats, val_fraction, seed, out):
    """Generate fold plans and verify them."""
    try:
        ratio_tuple = tuple(float(x) for x in ratios.split(","))
    except ValueError:
        raise ValidationError(f"bad --ratios value: {ratios!r}") from None
    if config_path:
        cfg = load_config(config_path)
        edges = _merged(ctx, "edges", edges, cfg.edges)
        mode = _merged(ctx, "mode", mode, cfg.split_mode)
        ratio_tuple = _merged(ctx, "ratios", ratio_tuple, cfg.ratios)
        k = cfg.k if k is None else k
        repeats = _merged(ctx, "repeats", repeats, cfg.repeats)
        seed = _merged(ctx, "seed", seed, cfg.seed)
        out = _merged(ctx, "out", out, cfg.output_dir)
    if edges is None:
        raise ValidationError("an edge list is required (flag --edges or config key 'edges')")
    seed = _require_seed(seed)
    out = _outdir(out)
    g = _load_graph(edges)
    mode = SplitMode(mode)
    written = []
    plans = []
    if k is None:
        plan = split(g, mode, ratio_tuple, seed)
        plan.write_json(out / "plan.json")
        written.append(out / "plan.json")
        plans.append(plan)
    else:
        for rep, plan in enumerate(kfold(g, mode, k=k, repeats=repeats, seed=seed,
                                         val_fraction=val_fraction)):
            plans.append(plan)
            path = out / f"plan_rep{rep}.json"
            plan.write_json(path)
            written.append(path)
            for i, fold in enumerate(plan.folds):
                single = FoldPlan(mode=plan.mode, seed=plan.seed,
                                  ratios=plan.ratios, folds=(fold,))
                fold_path = out / f"fold_r{rep}_f{i}.json"
                single.write_json(fold_path)
                written.append(fold_path)
    violations = []
    for plan in plans:
        violations.extend(verify_plan(g, plan))
    (out / "verify.json").write_text(
        json.dumps({"plans": len(plans), "ok": not violations, "violations": violations},
                   sort_keys=True) + "\n",
        encoding="utf-8",
    )
    _write_run_record(out, "split", seed, {
        "edges": edges, "mode": mode.value, "ratios": list(ratio_tuple), "k": k,
        "repeats": repeats, "val_fraction": val_fraction,
    })
    if violations:
        raise ValidationError(violations)
    n_fold_files = sum(1 for p in written if p.name.startswith("fold_")) or len(written)
    click.echo(f"{n_fold_files} fold plan files, verification pass")


@main.command(name="verify-plan")
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--plan", "plan_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False))
@_cli_errors
def verify_plan_cmd(edges, plan_paths):
    """Check fold plan files against a graph."""
    g = _load_graph(edges)
    all_ok = True
    for path in plan_paths:
        plan = FoldPlan.read_json(path)
        violations = verify_plan(g, plan)
        click.echo(json.dumps(
            {"plan": str(path), "ok": not violations, "violations": violations},
            sort_keys=True,
        ))
        all_ok = all_ok and not violations
    if not all_ok:
        sys.exit(1)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON run config; explicit flags override its keys.")
@click.option("--edges", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--sampler", type=click.Choice(["random", "rmsd-window"]),
              default="random", show_default=True)
@click.option("--rmsd", "rmsd_path", type=click.Path(exists=True, dir_okay=False),
              help="RMSD matrix TSV (required for rmsd-window).")
@click.option("--t", "train_max", type=float, default=6.0, show_default=True,
              help="Train-window upper bound in angstrom.")
@click.option("--ratio", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="Required here or in the config.")
@click.option("--out", default="sample-out", show_default=True)
@click.pass_context
@_cli_errors
def sample(ctx, config_path, edges, sampler, rmsd_path, train_max, ratio, seed, out):
    """Draw negative edges (uniform random or RMSD-windowed)."""
    window_overrides = {}
    if config_path:
        cfg = load_config(config_path)
        edges = _merged(ctx, "edges", edges, cfg.edges)
        sampler = _merged(ctx, "sampler", sampler, cfg.sampler)
        rmsd_path = _merged(ctx, "rmsd_path", rmsd_path, cfg.rmsd_matrix)
        seed = _merged(ctx, "seed", seed, cfg.seed)
        out = _merged(ctx, "out", out, cfg.output_dir)
        window_overrides = dict(cfg.window)
    if edges is None:
        raise ValidationError("an edge list is required (flag --edges or config key 'edges')")
    seed = _require_seed(seed)
    if _flag_given(ctx, "train_max") or "train_max" not in window_overrides:
        window_overrides["train_max"] = train_max
    if _flag_given(ctx, "ratio") or "ratio" not in window_overrides:
        window_overrides["ratio"] = ratio
    window_overrides["seed"] = seed
    out = _outdir(out)
    g = _load_graph(edges)
    if sampler == "random":
        ds = sample_random(g, ratio=int(window_overrides["ratio"]), seed=seed)
    else:
        if not rmsd_path:
            raise ValidationError("--rmsd is required for the rmsd-window sampler")
        matrix = SimilarityMatrix.read_tsv(rmsd_path, kind="rmsd")
        try:
            cfg_w = WindowConfig(**window_overrides)
        except TypeError as exc:
            raise ValidationError(f"bad window settings: {exc}") from None
        ds = sample_rmsd_window(g, matrix, cfg_w)
    ds.write_tsv(out / "sample.tsv")
    summary = {
        "positives": len(ds.positives),
        "train_negatives": len(ds.train_negatives),
        "holdout_negatives": len(ds.holdout_negatives),
        "fallbacks": ds.n_fallback,
    }
    (out / "summary.json").write_text(json.dumps(summary, sort_keys=True) + "\n",
                                      encoding="utf-8")
    _write_run_record(out, "sample", seed, {
        "edges": edges, "sampler": sampler, "rmsd": rmsd_path,
        "window": {key: val for key, val in sorted(window_overrides.items())},
    })
    click.echo(str(out / "sample.tsv"))


@main.command()
@click.option("--structures", "structures_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--pattern", default="*.pdb", show_default=True)
@click.option("--quality-filter/--no-quality-filter", "use_filter", default=True,
              show_default=True, help="Keep only structures passing quality thresholds.")
@click.option("--cache", type=click.Path(dir_okay=False),
              help="Reuse/write the matrix at this TSV path.")
@click.option("--out", default="rmsd-out", show_default=True)
@click.option("--no-figures", is_flag=True)
@_cli_errors
def rmsd(structures_dir, pattern, use_filter, cache, out, no_figures):
    """Pairwise refined C-alpha RMSD over a directory of PDB files."""
    out = _outdir(out)
    paths = sorted(Path(structures_dir).glob(pattern))
    if not paths:
        raise ValidationError(f"no files matching {pattern!r} under {structures_dir}")
    structures = [parse_pdb_ca(p) for p in paths]
    rejected = []
    if use_filter:
        structures, report_q = quality_filter(structures)
        rejected = report_q.rejected
        if not structures:
            raise ValidationError("quality filter rejected every structure")
    matrix = pairwise_rmsd(structures, cache_path=cache)
    matrix.write_tsv(out / "rmsd.tsv")
    (out / "quality.json").write_text(
        json.dumps({"kept": [s.protein_id for s in structures],
                    "rejected": [{"id": i, "reason": r} for i, r in rejected]},
                   sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    if not no_figures:
        from . import report
        values = matrix.offdiagonal_values()
        if values.size:
            bins = histogram(values, bin_width=1.0, hi=float(values.max()) + 1.0)
            report.render_histogram(bins, out / "rmsd_hist.png", "RMSD (A)",
                                    "pairwise RMSD distribution")
    _write_run_record(out, "rmsd", None, {
        "structures": structures_dir, "pattern": pattern,
        "quality_filter": use_filter, "cache": cache,
    })
    click.echo(str(out / "rmsd.tsv"))


@main.command()
@click.option("--fingerprints", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bin-width", type=float, default=0.05, show_default=True)
@click.option("--out", default="tanimoto-out", show_default=True)
@click.option("--no-figures", is_flag=True)
@_cli_errors
def tanimoto(fingerprints, bin_width, out, no_figures):
    """Pairwise Tanimoto similarity over drug fingerprints."""
    out = _outdir(out)
    fps = load_fingerprints(fingerprints)
    matrix = pairwise_tanimoto(fps)
    matrix.write_tsv(out / "tanimoto.tsv")
    bins = histogram(matrix.offdiagonal_values(), bin_width=bin_width, hi=1.0)
    write_histogram_csv(bins, out / "tanimoto_hist.csv")
    if not no_figures:
        from . import report
        report.render_histogram(bins, out / "tanimoto_hist.png", "Tanimoto similarity",
                                "pairwise similarity distribution")
    _write_run_record(out, "tanimoto", None, {
        "fingerprints": fingerprints, "bin_width": bin_width,
    })
    click.echo(str(out / "tanimoto.tsv"))


@main.command()
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--dim", type=int, default=128, show_default=True)
@click.option("--p", type=float, default=1.0, show_default=True)
@click.option("--q", type=float, default=1.0, show_default=True)
@click.option("--walks", type=int, default=10, show_default=True)
@click.option("--length", type=int, default=80, show_default=True)
@click.option("--window", type=int, default=10, show_default=True)
@click.option("--negatives", type=int, default=5, show_default=True)
@click.option("--epochs", type=int, default=5, show_default=True)
@click.option("--lr", type=float, default=0.025, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", default="embed-out", show_default=True)
@_cli_errors
def embed(edges, dim, p, q, walks, length, window, negatives, epochs, lr, seed, out):
    """Train node embeddings on the interaction graph."""
    out = _outdir(out)
    g = _load_graph(edges)
    params = Node2VecParams(dim=dim, p=p, q=q, walks_per_node=walks, walk_length=length,
                            window=window, negatives=negatives, epochs=epochs, lr=lr,
                            seed=seed)
    table = embed_graph(g, params)
    table.save_text(out / "embeddings.txt")
    _write_run_record(out, "embed", seed, params.as_dict())
    click.echo(str(out / "embeddings.txt"))


@main.command(name="train")
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sample", "sample_path", type=click.Path(exists=True, dir_okay=False),
              help="Sampled dataset TSV; defaults to fresh 1:1 random negatives.")
@click.option("--arch", type=click.IntRange(1, 4), default=1, show_default=True)
@click.option("--loss", type=click.Choice(["bce", "focal"]), default="bce", show_default=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--batch-fraction", type=float, default=1.0 / 16, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", default="train-out", show_default=True)
@click.option("--no-figures", is_flag=True)
@_cli_errors
def train_cmd(edges, embeddings, sample_path, arch, loss, epochs, batch_fraction,
              lr, seed, out, no_figures):
    """Train the two-layer classifier on embedded edge features."""
    out = _outdir(out)
    g = _load_graph(edges)
    emb = EmbeddingTable.load_text(embeddings)
    if sample_path:
        ds = SampledDataset.read_tsv(sample_path)
    else:
        ds = sample_random(g, ratio=1, seed=derive_seed(seed, "train-sample"))
    X, y = dataset_xy(ds, emb)
    rng = generator(seed, "train-folds")
    order = rng.permutation(len(y))
    n_tr = int(round(0.75 * len(y)))
    n_va = int(round(0.15 * len(y)))
    tr = order[:n_tr]
    va = order[n_tr: n_tr + n_va]
    te = order[n_tr + n_va:]
    params = SNNParams(dim_in=X.shape[1], arch_type=arch, loss=loss, epochs=epochs,
                       batch_fraction=batch_fraction, lr=lr, seed=seed)
    model, trace = train(X[tr], y[tr], params, X_val=X[va], y_val=y[va])
    model.write_json(out / "model.json")
    write_trace_csv(trace, out / "trace.csv")
    scores = forward(model, X[te])[0]
    result = {
        "test_auroc": auroc(scores, y[te]),
        "test_auprc": auprc(scores, y[te]),
        "n_test": int(len(te)),
    }
    (out / "metrics.json").write_text(json.dumps(result, sort_keys=True) + "\n",
                                      encoding="utf-8")
    if not no_figures:
        from . import report
        report.render_trace(trace, out / "trace.png")
    _write_run_record(out, "train", seed, {**params.as_dict(), "edges": edges,
                                           "embeddings": embeddings, "sample": sample_path})
    click.echo(json.dumps(result, sort_keys=True))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON run config; explicit flags override its keys.")
@click.option("--edges", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--dims", default="25,90,180,256,480,720", show_default=True)
@click.option("--repeats", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="Required here or in the config.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--deterministic/--no-deterministic", default=True, show_default=True,
              help="Deterministic mode forces jobs=1 for training.")
@click.option("--out", default="grid-out", show_default=True)
@click.pass_context
@_cli_errors
def gridsearch(ctx, config_path, edges, dims, repeats, seed, jobs, deterministic, out):
    """Full-lattice hyperparameter sweep ranked by validation AUROC."""
    try:
        dim_list = [int(x) for x in dims.split(",")]
    except ValueError:
        raise ValidationError(f"bad --dims value: {dims!r}") from None
    if config_path:
        cfg = load_config(config_path)
        edges = _merged(ctx, "edges", edges, cfg.edges)
        dim_list = _merged(ctx, "dims", dim_list, list(cfg.grid_dims))
        seed = _merged(ctx, "seed", seed, cfg.seed)
        jobs = _merged(ctx, "jobs", jobs, cfg.jobs)
        deterministic = _merged(ctx, "deterministic", deterministic, cfg.deterministic)
        out = _merged(ctx, "out", out, cfg.output_dir)
    if edges is None:
        raise ValidationError("an edge list is required (flag --edges or config key 'edges')")
    seed = _require_seed(seed)
    out = _outdir(out)
    g = _load_graph(edges)
    if deterministic:
        jobs = 1
    folds = grid_folds_for_dims(g, dim_list, Node2VecParams(), seed=seed)
    rows = grid_search(folds, seed=seed, repeats=repeats, dims=dim_list, jobs=jobs)
    write_grid_csv(rows, out / "grid.csv")
    best = rows[0]
    winner = {
        "dim": best.dim, "arch_type": best.arch_type, "hidden": best.hidden,
        "epochs": best.epochs, "loss": best.loss, "batch_fraction": best.batch_fraction,
        "val_auroc": format_aggregate(best.val_mean, best.val_std),
        "test_auroc": format_aggregate(best.test_mean, best.test_std),
    }
    (out / "winner.json").write_text(json.dumps(winner, sort_keys=True, indent=2) + "\n",
                                     encoding="utf-8")
    _write_run_record(out, "gridsearch", seed, {
        "edges": edges, "dims": dim_list, "repeats": repeats, "jobs": jobs,
        "deterministic": deterministic,
    })
    click.echo(f"{len(rows)} rows -> {out / 'grid.csv'}")


@main.command()
@click.option("--edges", "edges_paths", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Edge list per dataset (give at least two).")
@click.option("--dim", type=int, default=32, show_default=True)
@click.option("--repeats", type=int, default=1, show_default=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", default="leakage-out", show_default=True)
@click.option("--no-figures", is_flag=True)
@_cli_errors
def leakage(edges_paths, dim, repeats, epochs, seed, out, no_figures):
    """Cross-dataset AUROC matrix (diagonal reproduces the leakage regime)."""
    out = _outdir(out)
    graphs = [_load_graph(p) for p in edges_paths]
    n2v = Node2VecParams(dim=dim)
    snn = SNNParams(dim_in=2 * dim, epochs=epochs, seed=seed)
    matrix = leakage_matrix(graphs, n2v, snn, seed=seed, repeats=repeats)
    matrix.write_csv(out / "leakage.csv")
    matrix.write_long_csv(out / "leakage_long.csv")
    if not no_figures:
        from . import report
        report.render_leakage_heatmap(matrix, out / "leakage.png")
    _write_run_record(out, "leakage", seed, {
        "edges": list(edges_paths), "dim": dim, "repeats": repeats, "epochs": epochs,
    })
    click.echo(str(out / "leakage.csv"))


@main.command()
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--rmsd", "rmsd_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--t", "t_range", default="6..20", show_default=True,
              help="Inclusive range of train-window bounds, e.g. 6..20.")
@click.option("--repeats", type=int, default=5, show_default=True)
@click.option("--dim", type=int, default=32, show_default=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", default="sweep-out", show_default=True)
@click.option("--no-figures", is_flag=True)
@_cli_errors
def sweep(edges, rmsd_path, t_range, repeats, dim, epochs, seed, out, no_figures):
    """AUROC versus the train-window bound, plus the random baseline."""
    t_values = _parse_range(t_range)
    out = _outdir(out)
    g = _load_graph(edges)
    matrix = SimilarityMatrix.read_tsv(rmsd_path, kind="rmsd")
    n2v = Node2VecParams(dim=dim)
    snn = SNNParams(dim_in=2 * dim, epochs=epochs, seed=seed)
    rows = run_window_sweep(g, matrix, n2v, snn, t_values=t_values,
                            repeats=repeats, seed=seed)
    write_sweep_csv(rows, out / "sweep.csv")
    if not no_figures:
        from . import report
        report.render_sweep(rows, out / "sweep.png")
    _write_run_record(out, "sweep", seed, {
        "edges": edges, "rmsd": rmsd_path, "t": t_range,
        "repeats": repeats, "dim": dim, "epochs": epochs,
    })
    click.echo(str(out / "sweep.csv"))


@main.command()
@click.option("--scores", "scores_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV with a header and columns score,label.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Optional directory for metrics.json.")
@_cli_errors
def metrics(scores_path, out):
    """AUROC/AUPRC for a scored edge set."""
    scores, labels = [], []
    with open(scores_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"score", "label"} <= set(reader.fieldnames):
            raise ValidationError("scores file needs 'score' and 'label' columns")
        for row in reader:
            scores.append(float(row["score"]))
            labels.append(int(row["label"]))
    result = {
        "auroc": auroc(scores, labels),
        "auprc": auprc(scores, labels),
        "n": len(scores),
    }
    text = json.dumps(result, sort_keys=True)
    if out:
        out = _outdir(out)
        (out / "metrics.json").write_text(text + "\n", encoding="utf-8")
        _write_run_record(out, "metrics", None, {"scores": scores_path})
    click.echo(text)


@main.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--name", required=True)
@click.option("--cache", type=click.Path(file_okay=False), default=None,
              help="Cache directory (default: DTIBENCH_CACHE or ~/.cache/dtibench).")
@_cli_errors
def fetch(manifest, name, cache):
    """Fetch a dataset by manifest name into the content-addressed cache."""
    m = RegistryManifest.load(manifest)
    path = fetch_dataset(m, name, cache_dir=cache)
    click.echo(str(path))


@main.command(name="config-check")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_cli_errors
def config_check(config_path):
    """Validate a run configuration file, reporting every problem at once."""
    cfg = load_config(config_path)
    click.echo(json.dumps(cfg.as_dict(), sort_keys=True))


if __name__ == "__main__":
    main()
