"""Command-line entry point.

Thin delegation onto the library modules: split, train, evaluate,
pipeline, gridsearch, analyze, serve, benchmark. Exit codes: 0 success,
2 usage error, 3 data error, 4 runtime error. All randomness flows from
the --seed flag of each command.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import analysis as analysis_mod
from . import corpus, embeddings, evaluation
from .annotation import SessionStore
from .errors import (
    ConfigError,
    InsufficientDataError,
    NotFoundError,
    OfflangError,
    ParseError,
    StratificationError,
    ValidationError,
)
from .features import SentimentLexicon, load_pos_tags
from .models import (
    MODEL_KINDS,
    FeatureSpec,
    TrainConfig,
    grid_search_cv,
    load_model,
    save_model,
    train_model,
)

EXIT_DATA = 3
EXIT_RUNTIME = 4

BENCHMARK_REFERENCE_F1 = 0.735
BENCHMARK_TOLERANCE = 0.05


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (
            ParseError,
            ValidationError,
            FileNotFoundError,
            InsufficientDataError,
            StratificationError,
            NotFoundError,
        ) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(EXIT_DATA)
        except (OfflangError, ValueError, ArithmeticError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)

    return wrapper


def _load_config_file(ctx: click.Context, param, value):
    """key = value config file; flags given on the command line win."""
    if not value:
        return value
    defaults: dict[str, str] = {}
    for lineno, raw in enumerate(Path(value).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"{value} line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        defaults[key.strip().replace("-", "_")] = val.strip()
    ctx.default_map = dict(ctx.default_map or {})
    ctx.default_map.update(defaults)
    return value


def config_option(fn):
    return click.option(
        "--config",
        type=click.Path(exists=True, dir_okay=False),
        callback=_load_config_file,
        is_eager=True,
        expose_value=False,
        help="key = value file with defaults for this command's flags.",
    )(fn)


@click.group()
@click.version_option(package_name="offlang")
def main():
    """Offensive-language classification toolkit."""


def _write_json(path: str | Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


@main.command()
@config_option
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--fraction", default=0.8, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out-train", required=True, type=click.Path(dir_okay=False))
@click.option("--out-test", required=True, type=click.Path(dir_okay=False))
@handle_errors
def split(data, fraction, seed, out_train, out_test):
    """Stratified train/test split of an OLID TSV file."""
    dataset = corpus.load_olid_tsv(data)
    train, test = corpus.stratified_split(dataset, fraction, seed)
    corpus.save_olid_tsv(train, out_train)
    corpus.save_olid_tsv(test, out_test)
    click.echo(f"wrote {len(train)} train rows to {out_train}, {len(test)} test rows to {out_test}")


def _train_options(fn):
    decorators = [
        click.option("--model", "kind", required=True, type=click.Choice(MODEL_KINDS)),
        click.option("--task", required=True, type=click.Choice(corpus.TASKS)),
        click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False)),
        click.option("--epochs", default=10, show_default=True, type=int),
        click.option("--batch-size", default=128, show_default=True, type=int),
        click.option("--lr", default=0.001, show_default=True, type=float),
        click.option("--dropout", default=0.2, show_default=True, type=float),
        click.option("--seed", default=0, show_default=True, type=int),
        click.option(
            "--class-weights",
            default="inverse_count",
            show_default=True,
            type=click.Choice(("inverse_count", "none")),
        ),
        click.option("--embeddings", type=click.Path(exists=True, dir_okay=False)),
        click.option("--sentiment-lexicon", type=click.Path(exists=True, dir_okay=False)),
        click.option("--pos-tags", type=click.Path(exists=True, dir_okay=False)),
        click.option("--embed-dim", default=32, show_default=True, type=int),
        click.option("--max-len", default=100, show_default=True, type=int),
        click.option("--min-df", default=1, show_default=True, type=int),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _validate_train_flags(kind, embeddings_path, sentiment_lexicon):
    if kind in ("fast_bilstm", "aux_fast_bilstm") and not embeddings_path:
        raise click.UsageError(f"--embeddings is required for {kind}")
    if kind == "learned_bilstm" and embeddings_path:
        raise click.UsageError("learned_bilstm trains its own embeddings; drop --embeddings")
    if kind in ("logreg", "aux_fast_bilstm") and not sentiment_lexicon:
        raise click.UsageError(f"--sentiment-lexicon is required for {kind}")


def _build_training_inputs(
    kind, data, sentiment_lexicon, pos_tags, embeddings_path, min_df
):
    dataset = corpus.load_olid_tsv(data)
    features = None
    if kind in ("logreg", "aux_fast_bilstm"):
        lexicon = SentimentLexicon.load(sentiment_lexicon)
        tags = None
        if pos_tags:
            sequences = load_pos_tags(pos_tags)
            tags = {post.id: seq for (post, _), seq in zip(dataset, sequences)}
        features = FeatureSpec(lexicon=lexicon, min_df=min_df, pos_tags=tags)
    emb = embeddings.load_pretrained_vec(embeddings_path) if embeddings_path else None
    return dataset, features, emb


@main.command()
@config_option
@_train_options
@click.option("--out", default="model.npz", show_default=True, type=click.Path(dir_okay=False))
@click.option("--manifest", default=None, type=click.Path(dir_okay=False))
@handle_errors
def train(
    kind, task, data, epochs, batch_size, lr, dropout, seed, class_weights,
    embeddings, sentiment_lexicon, pos_tags, embed_dim, max_len, min_df, out, manifest,
):
    """Train a model and write a checkpoint plus a run manifest."""
    _validate_train_flags(kind, embeddings, sentiment_lexicon)
    dataset, features, emb = _build_training_inputs(
        kind, data, sentiment_lexicon, pos_tags, embeddings, min_df
    )
    config = TrainConfig(
        batch_size=batch_size, lr=lr, dropout=dropout,
        epochs=epochs, seed=seed, class_weights=class_weights,
    )
    model = train_model(
        kind, dataset, task, config, features=features, emb=emb,
        embed_dim=embed_dim, max_len=max_len,
    )
    save_model(model, out)
    train_metrics = evaluation.evaluate_model(model, dataset)

    manifest_payload = {
        "command": "train",
        "model": kind,
        "task": task,
        "data": str(data),
        "dataset_checksum": dataset.checksum(),
        "config": config.as_dict(),
        "embed_dim": embed_dim,
        "max_len": max_len,
        "epoch_losses": getattr(model, "epoch_losses", []),
        "train_metrics": evaluation.metrics_to_dict(train_metrics),
        "checkpoint": str(out),
    }
    if kind == "majority_baseline":
        manifest_payload["majority_class"] = model.label
    manifest_path = manifest or f"{out}.manifest.json"
    _write_json(manifest_path, manifest_payload)
    click.echo(f"trained {kind} for task {task}; checkpoint {out}, manifest {manifest_path}")
    click.echo(evaluation.format_report(train_metrics, title="train metrics"))


@main.command()
@config_option
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", default=None, type=click.Choice(corpus.TASKS))
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@handle_errors
def evaluate(checkpoint, data, task, out):
    """Per-class R/P/F1 and macro-F1 of a checkpoint on a test set."""
    model = load_model(checkpoint)
    if task is not None and task != model.task:
        click.echo(
            f"data error: checkpoint is trained for task {model.task}, not {task}", err=True
        )
        sys.exit(EXIT_DATA)
    dataset = corpus.load_olid_tsv(data)
    m = evaluation.evaluate_model(model, dataset)
    click.echo(evaluation.format_report(m, title=f"{model.kind} on {dataset.name} (task {model.task})"))
    if out:
        _write_json(out, evaluation.metrics_to_dict(m))


@main.command()
@config_option
@click.option("--checkpoint-a", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--checkpoint-b", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--checkpoint-c", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@handle_errors
def pipeline(checkpoint_a, checkpoint_b, checkpoint_c, data, out):
    """Cascaded A->B->C predictions for a labeled OLID TSV file."""
    models = [load_model(p) for p in (checkpoint_a, checkpoint_b, checkpoint_c)]
    dataset = corpus.load_olid_tsv(data)
    posts = [post for post, _ in dataset]
    predicted = evaluation.run_pipeline(models[0], models[1], models[2], posts)
    gold = [label for _, label in dataset]
    per_task = evaluation.pipeline_metrics(gold, predicted)
    for task_name, m in per_task.items():
        click.echo(evaluation.format_report(m, title=f"task {task_name} (cascaded)"))
    if out:
        predicted_ds = corpus.Dataset(
            f"{dataset.name}-pipeline", tuple(zip(posts, predicted))
        )
        corpus.save_olid_tsv(predicted_ds, out)
        click.echo(f"wrote predictions to {out}")


def _parse_grid(spec: str) -> dict[str, list]:
    grid: dict[str, list] = {}
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, values = part.partition("=")
        if not values:
            raise click.UsageError(f"bad grid cell {part!r}, expected key=v1,v2")
        parsed = []
        for v in values.split(","):
            v = v.strip()
            try:
                parsed.append(int(v))
            except ValueError:
                try:
                    parsed.append(float(v))
                except ValueError:
                    parsed.append(v)
        grid[key.strip()] = parsed
    if not grid:
        raise click.UsageError("empty grid")
    return grid


@main.command()
@config_option
@_train_options
@click.option("--grid", "grid_spec", required=True,
              help="e.g. 'lr=0.01,0.001;batch_size=32,128'")
@click.option("--k-folds", default=5, show_default=True, type=int)
@click.option("--jobs", default=1, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@handle_errors
def gridsearch(
    kind, task, data, epochs, batch_size, lr, dropout, seed, class_weights,
    embeddings, sentiment_lexicon, pos_tags, embed_dim, max_len, min_df,
    grid_spec, k_folds, jobs, out,
):
    """Grid-search cross-validation; reports the best cell by mean macro-F1."""
    _validate_train_flags(kind, embeddings, sentiment_lexicon)
    dataset, features, emb = _build_training_inputs(
        kind, data, sentiment_lexicon, pos_tags, embeddings, min_df
    )
    base = TrainConfig(
        batch_size=batch_size, lr=lr, dropout=dropout,
        epochs=epochs, seed=seed, class_weights=class_weights,
    )
    result = grid_search_cv(
        kind, dataset, task, _parse_grid(grid_spec), k_folds=k_folds, seed=seed,
        base_config=base, features=features, emb=emb,
        embed_dim=embed_dim, max_len=max_len, jobs=jobs,
    )
    for cell in result.table:
        click.echo(f"{cell.params} -> mean macro-F1 {cell.mean_macro_f1:.4f}")
    click.echo(f"best: {result.best_params} (macro-F1 {result.best_score:.4f})")
    if out:
        _write_json(out, {
            "best": result.best_params,
            "best_score": result.best_score,
            "table": [
                {"params": c.params, "mean_macro_f1": c.mean_macro_f1,
                 "fold_scores": c.fold_scores}
                for c in result.table
            ],
        })


@main.command()
@config_option
@click.option("--checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--top-k", default=20, show_default=True, type=int)
@click.option("--n-min", default=1, show_default=True, type=int)
@click.option("--n-max", default=2, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False))
@handle_errors
def analyze(checkpoint, data, top_k, n_min, n_max, out):
    """Mine misclassified samples: top TF-IDF n-grams and length stats."""
    model = load_model(checkpoint)
    dataset = corpus.load_olid_tsv(data)
    report = analysis_mod.analysis_report(model, dataset, n_range=(n_min, n_max), k=top_k)
    click.echo(analysis_mod.format_analysis_report(report))
    if out:
        _write_json(out, report)


@main.command()
@config_option
@click.option("--session", "session_id", required=True)
@click.option("--posts", required=True, type=click.Path(exists=True, dir_okay=False),
              help="TSV with header 'id<TAB>text'.")
@click.option("--annotators", default="annotator1,annotator2", show_default=True)
@click.option("--lexicon", default=None, type=click.Path(exists=True, dir_okay=False),
              help="Profanity lexicon for guideline warnings.")
@click.option("--log", "log_path", default=None, type=click.Path(dir_okay=False),
              help="Append-only session log; replayed on restart.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@handle_errors
def serve(session_id, posts, annotators, lexicon, log_path, host, port):
    """Run the annotation service until interrupted."""
    import uvicorn

    from .service import create_app

    names = tuple(a.strip() for a in annotators.split(",") if a.strip())
    if len(names) != 2:
        raise click.UsageError("--annotators needs exactly two comma-separated ids")
    store = SessionStore(log_path)
    if session_id not in store.session_ids():
        post_list = corpus.load_posts_tsv(posts)
        profanity = corpus.Lexicon.load(lexicon) if lexicon else None
        store.create(session_id, post_list, names, profanity=profanity)
    app = create_app(store)
    click.echo(f"serving session {session_id!r} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command(name="benchmark")
@config_option
@click.option("--train", "train_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--test", "test_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embeddings", "embeddings_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--task", default="A", show_default=True, type=click.Choice(corpus.TASKS))
@click.option("--epochs", default=100, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--max-len", default=100, show_default=True, type=int)
@handle_errors
def benchmark_cmd(train_path, test_path, embeddings_path, task, epochs, seed, max_len):
    """Informational benchmark: frozen-embedding BiLSTM on a public dataset.

    Reports macro-F1 and, for task A, flags deviation beyond +/-0.05 from
    the 0.735 reference as informational only (never a failure).
    """
    train_ds = corpus.load_olid_tsv(train_path)
    test_ds = corpus.load_olid_tsv(test_path)
    emb = embeddings.load_pretrained_vec(embeddings_path)
    config = TrainConfig(epochs=epochs, seed=seed)
    model = train_model("fast_bilstm", train_ds, task, config, emb=emb, max_len=max_len)
    m = evaluation.evaluate_model(model, test_ds)
    click.echo(evaluation.format_report(m, title=f"fast_bilstm task {task}"))
    if task == "A":
        deviation = abs(m.macro_f1 - BENCHMARK_REFERENCE_F1)
        note = "within" if deviation <= BENCHMARK_TOLERANCE else "beyond"
        click.echo(
            f"informational: macro-F1 {m.macro_f1:.3f} is {note} "
            f"+/-{BENCHMARK_TOLERANCE} of the {BENCHMARK_REFERENCE_F1} reference"
        )


if __name__ == "__main__":
    main()
