"""Command-line interface.

Exit codes: 0 success, 1 runtime error, 2 usage error. Every command that
takes a seed is reproducible byte-for-byte across runs.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .core import (
    ModeWeightTable,
    catalog_from_list,
    model_profile_from_dict,
    parse_instances_jsonl,
    user_profile_from_dict,
)
from .credit import CreditScorer, whatif_rescore
from .decisions import DecisionLog, load_log
from .docs import EMBED_DIMENSION, answer_with_provenance, load_corpus_dir
from .errors import ExplanationError
from .framework import credit_profiles, docs_profiles, recommend
from .report import plot_series, write_credit_demo
from .service import EngineState, ServiceConfig, dispatch_explain, serve
from .store import Collection, Metric, load, persist


def engine_errors(fn):
    """Translate engine errors into exit code 1 with a clean message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ExplanationError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
def main() -> None:
    """Explanation engine for AI-assisted decision-making."""


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(path_type=Path))
@click.option("--file", "jsonl_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--name", default=None, help="collection name (when creating)")
@click.option("--dimension", type=int, default=None, help="dimension (when creating)")
@click.option("--metric", type=click.Choice(["Euclidean", "Cosine"]), default="Euclidean")
@engine_errors
def ingest(store_path: Path, jsonl_path: Path, name: str | None, dimension: int | None, metric: str) -> None:
    """Upsert line-delimited JSON instances into a persisted collection."""
    if store_path.exists():
        collection = load(store_path)
    else:
        if not name or not dimension:
            raise click.UsageError("--name and --dimension are required to create a new store")
        collection = Collection(name, dimension, Metric(metric))
    count = collection.upsert_many(parse_instances_jsonl(jsonl_path.read_text(encoding="utf-8")))
    persist(collection, store_path)
    click.echo(json.dumps({"collection": collection.name, "count": count}))


@main.command("recommend")
@click.option("--profile", "profile_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="JSON file with model_profile and user_profile objects")
@click.option("--builtin", type=click.Choice(["credit", "docs"]), default=None,
              help="use a shipped reference profile")
@click.option("--table", "table_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, path_type=Path), default=None)
@engine_errors
def recommend_cmd(profile_path: Path | None, builtin: str | None, table_path: Path | None,
                  catalog_path: Path | None) -> None:
    """Print the method recommendation for a profile as JSON."""
    if (profile_path is None) == (builtin is None):
        raise click.UsageError("provide exactly one of --profile or --builtin")
    if builtin:
        model, user = credit_profiles() if builtin == "credit" else docs_profiles()
    else:
        obj = json.loads(profile_path.read_text(encoding="utf-8"))
        model = model_profile_from_dict(obj["model_profile"])
        user = user_profile_from_dict(obj["user_profile"])
    table = ModeWeightTable.from_dict(json.loads(table_path.read_text(encoding="utf-8"))) if table_path else None
    catalog = catalog_from_list(json.loads(catalog_path.read_text(encoding="utf-8"))) if catalog_path else None
    rec = recommend(model, user, catalog=catalog, table=table)
    click.echo(json.dumps(rec.to_dict(), indent=2, sort_keys=True))


@main.command()
@click.option("--store", "store_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--method", required=True)
@click.option("--body", default="{}", help="JSON object with the method parameters")
@engine_errors
def explain(store_path: Path, method: str, body: str) -> None:
    """Run one explanation method against a persisted collection."""
    collection = load(store_path)
    state = EngineState(ServiceConfig())
    state.collections[collection.name] = collection
    params = json.loads(body)
    params["collection"] = collection.name
    click.echo(json.dumps(dispatch_explain(state, method, params), indent=2, sort_keys=True))


@main.command()
@click.option("--features", required=True, help="JSON object of applicant features")
@click.option("--edits", default="{}", help="JSON object of feature edits")
@click.option("--threshold", type=float, default=0.5)
@engine_errors
def whatif(features: str, edits: str, threshold: float) -> None:
    """Re-score an applicant with edited features."""
    result = whatif_rescore(json.loads(features), json.loads(edits), CreditScorer(threshold))
    click.echo(json.dumps(result.to_dict(), sort_keys=True))


@main.command("demo-credit")
@click.option("--n", default=500, type=int, show_default=True)
@click.option("--seed", default=7, type=int, show_default=True)
@click.option("--threshold", default=0.5, type=float, show_default=True)
@click.option("--out", "outdir", required=True, type=click.Path(path_type=Path))
@engine_errors
def demo_credit(n: int, seed: int, threshold: float, outdir: Path) -> None:
    """Seeded credit run: portfolio, recommendation, bundles, figures."""
    summary = write_credit_demo(outdir, n, seed, threshold)
    click.echo(json.dumps(summary, sort_keys=True))


@main.command("demo-docs")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--query", required=True)
@click.option("--log", "log_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="persisted decision log of validated answers")
@click.option("--tau", default=0.95, type=float, show_default=True)
@click.option("--k", default=5, type=int, show_default=True)
@engine_errors
def demo_docs(corpus_dir: Path, query: str, log_path: Path | None, tau: float, k: int) -> None:
    """Answer a query over a .txt corpus with provenance."""
    corpus = load_corpus_dir(corpus_dir)
    log = load_log(log_path) if log_path else DecisionLog(EMBED_DIMENSION)
    answer = answer_with_provenance(corpus, log, query, tau=tau, k=k)
    click.echo(json.dumps(answer, indent=2, sort_keys=True))


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--port", type=int, default=None, envvar="EXPL_PORT")
@click.option("--data-dir", type=click.Path(path_type=Path), default=None, envvar="EXPL_DATA_DIR")
@click.option("--host", default="127.0.0.1", show_default=True)
@engine_errors
def serve_cmd(config_path: Path | None, port: int | None, data_dir: Path | None, host: str) -> None:
    """Start the HTTP service."""
    config = ServiceConfig.from_file(config_path) if config_path else ServiceConfig()
    if port is not None:
        config.port = port
    if data_dir is not None:
        config.data_dir = data_dir
    serve(config, host=host)


@main.command()
@click.option("--kind", type=click.Choice(["pdp", "importance"]), required=True)
@click.option("--series", "series_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@engine_errors
def plot(kind: str, series_path: Path, out_path: Path) -> None:
    """Render a series JSON (PDP or importance) to a chart file."""
    written = plot_series(kind, series_path, out_path)
    click.echo(json.dumps({"figure": str(written)}))


if __name__ == "__main__":
    sys.exit(main())
