"""HTTP boundary: thin JSON adapters over the engine modules.

Every endpoint serializes the corresponding module operation's output
verbatim; handlers add no numeric fields of their own (in particular no
confidence-style metrics). All randomness is a request parameter with a
documented default, so any response can be reproduced.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import docs as docs_mod
from .core import (
    DecisionRecord,
    catalog_to_list,
    decision_record_from_dict,
    decision_record_to_dict,
    default_method_catalog,
    instance_to_dict,
    model_profile_from_dict,
    parse_instances_jsonl,
    user_profile_from_dict,
)
from .credit import CreditExplainer, CreditScorer, whatif_rescore
from .decisions import DecisionLog
from .errors import (
    BadConfig,
    CorruptFile,
    DuplicateId,
    ExplanationError,
    IoFailure,
    NotFound,
    PortInUse,
)
from .explainers import (
    KernelConfig,
    MetricKind,
    PredictMode,
    adversarial_sensitivity,
    cluster_covariation,
    counterfactual_search,
    influential_instances,
    knn_predict,
    knn_shapley,
    pdp_curve,
    permutation_importance,
    prototype_surrogate,
    select_criticisms,
    select_prototypes,
    training_report,
)
from .explainers.neighbors import NOT_CURRENT, majority_label
from .framework import recommend
from .store import Collection, Filter, Metric, load

DEFAULT_PORT = 8080


@dataclass
class ServiceConfig:
    port: int = DEFAULT_PORT
    data_dir: Path | None = None
    collections: list[dict] = field(default_factory=list)
    decision_log_dimension: int = 5
    credit_threshold: float = 0.5

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise BadConfig(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise BadConfig(f"config {path} is not valid JSON: {exc}") from exc
        return cls(
            port=int(obj.get("port", DEFAULT_PORT)),
            data_dir=Path(obj["data_dir"]) if obj.get("data_dir") else None,
            collections=list(obj.get("collections", [])),
            decision_log_dimension=int(obj.get("decision_log_dimension", 5)),
            credit_threshold=float(obj.get("credit_threshold", 0.5)),
        )


_STATUS_BY_ERROR = {
    NotFound: 404,
    DuplicateId: 409,
    IoFailure: 500,
    CorruptFile: 500,
    PortInUse: 500,
    BadConfig: 500,
}


def _error_response(exc: ExplanationError) -> JSONResponse:
    status = next(
        (code for cls, code in _STATUS_BY_ERROR.items() if isinstance(exc, cls)), 400
    )
    return JSONResponse(
        status_code=status,
        content={"code": exc.code, "message": str(exc), "detail": type(exc).__name__},
    )


class EngineState:
    """Mutable service state: named collections plus one decision log."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.collections: dict[str, Collection] = {}
        self.decision_log = DecisionLog(config.decision_log_dimension)
        self.scorer = CreditScorer(config.credit_threshold)
        self._credit_explainers: dict[str, CreditExplainer] = {}
        for spec in config.collections:
            name = str(spec["name"])
            self.collections[name] = Collection(
                name, int(spec["dimension"]), Metric(spec.get("metric", "Euclidean"))
            )
        if config.data_dir is not None and config.data_dir.is_dir():
            for path in sorted(config.data_dir.glob("*.coll")):
                collection = load(path)
                self.collections[collection.name] = collection

    def collection(self, name: str) -> Collection:
        if name not in self.collections:
            raise NotFound(f"no collection named {name!r}")
        return self.collections[name]

    def credit_explainer(self, name: str) -> CreditExplainer:
        if name not in self._credit_explainers:
            self._credit_explainers[name] = CreditExplainer(
                self.collection(name), self.scorer
            )
        return self._credit_explainers[name]


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    state = EngineState(config or ServiceConfig())
    app = FastAPI(title="admexplain", docs_url=None, redoc_url=None)
    app.state.engine = state

    # the console UI is served from its own origin during development
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ExplanationError)
    async def _handle_engine_error(_req: Request, exc: ExplanationError):
        return _error_response(exc)

    @app.exception_handler(ValueError)
    async def _handle_value_error(_req: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"code": "invalid_request", "message": str(exc), "detail": "ValueError"},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/catalog")
    def catalog() -> list[dict]:
        return catalog_to_list(default_method_catalog())

    @app.post("/collections", status_code=201)
    async def create_collection(request: Request) -> dict:
        body = await request.json()
        name = str(body["name"])
        if name in state.collections:
            raise DuplicateId(f"collection {name!r} already exists")
        collection = Collection(
            name, int(body["dimension"]), Metric(body.get("metric", "Euclidean"))
        )
        state.collections[name] = collection
        return {"name": name, "dimension": collection.dimension,
                "metric": collection.metric.value, "count": 0}

    @app.post("/collections/{name}/instances")
    async def ingest(name: str, request: Request) -> dict:
        collection = state.collection(name)
        text = (await request.body()).decode("utf-8")
        count = collection.upsert_many(parse_instances_jsonl(text))
        state._credit_explainers.pop(name, None)  # snapshot changed
        return {"count": count}

    @app.get("/collections/{name}/instances/{instance_id}")
    def get_instance(name: str, instance_id: str) -> dict:
        inst = state.collection(name).get(instance_id)
        if inst is None:
            raise NotFound(f"no instance {instance_id!r} in {name!r}")
        return instance_to_dict(inst)

    @app.post("/collections/{name}/query")
    async def query(name: str, request: Request) -> dict:
        body = await request.json()
        results = state.collection(name).knn_query(
            body["vector"], int(body.get("k", 5)), Filter.from_dict(body.get("filter"))
        )
        return {"results": [[i, d] for i, d in results]}

    @app.post("/recommend")
    async def recommend_endpoint(request: Request) -> dict:
        body = await request.json()
        rec = recommend(
            model_profile_from_dict(body["model_profile"]),
            user_profile_from_dict(body["user_profile"]),
        )
        return rec.to_dict()

    @app.post("/explain/{method}")
    async def explain(method: str, request: Request):
        body = await request.json()
        return dispatch_explain(state, method, body)

    @app.post("/whatif")
    async def whatif(request: Request) -> dict:
        body = await request.json()
        scorer = state.scorer
        if "threshold" in body:
            scorer = CreditScorer(float(body["threshold"]))
        result = whatif_rescore(body["features"], body.get("edits") or {}, scorer)
        return result.to_dict()

    @app.get("/decisions")
    def list_decisions() -> dict:
        return {"records": [decision_record_to_dict(r) for r in state.decision_log.records()]}

    @app.post("/decisions", status_code=201)
    async def record_decision(request: Request) -> dict:
        body = await request.json()
        record = decision_record_from_dict(body)
        count = state.decision_log.record_decision(record)
        return {"id": record.id, "count": count}

    @app.post("/decisions/recall")
    async def recall(request: Request) -> dict:
        body = await request.json()
        hit = state.decision_log.recall_decision(
            body["query_embedding"], float(body.get("tau", 0.95))
        )
        if hit is None:
            return {"match": None}
        record, similarity = hit
        return {"match": decision_record_to_dict(record), "similarity": similarity}

    @app.get("/report/{name}")
    def report(name: str) -> dict:
        return training_report(state.collection(name))

    return app


def dispatch_explain(state: EngineState, method: str, body: dict) -> Any:
    """Route /explain/{method} to the matching module operation."""
    collection = state.collection(str(body.get("collection", "")))
    k = int(body.get("k", 5))
    mode = PredictMode(body.get("mode", "Classify"))
    seed = int(body.get("seed", 0))

    if method == "knn":
        return knn_predict(collection, body["vector"], k, mode).to_dict()

    if method == "shap":
        result = knn_shapley(
            collection,
            body["features"],
            k=k,
            mode=mode,
            positive_label=body.get("positive_label"),
            seed=seed,
        )
        return result.to_dict()

    if method == "prototypes":
        protos = select_prototypes(collection, int(body.get("per_class", 3)), _kernel(body))
        return {str(lbl): ids for lbl, ids in protos.items()}

    if method == "criticisms":
        protos = select_prototypes(collection, int(body.get("per_class", 3)), _kernel(body))
        crits = select_criticisms(collection, protos, int(body.get("count", 2)), _kernel(body))
        return {str(lbl): [[i, s] for i, s in entries] for lbl, entries in crits.items()}

    if method == "counterfactual":
        inst = collection.get(str(body.get("id", "")))
        if inst is None:
            raise NotFound(f"no instance {body.get('id')!r} to explain")
        target = body["target"] if "target" in body else NOT_CURRENT
        hit = counterfactual_search(collection, inst, target, body.get("immutable", ()))
        return {"match": list(hit) if hit else None}

    if method == "influences":
        entries = influential_instances(
            collection, body["vector"], k, mode, body.get("positive_label")
        )
        return {"influences": [[i, v] for i, v in entries]}

    if method == "adversarial":
        flagged = adversarial_sensitivity(collection, float(body.get("threshold", 1.0)))
        return {"flagged": [[i, r] for i, r in flagged]}

    if method == "cluster":
        report = cluster_covariation(
            collection, int(body.get("k_clusters", 2)), seed,
            float(body.get("regression_tolerance", 0.0)),
        )
        return report.to_dict()

    if method == "importance":
        model = _knn_model(collection, k, mode)
        result = permutation_importance(
            collection, model, MetricKind(body.get("metric", "Accuracy")),
            int(body.get("repeats", 5)), seed,
        )
        return {name: [m, s] for name, (m, s) in result.items()}

    if method == "pdp":
        model = _knn_model(collection, k, mode)
        curve = pdp_curve(collection, model, str(body["feature"]), int(body.get("grid_points", 10)))
        return {"feature": body["feature"], "points": [[x, y] for x, y in curve]}

    if method == "surrogate":
        protos = select_prototypes(collection, int(body.get("per_class", 3)), _kernel(body))
        _, fidelity = prototype_surrogate(collection, protos)
        return {"prototypes": {str(lbl): ids for lbl, ids in protos.items()}, "fidelity": fidelity}

    if method == "rejection":
        explainer = state.credit_explainer(str(body["collection"]))
        applicant = explainer.applicant_from_stored(str(body["id"]))
        return explainer.explain(applicant).to_dict()

    if method == "passages":
        return {
            "passages": [
                [cid, sim]
                for cid, sim in docs_mod.influential_passages(collection, str(body["query"]), k)
            ]
        }

    raise NotFound(f"no explanation method {method!r}")


def _kernel(body: dict) -> KernelConfig:
    bandwidth = body.get("bandwidth")
    return KernelConfig(bandwidth=float(bandwidth) if bandwidth else None)


def _knn_model(collection: Collection, k: int, mode: PredictMode):
    """Feature-space knn predictor used when an endpoint needs a model.

    Stored instances are ranked by Euclidean distance over the sorted raw
    feature names (the same convention the attribution machinery uses), so
    no embedding assumption is required.
    """
    insts = collection.instances()
    names = sorted(insts[0].features) if insts else []
    rows = [(i.id, [float(i.features[n]) for n in names], i.label) for i in insts]

    def model(feats) -> object:
        q = [float(feats[n]) for n in names]
        scored = sorted(
            (math.sqrt(sum((a - b) ** 2 for a, b in zip(vec, q))), rid, lbl)
            for rid, vec, lbl in rows
        )
        top = scored[: min(k, len(scored))]
        if mode is PredictMode.REGRESS:
            return sum(float(lbl) for _, _, lbl in top) / len(top)
        return majority_label([lbl for _, _, lbl in top])

    return model


def serve(config: ServiceConfig, host: str = "127.0.0.1") -> None:
    """Run the service until interrupted; raises PortInUse when bound.

    The port is probed up front because uvicorn reports a bind failure as a
    bare SystemExit.
    """
    import socket

    import uvicorn

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, config.port))
    except OSError as exc:
        raise PortInUse(f"port {config.port} is already in use on {host}") from exc
    finally:
        probe.close()

    app = create_app(config)
    uvicorn.run(app, host=host, port=config.port, log_level="warning")
