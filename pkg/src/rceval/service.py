"""HTTP scoring service.

Read-only: metrics are loaded once at startup and never mutated, so
identical request bodies return identical responses for the process
lifetime. Trainable-metric inference passes through a bounded per-model
queue; when it is full the service answers 503 rather than queueing
unboundedly. Errors use a fixed {code, message, details} envelope. One
JSON log line is emitted per request (metric, latency, status).
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .errors import MissingScoreError, PackingLengthError
from .learned.model import clamp_score
from .metaeval.metrics import Metric
from .util import canonical_json, sha256_text

log = logging.getLogger(__name__)
request_log = logging.getLogger("rceval.service.requests")

MAX_BATCH = 256


class ScoreRequest(BaseModel):
    passage: str
    question: str
    reference: str
    candidate: str
    metric: str


def _error(status: int, code: str, message: str, details: dict | None = None):
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details or {}},
    )


def metric_fingerprint(metric: Metric) -> str:
    """Stable identity of a loaded metric (model weights included)."""
    explicit = getattr(metric, "fingerprint", None)
    if explicit:
        return explicit
    model = getattr(metric, "model", None)
    if model is not None:
        h = hashlib.sha256()
        for name in sorted(model.params()):
            h.update(name.encode())
            h.update(model.params()[name].tobytes())
        return h.hexdigest()[:16]
    mapping = getattr(metric, "mapping", None)
    if mapping is not None:
        return sha256_text(canonical_json(mapping))[:16]
    return sha256_text(f"{metric.name}/{metric.score_range}/{__version__}")[:16]


class _ModelQueue:
    """Bounded admission for expensive metrics; full queue -> back-pressure."""

    def __init__(self, capacity: int, timeout: float):
        self.sem = threading.Semaphore(capacity) if capacity > 0 else None
        self.capacity = capacity
        self.timeout = timeout

    def admit(self) -> bool:
        if self.capacity <= 0:
            return False
        return self.sem.acquire(timeout=self.timeout)

    def release(self) -> None:
        if self.sem is not None:
            self.sem.release()


def create_app(
    registry: dict[str, Metric],
    queue_capacity: int = 8,
    queue_timeout: float = 2.0,
) -> FastAPI:
    app = FastAPI(title="rceval scoring service", version=__version__)
    fingerprints = {name: metric_fingerprint(m) for name, m in registry.items()}
    queues = {
        name: _ModelQueue(queue_capacity, queue_timeout)
        for name, m in registry.items()
        if getattr(m, "kind", None) == "learned"
    }

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return _error(400, "malformed_request", "request body failed validation",
                      {"errors": exc.errors()[:5]})

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        request_log.info(
            "%s",
            json.dumps(
                {
                    "path": request.url.path,
                    "method": request.method,
                    "metric": getattr(request.state, "metric", None),
                    "status": response.status_code,
                    "latency_ms": round(1000 * (time.perf_counter() - start), 3),
                }
            ),
        )
        return response

    def score_one(item: ScoreRequest) -> dict:
        metric = registry[item.metric]
        value = metric.score(item.passage, item.question, item.reference, item.candidate)
        body = {
            "metric": item.metric,
            "model_fingerprint": fingerprints[item.metric],
        }
        if getattr(metric, "kind", None) == "learned":
            body["raw"] = value
            body["score"] = clamp_score(value)
        else:
            body["score"] = value
        return body

    def check_metrics(items: list[ScoreRequest]):
        unknown = sorted({i.metric for i in items} - set(registry))
        if unknown:
            return _error(
                400, "unknown_metric",
                f"unknown metric(s): {', '.join(unknown)}",
                {"valid": sorted(registry)},
            )
        return None

    def admit_all(items: list[ScoreRequest]):
        held = []
        for name in sorted({i.metric for i in items}):
            queue = queues.get(name)
            if queue is None:
                continue
            if not queue.admit():
                for q in held:
                    q.release()
                return None
            held.append(queue)
        return held

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "models": fingerprints}

    @app.get("/v1/metrics")
    async def metrics():
        return {
            "metrics": [
                {
                    "name": name,
                    "range": list(m.score_range),
                    "kind": getattr(m, "kind", "unknown"),
                }
                for name, m in sorted(registry.items())
            ]
        }

    @app.post("/v1/score")
    async def score(item: ScoreRequest, request: Request):
        request.state.metric = item.metric
        bad = check_metrics([item])
        if bad:
            return bad
        held = admit_all([item])
        if held is None:
            return _error(503, "overloaded", "model queue is full; retry later")
        try:
            return score_one(item)
        except PackingLengthError as e:
            return _error(400, "input_too_long", str(e), {"segment": e.segment})
        except MissingScoreError as e:
            return _error(400, "unsupported_metric", str(e))
        finally:
            for q in held:
                q.release()

    @app.post("/v1/score/batch")
    async def score_batch(items: list[ScoreRequest], request: Request):
        request.state.metric = ",".join(sorted({i.metric for i in items}))
        if len(items) > MAX_BATCH:
            return _error(
                413, "batch_too_large",
                f"batch of {len(items)} exceeds the limit",
                {"limit": MAX_BATCH},
            )
        bad = check_metrics(items)
        if bad:
            return bad
        held = admit_all(items)
        if held is None:
            return _error(503, "overloaded", "model queue is full; retry later")
        try:
            return [score_one(item) for item in items]
        except PackingLengthError as e:
            return _error(400, "input_too_long", str(e), {"segment": e.segment})
        except MissingScoreError as e:
            return _error(400, "unsupported_metric", str(e))
        finally:
            for q in held:
                q.release()

    return app


def serve(registry: dict[str, Metric], host: str = "127.0.0.1", port: int = 8080) -> None:
    """Load-check every metric, then bind."""
    import uvicorn

    app = create_app(registry)
    log.info("serving %d metrics on %s:%d", len(registry), host, port)
    uvicorn.run(app, host=host, port=port)
