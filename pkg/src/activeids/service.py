"""HTTP labeling service: the human-oracle workflow plus live host state.

A background thread runs the cumulative experiment loop with a
HumanOracle that blocks on a pending query. Analysts poll
GET /session/{id}/queries/next for unanswered records, POST labels back,
and watch GET /session/{id}/hosts for the evolving probability table.
Ground-truth labels never appear in any response body.
"""

import threading
from dataclasses import dataclass, field

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .active_learning import (
    KMeansBaggingSampling,
    Oracle,
    OracleQuery,
    OracleTimeoutError,
    SamplingStrategy,
)
from .dataset import RecordSet
from .harness import ExperimentConfig, experiment2
from .situation import HostState

DEFAULT_TIMEOUT = 30 * 60.0  # human labeling is slow


@dataclass
class PendingQuery:
    indices: tuple[int, ...]
    responses: dict[int, int] = field(default_factory=dict)
    done: threading.Event = field(default_factory=threading.Event)

    def unanswered(self) -> tuple[int, ...]:
        return tuple(i for i in self.indices if i not in self.responses)


class LabelSession:
    """Single-analyst labeling session wrapping one experiment sequence."""

    def __init__(self, rs: RecordSet, cfg: ExperimentConfig,
                 strategy: SamplingStrategy | None = None,
                 session_id: str = "default", timeout: float = DEFAULT_TIMEOUT):
        self.rs = rs
        self.cfg = cfg
        self.strategy = strategy or KMeansBaggingSampling()
        self.session_id = session_id
        self.timeout = timeout
        self.lock = threading.Lock()
        self.pending: PendingQuery | None = None
        self.run_ordinal = 0
        self.host_rows: list[dict] = []
        self.error: str | None = None
        self.finished = False
        self._thread: threading.Thread | None = None
        self._feature_names = [name for name, _ in rs.schema.feature_columns]

    # -- oracle side (experiment thread) --

    def ask(self, indices: tuple[int, ...]) -> dict[int, int]:
        query = PendingQuery(indices=indices)
        with self.lock:
            self.pending = query
        if not query.done.wait(self.timeout):
            with self.lock:
                self.pending = None
            raise OracleTimeoutError(
                f"no labels for {len(query.unanswered())} records "
                f"after {self.timeout:.0f}s", dict(query.responses)
            )
        with self.lock:
            self.pending = None
        return dict(query.responses)

    def _snapshot(self, run: int, hosts: dict[str, HostState]) -> None:
        types = self.rs.host_types()
        rows = []
        for srcip, state in sorted(hosts.items(),
                                   key=lambda kv: (-kv[1].probability, kv[0])):
            trajectory = self._probability_trajectory(state)
            rows.append({
                "srcip": srcip,
                "type": types.get(srcip, ""),
                "n_r": state.n_r,
                "d_r": state.d_r,
                "probability": state.probability,
                "probability_full": repr(state.probability),
                "probability_display": f"{state.probability:.3f}",
                "history": [{"n_i": n, "d_i": d} for n, d in state.history],
                "probability_history": [repr(p) for p in trajectory],
                "probability_history_display": [f"{p:.3f}" for p in trajectory],
            })
        with self.lock:
            self.host_rows = rows
            self.run_ordinal = run

    def _probability_trajectory(self, state: HostState) -> list[float]:
        return [
            HostState.from_history(state.srcip, state.history[: i + 1],
                                   self.cfg.detection).probability
            for i in range(len(state.history))
        ]

    # -- lifecycle --

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        try:
            oracle = _SessionOracle(self)
            experiment2(self.cfg, oracle=oracle, strategy=self.strategy,
                        on_run=self._snapshot)
        except Exception as exc:  # surfaced via /session/{id}/status
            with self.lock:
                self.error = f"{type(exc).__name__}: {exc}"
        finally:
            with self.lock:
                self.finished = True

    def join(self, timeout: float | None = None) -> None:
        if self._thread is not None:
            self._thread.join(timeout)

    # -- view side --

    def query_items(self) -> list[dict]:
        with self.lock:
            pending = self.pending
        if pending is None:
            return []
        items = []
        for i in pending.unanswered():
            record = self.rs.record(i)
            items.append({
                "index": i,
                "features": {
                    name: (value if isinstance(value, str) else float(value))
                    for name, value in zip(self._feature_names, record.features)
                },
            })
        return items

    def submit(self, labels: dict[int, int]):
        with self.lock:
            pending = self.pending
            if pending is None:
                return None, ["no pending query"], []
            stray = [i for i in labels if i not in pending.indices]
            bad = [i for i, v in labels.items() if v not in (0, 1)]
            if stray or bad:
                errors = []
                if stray:
                    errors.append(f"indices not in pending query: {sorted(stray)}")
                if bad:
                    errors.append(f"labels must be 0 or 1 for indices: {sorted(bad)}")
                return None, errors, []
            warnings = [
                f"index {i} relabeled {pending.responses[i]} -> {v}"
                for i, v in labels.items()
                if i in pending.responses and pending.responses[i] != v
            ]
            pending.responses.update(labels)
            remaining = len(pending.unanswered())
            if remaining == 0:
                pending.done.set()
            return remaining, [], warnings


class _SessionOracle(Oracle):
    """Blocks the experiment loop until the analyst labels every index."""

    def __init__(self, session: LabelSession):
        self.session = session

    def answer(self, query: OracleQuery) -> OracleQuery:
        responses = self.session.ask(query.indices)
        return OracleQuery(query.indices, tuple(responses[i] for i in query.indices))


def create_app(session: LabelSession) -> FastAPI:
    app = FastAPI(title="activeids labeling service")

    def _check(session_id: str):
        if session_id != session.session_id:
            return JSONResponse(status_code=404,
                                content={"error": f"unknown session {session_id!r}"})
        return None

    @app.get("/session/{session_id}/queries/next")
    def next_query(session_id: str):
        missing = _check(session_id)
        if missing:
            return missing
        return {"session": session_id, "items": session.query_items()}

    @app.post("/session/{session_id}/labels")
    def post_labels(session_id: str, body: dict):
        missing = _check(session_id)
        if missing:
            return missing
        raw = body.get("labels", {})
        try:
            labels = {int(k): int(v) for k, v in raw.items()}
        except (TypeError, ValueError):
            return JSONResponse(status_code=422,
                                content={"error": "labels must map index -> 0|1"})
        remaining, errors, warnings = session.submit(labels)
        if errors:
            return JSONResponse(status_code=422, content={"errors": errors})
        return {"session": session_id, "accepted": len(labels),
                "remaining": remaining, "warnings": warnings}

    @app.get("/session/{session_id}/hosts")
    def hosts(session_id: str):
        missing = _check(session_id)
        if missing:
            return missing
        with session.lock:
            return {"session": session_id, "run": session.run_ordinal,
                    "hosts": session.host_rows}

    @app.get("/session/{session_id}/status")
    def status(session_id: str):
        missing = _check(session_id)
        if missing:
            return missing
        with session.lock:
            return {
                "session": session_id,
                "run": session.run_ordinal,
                "n_runs": session.cfg.n_runs,
                "pending_items": len(session.pending.unanswered()) if session.pending else 0,
                "finished": session.finished,
                "error": session.error,
            }

    return app
