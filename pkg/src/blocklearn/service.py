"""HTTP session service for interactive labeling.

One human operator labels nodes suggested by a campaign; sampling runs in a
background thread so the client only waits on sampling latency. Each session
is a single-writer state machine: mutations take the session lock, readers
get versioned snapshots, and GET /state long-polls on the version counter.

Error payloads are {"code": ..., "message": ...}.
"""

from __future__ import annotations

import json
import math
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .campaign import Campaign
from .dataio import BUILTIN_DATASETS, DatasetBundle, load_edge_list, load_labels
from .graph import LabelingError
from .likelihood import PriorConfig
from .sampler import ChainConfig
from .strategies import STRATEGIES

LONG_POLL_TIMEOUT = 25.0


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class CreateSessionRequest(BaseModel):
    dataset: str
    k: int | None = None
    strategy: str = "mi"
    seed: int = 0


class LabelRequest(BaseModel):
    node: int
    label: int
    version: int


class ControlRequest(BaseModel):
    action: str
    strategy: str | None = None


@dataclass
class Session:
    id: str
    dataset: str
    bundle: DatasetBundle
    campaign: Campaign
    phase: str = "sampling"            # sampling | awaiting-label | paused | finished
    version: int = 0
    suggested_node: int | None = None
    scores: list | None = None
    marginals: list | None = None
    accuracy: dict | None = None
    sampling_started: float | None = None
    pause_requested: bool = False
    last_label: tuple[int, int, int] | None = None   # (node, label, version applied at)
    lock: threading.Lock = field(default_factory=threading.Lock)
    changed: threading.Condition = field(init=False)

    def __post_init__(self):
        self.changed = threading.Condition(self.lock)


def _load_named_dataset(spec: str, directed: bool) -> tuple[str, DatasetBundle]:
    """Parse a 'name=edges[:labels]' CLI dataset spec."""
    if "=" not in spec:
        raise ValueError(f"dataset spec {spec!r} must look like name=edges[:labels]")
    name, paths = spec.split("=", 1)
    if ":" in paths:
        edge_path, label_path = paths.split(":", 1)
    else:
        edge_path, label_path = paths, None
    graph = load_edge_list(edge_path, directed)
    truth = class_names = None
    if label_path:
        truth, class_names = load_labels(label_path, graph)
    return name, DatasetBundle(graph, truth, class_names, name=name)


def build_registry(dataset_specs, directed: bool = False) -> dict[str, DatasetBundle]:
    registry = {name: loader() for name, loader in BUILTIN_DATASETS.items()}
    for spec in dataset_specs or ():
        name, bundle = _load_named_dataset(spec, directed)
        registry[name] = bundle
    return registry


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


class SessionManager:
    def __init__(self, registry: dict[str, DatasetBundle], chain_config: ChainConfig,
                 prior: PriorConfig | None = None, workers: int = 1,
                 state_dir: str | None = None):
        self.registry = registry
        self.chain_config = chain_config
        self.prior = prior or PriorConfig()
        self.workers = workers
        self.state_dir = Path(state_dir) if state_dir else None
        self.sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()

    def create(self, req: CreateSessionRequest) -> Session:
        if req.dataset not in self.registry:
            raise ServiceError(404, "unknown-dataset",
                               f"no dataset named {req.dataset!r}")
        if req.strategy not in STRATEGIES:
            raise ServiceError(400, "bad-strategy",
                               f"strategy must be one of {', '.join(STRATEGIES)}")
        bundle = self.registry[req.dataset]
        k = req.k
        if k is None:
            if bundle.truth is None:
                raise ServiceError(400, "missing-k",
                                   "dataset has no labels; pass k explicitly")
            k = bundle.truth.k
        if k < 2:
            raise ServiceError(400, "bad-k", "k must be at least 2")
        campaign = Campaign(bundle.graph, k, req.strategy, self.prior,
                            self.chain_config, seed=req.seed, truth=bundle.truth,
                            workers=self.workers)
        session = Session(id=uuid.uuid4().hex[:12], dataset=req.dataset,
                          bundle=bundle, campaign=campaign)
        with self._registry_lock:
            self.sessions[session.id] = session
        self._start_sampling(session)
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise ServiceError(404, "unknown-session",
                               f"no session {session_id!r}") from None

    # -- background sampling ------------------------------------------------

    def _start_sampling(self, session: Session) -> None:
        session.phase = "sampling"
        session.sampling_started = time.monotonic()
        thread = threading.Thread(target=self._sample_worker, args=(session,),
                                  daemon=True)
        thread.start()

    def _sample_worker(self, session: Session) -> None:
        # The campaign object is only touched here while phase == "sampling",
        # and by the label handler while phase == "awaiting-label", so the
        # two never overlap.
        suggestion, sv, acc = session.campaign.propose()
        with session.lock:
            session.suggested_node = suggestion
            session.scores = [_json_safe(float(x)) for x in sv.scores]
            session.marginals = [[float(x) for x in row]
                                 for row in acc.mean_conditional]
            session.accuracy = session.campaign._accuracy_curve(acc)
            session.sampling_started = None
            if suggestion is None:
                session.campaign.accept(None, None)
                session.phase = "finished"
                self._persist(session)
            else:
                session.phase = "paused" if session.pause_requested else "awaiting-label"
                session.pause_requested = False
            session.version += 1
            session.changed.notify_all()

    def _persist(self, session: Session) -> None:
        if self.state_dir is None:
            return
        self.state_dir.mkdir(parents=True, exist_ok=True)
        payload = session.campaign.trajectory().to_dict()
        tmp = self.state_dir / f"{session.id}.json.tmp"
        tmp.write_text(json.dumps(payload))
        tmp.replace(self.state_dir / f"{session.id}.json")

    # -- request handlers ----------------------------------------------------

    def graph_payload(self, session: Session) -> dict:
        g = session.bundle.graph
        return {
            "n": g.n,
            "directed": g.directed,
            "nodes": [{"id": v, "name": g.name_of(v), "degree": g.degree(v)}
                      for v in range(g.n)],
            "edges": [[int(u), int(v)] for u, v in g.edges],
            "k": session.campaign.k,
            "class_names": session.bundle.class_names,
        }

    def state_payload(self, session: Session) -> dict:
        camp = session.campaign
        explored = [{"node": v, "label": lab} for v, lab in camp.partial.explored]
        elapsed = (time.monotonic() - session.sampling_started
                   if session.sampling_started is not None else None)
        return {
            "session_id": session.id,
            "dataset": session.dataset,
            "phase": session.phase,
            "version": session.version,
            "stage": camp.stage,
            "strategy": camp.strategy,
            "k": camp.k,
            "suggested_node": session.suggested_node,
            "scores": session.scores,
            "marginals": session.marginals,
            "explored": explored,
            "accuracy": session.accuracy,
            "sampling_seconds": elapsed,
        }

    def wait_for_state(self, session: Session, since: int | None) -> dict:
        with session.lock:
            if since is not None:
                deadline = time.monotonic() + LONG_POLL_TIMEOUT
                while session.version <= since:
                    remaining = deadline - time.monotonic()
                    if remaining <= 0 or not session.changed.wait(remaining):
                        break
            return self.state_payload(session)

    def post_label(self, session: Session, req: LabelRequest) -> dict:
        with session.lock:
            if session.last_label == (req.node, req.label, req.version):
                return {"ok": True, "version": session.version, "duplicate": True}
            if session.phase == "finished":
                raise ServiceError(409, "finished", "session already finished")
            if session.phase == "sampling":
                raise ServiceError(409, "sampling",
                                   "sampling in progress; wait for awaiting-label")
            if session.phase == "paused":
                raise ServiceError(409, "paused", "session paused; resume first")
            if req.version != session.version:
                raise ServiceError(409, "stale-version",
                                   f"version {req.version} is stale "
                                   f"(current {session.version})")
            camp = session.campaign
            if not 0 <= req.node < camp.graph.n:
                raise ServiceError(400, "bad-node",
                                   f"node {req.node} out of range")
            if camp.partial.contains(req.node):
                raise ServiceError(409, "node-explored",
                                   f"node {req.node} already has a label")
            if not 0 <= req.label < camp.k:
                raise ServiceError(400, "bad-label",
                                   f"label {req.label} out of range for k={camp.k}")
            try:
                camp.accept(req.node, req.label)
            except (LabelingError, RuntimeError) as exc:
                raise ServiceError(409, "rejected", str(exc)) from None
            session.last_label = (req.node, req.label, req.version)
            session.suggested_node = None
            self._persist(session)
            if camp.stage >= camp.graph.n:
                session.phase = "finished"
            else:
                self._start_sampling(session)
            session.version += 1
            session.changed.notify_all()
            return {"ok": True, "version": session.version, "stage": camp.stage}

    def control(self, session: Session, req: ControlRequest) -> dict:
        with session.lock:
            if req.action == "export":
                return session.campaign.trajectory().to_dict()
            if req.action == "pause":
                if session.phase == "sampling":
                    # takes effect when the current sampling pass commits
                    session.pause_requested = True
                elif session.phase == "awaiting-label":
                    session.phase = "paused"
                else:
                    raise ServiceError(409, "bad-transition",
                                       f"cannot pause while {session.phase}")
            elif req.action == "resume":
                if session.phase == "paused":
                    session.phase = "awaiting-label"
                elif session.pause_requested:
                    session.pause_requested = False
                else:
                    raise ServiceError(409, "bad-transition",
                                       f"cannot resume while {session.phase}")
            elif req.action == "set-strategy":
                if req.strategy not in STRATEGIES:
                    raise ServiceError(400, "bad-strategy",
                                       f"strategy must be one of "
                                       f"{', '.join(STRATEGIES)}")
                if session.phase not in ("awaiting-label", "paused"):
                    raise ServiceError(409, "bad-transition",
                                       f"cannot change strategy while "
                                       f"{session.phase}")
                session.campaign.set_strategy(req.strategy)
                # The pending suggestion was produced by the old strategy;
                # rescore under the new one before the next label.
                session.suggested_node = None
                session.version += 1
                session.changed.notify_all()
                if session.phase == "awaiting-label":
                    self._start_sampling(session)
                return {"ok": True, "version": session.version}
            else:
                raise ServiceError(400, "bad-action",
                                   f"unknown action {req.action!r}")
            session.version += 1
            session.changed.notify_all()
            return {"ok": True, "version": session.version}


def create_app(registry: dict[str, DatasetBundle], chain_config: ChainConfig,
               prior: PriorConfig | None = None, workers: int = 1,
               state_dir: str | None = None) -> FastAPI:
    manager = SessionManager(registry, chain_config, prior, workers, state_dir)
    app = FastAPI(title="blocklearn session service")
    app.state.manager = manager
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ServiceError)
    async def _service_error(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.post("/api/session")
    def create_session(req: CreateSessionRequest):
        session = manager.create(req)
        return {"session_id": session.id, "dataset": session.dataset,
                "k": session.campaign.k, "strategy": session.campaign.strategy,
                "version": session.version, "phase": session.phase}

    @app.get("/api/session/{session_id}/graph")
    def get_graph(session_id: str):
        return manager.graph_payload(manager.get(session_id))

    @app.get("/api/session/{session_id}/state")
    def get_state(session_id: str, since: int | None = None):
        return manager.wait_for_state(manager.get(session_id), since)

    @app.post("/api/session/{session_id}/label")
    def post_label(session_id: str, req: LabelRequest):
        return manager.post_label(manager.get(session_id), req)

    @app.post("/api/session/{session_id}/control")
    def control(session_id: str, req: ControlRequest):
        return manager.control(manager.get(session_id), req)

    return app
