"""HTTP calibration service: sessions, live parameter updates, side-by-side
previews and recorded adjustment outcomes.

A session adjusts exactly one parameter for one stimulus at one foveation
strength.  The preview shows the reference's left half next to the processed
mirrored image's right half (content mirror-symmetric about the gaze, so
both halves sit at equal eccentricity), rendered at a reduced width for
interactivity.  Renders run on a worker pool with newest-wins coalescing;
a stale preview is served with a flag while the fresh one is computing.
"""

from __future__ import annotations

import argparse
import itertools
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .config import EnhanceConfig, calibrated_constants, nearest_calibrated_row
from .frames import Frame
from .geometry import ViewingSetup, sigma_map
from .imgio import encode_png, read_frame
from .pipeline import enhance, foveate

PARAM_RANGES = {
    "f_e": (0.0, 0.4),
    "s_k": (0.0, 45.0),
    "s_f": (1.0, 6.81),
    "blur_rate": (0.0, 1.0),
}
CONDITIONS = ("full", "contrast")
DEFAULT_PREVIEW_WIDTH = 1280
FIRST_RENDER_TIMEOUT_S = 60.0


class CreateSessionRequest(BaseModel):
    stimulus: str
    mode: str
    blur_rate: float = 0.34
    condition: str = "full"
    full_res: bool = False


class ParamRequest(BaseModel):
    value: float | None = None
    delta: float | None = None


@dataclass
class CalibSession:
    session_id: str
    stimulus_id: str
    mode: str
    blur_rate: float
    condition: str
    full_res: bool
    value: float
    history: list = field(default_factory=list)
    accepted_value: float | None = None
    version: int = 0
    rendered_version: int = -1
    preview_png: bytes | None = None
    rendering: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)
    first_render: threading.Event = field(default_factory=threading.Event)


def _initial_value(mode: str, blur_rate: float) -> float:
    if mode == "blur_rate":
        return 0.0  # validation task starts with no foveation
    row = nearest_calibrated_row(blur_rate)
    return {"f_e": row[1], "s_k": row[2], "s_f": row[3]}[mode]


def _clamp(mode: str, value: float) -> float:
    lo, hi = PARAM_RANGES[mode]
    return float(min(max(value, lo), hi))


class CalibService:
    """Session registry plus the deterministic preview renderer."""

    def __init__(self, corpus_dir: str | Path, setup: ViewingSetup,
                 preview_width: int = DEFAULT_PREVIEW_WIDTH, seed: int = 0,
                 workers: int = 2):
        self.corpus_dir = Path(corpus_dir)
        self.setup = setup
        self.preview_width = preview_width
        self.seed = seed
        self.sessions: dict[str, CalibSession] = {}
        self._ids = itertools.count(1)
        self._registry_lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._stimulus_cache: dict = {}
        self._render_cache: dict = {}

    # ------------------------------------------------------------- stimuli

    def stimulus_ids(self) -> list:
        return sorted(p.stem for p in self.corpus_dir.glob("*.png"))

    def _stimulus_frame(self, stimulus_id: str, width: int) -> Frame:
        key = (stimulus_id, width)
        if key not in self._stimulus_cache:
            path = self.corpus_dir / f"{stimulus_id}.png"
            if not path.exists():
                raise KeyError(stimulus_id)
            frame = read_frame(path)
            h, w = frame.shape
            if width < w:
                scale = width / w
                rgb = cv2.resize(frame.rgb, (width, int(round(h * scale))),
                                 interpolation=cv2.INTER_AREA)
                frame = Frame(np.clip(rgb, 0.0, 1.0))
            self._stimulus_cache[key] = frame
        return self._stimulus_cache[key]

    # ------------------------------------------------------------ sessions

    def create_session(self, req: CreateSessionRequest) -> CalibSession:
        if req.mode not in PARAM_RANGES:
            raise ValueError(f"unknown mode {req.mode!r}")
        if req.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {req.condition!r}")
        if f"{req.stimulus}" not in self.stimulus_ids():
            raise KeyError(req.stimulus)
        session = CalibSession(
            session_id=f"s{next(self._ids):06d}",
            stimulus_id=req.stimulus,
            mode=req.mode,
            blur_rate=req.blur_rate,
            condition=req.condition,
            full_res=req.full_res,
            value=_initial_value(req.mode, req.blur_rate),
        )
        session.history.append((time.time(), req.mode, session.value))
        with self._registry_lock:
            self.sessions[session.session_id] = session
        self._schedule_render(session)
        return session

    def get(self, session_id: str) -> CalibSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise KeyError(session_id) from None

    def set_param(self, session_id: str, req: ParamRequest) -> CalibSession:
        session = self.get(session_id)
        with session.lock:
            if session.accepted_value is not None:
                raise PermissionError("session already accepted")
            if (req.value is None) == (req.delta is None):
                raise ValueError("provide exactly one of value or delta")
            raw = req.value if req.value is not None \
                else session.value + req.delta
            session.value = _clamp(session.mode, raw)
            session.history.append((time.time(), session.mode, session.value))
            session.version += 1
        self._schedule_render(session)
        return session

    def accept(self, session_id: str) -> CalibSession:
        session = self.get(session_id)
        with session.lock:
            if session.accepted_value is not None:
                raise PermissionError("session already accepted")
            session.accepted_value = session.value
        return session

    def export(self) -> dict:
        cells: dict = {}
        for s in self.sessions.values():
            if s.accepted_value is None:
                continue
            key = (s.stimulus_id, s.blur_rate, s.mode, s.condition)
            cells.setdefault(key, []).append(s.accepted_value)
        out = []
        for (stim, blur, mode, cond), values in sorted(cells.items()):
            arr = np.asarray(values)
            sem = float(arr.std(ddof=1) / np.sqrt(arr.size)) \
                if arr.size > 1 else None
            out.append({
                "stimulus": stim, "blur_rate": blur, "mode": mode,
                "condition": cond, "n": int(arr.size),
                "mean": float(arr.mean()), "sem": sem,
                "values": [float(v) for v in values],
            })
        return {"cells": out}

    # ------------------------------------------------------------ preview

    def _session_config(self, session: CalibSession) -> EnhanceConfig:
        blur = session.value if session.mode == "blur_rate" \
            else session.blur_rate
        f_e, s_k, s_f = calibrated_constants(blur)
        values = {"f_e": f_e, "s_k": s_k, "s_f": max(s_f, 1e-6)}
        if session.mode in values:
            values[session.mode] = session.value
        # the contrast-only condition and the f_e stage show no noise
        if session.condition == "contrast" or session.mode == "f_e":
            values["s_k"] = 0.0
        return EnhanceConfig(blur_rate=blur, f_e=values["f_e"],
                             s_k=values["s_k"], s_f=max(values["s_f"], 1e-6),
                             seed=self.seed)

    def render_preview(self, session: CalibSession, value: float) -> bytes:
        width = self.setup.resolution_px[0] if session.full_res \
            else min(self.preview_width, self.setup.resolution_px[0])
        config = self._session_config(session)
        key = (session.stimulus_id, session.mode, session.condition,
               session.full_res, config.blur_rate, config.f_e, config.s_k,
               config.s_f, self.seed, width)
        if key in self._render_cache:
            return self._render_cache[key]

        ref = self._stimulus_frame(session.stimulus_id, width)
        h, w = ref.shape
        # stimulus fills the display width with square pixels; gaze center
        screen_w = self.setup.physical_size_m[0]
        preview_setup = ViewingSetup(
            resolution_px=(w, h),
            physical_size_m=(screen_w, screen_w * h / w),
            viewing_distance_m=self.setup.viewing_distance_m,
            gaze_px=((w - 1) / 2, (h - 1) / 2),
        )
        mirrored = Frame(ref.rgb[:, ::-1].copy())
        sig = sigma_map(preview_setup, config.blur_rate, config.fovea_radius)
        processed = enhance(foveate(mirrored, sig), preview_setup, config).frame
        composite = np.concatenate(
            [ref.rgb[:, :w // 2], processed.rgb[:, w // 2:]], axis=1)
        png = encode_png(Frame(composite))
        self._render_cache[key] = png
        return png

    def _schedule_render(self, session: CalibSession) -> None:
        with session.lock:
            if session.rendering:
                return  # the running worker will pick the newest version up
            session.rendering = True
        self._pool.submit(self._render_loop, session)

    def _render_loop(self, session: CalibSession) -> None:
        while True:
            with session.lock:
                version = session.version
                value = session.value
            try:
                png = self.render_preview(session, value)
            except Exception:
                with session.lock:
                    session.rendering = False
                session.first_render.set()
                raise
            with session.lock:
                session.preview_png = png
                session.rendered_version = version
                session.first_render.set()
                if session.version == version:
                    session.rendering = False
                    return

    def preview(self, session_id: str) -> tuple[bytes, bool]:
        session = self.get(session_id)
        if not session.first_render.wait(FIRST_RENDER_TIMEOUT_S):
            raise TimeoutError("first preview render timed out")
        with session.lock:
            return session.preview_png, session.rendered_version < session.version


def _descriptor(session: CalibSession) -> dict:
    with session.lock:
        return {
            "session_id": session.session_id,
            "stimulus": session.stimulus_id,
            "mode": session.mode,
            "condition": session.condition,
            "blur_rate": session.blur_rate,
            "value": session.value,
            "range": PARAM_RANGES[session.mode],
            "accepted_value": session.accepted_value,
            "history_length": len(session.history),
            "rendering": session.rendered_version < session.version,
            "preview_url": f"/v1/sessions/{session.session_id}/preview.png",
        }


def create_app(corpus_dir: str | Path, setup: ViewingSetup,
               preview_width: int = DEFAULT_PREVIEW_WIDTH,
               seed: int = 0) -> FastAPI:
    service = CalibService(corpus_dir, setup, preview_width, seed)
    app = FastAPI(title="fovnoise calibration service")
    app.state.service = service

    @app.get("/v1/stimuli")
    def stimuli():
        return {"stimuli": service.stimulus_ids()}

    @app.post("/v1/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            return _descriptor(service.create_session(req))
        except KeyError as err:
            raise HTTPException(404, f"unknown stimulus {err}") from None
        except ValueError as err:
            raise HTTPException(422, str(err)) from None

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            session = service.get(session_id)
        except KeyError:
            raise HTTPException(404, "unknown session") from None
        desc = _descriptor(session)
        with session.lock:
            desc["history"] = [
                {"t": t, "param": p, "value": v} for t, p, v in session.history]
        return desc

    @app.post("/v1/sessions/{session_id}/param")
    def set_param(session_id: str, req: ParamRequest):
        try:
            return _descriptor(service.set_param(session_id, req))
        except KeyError:
            raise HTTPException(404, "unknown session") from None
        except PermissionError as err:
            raise HTTPException(409, str(err)) from None
        except ValueError as err:
            raise HTTPException(422, str(err)) from None

    @app.post("/v1/sessions/{session_id}/accept")
    def accept(session_id: str):
        try:
            return _descriptor(service.accept(session_id))
        except KeyError:
            raise HTTPException(404, "unknown session") from None
        except PermissionError as err:
            raise HTTPException(409, str(err)) from None

    @app.get("/v1/sessions/{session_id}/preview.png")
    def preview(session_id: str):
        try:
            png, stale = service.preview(session_id)
        except KeyError:
            raise HTTPException(404, "unknown session") from None
        except TimeoutError as err:
            raise HTTPException(503, str(err)) from None
        return Response(content=png, media_type="image/png",
                        headers={"X-Preview-Stale": "true" if stale else "false"})

    @app.get("/v1/export")
    def export():
        return service.export()

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fovnoise-serve", description="interactive calibration service")
    parser.add_argument("--corpus", required=True,
                        help="directory of stimulus PNGs")
    parser.add_argument("--setup", required=True, help="viewing setup JSON")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8321)
    parser.add_argument("--preview-width", type=int,
                        default=DEFAULT_PREVIEW_WIDTH)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--demo-corpus", action="store_true",
                        help="fill an empty corpus dir with synthetic stimuli")
    args = parser.parse_args(argv)

    corpus = Path(args.corpus)
    corpus.mkdir(parents=True, exist_ok=True)
    if args.demo_corpus and not list(corpus.glob("*.png")):
        from .imgio import write_frame
        from .stimuli import make_corpus
        for i, frame in enumerate(make_corpus()):
            write_frame(corpus / f"stimulus_{i:02d}.png", frame)

    import uvicorn
    app = create_app(corpus, ViewingSetup.from_json(args.setup),
                     args.preview_width, args.seed)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    main()
