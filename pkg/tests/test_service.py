import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from fovnoise.geometry import ViewingSetup
from fovnoise.imgio import write_frame
from fovnoise.service import create_app
from fovnoise.stimuli import make_corpus


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    corpus = tmp_path_factory.mktemp("corpus")
    for i, frame in enumerate(make_corpus(size=(320, 320), n=2)):
        write_frame(corpus / f"scene_{i}.png", frame)
    w_m = 2 * 0.715 * np.tan(np.radians(22.0))
    setup = ViewingSetup((320, 320), (w_m, w_m), 0.715, (159.5, 159.5))
    app = create_app(corpus, setup, preview_width=160, seed=0)
    with TestClient(app) as tc:
        yield tc


def _fresh_preview(client, sid, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        r = client.get(f"/v1/sessions/{sid}/preview.png")
        assert r.status_code == 200
        if r.headers["X-Preview-Stale"] == "false":
            return r.content
        time.sleep(0.02)
    raise AssertionError("preview never became fresh")


def test_stimuli_listing(client):
    r = client.get("/v1/stimuli")
    assert r.status_code == 200
    assert r.json()["stimuli"] == ["scene_0", "scene_1"]


def test_create_session_table_defaults(client):
    r = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "f_e", "blur_rate": 0.34})
    assert r.status_code == 201
    desc = r.json()
    assert desc["value"] == pytest.approx(0.23)
    assert desc["range"] == [0.0, 0.4]

    r = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "s_k", "blur_rate": 0.11})
    assert r.json()["value"] == pytest.approx(22.4)

    r = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "blur_rate", "blur_rate": 0.34})
    assert r.json()["value"] == 0.0


def test_unknown_stimulus_404(client):
    r = client.post("/v1/sessions", json={"stimulus": "nope", "mode": "f_e"})
    assert r.status_code == 404


def test_unknown_mode_422(client):
    r = client.post("/v1/sessions", json={"stimulus": "scene_0", "mode": "zap"})
    assert r.status_code == 422


def test_param_clamping_and_history(client):
    sid = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "f_e", "blur_rate": 0.57}).json()["session_id"]
    r = client.post(f"/v1/sessions/{sid}/param", json={"value": 0.9})
    assert r.json()["value"] == 0.4  # clamped to the range boundary
    r = client.post(f"/v1/sessions/{sid}/param", json={"delta": -1.0})
    assert r.json()["value"] == 0.0
    r = client.post(f"/v1/sessions/{sid}/param", json={"delta": 0.0})
    desc = r.json()
    assert desc["value"] == 0.0
    assert desc["history_length"] == 4  # initial + three updates


def test_param_requires_exactly_one_field(client):
    sid = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "f_e"}).json()["session_id"]
    assert client.post(f"/v1/sessions/{sid}/param", json={}).status_code == 422
    assert client.post(f"/v1/sessions/{sid}/param",
                       json={"value": 0.1, "delta": 0.1}).status_code == 422


def test_preview_deterministic_for_identical_params(client):
    sid = client.post("/v1/sessions", json={
        "stimulus": "scene_1", "mode": "s_k", "blur_rate": 0.57}).json()["session_id"]
    client.post(f"/v1/sessions/{sid}/param", json={"value": 10.0})
    a = _fresh_preview(client, sid)
    client.post(f"/v1/sessions/{sid}/param", json={"value": 12.0})
    _fresh_preview(client, sid)
    client.post(f"/v1/sessions/{sid}/param", json={"value": 10.0})
    b = _fresh_preview(client, sid)
    assert a == b  # byte-identical for identical parameters


def test_preview_left_half_is_reference(client):
    import cv2

    sid = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "s_k", "blur_rate": 0.57}).json()["session_id"]
    png = _fresh_preview(client, sid)
    img = cv2.imdecode(np.frombuffer(png, np.uint8), cv2.IMREAD_COLOR)
    h, w = img.shape[:2]
    assert w == 160
    sid2 = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "s_k", "blur_rate": 0.11}).json()["session_id"]
    png2 = _fresh_preview(client, sid2)
    img2 = cv2.imdecode(np.frombuffer(png2, np.uint8), cv2.IMREAD_COLOR)
    # the reference half does not depend on the adjusted parameter
    assert (img[:, :w // 2] == img2[:, :w // 2]).all()


def test_accept_freezes_session(client):
    sid = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "s_f", "blur_rate": 0.34}).json()["session_id"]
    client.post(f"/v1/sessions/{sid}/param", json={"value": 2.0})
    r = client.post(f"/v1/sessions/{sid}/accept")
    assert r.status_code == 200
    assert r.json()["accepted_value"] == 2.0
    assert client.post(f"/v1/sessions/{sid}/accept").status_code == 409
    assert client.post(f"/v1/sessions/{sid}/param",
                       json={"value": 1.5}).status_code == 409


def test_session_state_replayable(client):
    sid = client.post("/v1/sessions", json={
        "stimulus": "scene_1", "mode": "f_e", "blur_rate": 0.11}).json()["session_id"]
    for v in (0.1, 0.2, 0.3):
        client.post(f"/v1/sessions/{sid}/param", json={"value": v})
    state = client.get(f"/v1/sessions/{sid}").json()
    values = [h["value"] for h in state["history"]]
    assert values == [pytest.approx(0.15), 0.1, 0.2, 0.3]


def test_export_mean_and_sem(client):
    for v in (0.2, 0.2, 0.26):
        sid = client.post("/v1/sessions", json={
            "stimulus": "scene_1", "mode": "f_e",
            "blur_rate": 0.57}).json()["session_id"]
        client.post(f"/v1/sessions/{sid}/param", json={"value": v})
        client.post(f"/v1/sessions/{sid}/accept")
    cells = client.get("/v1/export").json()["cells"]
    cell = next(c for c in cells
                if c["stimulus"] == "scene_1" and c["mode"] == "f_e"
                and c["blur_rate"] == 0.57)
    assert cell["n"] == 3
    assert cell["mean"] == pytest.approx(0.22)
    assert cell["sem"] == pytest.approx(0.02)
    assert cell["values"] == [0.2, 0.2, 0.26]


def test_export_empty_corpus_is_empty_list(tmp_path):
    w_m = 0.5
    setup = ViewingSetup((64, 64), (w_m, w_m), 0.715, (31.5, 31.5))
    app = create_app(tmp_path, setup, preview_width=64)
    with TestClient(app) as tc:
        assert tc.get("/v1/export").json() == {"cells": []}


def test_scripted_calibration_loop(client):
    # create -> 20 wheel events -> accept -> export; every debounced event
    # must eventually be answered by a fresh preview
    sid = client.post("/v1/sessions", json={
        "stimulus": "scene_0", "mode": "s_k", "blur_rate": 0.34,
        "condition": "full"}).json()["session_id"]
    step = (45.0 - 0.0) / 100.0
    observed = 0
    last = None
    for i in range(20):
        r = client.post(f"/v1/sessions/{sid}/param",
                        json={"delta": step if i % 3 else -step})
        last = r.json()["value"]
        _fresh_preview(client, sid)
        observed += 1
    assert observed >= 19  # >= 95% of the 20 events
    accept = client.post(f"/v1/sessions/{sid}/accept").json()
    assert accept["accepted_value"] == pytest.approx(last)
    cells = client.get("/v1/export").json()["cells"]
    cell = next(c for c in cells
                if c["stimulus"] == "scene_0" and c["mode"] == "s_k"
                and c["blur_rate"] == 0.34)
    assert cell["values"][-1] == pytest.approx(last)
