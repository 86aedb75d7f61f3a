import csv
import json

import numpy as np
import pytest

from fovnoise.cli import main
from fovnoise.geometry import ViewingSetup
from fovnoise.imgio import read_frame, write_frame, write_sigma_map
from fovnoise.stimuli import make_corpus, make_panning_sequence


@pytest.fixture
def setup_json(tmp_path):
    n = 256
    w_m = 0.715 * np.tan(np.radians(20.0))
    setup = ViewingSetup((n, n), (w_m, w_m), 0.715, (0.0, (n - 1) / 2))
    path = tmp_path / "setup.json"
    setup.to_json(path)
    return path


@pytest.fixture
def input_png(tmp_path):
    frame = make_corpus(size=(256, 256), n=1)[0]
    path = tmp_path / "input.png"
    write_frame(path, frame)
    return path


def test_enhance_disabled_is_byte_identity(tmp_path, setup_json, input_png):
    out = tmp_path / "out.png"
    code = main(["enhance", "--setup", str(setup_json),
                 "--input", str(input_png), "--output", str(out),
                 "--blur-rate", "0.57", "--fe", "0", "--sk", "0"])
    assert code == 0
    assert (read_frame(out).rgb == read_frame(input_png).rgb).all()


def test_foveate_writes_output_and_sidecar(tmp_path, setup_json, input_png):
    out = tmp_path / "fov.png"
    code = main(["foveate", "--setup", str(setup_json),
                 "--input", str(input_png), "--output", str(out),
                 "--blur-rate", "0.57", "--sidecar"])
    assert code == 0
    assert out.exists() and out.with_suffix(".json").exists()
    assert not (read_frame(out).rgb == read_frame(input_png).rgb).all()


def test_enhance_metrics_json(tmp_path, setup_json, input_png):
    out = tmp_path / "enh.png"
    metrics = tmp_path / "metrics.json"
    code = main(["enhance", "--setup", str(setup_json),
                 "--input", str(input_png), "--output", str(out),
                 "--blur-rate", "0.57", "--metrics", str(metrics)])
    assert code == 0
    data = json.loads(metrics.read_text())
    assert 0.0 <= data["clipped_fraction"] < 0.05
    assert set(data["timings_ms"]) >= {"estimation_ms", "synthesis_ms"}
    assert len(data["output_sha256"]) == 64


def test_enhance_with_sigma_map_exr(tmp_path, setup_json, input_png):
    sigma = np.zeros((256, 256))
    sigma[:, 128:] = 2.0
    sigma_path = tmp_path / "sigma.exr"
    write_sigma_map(sigma_path, sigma)
    out = tmp_path / "enh.png"
    code = main(["enhance", "--setup", str(setup_json),
                 "--input", str(input_png), "--output", str(out),
                 "--blur-rate", "0.57", "--sigma-map", str(sigma_path)])
    assert code == 0
    back = read_frame(out)
    src = read_frame(input_png)
    assert (back.rgb[:, :128] == src.rgb[:, :128]).all()


def test_sequence_determinism_and_seed_sensitivity(tmp_path, setup_json):
    frames_dir = tmp_path / "frames"
    frames_dir.mkdir()
    for i, frame in enumerate(make_panning_sequence(3, (256, 256), shift_px=4)):
        write_frame(frames_dir / f"frame_{i:03d}.png", frame)

    def run(out_name, seed):
        out_dir = tmp_path / out_name
        code = main(["sequence", "--setup", str(setup_json),
                     "--input-dir", str(frames_dir),
                     "--output-dir", str(out_dir),
                     "--blur-rate", "0.57", "--seed", str(seed)])
        assert code == 0
        return json.loads((out_dir / "sequence_metrics.json").read_text())

    a = run("out_a", 0)
    b = run("out_b", 0)
    c = run("out_c", 1)
    assert a["output_sha256"] == b["output_sha256"]
    assert a["output_sha256"] != c["output_sha256"]


def test_analyze_writes_reports_and_figures(tmp_path, input_png):
    n = 256
    w_m = 2 * 0.715 * np.tan(np.radians(22.0))
    setup = ViewingSetup((n, n), (w_m, w_m), 0.715,
                         ((n - 1) / 2, (n - 1) / 2))
    setup_path = tmp_path / "setup_centered.json"
    setup.to_json(setup_path)
    report = tmp_path / "reports"
    code = main(["analyze", "--setup", str(setup_path),
                 "--input", str(input_png), "--report", str(report),
                 "--blur-rate", "0.57", "--rings", "15",
                 "--ring-width", "4", "--impulses", "12"])
    assert code == 0
    rows = list(csv.DictReader(open(report / "band_energy.csv")))
    assert {r["condition"] for r in rows} == \
        {"reference", "foveated", "contrast", "enhanced"}
    assert (report / "band_energy.png").exists()
    assert (report / "band_energy.json").exists()


def test_analyze_sequence_reports_ssim(tmp_path, setup_json):
    frames_dir = tmp_path / "frames"
    frames_dir.mkdir()
    for i, frame in enumerate(make_panning_sequence(3, (256, 256), shift_px=4)):
        write_frame(frames_dir / f"f{i}.png", frame)
    report = tmp_path / "reports"
    code = main(["analyze", "--setup", str(setup_json),
                 "--input", str(frames_dir), "--report", str(report),
                 "--blur-rate", "0.57", "--rings", "14"])
    assert code == 0
    rows = list(csv.DictReader(open(report / "interframe_ssim.csv")))
    assert len(rows) == 4
    assert (report / "interframe_ssim.png").exists()


def test_bench_small_grid(tmp_path):
    report = tmp_path / "bench"
    code = main(["bench", "--width", "640", "--height", "360",
                 "--runs", "1", "--warmups", "0",
                 "--densities", "12,64", "--report", str(report),
                 "--blur-rate", "0.57"])
    assert code == 0
    rows = list(csv.DictReader(open(report / "bench.csv")))
    assert [int(r["impulses_per_kernel"]) for r in rows] == [12, 64]
    assert (report / "bench.png").exists()


def test_impulses_dump(tmp_path, setup_json, input_png):
    out = tmp_path / "impulses.csv"
    code = main(["impulses", "--setup", str(setup_json),
                 "--output", str(out), "--blur-rate", "0.57",
                 "--input", str(input_png)])
    assert code == 0
    rows = list(csv.DictReader(open(out)))
    assert len(rows) > 0
    assert all(float(r["frequency_cpp"]) <= 0.5 for r in rows)


def test_bad_input_gives_io_exit_code(tmp_path, setup_json, capsys):
    code = main(["enhance", "--setup", str(setup_json),
                 "--input", str(tmp_path / "missing.png"),
                 "--output", str(tmp_path / "out.png")])
    assert code == 3
    err = json.loads(capsys.readouterr().err.strip())
    assert err["exit_code"] == 3


def test_bad_config_gives_config_exit_code(tmp_path, setup_json, input_png,
                                           capsys):
    code = main(["enhance", "--setup", str(setup_json),
                 "--input", str(input_png),
                 "--output", str(tmp_path / "out.png"),
                 "--fe", "0.9"])
    assert code == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["exit_code"] == 2
