import json
import math
import time

import pytest

from qpeh import __version__
from qpeh.cli import ConfigError, RunConfig, load_config, main, run_entropy


def _rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    head = lines[0].split(",")
    return [dict(zip(head, ln.split(","))) for ln in lines[1:]]


def test_figure1_smoke_is_fast(tmp_path):
    start = time.perf_counter()
    assert main(["figure1", "--ell", "16", "--time-ratio", "0.1", "--out", str(tmp_path)]) == 0
    assert time.perf_counter() - start < 1.0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["figure1_summary.csv"] + [f"figure1_z{z}.csv" for z in (1, 2, 3, 4)]
    text = (tmp_path / "figure1_z1.csv").read_text()
    assert text.startswith(f"# qpeh {__version__}\n")
    assert "\r" not in text
    rows = _rows(tmp_path / "figure1_z1.csv")
    assert len(rows) == 15 and list(rows[0]) == ["j", "z", "t", "re_exact", "im_exact", "re_pred", "im_pred"]


def test_header_echoes_config(tmp_path):
    main(["figure1", "--ell", "12", "--time-ratio", "0.1", "inf", "--z", "1", "--out", str(tmp_path)])
    line = [ln for ln in (tmp_path / "figure1_z1.csv").read_text().splitlines() if ln.startswith("# config: ")][0]
    cfg = json.loads(line[len("# config: "):])
    assert cfg["ell"] == 12 and cfg["time_ratios"] == [0.1, "inf"] and cfg["z_list"] == [1]
    ts = {r["t"] for r in _rows(tmp_path / "figure1_z1.csv")}
    assert ts == {"1.2000000000000002", "inf"}


def test_deterministic_and_parallel(tmp_path):
    args = ["figure2", "--ell", "24", "--time-ratio", "0.1", "0.3", "inf", "--z", "1", "3"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    main(args + ["--out", str(tmp_path / "c"), "--jobs", "3"])
    for p in sorted((tmp_path / "a").iterdir()):
        body = lambda d: [ln for ln in (tmp_path / d / p.name).read_text().splitlines() if "output_dir" not in ln and "jobs" not in ln]  # noqa: E731
        assert (tmp_path / "b" / p.name).read_bytes() != b"" and body("a") == body("b") == body("c")


def test_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"ell": 20, "time_ratios": [0.2, "inf"], "z_list": [1], "cutoff": 1e-6}))
    ns = type("A", (), {"config": cfg, "ell": 22, "time_ratios": None, "z_list": None})()
    c = load_config("figure1", ns)
    assert c.ell == 22 and c.time_ratios == (0.2, math.inf) and c.cutoff == 1e-6
    cfg.write_text(json.dumps({"nonsense": 1}))
    with pytest.raises(ConfigError):
        load_config("figure1", ns)


@pytest.mark.parametrize(
    "args",
    [
        ["figure1", "--ell", "-3"],
        ["figure1", "--ell", "10", "--z", "12"],
        ["entropy", "--alpha", "0"],
        ["figure1", "--cutoff", "0.7"],
        ["figure1", "--time-ratio", "-1"],
    ],
)
def test_validation_exit_code(args, tmp_path):
    assert main(args + ["--out", str(tmp_path)]) == 1
    assert not any(tmp_path.iterdir())


def test_entropy_rows(tmp_path):
    assert main(["entropy", "--ell", "40", "--time-ratio", "0", "0.1", "0.2", "inf", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "entropy.csv")
    assert [(r["t"], r["alpha"]) for r in rows[:2]] == [("0", "1"), ("0", "2")]
    assert float(rows[0]["S_exact"]) < 1e-10 and float(rows[0]["S_qpp"]) == 0.0
    s1 = [float(r["S_exact"]) for r in rows if r["alpha"] == "1"]
    assert s1 == sorted(s1)


def test_entropy_alpha_continuity(tmp_path):
    base = RunConfig(ell=40, time_ratios=(0.2,), z_list=(), alpha_list=(1 - 1e-3, 1.0, 1 + 1e-3), output_dir=str(tmp_path))
    rows = _rows(run_entropy(base)[0])
    s = [float(r["S_exact"]) for r in rows]
    q = [float(r["S_qpp"]) for r in rows]
    assert abs(s[0] - s[1]) < 1e-2 and abs(s[2] - s[1]) < 1e-2
    assert abs(q[0] - q[1]) < 1e-2 and abs(q[2] - q[1]) < 1e-2


def test_cft_check_and_zero_beta(tmp_path):
    assert main(["cft-check", "--ell", "100", "--out", str(tmp_path)]) == 0
    assert all(float(r["max_deviation"]) <= 1e-7 for r in _rows(tmp_path / "cft_check.csv"))
    assert main(["cft-check", "--ell", "50", "--beta", "0", "--out", str(tmp_path / "zero")]) == 0
    assert all(float(r["max_deviation"]) == 0 for r in _rows(tmp_path / "zero" / "cft_check.csv"))


def test_check_breach_exit_code(tmp_path):
    # Stationary central couplings at ell = 60 sit about 2.77/ell off the momentum integral.
    assert main(["gge", "--ell", "60", "--out", str(tmp_path)]) == 2
    assert (tmp_path / "gge.csv").exists()


def test_quad_tol_below_precision_rejected(tmp_path):
    assert main(["cft-check", "--quad-tol", "1e-18", "--out", str(tmp_path)]) == 1


def test_oracle_check(tmp_path):
    assert main(["oracle-check", "--out", str(tmp_path)]) == 0
    assert all(float(r["max_abs_deviation"]) <= 1e-8 for r in _rows(tmp_path / "oracle_check.csv"))


def test_json_format(tmp_path):
    assert main(["gge", "--ell", "60", "--z", "0", "1", "--format", "json", "--out", str(tmp_path)]) in (0, 2)
    doc = json.loads((tmp_path / "gge.json").read_text())
    assert doc["version"] == __version__ and doc["columns"][0] == "z" and len(doc["rows"]) == 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        main(["oracle-check", "--time-ratio", "0", "--out", str(blocker / "sub")])
