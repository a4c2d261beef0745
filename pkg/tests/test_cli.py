import numpy as np
import pytest

from efs.cli import load_config_file, main
from efs.persist import read_csv, read_efsb, write_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, dict(line.split("=", 1) for line in out.splitlines() if "=" in line)


@pytest.fixture()
def mixture_file(tmp_path, capsys):
    path = tmp_path / "mix.efsb"
    code, _ = run(capsys, "dataset", "--kind", "mixture", "--n", "120",
                  "--seed", "7", "--out", str(path))
    assert code == 0
    return path


@pytest.fixture()
def trajectory_file(tmp_path, capsys, mixture_file):
    path = tmp_path / "traj.efsb"
    code, _ = run(capsys, "forward", "--data", str(mixture_file), "--gamma", "0.1",
                  "--k", "5", "--s", "1", "--epsilon", "0.001", "--out", str(path))
    assert code == 0
    return path


# ---------------------------------------------------------------- config files

def test_config_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# a comment\ngamma = 0.1\nk=31   # trailing comment\n\ns = d-2\n")
    parsed = load_config_file(cfg)
    assert parsed == {"gamma": "0.1", "k": "31", "s": "d-2"}


def test_config_malformed(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma 0.1\n")
    with pytest.raises(ValueError, match="line 1"):
        load_config_file(cfg)


def test_flags_override_config(tmp_path, capsys, mixture_file):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma = 0.5\nk = 2\ns = 1\nepsilon = 0.001\n")
    out_a = tmp_path / "a.efsb"
    code, _ = run(capsys, "forward", "--config", str(cfg),
                  "--data", str(mixture_file), "--out", str(out_a))
    assert code == 0
    assert len(read_efsb(out_a).snapshots) == 3  # k from the config file
    out_b = tmp_path / "b.efsb"
    code, _ = run(capsys, "forward", "--config", str(cfg), "--k", "4",
                  "--data", str(mixture_file), "--out", str(out_b))
    assert code == 0
    assert len(read_efsb(out_b).snapshots) == 5  # flag wins


# ---------------------------------------------------------------- dataset

def test_dataset_mixture(tmp_path, capsys):
    out = tmp_path / "mix.efsb"
    code, kv = run(capsys, "dataset", "--kind", "mixture", "--n", "400",
                   "--seed", "7", "--out", str(out))
    assert code == 0
    assert (kv["n"], kv["d"]) == ("400", "2")
    blob = read_efsb(out)
    assert blob.snapshots[0].shape == (400, 2)
    assert blob.labels is not None


def test_dataset_swiss_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, kv = run(capsys, "dataset", "--kind", "swiss", "--n", "500",
                   "--noise", "0.2", "--seed", "7", "--out", str(a))
    assert code == 0
    assert kv["d"] == "2"
    code, _ = run(capsys, "dataset", "--kind", "swiss", "--n", "500",
                  "--noise", "0.2", "--seed", "7", "--out", str(b))
    assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_dataset_unknown_kind(tmp_path, capsys):
    # argparse screens the flag, so smuggle the bad kind in via config file
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kind = spiral\nn = 10\n")
    code, _ = run(capsys, "dataset", "--config", str(cfg),
                  "--out", str(tmp_path / "x.csv"))
    assert code == 2


# ---------------------------------------------------------------- forward

def test_forward_reference_settings_snapshot_count(tmp_path, capsys):
    data = tmp_path / "mix.efsb"
    run(capsys, "dataset", "--kind", "mixture", "--n", "400", "--seed", "0",
        "--out", str(data))
    out = tmp_path / "traj.efsb"
    code, kv = run(capsys, "forward", "--data", str(data), "--gamma", "0.1",
                   "--k", "31", "--s", "1", "--epsilon", "0.001", "--out", str(out))
    assert code == 0
    assert kv["snapshots"] == "32"
    assert len(read_efsb(out).snapshots) == 32
    # energy trace emitted alongside, strictly decreasing first-to-last
    energy = (str(out) + ".energy.csv")
    rows = open(energy).read().splitlines()
    assert rows[0] == "iteration,energy"
    values = [float(r.split(",")[1]) for r in rows[1:]]
    assert len(values) == 32
    assert values[-1] < values[0]


def test_forward_rejects_gamma_zero(tmp_path, capsys, mixture_file):
    code, _ = run(capsys, "forward", "--data", str(mixture_file), "--gamma", "0",
                  "--k", "3", "--s", "1", "--out", str(tmp_path / "t.efsb"))
    assert code == 2


def test_forward_symbolic_exponent(tmp_path, capsys, mixture_file):
    out = tmp_path / "t.efsb"
    code, _ = run(capsys, "forward", "--data", str(mixture_file), "--gamma", "0.05",
                  "--k", "2", "--s", "d-2", "--out", str(out))
    assert code == 0
    assert read_efsb(out).s == 0.0  # d=2 resolves d-2 to 0


def test_forward_missing_data_file(tmp_path, capsys):
    code, _ = run(capsys, "forward", "--data", str(tmp_path / "nope.efsb"),
                  "--gamma", "0.1", "--k", "2", "--s", "1",
                  "--out", str(tmp_path / "t.efsb"))
    assert code == 4


def test_forward_singularity_exit_code(tmp_path, capsys):
    data = tmp_path / "dup.csv"
    write_csv(data, np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]))
    code, _ = run(capsys, "forward", "--data", str(data), "--gamma", "0.1",
                  "--k", "2", "--s", "1", "--epsilon", "0",
                  "--out", str(tmp_path / "t.efsb"))
    assert code == 3


# ---------------------------------------------------------------- sample

def test_sample_sphere_mode(tmp_path, capsys, trajectory_file):
    out = tmp_path / "samples.csv"
    code, kv = run(capsys, "sample", "--traj", str(trajectory_file),
                   "--mode", "sphere", "--m", "5", "--beta", "0.1", "--T", "200",
                   "--seed", "3", "--out", str(out))
    assert code == 0
    assert kv["m"] == "5"
    raw = out.read_text().splitlines()
    assert raw[0].endswith(",seed")
    assert len(raw) == 6


def test_sample_replay_bit_identical(tmp_path, capsys, trajectory_file):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, _ = run(capsys, "sample", "--traj", str(trajectory_file),
                  "--mode", "sphere", "--m", "4", "--beta", "0.1", "--T", "200",
                  "--seed", "5", "--out", str(a))
    assert code == 0
    code, _ = run(capsys, "sample", "--traj", str(trajectory_file),
                  "--replay", str(a), "--beta", "0.1", "--T", "200", "--out", str(b))
    assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_interpolation_path(tmp_path, capsys, trajectory_file):
    out = tmp_path / "interp.csv"
    code, kv = run(capsys, "sample", "--traj", str(trajectory_file),
                   "--mode", "interp", "--i", "3", "--j", "17", "--steps", "20",
                   "--beta", "0.1", "--T", "200", "--out", str(out))
    assert code == 0
    assert kv["m"] == "20"
    assert len(out.read_text().splitlines()) == 21


def test_sample_interp_needs_steps(tmp_path, capsys, trajectory_file):
    code, _ = run(capsys, "sample", "--traj", str(trajectory_file),
                  "--mode", "interp", "--i", "3", "--beta", "0.1", "--T", "50",
                  "--out", str(tmp_path / "x.csv"))
    assert code == 2


def test_sample_svg_output(tmp_path, capsys, trajectory_file):
    out = tmp_path / "s.csv"
    pic = tmp_path / "s.svg"
    code, kv = run(capsys, "sample", "--traj", str(trajectory_file),
                   "--mode", "sphere", "--m", "3", "--beta", "0.1", "--T", "100",
                   "--out", str(out), "--svg", str(pic))
    assert code == 0
    assert kv["svg"] == str(pic)
    body = pic.read_text()
    assert body.startswith("<svg")
    assert body.count("<polygon") == 3  # one star per generated sample
    assert body.count("<circle") == 120  # one dot per training point


# ---------------------------------------------------------------- metrics

def test_metrics_uniformity_snapshots(tmp_path, capsys, trajectory_file):
    code, kv_final = run(capsys, "metrics", "--points", str(trajectory_file))
    assert code == 0
    assert "radial_ks" in kv_final and "angular_ks" in kv_final
    code, kv_first = run(capsys, "metrics", "--points", str(trajectory_file),
                         "--snapshot", "0")
    assert code == 0
    assert 0.0 <= float(kv_final["radial_ks"]) <= 1.0
    assert float(kv_first["radial_ks"]) != float(kv_final["radial_ks"])


def test_metrics_mmd_halves(tmp_path, capsys, mixture_file):
    blob = read_efsb(mixture_file)
    pts = blob.snapshots[0]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(a, pts[: len(pts) // 2])
    write_csv(b, pts[len(pts) // 2:])
    code, kv = run(capsys, "metrics", "--mmd", str(a), str(b))
    assert code == 0
    assert float(kv["mmd2"]) >= -1e-12


def test_metrics_nn_fields(tmp_path, capsys, mixture_file):
    code, kv = run(capsys, "metrics", "--nn", str(mixture_file), str(mixture_file))
    assert code == 0
    assert float(kv["min_nn"]) == 0.0
    assert set(kv) >= {"min_nn", "mean_nn", "self_nn_mean"}


def test_metrics_nothing_to_do(capsys):
    code, _ = run(capsys, "metrics")
    assert code == 2


# ---------------------------------------------------------------- roundtrip

def test_roundtrip_gamma_zero_degenerate(capsys):
    code, kv = run(capsys, "roundtrip", "--gamma", "0", "--k", "2", "--n", "50",
                   "--T", "10", "--indices", "5")
    assert code == 0
    assert float(kv["max_recovery_error"]) == 0.0
    assert kv["status"] == "pass"


def test_roundtrip_paper_mode_reports_only(capsys):
    code, kv = run(capsys, "roundtrip", "--n", "60", "--k", "3", "--T", "100",
                   "--snapshot-mode", "paper", "--indices", "4")
    assert code == 0
    assert kv["status"] == "reported"
    assert float(kv["max_recovery_error"]) >= 0.0
