import hashlib

import numpy as np

from dre.cli import main
from dre.env import Window, sample_environment
from dre.models import ModelId
from dre.snapshot import load_snapshot


def run_cli(*argv):
    return main(list(argv))


def test_gen_roundtrip(tmp_path):
    out = tmp_path / "env.dre"
    assert run_cli("gen", "--model", "NE-SW", "--p", "0.5", "--radius", "6",
                   "--seed", "42", "--out", str(out)) == 0
    env = load_snapshot(str(out))
    ref = sample_environment(ModelId("NE-SW", 0.5), Window.centered(6), 42)
    assert np.array_equal(env.arrows, ref.arrows)


def test_gen_deterministic_and_seed_sensitive(tmp_path):
    digests = set()
    for seed in range(20):
        out = tmp_path / f"e{seed}.dre"
        run_cli("gen", "--model", "EW-NS", "--p", "0.4", "--radius", "5",
                "--seed", str(seed), "--out", str(out))
        digests.add(hashlib.sha256(out.read_bytes()).hexdigest())
    assert len(digests) == 20
    again = tmp_path / "again.dre"
    run_cli("gen", "--model", "EW-NS", "--p", "0.4", "--radius", "5",
            "--seed", "0", "--out", str(again))
    assert hashlib.sha256(again.read_bytes()).hexdigest() in digests


def test_usage_errors_exit_2(capsys):
    assert run_cli("estimate", "--model", "NE-.", "--p", "1.5",
                   "--radius", "5", "--trials", "5") == 2
    assert run_cli("estimate", "--model", "not-a-model", "--p", "0.5",
                   "--radius", "5", "--trials", "5") == 2
    assert run_cli("classify", "--p", "0.5", "--radius", "5", "--trials", "5") == 2


def test_estimate_csv(tmp_path):
    out = tmp_path / "est.csv"
    assert run_cli("estimate", "--model", "osp", "--p", "0.75", "--radius", "20",
                   "--trials", "100", "--seed", "3", "--format", "csv",
                   "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "model,p,M,trials,statistic,estimate,se,seed,seconds"
    assert lines[1].startswith("NE-.,0.75,20,100,reach_C,")


def test_cluster_dump(tmp_path):
    out = tmp_path / "cluster.txt"
    assert run_cli("cluster", "--model", "NE-SW", "--p", "0.5", "--radius", "4",
                   "--seed", "7", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert all(line.startswith("site ") for line in lines)
    parts = lines[0].split()
    assert len(parts) == 5 and parts[3] in "01" and parts[4] in "01"


def test_render_deterministic_with_legend(tmp_path):
    a = tmp_path / "a.pgm"
    b = tmp_path / "b.pgm"
    for path in (a, b):
        assert run_cli("render", "--model", "NE-SW", "--p", "0.6", "--radius", "8",
                       "--seed", "5", "--format", "pgm", "--out", str(path)) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().startswith(b"P2\n17 17\n255\n")
    legend = (tmp_path / "a.pgm.legend.txt").read_text()
    from dre.clusters import backward_cluster, forward_cluster

    env = sample_environment(ModelId("NE-SW", 0.6), Window.centered(8), 5)
    fwd = forward_cluster(env, (0, 0))
    bwd = backward_cluster(env, (0, 0))
    assert f"forward_count={len(fwd.sites)}" in legend
    assert f"backward_count={len(bwd.sites)}" in legend
    assert f"communicating_count={len(fwd.sites & bwd.sites)}" in legend


def test_render_svg(tmp_path):
    out = tmp_path / "r.svg"
    assert run_cli("render", "--model", "EW-NS", "--p", "0.5", "--radius", "5",
                   "--seed", "2", "--format", "svg", "--out", str(out)) == 0
    assert out.read_bytes().startswith(b"<svg")
    assert run_cli("render", "--model", "EW-NS", "--p", "0.5", "--radius", "5",
                   "--seed", "2", "--format", "svg") == 2  # --out required


def test_bounds_keys(tmp_path):
    out = tmp_path / "bounds.txt"
    assert run_cli("bounds", "--out", str(out)) == 0
    text = out.read_text()
    assert "eps0.d2=0.16730" in text
    assert "otsp.lower_bound.paper=0.5466" in text


def test_classify_single_and_census(tmp_path):
    out = tmp_path / "one.txt"
    assert run_cli("classify", "--model", "NE-SW", "--p", "0.9", "--radius", "20",
                   "--seed", "4", "--trials", "1", "--out", str(out)) == 0
    assert out.read_text().startswith("shape=")
    out2 = tmp_path / "census.txt"
    assert run_cli("classify", "--model", "NE-SW", "--p", "0.9", "--radius", "15",
                   "--seed", "4", "--trials", "10", "--out", str(out2)) == 0
    assert "count[BlockedAbove]=" in out2.read_text()


def test_verify_duality_subcommand(tmp_path):
    out = tmp_path / "verify.txt"
    assert run_cli("verify", "duality", "--model", "NE-SW", "--p", "0.9",
                   "--radius", "15", "--trials", "15", "--seed", "6",
                   "--out", str(out)) == 0
    text = out.read_text()
    assert "blocked_above=" in text and "verified=" in text


def test_static_classify_output(tmp_path):
    out = tmp_path / "sc.txt"
    assert run_cli("static-classify", "--model", "N-E", "--p", "0.5",
                   "--out", str(out)) == 0
    text = out.read_text()
    assert "theta_plus=one" in text
    assert "theta_minus=zero" in text


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "dre.cfg"
    cfg.write_text("p = 0.9\nradius = 4\nseed = 11\n# comment\n")
    out1 = tmp_path / "c1.dre"
    assert run_cli("gen", "--model", "NE-SW", "--config", str(cfg),
                   "--out", str(out1)) == 0
    env1 = load_snapshot(str(out1))
    assert env1.model.p == 0.9 and env1.window == Window.centered(4)
    out2 = tmp_path / "c2.dre"
    assert run_cli("gen", "--model", "NE-SW", "--config", str(cfg),
                   "--p", "0.2", "--out", str(out2)) == 0
    assert load_snapshot(str(out2)).model.p == 0.2

    assert run_cli("gen", "--model", "NE-SW", "--config",
                   str(tmp_path / "missing.cfg"), "--out", str(out2)) == 2


def test_bisect_cli_synthetic(tmp_path):
    out = tmp_path / "bisect.txt"
    assert run_cli("bisect", "--model", "osp", "--radius", "20",
                   "--trials", "150", "--seed", "2", "--tol", "0.02",
                   "--out", str(out)) == 0
    text = out.read_text()
    assert text.startswith("p_hat=")
    assert run_cli("bisect", "--model", "NE-SW", "--radius", "10",
                   "--trials", "10") == 2
