import subprocess
import sys

import pytest

from semioblivious.cli import main
from semioblivious.graphs import gadget_c, load_graph
from semioblivious.routing_core import Demand, dump_demand, load_path_system
from semioblivious.oblivious import load_routing, valiant_routing
from semioblivious.sampler import alpha_sample


def run(*args):
    return main([str(a) for a in args])


def test_gen_and_usage_errors(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert run("gen", "--kind", "gadget-c", "--n", 4, "--k", 2, "--out", out) == 0
    assert load_graph(out.read_text()) == gadget_c(4, 2)
    capsys.readouterr()
    assert run("gen", "--kind", "hypercube", "--out", out) == 1
    assert "needs --dim" in capsys.readouterr().err
    assert run("gen", "--kind", "sphere", "--out", out) == 1
    assert "invalid choice" in capsys.readouterr().err
    assert run("frobnicate") == 1
    assert run() == 1


def test_validation_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("graph 3 1\n1 2\n")
    assert run("oblivious", "--graph", bad, "--backend", "valiant", "--out", tmp_path / "r.txt") == 2
    assert run("opt", "--graph", tmp_path / "missing.txt", "--demand", bad) == 2
    ring = tmp_path / "ring.txt"
    ring.write_text("graph 4 4\n1 2\n2 3\n3 4\n4 1\n")
    assert run("oblivious", "--graph", ring, "--backend", "valiant", "--out", tmp_path / "r.txt") == 2


def test_sample_is_deterministic_and_thin(tmp_path):
    g = tmp_path / "g.txt"
    run("gen", "--kind", "hypercube", "--dim", 3, "--out", g)
    r = tmp_path / "r.txt"
    assert run("oblivious", "--graph", g, "--backend", "valiant", "--out", r) == 0
    a, b, counts = tmp_path / "a.txt", tmp_path / "b.txt", tmp_path / "c.txt"
    assert run("sample", "--routing", r, "--alpha", 1, "--seed", 7, "--out", a) == 0
    assert run("sample", "--routing", r, "--alpha", 1, "--seed", 7, "--out", b, "--counts-out", counts) == 0
    assert a.read_bytes() == b.read_bytes()
    direct = alpha_sample(valiant_routing(load_graph(g.read_text())), 1, 7)
    assert load_path_system(a.read_text()) == direct
    assert load_path_system(counts.read_text()).counts == direct.counts
    assert run("sample", "--routing", r, "--alpha", 1, "--out", a) == 1  # --seed is mandatory


def test_route_round_opt(tmp_path, capsys):
    g = tmp_path / "g.txt"
    run("gen", "--kind", "hypercube", "--dim", 3, "--out", g)
    r = tmp_path / "r.txt"
    run("oblivious", "--graph", g, "--backend", "spuniform", "--out", r)
    p = tmp_path / "p.txt"
    run("sample", "--routing", r, "--alpha", 2, "--seed", 1, "--out", p)
    d = tmp_path / "d.txt"
    d.write_text(dump_demand(Demand({(0, 7): 1, (3, 4): 2})))
    capsys.readouterr()
    routed = tmp_path / "routed.txt"
    assert run("route", "--paths", p, "--demand", d, "--eps", 0.05, "--out", routed) == 0
    assert capsys.readouterr().out.startswith("congestion ")
    assert load_routing(routed.read_text()).defined(3, 4)
    assert run("round", "--routing", routed, "--demand", d, "--seed", 2, "--retries", 5,
               "--out", tmp_path / "int.txt") == 0
    assert run("opt", "--graph", g, "--demand", d, "--integral") == 0
    assert capsys.readouterr().out.splitlines()[-1] == "1"


def test_attack_pipeline_on_figure_gadget(tmp_path, capsys):
    g, r, p = tmp_path / "g.txt", tmp_path / "r.txt", tmp_path / "p.txt"
    cert, dem = tmp_path / "cert.txt", tmp_path / "d.txt"
    assert run("gen", "--kind", "gadget-c", "--n", 256, "--k", 4, "--out", g) == 0
    assert run("oblivious", "--graph", g, "--backend", "spuniform", "--leaf-pairs", "--out", r) == 0
    assert run("sample", "--routing", r, "--alpha", 2, "--seed", 3, "--out", p) == 0
    assert run("attack", "--graph", g, "--paths", p, "--alpha", 2, "--out", cert, "--demand-out", dem) == 0
    assert run("verify", "--cert", cert, "--paths", p, "--graph", g) == 0
    out = capsys.readouterr().out
    ratio = float(out.split("ok ratio ")[1].split()[0])
    assert ratio >= 2
    assert run("opt", "--graph", g, "--demand", dem, "--integral") == 0
    assert capsys.readouterr().out.strip() == "1"
    # tampering with the certificate makes verify fail with exit code 2
    text = cert.read_text().replace("claimed-ratio 2.0", "claimed-ratio 4.0")
    cert.write_text(text)
    assert run("verify", "--cert", cert, "--paths", p, "--graph", g) == 2


def test_experiment_command(tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("graph = tree:7\nbackend = spuniform\nalphas = 1\ntrials = 1\nseed = 1\n")
    assert run("experiment", "--config", cfg) == 1  # no output anywhere
    assert run("experiment", "--config", cfg, "--output", tmp_path / "rows.csv") == 0
    assert (tmp_path / "rows.summary.csv").exists()


def test_console_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "semioblivious.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "semiobl" in proc.stdout
