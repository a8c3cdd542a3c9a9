import os
from pathlib import Path

import numpy as np
import pytest

from hetnetgen.cli import main
from hetnetgen.config import TrainConfig


def run(argv):
    return main([str(a) for a in argv])


def micro_config(path, **extra):
    base = dict(
        steps=2, embed_walks=40, embed_epochs=1, embed_dim=8, noise_dim=4,
        hidden_dim=8, batch_size=8, n_critic=2, gen_walks=300, eval_samples=500,
        checkpoint_interval=0,
    )
    base.update(extra)
    cfg = TrainConfig(**base)
    cfg.save(path)
    return cfg


@pytest.fixture
def synth_dir(tmp_path):
    out = tmp_path / "data"
    assert run(["synth", "--types", "3", "--size", "10", "--edge-prob", "0.3",
                "--share", "0.3", "--seed", "5", "--out-dir", out]) == 0
    return out


class TestSynth:
    def test_deterministic_files(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run(["synth", "--types", "3", "--size", "8", "--seed", "7",
                        "--out-dir", out]) == 0
        assert (a / "nodes.tsv").read_bytes() == (b / "nodes.tsv").read_bytes()
        assert (a / "edges.tsv").read_bytes() == (b / "edges.tsv").read_bytes()

    def test_share_zero_reports_components(self, tmp_path, capsys):
        assert run(["synth", "--types", "3", "--size", "8", "--edge-prob", "0.4",
                    "--share", "0", "--seed", "1", "--out-dir", tmp_path / "x"]) == 0
        summary = capsys.readouterr().out
        components = int(summary.split("components=")[1].split()[0])
        assert components >= 3
        assert "cross_type_edges=0" in summary

    def test_presets(self, tmp_path, capsys):
        for preset, expected in (("syn100", 102), ("syn200", 201), ("syn500", 501)):
            assert run(["synth", "--preset", preset, "--seed", "3",
                        "--out-dir", tmp_path / preset]) == 0
            out = capsys.readouterr().out
            assert f"nodes={expected}" in out

    def test_bad_parameters_exit_2(self, tmp_path):
        assert run(["synth", "--types", "1", "--out-dir", tmp_path / "y"]) == 2


class TestTrain:
    def test_zero_steps_writes_initialized_checkpoint(self, synth_dir, tmp_path):
        cfg_path = tmp_path / "c.config"
        micro_config(cfg_path, steps=0)
        out = tmp_path / "run"
        assert run(["train", "--nodes", synth_dir / "nodes.tsv",
                    "--edges", synth_dir / "edges.tsv", "--config", cfg_path,
                    "--out-dir", out]) == 0
        assert (out / "checkpoint.ckpt").exists()
        assert (out / "train.log").read_text() == ""
        assert (out / "train.nodes.tsv").exists()
        assert (out / "test.edges.tsv").exists()

    def test_log_line_count_equals_steps(self, synth_dir, tmp_path):
        cfg_path = tmp_path / "c.config"
        micro_config(cfg_path, steps=3)
        out = tmp_path / "run"
        assert run(["train", "--nodes", synth_dir / "nodes.tsv",
                    "--edges", synth_dir / "edges.tsv", "--config", cfg_path,
                    "--out-dir", out]) == 0
        lines = (out / "train.log").read_text().strip("\n").split("\n")
        assert len(lines) == 3

    def test_identical_invocations_identical_checkpoints(self, synth_dir, tmp_path):
        cfg_path = tmp_path / "c.config"
        micro_config(cfg_path)
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            assert run(["train", "--nodes", synth_dir / "nodes.tsv",
                        "--edges", synth_dir / "edges.tsv", "--config", cfg_path,
                        "--out-dir", out]) == 0
            outs.append((out / "checkpoint.ckpt").read_bytes())
        assert outs[0] == outs[1]

    def test_split_fraction(self, synth_dir, tmp_path):
        from hetnetgen.graph import load_graph

        cfg_path = tmp_path / "c.config"
        micro_config(cfg_path, steps=0)
        out = tmp_path / "run"
        run(["train", "--nodes", synth_dir / "nodes.tsv",
             "--edges", synth_dir / "edges.tsv", "--config", cfg_path,
             "--out-dir", out])
        full = load_graph(synth_dir / "nodes.tsv", synth_dir / "edges.tsv")
        tr = load_graph(out / "train.nodes.tsv", out / "train.edges.tsv")
        te = load_graph(out / "test.nodes.tsv", out / "test.edges.tsv")
        assert tr.n_edges == round(0.6 * full.n_edges)
        assert tr.n_edges + te.n_edges == full.n_edges


class TestGenerateEval:
    @pytest.fixture
    def trained(self, synth_dir, tmp_path):
        cfg_path = tmp_path / "c.config"
        micro_config(cfg_path)
        out = tmp_path / "run"
        assert run(["train", "--nodes", synth_dir / "nodes.tsv",
                    "--edges", synth_dir / "edges.tsv", "--config", cfg_path,
                    "--out-dir", out]) == 0
        return out

    def test_generate_default_count(self, trained, tmp_path):
        gen_dir = tmp_path / "gen"
        assert run(["generate", "--checkpoint", trained / "checkpoint.ckpt",
                    "--count", "10", "--seed", "3", "--out-dir", gen_dir,
                    "--trace"]) == 0
        assert len(list(gen_dir.glob("*.nodes.tsv"))) == 10
        assert len(list(gen_dir.glob("*.edges.tsv"))) == 10
        assert len(list(gen_dir.glob("*.trace"))) == 10

    def test_generate_deterministic(self, trained, tmp_path):
        dirs = []
        for name in ("g1", "g2"):
            gen_dir = tmp_path / name
            assert run(["generate", "--checkpoint", trained / "checkpoint.ckpt",
                        "--count", "2", "--seed", "3", "--out-dir", gen_dir]) == 0
            dirs.append(gen_dir)
        for f in ("gen_00.edges.tsv", "gen_01.edges.tsv"):
            assert (dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes()

    def test_eval_report_and_figures(self, trained, tmp_path):
        gen_dir = tmp_path / "gen"
        assert run(["generate", "--checkpoint", trained / "checkpoint.ckpt",
                    "--count", "3", "--seed", "3", "--out-dir", gen_dir]) == 0
        eval_dir = tmp_path / "eval"
        assert run(["eval", "--generated-dir", gen_dir,
                    "--train-nodes", trained / "train.nodes.tsv",
                    "--train-edges", trained / "train.edges.tsv",
                    "--test-nodes", trained / "test.nodes.tsv",
                    "--test-edges", trained / "test.edges.tsv",
                    "--samples", "400", "--seed", "5", "--out-dir", eval_dir]) == 0
        report = (eval_dir / "report.tsv").read_text()
        for metric in ("lcc", "triangle_count", "clustering_coef", "powerlaw_coef",
                       "assortativity", "degree_mmd", "eo_rate", "uniqueness",
                       "ref_lcc", "pattern distribution"):
            assert metric in report
        for figure in ("metapath_length_ratio.png", "metapath_patterns.png",
                       "degree_distribution.png", "structural_metrics.png"):
            assert (eval_dir / figure).exists()

    def test_eval_report_deterministic(self, trained, tmp_path):
        gen_dir = tmp_path / "gen"
        run(["generate", "--checkpoint", trained / "checkpoint.ckpt",
             "--count", "2", "--seed", "3", "--out-dir", gen_dir])
        blobs = []
        for name in ("e1", "e2"):
            eval_dir = tmp_path / name
            assert run(["eval", "--generated-dir", gen_dir,
                        "--train-nodes", trained / "train.nodes.tsv",
                        "--train-edges", trained / "train.edges.tsv",
                        "--test-nodes", trained / "test.nodes.tsv",
                        "--test-edges", trained / "test.edges.tsv",
                        "--samples", "300", "--seed", "5", "--no-figures",
                        "--out-dir", eval_dir]) == 0
            blobs.append((eval_dir / "report.tsv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_eval_empty_dir_usage_error(self, trained, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert run(["eval", "--generated-dir", empty,
                    "--train-nodes", trained / "train.nodes.tsv",
                    "--train-edges", trained / "train.edges.tsv",
                    "--test-nodes", trained / "test.nodes.tsv",
                    "--test-edges", trained / "test.edges.tsv",
                    "--out-dir", tmp_path / "e"]) == 2

    def test_self_evaluation_matches_reference(self, trained, tmp_path, capsys):
        # evaluating the training graph against itself: structural metrics
        # must equal the reference column exactly
        self_dir = tmp_path / "selfgen"
        self_dir.mkdir()
        import shutil

        shutil.copy(trained / "train.nodes.tsv", self_dir / "g.nodes.tsv")
        shutil.copy(trained / "train.edges.tsv", self_dir / "g.edges.tsv")
        eval_dir = tmp_path / "selfeval"
        assert run(["eval", "--generated-dir", self_dir,
                    "--train-nodes", trained / "train.nodes.tsv",
                    "--train-edges", trained / "train.edges.tsv",
                    "--test-nodes", trained / "test.nodes.tsv",
                    "--test-edges", trained / "test.edges.tsv",
                    "--samples", "300", "--seed", "5", "--no-figures",
                    "--out-dir", eval_dir]) == 0
        rows = {}
        for line in (eval_dir / "report.tsv").read_text().splitlines():
            if line.startswith("#") or "\t" not in line:
                continue
            parts = line.split("\t")
            rows[parts[0]] = parts[1]
        for metric in ("lcc", "triangle_count", "clustering_coef", "assortativity"):
            assert rows[metric] == rows[f"ref_{metric}"]
