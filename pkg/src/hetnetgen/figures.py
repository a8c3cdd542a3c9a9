"""Render evaluation figures to files next to the delimited report.

Four PNGs per evaluation: meta-path length ratios, per-length pattern
distributions, degree histograms, and a structural-metric summary, each
comparing the generated graphs against the training reference.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .report import EvalReport

_REF_COLOR = "#31688e"
_GEN_COLOR = "#e07b39"


def render_figures(report: EvalReport, out_dir, top_patterns: int = 8) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        _length_ratio_figure(report, out_dir / "metapath_length_ratio.png"),
        _pattern_figure(report, out_dir / "metapath_patterns.png", top_patterns),
        _degree_figure(report, out_dir / "degree_distribution.png"),
        _metrics_figure(report, out_dir / "structural_metrics.png"),
    ]
    return paths


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _length_ratio_figure(report: EvalReport, path: Path) -> Path:
    ref = report.reference_dist.by_length
    gen = report.generated_dist.by_length
    lengths = sorted(set(ref) | set(gen))
    x = np.arange(len(lengths))
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.bar(x - 0.18, [ref.get(l, 0.0) for l in lengths], width=0.36,
           color=_REF_COLOR, label="training")
    ax.bar(x + 0.18, [gen.get(l, 0.0) for l in lengths], width=0.36,
           color=_GEN_COLOR, label="generated")
    ax.set_xticks(x, [str(l) for l in lengths])
    ax.set_xlabel("meta-path length (edges)")
    ax.set_ylabel("ratio")
    ax.set_title("Meta-path length ratio")
    ax.legend(frameon=False)
    return _save(fig, path)


def _pattern_figure(report: EvalReport, path: Path, top: int) -> Path:
    ref_probs = report.reference_dist
    gen_probs = report.generated_dist
    lengths = sorted(set(ref_probs.by_length) | set(gen_probs.by_length))
    fig, axes = plt.subplots(1, max(len(lengths), 1),
                             figsize=(3.6 * max(len(lengths), 1), 3.4), squeeze=False)
    for ax, length in zip(axes[0], lengths):
        ref_c = ref_probs.conditional(length)
        gen_c = gen_probs.conditional(length)
        ranked = sorted(set(ref_c) | set(gen_c),
                        key=lambda p: -(ref_c.get(p, 0.0) + gen_c.get(p, 0.0)))[:top]
        labels = [p.label(report.schema) for p in ranked]
        x = np.arange(len(ranked))
        ax.bar(x - 0.18, [ref_c.get(p, 0.0) for p in ranked], width=0.36,
               color=_REF_COLOR, label="training")
        ax.bar(x + 0.18, [gen_c.get(p, 0.0) for p in ranked], width=0.36,
               color=_GEN_COLOR, label="generated")
        ax.set_xticks(x, labels, rotation=60, ha="right", fontsize=6)
        ax.set_title(f"patterns, length {length}")
        ax.set_ylabel("conditional probability")
    axes[0][0].legend(frameon=False)
    return _save(fig, path)


def _degree_figure(report: EvalReport, path: Path) -> Path:
    ref = report.train_degree_hist
    gen = report.generated_degree_hist
    x = np.arange(len(ref))
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    ax.plot(x, ref, marker="o", ms=3, lw=1.2, color=_REF_COLOR, label="training")
    ax.plot(x, gen, marker="s", ms=3, lw=1.2, color=_GEN_COLOR, label="generated (mean)")
    ax.set_xlabel("degree")
    ax.set_ylabel("fraction of nodes")
    ax.set_title("Degree distribution")
    ax.legend(frameon=False)
    return _save(fig, path)


def _metrics_figure(report: EvalReport, path: Path) -> Path:
    names = [name for name, _ in (("lcc", 0), ("triangle_count", 0),
                                  ("clustering_coef", 0), ("powerlaw_coef", 0),
                                  ("assortativity", 0))]
    refs = dict(report.ref_rows)
    fig, axes = plt.subplots(1, len(names), figsize=(2.5 * len(names), 3.0))
    for ax, name in zip(axes, names):
        mean, std = report.row(name)
        ref = refs.get(f"ref_{name}", float("nan"))
        finite = [v for v in (mean, ref) if np.isfinite(v)]
        ax.bar([0], [mean if np.isfinite(mean) else 0.0], yerr=[std],
               color=_GEN_COLOR, width=0.6, label="generated")
        ax.axhline(ref if np.isfinite(ref) else 0.0, color=_REF_COLOR,
                   lw=1.4, ls="--", label="training")
        ax.set_xticks([])
        ax.set_title(name, fontsize=8)
        if not finite:
            ax.text(0, 0.5, "undefined", ha="center", fontsize=7)
    axes[0].legend(frameon=False, fontsize=7)
    return _save(fig, path)
