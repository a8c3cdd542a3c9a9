"""Command-line pipeline: synth, train, generate, eval.

Every command honors ``--seed`` end to end.  Randomness is split into
fixed substreams of the master seed (see rng.make_rng): graph synthesis
uses the root stream, training uses streams (0,) for the edge split and
(1,) for the training loop, generation job ``i`` uses stream (2, i), and
evaluation uses streams (3, ...) for pattern sampling and (4, i) for the
random-graph degree controls.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import assembler, gan
from .config import TrainConfig
from .errors import AssemblyStallError, HetnetgenError, ParameterError
from .graph import (
    HetGraph,
    align_to_schema,
    connected_component_count,
    load_graph,
    save_graph,
    split_edges,
    synth_hetero_graph,
)
from .modelio import load_model
from .report import evaluate, write_report
from .rng import make_rng

_PRESETS = {
    # three-type synthetic graphs at the three reference scales
    "syn100": dict(types=3, size=34, edge_prob=0.05, share=0.2),
    "syn200": dict(types=3, size=67, edge_prob=0.025, share=0.15),
    "syn500": dict(types=3, size=167, edge_prob=0.01, share=0.12),
}


def _fmt(x: float) -> str:
    return repr(float(x))


def _load_config(args) -> TrainConfig:
    cfg = TrainConfig.load(args.config) if args.config else TrainConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "steps", None) is not None:
        overrides["steps"] = args.steps
    return cfg.override(**overrides)


def cmd_synth(args) -> int:
    params = dict(types=args.types, size=args.size, edge_prob=args.edge_prob,
                  share=args.share)
    if args.preset:
        params.update(_PRESETS[args.preset])
    rng = make_rng(args.seed)
    graph = synth_hetero_graph(
        params["types"], params["size"], params["edge_prob"], params["share"], rng
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_graph(graph, out / "nodes.tsv", out / "edges.tsv")
    with open(out / "synth.config", "w", encoding="utf-8") as fh:
        fh.write(f"seed={args.seed}\n")
        for key, value in params.items():
            fh.write(f"{key}={value}\n")
    cross = sum(
        1 for u, v, _ in graph.edges if graph.node_types[u] != graph.node_types[v]
    )
    print(
        f"nodes={graph.n_nodes} edges={graph.n_edges} "
        f"components={connected_component_count(graph)} cross_type_edges={cross}"
    )
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args).resolved()
    graph = load_graph(args.nodes, args.edges)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    train_graph, test_graph = split_edges(graph, cfg.train_fraction, make_rng(cfg.seed, 0))
    save_graph(train_graph, out / "train.nodes.tsv", out / "train.edges.tsv")
    save_graph(test_graph, out / "test.nodes.tsv", out / "test.edges.tsv")
    cfg.save(out / "effective.config")

    checkpoint = out / "checkpoint.ckpt"

    def progress(entry):
        if entry.step % 50 == 0 or entry.step == cfg.steps:
            print(
                f"step {entry.step}/{cfg.steps} critic={entry.critic_loss:.4f} "
                f"gen={entry.generator_loss:.4f}",
                file=sys.stderr,
            )

    result = gan.train(train_graph, cfg, make_rng(cfg.seed, 1),
                       checkpoint_path=checkpoint, progress=progress)
    with open(out / "train.log", "w", encoding="utf-8", newline="\n") as fh:
        for entry in result.log:
            fh.write(f"{entry.step}\t{_fmt(entry.critic_loss)}\t{_fmt(entry.generator_loss)}\n")
    print(f"checkpoint written to {checkpoint}")
    return 0


def cmd_generate(args) -> int:
    bundle = load_model(args.checkpoint)
    cfg = bundle.config
    seed = args.seed if args.seed is not None else cfg.seed
    target = args.target_edges if args.target_edges is not None else bundle.train_edges
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    strategy = "uniform" if cfg.probabilistic_assembler else "stratified"

    stalled = False
    for i in range(args.count):
        rng = make_rng(seed, 2, i)
        walks = gan.generate_walks(
            bundle.generator, bundle.table, bundle.schema, cfg.gen_walks,
            cfg.max_len, cfg.temperature, rng,
            uniform_nodes=cfg.uniform_node_sampling,
        )
        try:
            result = assembler.assemble(
                walks, len(bundle.node_types), bundle.node_types, bundle.schema,
                target, rng, strategy=strategy,
            )
            graph, trace = result.graph, result.trace
        except AssemblyStallError as exc:
            print(f"warning: graph {i} stalled: {exc}", file=sys.stderr)
            graph, trace = exc.partial_graph, []
            stalled = True
        save_graph(graph, out / f"gen_{i:02d}.nodes.tsv", out / f"gen_{i:02d}.edges.tsv")
        if args.trace:
            with open(out / f"gen_{i:02d}.trace", "w", encoding="utf-8", newline="\n") as fh:
                for pattern in trace:
                    fh.write(pattern.label(bundle.schema) + "\n")
        print(f"gen_{i:02d}: nodes={graph.n_nodes} edges={graph.n_edges}")
    return 1 if stalled else 0


def cmd_eval(args) -> int:
    gen_dir = Path(args.generated_dir)
    node_files = sorted(gen_dir.glob("*.nodes.tsv"))
    pairs = [(p, p.with_name(p.name.replace(".nodes.tsv", ".edges.tsv"))) for p in node_files]
    pairs = [(n, e) for n, e in pairs if e.exists()]
    if not pairs:
        raise ParameterError(f"no generated graph pairs found in {gen_dir}")
    train_graph = load_graph(args.train_nodes, args.train_edges)
    generated = [align_to_schema(load_graph(n, e), train_graph.schema) for n, e in pairs]
    test_graph = align_to_schema(load_graph(args.test_nodes, args.test_edges),
                                 train_graph.schema)

    report = evaluate(
        generated, train_graph, test_graph, seed=args.seed,
        lengths=tuple(int(x) for x in args.lengths.split(",")),
        samples=args.samples,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.tsv"
    write_report(report, report_path)
    print(report_path.read_text(encoding="utf-8"), end="")
    if args.figures:
        from .figures import render_figures

        for path in render_figures(report, out):
            print(f"figure written to {path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetnetgen",
        description="Learn heterogeneous walk distributions and assemble new graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write a synthetic heterogeneous graph")
    p_synth.add_argument("--types", type=int, default=3)
    p_synth.add_argument("--size", type=int, default=34, help="nodes per type block")
    p_synth.add_argument("--edge-prob", type=float, default=0.06)
    p_synth.add_argument("--share", type=float, default=0.12,
                         help="fraction of each block acting as shared junctions")
    p_synth.add_argument("--preset", choices=sorted(_PRESETS), default=None)
    p_synth.add_argument("--seed", type=int, default=7)
    p_synth.add_argument("--out-dir", default="synth_out")
    p_synth.set_defaults(fn=cmd_synth)

    p_train = sub.add_parser("train", help="split edges, train, write a checkpoint")
    p_train.add_argument("--nodes", required=True)
    p_train.add_argument("--edges", required=True)
    p_train.add_argument("--config", default=None)
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--steps", type=int, default=None)
    p_train.add_argument("--out-dir", default="train_out")
    p_train.set_defaults(fn=cmd_train)

    p_gen = sub.add_parser("generate", help="assemble graphs from a checkpoint")
    p_gen.add_argument("--checkpoint", required=True)
    p_gen.add_argument("--count", type=int, default=10)
    p_gen.add_argument("--target-edges", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--trace", action="store_true",
                       help="write one completed pattern per line next to each graph")
    p_gen.add_argument("--out-dir", default="generated")
    p_gen.set_defaults(fn=cmd_generate)

    p_eval = sub.add_parser("eval", help="run the metric suite over generated graphs")
    p_eval.add_argument("--generated-dir", required=True)
    p_eval.add_argument("--train-nodes", required=True)
    p_eval.add_argument("--train-edges", required=True)
    p_eval.add_argument("--test-nodes", required=True)
    p_eval.add_argument("--test-edges", required=True)
    p_eval.add_argument("--samples", type=int, default=20000)
    p_eval.add_argument("--lengths", default="1,2,3")
    p_eval.add_argument("--seed", type=int, default=7)
    p_eval.add_argument("--no-figures", dest="figures", action="store_false")
    p_eval.add_argument("--out-dir", default="eval_out")
    p_eval.set_defaults(fn=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except HetnetgenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
