"""Command-line front end.

Subcommands: gen, embed, sample, unembed, fig2, fig3, fig4.
Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import csv
import json
import os
import sys
import time

from brokenchains import bench
from brokenchains import bqm as bqmlib
from brokenchains.bench import ExperimentConfig
from brokenchains.bqm import ISING, convert
from brokenchains.graphs import PROBLEMS, read_edge_list, write_edge_list, erdos_renyi
from brokenchains.sampler import (
    AnnealParams,
    sampleset_from_json,
    sampleset_to_csv,
    sampleset_to_json,
    simulated_anneal,
)
from brokenchains.seeding import STREAM_TAILORED, STREAM_WEIGHTED, derive_seed
from brokenchains.topology import (
    chimera,
    clique_embedding,
    embed_bqm,
    embedding_from_json,
    embedding_to_json,
    uniform_torque_compensation,
)
from brokenchains.unembed import (
    UnembedContext,
    decompose,
    majority_vote,
    minimize_energy,
    random_weighted,
    unembed_tailored,
)


def _topology(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("topology must be 'm,n,t'")
    return tuple(int(p) for p in parts)


def _chain_strength(text):
    if text == "utc":
        return "utc"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("chain strength must be a number or 'utc'")
    return value


def _densities(text):
    return tuple(float(p) for p in text.split(","))


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=".", help="output directory")


def _add_experiment_args(parser):
    parser.add_argument("--problem", choices=PROBLEMS, required=True)
    parser.add_argument("--n", type=int, default=30)
    parser.add_argument("--density", type=_densities, default=(0.1, 0.3, 0.5, 0.7, 0.9),
                        help="comma-separated density list")
    parser.add_argument("--graphs", type=int, default=5)
    parser.add_argument("--reads", type=int, default=200)
    parser.add_argument("--sweeps", type=int, default=1000)
    parser.add_argument("--chain-strength", type=_chain_strength, default=None)
    parser.add_argument("--prefactor", type=float, default=1.414)
    parser.add_argument("--topology", type=_topology, default=(8, 8, 4))
    parser.add_argument("--aggregate", choices=("best", "mean"), default="best")
    parser.add_argument("--source", choices=("anneal", "inject"), default="anneal")
    parser.add_argument("--p-break", type=float, default=0.0)
    _add_common(parser)


def _config_from_args(args, grid=()):
    return ExperimentConfig(
        problem=args.problem,
        densities=tuple(args.density),
        n=args.n,
        graphs_per_density=args.graphs,
        reads=args.reads,
        sweeps=args.sweeps,
        chain_strength=args.chain_strength,
        prefactor=args.prefactor,
        seed=args.seed,
        topology=tuple(args.topology),
        aggregate=args.aggregate,
        source=args.source,
        p_break=args.p_break,
        chain_strength_grid=grid,
    )


def cmd_gen(args):
    g = erdos_renyi(args.n, args.density, args.seed)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, args.name)
    write_edge_list(g, path)
    print(path)
    return 0


def cmd_embed(args):
    hw = chimera(*args.topology)
    e = clique_embedding(args.k, hw)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, args.name)
    with open(path, "w") as fh:
        fh.write(embedding_to_json(e))
    print(path)
    return 0


def _build_physical(args, g):
    model = bqmlib.build_model(args.problem, g)
    ising = convert(model, ISING)
    if args.chain_strength in (None, "utc"):
        strength = uniform_torque_compensation(ising, prefactor=args.prefactor)
    else:
        strength = float(args.chain_strength)
    hw = chimera(*args.topology)
    e = clique_embedding(g.n, hw)
    return model, embed_bqm(ising, e, hw, strength), e


def cmd_sample(args):
    g = read_edge_list(args.graph)
    model, pm, e = _build_physical(args, g)
    params = AnnealParams(args.reads, args.sweeps, seed=args.seed)
    samples = simulated_anneal(pm, params)
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(args.out, "samples")
    with open(base + ".json", "w") as fh:
        fh.write(sampleset_to_json(samples))
    with open(base + ".csv", "w") as fh:
        fh.write(sampleset_to_csv(samples))
    with open(os.path.join(args.out, "embedding.json"), "w") as fh:
        fh.write(embedding_to_json(e))
    with open(os.path.join(args.out, "model.json"), "w") as fh:
        fh.write(bqmlib.to_json(model))
    print(base + ".json")
    return 0


def cmd_unembed(args):
    g = read_edge_list(args.graph)
    with open(args.embedding) as fh:
        e = embedding_from_json(fh.read())
    with open(args.model) as fh:
        model = bqmlib.from_json(fh.read())
    with open(args.samples) as fh:
        samples = sampleset_from_json(fh.read())

    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "unembedded.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["read", "method", "objective", "feasible", "broken_chains", "broken_frac"]
        )
        for read, sample in enumerate(samples):
            readouts = decompose(sample, e, domain=model.domain)
            broken = sum(1 for r in readouts if r.broken)
            if args.method == "majority":
                witness = bench.witness_from_values(
                    args.problem, majority_vote(readouts).values, g
                )
            elif args.method == "random":
                logical = random_weighted(
                    readouts, derive_seed(args.seed, STREAM_WEIGHTED, read)
                )
                witness = bench.witness_from_values(args.problem, logical.values, g)
            elif args.method == "minenergy":
                logical = minimize_energy(readouts, model)
                witness = bench.witness_from_values(args.problem, logical.values, g)
            else:
                ctx = UnembedContext(
                    g, args.problem, derive_seed(args.seed, STREAM_TAILORED, read)
                )
                witness = unembed_tailored(readouts, ctx)
                if args.problem == "graph_partitioning":
                    witness = witness[0]
            objective, feasible = bench.score_witness(args.problem, g, witness)
            writer.writerow(
                [read, args.method, objective, feasible, broken, broken / len(readouts)]
            )
    print(path)
    return 0


def cmd_fig2(args):
    started = time.time()
    config = _config_from_args(args)
    rows = bench.run_fig2(config)
    print(bench.write_experiment(args.out, "fig2", config, rows, started))
    return 0


def cmd_fig3(args):
    started = time.time()
    config = _config_from_args(args)
    rows = bench.run_fig3(config)
    print(bench.write_experiment(args.out, "fig3", config, rows, started))
    return 0


def cmd_fig4(args):
    started = time.time()
    grid = tuple(float(s) for s in args.grid.split(","))
    config = _config_from_args(args, grid=grid)
    rows = bench.run_fig4(config)
    print(bench.write_experiment(args.out, "fig4", config, rows, started))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="brokenchains",
        description="Chained-qubit sampling and unembedding benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a random graph edge-list file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--name", default="graph.txt")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("embed", help="emit a complete-graph embedding as JSON")
    p.add_argument("--k", type=int, required=True, help="clique size")
    p.add_argument("--topology", type=_topology, default=(8, 8, 4))
    p.add_argument("--name", default="embedding.json")
    _add_common(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sample", help="embed a graph problem and draw samples")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--reads", type=int, default=200)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--chain-strength", type=_chain_strength, default=None)
    p.add_argument("--prefactor", type=float, default=1.414)
    p.add_argument("--topology", type=_topology, default=(8, 8, 4))
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("unembed", help="apply one unembedding method to samples")
    p.add_argument("--graph", required=True)
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--samples", required=True, help="samples JSON from 'sample'")
    p.add_argument("--embedding", required=True)
    p.add_argument("--model", required=True)
    p.add_argument(
        "--method", choices=("majority", "random", "minenergy", "tailored"),
        required=True,
    )
    _add_common(p)
    p.set_defaults(func=cmd_unembed)

    for name, func in (("fig2", cmd_fig2), ("fig3", cmd_fig3), ("fig4", cmd_fig4)):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_experiment_args(p)
        if name == "fig4":
            p.add_argument(
                "--grid", required=True, help="comma-separated chain strengths"
            )
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_args(args)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except Exception as exc:  # runtime failure after config was accepted
        print(f"error: {exc}", file=sys.stderr)
        return 3


def _validate_args(args):
    """Config-level checks that should fail fast with exit code 2."""
    if getattr(args, "command", None) in ("fig2", "fig3", "fig4"):
        grid = ()
        if args.command == "fig4":
            grid = tuple(float(s) for s in args.grid.split(","))
            for s in grid:
                if s <= 0:
                    raise ValueError(f"chain strength {s} must be positive")
        _config_from_args(args, grid=grid).validate()
    if getattr(args, "command", None) == "gen":
        if not (0.0 <= args.density <= 1.0):
            raise ValueError(f"density {args.density} outside [0, 1]")
        if args.n < 1:
            raise ValueError("n must be >= 1")
    if getattr(args, "command", None) == "embed":
        m, n, t = args.topology
        if m != n:
            raise ValueError(f"clique embedding requires a square Chimera, got {m}x{n}")
        if not (1 <= args.k <= t * m + 1):
            raise ValueError(f"k must be in 1..{t * m + 1} for chimera{tuple(args.topology)}")


if __name__ == "__main__":
    sys.exit(main())
