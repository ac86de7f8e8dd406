"""Batch front-end: fit datasets, replay transcripts, run distribution studies."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .cards import CardChain
from .cfkm import init_centroids, partition_from_memberships, run_cfkm
from .data_io import SHAPES, load_csv, summarize, synth_generate
from .errors import FuzzydeckError, ReplayDivergenceError
from .pipeline import PipelineParams, create_session, step1_propose
from .samples import SampleSet

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIVERGENCE = 3


def format_chain(chain: CardChain) -> str:
    parts = [chain.anchors[0]]
    for gap, label in zip(chain.gaps, chain.anchors[1:]):
        parts.append(f"[{gap}]")
        parts.append(label)
    return " ".join(parts)


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--csv", help="CSV file to read")
    parser.add_argument("--column", help="numeric column name in the CSV")
    parser.add_argument("--synth", choices=SHAPES, help="synthetic dataset shape")
    parser.add_argument("--n", type=int, default=500, help="synthetic sample count")
    parser.add_argument("--seed", type=int, default=0, help="synthetic RNG seed")
    parser.add_argument("--bounds", type=float, nargs=2, metavar=("A", "B"),
                        help="domain bounds; default: data range")


def _load_dataset(args) -> SampleSet:
    bounds = tuple(args.bounds) if args.bounds else None
    if args.csv:
        if not args.column:
            raise FuzzydeckError("--csv needs --column")
        return load_csv(args.csv, args.column, bounds=bounds)
    if args.synth:
        data = synth_generate(args.synth, args.n, args.seed)
        if bounds:
            return SampleSet.from_values(data.values, bounds=bounds)
        return data
    raise FuzzydeckError("provide a dataset with --csv/--column or --synth")


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_fit(args) -> int:
    dataset = _load_dataset(args)
    params = PipelineParams(
        k=args.k, fuzzifier=args.fuzzifier, init=args.init,
        scale_precision=args.precision, core_tolerance=args.tau,
    )
    session = create_session(dataset, params)
    chain, partition = step1_propose(session)
    centroids = session.proposed_centroids
    print("centroids:", " ".join(f"{v:.6g}" for v in centroids.values))
    print("chain:", format_chain(chain))
    report = session.fit_report
    print(f"iterations: {report.iterations} (converged: {report.converged})")
    _emit(
        {
            "centroids": [float(v) for v in centroids.values],
            "chain": chain.to_dict(),
            "partition": partition.to_dict(),
        },
        args.out,
    )
    return EXIT_OK


def cmd_replay(args) -> int:
    dataset = _load_dataset(args)
    transcript = json.loads(Path(args.transcript).read_text(encoding="utf-8"))
    session = pipeline.replay(dataset, transcript, strict=not args.lenient)
    _emit({"stage": session.stage, "partition": session.partition.to_dict()},
          args.out)
    return EXIT_OK


def cmd_study(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for shape in args.shapes:
        dataset = synth_generate(shape, args.n, args.seed)
        summary = summarize(dataset)
        for k in args.k_values:
            centroids, memberships, report = run_cfkm(
                dataset, k=k, m=args.fuzzifier, strategy="percentile",
            )
            partition = partition_from_memberships(dataset, centroids, memberships)
            partition.validate()
            doc = {
                "shape": shape,
                "k": k,
                "init": "percentile",
                "initial_centroids": [
                    float(v) for v in init_centroids(dataset, k, "percentile").values
                ],
                "centroids": [float(v) for v in centroids.values],
                "iterations": report.iterations,
                "partition": partition.to_dict(),
                "summary": summary.to_dict(),
            }
            path = out_dir / f"{shape}_k{k}.json"
            path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
            print(f"{shape} k={k}: centroids "
                  + " ".join(f"{v:.4g}" for v in centroids.values)
                  + f" -> {path}")
    return EXIT_OK


def cmd_serve(args) -> int:  # pragma: no cover - thin uvicorn launcher
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.store), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzydeck",
        description="Fuzzy numbers from 1-D data with card-based refinement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="cluster a dataset and print the value scale")
    _add_dataset_args(fit)
    fit.add_argument("--k", type=int, default=5)
    fit.add_argument("--fuzzifier", type=float, default=2.0)
    fit.add_argument("--init", choices=("even", "percentile"), default="even")
    fit.add_argument("--precision", type=int, default=2)
    fit.add_argument("--tau", type=float, default=0.01)
    fit.add_argument("--out", help="write the JSON result to this file")
    fit.set_defaults(func=cmd_fit)

    rep = sub.add_parser("replay", help="re-run a recorded elicitation transcript")
    _add_dataset_args(rep)
    rep.add_argument("--transcript", required=True)
    rep.add_argument("--lenient", action="store_true",
                     help="skip proposal-equality checks (for similar datasets)")
    rep.add_argument("--out", help="write the JSON result to this file")
    rep.set_defaults(func=cmd_replay)

    study = sub.add_parser("study", help="fit synthetic shapes at several k")
    study.add_argument("--shapes", nargs="+", choices=SHAPES, default=list(SHAPES))
    study.add_argument("--k-values", dest="k_values", type=int, nargs="+",
                       default=[3, 5])
    study.add_argument("--n", type=int, default=2000)
    study.add_argument("--seed", type=int, default=0)
    study.add_argument("--fuzzifier", type=float, default=2.0)
    study.add_argument("--out", default="study-out")
    study.set_defaults(func=cmd_study)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--store", default=None)
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ReplayDivergenceError as exc:
        print(f"replay diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except FuzzydeckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
