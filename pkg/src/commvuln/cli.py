"""Command-line front end: ``commvuln {detect,evaluate,sensitivity,export-cn}``.

Exit codes: 0 success, 2 input error, 3 pipeline error.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
from dataclasses import dataclass
from typing import Iterator, Sequence

from .community import DetectionTrace, detect_communities
from .graph import Graph, GraphError, read_edge_list
from .metrics import DEFAULT_PHI, community_network, eic, eoc, gravity_vector
from .output import format_network, format_report, format_sobol, format_trace
from .sensitivity import SAMPLERS, ZetaModel, sobol_indices
from .vulnerability import (
    CommunityScore,
    VulnerabilityReport,
    fuzzy_ranking,
    normalize_factors,
    ranks,
    relative_vulnerability,
    vulnerability,
)

EXIT_OK, EXIT_INPUT, EXIT_PIPELINE = 0, 2, 3


class InputError(Exception):
    pass


class PipelineError(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"stage '{stage}': {cause}")


@dataclass(frozen=True)
class RunConfig:
    input: str
    phi: float = DEFAULT_PHI
    alpha: float = 1.0
    beta: float = 1.0
    chi: float = 1.0
    samples: int = 4096
    range_lo: float = 0.0
    range_hi: float = 2.0
    seed: int = 42
    sampler: str = "sobol"
    format: str = "table"
    output: str | None = None

    def validate(self) -> None:
        if not self.phi > 0:
            raise InputError(f"--phi must be positive, got {self.phi}")
        if self.samples < 64 or self.samples & (self.samples - 1):
            raise InputError(f"--samples must be a power of two >= 64, got {self.samples}")
        if not self.range_lo < self.range_hi:
            raise InputError(f"--range-lo must be below --range-hi")
        if self.seed < 0:
            raise InputError("--seed must be nonnegative")


@contextlib.contextmanager
def stage(name: str) -> Iterator[None]:
    try:
        yield
    except GraphError as exc:
        raise PipelineError(name, exc) from exc


def load(config: RunConfig) -> Graph:
    try:
        return read_edge_list(config.input)
    except OSError as exc:
        raise InputError(f"cannot read {config.input}: {exc.strerror}") from exc
    except GraphError as exc:
        raise InputError(f"{config.input}: {exc}") from exc


def _detect(g: Graph) -> DetectionTrace:
    with stage("detect"):
        return detect_communities(g)


def run_pipeline(g: Graph, config: RunConfig) -> VulnerabilityReport:
    trace = _detect(g)
    p = trace.final
    with stage("factors"):
        eta = [eic(g, p, k) for k in range(p.count)]
        sigma = [eoc(g, p, k) for k in range(p.count)]
    with stage("community network"):
        cn = community_network(g, p, config.phi)
    with stage("gravity"):
        gamma = gravity_vector(p, cn)
    with stage("vulnerability"):
        eta_n, sigma_n, gamma_n = normalize_factors(eta, sigma, gamma)
        zeta = vulnerability(eta_n, sigma_n, gamma_n, config.alpha, config.beta, config.chi)
        xi = relative_vulnerability(zeta)
    with stage("ranking"):
        ranking = fuzzy_ranking(xi)
    rank = ranks(xi)
    scores = tuple(
        CommunityScore(
            f"c{k + 1}", p.communities[k], eta[k], sigma[k], gamma[k],
            eta_n[k], sigma_n[k], gamma_n[k], zeta[k], xi[k], rank[k],
        )
        for k in range(p.count)
    )
    return VulnerabilityReport(
        scores, config.alpha, config.beta, config.chi, config.phi, ranking, trace.final_q, cn
    )


def cmd_detect(config: RunConfig) -> str:
    return format_trace(_detect(load(config)), config.format)


def cmd_evaluate(config: RunConfig) -> str:
    return format_report(run_pipeline(load(config), config), config.format)


def cmd_sensitivity(config: RunConfig) -> str:
    report = run_pipeline(load(config), config)
    c = report.communities
    model = ZetaModel([s.eta for s in c], [s.sigma for s in c], [s.gamma for s in c])
    result = sobol_indices(
        model,
        n=config.samples,
        seed=config.seed,
        low=config.range_lo,
        high=config.range_hi,
        sampler=config.sampler,
        labels=[s.label for s in c],
    )
    return format_sobol(result, config.format)


def cmd_export_cn(config: RunConfig) -> str:
    g = load(config)
    p = _detect(g).final
    with stage("community network"):
        cn = community_network(g, p, config.phi)
    return format_network(cn, config.format)


COMMANDS = {
    "detect": cmd_detect,
    "evaluate": cmd_evaluate,
    "sensitivity": cmd_sensitivity,
    "export-cn": cmd_export_cn,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="edge-list file: one 'u v' pair per line, '#' comments")
    common.add_argument("--phi", type=float, default=DEFAULT_PHI, help="log-sigmoid fitting parameter (default: 3)")
    common.add_argument("--alpha", type=float, default=1.0, help="weight of interior edges (default: 1)")
    common.add_argument("--beta", type=float, default=1.0, help="weight of exterior edges (default: 1)")
    common.add_argument("--chi", type=float, default=1.0, help="weight of the gravity index (default: 1)")
    common.add_argument("--samples", type=int, default=4096, help="Sobol' rows per base matrix, power of two (default: 4096)")
    common.add_argument("--range-lo", type=float, default=0.0, help="lower bound of the weight range (default: 0)")
    common.add_argument("--range-hi", type=float, default=2.0, help="upper bound of the weight range (default: 2)")
    common.add_argument("--seed", type=int, default=42, help="sampling seed (default: 42)")
    common.add_argument("--sampler", choices=SAMPLERS, default="sobol", help="weight sampling design (default: sobol)")
    common.add_argument("--format", choices=("table", "csv", "json", "dot"), default=None,
                        help="output format (default: table; dot for export-cn)")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="commvuln", description="Community vulnerability evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("detect", parents=[common], help="greedy modularity merge trace")
    sub.add_parser("evaluate", parents=[common], help="vulnerability report and fuzzy ranking")
    sub.add_parser("sensitivity", parents=[common], help="Sobol' indices of the weights")
    sub.add_parser("export-cn", parents=[common], help="community network as DOT/CSV/JSON")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fmt_name = args.format or ("dot" if args.command == "export-cn" else "table")
    if fmt_name == "dot" and args.command != "export-cn":
        raise InputError("--format dot is only available for export-cn")
    return RunConfig(
        input=args.input, phi=args.phi, alpha=args.alpha, beta=args.beta, chi=args.chi,
        samples=args.samples, range_lo=args.range_lo, range_hi=args.range_hi, seed=args.seed,
        sampler=args.sampler, format=fmt_name, output=args.output,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        config.validate()
        text = COMMANDS[args.command](config)
    except InputError as exc:
        print(f"commvuln: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PipelineError as exc:
        print(f"commvuln: {args.command} failed at {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
