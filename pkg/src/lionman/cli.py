"""Command-line front end: ``simulate``, ``bound`` and ``verify``.

Exit codes: 0 success, 1 usage or input error, 2 verification violations,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .bound import compute_omega
from .errors import LionManError, NumericFailureError
from .game import STRATEGIES, GameConfig, make_strategy, random_start, run_game, trace_to_csv, trace_to_json
from .moduli import ModuliBundle, parse_family
from .spaces import Ball, Sphere2, SphericalCap, parse_domain, parse_space
from .verify import CHECK_NAMES, applicable_checks, default_domain, default_modulus, run_checks

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class CliConfig:
    subcommand: str
    space: str = "euclidean:2"
    domain: str | None = None
    D: float | None = None
    alpha: float | None = None
    strategy: str = "flee"
    seed: int = 0
    max_steps: int = 1_000_000
    out: str | None = None
    format: str = "csv"
    samples: int = 10_000
    b: float | None = None
    family: str | None = None
    checks: str | None = None
    phi_scale: float = 1.0
    lion: str | None = None
    man: str | None = None
    script: str | None = None
    jobs: int = 1

    def to_argv(self):
        """Arguments that parse back to this exact config."""
        argv = [self.subcommand]
        for f in fields(self):
            if f.name == "subcommand":
                continue
            if f.name not in _FLAGS[self.subcommand]:
                continue
            value = getattr(self, f.name)
            if value is None or value == f.default:
                continue
            text = repr(value) if isinstance(value, float) else str(value)
            opt = _OPTION[f.name]
            # the joined form keeps values such as "-0.5,0" from reading as flags
            argv += [f"{opt}={text}"] if opt.startswith("--") else [opt, text]
        return argv


_OPTION = {
    "space": "--space",
    "domain": "--domain",
    "D": "-D",
    "alpha": "--alpha",
    "strategy": "--strategy",
    "seed": "--seed",
    "max_steps": "--max-steps",
    "out": "--out",
    "format": "--format",
    "samples": "--samples",
    "b": "-b",
    "family": "--family",
    "checks": "--checks",
    "phi_scale": "--phi-scale",
    "lion": "--lion",
    "man": "--man",
    "script": "--script",
    "jobs": "--jobs",
}

_FLAGS = {
    "simulate": {"space", "domain", "D", "alpha", "strategy", "seed", "max_steps", "out", "format",
                 "lion", "man", "script"},
    "bound": {"space", "domain", "D", "alpha", "b", "family"},
    "verify": {"space", "domain", "seed", "samples", "family", "b", "checks", "phi_scale", "out", "jobs"},
}


def _unsigned(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser():
    parser = _Parser(prog="lionman", description="Discrete lion-man game: simulation, capture bounds, checks.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def space_args(p, domain_help):
        p.add_argument("--space", default="euclidean:2",
                       help="euclidean:<dim>, lp:<dim>:<p> or sphere2 (default euclidean:2)")
        p.add_argument("--domain", default=None, help=domain_help)

    sim = sub.add_parser("simulate", help="run one game and write its trace")
    space_args(sim, "ball:<c>:<r>, box:<lo>:<hi> or cap:<pole>:<angle> (default unit ball / pi/8 cap)")
    sim.add_argument("-D", dest="D", type=float, required=True, help="jump bound D > 0")
    sim.add_argument("--alpha", type=float, required=True, help="capture tolerance alpha > 0")
    sim.add_argument("--strategy", default="flee", choices=[*STRATEGIES, "scripted"], help="man strategy")
    sim.add_argument("--seed", type=_unsigned, default=0, help="random seed (default 0)")
    sim.add_argument("--max-steps", dest="max_steps", type=_positive_int, default=1_000_000,
                     help="step limit (default 1000000)")
    sim.add_argument("--out", default=None, help="trace file to write")
    sim.add_argument("--format", default="csv", choices=["csv", "json"], help="trace format (default csv)")
    sim.add_argument("--lion", default=None, help="lion start, comma-separated (default: random in domain)")
    sim.add_argument("--man", default=None, help="man start, comma-separated (default: random in domain)")
    sim.add_argument("--script", default=None, help="scripted targets 'x,y;x,y;...'")

    bnd = sub.add_parser("bound", help="evaluate the capture-time bound Omega")
    space_args(bnd, "domain whose diameter supplies b when -b is absent")
    bnd.add_argument("-D", dest="D", type=float, required=True, help="jump bound D > 0")
    bnd.add_argument("--alpha", type=float, required=True, help="capture tolerance alpha > 0")
    bnd.add_argument("-b", dest="b", type=float, default=None, help="diameter bound b >= D")
    bnd.add_argument("--family", default=None,
                     help="lp:<p>, puniform:<p>:<c>, hilbert or cat:<kappa>:<diam>:<slack> (default from --space)")

    ver = sub.add_parser("verify", help="run the sampling checks; one JSON report per line")
    space_args(ver, "sampling domain (default [-1,1]^dim box / pi/8 cap)")
    ver.add_argument("--seed", type=_unsigned, default=0, help="random seed (default 0)")
    ver.add_argument("--samples", type=_positive_int, default=10_000, help="admissible samples per check")
    ver.add_argument("--family", default=None, help="modulus family (default from --space)")
    ver.add_argument("-b", dest="b", type=float, default=None, help="diameter bound for the modulus (default domain)")
    ver.add_argument("--checks", default=None, help=f"comma-separated subset of {','.join(CHECK_NAMES)}")
    ver.add_argument("--phi-scale", dest="phi_scale", type=float, default=1.0,
                     help="multiply Phi by this factor (sabotage testing)")
    ver.add_argument("--out", default=None, help="also write the reports to this file")
    ver.add_argument("--jobs", type=_positive_int, default=1, help="checks to run in parallel")
    return parser


def parse_args(argv) -> CliConfig:
    ns = build_parser().parse_args(list(argv))
    values = {k: v for k, v in vars(ns).items() if k in _OPTION or k == "subcommand"}
    cfg = CliConfig(**values)
    parse_space(cfg.space)
    return cfg


# ---------------------------------------------------------------------------


def _point(text):
    return np.array([float(v) for v in text.split(",")])


def _game_domain(space, spec):
    if spec is not None:
        return parse_domain(spec, space)
    if isinstance(space, Sphere2):
        return SphericalCap(space, [0.0, 0.0, 1.0], math.pi / 8)
    return Ball(space, np.zeros(space.dim), 1.0)


def _family_for(space, domain, family):
    if family is not None:
        return parse_family(family)
    return default_modulus(space, domain)


def _simulate(cfg: CliConfig, out):
    space = parse_space(cfg.space)
    domain = _game_domain(space, cfg.domain)
    L0, M0 = random_start(domain, cfg.seed)
    L0 = _point(cfg.lion) if cfg.lion else L0
    M0 = _point(cfg.man) if cfg.man else M0
    targets = None
    if cfg.script is not None:
        targets = [_point(t) for t in cfg.script.split(";") if t.strip()]
    config = GameConfig(space, domain, cfg.D, L0, M0, cfg.alpha, cfg.max_steps, cfg.seed)
    trace = run_game(config, make_strategy(cfg.strategy, targets))
    if cfg.out:
        text = trace_to_csv(trace) if cfg.format == "csv" else trace_to_json(trace) + "\n"
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    if trace.capture_step is not None:
        print(f"capture at step {trace.capture_step}", file=out)
    else:
        print(f"no capture within {cfg.max_steps} steps", file=out)
    return EXIT_OK


def _bound(cfg: CliConfig, out):
    space = parse_space(cfg.space)
    domain = parse_domain(cfg.domain, space) if cfg.domain else None
    b = cfg.b if cfg.b is not None else (domain.diameter_bound if domain else None)
    if b is None:
        raise UsageError("bound needs -b or --domain")
    eta = _family_for(space, domain, cfg.family)
    result = compute_omega(ModuliBundle.from_modulus(eta, b), cfg.D, b, cfg.alpha)
    payload = {"family": eta.to_dict(), "D": cfg.D, "b": b, "alpha": cfg.alpha, **result.to_dict()}
    print(json.dumps(payload, sort_keys=True), file=out)
    return EXIT_OK


def _verify(cfg: CliConfig, out):
    space = parse_space(cfg.space)
    domain = parse_domain(cfg.domain, space) if cfg.domain else default_domain(space)
    b = cfg.b if cfg.b is not None else domain.diameter_bound
    bundle = ModuliBundle.from_modulus(_family_for(space, domain, cfg.family), b)
    if cfg.phi_scale != 1.0:
        bundle = bundle.with_phi_scaled(cfg.phi_scale)
    names = cfg.checks.split(",") if cfg.checks else list(applicable_checks(space))
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise UsageError(f"unknown checks: {', '.join(unknown)}")
    reports = run_checks(names, space, domain, bundle, cfg.samples, cfg.seed, cfg.jobs)
    lines = [r.to_json() for r in reports]
    for line in lines:
        print(line, file=out)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def run(cfg: CliConfig, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    handlers = {"simulate": _simulate, "bound": _bound, "verify": _verify}
    try:
        return handlers[cfg.subcommand](cfg, out)
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=err)
        return EXIT_NUMERIC
    except (UsageError, LionManError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main(argv=None, out=None, err=None) -> int:
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except LionManError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    return run(cfg, out, err)


if __name__ == "__main__":
    sys.exit(main())
