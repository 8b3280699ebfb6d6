"""Command-line front end.

Every subcommand prints a JSON document (``--output text`` prints the same
structure as ``key: value`` lines). Exit codes: ``iso-check`` returns 0/1/2
for Isomorphic/NotIsomorphic/Unknown; any usage or input error exits 3 and
an orbit search that hits ``bfs_node_cap`` exits 4.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from qhmpic.analytic.suite import run_suite, suite_passes
from qhmpic.classifier import QhmSpec, iso_check
from qhmpic.cp_calculus import decide_cp, verify_certificate_json
from qhmpic.exact_algebra import format_matrix, parse_point, parse_rational
from qhmpic.expr import ParseError, evaluate
from qhmpic.orbit import DEFAULT_NODE_CAP, OrbitSearchLimit, decide_orbit, enumerate_orbit, orbit_partition, to_residue
from qhmpic.picard import render

log = logging.getLogger("qhmpic")

CONFIG_ENV = "QHMPIC_CONFIG"
EXIT_USAGE = 3
EXIT_LIMIT = 4


@dataclass
class CliConfig:
    default_grid: int = 256
    bfs_node_cap: int = DEFAULT_NODE_CAP
    tolerances: dict[str, float] = field(default_factory=lambda: {"analytic": 1e-9})
    output: str = "json"

    @classmethod
    def load(cls, path: str | None) -> CliConfig:
        path = path or os.environ.get(CONFIG_ENV)
        cfg = cls()
        if not path:
            return cfg
        data = json.loads(Path(path).read_text())
        for key in ("default_grid", "bfs_node_cap", "output"):
            if key in data:
                setattr(cfg, key, data[key])
        cfg.tolerances.update(data.get("tolerances", {}))
        return cfg

    def check_cap(self, q: int) -> None:
        if self.bfs_node_cap < q * q:
            log.warning("bfs_node_cap=%d is below q^2=%d; orbit search may stop early", self.bfs_node_cap, q * q)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage, which would collide with the Unknown verdict
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(payload, output: str) -> None:
    if output == "text":
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            print(f"{key}: {value}")
    else:
        print(json.dumps(payload, sort_keys=True, indent=2))


def _spec(c: str, mu: str, nu: str) -> QhmSpec:
    try:
        return QhmSpec(int(c), parse_rational(mu), parse_rational(nu))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_iso_check(args, cfg: CliConfig) -> int:
    s1 = _spec(args.c, args.mu, args.nu)
    s2 = _spec(args.c2, args.mu2, args.nu2)
    for s in (s1, s2):
        cfg.check_cap(to_residue(s.parameters).q)
    verdict = iso_check(s1, s2, cfg.bfs_node_cap)
    _emit(verdict.to_json(), cfg.output)
    return verdict.exit_code


def orbit_report(p, p2, node_cap: int = DEFAULT_NODE_CAP) -> dict:
    d = decide_orbit(p, p2, node_cap)
    size = d.orbit_size if d.orbit_size is not None else len(enumerate_orbit(p, node_cap))
    return {
        "same_orbit": d.same_orbit,
        "witness": None if d.witness is None else d.witness.sigma.rows(),
        "path": None if d.witness is None else list(d.witness.path),
        "orbit_size": size,
        "invariant_gcd": to_residue(p).invariant_gcd,
        "reason": d.reason,
    }


def cmd_orbit(args, cfg: CliConfig) -> int:
    p, p2 = parse_point(args.p), parse_point(args.p2)
    cfg.check_cap(to_residue(p).q)
    report = orbit_report(p, p2, cfg.bfs_node_cap)
    _emit(report, cfg.output)
    return 0 if report["same_orbit"] else 1


def cmd_pic(args, cfg: CliConfig) -> int:
    elem = evaluate(args.expression)
    _emit({"input": args.expression, "normal_form": render(elem), "twist": elem.twist,
           "matrix": format_matrix(elem.auto.linear), "det": elem.auto.det}, cfg.output)
    return 0


def cmd_cp(args, cfg: CliConfig) -> int:
    d = decide_cp(evaluate(args.first), evaluate(args.second), cfg.bfs_node_cap)
    _emit({"equivalent": d.certificate is not None, "reason": d.reason,
           "certificate": None if d.certificate is None else d.certificate.to_json()}, cfg.output)
    return 0 if d.certificate is not None else 2


def cmd_cert_replay(args, cfg: CliConfig) -> int:
    text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text()
    data = json.loads(text)
    # accept a bare certificate or a full iso-check / cp report
    if isinstance(data, dict) and "certificate" in data:
        data = data["certificate"]
    if data is None:
        raise UsageError("document contains no certificate")
    ok, bad, message = verify_certificate_json(data)
    _emit({"valid": ok, "first_bad_step": bad, "message": message}, cfg.output)
    return 0 if ok else 1


def cmd_verify_analytic(args, cfg: CliConfig) -> int:
    n = args.grid or cfg.default_grid
    report = run_suite(args.c, n, args.seed)
    tol = cfg.tolerances.get("analytic", 1e-9)
    report["passed"] = suite_passes(report, tol)
    report["tolerance"] = tol
    _emit(report, cfg.output)
    return 0 if report["passed"] else 1


REPORT_ISO_CASES = [
    ("1", "0", "0", "2", "0", "0"),
    ("3", "1/5", "0", "3", "2/5", "0"),
    ("3", "1/3", "1/4", "3", "1/4", "1/3"),
    ("1", "0", "0", "1", "1/2", "0"),
    ("1", "1/7", "0", "1", "1/7", "1/7"),
    ("2", "1/6", "1/4", "2", "5/12", "0"),
]
REPORT_PIC_CASES = ["M^1 (x) M^1", "~M^3", "A[[0,1],[1,0]] (x) M^1", "conj([[1,0],[0,-1]], M^1 (x) A[id;(1/3,0)])"]


def build_report(seed: int, grid: int = 64) -> dict:
    iso = []
    for case in REPORT_ISO_CASES:
        verdict = iso_check(_spec(*case[:3]), _spec(*case[3:]))
        iso.append({"args": list(case), **verdict.to_json()})
    partitions = {str(q): sorted(len(o) for o in orbit_partition(q)) for q in range(1, 9)}
    return {
        "seed": seed,
        "iso_check": iso,
        "pic": {e: render(evaluate(e)) for e in REPORT_PIC_CASES},
        "orbit_partition_sizes": partitions,
        "analytic": {str(c): run_suite(c, grid, seed) for c in (-1, 0, 1, 2, 3)},
    }


def cmd_report(args, cfg: CliConfig) -> int:
    _emit(build_report(args.seed, args.grid or 64), cfg.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qhmpic", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    parser.add_argument("--output", choices=["json", "text"])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("iso-check", help="decide D^c_{mu nu} vs D^c2_{mu2 nu2}")
    for name in ("c", "mu", "nu", "c2", "mu2", "nu2"):
        p.add_argument(name)
    p.set_defaults(func=cmd_iso_check)

    p = sub.add_parser("orbit", help="GL(2,Z) orbit test for two rational points 'x,y'")
    p.add_argument("p")
    p.add_argument("p2")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("pic", help="normal form of a bimodule expression")
    p.add_argument("expression")
    p.set_defaults(func=cmd_pic)

    p = sub.add_parser("cp", help="cp-equivalence certificate between two expressions")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_cp)

    p = sub.add_parser("cert-replay", help="replay a certificate JSON file ('-' for stdin)")
    p.add_argument("file")
    p.set_defaults(func=cmd_cert_replay)

    p = sub.add_parser("verify-analytic", help="run the seeded numerical checks")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--grid", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_verify_analytic)

    p = sub.add_parser("report", help="deterministic JSON artifact covering every engine")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", type=int)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig.load(args.config)
        if args.output:
            cfg.output = args.output
        return args.func(args, cfg)
    except (UsageError, ParseError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"qhmpic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OrbitSearchLimit as exc:
        print(f"qhmpic {args.command}: error: {exc}; raise bfs_node_cap in the config", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
