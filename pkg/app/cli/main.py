"""
hopfcyclic command line.

    hopfcyclic nf "X*d1"
    hopfcyclic B "d1 ox X + 1/2 d1^2 ox Y"
    hopfcyclic verify lambda --n 3 --trials 25 --json
    hopfcyclic rel pair.json derive-cn --degree 1

Exit codes: 0 pass, 1 failed verification, 2 usage or input error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError

from app.cli.expr_parser import parse_element, parse_tensor
from app.models.reports import RelationCheck, VerificationReport
from app.services.algebra_core import verify_pbw
from app.services.characteristic_classes import NAMED_COCYCLES, named_cocycle, verify_all
from app.services.chevalley_eilenberg import ChevalleyEilenbergComplex
from app.services.crossed_product import verify_action_suite
from app.services.cyclic_complex import CyclicContext, verify_bicomplex, verify_cyclic_relations, verify_lemma_power
from app.services.forms import verify_gv
from app.services.hopf_ops import ModularPair, antipode, check_involution, coproduct, twisted_antipode, verify_hopf_axioms
from app.services.jets import verify_jet_suite
from app.services.lie_pairs import GModule, LiePair, load_lie_pair
from app.services.numeric_trace import verify_characteristic_map, verify_trace_identities
from app.services.relative_cyclic import derive_cn, verify_relative_suite
from app.utils.config import get_settings
from app.utils.exceptions import HopfCyclicError, InconsistentScalarError
from app.utils.structured_logging import get_structured_logger

logger = get_structured_logger(__name__)

BUILTIN_PAIRS: Dict[str, Callable[[], LiePair]] = {
    "affine": LiePair.affine_line,
    "affine-absolute": LiePair.affine_line_absolute,
}


class Config(BaseModel):
    """Settings merged with command-line flags."""

    codim: int = Field(..., ge=1, description="Codimension n")
    degree_cap: int = Field(..., ge=1, description="Degree cap D")
    eps_order: int = Field(..., ge=1, description="Truncation order K in eps")
    tolerance: float = Field(..., gt=0, description="Quadrature tolerance")
    seed: int = Field(..., description="Seed for randomized checks")
    output_format: str = Field("text", pattern="^(text|json)$")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "Config":
        settings = get_settings()

        def pick(name: str, default):
            value = getattr(args, name, None)
            return default if value is None else value

        return cls(
            codim=pick("codim", settings.codim),
            degree_cap=pick("degree_cap", settings.degree_cap),
            eps_order=pick("eps_order", settings.eps_order),
            tolerance=pick("tol", settings.quad_tolerance),
            seed=pick("seed", settings.seed),
            output_format="json" if getattr(args, "json", False) else settings.output_format,
        )


def _pair(config: Config, character: str) -> ModularPair:
    return ModularPair.standard(config.codim) if character == "modular" else ModularPair.untwisted(config.codim)


def _emit_value(config: Config, result: str, degree: int) -> int:
    if config.output_format == "json":
        print(json.dumps({"schema": 1, "result": result, "degree": degree}))
    else:
        print(result)
    return 0


def _emit_report(config: Config, report: VerificationReport) -> int:
    if config.output_format == "json":
        print(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    else:
        for check in report.checks:
            label = getattr(check, "relation", None) or getattr(check, "identity")
            status = "PASS" if check.passed else "FAIL"
            line = f"{status}  {label}"
            if isinstance(check, RelationCheck):
                line += f"  (degree {check.degree}, {check.trials} trials)"
                if check.counterexample:
                    line += f"\n      counterexample: {check.counterexample}"
            else:
                line += f"  lhs={check.lhs:.10g} rhs={check.rhs:.10g} abs_err={check.abs_err:.3g}"
            print(line)
        print(f"{report.suite}: {'pass' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def _merge(suite: str, reports: Sequence[VerificationReport], details: Dict) -> VerificationReport:
    checks = [check for report in reports for check in report.checks]
    return VerificationReport.from_checks(suite, checks, details)


# Algebra commands


def _nf_command(args: argparse.Namespace, config: Config) -> int:
    h = parse_element(args.expr, config.codim)
    return _emit_value(config, h.format(), 1)


def _cop_command(args: argparse.Namespace, config: Config) -> int:
    return _emit_value(config, coproduct(parse_element(args.expr, config.codim)).format(), 2)


def _antipode_command(args: argparse.Namespace, config: Config) -> int:
    return _emit_value(config, antipode(parse_element(args.expr, config.codim)).format(), 1)


def _tantipode_command(args: argparse.Namespace, config: Config) -> int:
    h = parse_element(args.expr, config.codim)
    return _emit_value(config, twisted_antipode(_pair(config, args.character), h).format(), 1)


def _cyclic_command(operation: str) -> Callable[[argparse.Namespace, Config], int]:
    def run(args: argparse.Namespace, config: Config) -> int:
        ctx = CyclicContext(config.codim, _pair(config, args.character))
        c = parse_tensor(args.tensor, config.codim)
        result = {"b": ctx.hochschild_b, "B": ctx.connes_B, "tau": ctx.cyclic}[operation](c)
        return _emit_value(config, result.format(), result.degree)

    return run


# Verification commands


def _verify_lambda(args: argparse.Namespace, config: Config) -> int:
    ctx = CyclicContext(config.codim, _pair(config, args.character))
    reports = [
        verify_cyclic_relations(ctx, args.n, args.trials, config.seed),
        verify_lemma_power(ctx, args.n, args.trials, config.seed),
    ]
    return _emit_report(config, _merge("lambda", reports, {"module": ctx.name, "n_max": args.n, "seed": config.seed}))


def _verify_bicomplex(args: argparse.Namespace, config: Config) -> int:
    ctx = CyclicContext(config.codim, _pair(config, args.character))
    return _emit_report(config, verify_bicomplex(ctx, args.n, args.trials, config.seed))


def _verify_action(args: argparse.Namespace, config: Config) -> int:
    eps_order = args.eps_order if args.eps_order is not None else (config.eps_order if config.codim == 1 else 2)
    return _emit_report(config, verify_action_suite(config.codim, args.trials, config.seed, eps_order))


def _verify_trace(args: argparse.Namespace, config: Config) -> int:
    reports = [
        verify_trace_identities(config.seed, config.tolerance, args.diffeo),
        verify_characteristic_map(config.seed, config.tolerance, args.diffeo),
    ]
    return _emit_report(config, _merge("trace", reports, {"diffeo": args.diffeo, "seed": config.seed}))


def _verify_gamma(args: argparse.Namespace, config: Config) -> int:
    return _emit_report(config, verify_jet_suite(config.codim, args.trials, config.seed, config.eps_order))


def _verify_pbw(args: argparse.Namespace, config: Config) -> int:
    return _emit_report(config, verify_pbw(config.codim, args.tail_cap, args.words, seed=config.seed))


def _verify_hopf(args: argparse.Namespace, config: Config) -> int:
    pair = _pair(config, args.character)
    report = verify_hopf_axioms(config.codim, config.degree_cap, pair, seed=config.seed)
    involution_cap = min(config.degree_cap, 3 if config.codim == 1 else 2)
    involutive = check_involution(pair, involution_cap)
    report.checks.append(RelationCheck(relation="S~^2 = id", degree=involution_cap, trials=1, passed=involutive))
    report.passed = report.passed and involutive
    return _emit_report(config, report)


def _classes_verify(args: argparse.Namespace, config: Config) -> int:
    return _emit_report(config, verify_all())


def _classes_show(args: argparse.Namespace, config: Config) -> int:
    cocycle = named_cocycle(args.name)
    return _emit_value(config, cocycle.cochain.format(), cocycle.cochain.degree)


def _gv_command(args: argparse.Namespace, config: Config) -> int:
    return _emit_report(config, verify_gv(args.diffeo, config.seed, config.tolerance))


# Relative commands


def _load_pair(source: str) -> LiePair:
    if source in BUILTIN_PAIRS and not Path(source).exists():
        return BUILTIN_PAIRS[source]()
    return load_lie_pair(source)


def _rel_verify(args: argparse.Namespace, config: Config) -> int:
    pair = _load_pair(args.pairfile)
    return _emit_report(config, verify_relative_suite(pair, args.n, args.trials, config.seed, config.degree_cap))


def _rel_homology(args: argparse.Namespace, config: Config) -> int:
    ce = ChevalleyEilenbergComplex(_load_pair(args.pairfile))
    homology, cohomology = ce.homology_dims(args.degree), ce.cohomology_dims(args.degree)
    if config.output_format == "json":
        print(json.dumps({"schema": 1, "homology": homology, "cohomology": cohomology}, sort_keys=True))
    else:
        for n in sorted(homology):
            print(f"H_{n} = {homology[n]}    H^{n} = {cohomology[n]}")
    return 0


def _rel_derive_cn(args: argparse.Namespace, config: Config) -> int:
    pair = _load_pair(args.pairfile)
    module = GModule.trivial(pair.algebra.dim) if args.trivial_module else None
    try:
        scalar = derive_cn(args.degree, pair, module, config.degree_cap)
    except InconsistentScalarError as exc:
        if config.output_format == "json":
            print(json.dumps({"schema": 1, "degree": args.degree, "c_n": None, "error": exc.message, "details": exc.details}))
        else:
            print(f"no scalar: {exc.message}")
        return 1
    rendered = "indeterminate" if scalar is None else str(scalar)
    if config.output_format == "json":
        print(json.dumps({"schema": 1, "degree": args.degree, "c_n": rendered}))
    else:
        print(f"c_{args.degree} = {rendered}")
    return 0


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--codim", type=int, help="Codimension n")
    common.add_argument("--degree-cap", dest="degree_cap", type=int, help="Degree cap D")
    common.add_argument("--eps-order", dest="eps_order", type=int, help="eps truncation order K")
    common.add_argument("--seed", type=int, help="Seed (HOPFCYCLIC_SEED by default)")
    common.add_argument("--json", action="store_true", help="Emit JSON")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="hopfcyclic", description="Hopf-cyclic cohomology engine.")
    commands = parser.add_subparsers(dest="command", required=True)

    def leaf(subparsers, name: str, handler, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    for name, handler, help_text in (
        ("nf", _nf_command, "PBW normal form"),
        ("cop", _cop_command, "Coproduct"),
        ("antipode", _antipode_command, "Antipode"),
        ("tantipode", _tantipode_command, "Twisted antipode"),
    ):
        sub = leaf(commands, name, handler, help_text)
        sub.add_argument("expr")
        if name == "tantipode":
            sub.add_argument("--character", choices=("modular", "counit"), default="modular")

    for name, help_text in (("b", "Hochschild boundary"), ("B", "Connes boundary"), ("tau", "Cyclic operator")):
        sub = leaf(commands, name, _cyclic_command(name), help_text)
        sub.add_argument("tensor")
        sub.add_argument("--character", choices=("modular", "counit"), default="modular")

    verify = commands.add_parser("verify", help="Verification suites").add_subparsers(dest="suite", required=True)
    for name, handler in (("lambda", _verify_lambda), ("bicomplex", _verify_bicomplex)):
        sub = leaf(verify, name, handler, f"{name} suite")
        sub.add_argument("--n", type=int, default=3)
        sub.add_argument("--trials", type=int, default=25)
        sub.add_argument("--character", choices=("modular", "counit"), default="modular")
    sub = leaf(verify, "action", _verify_action, "Module-algebra law on crossed products")
    sub.add_argument("--trials", type=int, default=20)
    sub = leaf(verify, "trace", _verify_trace, "Numeric trace identities")
    sub.add_argument("--tol", type=float)
    sub.add_argument("--diffeo", default="cubic")
    sub = leaf(verify, "gamma-cocycle", _verify_gamma, "Jet suite and the gamma cocycle identity")
    sub.add_argument("--trials", type=int, default=10)
    sub = leaf(verify, "pbw", _verify_pbw, "Jacobi identity and confluence")
    sub.add_argument("--tail-cap", dest="tail_cap", type=int, default=2)
    sub.add_argument("--words", type=int, default=200)
    sub = leaf(verify, "hopf", _verify_hopf, "Hopf algebra axioms")
    sub.add_argument("--character", choices=("modular", "counit"), default="modular")

    classes = commands.add_parser("classes", help="Characteristic classes").add_subparsers(dest="action", required=True)
    leaf(classes, "verify", _classes_verify, "Verify every named cocycle")
    sub = leaf(classes, "show", _classes_show, "Render a named cocycle")
    sub.add_argument("name", choices=sorted(NAMED_COCYCLES))

    sub = leaf(commands, "gv-pullback", _gv_command, "Godbillon-Vey pullback and pairing")
    sub.add_argument("--diffeo", default="cubic")
    sub.add_argument("--tol", type=float)

    rel = commands.add_parser("rel", help="Relative cohomology of a Lie pair")
    rel.add_argument("pairfile", help="Pair JSON file, or 'affine' / 'affine-absolute'")
    rel_commands = rel.add_subparsers(dest="action", required=True)
    sub = leaf(rel_commands, "verify", _rel_verify, "Relative suite")
    sub.add_argument("--n", type=int, default=2)
    sub.add_argument("--trials", type=int, default=15)
    sub = leaf(rel_commands, "homology", _rel_homology, "Chevalley-Eilenberg dimensions")
    sub.add_argument("--degree", type=int)
    sub = leaf(rel_commands, "derive-cn", _rel_derive_cn, "Scalar c_n in mu B alpha = c_n d")
    sub.add_argument("--degree", type=int, required=True)
    sub.add_argument("--trivial-module", dest="trivial_module", action="store_true")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = Config.from_args(args)
    except ValidationError as exc:
        first = exc.errors()[0]
        print(f"error: {'.'.join(str(p) for p in first['loc'])}: {first['msg']}", file=sys.stderr)
        return 2
    logger.debug("Dispatching command", extra={"command": args.command, "codim": config.codim, "seed": config.seed})
    try:
        return args.handler(args, config)
    except HopfCyclicError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        logger.debug("Command failed", extra={"error_code": exc.error_code, "details": exc.details})
        return 2
