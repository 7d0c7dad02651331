"""
Command implementations for the koethe CLI.

Each command takes the parsed arguments, writes its artifacts into the
output directory and returns a CommandResult. Errors propagate as
KoetheError subclasses; main() maps them to exit codes.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from workbench.config import config, resolve_budget, resolve_depth
from workbench.errors import ConfigError, ConsistencyError, HypothesisError, KoetheError
from weights.family import WeightFamily
from weights.index_set import IndexKind
from conditions.checks import check_B, check_log_criterion, check_N, check_U
from conditions.matrices import REVISED, check_M
from classifier.homology import profile_document, profile_family
from relations.witness import non_algebra_witness
from sequences.element import SeqElement
from sequences.norms import membership
from sequences.taylor import (
    as_element,
    exp_coeffs,
    geometric_coeffs,
    hadamard_mul,
    index_coeffs,
    read_coefficients_csv,
    write_coefficients_csv,
)
from approx.identity import CSV_COLUMNS, build_net, verify_convergence, verify_lawson_read
from approx.idempotence import idempotence_profile, non_idempotent_witness
from reporting.formatters import CSVFormatter, JSONFormatter, MarkdownFormatter
from reporting.generator import ReportGenerator
from cli.spaces import SpaceConfig, load_space, require_valid, validate_space

logger = logging.getLogger(__name__)

CHECKS = {
    "U": check_U,
    "N": check_N,
    "B": check_B,
    "log": check_log_criterion,
}

SERIES = {
    "geometric": geometric_coeffs,
    "exp": exp_coeffs,
    "index": index_coeffs,
}


@dataclass
class CommandResult:
    """Exit status, the spaces touched and the files written."""

    status: int = 0
    spaces: List[str] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)


def _write(result: CommandResult, out_dir: Path, filename: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / filename
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    result.artifacts.append(str(path))
    return path


def _resolved(family, settings: Dict[str, Any]) -> Dict[str, Any]:
    """Depth, level budget and epsilon in effect, written into every artifact."""
    pairs = family.index_set.kind == IndexKind.NATURAL_PAIRS
    epsilon = settings["epsilon"]
    return {
        "depth": family.index_set.clamp(resolve_depth(settings["depth"], pairs)),
        "level_budget": resolve_budget(settings["level_budget"]),
        "epsilon": float(epsilon if epsilon is not None else config.get("analysis.epsilon", 1e-6)),
    }


def _load(args, path) -> Tuple[SpaceConfig, WeightFamily, Dict[str, Any]]:
    space = load_space(path)
    settings = space.settings(args.depth, args.levels, args.epsilon)
    family = require_valid(space, settings["depth"], settings["level_budget"])
    return space, family, _resolved(family, settings)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def cmd_validate(args) -> CommandResult:
    """Print the axioms verdict and flag agreement for each space."""
    result = CommandResult()
    for path in args.configs:
        space = load_space(path)
        result.spaces.append(space.name)
        settings = space.settings(args.depth, args.levels)
        validation = validate_space(space, settings["depth"], settings["level_budget"])
        axioms = validation.axioms
        print(f"{space.name}: axioms {axioms.outcome.value} [{axioms.tier.value}] {axioms.reason}")
        if validation.flag_problems:
            for problem in validation.flag_problems:
                print(f"  ✗ declared flag contradicted: {problem}")
        else:
            print("  ✓ declared flags agree with evaluation")
        if not validation.ok:
            result.status = max(result.status, ConfigError.exit_code)
    return result


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def classify_space(path: str, depth: Optional[int] = None, level_budget: Optional[int] = None,
                   epsilon: Optional[float] = None, m_variant: Optional[str] = None) -> Dict[str, Any]:
    """
    Validate and classify one space; returns its profile document.

    Module-level so worker processes can run it.
    """
    space = load_space(path)
    settings = space.settings(depth, level_budget, epsilon)
    family = require_valid(space, settings["depth"], settings["level_budget"])
    analysis = _resolved(family, settings)
    cp, hp = profile_family(family, analysis["depth"], analysis["level_budget"], m_variant)
    return profile_document(hp, cp, space.name, analysis)


def cmd_classify(args) -> CommandResult:
    """Write <name>.profile.json for every space; independent spaces may run in parallel."""
    result = CommandResult()
    out_dir = Path(args.out)
    call_args = [(path, args.depth, args.levels, args.epsilon, args.m_variant) for path in args.configs]

    if args.jobs > 1 and len(call_args) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as executor:
            futures = [executor.submit(classify_space, *a) for a in call_args]
            outcomes = []
            for future in futures:
                try:
                    outcomes.append(future.result())
                except KoetheError as e:
                    outcomes.append(e)
    else:
        outcomes = []
        for a in call_args:
            try:
                outcomes.append(classify_space(*a))
            except KoetheError as e:
                outcomes.append(e)

    for path, outcome in zip(args.configs, outcomes):
        try:
            if isinstance(outcome, KoetheError):
                raise outcome
            name = outcome["space"]
            result.spaces.append(name)
            _write(result, out_dir, f"{name}.profile.json", JSONFormatter.format(outcome))
            if args.format == "markdown":
                _write(result, out_dir, f"{name}.profile.md", MarkdownFormatter.format_profile(outcome))
            homology = outcome["homology"]
            print(f"{name}: dg = db = {homology['dg']}, wdg = wdb = {homology['wdg']}")
            violations = outcome["consistency"]["violations"]
            if violations:
                raise ConsistencyError(f"{name}: violated {', '.join(violations)}")
        except KoetheError as e:
            logger.error("%s: %s", path, e)
            print(f"Error: {path}: {e}")
            result.status = max(result.status, e.exit_code)
    return result


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def cmd_check(args) -> CommandResult:
    """One condition verdict; `log` also runs the idempotence profile."""
    space, family, analysis = _load(args, args.config)
    result = CommandResult(spaces=[space.name])
    depth, budget = analysis["depth"], analysis["level_budget"]

    if args.condition == "M":
        verdict = check_M(family, depth=depth, level_budget=budget, variant=args.m_variant or REVISED)
    else:
        verdict = CHECKS[args.condition](family, depth, budget)
    document: Dict[str, Any] = {
        "space": space.name,
        "condition": args.condition,
        "analysis": analysis,
        "verdict": verdict.to_dict(),
    }
    if args.condition == "log":
        try:
            report = idempotence_profile(family, depth, budget, seed=args.seed)
            document["idempotence"] = report.to_dict()
        except HypothesisError as e:
            document["idempotence"] = {"skipped": str(e)}

    _write(result, Path(args.out), f"{space.name}.check-{args.condition}.json",
           JSONFormatter.format(document))
    print(f"{space.name}: ({args.condition}) {verdict.outcome.value} [{verdict.tier.value}] "
          f"{verdict.reason}")
    return result


# ---------------------------------------------------------------------------
# witness
# ---------------------------------------------------------------------------

def cmd_witness(args) -> CommandResult:
    """Build the non-algebra or non-idempotence witness of a space."""
    space, family, analysis = _load(args, args.config)
    result = CommandResult(spaces=[space.name])
    depth, budget = analysis["depth"], analysis["level_budget"]

    if args.kind == "non-algebra":
        witness = non_algebra_witness(family, args.k_max, depth, args.override, budget)
        document = witness.to_dict()
        document["square_seminorm_log"] = witness.square_seminorm_log()
        document["proof_bound_violations"] = witness.proof_bound_violations()
        summary = (f"{len(witness.ranks)} terms from level {witness.base_level}, "
                   f"log ‖x²‖ = {witness.square_seminorm_log():.3f}")
    else:
        witness = non_idempotent_witness(family, depth, args.blocks, budget)
        document = witness.to_dict()
        summary = (f"{witness.blocks} blocks, fourth-root sum {witness.fourth_root_sum:.3f} "
                   f"≥ {witness.blocks / 2.0:.1f}")
    document["space"] = space.name
    document["analysis"] = analysis
    _write(result, Path(args.out), f"{space.name}.{args.kind}.json", JSONFormatter.format(document))
    print(f"{space.name}: {args.kind} witness with {summary}")
    return result


# ---------------------------------------------------------------------------
# approx-id
# ---------------------------------------------------------------------------

def _lawson_read_sample(steps: List, count: int = 10) -> List:
    """Evenly spaced steps, always including the last."""
    if len(steps) <= count:
        return list(steps)
    stride = len(steps) // count
    picked = steps[stride - 1::stride]
    if picked[-1] is not steps[-1]:
        picked.append(steps[-1])
    return picked


def cmd_approx_id(args) -> CommandResult:
    """Build u_1..u_N for one element, verify convergence and Lawson-Read."""
    space, family, analysis = _load(args, args.config)
    result = CommandResult(spaces=[space.name])
    depth, budget = analysis["depth"], analysis["level_budget"]

    a = SeqElement.from_rule(args.element, depth, family.index_set, name=args.element)
    ns = range(args.n_step, args.n_max + 1, args.n_step)
    steps = build_net(a, family, args.p_level, ns, depth, args.q_level, budget)
    report = verify_convergence(a, family, args.p_level, steps, analysis["epsilon"])
    lawson = verify_lawson_read([a], family, _lawson_read_sample(steps), epsilon=analysis["epsilon"])

    convergence = report.to_dict()
    convergence.pop("rows")
    document = {
        "space": space.name,
        "element": args.element,
        "analysis": analysis,
        "p_level": steps[0].p_level,
        "q_level": steps[0].q_level,
        "steps": [step.to_dict() for step in steps],
        "convergence": convergence,
        "lawson_read": lawson.to_dict(),
    }
    _write(result, Path(args.out), f"{space.name}.approx-id.json", JSONFormatter.format(document))
    _write(result, Path(args.out), f"{space.name}.convergence.csv",
           CSVFormatter.format(CSV_COLUMNS, report.rows))
    print(MarkdownFormatter.format_convergence(report.to_dict()))
    print(f"Lawson-Read: {'all hold' if lawson.all_hold else 'not all hold'}")
    return result


# ---------------------------------------------------------------------------
# hadamard
# ---------------------------------------------------------------------------

def _series(source: str, terms: int) -> np.ndarray:
    """A builtin series name or a coefficient CSV path."""
    if source in SERIES:
        return SERIES[source](terms)
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"{source!r} is neither a builtin series ({', '.join(SERIES)}) nor a file")
    return read_coefficients_csv(path)


def cmd_hadamard(args) -> CommandResult:
    """Coefficientwise product of two series, written as a coefficient CSV."""
    result = CommandResult()
    f = _series(args.f, args.terms)
    g = _series(args.g, args.terms)
    product = hadamard_mul(f, g, min(args.terms, f.size, g.size))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{args.name}.csv"
    write_coefficients_csv(path, product)
    result.artifacts.append(str(path))
    print(f"{args.name}: {product.size} coefficients written to {path}")

    if args.space:
        space, family, analysis = _load(args, args.space)
        result.spaces.append(space.name)
        element = as_element(product, args.tail, name=args.name)
        verdict = membership(element, family, analysis["level_budget"])
        document = {"space": space.name, "product": args.name, "terms": int(product.size),
                    "tail": args.tail, "membership": verdict.to_dict()}
        _write(result, out_dir, f"{args.name}.membership.json", JSONFormatter.format(document))
        print(f"{args.name} in λ({space.name}): {verdict.outcome.value} [{verdict.tier.value}]")
    return result


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

_EXTENSIONS = {"json": "json", "csv": "csv", "markdown": "md"}


def cmd_report(args) -> CommandResult:
    """Aggregate a directory of profiles into one table."""
    result = CommandResult()
    directory = Path(args.directory or args.out)
    output = Path(args.out) / f"report.{_EXTENSIONS[args.format]}"
    report = ReportGenerator(directory).generate_report(format=args.format, output_path=output)
    result.artifacts.append(str(output))
    print(report, end="" if report.endswith("\n") else "\n")
    return result


COMMANDS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "check": cmd_check,
    "witness": cmd_witness,
    "approx-id": cmd_approx_id,
    "hadamard": cmd_hadamard,
    "report": cmd_report,
}
