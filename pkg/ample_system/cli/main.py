"""
Command-line interface for the ample-complex toolkit.

Every command prints one JSON object on stdout. Exit codes: 0 when the checked
property holds, 1 when it is refuted (the report carries a certificate that
``recheck`` re-validates), 2 on usage, configuration or budget errors.
"""

import functools
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

import click

from ..core.ampleness import (
    AmpleChallenge,
    find_witness,
    link_reports,
    min_vertex_bound,
    resilience_guarantee,
    simplex_link,
    verify_ample,
)
from ..core.char_audit import CharCtx, CosetInstance, coset_count, weil_sum
from ..core.dedekind import count_antichains, dedekind_reduced
from ..core.errors import AmpleError, ComplexInputError, WitnessNotFoundError
from ..core.iterated_paley import WitnessProblem, challenge_check, certified_params, explore, solve_witness
from ..core.random_complex import (
    bound_not_ample,
    bound_not_ample_sum,
    existence_inequality,
    p_from_mu,
)
from ..core.seeding import derive_rng
from ..core.settings import Settings, load_settings
from ..core.simplex_core import RemovalFamily
from ..core.spheres import (
    SphereTriangulation,
    double_pyramid,
    icosahedron,
    octahedron,
    random_sphere,
    sphere_audit,
    tetrahedron,
)
from ..core.topo_checks import (
    DiscCertificate,
    SimplicialLoop,
    betti_gf2,
    fill_bounds,
    fill_loop,
    find_cone_vertex,
    validate_certificate,
)
from ..workflows.experiments import (
    CharsumAuditWorkflow,
    FillBatchWorkflow,
    MedialBatchWorkflow,
    SolveBatchWorkflow,
)
from .oracles import OracleSpec, parse_field, require_explicit

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass
class AppState:
    settings: Settings
    seed: int
    threads: int
    timing: bool


def _configure_logging(verbose: bool) -> None:
    root = logging.getLogger("ample_system")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(click.get_text_stream("stderr"))
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)


def emit(data: Dict[str, Any], code: int = 0) -> None:
    click.echo(json.dumps(data, sort_keys=True))
    if code:
        raise click.exceptions.Exit(code)


def reports_errors(command: Callable[..., None]) -> Callable[..., None]:
    """Turn toolkit errors into an error report with exit code 2."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            command(*args, **kwargs)
        except AmpleError as e:
            logger.error("%s", e)
            emit(e.to_dict(), 2)

    return wrapper


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ComplexInputError(f"expected comma-separated integers, got '{text}'") from e


def _json_arg(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ComplexInputError(f"{what} is not valid JSON: {e}") from e


def _strip_timings(ctx: Dict[str, Any], state: AppState) -> Dict[str, Any]:
    if "error" in ctx:
        emit(ctx["error"], 2)
    report = dict(ctx["report"])
    if state.timing:
        report["ms"] = ctx["timings"]
    return report


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="YAML file merged over the shipped defaults")
@click.option("--verbose", is_flag=True, help="DEBUG logging on stderr")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker processes")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True,
              help="Master seed for every random stream")
@click.option("--timing", is_flag=True, help="Include wall time in reports")
@click.version_option(package_name="ample-complexes")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], verbose: bool, threads: Optional[int],
        seed: int, timing: bool) -> None:
    """Ample simplicial complexes: verification, constructions and audits."""
    try:
        settings = load_settings(config_path)
    except AmpleError as e:
        emit(e.to_dict(), 2)
    _configure_logging(verbose or settings.output.verbose)
    ctx.obj = AppState(settings, seed, threads or settings.parallel.workers, timing or settings.output.timing)


@cli.command()
@click.option("--oracle", required=True, help="file:<path> | hash:... | random:... | xnp:... | paley:q=... | example13")
@click.option("--r", "r", type=click.IntRange(min=0), required=True, help="Ampleness level")
@click.option("--mode", type=click.Choice(["exhaustive", "sampled"]), default="exhaustive", show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=None, help="Sampled challenges")
@click.option("--links", "link_dim", type=click.IntRange(min=0), default=None,
              help="Verify links of all k-simplices at level r-k-1 instead")
@click.pass_obj
@reports_errors
def verify(state: AppState, oracle: str, r: int, mode: str, trials: Optional[int], link_dim: Optional[int]) -> None:
    """Check that every challenge on at most r vertices has a witness."""
    spec = OracleSpec.parse(oracle)
    X = spec.build(state.settings)
    if link_dim is not None:
        reports = link_reports(require_explicit(X, "verify --links"), r, link_dim, state.settings)
        links = [{"simplex": list(s), **rep.to_dict(state.timing)} for s, rep in reports.items()]
        all_ample = all(rep.is_ample for rep in reports.values())
        failing = [
            {"simplex": list(s), "counterexample": rep.counterexample.to_dict()}
            for s, rep in reports.items()
            if rep.counterexample is not None
        ]
        emit(
            {"oracle": spec.canonical(), "r": r, "k": link_dim, "level": r - link_dim - 1,
             "links": links, "all_ample": all_ample, "link_counterexamples": failing},
            0 if all_ample else 1,
        )
        return
    report = verify_ample(X, r, mode=mode, seed=state.seed, trials=trials, settings=state.settings,
                          workers=state.threads)
    data = {"oracle": spec.canonical(), **report.to_dict(state.timing)}
    emit(data, 1 if report.verdict == "counterexample" else 0)


@cli.command()
@click.option("--oracle", required=True)
@click.option("--U", "U", required=True, help="Comma-separated vertices")
@click.option("--A", "A", default="[]", show_default=True, help="JSON list of pattern simplices")
@click.option("--search", type=click.Choice(["exhaustive", "sampled"]), default="exhaustive", show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=None)
@click.pass_obj
@reports_errors
def witness(state: AppState, oracle: str, U: str, A: str, search: str, trials: Optional[int]) -> None:
    """Find a vertex whose link meets X_U exactly in the pattern A."""
    spec = OracleSpec.parse(oracle)
    X = spec.build(state.settings)
    challenge = AmpleChallenge.from_dict({"U": _int_list(U), "A_facets": _json_arg(A, "--A")})
    v = find_witness(X, challenge, search=search, rng=derive_rng(state.seed, "witness", 0),
                     trials=trials or state.settings.sampling.witness_trials)
    data = {"oracle": spec.canonical(), "search": search, "challenge": challenge.to_dict(), "witness": v}
    if v is None:
        data["counterexample"] = challenge.to_dict()
    emit(data, 1 if v is None else 0)


@cli.command("random")
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Vertex candidates")
@click.option("--p", "p", type=float, default=0.5, show_default=True, help="Face probability")
@click.option("--mu", type=float, default=None, help="Derive p from p^(2^r) = (r ln n + mu)/n")
@click.option("--dim", "dim_cap", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--r", "r", type=click.IntRange(min=1), default=None, help="Verify at this level")
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True, help="Seeds in a batch")
@click.option("--removals", type=click.IntRange(min=0), default=0, show_default=True,
              help="Batch only: re-verify this many ample samples after removing one edge")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_obj
@reports_errors
def random_command(state: AppState, n: int, p: float, mu: Optional[float], dim_cap: int, r: Optional[int],
           count: int, removals: int, out: Optional[str]) -> None:
    """Sample a lower-model random complex and evaluate the non-ampleness bounds."""
    if mu is not None:
        if r is None:
            raise ComplexInputError("--mu needs --r")
        p = p_from_mu(n, r, mu)
    if count > 1:
        if r is None:
            raise ComplexInputError("batches need --r")
        workflow = MedialBatchWorkflow(state.settings, state.threads)
        ctx = workflow.run({"n": n, "r": r, "p": p, "dim_cap": dim_cap, "seed": state.seed,
                            "count": count, "removals": removals})
        emit(_strip_timings(ctx, state))
        return
    spec = OracleSpec.parse(f"random:n={n},p={p!r},dim={dim_cap},seed={state.seed}")
    X = spec.build(state.settings)
    data: Dict[str, Any] = {"oracle": spec.canonical(), "n": n, "p": p, "dim": dim_cap, "seed": state.seed,
                            "f_vector": list(X.f_vector())}
    if out:
        X.save(out)
        data["out"] = out
    code = 0
    if r is not None:
        report = verify_ample(X, r, settings=state.settings, workers=state.threads)
        data["verify"] = report.to_dict(state.timing)
        if report.counterexample is not None:
            data["counterexample"] = report.counterexample.to_dict()
        if n > r and 0.0 < p < 1.0:
            data["bound_not_ample"] = bound_not_ample(n, r, p).value
            data["bound_not_ample_sum"] = bound_not_ample_sum(n, r, p).value
            data["existence_inequality"] = existence_inequality(n, r, p)
        code = 1 if report.verdict == "counterexample" else 0
    emit(data, code)


@cli.command()
@click.option("--oracle", required=True)
@click.option("--r", "r", type=click.IntRange(min=4), default=5, show_default=True)
@click.option("--loop", "loop_text", default=None, help="Comma-separated loop vertices")
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True, help="Random loops")
@click.option("--min-length", type=click.IntRange(min=3), default=10, show_default=True)
@click.option("--max-length", type=click.IntRange(min=3), default=30, show_default=True)
@click.option("--witness-mode", type=click.Choice(["cone", "exact"]), default="cone", show_default=True)
@click.pass_obj
@reports_errors
def fill(state: AppState, oracle: str, r: int, loop_text: Optional[str], count: int, min_length: int,
         max_length: int, witness_mode: str) -> None:
    """Fill simplicial loops with disc certificates by coning off arcs of r vertices."""
    spec = OracleSpec.parse(oracle)
    X = spec.build(state.settings)
    if loop_text is None:
        if min_length > max_length:
            raise ComplexInputError("--min-length exceeds --max-length")
        workflow = FillBatchWorkflow(state.settings, state.threads)
        ctx = workflow.run({"oracle": X, "r": r, "count": count, "min_length": min_length,
                            "max_length": max_length, "seed": state.seed, "witness_mode": witness_mode})
        report = {"oracle": spec.canonical(), **_strip_timings(ctx, state)}
        emit(report, 0 if report["valid"] == report["count"] else 1)
        return
    loop = SimplicialLoop(tuple(_int_list(loop_text)))
    search = "sampled" if spec.scheme in ("hash", "xnp") else "exhaustive"
    data: Dict[str, Any] = {"oracle": spec.canonical(), "r": r, "witness_mode": witness_mode,
                            "loop": list(loop.vertices)}
    try:
        cert = fill_loop(X, loop, r, witness_mode=witness_mode, search=search,
                         rng=derive_rng(state.seed, "fill", 0),
                         trials=state.settings.sampling.witness_trials)
    except WitnessNotFoundError as e:
        data["stuck"] = e.challenge
        emit(data, 1)
        return
    internal_cap, triangle_cap = fill_bounds(len(loop), r, cert.cone_at_three)
    failures = validate_certificate(X, cert, r)
    data.update({"certificate": cert.to_dict(), "internal": len(cert.internal_vertices),
                 "triangles": len(cert.triangles), "internal_bound": internal_cap,
                 "triangle_bound": triangle_cap, "valid": not failures, "failures": failures})
    emit(data, 1 if failures else 0)


@cli.command()
@click.option("--oracle", required=True)
@click.option("--max-dim", type=click.IntRange(min=0), default=None)
@click.pass_obj
@reports_errors
def betti(state: AppState, oracle: str, max_dim: Optional[int]) -> None:
    """GF(2) Betti numbers of an explicit complex."""
    spec = OracleSpec.parse(oracle)
    X = require_explicit(spec.build(state.settings), "betti")
    numbers = betti_gf2(X, max_dim, max_cells=state.settings.budgets.max_rank_cells)
    emit({"oracle": spec.canonical(), "betti": list(numbers), "f_vector": list(X.f_vector()),
          "euler_characteristic": X.euler_characteristic()})


@cli.command()
@click.option("--r", "r", type=click.IntRange(min=0), required=True)
@click.option("--family", default="[]", show_default=True, help="JSON list of removed simplices")
@click.pass_obj
@reports_errors
def resilience(state: AppState, r: int, family: str) -> None:
    """Ampleness level left after removing a family of simplices."""
    members = _json_arg(family, "--family")
    removed = RemovalFamily.of(members)
    guarantee = resilience_guarantee(r, removed, max_k=state.settings.budgets.max_dedekind_k)
    data = guarantee.to_dict()
    if r >= 1:
        bound = min_vertex_bound(r, max_k=state.settings.budgets.max_dedekind_k)
        data["min_vertices"] = {"exact": bound.exact, "binomial": bound.binomial}
    emit(data)


@cli.command()
@click.option("--k", "k", type=click.IntRange(min=0), required=True)
@click.option("--method", type=click.Choice(["enumerate", "table"]), default="enumerate", show_default=True)
@click.option("--antichains", is_flag=True, help="Cross-check against antichain enumeration")
@click.pass_obj
@reports_errors
def dedekind(state: AppState, k: int, method: str, antichains: bool) -> None:
    """Number of simplicial complexes on k labelled vertices."""
    value = dedekind_reduced(k, max_k=state.settings.budgets.max_dedekind_k, method=method)
    data: Dict[str, Any] = {"k": k, "M_prime": value}
    if antichains:
        oracle = count_antichains(k)
        data["antichains"] = oracle
        data["matches"] = oracle == value + 1
        emit(data, 0 if data["matches"] else 1)
        return
    emit(data)


@cli.command()
@click.option("--r", "r", type=click.IntRange(min=1), required=True)
@click.pass_obj
@reports_errors
def params(state: AppState, r: int) -> None:
    """Certified field parameters (p, n, g) for witness solving at level r."""
    emit(certified_params(r, state.settings).to_dict())


@cli.command()
@click.option("--field", "field_spec", default=None, help="field:n=..,p=..[,g=..] (default: certified)")
@click.option("--r", "r", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--U", "U", default=None, help="Comma-separated field elements")
@click.option("--Y", "Y", default="[]", show_default=True, help="JSON list of subsets of U")
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True, help="Random challenges")
@click.option("--x-search", type=click.Choice(["auto", "exhaustive", "sampled"]), default="auto", show_default=True)
@click.pass_obj
@reports_errors
def solve(state: AppState, field_spec: Optional[str], r: int, U: Optional[str], Y: str, count: int,
          x_search: str) -> None:
    """Find x with sigma + x a hyperedge exactly for sigma in Y."""
    ctx = parse_field(field_spec, state.settings) if field_spec else None
    if U is not None:
        if ctx is None:
            raise ComplexInputError("--U needs --field")
        problem = WitnessProblem.create(ctx, _int_list(U), _json_arg(Y, "--Y"))
        result = solve_witness(problem, x_search=x_search, seed=state.seed, settings=state.settings)
        checked = challenge_check(ctx, problem.U, problem.Y, result.x,
                                  max_size=state.settings.budgets.max_simplex_size)
        data = {"field": ctx.spec(), "U": list(problem.U),
                "Y": [list(s) for s in sorted(problem.Y, key=lambda s: (len(s), s))],
                **result.to_dict(), "checked": checked}
        emit(data, 0 if checked else 1)
        return
    workflow = SolveBatchWorkflow(state.settings, state.threads)
    run = workflow.run({"r": r, "count": count, "seed": state.seed, "field": ctx})
    report = _strip_timings(run, state)
    emit(report, 0 if report["checked"] == report["count"] else 1)


@cli.command("audit-charsum")
@click.option("--q", "qs", type=int, multiple=True, default=(13, 29, 101, 257), show_default=True)
@click.option("--m", "ms", type=int, multiple=True, default=(2, 3, 4, 5), show_default=True)
@click.option("--d", "ds", type=int, multiple=True, default=(1, 2, 3), show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=200, show_default=True)
@click.pass_obj
@reports_errors
def audit_charsum(state: AppState, qs: List[int], ms: List[int], ds: List[int], trials: int) -> None:
    """Coset-intersection counts and Weil sums against their bounds."""
    workflow = CharsumAuditWorkflow(state.settings, state.threads)
    ctx = workflow.run({"qs": tuple(qs), "ms": tuple(ms), "ds": tuple(ds), "trials": trials, "seed": state.seed})
    report = _strip_timings(ctx, state)
    clean = report["coset_violations"] == 0 and report["weil_violations"] == 0
    emit(report, 0 if clean else 1)


def _sphere_from(shape: str, seed: int) -> SphereTriangulation:
    name, _, arg = shape.partition(":")
    if name == "tetrahedron":
        return tetrahedron()
    if name == "octahedron":
        return octahedron()
    if name == "icosahedron":
        return icosahedron()
    if name == "double-pyramid":
        return double_pyramid(int(arg or 12))
    if name == "random":
        return random_sphere(int(arg or 20), derive_rng(seed, "sphere", 0))
    raise ComplexInputError(f"unknown sphere shape '{shape}'")


@cli.command("sphere-audit")
@click.option("--input", "input_file", type=click.File("r"), default=None, help='JSON {"triangles": [...]}')
@click.option("--shape", default="octahedron", show_default=True,
              help="tetrahedron | octahedron | icosahedron | double-pyramid:K | random:SPLITS")
@click.pass_obj
@reports_errors
def sphere_audit_command(state: AppState, input_file: Any, shape: str) -> None:
    """Degree identities of a triangulated 2-sphere and an adjacent low-degree pair."""
    if input_file is not None:
        sphere = SphereTriangulation.from_dict(_json_arg(input_file.read(), "--input"))
        shape = "input"
    else:
        sphere = _sphere_from(shape, state.seed)
    audit = sphere_audit(sphere)
    emit({"shape": shape, **audit.to_dict()}, 0 if audit.ok else 1)


@cli.command("explore")
@click.option("--field", "field_spec", required=True)
@click.option("--r", "r", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.pass_obj
@reports_errors
def explore_command(state: AppState, field_spec: str, r: int, trials: int) -> None:
    """Run the witness solver below the certified thresholds and compare with brute force."""
    ctx = parse_field(field_spec, state.settings)
    emit(explore(ctx, r, trials, seed=state.seed, settings=state.settings).to_dict())


# Certificate re-validation


def _recheck_counterexample(data: Dict[str, Any], settings: Settings) -> Dict[str, Any]:
    X = OracleSpec.parse(data["oracle"]).build(settings)
    challenge = AmpleChallenge.from_dict(data["counterexample"])
    v = find_witness(X, challenge, search="exhaustive")
    return {"kind": "counterexample", "valid": v is None, "witness": v}


def _recheck_links(data: Dict[str, Any], settings: Settings) -> Dict[str, Any]:
    X = require_explicit(OracleSpec.parse(data["oracle"]).build(settings), "recheck")
    outcomes = []
    for entry in data["link_counterexamples"]:
        lk = simplex_link(X, tuple(entry["simplex"]))
        challenge = AmpleChallenge.from_dict(entry["counterexample"])
        outcomes.append(find_witness(lk, challenge, search="exhaustive") is None)
    return {"kind": "links", "valid": all(outcomes), "checked": len(outcomes)}


def _recheck_certificate(X: Any, row: Dict[str, Any], r: int) -> bool:
    cert = DiscCertificate.from_dict(row["certificate"])
    failures = validate_certificate(X, cert, r)
    return (not failures) == bool(row.get("valid", True))


def _recheck_stuck(X: Any, stuck: Dict[str, Any]) -> bool:
    w = find_cone_vertex(X, stuck["arc"], stuck["cyclic"], stuck["avoid"], stuck["mode"],
                         "exhaustive", None, 0)
    return w is None


def _recheck_fill(data: Dict[str, Any], settings: Settings) -> Dict[str, Any]:
    X = OracleSpec.parse(data["oracle"]).build(settings)
    r = data["r"]
    rows = data.get("rows", [data])
    outcomes = []
    for row in rows:
        if "certificate" in row:
            outcomes.append(_recheck_certificate(X, row, r))
        elif "stuck" in row:
            outcomes.append(_recheck_stuck(X, row["stuck"]))
    return {"kind": "disc", "valid": all(outcomes), "checked": len(outcomes)}


def _recheck_charsum(data: Dict[str, Any], settings: Settings) -> Dict[str, Any]:
    outcomes = []
    for audit in data["audits"]:
        ctx = CharCtx.create(audit["q"], audit["m"], max_q=settings.budgets.charsum_max_q)
        for row in audit["rows"]:
            again = coset_count(ctx, CosetInstance(tuple(zip(row["c"], row["t"]))))
            weil = row["weil"]
            again_weil = weil_sum(ctx, weil["roots"], weil["multiplicities"])
            reported = row["bound_holds"] and row["bracket_holds"] and weil["holds"]
            outcomes.append(
                reported == (again.bound_holds and again.upper_bracket and again.lower_bracket and again_weil.holds)
            )
    return {"kind": "charsum", "valid": all(outcomes), "checked": len(outcomes)}


def _recheck_solve(data: Dict[str, Any], settings: Settings) -> Dict[str, Any]:
    ctx = parse_field(data["field"], settings)
    rows = data.get("rows", [data])
    outcomes = [
        challenge_check(ctx, row["U"], row["Y"], row["x"], max_size=settings.budgets.max_simplex_size)
        == row["checked"]
        for row in rows
        if "x" in row
    ]
    return {"kind": "solve", "valid": all(outcomes), "checked": len(outcomes)}


@cli.command()
@click.argument("report", type=click.File("r"))
@click.pass_obj
@reports_errors
def recheck(state: AppState, report: Any) -> None:
    """Re-validate the certificate embedded in a report (exit 0 when it holds up)."""
    data = _json_arg(report.read(), "report")
    if "link_counterexamples" in data and "oracle" in data:
        outcome = _recheck_links(data, state.settings)
    elif "counterexample" in data and "oracle" in data:
        outcome = _recheck_counterexample(data, state.settings)
    elif "oracle" in data and ("certificate" in data or "stuck" in data or "rows" in data):
        outcome = _recheck_fill(data, state.settings)
    elif "audits" in data:
        outcome = _recheck_charsum(data, state.settings)
    elif "field" in data and ("x" in data or "rows" in data):
        outcome = _recheck_solve(data, state.settings)
    else:
        raise ComplexInputError("report carries no certificate to re-check")
    emit(outcome, 0 if outcome["valid"] else 1)


def main() -> None:
    cli(obj=None, prog_name="ample")


if __name__ == "__main__":
    sys.exit(main())
