"""
Batch experiment pipelines composed from core operations.

Each workflow is a chain of steps over a context dict. A step returns a new
context; once a step records an ``error`` the remaining steps are skipped.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..core.ampleness import resilience_guarantee, verify_ample
from ..core.char_audit import audit_batch
from ..core.errors import AmpleError, TrialBudgetError, UnsatisfiableLevelError, WitnessNotFoundError
from ..core.finite_field import FieldCtx
from ..core.iterated_paley import certified_params, challenge_check, random_problem, solve_witness
from ..core.random_complex import ProbProfile, bound_not_ample, bound_not_ample_sum, sample_explicit
from ..core.seeding import derive_rng
from ..core.settings import Settings
from ..core.simplex_core import ComplexView, ExplicitComplex, RemovalFamily, remove_family
from ..core.topo_checks import fill_bounds, fill_loop, random_loop, validate_certificate

logger = logging.getLogger(__name__)

Context = Dict[str, Any]
Step = Callable[[Context], Context]


class ExperimentChain:
    """Runs steps in order, logging and timing each one."""

    def __init__(self, *steps: Step):
        self.steps = steps

    def run(self, context: Context) -> Context:
        ctx: Context = {**context, "timings": {}}
        for step in self.steps:
            if "error" in ctx:
                break
            name = step.__name__.lstrip("_")
            started = time.perf_counter()
            try:
                ctx = step(ctx)
            except AmpleError as e:
                logger.error("step %s failed: %s", name, e)
                ctx = {**ctx, "error": e.to_dict()}
            elapsed = (time.perf_counter() - started) * 1000.0
            ctx["timings"][name] = round(elapsed, 3)
            logger.info("step %s finished in %.1f ms", name, elapsed)
        return ctx


def _map(fn: Callable[[Any], Any], items: Sequence[Any], workers: int) -> List[Any]:
    """Ordered map, in process when workers <= 1."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class _Workflow:
    def __init__(self, settings: Optional[Settings] = None, workers: Optional[int] = None):
        self.settings = settings or Settings()
        self.workers = workers or self.settings.parallel.workers
        self.chain = self._build_chain()

    def _build_chain(self) -> ExperimentChain:
        raise NotImplementedError

    def run(self, context: Optional[Context] = None) -> Context:
        return self.chain.run({**self.defaults(), **(context or {})})

    def defaults(self) -> Context:
        return {}


# Random complexes in the medial regime


def _medial_row(args: Tuple[int, int, float, int, int, Settings]) -> Dict[str, Any]:
    n, r, p, dim_cap, seed, settings = args
    X = sample_explicit(n, ProbProfile(p_vertex=1.0, p=p), dim_cap, seed)
    report = verify_ample(X, r, settings=settings, workers=1)
    row = {"seed": seed, "f_vector": list(X.f_vector()), **report.to_dict()}
    return row


def _removal_row(args: Tuple[int, int, float, int, int, int, Settings]) -> Dict[str, Any]:
    n, r, p, dim_cap, seed, level, settings = args
    X = sample_explicit(n, ProbProfile(p_vertex=1.0, p=p), dim_cap, seed)
    edges = sorted(X.simplices[1])
    rng = derive_rng(seed, "remove", 0)
    edge = edges[int(rng.integers(len(edges)))]
    Y = remove_family(X, RemovalFamily.of([edge]))
    report = verify_ample(Y, level, settings=settings, workers=1)
    return {"seed": seed, "edge": list(edge), **report.to_dict()}


class MedialBatchWorkflow(_Workflow):
    """Sample complexes, verify r-ampleness, then remove an edge and re-verify."""

    def defaults(self) -> Context:
        return {"n": 256, "r": 2, "p": 0.5, "dim_cap": 3, "seed": 0, "count": 50, "removals": 20}

    def _build_chain(self) -> ExperimentChain:
        return ExperimentChain(self._verify_samples, self._remove_edges, self._summarize)

    def _verify_samples(self, ctx: Context) -> Context:
        seeds = [ctx["seed"] + i for i in range(ctx["count"])]
        jobs = [(ctx["n"], ctx["r"], ctx["p"], ctx["dim_cap"], s, self.settings) for s in seeds]
        rows = _map(_medial_row, jobs, self.workers)
        return {**ctx, "rows": rows}

    def _remove_edges(self, ctx: Context) -> Context:
        r = ctx["r"]
        # the guarantee depends only on the family weight, the same for every single edge
        guarantee = resilience_guarantee(
            r, RemovalFamily.of([(0, 1)]), max_k=self.settings.budgets.max_dedekind_k
        )
        if guarantee.level is None or guarantee.level < 0 or ctx["removals"] == 0:
            return {**ctx, "removal_rows": [], "guaranteed_level": guarantee.level}
        ample_seeds = [row["seed"] for row in ctx["rows"] if row["verdict"] == "ample"]
        chosen = ample_seeds[: ctx["removals"]]
        jobs = [
            (ctx["n"], r, ctx["p"], ctx["dim_cap"], s, guarantee.level, self.settings)
            for s in chosen
        ]
        rows = _map(_removal_row, jobs, self.workers)
        return {**ctx, "removal_rows": rows, "guaranteed_level": guarantee.level}

    def _summarize(self, ctx: Context) -> Context:
        n, r, p = ctx["n"], ctx["r"], ctx["p"]
        removal_rows = ctx["removal_rows"]
        report = {
            "n": n,
            "r": r,
            "p": p,
            "dim_cap": ctx["dim_cap"],
            "seeds": len(ctx["rows"]),
            "ample": sum(1 for row in ctx["rows"] if row["verdict"] == "ample"),
            "bound_not_ample": bound_not_ample(n, r, p).value,
            "bound_not_ample_sum": bound_not_ample_sum(n, r, p).value,
            "rows": ctx["rows"],
            "removal": {
                "level": ctx["guaranteed_level"],
                "tested": len(removal_rows),
                "ample": sum(1 for row in removal_rows if row["verdict"] == "ample"),
                "rows": removal_rows,
            },
        }
        return {**ctx, "report": report}


# Certified witness solving


def _solve_row(args: Tuple[FieldCtx, int, int, int, Settings]) -> Dict[str, Any]:
    ctx, r, seed, index, settings = args
    problem = random_problem(ctx, r, derive_rng(seed, "problem", index))
    row: Dict[str, Any] = {
        "index": index,
        "U": list(problem.U),
        "Y": [list(s) for s in sorted(problem.Y, key=lambda s: (len(s), s))],
    }
    try:
        result = solve_witness(problem, seed=seed, challenge_id=index, settings=settings)
    except (UnsatisfiableLevelError, TrialBudgetError) as e:
        row["error"] = e.to_dict()
        return row
    row.update(
        {
            "x": result.x,
            "xi": result.xi,
            "x_trials": result.trace["x_trials"],
            "checked": challenge_check(ctx, problem.U, problem.Y, result.x, max_size=settings.budgets.max_simplex_size),
        }
    )
    return row


class SolveBatchWorkflow(_Workflow):
    """Solve random challenges on the certified field and re-check each by membership."""

    def defaults(self) -> Context:
        return {"r": 2, "count": 100, "seed": 0, "field": None}

    def _build_chain(self) -> ExperimentChain:
        return ExperimentChain(self._prepare_field, self._solve_challenges, self._summarize)

    def _prepare_field(self, ctx: Context) -> Context:
        if ctx["field"] is not None:
            return {**ctx, "params": None}
        params = certified_params(ctx["r"], self.settings)
        field_ctx = FieldCtx.create(
            params.n,
            params.p,
            params.g,
            dlog_cap=self.settings.field.dlog_cap,
            factor_limit=self.settings.budgets.factor_trial_limit,
        )
        return {**ctx, "field": field_ctx, "params": params.to_dict()}

    def _solve_challenges(self, ctx: Context) -> Context:
        jobs = [(ctx["field"], ctx["r"], ctx["seed"], i, self.settings) for i in range(ctx["count"])]
        return {**ctx, "rows": _map(_solve_row, jobs, self.workers)}

    def _summarize(self, ctx: Context) -> Context:
        rows = ctx["rows"]
        field_ctx = ctx["field"]
        report = {
            "field": field_ctx.spec(),
            "params": ctx["params"],
            "r": ctx["r"],
            "count": len(rows),
            "solved": sum(1 for row in rows if "x" in row),
            "checked": sum(1 for row in rows if row.get("checked")),
            "rows": rows,
        }
        return {**ctx, "report": report}


# Disc filling on random loops


def _fill_row(args: Tuple[ComplexView, int, int, int, int, int, str, Settings]) -> Dict[str, Any]:
    X, r, min_len, max_len, seed, index, witness_mode, settings = args
    loop_rng = derive_rng(seed, "loop", index)
    length = int(loop_rng.integers(min_len, max_len + 1))
    loop = random_loop(X, length, loop_rng, restarts=settings.sampling.loop_trials)
    search = "exhaustive" if isinstance(X, ExplicitComplex) else "sampled"
    row: Dict[str, Any] = {"index": index, "length": length, "loop": list(loop.vertices)}
    try:
        cert = fill_loop(
            X,
            loop,
            r,
            witness_mode=witness_mode,
            search=search,
            rng=derive_rng(seed, "fill", index),
            trials=settings.sampling.witness_trials,
        )
    except WitnessNotFoundError as e:
        row["stuck"] = e.challenge
        return row
    internal_cap, triangle_cap = fill_bounds(length, r, cert.cone_at_three)
    failures = validate_certificate(X, cert, r)
    row.update(
        {
            "internal": len(cert.internal_vertices),
            "triangles": len(cert.triangles),
            "internal_bound": internal_cap,
            "triangle_bound": triangle_cap,
            "valid": not failures,
            "failures": failures,
            "certificate": cert.to_dict(),
        }
    )
    return row


class FillBatchWorkflow(_Workflow):
    """Draw random loops and fill each with a disc certificate."""

    def defaults(self) -> Context:
        return {"r": 5, "count": 20, "min_length": 10, "max_length": 30, "seed": 0, "witness_mode": "cone"}

    def _build_chain(self) -> ExperimentChain:
        return ExperimentChain(self._fill_loops, self._summarize)

    def _fill_loops(self, ctx: Context) -> Context:
        jobs = [
            (
                ctx["oracle"],
                ctx["r"],
                ctx["min_length"],
                ctx["max_length"],
                ctx["seed"],
                i,
                ctx["witness_mode"],
                self.settings,
            )
            for i in range(ctx["count"])
        ]
        return {**ctx, "rows": _map(_fill_row, jobs, self.workers)}

    def _summarize(self, ctx: Context) -> Context:
        rows = ctx["rows"]
        report = {
            "r": ctx["r"],
            "witness_mode": ctx["witness_mode"],
            "count": len(rows),
            "filled": sum(1 for row in rows if "certificate" in row),
            "valid": sum(1 for row in rows if row.get("valid")),
            "rows": rows,
        }
        return {**ctx, "report": report}


# Character-sum audits


def _audit_row(args: Tuple[int, int, int, int, int, int]) -> Dict[str, Any]:
    q, m, d, trials, seed, max_q = args
    summary = audit_batch(q, m, d, trials, seed=seed, max_q=max_q)
    data = summary.to_dict()
    data["rows"] = [
        row for row in data["rows"]
        if not (row["bound_holds"] and row["expansion_agrees"] and row["bracket_holds"]
                and row["s_values_ok"] and row["weil"]["holds"])
    ]
    return data


def audit_plan(qs: Iterable[int], ms: Iterable[int], ds: Iterable[int]) -> List[Tuple[int, int, int]]:
    """All (q, m, d) with m dividing q - 1."""
    return [(q, m, d) for q, m, d in product(sorted(qs), sorted(ms), sorted(ds)) if (q - 1) % m == 0]


class CharsumAuditWorkflow(_Workflow):
    """Coset-count and Weil-bound audits over a grid of (q, m, d)."""

    def defaults(self) -> Context:
        return {"qs": (13, 29, 101, 257), "ms": (2, 3, 4, 5), "ds": (1, 2, 3), "trials": 200, "seed": 0}

    def _build_chain(self) -> ExperimentChain:
        return ExperimentChain(self._plan, self._audit, self._summarize)

    def _plan(self, ctx: Context) -> Context:
        return {**ctx, "plan": audit_plan(ctx["qs"], ctx["ms"], ctx["ds"])}

    def _audit(self, ctx: Context) -> Context:
        max_q = self.settings.budgets.charsum_max_q
        jobs = [(q, m, d, ctx["trials"], ctx["seed"], max_q) for q, m, d in ctx["plan"]]
        return {**ctx, "audits": _map(_audit_row, jobs, self.workers)}

    def _summarize(self, ctx: Context) -> Context:
        audits = ctx["audits"]
        report = {
            "audits": audits,
            "coset_violations": sum(a["coset_violations"] for a in audits),
            "weil_violations": sum(a["weil_violations"] for a in audits),
        }
        return {**ctx, "report": report}
