"""Scenario files: loading, validation, execution and report emission.

A scenario is a TOML file with a ``name``, an optional ``trunc`` and
exactly one job table: ``local_form``, ``theorem``, ``dim2``, ``omega`` or
``suite``.  Series are lists of ``[[exponents], "rational"]`` pairs.

Example::

    name = "one-point m=2"
    trunc = 16

    [theorem]
    id = "1point"
    u = [1]
    l = 2
    v = [[[1, 0, 2], "1"], [[2, 1, 0], "1"]]
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import tomli

from . import __version__, randomforms, toric2d
from .localform import (
    Inconclusive,
    InvariantViolation,
    LocalForm,
    NotApplicable,
    NotPrepared,
    PointType,
    Prepared,
    ThreePrepForm,
    classify_3prepared,
    decompose,
    jacobian_ideal_check,
    normalize_tschirnhaus,
    sigma,
)
from .plane import DEFAULT_MAX_DEPTH, PlaneMonomial, run_dim2
from .pseries import DEFAULT_TRUNC, EXACT, TruncatedSeries
from .verify import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    DepthExceeded,
    PreconditionViolated,
    TheoremReport,
    run_1point_reduction,
    run_1point_spec,
    run_2point_reduction,
    run_3point_principalization,
    run_curve_blowup,
    run_point_blowup,
    run_torgood,
    specialize_2curve,
)

SCHEMA_VERSION = 1
JOB_KINDS = ("local_form", "theorem", "dim2", "omega", "suite")
THEOREMS = (
    "1point", "1point_tail", "2point", "principalize", "specialize", "point_blowup", "curve_blowup", "torgood",
)
SUITES = ("eq3", "eq2", "eq4", "step2", "torgood", "dim2")
ERROR = "error"


class ScenarioError(ValueError):
    """A scenario that does not parse or validate; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass
class Scenario:
    name: str
    trunc: int
    kind: str
    job: dict
    seed: int | None = None
    count: int = 0
    max_depth: int = DEFAULT_MAX_DEPTH

    def echo(self) -> dict:
        return {"name": self.name, "trunc": self.trunc, "kind": self.kind, "job": self.job,
                "seed": self.seed, "count": self.count}


@dataclass
class Report:
    scenario: dict
    verdict: str
    results: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "tool": "torofold",
            "version": __version__,
            "scenario": self.scenario,
            "verdict": self.verdict,
            "summary": self.summary,
            "results": self.results,
            "errors": self.errors,
        }
        if timing:
            d["timing"] = {"seconds": round(self.seconds, 3)}
        return d


# -- loading --------------------------------------------------------------------------


def default_trunc() -> int:
    env = os.environ.get("TOROFOLD_TRUNC")
    if env is None:
        return DEFAULT_TRUNC
    try:
        return int(env)
    except ValueError as exc:
        raise ScenarioError("TOROFOLD_TRUNC", f"not an integer: {env!r}") from exc


def _int(d: dict, key: str, where: str, default=None) -> int:
    if key not in d:
        if default is None:
            raise ScenarioError(f"{where}.{key}", "missing")
        return default
    v = d[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise ScenarioError(f"{where}.{key}", f"expected an integer, got {v!r}")
    return v


def parse_series(lit, where: str, trunc: int, nvars: int = 3) -> TruncatedSeries:
    """``[[exps], "c"]`` list (or a polynomial string) to an exact series."""
    if isinstance(lit, str):
        try:
            s = TruncatedSeries.parse(lit, trunc, nvars, EXACT)
        except ValueError as exc:
            raise ScenarioError(where, str(exc)) from exc
        terms = list(s.coeffs)
    else:
        if not isinstance(lit, list):
            raise ScenarioError(where, "expected a list of [[exponents], coefficient] pairs")
        coeffs = {}
        for k, item in enumerate(lit):
            if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], list)):
                raise ScenarioError(f"{where}[{k}]", "expected [[exponents], coefficient]")
            e, c = item
            if len(e) > nvars or any(not isinstance(x, int) or x < 0 for x in e):
                raise ScenarioError(f"{where}[{k}]", f"bad exponent {e}")
            try:
                q = Fraction(str(c))
            except (ValueError, ZeroDivisionError) as exc:
                raise ScenarioError(f"{where}[{k}]", f"bad coefficient {c!r}") from exc
            key = tuple(e) + (0,) * (3 - len(e))
            coeffs[key] = coeffs.get(key, 0) + q
        s = TruncatedSeries({e: c for e, c in coeffs.items() if c}, trunc, nvars, EXACT)
        terms = list(s.coeffs)
    for e in terms:
        if sum(e) > trunc:
            raise ScenarioError(where, f"term of degree {sum(e)} exceeds truncation {trunc}")
    return s


def _point_type(job: dict, where: str) -> PointType:
    u = job.get("u")
    if not (isinstance(u, list) and 1 <= len(u) <= 3 and all(isinstance(x, int) for x in u)):
        raise ScenarioError(f"{where}.u", "expected 1 to 3 integer exponents")
    l = _int(job, "l", where, 1)
    try:
        return PointType(tuple(u) + (0,) * (3 - len(u)), l)
    except InvariantViolation as exc:
        raise ScenarioError(f"{where}.u", f"invariant '{exc.invariant}' violated: {exc}") from exc


def load_scenario(path: str, trunc: int | None = None, seed: int | None = None,
                  max_depth: int | None = None) -> Scenario:
    """Parse and validate a scenario file; command-line overrides win."""
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except OSError as exc:
        raise ScenarioError("file", str(exc)) from exc
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError("syntax", str(exc)) from exc
    return scenario_from_dict(data, trunc, seed, max_depth)


def scenario_from_dict(data: dict, trunc=None, seed=None, max_depth=None) -> Scenario:
    jobs = [k for k in JOB_KINDS if k in data]
    if len(jobs) != 1:
        raise ScenarioError("job", f"exactly one of {', '.join(JOB_KINDS)} is required, found {jobs or 'none'}")
    kind = jobs[0]
    job = data[kind]
    if not isinstance(job, dict):
        raise ScenarioError(kind, "expected a table")
    name = data.get("name", kind)
    if not isinstance(name, str):
        raise ScenarioError("name", "expected a string")
    T = trunc if trunc is not None else _int(data, "trunc", "scenario", default_trunc())
    if T < 2:
        raise ScenarioError("trunc", "must be at least 2")
    sc = Scenario(name, T, kind, job, max_depth=max_depth or _int(data, "max_depth", "scenario", DEFAULT_MAX_DEPTH))
    if kind == "suite":
        sc.count = _int(job, "count", "suite")
        sc.seed = seed if seed is not None else job.get("seed")
        if sc.count > 0 and not isinstance(sc.seed, int):
            raise ScenarioError("suite.seed", "a seed is required when count > 0")
        if job.get("kind") not in SUITES:
            raise ScenarioError("suite.kind", f"expected one of {', '.join(SUITES)}")
    else:
        sc.seed = seed
    _validate_job(sc)
    return sc


def _validate_job(sc: Scenario) -> None:
    job, kind = sc.job, sc.kind
    if kind in ("local_form", "theorem"):
        _point_type(job, kind)
        parse_series(job.get("v"), f"{kind}.v", sc.trunc)
        if kind == "theorem" and job.get("id") not in THEOREMS:
            raise ScenarioError("theorem.id", f"expected one of {', '.join(THEOREMS)}")
    elif kind == "dim2":
        _plane_monomial(job)
        parse_series(job.get("v"), "dim2.v", max(sc.trunc, 64), 2)
    elif kind == "omega":
        _int(job, "m", "omega")
        r = job.get("r")
        if not (isinstance(r, list) and all(isinstance(x, int) and x >= 0 for x in r)):
            raise ScenarioError("omega.r", "expected a list of nonnegative integers")


def _plane_monomial(job: dict) -> PlaneMonomial:
    u = job.get("u")
    if not (isinstance(u, list) and 1 <= len(u) <= 2 and all(isinstance(x, int) for x in u)):
        raise ScenarioError("dim2.u", "expected [a] or [a, b]")
    try:
        return PlaneMonomial(u[0], u[1] if len(u) > 1 else 0, _int(job, "l", "dim2", 1))
    except PreconditionViolated as exc:
        raise ScenarioError("dim2.u", str(exc)) from exc


# -- running ------------------------------------------------------------------------------


def _error(exc: Exception) -> dict:
    return {"module": type(exc).__module__, "error": type(exc).__name__, "message": str(exc)}


def _verdict_of(exc: Exception) -> str:
    return INCONCLUSIVE if isinstance(exc, (Inconclusive, DepthExceeded)) else ERROR


def _form_of(job: dict, trunc: int, where: str) -> LocalForm:
    return decompose(_point_type(job, where), parse_series(job["v"], f"{where}.v", trunc))


def _classification(c) -> dict:
    if isinstance(c, ThreePrepForm):
        return c.to_dict()
    if isinstance(c, Prepared):
        return {"template": "prepared"}
    if isinstance(c, NotPrepared):
        return {"template": "not_prepared", "witness": c.witness}
    return {"template": str(c)}


def run_local_form(job: dict, trunc: int) -> dict:
    form = _form_of(job, trunc, "local_form")
    out = {"kind": "local_form", "form": form.to_dict(), "text": str(form), "sigma": str(sigma(form))}
    actions = job.get("actions", ["sigma", "classify", "jacobian", "tschirnhaus"])
    verdict = PASS
    if "jacobian" in actions:
        rep = jacobian_ideal_check(form)
        out["jacobian"] = rep.to_dict()
        if not rep.passed:
            verdict = FAIL
    if "classify" in actions:
        try:
            out["classification"] = _classification(classify_3prepared(form))
        except Inconclusive as exc:
            out["classification"] = {"template": "inconclusive", "reason": str(exc)}
    if "tschirnhaus" in actions and form.kind == 1:
        try:
            res = normalize_tschirnhaus(form)
            out["tschirnhaus"] = {"form": str(res.form), "phi": str(res.phi), "m": res.m}
        except (NotApplicable, Inconclusive) as exc:
            out["tschirnhaus"] = {"skipped": str(exc)}
    out["verdict"] = verdict
    return out


def run_theorem(job: dict, trunc: int) -> TheoremReport:
    form = _form_of(job, trunc, "theorem")
    tid = job["id"]
    if tid in ("1point", "1point_tail", "2point"):
        run = {"1point": run_1point_reduction, "1point_tail": run_1point_spec, "2point": run_2point_reduction}[tid]
        return run(form)
    if tid == "principalize":
        return run_3point_principalization(form)
    if tid == "specialize":
        return specialize_2curve(form)
    if tid == "point_blowup":
        return run_point_blowup(form)
    if tid == "torgood":
        return run_torgood(form)
    return run_curve_blowup(form, _int(job, "variant", "theorem"))


def _suite_reports(sc: Scenario):
    job = sc.job
    b = randomforms.Bounds(**{k: v for k, v in job.get("bounds", {}).items()}, trunc=sc.trunc)
    rng = random.Random(sc.seed)
    kind = job["kind"]
    for k in range(sc.count):
        if kind == "eq3":
            yield run_1point_reduction(randomforms.eq3_form(rng, b))
        elif kind == "eq2":
            yield run_2point_reduction(randomforms.eq2_form(rng, b))
        elif kind == "eq4":
            m, r, om = randomforms.eq4_case(rng, b)
            yield run_1point_spec(randomforms.eq4_form(m, r, om + 1, rng, b))
        elif kind == "step2":
            gen = randomforms.step2_three_point if k % 2 == 0 else randomforms.step2_two_point
            yield run_3point_principalization(gen(rng, b))
        elif kind == "torgood":
            yield run_torgood(randomforms.torgood_form(rng, b, 3 if k % 10 == 0 else 2))
        else:
            u, v = randomforms.dim2_pair(rng, b)
            yield run_dim2(u, v, sc.max_depth)


def _combine_verdicts(vs) -> str:
    vs = list(vs)
    if any(v in (FAIL, ERROR) for v in vs):
        return FAIL if FAIL in vs else ERROR
    if INCONCLUSIVE in vs:
        return INCONCLUSIVE
    return PASS


def run_scenario(sc: Scenario) -> Report:
    """Dispatch a validated scenario; errors become verdicts, never crashes."""
    start = time.perf_counter()
    rep = Report(sc.echo(), PASS)
    try:
        if sc.kind == "local_form":
            rep.results.append(run_local_form(sc.job, sc.trunc))
        elif sc.kind == "omega":
            m, r = sc.job["m"], list(sc.job["r"])
            rep.results.append({"kind": "omega", "m": m, "r": r, "omega": toric2d.omega(m, r), "verdict": PASS})
        elif sc.kind == "dim2":
            u = _plane_monomial(sc.job)
            v = parse_series(sc.job["v"], "dim2.v", max(sc.trunc, 64), 2)
            rep.results.append(run_dim2(u, v, sc.max_depth).to_dict())
        elif sc.kind == "theorem":
            rep.results.append(run_theorem(sc.job, sc.trunc).to_dict())
        else:
            for r in _suite_reports(sc):
                rep.results.append(r.to_dict())
    except (Inconclusive, DepthExceeded, PreconditionViolated, NotApplicable, InvariantViolation,
            ValueError, ArithmeticError) as exc:
        rep.errors.append(_error(exc))
        rep.results.append({"kind": sc.kind, "verdict": _verdict_of(exc), "error": _error(exc)})
    rep.verdict = _combine_verdicts(r["verdict"] for r in rep.results)
    counts: dict[str, int] = {}
    for r in rep.results:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    rep.summary = {"verdicts": dict(sorted(counts.items())), "gamma_after": _gamma_summary(rep.results)}
    rep.seconds = time.perf_counter() - start
    return rep


def _gamma_summary(results) -> str | None:
    exact, bound = [], []
    for r in results:
        g = r.get("gamma_after")
        if g is None:
            continue
        (bound if g.startswith(">=") else exact).append(int(g.lstrip(">=")))
    if bound:
        return f">={max(bound + exact)}"
    return str(max(exact)) if exact else None


# -- emission -----------------------------------------------------------------------------


def emit_report(rep: Report, fmt: str = "json", timing: bool = False) -> bytes:
    if fmt == "json":
        return (json.dumps(rep.to_dict(timing), indent=2, sort_keys=True) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"scenario {rep.scenario['name']}: {rep.verdict}"]
    if rep.summary.get("gamma_after") is not None:
        lines.append(f"  Gamma after: {rep.summary['gamma_after']}")
    for r in rep.results:
        lines.extend(_text_result(r))
    for e in rep.errors:
        lines.append(f"  error [{e['module']}] {e['error']}: {e['message']}")
    if timing:
        lines.append(f"  time {rep.seconds:.3f}s")
    return ("\n".join(lines) + "\n").encode()


def _text_result(r: dict) -> list[str]:
    if "charts" in r:
        head = f"  {r['theorem']}: {r['verdict']} sigma {r['sigma_before']} -> {r['gamma_after']}"
        if r.get("omega_used") is not None:
            head += f" (omega {r['omega_used']})"
        out = [head, f"    root {r['root']}"]
        for c in r["charts"]:
            out.append(f"    {c['verdict']:<12} sigma={c['sigma']:<6} {c['label']} {c['detail']}".rstrip())
        out.extend(f"    note: {n}" for n in r.get("notes", []))
        return out
    if r.get("kind") == "omega":
        return [f"  omega({r['m']}, {r['r']}) = {r['omega']}"]
    if r.get("kind") == "local_form":
        out = [f"  {r['text']}", f"    sigma = {r['sigma']}"]
        if "classification" in r:
            out.append(f"    template: {r['classification']['template']}")
        if "jacobian" in r:
            out.append(f"    jacobian check: {'pass' if r['jacobian']['passed'] else 'fail'}")
        t = r.get("tschirnhaus")
        if t:
            out.append(f"    tschirnhaus: {t['skipped']}" if "skipped" in t else f"    tschirnhaus: phi = {t['phi']}, {t['form']}")
        return out
    return [f"  {r.get('kind')}: {r['verdict']}"]
