"""Safety checking and compositional verification with checked certificates."""

from __future__ import annotations

import dataclasses
import itertools
import pathlib
import re
import time
import typing as t

from ntacomp.compose import parallel_all, restrict_ttsb
from ntacomp.model.ast import Network, Property
from ntacomp.model.errors import ModelError
from ntacomp.model.expr import Expr, compile_predicate
from ntacomp.model.parser import declared_constants, load_model, parse_model
from ntacomp.model.validate import Violation, validate_axioms
from ntacomp.nta import NetworkEngine, Step
from ntacomp.semantics import ttsb_of
from ntacomp.simulation import (
    NotComparable,
    Refuted,
    check_comparable,
    check_simulation,
    componentwise_side_condition_witness,
    side_condition_witness,
)
from ntacomp.ttsb import DEFAULT_BUDGET, StateSpaceBudgetExceeded
from ntacomp.compose import Parallel

SAFE, VIOLATED, INVALID, BUDGET_EXCEEDED = "Safe", "Violated", "Invalid", "BudgetExceeded"

# states explored by the pure-Python engine before switching to the compiled one
PYTHON_LIMIT = 200_000

# default for checks run from the command line: the abstract WSN network has
# about 2.3e7 states
CLI_BUDGET = 50_000_000


class InvalidProperty(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class TraceStep:
    state: t.Tuple[t.Tuple[str, t.Any], ...]
    step: t.Optional[Step]

    def as_dict(self) -> t.Dict[str, t.Any]:
        return dict(self.state)


@dataclasses.dataclass
class Verdict:
    status: str
    trace: t.Optional[t.List[TraceStep]] = None
    states: int = 0
    seconds: float = 0.0
    engine: str = ""
    violations: t.List[Violation] = dataclasses.field(default_factory=list)
    detail: str = ""

    @property
    def stats(self) -> t.Dict[str, t.Any]:
        return {"states": self.states, "seconds": round(self.seconds, 3), "engine": self.engine}

    def to_json(self) -> t.Dict[str, t.Any]:
        out: t.Dict[str, t.Any] = {"verdict": self.status, "stats": self.stats}
        if self.detail:
            out["detail"] = self.detail
        if self.violations:
            out["violations"] = [v.to_json() for v in self.violations]
        if self.trace is not None:
            out["trace"] = [
                {"state": {k: _jsonable(v) for k, v in st.state}, "step": None if st.step is None else str(st.step)}
                for st in self.trace
            ]
        return out


def _jsonable(v: t.Any) -> t.Any:
    return v if isinstance(v, (bool, int, str)) else str(v)


def resolve_property(net: Network, prop: t.Union[str, Property, Expr]) -> Property:
    if isinstance(prop, Property):
        p = prop
    elif isinstance(prop, Expr):
        p = Property("<expr>", prop)
    else:
        try:
            p = net.property(prop)
        except KeyError:
            raise InvalidProperty(f"no property named {prop!r}") from None
    unknown = p.expr.refs() - set(net.variables())
    if unknown:
        raise InvalidProperty(f"property {p.name} refers to unknown names: {', '.join(sorted(unknown))}")
    return p


def check_safety(
    net: Network,
    prop: t.Union[str, Property, Expr],
    budget: int = DEFAULT_BUDGET,
    engine: str = "auto",
    validate: bool = True,
) -> Verdict:
    """``N ⊨ ∀□P`` by breadth-first search of the monolithic semantics.

    ``engine`` is ``python``, ``fast`` (compiled) or ``auto``, which starts
    in Python and moves to the compiled engine for large state spaces."""
    p = resolve_property(net, prop)
    t0 = time.perf_counter()
    if validate:
        bad = validate_axioms(net)
        if bad:
            return Verdict(INVALID, violations=bad, seconds=time.perf_counter() - t0, detail="model violates well-formedness axioms")
    py = NetworkEngine(net)
    if engine in ("auto", "python"):
        limit = budget if engine == "python" else min(budget, PYTHON_LIMIT)
        pos = py.domain.index
        pred = compile_predicate(p.expr, lambda n: f"s[{pos[n]}]")
        try:
            ex = py.explore(limit, stop=lambda s: not pred(s))
        except StateSpaceBudgetExceeded:
            if engine == "python" or limit >= budget:
                return Verdict(BUDGET_EXCEEDED, states=limit, seconds=time.perf_counter() - t0, engine="python",
                               detail=f"more than {budget} states")
        else:
            return _finish(py, ex.hit, ex.parent, ex.states, t0, "python")
    elif engine != "fast":
        raise ValueError(f"unknown engine {engine!r}")
    from ntacomp.fast.engine import BUDGET, VIOLATED as HIT, FastEngine

    fe = FastEngine(net, p.expr)
    res = fe.run(budget=budget, check_prop=True)
    if res.status == BUDGET:
        return Verdict(BUDGET_EXCEEDED, states=res.states, seconds=time.perf_counter() - t0, engine="fast",
                       detail=f"more than {budget} states")
    if res.status == HIT:
        assert res.hit is not None
        path = fe.path(res, res.hit)
        trace = _replay(py, path)
        return Verdict(VIOLATED, trace, res.states, time.perf_counter() - t0, "fast")
    return Verdict(SAFE, None, res.states, time.perf_counter() - t0, "fast")


def _finish(py: NetworkEngine, hit, parent, states: int, t0: float, engine: str) -> Verdict:
    if hit is None:
        return Verdict(SAFE, None, states, time.perf_counter() - t0, engine)
    path = [hit]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return Verdict(VIOLATED, _replay(py, path), states, time.perf_counter() - t0, engine)


def _replay(py: NetworkEngine, path: t.Sequence[tuple]) -> t.List[TraceStep]:
    names = py.domain.names
    out = []
    for a, b in zip(path, path[1:]):
        step = next((st for st, tgt in py.steps(a) if tgt == b), None)
        if step is None:
            raise RuntimeError("trace does not replay under the monolithic semantics")
        out.append(TraceStep(tuple(zip(names, a)), step))
    out.append(TraceStep(tuple(zip(names, path[-1])), None))
    return out


def replays(net: Network, trace: t.Sequence[TraceStep], prop: t.Union[str, Property, Expr]) -> bool:
    """Whether ``trace`` starts in the initial state, follows monolithic
    transitions and ends in a state violating ``prop``."""
    py = NetworkEngine(net)
    p = resolve_property(net, prop)
    names = py.domain.names
    states = [tuple(dict(st.state)[n] for n in names) for st in trace]
    if not states or states[0] != py.initial:
        return False
    for a, b in zip(states, states[1:]):
        if b not in {tgt for _, tgt in py.steps(a, describe=False)}:
            return False
    pos = py.domain.index
    pred = compile_predicate(p.expr, lambda n: f"s[{pos[n]}]")
    return not pred(states[-1])


# -- compositional verification ---------------------------------------------------


@dataclasses.dataclass(frozen=True)
class CVPlan:
    keep: t.Tuple[t.Union[int, str], ...]
    abstraction: pathlib.Path
    property: str
    params: t.Tuple[t.Tuple[str, int], ...] = ()


_PLAN_RE = re.compile(r"\s*(keep|abstraction|property|param)\b\s*(.*?)\s*;", re.S)


def parse_plan(text: str, base: t.Union[str, pathlib.Path] = ".") -> CVPlan:
    """Read ``keep = [...]; abstraction = "path"; property = "name";`` with
    optional ``param NAME = value;`` lines.  ``keep`` lists automaton
    indices (system order) or names such as ``Clock[A]`` whose index may be
    a constant."""
    body = re.sub(r"//[^\n]*", "", text)
    fields: t.Dict[str, str] = {}
    params: t.List[t.Tuple[str, int]] = []
    pos = 0
    for m in _PLAN_RE.finditer(body):
        if body[pos:m.start()].strip():
            raise ValueError(f"cannot read plan near {body[pos:m.start()].strip()[:40]!r}")
        pos = m.end()
        key, rest = m.group(1), m.group(2)
        if key == "param":
            pm = re.fullmatch(r"([A-Za-z_]\w*)\s*=\s*(-?\d+)", rest)
            if pm is None:
                raise ValueError(f"bad param line: {rest!r}")
            params.append((pm.group(1), int(pm.group(2))))
            continue
        if not rest.startswith("="):
            raise ValueError(f"expected '=' after {key}")
        if key in fields:
            raise ValueError(f"{key} given twice")
        fields[key] = rest[1:].strip()
    if body[pos:].strip():
        raise ValueError(f"cannot read plan near {body[pos:].strip()[:40]!r}")
    for key in ("keep", "abstraction", "property"):
        if key not in fields:
            raise ValueError(f"plan lacks {key}")
    km = re.fullmatch(r"\[(.*)\]", fields["keep"], re.S)
    if km is None:
        raise ValueError("keep must be a bracketed list")
    keep: t.List[t.Union[int, str]] = []
    for item in (x.strip() for x in km.group(1).split(",")):
        if not item:
            continue
        keep.append(int(item) if re.fullmatch(r"\d+", item) else item)
    de = _string(fields["abstraction"])
    prop = _string(fields["property"])
    return CVPlan(tuple(keep), pathlib.Path(base) / de, prop, tuple(params))


def _string(s: str) -> str:
    m = re.fullmatch(r'"([^"]*)"', s)
    if m is None:
        raise ValueError(f"expected a quoted string, got {s!r}")
    return m.group(1)


def load_plan(path: t.Union[str, pathlib.Path]) -> CVPlan:
    path = pathlib.Path(path)
    return parse_plan(path.read_text(encoding="utf-8"), path.parent)


@dataclasses.dataclass
class Obligation:
    name: str
    status: str  # "pass", "fail" or "skipped"
    detail: str = ""
    witness: t.Optional[str] = None

    def to_json(self) -> t.Dict[str, t.Any]:
        out = {"name": self.name, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclasses.dataclass
class CertificateReport:
    obligations: t.List[Obligation] = dataclasses.field(default_factory=list)
    restricted: t.Tuple[str, ...] = ()
    kept: t.Tuple[str, ...] = ()
    abstracted: t.Tuple[str, ...] = ()
    abstraction: t.Tuple[str, ...] = ()

    @property
    def green(self) -> bool:
        return bool(self.obligations) and all(o.status == "pass" for o in self.obligations)

    def get(self, name: str) -> Obligation:
        for o in self.obligations:
            if o.name == name:
                return o
        raise KeyError(name)

    def to_json(self) -> t.Dict[str, t.Any]:
        return {
            "obligations": [o.to_json() for o in self.obligations],
            "kept": list(self.kept),
            "abstracted": list(self.abstracted),
            "abstraction": list(self.abstraction),
            "restricted": list(self.restricted),
        }


class CertificateFailed(RuntimeError):
    def __init__(self, message: str, report: CertificateReport) -> None:
        super().__init__(message)
        self.report = report


class SimulationRefuted(CertificateFailed):
    def __init__(self, refuted: Refuted, report: CertificateReport) -> None:
        super().__init__(str(refuted), report)
        self.refuted = refuted


class SideConditionFailed(CertificateFailed):
    pass


class PlanNotComparable(CertificateFailed, NotComparable):
    pass


@dataclasses.dataclass
class CVResult:
    verdict: Verdict
    report: CertificateReport
    abstract_network: Network

    def to_json(self) -> t.Dict[str, t.Any]:
        out = self.verdict.to_json()
        out.update(self.report.to_json())
        return out


def _keep_indices(net: Network, keep: t.Sequence[t.Union[int, str]]) -> t.List[int]:
    names = list(net.names)
    consts = dict(net.constants)
    out = []
    for k in keep:
        if isinstance(k, int):
            if not 0 <= k < len(names):
                raise ValueError(f"keep index {k} out of range")
            out.append(k)
            continue
        m = re.fullmatch(r"([A-Za-z_]\w*)((?:\[[^\]]+\])*)", k.replace(" ", ""))
        if m is None:
            raise ValueError(f"bad automaton name in keep: {k!r}")
        idx = ""
        for part in re.findall(r"\[([^\]]+)\]", m.group(2)):
            if re.fullmatch(r"-?\d+", part):
                idx += f"[{int(part)}]"
            elif part in consts:
                idx += f"[{consts[part]}]"
            else:
                raise ValueError(f"unknown constant {part!r} in keep")
        name = m.group(1) + idx
        if name not in names:
            raise ValueError(f"no automaton named {name}")
        out.append(names.index(name))
    if len(set(out)) != len(out):
        raise ValueError("keep lists an automaton twice")
    return sorted(out)


def load_for_plan(
    model: t.Union[str, pathlib.Path],
    plan: CVPlan,
    params: t.Optional[t.Mapping[str, int]] = None,
) -> t.Tuple[Network, Network]:
    """The concrete network and the abstraction fragment, with plan
    parameters applied to whichever file declares them."""
    values = dict(plan.params)
    values.update(params or {})
    text = pathlib.Path(model).read_text(encoding="utf-8")
    own = declared_constants(text)
    net = parse_model(text, {k: v for k, v in values.items() if k in own}, source=str(model))
    atext = plan.abstraction.read_text(encoding="utf-8")
    aown = declared_constants(atext) - set(dict(net.constants))
    extra = set(values) - own - aown
    if extra:
        raise ModelError(f"unknown parameter(s): {', '.join(sorted(extra))}", 0, 0, str(model))
    abst = parse_model(atext, {k: v for k, v in values.items() if k in aown}, source=str(plan.abstraction), context=net)
    return net, abst


def compositional_verify(
    net: Network,
    abstraction: Network,
    keep: t.Sequence[t.Union[int, str]],
    prop: t.Union[str, Property, Expr],
    budget: int = DEFAULT_BUDGET,
    engine: str = "auto",
    exact_side_budget: int = 50_000,
) -> CVResult:
    """Check the three obligations and, if they hold, model check the
    abstract network.  A failed certificate raises
    :class:`SimulationRefuted`, :class:`SideConditionFailed` or
    :class:`PlanNotComparable`, each carrying the report so far."""
    report = CertificateReport()
    idx = _keep_indices(net, keep)
    kept = [net.automata[i] for i in idx]
    gone = [a for i, a in enumerate(net.automata) if i not in idx]
    report.kept = tuple(a.name for a in kept)
    report.abstracted = tuple(a.name for a in gone)
    report.abstraction = tuple(a.name for a in abstraction.automata)
    if not gone or not abstraction.automata:
        raise ValueError("a plan must abstract at least one automaton by at least one automaton")
    p = resolve_property(net, prop)
    visible = {v.name for a in kept for v in a.variables} | {a.loc_name for a in kept}
    outside = p.expr.refs() - visible
    if outside:
        raise InvalidProperty(f"property {p.name} reads variables outside the kept automata: {', '.join(sorted(outside))}")

    # Δ ∪ 𝒞 ∪ Ê − Σ(T_c), with Σ(T_c) taken as the kept automata's channels
    sigma_c = set().union(*(a.channels() for a in kept))
    used_c = {v.name for a in kept for v in a.external}
    e_hat = {v.name for a in gone for v in a.external}
    R = (set(net.channel_names) | e_hat) - sigma_c - used_c
    report.restricted = tuple(sorted(R))
    chans = net.channel_names
    T_a = restrict_ttsb(parallel_all([ttsb_of(a, net) for a in gone]), R, channels=chans, strict=False)
    T_b = restrict_ttsb(parallel_all([ttsb_of(a, net) for a in abstraction.automata]), R, channels=chans, strict=False)

    try:
        check_comparable(T_a, T_b)
    except NotComparable as exc:
        report.obligations.append(Obligation("comparable", "fail", str(exc)))
        raise PlanNotComparable(str(exc), report) from None
    report.obligations.append(Obligation("comparable", "pass", f"{len(T_a.external)} shared external variables"))

    sim = check_simulation(T_a, T_b, budget)
    if isinstance(sim, Refuted):
        r, s = sim.pair
        report.obligations.append(Obligation("simulation", "fail", f"condition {sim.condition}: {sim.detail}", f"({r}, {s})"))
        raise SimulationRefuted(sim, report)
    report.obligations.append(Obligation("simulation", "pass", f"relation of {sim.size} pairs"))

    report.obligations.append(_side_condition(net, T_a, kept, gone, exact_side_budget))
    if report.obligations[-1].status != "pass":
        raise SideConditionFailed(report.obligations[-1].detail, report)

    abstract_net = net.replace_automata(kept + list(abstraction.automata))
    verdict = check_safety(abstract_net, p, budget=budget, engine=engine)
    status = "pass" if verdict.status == SAFE else "fail"
    report.obligations.append(Obligation("safety", status, f"{verdict.status} on the abstract network ({verdict.states} states)"))
    if verdict.violations:
        report.obligations[-1].detail += "; " + "; ".join(str(v) for v in verdict.violations)
    return CVResult(verdict, report, abstract_net)


def _side_condition(net: Network, T_a, kept, gone, exact_budget: int) -> Obligation:
    C = net.channel_names
    whole = T_a
    kept_ttsbs = [ttsb_of(a, net) for a in kept]
    if kept_ttsbs:
        whole = Parallel(T_a, parallel_all(kept_ttsbs))
    try:
        w = side_condition_witness(whole, C, exact_budget)
    except StateSpaceBudgetExceeded:
        pass
    else:
        if w is None:
            return Obligation("side-condition", "pass", "checked on the reachable states of the composition")
        return Obligation("side-condition", "fail", "committed state without a surviving committed transition", str(w))
    parts = [ttsb_of(a, net) for a in gone] + kept_ttsbs
    cw = componentwise_side_condition_witness(parts)
    if cw is None:
        return Obligation(
            "side-condition",
            "pass",
            "composition too large to enumerate; every component's committed states have a committed tau or broadcast send",
        )
    k, s = cw
    return Obligation(
        "side-condition",
        "fail",
        "inconclusive: composition too large to enumerate and the componentwise check fails",
        f"{parts[k]!r}: {s}",
    )


def all_pair_plans(net: Network, plan: CVPlan) -> t.List[t.Tuple[int, int]]:
    """Node pairs ``(A, B)`` with ``A < B`` over ``0..N-1``."""
    n = dict(net.constants).get("N")
    if n is None:
        raise ValueError("--all-pairs needs a model constant N")
    return list(itertools.combinations(range(n), 2))


def verify_plan(
    model: t.Union[str, pathlib.Path],
    plan: CVPlan,
    params: t.Optional[t.Mapping[str, int]] = None,
    budget: int = DEFAULT_BUDGET,
    engine: str = "auto",
) -> CVResult:
    net, abst = load_for_plan(model, plan, params)
    bad = validate_axioms(net) + validate_axioms(abst)
    if bad:
        raise InvalidModelError(bad)
    return compositional_verify(net, abst, plan.keep, plan.property, budget=budget, engine=engine)


class InvalidModelError(ValueError):
    def __init__(self, violations: t.List[Violation]) -> None:
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


def load(model: t.Union[str, pathlib.Path], params: t.Optional[t.Mapping[str, int]] = None) -> Network:
    return load_model(str(model), params)
