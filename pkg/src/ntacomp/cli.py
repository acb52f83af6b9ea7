"""Command-line interface.

Exit codes: 0 the property holds / models are equal / simulation found /
model is valid, 1 violated / different / refuted, 2 invalid model or usage
error, 3 budget exceeded or internal error."""

from __future__ import annotations

import argparse
import hashlib
import json
import pathlib
import sys
import typing as t

from ntacomp import corpus
from ntacomp.model.ast import Network
from ntacomp.model.errors import ModelError, UnboundName
from ntacomp.model.parser import parse_model
from ntacomp.model.validate import validate_axioms
from ntacomp.ttsb import DEFAULT_BUDGET, StateSpaceBudgetExceeded
from ntacomp.valuations import Valuation

OK, FAILED, INVALID, ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _params(items: t.Sequence[str]) -> t.Dict[str, int]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"--param {name} needs an integer value") from None
    return out


def _read(path: str) -> t.Tuple[pathlib.Path, str]:
    p = corpus.resolve(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    return p, p.read_text(encoding="utf-8")


def _load(path: str, params: t.Mapping[str, int], context: t.Optional[Network] = None) -> Network:
    p, text = _read(path)
    return parse_model(text, params, source=str(p), context=context)


def _emit(args: argparse.Namespace, payload: t.Dict[str, t.Any], human: t.Iterable[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, default=str))
    else:
        for line in human:
            print(line)


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    net = _load(args.model, _params(args.param))
    bad = validate_axioms(net)
    _emit(
        args,
        {"valid": not bad, "violations": [v.to_json() for v in bad]},
        [str(v) for v in bad] or [f"{args.model}: valid ({len(net.automata)} automata)"],
    )
    return INVALID if bad else OK


def _invalid(args: argparse.Namespace, net: Network) -> bool:
    bad = validate_axioms(net)
    if bad:
        _emit(args, {"status": "Invalid", "violations": [v.to_json() for v in bad]}, [str(v) for v in bad])
    return bool(bad)


def _with_property(path: str, params: t.Mapping[str, int], prop: str) -> t.Tuple[Network, str]:
    """The model and the name of ``prop``: an existing property name, or an
    expression that is added to the model as a fresh property."""
    net = _load(path, params)
    if any(p.name == prop for p in net.properties):
        return net, prop
    p, text = _read(path)
    if '"' in prop:
        raise UsageError("property expressions cannot contain double quotes")
    name = "_cli_property"
    net = parse_model(text + f'\nproperty {name} "{prop}";\n', params, source=str(p))
    return net, name


def cmd_mc(args: argparse.Namespace) -> int:
    from ntacomp.verify import BUDGET_EXCEEDED, INVALID as V_INVALID, SAFE, check_safety

    net, prop = _with_property(args.model, _params(args.param), args.prop)
    v = check_safety(net, prop, budget=args.budget, engine=args.engine)
    lines = [f"{v.status} ({v.states} states, {v.seconds:.2f} s, {v.engine or 'no'} engine)"]
    if v.detail:
        lines.append(v.detail)
    lines.extend(str(x) for x in v.violations)
    if v.trace:
        for k, st in enumerate(v.trace):
            state = ", ".join(f"{n}={x}" for n, x in st.state)
            lines.append(f"  {k}: {state}")
            if st.step is not None:
                lines.append(f"     --{st.step}-->")
    _emit(args, v.to_json(), lines)
    if v.status == SAFE:
        return OK
    if v.status == V_INVALID:
        return INVALID
    if v.status == BUDGET_EXCEEDED:
        return ERROR
    return FAILED


def cmd_cv(args: argparse.Namespace) -> int:
    from ntacomp import verify as V

    model, _ = _read(args.model)
    plan_file, _ = _read(args.plan)
    plan = V.load_plan(plan_file)
    params = _params(args.param)
    if args.all_pairs:
        net, _abst = V.load_for_plan(model, plan, {**params, "A": 0, "B": 1})
        runs = [{**params, "A": a, "B": b} for a, b in V.all_pair_plans(net, plan)]
    else:
        runs = [params]
    results = []
    code = OK
    for ps in runs:
        label = ", ".join(f"{k}={v}" for k, v in ps.items() if k in ("A", "B")) or str(plan_file.name)
        try:
            r = V.verify_plan(model, plan, ps, budget=args.budget, engine=args.engine)
        except V.InvalidModelError as exc:
            results.append({"run": label, "verdict": V.INVALID, "violations": [v.to_json() for v in exc.violations]})
            code = max(code, INVALID)
            continue
        except V.PlanNotComparable as exc:
            results.append({"run": label, "verdict": "NotComparable", "detail": str(exc), **exc.report.to_json()})
            code = max(code, INVALID)
            continue
        except V.CertificateFailed as exc:
            name = "SimulationRefuted" if isinstance(exc, V.SimulationRefuted) else "SideConditionFailed"
            results.append({"run": label, "verdict": name, "detail": str(exc), **exc.report.to_json()})
            code = max(code, FAILED)
            continue
        out = {"run": label, **r.to_json()}
        results.append(out)
        st = r.verdict.status
        code = max(code, {V.SAFE: OK, V.VIOLATED: FAILED, V.INVALID: INVALID}.get(st, ERROR))
    overall = "Safe" if code == OK else next(r["verdict"] for r in results if r["verdict"] != "Safe")
    lines = []
    for r in results:
        lines.append(f"[{r['run']}] {r['verdict']}")
        for o in r.get("obligations", ()):
            extra = f" (witness {o['witness']})" if "witness" in o else ""
            lines.append(f"    {o['name']}: {o['status']} {o.get('detail', '')}{extra}")
        if "detail" in r and not r.get("obligations"):
            lines.append(f"    {r['detail']}")
    if len(results) > 1:
        lines.append(f"overall: {overall}")
    payload = results[0] if len(results) == 1 else {"verdict": overall, "runs": results}
    _emit(args, payload, lines)
    return code


def _network_ttsb(net: Network, restrict: t.Sequence[str]):
    from ntacomp.compose import parallel_all, restrict_ttsb
    from ntacomp.semantics import network_ttsbs

    T = parallel_all(network_ttsbs(net))
    return restrict_ttsb(T, restrict, channels=net.channel_names) if restrict else T


def cmd_sim_check(args: argparse.Namespace) -> int:
    from ntacomp.simulation import NotComparable, Simulated, check_simulation

    params = _params(args.param)
    A = _load(args.model_a, params)
    try:
        B = _load(args.model_b, params)
    except UnboundName:
        B = _load(args.model_b, {}, context=A)
    if _invalid(args, A) or _invalid(args, B):
        return INVALID
    names = [n.strip() for n in (args.restrict or "").split(",") if n.strip()]
    Ta, Tb = _network_ttsb(A, names), _network_ttsb(B, names)
    try:
        res = check_simulation(Ta, Tb, args.budget)
    except NotComparable as exc:
        _emit(args, {"status": "NotComparable", "detail": str(exc)}, [f"NotComparable: {exc}"])
        return INVALID
    if isinstance(res, Simulated):
        if args.dump_relation:
            rows = sorted((_show(r), _show(s)) for r, s in res.relation)
            pathlib.Path(args.dump_relation).write_text("".join(f"{r}\t{s}\n" for r, s in rows), encoding="utf-8")
        _emit(args, {"status": "Simulated", "relation_size": res.size}, [f"Simulated (relation of {res.size} pairs)"])
        return OK
    r, s = res.pair
    payload = {"status": "Refuted", "condition": res.condition, "detail": res.detail,
               "pair": [_show(r), _show(s)]}
    _emit(args, payload, [f"Refuted: {res}"])
    return FAILED


def _show(v: Valuation) -> str:
    return "{" + ", ".join(f"{k}={v[k]}" for k in sorted(v)) + "}"


def cmd_semantics_equiv(args: argparse.Namespace) -> int:
    from ntacomp.nta import Equal, check_semantics_equivalence

    if args.model == "random":
        from ntacomp.corpus.generate import NetworkConfig, random_network

        net = random_network(NetworkConfig(seed=args.seed))
    else:
        net = _load(args.model, _params(args.param))
    if _invalid(args, net):
        return INVALID
    res = check_semantics_equivalence(net, budget=args.budget, engine=args.engine)
    if isinstance(res, Equal):
        payload = {"status": "Equal", "states_lhs": res.states, "states_rhs": res.states, "transitions": res.transitions}
        _emit(args, payload, [f"Equal ({res.states} states, {res.transitions} transitions)"])
        return OK
    payload = {
        "status": "Counterexample",
        "states_lhs": res.states_lhs,
        "states_rhs": res.states_rhs,
        "counterexample": {"side": res.side, "state": _show(res.state),
                           "transition": None if res.transition is None else [res.transition[0], _show(res.transition[1])]},
    }
    _emit(args, payload, [f"Counterexample: {res}"])
    return FAILED


def _hash(v: Valuation) -> str:
    return hashlib.sha1(_show(v).encode()).hexdigest()[:12]


def cmd_explore(args: argparse.Namespace) -> int:
    from ntacomp.nta import compositional_ttsb

    net = _load(args.model, _params(args.param))
    if _invalid(args, net):
        return INVALID
    T = compositional_ttsb(net)
    states = T.reachable(args.budget)
    rows = sorted({(_hash(s), str(a), int(b), _hash(tgt)) for s in states for a, b, tgt in T.successors(s)})
    table = sorted((_hash(s), _show(s)) for s in states)
    lines = [f"# {len(table)} states, {len(rows)} transitions", f"initial {_hash(T.initial)}"]
    lines += [f"state {h} {v}" for h, v in table]
    lines += [f"{src} {a} {b} {tgt}" for src, a, b, tgt in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        pathlib.Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(table)} states and {len(rows)} transitions to {args.out}")
    else:
        sys.stdout.write(text)
    return OK


# -- argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> t.NoReturn:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(INVALID)


def build_parser() -> argparse.ArgumentParser:
    from ntacomp.verify import CLI_BUDGET

    ap = _Parser(prog="ntacomp", description="Model checking and compositional verification of timed automata networks.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, budget: int) -> None:
        p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE", help="override a model constant")
        p.add_argument("--budget", type=int, default=budget, help=f"state budget (default {budget})")
        p.add_argument("--json", action="store_true", help="print a JSON report")

    p = sub.add_parser("validate", help="check the well-formedness axioms")
    p.add_argument("model")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mc", help="check a safety property on the monolithic semantics")
    p.add_argument("model")
    p.add_argument("--prop", required=True, help="property name or expression")
    p.add_argument("--engine", choices=("auto", "python", "fast"), default="auto")
    common(p, CLI_BUDGET)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("cv", help="compositional verification with a plan")
    p.add_argument("model")
    p.add_argument("--plan", required=True)
    p.add_argument("--all-pairs", action="store_true", help="run the plan for every node pair A < B")
    p.add_argument("--engine", choices=("auto", "python", "fast"), default="auto")
    common(p, CLI_BUDGET)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("sim-check", help="decide timed step simulation between two networks")
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.add_argument("--restrict", help="comma-separated channels and variables to restrict both sides by")
    p.add_argument("--dump-relation", metavar="FILE")
    common(p, DEFAULT_BUDGET)
    p.set_defaults(func=cmd_sim_check)

    p = sub.add_parser("semantics-equiv", help="compare monolithic and compositional semantics")
    p.add_argument("model", help="model file, or 'random' for a generated network")
    p.add_argument("--seed", type=int, default=1, help="generator seed when the model is 'random'")
    p.add_argument("--engine", choices=("python", "fast"), default="python")
    common(p, DEFAULT_BUDGET)
    p.set_defaults(func=cmd_semantics_equiv)

    p = sub.add_parser("explore", help="dump the reachable compositional TTSB as a sorted edge list")
    p.add_argument("model")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_explore, json=False)
    return ap


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ntacomp: {exc}", file=sys.stderr)
        return INVALID
    except ModelError as exc:
        print(str(exc), file=sys.stderr)
        return INVALID
    except StateSpaceBudgetExceeded as exc:
        print(f"ntacomp: {exc}", file=sys.stderr)
        return ERROR
    except (ValueError, KeyError) as exc:
        print(f"ntacomp: {exc}", file=sys.stderr)
        return INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"ntacomp: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
