"""Redex enumeration, single steps, multi-step normalization and traces.

Redex search threads the environment through binders (lambda and case
branches extend it), so each redex carries the environment in force at its
position, and the fineness flag of atomization/commuting redexes is
computed against that local environment. A binder that would shadow a
declared variable is alpha-renamed on the fly; positions are unaffected.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import NotFine, StaleRedex, StepLimitExceeded
from .rules import RuleId, apply_rule, match_rule, rules_of_system
from .syntax import Case, Lam, Term, replace_at, subterm_at, term_children
from .typecheck import Env, SystemId, _enter_binder, is_fine_redex

_RULE_ORDER = {r: i for i, r in enumerate(RuleId)}

STRATEGIES = ("leftmost-outermost", "leftmost-innermost", "random")
_STRATEGY_ALIASES = {"lo": "leftmost-outermost", "li": "leftmost-innermost",
                     "leftmost-outermost": "leftmost-outermost",
                     "leftmost-innermost": "leftmost-innermost",
                     "random": "random"}


@dataclass(frozen=True)
class Redex:
    position: tuple
    rule: RuleId
    local_env: Env
    fine: bool


@dataclass(frozen=True)
class TraceStep:
    rule: RuleId
    position: tuple
    local_env: Env
    result: Term
    fine: bool = True
    admin: bool = False


@dataclass
class ReductionTrace:
    system: SystemId
    base_env: Env
    initial: Term
    steps: list = field(default_factory=list)

    @property
    def final(self) -> Term:
        return self.steps[-1].result if self.steps else self.initial

    def __len__(self):
        return len(self.steps)

    def rule_multiset(self):
        out = {}
        for s in self.steps:
            out[s.rule] = out.get(s.rule, 0) + 1
        return out


def _validate_rules(sys, rules):
    rules = frozenset(RuleId(r) for r in rules)
    bad = rules - rules_of_system(sys)
    if bad:
        names = ", ".join(sorted(r.value for r in bad))
        raise ValueError(f"rules not valid in {sys.value}: {names}")
    return rules


def find_redexes(sys: SystemId, env: Env, m: Term, rules) -> list:
    """All positions where a rule's left-hand side matches, pre-order,
    with local environments and fineness flags."""
    rules = _validate_rules(sys, rules)
    out = []

    def visit(t, pos, env):
        for rule in RuleId:
            if rule not in rules:
                continue
            if match_rule(rule, t) is not None:
                out.append(Redex(pos, rule, env, is_fine_redex(env, t, rule)))
        if isinstance(t, Lam):
            env2, _, body = _enter_binder(env, t.var, t.ann, t.body)
            visit(body, pos + (0,), env2)
        elif isinstance(t, Case):
            visit(t.scrut, pos + (0,), env)
            envl, _, lbody = _enter_binder(env, t.lvar, t.lann, t.lbody)
            visit(lbody, pos + (1,), envl)
            envr, _, rbody = _enter_binder(env, t.rvar, t.rann, t.rbody)
            visit(rbody, pos + (2,), envr)
        else:
            for i, child in enumerate(term_children(t)):
                visit(child, pos + (i,), env)

    visit(m, (), env)
    return out


def step(sys: SystemId, env: Env, m: Term, r: Redex,
         require_fine: bool = True) -> Term:
    """Contract redex r inside m."""
    sub = subterm_at(m, r.position)
    if match_rule(r.rule, sub) is None:
        raise StaleRedex(f"no {r.rule.value} redex at {list(r.position)}")
    if require_fine and not r.fine:
        raise NotFine(f"{r.rule.value} redex at {list(r.position)} is not fine")
    return replace_at(m, r.position, apply_rule(r.rule, sub))


def _pick(redexes, strategy, rng):
    key = lambda r: (r.position, _RULE_ORDER[r.rule])
    if strategy == "leftmost-outermost":
        return min(redexes, key=key)
    if strategy == "leftmost-innermost":
        innermost = [r for r in redexes
                     if not any(len(o.position) > len(r.position)
                                and o.position[:len(r.position)] == r.position
                                for o in redexes)]
        return min(innermost, key=key)
    return rng.choice(sorted(redexes, key=key))


def normalize(sys: SystemId, env: Env, m: Term, rules, strategy="leftmost-outermost",
              max_steps: int = 10000, seed=None, on_step=None) -> ReductionTrace:
    """Reduce until no fine redex among `rules` remains.

    Raises StepLimitExceeded (carrying the partial trace) at max_steps.
    `on_step` is called as on_step(trace, redex, before, after) after each
    step; analysis hooks use it to assert engine invariants.
    """
    strategy = _STRATEGY_ALIASES.get(strategy)
    if strategy is None:
        raise ValueError(f"unknown strategy; expected one of {STRATEGIES}")
    rng = random.Random(seed)
    trace = ReductionTrace(sys, env, m)
    current = m
    while True:
        candidates = [r for r in find_redexes(sys, env, current, rules) if r.fine]
        if not candidates:
            return trace
        if len(trace.steps) >= max_steps:
            raise StepLimitExceeded(f"no normal form within {max_steps} steps", trace)
        r = _pick(candidates, strategy, rng)
        nxt = step(sys, env, current, r)
        trace.steps.append(TraceStep(r.rule, r.position, r.local_env, nxt, r.fine))
        if on_step is not None:
            on_step(trace, r, current, nxt)
        current = nxt


def env_at(env: Env, m: Term, pos) -> Env:
    """Environment in force at `pos` inside m (binders extend it)."""
    cur = m
    for i in pos:
        if isinstance(cur, Lam):
            env, _, cur = _enter_binder(env, cur.var, cur.ann, cur.body)
        elif isinstance(cur, Case) and i in (1, 2):
            var, ann, body = ((cur.lvar, cur.lann, cur.lbody) if i == 1
                              else (cur.rvar, cur.rann, cur.rbody))
            env, _, cur = _enter_binder(env, var, ann, body)
        else:
            cur = term_children(cur)[i]
    return env


def apply_script(sys: SystemId, env: Env, m: Term, script,
                 require_fine: bool = False) -> ReductionTrace:
    """Drive a list of (rule, position[, admin]) instructions into a trace.

    Used by the simulation and diagram builders, whose step sequences are
    known in advance; each step's local environment and fineness flag are
    computed on the fly.
    """
    trace = ReductionTrace(sys, env, m)
    current = m
    for instr in script:
        rule, pos = RuleId(instr[0]), tuple(instr[1])
        admin = bool(instr[2]) if len(instr) > 2 else False
        sub = subterm_at(current, pos)
        if match_rule(rule, sub) is None:
            raise StaleRedex(f"no {rule.value} redex at {list(pos)}")
        local = env_at(env, current, pos)
        fine = is_fine_redex(local, sub, rule)
        if require_fine and not fine:
            raise NotFine(f"{rule.value} step at {list(pos)} is not fine")
        current = replace_at(current, pos, apply_rule(rule, sub))
        trace.steps.append(TraceStep(rule, pos, local, current, fine, admin))
    return trace


def replay(trace: ReductionTrace) -> bool:
    """Re-run a trace from its initial term; True iff every recorded step
    re-applies at its position and reproduces the recorded result."""
    current = trace.initial
    for s in trace.steps:
        sub = subterm_at(current, s.position)
        if match_rule(s.rule, sub) is None:
            return False
        current = replace_at(current, s.position, apply_rule(s.rule, sub))
        if current != s.result:
            return False
    return True


def shift(script, prefix, admin=None):
    """Shift a (rule, position[, admin]) script under a position prefix."""
    prefix = tuple(prefix)
    out = []
    for instr in script:
        rule, pos = instr[0], prefix + tuple(instr[1])
        a = instr[2] if len(instr) > 2 else False
        out.append((rule, pos, a if admin is None else admin))
    return out
