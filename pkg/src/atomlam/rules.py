"""The reduction-rule catalogue for all three systems.

Each rule has a shape matcher (returning a payload dict, or None) and an
applier producing the contractum with deterministic fresh names: the
smallest primed variant of the rule's suggested name not free in scope.
Appliers are pure functions of the redex up to alpha-equivalence.

ASCII ids (used in CLI and traces): beta_imp, beta_and, beta_or, beta_all,
eta_imp, eta_and, eta_or, eta_all, pi_imp, pi_and, pi_or, pi_bot,
varpi_imp, varpi_and, varpi_or, varpi_bot, rho_case, rho_abort, delta,
eps_case, eps_abort.
"""

from __future__ import annotations

from enum import Enum

from .errors import AtomicInstantiation, ShapeMismatch
from .syntax import (Abort, And, App, Bot, Case, Forall, FVar, Imp, Inj, Lam,
                     Or, Pair, Proj, Term, TyApp, TyLam, Var, free_type_vars,
                     free_type_vars_term, free_vars, fresh_name, subst_term,
                     subst_type_in_formula, subst_type_in_term)


class RuleId(str, Enum):
    beta_imp = "beta_imp"
    beta_and = "beta_and"
    beta_or = "beta_or"
    beta_all = "beta_all"
    eta_imp = "eta_imp"
    eta_and = "eta_and"
    eta_or = "eta_or"
    eta_all = "eta_all"
    pi_imp = "pi_imp"
    pi_and = "pi_and"
    pi_or = "pi_or"
    pi_bot = "pi_bot"
    varpi_imp = "varpi_imp"
    varpi_and = "varpi_and"
    varpi_or = "varpi_or"
    varpi_bot = "varpi_bot"
    rho_case = "rho_case"
    rho_abort = "rho_abort"
    delta = "delta"
    eps_case = "eps_case"
    eps_abort = "eps_abort"


_IPC_ONLY = frozenset({RuleId.beta_or, RuleId.eta_or, RuleId.pi_imp,
                       RuleId.pi_and, RuleId.pi_or, RuleId.pi_bot,
                       RuleId.varpi_imp, RuleId.varpi_and, RuleId.varpi_or,
                       RuleId.varpi_bot})
_POLY_ONLY = frozenset({RuleId.beta_all, RuleId.eta_all})
_F_ONLY = frozenset({RuleId.rho_case, RuleId.rho_abort, RuleId.delta,
                     RuleId.eps_case, RuleId.eps_abort})
_SHARED = frozenset({RuleId.beta_imp, RuleId.beta_and,
                     RuleId.eta_imp, RuleId.eta_and})

BETA_ETA = _SHARED | _POLY_ONLY | frozenset({RuleId.beta_or, RuleId.eta_or})
#: beta/eta rules available in F (used by the diagram midpoint search)
F_BETA_ETA = _SHARED | _POLY_ONLY


def rules_of_system(sys) -> frozenset:
    """RuleIds valid in the given SystemId (by .value to avoid an import cycle)."""
    name = getattr(sys, "value", sys)
    if name == "ipc":
        return _SHARED | _IPC_ONLY
    if name in ("f", "fat"):
        base = _SHARED | _POLY_ONLY
        return base | _F_ONLY if name == "f" else base
    raise ValueError(f"unknown system {sys!r}")


def fineness_kind(rule: RuleId) -> str:
    """'sum' / 'bot' for head-typed fineness, 'always' otherwise."""
    if rule in (RuleId.rho_case, RuleId.delta, RuleId.eps_case):
        return "sum"
    if rule in (RuleId.rho_abort, RuleId.eps_abort):
        return "bot"
    return "always"


def _is_atomic(f):
    return isinstance(f, FVar)


def _case_spine(t):
    """Match M C <fun x:A => P, fun y:B => Q>; return its parts or None."""
    if (isinstance(t, App) and isinstance(t.fun, TyApp)
            and isinstance(t.arg, Pair)
            and isinstance(t.arg.fst, Lam) and isinstance(t.arg.snd, Lam)):
        return (t.fun.fun, t.fun.arg, t.arg.fst, t.arg.snd)
    return None


# ------------------------------------------------------------- matchers
# Each matcher returns a payload dict (possibly with "head"/"lann"/"rann"
# for the fineness predicate) or None.

def _m_beta_imp(t):
    if isinstance(t, App) and isinstance(t.fun, Lam):
        return {}
    return None


def _m_beta_and(t):
    if isinstance(t, Proj) and isinstance(t.body, Pair):
        return {}
    return None


def _m_beta_or(t):
    if isinstance(t, Case) and isinstance(t.scrut, Inj):
        return {}
    return None


def _m_beta_all(t):
    if isinstance(t, TyApp) and isinstance(t.fun, TyLam):
        return {}
    return None


def _m_eta_imp(t):
    if (isinstance(t, Lam) and isinstance(t.body, App)
            and isinstance(t.body.arg, Var) and t.body.arg.name == t.var
            and t.var not in free_vars(t.body.fun)):
        return {}
    return None


def _m_eta_and(t):
    if (isinstance(t, Pair)
            and isinstance(t.fst, Proj) and t.fst.index == 1
            and isinstance(t.snd, Proj) and t.snd.index == 2
            and t.fst.body == t.snd.body):
        return {}
    return None


def _m_eta_or(t):
    if not isinstance(t, Case):
        return None
    l, r = t.lbody, t.rbody
    ok = (isinstance(l, Inj) and l.index == 1
          and isinstance(l.body, Var) and l.body.name == t.lvar
          and isinstance(r, Inj) and r.index == 2
          and isinstance(r.body, Var) and r.body.name == t.rvar
          and l.left == r.left and l.right == r.right
          and t.lann == l.left and t.rann == l.right
          and t.ann == Or(l.left, l.right))
    return {} if ok else None


def _m_eta_all(t):
    if (isinstance(t, TyLam) and isinstance(t.body, TyApp)
            and isinstance(t.body.arg, FVar) and t.body.arg.name == t.var
            and t.var not in free_type_vars_term(t.body.fun)):
        return {}
    return None


def _m_pi_imp(t):
    if (isinstance(t, App) and isinstance(t.fun, Case)
            and isinstance(t.fun.ann, Imp)):
        return {}
    return None


def _m_pi_and(t):
    if (isinstance(t, Proj) and isinstance(t.body, Case)
            and isinstance(t.body.ann, And)):
        return {}
    return None


def _m_pi_or(t):
    if (isinstance(t, Case) and isinstance(t.scrut, Case)
            and isinstance(t.scrut.ann, Or)):
        return {}
    return None


def _m_pi_bot(t):
    if (isinstance(t, Abort) and isinstance(t.body, Case)
            and isinstance(t.body.ann, Bot)):
        return {}
    return None


def _m_varpi_imp(t):
    if (isinstance(t, App) and isinstance(t.fun, Abort)
            and isinstance(t.fun.ann, Imp)):
        return {}
    return None


def _m_varpi_and(t):
    if (isinstance(t, Proj) and isinstance(t.body, Abort)
            and isinstance(t.body.ann, And)):
        return {}
    return None


def _m_varpi_or(t):
    if (isinstance(t, Case) and isinstance(t.scrut, Abort)
            and isinstance(t.scrut.ann, Or)):
        return {}
    return None


def _m_varpi_bot(t):
    if (isinstance(t, Abort) and isinstance(t.body, Abort)
            and isinstance(t.body.ann, Bot)):
        return {}
    return None


def _m_rho_case(t):
    spine = _case_spine(t)
    if spine is None:
        return None
    head, c, bl, br = spine
    if _is_atomic(c) or isinstance(c, (Or, Bot)):
        return None
    return {"head": head, "lann": bl.ann, "rann": br.ann}


def _m_rho_abort(t):
    if isinstance(t, TyApp) and not _is_atomic(t.arg) \
            and not isinstance(t.arg, (Or, Bot)):
        return {"head": t.fun}
    return None


def _m_delta(t):
    spine = _case_spine(t)
    if spine is None:
        return None
    head, c, bl, br = spine
    if isinstance(c, Imp):
        if (isinstance(bl.body, Lam) and isinstance(br.body, Lam)
                and bl.body.ann == c.left and br.body.ann == c.left):
            return {"head": head, "lann": bl.ann, "rann": br.ann}
        return None
    if isinstance(c, And):
        if isinstance(bl.body, Pair) and isinstance(br.body, Pair):
            return {"head": head, "lann": bl.ann, "rann": br.ann}
        return None
    if isinstance(c, Forall):
        if isinstance(bl.body, TyLam) and isinstance(br.body, TyLam):
            return {"head": head, "lann": bl.ann, "rann": br.ann}
        return None
    return None


def _m_eps_case(t):
    if isinstance(t, App):
        spine = _case_spine(t.fun)
        if spine is not None and isinstance(spine[1], Imp):
            head, _, bl, br = spine
            return {"head": head, "lann": bl.ann, "rann": br.ann}
        return None
    if isinstance(t, Proj):
        spine = _case_spine(t.body)
        if spine is not None and isinstance(spine[1], And):
            head, _, bl, br = spine
            return {"head": head, "lann": bl.ann, "rann": br.ann}
        return None
    if isinstance(t, TyApp):
        spine = _case_spine(t.fun)
        if spine is not None and isinstance(spine[1], Forall):
            head, _, bl, br = spine
            return {"head": head, "lann": bl.ann, "rann": br.ann}
        return None
    return None


def _m_eps_abort(t):
    if isinstance(t, App) and isinstance(t.fun, TyApp) \
            and isinstance(t.fun.arg, Imp):
        return {"head": t.fun.fun}
    if isinstance(t, Proj) and isinstance(t.body, TyApp) \
            and isinstance(t.body.arg, And):
        return {"head": t.body.fun}
    if isinstance(t, TyApp) and isinstance(t.fun, TyApp) \
            and isinstance(t.fun.arg, Forall):
        return {"head": t.fun.fun}
    return None


# ------------------------------------------------------------- appliers

def _rename_branch(var, body, avoid):
    """Rename a branch binder away from `avoid` (capture avoidance)."""
    if var not in avoid:
        return var, body
    new = fresh_name(var, set(avoid) | free_vars(body))
    return new, subst_term(Var(new), var, body)


def _a_beta_imp(t):
    return subst_term(t.arg, t.fun.var, t.fun.body)


def _a_beta_and(t):
    return t.body.fst if t.index == 1 else t.body.snd


def _a_beta_or(t):
    inj = t.scrut
    if inj.index == 1:
        return subst_term(inj.body, t.lvar, t.lbody)
    return subst_term(inj.body, t.rvar, t.rbody)


def _a_beta_all(t):
    return subst_type_in_term(t.arg, t.fun.var, t.fun.body)


def _a_eta_imp(t):
    return t.body.fun


def _a_eta_and(t):
    return t.fst.body


def _a_eta_or(t):
    return t.scrut


def _a_eta_all(t):
    return t.body.fun


def _a_pi_imp(t):
    case, n = t.fun, t.arg
    avoid = free_vars(n)
    lv, lb = _rename_branch(case.lvar, case.lbody, avoid)
    rv, rb = _rename_branch(case.rvar, case.rbody, avoid)
    return Case(case.scrut, lv, case.lann, App(lb, n),
                rv, case.rann, App(rb, n), case.ann.right)


def _a_pi_and(t):
    case = t.body
    ann = case.ann.left if t.index == 1 else case.ann.right
    return Case(case.scrut, case.lvar, case.lann, Proj(t.index, case.lbody),
                case.rvar, case.rann, Proj(t.index, case.rbody), ann)


def _a_pi_or(t):
    inner = t.scrut
    avoid = (free_vars(t.lbody) - {t.lvar}) | (free_vars(t.rbody) - {t.rvar})
    lv, lb = _rename_branch(inner.lvar, inner.lbody, avoid)
    rv, rb = _rename_branch(inner.rvar, inner.rbody, avoid)
    wrap = lambda b: Case(b, t.lvar, t.lann, t.lbody,
                          t.rvar, t.rann, t.rbody, t.ann)
    return Case(inner.scrut, lv, inner.lann, wrap(lb),
                rv, inner.rann, wrap(rb), t.ann)


def _a_pi_bot(t):
    case = t.body
    return Case(case.scrut, case.lvar, case.lann, Abort(case.lbody, t.ann),
                case.rvar, case.rann, Abort(case.rbody, t.ann), t.ann)


def _a_varpi_imp(t):
    return Abort(t.fun.body, t.fun.ann.right)


def _a_varpi_and(t):
    ab = t.body
    return Abort(ab.body, ab.ann.left if t.index == 1 else ab.ann.right)


def _a_varpi_or(t):
    return Abort(t.scrut.body, t.ann)


def _a_varpi_bot(t):
    return Abort(t.body.body, t.ann)


def _spine_parts(t):
    head, c, bl, br = _case_spine(t)
    return head, c, bl.var, bl.ann, bl.body, br.var, br.ann, br.body


def _a_rho_case(t):
    head, c, x, la, p, y, ra, q = _spine_parts(t)
    if isinstance(c, Imp):
        z = fresh_name("w", free_vars(head) | free_vars(p) | free_vars(q) | {x, y})
        return Lam(z, c.left, App(TyApp(head, c.right),
                                  Pair(Lam(x, la, App(p, Var(z))),
                                       Lam(y, ra, App(q, Var(z))))))
    if isinstance(c, And):
        def comp(i, ci):
            return App(TyApp(head, ci), Pair(Lam(x, la, Proj(i, p)),
                                             Lam(y, ra, Proj(i, q))))
        return Pair(comp(1, c.left), comp(2, c.right))
    if isinstance(c, Forall):
        avoid = (free_type_vars_term(head) | free_type_vars_term(p)
                 | free_type_vars_term(q) | free_type_vars(la)
                 | free_type_vars(ra) | free_type_vars(c))
        v = fresh_name(c.var, avoid)
        d = subst_type_in_formula(FVar(v), c.var, c.body)
        return TyLam(v, App(TyApp(head, d),
                            Pair(Lam(x, la, TyApp(p, FVar(v))),
                                 Lam(y, ra, TyApp(q, FVar(v))))))
    raise ShapeMismatch(f"no atomization case for {c!r}")


def _a_rho_abort(t):
    head, c = t.fun, t.arg
    if isinstance(c, Imp):
        z = fresh_name("w", free_vars(head))
        return Lam(z, c.left, TyApp(head, c.right))
    if isinstance(c, And):
        return Pair(TyApp(head, c.left), TyApp(head, c.right))
    if isinstance(c, Forall):
        avoid = free_type_vars_term(head) | free_type_vars(c)
        v = fresh_name(c.var, avoid)
        return TyLam(v, TyApp(head, subst_type_in_formula(FVar(v), c.var, c.body)))
    raise ShapeMismatch(f"no atomization case for {c!r}")


def _a_delta(t):
    head, c, x, la, p, y, ra, q = _spine_parts(t)
    if isinstance(c, Imp):
        z1, z2 = p.var, q.var
        avoid = (free_vars(head) | (free_vars(p.body) - {z1})
                 | (free_vars(q.body) - {z2}) | {x, y})
        z = fresh_name(z1, avoid)
        pb = p.body if z == z1 else subst_term(Var(z), z1, p.body)
        qb = q.body if z == z2 else subst_term(Var(z), z2, q.body)
        return Lam(z, c.left, App(TyApp(head, c.right),
                                  Pair(Lam(x, la, pb), Lam(y, ra, qb))))
    if isinstance(c, And):
        def comp(pi, qi, ci):
            return App(TyApp(head, ci), Pair(Lam(x, la, pi), Lam(y, ra, qi)))
        return Pair(comp(p.fst, q.fst, c.left), comp(p.snd, q.snd, c.right))
    if isinstance(c, Forall):
        y1, y2 = p.var, q.var
        avoid = (free_type_vars_term(head)
                 | (free_type_vars_term(p.body) - {y1})
                 | (free_type_vars_term(q.body) - {y2})
                 | free_type_vars(la) | free_type_vars(ra)
                 | free_type_vars(c))
        v = fresh_name(c.var, avoid)
        d = subst_type_in_formula(FVar(v), c.var, c.body)
        pb = subst_type_in_term(FVar(v), y1, p.body)
        qb = subst_type_in_term(FVar(v), y2, q.body)
        return TyLam(v, App(TyApp(head, d),
                            Pair(Lam(x, la, pb), Lam(y, ra, qb))))
    raise ShapeMismatch(f"no delta case for {c!r}")


def _a_eps_case(t):
    if isinstance(t, App):
        head, c, x, la, p, y, ra, q = _spine_parts(t.fun)
        n = t.arg
        avoid = free_vars(n)
        x, p = _rename_branch(x, p, avoid)
        y, q = _rename_branch(y, q, avoid)
        return App(TyApp(head, c.right), Pair(Lam(x, la, App(p, n)),
                                              Lam(y, ra, App(q, n))))
    if isinstance(t, Proj):
        head, c, x, la, p, y, ra, q = _spine_parts(t.body)
        ci = c.left if t.index == 1 else c.right
        return App(TyApp(head, ci), Pair(Lam(x, la, Proj(t.index, p)),
                                         Lam(y, ra, Proj(t.index, q))))
    head, c, x, la, p, y, ra, q = _spine_parts(t.fun)
    inst = subst_type_in_formula(t.arg, c.var, c.body)
    return App(TyApp(head, inst), Pair(Lam(x, la, TyApp(p, t.arg)),
                                       Lam(y, ra, TyApp(q, t.arg))))


def _a_eps_abort(t):
    if isinstance(t, App):
        return TyApp(t.fun.fun, t.fun.arg.right)
    if isinstance(t, Proj):
        c = t.body.arg
        return TyApp(t.body.fun, c.left if t.index == 1 else c.right)
    c = t.fun.arg
    return TyApp(t.fun.fun, subst_type_in_formula(t.arg, c.var, c.body))


_MATCHERS = {
    RuleId.beta_imp: _m_beta_imp, RuleId.beta_and: _m_beta_and,
    RuleId.beta_or: _m_beta_or, RuleId.beta_all: _m_beta_all,
    RuleId.eta_imp: _m_eta_imp, RuleId.eta_and: _m_eta_and,
    RuleId.eta_or: _m_eta_or, RuleId.eta_all: _m_eta_all,
    RuleId.pi_imp: _m_pi_imp, RuleId.pi_and: _m_pi_and,
    RuleId.pi_or: _m_pi_or, RuleId.pi_bot: _m_pi_bot,
    RuleId.varpi_imp: _m_varpi_imp, RuleId.varpi_and: _m_varpi_and,
    RuleId.varpi_or: _m_varpi_or, RuleId.varpi_bot: _m_varpi_bot,
    RuleId.rho_case: _m_rho_case, RuleId.rho_abort: _m_rho_abort,
    RuleId.delta: _m_delta,
    RuleId.eps_case: _m_eps_case, RuleId.eps_abort: _m_eps_abort,
}

_APPLIERS = {
    RuleId.beta_imp: _a_beta_imp, RuleId.beta_and: _a_beta_and,
    RuleId.beta_or: _a_beta_or, RuleId.beta_all: _a_beta_all,
    RuleId.eta_imp: _a_eta_imp, RuleId.eta_and: _a_eta_and,
    RuleId.eta_or: _a_eta_or, RuleId.eta_all: _a_eta_all,
    RuleId.pi_imp: _a_pi_imp, RuleId.pi_and: _a_pi_and,
    RuleId.pi_or: _a_pi_or, RuleId.pi_bot: _a_pi_bot,
    RuleId.varpi_imp: _a_varpi_imp, RuleId.varpi_and: _a_varpi_and,
    RuleId.varpi_or: _a_varpi_or, RuleId.varpi_bot: _a_varpi_bot,
    RuleId.rho_case: _a_rho_case, RuleId.rho_abort: _a_rho_abort,
    RuleId.delta: _a_delta,
    RuleId.eps_case: _a_eps_case, RuleId.eps_abort: _a_eps_abort,
}


def match_rule(rule: RuleId, m: Term):
    """Payload dict if m is a root redex of `rule`, else None."""
    return _MATCHERS[RuleId(rule)](m)


def apply_rule(rule: RuleId, m: Term) -> Term:
    """Contract a root redex of `rule`; ShapeMismatch / AtomicInstantiation
    when m does not match."""
    rule = RuleId(rule)
    if match_rule(rule, m) is None:
        if rule is RuleId.rho_case:
            spine = _case_spine(m)
            if spine is not None and _is_atomic(spine[1]):
                raise AtomicInstantiation("atomization of an atomic instantiation")
        if rule is RuleId.rho_abort and isinstance(m, TyApp) \
                and _is_atomic(m.arg):
            raise AtomicInstantiation("atomization of an atomic instantiation")
        raise ShapeMismatch(f"term is not a {rule.value} redex")
    return _APPLIERS[rule](m)
