"""Typecheckers for the three systems, elimination-context typing, and the
fineness predicate for atomization/commuting redexes.

Typechecking is syntax-directed (binders, injections, case and abort are
fully annotated), so no unification is needed. Formula equality is
alpha-equivalence throughout. A term binder that would shadow a declared
variable is silently alpha-renamed; type binders are not, so the
universal-introduction proviso is checked against the literal binder name.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import rules as _rules
from .errors import (DuplicateDeclaration, ForallProvisoViolated,
                     HoleTypeMismatch, NonAtomicInstantiation, NotARedex,
                     NotInSystem, TypeMismatch, TypingError, UnboundVariable)
from .syntax import (Abort, And, App, AppHole, AbortHole, Bot, Case, CaseHole,
                     ElimContext, Forall, Formula, FVar, Imp, Inj, Lam, Or,
                     Pair, Proj, ProjHole, Term, TyApp, TyAppHole, TyLam, Var,
                     encode_bot, encode_or, free_type_vars, free_vars,
                     fresh_name, subst_term, subst_type_in_formula)


class SystemId(Enum):
    IPC = "ipc"
    F = "f"
    FAT = "fat"

    @classmethod
    def parse(cls, name: str) -> "SystemId":
        return cls(name.lower())


class Env:
    """Ordered map from term variables to formulas; duplicates rejected."""

    __slots__ = ("_map",)

    def __init__(self, bindings=()):
        self._map = {}
        for name, formula in (bindings.items() if isinstance(bindings, dict) else bindings):
            if name in self._map:
                raise DuplicateDeclaration(f"variable {name!r} declared twice")
            self._map[name] = formula

    def extend(self, name: str, formula: Formula) -> "Env":
        if name in self._map:
            raise DuplicateDeclaration(f"variable {name!r} declared twice")
        new = Env()
        new._map = dict(self._map)
        new._map[name] = formula
        return new

    def lookup(self, name: str):
        return self._map.get(name)

    def __contains__(self, name):
        return name in self._map

    def __len__(self):
        return len(self._map)

    def names(self):
        return self._map.keys()

    def items(self):
        return self._map.items()

    def free_type_vars(self) -> frozenset:
        out = frozenset()
        for f in self._map.values():
            out |= free_type_vars(f)
        return out

    def __repr__(self):
        inner = ", ".join(f"{k}: {v!r}" for k, v in self._map.items())
        return f"Env({{{inner}}})"


@dataclass(frozen=True)
class FormulaClass:
    """Connective usage of a formula: which systems it belongs to."""

    has_or_bot: bool
    has_forall: bool

    @property
    def in_ipc(self) -> bool:
        return not self.has_forall

    @property
    def in_f(self) -> bool:
        return not self.has_or_bot


def system_of_formula(f: Formula) -> FormulaClass:
    if isinstance(f, FVar):
        return FormulaClass(False, False)
    if isinstance(f, Bot):
        return FormulaClass(True, False)
    if isinstance(f, Or):
        l, r = system_of_formula(f.left), system_of_formula(f.right)
        return FormulaClass(True, l.has_forall or r.has_forall)
    if isinstance(f, (Imp, And)):
        l, r = system_of_formula(f.left), system_of_formula(f.right)
        return FormulaClass(l.has_or_bot or r.has_or_bot, l.has_forall or r.has_forall)
    if isinstance(f, Forall):
        inner = system_of_formula(f.body)
        return FormulaClass(inner.has_or_bot, True)
    raise TypeError(f"not a formula: {f!r}")


def formula_in_system(f: Formula, sys: SystemId) -> bool:
    cls = system_of_formula(f)
    return cls.in_ipc if sys is SystemId.IPC else cls.in_f


def _check_formula(f, sys, pos):
    if not formula_in_system(f, sys):
        raise NotInSystem(f"formula not in {sys.value}: {f!r}", pos)


def _enter_binder(env, var, ann, body):
    """Extend env with var:ann, alpha-renaming the binder if it shadows."""
    if var not in env:
        return env.extend(var, ann), var, body
    new = fresh_name(var, set(env.names()) | free_vars(body))
    return env.extend(new, ann), new, subst_term(Var(new), var, body)


def typecheck(sys: SystemId, env: Env, m: Term,
              strict_proviso: bool = False) -> Formula:
    """Return the unique formula A with env |- m : A in system `sys`.

    A type binder that collides with a type variable free in the
    environment is silently alpha-renamed, exactly like a shadowing term
    binder; the universal-introduction proviso is thereby discharged by
    the renaming convention. Pass strict_proviso=True to instead reject
    such a binder with ForallProvisoViolated (the literal on-demand check
    against the environment's free type variables).
    """

    def go(t, env, pos):
        if isinstance(t, Var):
            f = env.lookup(t.name)
            if f is None:
                raise UnboundVariable(f"unbound variable {t.name!r}", pos)
            return f
        if isinstance(t, Lam):
            _check_formula(t.ann, sys, pos)
            env2, _, body = _enter_binder(env, t.var, t.ann, t.body)
            return Imp(t.ann, go(body, env2, pos + (0,)))
        if isinstance(t, App):
            tf = go(t.fun, env, pos + (0,))
            ta = go(t.arg, env, pos + (1,))
            if not isinstance(tf, Imp):
                raise TypeMismatch("applied term is not an implication",
                                   pos + (0,), expected=None, found=tf)
            if ta != tf.left:
                raise TypeMismatch("argument type mismatch", pos + (1,),
                                   expected=tf.left, found=ta)
            return tf.right
        if isinstance(t, Pair):
            return And(go(t.fst, env, pos + (0,)), go(t.snd, env, pos + (1,)))
        if isinstance(t, Proj):
            tb = go(t.body, env, pos + (0,))
            if not isinstance(tb, And):
                raise TypeMismatch("projected term is not a conjunction",
                                   pos + (0,), expected=None, found=tb)
            return tb.left if t.index == 1 else tb.right
        if isinstance(t, Inj):
            if sys is not SystemId.IPC:
                raise NotInSystem(f"injection not in {sys.value}", pos)
            _check_formula(t.left, sys, pos)
            _check_formula(t.right, sys, pos)
            tb = go(t.body, env, pos + (0,))
            want = t.left if t.index == 1 else t.right
            if tb != want:
                raise TypeMismatch("injected term type mismatch", pos + (0,),
                                   expected=want, found=tb)
            return Or(t.left, t.right)
        if isinstance(t, Case):
            if sys is not SystemId.IPC:
                raise NotInSystem(f"case not in {sys.value}", pos)
            for f in (t.lann, t.rann, t.ann):
                _check_formula(f, sys, pos)
            ts = go(t.scrut, env, pos + (0,))
            if not isinstance(ts, Or):
                raise TypeMismatch("case scrutinee is not a disjunction",
                                   pos + (0,), expected=None, found=ts)
            if ts.left != t.lann or ts.right != t.rann:
                raise TypeMismatch("case branch annotations do not match scrutinee",
                                   pos, expected=Or(t.lann, t.rann), found=ts)
            envl, _, lbody = _enter_binder(env, t.lvar, t.lann, t.lbody)
            tl = go(lbody, envl, pos + (1,))
            if tl != t.ann:
                raise TypeMismatch("left branch type mismatch", pos + (1,),
                                   expected=t.ann, found=tl)
            envr, _, rbody = _enter_binder(env, t.rvar, t.rann, t.rbody)
            tr = go(rbody, envr, pos + (2,))
            if tr != t.ann:
                raise TypeMismatch("right branch type mismatch", pos + (2,),
                                   expected=t.ann, found=tr)
            return t.ann
        if isinstance(t, Abort):
            if sys is not SystemId.IPC:
                raise NotInSystem(f"abort not in {sys.value}", pos)
            _check_formula(t.ann, sys, pos)
            tb = go(t.body, env, pos + (0,))
            if not isinstance(tb, Bot):
                raise TypeMismatch("aborted term is not of the empty type",
                                   pos + (0,), expected=Bot(), found=tb)
            return t.ann
        if isinstance(t, TyLam):
            if sys is SystemId.IPC:
                raise NotInSystem("type abstraction not in ipc", pos)
            var, body = t.var, t.body
            if var in env.free_type_vars():
                if strict_proviso:
                    raise ForallProvisoViolated(
                        f"type variable {var!r} occurs free in the environment",
                        pos)
                from .syntax import free_type_vars_term, subst_type_in_term
                var = fresh_name(var, env.free_type_vars()
                                 | free_type_vars_term(body))
                body = subst_type_in_term(FVar(var), t.var, body)
            return Forall(var, go(body, env, pos + (0,)))
        if isinstance(t, TyApp):
            if sys is SystemId.IPC:
                raise NotInSystem("universal instantiation not in ipc", pos)
            if sys is SystemId.FAT and not isinstance(t.arg, FVar):
                raise NonAtomicInstantiation(
                    f"instantiation with non-atomic formula {t.arg!r}", pos)
            _check_formula(t.arg, sys, pos)
            tf = go(t.fun, env, pos + (0,))
            if not isinstance(tf, Forall):
                raise TypeMismatch("instantiated term is not universal",
                                   pos + (0,), expected=None, found=tf)
            return subst_type_in_formula(t.arg, tf.var, tf.body)
        raise TypeError(f"not a term: {t!r}")

    return go(m, env, ())


def typecheck_elim_context(sys: SystemId, env: Env, e: ElimContext,
                           hole_type: Formula) -> Formula:
    """Return B such that env | hole_type |- e : B."""
    if isinstance(e, AppHole):
        if not isinstance(hole_type, Imp):
            raise HoleTypeMismatch("hole type is not an implication", ())
        ta = typecheck(sys, env, e.arg)
        if ta != hole_type.left:
            raise TypeMismatch("context argument type mismatch", (),
                               expected=hole_type.left, found=ta)
        return hole_type.right
    if isinstance(e, ProjHole):
        if not isinstance(hole_type, And):
            raise HoleTypeMismatch("hole type is not a conjunction", ())
        return hole_type.left if e.index == 1 else hole_type.right
    if isinstance(e, CaseHole):
        if sys is not SystemId.IPC:
            raise NotInSystem(f"case context not in {sys.value}", ())
        if not isinstance(hole_type, Or):
            raise HoleTypeMismatch("hole type is not a disjunction", ())
        if hole_type.left != e.lann or hole_type.right != e.rann:
            raise HoleTypeMismatch("context branch annotations do not match hole type", ())
        envl, _, lbody = _enter_binder(env, e.lvar, e.lann, e.lbody)
        tl = typecheck(sys, envl, lbody)
        if tl != e.ann:
            raise TypeMismatch("left branch type mismatch", (1,),
                               expected=e.ann, found=tl)
        envr, _, rbody = _enter_binder(env, e.rvar, e.rann, e.rbody)
        tr = typecheck(sys, envr, rbody)
        if tr != e.ann:
            raise TypeMismatch("right branch type mismatch", (2,),
                               expected=e.ann, found=tr)
        return e.ann
    if isinstance(e, AbortHole):
        if sys is not SystemId.IPC:
            raise NotInSystem(f"abort context not in {sys.value}", ())
        if not isinstance(hole_type, Bot):
            raise HoleTypeMismatch("hole type is not the empty type", ())
        return e.ann
    if isinstance(e, TyAppHole):
        if sys is SystemId.IPC:
            raise NotInSystem("instantiation context not in ipc", ())
        if sys is SystemId.FAT and not isinstance(e.arg, FVar):
            raise NonAtomicInstantiation(
                f"instantiation with non-atomic formula {e.arg!r}", ())
        if not isinstance(hole_type, Forall):
            raise HoleTypeMismatch("hole type is not universal", ())
        return subst_type_in_formula(e.arg, hole_type.var, hole_type.body)
    raise TypeError(f"not an elimination context: {e!r}")


def is_fine_redex(env: Env, m: Term, rule) -> bool:
    """Fineness of a root redex of `rule` in env.

    Atomization/delta/commuting case redexes are fine iff the head has the
    sum-encoded type built from the branch annotations; the abort variants
    are fine iff the head has the empty-type encoding. Detour and eta
    redexes are always fine, as are the IPC commuting rules.
    """
    payload = _rules.match_rule(rule, m)
    if payload is None:
        raise NotARedex(f"term is not a {getattr(rule, 'value', rule)} redex")
    kind = _rules.fineness_kind(rule)
    if kind == "always":
        return True
    head = payload["head"]
    try:
        t = typecheck(SystemId.F, env, head)
    except TypingError:
        return False
    if kind == "sum":
        return t == encode_or(payload["lann"], payload["rann"])
    return t == encode_bot()
