import itertools
import random

from hypothesis import given, settings, strategies as st

from atomlam import (Abort, And, App, AppHole, Bot, Case, Forall, FVar, Imp,
                     Inj, Lam, Or, Pair, Proj, ProjHole, TyApp, TyAppHole,
                     TyLam, Var, alpha_eq, encode_bot, encode_or, fill,
                     free_vars, match_encoded_or, parse_formula, parse_term,
                     subst_term, subst_type_in_formula, subst_type_in_term)

pf, pt = parse_formula, parse_term


# --------------------------------------------------- oracle: substitution
# Independent oracle: rename every binder in the whole term to a globally
# unique name first, then substitute naively (no capture checks needed).

_counter = itertools.count()


def _uniquify(t):
    def go(t, ren):
        if isinstance(t, Var):
            return Var(ren.get(t.name, t.name))
        if isinstance(t, Lam):
            new = f"u{next(_counter)}"
            return Lam(new, t.ann, go(t.body, {**ren, t.var: new}))
        if isinstance(t, App):
            return App(go(t.fun, ren), go(t.arg, ren))
        if isinstance(t, Pair):
            return Pair(go(t.fst, ren), go(t.snd, ren))
        if isinstance(t, Proj):
            return Proj(t.index, go(t.body, ren))
        if isinstance(t, Inj):
            return Inj(t.index, go(t.body, ren), t.left, t.right)
        if isinstance(t, Case):
            nl = f"u{next(_counter)}"
            nr = f"u{next(_counter)}"
            return Case(go(t.scrut, ren),
                        nl, t.lann, go(t.lbody, {**ren, t.lvar: nl}),
                        nr, t.rann, go(t.rbody, {**ren, t.rvar: nr}), t.ann)
        if isinstance(t, Abort):
            return Abort(go(t.body, ren), t.ann)
        if isinstance(t, TyLam):
            return TyLam(t.var, go(t.body, ren))
        if isinstance(t, TyApp):
            return TyApp(go(t.fun, ren), t.arg)
        raise AssertionError(t)

    return go(t, {})


def _naive_subst(n, x, t):
    if isinstance(t, Var):
        return n if t.name == x else t
    if isinstance(t, Lam):
        return Lam(t.var, t.ann, _naive_subst(n, x, t.body))
    if isinstance(t, App):
        return App(_naive_subst(n, x, t.fun), _naive_subst(n, x, t.arg))
    if isinstance(t, Pair):
        return Pair(_naive_subst(n, x, t.fst), _naive_subst(n, x, t.snd))
    if isinstance(t, Proj):
        return Proj(t.index, _naive_subst(n, x, t.body))
    if isinstance(t, Inj):
        return Inj(t.index, _naive_subst(n, x, t.body), t.left, t.right)
    if isinstance(t, Case):
        return Case(_naive_subst(n, x, t.scrut),
                    t.lvar, t.lann, _naive_subst(n, x, t.lbody),
                    t.rvar, t.rann, _naive_subst(n, x, t.rbody), t.ann)
    if isinstance(t, Abort):
        return Abort(_naive_subst(n, x, t.body), t.ann)
    if isinstance(t, TyLam):
        return TyLam(t.var, _naive_subst(n, x, t.body))
    if isinstance(t, TyApp):
        return TyApp(_naive_subst(n, x, t.fun), t.arg)
    raise AssertionError(t)


def subst_oracle(n, x, t):
    return _naive_subst(n, x, _uniquify(t))


# ----------------------------------------------------- hypothesis strategies

names = st.sampled_from(["x", "y", "z", "w"])
tnames = st.sampled_from(["X", "Y", "Z"])

formulas = st.recursive(
    st.one_of(tnames.map(FVar), st.just(Bot())),
    lambda inner: st.one_of(
        st.builds(Imp, inner, inner),
        st.builds(And, inner, inner),
        st.builds(Or, inner, inner),
        st.builds(Forall, tnames, inner)),
    max_leaves=8)

terms = st.recursive(
    names.map(Var),
    lambda inner: st.one_of(
        st.builds(Lam, names, formulas, inner),
        st.builds(App, inner, inner),
        st.builds(Pair, inner, inner),
        st.builds(Proj, st.sampled_from([1, 2]), inner),
        st.builds(Inj, st.sampled_from([1, 2]), inner, formulas, formulas),
        st.builds(Case, inner, names, formulas, inner, names, formulas, inner,
                  formulas),
        st.builds(Abort, inner, formulas),
        st.builds(TyLam, tnames, inner),
        st.builds(TyApp, inner, formulas)),
    max_leaves=10)


# ------------------------------------------------------------------ alpha

def test_alpha_eq_renaming():
    assert alpha_eq(pt("fun x:X => x"), pt("fun y:X => y"))
    assert alpha_eq(pt("tfun X => fun w:X => w"), pt("tfun Y => fun w:Y => w"))
    assert not alpha_eq(pt("fun x:X => x"), pt("fun x:Y => x"))


def test_alpha_distinguishes_free_vars():
    assert not alpha_eq(pt("fun x:X => y"), pt("fun x:X => z"))
    assert not alpha_eq(pt("x"), pt("y"))


@settings(max_examples=150)
@given(terms)
def test_alpha_reflexive(t):
    assert alpha_eq(t, t)


@settings(max_examples=100)
@given(terms, terms)
def test_alpha_symmetric(a, b):
    assert alpha_eq(a, b) == alpha_eq(b, a)


@settings(max_examples=60)
@given(terms, terms, terms)
def test_alpha_transitive(a, b, c):
    if alpha_eq(a, b) and alpha_eq(b, c):
        assert alpha_eq(a, c)


# ------------------------------------------------------------ substitution

def test_subst_capture_forces_rename():
    out = subst_term(Var("y"), "x", pt("fun y:X => x"))
    assert alpha_eq(out, pt("fun w:X => y"))
    assert not alpha_eq(out, pt("fun y:X => y"))


def test_subst_var():
    assert alpha_eq(subst_term(pt("a b"), "x", Var("x")), pt("a b"))


def test_subst_matches_oracle_on_example():
    # [z/x](fun z:X => x z) must rename the binder
    t = pt("fun z:X => x z")
    out = subst_term(Var("z"), "x", t)
    assert alpha_eq(out, subst_oracle(Var("z"), "x", t))
    assert alpha_eq(out, pt("fun w:X => z w"))


@settings(max_examples=150)
@given(terms, names, terms)
def test_subst_matches_oracle(n, x, t):
    assert alpha_eq(subst_term(n, x, t), subst_oracle(n, x, t))


@settings(max_examples=100)
@given(terms, names)
def test_subst_identity_when_not_free(t, x):
    if x not in free_vars(t):
        assert alpha_eq(subst_term(Var("q"), x, t), t)


def test_type_subst_in_formula():
    assert subst_type_in_formula(FVar("Y"), "X", pf("forall X. X")) == pf("forall X. X")
    assert subst_type_in_formula(pf("Y -> Y"), "X", pf("X & X")) == pf("(Y -> Y) & (Y -> Y)")
    # capture avoidance: [X/Y](forall X. Y -> X) renames the binder
    out = subst_type_in_formula(FVar("X"), "Y", pf("forall X. Y -> X"))
    assert out == pf("forall Z. X -> Z")
    assert out != pf("forall X. X -> X")


def test_type_subst_in_term():
    assert alpha_eq(subst_type_in_term(FVar("Y"), "X", pt("fun w:X => w")),
                    pt("fun w:Y => w"))
    assert alpha_eq(subst_type_in_term(FVar("Y"), "X", pt("tfun X => fun w:X => w")),
                    pt("tfun X => fun w:X => w"))
    assert alpha_eq(subst_type_in_term(pf("forall Z. Z"), "X", pt("z [X]")),
                    pt("z [forall Z. Z]"))


# -------------------------------------------------------------- encodings

def test_encode_or():
    assert encode_or(FVar("Y"), FVar("Z")) == pf("forall X. ((Y -> X) & (Z -> X)) -> X")
    # freshness forced when X occurs in the components
    assert encode_or(FVar("X"), FVar("X")) == pf("forall W. ((X -> W) & (X -> W)) -> W")


def test_encode_bot():
    assert encode_bot() == pf("forall X. X")
    assert encode_bot() == pf("forall Y. Y")


def test_match_encoded_or():
    assert match_encoded_or(encode_or(FVar("X"), pf("X -> Y"))) == (FVar("X"), pf("X -> Y"))
    assert match_encoded_or(encode_bot()) is None
    assert match_encoded_or(pf("forall X. ((Y -> X) & (Z -> X)) -> Y")) is None


@settings(max_examples=60)
@given(formulas, formulas)
def test_encode_or_alpha_invariant_roundtrip(a, b):
    got = match_encoded_or(encode_or(a, b))
    assert got is not None and got[0] == a and got[1] == b


# ------------------------------------------------------------------- fill

def test_fill():
    m, n = Var("m"), Var("n")
    assert fill(AppHole(n), m) == App(m, n)
    assert fill(ProjHole(1), m) == Proj(1, m)
    assert fill(TyAppHole(FVar("B")), m) == TyApp(m, FVar("B"))


# ------------------------------------------------------------- round trip

def test_elimination_chains_associate_left():
    t = parse_term("m [X] n .1")
    assert t == Proj(1, App(TyApp(Var("m"), FVar("X")), Var("n")))
    assert parse_term("abort[X -> Y] m n") == \
        App(Abort(Var("m"), pf("X -> Y")), Var("n"))


def test_bracket_formulas_need_parens_above_or():
    assert parse_term("in1[X & Y|Z] m") == \
        Inj(1, Var("m"), And(FVar("X"), FVar("Y")), FVar("Z"))
    t = parse_term("in2[(X -> Y)|(A | B)] m")
    assert t.left == pf("X -> Y") and t.right == pf("A | B")
    import pytest
    from atomlam.errors import ParseError
    with pytest.raises(ParseError):
        parse_term("in1[X -> Y|Z] m")


def test_redundant_parens_accepted():
    assert parse_term("((x))") == Var("x")
    assert parse_formula("((X)) -> ((Y))") == pf("X -> Y")


@settings(max_examples=200)
@given(terms)
def test_parse_print_roundtrip(t):
    from atomlam import print_term
    assert alpha_eq(parse_term(print_term(t)), t)


@settings(max_examples=200)
@given(formulas)
def test_formula_roundtrip(f):
    from atomlam import print_formula
    assert parse_formula(print_formula(f)) == f


@settings(max_examples=150)
@given(terms)
def test_printing_is_a_fixpoint(t):
    from atomlam import print_term
    once = print_term(t)
    assert print_term(parse_term(once)) == once
