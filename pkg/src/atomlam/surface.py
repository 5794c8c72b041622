"""Concrete syntax: lexer, recursive-descent parser and pretty-printer.

Formulas: `X`, `bot`, `A -> B` (right assoc), `A & B`, `A | B`,
`forall X. A`; precedence `&` > `|` > `->`.

Terms: `x`, `fun x:A => M`, `M N` (left assoc), `<M, N>`, `M.1`, `M.2`,
`in1[A|B] M`, `in2[A|B] M`, `case M of { x:A => P ; y:B => Q } : C`,
`abort[C] M`, `tfun X => M`, `M [B]`.

Eliminations chain left-associatively: `m [X] n .1` is ((m[X]) n).1.
The argument of `in1`/`in2`/`abort` is a single atom; the component
formulas inside `in1[A|B]` are parsed above `|` precedence, so `->`,
`|` and `forall` formulas there require parentheses (the printer adds
them). The printer emits exactly this grammar; the parser additionally
accepts redundant parentheses.
"""

from __future__ import annotations

from .errors import ParseError
from .syntax import (Abort, And, App, Bot, Case, Formula, Forall, FVar, Imp,
                     Inj, Lam, Or, Pair, Proj, Term, TyApp, TyLam, Var)

_KEYWORDS = {"fun", "tfun", "case", "of", "abort", "in1", "in2", "forall", "bot"}
_SYMBOLS = ["->", "=>", "(", ")", "[", "]", "{", "}", "<", ">", ",", ";", ":", "|", "&", "."]


def _lex(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            toks.append(("kw" if word in _KEYWORDS else "ident", word, i))
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], i))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(("sym", sym, i))
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        k, v, pos = self.peek()
        if k != kind or (value is not None and v != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {v or k!r}", pos)
        return self.next()

    def at_sym(self, s):
        k, v, _ = self.peek()
        return k == "sym" and v == s

    def at_kw(self, w):
        k, v, _ = self.peek()
        return k == "kw" and v == w

    # -- formulas; precedence levels: 0 lowest (forall scope), imp 1, or 2, and 3

    def formula(self, min_prec=0):
        if self.at_kw("forall"):
            if min_prec > 0:
                _, _, pos = self.peek()
                raise ParseError("quantified formula needs parentheses here", pos)
            self.next()
            name = self.expect("ident")[1]
            self.expect("sym", ".")
            return Forall(name, self.formula(0))
        left = self._formula_bin(min_prec)
        if self.at_sym("->"):
            if min_prec > 1:
                _, _, pos = self.peek()
                raise ParseError("'->' formula needs parentheses here", pos)
            self.next()
            return Imp(left, self.formula(0))
        return left

    def _formula_bin(self, min_prec):
        left = self._formula_atom()
        while True:
            if self.at_sym("&"):
                self.next()
                left = And(left, self._formula_atom())
            elif self.at_sym("|") and min_prec <= 2:
                self.next()
                right = self._formula_atom()
                while self.at_sym("&"):
                    self.next()
                    right = And(right, self._formula_atom())
                left = Or(left, right)
            else:
                return left

    def _formula_atom(self):
        k, v, pos = self.peek()
        if k == "kw" and v == "bot":
            self.next()
            return Bot()
        if k == "ident":
            self.next()
            return FVar(v)
        if k == "sym" and v == "(":
            self.next()
            f = self.formula(0)
            self.expect("sym", ")")
            return f
        raise ParseError(f"expected a formula, found {v or k!r}", pos)

    def bracket_formula(self):
        """A formula at precedence above `|` (for in1/in2 brackets)."""
        return self.formula(3)

    # -- terms

    def term(self):
        if self.at_kw("fun"):
            self.next()
            name = self.expect("ident")[1]
            self.expect("sym", ":")
            ann = self.formula(0)
            self.expect("sym", "=>")
            return Lam(name, ann, self.term())
        if self.at_kw("tfun"):
            self.next()
            name = self.expect("ident")[1]
            self.expect("sym", "=>")
            return TyLam(name, self.term())
        if self.at_kw("case"):
            self.next()
            scrut = self.term()
            self.expect("kw", "of")
            self.expect("sym", "{")
            lvar = self.expect("ident")[1]
            self.expect("sym", ":")
            lann = self.formula(0)
            self.expect("sym", "=>")
            lbody = self.term()
            self.expect("sym", ";")
            rvar = self.expect("ident")[1]
            self.expect("sym", ":")
            rann = self.formula(0)
            self.expect("sym", "=>")
            rbody = self.term()
            self.expect("sym", "}")
            self.expect("sym", ":")
            ann = self.formula(0)
            return Case(scrut, lvar, lann, lbody, rvar, rann, rbody, ann)
        return self._chain()

    def _chain(self):
        acc = self._item()
        while True:
            k, v, _ = self.peek()
            if k == "sym" and v == "[":
                self.next()
                arg = self.formula(0)
                self.expect("sym", "]")
                acc = TyApp(acc, arg)
            elif k == "sym" and v == ".":
                self.next()
                idx = self._proj_index()
                acc = Proj(idx, acc)
            elif (k == "ident" or (k == "sym" and v in ("(", "<"))
                  or (k == "kw" and v in ("abort", "in1", "in2"))):
                acc = App(acc, self._item())
            else:
                return acc

    def _proj_index(self):
        k, v, pos = self.expect("int")
        if v not in ("1", "2"):
            raise ParseError("projection index must be 1 or 2", pos)
        return int(v)

    def _item(self):
        k, v, pos = self.peek()
        if k == "kw" and v in ("in1", "in2"):
            self.next()
            self.expect("sym", "[")
            left = self.bracket_formula()
            self.expect("sym", "|")
            right = self.bracket_formula()
            self.expect("sym", "]")
            return Inj(1 if v == "in1" else 2, self._atom(), left, right)
        if k == "kw" and v == "abort":
            self.next()
            self.expect("sym", "[")
            ann = self.formula(0)
            self.expect("sym", "]")
            return Abort(self._atom(), ann)
        return self._atom()

    def _atom(self):
        k, v, pos = self.peek()
        if k == "ident":
            self.next()
            return Var(v)
        if k == "sym" and v == "(":
            self.next()
            t = self.term()
            self.expect("sym", ")")
            return t
        if k == "sym" and v == "<":
            self.next()
            fst = self.term()
            self.expect("sym", ",")
            snd = self.term()
            self.expect("sym", ">")
            return Pair(fst, snd)
        raise ParseError(f"expected a term, found {v or k!r}", pos)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula(0)
    p.expect("eof")
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.expect("eof")
    return t


# ---------------------------------------------------------------- printing

def _pf(f, prec):
    if isinstance(f, FVar):
        return f.name
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Imp):
        s = f"{_pf(f.left, 2)} -> {_pf(f.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(f, Or):
        s = f"{_pf(f.left, 2)} | {_pf(f.right, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(f, And):
        s = f"{_pf(f.left, 3)} & {_pf(f.right, 4)}"
        return f"({s})" if prec > 3 else s
    if isinstance(f, Forall):
        s = f"forall {f.var}. {_pf(f.body, 0)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    return _pf(f, 0)


# term precedence: 0 binder scope, 1 elimination chain, 2 atom
def _pt(t, prec):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Pair):
        return f"<{_pt(t.fst, 0)}, {_pt(t.snd, 0)}>"
    if isinstance(t, Lam):
        s = f"fun {t.var}:{_pf(t.ann, 0)} => {_pt(t.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, TyLam):
        s = f"tfun {t.var} => {_pt(t.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, Case):
        s = (f"case {_pt(t.scrut, 0)} of "
             f"{{ {t.lvar}:{_pf(t.lann, 0)} => {_pt(t.lbody, 0)} ; "
             f"{t.rvar}:{_pf(t.rann, 0)} => {_pt(t.rbody, 0)} }} : {_pf(t.ann, 0)}")
        return f"({s})" if prec > 0 else s
    if isinstance(t, App):
        s = f"{_pt(t.fun, 1)} {_pt(t.arg, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(t, TyApp):
        s = f"{_pt(t.fun, 1)} [{_pf(t.arg, 0)}]"
        return f"({s})" if prec > 1 else s
    if isinstance(t, Proj):
        s = f"{_pt(t.body, 1)}.{t.index}"
        return f"({s})" if prec > 1 else s
    if isinstance(t, Inj):
        s = f"in{t.index}[{_pf(t.left, 3)}|{_pf(t.right, 3)}] {_pt(t.body, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(t, Abort):
        s = f"abort[{_pf(t.ann, 0)}] {_pt(t.body, 2)}"
        return f"({s})" if prec > 1 else s
    raise TypeError(f"not a term: {t!r}")


def print_term(t: Term) -> str:
    return _pt(t, 0)
