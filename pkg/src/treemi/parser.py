"""Problem file parser and serializer.

S-expression grammar, UTF-8, ';' starts a line comment:

    (declare-real <name> <lo> <hi>)     bounds become unary clauses
    (declare-bool <name>)
    (assert <clause>)
      <clause> := <lit> | (or <lit>+) | (=> <lit> <conj>)
      <conj>   := <lit> | (or <lit>+) | (and <conj>+)
      <lit>    := <name> | (not <name>)
                | (<= <lexpr> <lexpr>) | (< <lexpr> <lexpr>)
                | (<  <lexpr> <lexpr> <lexpr>)   chained, also for <=
      <lexpr>  := rational | <name> | (+ <lexpr>+) | (- <lexpr> <lexpr>)
                | (* rational <name>) | (* rational)
    (weight <lit> <poly>)               <lit> univariate
      <poly>   := (+ <mono>+) | <mono>
      <mono>   := (* rational (^ <name> natural)*)

Chained comparisons denote a conjunction of two atoms, so they are only
accepted where a conjunction is a legal clause set: as a whole assert, as
an implication antecedent, and as a weight guard.  Numbers are integers,
exact decimals, or p/q.  Strict and non-strict comparisons collapse to
non-strict; equality atoms are rejected (measure zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from treemi.exactmath import parse_rational
from treemi.theory import (
    BOOL,
    REAL,
    RESERVED_PREFIX,
    Clause,
    LinearAtom,
    Literal,
    Monomial,
    Problem,
    Theory,
    TheoryError,
    Var,
    WeightEntry,
    make_clause,
    unary_bound_clauses,
)


import re

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class SAtom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: Tuple[Union["SList", SAtom], ...]
    line: int
    col: int


SExpr = Union[SAtom, SList]


def _tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield (ch, ch, line, col)
            col += 1
            i += 1
        else:
            start = i
            startcol = col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            yield ("atom", text[start:i], line, startcol)
    yield ("eof", "", line, col)


def _read_forms(text: str) -> List[SExpr]:
    forms: List[SExpr] = []
    stack: List[List] = []
    positions: List[Tuple[int, int]] = []
    for kind, value, line, col in _tokenize(text):
        if kind == "(":
            stack.append([])
            positions.append((line, col))
        elif kind == ")":
            if not stack:
                raise ParseError("unmatched ')'", line, col)
            items = stack.pop()
            pline, pcol = positions.pop()
            node = SList(tuple(items), pline, pcol)
            (stack[-1] if stack else forms).append(node)
        elif kind == "atom":
            node = SAtom(value, line, col)
            (stack[-1] if stack else forms).append(node)
        else:  # eof
            if stack:
                pline, pcol = positions[-1]
                raise ParseError("unclosed '('", pline, pcol)
    return forms


def _head(form: SExpr) -> Optional[str]:
    if isinstance(form, SList) and form.items and isinstance(form.items[0], SAtom):
        return form.items[0].text
    return None


class _ProblemBuilder:
    def __init__(self):
        self.variables: Dict[str, Var] = {}
        self.clauses: List[Clause] = []
        self.weights: List[WeightEntry] = []

    # ---- helpers -------------------------------------------------------

    def _rational(self, form: SExpr) -> Fraction:
        if not isinstance(form, SAtom):
            raise ParseError("expected a rational literal", form.line, form.col)
        try:
            return parse_rational(form.text)
        except ValueError:
            raise ParseError(
                f"not a rational literal: {form.text!r}", form.line, form.col
            ) from None

    def _name(self, form: SExpr) -> str:
        if not isinstance(form, SAtom):
            raise ParseError("expected a variable name", form.line, form.col)
        return form.text

    def _declared(self, form: SAtom, kind: Optional[str] = None) -> Var:
        var = self.variables.get(form.text)
        if var is None:
            raise ParseError(f"unknown variable {form.text!r}", form.line, form.col)
        if kind is not None and var.kind != kind:
            raise ParseError(
                f"variable {form.text!r} is not of kind {kind}", form.line, form.col
            )
        return var

    # ---- linear expressions -------------------------------------------

    def _lexpr(self, form: SExpr) -> Tuple[Dict[str, Fraction], Fraction]:
        """Returns (coeffs, constant) for a linear expression."""
        if isinstance(form, SAtom):
            txt = form.text
            if txt and (txt[0].isdigit() or txt[0] in "+-." and len(txt) > 1):
                return {}, self._rational(form)
            self._declared(form, REAL)
            return {txt: Fraction(1)}, Fraction(0)
        head = _head(form)
        args = form.items[1:]
        if head == "+":
            if not args:
                raise ParseError("(+) needs at least one argument", form.line, form.col)
            coeffs: Dict[str, Fraction] = {}
            const = Fraction(0)
            for a in args:
                c, k = self._lexpr(a)
                const += k
                for v, cv in c.items():
                    coeffs[v] = coeffs.get(v, Fraction(0)) + cv
            return coeffs, const
        if head == "-":
            if len(args) != 2:
                raise ParseError("(-) needs exactly two arguments", form.line, form.col)
            c1, k1 = self._lexpr(args[0])
            c2, k2 = self._lexpr(args[1])
            for v, cv in c2.items():
                c1[v] = c1.get(v, Fraction(0)) - cv
            return c1, k1 - k2
        if head == "*":
            if len(args) == 1:
                return {}, self._rational(args[0])
            if len(args) == 2:
                c = self._rational(args[0])
                name = self._name(args[1])
                self._declared(args[1], REAL)
                return {name: c}, Fraction(0)
            raise ParseError(
                "(*) takes a rational and at most one variable", form.line, form.col
            )
        if head == "=":
            raise ParseError(
                "equality atoms are unsupported (measure zero)", form.line, form.col
            )
        raise ParseError(f"bad linear expression {head!r}", form.line, form.col)

    def _comparison_atoms(self, form: SList) -> List[LinearAtom]:
        """One atom for (<= a b)/(< a b); two for the chained ternary form."""
        head = _head(form)
        args = form.items[1:]
        if len(args) not in (2, 3):
            raise ParseError(
                f"({head}) takes two or three arguments", form.line, form.col
            )
        atoms = []
        for left, right in zip(args, args[1:]):
            cl, kl = self._lexpr(left)
            cr, kr = self._lexpr(right)
            coeffs = dict(cl)
            for v, cv in cr.items():
                coeffs[v] = coeffs.get(v, Fraction(0)) - cv
            coeffs = {v: c for v, c in coeffs.items() if c != 0}
            if not coeffs:
                raise ParseError(
                    "comparison contains no variables", form.line, form.col
                )
            atoms.append(LinearAtom.of(coeffs, kl - kr))
        return atoms

    def _literal(self, form: SExpr, *, allow_chain: bool) -> List[Literal]:
        """A literal; a chained comparison yields two (a conjunction)."""
        if isinstance(form, SAtom):
            self._declared(form, BOOL)
            return [Literal.of_bool(form.text)]
        head = _head(form)
        if head == "not":
            if len(form.items) != 2 or not isinstance(form.items[1], SAtom):
                raise ParseError("(not) takes one boolean variable", form.line, form.col)
            self._declared(form.items[1], BOOL)
            return [Literal.of_bool(form.items[1].text, negated=True)]
        if head in ("<", "<="):
            atoms = self._comparison_atoms(form)
            if len(atoms) == 2 and not allow_chain:
                raise ParseError(
                    "chained comparison is a conjunction and cannot appear "
                    "inside a disjunction",
                    form.line,
                    form.col,
                )
            return [Literal.of_atom(a) for a in atoms]
        if head == "=":
            raise ParseError(
                "equality atoms are unsupported (measure zero)", form.line, form.col
            )
        raise ParseError(f"expected a literal, got {head!r}", form.line, form.col)

    # ---- clauses -------------------------------------------------------

    def _conj_clauses(self, form: SExpr) -> List[List[Literal]]:
        """A conjunction of clauses: <lit> | (or ...) | (and <conj>+)."""
        head = _head(form)
        if head == "and":
            out: List[List[Literal]] = []
            for sub in form.items[1:]:
                out.extend(self._conj_clauses(sub))
            if not out:
                raise ParseError("(and) needs at least one clause", form.line, form.col)
            return out
        if head == "or":
            return [self._or_clause(form)]
        lits = self._literal(form, allow_chain=True)
        return [[lit] for lit in lits]

    def _or_clause(self, form: SList) -> List[Literal]:
        lits: List[Literal] = []
        for sub in form.items[1:]:
            lits.extend(self._literal(sub, allow_chain=False))
        if not lits:
            raise ParseError(
                "empty clause makes the theory trivially UNSAT", form.line, form.col
            )
        return lits

    def _assert_clauses(self, form: SExpr) -> List[List[Literal]]:
        head = _head(form)
        if head == "=>":
            if len(form.items) != 3:
                raise ParseError("(=>) takes a literal and a conjunction",
                                 form.line, form.col)
            antecedent = self._literal(form.items[1], allow_chain=True)
            negated = [lit.complement() for lit in antecedent]
            out = []
            for conj in self._conj_clauses(form.items[2]):
                out.append(negated + conj)
            return out
        return self._conj_clauses(form)

    # ---- top-level forms ----------------------------------------------

    def declare(self, form: SList, kind: str):
        expect = 4 if kind == REAL else 2
        if len(form.items) != expect:
            raise ParseError(f"malformed declaration", form.line, form.col)
        name_form = form.items[1]
        name = self._name(name_form)
        if name.startswith(RESERVED_PREFIX):
            raise ParseError(
                f"names starting with {RESERVED_PREFIX!r} are reserved",
                name_form.line, name_form.col,
            )
        if name in self.variables:
            raise ParseError(f"duplicate declaration of {name!r}",
                             name_form.line, name_form.col)
        if name in ("or", "and", "not", "=>", "<", "<=", "+", "-", "*", "^"):
            raise ParseError(f"{name!r} cannot be a variable name",
                             name_form.line, name_form.col)
        if kind == REAL:
            lo = self._rational(form.items[2])
            hi = self._rational(form.items[3])
            if lo >= hi:
                raise ParseError(
                    f"real variable {name!r} needs lo < hi, got [{lo}, {hi}]",
                    form.line, form.col,
                )
            var = Var(name, REAL, lo, hi)
            self.variables[name] = var
            self.clauses.extend(unary_bound_clauses(var))
        else:
            self.variables[name] = Var(name, BOOL)

    def weight(self, form: SList):
        if len(form.items) != 3:
            raise ParseError("(weight) takes a literal and a polynomial",
                             form.line, form.col)
        guard = tuple(self._literal(form.items[1], allow_chain=True))
        names = {v for lit in guard for v in lit.variables()}
        if len(names) != 1:
            raise ParseError("weight literal must be univariate",
                             form.line, form.col)
        guard_name = next(iter(names))
        guard_var = self.variables[guard_name]
        monomials = self._poly(form.items[2], guard_name, guard_var.kind)
        self.weights.append(WeightEntry(guard, tuple(monomials)))

    def _poly(self, form: SExpr, guard_name: str, guard_kind: str) -> List[Monomial]:
        if _head(form) == "+":
            out = []
            for sub in form.items[1:]:
                out.extend(self._poly(sub, guard_name, guard_kind))
            if not out:
                raise ParseError("(+) needs at least one monomial", form.line, form.col)
            return out
        return [self._mono(form, guard_name, guard_kind)]

    def _mono(self, form: SExpr, guard_name: str, guard_kind: str) -> Monomial:
        if _head(form) != "*":
            raise ParseError("monomial must be (* rational (^ var nat)*)",
                             form.line, form.col)
        if len(form.items) < 2:
            raise ParseError("monomial needs a coefficient", form.line, form.col)
        coeff = self._rational(form.items[1])
        if coeff <= 0:
            raise ParseError(
                f"weight coefficients must be positive, got {coeff}",
                form.line, form.col,
            )
        powers: Dict[str, int] = {}
        for sub in form.items[2:]:
            if _head(sub) != "^" or len(sub.items) != 3:
                raise ParseError("expected (^ var natural)", form.line, form.col)
            vname = self._name(sub.items[1])
            self._declared(sub.items[1], REAL)
            if vname != guard_name:
                raise ParseError(
                    f"weight over literal of {guard_name!r} cannot mention "
                    f"{vname!r}",
                    sub.line, sub.col,
                )
            exp_form = sub.items[2]
            if not isinstance(exp_form, SAtom) or not exp_form.text.isdigit():
                raise ParseError("exponent must be a natural number",
                                 sub.line, sub.col)
            powers[vname] = powers.get(vname, 0) + int(exp_form.text)
        if powers and guard_kind == BOOL:
            raise ParseError("weights on boolean literals must be constant",
                             form.line, form.col)
        return Monomial.of(coeff, powers)

    # ---- validation ----------------------------------------------------

    def validate_weights(self, theory: Theory):
        present_atoms = set(theory.atoms())
        present_bools = set()
        for clause in theory.clauses:
            for lit in clause:
                if lit.bool_var is not None:
                    present_bools.add((lit.bool_var, lit.negated))
        for entry in self.weights:
            for lit in entry.guard:
                if lit.bool_var is not None:
                    if (lit.bool_var, lit.negated) not in present_bools:
                        raise TheoryError(
                            f"weight literal {lit} does not appear in the theory"
                        )
                elif lit.atom not in present_atoms:
                    raise TheoryError(
                        f"weight literal {lit} does not appear in the theory"
                    )


def parse_problem(text: str) -> Problem:
    builder = _ProblemBuilder()
    for form in _read_forms(text):
        head = _head(form)
        if head == "declare-real":
            builder.declare(form, REAL)
        elif head == "declare-bool":
            builder.declare(form, BOOL)
        elif head == "assert":
            if len(form.items) != 2:
                raise ParseError("(assert) takes one clause", form.line, form.col)
            for lits in builder._assert_clauses(form.items[1]):
                builder.clauses.append(make_clause(lits))
        elif head == "weight":
            builder.weight(form)
        else:
            line = getattr(form, "line", 1)
            col = getattr(form, "col", 1)
            raise ParseError(f"unknown form {head!r}", line, col)
    theory = Theory(builder.variables, builder.clauses)
    builder.validate_weights(theory)
    return Problem(theory, tuple(builder.weights))


def parse_query(text: str, base: Problem) -> List[Clause]:
    """Parse a query file: assert forms only, over the base problem's vars."""
    builder = _ProblemBuilder()
    builder.variables = dict(base.theory.variables)
    clauses: List[Clause] = []
    for form in _read_forms(text):
        head = _head(form)
        if head != "assert":
            line = getattr(form, "line", 1)
            col = getattr(form, "col", 1)
            raise ParseError(
                "query files may only contain (assert ...) forms", line, col
            )
        if len(form.items) != 2:
            raise ParseError("(assert) takes one clause", form.line, form.col)
        for lits in builder._assert_clauses(form.items[1]):
            clauses.append(make_clause(lits))
    return clauses


# ---- serialization ------------------------------------------------------


def _fmt_rational(v: Fraction) -> str:
    return str(v)


def _fmt_lexpr_atom(atom: LinearAtom) -> str:
    terms = [f"(* {_fmt_rational(c)} {v})" for v, c in atom.coeffs]
    if atom.constant != 0:
        terms.append(_fmt_rational(atom.constant))
    if len(terms) == 1:
        body = terms[0]
    else:
        body = "(+ " + " ".join(terms) + ")"
    return f"(<= {body} 0)"


def _fmt_literal(lit: Literal) -> str:
    if lit.bool_var is not None:
        return f"(not {lit.bool_var})" if lit.negated else lit.bool_var
    return _fmt_lexpr_atom(lit.atom)


def _fmt_monomial(m: Monomial) -> str:
    parts = [f"(^ {v} {e})" for v, e in m.powers]
    return "(* " + " ".join([_fmt_rational(m.coeff)] + parts) + ")"


def serialize_problem(problem: Problem) -> str:
    """Canonical text form; parse(serialize(p)) is structurally equal to p."""
    lines = []
    theory = problem.theory
    bound_clauses = set()
    for var in theory.variables.values():
        if var.kind == REAL:
            lines.append(
                f"(declare-real {var.name} {_fmt_rational(var.lo)} "
                f"{_fmt_rational(var.hi)})"
            )
            bound_clauses.update(unary_bound_clauses(var))
        else:
            lines.append(f"(declare-bool {var.name})")
    for clause in theory.clauses:
        if clause in bound_clauses:
            continue  # re-emitted by the declaration
        body = " ".join(_fmt_literal(lit) for lit in clause)
        if len(clause) == 1:
            lines.append(f"(assert {body})")
        else:
            lines.append(f"(assert (or {body}))")
    for entry in problem.weights:
        if len(entry.guard) == 1:
            guard = _fmt_literal(entry.guard[0])
        else:
            # two atoms over one variable: emit as an implication-free pair
            # is not expressible; reconstruct the chained form
            guard = _fmt_chained_guard(entry.guard)
        monos = [_fmt_monomial(m) for m in entry.monomials]
        poly = monos[0] if len(monos) == 1 else "(+ " + " ".join(monos) + ")"
        lines.append(f"(weight {guard} {poly})")
    return "\n".join(lines) + "\n"


def _fmt_chained_guard(guard: Tuple[Literal, ...]) -> str:
    """Render a two-atom interval guard as a chained comparison."""
    name = guard[0].variables()[0]
    lo = hi = None
    for lit in guard:
        c = lit.atom.coeff_of(name)
        bound = -lit.atom.constant / c
        if c > 0:
            hi = bound
        else:
            lo = bound
    if lo is None or hi is None:
        raise TheoryError(f"cannot serialize guard {guard}")
    return f"(<= {_fmt_rational(lo)} {name} {_fmt_rational(hi)})"
