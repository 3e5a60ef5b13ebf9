"""SMT(LRA) problems in CNF: variables, atoms, literals, clauses, weights.

Conventions baked into the representation:

* A linear atom is stored canonically as  sum(c_v * v) + k <= 0  with at
  least one nonzero coefficient.  Strict and non-strict comparisons are
  collapsed to <= at construction: integration cannot see measure-zero
  boundaries.  Negating an atom flips every sign.
* Boolean literals carry a negation flag; linear literals never do.
* Every real variable has a bounded domain which is *also* materialized
  as two unary clauses, so the clause set alone determines the feasible
  region.
* Theories are immutable; `substitute` returns a new Theory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from treemi import kernels
from treemi.exactmath import as_rational

REAL = "real"
BOOL = "bool"

RESERVED_PREFIX = "__"


class TheoryError(ValueError):
    """Malformed theory construction or misuse of a theory operation."""


@dataclass(frozen=True)
class Var:
    name: str
    kind: str
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind == REAL:
            if self.lo is None or self.hi is None:
                raise TheoryError(f"real variable {self.name} needs a bounded domain")
            if self.lo >= self.hi:
                raise TheoryError(
                    f"variable {self.name}: empty domain [{self.lo}, {self.hi}]"
                )
        elif self.kind == BOOL:
            if self.lo is not None or self.hi is not None:
                raise TheoryError(f"boolean variable {self.name} cannot have bounds")
        else:
            raise TheoryError(f"unknown variable kind {self.kind!r}")


@dataclass(frozen=True)
class LinearAtom:
    """sum(coeff * var) + constant <= 0, coeffs sorted by name, all nonzero."""

    coeffs: Tuple[Tuple[str, Fraction], ...]
    constant: Fraction

    @staticmethod
    def of(coeffs: Mapping[str, Fraction], constant) -> "LinearAtom":
        items = tuple(
            sorted((v, as_rational(c)) for v, c in coeffs.items() if c != 0)
        )
        if not items:
            raise TheoryError("linear atom has no variables")
        return LinearAtom(items, as_rational(constant))

    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def coeff_of(self, name: str) -> Fraction:
        for v, c in self.coeffs:
            if v == name:
                return c
        return Fraction(0)

    def negated(self) -> "LinearAtom":
        # not(e <= 0) is e > 0, collapsed to -e <= 0
        return LinearAtom(
            tuple((v, -c) for v, c in self.coeffs), -self.constant
        )

    def substitute(self, name: str, value: Fraction):
        """Fold `name := value`; returns a LinearAtom, or bool if ground."""
        c = self.coeff_of(name)
        if not c:
            return self
        rest = tuple((v, k) for v, k in self.coeffs if v != name)
        const = self.constant + c * value
        if not rest:
            return const <= 0
        return LinearAtom(rest, const)

    def evaluate(self, assignment: Mapping[str, Fraction]) -> bool:
        total = self.constant
        for v, c in self.coeffs:
            total += c * assignment[v]
        return total <= 0

    def sort_key(self):
        return (self.coeffs, self.constant)

    def __str__(self) -> str:
        parts = [f"{c}*{v}" for v, c in self.coeffs]
        return " + ".join(parts) + f" + {self.constant} <= 0"


@dataclass(frozen=True)
class Literal:
    """Either a linear atom (never negated) or a boolean variable +/- flag."""

    atom: Optional[LinearAtom] = None
    bool_var: Optional[str] = None
    negated: bool = False

    @staticmethod
    def of_atom(atom: LinearAtom) -> "Literal":
        return Literal(atom=atom)

    @staticmethod
    def of_bool(name: str, negated: bool = False) -> "Literal":
        return Literal(bool_var=name, negated=negated)

    @property
    def is_bool(self) -> bool:
        return self.bool_var is not None

    def variables(self) -> Tuple[str, ...]:
        if self.bool_var is not None:
            return (self.bool_var,)
        return self.atom.variables()

    def complement(self) -> "Literal":
        if self.bool_var is not None:
            return Literal(bool_var=self.bool_var, negated=not self.negated)
        return Literal(atom=self.atom.negated())

    def sort_key(self):
        if self.bool_var is not None:
            return (0, self.bool_var, self.negated)
        return (1, self.atom.sort_key())

    def __str__(self) -> str:
        if self.bool_var is not None:
            return f"!{self.bool_var}" if self.negated else self.bool_var
        return str(self.atom)


Clause = Tuple[Literal, ...]


def make_clause(literals: Iterable[Literal]) -> Clause:
    return tuple(sorted(set(literals), key=Literal.sort_key))


def clause_vars(clause: Clause) -> frozenset:
    out = set()
    for lit in clause:
        out.update(lit.variables())
    return frozenset(out)


def _clause_key(clause: Clause):
    return tuple(lit.sort_key() for lit in clause)


class Theory:
    """Immutable CNF over a variable table; clauses kept canonically sorted."""

    __slots__ = ("variables", "clauses", "_signature")

    def __init__(self, variables: Mapping[str, Var], clauses: Iterable[Clause]):
        self.variables: Dict[str, Var] = dict(variables)
        canon = sorted({make_clause(c) for c in clauses}, key=_clause_key)
        self.clauses: Tuple[Clause, ...] = tuple(canon)
        for clause in self.clauses:
            for name in clause_vars(clause):
                if name not in self.variables:
                    raise TheoryError(f"clause mentions undeclared variable {name}")
        self._signature = None

    @property
    def is_unsat(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)

    def real_vars(self) -> Tuple[str, ...]:
        return tuple(n for n, v in sorted(self.variables.items()) if v.kind == REAL)

    def bool_vars(self) -> Tuple[str, ...]:
        return tuple(n for n, v in sorted(self.variables.items()) if v.kind == BOOL)

    def atoms(self) -> Tuple[LinearAtom, ...]:
        seen = {}
        for clause in self.clauses:
            for lit in clause:
                if lit.atom is not None:
                    seen[lit.atom] = None
        return tuple(sorted(seen, key=LinearAtom.sort_key))

    def signature(self):
        """Canonical hashable form; used for caching and equality."""
        if self._signature is None:
            vars_sig = tuple(
                (v.name, v.kind, v.lo, v.hi) for v in
                sorted(self.variables.values(), key=lambda v: v.name)
            )
            self._signature = (vars_sig, self.clauses)
        return self._signature

    def __eq__(self, other) -> bool:
        return isinstance(other, Theory) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    def evaluate(self, assignment: Mapping) -> bool:
        """Direct CNF evaluation at a full assignment (bools and rationals)."""
        for clause in self.clauses:
            ok = False
            for lit in clause:
                if lit.bool_var is not None:
                    val = bool(assignment[lit.bool_var]) != lit.negated
                else:
                    val = lit.atom.evaluate(assignment)
                if val:
                    ok = True
                    break
            if not ok:
                return False
        return True

    def __repr__(self) -> str:
        return f"Theory({len(self.variables)} vars, {len(self.clauses)} clauses)"


def substitute(theory: Theory, name: str, value) -> Theory:
    """Instantiate real variable `name := value` and simplify.

    Satisfied literals delete their clause; falsified literals drop out of
    theirs; a clause left empty marks the result unsatisfiable.  The
    variable disappears from the table.
    """
    value = as_rational(value)
    var = theory.variables.get(name)
    if var is None or var.kind != REAL:
        raise TheoryError(f"cannot substitute non-real variable {name!r}")
    new_clauses = []
    for clause in theory.clauses:
        kept = []
        satisfied = False
        for lit in clause:
            if lit.atom is None or name not in lit.atom.variables():
                kept.append(lit)
                continue
            res = lit.atom.substitute(name, value)
            if res is True:
                satisfied = True
                break
            if res is False:
                continue
            kept.append(Literal.of_atom(res))
        if not satisfied:
            new_clauses.append(tuple(kept))
    new_vars = {n: v for n, v in theory.variables.items() if n != name}
    return Theory(new_vars, new_clauses)


def assign_boolean(theory: Theory, name: str, value: bool) -> Theory:
    """Condition the theory on a boolean variable's truth value."""
    var = theory.variables.get(name)
    if var is None or var.kind != BOOL:
        raise TheoryError(f"cannot assign non-boolean variable {name!r}")
    new_clauses = []
    for clause in theory.clauses:
        kept = []
        satisfied = False
        for lit in clause:
            if lit.bool_var != name:
                kept.append(lit)
                continue
            if (not lit.negated) == value:
                satisfied = True
                break
        if not satisfied:
            new_clauses.append(tuple(kept))
    new_vars = {n: v for n, v in theory.variables.items() if n != name}
    return Theory(new_vars, new_clauses)


def restrict(theory: Theory, names: Iterable[str]) -> Theory:
    """Project onto a variable subset; clauses must not straddle the cut."""
    keep = set(names)
    clauses = []
    for clause in theory.clauses:
        cv = clause_vars(clause)
        if cv <= keep:
            clauses.append(clause)
        elif cv & keep:
            raise TheoryError("clause straddles the restriction boundary")
    return Theory({n: v for n, v in theory.variables.items() if n in keep}, clauses)


def conjoin(theory: Theory, clauses: Iterable[Clause]) -> Theory:
    return Theory(theory.variables, list(theory.clauses) + list(clauses))


def unary_bound_clauses(var: Var) -> Tuple[Clause, Clause]:
    """The two unary clauses materializing a real variable's domain."""
    lo_atom = LinearAtom.of({var.name: Fraction(-1)}, var.lo)   # lo <= v
    hi_atom = LinearAtom.of({var.name: Fraction(1)}, -var.hi)   # v <= hi
    return (
        make_clause([Literal.of_atom(lo_atom)]),
        make_clause([Literal.of_atom(hi_atom)]),
    )


@dataclass(frozen=True)
class Monomial:
    """coeff * prod(var ** exp); coeff > 0, exponents over one variable."""

    coeff: Fraction
    powers: Tuple[Tuple[str, int], ...]  # sorted, exponents >= 1

    @staticmethod
    def of(coeff, powers: Mapping[str, int]) -> "Monomial":
        coeff = as_rational(coeff)
        if coeff <= 0:
            raise TheoryError(f"monomial coefficient must be positive, got {coeff}")
        items = tuple(sorted((v, e) for v, e in powers.items() if e > 0))
        return Monomial(coeff, items)

    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.powers)

    def degree(self) -> int:
        return sum(e for _, e in self.powers)

    def evaluate(self, assignment: Mapping[str, Fraction]) -> Fraction:
        out = self.coeff
        for v, e in self.powers:
            out *= assignment[v] ** e
        return out


@dataclass(frozen=True)
class WeightEntry:
    """Per-literal weight: a guard of one or two literals over a single
    variable, and a polynomial (sum of monomials) in that variable."""

    guard: Tuple[Literal, ...]
    monomials: Tuple[Monomial, ...]

    def guard_var(self) -> str:
        names = {v for lit in self.guard for v in lit.variables()}
        if len(names) != 1:
            raise TheoryError(f"weight guard must be univariate, got {sorted(names)}")
        return next(iter(names))

    def guard_satisfied(self, assignment: Mapping) -> bool:
        for lit in self.guard:
            if lit.bool_var is not None:
                if bool(assignment[lit.bool_var]) == lit.negated:
                    return False
            elif not lit.atom.evaluate(assignment):
                return False
        return True

    def evaluate_poly(self, assignment: Mapping) -> Fraction:
        return sum((m.evaluate(assignment) for m in self.monomials), Fraction(0))

    def is_constant(self) -> bool:
        return all(not m.powers for m in self.monomials)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise TheoryError("weight is not constant")
        return sum((m.coeff for m in self.monomials), Fraction(0))


@dataclass(frozen=True)
class Problem:
    theory: Theory
    weights: Tuple[WeightEntry, ...] = ()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Problem)
            and self.theory == other.theory
            and sorted(self.weights, key=repr) == sorted(other.weights, key=repr)
        )

    def __hash__(self):
        return hash((self.theory, frozenset(self.weights)))


def weight_value(weights: Sequence[WeightEntry], assignment: Mapping) -> Fraction:
    """Product of satisfied entries' polynomials at a full assignment."""
    total = Fraction(1)
    for entry in weights:
        if entry.guard_satisfied(assignment):
            total *= entry.evaluate_poly(assignment)
    return total


def univariate_feasible_set(theory: Theory):
    """Exact feasible set of a one-real-variable CNF as sorted intervals.

    Each clause over a single variable is a union of at most two rays
    (every literal solves to x <= a or x >= b); the clause solution is
    intersected across clauses, seeded with the variable's declared box.
    Returns a list of disjoint closed (lo, hi) pairs; [] means UNSAT.
    Zero-width intervals are kept: they are part of the exact set even
    though they carry no measure.
    """
    reals = theory.real_vars()
    if len(reals) != 1:
        raise TheoryError(f"expected exactly one real variable, got {reals}")
    if theory.bool_vars():
        raise TheoryError("boolean variables not allowed here")
    name = reals[0]
    var = theory.variables[name]
    acc = [(var.lo, var.hi)]
    for clause in theory.clauses:
        if not clause:
            return []
        # union of rays: x <= best_upper  or  x >= best_lower
        best_upper = None
        best_lower = None
        for lit in clause:
            c = lit.atom.coeff_of(name)
            bound = -lit.atom.constant / c
            if c > 0:  # x <= bound
                if best_upper is None or bound > best_upper:
                    best_upper = bound
            else:  # x >= bound
                if best_lower is None or bound < best_lower:
                    best_lower = bound
        if (
            best_upper is not None
            and best_lower is not None
            and best_lower <= best_upper
        ):
            continue  # clause covers the whole line
        solution = []
        if best_upper is not None:
            solution.append((var.lo, min(best_upper, var.hi)))
        if best_lower is not None:
            solution.append((max(best_lower, var.lo), var.hi))
        solution = kernels.normalize_union(solution)
        acc = kernels.intersect_unions(acc, solution)
        if not acc:
            return []
    return acc
