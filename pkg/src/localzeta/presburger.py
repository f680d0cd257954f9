"""Presburger formulas, quantifier elimination, and symbolic summation.

The pipeline: parse a formula over integer variables, eliminate quantifiers
Cooper-style, decompose the solution set into disjoint cells, and sum the
weight q^(s*A + B) over each cell variable by variable.  Every variable is
removed either as a finite arithmetic progression (telescoping, valid as an
algebraic identity regardless of convergence) or as a one-sided geometric
ray, which must contract for large s; sigma0 records the smallest integer s
at which every ray contracts.  The result is an exact BivariateRational in
(X, Y) = (q, q^-s) whose expansion matches brute-force partial sums.

Divergence is always an error, never a silent wrong value.  The engine
refuses runaway case splits via the modulus budget and refuses formulas
with more than four free variables.
"""

from __future__ import annotations

import functools
import itertools
import math
from fractions import Fraction
from typing import NamedTuple

from .laurent import Laurent
from .zeta import BivariateRational, ZetaSeries

VAR_BUDGET = 4
MODULUS_BUDGET = 64

RESERVED = {"and", "or", "not", "exists", "forall", "mod", "q", "s"}


class PresburgerError(ValueError):
    pass


class Divergent(PresburgerError):
    """The sum has a non-contracting recession ray (reported in args)."""


class VariableBudget(PresburgerError):
    pass


class ModulusBudget(PresburgerError):
    pass


# ----------------------------------------------------------------------
# linear forms


class LinForm:
    """Integer/rational linear combination of variables plus a constant.

    Parsed atoms always carry integer coefficients; rational coefficients
    appear only inside the summation engine, where the forms stay
    integer-valued on their cells (floors of bounds along fixed residues).
    """

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=0):
        self.coeffs = {}
        for v, c in (coeffs or {}).items():
            c = Fraction(c)
            if c:
                self.coeffs[v] = c
        self.const = Fraction(const)

    @classmethod
    def of(cls, var):
        return cls({var: 1})

    @classmethod
    def constant(cls, c):
        return cls({}, c)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return LinForm(self.coeffs, self.const + other)
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, Fraction(0)) + c
        return LinForm(out, self.const + other.const)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return LinForm(self.coeffs, self.const - other)
        return self + other.scale(-1)

    def scale(self, k):
        k = Fraction(k)
        return LinForm(
            {v: c * k for v, c in self.coeffs.items()}, self.const * k
        )

    def coeff(self, var):
        return self.coeffs.get(var, Fraction(0))

    def drop(self, var):
        rest = {v: c for v, c in self.coeffs.items() if v != var}
        return LinForm(rest, self.const)

    def substitute(self, var, form: "LinForm"):
        c = self.coeff(var)
        if not c:
            return self
        return self.drop(var) + form.scale(c)

    def vars(self):
        return frozenset(self.coeffs)

    def is_ground(self):
        return not self.coeffs

    def evaluate(self, env):
        total = self.const
        for v, c in self.coeffs.items():
            total += c * env[v]
        return total

    def key(self):
        return (tuple(sorted(self.coeffs.items())), self.const)

    def __eq__(self, other):
        return isinstance(other, LinForm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = [f"{c}*{v}" for v, c in sorted(self.coeffs.items())]
        parts.append(str(self.const))
        return " + ".join(parts)


# ----------------------------------------------------------------------
# formulas

# AST nodes: ("le", L) for L <= 0; ("cong"|"ncong", L, n) for L = / != 0
# mod n; ("true",), ("false",); ("and"|"or", a, b); ("not", a);
# ("exists"|"forall", var, a).


def free_vars(ast):
    op = ast[0]
    if op == "le":
        return ast[1].vars()
    if op in ("cong", "ncong"):
        return ast[1].vars()
    if op in ("true", "false"):
        return frozenset()
    if op == "not":
        return free_vars(ast[1])
    if op in ("and", "or"):
        return free_vars(ast[1]) | free_vars(ast[2])
    if op in ("exists", "forall"):
        return free_vars(ast[2]) - {ast[1]}
    raise PresburgerError(f"unknown node {op!r}")


def is_quantifier_free(ast):
    op = ast[0]
    if op in ("exists", "forall"):
        return False
    if op == "not":
        return is_quantifier_free(ast[1])
    if op in ("and", "or"):
        return is_quantifier_free(ast[1]) and is_quantifier_free(ast[2])
    return True


class PresburgerFormula:
    __slots__ = ("ast", "text")

    def __init__(self, ast, text=""):
        self.ast = ast
        self.text = text

    @property
    def free(self):
        return tuple(sorted(free_vars(self.ast)))

    def is_quantifier_free(self):
        return is_quantifier_free(self.ast)

    def __repr__(self):
        return f"PresburgerFormula({self.text or self.ast!r})"


# ----------------------------------------------------------------------
# parsing


def _tokenize_formula(text):
    tokens = []
    i = 0
    two = {"<=", ">=", "!="}
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif text[i : i + 2] in two:
            tokens.append((text[i : i + 2], None, i))
            i += 2
        elif c in "+-*()<>=^":
            tokens.append((c, None, i))
            i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in ("and", "or", "not", "exists", "forall", "mod"):
                tokens.append((word, None, i))
            else:
                tokens.append(("ident", word, i))
            i = j
        else:
            raise PresburgerError(f"bad character {c!r} at position {i}")
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent for formulas and linear terms, with positions."""

    def __init__(self, text, allow_s=False):
        self.text = text
        self.tokens = _tokenize_formula(text)
        self.pos = 0
        self.allow_s = allow_s

    def peek(self):
        return self.tokens[self.pos][0]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise PresburgerError(
                f"expected {kind}, found {tok[0]} at position {tok[2]}"
            )
        self.pos += 1
        return tok

    def fail(self, msg):
        tok = self.tokens[self.pos]
        raise PresburgerError(f"{msg} at position {tok[2]}")

    # terms: integer linear combinations; products need a literal factor

    def term(self):
        node = self.product()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.product()
            node = node + rhs if op == "+" else node - rhs
        return node

    def product(self):
        factors = [self.unary_factor()]
        while self.peek() == "*":
            self.take("*")
            factors.append(self.unary_factor())
        out = LinForm.constant(1)
        for f in factors:
            out = self._lin_mul(out, f)
        return out

    def _lin_mul(self, a, b):
        if a.is_ground():
            return b.scale(a.const)
        if b.is_ground():
            return a.scale(b.const)
        if self.allow_s:
            # weight exponents may multiply one plain variable by s
            pa, pb = _pure_var(a), _pure_var(b)
            if pa and pb:
                (va, ca), (vb, cb) = pa, pb
                if vb == "s" and va != "s" and not va.endswith("*s"):
                    return LinForm({va + "*s": ca * cb})
                if va == "s" and vb != "s" and not vb.endswith("*s"):
                    return LinForm({vb + "*s": ca * cb})
        self.fail("nonlinear product")

    def unary_factor(self):
        if self.peek() == "-":
            self.take("-")
            return self.unary_factor().scale(-1)
        if self.peek() == "+":
            self.take("+")
            return self.unary_factor()
        if self.peek() == "int":
            return LinForm.constant(self.take()[1])
        if self.peek() == "ident":
            tok = self.take()
            name = tok[1]
            if name in RESERVED and not (self.allow_s and name == "s"):
                raise PresburgerError(
                    f"reserved word {name!r} at position {tok[2]}"
                )
            return LinForm.of(name)
        if self.peek() == "(":
            self.take("(")
            node = self.term()
            self.take(")")
            return node
        self.fail("expected a term")

    # formulas

    def formula(self):
        node = self.conjunct()
        while self.peek() == "or":
            self.take("or")
            node = ("or", node, self.conjunct())
        return node

    def conjunct(self):
        node = self.unary_formula()
        while self.peek() == "and":
            self.take("and")
            node = ("and", node, self.unary_formula())
        return node

    def unary_formula(self):
        k = self.peek()
        if k == "not":
            self.take("not")
            return ("not", self.unary_formula())
        if k in ("exists", "forall"):
            self.take(k)
            tok = self.take("ident")
            if tok[1] in RESERVED:
                raise PresburgerError(
                    f"reserved word {tok[1]!r} at position {tok[2]}"
                )
            return (k, tok[1], self.unary_formula())
        if k == "(":
            # parenthesized formula or a parenthesized term in an atom;
            # backtrack if the inside fails to be a formula
            saved = self.pos
            self.take("(")
            try:
                inner = self.formula()
                self.take(")")
            except PresburgerError:
                self.pos = saved
                return self.atom()
            if self.peek() in ("<=", "<", ">=", ">", "=", "!="):
                self.pos = saved
                return self.atom()
            return inner
        return self.atom()

    def atom(self):
        lhs = self.term()
        rel = self.peek()
        if rel not in ("<=", "<", ">=", ">", "=", "!="):
            self.fail(f"expected a relation, found {rel}")
        self.take()
        rhs = self.term()
        if self.peek() == "mod":
            self.take("mod")
            tok = self.take("int")
            n = tok[1]
            if n < 1:
                raise PresburgerError(
                    f"modulus must be positive at position {tok[2]}"
                )
            if rel == "=":
                return ("cong", lhs - rhs, n)
            if rel == "!=":
                return ("ncong", lhs - rhs, n)
            raise PresburgerError(
                f"'mod' requires = or != at position {tok[2]}"
            )
        if rel == "<=":
            return ("le", lhs - rhs)
        if rel == "<":
            return ("le", lhs - rhs + 1)
        if rel == ">=":
            return ("le", rhs - lhs)
        if rel == ">":
            return ("le", rhs - lhs + 1)
        if rel == "=":
            return ("and", ("le", lhs - rhs), ("le", rhs - lhs))
        return ("or", ("le", lhs - rhs + 1), ("le", rhs - lhs + 1))


def _pure_var(L: LinForm):
    if L.const == 0 and len(L.coeffs) == 1:
        ((v, c),) = L.coeffs.items()
        return (v, c)
    return None


def parse(text) -> PresburgerFormula:
    """Formula grammar: linear atoms with <= < = != >= >, optional
    'mod n' on (in)equations, 'and or not exists forall', parentheses."""
    if isinstance(text, PresburgerFormula):
        return text
    p = _Parser(text)
    ast = p.formula()
    p.take("end")
    return PresburgerFormula(ast, text)


def parse_weight(text):
    """Weight grammar: q^( E ) with E integer-linear in the variables and
    in s-products like -n*s; returns (A, B) with exponent = s*A + B."""
    p = _Parser(text, allow_s=True)
    tok = p.take("ident")
    if tok[1] != "q":
        raise PresburgerError(f"weight must start with q at {tok[2]}")
    p.take("^")
    p.take("(")
    expo = p.term()
    p.take(")")
    p.take("end")
    A = {}
    B = {}
    for v, c in expo.coeffs.items():
        if c.denominator != 1:
            raise PresburgerError("weight coefficients must be integers")
        if v == "s":
            # a bare k*s term: constant coefficient on s
            A[""] = A.get("", 0) + c
        elif v.endswith("*s"):
            A[v[:-2]] = c
        else:
            B[v] = c
    if expo.const.denominator != 1:
        raise PresburgerError("weight constant must be an integer")
    consts = A.pop("", Fraction(0))
    return LinForm(A, consts), LinForm(B, expo.const)


# ----------------------------------------------------------------------
# evaluation and simplification


def eval_formula(ast, env):
    """Ground truth for quantifier-free formulas at an integer point."""
    op = ast[0]
    if op == "le":
        return ast[1].evaluate(env) <= 0
    if op == "cong":
        val = ast[1].evaluate(env)
        if val.denominator != 1:
            raise PresburgerError("congruence on a non-integer value")
        return val.numerator % ast[2] == 0
    if op == "ncong":
        val = ast[1].evaluate(env)
        if val.denominator != 1:
            raise PresburgerError("congruence on a non-integer value")
        return val.numerator % ast[2] != 0
    if op == "true":
        return True
    if op == "false":
        return False
    if op == "not":
        return not eval_formula(ast[1], env)
    if op == "and":
        return eval_formula(ast[1], env) and eval_formula(ast[2], env)
    if op == "or":
        return eval_formula(ast[1], env) or eval_formula(ast[2], env)
    raise PresburgerError(f"cannot evaluate {op!r} without a range")


def _ground_literal(ast):
    """Evaluate a variable-free literal to a true/false node, else None."""
    op = ast[0]
    if op == "le" and ast[1].is_ground():
        return ("true",) if ast[1].const <= 0 else ("false",)
    if op in ("cong", "ncong") and ast[1].is_ground():
        val = ast[1].const
        hit = val.denominator == 1 and val.numerator % ast[2] == 0
        if op == "ncong":
            hit = not hit
        return ("true",) if hit else ("false",)
    return None


def simplify(ast):
    op = ast[0]
    if op in ("le", "cong", "ncong"):
        return _ground_literal(ast) or ast
    if op in ("true", "false"):
        return ast
    if op == "not":
        a = simplify(ast[1])
        if a[0] == "true":
            return ("false",)
        if a[0] == "false":
            return ("true",)
        return ("not", a)
    if op in ("and", "or"):
        a = simplify(ast[1])
        b = simplify(ast[2])
        zero, one = ("false",), ("true",)
        if op == "or":
            zero, one = one, zero
        if a == zero or b == zero:
            return zero
        if a == one:
            return b
        if b == one:
            return a
        return (op, a, b)
    if op in ("exists", "forall"):
        body = simplify(ast[2])
        if body[0] in ("true", "false"):
            return body
        return (op, ast[1], body)
    raise PresburgerError(f"unknown node {op!r}")


def nnf(ast, neg=False):
    """Negation normal form; all negations are folded into literals."""
    op = ast[0]
    if op == "le":
        # not (t <= 0) is 1 - t <= 0
        return ("le", ast[1].scale(-1) + 1) if neg else ast
    if op == "cong":
        return ("ncong", ast[1], ast[2]) if neg else ast
    if op == "ncong":
        return ("cong", ast[1], ast[2]) if neg else ast
    if op == "true":
        return ("false",) if neg else ast
    if op == "false":
        return ("true",) if neg else ast
    if op == "not":
        return nnf(ast[1], not neg)
    if op in ("and", "or"):
        flip = {"and": "or", "or": "and"}
        return (
            flip[op] if neg else op,
            nnf(ast[1], neg),
            nnf(ast[2], neg),
        )
    if op in ("exists", "forall"):
        flip = {"exists": "forall", "forall": "exists"}
        return (flip[op] if neg else op, ast[1], nnf(ast[2], neg))
    raise PresburgerError(f"unknown node {op!r}")


def _subst(ast, var, form):
    op = ast[0]
    if op == "le":
        return ("le", ast[1].substitute(var, form))
    if op in ("cong", "ncong"):
        return (op, ast[1].substitute(var, form), ast[2])
    if op in ("true", "false"):
        return ast
    if op in ("and", "or"):
        return (op, _subst(ast[1], var, form), _subst(ast[2], var, form))
    raise PresburgerError("substitution needs a quantifier-free NNF")


# ----------------------------------------------------------------------
# Cooper quantifier elimination


def _scale_for(ast, var, lam):
    """Rewrite literals so the variable's coefficient is exactly +-1,
    under the change of variable var' = lam * var."""
    op = ast[0]
    if op == "le":
        c = ast[1].coeff(var)
        if not c:
            return ast
        k = Fraction(lam, abs(c.numerator))
        scaled = ast[1].scale(k)  # positive scaling keeps <= direction
        return ("le", scaled.drop(var) + LinForm.of(var).scale(
            1 if c > 0 else -1
        ))
    if op in ("cong", "ncong"):
        c = ast[1].coeff(var)
        if not c:
            return ast
        k = lam // abs(c.numerator)
        scaled = ast[1].scale(k)
        return (
            op,
            scaled.drop(var) + LinForm.of(var).scale(1 if c > 0 else -1),
            ast[2] * k,
        )
    if op in ("true", "false"):
        return ast
    if op in ("and", "or"):
        return (op, _scale_for(ast[1], var, lam), _scale_for(ast[2], var, lam))
    raise PresburgerError("Cooper needs quantifier-free NNF input")


def _minus_infinity(ast, var):
    """Limit of the formula as var -> -inf: lower bounds go false, upper
    bounds go true, congruences survive."""
    op = ast[0]
    if op == "le":
        c = ast[1].coeff(var)
        if not c:
            return ast
        # c > 0 is an upper bound var + t <= 0, satisfied at -inf
        return ("true",) if c > 0 else ("false",)
    if op in ("cong", "ncong", "true", "false"):
        return ast
    if op in ("and", "or"):
        return (op, _minus_infinity(ast[1], var),
                _minus_infinity(ast[2], var))
    raise PresburgerError("Cooper needs quantifier-free NNF input")


def _collect_coeffs(ast, var, lcms, moduli, lowers):
    op = ast[0]
    if op == "le":
        c = ast[1].coeff(var)
        if c:
            if c.denominator != 1:
                raise PresburgerError("rational coefficient in QE input")
            lcms.append(abs(c.numerator))
            if c < 0:
                # -var' + t <= 0, i.e. t <= var': lower bound term t
                lowers.append(True)
    elif op in ("cong", "ncong"):
        c = ast[1].coeff(var)
        if c:
            if c.denominator != 1:
                raise PresburgerError("rational coefficient in QE input")
            lcms.append(abs(c.numerator))
            moduli.append(ast[2] * 1)
    elif op in ("and", "or"):
        _collect_coeffs(ast[1], var, lcms, moduli, lowers)
        _collect_coeffs(ast[2], var, lcms, moduli, lowers)


def _lower_terms(ast, var, out):
    op = ast[0]
    if op == "le":
        c = ast[1].coeff(var)
        if c and c < 0:
            # -var + t <= 0: bound term is t, shifted to strict form t - 1
            out[(ast[1].drop(var) - 1).key()] = ast[1].drop(var) - 1
    elif op in ("and", "or"):
        _lower_terms(ast[1], var, out)
        _lower_terms(ast[2], var, out)


def _scaled_moduli(ast, var, out):
    op = ast[0]
    if op in ("cong", "ncong"):
        if ast[1].coeff(var):
            out.append(ast[2])
    elif op in ("and", "or"):
        _scaled_moduli(ast[1], var, out)
        _scaled_moduli(ast[2], var, out)


def _cooper(var, ast):
    """Eliminate exists var from a quantifier-free NNF formula."""
    ast = simplify(ast)
    if var not in free_vars(ast):
        return ast
    lcms, moduli, lowers = [], [], []
    _collect_coeffs(ast, var, lcms, moduli, lowers)
    lam = math.lcm(*lcms) if lcms else 1
    scaled = _scale_for(ast, var, lam)
    if lam > 1:
        scaled = ("and", scaled, ("cong", LinForm.of(var), lam))
    mods = []
    _scaled_moduli(scaled, var, mods)
    D = math.lcm(*mods) if mods else 1
    bterms = {}
    _lower_terms(scaled, var, bterms)
    pieces = []
    for j in range(1, D + 1):
        limit = _subst(
            _minus_infinity(scaled, var), var, LinForm.constant(j)
        )
        pieces.append(simplify(limit))
        for b in bterms.values():
            pieces.append(simplify(_subst(scaled, var, b + j)))
    out = ("false",)
    for piece in pieces:
        if piece[0] == "true":
            return ("true",)
        if piece[0] == "false":
            continue
        out = piece if out[0] == "false" else ("or", out, piece)
    return out


def eliminate_quantifiers(formula) -> PresburgerFormula:
    """Equivalent quantifier-free formula over the same free variables."""
    formula = parse(formula)

    def rec(ast):
        op = ast[0]
        if op in ("le", "cong", "ncong", "true", "false"):
            return ast
        if op == "not":
            return ("not", rec(ast[1]))
        if op in ("and", "or"):
            return (op, rec(ast[1]), rec(ast[2]))
        if op == "exists":
            return _cooper(ast[1], nnf(rec(ast[2])))
        if op == "forall":
            return ("not", _cooper(ast[1], nnf(rec(ast[2]), neg=True)))
        raise PresburgerError(f"unknown node {op!r}")

    out = simplify(nnf(rec(formula.ast)))
    return PresburgerFormula(out, f"qf({formula.text})")


# ----------------------------------------------------------------------
# disjoint cells


def _negate_literal(lit):
    op = lit[0]
    if op == "le":
        return ("le", lit[1].scale(-1) + 1)
    if op == "cong":
        return ("ncong", lit[1], lit[2])
    if op == "ncong":
        return ("cong", lit[1], lit[2])
    raise PresburgerError(f"not a literal: {op!r}")


def cells(ast):
    """Disjoint conjunctions of literals covering exactly the formula."""
    op = ast[0]
    if op == "true":
        return [[]]
    if op == "false":
        return []
    if op in ("le", "cong", "ncong"):
        g = _ground_literal(ast)
        if g is not None:
            return [[]] if g[0] == "true" else []
        return [[ast]]
    if op == "not":
        return cocells(ast[1])
    if op == "and":
        return [a + b for a in cells(ast[1]) for b in cells(ast[2])]
    if op == "or":
        first = cells(ast[1])
        rest = [a + b for a in cocells(ast[1]) for b in cells(ast[2])]
        return first + rest
    raise PresburgerError("cells need a quantifier-free formula")


def cocells(ast):
    """Disjoint cells of the complement."""
    op = ast[0]
    if op == "true":
        return []
    if op == "false":
        return [[]]
    if op in ("le", "cong", "ncong"):
        neg = _negate_literal(ast)
        g = _ground_literal(neg)
        if g is not None:
            return [[]] if g[0] == "true" else []
        return [[neg]]
    if op == "not":
        return cells(ast[1])
    if op == "and":
        first = cocells(ast[1])
        rest = [a + b for a in cells(ast[1]) for b in cocells(ast[2])]
        return first + rest
    if op == "or":
        return [a + b for a in cocells(ast[1]) for b in cocells(ast[2])]
    raise PresburgerError("cells need a quantifier-free formula")


# ----------------------------------------------------------------------
# polynomials in several variables (multipliers from telescoping)


class Poly:
    """Multivariate polynomial with Fraction coefficients, for the
    polynomial prefactors produced by summing v^k over progressions."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[mono] = c

    @classmethod
    def const(cls, c):
        return cls({(): Fraction(c)})

    @classmethod
    def from_linform(cls, L: LinForm):
        terms = {((v, 1),): c for v, c in L.coeffs.items()}
        terms[()] = L.const
        return cls(terms)

    def __add__(self, other):
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return Poly(out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly({m: c * other for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                exps = dict(m1)
                for v, e in m2:
                    exps[v] = exps.get(v, 0) + e
                mono = tuple(sorted(exps.items()))
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return Poly(out)

    def __pow__(self, k):
        acc = Poly.const(1)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def substitute(self, var, L: LinForm):
        repl = Poly.from_linform(L)
        out = Poly()
        for mono, c in self.terms.items():
            k = 0
            rest = []
            for v, e in mono:
                if v == var:
                    k = e
                else:
                    rest.append((v, e))
            piece = Poly({tuple(rest): c})
            out = out + piece * (repl**k if k else Poly.const(1))
        return out

    def split(self, var):
        """{power of var: polynomial in the other variables}."""
        out = {}
        for mono, c in self.terms.items():
            k = 0
            rest = []
            for v, e in mono:
                if v == var:
                    k = e
                else:
                    rest.append((v, e))
            bucket = out.setdefault(k, Poly())
            bucket.terms[tuple(rest)] = (
                bucket.terms.get(tuple(rest), Fraction(0)) + c
            )
        return {k: Poly(p.terms) for k, p in out.items()}

    def is_ground(self):
        return all(m == () for m in self.terms)

    def ground_value(self):
        if not self.terms:
            return Fraction(0)
        if not self.is_ground():
            raise PresburgerError("polynomial is not ground")
        return self.terms[()]

    def vars(self):
        out = set()
        for mono in self.terms:
            out.update(v for v, _ in mono)
        return frozenset(out)

    def __repr__(self):
        return f"Poly({self.terms})"


@functools.lru_cache(maxsize=None)
def _stirling2(k, j):
    if k == j == 0:
        return 1
    if k == 0 or j == 0:
        return 0
    return j * _stirling2(k - 1, j) + _stirling2(k - 1, j - 1)


def _geometric_moment(k, bx, by):
    """Sum over v >= 0 of v^k (X^bx Y^by)^v as a BivariateRational."""
    total = None
    for j in range(0, k + 1):
        c = _stirling2(k, j) * math.factorial(j)
        if not c:
            continue
        piece = BivariateRational(
            Laurent.monomial(c, (bx * j, by * j)), {(bx, by): j + 1}
        )
        total = piece if total is None else total + piece
    return total


def _faulhaber(k, H: LinForm) -> Poly:
    """Sum over v = 0..H of v^k as a polynomial in the variables of H."""
    hp1 = Poly.from_linform(H + 1)
    total = Poly()
    for j in range(0, k + 1):
        c = _stirling2(k, j)
        if not c:
            continue
        ff = Poly.const(1)
        for i in range(j + 1):
            ff = ff * (hp1 + Poly.const(-i))
        total = total + ff * Fraction(c, j + 1)
    return total


# ----------------------------------------------------------------------
# summation engine


class SummationSpec:
    """A formula plus the exponent decomposition q^(s*A + B)."""

    def __init__(self, formula, weight):
        self.formula = parse(formula)
        if isinstance(weight, str):
            self.A, self.B = parse_weight(weight)
            self.weight_text = weight
        else:
            self.A, self.B = weight
            self.weight_text = f"q^(s*({self.A}) + ({self.B}))"
        missing = (self.A.vars() | self.B.vars()) - set(
            free_vars(self.formula.ast)
        )
        if missing:
            raise PresburgerError(
                f"weight variables {sorted(missing)} not free in formula"
            )


class SumResult(NamedTuple):
    rational: BivariateRational
    sigma0: "int | None"
    cells: int


class _Term:
    __slots__ = ("pref", "mult", "xexp", "yexp", "lits")

    def __init__(self, pref, mult, xexp, yexp, lits):
        self.pref = pref
        self.mult = mult
        self.xexp = xexp
        self.yexp = yexp
        self.lits = lits


def _check_ground_lits(lits):
    """Split into (alive, remaining); alive=False kills the branch."""
    out = []
    for lit in lits:
        g = _ground_literal(lit)
        if g is None:
            out.append(lit)
        elif g[0] == "false":
            return False, []
    return True, out


def _int_lcm(values):
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out


def _residue_branches(term, z):
    """Substitute z = M0*u + r; returns (M0, list of (r, new Term))
    with congruences on z resolved into constraints on the rest."""
    zlits = [l for l in term.lits if z in l[1].vars()]
    rest = [l for l in term.lits if z not in l[1].vars()]
    denoms = [term.xexp.coeff(z).denominator, term.yexp.coeff(z).denominator]
    for lit in zlits:
        c = lit[1].coeff(z)
        if lit[0] == "le":
            denoms.append(c.denominator)
        else:
            denoms.append(c.denominator * lit[2])
    M0 = _int_lcm(denoms)
    if M0 > MODULUS_BUDGET:
        raise ModulusBudget(
            f"residue modulus {M0} for {z} exceeds {MODULUS_BUDGET}"
        )
    branches = []
    for r in range(M0):
        repl = LinForm({z: M0}, r)  # z = M0*z + r with z reused as u
        lits = list(rest)
        ok = True
        for lit in zlits:
            c = lit[1].coeff(z)
            moved = lit[1].substitute(z, repl)
            if lit[0] == "le":
                lits.append(("le", moved))
                continue
            # congruence: coefficient of u is c*M0, divisible by the
            # modulus, so the literal drops u entirely
            n = lit[2]
            cu = c * M0
            assert cu.denominator == 1 and cu.numerator % n == 0
            ground = moved.drop(z)
            glit = (lit[0], ground, n)
            g = _ground_literal(glit)
            if g is None:
                lits.append(glit)
            elif g[0] == "false":
                ok = False
                break
        if not ok:
            continue
        t = _Term(
            term.pref,
            term.mult.substitute(z, repl),
            term.xexp.substitute(z, repl),
            term.yexp.substitute(z, repl),
            lits,
        )
        branches.append(t)
    return M0, branches


def _unit_bounds(term, z):
    """Normalize every le-literal on z to z >= L or z <= U with exact
    integer-valued forms, branching on residues of the bound numerators.

    Returns a list of (lowers, uppers, residual literals) branches; the
    residue congruences land in the residual literals.
    """
    zlits = [l for l in term.lits if z in l[1].vars()]
    rest = [l for l in term.lits if z not in l[1].vars()]
    branches = [([], [], rest)]
    for lit in zlits:
        assert lit[0] == "le"
        c = lit[1].coeff(z)
        assert c.denominator == 1
        a = c.numerator
        body = lit[1].drop(z)
        # a*z + body <= 0
        if a > 0:
            N = body.scale(-1)  # z <= N / a
        else:
            N = body  # z >= N / (-a); note -a > 0
        A = abs(a)
        new = []
        for lowers, uppers, lits in branches:
            if A == 1:
                if a > 0:
                    new.append((lowers, uppers + [N], lits))
                else:
                    new.append((lowers + [N], uppers, lits))
                continue
            if A > MODULUS_BUDGET:
                raise ModulusBudget(
                    f"bound coefficient {A} for {z} exceeds {MODULUS_BUDGET}"
                )
            for srem in range(A):
                clit = ("cong", N - srem, A)
                g = _ground_literal(clit)
                if g is not None and g[0] == "false":
                    continue
                extra = [] if g is not None else [clit]
                base = N.scale(Fraction(1, A)) - Fraction(srem, A)
                if a > 0:
                    # z <= N/A; floor is (N - srem)/A on this residue
                    new.append((lowers, uppers + [base], lits + extra))
                else:
                    # z >= N/A; ceil is floor + (1 if srem else 0)
                    L = base + (1 if srem else 0)
                    new.append((lowers + [L], uppers, lits + extra))
        branches = new
    return branches


def _tight_branches(forms, sense):
    """Disjoint branches picking the tight bound among candidate forms.

    sense=+1 picks the maximum (tight lower bound), -1 the minimum.
    Yields (form, extra literals); first-minimal index tie-breaking.
    """
    if len(forms) == 1:
        yield forms[0], []
        return
    for k, tight in enumerate(forms):
        lits = []
        for i, other in enumerate(forms):
            if i == k:
                continue
            diff = (other - tight).scale(sense)
            # earlier candidates must lose strictly, later at most tie
            lits.append(("le", diff + 1 if i < k else diff))
        yield tight, lits


def _sum_progression(term, z, lower, upper, ctx):
    """Integrate variable z over its (possibly one-sided) range."""
    bxf = term.xexp.coeff(z)
    byf = term.yexp.coeff(z)
    assert bxf.denominator == 1 and byf.denominator == 1
    bx, by = bxf.numerator, byf.numerator
    xrest = term.xexp.drop(z)
    yrest = term.yexp.drop(z)

    def contracting(dx, dy):
        return dy > 0 or (dy == 0 and dx < 0)

    if lower is None and upper is None:
        raise Divergent(f"variable {z} is unbounded in both directions")

    if lower is not None and upper is not None:
        H = upper - lower
        exist = ("le", lower - upper)  # the range is nonempty
        if (bx, by) == (0, 0):
            # pure polynomial block: Faulhaber in H
            mult = term.mult.substitute(z, LinForm.of(z) + lower)
            out = Poly()
            for k, piece in mult.split(z).items():
                out = out + piece * _faulhaber(k, H)
            yield _Term(term.pref, out, xrest, yrest,
                        term.lits + [exist])
            return
        # choose the contracting direction for the telescope
        if contracting(bx, by):
            base, dx, dy = lower, bx, by
        else:
            base, dx, dy = upper, -bx, -by
        sub = LinForm.of(z).scale(1 if base is lower else -1) + base
        mult = term.mult.substitute(z, sub)
        x0 = xrest + base.scale(bx)
        y0 = yrest + base.scale(by)
        for k, piece in mult.split(z).items():
            # sum_{v=0}^{H} v^k r^v = G_k - r^(H+1) sum_j C(k,j)(H+1)^(k-j) G_j
            yield _Term(
                term.pref * _geometric_moment(k, dx, dy),
                piece, x0, y0, term.lits + [exist],
            )
            shift_x = x0 + (H + 1).scale(dx)
            shift_y = y0 + (H + 1).scale(dy)
            hp1 = Poly.from_linform(H + 1)
            for j in range(0, k + 1):
                coef = -math.comb(k, j)
                yield _Term(
                    term.pref * _geometric_moment(j, dx, dy) * coef,
                    piece * hp1 ** (k - j),
                    shift_x, shift_y, term.lits + [exist],
                )
        return

    # one-sided ray: must contract for large s
    if lower is not None:
        base, dx, dy = lower, bx, by
        sub = LinForm.of(z) + base
    else:
        base, dx, dy = upper, -bx, -by
        sub = base - LinForm.of(z)
    if not contracting(dx, dy):
        raise Divergent(
            f"ray {z} -> {'+' if lower is not None else '-'}infinity has "
            f"non-contracting weight X^{dx} Y^{dy}"
        )
    if dy > 0:
        ctx["sigma"].append(dx // dy + 1)
    mult = term.mult.substitute(z, sub)
    x0 = xrest + base.scale(bx)
    y0 = yrest + base.scale(by)
    for k, piece in mult.split(z).items():
        yield _Term(
            term.pref * _geometric_moment(k, dx, dy),
            piece, x0, y0, list(term.lits),
        )


def _eliminate_variable(term, z, ctx):
    alive, lits = _check_ground_lits(term.lits)
    if not alive:
        return
    term = _Term(term.pref, term.mult, term.xexp, term.yexp, lits)
    _, residues = _residue_branches(term, z)
    for rterm in residues:
        for lowers, uppers, rest in _unit_bounds(rterm, z):
            low_opts = (
                list(_tight_branches(lowers, +1)) if lowers else [(None, [])]
            )
            up_opts = (
                list(_tight_branches(uppers, -1)) if uppers else [(None, [])]
            )
            for L, llits in low_opts:
                for U, ulits in up_opts:
                    t = _Term(
                        rterm.pref, rterm.mult, rterm.xexp, rterm.yexp,
                        rest + llits + ulits,
                    )
                    alive2, lits2 = _check_ground_lits(t.lits)
                    if not alive2:
                        continue
                    t.lits = lits2
                    yield from _sum_progression(t, z, L, U, ctx)


def _variable_order(free, A, B):
    plain = sorted(v for v in free if v not in A.vars() and v not in B.vars())
    xvars = sorted(v for v in free if v in B.vars() and v not in A.vars())
    yvars = sorted(v for v in free if v in A.vars())
    return plain + xvars + yvars


def sum_rational(spec: SummationSpec) -> SumResult:
    """Exact rational form of sum over solutions of q^(s*A + B).

    Variables are eliminated innermost-first: unweighted, then q-weighted,
    then s-weighted.  Raises Divergent/VariableBudget/ModulusBudget; never
    returns a silently wrong value.
    """
    qf = (
        spec.formula
        if spec.formula.is_quantifier_free()
        else eliminate_quantifiers(spec.formula)
    )
    ast = simplify(nnf(qf.ast))
    free = sorted(free_vars(ast) | spec.A.vars() | spec.B.vars())
    if len(free) > VAR_BUDGET:
        raise VariableBudget(
            f"{len(free)} free variables exceed budget {VAR_BUDGET}"
        )
    _assert_moduli(ast)
    order = _variable_order(free, spec.A, spec.B)
    ctx = {"sigma": []}
    cell_list = cells(ast)
    terms = [
        _Term(
            BivariateRational.one(), Poly.const(1),
            spec.B, spec.A.scale(-1), list(cell),
        )
        for cell in cell_list
    ]
    for z in order:
        nxt = []
        for term in terms:
            nxt.extend(_eliminate_variable(term, z, ctx))
        terms = nxt
    total = BivariateRational(Laurent.const(0, 2))
    for term in terms:
        alive, lits = _check_ground_lits(term.lits)
        if not alive:
            continue
        if lits:
            raise PresburgerError(f"unresolved constraints {lits}")
        m = term.mult.ground_value()
        if not m:
            continue
        cx, cy = term.xexp, term.yexp
        if not (cx.is_ground() and cy.is_ground()):
            raise PresburgerError("unresolved weight exponents")
        if cx.const.denominator != 1 or cy.const.denominator != 1:
            raise PresburgerError("non-integer ground exponent")
        mono = Laurent.monomial(m, (cx.const.numerator, cy.const.numerator))
        total = total + term.pref * mono
    sigma0 = max(ctx["sigma"]) if ctx["sigma"] else None
    return SumResult(total, sigma0, len(cell_list))


def _assert_moduli(ast):
    op = ast[0]
    if op in ("cong", "ncong"):
        if ast[2] > MODULUS_BUDGET:
            raise ModulusBudget(
                f"modulus {ast[2]} exceeds budget {MODULUS_BUDGET}"
            )
    elif op in ("and", "or", "not"):
        for child in ast[1:]:
            _assert_moduli(child)


# ----------------------------------------------------------------------
# brute-force oracles


def brute_force_sum(spec: SummationSpec, q, s, box) -> Fraction:
    """Exact sum of q^(s*A + B) over solutions in [-box, box]^free."""
    qf = (
        spec.formula
        if spec.formula.is_quantifier_free()
        else eliminate_quantifiers(spec.formula)
    )
    ast = simplify(nnf(qf.ast))
    free = sorted(free_vars(ast) | spec.A.vars() | spec.B.vars())
    total = Fraction(0)
    for point in itertools.product(range(-box, box + 1), repeat=len(free)):
        env = dict(zip(free, point))
        if not eval_formula(ast, env):
            continue
        e = s * spec.A.evaluate(env) + spec.B.evaluate(env)
        assert e.denominator == 1
        total += Fraction(q) ** e.numerator
    return total


def brute_force_series(spec: SummationSpec, q, M, box) -> ZetaSeries:
    """Series coefficients by direct enumeration: coefficient m collects
    q^B over solutions with -A = m.  The box must cover every solution
    with -A < M; suitable for formulas whose sections are bounded."""
    qf = (
        spec.formula
        if spec.formula.is_quantifier_free()
        else eliminate_quantifiers(spec.formula)
    )
    ast = simplify(nnf(qf.ast))
    free = sorted(free_vars(ast) | spec.A.vars() | spec.B.vars())
    coeffs = [Fraction(0)] * M
    for point in itertools.product(range(-box, box + 1), repeat=len(free)):
        env = dict(zip(free, point))
        if not eval_formula(ast, env):
            continue
        level = -spec.A.evaluate(env)
        assert level.denominator == 1
        m = level.numerator
        if m < 0:
            raise PresburgerError("solution with negative Y-degree")
        if m < M:
            e = spec.B.evaluate(env)
            assert e.denominator == 1
            coeffs[m] += Fraction(q) ** e.numerator
    return ZetaSeries(q, coeffs, "enumerated")
