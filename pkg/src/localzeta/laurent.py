"""Multivariate Laurent polynomials with Fraction coefficients.

Terms are stored sparsely as ``{exponent tuple: Fraction}`` with zero
coefficients dropped, so equality is structural and exact.  Exponents may be
negative; the few routines that need honest polynomials (exact division)
shift into the polynomial range internally.
"""

from __future__ import annotations

from fractions import Fraction


class Laurent:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        out = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if not c:
                    continue
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong arity")
                out[e] = out.get(e, Fraction(0)) + c
                if not out[e]:
                    del out[e]
        self.terms = out

    # ------------------------------------------------------------------

    @classmethod
    def const(cls, c, nvars):
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def var(cls, i, nvars, power=1):
        e = [0] * nvars
        e[i] = power
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, c, exps):
        return cls(len(exps), {tuple(exps): Fraction(c)})

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return all(all(x == 0 for x in e) for e in self.terms)

    def const_value(self):
        if not self.terms:
            return Fraction(0)
        if not self.is_const():
            raise ValueError("not a constant")
        return next(iter(self.terms.values()))

    # ------------------------------------------------------------------

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.const(other, self.nvars)
        if other.nvars != self.nvars:
            raise ValueError("arity mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        r = Laurent(self.nvars)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = Laurent(self.nvars)
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) + (-self)

    def __mul__(self, other):
        other = self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        r = Laurent(self.nvars)
        r.terms = out
        return r

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            inv = self.monomial_inverse()
            if inv is None:
                raise ValueError("negative power of a non-monomial")
            return inv ** (-k)
        acc = Laurent.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def monomial_inverse(self):
        if len(self.terms) != 1:
            return None
        ((e, c),) = self.terms.items()
        return Laurent(self.nvars, {tuple(-x for x in e): 1 / c})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Laurent.const(other, self.nvars)
        return isinstance(other, Laurent) and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # ------------------------------------------------------------------

    def evaluate(self, point):
        """Exact value at a point of Fractions (nonzero where needed)."""
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def substitute(self, i, value):
        """Replace variable i by a Laurent of the same arity."""
        value = self._check(value)
        out = Laurent.const(0, self.nvars)
        for e, c in self.terms.items():
            rest = list(e)
            k = rest[i]
            rest[i] = 0
            out = out + Laurent.monomial(c, rest) * value**k
        return out

    def shift_extent(self):
        """Per-variable minimum exponent (0 if no terms)."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(
            min(e[i] for e in self.terms) for i in range(self.nvars)
        )

    def divexact(self, other):
        """Exact quotient self / other, or None if it does not divide."""
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError
        if self.is_zero():
            return Laurent.const(0, self.nvars)
        # shift both into honest polynomials
        sh_f = self.shift_extent()
        sh_g = other.shift_extent()
        f = self * Laurent.monomial(1, [-x for x in sh_f])
        g = other * Laurent.monomial(1, [-x for x in sh_g])

        def lead(p):
            return max(p.terms, key=lambda e: (sum(e), e))

        q = Laurent.const(0, self.nvars)
        lg = lead(g)
        cg = g.terms[lg]
        r = f
        while not r.is_zero():
            lr = lead(r)
            e = tuple(a - b for a, b in zip(lr, lg))
            if any(x < 0 for x in e):
                return None
            t = Laurent.monomial(r.terms[lr] / cg, e)
            q = q + t
            r = r - t * g
        shift = tuple(a - b for a, b in zip(sh_f, sh_g))
        return q * Laurent.monomial(1, shift)

    # ------------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def format(self, names):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for nm, k in zip(names, e):
                if k == 1:
                    factors.append(nm)
                elif k:
                    factors.append(f"{nm}^{k}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        names = [f"v{i}" for i in range(self.nvars)]
        return f"Laurent({self.format(names)})"
