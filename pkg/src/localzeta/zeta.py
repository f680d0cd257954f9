"""Truncated zeta series, bivariate rationals, and counting identities.

The enumeration side produces exact coefficient lists: c_m counts conjugacy
classes of the level-m quotient, b_m counts double cosets of two parabolic
subgroups.  The symbolic side is a numerator Laurent polynomial in
(X, Y) = (q, q^{-s}) over a factored denominator prod (1 - X^a Y^b)^mult;
expand() substitutes a numeric q and expands the geometric factors exactly,
which is how candidate closed forms are compared against enumeration.

The two consistency chains tie measure-theoretic counts to class counts:

* commutator depth: #{(x,y) in G_M^2 : w(x,y) >= m} * |G_m|^2 equals
  (commuting pairs of G_m) * |G_M|^2, and commuting pairs = c_m |G_m|;
* parabolic depth: #{pairs with min(lam_{S2}(y), lam_{S1}(xyx^-1)) >= m}
  scales the same way to e_m = #{(x,y): y in P2, xyx^-1 in P1}, which in
  turn equals b_m |P1| |P2|.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .cache import as_family, table_for
from .groups import ENUM_CAP, PAIR_SCAN_CAP, Family, GroupsError, TooLarge
from .laurent import Laurent
from .rings import make_ring


class ZetaError(ValueError):
    pass


# ----------------------------------------------------------------------
# series


class ZetaSeries:
    """Exact truncated series sum_m c_m Y^m at a fixed residue size q.

    Coefficients are Fractions (counting series have integer entries; the
    Igusa truncations carry honest measures).  provenance tags each
    coefficient as "enumerated" or "expanded-from-rational".
    """

    __slots__ = ("q", "coeffs", "provenance")

    def __init__(self, q, coeffs, provenance):
        self.q = int(q)
        self.coeffs = [Fraction(c) for c in coeffs]
        if isinstance(provenance, str):
            provenance = [provenance] * len(self.coeffs)
        self.provenance = list(provenance)
        if len(self.provenance) != len(self.coeffs):
            raise ZetaError("provenance length mismatch")

    @property
    def M(self):
        return len(self.coeffs)

    def is_counting(self):
        return all(c.denominator == 1 and c >= 0 for c in self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, ZetaSeries)
            and self.q == other.q
            and self.coeffs == other.coeffs
        )

    def __mul__(self, other):
        if not isinstance(other, ZetaSeries) or other.q != self.q:
            raise ZetaError("series product needs matching q")
        M = min(self.M, other.M)
        out = [Fraction(0)] * M
        for i, a in enumerate(self.coeffs[:M]):
            for j, b in enumerate(other.coeffs[: M - i]):
                out[i + j] += a * b
        return ZetaSeries(self.q, out, "expanded-from-rational")

    def __repr__(self):
        vals = ", ".join(str(c) for c in self.coeffs)
        return f"ZetaSeries(q={self.q}, [{vals}])"


# ----------------------------------------------------------------------
# bivariate rationals


def _factor_poly(a, b):
    return Laurent.const(1, 2) - Laurent.monomial(1, (a, b))


class BivariateRational:
    """numerator / (const * prod (1 - X^a Y^b)^mult), exactly.

    The denominator stays factored; no multivariate gcd is attempted.  The
    normal form clears rational content out of the numerator into the
    constant and keeps the constant positive, so equal construction paths
    give identical representations.
    """

    __slots__ = ("numerator", "factors", "const")

    def __init__(self, numerator, factors=(), const=1):
        if not isinstance(numerator, Laurent) or numerator.nvars != 2:
            raise ZetaError("numerator must be a Laurent in (X, Y)")
        fac = {}
        items = factors.items() if isinstance(factors, dict) else factors
        for (a, b), mult in items:
            if (a, b) == (0, 0):
                raise ZetaError("denominator factor (1 - X^0 Y^0) is zero")
            if mult:
                fac[(int(a), int(b))] = fac.get((int(a), int(b)), 0) + mult
        if any(m < 0 for m in fac.values()):
            raise ZetaError("negative factor multiplicity")
        const = Fraction(const)
        if const == 0:
            raise ZetaError("zero denominator constant")
        # normal form: integer numerator and positive integer constant
        denoms = [c.denominator for c in numerator.terms.values()]
        scale = math.lcm(const.denominator, *denoms) if denoms else 1
        numerator = numerator * scale
        const = const * scale
        nums = [abs(c.numerator) for c in numerator.terms.values()]
        g = math.gcd(abs(const.numerator), *nums) if nums else 1
        if g > 1:
            numerator = numerator * Fraction(1, g)
            const = const / g
        if const < 0:
            numerator = -numerator
            const = -const
        assert const.denominator == 1
        self.numerator = numerator
        self.factors = tuple(sorted(fac.items()))
        self.const = int(const)

    @classmethod
    def one(cls):
        return cls(Laurent.const(1, 2))

    def is_zero(self):
        return self.numerator.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, BivariateRational)
            and self.numerator == other.numerator
            and self.factors == other.factors
            and self.const == other.const
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Laurent)):
            num = self.numerator * other
            return BivariateRational(num, self.factors, self.const)
        fac = dict(self.factors)
        for key, mult in other.factors:
            fac[key] = fac.get(key, 0) + mult
        return BivariateRational(
            self.numerator * other.numerator, fac, self.const * other.const
        )

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, BivariateRational):
            raise ZetaError("can only add BivariateRationals")
        fac1, fac2 = dict(self.factors), dict(other.factors)
        union = {
            key: max(fac1.get(key, 0), fac2.get(key, 0))
            for key in set(fac1) | set(fac2)
        }
        num1 = self.numerator * Fraction(1, self.const)
        num2 = other.numerator * Fraction(1, other.const)
        for key, mult in union.items():
            up1 = mult - fac1.get(key, 0)
            up2 = mult - fac2.get(key, 0)
            if up1:
                num1 = num1 * _factor_poly(*key) ** up1
            if up2:
                num2 = num2 * _factor_poly(*key) ** up2
        return BivariateRational(num1 + num2, union)

    def __neg__(self):
        return BivariateRational(-self.numerator, self.factors, self.const)

    def __sub__(self, other):
        return self + (-other)

    def evaluate(self, q, y):
        """Exact value at X = q, Y = y (Fractions)."""
        val = self.numerator.evaluate([Fraction(q), Fraction(y)])
        den = Fraction(self.const)
        for (a, b), mult in self.factors:
            base = 1 - Fraction(q) ** a * Fraction(y) ** b
            if base == 0:
                raise ZetaError(f"pole at factor (1 - X^{a} Y^{b})")
            den *= base**mult
        return val / den

    def as_dict(self):
        return {
            "numerator": self.numerator.format(("X", "Y")),
            "denominator_constant": self.const,
            "denominator_factors": [
                [a, b, mult] for (a, b), mult in self.factors
            ],
        }

    def __repr__(self):
        den = " ".join(
            f"(1 - X^{a} Y^{b})^{m}" for (a, b), m in self.factors
        )
        c = f"{self.const} " if self.const != 1 else ""
        return f"({self.numerator.format(('X', 'Y'))}) / {c}{den or '1'}"


def expand(rational: BivariateRational, q, M) -> ZetaSeries:
    """Exact coefficients of Y^0..Y^{M-1} after substituting X = q.

    Denominator factors with b >= 1 are expanded geometrically; factors
    with b = 0 are constants at the substitution (a pole there is an
    error).  A surviving negative power of Y is an error: the result is
    required to be an honest power series.
    """
    if q < 2:
        raise ZetaError("expansion needs q >= 2")
    acc = {}
    for (ex, ey), c in rational.numerator.terms.items():
        val = c * Fraction(q) ** ex
        if val:
            acc[ey] = acc.get(ey, Fraction(0)) + val
    acc = {e: c for e, c in acc.items() if c}
    const = Fraction(rational.const)
    for (a, b), mult in rational.factors:
        if b < 0:
            raise ZetaError("factor with negative Y power is not expandable")
        if b == 0:
            base = 1 - Fraction(q) ** a
            if base == 0:
                raise ZetaError(f"pole: (1 - X^{a}) vanishes at q = {q}")
            const *= base**mult
            continue
        ratio = Fraction(q) ** a
        for _ in range(mult):
            new = {}
            for e0, c0 in acc.items():
                term = c0
                e = e0
                while e <= M - 1:
                    new[e] = new.get(e, Fraction(0)) + term
                    e += b
                    term *= ratio
            acc = new
    bad = {e: c for e, c in acc.items() if e < 0 and c}
    if bad:
        raise ZetaError(f"expansion has negative Y powers: {sorted(bad)}")
    coeffs = [acc.get(n, Fraction(0)) / const for n in range(M)]
    return ZetaSeries(q, coeffs, "expanded-from-rational")


# ----------------------------------------------------------------------
# library of closed forms


def _X(power=1):
    return Laurent.var(0, 2, power)


def _Y(power=1):
    return Laurent.var(1, 2, power)


def heisenberg_cc_form() -> BivariateRational:
    """(1 - Y) / ((1 - XY)(1 - X^2 Y)).

    Matches the enumerated Heisenberg class-counting series at every level
    tested: coefficients 1, q^2 + q - 1, q^4 + q^3 - q, ...
    """
    return BivariateRational(
        Laurent.const(1, 2) - _Y(), {(1, 1): 1, (2, 1): 1}
    )


def heisenberg_cc_variant_form() -> BivariateRational:
    """(1 + Y - XY - X^2 Y + X^3 Y) / ((1 - XY)(1 - X^2 Y)(1 - X^3 Y)).

    A circulated closed-form variant kept for mismatch reporting: its
    Y-linear coefficient is 1 + 2 q^3, which disagrees with the enumerated
    q^2 + q - 1, so verify() documents the discrepancy instead of using it.
    """
    num = (
        Laurent.const(1, 2)
        + _Y()
        - _X() * _Y()
        - _X(2) * _Y()
        + _X(3) * _Y()
    )
    return BivariateRational(num, {(1, 1): 1, (2, 1): 1, (3, 1): 1})


def igusa_two_by_two_form() -> BivariateRational:
    """(1 - X^-1)(1 - X^-2) / ((1 - X^-1 Y)(1 - X^-2 Y)).

    Level-set generating function of the 2x2 determinant integrand in four
    variables; validated against exhaustive zero counts.
    """
    num = (Laurent.const(1, 2) - _X(-1)) * (Laurent.const(1, 2) - _X(-2))
    return BivariateRational(num, {(-1, 1): 1, (-2, 1): 1})


def igusa_coordinate_form() -> BivariateRational:
    """(1 - X^-1) / (1 - X^-1 Y): the one-variable integrand f = x."""
    return BivariateRational(
        Laurent.const(1, 2) - _X(-1), {(-1, 1): 1}
    )


# ----------------------------------------------------------------------
# enumerated series


def _levels(kind, p, f, M):
    return [make_ring(kind, p=p, f=f, m=m) for m in range(1, M)]


def cc_zeta(family, kind, p, f, M, cap=ENUM_CAP) -> ZetaSeries:
    """Class-counting series: c_m = #classes of the level-m quotient."""
    if M < 1:
        raise ZetaError("M must be at least 1")
    fam = as_family(family)
    coeffs = [Fraction(1)]
    for ring in _levels(kind, p, f, M):
        c = table_for(fam, ring, cap).class_count()
        if c <= 0:
            raise ZetaError("class count must be positive")
        coeffs.append(Fraction(c))
    return ZetaSeries(p**f, coeffs, "enumerated")


def sub_family(system, text) -> Family:
    """Subgroup literal: 'all', '-' (Borel), 'a1,a2', or 'roots:...'."""
    text = text.strip()
    if text == "all":
        return Family(f"chevalley:{system}")
    if text.startswith("roots:"):
        return Family(f"rootset:{system}:{text[len('roots:'):]}")
    return Family(f"parabolic:{system}:{text or '-'}")


def hecke_zeta(system, s1, s2, kind, p, f, M, cap=ENUM_CAP) -> ZetaSeries:
    """Double-coset counting series for two parabolic-type subgroups."""
    if M < 1:
        raise ZetaError("M must be at least 1")
    fam = Family(f"chevalley:{system}")
    fam1, fam2 = sub_family(system, s1), sub_family(system, s2)
    coeffs = [Fraction(1)]
    for ring in _levels(kind, p, f, M):
        G = table_for(fam, ring, cap)
        P1 = table_for(fam1, ring, cap)
        P2 = table_for(fam2, ring, cap)
        b, e = G.double_coset_data(P1, P2)
        if e != b * P1.size * P2.size:
            raise ZetaError(
                f"double-coset/pair-count identity fails at level {ring.m}"
            )
        coeffs.append(Fraction(b))
    return ZetaSeries(p**f, coeffs, "enumerated")


# ----------------------------------------------------------------------
# consistency chains


def prop62_consistency(
    family, kind, p, f, M, cap=ENUM_CAP, pair_cap=PAIR_SCAN_CAP
):
    """Ties the commutator-depth level sets to class counts, exactly.

    For each 1 <= m < M: commuting pairs e_m of the level-m quotient must
    equal c_m |G_m| (class-count identity), and the depth histogram of the
    top-level table must satisfy
    #{(x,y) in G_top^2 : w(x,y) >= m} * |G_m|^2 = e_m * |G_top|^2,
    which is the statement that both sides compute the measure of the
    depth-m pair set.
    """
    fam = as_family(family)
    rings = _levels(kind, p, f, M)
    top = table_for(fam, rings[-1], cap)
    hist = top.pair_depth_counts(cap=pair_cap)
    top_sq = top.size**2
    levels = [
        {
            "m": 0,
            "order": 1,
            "classes": 1,
            "commuting_pairs": 1,
            "depth_pairs": int(hist[0]),
            "burnside_ok": True,
            "measure_ok": int(hist[0]) == top_sq,
        }
    ]
    for ring in rings:
        G = table_for(fam, ring, cap)
        c = G.class_count()
        e = G.commuting_pairs(cap=pair_cap)
        m = ring.m
        levels.append(
            {
                "m": m,
                "order": G.size,
                "classes": c,
                "commuting_pairs": e,
                "depth_pairs": int(hist[m]),
                "burnside_ok": e == c * G.size,
                "measure_ok": int(hist[m]) * G.size**2 == e * top_sq,
            }
        )
    return {
        "family": fam.text,
        "ring_kind": kind,
        "p": p,
        "f": f,
        "q": p**f,
        "M": M,
        "levels": levels,
        "ok": all(l["burnside_ok"] and l["measure_ok"] for l in levels),
    }


def _lambda_vector(table, sub_tables):
    """lam[i] = largest k with the level-k projection inside the subgroup."""
    ring = table.ring
    lam = np.zeros(table.size, dtype=np.int64)
    alive = np.ones(table.size, dtype=bool)
    for k in range(1, ring.m + 1):
        sub = sub_tables[k]
        proj = ring.mat_project(table.mats, k)
        enc = np.ascontiguousarray(proj, dtype="<u2")
        step = enc.shape[1] * enc.shape[2] * 2
        buf = enc.tobytes()
        idx = sub._index
        member = np.fromiter(
            (buf[i * step : (i + 1) * step] in idx for i in range(table.size)),
            dtype=bool,
            count=table.size,
        )
        alive &= member
        lam[alive] = k
        if not alive.any():
            break
    return lam


def prop73_consistency(
    system, s1, s2, kind, p, f, M, cap=ENUM_CAP, pair_cap=PAIR_SCAN_CAP
):
    """Parabolic-depth chain: pair-depth level sets match b_m |P1| |P2|.

    Also checks the order law |P(level m)| = q^{m dim P} k_P(q) with
    dim P = rank + #roots of the parabolic; failures land in the report,
    nothing is raised.
    """
    q = p**f
    fam = Family(f"chevalley:{system}")
    fam1, fam2 = sub_family(system, s1), sub_family(system, s2)
    rings = _levels(kind, p, f, M)
    subs1, subs2 = {}, {}
    levels = []
    deviations = []
    e_by_level = {}
    for ring in rings:
        m = ring.m
        G = table_for(fam, ring, cap)
        P1 = table_for(fam1, ring, cap)
        P2 = table_for(fam2, ring, cap)
        subs1[m], subs2[m] = P1, P2
        b, e = G.double_coset_data(P1, P2)
        e_by_level[m] = e
        chain_ok = e == b * P1.size * P2.size
        entry = {
            "m": m,
            "order": G.size,
            "b_m": b,
            "e_m": e,
            "p1_order": P1.size,
            "p2_order": P2.size,
            "chain_ok": chain_ok,
        }
        for tag, sub, subfam in (("p1", P1, fam1), ("p2", P2, fam2)):
            dim = subfam.dim_scheme
            base = table_for(subfam, rings[0], cap).size
            want = q ** ((m - 1) * dim) * base
            entry[f"{tag}_order_law_ok"] = sub.size == want
            if sub.size != want:
                deviations.append(
                    f"order law fails for {subfam.text} at level {m}: "
                    f"{sub.size} != {want}"
                )
        levels.append(entry)

    top = table_for(fam, rings[-1], cap)
    if top.size > pair_cap:
        raise TooLarge(
            f"pair scan over {top.size} elements exceeds cap {pair_cap}"
        )
    lam1 = _lambda_vector(top, subs1)
    lam2 = _lambda_vector(top, subs2)
    mtop = rings[-1].m
    hist = np.zeros(mtop + 1, dtype=np.int64)
    inv_mats = top.mats[top.inv]
    for i in range(top.size):
        x, xinv = top.mats[i], inv_mats[i]
        conj = top.ring.mat_mul(top.ring.mat_mul(x, top.mats), xinv)
        perm = top.lookup_batch(conj)
        w = np.minimum(lam2, lam1[perm])
        hist += np.bincount(w, minlength=mtop + 1)
    pairs_ge = np.cumsum(hist[::-1])[::-1]
    top_sq = top.size**2
    measure = [int(pairs_ge[0]) == top_sq]
    for entry in levels:
        m = entry["m"]
        entry["depth_pairs"] = int(pairs_ge[m])
        m_ok = int(pairs_ge[m]) * entry["order"] ** 2 == e_by_level[m] * top_sq
        entry["measure_ok"] = m_ok
        measure.append(m_ok)

    k_g = Fraction(table_for(fam, rings[0], cap).size, q**fam.dim_scheme)
    k_1 = Fraction(table_for(fam1, rings[0], cap).size, q**fam1.dim_scheme)
    k_2 = Fraction(table_for(fam2, rings[0], cap).size, q**fam2.dim_scheme)
    return {
        "system": system,
        "s1": s1,
        "s2": s2,
        "ring_kind": kind,
        "p": p,
        "f": f,
        "q": q,
        "M": M,
        "alpha": k_g**2 / (k_1 * k_2),
        "levels": levels,
        "deviations": deviations,
        "ok": all(measure)
        and all(
            l["chain_ok"] and l["p1_order_law_ok"] and l["p2_order_law_ok"]
            for l in levels
        ),
    }


# ----------------------------------------------------------------------
# transfer and Euler product


def transfer_report(family, primes, f, M, s1=None, s2=None, cap=ENUM_CAP):
    """Side-by-side coefficients over both ring kinds at identical q."""
    fam = as_family(family)
    mode = "cc" if s1 is None else "hecke"
    if mode == "hecke" and not fam.text.startswith("chevalley:"):
        raise ZetaError("hecke transfer needs a chevalley family")
    rows = []
    for p in primes:
        if mode == "cc":
            a = cc_zeta(fam, "zq", p, f, M, cap)
            b = cc_zeta(fam, "fqt", p, f, M, cap)
        else:
            system = fam.text.split(":")[1]
            a = hecke_zeta(system, s1, s2, "zq", p, f, M, cap)
            b = hecke_zeta(system, s1, s2, "fqt", p, f, M, cap)
        flags = [x == y for x, y in zip(a.coeffs, b.coeffs)]
        rows.append(
            {
                "p": p,
                "q": p**f,
                "zq": [int(c) for c in a.coeffs],
                "fqt": [int(c) for c in b.coeffs],
                "equal_per_level": flags,
                "equal": all(flags),
            }
        )
    return {
        "family": fam.text,
        "mode": mode,
        "s1": s1,
        "s2": s2,
        "f": f,
        "M": M,
        "rows": rows,
        "ok": all(r["equal"] for r in rows),
    }


def _factorize(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            out.append((d, k))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def euler_multiplicativity(family, n, cap=ENUM_CAP):
    """cc over Z/n must equal the product of cc over its prime-power parts."""
    if n < 2:
        raise ZetaError("modulus must be at least 2")
    fam = as_family(family)
    total = table_for(fam, make_ring("zn", n=n), cap).class_count()
    parts = []
    product = 1
    for p, k in _factorize(n):
        cc = table_for(fam, make_ring("zn", n=p**k), cap).class_count()
        parts.append({"modulus": p**k, "cc": cc})
        product *= cc
    return {
        "family": fam.text,
        "n": n,
        "cc": total,
        "parts": parts,
        "product": product,
        "ok": total == product,
    }
