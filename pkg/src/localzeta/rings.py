"""Truncated local rings (and Z/n) with table-backed exact arithmetic.

Three kinds of coefficient ring are supported, all finite:

* ``zq``  -- unramified mixed characteristic: Z[x]/(p^m, h(x)) with h monic of
  degree f, irreducible mod p.  Residue field F_q, q = p^f.  For f = 1 this is
  plain Z/p^m.
* ``fqt`` -- equal characteristic: F_q[t]/t^m.
* ``zn``  -- Z/n for composite n (no valuation; used for multiplicativity
  checks via the Chinese remainder theorem).

Elements are represented by their canonical integer index in ``range(size)``.
The index is the little-endian base-p digit string of the coefficient vector:

* ``zq``: element sum_j c_j x^j with c_j in [0, p^m) has index
  sum_j c_j * (p^m)^j; digits are the m base-p digits of c_0, then of c_1, ...
* ``fqt``: element sum_i a_i t^i with a_i in F_q (itself a degree-f residue
  index) has index sum_i idx(a_i) * q^i.
* ``zn``: the residue itself.

All arithmetic goes through precomputed numpy tables, which keeps matrix work
over these rings vectorizable.
"""

from __future__ import annotations

import functools

import numpy as np

RING_TABLE_CAP = 4096  # largest ring size we will build tables for


class RingError(ValueError):
    pass


class NotAUnit(RingError):
    pass


def _poly_mul_mod_p(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _poly_rem_mod_p(a, b, p):
    # remainder of a by monic b over F_p
    a = list(a)
    db = len(b) - 1
    for da in range(len(a) - 1, db - 1, -1):
        lead = a[da]
        if lead:
            for j in range(db + 1):
                a[da - db + j] = (a[da - db + j] - lead * b[j]) % p
    a = a[:db] if db > 0 else [0]
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return tuple(a)


def _monic_polys(p, deg):
    for idx in range(p**deg):
        coeffs = []
        r = idx
        for _ in range(deg):
            coeffs.append(r % p)
            r //= p
        yield tuple(coeffs) + (1,)


def _is_irreducible(h, p):
    deg = len(h) - 1
    if deg <= 0:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if _poly_rem_mod_p(h, g, p) == (0,):
                return False
    return True


@functools.lru_cache(maxsize=None)
def find_modulus(p: int, f: int) -> tuple:
    """Lowest monic irreducible polynomial of degree f over F_p.

    "Lowest" means smallest constant-first coefficient tuple read as a
    little-endian base-p integer; the choice is deterministic and shared by
    the zq and fqt constructions so that residue fields agree.
    """
    for h in _monic_polys(p, f):
        if _is_irreducible(h, p):
            return h
    raise RingError(f"no irreducible modulus of degree {f} over F_{p}")


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Ring:
    """A finite coefficient ring with index-based table arithmetic."""

    def __init__(self, kind, p=None, f=None, m=None, n=None):
        self.kind = kind
        if kind in ("zq", "fqt"):
            if not (_is_prime(p) and f >= 1 and m >= 1):
                raise RingError(f"bad parameters p={p}, f={f}, m={m}")
            self.p, self.f, self.m = p, f, m
            self.q = p**f
            self.size = self.q**m
            self.n = None
            self.modulus = find_modulus(p, f)
        elif kind == "zn":
            if n is None or n < 2:
                raise RingError(f"bad modulus n={n}")
            self.n = n
            self.p = self.f = self.m = None
            self.q = None
            self.size = n
            self.modulus = None
        else:
            raise RingError(f"unknown ring kind {kind!r}")
        if self.size > RING_TABLE_CAP:
            raise RingError(
                f"ring of size {self.size} exceeds table cap {RING_TABLE_CAP}"
            )
        self.zero = 0
        self.one = 1 if self.size > 1 else 0
        self._build_tables()
        self._proj_tables = {}

    # ------------------------------------------------------------------
    # construction of the coefficient model and tables

    def _coeff_array(self):
        """(size, width) array of coefficient vectors, index order."""
        if self.kind == "zq":
            pm = self.p**self.m
            idx = np.arange(self.size, dtype=np.int64)
            cols = []
            for _ in range(self.f):
                cols.append(idx % pm)
                idx //= pm
            return np.stack(cols, axis=1)
        if self.kind == "fqt":
            idx = np.arange(self.size, dtype=np.int64)
            cols = []
            for _ in range(self.m):
                cols.append(idx % self.q)
                idx //= self.q
            return np.stack(cols, axis=1)
        return np.arange(self.n, dtype=np.int64)[:, None]

    def _build_tables(self):
        size = self.size
        if self.kind == "zn" or (self.kind == "zq" and self.f == 1):
            mod = self.n if self.kind == "zn" else self.p**self.m
            idx = np.arange(size, dtype=np.int64)
            self.ADD = ((idx[:, None] + idx[None, :]) % mod).astype(np.int32)
            self.MUL = ((idx[:, None] * idx[None, :]) % mod).astype(np.int32)
            self.NEG = ((-idx) % mod).astype(np.int32)
            self._fast_mod = int(mod)
        elif self.kind == "zq":
            self._build_galois_tables()
            self._fast_mod = None
        else:
            self._build_fqt_tables()
            self._fast_mod = None
        self._build_unit_tables()

    def _build_galois_tables(self):
        p, f, m = self.p, self.f, self.m
        pm = p**m
        C = self._coeff_array()  # (size, f) over Z/p^m
        # rows reducing x^k (f <= k <= 2f-2) modulo h, coefficients in Z/p^m
        h = self.modulus
        red = {}
        cur = [(-h[j]) % pm for j in range(f)]  # x^f
        red[f] = list(cur)
        for k in range(f + 1, 2 * f - 1):
            nxt = [0] + cur[:-1]
            carry = cur[-1]
            if carry:
                for j in range(f):
                    nxt[j] = (nxt[j] + carry * red[f][j]) % pm
            nxt = [v % pm for v in nxt[:f]]
            red[k] = nxt
            cur = nxt
        size = self.size
        add_idx = np.zeros((size, size), dtype=np.int32)
        mul_idx = np.zeros((size, size), dtype=np.int32)
        weights = (pm ** np.arange(f, dtype=np.int64))
        s = (C[:, None, :] + C[None, :, :]) % pm
        add_idx = (s * weights).sum(axis=2).astype(np.int32)
        # full product, chunked over the first index
        chunk = max(1, (1 << 22) // (size * (2 * f)))
        for lo in range(0, size, chunk):
            hi = min(size, lo + chunk)
            conv = np.zeros((hi - lo, size, 2 * f - 1), dtype=np.int64)
            for i in range(f):
                for j in range(f):
                    conv[:, :, i + j] += C[lo:hi, None, i] * C[None, :, j]
            conv %= pm
            out = conv[:, :, :f].copy()
            for k in range(f, 2 * f - 1):
                row = red[k]
                for j in range(f):
                    if row[j]:
                        out[:, :, j] += conv[:, :, k] * row[j]
            out %= pm
            mul_idx[lo:hi] = (out * weights).sum(axis=2).astype(np.int32)
        self.ADD = add_idx
        self.MUL = mul_idx
        negC = (-C) % pm
        self.NEG = (negC * weights).sum(axis=1).astype(np.int32)

    def _build_fqt_tables(self):
        base = make_ring("zq", p=self.p, f=self.f, m=1)
        self._base = base
        m, q, size = self.m, self.q, self.size
        C = self._coeff_array()  # (size, m) of base indices
        weights = (q ** np.arange(m, dtype=np.int64))
        self.ADD = (base.ADD[C[:, None, :], C[None, :, :]] * weights).sum(
            axis=2
        ).astype(np.int32)
        self.NEG = (base.NEG[C] * weights).sum(axis=1).astype(np.int32)
        out = np.zeros((size, size, m), dtype=np.int64)
        for i in range(m):
            for j in range(m - i):
                term = base.MUL[C[:, None, i], C[None, :, j]]
                out[:, :, i + j] = base.ADD[out[:, :, i + j], term]
        self.MUL = (out * weights).sum(axis=2).astype(np.int32)

    def _build_unit_tables(self):
        size = self.size
        idx = np.arange(size)
        if self.kind == "zn":
            g = np.gcd(idx, self.n)
            self.UNIT = g == 1
            self.VAL = None
            unit_count = int(self.UNIT.sum())
        else:
            self.VAL = self._valuation_table()
            self.UNIT = self.VAL == 0
            unit_count = self.q**self.m - self.q ** (self.m - 1)
            assert int(self.UNIT.sum()) == unit_count
        # inverses by raising to |units| - 1, vectorized square-and-multiply
        e = unit_count - 1
        acc = np.full(size, self.one, dtype=np.int32)
        cur = idx.astype(np.int32)
        while e:
            if e & 1:
                acc = self.MUL[acc, cur]
            cur = self.MUL[cur, cur]
            e >>= 1
        inv = np.where(self.UNIT, acc, -1).astype(np.int32)
        check = self.MUL[inv[self.UNIT], idx[self.UNIT]]
        assert (check == self.one).all()
        self.INV = inv

    def _valuation_table(self):
        if self.kind == "zq":
            pm, p = self.p**self.m, self.p
            C = self._coeff_array()
            v = np.full(C.shape, self.m, dtype=np.int32)
            for e in range(self.m - 1, -1, -1):
                mask = C % (p ** (e + 1)) != 0
                v[mask] = np.minimum(v[mask], e)
            return v.min(axis=1).astype(np.int32)
        C = self._coeff_array()  # fqt
        v = np.full(self.size, self.m, dtype=np.int32)
        for i in range(self.m - 1, -1, -1):
            v[C[:, i] != 0] = i
        return v

    # ------------------------------------------------------------------
    # scalar operations (indices in, indices out)

    def add(self, a, b):
        return int(self.ADD[a, b])

    def sub(self, a, b):
        return int(self.ADD[a, self.NEG[b]])

    def neg(self, a):
        return int(self.NEG[a])

    def mul(self, a, b):
        return int(self.MUL[a, b])

    def pow(self, a, e):
        if e < 0:
            a, e = self.invert(a), -e
        acc, cur = self.one, a
        while e:
            if e & 1:
                acc = int(self.MUL[acc, cur])
            cur = int(self.MUL[cur, cur])
            e >>= 1
        return acc

    def is_unit(self, a):
        return bool(self.UNIT[a])

    def invert(self, a):
        if not self.UNIT[a]:
            raise NotAUnit(f"{self.element_str(a)} is not a unit in {self.literal}")
        return int(self.INV[a])

    def valuation(self, a):
        """t-adic / p-adic valuation, truncated so that v(0) = m."""
        if self.VAL is None:
            raise RingError(f"valuation undefined on {self.literal}")
        return int(self.VAL[a])

    def from_int(self, c):
        if self.kind == "zn":
            return c % self.n
        if self.kind == "zq":
            return c % (self.p**self.m)
        return c % self.p  # fqt: prime-field image sits in coefficient 0

    def elements(self):
        return range(self.size)

    def units(self):
        return [int(i) for i in np.flatnonzero(self.UNIT)]

    # ------------------------------------------------------------------
    # canonical digit encoding

    def digits(self, a):
        """Little-endian base-p digit tuple; inverse of from_digits."""
        if self.kind == "zn":
            raise RingError("zn elements are plain residues; no digit encoding")
        p = self.p
        out = []
        if self.kind == "zq":
            pm = p**self.m
            for _ in range(self.f):
                c = a % pm
                a //= pm
                for _ in range(self.m):
                    out.append(c % p)
                    c //= p
        else:
            for _ in range(self.m):
                c = a % self.q
                a //= self.q
                for _ in range(self.f):
                    out.append(c % p)
                    c //= p
        return tuple(out)

    def from_digits(self, digs):
        p = self.p
        if self.kind == "zq":
            pm = p**self.m
            coeffs = []
            it = iter(digs)
            for _ in range(self.f):
                c = 0
                for k in range(self.m):
                    c += next(it) * p**k
                coeffs.append(c)
            return sum(c * pm**j for j, c in enumerate(coeffs))
        coeffs = []
        it = iter(digs)
        for _ in range(self.m):
            c = 0
            for k in range(self.f):
                c += next(it) * p**k
            coeffs.append(c)
        return sum(c * self.q**i for i, c in enumerate(coeffs))

    def element_str(self, a):
        if self.kind == "zn":
            return str(a)
        C = self._coeff_array()
        if self.kind == "zq":
            terms = []
            for j in range(self.f):
                c = int(C[a, j])
                if c:
                    terms.append(f"{c}" if j == 0 else f"{c}*x^{j}")
            return " + ".join(terms) if terms else "0"
        terms = []
        for i in range(self.m):
            c = int(C[a, i])
            if c:
                terms.append(f"[{c}]" if i == 0 else f"[{c}]*t^{i}")
        return " + ".join(terms) if terms else "0"

    # ------------------------------------------------------------------
    # levels and projections

    def subring_level(self, k):
        """The same ring family truncated at level k <= m."""
        if self.kind == "zn":
            raise RingError("zn has no level structure")
        if not 1 <= k <= self.m:
            raise RingError(f"level {k} out of range 1..{self.m}")
        return make_ring(self.kind, p=self.p, f=self.f, m=k)

    def residue_field(self):
        return make_ring("zq", p=self.p, f=self.f, m=1)

    def project_table(self, k):
        """Index table sending each element to its level-k truncation."""
        if k in self._proj_tables:
            return self._proj_tables[k]
        low = self.subring_level(k)
        C = self._coeff_array()
        if self.kind == "zq":
            pk = self.p**k
            w = (pk ** np.arange(self.f, dtype=np.int64))
            tab = ((C % pk) * w).sum(axis=1).astype(np.int32)
        else:
            w = (self.q ** np.arange(k, dtype=np.int64))
            tab = (C[:, :k] * w).sum(axis=1).astype(np.int32)
        assert tab.max() < low.size
        self._proj_tables[k] = tab
        return tab

    def project(self, a, k):
        return int(self.project_table(k)[a])

    # ------------------------------------------------------------------
    # generator selection (deterministic)

    def additive_generators(self):
        """Canonical generating set of the additive group (digit basis)."""
        if self.kind == "zn":
            return [1]
        if self.kind == "zq":
            pm = self.p**self.m
            return [int(pm**j) for j in range(self.f)]
        gens = []
        for i in range(self.m):
            for j in range(self.f):
                gens.append(int((self.p**j) * self.q**i))
        return gens

    def unit_generators(self):
        """Greedy minimal generating list for the unit group, ascending."""
        units = self.units()
        target = len(units)
        gens = []
        span = {self.one}
        for u in units:
            if u in span:
                continue
            gens.append(u)
            frontier = [u]
            while frontier:
                nxt = []
                for s in list(span):
                    for g in frontier:
                        t = int(self.MUL[s, g])
                        if t not in span:
                            span.add(t)
                            nxt.append(t)
                frontier = nxt
            if len(span) == target:
                break
        return gens

    # ------------------------------------------------------------------
    # matrix helpers (index matrices, batched)

    def identity_mat(self, d):
        out = np.zeros((d, d), dtype=np.int32)
        np.fill_diagonal(out, self.one)
        return out

    def mat_from_int(self, M):
        arr = np.asarray(M, dtype=np.int64)
        if self.kind == "zn":
            return (arr % self.n).astype(np.int32)
        if self.kind == "zq":
            return (arr % (self.p**self.m)).astype(np.int32)
        return (arr % self.p).astype(np.int32)

    def mat_mul(self, A, B):
        A = np.asarray(A)
        B = np.asarray(B)
        if self._fast_mod is not None:
            mod = self._fast_mod
            # inner dim * (mod-1)^2 < 2^53 always holds under the table cap,
            # so float64 matmul (BLAS) is exact here
            if A.shape[-1] * (mod - 1) ** 2 < 2**53:
                prod = np.matmul(A.astype(np.float64), B.astype(np.float64))
                return (prod % mod).astype(np.int32)
            prod = np.matmul(A.astype(np.int64), B.astype(np.int64))
            return (prod % mod).astype(np.int32)
        batch = np.broadcast_shapes(A.shape[:-2], B.shape[:-2])
        d = A.shape[-2]
        e = B.shape[-1]
        k = A.shape[-1]
        A = np.broadcast_to(A, batch + A.shape[-2:])
        B = np.broadcast_to(B, batch + B.shape[-2:])
        nbatch = int(np.prod(batch)) if batch else 1
        A2 = A.reshape((nbatch, d, k))
        B2 = B.reshape((nbatch, k, e))
        out = np.empty((nbatch, d, e), dtype=np.int32)
        chunk = max(1, (1 << 24) // max(1, d * k * e))
        for lo in range(0, nbatch, chunk):
            hi = min(nbatch, lo + chunk)
            P = self.MUL[A2[lo:hi, :, :, None], B2[lo:hi, None, :, :]]
            acc = P[:, :, 0, :]
            for j in range(1, k):
                acc = self.ADD[acc, P[:, :, j, :]]
            out[lo:hi] = acc
        return out.reshape(batch + (d, e))

    def mat_add(self, A, B):
        return self.ADD[np.asarray(A), np.asarray(B)].astype(np.int32)

    def mat_sub(self, A, B):
        B = np.asarray(B)
        return self.ADD[np.asarray(A), self.NEG[B]].astype(np.int32)

    def mat_neg(self, A):
        return self.NEG[np.asarray(A)].astype(np.int32)

    def mat_project(self, A, k):
        return self.project_table(k)[np.asarray(A)].astype(np.int32)

    def mat_min_valuation(self, A):
        """Entrywise minimum valuation, reduced over the last two axes."""
        if self.VAL is None:
            raise RingError(f"valuation undefined on {self.literal}")
        return self.VAL[np.asarray(A)].min(axis=(-1, -2))

    # ------------------------------------------------------------------

    @property
    def literal(self):
        if self.kind == "zn":
            return f"zn:n={self.n}"
        return f"{self.kind}:p={self.p},f={self.f},m={self.m}"

    def __repr__(self):
        return f"Ring({self.literal}, size={self.size})"

    def key(self):
        return (self.kind, self.p, self.f, self.m, self.n)


@functools.lru_cache(maxsize=None)
def _ring_cached(kind, p, f, m, n):
    return Ring(kind, p=p, f=f, m=m, n=n)


def make_ring(kind, p=None, f=None, m=None, n=None) -> Ring:
    """Construct (or fetch) the ring of the given kind and parameters."""
    return _ring_cached(kind, p, f, m, n)


def parse_ring(text: str) -> Ring:
    """Parse a ring literal such as ``zq:p=2,f=1,m=3`` or ``zn:n=12``."""
    try:
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        params = {}
        for part in rest.split(","):
            key, _, val = part.partition("=")
            params[key.strip()] = int(val)
    except Exception as exc:
        raise RingError(f"malformed ring literal {text!r}") from exc
    if kind in ("zq", "fqt"):
        missing = {"p", "f", "m"} - set(params)
        if missing:
            raise RingError(f"ring literal {text!r} missing {sorted(missing)}")
        return make_ring(kind, p=params["p"], f=params["f"], m=params["m"])
    if kind == "zn":
        if "n" not in params:
            raise RingError(f"ring literal {text!r} missing n")
        return make_ring("zn", n=params["n"])
    raise RingError(f"unknown ring kind in literal {text!r}")


def crt_split(n):
    """Coprime factorization n = prod p^e, ascending primes."""
    parts = []
    rem = n
    d = 2
    while d * d <= rem:
        if rem % d == 0:
            pe = 1
            while rem % d == 0:
                pe *= d
                rem //= d
            parts.append(pe)
        d += 1
    if rem > 1:
        parts.append(rem)
    return parts


def euler_phi(n):
    out = n
    for pe in crt_split(n):
        p = min(p for p in range(2, pe + 1) if pe % p == 0)
        out = out // pe * (pe - pe // p)
    return out
