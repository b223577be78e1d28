"""Exact linear algebra: integer polynomials, quadratic-field scalars, kernels.

Characteristic polynomials of large integer matrices go through modular
Hessenberg reduction and CRT reconstruction; kernels are computed by exact
Gaussian elimination over Q or Q(sqrt d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# ---------------------------------------------------------------------------
# integer polynomials (dense, ascending coefficients)
# ---------------------------------------------------------------------------


def poly_trim(c: list[int]) -> list[int]:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return poly_trim(out)


def poly_pow(a, n: int):
    out = [1]
    base = list(a)
    while n:
        if n & 1:
            out = poly_mul(out, base)
        n >>= 1
        if n:
            base = poly_mul(base, base)
    return out


def poly_compose(a, b):
    """a(b(X)) by Horner over polynomial coefficients."""
    out = [0]
    for c in reversed(a):
        out = poly_add(poly_mul(out, b), [c])
    return out


def poly_eval(a, x):
    out = 0 * x if not isinstance(x, (int, Fraction)) else 0
    for c in reversed(a):
        out = out * x + c
    return out


class IntPolynomial:
    """Dense polynomial over Z, lowest-degree coefficient first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(poly_trim([int(c) for c in coeffs]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    def __eq__(self, other):
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        return poly_eval(list(self.coeffs), x)

    def __mul__(self, other):
        return IntPolynomial(poly_mul(list(self.coeffs), list(other.coeffs)))

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def pretty(self, var: str = "X") -> str:
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                term = str(abs(c))
            else:
                mag = "" if abs(c) == 1 else str(abs(c))
                term = f"{mag}{var}" + (f"^{i}" if i > 1 else "")
            parts.append(("- " if c < 0 else "+ ") + term)
        s = " ".join(parts) if parts else "0"
        return s[2:] if s.startswith("+ ") else ("-" + s[2:] if s.startswith("- ") else s)

    def to_json(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs]}

    def root_multiplicity(self, r: int) -> int:
        """Multiplicity of the integer root r (0 if not a root)."""
        c = list(self.coeffs)
        mult = 0
        while poly_eval(c, r) == 0:
            # synthetic division by (X - r)
            out = [0] * (len(c) - 1)
            acc = 0
            for i in range(len(c) - 1, 0, -1):
                acc = c[i] + acc
                out[i - 1] = acc
                acc *= r
            c = out
            mult += 1
            if len(c) == 0:
                break
        return mult


# ---------------------------------------------------------------------------
# quadratic field Q(sqrt d)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticScalar:
    """Exact element a + b*sqrt(d) of Q(sqrt d), d a fixed square-free integer."""

    a: Fraction
    b: Fraction
    d: int

    @staticmethod
    def of(a, b, d: int) -> "QuadraticScalar":
        return QuadraticScalar(Fraction(a), Fraction(b), d)

    def _coerce(self, other):
        if isinstance(other, QuadraticScalar):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise ValueError("mixed quadratic fields")
            return QuadraticScalar(other.a, other.b, self.d)
        if isinstance(other, (int, Fraction)):
            return QuadraticScalar(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticScalar(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticScalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticScalar(self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticScalar":
        n = self.a * self.a - self.b * self.b * self.d
        if n == 0:
            raise ZeroDivisionError("zero or non-invertible quadratic scalar")
        return QuadraticScalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __bool__(self):
        return not (self.a == 0 and self.b == 0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadraticScalar):
            return self.a == other.a and self.b == other.b and (self.b == 0 or self.d == other.d)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d if self.b else 0))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def conjugate(self) -> "QuadraticScalar":
        return QuadraticScalar(self.a, -self.b, self.d)

    def __repr__(self):
        return f"({self.a}+{self.b}*sqrt({self.d}))"


# ---------------------------------------------------------------------------
# exact kernels / rank over a field (Fraction or QuadraticScalar)
# ---------------------------------------------------------------------------


def _is_zero(x) -> bool:
    return not x if isinstance(x, QuadraticScalar) else x == 0


def exact_rref(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot column list).

    Pivot search is by column order so output is deterministic.
    """
    if not rows:
        return rows, []
    m, n = len(rows), len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if not _is_zero(rows[i][c]):
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c].inverse() if isinstance(rows[r][c], QuadraticScalar) else Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and not _is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def exact_kernel(rows: list[list], ncols: int) -> list[list]:
    """Basis of the right kernel of the given rows (entries in one exact field).

    Output vectors are normalized so free variables follow column order
    (reduced-echelon convention, deterministic).
    """
    work = [list(r) for r in rows]
    work, pivots = exact_rref(work)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    zero = Fraction(0)
    if rows and isinstance(rows[0][0], QuadraticScalar):
        d = rows[0][0].d
        zero = QuadraticScalar.of(0, 0, d)
    one = zero + 1
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for ri, pc in enumerate(pivots):
            v[pc] = zero - work[ri][fc]
        basis.append(v)
    return basis


def exact_rank(rows: list[list]) -> int:
    work = [list(r) for r in rows]
    _, pivots = exact_rref(work)
    return len(pivots)


def rank_mod_p(mat: np.ndarray, p: int = 2147483629) -> int:
    """Rank of an integer matrix modulo the prime p (row reduction in int64).

    rank_mod_p <= true rank, so full modular rank certifies full rational rank.
    """
    a = np.array(mat, dtype=np.int64) % p
    m, n = a.shape
    rank = 0
    row = 0
    for col in range(n):
        piv = None
        for i in range(row, m):
            if a[i, col] % p:
                piv = i
                break
        if piv is None:
            continue
        a[[row, piv]] = a[[piv, row]]
        inv = pow(int(a[row, col]), p - 2, p)
        a[row] = (a[row] * inv) % p
        fac = a[row + 1:, col].copy()
        if fac.size:
            a[row + 1:] = (a[row + 1:] - np.outer(fac, a[row])) % p
        rank += 1
        row += 1
        if row == m:
            break
    return rank


# ---------------------------------------------------------------------------
# modular characteristic polynomial with CRT reconstruction
# ---------------------------------------------------------------------------


def _primes_below_2_20(count: int) -> list[int]:
    out = []
    n = (1 << 20) - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 2
    return out


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _charpoly_mod(a: np.ndarray, p: int) -> np.ndarray:
    """char poly of integer matrix mod p via Hessenberg reduction.

    Returns ascending int64 coefficient array of length n+1 (monic).
    """
    n = a.shape[0]
    h = a.astype(np.int64) % p
    for k in range(n - 2):
        piv = None
        for i in range(k + 1, n):
            if h[i, k] % p:
                piv = i
                break
        if piv is None:
            continue
        if piv != k + 1:
            h[[k + 1, piv]] = h[[piv, k + 1]]
            h[:, [k + 1, piv]] = h[:, [piv, k + 1]]
        inv = pow(int(h[k + 1, k]), p - 2, p)
        for i in range(k + 2, n):
            if h[i, k] % p == 0:
                continue
            f = int(h[i, k]) * inv % p
            h[i] = (h[i] - f * h[k + 1]) % p
            h[:, k + 1] = (h[:, k + 1] + f * h[:, i]) % p
    # p_k(x) = det(xI - H_k) recurrence for Hessenberg H
    polys = np.zeros((n + 1, n + 1), dtype=np.int64)
    polys[0, 0] = 1
    # subprod[i] = product of subdiagonals h[j, j-1] for j in (i, k] computed on the fly
    for k in range(1, n + 1):
        hk = h[:k, k - 1]  # column k-1 entries h[i, k-1] for rows i < k
        prev = polys[k - 1]
        cur = np.zeros(n + 1, dtype=np.int64)
        cur[1: k + 1] = prev[:k]
        cur = (cur - int(hk[k - 1]) % p * prev) % p
        sub = 1
        for m in range(1, k):
            sub = sub * int(h[k - m, k - m - 1]) % p
            if sub == 0:
                break
            coef = int(hk[k - m - 1]) * sub % p
            if coef:
                cur = (cur - coef * polys[k - m - 1]) % p
        polys[k] = cur % p
    return polys[n] % p


def char_poly_exact(mat: np.ndarray) -> IntPolynomial:
    """Exact characteristic polynomial det(XI - M) of an integer matrix.

    Computed modulo enough word-size primes (Hadamard-style coefficient bound)
    and reconstructed by CRT with symmetric lifting.
    """
    a = np.asarray(mat, dtype=np.int64)
    n = a.shape[0]
    if n == 0:
        return IntPolynomial([1])
    if n <= 8:
        return _charpoly_fraction_free(a)
    # coefficient bound: |c_k| <= C(n,k) * prod row norms <= 2^n * (max row 2-norm)^n
    row_norm = max(float(np.sqrt((a.astype(float) ** 2).sum(axis=1)).max()), 1.0)
    bits = n * (1.0 + math.log2(row_norm)) + 4
    nprimes = int(bits // 19) + 2
    primes = _primes_below_2_20(nprimes)
    residues = [_charpoly_mod(a, p) for p in primes]
    mod = 1
    acc = [0] * (n + 1)
    for p, res in zip(primes, residues):
        if mod == 1:
            acc = [int(r) % p for r in res]
            mod = p
            continue
        inv = pow(mod % p, p - 2, p)
        new = []
        for c_old, r in zip(acc, res):
            t = (int(r) - c_old) % p * inv % p
            new.append(c_old + mod * t)
        acc = new
        mod *= p
    half = mod // 2
    coeffs = [c - mod if c > half else c for c in acc]
    return IntPolynomial(coeffs)


def _charpoly_fraction_free(a: np.ndarray) -> IntPolynomial:
    """Faddeev-LeVerrier over exact integers, fine for tiny matrices."""
    n = a.shape[0]
    A = [[int(x) for x in row] for row in a]

    def matmul(X, Y):
        return [[sum(X[i][k] * Y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    M = [[0] * n for _ in range(n)]
    c = 1
    for k in range(1, n + 1):
        for i in range(n):
            M[i][i] += c
        M = matmul(A, M)
        tr = sum(M[i][i] for i in range(n))
        c = Fraction(-tr, k)
        assert c.denominator == 1
        c = int(c)
        coeffs[n - k] = c
    return IntPolynomial(coeffs)
