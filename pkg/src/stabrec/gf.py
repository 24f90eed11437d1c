"""Exact arithmetic and linear algebra over finite fields GF(p^k) with q = p^k <= 256.

Field elements are plain Python ints (and numpy integer arrays) in the range
0..q-1.  For k > 1 an element encodes the coefficient vector of a polynomial
in the generator t, in base p: n = sum(c_i * p**i) represents sum(c_i * t**i).
Arithmetic for extension fields goes through dense q x q lookup tables built
once per field; prime fields use modular integer arithmetic directly.

All matrix routines are exact and deterministic.  Matrices are numpy arrays
of dtype int16 (int64 internally where products can overflow).
"""

from __future__ import annotations

import numpy as np

# Default moduli for extension fields, as tuples of coefficients of the
# monic irreducible polynomial, lowest degree first, highest coefficient 1.
# These follow the standard (Conway polynomial) choices.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113,
                 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181,
                 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251)


class FieldError(ValueError):
    pass


class Field:
    """The finite field GF(p^k), q = p^k <= 256.

    Scalar methods (add, mul, ...) accept ints or numpy arrays elementwise.
    """

    def __init__(self, p: int, k: int = 1, modulus: tuple[int, ...] | None = None):
        if p not in _SMALL_PRIMES:
            raise FieldError(f"p = {p} is not a prime <= 251")
        if k < 1 or p ** k > 256:
            raise FieldError(f"q = {p}**{k} out of supported range (q <= 256)")
        self.p = p
        self.k = k
        self.q = p ** k
        if k == 1:
            self.modulus = None
            self._add_t = self._mul_t = self._neg_t = self._inv_t = None
            self._inv_cache = self._build_prime_inverses()
        else:
            if modulus is None:
                modulus = DEFAULT_MODULI[(p, k)]
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise FieldError("modulus must be monic of degree k")
            self.modulus = modulus
            self._build_extension_tables()

    # -- construction ------------------------------------------------------

    def _build_prime_inverses(self) -> np.ndarray:
        a = np.arange(self.p, dtype=np.int64)
        inv = np.zeros(self.p, dtype=np.int16)
        inv[1:] = np.vectorize(lambda x: pow(int(x), self.p - 2, self.p))(a[1:])
        return inv

    def _build_extension_tables(self) -> None:
        p, k, q = self.p, self.k, self.q
        digits = np.zeros((q, k), dtype=np.int64)
        n = np.arange(q)
        for i in range(k):
            digits[:, i] = (n // p ** i) % p
        powers = p ** np.arange(k, dtype=np.int64)

        add_digits = (digits[:, None, :] + digits[None, :, :]) % p
        self._add_t = (add_digits @ powers).astype(np.int16)
        self._neg_t = (((-digits) % p) @ powers).astype(np.int16)

        # t^m mod modulus for m < 2k-1, as digit vectors of length k
        red = np.zeros((2 * k - 1, k), dtype=np.int64)
        for m in range(k):
            red[m, m] = 1
        top = [(-c) % p for c in self.modulus[:k]]  # t^k = -(m_0 + ... + m_{k-1} t^{k-1})
        for m in range(k, 2 * k - 1):
            prev = red[m - 1]
            shifted = np.zeros(k, dtype=np.int64)
            shifted[1:] = prev[:-1]
            shifted = (shifted + prev[-1] * np.asarray(top)) % p
            red[m] = shifted

        prod = np.zeros((q, q, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                coef = digits[:, None, i] * digits[None, :, j] % p
                prod = (prod + coef[:, :, None] * red[i + j][None, None, :]) % p
        self._mul_t = (prod @ powers).astype(np.int16)

        # invertibility of every nonzero element certifies irreducibility
        self._inv_t = np.zeros(q, dtype=np.int16)
        rows, cols = np.nonzero(self._mul_t == 1)
        self._inv_t[rows] = cols
        if np.count_nonzero(self._inv_t[1:]) != q - 1:
            raise FieldError("modulus is not irreducible over GF(p)")

    # -- scalar / elementwise arithmetic -----------------------------------

    def add(self, a, b):
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.p
        return self._add_t[np.asarray(a, dtype=np.intp), np.asarray(b, dtype=np.intp)]

    def neg(self, a):
        if self.k == 1:
            return (-np.asarray(a, dtype=np.int64)) % self.p
        return self._neg_t[np.asarray(a, dtype=np.intp)]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p
        return self._mul_t[np.asarray(a, dtype=np.intp), np.asarray(b, dtype=np.intp)]

    def inv(self, a: int) -> int:
        a = int(a)
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.k == 1:
            return int(self._inv_cache[a])
        return int(self._inv_t[a])

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        r, b = 1, int(a)
        while n:
            if n & 1:
                r = int(self.mul(r, b))
            b = int(self.mul(b, b))
            n >>= 1
        return r

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    # -- matrices -----------------------------------------------------------

    def mat(self, rows, shape: tuple[int, int] | None = None) -> np.ndarray:
        a = np.asarray(rows, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise FieldError(f"expected a matrix, got ndim={a.ndim}")
        if self.k == 1:
            a = a % self.p
        elif a.size and (a.min() < 0 or a.max() >= self.q):
            raise FieldError("matrix entries out of field range")
        return a.astype(np.int16)

    def zeros(self, m: int, n: int) -> np.ndarray:
        return np.zeros((m, n), dtype=np.int16)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int16)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int16)
        b = np.asarray(b, dtype=np.int16)
        if a.shape[1] != b.shape[0]:
            raise FieldError(f"shape mismatch {a.shape} @ {b.shape}")
        if self.k == 1:
            return ((a.astype(np.int64) @ b.astype(np.int64)) % self.p).astype(np.int16)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int16)
        for t in range(a.shape[1]):
            term = self._mul_t[a[:, t].astype(np.intp)[:, None], b[t, :].astype(np.intp)[None, :]]
            out = self._add_t[out.astype(np.intp), term.astype(np.intp)]
        return out

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        return np.asarray(self.mul(int(c), np.asarray(a)), dtype=np.int16)

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Kronecker product with entry products taken in the field."""
        a = np.asarray(a, dtype=np.int16)
        b = np.asarray(b, dtype=np.int16)
        m, n = a.shape
        r, s = b.shape
        out = np.asarray(self.mul(a[:, None, :, None], b[None, :, None, :]), dtype=np.int16)
        return out.reshape(m * r, n * s)

    def add_mat(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.asarray(self.add(a, b), dtype=np.int16)

    def sub_mat(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.asarray(self.sub(a, b), dtype=np.int16)

    def rref(self, a: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
        """Reduced row echelon form.  Pivot choice: leftmost column, then
        smallest row index.  Returns (rref matrix, pivot column tuple)."""
        m = np.array(a, dtype=np.int16)
        if m.ndim != 2:
            raise FieldError("rref expects a matrix")
        nrows, ncols = m.shape
        pivots = []
        r = 0
        for c in range(ncols):
            if r >= nrows:
                break
            nz = np.nonzero(m[r:, c])[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                m[[r, i]] = m[[i, r]]
            piv = int(m[r, c])
            if piv != 1:
                m[r] = np.asarray(self.mul(self.inv(piv), m[r]), dtype=np.int16)
            col = m[:, c].copy()
            col[r] = 0
            rows_to_fix = np.nonzero(col)[0]
            if rows_to_fix.size:
                factors = m[rows_to_fix, c]
                update = np.asarray(self.mul(factors[:, None], m[r][None, :]), dtype=np.int16)
                m[rows_to_fix] = np.asarray(self.sub(m[rows_to_fix], update), dtype=np.int16)
            pivots.append(c)
            r += 1
        return m, tuple(pivots)

    def rank(self, a: np.ndarray) -> int:
        return len(self.rref(a)[1])

    def row_space(self, a: np.ndarray) -> np.ndarray:
        """Canonical basis (RREF rows, zero rows dropped) of the row space."""
        r, piv = self.rref(a)
        return r[: len(piv)]

    def kernel(self, a: np.ndarray) -> np.ndarray:
        """Canonical (RREF) basis of the right kernel {x : a x = 0}, as rows."""
        a = np.asarray(a, dtype=np.int16)
        nrows, ncols = a.shape
        r, piv = self.rref(a)
        free = [c for c in range(ncols) if c not in piv]
        if not free:
            return np.zeros((0, ncols), dtype=np.int16)
        basis = np.zeros((len(free), ncols), dtype=np.int16)
        for idx, fc in enumerate(free):
            basis[idx, fc] = 1
            for ri, pc in enumerate(piv):
                basis[idx, pc] = self.neg(int(r[ri, fc]))
        return self.row_space(basis)

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
        """One solution x of a x = b (free variables set to 0), or None."""
        a = np.asarray(a, dtype=np.int16)
        b = np.asarray(b, dtype=np.int16).reshape(-1)
        if b.shape[0] != a.shape[0]:
            raise FieldError("rhs length mismatch")
        aug = np.concatenate([a, b[:, None]], axis=1)
        r, piv = self.rref(aug)
        ncols = a.shape[1]
        if ncols in piv:
            return None
        x = np.zeros(ncols, dtype=np.int16)
        for ri, pc in enumerate(piv):
            x[pc] = r[ri, ncols]
        return x

    def solve_matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
        """One solution X of a X = b for matrix right-hand side, or None."""
        a = np.asarray(a, dtype=np.int16)
        b = np.asarray(b, dtype=np.int16)
        aug = np.concatenate([a, b], axis=1)
        r, piv = self.rref(aug)
        ncols = a.shape[1]
        if any(pc >= ncols for pc in piv):
            return None
        x = np.zeros((ncols, b.shape[1]), dtype=np.int16)
        for ri, pc in enumerate(piv):
            x[pc] = r[ri, ncols:]
        return x

    def matinv(self, a: np.ndarray) -> np.ndarray | None:
        a = np.asarray(a, dtype=np.int16)
        n = a.shape[0]
        if a.shape != (n, n):
            raise FieldError("matinv expects a square matrix")
        x = self.solve_matrix(a, self.eye(n))
        if x is None:
            return None
        return x

    def is_invertible(self, a: np.ndarray) -> bool:
        a = np.asarray(a)
        return a.shape[0] == a.shape[1] and self.rank(a) == a.shape[0]


def coset_rank_maximize(field: Field, base: np.ndarray, directions: list[np.ndarray],
                        *, target_rank: int | None = None, seed: int = 0,
                        tries: int = 64, exhaustive_limit: int = 1 << 16):
    """Maximize rank over the affine coset {base + sum c_i directions[i]}.

    Exhaustive when q**len(directions) <= exhaustive_limit, otherwise greedy
    coordinate ascent from the base point plus seeded randomized restarts.
    Returns (matrix, coeffs, rank, exhaustive_flag).  Deterministic for a
    fixed seed.  When exhaustive_flag is True the returned rank is the true
    maximum over the coset.
    """
    base = np.asarray(base, dtype=np.int16)
    dirs = [np.asarray(d, dtype=np.int16) for d in directions]
    n = len(dirs)
    full = min(base.shape) if base.size else 0
    if target_rank is None:
        target_rank = full

    def at(coeffs):
        m = base
        for c, d in zip(coeffs, dirs):
            if c:
                m = field.add_mat(m, field.scale(c, d))
        return m

    best_c = tuple([0] * n)
    best_m = base.copy()
    best_r = field.rank(base)
    if n == 0 or best_r >= target_rank:
        return best_m, best_c, best_r, True

    if field.q ** n <= exhaustive_limit:
        coeffs = [0] * n
        while True:
            i = 0
            while i < n and coeffs[i] == field.q - 1:
                coeffs[i] = 0
                i += 1
            if i == n:
                break
            coeffs[i] += 1
            m = at(coeffs)
            r = field.rank(m)
            if r > best_r:
                best_r, best_m, best_c = r, m, tuple(coeffs)
                if best_r >= target_rank:
                    return best_m, best_c, best_r, True
        return best_m, best_c, best_r, True

    rng = np.random.default_rng(seed)

    def ascend(start):
        cur = list(start)
        cur_m = at(cur)
        cur_r = field.rank(cur_m)
        improved = True
        while improved and cur_r < target_rank:
            improved = False
            for i in range(n):
                orig = cur[i]
                for c in field.elements():
                    if c == orig:
                        continue
                    cur[i] = c
                    m = at(cur)
                    r = field.rank(m)
                    if r > cur_r:
                        cur_r, cur_m = r, m
                        improved = True
                        break
                else:
                    cur[i] = orig
                    continue
                break
        return cur_m, tuple(cur), cur_r

    m, c, r = ascend([0] * n)
    if r > best_r:
        best_m, best_c, best_r = m, c, r
    t = 0
    while best_r < target_rank and t < tries:
        start = [int(x) for x in rng.integers(0, field.q, size=n)]
        m, c, r = ascend(start)
        if r > best_r:
            best_m, best_c, best_r = m, c, r
        t += 1
    return best_m, best_c, best_r, False


def subspace_contains(field: Field, space_rows: np.ndarray, vec: np.ndarray) -> bool:
    """Whether vec lies in the row space of space_rows."""
    space_rows = np.asarray(space_rows, dtype=np.int16)
    vec = np.asarray(vec, dtype=np.int16).reshape(1, -1)
    if not np.any(vec):
        return True
    r0 = field.rank(space_rows)
    r1 = field.rank(np.concatenate([space_rows, vec], axis=0))
    return r0 == r1


def subspace_intersection(field: Field, rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """Canonical basis of (row space of a) intersect (row space of b)."""
    a = field.row_space(rows_a)
    b = field.row_space(rows_b)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, rows_a.shape[1]), dtype=np.int16)
    stacked = np.concatenate([a, b], axis=0)
    ker = field.kernel(stacked.T)
    if ker.shape[0] == 0:
        return np.zeros((0, a.shape[1]), dtype=np.int16)
    combo = field.matmul(ker[:, : a.shape[0]], a)
    return field.row_space(combo)
