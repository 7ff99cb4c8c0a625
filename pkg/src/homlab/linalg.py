"""Exact dense linear algebra over prime fields F_p.

All arithmetic is integer arithmetic on int64 numpy arrays with entries kept
reduced modulo a prime p < 2**16, so every rank, kernel and solution is exact.
Subspaces are normalized to reduced row echelon form, which makes subspace
equality a plain entrywise comparison.
"""

import numpy as np

from .errors import HomlabError

MAX_PRIME = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _check_modulus(p):
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise HomlabError(f"modulus {p!r} is not prime")
    if p >= MAX_PRIME:
        raise HomlabError(f"modulus {p} exceeds the supported bound {MAX_PRIME}")
    return int(p)


def inv_mod(x: int, p: int) -> int:
    """Multiplicative inverse of x modulo the prime p."""
    x %= p
    if x == 0:
        raise ZeroDivisionError("inverse of 0 mod p")
    return pow(x, p - 2, p)


class Mat:
    """Immutable dense matrix over F_p.

    Entries are stored reduced (0 <= e < p) in a read-only int64 array.
    """

    __slots__ = ("a", "p")

    def __init__(self, entries, p, _reduce=True):
        p = _check_modulus(p)
        a = np.array(entries, dtype=np.int64)
        if a.ndim != 2:
            raise HomlabError(f"matrix must be 2-dimensional, got shape {a.shape}")
        if _reduce:
            a %= p
        a.setflags(write=False)
        self.a = a
        self.p = p

    @classmethod
    def zeros(cls, rows, cols, p):
        return cls(np.zeros((rows, cols), dtype=np.int64), p, _reduce=False)

    @classmethod
    def identity(cls, n, p):
        return cls(np.eye(n, dtype=np.int64), p, _reduce=False)

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def T(self):
        return Mat(self.a.T.copy(), self.p, _reduce=False)

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if other.p != self.p:
                raise HomlabError("modulus mismatch")
            return Mat((self.a @ other.a) % self.p, self.p, _reduce=False)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Mat):
            return Mat((self.a + other.a) % self.p, self.p, _reduce=False)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Mat):
            return Mat((self.a - other.a) % self.p, self.p, _reduce=False)
        return NotImplemented

    def __neg__(self):
        return Mat((-self.a) % self.p, self.p, _reduce=False)

    def scale(self, c):
        return Mat((self.a * (c % self.p)) % self.p, self.p, _reduce=False)

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.p == other.p
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def is_zero(self):
        return not self.a.any()

    def rank(self):
        return rref_array(self.a, self.p)[1]

    def is_invertible(self):
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self):
        if self.rows != self.cols:
            raise HomlabError("inverse of a non-square matrix")
        aug = np.hstack([self.a, np.eye(self.rows, dtype=np.int64)])
        red, rank, _ = rref_array(aug, self.p)
        if rank < self.rows or not np.array_equal(
            red[:, : self.rows], np.eye(self.rows, dtype=np.int64)
        ):
            raise HomlabError("matrix is singular")
        return Mat(red[:, self.rows :], self.p, _reduce=False)

    def __repr__(self):
        return f"Mat(p={self.p}, {self.a.tolist()})"


def rref_array(a: np.ndarray, p: int):
    """Reduced row echelon form of an int64 array mod p.

    Returns (rref, rank, pivot_columns). Pure function; does not modify a.
    """
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = inv_mod(int(a[r, c]), p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        # one outer-product update clears the pivot column everywhere
        a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    return a, r, tuple(pivots)


def rref(m: Mat):
    """Canonical reduced row echelon form: (Mat, rank, pivot columns)."""
    red, rank, pivots = rref_array(m.a, m.p)
    return Mat(red, m.p, _reduce=False), rank, pivots


class Subspace:
    """Subspace of F_p^n with a canonical RREF basis.

    Canonicity makes equality of subspaces an entrywise comparison of bases.
    """

    __slots__ = ("ambient_dim", "basis", "pivots", "p")

    def __init__(self, ambient_dim, basis: Mat, pivots):
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots
        self.p = basis.p

    @classmethod
    def from_rows(cls, rows, p, ambient_dim=None):
        """Span of the given row vectors (any array-like, need not be independent)."""
        a = np.array(rows, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.size == 0 and ambient_dim is None:
            raise HomlabError("ambient dimension required for an empty spanning set")
        n = ambient_dim if ambient_dim is not None else a.shape[1]
        if a.size == 0:
            a = a.reshape(0, n)
        red, rank, pivots = rref_array(a % p, p)
        return cls(n, Mat(red[:rank], p, _reduce=False), pivots)

    @classmethod
    def zero(cls, ambient_dim, p):
        return cls.from_rows(np.zeros((0, ambient_dim), dtype=np.int64), p, ambient_dim)

    @classmethod
    def full(cls, ambient_dim, p):
        return cls.from_rows(np.eye(ambient_dim, dtype=np.int64), p, ambient_dim)

    @property
    def dim(self):
        return self.basis.rows

    def is_zero(self):
        return self.dim == 0

    def reduce(self, vec):
        """Residual of vec after eliminating all pivot coordinates."""
        v = np.array(vec, dtype=np.int64) % self.p
        b = self.basis.a
        if self.dim:
            coeffs = v[list(self.pivots)]
            v = (v - coeffs @ b) % self.p
        return v

    def contains(self, vec) -> bool:
        return not self.reduce(vec).any()

    def coordinates(self, vec):
        """Coefficients of vec on the canonical basis, or None if not in the span."""
        v = np.array(vec, dtype=np.int64) % self.p
        if self.dim == 0:
            return None if v.any() else np.zeros(0, dtype=np.int64)
        coeffs = v[list(self.pivots)]
        if ((v - coeffs @ self.basis.a) % self.p).any():
            return None
        return coeffs

    def coordinates_matrix(self, mat):
        """Coordinates of each row of mat, or None if some row is outside."""
        m = np.array(mat, dtype=np.int64) % self.p
        if m.ndim == 1:
            m = m.reshape(1, -1)
        if self.dim == 0:
            return None if m.any() else np.zeros((m.shape[0], 0), dtype=np.int64)
        coeffs = m[:, list(self.pivots)]
        if ((m - coeffs @ self.basis.a) % self.p).any():
            return None
        return coeffs

    def contains_space(self, other) -> bool:
        if other.dim == 0:
            return True
        return self.coordinates_matrix(other.basis.a) is not None

    def add(self, other):
        if self.ambient_dim != other.ambient_dim or self.p != other.p:
            raise HomlabError("subspace ambient mismatch")
        stacked = np.vstack([self.basis.a, other.basis.a])
        return Subspace.from_rows(stacked, self.p, self.ambient_dim)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"


def kernel_basis(m: Mat) -> Subspace:
    """The solution space {v : m @ v = 0}, as a canonical subspace of F_p^cols."""
    red, rank, pivots = rref_array(m.a, m.p)
    cols = m.cols
    free = [c for c in range(cols) if c not in set(pivots)]
    if not free:
        return Subspace.zero(cols, m.p)
    vecs = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        vecs[k, f] = 1
        for i, c in enumerate(pivots):
            vecs[k, c] = (-red[i, f]) % m.p
    return Subspace.from_rows(vecs, m.p, cols)


def solve(m: Mat, b):
    """Some x with m @ x = b, or None if b is outside the column space.

    Deterministic: free variables are set to 0 under rref pivoting.
    """
    bv = np.array(b, dtype=np.int64).reshape(-1) % m.p
    if bv.shape[0] != m.rows:
        raise HomlabError("dimension mismatch in solve")
    aug = np.hstack([m.a, bv.reshape(-1, 1)])
    red, rank, pivots = rref_array(aug, m.p)
    if m.cols in pivots:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = red[i, m.cols]
    return x


def row_space(m: Mat) -> Subspace:
    return Subspace.from_rows(m.a, m.p, m.cols)


def column_space(m: Mat) -> Subspace:
    return Subspace.from_rows(m.a.T, m.p, m.rows)


def hstack(mats):
    mats = list(mats)
    p = mats[0].p
    return Mat(np.hstack([m.a for m in mats]), p, _reduce=False)


def vstack(mats):
    mats = list(mats)
    p = mats[0].p
    return Mat(np.vstack([m.a for m in mats]), p, _reduce=False)


def block_diag(mats, p=None):
    mats = list(mats)
    if not mats:
        raise HomlabError("block_diag of an empty list needs a modulus")
    p = mats[0].p
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r : r + m.rows, c : c + m.cols] = m.a
        r += m.rows
        c += m.cols
    return Mat(out, p, _reduce=False)
