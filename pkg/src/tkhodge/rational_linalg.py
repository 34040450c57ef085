"""Exact linear algebra over the rationals and Gaussian rationals.

Small dense problems only (the fiberwise algebra is six dimensional), so
everything is plain row reduction with exact pivoting.  Works generically
for any field element supporting +, -, *, /, bool() and equality; in
practice that means fractions.Fraction and GaussianRational below.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class GaussianRational:
    """Element of Q(i): re + im*i with exact rational parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re=0, im=0) -> "GaussianRational":
        return GaussianRational(Fraction(re), Fraction(im))

    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return repr(self.re)
        return f"({self.re}+{self.im}i)"

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)


GI = GaussianRational.of(0, 1)


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(Fraction(x), Fraction(0))
    if isinstance(x, complex):
        raise TypeError("inexact complex not allowed in exact arithmetic")
    raise TypeError(f"cannot coerce {type(x)!r} into Q(i)")


def rref(rows):
    """Reduced row echelon form of a list-of-lists matrix, exact.

    Returns (new_rows, pivot_columns).  Input is not modified.
    """
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def span_contains(rows, vec) -> bool:
    """Whether vec lies in the row span of rows (exact)."""
    return rank(list(rows) + [list(vec)]) == rank(rows)


def span_equal(rows_a, rows_b) -> bool:
    ra, rb = rank(rows_a), rank(rows_b)
    if ra != rb:
        return False
    return rank(list(rows_a) + list(rows_b)) == ra


def intersection_dim(rows_a, rows_b) -> int:
    """dim(span A ∩ span B) = dim A + dim B - dim(A + B), exact."""
    ra, rb = rank(rows_a), rank(rows_b)
    return ra + rb - rank(list(rows_a) + list(rows_b))


def nullspace(rows):
    """Exact basis of the right null space of a list-of-lists matrix."""
    red, pivots = rref(rows)
    if not rows:
        return []
    ncols = len(rows[0])
    zero = None
    for row in rows:
        for x in row:
            zero = x * 0
            break
        if zero is not None:
            break
    one = zero + 1 if zero is not None else 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(v)
    return basis
