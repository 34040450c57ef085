"""Pure numpy implementations of the batched fiberwise kernels.

All functions operate on node-major stacks: the leading axis runs over grid
nodes, trailing axes over fiber components.  The compiled backend in
``_core.pyx`` implements the same signatures for float64 input; this module
is the reference implementation and the fallback, and it also serves complex
dtypes, which the compiled backend does not accept.
"""

import numpy as np

# lexicographic index pairs / triples for 2- and 3-form components on a
# 4-dimensional fiber
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
TRIPLES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))

# (a wedge b) top coefficient for 2-forms in lex pair components:
# sign of the permutation (I, J) when I and J partition {0,1,2,3}
_WEDGE_IDX = []
for _i, _I in enumerate(PAIRS):
    for _j, _J in enumerate(PAIRS):
        if set(_I) & set(_J):
            continue
        perm = _I + _J
        # sign via explicit inversion count on 4 elements
        inv = sum(
            1
            for _a in range(4)
            for _b in range(_a + 1, 4)
            if perm[_a] > perm[_b]
        )
        _WEDGE_IDX.append((_i, _j, -1.0 if inv % 2 else 1.0))


def batch_matvec(mats, vecs):
    """(M, r, c) x (M, c) -> (M, r) fiberwise."""
    return np.einsum("nrc,nc->nr", mats, vecs, optimize=True)


def batch_matvec_t(mats, vecs):
    """(M, r, c) x (M, r) -> (M, c); applies each matrix transposed."""
    return np.einsum("nrc,nr->nc", mats, vecs, optimize=True)


def wedge_pair2(a, b):
    """Top-degree coefficient of the wedge of two 2-forms, fiberwise.

    Components in lexicographic pair order; returns shape (M,).
    """
    out = np.zeros(np.broadcast(a[..., 0], b[..., 0]).shape, dtype=np.result_type(a, b))
    for i, j, s in _WEDGE_IDX:
        out += s * a[..., i] * b[..., j]
    return out


def weighted_block_dot(w, gram, a, b):
    """sum_n w_n * a_n . G_n b_n  for component stacks a, b."""
    gb = np.einsum("nrc,nc->nr", gram, b, optimize=True)
    return float(np.einsum("n,nr,nr->", w, a, gb, optimize=True))


def compound2(mats):
    """Second compound: C[(ab),(ij)] = A[a,i]A[b,j] - A[a,j]A[b,i].

    Input (M, 4, 4), output (M, 6, 6) with lex pair indexing on both axes.
    Multiplicative: compound2(A @ B) = compound2(A) @ compound2(B).
    """
    M = mats.shape[:-2]
    out = np.empty(M + (6, 6), dtype=mats.dtype)
    for r, (a, b) in enumerate(PAIRS):
        for c, (i, j) in enumerate(PAIRS):
            out[..., r, c] = (
                mats[..., a, i] * mats[..., b, j]
                - mats[..., a, j] * mats[..., b, i]
            )
    return out


def compound3(mats):
    """Third compound: 3x3 minors with lex triple indexing, (M,4,4)->(M,4,4)."""
    M = mats.shape[:-2]
    out = np.empty(M + (4, 4), dtype=mats.dtype)
    for r, (a, b, c) in enumerate(TRIPLES):
        for s, (i, j, k) in enumerate(TRIPLES):
            out[..., r, s] = (
                mats[..., a, i]
                * (mats[..., b, j] * mats[..., c, k] - mats[..., b, k] * mats[..., c, j])
                - mats[..., a, j]
                * (mats[..., b, i] * mats[..., c, k] - mats[..., b, k] * mats[..., c, i])
                + mats[..., a, k]
                * (mats[..., b, i] * mats[..., c, j] - mats[..., b, j] * mats[..., c, i])
            )
    return out
