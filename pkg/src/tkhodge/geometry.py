"""Invariant geometric structures on the flat-base circle-bundle model.

The model is a compact 5-manifold fibering in circles over a 4-torus, with
contact form whose curvature is twice the standard symplectic form on the
base.  Invariant data then lives entirely on the base: an endomorphism
field J with J^2 = -1 compatible with the symplectic form, the metric
g = omega0(., J.), and an adapted orthonormal coframe.  Fields restricted
to the contact distribution are identified with base forms throughout.

Perturbed structures are generated by conjugating the standard J with the
exponential of a random symplectic-algebra-valued trigonometric polynomial.
The random coefficients depend only on (seed, mode_cutoff), never on the
grid, so the same continuum structure can be sampled exactly on any grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import scipy.linalg

from . import spectral
from .errors import InvalidStructure

#: base symplectic form in coordinates (x1, y1, x2, y2)
OMEGA0 = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)

#: standard compatible endomorphism: d/dx -> d/dy
J0_STD = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)

#: constant symplectic form as a 2-form in lexicographic pair components
#: ((0,1),(0,2),(0,3),(1,2),(1,3),(2,3)): dx1^dy1 + dx2^dy2
OMEGA0_LEX = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 1.0])


@dataclass(frozen=True)
class KContactModel:
    """Descriptor of the regular model over the flat 4-torus.

    The base has side 2pi in each of the four coordinates, the fiber circle
    has unit length normalization, and fiber integration is trivial: pairing
    a 4-form against the contact form integrates the 4-form over the base.
    """

    grid: int
    base_period: float = spectral.TWO_PI
    fiber_normalization: float = 1.0


@dataclass
class StructureProvenance:
    kind: str  # "flat" | "perturbed"
    seed: int = 0
    amplitude: float = 0.0
    mode_cutoff: int = 0
    residuals: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "amplitude": self.amplitude,
            "mode_cutoff": self.mode_cutoff,
            "residuals": dict(self.residuals),
        }


@dataclass
class StructureField:
    """Sampled invariant structure: endomorphism, metric, adapted coframe.

    Arrays have shape (n,n,n,n,4,4).  coframe rows are the adapted coframe
    (t1, p1, t2, p2); frame columns are the dual vector fields.  Instances
    are treated as immutable after construction; derived per-degree
    operators are memoized in _cache.
    """

    model: KContactModel
    n: int
    j: np.ndarray
    g: np.ndarray
    coframe: np.ndarray
    frame: np.ndarray
    provenance: StructureProvenance
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def nodes(self) -> int:
        return self.n**4

    def mat(self, name: str) -> np.ndarray:
        """Node-major (M,4,4) view of one of the matrix fields."""
        return getattr(self, name).reshape(self.nodes, 4, 4)

    def cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def refined(self, n_new: int) -> "StructureField":
        """The same continuum structure sampled on an n_new grid."""
        if n_new == self.n:
            return self
        key = ("refined", n_new)
        if key not in self._cache:
            p = self.provenance
            if p.kind == "flat":
                s = _build_flat(n_new)
            else:
                s = _build_perturbed(
                    n_new, p.seed, p.amplitude, p.mode_cutoff
                )
            self._cache[key] = s
        return self._cache[key]


def _sym_basis() -> np.ndarray:
    """Fixed basis of symmetric 4x4 matrices (lex upper triangle order)."""
    out = []
    for i in range(4):
        for j in range(i, 4):
            m = np.zeros((4, 4))
            m[i, j] += 1.0
            m[j, i] += 1.0 if i != j else 0.0
            out.append(m)
    return np.array(out)


def _mode_list(cutoff: int) -> np.ndarray:
    """Half-space representatives of nonzero modes with |k_i| <= cutoff."""
    modes = []
    rng = range(-cutoff, cutoff + 1)
    for k in product(rng, rng, rng, rng):
        if k == (0, 0, 0, 0):
            continue
        first = next(x for x in k if x != 0)
        if first > 0:
            modes.append(k)
    return np.array(modes, dtype=np.int64)


def _series_field(n: int, seed: int, amplitude: float, cutoff: int):
    """Evaluate the random symmetric-matrix trigonometric polynomial.

    Returns (M, 4, 4) samples of S(x) with torus root-mean-square Frobenius
    norm exactly equal to amplitude.
    """
    basis = _sym_basis()
    modes = _mode_list(cutoff)
    nmodes = len(modes)
    rng = np.random.default_rng(seed)
    coef_cos = rng.standard_normal((10, nmodes))
    coef_sin = rng.standard_normal((10, nmodes))
    k2 = (modes.astype(float) ** 2).sum(axis=1)
    envelope = np.exp(-(k2 - 1.0) / 2.0)
    coef_cos *= envelope
    coef_sin *= envelope

    # exact mean square over the torus: cos^2 and sin^2 average to 1/2 and
    # distinct modes are orthogonal, as are the basis matrices in Frobenius
    basis_norm2 = (basis**2).sum(axis=(1, 2))
    mean_sq = float(
        (basis_norm2[:, None] * (coef_cos**2 + coef_sin**2) / 2.0).sum()
    )
    scale = amplitude / np.sqrt(mean_sq)

    x = spectral.node_coordinates(n).reshape(-1, 4)
    m_nodes = x.shape[0]
    f = np.zeros((10, m_nodes))
    chunk = 64
    for lo in range(0, nmodes, chunk):
        hi = min(lo + chunk, nmodes)
        theta = modes[lo:hi].astype(float) @ x.T
        f += coef_cos[:, lo:hi] @ np.cos(theta)
        f += coef_sin[:, lo:hi] @ np.sin(theta)
    f *= scale
    s_field = np.einsum("bm,bij->mij", f, basis, optimize=True)
    return s_field


def adapted_coframe(j_mat: np.ndarray, g_mat: np.ndarray):
    """Batched adapted orthonormal (co)frame construction.

    Returns (coframe, frame) with coframe rows (t1, p1, t2, p2) dual to the
    frame columns (E1, J E1, E2, J E2); the frame is g-orthonormal with E1
    the normalized first coordinate vector and E2 the normalized J-invariant
    complement of a coordinate direction.
    """
    m = j_mat.shape[0]

    def gdot(u, v):
        return np.einsum("mi,mij,mj->m", u, g_mat, v, optimize=True)

    e = np.zeros((m, 4))
    e[:, 0] = 1.0
    e1 = e / np.sqrt(gdot(e, e))[:, None]
    f1 = np.einsum("mij,mj->mi", j_mat, e1, optimize=True)

    def reduce_candidate(axis):
        w = np.zeros((m, 4))
        w[:, axis] = 1.0
        u = (
            w
            - gdot(w, e1)[:, None] * e1
            - gdot(w, f1)[:, None] * f1
        )
        return u, gdot(u, u)

    u_a, n_a = reduce_candidate(2)
    u_b, n_b = reduce_candidate(3)
    use_b = n_a < 1e-12
    u = np.where(use_b[:, None], u_b, u_a)
    nrm = np.where(use_b, n_b, n_a)
    e2 = u / np.sqrt(nrm)[:, None]
    f2 = np.einsum("mij,mj->mi", j_mat, e2, optimize=True)

    frame = np.stack([e1, f1, e2, f2], axis=-1)  # columns
    coframe = np.linalg.inv(frame)
    return coframe, frame


def _validate(s: StructureField, tol: float = 1e-10):
    j = s.mat("j")
    g = s.mat("g")
    frame = s.mat("frame")
    coframe = s.mat("coframe")
    eye = np.eye(4)

    res = {}
    res["j_squared"] = float(np.abs(j @ j + eye).max())
    res["symplectic_compat"] = float(
        np.abs(np.einsum("mji,jk,mkl->mil", j, OMEGA0, j) - OMEGA0).max()
    )
    res["metric_symmetry"] = float(np.abs(g - np.swapaxes(g, 1, 2)).max())
    res["metric_det"] = float(np.abs(np.linalg.det(g) - 1.0).max())
    mineig = float(np.linalg.eigvalsh(g).min())
    res["metric_min_eigenvalue"] = mineig
    res["frame_orthonormal"] = float(
        np.abs(np.einsum("mia,mij,mjb->mab", frame, g, frame) - eye).max()
    )
    res["coframe_pairs"] = float(
        max(
            np.abs(coframe[:, 1] + np.einsum("mi,mij->mj", coframe[:, 0], j)).max(),
            np.abs(coframe[:, 3] + np.einsum("mi,mij->mj", coframe[:, 2], j)).max(),
        )
    )
    s.provenance.residuals = res

    bad = {
        k: v
        for k, v in res.items()
        if (k == "metric_min_eigenvalue" and v <= 0.0)
        or (k != "metric_min_eigenvalue" and v > tol)
    }
    if bad:
        raise InvalidStructure(f"structure identities violated: {bad}")


def make_flat_structure(n: int) -> StructureField:
    """Standard flat structure: J0, identity metric, coordinate coframe."""
    if n < 4 or n % 2:
        raise ValueError("grid must be even and at least 4")
    return _build_flat(n)


def _build_flat(n: int) -> StructureField:
    # internal: also serves odd working grids used by the star-route solves
    shape = (n, n, n, n, 4, 4)
    j = np.broadcast_to(J0_STD, shape).copy()
    g = np.broadcast_to(np.eye(4), shape).copy()
    coframe = np.broadcast_to(np.eye(4), shape).copy()
    frame = np.broadcast_to(np.eye(4), shape).copy()
    s = StructureField(
        model=KContactModel(grid=n),
        n=n,
        j=j,
        g=g,
        coframe=coframe,
        frame=frame,
        provenance=StructureProvenance(kind="flat"),
    )
    _validate(s)
    return s


def make_perturbed_structure(
    n: int, seed: int, amplitude: float, mode_cutoff: int = 2
) -> StructureField:
    """Random compatible structure: J = U J0 U^-1 with U = exp(A).

    A(x) = -omega0 S(x) runs over the symplectic algebra as S runs over
    symmetric matrices, so U is symplectic, J stays omega0-compatible, and
    g = omega0(., J.) is symmetric positive definite with det g = 1
    automatically.  amplitude is the torus root-mean-square Frobenius norm
    of A; amplitude 0 reproduces the flat structure exactly.
    """
    if n < 4 or n % 2:
        raise ValueError("grid must be even and at least 4")
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    return _build_perturbed(n, seed, amplitude, mode_cutoff)


def _build_perturbed(
    n: int, seed: int, amplitude: float, mode_cutoff: int
) -> StructureField:
    # internal: also serves odd working grids used by the star-route solves
    if amplitude == 0.0:
        flat = _build_flat(n)
        s = StructureField(
            model=flat.model,
            n=n,
            j=flat.j,
            g=flat.g,
            coframe=flat.coframe,
            frame=flat.frame,
            provenance=StructureProvenance(
                kind="perturbed", seed=seed, amplitude=0.0, mode_cutoff=mode_cutoff
            ),
        )
        _validate(s)
        return s

    s_field = _series_field(n, seed, amplitude, mode_cutoff)
    a_field = -np.einsum("ij,mjk->mik", OMEGA0, s_field, optimize=True)
    u = scipy.linalg.expm(a_field)
    u_inv = np.linalg.inv(u)
    j = u @ J0_STD @ u_inv
    g = OMEGA0 @ j
    # roundoff symmetrization; the raw defect is checked and recorded below
    sym_defect = float(np.abs(g - np.swapaxes(g, 1, 2)).max())
    g = (g + np.swapaxes(g, 1, 2)) / 2.0
    if sym_defect > 1e-10:
        raise InvalidStructure(
            f"metric symmetry defect {sym_defect:.3e} exceeds tolerance"
        )

    coframe, frame = adapted_coframe(j, g)
    shape = (n, n, n, n, 4, 4)
    s = StructureField(
        model=KContactModel(grid=n),
        n=n,
        j=j.reshape(shape),
        g=g.reshape(shape),
        coframe=coframe.reshape(shape),
        frame=frame.reshape(shape),
        provenance=StructureProvenance(
            kind="perturbed", seed=seed, amplitude=amplitude, mode_cutoff=mode_cutoff
        ),
    )
    _validate(s)
    s.provenance.residuals["metric_symmetrization"] = sym_defect
    return s


def nijenhuis_norm(s: StructureField) -> np.ndarray:
    """Pointwise Frobenius norm of the torsion of J on coordinate fields.

    For constant coordinate vector fields X_a, X_b the torsion reduces to
    N^i_ab = J^l_a d_l J^i_b - J^l_b d_l J^i_a
            + J^i_m d_b J^m_a - J^i_m d_a J^m_b,
    computed with spectral derivatives of the sampled J.  Returns an
    (n,n,n,n) field; zero exactly for integrable (e.g. flat) structures.
    """
    jf = s.j
    dj = np.stack(spectral.partials(jf, s.n), axis=-3)  # (..., l, i, j)
    t1 = np.einsum("...la,...lib->...iab", jf, dj, optimize=True)
    n_t = t1 - np.swapaxes(t1, -2, -1)
    t3 = np.einsum("...im,...bma->...iab", jf, dj, optimize=True)
    n_t = n_t + t3 - np.swapaxes(t3, -2, -1)
    return np.sqrt(0.5 * (n_t**2).sum(axis=(-3, -2, -1)))


def save_structure(s: StructureField, path: str):
    """Write the sampled structure to an npz container.

    Layout: scalar n; arrays j, g, coframe of shape (n,n,n,n,4,4) node-major
    in C order with coordinate order (x1, y1, x2, y2); provenance as JSON.
    """
    np.savez_compressed(
        path,
        n=np.int64(s.n),
        j=s.j,
        g=s.g,
        coframe=s.coframe,
        provenance=np.bytes_(json.dumps(s.provenance.as_dict()).encode()),
    )


def load_structure(path: str) -> StructureField:
    with np.load(path) as data:
        n = int(data["n"])
        j = data["j"]
        g = data["g"]
        coframe = data["coframe"]
        prov = json.loads(bytes(data["provenance"]).decode())
    frame = np.linalg.inv(coframe.reshape(-1, 4, 4)).reshape(coframe.shape)
    residuals = prov.pop("residuals", {})
    s = StructureField(
        model=KContactModel(grid=n),
        n=n,
        j=j,
        g=g,
        coframe=coframe,
        frame=frame,
        provenance=StructureProvenance(**prov),
    )
    _validate(s)
    s.provenance.residuals.update(residuals)
    return s
