"""Fourier grid utilities on the periodic 4-dimensional base.

Fields live on uniform n^4 grids over [0, 2pi)^4, axes ordered
(x1, y1, x2, y2).  Differentiation is spectral; on even grids the unmatched
Nyquist mode has no faithful derivative and its multiplier is set to zero,
and the solver modules keep all working fields Nyquist-free so that the
discrete complex has exactly the cohomology of the torus.
"""

from __future__ import annotations

import numpy as np

AXES = (0, 1, 2, 3)
TWO_PI = 2.0 * np.pi

_wavenumber_cache: dict = {}


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in fft order, Nyquist zeroed on even grids."""
    k = _wavenumber_cache.get(n)
    if k is None:
        k = np.fft.fftfreq(n) * n
        if n % 2 == 0:
            k[n // 2] = 0.0
        k = k.astype(np.float64)
        k.setflags(write=False)
        _wavenumber_cache[n] = k
    return k


def node_coordinates(n: int) -> np.ndarray:
    """(n,n,n,n,4) array of node coordinates in [0, 2pi)."""
    x = TWO_PI * np.arange(n) / n
    grids = np.meshgrid(x, x, x, x, indexing="ij")
    return np.stack(grids, axis=-1)


def quad_weight(n: int) -> float:
    """Product trapezoidal (= exact spectral) quadrature weight per node."""
    return (TWO_PI / n) ** 4


def partials(values: np.ndarray, n: int) -> list[np.ndarray]:
    """All four spectral partial derivatives of a (n,n,n,n,...) field.

    Returns a list indexed by axis; real input gives real output.
    """
    spec = np.fft.fftn(values, axes=AXES)
    k = wavenumbers(n)
    out = []
    for ax in AXES:
        shape = [1, 1, 1, 1] + [1] * (values.ndim - 4)
        shape[ax] = n
        mult = (1j * k).reshape(shape)
        der = np.fft.ifftn(spec * mult, axes=AXES)
        out.append(der.real if np.isrealobj(values) else der)
    return out


def nyquist_project(values: np.ndarray, n: int) -> np.ndarray:
    """Remove all Nyquist-plane content (identity on odd grids)."""
    if n % 2 == 1:
        return values.copy()
    spec = np.fft.fftn(values, axes=AXES)
    for ax in AXES:
        idx = [slice(None)] * spec.ndim
        idx[ax] = n // 2
        spec[tuple(idx)] = 0.0
    out = np.fft.ifftn(spec, axes=AXES)
    return out.real if np.isrealobj(values) else out


def band_project(values: np.ndarray, n: int, kmax: int) -> np.ndarray:
    """Keep only modes with |k_axis| <= kmax along every axis."""
    spec = np.fft.fftn(values, axes=AXES)
    k = np.abs(np.fft.fftfreq(n) * n)
    keep = k <= kmax
    if n % 2 == 0:
        keep[n // 2] = False
    for ax in AXES:
        shape = [1] * spec.ndim
        shape[ax] = n
        spec = spec * keep.reshape(shape)
    out = np.fft.ifftn(spec, axes=AXES)
    return out.real if np.isrealobj(values) else out


def max_band(values: np.ndarray, n: int, kmax: int) -> float:
    """Largest spectral magnitude beyond |k| <= kmax (diagnostic)."""
    spec = np.fft.fftn(values, axes=AXES) / n**4
    k = np.abs(np.fft.fftfreq(n) * n)
    outside = np.zeros((n,) * 4, dtype=bool)
    for ax in AXES:
        shape = [1] * 4
        shape[ax] = n
        outside |= (k > kmax).reshape(shape)
    if values.ndim > 4:
        outside = np.broadcast_to(
            outside[(...,) + (None,) * (values.ndim - 4)], spec.shape
        )
    return float(np.max(np.abs(spec[outside]), initial=0.0))


def resample(values: np.ndarray, n_old: int, n_new: int) -> np.ndarray:
    """Exact trigonometric resampling between grids.

    The input must be Nyquist-free and band-limited to
    min((n_old-1)//2, (n_new-1)//2); under that condition the result samples
    the same trigonometric polynomial on the new grid.
    """
    spec = np.fft.fftn(values, axes=AXES)
    spec = np.fft.fftshift(spec, axes=AXES)
    half_old = (n_old - 1) // 2
    half_new = (n_new - 1) // 2
    half = min(half_old, half_new)
    new_shape = (n_new,) * 4 + values.shape[4:]
    out_spec = np.zeros(new_shape, dtype=complex)
    c_old = n_old // 2
    c_new = n_new // 2
    src = tuple(slice(c_old - half, c_old + half + 1) for _ in AXES)
    dst = tuple(slice(c_new - half, c_new + half + 1) for _ in AXES)
    out_spec[dst] = spec[src]
    out_spec = np.fft.ifftshift(out_spec, axes=AXES)
    out = np.fft.ifftn(out_spec, axes=AXES) * (n_new / n_old) ** 4
    return out.real if np.isrealobj(values) else out
