"""Certified transverse Hodge computations on flat-base contact 5-manifold models.

The package decomposes the degree-2 basic cohomology of a circle-invariant
contact structure over a 4-torus base into invariant / anti-invariant parts
under the structure endomorphism, and into complex bidegree parts, with
solver-side certificates for every reported integer dimension.
"""

__version__ = "0.1.0"

from .frame_algebra import (  # noqa: F401
    ComplexFrameForm2,
    FrameForm2,
    IdentityResult,
    bidegree_bases,
    inner,
    phi_act2,
    project,
    star2,
    verify_span_identities,
    wedge_top,
)
