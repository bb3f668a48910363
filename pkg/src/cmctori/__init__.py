"""Spectral curves of finite-type sinh-Gordon solutions and the numerical
search for constant mean curvature tori in the 3-sphere.

The pipeline: build a hyperelliptic curve y^2 = lambda a(lambda) from roots
in the punctured unit disk (``from_roots``), construct adapted homology
cycles (``adapted_homology``), solve for the two-dimensional admissible
polynomial plane (``compute_b_basis``), evaluate its period image in
R^(g+2) (``grassmann_plane``), and drive that plane onto integer vectors
(``newton_refine`` / ``certify``).  ``deform`` grows the genus by handle
attachment; ``invariants`` classifies curves by discriminant and residue
sums.
"""

from .bspace import BBasis, basis_from_coords, compute_b_basis, real_parametrization
from .curve import (
    INFINITY,
    Contour,
    HomologyAtlas,
    SpectralCurve,
    adapted_homology,
    anchored_y_start,
    branch_delta,
    branch_points,
    curve_to_dict,
    from_roots,
    gamma_paths,
    load_curve,
    mirror_root,
    validate,
    y_continue,
)
from .deform import (
    HandleFamily,
    attach_handle,
    b_limit_polys,
    build_handle_family,
    deform_b_family,
    handle_limit_check,
    track_f_degree,
)
from .invariants import (
    ClassLabel,
    align_basis_at,
    c_polynomials,
    classify,
    discriminant_delta,
    f_degree,
    level_sum,
    mobius_act,
    residue_sum,
)
from .periods import (
    PeriodVector,
    QuadratureConfig,
    a_periods,
    b_periods,
    gamma_periods,
    integrate_theta,
    integrate_theta_many,
    period_table,
    phi_vector,
)
from .polyalg import CPoly, coeffs_close, resultant, roots, star, wronskian
from .search import (
    NewtonOptions,
    PlaneFrame,
    TorusCertificate,
    certificate_to_dict,
    certify,
    density_scan,
    grassmann_plane,
    nearest_rational_plane,
    newton_refine,
    plane_distance,
    revalidate_certificate,
    sample_curve,
    search_torus,
)

__version__ = "0.1.0"
