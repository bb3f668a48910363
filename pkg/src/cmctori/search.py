"""Rational-plane search: from a curve to a torus certificate.

The map phi sends the admissible plane of a genus-g curve to a 2-plane in
R^(g+2); the curve closes into a CMC torus datum exactly when that plane is
spanned by integer vectors.  This module evaluates the plane, finds nearby
integer-spanned planes (exhaustive scan at small entry bounds, lattice
reduction for larger ones), refines the curve's roots by a damped Newton
iteration until the plane hits the integer targets, certifies the result at
two quadrature levels, and runs Monte-Carlo density scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bspace import BBasis, compute_b_basis
from .curve import SpectralCurve, adapted_homology, from_roots
from .errors import (
    CertificateError,
    CmctoriError,
    DomainError,
    IllConditionedError,
    RankError,
)
from .invariants import ClassLabel, classify
from .jsonio import complex_pair
from .periods import QuadratureConfig, period_table
from .polyalg import CPoly

__all__ = [
    "PlaneFrame",
    "TorusCertificate",
    "NewtonOptions",
    "NewtonResult",
    "RationalApproximation",
    "grassmann_plane",
    "plane_distance",
    "nearest_rational_plane",
    "newton_refine",
    "certify",
    "revalidate_certificate",
    "certificate_to_dict",
    "sample_curve",
    "density_scan",
    "search_torus",
    "SearchOutcome",
]

TWO_PI = 2.0 * np.pi
CERT_TOL = 1e-8


@dataclass(frozen=True)
class PlaneFrame:
    """Orthonormal frame of the image plane phi(B_a) in R^(g+2)."""

    v1: np.ndarray
    v2: np.ndarray
    phi_matrix: np.ndarray  # raw (g+2) x 2 matrix [phi(b1), phi(b2)]
    basis: BBasis
    residual_imag: float

    @property
    def frame(self) -> np.ndarray:
        return np.stack([self.v1, self.v2], axis=1)


@dataclass(frozen=True)
class RationalApproximation:
    m1: np.ndarray
    m2: np.ndarray
    distance: float


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-8
    max_iter: int = 40
    fd_step: float = 1e-6
    cond_max: float = 1e10
    armijo: float = 1e-4


@dataclass(frozen=True)
class NewtonResult:
    ok: bool
    curve: SpectralCurve | None
    residual: float
    iterations: int
    trace: tuple
    message: str


@dataclass(frozen=True)
class TorusCertificate:
    curve: SpectralCurve
    sym: tuple
    m1: np.ndarray
    m2: np.ndarray
    b1: CPoly
    b2: CPoly
    residual: float
    residual_doubled: float
    quadrature: QuadratureConfig
    classifier: ClassLabel
    seed: int | None = None


@dataclass(frozen=True)
class SearchOutcome:
    ok: bool
    certificate: TorusCertificate | None
    attempts: int
    best_distance: float
    message: str


# ---------------------------------------------------------------------------
# plane evaluation
# ---------------------------------------------------------------------------


def _phi_matrix(curve, basis, atlas, lam1, lam2, cfg):
    """(g+2) x 2 matrix of phi values for (b1, b2), plus symmetry residual."""
    table = period_table(curve, [basis.b1, basis.b2], atlas, cfg, sym=(lam1, lam2))
    raw = np.vstack([table["B"], table["gamma"]]) if table["B"].size else table["gamma"]
    resid = float(np.max(np.abs(raw.real))) / TWO_PI if raw.size else 0.0
    if table["A"].size:
        resid = max(resid, float(np.max(np.abs(table["A"]))))
    return raw.imag / TWO_PI, resid


def grassmann_plane(
    curve: SpectralCurve,
    lam1: complex,
    lam2: complex,
    atlas=None,
    cfg: QuadratureConfig = QuadratureConfig(),
    basis: BBasis | None = None,
) -> PlaneFrame:
    """Orthonormal frame spanning phi(B_a); independent of the basis choice."""
    if atlas is None:
        atlas = adapted_homology(curve)
    if basis is None:
        basis = compute_b_basis(curve, atlas, cfg)
    f, resid = _phi_matrix(curve, basis, atlas, lam1, lam2, cfg)
    q, r = np.linalg.qr(f)
    if abs(r[1, 1]) < 1e-10 * (1.0 + abs(r[0, 0])):
        raise RankError(
            "phi image is rank-deficient: degenerate plane",
            singular_values=np.abs(np.diag(r)),
        )
    return PlaneFrame(
        v1=q[:, 0], v2=q[:, 1], phi_matrix=f, basis=basis, residual_imag=resid
    )


def plane_distance(frame_a: np.ndarray, frame_b: np.ndarray) -> float:
    """Principal-angle distance sqrt(theta_1^2 + theta_2^2) between the spans
    of two (n x 2) full-rank matrices.

    Angles come from the sines (singular values of the projection of one
    frame onto the other's orthogonal complement), which stays accurate for
    nearly identical planes where the cosine formula loses half the digits.
    """
    qa, _ = np.linalg.qr(np.asarray(frame_a, dtype=float))
    qb, _ = np.linalg.qr(np.asarray(frame_b, dtype=float))
    resid = qb - qa @ (qa.T @ qb)
    s = np.linalg.svd(resid, compute_uv=False)
    s = np.clip(s, 0.0, 1.0)
    theta = np.arcsin(s)
    return float(np.sqrt(np.sum(theta**2)))


# ---------------------------------------------------------------------------
# nearest rational plane
# ---------------------------------------------------------------------------


def _primitive_vectors(dim: int, q: int):
    """All primitive integer vectors with entries in [-q, q], one per +-pair."""
    grids = np.meshgrid(*([np.arange(-q, q + 1)] * dim), indexing="ij")
    vs = np.stack([g.ravel() for g in grids], axis=1)
    vs = vs[np.any(vs != 0, axis=1)]
    # canonical sign: first nonzero entry positive
    first = np.argmax(vs != 0, axis=1)
    signs = np.sign(vs[np.arange(len(vs)), first])
    vs = vs * signs[:, None]
    g = np.gcd.reduce(np.abs(vs), axis=1)
    vs = vs[g == 1]
    return np.unique(vs, axis=0)


def _lll_candidates(v_frame: np.ndarray, q: int, dim: int):
    """Short integer vectors nearly inside the plane, via lattice reduction
    of the embedding (x, w * x (I - V V^T)) over several penalty weights."""
    p_perp = np.eye(dim) - v_frame @ v_frame.T
    cands = []
    for w in (1e2, 1e3, 1e4, 1e5):
        x = np.eye(dim, dtype=np.int64)
        x = _lll_reduce(x, p_perp, w)
        for row in x:
            m = int(np.max(np.abs(row)))
            if 0 < m <= q:
                cands.append(np.asarray(row, dtype=np.int64))
            # small combinations of reduced rows often help
        for i in range(dim):
            for j in range(i + 1, dim):
                for c in (x[i] + x[j], x[i] - x[j]):
                    m = int(np.max(np.abs(c)))
                    if 0 < m <= q:
                        cands.append(np.asarray(c, dtype=np.int64))
    if not cands:
        return np.zeros((0, dim), dtype=np.int64)
    vs = np.stack(cands)
    first = np.argmax(vs != 0, axis=1)
    signs = np.sign(vs[np.arange(len(vs)), first])
    vs = vs * signs[:, None]
    g = np.gcd.reduce(np.abs(vs), axis=1)
    vs = vs[g >= 1]
    vs = vs // np.maximum(g[g >= 1][:, None], 1)
    return np.unique(vs, axis=0)


def _lll_reduce(x: np.ndarray, p_perp: np.ndarray, weight: float, delta: float = 0.75):
    """Textbook LLL on the rows of the embedded basis, tracking the integer
    rows exactly."""
    x = x.copy()
    n = len(x)

    def embed(rows):
        f = rows.astype(float)
        return np.hstack([f, weight * (f @ p_perp)])

    def gso(r):
        b = r.copy()
        mu = np.zeros((n, n))
        norms = np.zeros(n)
        for i in range(n):
            for j in range(i):
                denom = norms[j]
                mu[i, j] = 0.0 if denom == 0 else (r[i] @ b[j]) / denom
                b[i] = b[i] - mu[i, j] * b[j]
            norms[i] = b[i] @ b[i]
        return b, mu, norms

    r = embed(x)
    b, mu, norms = gso(r)
    k = 1
    guard = 0
    while k < n and guard < 1000:
        guard += 1
        for j in range(k - 1, -1, -1):
            if abs(mu[k, j]) > 0.5:
                c = int(round(mu[k, j]))
                x[k] -= c * x[j]
                r = embed(x)
                b, mu, norms = gso(r)
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            x[[k, k - 1]] = x[[k - 1, k]]
            r = embed(x)
            b, mu, norms = gso(r)
            k = max(k - 1, 1)
    return x


EXHAUSTIVE_LIMIT = 2_000_000


def nearest_rational_plane(
    plane, q: int, top_k: int = 64, seed_pairs=None
) -> RationalApproximation:
    """Integer vectors m1, m2 (entries bounded by q) whose span minimises the
    principal-angle distance to the plane, over a scanned candidate set.

    The scan is exhaustive over primitive vectors when feasible and a
    lattice-reduction heuristic otherwise; passing the winning pair of a
    smaller q via ``seed_pairs`` makes the distance non-increasing in q.
    """
    if q < 1:
        raise DomainError("entry bound q must be at least 1")
    v = plane.frame if isinstance(plane, PlaneFrame) else np.asarray(plane, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise DomainError("plane must be an (n x 2) frame")
    dim = v.shape[0]
    qv, _ = np.linalg.qr(v)
    if (2 * q + 1) ** dim <= EXHAUSTIVE_LIMIT:
        vs = _primitive_vectors(dim, q)
    else:
        vs = _lll_candidates(qv, q, dim)
        base = _primitive_vectors(dim, 1)
        vs = np.unique(np.vstack([vs, base]), axis=0) if vs.size else base
    norms = np.linalg.norm(vs, axis=1)
    proj = np.linalg.norm(vs @ qv, axis=1)
    cosang = np.clip(proj / norms, 0.0, 1.0)
    order = np.argsort(-cosang, kind="stable")
    top = vs[order[: min(top_k, len(vs))]]

    best = None
    pairs = []
    for i in range(len(top)):
        for j in range(i + 1, len(top)):
            pairs.append((top[i], top[j]))
    if seed_pairs:
        pairs.extend(
            (np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
            for a, b in seed_pairs
        )
    for m1, m2 in pairs:
        mat = np.stack([m1, m2], axis=1).astype(float)
        if np.linalg.matrix_rank(mat) < 2:
            continue
        d = plane_distance(mat, qv)
        if best is None or d < best.distance:
            best = RationalApproximation(
                m1=np.asarray(m1, dtype=np.int64),
                m2=np.asarray(m2, dtype=np.int64),
                distance=d,
            )
    if best is None:
        raise RankError("no linearly independent integer pair found", None)
    return best


# ---------------------------------------------------------------------------
# Newton refinement
# ---------------------------------------------------------------------------


def _etas_to_vec(etas):
    out = []
    for e in etas:
        out.extend([e.real, e.imag])
    return np.asarray(out, dtype=float)


def _vec_to_etas(x):
    return tuple(complex(x[2 * i], x[2 * i + 1]) for i in range(len(x) // 2))


class _PlaneSystem:
    """Residual of the rational-plane matching problem in the 2g real root
    parameters.  The admissible basis is re-fitted to the integer targets by
    least squares over real 2x2 matrices at every evaluation, which reduces
    the problem to plane matching."""

    def __init__(self, lam1, lam2, m1, m2, cfg):
        self.lam1 = lam1
        self.lam2 = lam2
        self.targets = np.stack(
            [np.asarray(m1, dtype=float), np.asarray(m2, dtype=float)], axis=1
        )
        self.cfg = cfg

    def evaluate(self, x):
        etas = _vec_to_etas(x)
        curve = from_roots(etas)
        atlas = adapted_homology(curve)
        basis = compute_b_basis(curve, atlas, self.cfg)
        f, _ = _phi_matrix(curve, basis, atlas, self.lam1, self.lam2, self.cfg)
        fit, *_ = np.linalg.lstsq(f, self.targets, rcond=None)
        resid = f @ fit - self.targets
        return resid.ravel(), curve, basis, f, fit


def newton_refine(
    c0: SpectralCurve,
    lam1: complex,
    lam2: complex,
    m1,
    m2,
    opts: NewtonOptions = NewtonOptions(),
    cfg: QuadratureConfig = QuadratureConfig(),
) -> NewtonResult:
    """Damped Newton iteration on the 2g root parameters driving the image
    plane onto the integer targets.

    Regular-set membership is re-checked at every accepted iterate (local
    invertibility of the plane map only holds there); the Jacobian is formed
    by central finite differences.
    """
    if c0.genus == 0:
        return NewtonResult(
            ok=True, curve=c0, residual=0.0, iterations=0, trace=(0.0,),
            message="genus 0: the plane is the whole space, nothing to solve",
        )
    system = _PlaneSystem(lam1, lam2, m1, m2, cfg)
    x = _etas_to_vec(c0.etas)
    r, curve, basis, f, fit = system.evaluate(x)
    norm = float(np.max(np.abs(r)))
    trace = [norm]
    for it in range(opts.max_iter):
        if norm < opts.tol:
            return NewtonResult(
                ok=True, curve=curve, residual=norm, iterations=it,
                trace=tuple(trace), message="converged",
            )
        label = classify(curve, basis)
        if not label.in_R:
            return NewtonResult(
                ok=False, curve=curve, residual=norm, iterations=it,
                trace=tuple(trace),
                message=f"iterate left the regular set (in_S={label.in_S}, "
                        f"residue={label.residue_sum})",
            )
        jac = np.zeros((len(r), len(x)))
        for k in range(len(x)):
            h = opts.fd_step * (1.0 + abs(x[k]))
            xp = x.copy()
            xp[k] += h
            xm = x.copy()
            xm[k] -= h
            rp, *_ = system.evaluate(xp)
            rm, *_ = system.evaluate(xm)
            jac[:, k] = (rp - rm) / (2.0 * h)
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv[-1] <= 0 or sv[0] / sv[-1] > opts.cond_max:
            raise IllConditionedError(
                f"plane-map Jacobian condition {sv[0] / max(sv[-1], 1e-300):.2e} "
                f"exceeds {opts.cond_max:.1e}; classifier: in_R={label.in_R}, "
                f"|residue|={abs(label.residue_sum):.3e}, "
                f"|Delta|={abs(label.discriminant):.3e}"
            )
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        accepted = False
        s = 1.0
        for _ in range(8):
            try:
                r_new, curve_new, basis_new, f_new, fit_new = system.evaluate(x + s * step)
            except (DomainError, CmctoriError):
                s *= 0.5
                continue
            norm_new = float(np.max(np.abs(r_new)))
            if norm_new <= (1.0 - opts.armijo * s) * norm:
                x = x + s * step
                r, curve, basis, f, fit = r_new, curve_new, basis_new, f_new, fit_new
                norm = norm_new
                trace.append(norm)
                accepted = True
                break
            s *= 0.5
        if not accepted:
            return NewtonResult(
                ok=False, curve=curve, residual=norm, iterations=it,
                trace=tuple(trace), message="damping stalled: no descent step",
            )
    ok = norm < opts.tol
    return NewtonResult(
        ok=ok, curve=curve, residual=norm, iterations=opts.max_iter,
        trace=tuple(trace),
        message="converged" if ok else "max iterations reached",
    )


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


def certify(
    curve: SpectralCurve,
    lam1: complex,
    lam2: complex,
    m1,
    m2,
    cfg: QuadratureConfig = QuadratureConfig(),
    cert_tol: float = CERT_TOL,
    seed: int | None = None,
) -> TorusCertificate:
    """Certificate that phi maps a basis of the admissible plane onto the
    integer targets, stable under quadrature doubling.

    Raises CertificateError when the residual exceeds the threshold or
    degrades at doubled quadrature.
    """
    m1 = np.asarray(m1, dtype=np.int64)
    m2 = np.asarray(m2, dtype=np.int64)
    if np.linalg.matrix_rank(np.stack([m1, m2]).astype(float)) < 2:
        raise DomainError("integer targets must be linearly independent")
    atlas = adapted_homology(curve)
    basis = compute_b_basis(curve, atlas, cfg)
    targets = np.stack([m1, m2], axis=1).astype(float)

    def fit_residual(config):
        f, _ = _phi_matrix(curve, basis, atlas, lam1, lam2, config)
        fit, *_ = np.linalg.lstsq(f, targets, rcond=None)
        return f, fit, float(np.max(np.abs(f @ fit - targets)))

    f, fit, residual = fit_residual(cfg)
    if residual > cert_tol:
        raise CertificateError(
            f"residual {residual:.3e} exceeds certification threshold {cert_tol:.1e}"
        )
    if abs(np.linalg.det(fit)) < 1e-12:
        raise CertificateError("fitted basis is singular: targets span a "
                               "degenerate image")
    _, _, residual2 = fit_residual(cfg.doubled())
    if residual2 > 2.0 * max(residual, 1e-11):
        raise CertificateError(
            f"residual degrades at doubled quadrature: {residual:.3e} -> {residual2:.3e}"
        )
    b1 = fit[0, 0] * basis.b1 + fit[1, 0] * basis.b2
    b2 = fit[0, 1] * basis.b1 + fit[1, 1] * basis.b2
    label = classify(curve, basis)
    return TorusCertificate(
        curve=curve,
        sym=(complex(lam1), complex(lam2)),
        m1=m1,
        m2=m2,
        b1=b1,
        b2=b2,
        residual=residual,
        residual_doubled=residual2,
        quadrature=cfg,
        classifier=label,
        seed=seed,
    )


def certificate_to_dict(cert: TorusCertificate) -> dict:
    return {
        "genus": cert.curve.genus,
        "etas": [complex_pair(e) for e in cert.curve.etas],
        "sym": [complex_pair(s) for s in cert.sym],
        "m1": [int(v) for v in cert.m1],
        "m2": [int(v) for v in cert.m2],
        "b1": [complex_pair(c) for c in cert.b1.coeffs],
        "b2": [complex_pair(c) for c in cert.b2.coeffs],
        "residual": float(cert.residual),
        "residual_doubled": float(cert.residual_doubled),
        "quadrature": {
            "base_nodes": cert.quadrature.base_nodes,
            "max_refinements": cert.quadrature.max_refinements,
            "rel_tol": cert.quadrature.rel_tol,
        },
        "seed": cert.seed,
        "classifier": {
            "in_R": bool(cert.classifier.in_R),
            "delta": complex_pair(cert.classifier.discriminant),
            "residue_sum": complex_pair(cert.classifier.residue_sum),
        },
    }


def revalidate_certificate(data: dict, cert_tol: float = CERT_TOL) -> TorusCertificate:
    """Rebuild and re-certify a torus certificate from its serialised form."""
    etas = [complex(e[0], e[1]) for e in data["etas"]]
    curve = from_roots(etas)
    sym = tuple(complex(s[0], s[1]) for s in data["sym"])
    q = data["quadrature"]
    cfg = QuadratureConfig(
        base_nodes=int(q["base_nodes"]),
        max_refinements=int(q["max_refinements"]),
        rel_tol=float(q["rel_tol"]),
    )
    return certify(
        curve, sym[0], sym[1], data["m1"], data["m2"], cfg,
        cert_tol=cert_tol, seed=data.get("seed"),
    )


# ---------------------------------------------------------------------------
# sampling, density scan, full pipeline
# ---------------------------------------------------------------------------


def sample_curve(
    g: int,
    rng: np.random.Generator,
    r_lo: float = 0.2,
    r_hi: float = 0.8,
    min_gap: float = 0.05,
    max_tries: int = 500,
) -> SpectralCurve:
    """Random curve with roots area-uniform in the annulus r_lo <= |eta| <=
    r_hi, resampled on near-collision of any two branch points."""
    for _ in range(max_tries):
        r = np.sqrt(rng.uniform(r_lo**2, r_hi**2, size=g))
        th = rng.uniform(0.0, TWO_PI, size=g)
        etas = r * np.exp(1j * th)
        pts = [0.0 + 0.0j]
        for e in etas:
            pts.extend([e, e / abs(e) ** 2])
        pts = np.asarray(pts)
        d = np.abs(pts[:, None] - pts[None, :])
        np.fill_diagonal(d, np.inf)
        if float(np.min(d)) >= min_gap:
            return from_roots(etas)
    raise DomainError(f"could not sample a well-separated genus-{g} curve")


@dataclass(frozen=True)
class ScanRow:
    index: int
    etas: tuple
    in_R: bool
    abs_residue: float
    abs_delta: float
    distances: dict


@dataclass(frozen=True)
class ScanResult:
    genus: int
    sym: tuple
    q_list: tuple
    rows: tuple
    medians: dict
    r_fraction: float
    resamples: int
    seed: int


def density_scan(
    g: int,
    lam1: complex,
    lam2: complex,
    samples: int,
    q_list,
    seed: int = 0,
    cfg: QuadratureConfig = QuadratureConfig(),
    workers: int = 1,
) -> ScanResult:
    """Monte-Carlo scan: distance from random curves' planes to the nearest
    rational plane, for each entry bound in q_list, plus the fraction of
    samples in the regular set.

    Results are merged by sample index, so the outcome is independent of any
    execution order; sampling is per-sample seeded.
    """
    q_list = tuple(sorted(int(q) for q in q_list))
    seeds = np.random.SeedSequence(seed).spawn(samples)
    resamples = 0
    rows = []

    def one_sample(i):
        nonlocal resamples
        rng = np.random.default_rng(seeds[i])
        for _ in range(50):
            try:
                curve = (
                    from_roots([]) if g == 0 else sample_curve(g, rng)
                )
                atlas = adapted_homology(curve)
                basis = compute_b_basis(curve, atlas, cfg)
                plane = grassmann_plane(curve, lam1, lam2, atlas, cfg, basis=basis)
                label = classify(curve, basis)
                break
            except CmctoriError:
                resamples += 1
                continue
        else:
            raise DomainError(f"sample {i}: no usable curve after 50 resamples")
        dists = {}
        seed_pair = None
        for q in q_list:
            approx = nearest_rational_plane(
                plane, q, seed_pairs=[seed_pair] if seed_pair else None
            )
            dists[q] = approx.distance
            seed_pair = (approx.m1, approx.m2)
        return ScanRow(
            index=i,
            etas=curve.etas,
            in_R=label.in_R,
            abs_residue=float(abs(label.residue_sum))
            if label.residue_sum == label.residue_sum
            else float("nan"),
            abs_delta=float(abs(label.discriminant)),
            distances=dists,
        )

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one_sample, range(samples)))
    else:
        rows = [one_sample(i) for i in range(samples)]
    medians = {
        q: float(np.median([row.distances[q] for row in rows])) for q in q_list
    }
    r_fraction = float(np.mean([row.in_R for row in rows])) if rows else 0.0
    return ScanResult(
        genus=g,
        sym=(complex(lam1), complex(lam2)),
        q_list=q_list,
        rows=tuple(rows),
        medians=medians,
        r_fraction=r_fraction,
        resamples=resamples,
        seed=seed,
    )


def search_torus(
    g: int,
    lam1: complex,
    lam2: complex,
    q: int = 8,
    seed: int = 0,
    cfg: QuadratureConfig = QuadratureConfig(),
    opts: NewtonOptions = NewtonOptions(),
    max_attempts: int = 8,
    targets_per_curve: int = 4,
    start: SpectralCurve | None = None,
) -> SearchOutcome:
    """Full pipeline: sample (or take) a curve, classify, pick nearby integer
    targets, refine by Newton, certify.  Deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    best_distance = math.inf
    attempts = 0
    for attempt in range(max_attempts):
        attempts += 1
        try:
            if start is not None and attempt == 0:
                curve = start
            elif g == 0:
                curve = from_roots([])
            else:
                curve = sample_curve(g, rng)
            atlas = adapted_homology(curve)
            basis = compute_b_basis(curve, atlas, cfg)
            label = classify(curve, basis)
            if not label.in_R:
                continue
            if g == 0:
                cert = certify(curve, lam1, lam2, [1, 0], [0, 1], cfg, seed=seed)
                return SearchOutcome(
                    ok=True, certificate=cert, attempts=attempts,
                    best_distance=0.0, message="genus 0 is immediate",
                )
            plane = grassmann_plane(curve, lam1, lam2, atlas, cfg, basis=basis)
        except CmctoriError:
            continue
        # several nearby targets, closest first
        tried = set()
        candidates = []
        seed_pair = None
        for qq in sorted({min(4, q), q}):
            approx = nearest_rational_plane(
                plane, qq, seed_pairs=[seed_pair] if seed_pair else None
            )
            seed_pair = (approx.m1, approx.m2)
            key = (tuple(approx.m1), tuple(approx.m2))
            if key not in tried:
                tried.add(key)
                candidates.append(approx)
        best_distance = min(best_distance, min(c.distance for c in candidates))
        for cand in candidates[:targets_per_curve]:
            try:
                result = newton_refine(curve, lam1, lam2, cand.m1, cand.m2, opts, cfg)
            except CmctoriError:
                continue
            if not result.ok:
                continue
            try:
                cert = certify(
                    result.curve, lam1, lam2, cand.m1, cand.m2, cfg, seed=seed
                )
            except CmctoriError:
                continue
            return SearchOutcome(
                ok=True, certificate=cert, attempts=attempts,
                best_distance=cand.distance, message="certified",
            )
    return SearchOutcome(
        ok=False, certificate=None, attempts=attempts,
        best_distance=best_distance,
        message=f"no certificate found with entry bound {q} after "
                f"{attempts} attempts",
    )
