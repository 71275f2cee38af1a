"""Group-averaged bilinear forms and group-averaged fields.

The compact average is a normalized trapezoid over the rotation angle.  The
non-compact average is evaluated at three levels: per-element values on small
explicit grids (cross-checks only), the semi-analytic form in which the
discrete sum and the z-translation integral have been carried out as the
delta-function identities they are, and the fully reduced sum over sequence
entries.  The delta identities themselves are validated separately at small
scale by poisson_check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad as _squad

from .errors import QuadratureError, ZeroModeDivergenceError
from .forms import FormValue, bform
from .groups import BHPElement, HaarMeasure, RotationElement, apply_group
from .modes import FieldVector, omega_of, zero_mode_slice
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    adaptive_spherical,
    bounding_radius,
    box_intersection,
    gl_nodes,
    oscillatory_grid,
)
from .reduction import ReducedSequence, ordered_ns, pair_sum, project_bhp

SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class AverageResult:
    """Averaged-form value with quadrature error and truncation tail bound."""

    value: complex
    error_estimate: float
    tail_bound: float

    def to_json(self) -> dict:
        v = complex(self.value)
        return {"value": [v.real, v.imag],
                "error_estimate": float(self.error_estimate),
                "tail_bound": float(self.tail_bound)}


# --- compact group: S^1 -------------------------------------------------------

def average_bform_circle(f1: FieldVector, f2: FieldVector,
                         quad: QuadratureConfig = DEFAULT_CONFIG,
                         measure: Optional[HaarMeasure] = None) -> AverageResult:
    """(1/2 pi) * integral over the circle of B(f1, Phi_theta f2).

    Trapezoid sums double until stable; the integrand is smooth and
    periodic, so the doubling difference is a faithful error estimate.
    """
    scale = 1.0 if measure is None else measure.scale
    n, n_max = 16, 4096
    prev = None
    while n <= n_max:
        th = 2.0 * np.pi * np.arange(n) / n
        vals = [bform(f1, apply_group(RotationElement(t), f2), quad).value for t in th]
        cur = complex(np.mean(np.asarray(vals, dtype=complex)))
        if prev is not None and abs(cur - prev) <= max(quad.abs_tol, quad.rel_tol * abs(cur)):
            return AverageResult(scale * cur, scale * abs(cur - prev), 0.0)
        prev = cur
        n *= 2
    raise QuadratureError("circle average did not stabilize under node doubling")


def average_form_circle(form: str, f1: FieldVector, f2: FieldVector,
                        quad: QuadratureConfig = DEFAULT_CONFIG,
                        measure: Optional[HaarMeasure] = None) -> AverageResult:
    """Averaged symplectic form or scalar product over the rotation group."""
    if form not in ("omega", "mu"):
        raise ValueError("form must be 'omega' or 'mu'")
    avg = average_bform_circle(f1, f2, quad, measure)
    if form == "mu":
        return AverageResult(avg.value.real, avg.error_estimate, avg.tail_bound)
    return AverageResult(-2.0 * avg.value.imag, 2.0 * avg.error_estimate, avg.tail_bound)


# --- non-compact group: explicit-grid level -----------------------------------

def make_bhp_grid(ns: Sequence[int], alpha_cutoff: float, n_alpha: int,
                  beta_cutoff: float, n_beta: int):
    """Tensor Gauss grid on the truncated group, as (element, weight) pairs."""
    a_nodes, a_w = gl_nodes(n_alpha, -alpha_cutoff, alpha_cutoff)
    b_nodes, b_w = gl_nodes(n_beta, -beta_cutoff, beta_cutoff)
    grid = []
    for n in ns:
        for a, wa in zip(a_nodes, a_w):
            for b, wb in zip(b_nodes, b_w):
                grid.append((BHPElement(n, float(a), float(b)), float(wa * wb)))
    return grid


def average_bform_bhp_direct(f1: FieldVector, f2: FieldVector,
                             g_grid: Sequence[Tuple[BHPElement, float]],
                             quad: QuadratureConfig = DEFAULT_CONFIG,
                             fixed_counts: Optional[Tuple[int, int, int]] = None,
                             ) -> AverageResult:
    """Weighted sum of B(f1, Phi_g f2) over an explicit finite grid of g.

    Each element value comes from full momentum quadrature of the
    transformed pair, so this is the unreduced route; it is meant for small
    cross-check grids, never for production averaging.  With fixed_counts a
    single spherical grid is shared by all elements and partial products are
    reused across elements that differ only in the z-translation, which
    makes coarse whole-group sums affordable; error estimates then reflect
    only grid truncation, not per-element adaptivity.  The tail bound
    collects the contribution mass sitting on the extreme alpha and n
    levels of the grid.
    """
    total = 0.0 + 0.0j
    err = 0.0
    contribs = []
    if fixed_counts is not None:
        contribs = _direct_grid_batched(f1, f2, g_grid, fixed_counts)
        total = sum(c for _, c in contribs)
        err = float("nan")  # fixed grid: no per-element refinement estimate
    else:
        for g, w in g_grid:
            b = bform(f1, apply_group(g, f2), quad)
            total += w * b.value
            err += abs(w) * b.error_estimate
            contribs.append((g, w * b.value))
    alphas = sorted({abs(g.alpha) for g, _ in g_grid})
    ns = sorted({abs(g.n) for g, _ in g_grid})
    tail = 0.0
    if len(alphas) > 2:
        tail += sum(abs(c) for g, c in contribs if abs(g.alpha) == alphas[-1])
    if len(ns) > 1:
        tail += sum(abs(c) for g, c in contribs if abs(g.n) == ns[-1])
    return AverageResult(total, err, tail)


def _direct_grid_batched(f1, f2, g_grid, counts):
    from .quadrature import spherical_grid

    lo1, hi1 = f1.support_box()
    r_max = bounding_radius((lo1, hi1)) + 0.5
    K, W = spherical_grid(r_max, *[int(c) for c in counts])
    pre = W * np.conj(f1.amplitude(K))
    kx = K[..., 0]
    # k_z is azimuth-independent on the spherical grid, so once the n-phase
    # has been applied the phi axis can be summed out before the beta phases
    kz_profile = K[:, :, 0, 2]
    by_alpha = {}
    for g, w in g_grid:
        by_alpha.setdefault(g.alpha, {}).setdefault(g.n, []).append((g, w))
    out = []
    for alpha, by_n in by_alpha.items():
        boosted = apply_group(BHPElement(0, alpha, 0.0), f2)
        amp = pre * boosted.amplitude(K)
        for n, members in by_n.items():
            vals = amp if n == 0 else amp * np.exp(2j * np.pi * n * kx)
            collapsed = np.sum(vals, axis=2)
            for g, w in members:
                out.append((g, w * complex(np.sum(collapsed * np.exp(1j * g.beta * kz_profile)))))
    return out


def bhp_reduced_integrand(f1: FieldVector, f2: FieldVector, g: BHPElement,
                          quad: QuadratureConfig = DEFAULT_CONFIG) -> FormValue:
    """B(f1, Phi_g f2) from the single-integral reduced expression.

    Evaluates int d^3q sqrt(w(Lq)/w(q)) conj(a1)(Lq) a2(q) exp(i theta_g(q))
    with L the forward momentum map of g: a change of variables away from
    the direct transformed-pair quadrature, hence an independent route to
    the same number.
    """
    if f1.mass != 0.0 or f2.mass != 0.0:
        raise ValueError("the reduced integrand applies to the massless theory")
    phase_vec = g.phase_vector()

    def integrand(Q):
        w = omega_of(Q, 0.0)
        Qf = g.forward_momentum_map(Q, 0.0)
        wf = omega_of(Qf, 0.0)
        ratio = np.where(w > 0.0, wf / np.maximum(w, 1e-300), 1.0)
        return (np.sqrt(ratio) * np.conj(f1.amplitude(Qf)) * f2.amplitude(Q)
                * np.exp(1j * (Q @ phase_vec)))

    box2 = f2.support_box()
    lo1, hi1 = f1.support_box()
    # pull the f1 box back through the inverse map to bound the support of Q
    grids = np.meshgrid(*[np.linspace(lo1[i], hi1[i], 7) for i in range(3)], indexing="ij")
    pts = g.inverse_momentum_map(np.stack(grids, axis=-1).reshape(-1, 3), 0.0)
    box1_back = pts.min(axis=0) - 0.5, pts.max(axis=0) + 0.5
    inter = box_intersection(box2, box1_back)
    if inter is None:
        return FormValue(0.0 + 0.0j, 1e-15)
    r_max = bounding_radius(inter)
    wmin = max(min(f1.min_width(), f2.min_width()), 1e-3)
    freq = 2.0 * np.pi * abs(g.n) + abs(g.beta)
    nr = int(np.clip(3.0 * r_max / wmin + 1.2 * freq * r_max / np.pi, 48, 320))
    nang = int(np.clip(48 + 0.9 * freq * r_max / np.pi, 48, 240))
    val, err = adaptive_spherical(integrand, r_max, quad,
                                  base_counts=(nr, nang, 2 * nang),
                                  max_counts=(380, 280, 560))
    return FormValue(val, err)


# --- non-compact group: semi-analytic and reduced levels ----------------------

def _slice_grid(f: FieldVector, n: int, nodes: np.ndarray) -> np.ndarray:
    K = np.stack([np.full_like(nodes, float(n)), nodes, np.zeros_like(nodes)], axis=-1)
    return f.amplitude(K)


def average_bform_bhp_gave(f1: FieldVector, f2: FieldVector,
                           quad: QuadratureConfig = DEFAULT_CONFIG,
                           haar_scale: float = 1.0) -> AverageResult:
    """Group average after the analytic delta reductions, per-n double quadrature.

    2 pi * sum_n  int dl int dk  conj(a1)(n,l,0) a2(n,k,0)
                                 / ((n^2+l^2)(n^2+k^2))^(1/4),
    where the n = 0 integrals use the k = u|u| substitution that removes the
    |k|^(-1/2) endpoint exactly.
    """
    lo1, hi1 = f1.support_box()
    lo2, hi2 = f2.support_box()
    k_lo = min(lo1[1], lo2[1]) - 0.5
    k_hi = max(hi1[1], hi2[1]) + 0.5
    wmin = max(min(f1.min_width(), f2.min_width()), 1e-3)
    n_nodes = int(np.clip(4.0 * (k_hi - k_lo) / wmin, 64, 480))

    def term(n: int, factor: float) -> complex:
        m = int(n_nodes * factor)
        if n == 0:
            u_hi = np.sqrt(max(abs(k_lo), abs(k_hi)))
            u, wu = gl_nodes(m, -u_hi, u_hi)
            g1 = 2.0 * _slice_grid(f1, 0, u * np.abs(u))
            g2 = 2.0 * _slice_grid(f2, 0, u * np.abs(u))
            F = np.conj(g1)[:, None] * g2[None, :]
        else:
            k, wu = gl_nodes(m, k_lo, k_hi)
            wgt = (n * n + k * k) ** -0.25
            g1 = _slice_grid(f1, n, k) * wgt
            g2 = _slice_grid(f2, n, k) * wgt
            F = np.conj(g1)[:, None] * g2[None, :]
        return complex(np.sum(wu[:, None] * wu[None, :] * F))

    total = 0.0 + 0.0j
    err = 0.0
    mags = {}
    for n in ordered_ns(quad.n_max):
        coarse = term(n, 1.0)
        fine = term(n, 1.5)
        total += fine
        err += abs(fine - coarse)
        mags[abs(n)] = max(mags.get(abs(n), 0.0), abs(fine))
    tail = _ratio_tail([mags[m] for m in sorted(mags)])
    return AverageResult(haar_scale * 2.0 * np.pi * total,
                         haar_scale * 2.0 * np.pi * err,
                         haar_scale * 2.0 * np.pi * tail)


def _ratio_tail(mags) -> float:
    """Geometric tail estimate from the decay of the last three magnitudes."""
    mags = [m for m in mags if m > 0.0]
    if len(mags) < 3:
        return 0.0
    r = (mags[-1] / max(mags[-3], 1e-300)) ** 0.5
    r = min(r, 0.9)
    return mags[-1] * r / (1.0 - r)


def average_bform_bhp_reduced(f1: FieldVector, f2: FieldVector,
                              quad: QuadratureConfig = DEFAULT_CONFIG,
                              haar_scale: float = 1.0,
                              sequences: Optional[Tuple[ReducedSequence, ReducedSequence]] = None,
                              ) -> AverageResult:
    """Group average as the sequence inner product sum of conj(A1_n) A2_n.

    Rescaling the Haar measure by c multiplies the average by c; the same
    effect is obtained by mapping both sequences through A_n -> sqrt(c) A_n.
    """
    if sequences is None:
        s1 = project_bhp(f1, quad.n_max, quad)
        s2 = project_bhp(f2, quad.n_max, quad)
    else:
        s1, s2 = sequences
    value = haar_scale * pair_sum(s1, s2)
    mags = []
    for m in range(0, s1.n_max + 1):
        lo = [abs(s1.entries[n] * s2.entries[n]) for n in (m, -m) if n in s1.entries]
        mags.append(max(lo) if lo else 0.0)
    err = haar_scale * (s1.error_estimate * _seq_scale(s2) + s2.error_estimate * _seq_scale(s1))
    return AverageResult(value, err, haar_scale * _ratio_tail(mags))


def _seq_scale(s: ReducedSequence) -> float:
    return max(abs(v) for v in s.entries.values()) if s.entries else 0.0


# --- delta-identity validation ------------------------------------------------

def poisson_check(h: Callable[[float], float], n_max: int, u_cutoff: float):
    """Truncated two-sided test of sum_n exp(2 pi i n x) = sum_m delta(x - m).

    lhs = integral over [-u_cutoff, u_cutoff] of h against the truncated
    exponential sum (one oscillatory quadrature per n); rhs = sum of h at the
    integers inside the window.  For Schwartz-type h the two converge to the
    same number as the truncations grow.
    """
    x, w = oscillatory_grid(-u_cutoff, u_cutoff, 2.0 * np.pi * n_max)
    hv = np.array([h(float(xx)) for xx in x])
    lhs = 0.0 + 0.0j
    for n in range(-int(n_max), int(n_max) + 1):
        lhs += complex(np.sum(w * hv * np.exp(2.0j * np.pi * n * x)))
    m_hi = int(np.floor(u_cutoff))
    rhs = float(sum(h(float(m)) for m in range(-m_hi, m_hi + 1)))
    return lhs, rhs


def substitution_check(h: Callable[[float], float], support: float,
                       n: int = 1, ky: float = 0.7,
                       alpha_cutoff: float = 40.0):
    """Change-of-variables identity behind the boost-parameter integral.

    lhs integrates h(l(alpha)) against the absolute Jacobian |dl/dalpha| =
    sqrt(n^2 + l(alpha)^2); rhs integrates h directly over l.  `support`
    bounds where h is non-negligible so both sides can be truncated honestly.
    """
    w = float(np.hypot(n, ky))

    def l_of(a):
        return ky * np.cosh(a) - w * np.sinh(a)

    # |l(alpha)| grows like exp(|alpha|); restrict to where h can contribute
    a_max = min(alpha_cutoff,
                np.log(2.0 * (support + abs(ky) + w) / max(w - abs(ky), 1e-12)) + 1.0)
    lhs, _ = _squad(lambda a: np.hypot(n, l_of(a)) * h(l_of(a)), -a_max, a_max,
                    epsabs=1e-13, epsrel=1e-11, limit=400)
    rhs, _ = _squad(h, -support, support, epsabs=1e-13, epsrel=1e-11, limit=400)
    return float(lhs), float(rhs)


# --- group-averaged field -----------------------------------------------------

def _damped_boost_integral(tau: float, n: int, ky: np.ndarray) -> np.ndarray:
    """integral d(alpha) exp(i tau (ky sinh a - w cosh a)) for each ky.

    The phase is -|n| tau cosh(a + v(ky)) with a ky-dependent stationary
    center; the quadrature window is centered there and its tails are
    rotated by -pi/4 into the damped region.  No Hankel identity is used.
    """
    w = np.hypot(float(n), ky)
    v = np.arcsinh(-ky / abs(n))
    z = abs(n) * tau
    s0 = min(max(2.5, float(np.log(90.0 / z))), 12.0)
    ncen = int(min(max(96, 8 * z * np.cosh(s0) / np.pi + 16), 4000))

    def phase(alpha):
        return np.exp(1j * tau * (ky[:, None] * np.sinh(alpha) - w[:, None] * np.cosh(alpha)))

    x, wx = gl_nodes(ncen, -s0, s0)
    centers = (-v)[:, None]
    central = np.sum(wx[None, :] * phase(centers + x[None, :]), axis=1)
    t, wt = gl_nodes(160, 0.0, 4.2)
    rot = np.exp(-1j * np.pi / 4)
    right = np.sum(wt[None, :] * phase(centers + s0 + t[None, :] * rot), axis=1) * rot
    left = np.sum(wt[None, :] * phase(centers - s0 - t[None, :] * rot), axis=1) * rot
    return central + right + left


def average_field_bhp(f: FieldVector, tau: float, sigma: float,
                      quad: QuadratureConfig = DEFAULT_CONFIG,
                      path: str = "series",
                      sequence: Optional[ReducedSequence] = None) -> float:
    """Group-averaged field at (tau, sigma) on the reduced spacetime.

    path "series": (1/(2 sqrt 2)) sum_{n != 0} A_n H0_2(|n| tau) e^{i n sigma}
    plus its conjugate.  path "direct": per-n 2D quadrature over the boost
    parameter and k_y of the averaged mode integrand, with oscillation-damped
    tails.  Requires a field in the zero-mode-free subspace; anything else
    has a divergent n = 0 average.
    """
    if f.mass != 0.0:
        raise ValueError("field averaging applies to the massless theory")
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    if not f.is_zero_mode_free():
        raise ZeroModeDivergenceError(
            "field has a nonzero amplitude on the k = (0, k_y, 0) line; "
            "its group average diverges in the boost parameter")
    if path == "series":
        from .specfun import hankel2_0

        s = sequence if sequence is not None else project_bhp(f, quad.n_max, quad)
        acc = 0.0 + 0.0j
        for n in ordered_ns(s.n_max):
            if n == 0:
                continue
            acc += s.entries[n] * hankel2_0(abs(n) * tau) * np.exp(1j * n * sigma)
        return float(acc.real / np.sqrt(2.0))
    if path != "direct":
        raise ValueError("path must be 'series' or 'direct'")

    lo, hi = f.support_box()
    k_lo, k_hi = float(lo[1]) - 0.5, float(hi[1]) + 0.5
    wmin = max(f.min_width(), 1e-3)
    n_nodes = int(np.clip(4.0 * (k_hi - k_lo) / wmin, 96, 420))
    ky, wk = gl_nodes(n_nodes, k_lo, k_hi)
    out = 0.0
    prefac = 1.0 / (2.0 * np.sqrt(np.pi))
    for n in ordered_ns(quad.n_max):
        if n == 0:
            continue
        amp = _slice_grid(f, n, ky)
        wq = np.hypot(float(n), ky)
        D = _damped_boost_integral(tau, n, ky)
        t_n = prefac * complex(np.sum(wk * amp / np.sqrt(wq) * D))
        out += 2.0 * (t_n * np.exp(1j * n * sigma)).real
    return float(out)


def zero_mode_divergence_probe(f: FieldVector, alpha_cutoffs: Sequence[float],
                               tau: float = 1.0) -> list:
    """Magnitude of the truncated n = 0 field average at growing boost cutoffs.

    For a field with a(0, k_y, 0) != 0 the sequence grows without bound
    (asymptotically linearly in the cutoff); on the zero-mode-free subspace
    it is identically zero.  The oscillatory k_y integral is computed on a
    half-line substitution for the slow branch and a contour rotation for
    the fast one, so cutoffs of order 40 cost nothing.
    """
    g = zero_mode_slice(f)
    g_plus = lambda q: g(q)
    g_minus = lambda q: g(-q)
    lo, hi = f.support_box()
    q_hi = max(abs(lo[1]), abs(hi[1])) + 1.0
    c0 = (2.0 * (2.0 * np.pi) ** 3) ** -0.5

    def K_of(nu: float, gf) -> complex:
        if nu <= 50.0:
            v_hi = np.sqrt(q_hi)
            m = int(np.clip(8.0 * nu * q_hi / np.pi + 96, 96, 2400))
            v, wv = gl_nodes(m, 0.0, v_hi)
            return complex(np.sum(wv * 2.0 * gf(v * v) * np.exp(-1j * nu * v * v)))
        v_hi = np.sqrt(45.0 / nu)
        v, wv = gl_nodes(200, 0.0, v_hi)
        return complex(np.exp(-1j * np.pi / 4)
                       * np.sum(wv * 2.0 * gf(-1j * v * v) * np.exp(-nu * v * v)))

    def h(alpha: float) -> float:
        kp = K_of(tau * np.exp(-alpha), g_plus)
        km = K_of(tau * np.exp(alpha), g_minus)
        return float(2.0 * (c0 * (kp + km)).real)

    results = []
    for A in alpha_cutoffs:
        m = int(np.clip(16.0 * A, 96, 1400))
        a_nodes, a_w = gl_nodes(m, -float(A), float(A))
        vals = np.array([h(a) for a in a_nodes])
        results.append(float(abs(np.sum(a_w * vals))))
    return results
