"""Cauchy integrals on unit-circle arcs: the delta factors, log-kernel chi
integrals, and the nu exponents.

Branch conventions for the two log families (s = e^{i theta_s}, theta_s in
[pi/2, 2 pi/3]):

* ln_s(k - s) has its cut along the circle arc from i to s plus the ray
  (i, i*inf).  On the unit circle off the cut, its argument is
  (arg_i(k) + theta_s + pi) / 2 with arg_i(k) in (pi/2, 5 pi/2); in the
  "safe zone" (position angle in (-pi, pi/2), any radius) it equals the
  principal argument plus 2 pi.

* tilde-ln_s(k - s) has its cut along the circle arc from s to -1 plus the
  ray (-inf, 0).  On the circle, its argument is (phi_k + theta_s - pi) / 2
  with position angle phi_k in (-pi, theta_s); in the safe zone it equals
  the principal argument.

Off-circle points outside the safe zone are continued explicitly along a
cut-avoiding path from the anchor k = 1 (winding counter, not principal
calls).

The densities ln f and ln f(omega^2 .) are evaluated through the smooth
cofactor representation ln f = ln c + 2 ln(2 sin((2 pi/3 - theta)/2)) near the
double zero at omega, where the raw combination loses all relative accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scattering import ReflectionData
from .spectral import OMEGA, SaddleSet, saddle_points
from .util import ChebPanel, gauss_legendre, graded_panels, panel_quad, refine_near, \
    richardson_limit

TWO_THIRDS_PI = 2 * np.pi / 3
ARC_LO = np.pi / 2

BOUNDARY_TOL = 1e-6


class BoundaryPolicyError(ValueError):
    """Evaluation point is on (or too close to) the defining arc; pass a side."""


class PositivityError(ValueError):
    """A log argument that the theory requires to be positive is not."""


# ---------------------------------------------------------------------------
# circle functions built from reflection data
# ---------------------------------------------------------------------------


class _LayerCofactor:
    """Smooth cofactor c(u) = f/(2 sin(u/2))^2 at distance u from a zero of f.

    f vanishes to second order but with a boundary layer (width set by the
    nearby zero of s11, i.e. by the data amplitude), so ln c is fitted as a
    Chebyshev series in tau = ln u on [u_min, u_max].  Below u_min (where the
    raw combination 1 + r1 r2 + ... loses all relative accuracy) the fit is
    continued by a cubic in u, consistent with the analyticity of c at u = 0.
    """

    U_MIN = 1.5e-4
    U_MAX = 0.56

    def __init__(self, f_at_distance, n: int = 80):
        tau = ChebPanel.nodes(np.log(self.U_MIN), np.log(self.U_MAX), n)
        u = np.exp(tau)
        f = f_at_distance(u)
        re = np.real(f)
        if np.any(re <= 0):
            raise PositivityError("f nonpositive near one of its double zeros")
        im = np.max(np.abs(np.imag(f)))
        if im > 1e-6:
            raise PositivityError(f"f has imaginary residual {im:.2e} near a zero")
        lnc = np.log(re / (2 * np.sin(0.5 * u)) ** 2)
        self.fit = ChebPanel.fit(np.log(self.U_MIN), np.log(self.U_MAX), lnc)
        self.dfit = self.fit.derivative()
        # continuation below U_MIN: c is analytic at u = 0 when f really has
        # its double zero (cubic in u), but degenerates to f(omega)/u^2 when
        # the data's reflection is too small to produce one (then f itself is
        # the analytic object); the floor log-slope discriminates
        us = self.U_MIN * np.array([1.0, 1.5, 2.25, 3.375])
        vals = np.real(self.fit(np.log(us)))
        slope = float(np.real(self.dfit(np.log(self.U_MIN))))
        self.quadratic_zero = slope > -1.0
        if self.quadratic_zero:
            self.poly = np.polynomial.polynomial.Polynomial.fit(us, vals, 3)
        else:
            fvals = np.exp(vals) * (2 * np.sin(0.5 * us)) ** 2
            self.poly = np.polynomial.polynomial.Polynomial.fit(us, fvals, 3)
        self.dpoly = self.poly.deriv()

    def ln_c(self, u):
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape)
        small = u < self.U_MIN
        if np.any(~small):
            out[~small] = np.real(self.fit(np.log(u[~small])))
        if np.any(small):
            if self.quadratic_zero:
                out[small] = np.real(self.poly(u[small]))
            else:
                out[small] = (np.log(np.real(self.poly(u[small])))
                              - 2 * np.log(2 * np.sin(0.5 * u[small])))
        return out

    def dln_c_du(self, u):
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape)
        small = u < self.U_MIN
        if np.any(~small):
            out[~small] = np.real(self.dfit(np.log(u[~small]))) / u[~small]
        if np.any(small):
            if self.quadratic_zero:
                out[small] = np.real(self.dpoly(u[small]))
            else:
                us = u[small]
                out[small] = (np.real(self.dpoly(us)) / np.real(self.poly(us))
                              - 1.0 / np.tan(0.5 * us))
        return out


class CircleFunctions:
    """Interpolants of the arc densities derived from (r1, r2).

    g1   = ln(1 + r1 r2)  on [pi/2, 2 pi/3]
    lnF  = ln f            on [pi/2, 2 pi/3)  (layer cofactor at omega)
    lnF2 = ln f(omega^2 .) on [pi/2, 2 pi/3)  (layer cofactor at 1, lower side)
    """

    def __init__(self, refl: ReflectionData, n_fit: int = 96):
        self.refl = refl
        self._fit(n_fit)

    # -- raw products ------------------------------------------------------

    def r1r2(self, theta):
        return self.refl.r1_at(theta) * self.refl.r2_at(theta)

    def f_raw(self, theta):
        """f(e^{i theta}) from the defining combination (cancellation-limited)."""
        return 1.0 + self.r1r2(theta) + self.r1r2(TWO_THIRDS_PI - theta)

    # -- fits ----------------------------------------------------------------

    def _fit(self, n: int):
        lo, hi = ARC_LO - 0.03, TWO_THIRDS_PI
        th = ChebPanel.nodes(lo, hi, n)
        one_p = 1.0 + self.r1r2(th)
        self._check_positive(one_p, th, "1 + r1 r2")
        self.g1 = ChebPanel.fit(lo, hi, np.log(one_p.real))
        self.dg1 = self.g1.derivative()
        # distance-from-zero profiles of f at omega (from below) and 1 (from below)
        self.layer_omega = _LayerCofactor(lambda u: self.f_raw(TWO_THIRDS_PI - u))
        self.layer_one = _LayerCofactor(lambda u: self.f_raw(-u))

    @staticmethod
    def _check_positive(vals, th, label):
        re = np.real(vals)
        im = np.max(np.abs(np.imag(vals))) if np.size(vals) else 0.0
        if np.any(re <= 0):
            bad = th[np.argmin(re)]
            raise PositivityError(f"{label} is nonpositive near theta = {bad:.6f}")
        if im > 1e-6 * max(1.0, np.max(np.abs(re))):
            raise PositivityError(f"{label} has imaginary residual {im:.2e}")

    # -- density evaluations -------------------------------------------------

    def ln_one_plus_r1r2(self, theta):
        return self.g1(theta)

    def d_ln_one_plus_r1r2(self, theta):
        return self.dg1(theta)

    def _ln_from_layer(self, layer, theta):
        u = TWO_THIRDS_PI - np.asarray(theta, dtype=float)
        return layer.ln_c(u) + 2 * np.log(2 * np.sin(0.5 * u))

    def _dln_from_layer(self, layer, theta):
        u = TWO_THIRDS_PI - np.asarray(theta, dtype=float)
        return -layer.dln_c_du(u) - 1.0 / np.tan(0.5 * u)

    def ln_f(self, theta):
        return self._ln_from_layer(self.layer_omega, theta)

    def d_ln_f(self, theta):
        return self._dln_from_layer(self.layer_omega, theta)

    def ln_f2(self, theta):
        return self._ln_from_layer(self.layer_one, theta)

    def d_ln_f2(self, theta):
        return self._dln_from_layer(self.layer_one, theta)

    def ln_f_near_one(self, theta):
        """ln f at small negative position angles, through the layer at 1."""
        u = -np.asarray(theta, dtype=float)
        if np.any(u <= 0):
            raise ValueError("ln_f_near_one expects negative position angles")
        return self.layer_one.ln_c(u) + 2 * np.log(2 * np.sin(0.5 * u))

    def density(self, name: str):
        return {
            "g1": (self.ln_one_plus_r1r2, self.d_ln_one_plus_r1r2),
            "lnF": (self.ln_f, self.d_ln_f),
            "lnF2": (self.ln_f2, self.d_ln_f2),
        }[name]


def f_of_k(cf: CircleFunctions, k) -> complex:
    """f on the unit circle via the defining combination of reflection values."""
    k = complex(k)
    if abs(abs(k) - 1.0) > 1e-9:
        raise ValueError("f_of_k expects k on the unit circle")
    return complex(cf.f_raw(np.angle(k)))


# ---------------------------------------------------------------------------
# branch-resolved logarithms
# ---------------------------------------------------------------------------


def _position_angle(k: complex) -> float:
    return float(np.angle(k))


def _arg_i(phi: float) -> float:
    """Map a position angle into (pi/2, 5 pi/2]."""
    return phi if phi > np.pi / 2 else phi + 2 * np.pi


def _track_arg(k: complex, s: complex, tilde: bool) -> float:
    """Continuous argument of (k' - s) along a cut-avoiding path 1 -> k.

    Anchored at k = 1 where the branch takes the documented value.
    """
    theta_s = float(np.angle(s))
    rho = abs(k)
    phi = _position_angle(k)
    v0 = ((theta_s - np.pi) / 2 + 2 * np.pi) if not tilde else (theta_s - np.pi) / 2

    # radial leg from 1 to rho at angle 0, then angular leg to phi
    if not tilde and rho >= 1.0 and phi > np.pi / 2:
        sweep = phi - 2 * np.pi  # clockwise, avoiding the ray at +pi/2
    else:
        sweep = phi
    legs = []
    n_rad = 64
    legs.append(np.linspace(1.0, rho, n_rad))
    dist_guard = max(min(abs(rho - 1.0), 1.0) / 3.0, 2e-4)
    n_ang = 64 + int(abs(sweep) / min(0.01, dist_guard)) + 1
    legs_ang = rho * np.exp(1j * np.linspace(0.0, sweep, n_ang))
    path = np.concatenate([legs[0].astype(complex), legs_ang])
    rel = path - s
    dargs = np.angle(rel[1:] / rel[:-1])
    if np.max(np.abs(dargs)) > 2.5:
        raise RuntimeError("branch tracking step too coarse")
    return v0 + float(np.sum(dargs))


def ln_branch(k: complex, s: complex, tilde: bool = False) -> complex:
    """ln_s(k - s) or tilde-ln_s(k - s) per the documented cuts."""
    k = complex(k)
    s = complex(s)
    theta_s = float(np.angle(s))
    mag = np.log(abs(k - s))
    rho = abs(k)
    phi = _position_angle(k)
    if abs(rho - 1.0) < 1e-12:
        if not tilde:
            # off the cut arc [pi/2, theta_s]
            if ARC_LO - 1e-14 <= phi <= theta_s + 1e-14:
                raise ValueError("ln_branch: k on the cut of ln_s")
            return mag + 0.5j * (_arg_i(phi) + theta_s + np.pi)
        if not (-np.pi < phi < theta_s):
            raise ValueError("ln_branch: k on the cut of tilde-ln_s")
        return mag + 0.5j * (phi + theta_s - np.pi)
    # safe zone: reachable from 1 by a direct swing
    if not tilde:
        if -np.pi < phi < ARC_LO or rho < 1.0:
            return mag + 1j * (np.angle(k - s) + 2 * np.pi)
    else:
        if -np.pi < phi < ARC_LO:
            return mag + 1j * np.angle(k - s)
    return mag + 1j * _track_arg(k, s, tilde)


def ln_branch_sweep(k: complex, thetas: np.ndarray, tilde: bool = False) -> np.ndarray:
    """ln_s(k - s) for s = e^{i theta} sweeping an arc, continuous in theta.

    Anchors one value with ln_branch and unwraps the principal arguments along
    the sweep (the branch offset is locally constant in theta for fixed k).
    """
    thetas = np.asarray(thetas, dtype=float)
    s = np.exp(1j * thetas)
    rel = k - s
    mags = np.log(np.abs(rel))
    p = np.angle(rel)
    # continuous-in-theta argument sequence
    cont = np.unwrap(p)
    mid = len(thetas) // 2
    v_mid = np.imag(ln_branch(k, s[mid], tilde=tilde))
    shift = v_mid - cont[mid]
    shift = 2 * np.pi * np.round(shift / (2 * np.pi))
    # tolerate the anchor landing a hair off a multiple (numerical guard)
    if abs((v_mid - cont[mid]) - shift) > 1e-6:
        raise RuntimeError("branch sweep anchor mismatch")
    return mags + 1j * (cont + shift)


# ---------------------------------------------------------------------------
# arcs per zeta
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectorArcs:
    """Angular endpoints of the three integration arcs at a given zeta."""

    zeta: float
    saddles: SaddleSet
    a4: float  # arg(omega k4) in (pi/2, 2 pi/3)
    a2: float  # arg(omega^2 k2) in (a4, 2 pi/3)

    @classmethod
    def from_zeta(cls, zeta: float) -> "SectorArcs":
        sad = saddle_points(zeta)
        a4 = float(np.angle(OMEGA * sad.k4))
        a2 = float(np.angle(OMEGA**2 * sad.k2))
        assert ARC_LO < a4 < a2 < TWO_THIRDS_PI, (a4, a2)
        return cls(zeta=zeta, saddles=sad, a4=a4, a2=a2)


_DELTA_SPEC = {
    # j: (arc name, density, sign of (1/2 pi i) integral)
    1: ("lo", "g1", -1.0),
    2: ("mid", "g1", +1.0),
    3: ("mid", "lnF", +1.0),
    4: ("hi", "lnF", +1.0),
    5: ("hi", "lnF2", +1.0),
}


def _arc_interval(arcs: SectorArcs, name: str):
    if name == "lo":
        return ARC_LO, arcs.a4
    if name == "mid":
        return arcs.a4, arcs.a2
    return arcs.a2, TWO_THIRDS_PI


def _arc_distance(k: complex, lo: float, hi: float) -> float:
    """Distance from k to the arc {e^{i theta}, theta in [lo, hi]}."""
    phi = float(np.angle(k))
    for cand in (phi, phi + 2 * np.pi, phi - 2 * np.pi):
        if lo <= cand <= hi:
            return abs(abs(k) - 1.0)
    d1 = abs(k - np.exp(1j * lo))
    d2 = abs(k - np.exp(1j * hi))
    return min(d1, d2)


def _cauchy_panels(lo, hi, k, singular_hi=False, singular_lo=False):
    panels = graded_panels(lo, hi, (singular_lo, singular_hi))
    phi = float(np.angle(k))
    for cand in (phi, phi + 2 * np.pi, phi - 2 * np.pi):
        if lo - 0.3 <= cand <= hi + 0.3:
            gap = max(abs(abs(k) - 1.0), 1e-9)
            out = []
            for p in panels:
                out.extend(refine_near([p], cand, min_size=min(1e-4, gap / 4)))
            panels = sorted(out)
    return panels


def delta(j: int, arcs: SectorArcs, cf: CircleFunctions, k, side: str | None = None,
          gl_n: int = 16) -> complex:
    """delta_j(zeta, k) by direct quadrature of its defining arc integral.

    ``side`` ("interior"/"exterior", or the oriented "+"/"-") selects a
    boundary value via the principal-value formula when k lies on the arc.
    """
    name, dens_name, sign = _DELTA_SPEC[j]
    lo, hi = _arc_interval(arcs, name)
    dens, _ = cf.density(dens_name)
    k = complex(k)
    dist = _arc_distance(k, lo, hi)
    if dist < BOUNDARY_TOL:
        if side is None:
            raise BoundaryPolicyError(
                f"delta_{j}: k={k} within {BOUNDARY_TOL:.0e} of the arc; specify a side")
        return _delta_boundary(j, arcs, cf, k, side, gl_n)

    singular_hi = name == "hi"  # log-divergent density at omega

    def integrand(th):
        return dens(th) * 1j * np.exp(1j * th) / (np.exp(1j * th) - k)

    panels = _cauchy_panels(lo, hi, k, singular_hi=singular_hi)
    val = panel_quad(integrand, panels, n=gl_n)
    return np.exp(sign * val / (2j * np.pi))


def _delta_boundary(j, arcs, cf, k, side, gl_n=16):
    """Plemelj boundary value on the open arc: exp(sign(PV +- g/2)/(2 pi i) ...).

    The "+"/"-" aliases follow the arc orientations of the jump relations:
    the low arc is traversed clockwise (so "+" is the exterior), the others
    counterclockwise ("+" is the interior).
    """
    name, dens_name, sign = _DELTA_SPEC[j]
    lo, hi = _arc_interval(arcs, name)
    dens, _ = cf.density(dens_name)
    theta0 = float(np.angle(k))
    if not (lo + 1e-12 < theta0 < hi - 1e-12):
        raise BoundaryPolicyError(f"delta_{j}: boundary value requested off the open arc")
    if side in ("+", "-"):
        if j == 1:
            side = "exterior" if side == "+" else "interior"
        else:
            side = "interior" if side == "+" else "exterior"
    if side not in ("interior", "exterior"):
        raise ValueError(f"unknown side {side!r}")
    g0 = complex(dens(theta0))
    k0 = np.exp(1j * theta0)

    def regular(th):
        s = np.exp(1j * th)
        return (dens(th) - g0) * 1j * s / (s - k0)

    singular_hi = name == "hi"
    panels = []
    for p in graded_panels(lo, hi, (False, singular_hi)):
        panels.extend(refine_near([p], theta0, min_size=1e-7))
    pv_reg = panel_quad(regular, sorted(panels), n=gl_n)
    # closed-form PV of int ds/(s-k0) over the arc
    pv_core = (1j * (hi - lo) / 2
               + np.log(abs(np.sin(0.5 * (hi - theta0)) / np.sin(0.5 * (theta0 - lo)))))
    pv = pv_reg + g0 * pv_core
    half = 0.5 * g0 if side == "interior" else -0.5 * g0
    return np.exp(sign * (pv / (2j * np.pi) + half))


# ---------------------------------------------------------------------------
# chi integrals
# ---------------------------------------------------------------------------

_CHI_SPEC = {
    1: ("lo", "g1", -1.0),
    2: ("mid", "g1", +1.0),
    3: ("mid", "lnF", +1.0),
    4: ("hi", "lnF", +1.0),
    5: ("hi", "lnF2", +1.0),
}

# geometric ladder (ratio 1/sqrt(10)); the limit is v0 + A eps + B eps ln eps + ...,
# and five Neville stages push the eps ln eps remainder below 1e-8
EPS_SEQUENCE = (1e-3, 10**-3.5, 1e-4, 10**-4.5, 1e-5)


def chi(j: int, arcs: SectorArcs, cf: CircleFunctions, k, tilde: bool = False,
        gl_n: int = 16, eps_sequence=EPS_SEQUENCE) -> complex:
    """chi_j(zeta, k) (or the tilde variant) with explicit branch bookkeeping.

    j in {4, 5} uses the epsilon-regularized definition: the integral is cut
    at 2 pi/3 - eps, the divergent endpoint term is subtracted, and the limit
    is Richardson-extrapolated over ``eps_sequence``.
    """
    name, dens_name, sign = _CHI_SPEC[j]
    lo, hi = _arc_interval(arcs, name)
    _, ddens = cf.density(dens_name)
    dens, _ = cf.density(dens_name)
    k = complex(k)

    def weighted(lo_, hi_):
        def integrand(th):
            return ln_branch_sweep(k, th, tilde=tilde) * ddens(th)

        phi0 = float(np.angle(k))
        sing_lo = abs(np.exp(1j * lo_) - k) < 1e-7
        sing_hi_pt = abs(np.exp(1j * hi_) - k) < 1e-7
        panels = graded_panels(lo_, hi_, (sing_lo, sing_hi_pt or name == "hi"),
                               min_panel=1e-8)
        for cand in (phi0, phi0 + 2 * np.pi, phi0 - 2 * np.pi):
            if lo_ - 0.3 <= cand <= hi_ + 0.3 and not (sing_lo or sing_hi_pt):
                gap = max(abs(abs(k) - 1.0), 1e-8)
                out = []
                for p in panels:
                    out.extend(refine_near([p], cand, min_size=max(min(1e-5, gap / 4), 1e-8)))
                panels = sorted(out)
        return panel_quad(integrand, panels, n=gl_n)

    if j in (1, 2, 3):
        return sign * weighted(lo, hi) / (2j * np.pi)

    # regularized integrals ending at omega
    omega_log = ln_branch(k, complex(OMEGA), tilde=tilde)
    eps = np.asarray(eps_sequence, dtype=float)
    vals = []
    for e in eps:
        cut = TWO_THIRDS_PI - e
        raw = weighted(lo, cut)
        vals.append(raw - omega_log * dens(cut))
    lim = richardson_limit(eps, vals)
    if max(abs(v) for v in vals) < 1e-10:
        return sign * lim / (2j * np.pi)  # identically-zero density, pure noise
    d1 = abs(vals[-2] - vals[-3])
    d2 = abs(vals[-1] - vals[-2])
    if d1 > 0 and d2 > 0:
        order = np.log(d1 / d2) / np.log(eps[-2] / eps[-1])
        if order < 0.8:
            raise RuntimeError(
                f"chi_{j}: eps-regularization not converging (order {order:.2f}); "
                f"last extrapolants {vals[-3:]}")
    return sign * lim / (2j * np.pi)


def chi_tilde(j: int, arcs: SectorArcs, cf: CircleFunctions, k, **kw) -> complex:
    return chi(j, arcs, cf, k, tilde=True, **kw)


# ---------------------------------------------------------------------------
# nu exponents
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NuBundle:
    """Log exponents at the saddle images, plus the two hat combinations."""

    zeta: float
    nu1: float
    nu2: float
    nu3: float
    nu4: float
    nu5: float

    @property
    def nu_hat1(self) -> float:
        return self.nu3 - self.nu1

    @property
    def nu_hat2(self) -> float:
        return self.nu2 + self.nu5 - self.nu4


def nu_bundle(arcs: SectorArcs, cf: CircleFunctions) -> NuBundle:
    inv2pi = 1.0 / (2 * np.pi)
    g1_a4 = float(np.real(cf.ln_one_plus_r1r2(arcs.a4)))
    g1_a2 = float(np.real(cf.ln_one_plus_r1r2(arcs.a2)))
    lnf_a4 = float(cf.ln_f(arcs.a4))
    lnf_a2 = float(cf.ln_f(arcs.a2))
    th_wk2 = float(np.angle(OMEGA * arcs.saddles.k2))
    lnf_wk2 = float(cf.ln_f_near_one(th_wk2))
    return NuBundle(
        zeta=arcs.zeta,
        nu1=-inv2pi * g1_a4,
        nu2=-inv2pi * g1_a2,
        nu3=-inv2pi * lnf_a4,
        nu4=-inv2pi * lnf_a2,
        nu5=-inv2pi * lnf_wk2,
    )


def nu_hat2_pointwise(arcs: SectorArcs, cf: CircleFunctions) -> float:
    """nu2(k2) + nu3(k2) - nu4(k2) with nu3 evaluated as the pointwise function
    -(1/2 pi) ln f(omega k) at k = k2 (raw-combination route)."""
    inv2pi = 1.0 / (2 * np.pi)
    th_wk2 = float(np.angle(OMEGA * arcs.saddles.k2))
    f_wk2 = complex(cf.f_raw(th_wk2))
    if f_wk2.real <= 0:
        raise PositivityError(f"f(omega k2) = {f_wk2} not positive")
    nu3_pt = -inv2pi * float(np.log(f_wk2.real))
    nb = nu_bundle(arcs, cf)
    return nb.nu2 + nu3_pt - nb.nu4
