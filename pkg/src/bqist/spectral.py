"""Complex-plane geometry: cube/sixth roots of unity, linear phases, saddle points.

The spectral parameter lives on C \\ {0}.  Everything here is closed-form and
vectorizes over k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)

#: cube root of unity used throughout
OMEGA = np.exp(2j * np.pi / 3)

#: sixth roots of unity kappa_j = e^{i pi (j-1)/3}, j = 1..6
KAPPA = np.exp(1j * np.pi * np.arange(6) / 3)

#: cyclic permutation matrix (order 3) of the row-vector symmetry
MAT_A = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=complex)

#: transposition matrix (order 2) of the inversion symmetry
MAT_B = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)

#: lower edge of the admissible speed window zeta = x/t
ZETA_MIN = 1.0 / SQRT3
ZETA_MAX = 1.0


@dataclass(frozen=True)
class UnityFrame:
    """Roots of unity and the two symmetry matrices, bundled for convenience."""

    omega: complex
    kappa: np.ndarray
    A: np.ndarray
    B: np.ndarray


def unity_frame() -> UnityFrame:
    return UnityFrame(omega=OMEGA, kappa=KAPPA.copy(), A=MAT_A.copy(), B=MAT_B.copy())


@dataclass(frozen=True)
class PhaseTriple:
    """Values l_j(k), z_j(k), j = 1, 2, 3 (j = 3 carries omega^3 = 1)."""

    l: np.ndarray
    z: np.ndarray


def phase_values(k) -> PhaseTriple:
    """l_j(k) = i (w^j k + (w^j k)^-1) / (2 sqrt 3), z_j likewise with squares.

    k may be a scalar or an ndarray; the j-axis is prepended.
    """
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise ValueError("phase_values: k = 0 is outside the domain")
    wj = OMEGA ** np.arange(1, 4)
    wk = wj.reshape((3,) + (1,) * k.ndim) * k
    l = 1j * (wk + 1.0 / wk) / (2 * SQRT3)
    z = 1j * (wk**2 + 1.0 / wk**2) / (4 * SQRT3)
    return PhaseTriple(l=l, z=z)


def _check_pair(i: int, j: int) -> None:
    if not (1 <= j < i <= 3):
        raise ValueError(f"phase index pair must satisfy 1 <= j < i <= 3, got ({i},{j})")


def phi(i: int, j: int, zeta: float, k):
    """Phase difference Phi_ij(zeta, k) = (l_i - l_j) zeta + (z_i - z_j)."""
    _check_pair(i, j)
    p = phase_values(k)
    return (p.l[i - 1] - p.l[j - 1]) * zeta + (p.z[i - 1] - p.z[j - 1])


def dphi_dk(i: int, j: int, zeta: float, k):
    """Closed-form d/dk of Phi_ij (used by saddle verification and Newton)."""
    _check_pair(i, j)
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise ValueError("dphi_dk: k = 0 is outside the domain")
    wj = OMEGA ** np.arange(1, 4)
    wk = wj.reshape((3,) + (1,) * k.ndim) * k
    dl = 1j * (wk - 1.0 / wk) / (2 * SQRT3 * k)
    dz = 1j * (wk**2 - 1.0 / wk**2) / (2 * SQRT3 * k)
    return (dl[i - 1] - dl[j - 1]) * zeta + (dz[i - 1] - dz[j - 1])


def phi21_circle(zeta: float, theta):
    """Phi_21 on the unit circle: i (zeta - cos theta) sin theta (purely imaginary)."""
    theta = np.asarray(theta, dtype=float)
    return 1j * (zeta - np.cos(theta)) * np.sin(theta)


@dataclass(frozen=True)
class SaddleSet:
    """The four critical points of Phi_21 at a given zeta; k1 = conj k2, k3 = conj k4."""

    zeta: float
    k1: complex
    k2: complex
    k3: complex
    k4: complex


def saddle_points(zeta: float) -> SaddleSet:
    """Closed-form saddle points of Phi_21 for zeta in (1/sqrt 3, 1).

    The real radicals are evaluated with nonnegative square roots; the stated
    argument windows then hold automatically and are asserted, not branched on.
    """
    if not (ZETA_MIN < zeta < ZETA_MAX):
        raise ValueError(f"zeta must lie in (1/sqrt(3), 1), got {zeta}")
    rad = np.sqrt(8.0 + zeta**2)
    inner2 = 4.0 - zeta**2 + zeta * rad
    inner4 = 4.0 - zeta**2 - zeta * rad
    if inner2 < 0 or inner4 < 0:
        raise ValueError(f"saddle radicals negative at zeta={zeta}")
    k2 = 0.25 * (zeta - rad - 1j * np.sqrt(2.0) * np.sqrt(inner2))
    k4 = 0.25 * (zeta + rad - 1j * np.sqrt(2.0) * np.sqrt(inner4))
    assert -3 * np.pi / 4 < np.angle(k2) < -2 * np.pi / 3, np.angle(k2)
    assert -np.pi / 6 < np.angle(k4) < 0, np.angle(k4)
    return SaddleSet(zeta=zeta, k1=np.conj(k2), k2=k2, k3=np.conj(k4), k4=k4)


def sign_re_phi(i: int, j: int, zeta: float, k, tol: float = 1e-12) -> int:
    """Sign of Re Phi_ij(zeta, k); 0 within tol (e.g. on the unit circle for (2,1))."""
    re = float(np.real(phi(i, j, zeta, k)))
    if abs(re) <= tol:
        return 0
    return 1 if re > 0 else -1
