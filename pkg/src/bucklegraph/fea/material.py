"""Compressible Neo-Hookean material.

Energy density (J = det F):

    psi = mu/2 * (F:F - 3 - 2 ln J) + lam/2 * ((J^2 - 1)/2 - ln J)

The solver works in plane strain: the in-plane 2x2 deformation gradient is
embedded with out-of-plane stretch 1, so F:F = |F2|^2 + 1 and J = det F2.
Batched helpers (suffix ``_2d``) take arrays of 2x2 gradients.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InvertedElementError


@dataclass(frozen=True)
class MaterialModel:
    E: float
    nu: float
    lam: float
    mu: float


def lame_parameters(E: float, nu: float) -> MaterialModel:
    """Closed-form Lame parameters from Young's modulus and Poisson ratio."""
    if E <= 0:
        raise ValueError(f"Young's modulus must be positive, got {E}")
    if not 0 <= nu < 0.5:
        raise ValueError(f"Poisson ratio must lie in [0, 0.5), got {nu}")
    lam = E * nu / ((1 + nu) * (1 - 2 * nu))
    mu = E / (2 * (1 + nu))
    return MaterialModel(E=E, nu=nu, lam=lam, mu=mu)


def strain_energy_density(F, m: MaterialModel) -> float:
    """Energy density for a full 3x3 deformation gradient."""
    F = np.asarray(F, dtype=float)
    if F.shape != (3, 3):
        raise ValueError(f"expected a 3x3 deformation gradient, got {F.shape}")
    J = np.linalg.det(F)
    if J <= 0:
        raise InvertedElementError(f"det F = {J} <= 0")
    logJ = np.log(J)
    return (m.mu / 2 * (np.sum(F * F) - 3 - 2 * logJ)
            + m.lam / 2 * ((J * J - 1) / 2 - logJ))


def first_piola_stress(F, m: MaterialModel):
    """First Piola-Kirchhoff stress for a full 3x3 deformation gradient."""
    F = np.asarray(F, dtype=float)
    J = np.linalg.det(F)
    if J <= 0:
        raise InvertedElementError(f"det F = {J} <= 0")
    Finv_T = np.linalg.inv(F).T
    return m.mu * (F - Finv_T) + m.lam / 2 * (J * J - 1) * Finv_T


def _det2(F2):
    return F2[..., 0, 0] * F2[..., 1, 1] - F2[..., 0, 1] * F2[..., 1, 0]


def _inv_T2(F2, J):
    G = np.empty_like(F2)
    G[..., 0, 0] = F2[..., 1, 1]
    G[..., 0, 1] = -F2[..., 1, 0]
    G[..., 1, 0] = -F2[..., 0, 1]
    G[..., 1, 1] = F2[..., 0, 0]
    return G / J[..., None, None]


def psi_2d(F2, m: MaterialModel):
    """Plane-strain energy density for batched 2x2 gradients."""
    J = _det2(F2)
    if np.any(J <= 0):
        raise InvertedElementError("inverted element (det F <= 0)")
    logJ = np.log(J)
    FF = np.sum(F2 * F2, axis=(-2, -1)) + 1.0
    return (m.mu / 2 * (FF - 3 - 2 * logJ)
            + m.lam / 2 * ((J * J - 1) / 2 - logJ))


def piola_2d(F2, m: MaterialModel):
    """In-plane first Piola stress for batched 2x2 gradients."""
    J = _det2(F2)
    if np.any(J <= 0):
        raise InvertedElementError("inverted element (det F <= 0)")
    G = _inv_T2(F2, J)
    coef = (m.lam / 2) * (J * J - 1)
    return m.mu * (F2 - G) + coef[..., None, None] * G


def tangent_2d(F2, m: MaterialModel):
    """Material tangent dP/dF, shape (..., 2, 2, 2, 2), indices (i, J, k, L)."""
    J = _det2(F2)
    if np.any(J <= 0):
        raise InvertedElementError("inverted element (det F <= 0)")
    G = _inv_T2(F2, J)
    batch = F2.shape[:-2]
    A = np.zeros(batch + (2, 2, 2, 2))
    eye = np.eye(2)
    # mu * delta_ik delta_JL
    A += m.mu * eye[:, None, :, None] * eye[None, :, None, :]
    c1 = m.mu - (m.lam / 2) * (J * J - 1)
    A += c1[..., None, None, None, None] * np.einsum("...il,...kj->...ijkl", G, G)
    c2 = m.lam * J * J
    A += c2[..., None, None, None, None] * np.einsum("...ij,...kl->...ijkl", G, G)
    return A
