"""Displacement-controlled compression of a pixel mesh.

The bottom boundary is fully fixed; top nodes move down by a fixed increment
per step with zero lateral motion (fixed-fixed).  Each step equilibrates the
total stored energy with Newton iterations (2x2 Gauss quadrature, direct
sparse factorization); the march stops once max |u_x| reaches the stop ratio
times the column width.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_array
from scipy.sparse.linalg import splu

from ..errors import AmbiguousSampleError, InvertedElementError, SolverFailure
from .material import MaterialModel, piola_2d, psi_2d, tangent_2d
from .mesh import PixelMesh

_GP = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float) / np.sqrt(3.0)
_CORNERS = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)


@dataclass(frozen=True)
class SolverConfig:
    increment: float = None      # displacement per step; None = 2.5e-4 * L
    stop_ratio: float = 0.15     # of width
    newton_rel_tol: float = 1e-8
    newton_max_iter: int = 25
    max_step_halvings: int = 8
    max_steps: int = 2000
    quadrature: str = "gauss2x2"

    def __post_init__(self):
        if self.increment is not None and self.increment <= 0:
            raise ValueError("increment must be positive")
        if self.stop_ratio <= 0:
            raise ValueError("stop_ratio must be positive")
        if self.quadrature != "gauss2x2":
            raise ValueError(f"unsupported quadrature {self.quadrature!r}")


@dataclass(frozen=True)
class SimResult:
    label: int                   # 0 = left, 1 = right
    max_ux: float
    min_ux: float
    steps: int
    centerline: list             # [(y, u_x)] along the column axis
    disp_range: float            # (max_ux - min_ux) / width

    def to_dict(self):
        return {"label": self.label, "max_ux": self.max_ux,
                "min_ux": self.min_ux, "steps": self.steps,
                "disp_range": self.disp_range}


def classify_direction(max_ux: float, min_ux: float) -> int:
    """0 (left) iff |max_ux| < |min_ux|, 1 otherwise; exact ties are rejected."""
    if abs(max_ux) == abs(min_ux):
        raise AmbiguousSampleError(
            f"no symmetry breaking: |max_ux| == |min_ux| == {abs(max_ux)}")
    return 0 if abs(max_ux) < abs(min_ux) else 1


def deflection_diagnostics(result: SimResult, width: float = 1.0):
    """(disp_range, centerline) for the confidence/deformation comparisons."""
    return (result.max_ux - result.min_ux) / width, result.centerline


class _Assembler:
    """Vectorized residual / tangent / energy assembly on a fixed topology."""

    def __init__(self, mesh: PixelMesh, material: MaterialModel):
        self.mesh = mesh
        self.material = material
        h = mesh.cell_size
        # dN/dX at the 4 Gauss points; identical for every (square) element
        self.dNdX = np.empty((4, 4, 2))
        for g, (xi, eta) in enumerate(_GP):
            dxi = _CORNERS[:, 0] / 4 * (1 + _CORNERS[:, 1] * eta)
            deta = _CORNERS[:, 1] / 4 * (1 + _CORNERS[:, 0] * xi)
            self.dNdX[g] = np.column_stack([dxi, deta]) * (2.0 / h)
        self.wdetJ = (h / 2) ** 2  # unit Gauss weights

        elems = mesh.elements.astype(np.int64)
        self.edof = (2 * elems[:, :, None] + np.arange(2)).reshape(-1, 8)
        self.rows_idx = np.repeat(self.edof, 8, axis=1).ravel()
        self.cols_idx = np.tile(self.edof, (1, 8)).ravel()
        self.ndof = 2 * mesh.num_nodes

    def gradients(self, u):
        """Deformation gradients per (gauss point, element): (4, M, 2, 2)."""
        ue = u.reshape(-1, 2)[self.mesh.elements]
        F = np.einsum("gaJ,mai->gmiJ", self.dNdX, ue, optimize=True)
        F += np.eye(2)
        return F

    def energy(self, u):
        F = self.gradients(u)
        return float(psi_2d(F, self.material).sum() * self.wdetJ)

    def residual(self, u):
        F = self.gradients(u)
        P = piola_2d(F, self.material)
        f = np.einsum("gaJ,gmiJ->mai", self.dNdX, P, optimize=True) * self.wdetJ
        fint = np.zeros(self.ndof)
        np.add.at(fint, self.edof.reshape(-1, 4, 2).ravel(), f.ravel())
        return fint

    def residual_and_tangent(self, u):
        F = self.gradients(u)
        P = piola_2d(F, self.material)
        f = np.einsum("gaJ,gmiJ->mai", self.dNdX, P, optimize=True) * self.wdetJ
        fint = np.zeros(self.ndof)
        np.add.at(fint, self.edof.reshape(-1, 4, 2).ravel(), f.ravel())

        A = tangent_2d(F, self.material)
        Ke = np.einsum("gaJ,gmiJkL,gbL->maibk", self.dNdX, A, self.dNdX,
                       optimize=True) * self.wdetJ
        K = coo_array((Ke.ravel(), (self.rows_idx, self.cols_idx)),
                      shape=(self.ndof, self.ndof)).tocsc()
        return fint, K


class _StepDidNotConverge(Exception):
    pass


def _fixed_dof_mask(mesh: PixelMesh):
    fixed = np.zeros(2 * mesh.num_nodes, dtype=bool)
    fixed[2 * mesh.bottom_nodes] = True
    fixed[2 * mesh.bottom_nodes + 1] = True
    fixed[2 * mesh.top_nodes] = True
    fixed[2 * mesh.top_nodes + 1] = True
    return fixed


def _newton(asm: _Assembler, u, free, cfg: SolverConfig):
    """Equilibrate at the current prescribed displacements, in place."""
    ref = None
    for _ in range(cfg.newton_max_iter):
        fint, K = asm.residual_and_tangent(u)
        r = fint[free]
        nr = float(np.linalg.norm(r))
        if ref is None:
            ref = nr
        if nr <= cfg.newton_rel_tol * ref or nr < 1e-14:
            return u
        Kff = K[free][:, free]
        du = splu(Kff.tocsc()).solve(-r)
        if not np.all(np.isfinite(du)):
            raise _StepDidNotConverge("non-finite Newton correction")
        u[free] += du
    raise _StepDidNotConverge(f"no convergence in {cfg.newton_max_iter} iterations")


def _centerline_nodes(mesh: PixelMesh):
    """Per node row, the node nearest x = w/2 (ties to the smaller x)."""
    h = mesh.cell_size
    rows = np.rint(mesh.nodes[:, 1] / h).astype(int)
    half = mesh.width / 2
    order = np.lexsort((mesh.nodes[:, 0], np.abs(mesh.nodes[:, 0] - half), rows))
    sorted_rows = rows[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = sorted_rows[1:] != sorted_rows[:-1]
    return order[first]


def solve_compression(mesh: PixelMesh, material: MaterialModel,
                      cfg: SolverConfig = None) -> SimResult:
    """Compress until max |u_x| >= stop_ratio * width and label the direction."""
    cfg = cfg or SolverConfig()
    length = mesh.length
    inc_nominal = cfg.increment if cfg.increment is not None else 2.5e-4 * length
    stop = cfg.stop_ratio * mesh.width

    asm = _Assembler(mesh, material)
    fixed = _fixed_dof_mask(mesh)
    free = ~fixed
    top_y = 2 * mesh.top_nodes + 1

    ndof = 2 * mesh.num_nodes
    u = np.zeros(ndof)
    u_prev = None
    inc_prev = None
    applied = 0.0
    steps = 0

    while steps < cfg.max_steps:
        inc = inc_nominal
        halvings = 0
        while True:
            trial = u.copy()
            if u_prev is not None and inc_prev is not None:
                trial[free] += (u[free] - u_prev[free]) * (inc / inc_prev)
            trial[top_y] = -(applied + inc)
            try:
                _newton(asm, trial, free, cfg)
                break
            except (_StepDidNotConverge, InvertedElementError) as exc:
                halvings += 1
                if halvings > cfg.max_step_halvings:
                    raise SolverFailure(
                        f"step {steps}: halving budget exhausted ({exc})",
                        last_state=_make_result_fields(mesh, u, steps),
                    ) from exc
                inc /= 2
        applied += inc
        steps += 1
        u_prev, inc_prev = u, inc
        u = trial
        ux = u[0::2]
        if max(ux.max(), -ux.min()) >= stop:
            return _finalize(mesh, u, steps)
    raise SolverFailure(
        f"no buckling within {cfg.max_steps} steps (applied {applied:.4g})",
        last_state=_make_result_fields(mesh, u, steps),
    )


def _make_result_fields(mesh, u, steps):
    ux = u[0::2]
    return {"max_ux": float(ux.max()), "min_ux": float(ux.min()), "steps": steps}


def _finalize(mesh: PixelMesh, u, steps) -> SimResult:
    ux = u[0::2]
    max_ux, min_ux = float(ux.max()), float(ux.min())
    label = classify_direction(max_ux, min_ux)
    cl_nodes = _centerline_nodes(mesh)
    centerline = [(float(mesh.nodes[n, 1]), float(ux[n])) for n in cl_nodes]
    return SimResult(label=label, max_ux=max_ux, min_ux=min_ux, steps=steps,
                     centerline=centerline,
                     disp_range=(max_ux - min_ux) / mesh.width)


def first_instability_strain(mesh: PixelMesh, material: MaterialModel,
                             cfg: SolverConfig = None,
                             max_strain: float = 0.12) -> float:
    """Applied compressive strain at which the tangent first turns indefinite.

    Marches the same displacement-controlled protocol and watches the sign of
    det(K_ff) through the sparse LU factors; the first sign flip marks the
    bifurcation point of the fundamental path (lateral-deflection onset for a
    geometry too symmetric to break on its own).
    """
    cfg = cfg or SolverConfig()
    length = mesh.length
    inc = cfg.increment if cfg.increment is not None else 2.5e-4 * length

    asm = _Assembler(mesh, material)
    fixed = _fixed_dof_mask(mesh)
    free = ~fixed
    top_y = 2 * mesh.top_nodes + 1

    u = np.zeros(2 * mesh.num_nodes)
    applied = 0.0
    while applied < max_strain * length:
        u[top_y] = -(applied + inc)
        _newton(asm, u, free, cfg)
        applied += inc
        _, K = asm.residual_and_tangent(u)
        lu = splu(K[free][:, free].tocsc())
        if _det_sign(lu) < 0:
            return applied / length
    raise SolverFailure(f"tangent stayed definite up to strain {max_strain}")


def _perm_parity(p):
    """Parity (+1/-1) of a permutation given as an index array."""
    p = np.asarray(p)
    seen = np.zeros(len(p), dtype=bool)
    parity = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            clen += 1
        if clen % 2 == 0:
            parity = -parity
    return parity


def _det_sign(lu):
    diag = lu.U.diagonal()
    sign = 1 if (diag < 0).sum() % 2 == 0 else -1
    return sign * _perm_parity(lu.perm_r) * _perm_parity(lu.perm_c)
