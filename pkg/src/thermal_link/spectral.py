"""Single-excitation Hamiltonian and its dressed eigensystem.

Bare basis (0-based indices used throughout the code):

    0 |eg000>   atom 1 excited
    1 |gg100>   photon in cavity 1
    2 |gg001>   photon in the fiber
    3 |gg010>   photon in cavity 2
    4 |ge000>   atom 2 excited
    5 |gg000>   ground

Dressed levels are labelled 1..6 in order of decreasing energy, so the ground
state is level 6 and sits at index 5 of every array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import SystemParams

N_STATES = 6
GROUND = 5
BARE_LABELS = ("eg000", "gg100", "gg001", "gg010", "ge000", "gg000")
# photonic bare state of each lossy mode, ordered (cavity 1, fiber, cavity 2)
MODE_STATES = (1, 2, 3)
MODE_NAMES = ("cavity1", "fiber", "cavity2")
# (0,1,2,3,4) -> (4,3,2,1,0): swaps the two atom/cavity arms
MIRROR = np.array([4, 3, 2, 1, 0, 5])

DEGENERACY_RTOL = 1e-9
# eigenvalues closer than this (relative) are treated as an exact tie
TIE_RTOL = 1e-13


class SpectralError(ArithmeticError):
    pass


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    """Real symmetric 6x6 Hamiltonian in the bare basis (ground energy 0)."""
    wa, w0 = params.omega_a, params.omega_0
    H = np.diag([wa, w0, wa, w0, wa, 0.0])
    H[0, 1] = H[1, 0] = params.g1
    H[3, 4] = H[4, 3] = params.g2
    H[1, 2] = H[2, 1] = params.nu
    H[2, 3] = H[3, 2] = params.nu
    return H


def jacobi_eigh(A: np.ndarray, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalisation of a small real symmetric matrix.

    Returns ``(w, V)`` with ``A @ V = V @ diag(w)`` and orthogonal ``V``.
    Rotations are skipped only when the off-diagonal entry is negligible
    relative to the geometric mean of the two diagonal entries, which keeps
    the small eigenvalue gaps of strongly detuned systems accurate.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    if A.shape != (n, n):
        raise SpectralError("square matrix required")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise SpectralError("matrix is not symmetric")
    V = np.eye(n)
    eps = np.finfo(float).eps
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) <= eps * math.sqrt(abs(A[p, p] * A[q, q])):
                    A[p, q] = A[q, p] = 0.0
                    continue
                rotated = True
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # A <- J^T A J with J the (p, q) Givens rotation
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp = V[:, p].copy()
                Vq = V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
        if not rotated:
            break
    else:
        raise SpectralError("Jacobi iteration did not converge")
    return np.diag(A).copy(), V


@dataclass(frozen=True)
class DressedBasis:
    """Sorted dressed eigensystem.

    ``C[:, k]`` is dressed level ``k + 1`` expressed in the bare basis.
    ``shift`` is the common offset removed before diagonalising the excited
    block; ``relative`` holds ``omega - shift`` for the five excited levels so
    that differences between nearly degenerate levels keep full precision.
    """

    omega: np.ndarray
    C: np.ndarray
    shift: float
    relative: np.ndarray
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def bohr(self, alpha: int, beta: int) -> float:
        """Bohr frequency Omega_beta - Omega_alpha for 1-based dressed labels."""
        a, b = alpha - 1, beta - 1
        if a != GROUND and b != GROUND:
            return float(self.relative[b] - self.relative[a])
        return float(self.omega[b] - self.omega[a])

    @property
    def excited(self) -> np.ndarray:
        return self.omega[:GROUND]


def _fix_signs(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for k in range(V.shape[1]):
        col = np.abs(V[:, k])
        # first component within rounding of the maximum wins ties
        lead = int(np.flatnonzero(col >= col.max() * (1 - 1e-12))[0])
        if V[lead, k] < 0:
            V[:, k] = -V[:, k]
    return V


def _order(w: np.ndarray, V: np.ndarray, scale: float) -> np.ndarray:
    """Descending energy; exact ties broken by overlap with bare |1>, |2>, ..."""
    overlaps = [tuple(-abs(V[:, k])) for k in range(len(w))]
    idx = sorted(range(len(w)), key=lambda k: -w[k])
    tie = TIE_RTOL * scale
    ordered: list[int] = []
    i = 0
    while i < len(idx):
        j = i + 1
        while j < len(idx) and w[idx[i]] - w[idx[j]] <= tie:
            j += 1
        cluster = sorted(idx[i:j], key=lambda k: overlaps[k])
        ordered.extend(cluster)
        i = j
    return np.array(ordered)


def _mirror_adapted_basis() -> tuple[np.ndarray, list[int], list[int]]:
    """Orthogonal basis of even (a+, c+, fiber) and odd (a-, c-) combinations."""
    r = 1.0 / math.sqrt(2.0)
    U = np.zeros((GROUND, GROUND))
    U[[0, 4], 0] = r, r
    U[[1, 3], 1] = r, r
    U[2, 2] = 1.0
    U[[0, 4], 3] = r, -r
    U[[1, 3], 4] = r, -r
    return U, [0, 1, 2], [3, 4]


def _diagonalize_excited(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi on the shifted excited block, per mirror sector when the arms are identical.

    Splitting by parity keeps nearly degenerate even/odd pairs from mixing
    through round-off.
    """
    mirror = MIRROR[:GROUND]
    coupled = block[0, 1] != 0 and block[1, 2] != 0
    if not coupled or not np.array_equal(block, block[np.ix_(mirror, mirror)]):
        # uncoupled pieces keep their bare eigenvectors
        return jacobi_eigh(block)
    U, even, odd = _mirror_adapted_basis()
    rotated = U.T @ block @ U
    w = np.zeros(GROUND)
    V = np.zeros((GROUND, GROUND))
    for sector in (even, odd):
        ws, vs = jacobi_eigh(rotated[np.ix_(sector, sector)])
        w[sector] = ws
        V[:, sector] = U[:, sector] @ vs
    return w, V


def eigensystem(H: np.ndarray) -> DressedBasis:
    """Dressed eigensystem of a bare-basis Hamiltonian from :func:`build_hamiltonian`.

    The ground row/column is split off exactly; the 5x5 excited block is
    shifted by its largest diagonal entry and diagonalised with Jacobi
    rotations (separately in each mirror sector when g1 = g2).  Eigenvector signs are fixed so the largest-magnitude bare
    component of every column is positive.
    """
    H = np.asarray(H, dtype=float)
    if H.shape != (N_STATES, N_STATES):
        raise SpectralError("6x6 Hamiltonian required")
    scale = max(1.0, float(np.abs(H).max()))
    if np.abs(H - H.T).max() > 1e-12 * scale:
        raise SpectralError("Hamiltonian is not symmetric")
    if np.any(H[GROUND, :GROUND] != 0) or H[GROUND, GROUND] != 0:
        raise SpectralError("ground state must be decoupled with zero energy")

    block = H[:GROUND, :GROUND]
    shift = float(np.max(np.diag(block)))
    w_rel, V5 = _diagonalize_excited(block - shift * np.eye(GROUND))
    order = _order(w_rel, V5, scale)
    w_rel = w_rel[order]
    V5 = V5[:, order]

    C = np.zeros((N_STATES, N_STATES))
    C[:GROUND, :GROUND] = V5
    C[GROUND, GROUND] = 1.0
    C = _fix_signs(C)
    omega = np.zeros(N_STATES)
    omega[:GROUND] = shift + w_rel

    warnings = []
    gaps = -np.diff(w_rel)
    for k, gap in enumerate(gaps):
        if gap < DEGENERACY_RTOL * abs(shift):
            warnings.append(
                f"near-degenerate levels {k + 1} and {k + 2}: gap {gap:.3e}"
            )
    if omega[GROUND - 1] <= 0:
        warnings.append("excited dressed level at or below the ground energy")
    return DressedBasis(omega, C, shift, w_rel, tuple(warnings))


def solve(params: SystemParams) -> DressedBasis:
    return eigensystem(build_hamiltonian(params))
