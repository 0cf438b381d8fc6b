"""Hermitian diagonalization and edge-state diagnostics for chain Hamiltonians."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy import stats

from .errors import (
    InsufficientSupportError,
    NoEdgeModeError,
    NonConvergenceError,
    NotHermitianError,
)
from .lattice_models import DenseOperator, TridiagonalHamiltonian


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues; column ``k`` of ``vectors`` pairs with ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self):
        return len(self.values)

    def residual(self, H) -> float:
        """max_k ||H v_k - E_k v_k|| / max(1, |E_k|); H may be an array or operator."""
        if hasattr(H, "to_dense"):
            H = H.to_dense()
        H = np.asarray(getattr(H, "entries", H))
        r = H @ self.vectors - self.vectors * self.values
        return float(np.max(np.linalg.norm(r, axis=0) / np.maximum(1.0, np.abs(self.values))))

    def orthonormality_error(self) -> float:
        V = self.vectors
        return float(np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1]))))


@dataclass(frozen=True, eq=False)
class EdgeModeReport:
    indices: tuple[int, int]
    splitting: float
    left_state: np.ndarray
    right_state: np.ndarray
    xi_fit: float
    xi_theory: float


def _fix_real_signs(V: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # first component above tol made positive
    V = V.copy()
    first = np.argmax(np.abs(V) > tol, axis=0)
    s = np.sign(V[first, np.arange(V.shape[1])])
    s[s == 0] = 1.0
    return V * s


def eigh_tridiagonal(h: TridiagonalHamiltonian) -> EigenSystem:
    if h.n_sites == 1:
        return EigenSystem(h.diag.copy(), np.ones((1, 1)))
    try:
        w, v = sla.eigh_tridiagonal(h.diag, h.offdiag, lapack_driver="stemr")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc
    return EigenSystem(w, _fix_real_signs(v))


def eigh_dense_hermitian(m: DenseOperator, n_lowest: int | None = None) -> EigenSystem:
    """Dense Hermitian eigensolver; ``n_lowest`` post-selects the bottom levels."""
    if not m.is_hermitian():
        raise NotHermitianError(
            f"operator is not Hermitian (relative error {m.hermiticity_error():.2e})"
        )
    A = m.entries
    kwargs = {}
    if n_lowest is not None and n_lowest < m.dim:
        kwargs["subset_by_index"] = [0, n_lowest - 1]
    try:
        w, v = sla.eigh(A, check_finite=True, **kwargs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergenceError(f"dense eigensolver failed: {exc}") from exc
    if not np.iscomplexobj(v):
        v = _fix_real_signs(v)
    return EigenSystem(w, v)


def shifted_values(es: EigenSystem, omega: float) -> np.ndarray:
    return es.values - omega


def chiral_pairing_error(values: np.ndarray, omega: float = 0.0) -> float:
    """max |x_k + x_{n-1-k}| over sorted shifted energies x = E - omega."""
    x = np.sort(np.asarray(values) - omega)
    return float(np.max(np.abs(x + x[::-1])))


def default_gap_tol(a: float, b: float) -> float:
    return 0.5 * abs(b - a)


def find_edge_modes(
    es: EigenSystem,
    omega_shift: float = 0.0,
    gap_tol: float | None = None,
    *,
    a: float | None = None,
    b: float | None = None,
) -> EdgeModeReport:
    """Locate the mid-gap doublet and build the left/right edge states from it.

    ``gap_tol`` defaults to half the band-gap estimate ``|b - a|`` when the
    couplings are given.  Exactly two levels must lie strictly inside the window.
    Within the doublet, ``|L>`` is the combination maximally polarized on the
    odd sublattice (equivalently the one with most weight on site 1 in a clean
    chain) and ``|R>`` the orthogonal partner.
    """
    if gap_tol is None:
        if a is None or b is None:
            raise ValueError("gap_tol or both couplings a, b are required")
        gap_tol = default_gap_tol(a, b)
    if not gap_tol > 0:
        raise NoEdgeModeError(f"empty gap window (gap_tol={gap_tol})")
    x = es.values - omega_shift
    inside = np.flatnonzero(np.abs(x) < gap_tol)
    if len(inside) != 2:
        raise NoEdgeModeError(
            f"{len(inside)} level(s) inside |E - omega| < {gap_tol:g}; expected 2"
        )
    P = es.vectors[:, inside]
    n = P.shape[0]
    chiral = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    G = P.conj().T @ (chiral[:, None] * P)
    _, c = np.linalg.eigh(G)
    left = P @ c[:, 1]
    right = P @ c[:, 0]
    left = _phase_to_positive(left, 0)
    right = _phase_to_positive(right, n - 1)
    if np.isrealobj(es.vectors):
        left, right = left.real, right.real

    try:
        xi_fit, _ = localization_length_fit(left)
    except InsufficientSupportError:
        xi_fit = math.nan
    xi_theory = math.nan
    if a is not None and b is not None and b > 0:
        if a == 0:
            xi_theory = 0.0
        elif a < b:
            xi_theory = 1.0 / math.log(b / a)
    return EdgeModeReport(
        indices=(int(inside[0]), int(inside[1])),
        splitting=float(abs(es.values[inside[1]] - es.values[inside[0]])),
        left_state=left,
        right_state=right,
        xi_fit=xi_fit,
        xi_theory=xi_theory,
    )


def _phase_to_positive(v: np.ndarray, site: int) -> np.ndarray:
    amp = v[site]
    if abs(amp) < 1e-300:
        amp = v[np.argmax(np.abs(v))]
    return v * (abs(amp) / amp)


def localization_length_fit(s: np.ndarray, support_tol: float = 1e-14) -> tuple[float, float]:
    """Exponential decay length of a left-edge profile, in unit cells.

    Fits ``ln|a_j|`` against the cell index ``m = (j - 1) / 2`` over odd sites
    (1-based) with ``|a_j| > support_tol``, i.e. ``|a_j| = |a_1| exp(-m / xi)``.
    Returns ``(xi, r_squared)``.
    """
    amp = np.abs(np.asarray(s))[0::2]
    m = np.arange(len(amp), dtype=float)
    keep = amp > support_tol
    if keep.sum() < 3:
        raise InsufficientSupportError(
            f"need >= 3 odd sites above {support_tol:g}, have {int(keep.sum())}"
        )
    fit = stats.linregress(m[keep], np.log(amp[keep]))
    xi = -1.0 / fit.slope if fit.slope != 0 else math.inf
    return float(xi), float(fit.rvalue**2)


def sigma_z_profile(s: np.ndarray) -> np.ndarray:
    return 2.0 * np.abs(np.asarray(s)) ** 2 - 1.0


def ipr(s: np.ndarray) -> float:
    return float(np.sum(np.abs(np.asarray(s)) ** 4))


def center_of_mass(s: np.ndarray) -> float:
    """Mean 1-based site index under |psi_j|^2."""
    p = np.abs(np.asarray(s)) ** 2
    return float(np.sum(np.arange(1, len(p) + 1) * p) / np.sum(p))
