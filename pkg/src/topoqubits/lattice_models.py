"""Single-excitation chain Hamiltonians (SSH, Rice-Mele, AAH), disorder, and
small full-Hilbert-space oracles.

Energies are in units of the intercell coupling ``b`` and hbar = 1.  Sites are
1-based in the public API (``|e_j>``, j = 1..2L) and 0-based in arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpecError, SizeLimitError

MAX_FULL_SITES = 12

#: Recorded in run manifests.
GENERATOR_IDENTITY = "numpy.random.Generator(PCG64) + Box-Muller"


@dataclass(frozen=True)
class ChainSpec:
    L: int
    a: float
    b: float = 1.0
    omega: float = 0.0
    u: float = 0.0

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise InvalidSpecError(f"L must be an integer >= 1, got {self.L!r}")
        for name in ("a", "b", "omega", "u"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidSpecError(f"{name} must be finite")
        if self.b <= 0:
            raise InvalidSpecError(f"b must be > 0, got {self.b}")
        if self.a < 0:
            raise InvalidSpecError(f"a must be >= 0, got {self.a}")

    @property
    def n_sites(self) -> int:
        return 2 * self.L


@dataclass(frozen=True, eq=False)
class TridiagonalHamiltonian:
    """Real symmetric tridiagonal operator; the off-diagonal is stored once."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).copy()
        e = np.asarray(self.offdiag, dtype=float).copy()
        if d.ndim != 1 or e.ndim != 1 or len(d) < 1 or len(e) != len(d) - 1:
            raise InvalidSpecError(
                f"need diag of length n and offdiag of length n-1, got {d.shape}, {e.shape}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise InvalidSpecError("non-finite Hamiltonian entries")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n_sites(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        out = self.diag * psi
        out[:-1] += self.offdiag * psi[1:]
        out[1:] += self.offdiag * psi[:-1]
        return out

    def __eq__(self, other):
        if not isinstance(other, TridiagonalHamiltonian):
            return NotImplemented
        return np.array_equal(self.diag, other.diag) and np.array_equal(
            self.offdiag, other.offdiag
        )


@dataclass(frozen=True)
class DisorderSpec:
    sigma_coupling: float = 0.0
    sigma_frequency: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma_coupling >= 0 and self.sigma_frequency >= 0):
            raise InvalidSpecError("disorder standard deviations must be >= 0")

    @classmethod
    def uniform(cls, sigma: float, seed: int = 0) -> "DisorderSpec":
        return cls(sigma_coupling=sigma, sigma_frequency=sigma, seed=seed)

    @property
    def is_clean(self) -> bool:
        return self.sigma_coupling == 0 and self.sigma_frequency == 0


@dataclass(frozen=True, eq=False)
class DenseOperator:
    entries: np.ndarray
    hermitian_rtol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidSpecError(f"operator must be square, got shape {m.shape}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def hermiticity_error(self) -> float:
        m = self.entries
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        return float(np.max(np.abs(m - m.conj().T))) / scale if m.size else 0.0

    def is_hermitian(self) -> bool:
        return self.hermiticity_error() <= self.hermitian_rtol


def _bond_pattern(n_sites: int, a: float, b: float) -> np.ndarray:
    # bond j joins sites j, j+1 (1-based): odd j carries a, even j carries b
    return np.where(np.arange(n_sites - 1) % 2 == 0, a, b).astype(float)


def _sublattice_sign(n_sites: int) -> np.ndarray:
    return np.where(np.arange(n_sites) % 2 == 0, 1.0, -1.0)


def build_ssh(spec: ChainSpec) -> TridiagonalHamiltonian:
    if spec.u != 0:
        raise InvalidSpecError("build_ssh requires u = 0; use build_rice_mele")
    n = spec.n_sites
    return TridiagonalHamiltonian(np.full(n, float(spec.omega)), _bond_pattern(n, spec.a, spec.b))


def build_rice_mele(spec: ChainSpec) -> TridiagonalHamiltonian:
    """SSH chain with on-site energy omega + u on odd sites and omega - u on even sites."""
    n = spec.n_sites
    diag = spec.omega + spec.u * _sublattice_sign(n)
    return TridiagonalHamiltonian(diag, _bond_pattern(n, spec.a, spec.b))


def build_aah(
    L2: int, a_uniform: float, omega: float, alpha_mod: float, phase: float = 0.0
) -> TridiagonalHamiltonian:
    """Uniform-hopping chain with cosine on-site modulation.

    ``diag_j = omega * cos(2 pi j alpha_mod + phase)`` for j = 1..L2.
    """
    if int(L2) != L2 or L2 < 2:
        raise InvalidSpecError(f"L2 must be an integer >= 2, got {L2!r}")
    if not a_uniform > 0:
        raise InvalidSpecError("a_uniform must be > 0")
    j = np.arange(1, L2 + 1)
    diag = omega * np.cos(2.0 * np.pi * j * alpha_mod + phase)
    return TridiagonalHamiltonian(diag, np.full(L2 - 1, float(a_uniform)))


def gaussian_draws(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` standard normal deviates by the Box-Muller transform."""
    m = (n + 1) // 2
    u1 = 1.0 - rng.random(m)  # (0, 1], keeps log finite
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * m)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:n]


def draw_disorder(n_sites: int, d: DisorderSpec) -> tuple[np.ndarray, np.ndarray]:
    """Frozen (diagonal, off-diagonal) offsets for a chain of ``n_sites``.

    One seeded stream; diagonal draws come first so the on-site offsets do not
    depend on the coupling draws.
    """
    rng = np.random.default_rng(d.seed)
    z = gaussian_draws(rng, 2 * n_sites - 1)
    return d.sigma_frequency * z[:n_sites], d.sigma_coupling * z[n_sites:]


def apply_disorder(h: TridiagonalHamiltonian, d: DisorderSpec) -> TridiagonalHamiltonian:
    if d.is_clean:
        return TridiagonalHamiltonian(h.diag, h.offdiag)
    dd, de = draw_disorder(h.n_sites, d)
    return TridiagonalHamiltonian(h.diag + dd, h.offdiag + de)


# --- full 2^(2L) spin-chain oracle -------------------------------------------
# Site j (1-based) is bit (n - j) of the basis index, so |e_1> is the largest
# single-excitation index; up spin = bit set = sigma^z = +1.


def _check_full_size(n_sites: int) -> None:
    if n_sites > MAX_FULL_SITES:
        raise SizeLimitError(
            f"full-space oracle limited to {MAX_FULL_SITES} sites, got {n_sites}"
        )


def single_excitation_indices(L: int) -> np.ndarray:
    """Full-space basis indices of |e_1>, ..., |e_2L>."""
    n = 2 * L
    return np.array([1 << (n - j) for j in range(1, n + 1)])


def excitation_number_operator(L: int) -> DenseOperator:
    n = 2 * L
    _check_full_size(n)
    idx = np.arange(1 << n)
    counts = np.array([bin(i).count("1") for i in idx], dtype=float)
    return DenseOperator(np.diag(counts))


def build_full_chain(spec: ChainSpec) -> DenseOperator:
    """Dense spin-chain Hamiltonian with flip-flop couplings on the full space."""
    n = spec.n_sites
    _check_full_size(n)
    dim = 1 << n
    idx = np.arange(dim)
    onsite = spec.omega + spec.u * _sublattice_sign(n)
    bonds = _bond_pattern(n, spec.a, spec.b)
    H = np.zeros((dim, dim))
    bits = [(idx >> (n - j)) & 1 for j in range(1, n + 1)]
    H[idx, idx] = sum(onsite[j] * bits[j] for j in range(n))
    for j in range(n - 1):
        if bonds[j] == 0:
            continue
        # sigma_j^+ sigma_{j+1}^- + h.c. swaps an up/down pair on sites j, j+1
        flip = (1 << (n - 1 - j)) | (1 << (n - 2 - j))
        mask = bits[j] != bits[j + 1]
        src = idx[mask]
        H[src ^ flip, src] = bonds[j]
    return DenseOperator(H)
