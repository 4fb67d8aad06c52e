"""Brute-force reference: dense Hamiltonian, eigendecomposition, partial traces.

Nothing here except :func:`verify_against_analytic` touches the closed forms
in :mod:`spinrotor.model` or :mod:`spinrotor.entanglement`; that function
imports them only to compare the two routes.

Basis ordering is fixed: index ``2 * (m + m_max) + s`` with ``m`` running
from ``-m_max`` to ``m_max`` and ``s = 0`` for up, ``1`` for down.

Truncating at ``m_max = max |m|`` of a state's support is exact rather than
approximate, since the Hamiltonian never couples different ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from .model import ModelParams

_SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
_SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2

MAX_M = 64


@dataclass(frozen=True)
class TruncatedSpace:
    m_max: int

    def __post_init__(self):
        if int(self.m_max) != self.m_max or self.m_max < 0:
            raise ValueError(f"m_max must be a non-negative integer, got {self.m_max!r}")

    @property
    def sectors(self) -> np.ndarray:
        return np.arange(-self.m_max, self.m_max + 1)

    @property
    def n_sectors(self) -> int:
        return 2 * self.m_max + 1

    @property
    def dimension(self) -> int:
        return 2 * self.n_sectors

    def index(self, m: int, spin: int) -> int:
        if abs(m) > self.m_max or spin not in (0, 1):
            raise IndexError(f"(m={m}, spin={spin}) outside the truncated space")
        return 2 * (m + self.m_max) + spin

    def embed(self, sectors, amplitudes, spinors) -> np.ndarray:
        """Full state vector of ``sum c_m |m> (x) |sigma_m>``."""
        psi = np.zeros(self.dimension, dtype=complex)
        for m, c, spinor in zip(sectors, amplitudes, spinors):
            psi[self.index(m, 0)] = c * spinor[0]
            psi[self.index(m, 1)] = c * spinor[1]
        return psi


@dataclass(frozen=True, eq=False)
class DenseOperator:
    matrix: np.ndarray
    space: TruncatedSpace = field(repr=False)

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    def block(self, m: int) -> np.ndarray:
        i = self.space.index(m, 0)
        return self.matrix[i : i + 2, i : i + 2]

    def propagator(self, t: float) -> np.ndarray:
        energies, vectors = self.eigh
        return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def build_hamiltonian(params: ModelParams, space: TruncatedSpace) -> DenseOperator:
    """``L_z^2/2I (x) 1 + 1 (x) delta S_x + g L_z (x) S_z`` on the truncated basis."""
    if space.m_max > MAX_M:
        raise ValueError(f"m_max={space.m_max} exceeds the dense limit {MAX_M}")
    top = float(space.m_max) ** 2 / (2 * params.inertia)
    if not math.isfinite(top):
        raise ValueError(f"rotor energy m_max^2/2I overflows for m_max={space.m_max}")
    lz = np.diag(space.sectors.astype(float)).astype(complex)
    eye_rotor = np.eye(space.n_sectors, dtype=complex)
    eye_spin = np.eye(2, dtype=complex)
    h = (
        np.kron(lz @ lz / (2 * params.inertia), eye_spin)
        + np.kron(eye_rotor, params.delta * _SX)
        + params.coupling * np.kron(lz, _SZ)
    )
    if np.max(np.abs(h - h.conj().T)) > 1e-12:
        raise AssertionError("Hamiltonian is not Hermitian")
    mask = np.kron(eye_rotor.real, np.ones((2, 2))) == 0
    if np.any(h[mask] != 0):
        raise AssertionError("Hamiltonian couples different rotor sectors")
    return DenseOperator(h, space)


def _check_vector(state: np.ndarray, dimension: int, tol: float) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape != (dimension,):
        raise ValueError(f"state has shape {state.shape}, expected ({dimension},)")
    norm_sq = float(np.vdot(state, state).real)
    if abs(norm_sq - 1) > tol:
        raise ValueError(f"state is not normalized: <psi|psi> = {norm_sq!r}")
    return state


def oracle_evolve(h: DenseOperator, initial: np.ndarray, t: float, tol: float = 1e-12) -> np.ndarray:
    """``V exp(-i D t) V^dagger psi0`` with ``H = V D V^dagger`` computed once per operator."""
    psi0 = _check_vector(initial, h.space.dimension, tol)
    energies, vectors = h.eigh
    return vectors @ (np.exp(-1j * energies * t) * (vectors.conj().T @ psi0))


def oracle_partial_trace(
    state: np.ndarray, space: TruncatedSpace, keep: str, tol: float = 1e-10
) -> np.ndarray:
    """Reduced density matrix of the ``"spin"`` or ``"rotor"`` factor."""
    psi = _check_vector(state, space.dimension, tol).reshape(space.n_sectors, 2)
    if keep == "spin":
        return np.einsum("ms,mt->st", psi, psi.conj())
    if keep == "rotor":
        return np.einsum("ms,ns->mn", psi, psi.conj())
    raise ValueError(f"keep must be 'spin' or 'rotor', got {keep!r}")


def oracle_purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)


def oracle_entropy(rho: np.ndarray) -> float:
    p = np.linalg.eigvalsh(rho)
    p = p[p > 1e-14]
    return float(-np.sum(p * np.log(p)))


def _spectrum_distance(a: np.ndarray, b: np.ndarray) -> float:
    n = max(len(a), len(b))
    a = np.sort(np.pad(np.clip(a, 0, None), (0, n - len(a))))
    b = np.sort(np.pad(np.clip(b, 0, None), (0, n - len(b))))
    return float(np.max(np.abs(a - b)))


def _refined_minimum(f, times: np.ndarray, values: np.ndarray) -> float:
    """Grid minimum of ``f`` polished by bounded Brent search around each discrete local minimum."""
    best = float(values.min()) if len(values) else math.inf
    if len(values) < 3 or np.ptp(values) < 1e-12:
        return best
    for k in range(1, len(values) - 1):
        if values[k - 1] > values[k] <= values[k + 1]:
            res = minimize_scalar(
                f, bounds=(times[k - 1], times[k + 1]), method="bounded", options={"xatol": 1e-10}
            )
            best = min(best, float(res.fun))
    return best


@dataclass
class VerificationReport:
    """Largest oracle-vs-analytic deviations over a time grid (Chebyshev norm).

    ``purity_min`` holds each route's lowest purity, with interior grid
    minima refined off-grid so the value does not depend on grid spacing.
    """

    deviations: dict[str, float]
    purity_min: dict[str, float]
    n_times: int

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())

    def passed(self, threshold: float = 1e-9) -> bool:
        return all(math.isfinite(v) and v < threshold for v in self.deviations.values())


def verify_against_analytic(params: ModelParams, initial, t_grid) -> VerificationReport:
    """Run the analytic and brute-force routes side by side.

    Args:
        params: Model constants.
        initial: A normalized :class:`~spinrotor.entanglement.SuperposedState`.
        t_grid: Times at which both routes are compared.

    Returns:
        Maximum deviations of the state vector, spin purity, entropy, Schmidt
        spectra (spin vs rotor reductions), rotor density, branch overlap
        (two-sector states only) and the sector spectra.
    """
    from . import entanglement as ent
    from .model import SPIN_UP, sector_spectrum

    space = TruncatedSpace(max(abs(m) for m in initial.sectors))
    h = build_hamiltonian(params, space)
    psi0 = space.embed(initial.sectors, initial.amplitudes, initial.spinors)
    trajectory = ent.evolve(params, initial)

    rows = [space.index(m, 0) // 2 for m in initial.sectors]
    two_sector = len(initial) == 2
    closed_form_k = (
        two_sector
        and initial.sectors[0] == -initial.sectors[1]
        and np.allclose(initial.spinors, SPIN_UP, atol=0)
        and np.isclose(abs(initial.amplitudes[0]), abs(initial.amplitudes[1]), rtol=0, atol=1e-15)
    )
    upper = int(np.argmax(initial.sectors))
    lower = 1 - upper

    dev = dict.fromkeys(
        ["state", "purity", "entropy", "schmidt", "rotor_density", "spectrum"], 0.0
    )
    if two_sector:
        dev["overlap"] = 0.0
    oracle_purities, analytic_purities = [], []

    for t in t_grid:
        psi = oracle_evolve(h, psi0, t)
        state = trajectory(t)
        analytic_psi = space.embed(state.sectors, state.amplitudes, state.spinors)
        dev["state"] = max(dev["state"], float(np.max(np.abs(psi - analytic_psi))))

        rho_spin = oracle_partial_trace(psi, space, "spin")
        rho_rotor = oracle_partial_trace(psi, space, "rotor")
        report = ent.entanglement_report(state)
        p_oracle = oracle_purity(rho_spin)
        oracle_purities.append(p_oracle)
        analytic_purities.append(report.purity)
        dev["purity"] = max(dev["purity"], abs(p_oracle - report.purity))
        dev["entropy"] = max(dev["entropy"], abs(oracle_entropy(rho_spin) - report.entropy))
        dev["schmidt"] = max(
            dev["schmidt"],
            _spectrum_distance(np.linalg.eigvalsh(rho_spin), np.linalg.eigvalsh(rho_rotor)),
            _spectrum_distance(np.linalg.eigvalsh(rho_spin), np.array(report.schmidt)),
        )
        analytic_rotor = ent.reduced_rotor(state).matrix
        dev["rotor_density"] = max(
            dev["rotor_density"],
            float(np.max(np.abs(rho_rotor[np.ix_(rows, rows)] - analytic_rotor))),
        )
        if two_sector:
            # rho_rotor[upper, lower] = c_u c_l^* e^{-i(m_u^2 - m_l^2) t/2I} <sigma_l|sigma_u>
            m_u, m_l = initial.sectors[upper], initial.sectors[lower]
            c_u, c_l = initial.amplitudes[upper], initial.amplitudes[lower]
            kinetic = np.exp(-1j * (m_u**2 - m_l**2) * t / (2 * params.inertia))
            norms = np.linalg.norm(initial.spinors, axis=1)
            k_oracle = np.conj(
                rho_rotor[rows[upper], rows[lower]] / (c_u * np.conj(c_l) * kinetic)
            ) / (norms[0] * norms[1])
            k_analytic = report.overlap.value
            worst = abs(k_oracle - k_analytic)
            if closed_form_k:
                worst = max(worst, abs(k_oracle - ent.branch_overlap(params, m_u, t).value))
            dev["overlap"] = max(dev["overlap"], float(worst))

    for m in space.sectors:
        block = np.linalg.eigvalsh(h.block(int(m)))
        spec = sector_spectrum(params, int(m))
        dev["spectrum"] = max(
            dev["spectrum"],
            abs(block[0] - spec.eps_minus),
            abs(block[1] - spec.eps_plus),
        )
    refined = ent.locate_purity_extrema(params, initial, t_grid, analytic_purities)
    analytic_min = min(analytic_purities + [p for _, p in refined])
    oracle_min = _refined_minimum(
        lambda t: oracle_purity(oracle_partial_trace(oracle_evolve(h, psi0, t), space, "spin")),
        np.asarray(t_grid, dtype=float),
        np.asarray(oracle_purities),
    )
    return VerificationReport(
        deviations=dev,
        purity_min={"oracle": oracle_min, "analytic": analytic_min},
        n_times=len(t_grid),
    )
