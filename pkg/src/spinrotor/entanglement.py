"""Multi-sector dynamics and spin-rotor entanglement.

A state ``sum_m c_m |m> (x) |sigma_m>`` is stored sector by sector. Rotor
states with different ``m`` are orthogonal, so both reductions follow from
the per-sector spinors alone:

    rho_spin  = sum_m |c_m|^2 |sigma_m><sigma_m|
    rho_rotor[m, m'] = c_m c_m'^* <sigma_m'|sigma_m>

The kinetic phases ``exp(-i m^2 t / 2I)`` are carried in the amplitudes and
never factored out as a global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .model import (
    SPIN_UP,
    ModelParams,
    field_direction,
    sector_generator,
    sector_propagator,
)

ZERO_EIGENVALUE = 1e-14
RENORMALIZE_WINDOW = 1e-10
IDENTITY_TOL = 1e-10


class ConsistencyError(RuntimeError):
    """A closed-form identity disagreed with the matrix computation."""


@dataclass(frozen=True, eq=False)
class SuperposedState:
    """Superposition over rotor sectors, each carrying its own spinor.

    Attributes:
        sectors: Distinct rotor quantum numbers.
        amplitudes: Complex sector amplitudes ``c_m``, shape ``(N,)``.
        spinors: Spin state of each sector, shape ``(N, 2)``.
        time: Time at which the state is given.
    """

    sectors: tuple[int, ...]
    amplitudes: np.ndarray
    spinors: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        sectors = tuple(int(m) for m in self.sectors)
        if not sectors:
            raise ValueError("a state needs at least one rotor sector")
        if len(set(sectors)) != len(sectors):
            raise ValueError(f"rotor sectors must be distinct, got {sectors}")
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        spinors = np.asarray(self.spinors, dtype=complex)
        if spinors.ndim == 1:
            spinors = np.broadcast_to(spinors, (len(sectors), 2))
        if amplitudes.shape != (len(sectors),) or spinors.shape != (len(sectors), 2):
            raise ValueError(
                f"expected {len(sectors)} amplitudes and {len(sectors)}x2 spinors, "
                f"got shapes {amplitudes.shape} and {spinors.shape}"
            )
        if not (np.all(np.isfinite(amplitudes)) and np.all(np.isfinite(spinors))):
            raise ValueError("amplitudes and spinors must be finite")
        object.__setattr__(self, "sectors", sectors)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "spinors", np.array(spinors))
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, complex, Sequence[complex]]], time=0.0):
        entries = list(entries)
        return cls(
            sectors=tuple(m for m, _, _ in entries),
            amplitudes=np.array([c for _, c, _ in entries], dtype=complex),
            spinors=np.array([s for _, _, s in entries], dtype=complex).reshape(-1, 2),
            time=time,
        )

    def __len__(self):
        return len(self.sectors)

    def wavefunction(self) -> np.ndarray:
        """Rows ``c_m |sigma_m>``, shape ``(N, 2)``."""
        return self.amplitudes[:, None] * self.spinors

    def weights(self) -> np.ndarray:
        """Probability of finding the rotor in each sector."""
        return np.sum(np.abs(self.wavefunction()) ** 2, axis=1)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.weights())))

    def normalized(self) -> "SuperposedState":
        """Copy with unit-norm spinors and a normalized amplitude vector."""
        spinor_norms = np.linalg.norm(self.spinors, axis=1)
        if np.any(spinor_norms == 0):
            raise ValueError("cannot normalize a zero spinor")
        amplitudes = self.amplitudes * spinor_norms
        total = np.linalg.norm(amplitudes)
        if total == 0:
            raise ValueError("cannot normalize a zero state")
        return SuperposedState(
            self.sectors, amplitudes / total, self.spinors / spinor_norms[:, None], self.time
        )

    def with_phase(self, phase: float) -> "SuperposedState":
        return SuperposedState(
            self.sectors, self.amplitudes * np.exp(1j * phase), self.spinors, self.time
        )


def check_normalized(state: SuperposedState, tol: float = 1e-12) -> None:
    norm_sq = state.norm() ** 2
    if abs(norm_sq - 1.0) > tol:
        raise ValueError(
            f"state is not normalized: sum |c_m|^2 <sigma_m|sigma_m> = {norm_sq!r} "
            f"(tolerance {tol:g})"
        )


def two_sector_state(m: int, spinor=SPIN_UP) -> SuperposedState:
    """Equal superposition of the ``+m`` and ``-m`` sectors with a shared spinor."""
    m = abs(int(m))
    if m == 0:
        raise ValueError("two-sector state needs m != 0")
    spinor = np.asarray(spinor, dtype=complex)
    amp = 1 / math.sqrt(2)
    return SuperposedState((m, -m), np.array([amp, amp]), np.stack([spinor, spinor]))


def single_sector_state(m: int, spinor=SPIN_UP) -> SuperposedState:
    return SuperposedState((int(m),), np.array([1.0]), np.asarray(spinor, dtype=complex)[None, :])


def random_superposition(
    rng: np.random.Generator, n_sectors: int, m_max: int, *, shared_spinor=None
) -> SuperposedState:
    """Random normalized state on ``n_sectors`` distinct sectors in ``[-m_max, m_max]``."""
    if n_sectors > 2 * m_max + 1:
        raise ValueError(f"cannot place {n_sectors} sectors within |m| <= {m_max}")
    sectors = rng.choice(np.arange(-m_max, m_max + 1), size=n_sectors, replace=False)
    amplitudes = rng.normal(size=n_sectors) + 1j * rng.normal(size=n_sectors)
    if shared_spinor is None:
        spinors = rng.normal(size=(n_sectors, 2)) + 1j * rng.normal(size=(n_sectors, 2))
    else:
        spinors = np.broadcast_to(np.asarray(shared_spinor, dtype=complex), (n_sectors, 2))
    state = SuperposedState(tuple(int(m) for m in sectors), amplitudes, spinors)
    return state.normalized()


def evolve(params: ModelParams, initial: SuperposedState) -> Callable[[float], SuperposedState]:
    """Exact time evolution of a sector superposition.

    Each amplitude picks up its kinetic phase and each spinor is rotated by
    its own sector propagator. Returns a function of the absolute time ``t``;
    the initial state is taken to live at ``initial.time``.
    """
    check_normalized(initial, params.norm_tol)
    sectors = initial.sectors
    kinetic = np.array([params.kinetic_energy(m) for m in sectors])
    t0 = initial.time

    def state_at(t: float) -> SuperposedState:
        t = float(t)
        if not math.isfinite(t):
            raise ValueError(f"time must be finite, got {t!r}")
        dt = t - t0
        amplitudes = initial.amplitudes * np.exp(-1j * kinetic * dt)
        spinors = np.array(
            [sector_propagator(params, m, dt) @ s for m, s in zip(sectors, initial.spinors)]
        )
        return SuperposedState(sectors, amplitudes, spinors, t)

    return state_at


@dataclass(frozen=True)
class BranchOverlap:
    value: complex
    magnitude: float


def branch_overlap(params: ModelParams, m: int, t: float) -> BranchOverlap:
    """Closed-form overlap ``<sigma_m(t)|sigma_-m(t)>`` for spins starting in up.

    ``K = 1 - 2 lam^2/(delta^2 + lam^2) sin^2(omega t/2) + 2i (lam/omega) cos sin``
    with ``lam = g m``. Its modulus is evaluated independently from
    ``sqrt(1 - 4 delta^2 lam^2 / omega^4 sin^4(omega t/2))``.
    """
    omega = params.precession_frequency(m)
    if omega == 0:
        return BranchOverlap(1.0 + 0.0j, 1.0)
    # a = delta/omega, b = lam/omega, so lam^2/(delta^2 + lam^2) = b^2
    a, b = field_direction(params, m)
    c = math.cos(omega * t / 2)
    s = math.sin(omega * t / 2)
    value = complex(1 - 2 * b**2 * s**2, 2 * b * c * s)
    # 1 - 4 a^2 b^2 s^4 factored into non-negative terms, exact near |K| = 0
    magnitude = math.sqrt((c**2 + (a - b) ** 2 * s**2) * (c**2 + (a + b) ** 2 * s**2))
    return BranchOverlap(value, magnitude)


def reduced_spin(state: SuperposedState) -> np.ndarray:
    """2x2 spin density matrix after tracing out the rotor."""
    psi = state.wavefunction()
    return psi.T @ psi.conj()


@dataclass(frozen=True, eq=False)
class RotorDensity:
    """Rotor density matrix restricted to the populated sectors."""

    basis: tuple[int, ...]
    matrix: np.ndarray

    def element(self, m: int, m_prime: int) -> complex:
        return complex(self.matrix[self.basis.index(m), self.basis.index(m_prime)])


def reduced_rotor(state: SuperposedState) -> RotorDensity:
    psi = state.wavefunction()
    return RotorDensity(state.sectors, psi @ psi.conj().T)


def qubit_eigenvalues(rho: np.ndarray) -> tuple[float, float]:
    """Eigenvalues of a 2x2 Hermitian matrix in descending order, from trace and gap."""
    a = rho[0, 0].real
    d = rho[1, 1].real
    off = 0.5 * (rho[0, 1] + np.conj(rho[1, 0]))
    gap = math.hypot(a - d, 2 * abs(off))
    trace = a + d
    return (trace + gap) / 2, (trace - gap) / 2


def purity(rho: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", rho, rho).real)


def schmidt_values(eigenvalues: Iterable[float]) -> tuple[float, ...]:
    p = np.clip(np.asarray(list(eigenvalues), dtype=float), 0.0, 1.0)
    p[p < ZERO_EIGENVALUE] = 0.0
    total = p.sum()
    if abs(total - 1.0) < RENORMALIZE_WINDOW:
        p = p / total
    return tuple(float(x) for x in sorted(p, reverse=True))


def entanglement_entropy(probabilities: Iterable[float]) -> float:
    """``-sum p ln p`` in nats, with ``0 ln 0 = 0``."""
    total = -sum(p * math.log(p) for p in probabilities if p > 0)
    return float(total) + 0.0


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


@dataclass(frozen=True)
class EntanglementReport:
    time: float
    overlap: BranchOverlap | None
    purity: float
    schmidt: tuple[float, ...]
    entropy: float


def _spinor_overlap(state: SuperposedState) -> tuple[BranchOverlap, float, float]:
    # bra is the sector with larger m, so a (+m, -m) pair gives <sigma_+|sigma_->
    order = np.argsort(state.sectors)[::-1]
    spinors = state.spinors[order]
    units = spinors / np.linalg.norm(spinors, axis=1)[:, None]
    value = complex(np.vdot(units[0], units[1]))
    w_first, w_second = state.weights()[order]
    return BranchOverlap(value, abs(value)), float(w_first), float(w_second)


def entanglement_report(state: SuperposedState, tol: float = 1e-10) -> EntanglementReport:
    """Purity, Schmidt spectrum and entropy of the spin-rotor cut.

    For a two-sector state the branch overlap is attached and the identities
    ``P = w1^2 + w2^2 + 2 w1 w2 |K|^2`` and ``p = (1 +- sqrt((w1 - w2)^2 + 4 w1 w2 |K|^2))/2``
    are checked against the matrix results; with ``w1 = w2 = 1/2`` these are
    ``(1 + |K|^2)/2`` and ``(1 +- |K|)/2``.

    Raises:
        ValueError: the state is not normalized within ``tol``.
        ConsistencyError: a closed-form identity failed.
    """
    check_normalized(state, tol)
    rho = reduced_spin(state)
    p_spin = purity(rho)
    schmidt = schmidt_values(qubit_eigenvalues(rho))
    overlap = None
    if len(state) == 2:
        overlap, w1, w2 = _spinor_overlap(state)
        expected_purity = w1**2 + w2**2 + 2 * w1 * w2 * overlap.magnitude**2
        if abs(expected_purity - p_spin) > IDENTITY_TOL:
            raise ConsistencyError(
                f"purity {p_spin!r} disagrees with overlap identity {expected_purity!r}"
            )
        root = math.sqrt((w1 - w2) ** 2 + 4 * w1 * w2 * overlap.magnitude**2)
        expected = ((1 + root) / 2, (1 - root) / 2)
        if max(abs(x - y) for x, y in zip(expected, schmidt)) > IDENTITY_TOL:
            raise ConsistencyError(f"Schmidt values {schmidt} disagree with {expected}")
    return EntanglementReport(
        time=state.time,
        overlap=overlap,
        purity=p_spin,
        schmidt=schmidt,
        entropy=entanglement_entropy(schmidt),
    )


def rotor_coherence(state: SuperposedState) -> float:
    """Modulus of the rotor coherence between the two most populated sectors."""
    if len(state) < 2:
        return 0.0
    weights = state.weights()
    # heaviest first, ties broken by ascending m
    order = sorted(range(len(state)), key=lambda k: (-round(weights[k], 12), state.sectors[k]))
    i, j = order[0], order[1]
    psi = state.wavefunction()
    return abs(complex(np.vdot(psi[j], psi[i])))


def expectation_lz(state: SuperposedState) -> float:
    return float(np.dot(state.weights(), state.sectors))


def expectation_energy(params: ModelParams, state: SuperposedState) -> float:
    psi = state.wavefunction()
    total = 0.0
    for m, row, weight in zip(state.sectors, psi, state.weights()):
        total += params.kinetic_energy(m) * weight
        total += np.vdot(row, sector_generator(params, m) @ row).real
    return float(total)


def purity_rate(params: ModelParams, state: SuperposedState) -> float:
    """Exact time derivative of the spin purity at the given state.

    Uses ``d rho/dt = -i sum_m [h_m, P_m]`` with ``P_m = c_m c_m^* |sigma_m><sigma_m|``.
    """
    psi = state.wavefunction()
    rho = psi.T @ psi.conj()
    drho = np.zeros((2, 2), dtype=complex)
    for m, row in zip(state.sectors, psi):
        proj = np.outer(row, row.conj())
        h = sector_generator(params, m)
        drho += -1j * (h @ proj - proj @ h)
    return float(2 * np.einsum("ij,ji->", rho, drho).real)


def min_purity_over_period(params: ModelParams, m: int) -> tuple[float, float]:
    """First minimum time and minimum purity for the ``+-m`` two-sector state.

    Closed form: purity is lowest where ``sin^2(omega t/2) = 1``, giving
    ``t = pi/omega`` and ``1 - 2 delta^2 lam^2 / omega^4``. Returns ``(0, 1)``
    when omega vanishes.
    """
    omega = params.precession_frequency(m)
    if omega == 0:
        return 0.0, 1.0
    a, b = field_direction(params, m)
    return math.pi / omega, 1 - 2 * (a * b) ** 2


def locate_purity_extrema(
    params: ModelParams,
    initial: SuperposedState,
    times: Sequence[float],
    purities: Sequence[float],
    kind: str = "min",
    flat_tol: float = 1e-12,
) -> list[tuple[float, float]]:
    """Refine interior purity extrema of a sampled trajectory.

    Every discrete local extremum of ``purities`` is bracketed by its grid
    neighbours and polished by root finding on :func:`purity_rate`. A
    trajectory whose purity varies by less than ``flat_tol`` has no extrema.
    """
    if kind not in ("min", "max"):
        raise ValueError(f"kind must be 'min' or 'max', got {kind!r}")
    times = np.asarray(times, dtype=float)
    values = np.asarray(purities, dtype=float)
    if len(values) < 3 or np.ptp(values) < flat_tol:
        return []
    sign = 1.0 if kind == "min" else -1.0
    trajectory = evolve(params, initial)

    def rate(t):
        return sign * purity_rate(params, trajectory(t))

    found = []
    v = sign * values
    for k in range(1, len(v) - 1):
        if not (v[k - 1] > v[k] <= v[k + 1]):
            continue
        lo, hi = times[k - 1], times[k + 1]
        r_lo, r_hi = rate(lo), rate(hi)
        if r_lo < 0 < r_hi:
            t_star = brentq(rate, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            t_star = times[k]
        found.append((float(t_star), purity(reduced_spin(trajectory(t_star)))))
    return found
