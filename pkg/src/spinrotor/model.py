"""Single-sector physics of a spin-1/2 on a planar quantum rotor.

The Hamiltonian is ``H = L_z^2 / (2 I) + delta S_x + g L_z S_z`` with
``S = sigma / 2`` and hbar = 1. Because ``[L_z, H] = 0`` every rotor sector
``m`` reduces to a 2x2 spin problem in the field ``(delta, 0, g m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

SPIN_X = PAULI_X / 2
SPIN_Y = PAULI_Y / 2
SPIN_Z = PAULI_Z / 2

SPIN_UP = np.array([1, 0], dtype=complex)
SPIN_DOWN = np.array([0, 1], dtype=complex)


@dataclass(frozen=True)
class ModelParams:
    """Model constants in units where hbar = 1.

    Attributes:
        inertia: Rotor moment of inertia ``I`` (> 0).
        delta: Transverse spin splitting (>= 0).
        coupling: Spin-rotation coupling ``g``.
        norm_tol: Tolerance used when checking state normalization.
    """

    inertia: float = 1.0
    delta: float = 2.0
    coupling: float = 0.5
    norm_tol: float = 1e-12

    def __post_init__(self):
        for name in ("inertia", "delta", "coupling", "norm_tol"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.inertia <= 0:
            raise ValueError(f"inertia must be positive, got {self.inertia!r}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta!r}")
        if self.norm_tol <= 0:
            raise ValueError(f"norm_tol must be positive, got {self.norm_tol!r}")

    def kinetic_energy(self, m: int) -> float:
        return m * m / (2.0 * self.inertia)

    def barnett_field(self, m: int) -> float:
        """Longitudinal field ``g m`` felt by the spin in sector ``m``."""
        return self.coupling * m

    def precession_frequency(self, m: int) -> float:
        return math.hypot(self.delta, self.coupling * m)


@dataclass(frozen=True)
class SectorSpectrum:
    m: int
    eps_minus: float
    eps_plus: float
    omega: float
    theta: float
    lam: float


def _check_sector(m) -> int:
    if isinstance(m, (bool, np.bool_)) or int(m) != m:
        raise TypeError(f"rotor quantum number must be an integer, got {m!r}")
    return int(m)


def sector_spectrum(params: ModelParams, m: int) -> SectorSpectrum:
    """Both energies of sector ``m`` together with its field geometry.

    ``theta`` is the angle of the effective field from the z axis, computed
    with ``atan2(delta, g m)`` so it stays in ``[0, pi]`` and equals ``pi/2``
    at ``m = 0``.
    """
    m = _check_sector(m)
    lam = params.barnett_field(m)
    omega = params.precession_frequency(m)
    centre = params.kinetic_energy(m)
    return SectorSpectrum(
        m=m,
        eps_minus=centre - omega / 2,
        eps_plus=centre + omega / 2,
        omega=omega,
        theta=math.atan2(params.delta, lam),
        lam=lam,
    )


def effective_field(params: ModelParams, m: int) -> np.ndarray:
    """Effective Barnett field ``delta x + g m z`` as a 3-vector."""
    m = _check_sector(m)
    return np.array([params.delta, 0.0, params.barnett_field(m)])


def sector_generator(params: ModelParams, m: int) -> np.ndarray:
    """Spin part ``delta S_x + g m S_z`` of the sector Hamiltonian."""
    m = _check_sector(m)
    return params.delta * SPIN_X + params.barnett_field(m) * SPIN_Z


def field_direction(params: ModelParams, m: int) -> tuple[float, float]:
    """Unit-field components ``(a, b) = (delta, g m) / omega``; ``(0, 0)`` if omega is 0."""
    delta, lam = params.delta, params.barnett_field(m)
    scale = max(abs(delta), abs(lam))
    if scale == 0:
        return 0.0, 0.0
    # rescale first so subnormal inputs keep full precision
    x, z = delta / scale, lam / scale
    norm = math.hypot(x, z)
    return x / norm, z / norm


def sector_propagator(params: ModelParams, m: int, t: float) -> np.ndarray:
    """Spin propagator ``exp(-i (delta S_x + g m S_z) t)`` of sector ``m``.

    Closed form ``cos(omega t/2) 1 - i sin(omega t/2) (a sigma_x + b sigma_z)``.
    The kinetic phase ``exp(-i m^2 t / 2I)`` is deliberately left out.
    """
    m = _check_sector(m)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    omega = params.precession_frequency(m)
    if omega == 0:
        return IDENTITY.copy()
    a, b = field_direction(params, m)
    c = math.cos(omega * t / 2)
    s = math.sin(omega * t / 2)
    return np.array(
        [[c - 1j * b * s, -1j * a * s], [-1j * a * s, c + 1j * b * s]],
        dtype=complex,
    )


def classical_hamiltonian(params: ModelParams, m0: int) -> tuple[np.ndarray, float]:
    """Static Zeeman problem obtained by replacing ``L_z`` with the number ``m0``.

    Returns:
        The 2x2 matrix ``delta S_x + g m0 S_z`` and the scalar rotor energy
        ``m0^2 / 2I`` that shifts its eigenvalues.
    """
    return sector_generator(params, m0), params.kinetic_energy(_check_sector(m0))
