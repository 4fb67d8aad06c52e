"""Named initial states used by ``spinrotor verify``."""

from __future__ import annotations

import dataclasses
from typing import Callable, NamedTuple

import numpy as np

from .entanglement import SuperposedState, random_superposition, single_sector_state, two_sector_state
from .model import ModelParams


class Scenario(NamedTuple):
    params: ModelParams
    state: SuperposedState


def _fig1b(m):
    return lambda params, seed: Scenario(params, two_sector_state(m))


def _g_zero(params, seed):
    return Scenario(dataclasses.replace(params, coupling=0.0), two_sector_state(4))


def _single_sector(params, seed):
    return Scenario(params, single_sector_state(3))


def _random_multisector(params, seed):
    rng = np.random.default_rng(seed)
    return Scenario(params, random_superposition(rng, n_sectors=5, m_max=6))


SCENARIOS: dict[str, Callable[[ModelParams, int], Scenario]] = {
    "fig1b-m2": _fig1b(2),
    "fig1b-m4": _fig1b(4),
    "fig1b-m8": _fig1b(8),
    "g-zero": _g_zero,
    "single-sector": _single_sector,
    "random-multisector": _random_multisector,
}


def build_scenario(name: str, params: ModelParams, seed: int = 42) -> Scenario:
    try:
        factory = SCENARIOS[name]
    except KeyError:
        known = ", ".join(SCENARIOS)
        raise KeyError(f"unknown scenario {name!r}; choose from {known}") from None
    return factory(params, seed)
