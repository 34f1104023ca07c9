"""Deterministic synthetic scenario sampling.

Prices follow a sinusoidal daily shape with seeded noise, arrivals a
diurnal curve with per-DC scale and phase (the heterogeneity source), and
ambient temperature a mild day/night swing.
"""

from __future__ import annotations

import numpy as np

from ..energy.params import Scenario
from .profiles import ScenarioProfile


def _diurnal(t: np.ndarray, peak_hour: float, width: float = 6.0) -> np.ndarray:
    """Smooth hump peaking at peak_hour, in [0, 1], 24h-periodic."""
    ang = (t - peak_hour) * (2.0 * np.pi / 24.0)
    return 0.5 * (1.0 + np.cos(np.clip(ang * (12.0 / width), -np.pi, np.pi)))


def sample_scenario(profile: ScenarioProfile, seed: int) -> Scenario:
    rng = np.random.default_rng(seed)
    T = profile.T
    t = np.arange(T, dtype=float)

    price_shape = _diurnal(t, peak_hour=18.0, width=7.0)
    lam_imp = (profile.price_base + profile.price_peak * price_shape
               + rng.normal(0.0, profile.price_noise, T))
    lam_imp = np.maximum(lam_imp, 0.01)
    lam_exp = profile.export_ratio * lam_imp
    lam_reg = np.maximum(
        profile.reg_base + profile.reg_peak * price_shape
        + rng.normal(0.0, profile.price_noise / 3.0, T), 0.0)

    u = np.zeros((profile.n_dc, T))
    for i in range(profile.n_dc):
        scale = profile.dc_scales[i]
        phase = profile.dc_phases[i]
        shape = _diurnal(t, peak_hour=14.0 + phase, width=8.0)
        u[i] = scale * (profile.arrival_base + profile.arrival_peak * shape
                        + rng.normal(0.0, profile.arrival_noise, T))
    u = np.maximum(u, 0.0)

    ambient = (profile.ambient_base
               + profile.ambient_amp * _diurnal(t, peak_hour=15.0, width=9.0)
               + (rng.normal(0.0, 0.2, T) if profile.ambient_amp > 0 else 0.0))
    load = np.maximum(
        profile.load_base + profile.load_amp * _diurnal(t, 19.0, width=7.0)
        + rng.normal(0.0, profile.load_noise, T), 0.0)

    return Scenario(
        lambda_imp=lam_imp,
        lambda_exp=lam_exp,
        lambda_reg=lam_reg,
        u_arrivals=u,
        T_ambient=ambient,
        L_base=load,
        seed=seed,
    )
