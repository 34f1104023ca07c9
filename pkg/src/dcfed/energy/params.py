"""Physical and market parameters of one planning instance, plus the full
decision-vector container for a solved schedule.

Units: powers kW, energies kWh, thermal loads kW_th, temperatures K,
processing rates jobs/h, money in dollars, period length in hours.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ParameterError(ValueError):
    """A static parameter violates its documented invariant."""


@dataclass(frozen=True)
class DataCenterParams:
    name: str
    R_max: float            # jobs/h per server unit
    eta_min: float
    eta_max: float
    x_max: int              # server-unit cap
    P_idle: float           # kW per unit
    P_dyn_bar: float        # kW at full fleet utilization
    SLA: float              # hours
    C_penalty: float        # $/h of SLA violation
    COP: float
    P_cool_base: float      # kW per unit
    Q_cool_max: float       # kW_th
    beta_heat: float        # kW_th per kW of server power
    beta_cool: float
    beta_loss: float        # kW_th per K above ambient
    C_dis: float            # kWh_th per K thermal capacitance
    T_min: float
    T_max: float
    eta_factors: np.ndarray | None = None  # optional per-period efficiency scaling

    def __post_init__(self):
        if not (0 < self.eta_min <= self.eta_max <= 1):
            raise ParameterError(f"{self.name}: need 0 < eta_min <= eta_max <= 1")
        if self.x_max < 1:
            raise ParameterError(f"{self.name}: x_max must be >= 1")
        if not self.T_min < self.T_max:
            raise ParameterError(f"{self.name}: need T_min < T_max")
        if self.COP <= 0:
            raise ParameterError(f"{self.name}: COP must be positive")
        if self.SLA < 0:
            raise ParameterError(f"{self.name}: SLA must be non-negative")

    @property
    def capacity(self) -> float:
        """Fleet processing cap x_max * R_max (jobs/h)."""
        return self.x_max * self.R_max

    @property
    def R_nominal(self) -> float:
        """Nominal queue-drain rate: 0.8 of fleet capacity."""
        return 0.8 * self.capacity


@dataclass(frozen=True)
class GeneratorParams:
    name: str
    alpha: float    # $/kWh
    beta: float     # $/kWh^2
    P_min: float
    P_max: float
    R_up: float     # kW/h
    R_down: float

    def __post_init__(self):
        if self.P_min > self.P_max:
            raise ParameterError(f"{self.name}: P_min > P_max")
        if self.beta < 0:
            raise ParameterError(f"{self.name}: beta must be >= 0")
        if self.R_up <= 0 or self.R_down <= 0:
            raise ParameterError(f"{self.name}: ramps must be positive")


@dataclass(frozen=True)
class StorageParams:
    name: str
    E_min: float
    E_max: float
    P_ch_max: float
    P_dch_max: float
    eta_ch: float
    eta_dch: float
    c_deg: float    # $/kWh throughput

    def __post_init__(self):
        if not self.E_min < self.E_max:
            raise ParameterError(f"{self.name}: need E_min < E_max")
        if not (0 < self.eta_ch <= 1 and 0 < self.eta_dch <= 1):
            raise ParameterError(f"{self.name}: efficiencies must lie in (0, 1]")


@dataclass(frozen=True)
class GridParams:
    P_imp_max: float
    P_exp_max: float
    P_contract: float

    def __post_init__(self):
        if min(self.P_imp_max, self.P_exp_max, self.P_contract) < 0:
            raise ParameterError("grid limits must be non-negative")
        if self.P_contract > self.P_imp_max:
            raise ParameterError("P_contract must not exceed P_imp_max")


@dataclass(frozen=True)
class EnergySystemModel:
    data_centers: tuple[DataCenterParams, ...]
    generators: tuple[GeneratorParams, ...]
    storages: tuple[StorageParams, ...]
    grid: GridParams
    horizon_T: int
    delta_t: float = 1.0

    def __post_init__(self):
        if self.delta_t <= 0:
            raise ParameterError("delta_t must be positive")
        if self.horizon_T < 2:
            raise ParameterError("horizon_T must be at least 2")

    @property
    def n_dc(self) -> int:
        return len(self.data_centers)

    @property
    def n_gen(self) -> int:
        return len(self.generators)

    @property
    def n_storage(self) -> int:
        return len(self.storages)


@dataclass(frozen=True)
class Scenario:
    """Stochastic series for one planning day; all arrays length horizon_T,
    arrivals shaped (n_dc, horizon_T)."""
    lambda_imp: np.ndarray
    lambda_exp: np.ndarray
    lambda_reg: np.ndarray
    u_arrivals: np.ndarray
    T_ambient: np.ndarray
    L_base: np.ndarray
    seed: int = 0

    def check(self, system: EnergySystemModel) -> None:
        T = system.horizon_T
        for name in ("lambda_imp", "lambda_exp", "lambda_reg", "T_ambient", "L_base"):
            arr = getattr(self, name)
            if len(arr) != T:
                raise ParameterError(f"scenario series {name} has length "
                                     f"{len(arr)}, expected {T}")
        if self.u_arrivals.shape != (system.n_dc, T):
            raise ParameterError(
                f"u_arrivals shape {self.u_arrivals.shape} != {(system.n_dc, T)}")
        for name in ("lambda_imp", "lambda_exp", "lambda_reg"):
            if np.any(getattr(self, name) < 0):
                raise ParameterError(f"{name} must be non-negative")
        if np.any(self.u_arrivals < 0):
            raise ParameterError("arrivals must be non-negative")


@dataclass
class ScheduleSolution:
    """Full decision vector of a solved schedule.

    State convention: q and e_soc are end-of-period states driven by the
    same period's flows; temp is the start-of-period temperature driven by
    the previous period's server heat and cooling (temp[:, 0] = ambient).
    """
    # per data center, shape (n_dc, T)
    x: np.ndarray
    r: np.ndarray
    eta_eff: np.ndarray
    r_eff: np.ndarray
    q: np.ndarray
    t_queue: np.ndarray
    delta_sla: np.ndarray
    p_dyn: np.ndarray
    p_server: np.ndarray
    p_cool: np.ndarray
    q_cool: np.ndarray
    temp: np.ndarray
    p_grid: np.ndarray
    # system level, shape (T,)
    p_imp: np.ndarray
    p_exp: np.ndarray
    delta_imp: np.ndarray
    # per generator / storage, shapes (n_gen, T) and (n_storage, T)
    p_gen: np.ndarray
    z_st: np.ndarray
    p_ch: np.ndarray
    p_dch: np.ndarray
    e_soc: np.ndarray
    objective_value: float = np.nan
    optimality_gap: float = np.nan
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_vector(cls, instance, xvec) -> "ScheduleSolution":
        """Assemble from a central-model solution vector using the variable
        name map recorded by the builder."""
        dims = instance.meta["dims"]
        I, G, S, T = dims["n_dc"], dims["n_gen"], dims["n_storage"], dims["T"]

        def grab(pattern, shape):
            out = np.zeros(shape)
            it = np.nditer(out, flags=["multi_index"], op_flags=["writeonly"])
            for cell in it:
                idx = it.multi_index
                cell[...] = xvec[instance.var_index(pattern.format(*idx))]
            return out

        return cls(
            x=grab("x[{0},{1}]", (I, T)),
            r=grab("r[{0},{1}]", (I, T)),
            eta_eff=grab("eta[{0},{1}]", (I, T)),
            r_eff=grab("reff[{0},{1}]", (I, T)),
            q=grab("q[{0},{1}]", (I, T)),
            t_queue=grab("tq[{0},{1}]", (I, T)),
            delta_sla=grab("dsla[{0},{1}]", (I, T)),
            p_dyn=grab("pdyn[{0},{1}]", (I, T)),
            p_server=grab("pserv[{0},{1}]", (I, T)),
            p_cool=grab("pcool[{0},{1}]", (I, T)),
            q_cool=grab("qcool[{0},{1}]", (I, T)),
            temp=grab("temp[{0},{1}]", (I, T)),
            p_grid=grab("pgrid[{0},{1}]", (I, T)),
            p_imp=grab("Pimp[{0}]", (T,)),
            p_exp=grab("Pexp[{0}]", (T,)),
            delta_imp=grab("dimp[{0}]", (T,)),
            p_gen=grab("pg[{0},{1}]", (G, T)),
            z_st=grab("z[{0},{1}]", (S, T)),
            p_ch=grab("pch[{0},{1}]", (S, T)),
            p_dch=grab("pdch[{0},{1}]", (S, T)),
            e_soc=grab("E[{0},{1}]", (S, T)),
        )
