"""Double-layer DMFAC simulation: twin layer first, then the cyber-physical layer."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import cpl, twin_layer
from .attacks import AASignal, DoSBudget, DoSSchedule, aa_value, generate_schedule
from .plant import AgentModel, LeaderModel, PlantError, follower_step, leader_output
from .topology import CommGraph, laplacian
from .twin_layer import MfacGains

DIVERGENCE_LIMIT = 1e6

AGENT_COLUMNS = ("ytl", "y", "utl", "u", "ubar", "chi", "dchihat", "PHI", "phi",
                 "etl", "e", "sigma", "xi")

# bundled initial conditions, used when a scenario leaves them out
DEFAULT_YTL0 = (0.1, 0.2, 0.2, 0.3)


class DivergenceError(RuntimeError):
    def __init__(self, step: int, message: str):
        super().__init__(f"simulation diverged at step {step}: {message}")
        self.step = step


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class DoSGenerator:
    """Random DoS placement request, resolved against the scenario seed at run time."""

    budget: DoSBudget
    mean_burst: float = 5.0
    mean_gap: float = 10.0
    window_end: Optional[int] = None
    demand: Optional[int] = None

    def schedule(self, horizon: int, seed: int) -> DoSSchedule:
        return generate_schedule(self.budget, horizon, seed, mean_burst=self.mean_burst,
                                 mean_gap=self.mean_gap, window_end=self.window_end,
                                 demand=self.demand)


@dataclass(frozen=True)
class Scenario:
    graph: CommGraph
    leader: LeaderModel
    cpl_models: Sequence[AgentModel]
    tl_models: Sequence[AgentModel]
    aa: Sequence[AASignal]
    tl_gains: MfacGains
    cpl_gains: MfacGains
    comp: cpl.CompensatorParams
    horizon: int
    dos: Union[DoSSchedule, DoSGenerator, None] = None
    budget: Optional[DoSBudget] = None
    seed: int = 0
    y_init: Optional[Sequence[float]] = None
    ytl_init: Optional[Sequence[float]] = None
    u_init: Optional[Sequence[float]] = None
    utl_init: Optional[Sequence[float]] = None
    compensate: bool = True
    # analysis inputs: PPD bounds and the rates used for the feasibility checks
    b_t: float = 1.5
    b_c: float = 1.5
    alpha1: float = 0.9
    alpha2: float = 1.05
    transient_cut: Optional[int] = None
    transient_margin: int = 50

    def __post_init__(self):
        n = self.graph.n_followers
        for name in ("cpl_models", "tl_models", "aa"):
            seq = tuple(getattr(self, name))
            if len(seq) != n:
                raise ScenarioError(f"{name} has {len(seq)} entries for {n} followers")
            object.__setattr__(self, name, seq)
        for name in ("y_init", "ytl_init", "u_init", "utl_init"):
            value = getattr(self, name)
            if value is not None:
                value = tuple(float(v) for v in value)
                if len(value) != n:
                    raise ScenarioError(f"{name} has {len(value)} entries for {n} followers")
                object.__setattr__(self, name, value)
        if self.horizon < 0:
            raise ScenarioError("horizon must be non-negative")
        self.comp.validate(self.cpl_gains)
        if isinstance(self.dos, DoSSchedule) and self.dos.horizon != self.horizon:
            raise ScenarioError("DoS schedule horizon differs from the scenario horizon")

    @property
    def n_followers(self) -> int:
        return self.graph.n_followers

    def initial(self, name: str) -> np.ndarray:
        value = getattr(self, name)
        if value is not None:
            return np.array(value, dtype=float)
        if name == "ytl_init" and self.n_followers == len(DEFAULT_YTL0):
            return np.array(DEFAULT_YTL0)
        return np.zeros(self.n_followers)

    def schedule(self) -> DoSSchedule:
        if self.dos is None:
            return DoSSchedule((), self.horizon)
        if isinstance(self.dos, DoSGenerator):
            return self.dos.schedule(self.horizon, self.seed)
        return self.dos

    def with_changes(self, **changes) -> "Scenario":
        return replace(self, **changes)


@dataclass
class SimTrace:
    """Per-step record; agent signals are ``(steps, n)`` arrays in AGENT_COLUMNS order."""

    k: np.ndarray
    psi: np.ndarray
    y0: np.ndarray
    ytl: np.ndarray
    y: np.ndarray
    utl: np.ndarray
    u: np.ndarray
    ubar: np.ndarray
    chi: np.ndarray
    dchihat: np.ndarray
    PHI: np.ndarray
    phi: np.ndarray
    etl: np.ndarray
    e: np.ndarray
    sigma: np.ndarray
    xi: np.ndarray
    schedule: Optional[DoSSchedule] = field(default=None, compare=False)

    @classmethod
    def empty(cls, n_steps: int, n_agents: int) -> "SimTrace":
        kw = {name: np.zeros((n_steps, n_agents)) for name in AGENT_COLUMNS}
        return cls(k=np.arange(n_steps), psi=np.ones(n_steps, dtype=int),
                   y0=np.zeros(n_steps), **kw)

    @property
    def n_steps(self) -> int:
        return len(self.k)

    @property
    def n_agents(self) -> int:
        return self.ytl.shape[1]

    def equals(self, other: "SimTrace") -> bool:
        """Bit-for-bit comparison of every logged signal."""
        for f in fields(self):
            if f.name == "schedule":
                continue
            a, b = getattr(self, f.name), getattr(other, f.name)
            if a.shape != b.shape or not np.array_equal(a, b):
                return False
        return True


def _check(step, **values):
    for name, v in values.items():
        v = np.asarray(v)
        if not np.all(np.isfinite(v)) or np.any(np.abs(v) > DIVERGENCE_LIMIT):
            raise DivergenceError(step, f"{name} left the range |x| <= {DIVERGENCE_LIMIT:g}: {v}")


def run(scenario: Scenario) -> SimTrace:
    """Run the double-layer algorithm for k = 1..horizon and return the trace.

    Row 0 of the trace holds the initial conditions. Within each step the twin
    layer completes (including the one-step-ahead virtual output) before the
    cyber-physical layer consumes it.
    """
    sc = scenario
    n, K = sc.n_followers, sc.horizon
    lap = laplacian(sc.graph)
    H = lap.gain_matrix
    schedule = sc.schedule()
    psi_all = schedule.flags()
    tg, cg, comp = sc.tl_gains, sc.cpl_gains, sc.comp
    comp_on = sc.compensate

    tr = SimTrace.empty(K + 1, n)
    tr.schedule = schedule
    tr.psi[:] = psi_all

    def tl_step(i, y, u):
        try:
            return follower_step(sc.tl_models[i], y, u)
        except PlantError as exc:
            raise DivergenceError(k, str(exc)) from None

    def cpl_step(i, y, u):
        try:
            return follower_step(sc.cpl_models[i], y, u)
        except PlantError as exc:
            raise DivergenceError(k, str(exc)) from None

    k = 0
    try:
        y0 = np.array([leader_output(sc.leader, j) for j in range(K + 1)])
    except PlantError as exc:
        raise DivergenceError(0, str(exc)) from None
    chi = np.array([[aa_value(sig, j) for sig in sc.aa] for j in range(K + 1)]).reshape(K + 1, n)
    tr.y0[:] = y0
    tr.chi[:] = chi

    ytl = sc.initial("ytl_init")
    y = sc.initial("y_init")
    utl = sc.initial("utl_init")
    u = sc.initial("u_init")
    tl_states = [twin_layer.TLState(phi_hat=tg.phi0, u_prev=utl[i]) for i in range(n)]
    cpl_states = [cpl.CPLState(phi_hat=cg.phi0, u_prev=u[i]) for i in range(n)]

    # initialization row, then y~(1) and y(1) from the initial inputs
    ubar = u + chi[0]
    tr.ytl[0], tr.y[0], tr.utl[0], tr.u[0], tr.ubar[0] = ytl, y, utl, u, ubar
    tr.PHI[0] = tg.phi0
    tr.phi[0] = cg.phi0
    tr.etl[0] = y0[0] - ytl
    tr.e[0] = y0[0] - y
    tr.sigma[0] = ytl - y
    tr.xi[0] = H @ (y0[0] - ytl)
    if psi_all[0] == 0:
        ytl_next = ytl.copy()
    else:
        ytl_next = np.array([tl_step(i, ytl[i], utl[i]) for i in range(n)])
    y_next = np.array([cpl_step(i, y[i], ubar[i]) for i in range(n)])
    _check(0, ytl=ytl_next, y=y_next)

    for k in range(1, K + 1):
        ytl_prev, y_prev = ytl, y
        ytl, y = ytl_next, y_next
        psi = int(psi_all[k])
        y0k = y0[k]

        # twin layer
        xi = H @ (y0k - ytl)
        utl_k = np.empty(n)
        for i, st in enumerate(tl_states):
            if psi:
                twin_layer.tl_update_ppd(st, tg, ytl[i] - ytl_prev[i])
            utl_k[i] = twin_layer.tl_control(st, tg, psi, xi[i])
            st.du_prev = utl_k[i] - st.u_prev
            st.u_prev = utl_k[i]
            st.y_prev = ytl[i]
        if psi:
            ytl_next = np.array([tl_step(i, ytl[i], utl_k[i]) for i in range(n)])
        else:
            ytl_next = ytl.copy()

        # cyber-physical layer
        sig = ytl - y
        u_k = np.empty(n)
        dchi_k = np.zeros(n)
        for i, st in enumerate(cpl_states):
            cpl.cpl_update_ppd(st, cg, y[i] - y_prev[i])
            if comp_on:
                dchi_k[i] = cpl.aa_estimate(st.dchi_hat_prev, st.phi_hat, comp, cg.lam, sig[i], k)
            u_k[i] = cpl.cpl_control(st, cg, ytl_next[i], y[i], dchi_k[i])
            st.du_prev = u_k[i] - st.u_prev
            st.u_prev = u_k[i]
            st.dchi_hat_prev = dchi_k[i]
            st.y_prev = y[i]
        ubar_k = u_k + chi[k]
        y_next = np.array([cpl_step(i, y[i], ubar_k[i]) for i in range(n)])

        tr.ytl[k], tr.y[k], tr.utl[k], tr.u[k], tr.ubar[k] = ytl, y, utl_k, u_k, ubar_k
        tr.dchihat[k] = dchi_k
        tr.PHI[k] = [st.phi_hat for st in tl_states]
        tr.phi[k] = [st.phi_hat for st in cpl_states]
        tr.etl[k] = y0k - ytl
        tr.e[k] = y0k - y
        tr.sigma[k] = sig
        tr.xi[k] = xi
        _check(k, ytl=ytl_next, y=y_next, utl=utl_k, u=u_k, ubar=ubar_k, PHI=tr.PHI[k],
               phi=tr.phi[k])
    return tr


def csv_header(n_agents: int) -> list:
    cols = ["k", "psi", "y0"]
    for i in range(1, n_agents + 1):
        cols.extend(f"{name}_{i}" for name in AGENT_COLUMNS)
    return cols


def _num(x) -> str:
    return format(float(x), ".17g")


def export_csv(trace: SimTrace, path) -> Path:
    """Write the trace as CSV with 17 significant digits and LF line endings."""
    path = Path(path)
    n = trace.n_agents
    lines = [",".join(csv_header(n))]
    signals = [getattr(trace, name) for name in AGENT_COLUMNS]
    for row in range(trace.n_steps):
        cells = [str(int(trace.k[row])), str(int(trace.psi[row])), _num(trace.y0[row])]
        for i in range(n):
            cells.extend(_num(sig[row, i]) for sig in signals)
        lines.append(",".join(cells))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path) -> SimTrace:
    with open(path, newline="") as fh:
        header = fh.readline().rstrip("\n").split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    n = (len(header) - 3) // len(AGENT_COLUMNS)
    if header != csv_header(n):
        raise ValueError(f"{path}: unexpected CSV header")
    tr = SimTrace.empty(len(rows), n)
    if not rows:
        return tr
    data = np.array([[float(c) for c in r] for r in rows])
    tr.k = data[:, 0].astype(int)
    tr.psi = data[:, 1].astype(int)
    tr.y0 = data[:, 2].copy()
    for j, name in enumerate(AGENT_COLUMNS):
        setattr(tr, name, data[:, 3 + j::len(AGENT_COLUMNS)][:, :n].copy())
    return tr


def leader_omega(trace: SimTrace) -> float:
    """Largest leader increment seen in the trace."""
    if trace.n_steps < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(trace.y0))))


__all__ = ["Scenario", "SimTrace", "DoSGenerator", "DivergenceError", "ScenarioError", "run",
           "export_csv", "read_csv", "csv_header", "AGENT_COLUMNS", "leader_omega"]
