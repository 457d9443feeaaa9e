"""Reading scenario files (INI syntax) into :class:`~resilient_dmfac.engine.Scenario`."""
from __future__ import annotations

import configparser
import re
from importlib import resources
from pathlib import Path

from .attacks import AASignal, AttackError, DoSBudget, DoSSchedule
from .cpl import CompensatorParams
from .engine import DoSGenerator, Scenario, ScenarioError
from .expr import Expression, ExprSyntaxError
from .plant import CPL_FOLLOWER, TL_FOLLOWER, AgentModel, LeaderModel
from .topology import CommGraph, GraphError
from .twin_layer import GainError, MfacGains

BUNDLED = "scenario_section5.cfg"

_GAIN_KEYS = {"eta": "eta", "mu": "mu", "gamma": "gamma", "lambda": "lam",
              "epsilon": "epsilon", "phi0": "phi0"}


def bundled_path(name: str = BUNDLED) -> Path:
    return Path(str(resources.files("resilient_dmfac") / "scenarios" / name))


def _floats(text):
    return [float(x) for x in text.replace(",", " ").split()]


def _matrix(text):
    rows = [r for r in re.split(r"[\n;]", text) if r.strip()]
    return [_floats(r) for r in rows]


def _intervals(text):
    out = []
    for part in re.split(r"[,\n;]", text):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"\[?\s*(\d+)\s*(?:-|:|\s)\s*(\d+)\s*\)?", part)
        if m is None:
            raise ScenarioError(f"cannot read DoS interval {part!r}; use 'on-off'")
        out.append((int(m.group(1)), int(m.group(2))))
    return tuple(out)


def _gains(section) -> MfacGains:
    kw = {}
    for key, attr in _GAIN_KEYS.items():
        if key in section:
            kw[attr] = section.getfloat(key)
    return MfacGains(**kw)


def _require(cfg, name):
    if not cfg.has_section(name):
        raise ScenarioError(f"missing section [{name}]")
    return cfg[name]


def parse_scenario(text: str, seed_override: int | None = None) -> Scenario:
    cfg = configparser.ConfigParser(inline_comment_prefixes=(";",), interpolation=None)
    cfg.optionxform = str  # keep 'M' distinct from 'm'
    try:
        cfg.read_string(text)
        return _build(cfg, seed_override)
    except (configparser.Error, KeyError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from None
    except (ExprSyntaxError, GraphError, GainError, AttackError) as exc:
        raise ScenarioError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"bad value: {exc}") from None


def load_scenario(path, seed_override: int | None = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return parse_scenario(text, seed_override)


def _build(cfg, seed_override):
    g = _require(cfg, "graph")
    graph = CommGraph(_matrix(g["adjacency"]), _floats(g["pins"]))
    n = graph.n_followers
    leader = LeaderModel(Expression(_require(cfg, "leader")["expression"]))

    agent_names = sorted((s for s in cfg.sections() if s.startswith("agent.")),
                         key=lambda s: int(s.split(".", 1)[1]))
    if len(agent_names) != n:
        raise ScenarioError(f"{len(agent_names)} [agent.*] sections for {n} followers")

    cpl_sec = _require(cfg, "cpl")
    d_bar = cpl_sec.getfloat("d_bar", fallback=None)
    if cfg.has_section("aa") and "d_bar" in cfg["aa"]:
        d_bar = cfg["aa"].getfloat("d_bar")
    if d_bar is None:
        raise ScenarioError("d_bar missing from [cpl] (or [aa])")

    cpl_models, tl_models, aa = [], [], []
    inits = {"y0": [], "ytl0": [], "u0": [], "utl0": []}
    for name in agent_names:
        sec = cfg[name]
        cpl_models.append(AgentModel(Expression(sec["dynamics"]), CPL_FOLLOWER))
        tl_models.append(AgentModel(Expression(sec.get("tl_dynamics", sec["dynamics"])),
                                    TL_FOLLOWER))
        aa.append(AASignal(Expression(sec.get("aa_signal", "0")), d_bar))
        for key in inits:
            if key in sec:
                inits[key].append(sec.getfloat(key))
    for key, vals in inits.items():
        if vals and len(vals) != n:
            raise ScenarioError(f"'{key}' given for some agents but not all")

    tl_gains = _gains(_require(cfg, "tl"))
    cpl_gains = _gains(cpl_sec)
    comp = CompensatorParams(gamma_r=cpl_sec.getfloat("gamma_r"), d_bar=d_bar)

    run_sec = _require(cfg, "run")
    horizon = run_sec.getint("horizon")
    seed = run_sec.getint("seed", fallback=0)

    dos_sec = _require(cfg, "dos")
    if "seed" in dos_sec:
        seed = dos_sec.getint("seed")
    if seed_override is not None:
        seed = seed_override
    budget = DoSBudget(M=dos_sec.getfloat("M"), beta=dos_sec.getfloat("beta"))
    mode = dos_sec.get("mode", "explicit").strip()
    if mode == "explicit":
        dos = DoSSchedule(_intervals(dos_sec.get("intervals", "")), horizon)
    elif mode == "random":
        window = dos_sec.get("window_end", "").strip()
        demand = dos_sec.get("demand", "").strip()
        dos = DoSGenerator(budget=budget,
                           mean_burst=dos_sec.getfloat("mean_burst", fallback=5.0),
                           mean_gap=dos_sec.getfloat("mean_gap", fallback=10.0),
                           window_end=int(window) if window else None,
                           demand=int(demand) if demand else None)
    else:
        raise ScenarioError(f"dos.mode must be 'explicit' or 'random', got {mode!r}")

    an = cfg["analysis"] if cfg.has_section("analysis") else {}
    cut = run_sec.get("transient_cut", "auto").strip()

    return Scenario(
        graph=graph, leader=leader, cpl_models=cpl_models, tl_models=tl_models, aa=aa,
        tl_gains=tl_gains, cpl_gains=cpl_gains, comp=comp, horizon=horizon, dos=dos,
        budget=budget, seed=seed,
        y_init=inits["y0"] or None, ytl_init=inits["ytl0"] or None,
        u_init=inits["u0"] or None, utl_init=inits["utl0"] or None,
        compensate=cpl_sec.getboolean("compensate", fallback=True),
        b_t=float(an.get("b_t", 1.5)), b_c=float(an.get("b_c", 1.5)),
        alpha1=float(an.get("alpha1", 0.9)), alpha2=float(an.get("alpha2", 1.05)),
        transient_cut=None if cut == "auto" else int(cut),
        transient_margin=run_sec.getint("transient_margin", fallback=50),
    )


def bundled_scenario(seed_override: int | None = None) -> Scenario:
    """The bundled four-follower experiment."""
    return load_scenario(bundled_path(), seed_override)
