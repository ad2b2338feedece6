"""Seeded trial engine, reports and sharpness search.

Per-trial seeds are derived as the first 8 bytes (little endian) of
``blake2b("{law_id}|{p_index}|{dim}|{trial}|{master_seed}", digest_size=8)``,
so a trial's inputs depend only on its coordinates, never on execution order.
The generator kind of trial ``t`` is ``kind_cycle(mix)[t % len(cycle)]``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from pathlib import Path

import numpy as np

from . import __version__
from . import matrix as mx
from .laws import FAIL, WITNESS, LawCheck, draw_inputs, evaluate_law, get_law, list_laws
from .radius import OptimizerConfig, UncertifiedError
from .spectral import PNorm, as_pnorm

SEED_DERIVATION = ("blake2b-64(le) of '{law_id}|{p_index}|{dim}|{trial}|{master_seed}'; "
                   "input j of a trial uses blake2b-64(le) of '{trial_seed}:{j}'")

DEFAULT_P_GRID = ("1", "1.25", "1.5", "2", "3", "4", "10", "inf")
DEFAULT_MIX = {"ginibre": 0.4, "hermitian": 0.2, "unitary": 0.2, "nilpotent_upper": 0.2}


class ConfigError(ValueError):
    pass


def trial_seed(law_id: str, p_index: int, dim: int, trial: int, master_seed: int) -> int:
    key = f"{law_id}|{p_index}|{dim}|{trial}|{master_seed}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def kind_cycle(mix: dict[str, float]) -> list[str]:
    """Deterministic interleaved cycle of generator kinds matching the mix proportions."""
    fracs = {k: Fraction(w).limit_denominator(1000) for k, w in mix.items() if w > 0}
    if not fracs:
        raise ConfigError("generator mix has no positive weight")
    den = reduce(math.lcm, (f.denominator for f in fracs.values()))
    counts = {k: int(f * den) for k, f in fracs.items()}
    g = reduce(math.gcd, counts.values())
    counts = {k: c // g for k, c in counts.items()}
    # smooth weighted round robin
    total = sum(counts.values())
    current = dict.fromkeys(counts, 0)
    cycle = []
    for _ in range(total):
        for k in counts:
            current[k] += counts[k]
        pick = max(counts, key=lambda k: current[k])
        current[pick] -= total
        cycle.append(pick)
    return cycle


@dataclass
class SuiteConfig:
    p_grid: list = field(default_factory=lambda: [PNorm.parse(p) for p in DEFAULT_P_GRID])
    dims: list = field(default_factory=lambda: [1, 2, 3, 5, 8])
    trials: int = 100
    master_seed: int = 0
    mix: dict = field(default_factory=lambda: dict(DEFAULT_MIX))
    laws: list = field(default_factory=lambda: [law.id for law in list_laws()])
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    exploratory: bool = False

    def __post_init__(self):
        self.p_grid = [as_pnorm(p) for p in self.p_grid]
        self.dims = [int(d) for d in self.dims]
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ConfigError(f"dims must be positive integers, got {self.dims}")
        for k in self.mix:
            if k not in mx.KINDS or k == "scaled_ginibre":
                raise ConfigError(f"mix: unknown generator kind {k!r}")
        for law_id in self.laws:
            get_law(law_id)
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")

    def to_dict(self) -> dict:
        return {
            "p_grid": [str(p) for p in self.p_grid],
            "dims": list(self.dims),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "mix": dict(self.mix),
            "laws": list(self.laws),
            "optimizer": {"eps": self.optimizer.eps, "max_evals": self.optimizer.max_evals},
            "exploratory": self.exploratory,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteConfig":
        known = {"p_grid", "dims", "trials", "master_seed", "mix", "laws", "optimizer", "exploratory"}
        for key in d:
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
        kw = dict(d)
        try:
            if "p_grid" in kw:
                kw["p_grid"] = [PNorm.parse(p) for p in kw["p_grid"]]
            if "optimizer" in kw:
                opt = kw["optimizer"]
                bad = set(opt) - {"eps", "max_evals"}
                if bad:
                    raise ConfigError(f"unknown config field 'optimizer.{sorted(bad)[0]}'")
                kw["optimizer"] = OptimizerConfig(**opt)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        for key, typ in (("trials", int), ("master_seed", int), ("exploratory", bool)):
            if key in kw and not isinstance(kw[key], typ):
                raise ConfigError(f"config field {key!r} must be {typ.__name__}")
        try:
            return cls(**kw)
        except KeyError as exc:
            raise ConfigError(f"config field 'laws': {exc.args[0]}") from exc

    @classmethod
    def load(cls, path) -> "SuiteConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(obj)


@dataclass(frozen=True)
class Trial:
    law_id: str
    p_index: int
    p: str
    dim: int
    trial: int
    kind: str
    seed: int

    @property
    def order(self):
        return (self.law_id, self.p_index, self.dim, self.trial)

    def descriptor(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "seed": self.seed, "trial": self.trial,
                "p_index": self.p_index}


def plan_trials(cfg: SuiteConfig) -> list[Trial]:
    cycle = kind_cycle(cfg.mix)
    out = []
    for law_id in cfg.laws:
        law = get_law(law_id)
        for pi, p in enumerate(cfg.p_grid):
            if p not in law.p_domain and not (cfg.exploratory and not (law.finite_only and p.is_inf)):
                continue
            for dim in cfg.dims:
                for t in range(cfg.trials):
                    out.append(Trial(law_id, pi, str(p), dim, t, cycle[t % len(cycle)],
                                     trial_seed(law_id, pi, dim, t, cfg.master_seed)))
    return out


def run_trial(trial: Trial, opt: OptimizerConfig) -> dict:
    """One trial as a plain dict: ``{"check": LawCheck dict}`` or ``{"uncertified": ...}``."""
    law = get_law(trial.law_id)
    mats, params = draw_inputs(law, trial.kind, trial.dim, trial.seed)
    try:
        chk = evaluate_law(law, mats, trial.p, opt, params=params,
                           descriptor=trial.descriptor(), exploratory=True)
    except UncertifiedError as exc:
        return {"uncertified": {"law_id": trial.law_id, "p": trial.p, "inputs": trial.descriptor(),
                                "best": exc.value, "bound": exc.bound, "evals": exc.evals}}
    return {"check": chk.to_dict()}


def _run_chunk(args):
    trials, opt = args
    return [run_trial(t, opt) for t in trials]


def reproduce_command(law_id: str, p: str, inputs: dict, opt: OptimizerConfig) -> str:
    cmd = (f"schattenrad check --law {law_id} --p {p} --dim {inputs['dim']} --trials 1 "
           f"--seed {inputs['seed']} --kind {inputs['kind']}")
    if opt.eps != OptimizerConfig().eps:
        cmd += f" --eps {opt.eps!r}"
    return cmd


@dataclass
class Report:
    config: dict
    laws: list
    failures: list
    uncertified: list
    version: str = __version__
    seed_derivation: str = SEED_DERIVATION
    wall_clock_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.uncertified

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "seed_derivation": self.seed_derivation,
            "config": self.config,
            "laws": self.laws,
            "failures": self.failures,
            "uncertified": self.uncertified,
            "wall_clock_seconds": self.wall_clock_seconds,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(config=d["config"], laws=d["laws"], failures=d["failures"],
                   uncertified=d["uncertified"], version=d["version"],
                   seed_derivation=d["seed_derivation"], wall_clock_seconds=d["wall_clock_seconds"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["law_id", "p", "dim", "trials", "passes", "failures", "uncertified",
                "witnesses", "exploratory", "min_slack", "max_abs_slack"]
        w.writerow(cols)
        for law in self.laws:
            for cell in law["cells"]:
                w.writerow([_csv_field(cell[c]) for c in cols])
        return buf.getvalue()

    def write(self, json_path=None, csv_path=None) -> None:
        if json_path:
            Path(json_path).write_text(self.to_json())
        if csv_path:
            Path(csv_path).write_text(self.to_csv())


def _csv_field(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else v


def _new_stats(**keys) -> dict:
    return dict(keys, trials=0, passes=0, failures=0, uncertified=0, witnesses=0, exploratory=0,
                exploratory_violations=0, min_slack=None, min_slack_instance=None,
                max_abs_slack=None)


def _accumulate(stats: dict, outcome: dict, where: dict) -> None:
    stats["trials"] += 1
    if "uncertified" in outcome:
        stats["uncertified"] += 1
        return
    chk = outcome["check"]
    if chk["exploratory"]:
        stats["exploratory"] += 1
        stats["exploratory_violations"] += not chk["holds"]
        return
    if chk["verdict"] == FAIL:
        stats["failures"] += 1
    else:
        stats["passes"] += 1
    stats["witnesses"] += chk["verdict"] == WITNESS
    s = chk["slack"]
    if stats["min_slack"] is None or s < stats["min_slack"]:
        stats["min_slack"] = s
        stats["min_slack_instance"] = dict(where, eps_budget=chk["eps_budget"])
    if stats["max_abs_slack"] is None or abs(s) > stats["max_abs_slack"]:
        stats["max_abs_slack"] = abs(s)


def build_report(cfg_echo: dict, trials: list[Trial], outcomes: list[dict], opt: OptimizerConfig,
                 elapsed: float) -> Report:
    order = sorted(range(len(trials)), key=lambda i: trials[i].order)
    law_stats: dict[str, dict] = {}
    cell_stats: dict[tuple, dict] = {}
    failures, uncertified = [], []
    for i in order:
        t, out = trials[i], outcomes[i]
        law = get_law(t.law_id)
        ls = law_stats.setdefault(t.law_id, _new_stats(law_id=t.law_id, kind=law.kind,
                                                       p_domain=str(law.p_domain), anchor=law.anchor))
        cs = cell_stats.setdefault((t.law_id, t.p_index, t.dim),
                                   _new_stats(law_id=t.law_id, p=t.p, dim=t.dim))
        where = dict(t.descriptor(), p=t.p)
        _accumulate(ls, out, where)
        _accumulate(cs, out, where)
        if "uncertified" in out:
            uncertified.append(out["uncertified"])
        elif out["check"]["verdict"] == FAIL:
            rec = dict(out["check"])
            rec["reproduce"] = reproduce_command(t.law_id, t.p, t.descriptor(), opt)
            failures.append(rec)
    laws = []
    for law_id, ls in law_stats.items():
        ls["cells"] = [cs for key, cs in cell_stats.items() if key[0] == law_id]
        laws.append(ls)
    return Report(config=cfg_echo, laws=laws, failures=failures, uncertified=uncertified,
                  wall_clock_seconds=elapsed)


def execute(trials: list[Trial], opt: OptimizerConfig, workers: int = 1) -> list[dict]:
    if workers <= 1 or len(trials) < 2:
        return [run_trial(t, opt) for t in trials]
    size = max(1, math.ceil(len(trials) / (workers * 4)))
    chunks = [trials[i:i + size] for i in range(0, len(trials), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [(c, opt) for c in chunks])
        return [o for part in parts for o in part]


def run_suite(cfg: SuiteConfig, workers: int = 1) -> Report:
    """Run every (law, p, dim, trial) cell of ``cfg``; FAILs are recorded, never raised."""
    start = time.perf_counter()
    trials = plan_trials(cfg)
    outcomes = execute(trials, cfg.optimizer, workers)
    return build_report(cfg.to_dict(), trials, outcomes, cfg.optimizer, time.perf_counter() - start)


def run_checks(law_id: str, p, dim: int, trials: int, seed: int, *, kind: str | None = None,
               mix: dict | None = None, opt: OptimizerConfig | None = None,
               exploratory: bool = False) -> Report:
    """Trials of one law: trial ``t`` draws from seed ``seed + t``.

    The kind is ``kind`` when given, otherwise the mix cycle at index ``t``.
    """
    law = get_law(law_id)
    p = as_pnorm(p)
    opt = opt or OptimizerConfig()
    if p not in law.p_domain and not exploratory:
        from .laws import LawDomainError
        raise LawDomainError(f"{law.id} is asserted for p in {law.p_domain}, not p = {p}")
    cycle = kind_cycle(mix or DEFAULT_MIX)
    plan = [Trial(law.id, 0, str(p), dim, t, kind or cycle[t % len(cycle)], (seed + t) % 2**64)
            for t in range(trials)]
    start = time.perf_counter()
    outcomes = execute(plan, opt)
    echo = {"command": "check", "law": law.id, "p": str(p), "dim": dim, "trials": trials,
            "seed": seed, "kind": kind,
            "optimizer": {"eps": opt.eps, "max_evals": opt.max_evals}}
    return build_report(echo, plan, outcomes, opt, time.perf_counter() - start)


# -- sharpness search ------------------------------------------------------------

@dataclass
class SharpnessResult:
    check: LawCheck
    inputs: list
    objective: float
    restart: int
    step: int


def _objective(chk: LawCheck, link: int | None) -> float:
    return chk.links[link].slack if link is not None else chk.slack


def _normalize(mats):
    total = math.sqrt(sum(float(np.sum(np.abs(m) ** 2)) for m in mats))
    return [m / total for m in mats] if total > 0 else mats


def sharpness_search(law_id: str, p, dim: int, restarts: int, steps: int, master_seed: int,
                     cfg: OptimizerConfig | None = None, *, link: int | None = None,
                     start: list | None = None, step0: float = 0.3,
                     step_end: float = 1e-3) -> SharpnessResult:
    """Random-restart hill climb towards the smallest slack of an inequality.

    Inputs are kept at unit total Frobenius norm so slack cannot be reduced
    by shrinking them. A perturbation is kept when the slack of ``link`` (or
    the critical link) goes down; step sizes decay geometrically from
    ``step0`` to ``step_end``.
    """
    law = get_law(law_id)
    if law.is_equality:
        raise ValueError(f"{law.id}: law is an equality, sharpness search needs an inequality")
    p = as_pnorm(p)
    cfg = cfg or OptimizerConfig()
    cycle = kind_cycle(DEFAULT_MIX)
    best: SharpnessResult | None = None
    for r in range(max(restarts, 1)):
        seed = trial_seed(law.id, 0, dim, r, master_seed)
        if start is not None:
            mats = [mx.as_matrix(m, square=True) for m in start]
            params = {"grid": 2} if law.id.startswith("BK-") else {}
        else:
            mats, params = draw_inputs(law, cycle[r % len(cycle)], dim, seed)
        mats = _normalize(mats)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        desc = {"search": "sharpness", "master_seed": master_seed, "restart": r}
        chk = evaluate_law(law, mats, p, cfg, params=params, descriptor=desc)
        cur = _objective(chk, link)
        if best is None or cur < best.objective:
            best = SharpnessResult(chk, mats, cur, r, 0)
        for k in range(steps):
            sigma = step0 * (step_end / step0) ** (k / max(steps - 1, 1))
            trial = _normalize([m + sigma * (rng.standard_normal(m.shape)
                                             + 1j * rng.standard_normal(m.shape)) / math.sqrt(2 * m.size)
                                for m in mats])
            c2 = evaluate_law(law, trial, p, cfg, params=params, descriptor=dict(desc, step=k + 1))
            v = _objective(c2, link)
            if v < cur:
                mats, chk, cur = trial, c2, v
                if v < best.objective:
                    best = SharpnessResult(c2, trial, v, r, k + 1)
    return best
