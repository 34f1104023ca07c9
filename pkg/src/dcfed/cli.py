"""Batch entry points: gen, solve-central, train, coordinate,
attack-demo, report.

Every command is a pure function of its config and seeds; outputs land
under --out. Exit codes: 0 success, 2 bad configuration, 3 missing
inputs, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energy.costs import cost_components
from .energy.io import save_scenario, save_system
from .fed.state import FedConfig
from .nn.checkpoint import load_ensemble, save_ensemble
from .sim import (
    AdversaryScript,
    SimConfig,
    desk_profile,
    desk_system,
    generate_demonstrations,
    load_dataset,
    run_coordination,
    run_training,
    sample_scenario,
    save_dataset,
)
from .sim.demos import DemoDataset
from .sim.experiment import METHODS, TrainResult
from .sim.pipeline import CoordinationOutcome, PipelineReport, solve_scenario
from .sim.profiles import DESK_EXPERIMENT, PAPER_EXPERIMENT
from .sim.report import consolidate, write_all

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_RUNTIME = 4


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


@dataclass
class RunConfig:
    seed: int = 7
    scale: str = "desk"
    out: Path = Path("out")
    methods: tuple = METHODS
    attack_script: Path | None = None
    overrides: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        doc = {}
        if args.config:
            path = Path(args.config)
            if not path.exists():
                raise CliError(EXIT_MISSING, "missing-config", str(path))
            doc = json.loads(path.read_text())
        seed = args.seed if args.seed is not None else doc.get("seed", 7)
        scale = args.scale or doc.get("scale", "desk")
        if scale not in ("desk", "paper"):
            raise CliError(EXIT_CONFIG, "bad-scale", scale)
        out = Path(args.out or doc.get("out", "out"))
        methods = tuple(doc.get("methods", METHODS))
        if getattr(args, "method", None):
            methods = (args.method,)
        for m in methods:
            if m not in METHODS:
                raise CliError(EXIT_CONFIG, "bad-method", m)
        attack = getattr(args, "attack_script", None) or doc.get("attack_script")
        return cls(seed=int(seed), scale=scale, out=out, methods=methods,
                   attack_script=Path(attack) if attack else None,
                   overrides=doc.get("overrides", {}))

    def sim_config(self) -> SimConfig:
        preset = DESK_EXPERIMENT if self.scale == "desk" else PAPER_EXPERIMENT
        kw = dict(
            master_seed=self.seed,
            n_train_scenarios=preset["n_train_scenarios"],
            n_test_scenarios=preset["n_test_scenarios"],
            widths=tuple(preset["widths"]),
            ensemble_n=preset["ensemble_n"],
            dropout_p=preset["dropout_p"],
            warmup_steps=preset["warmup_steps"],
            fed_steps=preset["fed_steps"],
            rounds=preset["rounds"],
            batch_size=preset["batch_size"],
            lr=preset["lr"],
            methods=self.methods,
        )
        kw.update(self.overrides)
        kw["widths"] = tuple(kw["widths"])
        kw["methods"] = tuple(kw["methods"])
        return SimConfig(**kw)


def _dataset_dir(cfg: RunConfig) -> Path:
    return cfg.out / "dataset"


def _require_dataset(cfg: RunConfig) -> DemoDataset:
    d = _dataset_dir(cfg)
    if not (d / "meta.json").exists():
        raise CliError(EXIT_MISSING, "missing-dataset",
                       f"{d} not found; run `gen` first")
    return load_dataset(d)


def cmd_gen(cfg: RunConfig) -> int:
    sim = cfg.sim_config()
    system = desk_system()
    profile = desk_profile()
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_system(system, cfg.out / "system.json")
    dataset = generate_demonstrations(
        system, profile, sim.n_train_scenarios, sim.n_test_scenarios,
        seed0=1000 + sim.master_seed, gap_target=sim.demo_gap,
        time_budget=sim.demo_time_budget)
    save_dataset(dataset, _dataset_dir(cfg))
    scen_dir = cfg.out / "scenarios"
    scen_dir.mkdir(exist_ok=True)
    for seed in dataset.scenario_seeds_train + dataset.scenario_seeds_test:
        save_scenario(sample_scenario(profile, seed),
                      scen_dir / f"scenario_{seed}.csv")
    print(f"dataset written to {_dataset_dir(cfg)} "
          f"({sim.n_train_scenarios} train + {sim.n_test_scenarios} test days)")
    return EXIT_OK


def cmd_solve_central(cfg: RunConfig) -> int:
    dataset = _require_dataset(cfg)
    system = desk_system()
    outdir = cfg.out / "central"
    outdir.mkdir(parents=True, exist_ok=True)
    import csv

    from .energy.costs import COMPONENT_NAMES
    with open(outdir / "cost_table.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario_seed", "method", *COMPONENT_NAMES, "total",
                    "gap"])
        for scen, sol in zip(dataset.test_scenarios, dataset.test_solutions):
            costs = cost_components(system, scen, sol)
            w.writerow([scen.seed, "central",
                        *[f"{costs[k]:.10g}" for k in COMPONENT_NAMES],
                        f"{costs['total']:.10g}",
                        f"{sol.optimality_gap:.6g}"])
    print(f"central baseline costs -> {outdir / 'cost_table.csv'}")
    return EXIT_OK


def _checkpoint_dir(cfg: RunConfig, method: str) -> Path:
    return cfg.out / "checkpoints" / method


def cmd_train(cfg: RunConfig) -> int:
    dataset = _require_dataset(cfg)
    sim = cfg.sim_config()
    adversary = None
    if cfg.attack_script:
        adversary = AdversaryScript.from_json(cfg.attack_script)
    report = PipelineReport(sim)
    for method in cfg.methods:
        tap = adversary.model_tap(sim.master_seed) if (
            adversary and method == "adaptive-fl") else None
        result = run_training(dataset, method, sim.fed_config(), sim.widths,
                              sim.ensemble_n, sim.dropout_p, sim.master_seed,
                              adversary_model_tap=tap)
        ckpt = _checkpoint_dir(cfg, method)
        ckpt.mkdir(parents=True, exist_ok=True)
        for state in result.agents:
            save_ensemble(state.ensemble, ckpt / f"{state.agent_id}.txt")
        if method == "adaptive-fl":
            masks = {a: s.mantissa for a, s in result.masks.items()}
            (ckpt / "masks.json").write_text(
                json.dumps(masks, indent=2, sort_keys=True) + "\n")
            report.acceptance = result.acceptance_rates()
            for rep in result.reports:
                for row in rep.rows:
                    report.round_rows.append({"round": rep.round_idx, **row})
        report.r2[method] = result.r2
        print(f"{method}: mean test R2 "
              f"{float(np.mean(list(result.r2.values()))):.4f}")
    write_all(report, cfg.out / "train_report")
    return EXIT_OK


def _load_trained(cfg: RunConfig, dataset, method: str) -> TrainResult:
    from .fed.state import AgentState
    from .masking.shamir import MaskSecret

    ckpt = _checkpoint_dir(cfg, method)
    if not ckpt.exists():
        raise CliError(EXIT_MISSING, "missing-checkpoints",
                       f"{ckpt} not found; run `train` first")
    agents = []
    for aid in dataset.agent_ids:
        ens = load_ensemble(ckpt / f"{aid}.txt")
        agents.append(AgentState(agent_id=aid, ensemble=ens))
    result = TrainResult(method, agents)
    masks_file = ckpt / "masks.json"
    if masks_file.exists():
        stored = json.loads(masks_file.read_text())
        n = len(dataset.agent_ids)
        rng = np.random.default_rng((cfg.seed, 4242))
        result.masks = {
            a: MaskSecret(int(m), tuple(int(x) for x in
                                        rng.integers(1, 2 ** 40, n - 1)),
                          owner=a)
            for a, m in stored.items()}
    return result


def cmd_coordinate(cfg: RunConfig) -> int:
    dataset = _require_dataset(cfg)
    sim = cfg.sim_config()
    system = desk_system()
    adversary = None
    if cfg.attack_script:
        adversary = AdversaryScript.from_json(cfg.attack_script)
    report = PipelineReport(sim)
    results = {m: _load_trained(cfg, dataset, m) for m in cfg.methods}
    n_eval = min(sim.n_eval_scenarios, len(dataset.test_scenarios))
    rejected = 0
    for k in range(n_eval):
        scen = dataset.test_scenarios[k]
        sched = dataset.test_solutions[k]
        m0 = cost_components(system, scen, sched)
        report.cost_rows.append(CoordinationOutcome(
            scen.seed, "central", True, None, m0, 0.0, 0.0, {}))
        for method in cfg.methods:
            out = run_coordination(system, scen, sched, dataset,
                                   results[method], sim,
                                   adversary=adversary, m0_costs=m0)
            report.cost_rows.append(out)
            if not out.verified:
                rejected += 1
    from .sim.pipeline import _measure_timing
    if "adaptive-fl" in results:
        _measure_timing(report, system, dataset, results, sim)
    write_all(report, cfg.out / "coordinate_report")
    print(f"coordination over {n_eval} days; "
          f"{rejected} method-runs halted on rejection")
    return EXIT_OK


def cmd_attack_demo(cfg: RunConfig) -> int:
    if not cfg.attack_script:
        raise CliError(EXIT_CONFIG, "missing-attack-script",
                       "attack-demo needs --attack-script")
    dataset = _require_dataset(cfg)
    sim = cfg.sim_config()
    system = desk_system()
    adversary = AdversaryScript.from_json(cfg.attack_script)
    method = cfg.methods[0]
    result = _load_trained(cfg, dataset, method)
    scen = dataset.test_scenarios[0]
    sched = dataset.test_solutions[0]
    out = run_coordination(system, scen, sched, dataset, result, sim,
                           adversary=adversary)
    outdir = cfg.out / "attack_demo"
    outdir.mkdir(parents=True, exist_ok=True)
    verdict = "ACCEPT" if out.verified else "REJECT"
    lines = [f"scenario_seed {scen.seed}", f"method {method}"]
    for e in adversary.events:
        lines.append(f"event layer={e.layer} when={e.when} "
                     f"target={e.target} mode={e.mode} rho={e.rho}")
    if out.halted_at is not None:
        lines.append(f"halted_at_period {out.halted_at}")
    lines.append(f"verdict {verdict}")
    (outdir / "transcript.txt").write_text("\n".join(lines) + "\n")
    print(f"attack demo verdict: {verdict}")
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    indirs = [cfg.out / "train_report", cfg.out / "coordinate_report",
              cfg.out / "central"]
    present = [d for d in indirs if d.exists()]
    if not present:
        raise CliError(EXIT_MISSING, "nothing-to-report",
                       f"no report inputs under {cfg.out}")
    out = consolidate(present, cfg.out / "report")
    print(f"consolidated report -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dcfed",
        description="privacy-preserving federated learning-to-optimization "
                    "simulator for multi-data-center energy management")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in (("gen", cmd_gen), ("solve-central", cmd_solve_central),
                     ("train", cmd_train), ("coordinate", cmd_coordinate),
                     ("attack-demo", cmd_attack_demo), ("report", cmd_report)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--scale", choices=("desk", "paper"), default=None)
        sp.add_argument("--method", choices=METHODS, default=None)
        sp.add_argument("--attack-script", default=None)
        sp.set_defaults(fn=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return args.fn(cfg)
    except CliError as err:
        print(json.dumps({"error": err.kind, "message": str(err)}),
              file=sys.stderr)
        return err.code
    except Exception as err:  # noqa: BLE001 - surface as runtime failure
        print(json.dumps({"error": "runtime", "message": str(err)}),
              file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
