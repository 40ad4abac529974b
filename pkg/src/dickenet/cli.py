"""Command-line driver: configuration-driven runs with atomic, manifest-tagged outputs.

Exit codes: 0 success, 1 verification failure, 2 configuration error (with a
line-anchored diagnostic), 3 numeric failure.  Outputs for a run land in
``<output_root>/<scenario name>/`` only after the manifest is written; an
interrupted run leaves a ``.tmp-*`` directory behind, never a manifest.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, serialize, verify
from .config import ParsedConfig, ConfigValue, canonical_text, parameter_hash, parse_config_text
from .dicke import mass_distribution
from .errors import ConfigError, DickenetError, DomainError, NumericFailure
from .gravity import HBAR, AciParams, aci_interference, aci_visibility, decoherence_time
from .measurement import MeasurementScheme, envelope_fit, run_ramsey
from .network import extract_excitation_profile
from .scenarios import (
    ScenarioConfig,
    build_gravity,
    build_times,
    cost_spec,
    load_scenario,
    measurement_choice,
    optimizer_config,
    prepare_state,
    _variational_target,
)
from . import varprep

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _load_config(path: Path) -> ParsedConfig:
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from err
    return parse_config_text(text)


def _output_root(scenario: ScenarioConfig) -> Path:
    env = os.environ.get("DICKENET_OUTPUT_ROOT")
    if env:
        return Path(env)
    if scenario.output_dir:
        return Path(scenario.output_dir)
    return Path("runs")


class RunWriter:
    """Stages outputs in a temp directory; the manifest write publishes the run."""

    def __init__(self, root: Path, name: str, parsed: ParsedConfig, seed: int):
        self.final_dir = root / name
        self.tmp_dir = root / f".tmp-{name}-{os.getpid()}"
        self.parsed = parsed
        self.params_hash = parameter_hash(parsed, seed)
        self.checks: list[dict] = []
        self.outputs: list[str] = []
        self.t0 = time.monotonic()
        self.tmp_dir.mkdir(parents=True, exist_ok=True)

    def write(self, filename: str, text: str):
        (self.tmp_dir / filename).write_text(text)
        self.outputs.append(filename)

    def check(self, name: str, ok: bool, detail: str = ""):
        self.checks.append({"name": name, "pass": bool(ok), "detail": detail})

    def finish(self) -> Path:
        manifest = {
            "artifact_version": __version__,
            "parameter_hash": self.params_hash,
            "duration_seconds": time.monotonic() - self.t0,
            "config_echo": canonical_text(self.parsed),
            "checks": self.checks,
            "outputs": sorted(self.outputs),
        }
        tmp_manifest = self.tmp_dir / ".manifest.tmp"
        tmp_manifest.write_text(json.dumps(manifest, indent=2) + "\n")
        os.replace(tmp_manifest, self.tmp_dir / "manifest.json")
        if self.final_dir.exists():
            if not (self.final_dir / "manifest.json").exists():
                raise DickenetError(
                    f"refusing to replace {self.final_dir}: it has no manifest, so it is not a previous run"
                )
            shutil.rmtree(self.final_dir)
        os.replace(self.tmp_dir, self.final_dir)
        if any(not c["pass"] for c in self.checks):
            raise NumericFailure(f"run checks failed, see {self.final_dir / 'manifest.json'}")
        return self.final_dir


def _trace_checks(writer: RunWriter, trace):
    peak = float(np.abs(trace.signal).max())
    writer.check("signal-bounded", peak <= 1.0 + 1e-9, f"max |I| = {peak:.6f}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(config_path: Path, seed_override: int | None) -> int:
    parsed = _load_config(config_path)
    scenario = load_scenario(parsed)
    if seed_override is not None:
        scenario = ScenarioConfig(scenario.name, scenario.n_atoms, seed_override,
                                  scenario.output_dir, parsed)
    ctx = build_gravity(parsed)
    times = build_times(parsed)
    scheme_kind, path_kind = measurement_choice(parsed)
    prepared = prepare_state(scenario)
    if scheme_kind == "local_quadrature" and prepared.amplifier is None:
        raise ConfigError("local_quadrature needs a state source with a symmetric-subspace amplifier",
                          parsed.section_line("measurement"))
    decoder = prepared.amplifier.dagger() if scheme_kind == "local_quadrature" else None
    scheme = MeasurementScheme(scheme_kind, decoder)

    writer = RunWriter(_output_root(scenario), scenario.name, parsed, scenario.rng_seed)
    profile = extract_excitation_profile(prepared.state)
    traces = {}
    if path_kind in ("analytic", "compare"):
        traces["analytic"] = run_ramsey(prepared.state, ctx, scheme, times, prepared.phi0, "analytic")
    if path_kind in ("oracle", "compare"):
        traces["oracle"] = run_ramsey(prepared.state, ctx, scheme, times, prepared.phi0, "oracle")
    primary = traces.get("analytic", traces.get("oracle"))
    writer.write("trace.csv", serialize.trace_to_csv(primary, writer.params_hash))
    if path_kind == "compare":
        a, o = traces["analytic"].signal, traces["oracle"].signal
        writer.write("comparison.csv", serialize.comparison_to_csv(times, a, o, writer.params_hash))
        gap = float(np.abs(a - o).max())
        writer.check("oracle-vs-analytic", gap < max(10 * profile.leakage, 1e-9),
                     f"max |diff| = {gap:.3e} (leakage {profile.leakage:.3e})")
    writer.write("profile.csv", serialize.distribution_to_csv(profile.weights, writer.params_hash))
    _trace_checks(writer, primary)
    writer.check("profile-leakage", profile.leakage < 1.0 + 1e-12, f"leakage = {profile.leakage:.6f}")
    out = writer.finish()
    print(f"simulate: {prepared.description} -> {out}")
    return EXIT_OK


def cmd_prepare(config_path: Path, seed_override: int | None) -> int:
    parsed = _load_config(config_path)
    scenario = load_scenario(parsed)
    if seed_override is not None:
        scenario = ScenarioConfig(scenario.name, scenario.n_atoms, seed_override,
                                  scenario.output_dir, parsed)
    kind = parsed.get("state", "kind", str)
    if kind != "variational":
        raise ConfigError(f"prepare needs a variational state source, got {kind!r}",
                          parsed.section_line("state"))
    dims = scenario.dims
    target, p = _variational_target(scenario)
    spec = cost_spec(scenario, target)
    result = varprep.optimize(dims, spec, p, optimizer_config(scenario))
    u_p = varprep.build_circuit(dims, result.ansatz)

    writer = RunWriter(_output_root(scenario), scenario.name, parsed, scenario.rng_seed)
    spec_echo = (f"{spec.kind} lambda={spec.lam:.17g}" if spec.kind == "target_distribution"
                 else f"{spec.kind} lambda1={spec.lam1:.17g} lambda2={spec.lam2:.17g}")
    writer.write("circuit.txt", serialize.ansatz_to_text(
        dims.n_atoms, result.ansatz, cost=result.cost, seed=scenario.rng_seed, cost_spec=spec_echo))
    achieved = np.abs(u_p.matrix[:, 1]) ** 2
    writer.write("mass_distribution.csv", serialize.distribution_to_csv(
        achieved, writer.params_hash, target=mass_distribution(target)))
    writer.write("cost_trace.csv", serialize.cost_trace_to_csv(result.trace, writer.params_hash))
    vac = abs(u_p.matrix[0, 0]) ** 2
    writer.check("vacuum-fidelity", vac > 0.5, f"|<0|U|0>|^2 = {vac:.6f}")
    out = writer.finish()
    print(f"prepare: cost {result.cost:.6f} (restart {result.restart}) -> {out}")
    return EXIT_OK


def cmd_verify(level: str, report_path: Path | None) -> int:
    results = verify.run_checks(level)
    report = verify.format_report(results, level)
    sys.stdout.write(report)
    if report_path is not None:
        report_path.write_text(report)
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY_FAILED


def cmd_aci(config_path: Path, seed_override: int | None) -> int:
    parsed = _load_config(config_path)
    scenario = load_scenario(parsed)
    ctx = build_gravity(parsed)
    times = build_times(parsed)
    parsed.require_section("aci")
    ell_down = parsed.get("aci", "ell_down", int, minimum=1)
    ell_up = parsed.get("aci", "ell_up", int)
    try:
        params = AciParams.from_excitations(ctx, ell_down, ell_up)
        trace = aci_interference(params, ctx, times)
        fast = abs(params.m_eff * ctx.delta_phi / HBAR + params.omega_eff * ctx.delta_phi / ctx.c**2)
        default_window = 4 * np.pi / fast if fast > 0 else float(times[-1] - times[0])
        window = parsed.get("aci", "window", float, default=default_window)
        vis = aci_visibility(trace, window)
    except DomainError as err:
        raise ConfigError(str(err), parsed.section_line("aci")) from err

    writer = RunWriter(_output_root(scenario), scenario.name, parsed, scenario.rng_seed)
    writer.write("beat.csv", serialize.trace_to_csv(trace, writer.params_hash))
    writer.write("visibility.csv", serialize.visibility_to_csv(times, vis, writer.params_hash))
    _trace_checks(writer, trace)
    writer.check("visibility-bounded", float(vis.max()) <= 1.0 + 1e-9, f"max V = {vis.max():.6f}")
    out = writer.finish()
    print(f"aci: beat + visibility -> {out}")
    return EXIT_OK


_SCAN_TARGETS = {
    "alpha": ("state", "alpha"),
    "n_atoms": ("scenario", "n_atoms"),
    "delta_z": ("gravity", "delta_z"),
    "t_max": ("time", "stop"),
}


def _override(parsed: ParsedConfig, section: str, key: str, value) -> ParsedConfig:
    import copy

    clone = copy.deepcopy(parsed)
    if section not in clone.sections:
        clone.sections[section] = {}
        clone.section_lines[section] = 0
        clone.order.append(section)
    old = clone.sections[section].get(key)
    clone.sections[section][key] = ConfigValue(value, old.line if old else 0)
    return clone


def cmd_scan(config_path: Path, parameter: str, values: list[str], seed_override: int | None) -> int:
    if parameter not in _SCAN_TARGETS:
        raise ConfigError(f"scan parameter must be one of {sorted(_SCAN_TARGETS)}, got {parameter!r}")
    if not values:
        raise ConfigError("scan needs a non-empty value list")
    section, key = _SCAN_TARGETS[parameter]
    parsed = _load_config(config_path)
    base_scenario = load_scenario(parsed)
    writer = RunWriter(_output_root(base_scenario), base_scenario.name, parsed, base_scenario.rng_seed)
    rows = ["parameter,value,fitted_tau_s,predicted_tau_s,rel_err"]
    for raw in values:
        value = int(raw) if parameter == "n_atoms" else float(raw)
        variant = _override(parsed, section, key, value)
        scenario = load_scenario(variant)
        if seed_override is not None:
            scenario = ScenarioConfig(scenario.name, scenario.n_atoms, seed_override,
                                      scenario.output_dir, variant)
        ctx = build_gravity(variant)
        times = build_times(variant)
        scheme_kind, _ = measurement_choice(variant)
        prepared = prepare_state(scenario)
        if prepared.branch is not None:
            from .dicke import energy_moments

            moments = energy_moments(prepared.branch, ctx.omega_eg)
            predicted = decoherence_time(ctx, moments.std_joules) if moments.variance > 0 else float("inf")
        else:
            predicted = float("nan")
        if np.isfinite(predicted) and predicted > 0:
            # window the trace to the expected decay so the fit sees the
            # whole initial contrast loss at every scan point
            times = np.linspace(times[0], times[0] + 1.6 * predicted, times.size)
        decoder = prepared.amplifier.dagger() if scheme_kind == "local_quadrature" else None
        trace = run_ramsey(prepared.state, ctx, MeasurementScheme(scheme_kind, decoder),
                           times, prepared.phi0, "analytic")
        tag = f"{parameter}_{raw}".replace(".", "p")
        writer.write(f"trace_{tag}.csv", serialize.trace_to_csv(trace, writer.params_hash))
        fitted = envelope_fit(trace)
        rel = abs(fitted - predicted) / predicted if np.isfinite(predicted) and predicted > 0 else float("nan")
        rows.append(f"{parameter},{raw},{fitted:.17g},{predicted:.17g},{rel:.17g}")
    writer.write("summary.csv", "\n".join(
        [f"# dickenet {__version__} params={writer.params_hash}"] + rows) + "\n")
    writer.check("scan-complete", True, f"{len(values)} points")
    out = writer.finish()
    print(f"scan: {len(values)} x {parameter} -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dickenet",
        description="Two-node entangled atomic-ensemble network simulator "
                    "(gravitational-redshift Ramsey interferometry).",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the config rng seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a Ramsey scenario and write the interference trace")
    p.add_argument("config", type=Path)

    p = sub.add_parser("prepare", help="variationally compile an amplifier circuit")
    p.add_argument("config", type=Path)

    p = sub.add_parser("verify", help="run the oracle-equivalence and invariant suites")
    p.add_argument("--full", action="store_true", help="widen oracles to their documented ranges")
    p.add_argument("--report", type=Path, default=None, help="also write the report to a file")

    p = sub.add_parser("aci", help="emulated atom-clock-interferometer beat and visibility")
    p.add_argument("config", type=Path)

    p = sub.add_parser("scan", help="sweep one parameter, fitting decay times against prediction")
    p.add_argument("config", type=Path)
    p.add_argument("--param", required=True, choices=sorted(_SCAN_TARGETS))
    p.add_argument("--values", required=True, help="comma-separated list")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config_path = getattr(args, "config", None)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.seed)
        if args.command == "prepare":
            return cmd_prepare(args.config, args.seed)
        if args.command == "verify":
            return cmd_verify("full" if args.full else "fast", args.report)
        if args.command == "aci":
            return cmd_aci(args.config, args.seed)
        if args.command == "scan":
            values = [v for v in args.values.split(",") if v.strip()]
            return cmd_scan(args.config, args.param, values, args.seed)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ConfigError as err:
        anchor = str(config_path) if config_path is not None else "config"
        print(f"error: {err.anchored(anchor)}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except DickenetError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
