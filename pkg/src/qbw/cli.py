"""Command-line front end: figure-data generation, sweeps and ad-hoc runs.

All commands write CSV (12 significant digits, comma delimited, LF line
endings) to --out or standard output. Identical configuration and seed
give byte-identical output. Exit codes: 0 success, 2 invalid
configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .battery import BatteryEnsemble, composite_hamiltonian, product_state
from .correlations import (
    Bipartition,
    classical_correlations,
    discord_witness,
    eof_two_qubits,
    genuine_correlations,
    global_discord,
    mutual_information,
    ppt_separable,
    quantum_discord,
)
from .errors import ConvergenceError, QbwError
from .protocol import (
    SwapProtocol,
    SwapStep,
    classical_limit_work,
    evolve_step,
    final_state,
    max_extractable_work,
    multi_step_decomposition,
    optimal_protocol,
    run_protocol,
)

COMMANDS = ("fig1", "fig2", "fig3a", "fig3b", "fig3c", "sweep", "compute")
PROTOCOLS = ("direct", "multistep", "optimal")
DIM_CAP = 1024
FIG3_N = (3, 5, 7, 10)
P0_LO, P0_HI = 0.005, 0.495


class ConfigError(ValueError):
    """Invalid command-line or config-file input (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters for one CLI invocation."""

    command: str
    n: int = 2
    d: int = 2
    probs: tuple | None = None
    energies: tuple | None = None
    protocol: str = "direct"
    points: int = 99
    samples: int = 50
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}")
        if self.points < 2:
            raise ConfigError("points must be >= 2")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if self.n < 1 or self.d < 2:
            raise ConfigError("need n >= 1 and d >= 2")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(header: Sequence[str], rows, out: str | None):
    text = ",".join(header) + "\n"
    for row in rows:
        text += ",".join(_fmt(v) for v in row) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _ensemble(cfg: RunConfig) -> BatteryEnsemble:
    if cfg.probs is None:
        raise ConfigError("this command requires --probs")
    energies = cfg.energies if cfg.energies is not None else tuple(range(cfg.d))
    try:
        return BatteryEnsemble(cfg.n, cfg.d, tuple(cfg.probs), tuple(energies))
    except QbwError as exc:
        raise ConfigError(str(exc)) from exc


def _build_protocol(e: BatteryEnsemble, which: str) -> SwapProtocol:
    top = SwapStep.build(0, e.d ** e.n - 1, e.n, e.d)
    if which == "direct":
        return SwapProtocol((top,))
    if which == "multistep":
        return multi_step_decomposition(top, e)
    return optimal_protocol(e)


def _theta_grid(samples: int) -> np.ndarray:
    return np.linspace(0.0, math.pi / 2, samples)


def _qubit_pair(p0: float, energies=(0.0, 1.0)) -> BatteryEnsemble:
    return BatteryEnsemble(2, 2, (p0, 1.0 - p0), tuple(energies))


_CUT2 = Bipartition((0,), (1,))


def cmd_fig1(cfg: RunConfig):
    """Two-qubit work plus peak discord and entanglement per protocol."""
    header = ["p0", "w_max", "qd_max_direct", "eof_max_direct", "qd_max_multistep"]
    rows = []
    for p0 in np.linspace(P0_LO, P0_HI, cfg.points):
        e = _qubit_pair(p0)
        rho0 = product_state(e)
        h = composite_hamiltonian(e)
        w_max, _ = max_extractable_work(rho0.diagonal(), h)
        qd_d, eof_d = 0.0, 0.0
        step = SwapStep.build(0, 3, 2, 2)
        for theta in _theta_grid(cfg.samples):
            rho = evolve_step(rho0, step, theta)
            qd_d = max(qd_d, quantum_discord(rho, _CUT2, seed=cfg.seed, quick=True))
            eof_d = max(eof_d, eof_two_qubits(rho))
        qd_m = 0.0
        trace = run_protocol(rho0, _build_protocol(e, "multistep"), cfg.samples)
        for rho in trace.states:
            qd_m = max(qd_m, quantum_discord(rho, _CUT2, seed=cfg.seed, quick=True))
        rows.append([p0, w_max, qd_d, eof_d, qd_m])
    return header, rows


def _qutrit_pair(p1: float, p0: float = 0.224,
                 energies=(0.0, 0.579, 1.0)) -> BatteryEnsemble:
    return BatteryEnsemble(2, 3, (p0, p1, 1.0 - p0 - p1), tuple(energies))


def cmd_fig2(cfg: RunConfig):
    """Two-qutrit work surplus over the classical limit, with the final
    classical correlations of the optimal protocol."""
    p0 = 0.224
    header = ["p1", "w_diff", "j_final"]
    # open interval (p0, (1-p0)/2): endpoints break strict population order
    grid = np.linspace(p0, (1.0 - p0) / 2, cfg.points + 2)[1:-1]
    rows = []
    for p1 in grid:
        e = _qutrit_pair(p1)
        rho0 = product_state(e)
        h = composite_hamiltonian(e)
        w_max, _ = max_extractable_work(rho0.diagonal(), h)
        w_diff = w_max - classical_limit_work(e)
        rho_f = final_state(e, optimal_protocol(e))
        j = classical_correlations(rho_f, _CUT2, seed=cfg.seed, quick=True)
        rows.append([p1, w_diff, j])
    return header, rows


def _direct_gd_max(p0: float, n: int, samples: int, seed: int) -> float:
    """Peak global discord along the direct n-qubit swap."""
    e = BatteryEnsemble(n, 2, (p0, 1.0 - p0), (0.0, 1.0))
    rho0 = product_state(e)
    step = SwapStep.build(0, 2 ** n - 1, n, 2)
    best = 0.0
    symmetric = n > 3
    for theta in _theta_grid(samples):
        rho = evolve_step(rho0, step, theta)
        gd = global_discord(rho, symmetric_ansatz=symmetric, seed=seed, quick=True)
        best = max(best, gd)
    return best


def cmd_fig3a(cfg: RunConfig):
    """Peak global discord of the direct swap per n, with the per-stage
    peaks of the n=3 five-step decomposition."""
    header = ["p0"] + [f"gd_max_n{n}" for n in FIG3_N]
    header += [f"gd_stage{k}_n3" for k in range(1, 6)]
    e3 = BatteryEnsemble(3, 2, (0.5, 0.5), (0.0, 1.0))
    proto3 = _build_protocol(e3, "multistep")
    rows = []
    for p0 in np.linspace(P0_LO, P0_HI, cfg.points):
        row = [p0]
        for n in FIG3_N:
            row.append(_direct_gd_max(p0, n, cfg.samples, cfg.seed))
        e = BatteryEnsemble(3, 2, (p0, 1.0 - p0), (0.0, 1.0))
        trace = run_protocol(product_state(e), proto3, cfg.samples)
        for k in range(5):
            block = trace.states[k * cfg.samples:(k + 1) * cfg.samples]
            row.append(max(global_discord(s, seed=cfg.seed, quick=True)
                           for s in block))
        rows.append(row)
    return header, rows


def cmd_fig3b(cfg: RunConfig):
    """Peak genuine quantum correlations of the direct swap per n."""
    header = ["p0"] + [f"gc_max_n{n}" for n in FIG3_N]
    rows = []
    for p0 in np.linspace(P0_LO, P0_HI, cfg.points):
        row = [p0]
        for n in FIG3_N:
            e = BatteryEnsemble(n, 2, (p0, 1.0 - p0), (0.0, 1.0))
            rho0 = product_state(e)
            step = SwapStep.build(0, 2 ** n - 1, n, 2)
            best = 0.0
            for theta in _theta_grid(cfg.samples):
                rho = evolve_step(rho0, step, theta)
                _, _, d_n = genuine_correlations(rho, seed=cfg.seed, quick=True,
                                                 assume_symmetric=True)
                best = max(best, d_n)
            row.append(best)
        rows.append(row)
    return header, rows


def cmd_fig3c(cfg: RunConfig):
    """Peak global discord against extractable work, parametric in p0."""
    header = ["n", "p0", "w", "gd_max"]
    rows = []
    for n in FIG3_N:
        for p0 in np.linspace(P0_LO, P0_HI, cfg.points):
            w = n * (1.0 - 2.0 * p0)
            rows.append([n, p0, w, _direct_gd_max(p0, n, cfg.samples, cfg.seed)])
    return header, rows


def cmd_sweep(cfg: RunConfig):
    """Work curves over a population grid for the configured ensemble.

    For d=2 the ground population p0 is swept; for d>=3 the first excited
    population p1 is swept with p0 fixed (taken from --probs, default
    0.224) and the remainder placed in the top level. The w_protocol
    column is the work extracted by running the selected protocol to
    completion.
    """
    if cfg.d == 2:
        header = ["p0", "w_max", "w_classical", "w_diff", "w_protocol"]
        grid = np.linspace(P0_LO, P0_HI, cfg.points)

        def make(p):
            probs = (p, 1.0 - p)
            energies = cfg.energies if cfg.energies is not None else (0.0, 1.0)
            return BatteryEnsemble(cfg.n, 2, probs, tuple(energies))
    elif cfg.d == 3:
        header = ["p1", "w_max", "w_classical", "w_diff", "w_protocol"]
        p0 = cfg.probs[0] if cfg.probs is not None else 0.224
        grid = np.linspace(p0, (1.0 - p0) / 2, cfg.points + 2)[1:-1]

        def make(p):
            probs = (p0, p, 1.0 - p0 - p)
            energies = cfg.energies if cfg.energies is not None else (0.0, 0.579, 1.0)
            return BatteryEnsemble(cfg.n, 3, probs, tuple(energies))
    else:
        raise ConfigError("sweep supports d=2 and d=3")
    if cfg.d ** cfg.n > DIM_CAP:
        raise ConfigError(f"composite dimension {cfg.d ** cfg.n} exceeds {DIM_CAP}")
    rows = []
    for p in grid:
        e = make(p)
        rho0 = product_state(e)
        h = composite_hamiltonian(e)
        w_max, _ = max_extractable_work(rho0.diagonal(), h)
        w_cl = classical_limit_work(e)
        proto = _build_protocol(e, cfg.protocol)
        rho_f = final_state(e, proto)
        w_p = float((rho0.diagonal() - rho_f.diagonal().real) @ h)
        rows.append([p, w_max, w_cl, w_max - w_cl, w_p])
    return header, rows


def _max_coherence(rho) -> float:
    off = rho.mat - np.diag(np.diag(rho.mat))
    return float(np.max(np.abs(off))) if off.size else 0.0


def cmd_compute(cfg: RunConfig):
    """Full correlation report along the selected protocol."""
    e = _ensemble(cfg)
    if e.d ** e.n > DIM_CAP:
        raise ConfigError(f"composite dimension {e.d ** e.n} exceeds {DIM_CAP}")
    rho0 = product_state(e)
    h = composite_hamiltonian(e)
    proto = _build_protocol(e, cfg.protocol)
    trace = run_protocol(rho0, proto, cfg.samples, energies=h)
    two_qubit = e.n == 2 and e.d == 2
    ppt_ok = e.n == 2 and e.d in (2, 3)
    multipartite = e.n >= 2
    header = ["time", "work", "coherence", "mutual_info", "classical_j",
              "discord", "global_discord", "genuine_total", "genuine_classical",
              "genuine_quantum", "eof", "ppt_separable", "witness_norm"]
    rows = []
    for t, rho, w in zip(trace.times, trace.states, trace.works):
        if multipartite:
            cut = Bipartition((0,), tuple(range(1, e.n)))
            mi = mutual_information(rho, cut)
            qd = quantum_discord(rho, cut, seed=cfg.seed, quick=True)
            j = mi - qd
            gd = global_discord(rho, symmetric_ansatz=e.n > 3,
                                seed=cfg.seed, quick=True)
            t_n, j_n, d_n = genuine_correlations(rho, seed=cfg.seed, quick=True)
        else:
            mi = qd = j = gd = t_n = j_n = d_n = 0.0
        eof = eof_two_qubits(rho) if two_qubit else None
        ppt = ppt_separable(rho, _CUT2) if ppt_ok else None
        _, wit = discord_witness(rho)
        rows.append([t, w, _max_coherence(rho), mi, j, qd, gd,
                     t_n, j_n, d_n, eof, ppt, wit])
    return header, rows


_DISPATCH = {
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "fig3a": cmd_fig3a,
    "fig3b": cmd_fig3b,
    "fig3c": cmd_fig3c,
    "sweep": cmd_sweep,
    "compute": cmd_compute,
}

_CONFIG_KEYS = {
    "n": int,
    "d": int,
    "probs": lambda s: tuple(float(x) for x in s.split(",")),
    "energies": lambda s: tuple(float(x) for x in s.split(",")),
    "protocol": str,
    "points": int,
    "samples": int,
    "seed": int,
    "out": str,
}


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def _parse_float_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated float list: {text!r}") from exc


def build_config(argv: Sequence[str]) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="qbw",
        description="Work extraction and correlation sweeps for arrays of "
                    "identical d-level quantum batteries.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--n", type=int)
    parser.add_argument("--d", type=int)
    parser.add_argument("--probs", type=str)
    parser.add_argument("--energies", type=str)
    parser.add_argument("--protocol", choices=PROTOCOLS)
    parser.add_argument("--points", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", type=str)
    parser.add_argument("--config", type=str)
    args = parser.parse_args(argv)

    values = _read_config_file(args.config) if args.config else {}
    if args.probs is not None:
        values["probs"] = _parse_float_list(args.probs)
    if args.energies is not None:
        values["energies"] = _parse_float_list(args.energies)
    for key in ("n", "d", "protocol", "points", "samples", "seed", "out"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    try:
        return RunConfig(command=args.command, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = build_config(argv)
        header, rows = _DISPATCH[cfg.command](cfg)
        write_csv(header, rows, cfg.out)
    except ConvergenceError as exc:
        print(f"qbw: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, QbwError) as exc:
        print(f"qbw: {exc}", file=sys.stderr)
        return 2
    except FloatingPointError as exc:
        print(f"qbw: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
