"""Batch front-end: synthesize operator tables, evolve flows, run validations.

Driven by a single JSON config (``--config``); outputs are deterministic
(sorted keys, fixed term order, %.17g floats).  Exit codes: 0 success,
2 config error, 3 numerical failure (blow-up or step failure), 4 validation
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction as Q

import numpy as np

from . import dynamics, quantum, synth
from .coeffs import CoeffTable, bernoulli_positive
from .dynamics import (
    FlowField,
    IntegratorControls,
    LinearHamiltonian,
    assemble_rhs,
    integrate,
    matrix_riccati_field,
    oscillator_field,
    phase_along,
    riccati_linearize,
)
from .rootsys import build_a_series, load_custom
from .symalg import MultiPoly
from .synth import (
    golden_tables,
    su2_representation,
    su_flag_representation,
    verify_homomorphism,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4


class ConfigError(ValueError):
    pass


def _as_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot parse complex number from {value!r}")


def _weight_list(raw, count: int):
    if raw is None:
        return None
    if len(raw) != count:
        raise ConfigError(f"weight must have {count} components")
    return [MultiPoly.coerce(Q(str(w))) for w in raw]


def _representation_for(config: dict):
    preset = config.get("preset")
    if preset == "su2":
        weight = config.get("weight")
        j = Q(str(weight[0])) if weight else "j"
        return su2_representation(j, convention="direct")
    if preset == "su3":
        return su_flag_representation(3, weights=_weight_list(config.get("weight"), 3))
    if preset is None and "algebra" in config:
        alg = config["algebra"]
        if alg.get("series") != "A":
            raise ConfigError("only the A series can be synthesized directly")
        rank = int(alg.get("rank", 0))
        if rank < 1:
            raise ConfigError("rank must be >= 1")
        return synth.a_series_direct_representation(
            rank, weight=_weight_list(config.get("weight"), rank + 1)
        )
    raise ConfigError("config needs a preset (su2|su3) or an algebra block")


def _hamiltonian_for(config: dict) -> LinearHamiltonian:
    raw = config.get("hamiltonian")
    if raw is None:
        raise ConfigError("missing hamiltonian block")
    eps = {entry["generator"]: _as_complex(entry["eps"]) for entry in raw}
    return LinearHamiltonian(eps)


def cmd_synth(config: dict, out_dir: str) -> int:
    rep = _representation_for(config)
    with open(os.path.join(out_dir, "operators.json"), "w") as fh:
        json.dump(rep.to_json(), fh, indent=1, sort_keys=True)
    with open(os.path.join(out_dir, "operators.txt"), "w") as fh:
        fh.write(rep.render() + "\n")
    print(f"wrote operator table for {rep.name} ({len(rep.ops)} generators)")
    return EXIT_OK


def _controls_for(config: dict) -> IntegratorControls:
    controls = IntegratorControls()
    if "dt" in config:
        controls.method = "rk4"
        controls.dt = float(config["dt"])
    if "rtol" in config:
        controls.method = "rk45"
        controls.rtol = float(config["rtol"])
    if "n_samples" in config:
        controls.n_samples = int(config["n_samples"])
    return controls


def cmd_evolve(config: dict, out_dir: str) -> int:
    preset = config.get("preset")
    t_end = float(config.get("t_end", 5.0))
    controls = _controls_for(config)
    outputs = config.get("outputs", ["trajectory"])

    if preset == "oscillator":
        omega = np.array([[_as_complex(x) for x in row] for row in config["omega"]])
        f = np.array([_as_complex(x) for x in config.get("f", [0] * omega.shape[0])])
        field = oscillator_field(omega, f)
        z0 = np.array([_as_complex(x) for x in config["z0"]])
        traj = integrate(field, z0, t_end, controls)
    elif preset == "grassmann":
        blocks = config["blocks"]
        field = matrix_riccati_field(
            np.array([[_as_complex(x) for x in row] for row in blocks["eps01"]]),
            np.array([[_as_complex(x) for x in row] for row in blocks["eps02"]]),
            np.array([[_as_complex(x) for x in row] for row in blocks["epsp"]]),
            np.array([[_as_complex(x) for x in row] for row in blocks["epsm"]]),
            variant=config.get("variant", "compact"),
        )
        z0 = np.array([_as_complex(x) for x in config["z0"]])
        traj = integrate(field, z0, t_end, controls)
    else:
        rep = _representation_for(config)
        if rep.weight_symbols:
            raise ConfigError("evolution needs numeric weights in the config")
        ham = _hamiltonian_for(config)
        field = assemble_rhs(rep, ham)
        z0 = np.array([_as_complex(x) for x in config["z0"]])
        traj = integrate(field, z0, t_end, controls)
        if "phase" in outputs:
            if preset == "su2":
                weight = config.get("weight")
                qrep = quantum.su2_rep(Q(str(weight[0])))
                flow_ham = ham
            elif preset == "su3":
                qrep = quantum.su3_rep(config.get("representation", "fundamental"))
                flow_ham = quantum.matched_hamiltonian(rep, ham)
            else:
                raise ConfigError("phase output needs the su2 or su3 preset")
            # the trajectory must follow the vector-side flow for the phase
            field = assemble_rhs(rep, flow_ham)
            traj = integrate(field, z0, t_end, controls)
            ctx = quantum.CoherentContext.build(qrep, qrep.matrix_of(ham))
            traj = phase_along(traj, ctx, field=field)

    if traj.status != "completed":
        print(f"numerical failure: {traj.status} at t={traj.t_fail}", file=sys.stderr)
        traj.to_csv(os.path.join(out_dir, "trajectory.csv"))
        return EXIT_NUMERICAL

    if "field" in outputs:
        with open(os.path.join(out_dir, "field.txt"), "w") as fh:
            fh.write(field.render() + "\n")
    traj.to_csv(os.path.join(out_dir, "trajectory.csv"))
    traj.to_json(os.path.join(out_dir, "trajectory.json"))
    print(f"wrote trajectory with {len(traj.times)} samples")
    return EXIT_OK


def _default_validation(seed: int) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    results: list[tuple[str, bool, str]] = []

    table = CoeffTable.build(12)
    results.append(("coefficients", True, f"depth {table.depth}"))
    b = bernoulli_positive(3)
    results.append(
        ("bernoulli", b == [Q(1, 6), Q(1, 30), Q(1, 42)], ",".join(map(str, b)))
    )

    for name, rep in golden_tables().items():
        fails = verify_homomorphism(rep)
        results.append((f"golden-{name}-homomorphism", not fails, f"{len(fails)} failures"))

    flag = su_flag_representation(3)
    same = all(flag.ops[k] == golden_tables()["su3"].ops[k] for k in flag.ops)
    results.append(("synthesis-matches-su3-golden", same, "exact"))

    su2 = su2_representation()
    gold2 = golden_tables()["su2"]
    same2 = all(su2.ops[k] == gold2.ops[k] for k in su2.ops)
    results.append(("synthesis-matches-su2-golden", same2, "exact"))

    # Riccati linearization cross-check
    m = n = 2
    a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    b2 = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    eps01 = (a + a.conj().T) / 2
    eps02 = (b2 + b2.conj().T) / 2
    epsp = (rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))) * 0.5
    epsm = epsp.conj().T
    field = matrix_riccati_field(eps01, eps02, epsp, epsm, "compact")
    z0 = (rng.normal(size=m * n) + 1j * rng.normal(size=m * n)) * 0.2
    traj = integrate(field, z0, 5.0, IntegratorControls(n_samples=51))
    lin = riccati_linearize(
        eps01, eps02, epsp, epsm, "compact", z0.reshape(m, n), np.eye(n), 5.0, 51
    )
    dev = 0.0
    for k in range(len(traj.times)):
        if k in lin.flagged:
            continue
        dev = max(dev, float(np.max(np.abs(traj.states[k].reshape(m, n) - lin.z[k]))))
    results.append(("riccati-linearization", dev <= 1e-6 and traj.status == "completed",
                    f"max deviation {dev:.3e}"))
    return results


def cmd_verify(config: dict, out_dir: str, seed: int) -> int:
    seed = int(config.get("seed", seed))
    results = _default_validation(seed)

    if "custom_table" in config:
        try:
            load_custom(config["custom_table"])
            results.append(("custom-table", True, "loaded"))
        except Exception as exc:  # validation failures are the point here
            results.append(("custom-table", False, str(exc)))

    report = {
        "seed": seed,
        "results": [
            {"check": name, "passed": bool(ok), "detail": detail}
            for name, ok, detail in results
        ],
    }
    with open(os.path.join(out_dir, "validation.json"), "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
    all_ok = True
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        all_ok &= ok
    return EXIT_OK if all_ok else EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="csflow", description=__doc__)
    parser.add_argument("command", choices=["synth", "evolve", "verify"])
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    os.makedirs(args.out_dir, exist_ok=True)
    try:
        if args.command == "synth":
            return cmd_synth(config, args.out_dir)
        if args.command == "evolve":
            return cmd_evolve(config, args.out_dir)
        return cmd_verify(config, args.out_dir, args.seed)
    except (ConfigError, KeyError, ValueError) as exc:
        if isinstance(exc, (dynamics.DynamicsError, quantum.QuantumError, synth.SynthError)):
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
