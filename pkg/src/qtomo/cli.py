"""Command-line surface: simulation, reconstruction, kernel export and the
oracle validation gate, all driven by a single JSON config document.

Flags only override seed, count and paths, so an archived config file
reproduces a run exactly.  Exit codes: 0 success, 1 validation failure,
2 config or file error (with a machine-readable object on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import groups, homodyne, mc, numerics, spin
from ._jsonio import dumps, format_float

__all__ = ["main", "run_validation_suite"]

_MODES = ("simulate-homodyne", "simulate-spin", "reconstruct", "kernel-export", "validate")


class ConfigError(ValueError):
    pass


def _fail(code: str, message: str) -> int:
    sys.stderr.write(dumps({"error": {"code": code, "message": message}}) + "\n")
    return 2


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {exc.filename}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _merged_config(args: argparse.Namespace) -> dict:
    cfg = _load_config(args.config)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    mode = cfg.get("mode")
    if mode is not None and mode != args.mode:
        raise ConfigError(f"config mode {mode!r} does not match subcommand {args.mode!r}")
    cfg["mode"] = args.mode
    for key in ("seed", "count"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            cfg[key] = value
    for flag, key in (("state", "state_path"), ("records", "records_path"), ("output", "output_path")):
        value = getattr(args, flag, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _require(cfg: dict, key: str, kind=None):
    if key not in cfg:
        raise ConfigError(f"config is missing required field {key!r}")
    value = cfg[key]
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"field {key!r} must be an integer")
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"field {key!r} has wrong type {type(value).__name__}")
    return value


def _target_kind(target: dict) -> str:
    if not isinstance(target, dict) or "type" not in target:
        raise ConfigError("target must be an object with a 'type' field")
    kind = target["type"]
    if kind not in ("matrix-element", "photon-number", "spin-operator", "spin-matrix"):
        raise ConfigError(f"unknown target type {kind!r}")
    return kind


def _named_spin_operator(name: str, two_j: int) -> np.ndarray:
    jx, jy, jz = spin.spin_matrices(two_j)
    try:
        return {"Jx": jx, "Jy": jy, "Jz": jz}[name]
    except KeyError:
        raise ConfigError(f"unknown spin operator {name!r}; use Jx, Jy or Jz") from None


def _spin_matrix_from_target(target: dict) -> np.ndarray:
    rows = _require(target, "matrix", list)
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def _spin_target_operator(cfg: dict, target: dict) -> np.ndarray:
    if target["type"] == "spin-matrix":
        return _spin_matrix_from_target(target)
    name = _require(target, "name", str)
    two_j = target.get("two_j", cfg.get("two_j"))
    if two_j is None:
        raise ConfigError("named spin operators need 'two_j' in the target or config")
    return _named_spin_operator(name, int(two_j))


def _run_simulate_homodyne(cfg: dict) -> int:
    rho = homodyne.load_homodyne_state(_require(cfg, "state_path", str))
    count = _require(cfg, "count", int)
    seed = _require(cfg, "seed", int)
    convention = cfg.get("convention", "Y")
    records = homodyne.sample_homodyne(rho, count, seed)
    homodyne.write_homodyne_records(records, _require(cfg, "records_path", str), convention)
    return 0


def _run_simulate_spin(cfg: dict) -> int:
    rho = spin.load_spin_state(_require(cfg, "state_path", str))
    count = _require(cfg, "count", int)
    seed = _require(cfg, "seed", int)
    records = spin.sample_spin(rho, count, seed)
    spin.write_spin_records(records, _require(cfg, "records_path", str))
    return 0


def _observable_id(target: dict) -> str:
    kind = target["type"]
    if kind == "matrix-element":
        return f"rho[{target['n'] + target['l']},{target['n']}]"
    if kind == "photon-number":
        return "photon-number"
    if kind == "spin-operator":
        return target["name"]
    return "spin-matrix"


def _run_reconstruct(cfg: dict) -> int:
    target = _require(cfg, "target", dict)
    kind = _target_kind(target)
    records_path = _require(cfg, "records_path", str)
    if kind in ("matrix-element", "photon-number"):
        records = homodyne.read_homodyne_records(records_path)
        if kind == "matrix-element":
            kernel = homodyne.matrix_element_kernel(
                int(_require(target, "n", int)), int(_require(target, "l", int)),
                cfg.get("cutoff"),
            )
        else:
            kernel = homodyne.photon_number_kernel()
    else:
        records = spin.read_spin_records(records_path)
        kernel = spin.spin_operator_kernel(_spin_target_operator(cfg, target))
    # worker count comes from the environment only and never changes results
    workers = max(1, int(os.environ.get("QTOMO_WORKERS", "1")))
    result = mc.reconstruct(records, kernel, shards=workers)
    payload = {
        "observable": _observable_id(target),
        "mean": [result["mean"].real, result["mean"].imag],
        "stderr": [result["stderr_re"], result["stderr_im"]],
        "count": result["count"],
    }
    text = dumps(payload) + "\n"
    out = cfg.get("output_path")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def _run_kernel_export(cfg: dict) -> int:
    target = _require(cfg, "target", dict)
    kind = _target_kind(target)
    grid = _require(cfg, "grid", dict)
    lo = float(_require(grid, "min", (int, float)))
    hi = float(_require(grid, "max", (int, float)))
    points = int(_require(grid, "points", int))
    if points < 2 or hi <= lo:
        raise ConfigError("grid needs points >= 2 and max > min")
    xs = np.linspace(lo, hi, points)
    rows = []
    if kind == "matrix-element":
        n = int(_require(target, "n", int))
        l = int(_require(target, "l", int))
        for x in xs:
            value = homodyne.kernel_matrix_element(n, l, float(x), cfg.get("cutoff"))
            rows.append((x, value.real, value.imag))
    elif kind == "photon-number":
        for x in xs:
            rows.append((x, x * x - 0.5, 0.0))
    else:
        operator = _spin_target_operator(cfg, target)
        two_lambda = int(_require(target, "two_lambda", int))
        for theta in xs:
            axis = (math.sin(theta), 0.0, math.cos(theta))
            value = spin.kernel_spin_closed(operator, axis, two_lambda)
            rows.append((theta, value, 0.0))
    lines = ["grid_point,kernel_re,kernel_im"]
    lines += [",".join(format_float(c) for c in row) for row in rows]
    Path(_require(cfg, "output_path", str)).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def run_validation_suite(seed: int = 2024) -> dict:
    """Deterministic oracle suite tying the implementation to its closed forms."""
    rng = np.random.default_rng(seed)
    checks = []

    def add(name, value, reference, error, tolerance):
        checks.append(
            {
                "name": name,
                "value": value,
                "reference": reference,
                "error": error,
                "tolerance": tolerance,
                "pass": bool(error <= tolerance),
            }
        )

    volume = groups.haar_integral_su2(lambda g: 1.0, tol=1e-8).real
    add(
        "haar_volume",
        volume,
        groups.SU2_HAAR_VOLUME,
        abs(volume - groups.SU2_HAAR_VOLUME) / groups.SU2_HAAR_VOLUME,
        1e-6,
    )

    for two_j in (1, 2):
        dim = two_j + 1
        worst = 0.0
        quads = [np.eye(dim, dtype=complex)[[0, 0, 0, 0]]]
        for _ in range(5):
            vecs = rng.normal(size=(4, dim)) + 1j * rng.normal(size=(4, dim))
            quads.append(vecs / np.linalg.norm(vecs, axis=1, keepdims=True))
        degree = groups.QuorumSpec.su2(two_j).formal_degree
        for u1, u2, v1, v2 in quads:
            residual = groups.orthogonality_residual(two_j, u1, u2, v1, v2)
            rhs = abs((u1.conj() @ u2) * (v2.conj() @ v1) / degree)
            worst = max(worst, residual / (1.0 + rhs))
        add(f"orthogonality_two_j_{two_j}", worst, 0.0, worst, 1e-6)

    worst = 0.0
    for two_j in (1, 2, 3):
        dim = two_j + 1
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a_matrix = (raw + raw.conj().T) / 2.0
        for _ in range(5):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            for two_lambda in range(-two_j, two_j + 1, 2):
                closed = spin.kernel_spin_closed(a_matrix, axis, two_lambda)
                numeric = spin.kernel_spin_numeric(a_matrix, axis, two_lambda)
                worst = max(worst, abs(closed - numeric))
    add("spin_kernel_closed_vs_numeric", worst, 0.0, worst, 1e-9)

    raw = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
    rho_matrix = np.zeros((9, 9), dtype=complex)
    rho_matrix[:7, :7] = raw @ raw.conj().T
    rho = homodyne.FockDensityMatrix(8, rho_matrix / np.trace(rho_matrix).real)
    y_max = homodyne.default_y_max(rho.n_max)
    worst = 0.0
    for phi in rng.uniform(0.0, 2.0 * np.pi, size=10):
        total = numerics.integrate_real(
            lambda y: homodyne.quadrature_density_grid(rho, float(phi), y),
            -y_max,
            y_max,
            tol=1e-9,
            min_panels=8,
        )
        worst = max(worst, abs(total - 1.0))
    add("omega_normalization", worst, 0.0, worst, 1e-6)

    radii = np.linspace(1e-3, 2.0 * np.pi - 1e-3, 100)
    worst = 0.0
    for r in radii:
        product = groups.jacobian_from_eigenvalues([0.0, 1j * r, -1j * r])
        closed = 4.0 * math.sin(r / 2.0) ** 2 / (r * r)
        worst = max(worst, abs(product - closed))
    add("su2_jacobian_identity", worst, 0.0, worst, 1e-12)

    return {"checks": checks, "passed": all(c["pass"] for c in checks)}


def _run_validate(cfg: dict) -> int:
    report = run_validation_suite(int(cfg.get("seed", 2024)))
    for check in report["checks"]:
        status = "PASS" if check["pass"] else "FAIL"
        sys.stdout.write(
            f"{check['name']}: {check['value']:.12g} vs {check['reference']:.12g} "
            f"(error {check['error']:.3e}, tol {check['tolerance']:.1e}) {status}\n"
        )
    out = cfg.get("output_path")
    if out:
        Path(out).write_text(dumps(report) + "\n", encoding="utf-8")
    return 0 if report["passed"] else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtomo",
        description="group-based quantum tomography: simulate, reconstruct, validate",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in _MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="JSON config document", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--count", type=int, default=None)
        p.add_argument("--state", default=None, help="override state_path")
        p.add_argument("--records", default=None, help="override records_path")
        p.add_argument("--output", default=None, help="override output_path")
    return parser


_RUNNERS = {
    "simulate-homodyne": _run_simulate_homodyne,
    "simulate-spin": _run_simulate_spin,
    "reconstruct": _run_reconstruct,
    "kernel-export": _run_kernel_export,
    "validate": _run_validate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merged_config(args)
        if args.mode != "validate" and args.config is None:
            raise ConfigError("--config is required for this mode")
        return _RUNNERS[args.mode](cfg)
    except ConfigError as exc:
        return _fail("config", str(exc))
    except FileNotFoundError as exc:
        return _fail("file", f"{exc.strerror}: {exc.filename}")
    except (KeyError, TypeError, ValueError) as exc:
        return _fail("config", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    raise SystemExit(main())
