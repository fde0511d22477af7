"""File formats: scenarios, scan requests, trajectory CSV and reports.

Scenario files are YAML mappings with explicit keys.  Couplings may be
written as decimals, integers or exact rationals ``p/q``::

    n: 4
    mass: 1
    omega: 1
    convention: listed-once
    couplings: [1, -1/2]
    positions: [[1.0, 0.0], [-0.5, 0.5], [0.0, 0.0], [-0.5, -0.5]]
    momenta:   [[0.0, 1.5], [-0.5, -1.0], [0.0, 0.5], [0.5, -1.0]]

Optional keys are ``label``, ``t0`` and ``eps_rel`` (the trace tolerance
appropriate to the precision of the data).
"""

from __future__ import annotations

import csv
import io as _io
import json
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .dynamics import Trajectory
from .errors import ScenarioParseError, WrongN
from .model import Convention, SystemSpec, validate_spec
from .modes import PhaseState
from .scan import SCAN_TOLERANCES, Axis, FixedState, RandomSeeded, ScanRequest

__all__ = [
    "Scenario",
    "parse_number",
    "loads_scenario",
    "load_scenario",
    "dumps_scenario",
    "builtin_scenarios",
    "load_builtin",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "format_machine_block",
    "extract_machine_block",
    "loads_scan_request",
    "load_scan_request",
]

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")
_SCENARIO_KEYS = {"label", "n", "mass", "omega", "convention", "couplings",
                  "positions", "momenta", "t0", "eps_rel"}


@dataclass(frozen=True)
class Scenario:
    spec: SystemSpec
    initial: PhaseState
    label: str = ""
    eps_rel: float | None = None


def parse_number(x, *, exact_ok: bool = True):
    """int, float or ``"p/q"`` string to a number (Fraction for ``p/q``)."""
    if isinstance(x, bool):
        raise ValueError(f"not a number: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        m = _RATIONAL.match(x)
        if m:
            if int(m.group(2)) == 0:
                raise ValueError(f"zero denominator in {x!r}")
            q = Fraction(int(m.group(1)), int(m.group(2)))
            return q if exact_ok else float(q)
        try:
            return float(x)
        except ValueError:
            pass
    raise ValueError(f"not a number: {x!r}")


def _key_marks(text):
    """Map top-level keys to their 1-based (line, column)."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: (k.start_mark.line + 1, k.start_mark.column + 1) for k, _ in node.value}


def _load_mapping(text, what):
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        msg = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise ScenarioParseError(f"{what}: {msg}", mark.line + 1, mark.column + 1) from None
        raise ScenarioParseError(f"{what}: {msg}") from None
    if not isinstance(data, dict):
        raise ScenarioParseError(f"{what}: expected a mapping at top level", 1, 1)
    return data


def _fail(marks, key, msg):
    line, col = marks.get(key, (None, None))
    raise ScenarioParseError(msg, line, col)


def _vectors(data, key, marks):
    raw = data.get(key)
    if not isinstance(raw, list) or not raw:
        _fail(marks, key, f"'{key}' must be a non-empty list of [x, y] pairs")
    out = []
    for k, v in enumerate(raw, start=1):
        if not (isinstance(v, list) and len(v) == 2):
            _fail(marks, key, f"'{key}' entry {k} is not an [x, y] pair")
        try:
            out.append([float(parse_number(c, exact_ok=False)) for c in v])
        except ValueError as exc:
            _fail(marks, key, f"'{key}' entry {k}: {exc}")
    return np.array(out, dtype=float)


def loads_scenario(text: str) -> Scenario:
    """Parse scenario text.

    Raises
    ------
    ScenarioParseError
        Malformed YAML, unknown or missing keys, non-numeric entries.
    SpecError, WrongN
        Well-formed file whose contents violate the model invariants.
    """
    data = _load_mapping(text, "scenario")
    marks = _key_marks(text)
    unknown = sorted(set(data) - _SCENARIO_KEYS)
    if unknown:
        _fail(marks, unknown[0], f"unknown key '{unknown[0]}'")
    for key in ("n", "couplings", "positions", "momenta"):
        if key not in data:
            raise ScenarioParseError(f"missing required key '{key}'")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        _fail(marks, "n", "'n' must be an integer")
    if not isinstance(data["couplings"], list):
        _fail(marks, "couplings", "'couplings' must be a list")
    def number(key, default):
        try:
            return float(parse_number(data.get(key, default), exact_ok=False))
        except ValueError as exc:
            _fail(marks, key, f"'{key}': {exc}")

    try:
        couplings = tuple(parse_number(c) for c in data["couplings"])
    except ValueError as exc:
        _fail(marks, "couplings", f"'couplings': {exc}")
    mass = number("mass", 1.0)
    omega = number("omega", 1.0)
    t0 = number("t0", 0.0)
    eps = None if data.get("eps_rel") is None else number("eps_rel", None)
    try:
        convention = Convention(data.get("convention", "listed-once"))
    except ValueError:
        _fail(marks, "convention", f"unknown convention {data.get('convention')!r}")
    positions = _vectors(data, "positions", marks)
    momenta = _vectors(data, "momenta", marks)

    spec = validate_spec(SystemSpec(n, couplings, mass, omega, convention))
    if len(positions) != n or len(momenta) != n:
        raise WrongN(f"n={n} but {len(positions)} positions and {len(momenta)} momenta given")
    initial = PhaseState(t0, positions, momenta)
    return Scenario(spec, initial, str(data.get("label", "")), eps)


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads_scenario(text)


def _emit_number(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


def dumps_scenario(scn: Scenario) -> str:
    """Serialize so that :func:`loads_scenario` returns an equal scenario."""
    spec = scn.spec
    data = {}
    if scn.label:
        data["label"] = scn.label
    data.update({
        "n": spec.n,
        "mass": float(spec.mass),
        "omega": float(spec.omega),
        "convention": spec.convention.value,
        "couplings": [_emit_number(k) for k in spec.couplings],
    })
    if scn.initial.t:
        data["t0"] = float(scn.initial.t)
    if scn.eps_rel is not None:
        data["eps_rel"] = float(scn.eps_rel)
    data["positions"] = [[float(a), float(b)] for a, b in scn.initial.positions]
    data["momenta"] = [[float(a), float(b)] for a, b in scn.initial.momenta]
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def builtin_scenarios() -> list:
    """Names of the scenario files shipped with the package."""
    root = resources.files("dihedral") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_builtin(name: str) -> Scenario:
    root = resources.files("dihedral") / "scenarios"
    f = root / f"{name}.yaml"
    if not f.is_file():
        raise KeyError(f"no built-in scenario {name!r}; have {builtin_scenarios()}")
    return loads_scenario(f.read_text())


def _header(n, momenta):
    cols = ["t"] + [f"{a}{i}" for i in range(1, n + 1) for a in ("x", "y")]
    if momenta:
        cols += [f"{a}{i}" for i in range(1, n + 1) for a in ("px", "py")]
    return cols


def write_trajectory_csv(traj: Trajectory, path_or_file, momenta: bool = False) -> None:
    """Columns ``t, x1, y1, ..., xn, yn`` (then ``px1, py1, ...`` if requested)."""
    own = not hasattr(path_or_file, "write")
    f = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(_header(traj.n, momenta))
        for k in range(len(traj)):
            row = [traj.times[k]] + traj.positions[k].ravel().tolist()
            if momenta:
                row += traj.momenta[k].ravel().tolist()
            w.writerow([repr(float(x)) for x in row])
    finally:
        if own:
            f.close()


def read_trajectory_csv(path) -> Trajectory:
    """Inverse of :func:`write_trajectory_csv`; missing momenta read as zeros."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc.strerror}") from None
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or not rows[0]:
        raise ScenarioParseError(f"{path}: empty trajectory file")
    head = [h.strip() for h in rows[0]]
    if head[0] != "t" or len(head) < 3:
        raise ScenarioParseError(f"{path}: header must start with 't, x1, y1'", 1, 1)
    npos = sum(1 for h in head if re.fullmatch(r"[xy]\d+", h))
    n = npos // 2
    if npos % 2 or n < 1 or head[: 1 + npos] != _header(n, False):
        raise ScenarioParseError(f"{path}: unexpected column layout", 1, 1)
    has_mom = len(head) == 1 + 4 * n
    if has_mom and head != _header(n, True):
        raise ScenarioParseError(f"{path}: unexpected momentum columns", 1, 1)
    body = [r for r in rows[1:] if r]
    if not body:
        raise ScenarioParseError(f"{path}: no data rows")
    try:
        arr = np.array([[float(x) for x in r] for r in body])
    except ValueError as exc:
        raise ScenarioParseError(f"{path}: {exc}") from None
    if arr.shape[1] != len(head):
        raise ScenarioParseError(f"{path}: ragged rows")
    pos = arr[:, 1:1 + 2 * n].reshape(-1, n, 2)
    mom = arr[:, 1 + 2 * n:].reshape(-1, n, 2) if has_mom else np.zeros_like(pos)
    return Trajectory(arr[:, 0], pos, mom, {"source": str(path)})


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def format_machine_block(payload: dict) -> str:
    """Fenced JSON block with sorted keys, stable across runs."""
    body = json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
    return f"```json\n{body}\n```\n"


def extract_machine_block(text: str) -> dict:
    """Read back the JSON block of a report; plain JSON is accepted too."""
    m = re.search(r"```json\n(.*?)\n```", text, re.S)
    try:
        return json.loads(m.group(1) if m else text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"report: {exc.msg}", exc.lineno, exc.colno) from None


_REQUEST_KEYS = {"n", "convention", "mass", "omega", "axes", "probe", "tolerances", "cell_cap"}


def loads_scan_request(text: str, base_dir=None):
    """Parse a scan request.

    ``probe`` is either ``{kind: random, seed: S, trials: K}`` or
    ``{kind: fixed, scenario: NAME_OR_PATH}`` or ``{kind: fixed,
    positions: ..., momenta: ...}``.  ``tolerances`` overrides fields of
    the scan defaults.
    """
    data = _load_mapping(text, "scan request")
    marks = _key_marks(text)
    unknown = sorted(set(data) - _REQUEST_KEYS)
    if unknown:
        _fail(marks, unknown[0], f"unknown key '{unknown[0]}'")
    for key in ("n", "axes", "probe"):
        if key not in data:
            raise ScenarioParseError(f"missing required key '{key}'")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        _fail(marks, "n", "'n' must be an integer")
    axes_raw = data["axes"]
    if not isinstance(axes_raw, list) or not all(isinstance(a, dict) for a in axes_raw):
        _fail(marks, "axes", "'axes' must be a list of {min, max, resolution} mappings")
    try:
        axes = [Axis(float(parse_number(a["min"], exact_ok=False)),
                     float(parse_number(a["max"], exact_ok=False)), a["resolution"])
                for a in axes_raw]
    except (KeyError, ValueError, TypeError) as exc:
        _fail(marks, "axes", f"bad axis: {exc}")
    probe_raw = data["probe"]
    if not isinstance(probe_raw, dict) or probe_raw.get("kind") not in ("random", "fixed"):
        _fail(marks, "probe", "'probe' needs kind 'random' or 'fixed'")
    if probe_raw["kind"] == "random":
        probe = RandomSeeded(int(probe_raw.get("seed", 0)), int(probe_raw.get("trials", 5)))
    elif "scenario" in probe_raw:
        ref = str(probe_raw["scenario"])
        path = Path(base_dir or ".") / ref
        probe = FixedState((load_scenario(path) if path.is_file() else load_builtin(ref)).initial)
    else:
        pos = _vectors(probe_raw, "positions", {})
        mom = _vectors(probe_raw, "momenta", {})
        probe = FixedState(PhaseState(0.0, pos, mom))
    tol = SCAN_TOLERANCES
    tol_raw = data.get("tolerances") or {}
    if not isinstance(tol_raw, dict):
        _fail(marks, "tolerances", "'tolerances' must be a mapping")
    try:
        tol = replace(tol, **{k: parse_number(v, exact_ok=False) for k, v in tol_raw.items()})
    except (TypeError, ValueError) as exc:
        _fail(marks, "tolerances", f"bad tolerances: {exc}")
    try:
        convention = Convention(data.get("convention", "listed-once"))
    except ValueError:
        _fail(marks, "convention", f"unknown convention {data.get('convention')!r}")
    return ScanRequest(
        n, tuple(axes), probe, convention, tol,
        mass=float(parse_number(data.get("mass", 1.0), exact_ok=False)),
        omega=float(parse_number(data.get("omega", 1.0), exact_ok=False)),
        cell_cap=int(data.get("cell_cap", 10 ** 6)),
    )


def load_scan_request(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads_scan_request(text, Path(path).parent)
