"""Run configuration: a TOML file with fixed sections and keys.

Every key is optional; an empty file gives the defaults below. Unknown
sections or keys are rejected.

.. code-block:: toml

    [cavity]
    g = 1.0
    delta = 20.0
    kappa = 20.0

    [drive]
    eps = [1.0, 1.0, 1.0]          # numbers, [re, im] pairs or "1+2j" strings
    laser = 1e-9                   # Gamma; omit for 0.01 * min|J|

    [fiber]
    phi_over_pi = [0.5, 0.5, 0.5]  # links (21, 32, 13)
    nu = 0.0                       # loss per metre
    lengths = [0.0, 0.0, 0.0]      # metres, same link order

    [atoms]
    gamma_spont = 0.0              # gamma / Gamma for `evolve` and `protocol`

    [run]
    tau_max_over_pi = 2.0
    tau_points = 2001
    gamma_list = [0.0, 0.001, 0.002, 0.01]   # gamma / Gamma for fig3 and sweep
    output_path = "."
    emit = ["fig2", "fig3"]        # products written by `sweep`

    [protocol]
    tau_off_over_pi = 1.0
    hold_over_pi = 0.0             # zz-only wait before the measurement

    [regime]
    much_greater = 10.0
    approx_equal = 0.5
    much_less = 0.1
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import ParseError, ValidationError
from .model import PhysicalParams, RegimeThresholds, derive_couplings

EMIT_CHOICES = frozenset({"couplings", "evolution", "entanglement", "protocol", "fig2", "fig3"})

SCHEMA = {
    "cavity": {"g", "delta", "kappa"},
    "drive": {"eps", "laser"},
    "fiber": {"phi_over_pi", "nu", "lengths"},
    "atoms": {"gamma_spont"},
    "run": {"tau_max_over_pi", "tau_points", "gamma_list", "output_path", "emit"},
    "protocol": {"tau_off_over_pi", "hold_over_pi"},
    "regime": {"much_greater", "approx_equal", "much_less"},
}


@dataclass(frozen=True)
class RunConfig:
    g: float = 1.0
    delta: float = 20.0
    kappa: float = 20.0
    eps: tuple = (1.0, 1.0, 1.0)
    laser: float | None = None
    phi: tuple = (math.pi / 2,) * 3
    nu: float = 0.0
    fiber_lengths: tuple = (0.0, 0.0, 0.0)
    gamma_spont: float = 0.0
    tau_max: float = 2 * math.pi
    tau_points: int = 2001
    gamma_list: tuple = (0.0, 0.001, 0.002, 0.01)
    output_path: str = "."
    emit: frozenset = frozenset({"fig2", "fig3"})
    tau_off: float = math.pi
    hold_tau: float = 0.0
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)

    def physical_params(self) -> PhysicalParams:
        """Physical parameters, resolving an unset laser to 0.01 min|J|."""
        p = PhysicalParams(g=self.g, delta=self.delta, kappa=self.kappa, eps=self.eps,
                           phi=self.phi, gamma_spont=0.0, nu=self.nu,
                           fiber_lengths=self.fiber_lengths)
        laser = self.laser
        if laser is None:
            laser = 0.01 * min(abs(j) for j in derive_couplings(p).j)
        return replace(p, gamma_laser=laser, gamma_spont=self.gamma_spont * laser)

    def digest(self) -> str:
        """Short SHA-256 of the fully resolved configuration."""
        d = asdict(self)
        d["eps"] = [[complex(e).real, complex(e).imag] for e in self.eps]
        d["emit"] = sorted(self.emit)
        blob = json.dumps(d, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _number(key, value, *, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(key, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(key, "must be finite")
    if positive and not value > 0:
        raise ValidationError(key, "must be > 0")
    if nonneg and value < 0:
        raise ValidationError(key, "must be ≥ 0")
    return value


def _triple(key, value, conv):
    if not isinstance(value, list) or len(value) != 3:
        raise ValidationError(key, "expected a list of 3 entries")
    return tuple(conv(f"{key}[{i}]", v) for i, v in enumerate(value))


def _complex(key, value):
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            raise ValidationError(key, f"cannot read {value!r} as a complex number") from None
    if isinstance(value, list):
        if len(value) != 2:
            raise ValidationError(key, "complex pairs are [re, im]")
        return complex(_number(key, value[0]), _number(key, value[1]))
    return complex(_number(key, value))


def _raise_syntax(exc):
    msg = str(exc)
    line = getattr(exc, "lineno", None)
    col = getattr(exc, "colno", None)
    if line is None and "(at line " in msg:
        head, _, tail = msg.rpartition("(at line ")
        try:
            line_s, _, col_s = tail.rstrip(")").partition(", column ")
            line, col = int(line_s), int(col_s)
            msg = head.strip()
        except ValueError:
            pass
    raise ParseError(msg, line, col) from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises
    ------
    ParseError
        Malformed TOML, with line and column.
    ValidationError
        Unknown keys or out-of-range values, naming the key.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        _raise_syntax(exc)

    for section, body in data.items():
        if section not in SCHEMA:
            raise ValidationError(section, "unknown section")
        if not isinstance(body, dict):
            raise ValidationError(section, "expected a [section] table")
        for key in body:
            if key not in SCHEMA[section]:
                raise ValidationError(f"{section}.{key}", "unknown key")

    kw = {}
    cav = data.get("cavity", {})
    for key in ("g", "delta", "kappa"):
        if key in cav:
            kw[key] = _number(f"cavity.{key}", cav[key], positive=True)

    drive = data.get("drive", {})
    if "eps" in drive:
        kw["eps"] = _triple("drive.eps", drive["eps"], _complex)
    if "laser" in drive:
        kw["laser"] = _number("drive.laser", drive["laser"], positive=True)

    fiber = data.get("fiber", {})
    if "phi_over_pi" in fiber:
        kw["phi"] = tuple(math.pi * x for x in _triple("fiber.phi_over_pi", fiber["phi_over_pi"],
                                                      _number))
    if "nu" in fiber:
        kw["nu"] = _number("fiber.nu", fiber["nu"], nonneg=True)
    if "lengths" in fiber:
        kw["fiber_lengths"] = _triple("fiber.lengths", fiber["lengths"],
                                      lambda k, v: _number(k, v, nonneg=True))

    atoms = data.get("atoms", {})
    if "gamma_spont" in atoms:
        kw["gamma_spont"] = _number("atoms.gamma_spont", atoms["gamma_spont"], nonneg=True)

    run = data.get("run", {})
    if "tau_max_over_pi" in run:
        kw["tau_max"] = math.pi * _number("run.tau_max_over_pi", run["tau_max_over_pi"],
                                          positive=True)
    if "tau_points" in run:
        n = run["tau_points"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 2:
            raise ValidationError("run.tau_points", "must be an integer ≥ 2")
        kw["tau_points"] = n
    if "gamma_list" in run:
        gl = run["gamma_list"]
        if not isinstance(gl, list) or not gl:
            raise ValidationError("run.gamma_list", "expected a non-empty list")
        vals = []
        for i, v in enumerate(gl):
            v = _number(f"run.gamma_list[{i}]", v)
            if v < 0:
                raise ValidationError(f"run.gamma_list[{i}]", "gamma_spont must be ≥ 0")
            vals.append(v)
        kw["gamma_list"] = tuple(vals)
    if "output_path" in run:
        if not isinstance(run["output_path"], str):
            raise ValidationError("run.output_path", "expected a string")
        kw["output_path"] = run["output_path"]
    if "emit" in run:
        em = run["emit"]
        if not isinstance(em, list) or not all(isinstance(x, str) for x in em):
            raise ValidationError("run.emit", "expected a list of names")
        bad = set(em) - EMIT_CHOICES
        if bad:
            raise ValidationError("run.emit", f"unknown product(s) {sorted(bad)}; "
                                              f"choose from {sorted(EMIT_CHOICES)}")
        kw["emit"] = frozenset(em)

    prot = data.get("protocol", {})
    if "tau_off_over_pi" in prot:
        kw["tau_off"] = math.pi * _number("protocol.tau_off_over_pi", prot["tau_off_over_pi"],
                                          nonneg=True)
    if "hold_over_pi" in prot:
        kw["hold_tau"] = math.pi * _number("protocol.hold_over_pi", prot["hold_over_pi"],
                                           nonneg=True)

    reg = data.get("regime", {})
    if reg:
        kw["thresholds"] = RegimeThresholds(**{
            k: _number(f"regime.{k}", v, positive=True) for k, v in reg.items()
        })

    cfg = RunConfig(**kw)
    try:
        cfg.physical_params()
    except ValueError as exc:
        raise ValidationError("cavity", str(exc)) from None
    return cfg


def load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"config is not UTF-8: {exc}") from None
    return parse_config(text)
