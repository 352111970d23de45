"""JSON experiment configuration and its validation.

A config file is a JSON object with top-level keys ``mode``, ``seed``,
``replicates``, ``out_dir``, ``parallelism`` and ``d_max`` plus optional
sections ``growth``, ``kernel``, ``world``, ``analyze`` and ``sweep``.  Every
violation is collected before anything is reported, and unknown keys are
errors with a nearest-key suggestion.
"""
from __future__ import annotations

import dataclasses
import difflib
import json
import math
import types
import typing
from dataclasses import dataclass, field, fields

from .errors import ConfigError, DegenerateSpecError, DomainError
from .growth import GrowthConfig
from .kernel import KernelSpec, _check_scales, characteristic_scales
from .spatial import WorldConfig

MODES = ("grow", "grow-ba", "simulate", "analyze", "sweep", "kernel-table")


@dataclass(frozen=True)
class KernelParams:
    """Flat kernel parameters.  ``k_max`` / ``v_max`` of ``None`` mean no cap;
    ``b_max`` of ``None`` means ``sqrt(prior_var) / alpha``.

    Defaults put ``d_noise = 5`` and ``k_star = 50``.
    """

    alpha: float = 1.0
    beta: float = 0.0
    var_d: float = 1.0
    prior_mu: float = 0.0
    prior_var: float = 2500.0
    k_max: float | None = 50.0
    b_max: float | None = None
    v_max: float | None = 100.0
    gain: float = 1.0
    eta: float = 5.0
    beta_det: float = 2.0
    l_char: float = 1.0
    t0: float = 1.0
    nu: float | None = 1.5
    decay_s: float | None = None

    def spec(self) -> KernelSpec:
        kw = dataclasses.asdict(self)
        kw["k_max"] = math.inf if self.k_max is None else self.k_max
        kw["v_max"] = math.inf if self.v_max is None else self.v_max
        return KernelSpec.from_flat(**kw)


@dataclass(frozen=True)
class AnalyzeParams:
    input: str | None = None  # edge-list path; required in analyze mode
    n_nodes: int | None = None
    bins_per_decade: int = 10
    k_min: int | None = None  # fixed power-law k_min; None scans
    min_count: int = 30  # knee detection ignores CCDF points covering fewer nodes


@dataclass(frozen=True)
class SweepParams:
    parameter: str = "kernel.nu"  # "<section>.<field>"
    values: list = field(default_factory=list)


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    seed: int = 0
    replicates: int = 1
    out_dir: str = "out"
    parallelism: int | None = None  # None: one worker per core
    d_max: int = 200  # kernel-table rows
    growth: GrowthConfig | None = None
    kernel: KernelParams = field(default_factory=KernelParams)
    world: WorldConfig | None = None
    analyze: AnalyzeParams | None = None
    sweep: SweepParams | None = None


SECTIONS = {
    "growth": GrowthConfig,
    "kernel": KernelParams,
    "world": WorldConfig,
    "analyze": AnalyzeParams,
    "sweep": SweepParams,
}
# the master seed drives every run; section-level seeds are not configurable
HIDDEN = {"growth": {"seed"}, "world": {"seed"}}
TOP_LEVEL = ("mode", "seed", "replicates", "out_dir", "parallelism", "d_max")


def _field_names(cls, section=None) -> list[str]:
    return [f.name for f in fields(cls) if f.name not in HIDDEN.get(section, ())]


def _unknown(keys, known, where) -> list[str]:
    out = []
    for k in keys:
        if k in known:
            continue
        near = difflib.get_close_matches(k, known, n=1, cutoff=0.5)
        hint = f"; did you mean {near[0]!r}?" if near else ""
        out.append(f"unknown key '{where}{k}'{hint}")
    return out


def _type_ok(value, hint) -> bool:
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        return any(_type_ok(value, a) for a in typing.get_args(hint))
    if hint is type(None):
        return value is None
    if hint is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if hint is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if hint is list or origin is list:
        return isinstance(value, list)
    if isinstance(hint, type):
        return isinstance(value, hint)
    return True


def _coerce(value, hint):
    # JSON integers in float fields become floats so round trips compare equal
    args = typing.get_args(hint) if typing.get_origin(hint) in (typing.Union, types.UnionType) else (hint,)
    if float in args and int not in args and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def _build_section(name: str, raw, problems: list[str]):
    cls = SECTIONS[name]
    if not isinstance(raw, dict):
        problems.append(f"section {name!r} must be an object")
        return None
    known = _field_names(cls, name)
    problems.extend(_unknown(raw, known, f"{name}."))
    hints = typing.get_type_hints(cls)
    kw, bad = {}, False
    for k in known:
        if k not in raw:
            continue
        v = raw[k]
        if not _type_ok(v, hints[k]):
            problems.append(f"{name}.{k}: expected {hints[k]}, got {v!r}")
            bad = True
        else:
            kw[k] = _coerce(v, hints[k])
    if bad:
        return None
    if name == "growth" and "n_final" not in kw:
        problems.append("growth.n_final is required")
        return None
    try:
        obj = cls(**kw)
    except (ConfigError, DomainError) as exc:
        msgs = exc.problems if isinstance(exc, ConfigError) else [str(exc)]
        problems.extend(f"{name}: {m}" for m in msgs)
        return None
    if name == "world":
        problems.extend(f"world: {m}" for m in obj.problems())
    return obj


def _kernel_problems(kp: KernelParams, need_scales: bool) -> list[str]:
    try:
        spec = kp.spec()
        if need_scales:
            _check_scales(characteristic_scales(spec))
    except ConfigError as exc:
        return [f"kernel: {m}" for m in exc.problems]
    except (DomainError, DegenerateSpecError) as exc:
        return [f"kernel: {exc}"]
    return []


def _sweep_problems(cfg: ExperimentConfig) -> list[str]:
    sw = cfg.sweep
    section, _, name = sw.parameter.partition(".")
    if section not in ("growth", "kernel") or not name:
        return [f"sweep.parameter must be 'growth.<field>' or 'kernel.<field>', got {sw.parameter!r}"]
    known = _field_names(SECTIONS[section], section)
    if name not in known:
        return _unknown([name], known, f"sweep.parameter {section}.")
    if not sw.values:
        return ["sweep.values must be a non-empty list"]
    out = []
    for v in sw.values:
        try:
            point = sweep_point(cfg, v)
        except (ConfigError, DomainError, TypeError) as exc:
            out.append(f"sweep value {sw.parameter}={v!r}: {exc}")
            continue
        need = point.growth.kernel == "phenomenological"
        out.extend(f"sweep value {sw.parameter}={v!r}: {m}"
                   for m in _kernel_problems(point.kernel, need))
    return out


def sweep_point(cfg: ExperimentConfig, value) -> ExperimentConfig:
    """``cfg`` with the swept parameter set to ``value``."""
    section, _, name = cfg.sweep.parameter.partition(".")
    hint = typing.get_type_hints(SECTIONS[section])[name]
    value = _coerce(value, hint)
    return dataclasses.replace(cfg, **{section: dataclasses.replace(getattr(cfg, section), **{name: value})})


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    problems: list[str] = []
    problems.extend(_unknown(raw, list(TOP_LEVEL) + list(SECTIONS), ""))
    top = {}
    hints = typing.get_type_hints(ExperimentConfig)
    for k in TOP_LEVEL:
        if k in raw:
            if _type_ok(raw[k], hints[k]):
                top[k] = raw[k]
            else:
                problems.append(f"{k}: expected {hints[k]}, got {raw[k]!r}")
    mode = top.get("mode")
    if mode is None and "mode" not in raw:
        problems.append("mode is required")
    elif mode is not None and mode not in MODES:
        problems.append(f"mode must be one of {MODES}, got {mode!r}")
    if top.get("replicates", 1) < 1:
        problems.append(f"replicates must be >= 1, got {top['replicates']}")
    if top.get("parallelism") is not None and top["parallelism"] < 1:
        problems.append(f"parallelism must be >= 1, got {top['parallelism']}")
    if top.get("d_max", 1) < 1:
        problems.append(f"d_max must be >= 1, got {top['d_max']}")
    if not 0 <= top.get("seed", 0) < 2 ** 64:
        problems.append("seed must be an unsigned 64-bit integer")

    sections = {name: _build_section(name, raw[name], problems)
                for name in SECTIONS if name in raw}
    if sections.get("kernel") is None and "kernel" in raw:
        sections.pop("kernel")

    required = {"grow": ["growth"], "grow-ba": ["growth"], "simulate": ["world"],
                "analyze": ["analyze"], "sweep": ["growth", "sweep"]}.get(mode, [])
    for name in required:
        if name not in raw:
            problems.append(f"mode {mode!r} requires a {name!r} section")
    an = sections.get("analyze")
    if mode == "analyze" and an is not None and not an.input:
        problems.append("analyze.input is required in analyze mode")

    if problems:
        raise ConfigError(problems)
    cfg = ExperimentConfig(**top, **sections)
    g = cfg.growth
    uses_kernel = mode == "kernel-table" or (
        mode in ("grow", "sweep") and g is not None and g.kernel in ("mechanistic", "phenomenological"))
    if uses_kernel and mode != "sweep":
        need = mode == "kernel-table" or g.kernel == "phenomenological"
        problems.extend(_kernel_problems(cfg.kernel, need))
    if mode == "sweep":
        problems.extend(_sweep_problems(cfg))
    if problems:
        raise ConfigError(problems)
    return cfg


def parse_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return config_from_dict(raw)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = {k: getattr(cfg, k) for k in TOP_LEVEL}
    for name in SECTIONS:
        sec = getattr(cfg, name)
        if sec is not None:
            out[name] = {k: getattr(sec, k) for k in _field_names(type(sec), name)}
    return out


def emit_config(cfg: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"
