"""Scenario config files: JSON with a strict schema, documented defaults,
field-precise validation errors, and dotted-path overrides."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .channel import ChannelConfig, TxConfig
from .equalizers import EqTapConfig
from .errors import ParseError, ValidationError
from .metrics import EqualizerSpec, Scenario

DEFAULTS = {
    "tx": {"prbs_seed": 1, "rolloff": 0.1, "sps": 4, "rrc_span": 16},
    "channel": {
        "f3db_norm": 0.26,
        "snr_db": math.inf,
        "nonlinearity": None,
        "timing_offset": 0,
    },
    "equalizers": [
        {"kind": "svm", "ffe_taps": 31, "dfe_taps": 5,
         "hyperparams": {"lambda": 1e-3, "epochs": 20}},
        {"kind": "ffe_dfe", "ffe_taps": 31, "dfe_taps": 5,
         "hyperparams": {"step": 0.1}},
    ],
    "experiment": {
        "kind": None,
        "grid": None,
        "n_symbols": 1_000_000,
        "train_length": 5000,
        "seeds": [1, 2, 3],
    },
    "output": {"path": "results.csv", "format": "csv"},
}

DEFAULT_GRIDS = {
    "snr_sweep": [10.0, 12.0, 14.0, 16.0, 18.0, 20.0],
    "train_sweep": [250, 500, 1000, 2000, 5000, 10000],
    "single": [],
}

EXPERIMENT_KINDS = ("snr_sweep", "train_sweep", "single")
EQUALIZER_KINDS = ("svm", "ffe_dfe")
HYPERPARAM_KEYS = {"svm": ("lambda", "epochs"), "ffe_dfe": ("step",)}


@dataclass(slots=True)
class ScenarioConfig:
    """A fully resolved and validated scenario."""

    scenario: Scenario
    equalizers: list[EqualizerSpec]
    experiment_kind: str
    grid: list
    n_symbols: int
    train_length: int
    seeds: list[int]
    output_path: str
    output_format: str
    resolved: dict = field(default_factory=dict)


def _fail(msg: str, path: str):
    raise ValidationError(msg, field=path)


def _check_keys(section: dict, allowed, path: str):
    for key in section:
        if key not in allowed:
            _fail(f"unknown key {key!r}", f"{path}.{key}" if path else key)


def _coerce_float(value, path: str, allow_inf: bool = False) -> float:
    if isinstance(value, str) and value.lower() in ("inf", "infinity", "+inf"):
        value = math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(f"expected a number, got {value!r}", path)
    value = float(value)
    if math.isinf(value) and not allow_inf:
        _fail("must be finite", path)
    if math.isnan(value):
        _fail("must not be NaN", path)
    return value


def _coerce_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"expected an integer, got {value!r}", path)
    return int(value)


def _merged(user: dict, defaults: dict) -> dict:
    out = copy.deepcopy(defaults)
    out.update(user)
    return out


def config_from_dict(data: dict) -> ScenarioConfig:
    """Validate a raw config dict, apply defaults, reject unknown keys."""
    if not isinstance(data, dict):
        raise ValidationError("config root must be an object")
    _check_keys(data, DEFAULTS.keys(), "")

    tx_raw = _merged(data.get("tx", {}), DEFAULTS["tx"])
    _check_keys(data.get("tx", {}), DEFAULTS["tx"].keys(), "tx")
    sps = _coerce_int(tx_raw["sps"], "tx.sps")
    if sps < 1:
        _fail("sps must be >= 1", "tx.sps")
    rolloff = _coerce_float(tx_raw["rolloff"], "tx.rolloff")
    if not 0.0 < rolloff <= 1.0:
        _fail("rolloff must be in (0, 1]", "tx.rolloff")
    rrc_span = _coerce_int(tx_raw["rrc_span"], "tx.rrc_span")
    if rrc_span < 2 or rrc_span % 2:
        _fail("rrc_span must be a positive even integer", "tx.rrc_span")
    prbs_seed = _coerce_int(tx_raw["prbs_seed"], "tx.prbs_seed")
    if prbs_seed == 0 or prbs_seed != prbs_seed & 0x7FFF:
        _fail("prbs_seed must be a nonzero 15-bit integer", "tx.prbs_seed")
    tx = TxConfig(sps=sps, rolloff=rolloff, rrc_span=rrc_span, prbs_seed=prbs_seed)

    ch_raw = _merged(data.get("channel", {}), DEFAULTS["channel"])
    _check_keys(data.get("channel", {}), DEFAULTS["channel"].keys(), "channel")
    f3db = _coerce_float(ch_raw["f3db_norm"], "channel.f3db_norm")
    if not 0.0 < f3db < 0.5 * sps:
        _fail(f"f3db_norm must be in (0, 0.5*sps) = (0, {0.5 * sps})", "channel.f3db_norm")
    snr_db = _coerce_float(ch_raw["snr_db"], "channel.snr_db", allow_inf=True)
    sat_level = None
    if ch_raw["nonlinearity"] is not None:
        nl = ch_raw["nonlinearity"]
        if not isinstance(nl, dict):
            _fail("nonlinearity must be null or an object", "channel.nonlinearity")
        _check_keys(nl, ("sat_level",), "channel.nonlinearity")
        if "sat_level" not in nl:
            _fail("sat_level is required", "channel.nonlinearity.sat_level")
        sat_level = _coerce_float(nl["sat_level"], "channel.nonlinearity.sat_level")
        if sat_level <= 0:
            _fail("sat_level must be > 0", "channel.nonlinearity.sat_level")
    offset = _coerce_int(ch_raw["timing_offset"], "channel.timing_offset")
    if not 0 <= offset < sps:
        _fail(f"timing_offset must be in [0, sps) = [0, {sps})", "channel.timing_offset")
    channel = ChannelConfig(
        f3db_norm=f3db, snr_db=snr_db, sat_level=sat_level, timing_offset=offset
    )

    eq_raw = data.get("equalizers", DEFAULTS["equalizers"])
    if not isinstance(eq_raw, list) or not eq_raw:
        _fail("must be a nonempty list", "equalizers")
    specs = []
    for i, entry in enumerate(eq_raw):
        path = f"equalizers[{i}]"
        if not isinstance(entry, dict):
            _fail("must be an object", path)
        _check_keys(entry, ("kind", "name", "ffe_taps", "dfe_taps", "hyperparams"), path)
        kind = entry.get("kind")
        if kind not in EQUALIZER_KINDS:
            _fail(f"kind must be one of {EQUALIZER_KINDS}, got {kind!r}", f"{path}.kind")
        ffe_taps = _coerce_int(entry.get("ffe_taps", 31), f"{path}.ffe_taps")
        if ffe_taps < 1 or ffe_taps % 2 == 0:
            _fail("ffe_taps must be odd", f"{path}.ffe_taps")
        dfe_taps = _coerce_int(entry.get("dfe_taps", 5), f"{path}.dfe_taps")
        if dfe_taps < 0:
            _fail("dfe_taps must be >= 0", f"{path}.dfe_taps")
        hp_defaults = {"svm": {"lambda": 1e-3, "epochs": 20}, "ffe_dfe": {"step": 0.1}}[kind]
        hp = _merged(entry.get("hyperparams", {}), hp_defaults)
        _check_keys(entry.get("hyperparams", {}), HYPERPARAM_KEYS[kind], f"{path}.hyperparams")
        if kind == "svm":
            lam = _coerce_float(hp["lambda"], f"{path}.hyperparams.lambda")
            if lam <= 0:
                _fail("lambda must be > 0", f"{path}.hyperparams.lambda")
            epochs = _coerce_int(hp["epochs"], f"{path}.hyperparams.epochs")
            if epochs < 1:
                _fail("epochs must be >= 1", f"{path}.hyperparams.epochs")
            hp = {"lambda": lam, "epochs": epochs}
        else:
            step = _coerce_float(hp["step"], f"{path}.hyperparams.step")
            if step < 0:
                _fail("step must be >= 0", f"{path}.hyperparams.step")
            hp = {"step": step}
        name = entry.get("name", kind)
        if not isinstance(name, str) or not name:
            _fail("name must be a nonempty string", f"{path}.name")
        specs.append(
            EqualizerSpec(kind=kind, config=EqTapConfig(ffe_taps, dfe_taps),
                          hyperparams=hp, name=name)
        )
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        _fail(f"duplicate equalizer names {names}; set a unique 'name' per entry",
              "equalizers")

    exp_raw = _merged(data.get("experiment", {}), DEFAULTS["experiment"])
    _check_keys(data.get("experiment", {}), DEFAULTS["experiment"].keys(), "experiment")
    kind = exp_raw["kind"]
    if kind not in EXPERIMENT_KINDS:
        _fail(f"kind must be one of {EXPERIMENT_KINDS}, got {kind!r}", "experiment.kind")
    grid = exp_raw["grid"]
    if grid is None:
        grid = list(DEFAULT_GRIDS[kind])
    if not isinstance(grid, list):
        _fail("grid must be a list", "experiment.grid")
    if kind == "snr_sweep":
        grid = [_coerce_float(g, "experiment.grid", allow_inf=True) for g in grid]
    elif kind == "train_sweep":
        grid = [_coerce_int(g, "experiment.grid") for g in grid]
        if any(g < 1 for g in grid):
            _fail("training lengths must be >= 1", "experiment.grid")
    n_symbols = _coerce_int(exp_raw["n_symbols"], "experiment.n_symbols")
    if n_symbols < 1:
        _fail("n_symbols must be >= 1", "experiment.n_symbols")
    train_length = _coerce_int(exp_raw["train_length"], "experiment.train_length")
    if not 0 < train_length < n_symbols:
        _fail("train_length must be in (0, n_symbols)", "experiment.train_length")
    seeds = exp_raw["seeds"]
    if not isinstance(seeds, list) or not seeds:
        _fail("seeds must be a nonempty list", "experiment.seeds")
    seeds = [_coerce_int(s, "experiment.seeds") for s in seeds]

    out_raw = _merged(data.get("output", {}), DEFAULTS["output"])
    _check_keys(data.get("output", {}), DEFAULTS["output"].keys(), "output")
    if out_raw["format"] not in ("csv", "json"):
        _fail("format must be 'csv' or 'json'", "output.format")

    resolved = {
        "tx": {"prbs_seed": prbs_seed, "rolloff": rolloff, "sps": sps, "rrc_span": rrc_span},
        "channel": {
            "f3db_norm": f3db, "snr_db": snr_db,
            "nonlinearity": None if sat_level is None else {"sat_level": sat_level},
            "timing_offset": offset,
        },
        "equalizers": [
            {"kind": s.kind, "name": s.name, "ffe_taps": s.config.ffe_taps,
             "dfe_taps": s.config.dfe_taps, "hyperparams": s.hyperparams}
            for s in specs
        ],
        "experiment": {"kind": kind, "grid": grid, "n_symbols": n_symbols,
                       "train_length": train_length, "seeds": seeds},
        "output": {"path": out_raw["path"], "format": out_raw["format"]},
    }
    return ScenarioConfig(
        scenario=Scenario(tx=tx, channel=channel, train_length=train_length),
        equalizers=specs,
        experiment_kind=kind,
        grid=grid,
        n_symbols=n_symbols,
        train_length=train_length,
        seeds=seeds,
        output_path=out_raw["path"],
        output_format=out_raw["format"],
        resolved=resolved,
    )


def load_config(path: str | Path, overrides: list[str] | None = None,
                default_kind: str | None = None) -> ScenarioConfig:
    """Load, override and validate a scenario config file.

    ``overrides`` are dotted ``key=value`` strings applied after the file is
    read; values are parsed as JSON with a plain-string fallback.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ParseError(f"config file not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    return resolve_config(data, overrides=overrides, default_kind=default_kind)


def resolve_config(data: dict, overrides: list[str] | None = None,
                   default_kind: str | None = None) -> ScenarioConfig:
    data = copy.deepcopy(data)
    if default_kind is not None:
        data.setdefault("experiment", {}).setdefault("kind", default_kind)
    for item in overrides or []:
        _apply_override(data, item)
    return config_from_dict(data)


def _parse_override_value(raw: str):
    lowered = raw.lower()
    if lowered in ("inf", "infinity", "+inf"):
        return math.inf
    if lowered == "-inf":
        return -math.inf
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _apply_override(data: dict, item: str) -> None:
    if "=" not in item:
        raise ValidationError(f"override must look like key=value, got {item!r}")
    key, raw = item.split("=", 1)
    parts = key.strip().split(".")
    node = data
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = _parse_override_value(raw.strip())
