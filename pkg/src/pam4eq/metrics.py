"""Error counting and the sweep experiment drivers: SNR waterfalls,
training-length studies, FEC-threshold bookkeeping and CSV output.

Every equalizer inside one sweep point is evaluated against byte-identical
received streams (one link realization per seed), so comparisons between
equalizers are paired.
"""

from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import ChannelConfig, ReceivedSymbols, TxConfig, run_link
from .equalizers import (
    EqTapConfig,
    build_train_features,
    lms_equalize,
    lms_train,
    slicer_equalize,
    svm_equalize,
    svm_train,
)
from .errors import AlignmentError, LowConfidenceWarning, TooShort
from .txgen import GRAY_BITS, SymbolFrame, frame_from_levels, map_pam4, prbs15_generate

# Pre-decoder BER levels used as bookkeeping constants when reading curves.
FEC_THRESHOLDS: dict[str, float] = {
    "relaxed": 1e-2,
    "target": 1e-3,
    "floor": 3e-4,
}

MIN_CONFIDENT_ERRORS = 10


@dataclass(slots=True)
class BerResult:
    """Error counts over an evaluation window, with derived rates."""

    bit_errors: int
    symbol_errors: int
    bits_total: int
    symbols_total: int
    ber: float
    ser: float
    skip_prefix: int

    @classmethod
    def from_counts(
        cls, bit_errors: int, symbol_errors: int, bits_total: int,
        symbols_total: int, skip_prefix: int = 0,
    ) -> "BerResult":
        return cls(
            bit_errors=int(bit_errors),
            symbol_errors=int(symbol_errors),
            bits_total=int(bits_total),
            symbols_total=int(symbols_total),
            ber=bit_errors / bits_total if bits_total else 0.0,
            ser=symbol_errors / symbols_total if symbols_total else 0.0,
            skip_prefix=int(skip_prefix),
        )

    @property
    def low_confidence(self) -> bool:
        return self.bit_errors < MIN_CONFIDENT_ERRORS


def merge_results(results: list[BerResult]) -> BerResult:
    """Pool error counts across seeds into one estimate."""
    return BerResult.from_counts(
        sum(r.bit_errors for r in results),
        sum(r.symbol_errors for r in results),
        sum(r.bits_total for r in results),
        sum(r.symbols_total for r in results),
        skip_prefix=results[0].skip_prefix if results else 0,
    )


@dataclass(slots=True)
class SweepPoint:
    """One grid point: per-equalizer, per-seed results plus stream hashes."""

    x_kind: str
    x_value: float
    seeds: list[int]
    results: dict[str, dict[int, BerResult]]
    stream_hashes: dict[int, str] = field(default_factory=dict)

    def pooled(self, equalizer: str) -> BerResult:
        return merge_results([self.results[equalizer][s] for s in self.seeds])


@dataclass(slots=True)
class EqualizerSpec:
    """An equalizer entry in a sweep: kind 'svm', 'ffe_dfe' or 'slicer'."""

    kind: str
    config: EqTapConfig
    hyperparams: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if not self.name:
            self.name = self.kind


@dataclass(slots=True)
class Scenario:
    """Fixed link parameters shared by every point of a sweep."""

    tx: TxConfig = field(default_factory=TxConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    train_length: int = 5000


def count_errors(decided: SymbolFrame, truth: SymbolFrame, skip_prefix: int = 0) -> BerResult:
    """Compare level indices for SER and Gray-demapped bits for BER,
    excluding ``skip_prefix`` leading symbols of warm-up."""
    if len(decided.level_index) != len(truth.level_index):
        raise AlignmentError(
            f"length mismatch: decided {len(decided.level_index)} vs truth {len(truth.level_index)}"
        )
    if skip_prefix >= len(truth.level_index):
        raise AlignmentError(
            f"skip_prefix {skip_prefix} >= length {len(truth.level_index)}"
        )
    d = decided.level_index[skip_prefix:]
    t = truth.level_index[skip_prefix:]
    symbol_errors = int(np.sum(d != t))
    bit_errors = int(np.sum(GRAY_BITS[d] != GRAY_BITS[t]))
    return BerResult.from_counts(
        bit_errors, symbol_errors, 2 * len(t), len(t), skip_prefix
    )


def transient_symbols(tx: TxConfig) -> int:
    """Leading symbols polluted by filter ramp-up (two RRC stages plus the
    channel filter, in symbol units)."""
    from .channel import LOWPASS_SPAN_SYMBOLS

    return tx.rrc_span + LOWPASS_SPAN_SYMBOLS // 2


def make_frame(tx: TxConfig, n_symbols: int) -> SymbolFrame:
    return map_pam4(prbs15_generate(tx.prbs_seed, 2 * n_symbols))


def _train_one(spec: EqualizerSpec, rx_values: np.ndarray, truth: SymbolFrame,
               train_length: int, seed: int):
    if spec.kind == "slicer":
        return None
    head = frame_from_levels(truth.level_index[:train_length])
    if spec.kind == "ffe_dfe":
        return lms_train(
            rx_values[:train_length], head, spec.config,
            step=spec.hyperparams.get("step", 0.1),
            train_length=train_length,
        )
    if spec.kind == "svm":
        X, labels = build_train_features(rx_values[:train_length], head, spec.config)
        return svm_train(
            X, labels, spec.config,
            lam=spec.hyperparams.get("lambda", 1e-3),
            epochs=spec.hyperparams.get("epochs", 20),
            seed=seed,
        )
    raise ValueError(f"unknown equalizer kind {spec.kind!r}")


def _decide(spec: EqualizerSpec, model, rx_values: np.ndarray) -> SymbolFrame:
    if spec.kind == "slicer":
        return slicer_equalize(rx_values)
    if spec.kind == "ffe_dfe":
        return lms_equalize(rx_values, model)
    return svm_equalize(rx_values, model)


def evaluate_unit(
    scenario: Scenario,
    specs: list[EqualizerSpec],
    n_symbols: int,
    x_kind: str,
    x_value: float,
    seed: int,
) -> tuple[str, dict[str, BerResult]]:
    """Run one (grid point, seed) work unit: one link realization, every
    equalizer trained and evaluated on it. Returns the stream hash and a
    per-equalizer result map."""
    chan = replace(scenario.channel, rng_seed=seed)
    train_length = scenario.train_length
    if x_kind == "snr_db":
        chan = replace(chan, snr_db=float(x_value))
    elif x_kind == "train_length":
        train_length = int(x_value)
    frame = make_frame(scenario.tx, n_symbols)
    rx = run_link(frame, scenario.tx, chan)
    warm = max((max(s.config.half_window, s.config.dfe_taps) for s in specs), default=0)
    skip = max(train_length, transient_symbols(scenario.tx)) + warm
    if skip >= n_symbols:
        raise TooShort(
            f"train_length {train_length} leaves no evaluation tail of {n_symbols} symbols"
        )
    results = {}
    for spec in specs:
        model = _train_one(spec, rx.values, frame, train_length, seed)
        decided = _decide(spec, model, rx.values)
        results[spec.name] = count_errors(decided, frame, skip_prefix=skip)
    return rx.digest(), results


def _unit_task(args):
    scenario, specs, n_symbols, x_kind, x_value, seed = args
    return x_value, seed, evaluate_unit(scenario, specs, n_symbols, x_kind, x_value, seed)


def _run_units(scenario, specs, n_symbols, x_kind, grid, seeds, jobs):
    tasks = [
        (scenario, specs, n_symbols, x_kind, x, seed) for x in grid for seed in seeds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_unit_task, tasks))
    else:
        raw = [_unit_task(t) for t in tasks]
    by_key = {(x, seed): payload for x, seed, payload in raw}
    points = []
    for x in grid:
        results: dict[str, dict[int, BerResult]] = {s.name: {} for s in specs}
        hashes = {}
        for seed in seeds:
            digest, per_eq = by_key[(x, seed)]
            hashes[seed] = digest
            for name, res in per_eq.items():
                results[name][seed] = res
        point = SweepPoint(
            x_kind=x_kind, x_value=float(x), seeds=list(seeds),
            results=results, stream_hashes=hashes,
        )
        for spec in specs:
            pooled = point.pooled(spec.name)
            if pooled.low_confidence:
                warnings.warn(
                    f"{x_kind}={x}, {spec.name}: only {pooled.bit_errors} bit errors counted",
                    LowConfidenceWarning,
                    stacklevel=3,
                )
        points.append(point)
    return points


def sweep_snr(
    scenario: Scenario,
    snr_grid: list[float],
    specs: list[EqualizerSpec],
    n_symbols: int,
    seeds: list[int],
    jobs: int = 1,
) -> list[SweepPoint]:
    """BER at each SNR grid point, paired across equalizers per seed."""
    if not snr_grid:
        raise ValueError("snr grid must be nonempty")
    if n_symbols * 2 * min(FEC_THRESHOLDS.values()) < MIN_CONFIDENT_ERRORS:
        warnings.warn(
            f"{n_symbols} symbols cannot resolve BER {min(FEC_THRESHOLDS.values())} "
            f"with {MIN_CONFIDENT_ERRORS} errors",
            LowConfidenceWarning,
            stacklevel=2,
        )
    return _run_units(scenario, specs, n_symbols, "snr_db", list(snr_grid), seeds, jobs)


def sweep_training_length(
    scenario: Scenario,
    length_grid: list[int],
    specs: list[EqualizerSpec],
    seeds: list[int],
    n_symbols: int,
    jobs: int = 1,
) -> list[SweepPoint]:
    """BER versus training length; all lengths share the held-out tail that
    follows the largest grid entry."""
    if not length_grid:
        raise ValueError("length grid must be nonempty")
    grid = list(length_grid)
    if sorted(grid) != grid:
        raise ValueError("length grid must be sorted ascending")
    warm = max((max(s.config.half_window, s.config.dfe_taps) for s in specs), default=0)
    if grid[0] <= 2 * warm:
        raise TooShort(f"training length {grid[0]} too small for the tap windows")
    if grid[-1] + warm >= n_symbols:
        raise TooShort(f"training grid up to {grid[-1]} exceeds {n_symbols} symbols")
    scenario = replace(scenario, train_length=grid[-1])
    points = _run_units(scenario, specs, n_symbols, "train_length", grid, seeds, jobs)
    return points


def threshold_crossing(
    curve: list[SweepPoint], threshold: float, equalizer: str
) -> float | None:
    """First x where the pooled BER falls to or below ``threshold``,
    log-linearly interpolated; None when the curve never crosses."""
    pts = sorted(curve, key=lambda p: p.x_value)
    prev_x = prev_ber = None
    for p in pts:
        ber = p.pooled(equalizer).ber
        if ber <= threshold:
            if prev_x is None or ber == 0.0:
                return p.x_value
            t = (np.log10(threshold) - np.log10(prev_ber)) / (
                np.log10(ber) - np.log10(prev_ber)
            )
            return float(prev_x + t * (p.x_value - prev_x))
        prev_x, prev_ber = p.x_value, ber
    return None


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def sweep_rows(points: list[SweepPoint]) -> list[dict]:
    """Flatten sweep points into stable-ordered row dicts (x, seed, name)."""
    rows = []
    for p in sorted(points, key=lambda p: p.x_value):
        for seed in p.seeds:
            for name in sorted(p.results):
                r = p.results[name][seed]
                rows.append(
                    {
                        "x_kind": p.x_kind,
                        "x_value": p.x_value,
                        "seed": seed,
                        "equalizer": name,
                        "symbols": r.symbols_total,
                        "bit_errors": r.bit_errors,
                        "ber": r.ber,
                        "ser": r.ser,
                        "low_confidence": str(r.low_confidence).lower(),
                    }
                )
    return rows


CSV_HEADER = [
    "x_kind", "x_value", "seed", "equalizer",
    "symbols", "bit_errors", "ber", "ser", "low_confidence",
]


def sweep_csv(points: list[SweepPoint]) -> str:
    """Render the sweep as CSV text, byte-stable for identical inputs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in sweep_rows(points):
        writer.writerow([_format(row[k]) for k in CSV_HEADER])
    return buf.getvalue()


def write_sweep_csv(points: list[SweepPoint], path: str | Path) -> None:
    Path(path).write_text(sweep_csv(points))
