"""Transmit-side signal generation: PRBS15 bits, Gray-mapped PAM4 symbols,
impulse-train upsampling and root-raised-cosine pulse shaping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFilter, InvalidRolloff, InvalidSeed, OddBitCount

# Amplitude alphabet, indexed by level. Gray coding: adjacent levels differ
# in exactly one bit, so the dominant adjacent-level errors cost one bit each.
PAM4_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])
GRAY_BITS = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)

PRBS15_PERIOD = 32767


@dataclass(slots=True)
class BitSequence:
    """Ordered binary values plus a tag recording where they came from."""

    bits: np.ndarray
    origin: str = "external"

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(slots=True)
class SymbolFrame:
    """PAM4 symbol sequence with its class labels and originating bits."""

    symbols: np.ndarray
    source_bits: BitSequence
    level_index: np.ndarray

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(slots=True)
class Waveform:
    """Uniformly sampled real signal.

    ``delay`` records the accumulated filter group delay in samples so
    downstream symbol sampling can align exactly; every filtering stage
    extends the sample array by twice its group delay.
    """

    samples: np.ndarray
    sps: int
    symbol_count: int
    delay: int = 0


def prbs15_generate(seed: int, length: int) -> BitSequence:
    """Generate ``length`` bits of the maximal-length PRBS15 sequence.

    Fibonacci LFSR with feedback taps at stages 15 and 14; any nonzero
    15-bit seed yields the same sequence up to a cyclic shift, with period
    exactly 2^15 - 1.
    """
    seed = int(seed)
    if seed == 0 or seed != seed & 0x7FFF:
        raise InvalidSeed(f"seed must be a nonzero 15-bit integer, got {seed}")
    if length < 1:
        raise InvalidSeed(f"length must be >= 1, got {length}")
    head = min(length, PRBS15_PERIOD)
    bits = np.empty(head, dtype=np.uint8)
    state = seed
    for k in range(head):
        bits[k] = state & 1
        fb = (state ^ (state >> 1)) & 1
        state = (state >> 1) | (fb << 14)
    if length > head:
        bits = np.resize(bits, length)  # sequence repeats with the LFSR period
    return BitSequence(bits=bits, origin="prbs15")


def map_pam4(bits: BitSequence) -> SymbolFrame:
    """Map consecutive bit pairs to PAM4 levels via the Gray table."""
    raw = np.asarray(bits.bits, dtype=np.uint8)
    if len(raw) % 2:
        raise OddBitCount(f"bit count must be even, got {len(raw)}")
    pairs = raw.reshape(-1, 2)
    # Gray pair (b0, b1) -> level: 00->0, 01->1, 11->2, 10->3
    level = (pairs[:, 0] << 1 | (pairs[:, 0] ^ pairs[:, 1])).astype(np.int64)
    return SymbolFrame(
        symbols=PAM4_LEVELS[level],
        source_bits=bits,
        level_index=level,
    )


def demap_pam4(frame: SymbolFrame) -> BitSequence:
    """Invert :func:`map_pam4`, recovering the bit pairs from level indices."""
    return BitSequence(bits=GRAY_BITS[frame.level_index].reshape(-1), origin="external")


def frame_from_levels(level_index: np.ndarray) -> SymbolFrame:
    """Build a SymbolFrame (with demapped bits) from level indices alone."""
    level_index = np.asarray(level_index, dtype=np.int64)
    frame = SymbolFrame(
        symbols=PAM4_LEVELS[level_index],
        source_bits=BitSequence(bits=np.empty(0, dtype=np.uint8)),
        level_index=level_index,
    )
    frame.source_bits = demap_pam4(frame)
    return frame


def rrc_taps(rolloff: float, span_symbols: int, sps: int) -> np.ndarray:
    """Root-raised-cosine taps: ``span_symbols * sps + 1`` of them, symmetric,
    normalized to unit energy.

    Unit energy makes a matched RRC pair a unity-gain Nyquist cascade at
    symbol instants, and makes the matched filter noise-variance preserving.
    """
    if not 0.0 < rolloff <= 1.0:
        raise InvalidRolloff(f"rolloff must be in (0, 1], got {rolloff}")
    if span_symbols < 2 or span_symbols % 2:
        raise InvalidRolloff(f"span_symbols must be a positive even integer, got {span_symbols}")
    n = span_symbols * sps + 1
    t = (np.arange(n) - (n - 1) / 2) / sps
    h = np.empty(n)
    at_zero = np.isclose(t, 0.0)
    h[at_zero] = 1.0 - rolloff + 4.0 * rolloff / np.pi
    at_pole = np.isclose(np.abs(t), 1.0 / (4.0 * rolloff))
    h[at_pole] = (rolloff / np.sqrt(2.0)) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * rolloff))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * rolloff))
    )
    rest = ~(at_zero | at_pole)
    tr = t[rest]
    num = np.sin(np.pi * tr * (1.0 - rolloff)) + 4.0 * rolloff * tr * np.cos(
        np.pi * tr * (1.0 + rolloff)
    )
    den = np.pi * tr * (1.0 - (4.0 * rolloff * tr) ** 2)
    h[rest] = num / den
    return h / np.sqrt(np.sum(h**2))


def upsample(frame: SymbolFrame, sps: int) -> Waveform:
    """Zero-insertion impulse train: sample ``k*sps`` carries symbol k."""
    if sps < 1:
        raise ValueError(f"sps must be >= 1, got {sps}")
    n = len(frame.symbols)
    samples = np.zeros(n * sps)
    samples[::sps] = frame.symbols
    return Waveform(samples=samples, sps=sps, symbol_count=n, delay=0)


def shape(wave: Waveform, taps: np.ndarray) -> Waveform:
    """Linearly convolve a waveform with filter taps, tracking group delay."""
    taps = np.asarray(taps, dtype=float)
    if taps.size == 0:
        raise EmptyFilter("filter taps must be nonempty")
    return Waveform(
        samples=np.convolve(wave.samples, taps),
        sps=wave.sps,
        symbol_count=wave.symbol_count,
        delay=wave.delay + (len(taps) - 1) // 2,
    )
