"""Desk-scale simulator and equalizer bench for severely bandwidth-limited
PAM4 links: PRBS15/RRC transmit chain, low-pass ISI channel with an SNR
proxy for received power, and two receivers (ordinal linear-SVM with
decision feedback, LMS-adapted FFE+DFE) compared under paired sweeps."""

__version__ = "0.1.0"

from .channel import (
    ChannelConfig,
    ReceivedSymbols,
    TxConfig,
    add_awgn,
    apply_isi,
    downsample,
    lowpass_taps,
    run_link,
    soa_nonlinearity,
)
from .equalizers import (
    ENHANCED,
    LIGHTWEIGHT,
    EqTapConfig,
    Hyperplane,
    LmsModel,
    SvmModel,
    build_train_features,
    lms_equalize,
    lms_train,
    load_model,
    save_model,
    slicer_equalize,
    svm_classify,
    svm_equalize,
    svm_train,
)
from .metrics import (
    FEC_THRESHOLDS,
    BerResult,
    EqualizerSpec,
    Scenario,
    SweepPoint,
    count_errors,
    sweep_snr,
    sweep_training_length,
    threshold_crossing,
    write_sweep_csv,
)
from .txgen import (
    PAM4_LEVELS,
    BitSequence,
    SymbolFrame,
    Waveform,
    demap_pam4,
    frame_from_levels,
    map_pam4,
    prbs15_generate,
    rrc_taps,
    shape,
    upsample,
)

__all__ = [
    "__version__",
    "BitSequence", "SymbolFrame", "Waveform", "PAM4_LEVELS",
    "prbs15_generate", "map_pam4", "demap_pam4", "rrc_taps", "upsample", "shape",
    "TxConfig", "ChannelConfig", "ReceivedSymbols",
    "lowpass_taps", "apply_isi", "add_awgn", "soa_nonlinearity", "downsample", "run_link",
    "EqTapConfig", "LIGHTWEIGHT", "ENHANCED", "Hyperplane", "SvmModel", "LmsModel",
    "build_train_features", "svm_train", "svm_classify", "svm_equalize",
    "lms_train", "lms_equalize", "slicer_equalize", "save_model", "load_model",
    "BerResult", "SweepPoint", "EqualizerSpec", "Scenario", "FEC_THRESHOLDS",
    "count_errors", "sweep_snr", "sweep_training_length", "threshold_crossing",
    "write_sweep_csv",
]
