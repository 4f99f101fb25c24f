"""FastGRNN acoustic classification: MFCC front-end, tiny gated recurrent
classifier, threshold-based multi-tone detection, spectral-gating denoising."""

from fastgrnn_acoustic._core import (
    AudioClip,
    InputFormatError,
    PreconditionError,
    calibrate,
    count_parameters,
    infer,
    load_wav,
    mfcc,
    quantize,
    resample_linear,
    save_wav,
    segment_clip,
    size_report,
    softmax,
    spectral_gate,
    synth_clip,
    synth_features,
    synth_labels,
    train,
)

__all__ = [
    "AudioClip",
    "InputFormatError",
    "PreconditionError",
    "calibrate",
    "count_parameters",
    "infer",
    "load_wav",
    "mfcc",
    "quantize",
    "resample_linear",
    "save_wav",
    "segment_clip",
    "size_report",
    "softmax",
    "spectral_gate",
    "synth_clip",
    "synth_features",
    "synth_labels",
    "train",
]
