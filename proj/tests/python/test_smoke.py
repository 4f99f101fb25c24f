import math

import numpy as np
import pytest

import fastgrnn_acoustic as fg


def test_parameter_count():
    assert fg.count_parameters() == 1230
    assert fg.count_parameters(input_dim=1, hidden_dim=1, num_classes=1) == 8


def test_softmax():
    probs = fg.softmax([0.0] * 6)
    assert len(probs) == 6
    assert all(abs(p - 1 / 6) < 1e-12 for p in probs)


def test_mfcc_shape():
    rng = np.random.default_rng(0)
    coeffs = fg.mfcc(rng.uniform(-0.5, 0.5, 13230))
    assert coeffs.shape == (26, 13)


def test_segment_clip():
    clip = fg.AudioClip(np.zeros(3 * 22050), 22050)
    segments = fg.segment_clip(clip)
    assert len(segments) == 5
    assert all(len(s) == 13230 for s in segments)


def test_short_clip_rejected():
    with pytest.raises(fg.PreconditionError):
        fg.segment_clip(fg.AudioClip(np.zeros(1000), 22050))


def test_wav_round_trip(tmp_path):
    path = str(tmp_path / "tone.wav")
    t = np.arange(22050) / 22050.0
    clip = fg.AudioClip(0.5 * np.sin(2 * math.pi * 440 * t), 22050)
    fg.save_wav(path, clip)
    back = fg.load_wav(path)
    assert back.sample_rate == 22050
    assert len(back) == 22050
    assert np.max(np.abs(back.samples - clip.samples)) < 1.0 / 32768 + 1e-9


def test_end_to_end(tmp_path):
    features = str(tmp_path / "features.json")
    model = str(tmp_path / "model.fgrn")
    calibrated = str(tmp_path / "model_cal.fgrn")
    quantized = str(tmp_path / "model_q.fgrn")

    fg.synth_features(features, clips_per_class=4, seed=7)
    stats = fg.train(features, model, epochs=30, seed=42)
    assert stats["epochs_run"] <= 30
    assert 0.0 <= stats["best_val_accuracy"] <= 1.0

    tau = fg.calibrate(model, features, calibrated)
    assert len(tau) == 6

    pred = fg.infer(calibrated, fg.synth_clip(2, seed=5))
    assert len(pred["aggregate"]) == 6
    assert abs(sum(pred["aggregate"]) - 1.0) < 1e-9
    assert 0 <= pred["predicted_class"] < 6
    assert len(pred["per_segment"]) == 5

    rep = fg.size_report(calibrated)
    assert rep["core_bytes"] == 4920
    assert rep["parameter_count"] == 1230
    assert rep["total_bytes"] == rep["file_bytes"]

    fg.quantize(calibrated, quantized)
    qrep = fg.size_report(quantized)
    assert qrep["core_bytes"] == 1262


def test_spectral_gate_preserves_length():
    rng = np.random.default_rng(1)
    clip = fg.AudioClip(rng.normal(0, 0.1, 22050), 22050)
    gated = fg.spectral_gate(clip)
    assert len(gated) == len(clip)
