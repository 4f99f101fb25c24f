// End-to-end acceptance checks. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fgrnn/dsp.hpp"
#include "fgrnn/eval.hpp"
#include "fgrnn/model_store.hpp"
#include "fgrnn/synth.hpp"
#include "fgrnn/train.hpp"
#include "oracles.hpp"

using namespace fgrnn;

namespace {

int failures = 0;

void report(int idx, bool ok, const std::string& name, const std::string& detail = "") {
    std::printf("[%2d] %s %s%s%s\n", idx, ok ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double power(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc / static_cast<double>(x.size());
}

// Batch-mean cross-entropy, forward pass only. Used by the finite-difference
// check as the scalar objective.
double batch_loss(const FastGrnnParams& cell, const FcParams& fc,
                  const std::vector<const LabeledExample*>& batch) {
    double total = 0.0;
    for (const auto* ex : batch) {
        const auto h = forward_sequence(cell, ex->seq);
        total += cross_entropy(softmax(fc_logits(fc, h)), ex->label);
    }
    return total / static_cast<double>(batch.size());
}

// Clip-level accuracy over a feature file: mean-pool segment softmax
// distributions per clip, argmax against the clip label.
double clip_accuracy(const ModelBundle& model, const FeatureFile& data) {
    std::map<std::string, std::pair<int, std::vector<const MfccSequence*>>> clips;
    for (const auto& rec : data.records) {
        auto& entry = clips[rec.clip];
        entry.first = rec.label;
        entry.second.push_back(&rec.mfcc);
    }
    std::size_t correct = 0;
    for (const auto& [name, entry] : clips) {
        const auto agg = aggregate_clip_probs(model, entry.second);
        const auto am = std::max_element(agg.probs.begin(), agg.probs.end()) - agg.probs.begin();
        if (static_cast<int>(am) == entry.first) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(clips.size());
}

void check_parameter_count() {
    ModelConfig cfg;  // D=13, H=26, C=6, T=26
    report(1, count_parameters(cfg) == 1230, "parameter count is exactly 1230");
}

ModelBundle make_random_bundle(std::uint64_t seed) {
    ModelConfig cfg;
    std::mt19937_64 rng(seed);
    ModelBundle b;
    b.config = cfg;
    b.cell = init_cell(cfg, rng);
    b.fc = init_fc(cfg, rng);
    b.norm.mean.assign(13, 0.0);
    b.norm.std.assign(13, 1.0);
    b.thresholds.tau.assign(6, 1.0 / 6.0);
    b.labels = synth_labels();
    return b;
}

void check_model_size() {
    const auto b = make_random_bundle(2);
    const auto rep = size_report(b);
    const auto bytes = encode_model(b);
    const bool ok = rep.core_bytes == 4920 && rep.total_bytes == bytes.size() &&
                    rep.header_bytes + rep.core_bytes + rep.aux_bytes == bytes.size();
    report(2, ok, "float core payload is exactly 4920 bytes",
           "core=" + std::to_string(rep.core_bytes));
}

void check_feature_contract() {
    Segment seg;
    seg.samples.resize(kSegmentSamples);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    for (double& v : seg.samples) v = d(rng);
    const auto m = mfcc_sequence(seg);
    const bool ok = m.coeffs.rows() == 26 && m.coeffs.cols() == 13;
    report(3, ok, "13230-sample segment yields a 26x13 MFCC matrix (338 values)");
}

void check_dft_oracle() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    bool ok = true;
    for (std::size_t n_fft : {16u, 64u, 256u}) {
        const std::size_t hop = n_fft / 4;
        for (int trial = 0; trial < 100 && ok; ++trial) {
            std::vector<double> x(n_fft * 3 + static_cast<std::size_t>(rng() % n_fft));
            for (double& v : x) v = d(rng);
            const auto fast = stft(x, n_fft, hop);
            const auto ref = oracle::stft_direct(x, n_fft, hop);
            if (fast.frames.size() != ref.size()) {
                ok = false;
                break;
            }
            double max_mag = 0.0;
            for (const auto& frame : ref)
                for (const auto& z : frame) max_mag = std::max(max_mag, std::abs(z));
            for (std::size_t t = 0; t < ref.size() && ok; ++t)
                for (std::size_t k = 0; k < ref[t].size(); ++k)
                    if (std::abs(fast.frames[t][k] - ref[t][k]) > 1e-6 * max_mag) {
                        ok = false;
                        break;
                    }
        }
    }
    report(4, ok, "STFT matches the direct O(N^2) DFT oracle (n_fft 16/64/256, 100 signals)");
}

void check_gradients() {
    ModelConfig cfg;
    cfg.input_dim = 3;
    cfg.hidden_dim = 4;
    cfg.num_classes = 3;
    cfg.seq_len = 5;
    const double h_step = 1e-5;
    bool ok = true;
    double worst = 0.0;

    for (int trial = 0; trial < 20 && ok; ++trial) {
        std::mt19937_64 rng(100 + trial);
        auto cell = init_cell(cfg, rng);
        auto fc = init_fc(cfg, rng);
        std::uniform_real_distribution<double> d(-0.8, 0.8);
        for (double& v : cell.b_z) v = d(rng);
        for (double& v : cell.b_h) v = d(rng);
        cell.zeta_raw = d(rng);
        cell.nu_raw = d(rng);
        for (double& v : fc.W_fc.raw()) v = d(rng);
        for (double& v : fc.b_fc) v = d(rng);

        std::vector<LabeledExample> examples(3);
        std::vector<const LabeledExample*> batch;
        for (auto& ex : examples) {
            ex.seq.coeffs = Matrix(5, 3);
            for (double& v : ex.seq.coeffs.raw()) v = d(rng);
            ex.label = static_cast<int>(rng() % 3);
            batch.push_back(&ex);
        }

        const auto grads = backprop_batch(cell, fc, batch);

        std::vector<std::pair<double*, double>> params;  // pointer, analytic grad
        for (std::size_t i = 0; i < cell.W.size(); ++i)
            params.emplace_back(&cell.W.raw()[i], grads.dW.raw()[i]);
        for (std::size_t i = 0; i < cell.U.size(); ++i)
            params.emplace_back(&cell.U.raw()[i], grads.dU.raw()[i]);
        for (std::size_t i = 0; i < cell.b_z.size(); ++i)
            params.emplace_back(&cell.b_z[i], grads.db_z[i]);
        for (std::size_t i = 0; i < cell.b_h.size(); ++i)
            params.emplace_back(&cell.b_h[i], grads.db_h[i]);
        params.emplace_back(&cell.zeta_raw, grads.dzeta_raw);
        params.emplace_back(&cell.nu_raw, grads.dnu_raw);
        for (std::size_t i = 0; i < fc.W_fc.size(); ++i)
            params.emplace_back(&fc.W_fc.raw()[i], grads.dW_fc.raw()[i]);
        for (std::size_t i = 0; i < fc.b_fc.size(); ++i)
            params.emplace_back(&fc.b_fc[i], grads.db_fc[i]);

        for (auto& [ptr, analytic] : params) {
            const double saved = *ptr;
            *ptr = saved + h_step;
            const double up = batch_loss(cell, fc, batch);
            *ptr = saved - h_step;
            const double down = batch_loss(cell, fc, batch);
            *ptr = saved;
            const double numeric = (up - down) / (2.0 * h_step);
            const double rel = std::fabs(analytic - numeric) /
                               std::max({std::fabs(analytic), std::fabs(numeric), 1e-4});
            worst = std::max(worst, rel);
            if (rel > 1e-4) {
                ok = false;
                break;
            }
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "worst rel err %.2e", worst);
    report(5, ok, "analytic gradients match central finite differences", buf);
}

void check_cell_identities() {
    bool ok = true;
    ModelConfig cfg;
    cfg.input_dim = 3;
    cfg.hidden_dim = 4;
    std::mt19937_64 rng(6);
    auto p = init_cell(cfg, rng);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> x(3), h_prev(4);
    for (double& v : x) v = d(rng);
    for (double& v : h_prev) v = d(rng);

    // open gate: state passes through (nu driven to zero so the candidate
    // leg vanishes)
    for (double& v : p.b_z) v = 50.0;
    p.nu_raw = -50.0;
    for (std::size_t i = 0; i < 4; ++i)
        if (std::fabs(cell_step(p, x, h_prev)[i] - h_prev[i]) > 1e-6) ok = false;

    // closed gate: pure scaled candidate
    p = init_cell(cfg, rng);
    for (double& v : p.b_z) v = -50.0;
    p.zeta_raw = d(rng);
    p.nu_raw = d(rng);
    const double zeta = 1.0 / (1.0 + std::exp(-p.zeta_raw));
    const double nu = 1.0 / (1.0 + std::exp(-p.nu_raw));
    const auto h = cell_step(p, x, h_prev);
    for (std::size_t i = 0; i < 4; ++i) {
        double pre = p.b_h[i];
        for (std::size_t j = 0; j < 3; ++j) pre += p.W(i, j) * x[j];
        for (std::size_t j = 0; j < 4; ++j) pre += p.U(i, j) * h_prev[j];
        if (std::fabs(h[i] - (zeta + nu) * std::tanh(pre)) > 1e-6) ok = false;
    }

    // softmax normalization over 10^4 random logit vectors
    std::uniform_real_distribution<double> wide(-30.0, 30.0);
    for (int trial = 0; trial < 10000 && ok; ++trial) {
        std::vector<double> logits(6);
        for (double& v : logits) v = wide(rng);
        double sum = 0.0;
        for (double v : softmax(logits).probs) sum += v;
        if (std::fabs(sum - 1.0) > 1e-9) ok = false;
    }
    report(6, ok, "gate saturation identities hold and softmax normalizes");
}

void check_calibration_oracle() {
    const auto model = make_random_bundle(8);
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> d(-2.0, 2.0);

    FeatureFile data;
    data.labels = synth_labels();
    const int clip_labels[10] = {0, 1, 2, 3, 4, 5, 0, 2, 4, 5};
    for (int clip = 0; clip < 10; ++clip) {
        for (int seg = 0; seg < 3; ++seg) {
            FeatureRecord rec;
            rec.clip = "clip" + std::to_string(clip);
            rec.segment = seg;
            rec.label = clip_labels[clip];
            rec.mfcc.coeffs = Matrix(26, 13);
            for (double& v : rec.mfcc.coeffs.raw()) v = d(rng);
            data.records.push_back(rec);
        }
    }

    // by-hand averaging: per clip, mean segment softmax; per class, mean
    // aggregate probability over the clips carrying that label
    std::vector<double> tau_hand(6, 0.0);
    std::vector<int> class_clips(6, 0);
    for (int clip = 0; clip < 10; ++clip) {
        std::vector<double> agg(6, 0.0);
        for (int seg = 0; seg < 3; ++seg) {
            const auto& rec = data.records[static_cast<std::size_t>(clip * 3 + seg)];
            const auto normed = apply_norm(model.norm, rec.mfcc);
            const auto probs = softmax(fc_logits(model.fc, forward_sequence(model.cell, normed)));
            for (std::size_t c = 0; c < 6; ++c) agg[c] += probs.probs[c];
        }
        for (double& v : agg) v /= 3.0;
        const int label = clip_labels[clip];
        tau_hand[static_cast<std::size_t>(label)] += agg[static_cast<std::size_t>(label)];
        ++class_clips[static_cast<std::size_t>(label)];
    }
    for (std::size_t c = 0; c < 6; ++c) tau_hand[c] /= static_cast<double>(class_clips[c]);

    const auto tau = calibrate_thresholds(model, data);
    bool ok = tau.tau.size() == 6;
    for (std::size_t c = 0; ok && c < 6; ++c)
        if (std::fabs(tau.tau[c] - tau_hand[c]) > 1e-12) ok = false;
    report(8, ok, "calibrated thresholds equal the by-hand class means");
}

void check_denoising() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise_dist(0.0, 1.0);
    const int rate = 22050;
    const std::size_t n = 2 * rate;
    std::vector<double> clean(n);
    for (std::size_t i = 0; i < n; ++i)
        clean[i] = 0.1 * std::sin(2.0 * std::numbers::pi * 1000.0 * i / rate);
    const double noise_sigma = std::sqrt(power(clean) * 100.0);  // -20 dB SNR

    AudioClip noisy, profile;
    noisy.sample_rate = profile.sample_rate = rate;
    noisy.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) noisy.samples[i] = clean[i] + noise_sigma * noise_dist(rng);
    profile.samples.resize(n);
    for (double& v : profile.samples) v = noise_sigma * noise_dist(rng);

    const auto gated = spectral_gate(noisy, profile);
    std::vector<double> err_before(n), err_after(n);
    for (std::size_t i = 0; i < n; ++i) {
        err_before[i] = noisy.samples[i] - clean[i];
        err_after[i] = gated.samples[i] - clean[i];
    }
    const double gain = 10.0 * std::log10(power(err_before) / power(err_after));

    AudioClip pure;
    pure.sample_rate = rate;
    pure.samples = clean;
    AudioClip faint_profile;
    faint_profile.sample_rate = rate;
    faint_profile.samples.resize(n);
    std::normal_distribution<double> faint(0.0, 1e-6);
    for (double& v : faint_profile.samples) v = faint(rng);
    const auto gated_clean = spectral_gate(pure, faint_profile);
    const double clean_loss =
        std::fabs(10.0 * std::log10(power(clean) / power(gated_clean.samples)));

    char buf[80];
    std::snprintf(buf, sizeof(buf), "gain %.1f dB, clean loss %.3f dB", gain, clean_loss);
    report(9, gain >= 6.0 && clean_loss < 1.0, "spectral gating recovers a tone from noise", buf);
}

void check_training_suite() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto dataset = synth_feature_file(100, 42);
    TrainConfig cfg;  // seed 42, <= 200 epochs
    const auto result = train_model_full(cfg, dataset);
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();

    char buf[96];
    std::snprintf(buf, sizeof(buf), "val acc %.1f%% in %.1f s", 100.0 * result.best_val_accuracy,
                  seconds);
    report(7, result.best_val_accuracy >= 0.95 && seconds < 120.0,
           "synthetic end-to-end training reaches 95% validation accuracy", buf);

    // criterion 10: serialization round trips and quantized parity
    const auto& model = result.bundle;
    const auto bytes1 = encode_model(model);
    const auto bytes2 = encode_model(decode_model(bytes1));
    bool ok10 = bytes1 == bytes2;

    const auto q = quantize_int8(model);
    const auto qbytes1 = encode_model(q);
    const auto qbytes2 = encode_model(decode_quantized(qbytes1));
    ok10 = ok10 && qbytes1 == qbytes2;

    const auto deq = dequantize(q);
    for (std::size_t i = 0; i < model.cell.W.size(); ++i)
        if (std::fabs(deq.cell.W.raw()[i] - model.cell.W.raw()[i]) >
            0.5 * static_cast<double>(q.W.scale) + 1e-9)
            ok10 = false;
    for (std::size_t i = 0; i < model.cell.U.size(); ++i)
        if (std::fabs(deq.cell.U.raw()[i] - model.cell.U.raw()[i]) >
            0.5 * static_cast<double>(q.U.scale) + 1e-9)
            ok10 = false;

    const auto holdout = synth_feature_file(20, 9001);
    const double acc_float = clip_accuracy(model, holdout);
    const double acc_quant = clip_accuracy(deq, holdout);
    ok10 = ok10 && std::fabs(acc_float - acc_quant) <= 0.02;

    char buf10[96];
    std::snprintf(buf10, sizeof(buf10), "holdout acc float %.1f%%, int8 %.1f%%", 100.0 * acc_float,
                  100.0 * acc_quant);
    report(10, ok10, "serialization round trips and int8 keeps accuracy", buf10);

    // criterion 11: bit-identical retraining under the same seed
    const auto rerun = train_model(cfg, dataset);
    report(11, encode_model(rerun) == bytes1, "same-seed training runs are bit-identical");
}

}  // namespace

int main() {
    check_parameter_count();
    check_model_size();
    check_feature_contract();
    check_dft_oracle();
    check_gradients();
    check_cell_identities();
    check_calibration_oracle();
    check_denoising();
    check_training_suite();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
