#include "fgrnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace fgrnn {

namespace {

constexpr double kStdFloor = 1e-8;

struct StepTrace {
    std::vector<double> pre;  // W x + U h_prev (shared)
    std::vector<double> z;
    std::vector<double> c;
    std::vector<double> h;
};

// Pointers to every parameter scalar in the fixed serialization order.
std::vector<double*> flatten(FastGrnnParams& cell, FcParams& fc) {
    std::vector<double*> out;
    out.reserve(cell.W.size() + cell.U.size() + cell.b_z.size() + cell.b_h.size() + 2 +
                fc.W_fc.size() + fc.b_fc.size());
    for (double& v : cell.W.raw()) out.push_back(&v);
    for (double& v : cell.U.raw()) out.push_back(&v);
    for (double& v : cell.b_z) out.push_back(&v);
    for (double& v : cell.b_h) out.push_back(&v);
    out.push_back(&cell.zeta_raw);
    out.push_back(&cell.nu_raw);
    for (double& v : fc.W_fc.raw()) out.push_back(&v);
    for (double& v : fc.b_fc) out.push_back(&v);
    return out;
}

std::vector<const double*> flatten_grads(const Gradients& g) {
    std::vector<const double*> out;
    for (const double& v : g.dW.raw()) out.push_back(&v);
    for (const double& v : g.dU.raw()) out.push_back(&v);
    for (const double& v : g.db_z) out.push_back(&v);
    for (const double& v : g.db_h) out.push_back(&v);
    out.push_back(&g.dzeta_raw);
    out.push_back(&g.dnu_raw);
    for (const double& v : g.dW_fc.raw()) out.push_back(&v);
    for (const double& v : g.db_fc) out.push_back(&v);
    return out;
}

void scale_grads(Gradients& g, double s) {
    for (double& v : g.dW.raw()) v *= s;
    for (double& v : g.dU.raw()) v *= s;
    for (double& v : g.db_z) v *= s;
    for (double& v : g.db_h) v *= s;
    g.dzeta_raw *= s;
    g.dnu_raw *= s;
    for (double& v : g.dW_fc.raw()) v *= s;
    for (double& v : g.db_fc) v *= s;
}

}  // namespace

NormStats fit_norm_stats(const std::vector<MfccSequence>& features) {
    if (features.empty()) throw EmptyDataset("fit_norm_stats: no features");
    const std::size_t D = features[0].coeffs.cols();
    NormStats stats;
    stats.mean.assign(D, 0.0);
    stats.std.assign(D, 0.0);
    std::size_t n = 0;
    for (const auto& seq : features) {
        if (seq.coeffs.cols() != D) throw DimensionMismatch("fit_norm_stats: ragged widths");
        for (std::size_t t = 0; t < seq.coeffs.rows(); ++t)
            for (std::size_t c = 0; c < D; ++c) stats.mean[c] += seq.coeffs(t, c);
        n += seq.coeffs.rows();
    }
    for (double& m : stats.mean) m /= static_cast<double>(n);
    for (const auto& seq : features)
        for (std::size_t t = 0; t < seq.coeffs.rows(); ++t)
            for (std::size_t c = 0; c < D; ++c) {
                const double d = seq.coeffs(t, c) - stats.mean[c];
                stats.std[c] += d * d;
            }
    for (double& s : stats.std) s = std::max(std::sqrt(s / static_cast<double>(n)), kStdFloor);
    return stats;
}

MfccSequence apply_norm(const NormStats& stats, const MfccSequence& seq) {
    if (seq.coeffs.cols() != stats.mean.size())
        throw DimensionMismatch("apply_norm: width != stats size");
    MfccSequence out;
    out.coeffs = Matrix(seq.coeffs.rows(), seq.coeffs.cols());
    for (std::size_t t = 0; t < seq.coeffs.rows(); ++t)
        for (std::size_t c = 0; c < seq.coeffs.cols(); ++c)
            out.coeffs(t, c) = (seq.coeffs(t, c) - stats.mean[c]) / stats.std[c];
    return out;
}

double cross_entropy(const ClassProbs& probs, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= probs.probs.size())
        throw BadLabel("cross_entropy: label out of range");
    return -std::log(std::max(probs.probs[static_cast<std::size_t>(label)], 1e-12));
}

Gradients backprop_batch(const FastGrnnParams& cell, const FcParams& fc,
                         const std::vector<const LabeledExample*>& batch, double* loss_out) {
    if (batch.empty()) throw EmptyDataset("backprop_batch: empty batch");
    const std::size_t H = cell.W.rows();
    const std::size_t D = cell.W.cols();
    const std::size_t C = fc.W_fc.rows();

    Gradients g;
    g.dW = Matrix(H, D);
    g.dU = Matrix(H, H);
    g.db_z.assign(H, 0.0);
    g.db_h.assign(H, 0.0);
    g.dW_fc = Matrix(C, H);
    g.db_fc.assign(C, 0.0);

    const double zeta = cell.zeta();
    const double nu = cell.nu();
    double total_loss = 0.0;

    std::vector<StepTrace> trace;
    const std::vector<double> h_zero(H, 0.0);

    for (const LabeledExample* ex : batch) {
        if (ex->seq.coeffs.cols() != D) throw DimensionMismatch("backprop_batch: input width");
        const std::size_t T = ex->seq.coeffs.rows();
        trace.assign(T, {});

        // forward, keeping per-step intermediates
        std::vector<double> h(H, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            auto& st = trace[t];
            st.pre.assign(H, 0.0);
            st.z.resize(H);
            st.c.resize(H);
            st.h.resize(H);
            for (std::size_t i = 0; i < H; ++i) {
                double pre = 0.0;
                for (std::size_t j = 0; j < D; ++j) pre += cell.W(i, j) * ex->seq.coeffs(t, j);
                for (std::size_t j = 0; j < H; ++j) pre += cell.U(i, j) * h[j];
                st.pre[i] = pre;
                st.z[i] = sigmoid(pre + cell.b_z[i]);
                st.c[i] = std::tanh(pre + cell.b_h[i]);
                st.h[i] = (zeta * (1.0 - st.z[i]) + nu) * st.c[i] + st.z[i] * h[i];
            }
            h = st.h;
        }

        const auto logits = fc_logits(fc, h);
        const auto probs = softmax(logits);
        total_loss += cross_entropy(probs, ex->label);

        // dL/dP = softmax(P) - onehot(label)
        std::vector<double> dP = probs.probs;
        dP[static_cast<std::size_t>(ex->label)] -= 1.0;

        add_outer(g.dW_fc, dP, h);
        for (std::size_t i = 0; i < C; ++i) g.db_fc[i] += dP[i];
        std::vector<double> dh = matvec_t(fc.W_fc, dP);

        double dzeta = 0.0, dnu = 0.0;
        for (std::size_t t = T; t-- > 0;) {
            const auto& st = trace[t];
            const std::vector<double>& h_prev = t > 0 ? trace[t - 1].h : h_zero;
            std::vector<double> da(H), dh_prev(H, 0.0);
            for (std::size_t i = 0; i < H; ++i) {
                const double dc = dh[i] * (zeta * (1.0 - st.z[i]) + nu);
                const double dz = dh[i] * (h_prev[i] - zeta * st.c[i]);
                dzeta += dh[i] * (1.0 - st.z[i]) * st.c[i];
                dnu += dh[i] * st.c[i];
                const double dz_pre = dz * st.z[i] * (1.0 - st.z[i]);
                const double dc_pre = dc * (1.0 - st.c[i] * st.c[i]);
                g.db_z[i] += dz_pre;
                g.db_h[i] += dc_pre;
                da[i] = dz_pre + dc_pre;
                dh_prev[i] += dh[i] * st.z[i];
            }
            for (std::size_t i = 0; i < H; ++i) {
                for (std::size_t j = 0; j < D; ++j) g.dW(i, j) += da[i] * ex->seq.coeffs(t, j);
                for (std::size_t j = 0; j < H; ++j) {
                    g.dU(i, j) += da[i] * h_prev[j];
                    dh_prev[j] += cell.U(i, j) * da[i];
                }
            }
            dh = std::move(dh_prev);
        }
        g.dzeta_raw += dzeta * zeta * (1.0 - zeta);
        g.dnu_raw += dnu * nu * (1.0 - nu);
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    scale_grads(g, inv);
    if (loss_out) *loss_out = total_loss * inv;
    return g;
}

void adam_step(FastGrnnParams& cell, FcParams& fc, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg) {
    auto params = flatten(cell, fc);
    auto gptrs = flatten_grads(grads);
    if (params.size() != gptrs.size())
        throw DimensionMismatch("adam_step: gradient/parameter count mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size())
        throw DimensionMismatch("adam_step: stale optimizer state");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double gi = *gptrs[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * gi;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * gi * gi;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        *params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
    }
}

namespace {

void clip_gradients(Gradients& g, double max_norm) {
    double sq = 0.0;
    for (const double* p : flatten_grads(g)) sq += *p * *p;
    const double norm = std::sqrt(sq);
    if (norm > max_norm) scale_grads(g, max_norm / norm);
}

double eval_split(const FastGrnnParams& cell, const FcParams& fc,
                  const std::vector<const LabeledExample*>& split, double* accuracy) {
    double loss = 0.0;
    std::size_t correct = 0;
    for (const LabeledExample* ex : split) {
        const auto h = forward_sequence(cell, ex->seq);
        const auto probs = softmax(fc_logits(fc, h));
        loss += cross_entropy(probs, ex->label);
        const auto it = std::max_element(probs.probs.begin(), probs.probs.end());
        if (static_cast<int>(it - probs.probs.begin()) == ex->label) ++correct;
    }
    if (accuracy) *accuracy = static_cast<double>(correct) / static_cast<double>(split.size());
    return loss / static_cast<double>(split.size());
}

}  // namespace

TrainResult train_model_full(const TrainConfig& cfg, const FeatureFile& dataset) {
    if (dataset.records.empty()) throw EmptyDataset("train_model: no records");
    {
        std::set<int> classes;
        for (const auto& r : dataset.records) classes.insert(r.label);
        if (classes.size() < 2) throw SingleClass("train_model: need at least 2 classes");
    }

    const std::size_t D = dataset.records[0].mfcc.coeffs.cols();
    ModelConfig mc;
    mc.input_dim = D;
    mc.num_classes = dataset.labels.size();
    mc.seq_len = dataset.records[0].mfcc.coeffs.rows();

    std::mt19937_64 rng(cfg.rng_seed);

    // seeded Fisher-Yates; std::shuffle is implementation-defined
    std::vector<std::size_t> order(dataset.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[rng() % (i + 1)]);

    const auto n_train =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     cfg.train_fraction * static_cast<double>(order.size())));

    std::vector<MfccSequence> train_raw;
    train_raw.reserve(n_train);
    for (std::size_t i = 0; i < n_train; ++i)
        train_raw.push_back(dataset.records[order[i]].mfcc);
    const NormStats norm = fit_norm_stats(train_raw);

    std::vector<LabeledExample> train_set, val_set;
    for (std::size_t i = 0; i < order.size(); ++i) {
        LabeledExample ex;
        ex.seq = apply_norm(norm, dataset.records[order[i]].mfcc);
        ex.label = dataset.records[order[i]].label;
        (i < n_train ? train_set : val_set).push_back(std::move(ex));
    }
    if (val_set.empty()) val_set = train_set;  // degenerate split; validate on train

    FastGrnnParams cell = init_cell(mc, rng);
    FcParams fc = init_fc(mc, rng);
    AdamState adam;

    TrainResult result;
    FastGrnnParams best_cell = cell;
    FcParams best_fc = fc;
    double best_val = std::numeric_limits<double>::infinity();
    double best_acc = 0.0;
    std::size_t since_improve = 0;

    std::vector<std::size_t> epoch_order(train_set.size());
    for (std::size_t i = 0; i < epoch_order.size(); ++i) epoch_order[i] = i;

    std::vector<const LabeledExample*> val_ptrs;
    for (const auto& ex : val_set) val_ptrs.push_back(&ex);

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (std::size_t i = epoch_order.size() - 1; i > 0; --i)
            std::swap(epoch_order[i], epoch_order[rng() % (i + 1)]);

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < epoch_order.size(); start += cfg.batch_size) {
            std::vector<const LabeledExample*> batch;
            const std::size_t end = std::min(start + cfg.batch_size, epoch_order.size());
            for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set[epoch_order[i]]);
            double loss = 0.0;
            Gradients g = backprop_batch(cell, fc, batch, &loss);
            clip_gradients(g, cfg.grad_clip_norm);
            adam_step(cell, fc, g, adam, cfg);
            epoch_loss += loss;
            ++batches;
        }
        result.train_losses.push_back(epoch_loss / static_cast<double>(batches));

        double acc = 0.0;
        const double val_loss = eval_split(cell, fc, val_ptrs, &acc);
        result.val_losses.push_back(val_loss);
        if (val_loss < best_val) {
            best_val = val_loss;
            best_acc = acc;
            best_cell = cell;
            best_fc = fc;
            since_improve = 0;
        } else if (++since_improve >= cfg.patience) {
            break;
        }
    }

    result.best_val_loss = best_val;
    result.best_val_accuracy = best_acc;
    result.bundle.config = mc;
    result.bundle.cell = std::move(best_cell);
    result.bundle.fc = std::move(best_fc);
    result.bundle.norm = norm;
    result.bundle.thresholds.tau.assign(mc.num_classes, 0.5);
    result.bundle.labels = dataset.labels;
    return result;
}

ModelBundle train_model(const TrainConfig& cfg, const FeatureFile& dataset) {
    return train_model_full(cfg, dataset).bundle;
}

ClassProbs aggregate_clip_probs(const ModelBundle& model,
                                const std::vector<const MfccSequence*>& segments) {
    if (segments.empty()) throw EmptyDataset("aggregate_clip_probs: no segments");
    std::vector<double> agg(model.config.num_classes, 0.0);
    for (const MfccSequence* seq : segments) {
        const auto normed = apply_norm(model.norm, *seq);
        const auto probs = softmax(fc_logits(model.fc, forward_sequence(model.cell, normed)));
        for (std::size_t c = 0; c < agg.size(); ++c) agg[c] += probs.probs[c];
    }
    for (double& v : agg) v /= static_cast<double>(segments.size());
    ClassProbs out;
    out.probs = std::move(agg);
    return out;
}

ClassThresholds calibrate_thresholds(const ModelBundle& model, const FeatureFile& train_data) {
    const std::size_t C = model.config.num_classes;

    // group segments per clip; a clip's label is the label of its records
    std::map<std::string, std::pair<int, std::vector<const MfccSequence*>>> clips;
    for (const auto& rec : train_data.records) {
        auto& entry = clips[rec.clip];
        entry.first = rec.label;
        entry.second.push_back(&rec.mfcc);
    }

    std::vector<double> sum(C, 0.0);
    std::vector<std::size_t> count(C, 0);
    for (const auto& [name, entry] : clips) {
        const auto agg = aggregate_clip_probs(model, entry.second);
        const auto c = static_cast<std::size_t>(entry.first);
        if (c >= C) throw BadLabel("calibrate_thresholds: label out of range");
        sum[c] += agg.probs[c];
        count[c] += 1;
    }

    ClassThresholds out;
    out.tau.resize(C);
    for (std::size_t c = 0; c < C; ++c) {
        if (count[c] == 0)
            throw MissingClass("calibrate_thresholds: class " + std::to_string(c) +
                               " absent from train data");
        out.tau[c] = sum[c] / static_cast<double>(count[c]);
    }
    return out;
}

}  // namespace fgrnn
