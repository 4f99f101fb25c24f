#include "fgrnn/eval.hpp"

#include <algorithm>

#include "fgrnn/dsp.hpp"

namespace fgrnn {

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
        for (std::size_t v : row) n += v;
    return n;
}

ClipPrediction infer_clip(const ModelBundle& model, const AudioClip& clip, bool denoise) {
    AudioClip work = clip;
    if (denoise) work = spectral_gate(work);
    if (work.sample_rate != kCanonicalRate) work = resample_linear(work, kCanonicalRate);

    ClipPrediction pred;
    std::vector<double> agg(model.config.num_classes, 0.0);
    for (const auto& segment : segment_clip(work)) {
        const auto features = apply_norm(model.norm, mfcc_sequence(segment));
        const auto probs = softmax(fc_logits(model.fc, forward_sequence(model.cell, features)));
        for (std::size_t c = 0; c < agg.size(); ++c) agg[c] += probs.probs[c];
        pred.per_segment.push_back(probs);
    }
    for (double& v : agg) v /= static_cast<double>(pred.per_segment.size());
    pred.aggregate.probs = std::move(agg);
    pred.predicted_class = static_cast<int>(
        std::max_element(pred.aggregate.probs.begin(), pred.aggregate.probs.end()) -
        pred.aggregate.probs.begin());
    pred.present_classes = detect_present_classes(pred.aggregate, model.thresholds);
    return pred;
}

std::set<int> detect_present_classes(const ClassProbs& aggregate,
                                     const ClassThresholds& thresholds) {
    if (aggregate.probs.size() != thresholds.tau.size())
        throw DimensionMismatch("detect_present_classes: size mismatch");
    std::set<int> present;
    for (std::size_t c = 0; c < aggregate.probs.size(); ++c)
        if (aggregate.probs[c] >= thresholds.tau[c]) present.insert(static_cast<int>(c));
    return present;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& labels, std::size_t num_classes) {
    if (predictions.size() != labels.size())
        throw LengthMismatch("confusion_matrix: predictions/labels length mismatch");
    ConfusionMatrix cm;
    cm.counts.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int truth = labels[i];
        const int pred = predictions[i];
        if (truth < 0 || pred < 0 || static_cast<std::size_t>(truth) >= num_classes ||
            static_cast<std::size_t>(pred) >= num_classes)
            throw BadIndex("confusion_matrix: class index out of range");
        cm.counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)] += 1;
    }
    return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
    const std::size_t C = cm.num_classes();
    const std::size_t total = cm.total();
    if (C == 0 || total == 0) throw EmptyMatrix("metrics: empty confusion matrix");

    Metrics m;
    m.precision.assign(C, 0.0);
    m.recall.assign(C, 0.0);
    std::size_t diag = 0;
    for (std::size_t c = 0; c < C; ++c) {
        diag += cm.counts[c][c];
        std::size_t row = 0, col = 0;
        for (std::size_t k = 0; k < C; ++k) {
            row += cm.counts[c][k];
            col += cm.counts[k][c];
        }
        // 0/0 -> 0
        m.recall[c] = row > 0 ? static_cast<double>(cm.counts[c][c]) / row : 0.0;
        m.precision[c] = col > 0 ? static_cast<double>(cm.counts[c][c]) / col : 0.0;
    }
    m.accuracy = static_cast<double>(diag) / static_cast<double>(total);
    return m;
}

}  // namespace fgrnn
