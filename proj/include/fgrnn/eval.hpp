#pragma once

#include <set>
#include <vector>

#include "fgrnn/model.hpp"
#include "fgrnn/train.hpp"

namespace fgrnn {

struct ClipPrediction {
    std::vector<ClassProbs> per_segment;  // 5 entries
    ClassProbs aggregate;                 // arithmetic mean of the above
    int predicted_class = 0;
    std::set<int> present_classes;
};

struct ConfusionMatrix {
    std::vector<std::vector<std::size_t>> counts;  // rows = truth, cols = prediction

    std::size_t num_classes() const { return counts.size(); }
    std::size_t total() const;
};

struct Metrics {
    double accuracy = 0.0;
    std::vector<double> precision;
    std::vector<double> recall;
};

// Full inference chain: optional spectral gating, resample to 22050 Hz,
// segment, per-segment MFCC -> normalize -> recurrent forward -> softmax,
// then mean-pool the 5 distributions.
ClipPrediction infer_clip(const ModelBundle& model, const AudioClip& clip, bool denoise = false);

// {c : aggregate[c] >= tau[c]}; ties are included.
std::set<int> detect_present_classes(const ClassProbs& aggregate,
                                     const ClassThresholds& thresholds);

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& labels, std::size_t num_classes);

Metrics metrics(const ConfusionMatrix& cm);

}  // namespace fgrnn
