#pragma once

#include <string>
#include <vector>

#include "fgrnn/grnn.hpp"

namespace fgrnn {

// Per-coefficient Z-score statistics fitted on the training split.
struct NormStats {
    std::vector<double> mean;  // D
    std::vector<double> std;   // D, floored at 1e-8
};

// Per-class detection thresholds in [0, 1].
struct ClassThresholds {
    std::vector<double> tau;
};

// Everything needed for inference, in one place.
struct ModelBundle {
    ModelConfig config;
    FastGrnnParams cell;
    FcParams fc;
    NormStats norm;
    ClassThresholds thresholds;
    std::vector<std::string> labels;
};

}  // namespace fgrnn
