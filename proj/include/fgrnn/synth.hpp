#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fgrnn/audio_io.hpp"
#include "fgrnn/features.hpp"

namespace fgrnn {

// Six synthetic sound classes with distinct spectral signatures, used for
// desk-scale end-to-end training and evaluation. Phase and overall level
// (+-6 dB) are randomized per clip.
std::vector<std::string> synth_labels();

AudioClip synth_clip(int class_idx, std::mt19937_64& rng, double seconds = 3.0);

// clips_per_class clips per class, segmented and featurized.
FeatureFile synth_feature_file(std::size_t clips_per_class, std::uint64_t seed);

}  // namespace fgrnn
