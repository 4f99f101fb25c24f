#pragma once

#include <string>
#include <vector>

#include "fgrnn/dsp.hpp"

namespace fgrnn {

// One segment's worth of features, tagged with its source clip and label.
struct FeatureRecord {
    std::string clip;
    int segment = 0;
    int label = 0;
    MfccSequence mfcc;  // 26 x 13
};

// On-disk schema:
//   {"labels": [...], "records": [{"clip": str, "segment": int,
//    "label": int, "mfcc": [[f64;13];26]}]}
struct FeatureFile {
    std::vector<std::string> labels;
    std::vector<FeatureRecord> records;
};

std::string to_json(const FeatureFile& file);
FeatureFile feature_file_from_json(const std::string& text);

void save_features(const std::string& path, const FeatureFile& file);
FeatureFile load_features(const std::string& path);

}  // namespace fgrnn
