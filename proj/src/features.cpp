#include "fgrnn/features.hpp"

#include <fstream>

#include <json.hpp>

namespace fgrnn {

using nlohmann::json;

std::string to_json(const FeatureFile& file) {
    json doc;
    doc["labels"] = file.labels;
    doc["records"] = json::array();
    for (const auto& rec : file.records) {
        json jr;
        jr["clip"] = rec.clip;
        jr["segment"] = rec.segment;
        jr["label"] = rec.label;
        json rows = json::array();
        for (std::size_t r = 0; r < rec.mfcc.coeffs.rows(); ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < rec.mfcc.coeffs.cols(); ++c)
                row.push_back(rec.mfcc.coeffs(r, c));
            rows.push_back(std::move(row));
        }
        jr["mfcc"] = std::move(rows);
        doc["records"].push_back(std::move(jr));
    }
    return doc.dump();
}

FeatureFile feature_file_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputFormatError(std::string("feature file: invalid JSON: ") + e.what());
    }
    FeatureFile file;
    try {
        file.labels = doc.at("labels").get<std::vector<std::string>>();
        for (const auto& jr : doc.at("records")) {
            FeatureRecord rec;
            rec.clip = jr.at("clip").get<std::string>();
            rec.segment = jr.at("segment").get<int>();
            rec.label = jr.at("label").get<int>();
            const auto& rows = jr.at("mfcc");
            if (rows.empty()) throw InputFormatError("feature file: empty mfcc matrix");
            rec.mfcc.coeffs = Matrix(rows.size(), rows[0].size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rec.mfcc.coeffs.cols())
                    throw InputFormatError("feature file: ragged mfcc matrix");
                for (std::size_t c = 0; c < rec.mfcc.coeffs.cols(); ++c)
                    rec.mfcc.coeffs(r, c) = rows[r][c].get<double>();
            }
            if (rec.label < 0 || static_cast<std::size_t>(rec.label) >= file.labels.size())
                throw InputFormatError("feature file: label index out of range");
            file.records.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw InputFormatError(std::string("feature file: bad schema: ") + e.what());
    }
    return file;
}

void save_features(const std::string& path, const FeatureFile& file) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << to_json(file);
}

FeatureFile load_features(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return feature_file_from_json(text);
}

}  // namespace fgrnn
