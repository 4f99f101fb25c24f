// Batch CLI for the acoustic classification pipeline:
// extract / train / calibrate / infer / eval / quantize / size.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fgrnn/eval.hpp"
#include "fgrnn/model_store.hpp"
#include "fgrnn/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fgrnn;

namespace {

// labels CSV: one "filename,classname" pair per line
std::vector<std::pair<std::string, std::string>> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw InputFormatError("labels file: expected 'filename,classname': " + line);
        out.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    if (out.empty()) throw InputFormatError("labels file is empty: " + path);
    return out;
}

int run_extract(const std::string& in_dir, const std::string& labels_csv,
                const std::string& out_path, bool denoise,
                const std::string& noise_profile_path) {
    const auto pairs = read_labels_csv(labels_csv);

    std::vector<std::string> vocab;
    for (const auto& [file, cls] : pairs) vocab.push_back(cls);
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    std::map<std::string, int> class_index;
    for (std::size_t i = 0; i < vocab.size(); ++i) class_index[vocab[i]] = static_cast<int>(i);

    std::optional<AudioClip> profile;
    if (!noise_profile_path.empty()) profile = load_wav(noise_profile_path);

    FeatureFile features;
    features.labels = vocab;
    for (const auto& [file, cls] : pairs) {
        AudioClip clip = load_wav((fs::path(in_dir) / file).string());
        if (clip.sample_rate != kCanonicalRate) clip = resample_linear(clip, kCanonicalRate);
        if (denoise) {
            std::optional<AudioClip> p = profile;
            if (p && p->sample_rate != kCanonicalRate) p = resample_linear(*p, kCanonicalRate);
            clip = spectral_gate(clip, p);
        }
        int seg_idx = 0;
        for (const auto& segment : segment_clip(clip)) {
            FeatureRecord rec;
            rec.clip = file;
            rec.segment = seg_idx++;
            rec.label = class_index.at(cls);
            rec.mfcc = mfcc_sequence(segment);
            features.records.push_back(std::move(rec));
        }
    }
    save_features(out_path, features);
    std::cerr << "wrote " << features.records.size() << " records ("
              << features.labels.size() << " classes) to " << out_path << "\n";
    return 0;
}

int run_train(const std::string& features_path, const std::string& out_path, std::size_t epochs,
              std::uint64_t seed, double lr) {
    TrainConfig cfg;
    cfg.max_epochs = epochs;
    cfg.rng_seed = seed;
    cfg.learning_rate = lr;
    const auto dataset = load_features(features_path);
    const auto result = train_model_full(cfg, dataset);
    save_model(result.bundle, out_path);
    std::cerr << "epochs run: " << result.train_losses.size()
              << "  best val loss: " << result.best_val_loss
              << "  best val accuracy: " << result.best_val_accuracy << "\n";
    return 0;
}

int run_calibrate(const std::string& model_path, const std::string& features_path,
                  const std::string& out_path) {
    ModelBundle model = load_model(model_path);
    model.thresholds = calibrate_thresholds(model, load_features(features_path));
    save_model(model, out_path);
    for (std::size_t c = 0; c < model.thresholds.tau.size(); ++c)
        std::cerr << model.labels[c] << ": tau = " << model.thresholds.tau[c] << "\n";
    return 0;
}

int run_infer(const std::string& model_path, const std::string& wav_path, bool denoise,
              bool multitone) {
    const ModelBundle model = load_model(model_path);
    AudioClip clip = load_wav(wav_path);
    const ClipPrediction pred = infer_clip(model, clip, denoise);

    json doc;
    doc["labels"] = model.labels;
    doc["per_segment"] = json::array();
    for (const auto& seg : pred.per_segment) doc["per_segment"].push_back(seg.probs);
    doc["aggregate"] = pred.aggregate.probs;
    doc["predicted_class"] = pred.predicted_class;
    doc["predicted_label"] = model.labels[static_cast<std::size_t>(pred.predicted_class)];
    if (multitone) {
        json present = json::array();
        for (int c : pred.present_classes)
            present.push_back(model.labels[static_cast<std::size_t>(c)]);
        doc["present_classes"] = pred.present_classes;
        doc["present_labels"] = std::move(present);
        doc["thresholds"] = model.thresholds.tau;
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& features_path) {
    const ModelBundle model = load_model(model_path);
    const auto features = load_features(features_path);
    if (features.labels.size() != model.config.num_classes)
        throw PreconditionError("eval: feature file class count differs from model");

    // group segments per clip, aggregate, argmax
    std::map<std::string, std::pair<int, std::vector<const MfccSequence*>>> clips;
    for (const auto& rec : features.records) {
        auto& entry = clips[rec.clip];
        entry.first = rec.label;
        entry.second.push_back(&rec.mfcc);
    }
    std::vector<int> predictions, labels;
    for (const auto& [name, entry] : clips) {
        const auto agg = aggregate_clip_probs(model, entry.second);
        predictions.push_back(static_cast<int>(
            std::max_element(agg.probs.begin(), agg.probs.end()) - agg.probs.begin()));
        labels.push_back(entry.first);
    }
    const auto cm = confusion_matrix(predictions, labels, model.config.num_classes);
    const auto m = metrics(cm);

    std::cout << "confusion matrix (rows = truth, cols = prediction):\n";
    std::cout << std::setw(18) << "";
    for (const auto& l : model.labels) std::cout << std::setw(10) << l.substr(0, 9);
    std::cout << "\n";
    for (std::size_t r = 0; r < cm.num_classes(); ++r) {
        std::cout << std::setw(18) << model.labels[r].substr(0, 17);
        for (std::size_t c = 0; c < cm.num_classes(); ++c)
            std::cout << std::setw(10) << cm.counts[r][c];
        std::cout << "\n";
    }
    std::cout << "\naccuracy: " << m.accuracy << "\n";
    for (std::size_t c = 0; c < cm.num_classes(); ++c)
        std::cout << model.labels[c] << ": precision " << m.precision[c] << ", recall "
                  << m.recall[c] << "\n";

    json doc;
    doc["labels"] = model.labels;
    doc["confusion_matrix"] = cm.counts;
    doc["accuracy"] = m.accuracy;
    doc["precision"] = m.precision;
    doc["recall"] = m.recall;
    std::cout << "\n" << doc.dump(2) << "\n";
    return 0;
}

int run_quantize(const std::string& model_path, const std::string& out_path) {
    const ModelBundle model = load_model(model_path);
    save_model(quantize_int8(model), out_path);
    std::cerr << "wrote quantized model to " << out_path << "\n";
    return 0;
}

int run_size(const std::string& model_path) {
    std::ifstream in(model_path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + model_path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    const SizeReport rep = is_quantized_file(bytes)
                               ? size_report(decode_quantized(bytes))
                               : size_report(decode_model(bytes));

    std::cout << "parameters: " << rep.parameter_count << "\n";
    for (const auto& t : rep.tensors)
        std::cout << std::setw(10) << t.name << ": " << t.bytes << " bytes\n";
    std::cout << "header:     " << rep.header_bytes << " bytes\n";
    std::cout << "core:       " << rep.core_bytes << " bytes ("
              << rep.core_bytes / 1024.0 << " KiB)\n";
    std::cout << "auxiliary:  " << rep.aux_bytes << " bytes\n";
    std::cout << "total:      " << rep.total_bytes << " bytes (file: " << bytes.size()
              << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FastGRNN acoustic classification pipeline"};
    app.require_subcommand(1);

    std::string in_dir, labels_csv, out_path, model_path, features_path, wav_path;
    std::string noise_profile;
    bool denoise = false, multitone = false;
    std::size_t epochs = 200;
    std::uint64_t seed = 42;
    double lr = 1e-3;

    auto* extract = app.add_subcommand("extract", "Extract MFCC features from WAV files");
    extract->add_option("--in", in_dir, "Input directory of WAV files")->required();
    extract->add_option("--labels", labels_csv, "CSV of filename,classname")->required();
    extract->add_option("--out", out_path, "Output feature JSON")->required();
    extract->add_flag("--denoise", denoise, "Apply spectral gating before extraction");
    extract->add_option("--noise-profile", noise_profile, "WAV of representative noise");

    auto* train = app.add_subcommand("train", "Train a model from a feature file");
    train->add_option("--features", features_path, "Feature JSON")->required();
    train->add_option("--out", out_path, "Output model file")->required();
    train->add_option("--epochs", epochs, "Maximum epochs");
    train->add_option("--seed", seed, "RNG seed");
    train->add_option("--lr", lr, "Learning rate");

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate per-class thresholds");
    calibrate->add_option("--model", model_path, "Model file")->required();
    calibrate->add_option("--features", features_path, "Feature JSON")->required();
    calibrate->add_option("--out", out_path, "Output model file")->required();

    auto* infer = app.add_subcommand("infer", "Classify one WAV clip");
    infer->add_option("--model", model_path, "Model file")->required();
    infer->add_option("--wav", wav_path, "Input WAV")->required();
    infer->add_flag("--denoise", denoise, "Apply spectral gating first");
    infer->add_flag("--multitone", multitone, "Report all classes above threshold");

    auto* eval_cmd = app.add_subcommand("eval", "Confusion matrix and metrics");
    eval_cmd->add_option("--model", model_path, "Model file")->required();
    eval_cmd->add_option("--features", features_path, "Feature JSON")->required();

    auto* quantize = app.add_subcommand("quantize", "Quantize model weights to int8");
    quantize->add_option("--model", model_path, "Model file")->required();
    quantize->add_option("--out", out_path, "Output model file")->required();

    auto* size = app.add_subcommand("size", "Per-tensor byte report");
    size->add_option("--model", model_path, "Model file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed())
            return run_extract(in_dir, labels_csv, out_path, denoise, noise_profile);
        if (train->parsed()) return run_train(features_path, out_path, epochs, seed, lr);
        if (calibrate->parsed()) return run_calibrate(model_path, features_path, out_path);
        if (infer->parsed()) return run_infer(model_path, wav_path, denoise, multitone);
        if (eval_cmd->parsed()) return run_eval(model_path, features_path);
        if (quantize->parsed()) return run_quantize(model_path, out_path);
        if (size->parsed()) return run_size(model_path);
    } catch (const InputFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
