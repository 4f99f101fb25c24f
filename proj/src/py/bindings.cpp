#include <fstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fgrnn/eval.hpp"
#include "fgrnn/model_store.hpp"
#include "fgrnn/synth.hpp"

namespace py = pybind11;
using namespace fgrnn;

namespace {

py::array_t<double> matrix_to_array(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), out.mutable_data());
    return out;
}

std::vector<double> to_samples(const py::array_t<double, py::array::c_style>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D sample array");
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "FastGRNN acoustic classification core";

    py::register_exception<InputFormatError>(m, "InputFormatError");
    py::register_exception<PreconditionError>(m, "PreconditionError");

    py::class_<AudioClip>(m, "AudioClip")
        .def(py::init([](py::array_t<double, py::array::c_style> samples, int rate) {
                 AudioClip c;
                 c.samples = to_samples(samples);
                 c.sample_rate = rate;
                 return c;
             }),
             py::arg("samples"), py::arg("sample_rate") = kCanonicalRate)
        .def_property_readonly("samples",
                               [](const AudioClip& c) {
                                   return py::array_t<double>(
                                       static_cast<py::ssize_t>(c.samples.size()),
                                       c.samples.data());
                               })
        .def_readonly("sample_rate", &AudioClip::sample_rate)
        .def("__len__", [](const AudioClip& c) { return c.samples.size(); });

    m.def("load_wav", &load_wav, py::arg("path"));
    m.def("save_wav", &save_wav, py::arg("path"), py::arg("clip"));
    m.def("resample_linear", &resample_linear, py::arg("clip"), py::arg("target_rate"));

    m.def(
        "segment_clip",
        [](const AudioClip& clip) {
            py::list out;
            for (const auto& seg : segment_clip(clip))
                out.append(py::array_t<double>(static_cast<py::ssize_t>(seg.samples.size()),
                                               seg.samples.data()));
            return out;
        },
        py::arg("clip"), "Split the first 3 s into five 13230-sample segments.");

    m.def(
        "mfcc",
        [](py::array_t<double, py::array::c_style> samples) {
            Segment seg;
            seg.samples = to_samples(samples);
            return matrix_to_array(mfcc_sequence(seg).coeffs);
        },
        py::arg("segment_samples"), "26x13 MFCC matrix of one 13230-sample segment.");

    m.def(
        "spectral_gate",
        [](const AudioClip& clip, const std::optional<AudioClip>& profile) {
            return spectral_gate(clip, profile);
        },
        py::arg("clip"), py::arg("noise_profile") = std::nullopt);

    m.def(
        "softmax",
        [](const std::vector<double>& logits) { return softmax(logits).probs; },
        py::arg("logits"));

    m.def(
        "count_parameters",
        [](std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes) {
            ModelConfig cfg;
            cfg.input_dim = input_dim;
            cfg.hidden_dim = hidden_dim;
            cfg.num_classes = num_classes;
            return count_parameters(cfg);
        },
        py::arg("input_dim") = 13, py::arg("hidden_dim") = 26, py::arg("num_classes") = 6);

    m.def("synth_labels", &synth_labels);
    m.def(
        "synth_clip",
        [](int class_idx, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return synth_clip(class_idx, rng);
        },
        py::arg("class_idx"), py::arg("seed") = 0);
    m.def(
        "synth_features",
        [](const std::string& path, std::size_t clips_per_class, std::uint64_t seed) {
            save_features(path, synth_feature_file(clips_per_class, seed));
        },
        py::arg("path"), py::arg("clips_per_class") = 10, py::arg("seed") = 42);

    m.def(
        "train",
        [](const std::string& features_path, const std::string& model_path, std::size_t epochs,
           std::uint64_t seed, double lr) {
            TrainConfig cfg;
            cfg.max_epochs = epochs;
            cfg.rng_seed = seed;
            cfg.learning_rate = lr;
            const auto result = train_model_full(cfg, load_features(features_path));
            save_model(result.bundle, model_path);
            py::dict out;
            out["epochs_run"] = result.train_losses.size();
            out["best_val_loss"] = result.best_val_loss;
            out["best_val_accuracy"] = result.best_val_accuracy;
            return out;
        },
        py::arg("features_path"), py::arg("model_path"), py::arg("epochs") = 200,
        py::arg("seed") = 42, py::arg("lr") = 1e-3);

    m.def(
        "calibrate",
        [](const std::string& model_path, const std::string& features_path,
           const std::string& out_path) {
            ModelBundle model = load_model(model_path);
            model.thresholds = calibrate_thresholds(model, load_features(features_path));
            save_model(model, out_path);
            return model.thresholds.tau;
        },
        py::arg("model_path"), py::arg("features_path"), py::arg("out_path"));

    m.def(
        "infer",
        [](const std::string& model_path, const AudioClip& clip, bool denoise) {
            const ModelBundle model = load_model(model_path);
            const auto pred = infer_clip(model, clip, denoise);
            py::dict out;
            py::list per_segment;
            for (const auto& seg : pred.per_segment) per_segment.append(seg.probs);
            out["labels"] = model.labels;
            out["per_segment"] = per_segment;
            out["aggregate"] = pred.aggregate.probs;
            out["predicted_class"] = pred.predicted_class;
            out["present_classes"] =
                std::vector<int>(pred.present_classes.begin(), pred.present_classes.end());
            return out;
        },
        py::arg("model_path"), py::arg("clip"), py::arg("denoise") = false);

    m.def(
        "quantize",
        [](const std::string& model_path, const std::string& out_path) {
            save_model(quantize_int8(load_model(model_path)), out_path);
        },
        py::arg("model_path"), py::arg("out_path"));

    m.def(
        "size_report",
        [](const std::string& model_path) {
            std::ifstream in(model_path, std::ios::binary);
            if (!in) throw IoError("cannot open file: " + model_path);
            std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                            std::istreambuf_iterator<char>());
            const SizeReport rep = is_quantized_file(bytes)
                                       ? size_report(decode_quantized(bytes))
                                       : size_report(decode_model(bytes));
            py::dict out;
            py::dict tensors;
            for (const auto& t : rep.tensors) tensors[py::str(t.name)] = t.bytes;
            out["tensors"] = tensors;
            out["header_bytes"] = rep.header_bytes;
            out["core_bytes"] = rep.core_bytes;
            out["aux_bytes"] = rep.aux_bytes;
            out["total_bytes"] = rep.total_bytes;
            out["parameter_count"] = rep.parameter_count;
            out["file_bytes"] = bytes.size();
            return out;
        },
        py::arg("model_path"));
}
