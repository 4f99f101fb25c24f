#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fgrnn/model.hpp"

namespace fgrnn {

// One symmetrically quantized tensor: value = scale * q.
struct QuantTensor {
    std::vector<std::int8_t> q;
    float scale = 1.0f;
};

// Int8 bundle. Every core tensor carries its own scale; one-element
// tensors (zeta_raw, nu_raw) quantize exactly to +-127 * scale.
struct QuantizedBundle {
    ModelConfig config;
    QuantTensor W, U, b_z, b_h, zeta_raw, nu_raw, W_fc, b_fc;
    NormStats norm;
    ClassThresholds thresholds;
    std::vector<std::string> labels;
};

// Binary layout (little-endian): magic "FGRN", version u16 = 1, flags u16
// (bit0 = quantized), D/H/C/T u16, then W, U, b_z, b_h, zeta_raw, nu_raw,
// W_fc, b_fc (row-major f32, or f32 scale + int8 payload when quantized),
// then norm mean/std (2 x D f32), thresholds (C f32), labels as
// u32-length-prefixed UTF-8.
void save_model(const ModelBundle& bundle, const std::string& path);
void save_model(const QuantizedBundle& bundle, const std::string& path);

std::vector<std::uint8_t> encode_model(const ModelBundle& bundle);
std::vector<std::uint8_t> encode_model(const QuantizedBundle& bundle);

// Loads either flavor; a quantized file is dequantized on the way in.
ModelBundle load_model(const std::string& path);
ModelBundle decode_model(const std::vector<std::uint8_t>& bytes);

// Strict quantized load; throws VersionMismatch on a float file.
QuantizedBundle load_quantized(const std::string& path);
QuantizedBundle decode_quantized(const std::vector<std::uint8_t>& bytes);

bool is_quantized_file(const std::vector<std::uint8_t>& bytes);

QuantizedBundle quantize_int8(const ModelBundle& bundle);
ModelBundle dequantize(const QuantizedBundle& bundle);

struct TensorSize {
    std::string name;
    std::size_t bytes = 0;
};

struct SizeReport {
    std::vector<TensorSize> tensors;  // core tensors only
    std::size_t header_bytes = 0;
    std::size_t core_bytes = 0;  // 4920 for the float default config
    std::size_t aux_bytes = 0;   // norm stats, thresholds, labels
    std::size_t total_bytes = 0;
    std::size_t parameter_count = 0;
};

SizeReport size_report(const ModelBundle& bundle);
SizeReport size_report(const QuantizedBundle& bundle);

}  // namespace fgrnn
