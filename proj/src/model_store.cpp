#include "fgrnn/model_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fgrnn {

namespace {

constexpr char kMagic[4] = {'F', 'G', 'R', 'N'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kFlagQuantized = 1;

class Writer {
public:
    void u16(std::uint16_t v) {
        bytes_.push_back(v & 0xff);
        bytes_.push_back((v >> 8) & 0xff);
    }
    void u32(std::uint32_t v) {
        u16(v & 0xffff);
        u16(v >> 16);
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void i8(std::int8_t v) { bytes_.push_back(static_cast<std::uint8_t>(v)); }
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes_.insert(bytes_.end(), b, b + n);
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        const std::uint32_t lo = u16();
        return lo | (static_cast<std::uint32_t>(u16()) << 16);
    }
    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::int8_t i8() {
        need(1);
        return static_cast<std::int8_t>(bytes_[pos_++]);
    }
    void raw(void* p, std::size_t n) {
        need(n);
        std::memcpy(p, bytes_.data() + pos_, n);
        pos_ += n;
    }
    bool exhausted() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw ShapeCorruption("model file: truncated");
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

void write_f32_tensor(Writer& w, const double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w.f32(static_cast<float>(data[i]));
}

void read_f32_tensor(Reader& r, double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) data[i] = r.f32();
}

void write_quant_tensor(Writer& w, const QuantTensor& t) {
    w.f32(t.scale);
    for (std::int8_t q : t.q) w.i8(q);
}

QuantTensor read_quant_tensor(Reader& r, std::size_t n) {
    QuantTensor t;
    t.scale = r.f32();
    t.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.q[i] = r.i8();
    return t;
}

void write_header(Writer& w, const ModelConfig& cfg, bool quantized) {
    w.raw(kMagic, 4);
    w.u16(kVersion);
    w.u16(quantized ? kFlagQuantized : 0);
    w.u16(static_cast<std::uint16_t>(cfg.input_dim));
    w.u16(static_cast<std::uint16_t>(cfg.hidden_dim));
    w.u16(static_cast<std::uint16_t>(cfg.num_classes));
    w.u16(static_cast<std::uint16_t>(cfg.seq_len));
}

ModelConfig read_header(Reader& r, bool& quantized) {
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw BadMagic("model file: bad magic");
    const std::uint16_t version = r.u16();
    if (version != kVersion)
        throw VersionMismatch("model file: unsupported version " + std::to_string(version));
    const std::uint16_t flags = r.u16();
    quantized = (flags & kFlagQuantized) != 0;
    ModelConfig cfg;
    cfg.input_dim = r.u16();
    cfg.hidden_dim = r.u16();
    cfg.num_classes = r.u16();
    cfg.seq_len = r.u16();
    if (cfg.input_dim == 0 || cfg.hidden_dim == 0 || cfg.num_classes == 0 || cfg.seq_len == 0)
        throw ShapeCorruption("model file: zero dimension in header");
    return cfg;
}

void write_aux(Writer& w, const NormStats& norm, const ClassThresholds& thresholds,
               const std::vector<std::string>& labels) {
    write_f32_tensor(w, norm.mean.data(), norm.mean.size());
    write_f32_tensor(w, norm.std.data(), norm.std.size());
    write_f32_tensor(w, thresholds.tau.data(), thresholds.tau.size());
    for (const auto& label : labels) {
        w.u32(static_cast<std::uint32_t>(label.size()));
        w.raw(label.data(), label.size());
    }
}

void read_aux(Reader& r, const ModelConfig& cfg, NormStats& norm, ClassThresholds& thresholds,
              std::vector<std::string>& labels) {
    norm.mean.resize(cfg.input_dim);
    norm.std.resize(cfg.input_dim);
    read_f32_tensor(r, norm.mean.data(), norm.mean.size());
    read_f32_tensor(r, norm.std.data(), norm.std.size());
    thresholds.tau.resize(cfg.num_classes);
    read_f32_tensor(r, thresholds.tau.data(), thresholds.tau.size());
    labels.resize(cfg.num_classes);
    for (auto& label : labels) {
        const std::uint32_t len = r.u32();
        if (len > 1 << 20) throw ShapeCorruption("model file: absurd label length");
        label.resize(len);
        r.raw(label.data(), len);
    }
    if (!r.exhausted()) throw ShapeCorruption("model file: trailing bytes");
}

void check_bundle_shapes(const ModelBundle& b) {
    const auto& c = b.config;
    if (b.cell.W.rows() != c.hidden_dim || b.cell.W.cols() != c.input_dim ||
        b.cell.U.rows() != c.hidden_dim || b.cell.U.cols() != c.hidden_dim ||
        b.cell.b_z.size() != c.hidden_dim || b.cell.b_h.size() != c.hidden_dim ||
        b.fc.W_fc.rows() != c.num_classes || b.fc.W_fc.cols() != c.hidden_dim ||
        b.fc.b_fc.size() != c.num_classes || b.norm.mean.size() != c.input_dim ||
        b.norm.std.size() != c.input_dim || b.thresholds.tau.size() != c.num_classes ||
        b.labels.size() != c.num_classes)
        throw ShapeCorruption("model bundle: inconsistent shapes");
}

QuantTensor quantize_tensor(const double* data, std::size_t n) {
    QuantTensor t;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_abs = std::max(max_abs, std::fabs(data[i]));
    t.scale = max_abs > 0.0 ? static_cast<float>(max_abs / 127.0) : 1.0f;
    t.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long v = std::lrint(data[i] / t.scale);
        t.q[i] = static_cast<std::int8_t>(std::clamp(v, -127L, 127L));
    }
    return t;
}

void dequantize_tensor(const QuantTensor& t, double* data, std::size_t n) {
    if (t.q.size() != n) throw ShapeCorruption("quantized tensor: wrong element count");
    for (std::size_t i = 0; i < n; ++i)
        data[i] = static_cast<double>(t.scale) * static_cast<double>(t.q[i]);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t labels_bytes(const std::vector<std::string>& labels) {
    std::size_t n = 0;
    for (const auto& l : labels) n += 4 + l.size();
    return n;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const ModelBundle& bundle) {
    check_bundle_shapes(bundle);
    Writer w;
    write_header(w, bundle.config, /*quantized=*/false);
    write_f32_tensor(w, bundle.cell.W.data(), bundle.cell.W.size());
    write_f32_tensor(w, bundle.cell.U.data(), bundle.cell.U.size());
    write_f32_tensor(w, bundle.cell.b_z.data(), bundle.cell.b_z.size());
    write_f32_tensor(w, bundle.cell.b_h.data(), bundle.cell.b_h.size());
    w.f32(static_cast<float>(bundle.cell.zeta_raw));
    w.f32(static_cast<float>(bundle.cell.nu_raw));
    write_f32_tensor(w, bundle.fc.W_fc.data(), bundle.fc.W_fc.size());
    write_f32_tensor(w, bundle.fc.b_fc.data(), bundle.fc.b_fc.size());
    write_aux(w, bundle.norm, bundle.thresholds, bundle.labels);
    return w.take();
}

std::vector<std::uint8_t> encode_model(const QuantizedBundle& bundle) {
    Writer w;
    write_header(w, bundle.config, /*quantized=*/true);
    write_quant_tensor(w, bundle.W);
    write_quant_tensor(w, bundle.U);
    write_quant_tensor(w, bundle.b_z);
    write_quant_tensor(w, bundle.b_h);
    write_quant_tensor(w, bundle.zeta_raw);
    write_quant_tensor(w, bundle.nu_raw);
    write_quant_tensor(w, bundle.W_fc);
    write_quant_tensor(w, bundle.b_fc);
    write_aux(w, bundle.norm, bundle.thresholds, bundle.labels);
    return w.take();
}

void save_model(const ModelBundle& bundle, const std::string& path) {
    write_file(path, encode_model(bundle));
}

void save_model(const QuantizedBundle& bundle, const std::string& path) {
    write_file(path, encode_model(bundle));
}

bool is_quantized_file(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    bool quantized = false;
    read_header(r, quantized);
    return quantized;
}

QuantizedBundle decode_quantized(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    bool quantized = false;
    QuantizedBundle b;
    b.config = read_header(r, quantized);
    if (!quantized) throw VersionMismatch("model file: not a quantized model");
    const auto& c = b.config;
    b.W = read_quant_tensor(r, c.hidden_dim * c.input_dim);
    b.U = read_quant_tensor(r, c.hidden_dim * c.hidden_dim);
    b.b_z = read_quant_tensor(r, c.hidden_dim);
    b.b_h = read_quant_tensor(r, c.hidden_dim);
    b.zeta_raw = read_quant_tensor(r, 1);
    b.nu_raw = read_quant_tensor(r, 1);
    b.W_fc = read_quant_tensor(r, c.num_classes * c.hidden_dim);
    b.b_fc = read_quant_tensor(r, c.num_classes);
    read_aux(r, c, b.norm, b.thresholds, b.labels);
    return b;
}

ModelBundle decode_model(const std::vector<std::uint8_t>& bytes) {
    if (is_quantized_file(bytes)) return dequantize(decode_quantized(bytes));

    Reader r(bytes);
    bool quantized = false;
    ModelBundle b;
    b.config = read_header(r, quantized);
    const auto& c = b.config;
    b.cell.W = Matrix(c.hidden_dim, c.input_dim);
    b.cell.U = Matrix(c.hidden_dim, c.hidden_dim);
    b.cell.b_z.resize(c.hidden_dim);
    b.cell.b_h.resize(c.hidden_dim);
    read_f32_tensor(r, b.cell.W.data(), b.cell.W.size());
    read_f32_tensor(r, b.cell.U.data(), b.cell.U.size());
    read_f32_tensor(r, b.cell.b_z.data(), b.cell.b_z.size());
    read_f32_tensor(r, b.cell.b_h.data(), b.cell.b_h.size());
    b.cell.zeta_raw = r.f32();
    b.cell.nu_raw = r.f32();
    b.fc.W_fc = Matrix(c.num_classes, c.hidden_dim);
    b.fc.b_fc.resize(c.num_classes);
    read_f32_tensor(r, b.fc.W_fc.data(), b.fc.W_fc.size());
    read_f32_tensor(r, b.fc.b_fc.data(), b.fc.b_fc.size());
    read_aux(r, c, b.norm, b.thresholds, b.labels);
    check_bundle_shapes(b);
    return b;
}

ModelBundle load_model(const std::string& path) { return decode_model(read_file(path)); }

QuantizedBundle load_quantized(const std::string& path) {
    return decode_quantized(read_file(path));
}

QuantizedBundle quantize_int8(const ModelBundle& bundle) {
    check_bundle_shapes(bundle);
    QuantizedBundle q;
    q.config = bundle.config;
    q.W = quantize_tensor(bundle.cell.W.data(), bundle.cell.W.size());
    q.U = quantize_tensor(bundle.cell.U.data(), bundle.cell.U.size());
    q.b_z = quantize_tensor(bundle.cell.b_z.data(), bundle.cell.b_z.size());
    q.b_h = quantize_tensor(bundle.cell.b_h.data(), bundle.cell.b_h.size());
    q.zeta_raw = quantize_tensor(&bundle.cell.zeta_raw, 1);
    q.nu_raw = quantize_tensor(&bundle.cell.nu_raw, 1);
    q.W_fc = quantize_tensor(bundle.fc.W_fc.data(), bundle.fc.W_fc.size());
    q.b_fc = quantize_tensor(bundle.fc.b_fc.data(), bundle.fc.b_fc.size());
    q.norm = bundle.norm;
    q.thresholds = bundle.thresholds;
    q.labels = bundle.labels;
    return q;
}

ModelBundle dequantize(const QuantizedBundle& bundle) {
    ModelBundle b;
    b.config = bundle.config;
    const auto& c = b.config;
    b.cell.W = Matrix(c.hidden_dim, c.input_dim);
    b.cell.U = Matrix(c.hidden_dim, c.hidden_dim);
    b.cell.b_z.resize(c.hidden_dim);
    b.cell.b_h.resize(c.hidden_dim);
    dequantize_tensor(bundle.W, b.cell.W.data(), b.cell.W.size());
    dequantize_tensor(bundle.U, b.cell.U.data(), b.cell.U.size());
    dequantize_tensor(bundle.b_z, b.cell.b_z.data(), b.cell.b_z.size());
    dequantize_tensor(bundle.b_h, b.cell.b_h.data(), b.cell.b_h.size());
    dequantize_tensor(bundle.zeta_raw, &b.cell.zeta_raw, 1);
    dequantize_tensor(bundle.nu_raw, &b.cell.nu_raw, 1);
    b.fc.W_fc = Matrix(c.num_classes, c.hidden_dim);
    b.fc.b_fc.resize(c.num_classes);
    dequantize_tensor(bundle.W_fc, b.fc.W_fc.data(), b.fc.W_fc.size());
    dequantize_tensor(bundle.b_fc, b.fc.b_fc.data(), b.fc.b_fc.size());
    b.norm = bundle.norm;
    b.thresholds = bundle.thresholds;
    b.labels = bundle.labels;
    check_bundle_shapes(b);
    return b;
}

namespace {

SizeReport make_report(const ModelConfig& c, bool quantized, const NormStats& norm,
                       const ClassThresholds& thresholds,
                       const std::vector<std::string>& labels) {
    const std::size_t H = c.hidden_dim, D = c.input_dim, C = c.num_classes;
    SizeReport rep;
    rep.header_bytes = 16;
    auto tensor_bytes = [&](std::size_t n) { return quantized ? 4 + n : 4 * n; };
    rep.tensors = {
        {"W", tensor_bytes(H * D)},       {"U", tensor_bytes(H * H)},
        {"b_z", tensor_bytes(H)},         {"b_h", tensor_bytes(H)},
        {"zeta_raw", tensor_bytes(1)},    {"nu_raw", tensor_bytes(1)},
        {"W_fc", tensor_bytes(C * H)},    {"b_fc", tensor_bytes(C)},
    };
    for (const auto& t : rep.tensors) rep.core_bytes += t.bytes;
    rep.aux_bytes = 4 * (norm.mean.size() + norm.std.size() + thresholds.tau.size()) +
                    labels_bytes(labels);
    rep.total_bytes = rep.header_bytes + rep.core_bytes + rep.aux_bytes;
    rep.parameter_count = count_parameters(c);
    return rep;
}

}  // namespace

SizeReport size_report(const ModelBundle& bundle) {
    return make_report(bundle.config, false, bundle.norm, bundle.thresholds, bundle.labels);
}

SizeReport size_report(const QuantizedBundle& bundle) {
    return make_report(bundle.config, true, bundle.norm, bundle.thresholds, bundle.labels);
}

}  // namespace fgrnn
