#include "fgrnn/grnn.hpp"

#include <algorithm>
#include <cmath>

namespace fgrnn {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double FastGrnnParams::zeta() const { return sigmoid(zeta_raw); }
double FastGrnnParams::nu() const { return sigmoid(nu_raw); }

FastGrnnParams init_cell(const ModelConfig& cfg, std::mt19937_64& rng) {
    FastGrnnParams p;
    p.W = Matrix(cfg.hidden_dim, cfg.input_dim);
    p.U = Matrix(cfg.hidden_dim, cfg.hidden_dim);
    p.b_z.assign(cfg.hidden_dim, 0.0);
    p.b_h.assign(cfg.hidden_dim, 0.0);
    const double wb = 1.0 / std::sqrt(static_cast<double>(cfg.input_dim));
    const double ub = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_dim));
    std::uniform_real_distribution<double> wd(-wb, wb), ud(-ub, ub);
    for (double& v : p.W.raw()) v = wd(rng);
    for (double& v : p.U.raw()) v = ud(rng);
    return p;
}

FcParams init_fc(const ModelConfig& cfg, std::mt19937_64& rng) {
    FcParams fc;
    fc.W_fc = Matrix(cfg.num_classes, cfg.hidden_dim);
    fc.b_fc.assign(cfg.num_classes, 0.0);
    const double b = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_dim));
    std::uniform_real_distribution<double> d(-b, b);
    for (double& v : fc.W_fc.raw()) v = d(rng);
    return fc;
}

std::vector<double> cell_step(const FastGrnnParams& params, const std::vector<double>& x_t,
                              const std::vector<double>& h_prev) {
    const std::size_t H = params.W.rows();
    if (x_t.size() != params.W.cols() || h_prev.size() != H || params.U.rows() != H ||
        params.U.cols() != H || params.b_z.size() != H || params.b_h.size() != H)
        throw DimensionMismatch("cell_step: shape mismatch");

    const double zeta = params.zeta();
    const double nu = params.nu();

    std::vector<double> h(H);
    for (std::size_t i = 0; i < H; ++i) {
        double pre = 0.0;  // shared W x_t + U h_prev
        for (std::size_t j = 0; j < params.W.cols(); ++j) pre += params.W(i, j) * x_t[j];
        for (std::size_t j = 0; j < H; ++j) pre += params.U(i, j) * h_prev[j];
        const double z = sigmoid(pre + params.b_z[i]);
        const double c = std::tanh(pre + params.b_h[i]);
        h[i] = (zeta * (1.0 - z) + nu) * c + z * h_prev[i];
    }
    return h;
}

std::vector<double> forward_sequence(const FastGrnnParams& params, const MfccSequence& seq) {
    if (seq.coeffs.cols() != params.W.cols())
        throw DimensionMismatch("forward_sequence: input width != cell input dim");
    std::vector<double> h(params.W.rows(), 0.0);
    std::vector<double> x(seq.coeffs.cols());
    for (std::size_t t = 0; t < seq.coeffs.rows(); ++t) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = seq.coeffs(t, j);
        h = cell_step(params, x, h);
    }
    return h;
}

std::vector<double> fc_logits(const FcParams& fc, const std::vector<double>& h) {
    if (h.size() != fc.W_fc.cols() || fc.b_fc.size() != fc.W_fc.rows())
        throw DimensionMismatch("fc_logits: shape mismatch");
    auto logits = matvec(fc.W_fc, h);
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += fc.b_fc[i];
    return logits;
}

ClassProbs softmax(const std::vector<double>& logits) {
    for (double v : logits)
        if (!std::isfinite(v)) throw NonFiniteInput("softmax: non-finite logit");
    const double m = *std::max_element(logits.begin(), logits.end());
    ClassProbs out;
    out.probs.resize(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out.probs[i] = std::exp(logits[i] - m);
        sum += out.probs[i];
    }
    for (double& p : out.probs) p /= sum;
    return out;
}

std::size_t count_parameters(const ModelConfig& cfg, bool include_fc) {
    const std::size_t H = cfg.hidden_dim, D = cfg.input_dim, C = cfg.num_classes;
    std::size_t n = H * D + H * H + H + H + 2;
    if (include_fc) n += C * H + C;
    return n;
}

}  // namespace fgrnn
