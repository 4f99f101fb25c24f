#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fgrnn/dsp.hpp"
#include "fgrnn/matrix.hpp"

namespace fgrnn {

struct ModelConfig {
    std::size_t input_dim = 13;
    std::size_t hidden_dim = 26;
    std::size_t num_classes = 6;
    std::size_t seq_len = 26;
};

// Gated recurrent cell sharing W and U between gate and candidate.
// zeta/nu are stored unconstrained and squashed through a sigmoid.
struct FastGrnnParams {
    Matrix W;                  // H x D
    Matrix U;                  // H x H
    std::vector<double> b_z;   // H
    std::vector<double> b_h;   // H
    double zeta_raw = 4.0;     // sigmoid -> ~0.982
    double nu_raw = -4.0;      // sigmoid -> ~0.018

    double zeta() const;
    double nu() const;
};

struct FcParams {
    Matrix W_fc;               // C x H
    std::vector<double> b_fc;  // C
};

struct ClassProbs {
    std::vector<double> probs;
};

double sigmoid(double x);

// Scaled uniform init for W and U, zero biases.
FastGrnnParams init_cell(const ModelConfig& cfg, std::mt19937_64& rng);
FcParams init_fc(const ModelConfig& cfg, std::mt19937_64& rng);

// One recurrence step:
//   z = sigmoid(W x + U h + b_z)
//   c = tanh(W x + U h + b_h)
//   h' = (zeta (1 - z) + nu) .* c + z .* h
// W x + U h is computed once and shared between gate and candidate.
std::vector<double> cell_step(const FastGrnnParams& params, const std::vector<double>& x_t,
                              const std::vector<double>& h_prev);

// Unrolls cell_step over the rows of seq starting from h = 0.
std::vector<double> forward_sequence(const FastGrnnParams& params, const MfccSequence& seq);

std::vector<double> fc_logits(const FcParams& fc, const std::vector<double>& h);

ClassProbs softmax(const std::vector<double>& logits);

// H*D + H*H + 2H + 2 + (C*H + C); 1230 at the default config.
std::size_t count_parameters(const ModelConfig& cfg, bool include_fc = true);

}  // namespace fgrnn
