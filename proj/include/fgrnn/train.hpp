#pragma once

#include <cstdint>
#include <vector>

#include "fgrnn/features.hpp"
#include "fgrnn/model.hpp"

namespace fgrnn {

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 200;
    std::uint64_t rng_seed = 42;
    double train_fraction = 0.8;
    std::size_t patience = 10;
    double grad_clip_norm = 5.0;
};

struct LabeledExample {
    MfccSequence seq;
    int label = 0;
};

// Gradient of the batch-mean cross-entropy w.r.t. every parameter.
struct Gradients {
    Matrix dW;
    Matrix dU;
    std::vector<double> db_z;
    std::vector<double> db_h;
    double dzeta_raw = 0.0;
    double dnu_raw = 0.0;
    Matrix dW_fc;
    std::vector<double> db_fc;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
};

NormStats fit_norm_stats(const std::vector<MfccSequence>& features);

MfccSequence apply_norm(const NormStats& stats, const MfccSequence& seq);

double cross_entropy(const ClassProbs& probs, int label);

// Backpropagation through the unrolled sequence. W and U gradients
// accumulate both the gate and candidate paths at every timestep;
// zeta/nu gradients chain through their sigmoid reparameterization.
// Returns the mean gradient; mean loss goes to *loss_out when non-null.
Gradients backprop_batch(const FastGrnnParams& cell, const FcParams& fc,
                         const std::vector<const LabeledExample*>& batch,
                         double* loss_out = nullptr);

// Standard Adam with bias correction over the flattened parameter vector.
void adam_step(FastGrnnParams& cell, FcParams& fc, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainResult {
    ModelBundle bundle;
    std::vector<double> train_losses;  // per epoch
    std::vector<double> val_losses;
    double best_val_loss = 0.0;
    double best_val_accuracy = 0.0;
};

// Seeded shuffle/split, Z-score stats on the train split only, minibatch
// Adam with gradient clipping, early stopping on validation loss.
TrainResult train_model_full(const TrainConfig& cfg, const FeatureFile& dataset);
ModelBundle train_model(const TrainConfig& cfg, const FeatureFile& dataset);

// Mean softmax output over the segments of one clip.
ClassProbs aggregate_clip_probs(const ModelBundle& model,
                                const std::vector<const MfccSequence*>& segments);

// tau[c] = mean aggregated P(c) over the clips labeled c.
ClassThresholds calibrate_thresholds(const ModelBundle& model, const FeatureFile& train_data);

}  // namespace fgrnn
