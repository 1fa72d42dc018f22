#pragma once

#include <string>
#include <vector>

#include "dynbd/tape.hpp"
#include "dynbd/tensor.hpp"
#include "dynbd/util.hpp"

namespace dynbd {

struct Param {
    std::string name;
    Tensor value;
};

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), seeded.
Tensor init_uniform(int rows, int cols, int fan_in, Rng& rng);

// y = act(x . w + b). Pass b = -1 for no bias. Records on the tape.
Tape::Id linear_forward(Tape& tape, Tape::Id x, Tape::Id w, Tape::Id b, Act act);

// Runs a single LSTM layer over a sequence of inputs (each rows x in_dim,
// rows acting as the batch). Initial hidden and cell states are zero.
// Returns the hidden state h_t for every step.
std::vector<Tape::Id> lstm_forward(Tape& tape, std::span<const Tape::Id> sequence,
                                   Tape::Id wx, Tape::Id wh, Tape::Id b);

// Mean of squared elementwise differences, off-tape convenience.
double mse_value(const Tensor& pred, const Tensor& target);

struct AdamConfig {
    double lr = 0.01;
    double weight_decay = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction; weight decay enters as an L2 term added to the
// gradient. Moments are lazily shaped from the first step.
class Adam {
public:
    explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

    void step(std::vector<Param>& params, const std::vector<Tensor>& grads);
    long step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<Tensor> m_, v_;
    long step_ = 0;
};

// Flat binary checkpoint: magic, version, tensor count, then per tensor a
// name, the shape, and the f64 payload.
void save_tensors(const std::string& path, const std::vector<Param>& params);
std::vector<Param> load_tensors(const std::string& path);

// FNV-1a over the parameter bytes; used to assert a model was not touched.
uint64_t param_checksum(const std::vector<Param>& params);

} // namespace dynbd
