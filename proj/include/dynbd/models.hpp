#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynbd/graph.hpp"
#include "dynbd/nn.hpp"
#include "dynbd/tape.hpp"

namespace dynbd {

enum class Family { ddne, dynae, dynrnn, dynaernn, elstmd };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Unit counts and optimizer settings per family. decoder_units.back() must
// equal the node count. dynae runs a plain MLP over the concatenated window
// rows (no recurrent stage); dynrnn runs the recurrent stack directly over
// adjacency rows (no encoder); the remaining families use
// encoder -> LSTM -> decoder. Hidden activations are ReLU, the final decoder
// layer is sigmoid.
struct ArchSpec {
    Family family = Family::ddne;
    std::vector<int> encoder_units;
    std::vector<int> recurrent_units;
    std::vector<int> decoder_units;
    double lr = 0.01;
    double weight_decay = 0.0005;
};

// Published presets: 128-unit stacks with lr 0.01 for small graphs, 256-unit
// stacks with lr 0.001 for large ones.
ArchSpec preset_arch(Family f, int n_nodes, bool large = false);
// Same wiring scaled to `units` hidden width; used for toy corpora and tests.
ArchSpec scaled_arch(Family f, int n_nodes, int units);

// Encoder/recurrent/decoder network predicting the next adjacency snapshot
// row-wise: row u of the output depends on row u of each window snapshot.
struct DLPModel {
    ArchSpec spec;
    int n_nodes = 0;
    int window = 0;
    uint64_t init_seed = 0;
    int trained_epochs = 0;
    std::vector<Param> params;
};

DLPModel build_model(const ArchSpec& spec, int n_nodes, int window, uint64_t seed);

// Tape ids for the model parameters, parallel to model.params.
struct ModelBinding {
    std::vector<Tape::Id> ids;
};
ModelBinding bind_params(Tape& tape, const DLPModel& model, bool trainable);

// Forward pass over window steps (each rows x N, rows acting as a batch of
// stacked sample rows). Returns scores in [0,1] of shape rows x N.
Tape::Id model_forward(Tape& tape, const DLPModel& model, const ModelBinding& binding,
                       std::span<const Tape::Id> window_steps);

// Per-entry probability scores for the next snapshot, N x N.
Tensor predict(const DLPModel& model, const Sample& sample);
Tensor binarize(const Tensor& scores, double threshold = 0.5);
double link_score(const DLPModel& model, const Sample& sample, int u, int v);

struct TrainOptions {
    int chunk_samples = 8; // max samples per tape
    int batch_size = 0;    // 0 = full batch per step; otherwise minibatch
    bool verbose = false;
};

// Adam on MSE between predicted and true next snapshots. With batch_size=0,
// `steps` counts epochs (one full-batch update each); otherwise it counts
// minibatch iterations. Returns the per-step loss history.
std::vector<double> train_model(DLPModel& model, std::span<const Sample> samples,
                                int steps, uint64_t seed, const TrainOptions& opts = {});

// Clean pre-training (the published protocol trains 100 epochs).
inline std::vector<double> train_clean(DLPModel& model, std::span<const Sample> samples,
                                       int epochs, uint64_t seed,
                                       const TrainOptions& opts = {}) {
    return train_model(model, samples, epochs, seed, opts);
}

// AUC of scores on each test label snapshot, averaged over samples. With
// n_pairs = 0 every (existing, non-existing) pair is compared exhaustively;
// otherwise n_pairs random comparisons are drawn per snapshot. Diagonal
// entries are excluded. Degenerate labels (all ones / all zeros) are skipped
// with a warning.
double evaluate_auc(const DLPModel& model, std::span<const Sample> samples,
                    int64_t n_pairs = 0, uint64_t seed = 0);

// Score-level AUC core shared by evaluate_auc and the test oracles.
double auc_from_scores(std::span<const double> positive, std::span<const double> negative,
                       int64_t n_pairs = 0, uint64_t seed = 0);

// Model checkpoint: a named-tensor block plus architecture metadata.
void save_model(const std::string& path, const DLPModel& model);
DLPModel load_model(const std::string& path);

} // namespace dynbd
