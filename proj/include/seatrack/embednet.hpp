#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatrack/image.hpp"
#include "seatrack/triplets.hpp"

namespace seatrack {

enum class Architecture { FcOnly, Conv };

std::string to_string(Architecture a);
Architecture parse_architecture(const std::string& s);

// Embedding network shape. CONV: conv 5x5/stride 2 -> ReLU -> conv 3x3/
// stride 2 -> ReLU -> linear(E). FC_ONLY: linear(H) -> ReLU -> linear(E).
// Both end in L2 normalization. Convolutions zero-pad by kernel/2, so each
// halves the side length (rounding up).
struct NetConfig {
    Architecture architecture = Architecture::Conv;
    int patch_resolution = 24;
    int conv1_channels = 8;
    int conv2_channels = 16;
    int hidden_units = 64;
    int embedding_dim = 32;
    double margin = 1.0;

    static constexpr int kConv1Kernel = 5;
    static constexpr int kConv2Kernel = 3;
    static constexpr int kStride = 2;

    int conv1_side() const { return (patch_resolution + 1) / 2; }
    int conv2_side() const { return (conv1_side() + 1) / 2; }
    size_t parameter_count() const;
    void validate() const;

    bool operator==(const NetConfig&) const = default;
};

// Desk-scale and full-scale convolutional presets.
NetConfig desk_conv_config();
NetConfig full_conv_config();

struct ParamBlock {
    std::string name;
    size_t offset = 0;
    size_t size = 0;
};

std::vector<ParamBlock> parameter_layout(const NetConfig& cfg);

// Flat parameter vector, laid out per parameter_layout().
struct Weights {
    std::vector<double> values;

    bool operator==(const Weights&) const = default;
};

// Glorot-uniform weights, zero biases.
Weights init_weights(const NetConfig& cfg, uint64_t seed);
void check_weights(const NetConfig& cfg, const Weights& w);

using Embedding = std::vector<double>;

Embedding forward(const NetConfig& cfg, const Weights& weights, const Patch& patch);
std::vector<Embedding> forward_batch(const NetConfig& cfg, const Weights& weights,
                                     std::span<const Patch> patches);

// Every ReLU input of the forward pass, in layer order.
std::vector<double> preactivations(const NetConfig& cfg, const Weights& weights, const Patch& patch);

double squared_distance(std::span<const double> a, std::span<const double> b);

// max(d(a,p) - d(a,n) + margin, 0) with d the squared Euclidean distance.
double triplet_loss(std::span<const double> anchor, std::span<const double> positive,
                    std::span<const double> negative, double margin);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};

// Mean triplet loss over the batch and its exact gradient with respect to
// the shared weights. ReLU subgradient at zero is zero; a triplet sitting
// exactly on the hinge counts as clamped.
LossGradient backward(const NetConfig& cfg, const Weights& weights, std::span<const Triplet> batch);

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
    int epochs = 10;
    int batch_size = 32;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    uint64_t seed = 0;
    std::filesystem::path log_path;  // CSV epoch,step,mean_loss; empty = none

    void validate() const;
};

struct TrainLogEntry {
    int epoch = 0;
    int step = 0;
    double mean_loss = 0.0;
};

struct TrainResult {
    Weights weights;
    std::vector<TrainLogEntry> log;

    double epoch_mean_loss(int epoch) const;
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(const std::string& msg, Weights last_good, std::vector<TrainLogEntry> log)
        : std::runtime_error(msg), last_good_(std::move(last_good)), log_(std::move(log)) {}
    const Weights& last_good() const { return last_good_; }
    const std::vector<TrainLogEntry>& log() const { return log_; }

private:
    Weights last_good_;
    std::vector<TrainLogEntry> log_;
};

// Trains from init_weights(cfg, train_cfg.seed).
TrainResult train(const NetConfig& cfg, const TrainConfig& train_cfg, std::span<const Triplet> dataset);
// Trains from the given starting weights.
TrainResult train_from(const NetConfig& cfg, const TrainConfig& train_cfg, std::span<const Triplet> dataset,
                       Weights initial);

std::string format_train_log(const std::vector<TrainLogEntry>& log);

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Checkpoint {
    NetConfig config;
    Weights weights;
};

std::vector<uint8_t> serialize_checkpoint(const NetConfig& cfg, const Weights& weights);
Checkpoint deserialize_checkpoint(std::span<const uint8_t> bytes, const std::string& source = "<memory>");
void save_weights(const std::filesystem::path& path, const NetConfig& cfg, const Weights& weights);
Checkpoint load_weights(const std::filesystem::path& path);
// Fails with CheckpointError when the stored config differs from `expected`.
Checkpoint load_weights(const std::filesystem::path& path, const NetConfig& expected);

}  // namespace seatrack
