#include "seatrack/embednet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "seatrack/io.hpp"
#include "seatrack/rng.hpp"

namespace seatrack {

std::string to_string(Architecture a) { return a == Architecture::Conv ? "CONV" : "FC_ONLY"; }

Architecture parse_architecture(const std::string& s) {
    if (s == "CONV" || s == "conv") return Architecture::Conv;
    if (s == "FC_ONLY" || s == "fc_only" || s == "fc") return Architecture::FcOnly;
    throw std::invalid_argument("unknown architecture '" + s + "' (expected CONV or FC_ONLY)");
}

NetConfig desk_conv_config() { return NetConfig{}; }

NetConfig full_conv_config() {
    NetConfig cfg;
    cfg.conv1_channels = 128;
    cfg.conv2_channels = 256;
    cfg.embedding_dim = 512;
    cfg.margin = 1.0;
    return cfg;
}

void NetConfig::validate() const {
    if (patch_resolution < 2) throw std::invalid_argument("NetConfig: patch_resolution must be >= 2");
    if (embedding_dim < 2) throw std::invalid_argument("NetConfig: embedding_dim must be >= 2");
    if (!(margin > 0.0) || !std::isfinite(margin)) throw std::invalid_argument("NetConfig: margin must be > 0");
    if (architecture == Architecture::Conv) {
        if (conv1_channels < 1 || conv2_channels < 1)
            throw std::invalid_argument("NetConfig: channel counts must be >= 1");
        if (conv2_side() < 1) throw std::invalid_argument("NetConfig: patch too small for two strided convolutions");
    } else if (hidden_units < 1) {
        throw std::invalid_argument("NetConfig: hidden_units must be >= 1");
    }
}

std::vector<ParamBlock> parameter_layout(const NetConfig& cfg) {
    std::vector<ParamBlock> blocks;
    size_t offset = 0;
    auto add = [&](std::string name, size_t size) {
        blocks.push_back({std::move(name), offset, size});
        offset += size;
    };
    const size_t E = static_cast<size_t>(cfg.embedding_dim);
    if (cfg.architecture == Architecture::Conv) {
        const size_t c1 = static_cast<size_t>(cfg.conv1_channels);
        const size_t c2 = static_cast<size_t>(cfg.conv2_channels);
        const size_t s2 = static_cast<size_t>(cfg.conv2_side());
        add("conv1.weight", c1 * NetConfig::kConv1Kernel * NetConfig::kConv1Kernel);
        add("conv1.bias", c1);
        add("conv2.weight", c2 * c1 * NetConfig::kConv2Kernel * NetConfig::kConv2Kernel);
        add("conv2.bias", c2);
        add("fc.weight", E * c2 * s2 * s2);
        add("fc.bias", E);
    } else {
        const size_t in = static_cast<size_t>(cfg.patch_resolution) * cfg.patch_resolution;
        const size_t H = static_cast<size_t>(cfg.hidden_units);
        add("fc1.weight", H * in);
        add("fc1.bias", H);
        add("fc2.weight", E * H);
        add("fc2.bias", E);
    }
    return blocks;
}

size_t NetConfig::parameter_count() const {
    const auto blocks = parameter_layout(*this);
    return blocks.back().offset + blocks.back().size;
}

Weights init_weights(const NetConfig& cfg, uint64_t seed) {
    cfg.validate();
    Weights w;
    w.values.assign(cfg.parameter_count(), 0.0);
    Rng rng(derive_seed(seed, {0x5745494748ULL}));
    const auto blocks = parameter_layout(cfg);
    auto glorot = [&](const ParamBlock& b, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (size_t i = 0; i < b.size; ++i) w.values[b.offset + i] = rng.uniform(-limit, limit);
    };
    if (cfg.architecture == Architecture::Conv) {
        const double k1 = NetConfig::kConv1Kernel * NetConfig::kConv1Kernel;
        const double k2 = NetConfig::kConv2Kernel * NetConfig::kConv2Kernel;
        const double s2 = cfg.conv2_side();
        glorot(blocks[0], k1, cfg.conv1_channels * k1);
        glorot(blocks[2], cfg.conv1_channels * k2, cfg.conv2_channels * k2);
        glorot(blocks[4], cfg.conv2_channels * s2 * s2, cfg.embedding_dim);
    } else {
        const double in = static_cast<double>(cfg.patch_resolution) * cfg.patch_resolution;
        glorot(blocks[0], in, cfg.hidden_units);
        glorot(blocks[2], cfg.hidden_units, cfg.embedding_dim);
    }
    return w;
}

void check_weights(const NetConfig& cfg, const Weights& w) {
    if (w.values.size() != cfg.parameter_count())
        throw std::invalid_argument("weights length " + std::to_string(w.values.size()) +
                                    " does not match config (" + std::to_string(cfg.parameter_count()) + ")");
    for (const auto& block : parameter_layout(cfg))
        for (size_t i = 0; i < block.size; ++i)
            if (!std::isfinite(w.values[block.offset + i]))
                throw std::invalid_argument("non-finite weight in " + block.name);
}

namespace {

constexpr double kNormFloor = 1e-12;

struct ConvShape {
    int in_channels;
    int in_side;
    int out_channels;
    int kernel;
    int out_side;

    int pad() const { return kernel / 2; }
};

void conv_forward(const std::vector<double>& in, const double* weight, const double* bias, const ConvShape& s,
                  std::vector<double>& out) {
    const int k = s.kernel, pad = s.pad(), ins = s.in_side, outs = s.out_side;
    out.assign(static_cast<size_t>(s.out_channels) * outs * outs, 0.0);
    for (int oc = 0; oc < s.out_channels; ++oc) {
        double* o = out.data() + static_cast<size_t>(oc) * outs * outs;
        for (int i = 0; i < outs * outs; ++i) o[i] = bias[oc];
        for (int ic = 0; ic < s.in_channels; ++ic) {
            const double* src = in.data() + static_cast<size_t>(ic) * ins * ins;
            const double* wk = weight + (static_cast<size_t>(oc) * s.in_channels + ic) * k * k;
            for (int oy = 0; oy < outs; ++oy) {
                for (int ox = 0; ox < outs; ++ox) {
                    double acc = 0.0;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * NetConfig::kStride + ky - pad;
                        if (iy < 0 || iy >= ins) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * NetConfig::kStride + kx - pad;
                            if (ix < 0 || ix >= ins) continue;
                            acc += wk[ky * k + kx] * src[iy * ins + ix];
                        }
                    }
                    o[oy * outs + ox] += acc;
                }
            }
        }
    }
}

// Accumulates parameter gradients; writes the input gradient when `din` is
// non-null.
void conv_backward(const std::vector<double>& in, const double* weight, const std::vector<double>& dout,
                   const ConvShape& s, double* dweight, double* dbias, std::vector<double>* din) {
    const int k = s.kernel, pad = s.pad(), ins = s.in_side, outs = s.out_side;
    if (din) din->assign(in.size(), 0.0);
    for (int oc = 0; oc < s.out_channels; ++oc) {
        const double* g = dout.data() + static_cast<size_t>(oc) * outs * outs;
        double bsum = 0.0;
        for (int i = 0; i < outs * outs; ++i) bsum += g[i];
        dbias[oc] += bsum;
        for (int ic = 0; ic < s.in_channels; ++ic) {
            const double* src = in.data() + static_cast<size_t>(ic) * ins * ins;
            const size_t woff = (static_cast<size_t>(oc) * s.in_channels + ic) * k * k;
            const double* wk = weight + woff;
            double* dwk = dweight + woff;
            double* dsrc = din ? din->data() + static_cast<size_t>(ic) * ins * ins : nullptr;
            for (int oy = 0; oy < outs; ++oy) {
                for (int ox = 0; ox < outs; ++ox) {
                    const double go = g[oy * outs + ox];
                    if (go == 0.0) continue;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * NetConfig::kStride + ky - pad;
                        if (iy < 0 || iy >= ins) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * NetConfig::kStride + kx - pad;
                            if (ix < 0 || ix >= ins) continue;
                            dwk[ky * k + kx] += go * src[iy * ins + ix];
                            if (dsrc) dsrc[iy * ins + ix] += go * wk[ky * k + kx];
                        }
                    }
                }
            }
        }
    }
}

void linear_forward(const std::vector<double>& in, const double* weight, const double* bias, size_t out_dim,
                    std::vector<double>& out) {
    const size_t n = in.size();
    out.resize(out_dim);
    for (size_t o = 0; o < out_dim; ++o) {
        const double* row = weight + o * n;
        double acc = bias[o];
        for (size_t i = 0; i < n; ++i) acc += row[i] * in[i];
        out[o] = acc;
    }
}

void linear_backward(const std::vector<double>& in, const double* weight, const std::vector<double>& dout,
                     double* dweight, double* dbias, std::vector<double>* din) {
    const size_t n = in.size();
    if (din) din->assign(n, 0.0);
    for (size_t o = 0; o < dout.size(); ++o) {
        const double g = dout[o];
        dbias[o] += g;
        if (g == 0.0) continue;
        double* drow = dweight + o * n;
        const double* row = weight + o * n;
        for (size_t i = 0; i < n; ++i) drow[i] += g * in[i];
        if (din)
            for (size_t i = 0; i < n; ++i) (*din)[i] += g * row[i];
    }
}

void relu(std::vector<double>& v) {
    for (double& x : v) x = x > 0.0 ? x : 0.0;
}

// Masks the upstream gradient by the ReLU subgradient (0 at 0).
void relu_backward(const std::vector<double>& pre, std::vector<double>& grad) {
    for (size_t i = 0; i < grad.size(); ++i)
        if (!(pre[i] > 0.0)) grad[i] = 0.0;
}

void check_finite(const std::vector<double>& v, const char* layer) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string("non-finite activation in ") + layer);
}

struct Trace {
    std::vector<double> input;
    std::vector<double> z1, a1;  // first layer pre/post activation
    std::vector<double> z2, a2;  // second conv (CONV only)
    std::vector<double> v;       // pre-normalization embedding
    std::vector<double> y;       // normalized embedding
    double norm = 0.0;
    double denom = 1.0;
};

ConvShape conv1_shape(const NetConfig& cfg) {
    return {1, cfg.patch_resolution, cfg.conv1_channels, NetConfig::kConv1Kernel, cfg.conv1_side()};
}
ConvShape conv2_shape(const NetConfig& cfg) {
    return {cfg.conv1_channels, cfg.conv1_side(), cfg.conv2_channels, NetConfig::kConv2Kernel, cfg.conv2_side()};
}

void run_forward(const NetConfig& cfg, const std::vector<ParamBlock>& blocks, const Weights& w, const Patch& patch,
                 Trace& t) {
    if (patch.resolution != cfg.patch_resolution)
        throw std::invalid_argument("patch resolution " + std::to_string(patch.resolution) +
                                    " does not match network input " + std::to_string(cfg.patch_resolution));
    const double* p = w.values.data();
    t.input = patch.data;
    if (cfg.architecture == Architecture::Conv) {
        conv_forward(t.input, p + blocks[0].offset, p + blocks[1].offset, conv1_shape(cfg), t.z1);
        check_finite(t.z1, "conv1");
        t.a1 = t.z1;
        relu(t.a1);
        conv_forward(t.a1, p + blocks[2].offset, p + blocks[3].offset, conv2_shape(cfg), t.z2);
        check_finite(t.z2, "conv2");
        t.a2 = t.z2;
        relu(t.a2);
        linear_forward(t.a2, p + blocks[4].offset, p + blocks[5].offset, static_cast<size_t>(cfg.embedding_dim), t.v);
        check_finite(t.v, "fc");
    } else {
        linear_forward(t.input, p + blocks[0].offset, p + blocks[1].offset, static_cast<size_t>(cfg.hidden_units), t.z1);
        check_finite(t.z1, "fc1");
        t.a1 = t.z1;
        relu(t.a1);
        linear_forward(t.a1, p + blocks[2].offset, p + blocks[3].offset, static_cast<size_t>(cfg.embedding_dim), t.v);
        check_finite(t.v, "fc2");
    }
    double sq = 0.0;
    for (double x : t.v) sq += x * x;
    t.norm = std::sqrt(sq);
    t.denom = t.norm < kNormFloor ? t.norm + kNormFloor : t.norm;
    t.y.resize(t.v.size());
    for (size_t i = 0; i < t.v.size(); ++i) t.y[i] = t.v[i] / t.denom;
}

// Backpropagates dL/dy through one branch, accumulating into `grad`.
void run_backward(const NetConfig& cfg, const std::vector<ParamBlock>& blocks, const Weights& w, const Trace& t,
                  const std::vector<double>& dy, double* grad) {
    // y = v / d(v), d = |v| (+ floor when tiny)
    double vg = 0.0;
    for (size_t i = 0; i < dy.size(); ++i) vg += t.v[i] * dy[i];
    std::vector<double> dv(dy.size());
    for (size_t i = 0; i < dy.size(); ++i) {
        dv[i] = dy[i] / t.denom;
        if (t.norm > 0.0) dv[i] -= t.v[i] * vg / (t.norm * t.denom * t.denom);
    }
    const double* p = w.values.data();
    if (cfg.architecture == Architecture::Conv) {
        std::vector<double> da2, da1;
        linear_backward(t.a2, p + blocks[4].offset, dv, grad + blocks[4].offset, grad + blocks[5].offset, &da2);
        relu_backward(t.z2, da2);
        conv_backward(t.a1, p + blocks[2].offset, da2, conv2_shape(cfg), grad + blocks[2].offset,
                      grad + blocks[3].offset, &da1);
        relu_backward(t.z1, da1);
        conv_backward(t.input, p + blocks[0].offset, da1, conv1_shape(cfg), grad + blocks[0].offset,
                      grad + blocks[1].offset, nullptr);
    } else {
        std::vector<double> da1;
        linear_backward(t.a1, p + blocks[2].offset, dv, grad + blocks[2].offset, grad + blocks[3].offset, &da1);
        relu_backward(t.z1, da1);
        linear_backward(t.input, p + blocks[0].offset, da1, grad + blocks[0].offset, grad + blocks[1].offset,
                        nullptr);
    }
}

LossGradient backward_indexed(const NetConfig& cfg, const Weights& weights, std::span<const Triplet> data,
                              std::span<const size_t> indices) {
    if (indices.empty()) throw std::invalid_argument("backward: empty batch");
    check_weights(cfg, weights);
    const auto blocks = parameter_layout(cfg);
    LossGradient out;
    out.gradient.assign(weights.values.size(), 0.0);
    Trace ta, tp, tn;
    const size_t E = static_cast<size_t>(cfg.embedding_dim);
    std::vector<double> ga(E), gp(E), gn(E);
    for (size_t idx : indices) {
        const Triplet& tr = data[idx];
        run_forward(cfg, blocks, weights, tr.anchor, ta);
        run_forward(cfg, blocks, weights, tr.positive, tp);
        run_forward(cfg, blocks, weights, tr.negative, tn);
        const double l = triplet_loss(ta.y, tp.y, tn.y, cfg.margin);
        out.loss += l;
        if (!(l > 0.0)) continue;
        // L = |a-p|^2 - |a-n|^2 + margin
        for (size_t i = 0; i < E; ++i) {
            ga[i] = 2.0 * (tn.y[i] - tp.y[i]);
            gp[i] = -2.0 * (ta.y[i] - tp.y[i]);
            gn[i] = 2.0 * (ta.y[i] - tn.y[i]);
        }
        run_backward(cfg, blocks, weights, ta, ga, out.gradient.data());
        run_backward(cfg, blocks, weights, tp, gp, out.gradient.data());
        run_backward(cfg, blocks, weights, tn, gn, out.gradient.data());
    }
    const double n = static_cast<double>(indices.size());
    out.loss /= n;
    for (double& g : out.gradient) g /= n;
    for (const auto& block : blocks)
        for (size_t i = 0; i < block.size; ++i)
            if (!std::isfinite(out.gradient[block.offset + i]))
                throw std::runtime_error("non-finite gradient in " + block.name);
    if (!std::isfinite(out.loss)) throw std::runtime_error("non-finite loss");
    return out;
}

}  // namespace

Embedding forward(const NetConfig& cfg, const Weights& weights, const Patch& patch) {
    check_weights(cfg, weights);
    Trace t;
    run_forward(cfg, parameter_layout(cfg), weights, patch, t);
    return t.y;
}

std::vector<double> preactivations(const NetConfig& cfg, const Weights& weights, const Patch& patch) {
    check_weights(cfg, weights);
    Trace t;
    run_forward(cfg, parameter_layout(cfg), weights, patch, t);
    std::vector<double> out = t.z1;
    out.insert(out.end(), t.z2.begin(), t.z2.end());
    return out;
}

std::vector<Embedding> forward_batch(const NetConfig& cfg, const Weights& weights, std::span<const Patch> patches) {
    check_weights(cfg, weights);
    const auto blocks = parameter_layout(cfg);
    std::vector<Embedding> out;
    out.reserve(patches.size());
    Trace t;
    for (const Patch& p : patches) {
        run_forward(cfg, blocks, weights, p, t);
        out.push_back(t.y);
    }
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("squared_distance: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double triplet_loss(std::span<const double> anchor, std::span<const double> positive,
                    std::span<const double> negative, double margin) {
    const double l = squared_distance(anchor, positive) - squared_distance(anchor, negative) + margin;
    return l > 0.0 ? l : 0.0;
}

LossGradient backward(const NetConfig& cfg, const Weights& weights, std::span<const Triplet> batch) {
    std::vector<size_t> idx(batch.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    return backward_indexed(cfg, weights, batch, idx);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw std::invalid_argument("TrainConfig: learning_rate must be finite and non-negative");
}

double TrainResult::epoch_mean_loss(int epoch) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& e : log)
        if (e.epoch == epoch) {
            sum += e.mean_loss;
            ++n;
        }
    if (n == 0) throw std::out_of_range("no log entries for epoch " + std::to_string(epoch));
    return sum / n;
}

TrainResult train(const NetConfig& cfg, const TrainConfig& train_cfg, std::span<const Triplet> dataset) {
    return train_from(cfg, train_cfg, dataset, init_weights(cfg, train_cfg.seed));
}

TrainResult train_from(const NetConfig& cfg, const TrainConfig& tc, std::span<const Triplet> dataset,
                       Weights initial) {
    cfg.validate();
    tc.validate();
    check_weights(cfg, initial);
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");

    TrainResult result;
    result.weights = std::move(initial);
    Weights& w = result.weights;
    const size_t n_params = w.values.size();
    std::vector<double> m(n_params, 0.0), v(n_params, 0.0);
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long t = 0;

    Rng rng(derive_seed(tc.seed, {0x5348554646ULL}));
    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), size_t{0});
    const size_t bs = static_cast<size_t>(tc.batch_size);
    int step = 0;
    for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
        rng.shuffle(std::span<size_t>(order));
        for (size_t start = 0; start < order.size(); start += bs) {
            const size_t end = std::min(order.size(), start + bs);
            LossGradient lg;
            try {
                lg = backward_indexed(cfg, w, dataset, std::span<const size_t>(order).subspan(start, end - start));
            } catch (const std::runtime_error& e) {
                throw TrainingDiverged(std::string("training diverged at step ") + std::to_string(step + 1) +
                                           ": " + e.what(),
                                       w, result.log);
            }
            ++step;
            result.log.push_back({epoch, step, lg.loss});
            Weights next = w;
            if (tc.optimizer == OptimizerKind::Sgd) {
                for (size_t i = 0; i < n_params; ++i) next.values[i] -= tc.learning_rate * lg.gradient[i];
            } else {
                ++t;
                const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
                const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
                for (size_t i = 0; i < n_params; ++i) {
                    const double g = lg.gradient[i];
                    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                    next.values[i] -= tc.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
                }
            }
            for (double x : next.values)
                if (!std::isfinite(x))
                    throw TrainingDiverged("training diverged at step " + std::to_string(step) +
                                               ": non-finite weights",
                                           w, result.log);
            w = std::move(next);
        }
    }
    if (!tc.log_path.empty()) write_file_atomic(tc.log_path, format_train_log(result.log));
    return result;
}

std::string format_train_log(const std::vector<TrainLogEntry>& log) {
    std::string out = "epoch,step,mean_loss\n";
    for (const auto& e : log)
        out += std::to_string(e.epoch) + "," + std::to_string(e.step) + "," + format_real(e.mean_loss) + "\n";
    return out;
}

// --- checkpoints ------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'E', 'A', 'T', 'R', 'K', 'W', '\0'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void put_le(std::vector<uint8_t>& out, T value) {
    uint8_t bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.insert(out.end(), bytes, bytes + sizeof(T));
}

class Reader {
public:
    Reader(std::span<const uint8_t> bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

    template <typename T>
    T get(const char* what) {
        if (bytes_.size() - pos_ < sizeof(T))
            throw CheckpointError(source_ + ": corrupt checkpoint: truncated while reading " + what);
        uint8_t raw[sizeof(T)];
        std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, raw, sizeof(T));
        return value;
    }

    size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::span<const uint8_t> bytes_;
    std::string source_;
    size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> serialize_checkpoint(const NetConfig& cfg, const Weights& weights) {
    cfg.validate();
    check_weights(cfg, weights);
    std::vector<uint8_t> out(kMagic, kMagic + sizeof(kMagic));
    put_le<uint32_t>(out, kFormatVersion);
    put_le<uint32_t>(out, cfg.architecture == Architecture::Conv ? 1u : 0u);
    put_le<int32_t>(out, cfg.patch_resolution);
    put_le<int32_t>(out, cfg.conv1_channels);
    put_le<int32_t>(out, cfg.conv2_channels);
    put_le<int32_t>(out, cfg.hidden_units);
    put_le<int32_t>(out, cfg.embedding_dim);
    put_le<double>(out, cfg.margin);
    put_le<uint64_t>(out, weights.values.size());
    for (double v : weights.values) put_le<double>(out, v);
    return out;
}

Checkpoint deserialize_checkpoint(std::span<const uint8_t> bytes, const std::string& source) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw CheckpointError(source + ": not a checkpoint (bad magic)");
    Reader r(bytes.subspan(sizeof(kMagic)), source);
    const auto version = r.get<uint32_t>("version");
    if (version != kFormatVersion)
        throw CheckpointError(source + ": unsupported checkpoint version " + std::to_string(version));
    Checkpoint ck;
    const auto arch = r.get<uint32_t>("architecture");
    if (arch > 1) throw CheckpointError(source + ": corrupt checkpoint: unknown architecture tag");
    ck.config.architecture = arch == 1 ? Architecture::Conv : Architecture::FcOnly;
    ck.config.patch_resolution = r.get<int32_t>("patch_resolution");
    ck.config.conv1_channels = r.get<int32_t>("conv1_channels");
    ck.config.conv2_channels = r.get<int32_t>("conv2_channels");
    ck.config.hidden_units = r.get<int32_t>("hidden_units");
    ck.config.embedding_dim = r.get<int32_t>("embedding_dim");
    ck.config.margin = r.get<double>("margin");
    try {
        ck.config.validate();
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(source + ": corrupt checkpoint: " + e.what());
    }
    const auto count = r.get<uint64_t>("weight count");
    if (count != ck.config.parameter_count())
        throw CheckpointError(source + ": weight count " + std::to_string(count) +
                              " does not match stored config (" + std::to_string(ck.config.parameter_count()) + ")");
    if (r.remaining() != count * sizeof(double))
        throw CheckpointError(source + ": corrupt checkpoint: expected " + std::to_string(count * sizeof(double)) +
                              " bytes of weights, found " + std::to_string(r.remaining()));
    ck.weights.values.resize(count);
    for (auto& v : ck.weights.values) v = r.get<double>("weights");
    try {
        check_weights(ck.config, ck.weights);
    } catch (const std::invalid_argument& e) {
        throw CheckpointError(source + ": " + e.what());
    }
    return ck;
}

void save_weights(const std::filesystem::path& path, const NetConfig& cfg, const Weights& weights) {
    const auto bytes = serialize_checkpoint(cfg, weights);
    write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Checkpoint load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    const std::vector<uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return deserialize_checkpoint(bytes, path.string());
}

Checkpoint load_weights(const std::filesystem::path& path, const NetConfig& expected) {
    Checkpoint ck = load_weights(path);
    if (!(ck.config == expected))
        throw CheckpointError(path.string() + ": config mismatch: checkpoint is " + to_string(ck.config.architecture) +
                              " (P=" + std::to_string(ck.config.patch_resolution) +
                              ", E=" + std::to_string(ck.config.embedding_dim) + "), requested " +
                              to_string(expected.architecture) + " (P=" + std::to_string(expected.patch_resolution) +
                              ", E=" + std::to_string(expected.embedding_dim) + ")");
    return ck;
}

}  // namespace seatrack
