#include "dynbd/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dynbd {

Tensor init_uniform(int rows, int cols, int fan_in, Rng& rng) {
    if (fan_in <= 0) throw std::invalid_argument("init_uniform: fan_in must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    return Tensor::random_uniform(rows, cols, -bound, bound, rng);
}

Tape::Id linear_forward(Tape& tape, Tape::Id x, Tape::Id w, Tape::Id b, Act act) {
    Tape::Id y = tape.matmul(x, w);
    if (b >= 0) y = tape.add_rowvec(y, b);
    return tape.activation(y, act);
}

std::vector<Tape::Id> lstm_forward(Tape& tape, std::span<const Tape::Id> sequence,
                                   Tape::Id wx, Tape::Id wh, Tape::Id b) {
    if (sequence.empty()) throw std::invalid_argument("lstm_forward: empty sequence");
    const int rows = tape.value(sequence[0]).rows;
    const int hidden = tape.value(wh).rows;
    Tape::Id state = tape.constant(Tensor::zeros(rows, 2 * hidden));
    std::vector<Tape::Id> hiddens;
    hiddens.reserve(sequence.size());
    for (Tape::Id x : sequence) {
        state = tape.lstm_cell(x, state, wx, wh, b);
        hiddens.push_back(tape.slice_cols(state, 0, hidden));
    }
    return hiddens;
}

double mse_value(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse_value: shape mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        double d = pred.data[i] - target.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

void Adam::step(std::vector<Param>& params, const std::vector<Tensor>& grads) {
    if (params.size() != grads.size())
        throw std::invalid_argument("Adam::step: params/grads size mismatch");
    if (m_.empty()) {
        for (const auto& p : params) {
            m_.push_back(Tensor::zeros(p.value.rows, p.value.cols));
            v_.push_back(Tensor::zeros(p.value.rows, p.value.cols));
        }
    }
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params[i].value;
        const Tensor& g = grads[i];
        if (!p.same_shape(g))
            throw std::invalid_argument("Adam::step: gradient shape mismatch for " +
                                        params[i].name);
        if (!g.all_finite())
            throw std::runtime_error("Adam::step: non-finite gradient for " + params[i].name);
        for (size_t j = 0; j < p.size(); ++j) {
            double grad = g.data[j] + cfg_.weight_decay * p.data[j];
            double& m = m_[i].data[j];
            double& v = v_[i].data[j];
            m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
            v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * grad * grad;
            p.data[j] -= cfg_.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg_.eps);
        }
    }
}

namespace {
constexpr uint32_t kTensorMagic = 0x44425453; // "DBTS"
constexpr uint32_t kTensorVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    return v;
}
} // namespace

void save_tensors(const std::string& path, const std::vector<Param>& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    write_pod(out, kTensorMagic);
    write_pod(out, kTensorVersion);
    write_pod(out, static_cast<uint32_t>(params.size()));
    for (const auto& p : params) {
        write_pod(out, static_cast<uint32_t>(p.name.size()));
        out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        write_pod(out, static_cast<uint32_t>(p.value.rows));
        write_pod(out, static_cast<uint32_t>(p.value.cols));
        out.write(reinterpret_cast<const char*>(p.value.data.data()),
                  static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::vector<Param> load_tensors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    if (read_pod<uint32_t>(in) != kTensorMagic)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (read_pod<uint32_t>(in) != kTensorVersion)
        throw std::runtime_error("checkpoint: unsupported version in " + path);
    const uint32_t count = read_pod<uint32_t>(in);
    std::vector<Param> params;
    params.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t name_len = read_pod<uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const int rows = static_cast<int>(read_pod<uint32_t>(in));
        const int cols = static_cast<int>(read_pod<uint32_t>(in));
        Tensor t(rows, cols);
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!in) throw std::runtime_error("checkpoint: truncated tensor in " + path);
        params.push_back({std::move(name), std::move(t)});
    }
    return params;
}

uint64_t param_checksum(const std::vector<Param>& params) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* ptr, size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(ptr);
        for (size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& p : params) {
        mix(p.name.data(), p.name.size());
        mix(p.value.data.data(), p.value.size() * sizeof(double));
    }
    return h;
}

} // namespace dynbd
