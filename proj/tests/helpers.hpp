#pragma once

#include <functional>
#include <vector>

#include "dynbd/tape.hpp"
#include "dynbd/tensor.hpp"
#include "dynbd/util.hpp"

namespace dynbd::testing {

// Builds a scalar loss from the given leaf ids. Called once per finite
// difference evaluation with a fresh tape, so it must be a pure function of
// the input tensors.
using LossBuilder =
    std::function<Tape::Id(Tape&, const std::vector<Tape::Id>&)>;

struct FdReport {
    double max_rel_err = 0.0;
    int checked = 0;
    bool ok(double tol = 1e-4) const { return checked > 0 && max_rel_err <= tol; }
};

// Central finite differences (h = 1e-5) against the tape's reverse-mode
// gradients, for every entry of every input (or a sampled subset when
// max_coords_per_input > 0). Entries where both sides are below the absolute
// floor are counted as matching.
inline FdReport fd_check(const LossBuilder& build, std::vector<Tensor> inputs,
                         int max_coords_per_input = 0, uint64_t seed = 0x5eed,
                         double h = 1e-5) {
    auto eval = [&](const std::vector<Tensor>& ins) {
        Tape tape;
        std::vector<Tape::Id> ids;
        ids.reserve(ins.size());
        for (const auto& t : ins) ids.push_back(tape.input(t, true));
        return tape.value_scalar(build(tape, ids));
    };

    // Analytic gradients.
    Tape tape;
    std::vector<Tape::Id> ids;
    for (const auto& t : inputs) ids.push_back(tape.input(t, true));
    Tape::Id loss = build(tape, ids);
    tape.backward(loss);
    std::vector<Tensor> grads;
    for (Tape::Id id : ids) grads.push_back(tape.grad(id));

    Rng rng(seed);
    FdReport report;
    for (size_t i = 0; i < inputs.size(); ++i) {
        const size_t n = inputs[i].size();
        std::vector<size_t> coords;
        if (max_coords_per_input > 0 && n > static_cast<size_t>(max_coords_per_input)) {
            for (int k = 0; k < max_coords_per_input; ++k)
                coords.push_back(rng.below(n));
        } else {
            for (size_t j = 0; j < n; ++j) coords.push_back(j);
        }
        for (size_t j : coords) {
            const double orig = inputs[i].data[j];
            inputs[i].data[j] = orig + h;
            const double up = eval(inputs);
            inputs[i].data[j] = orig - h;
            const double down = eval(inputs);
            inputs[i].data[j] = orig;
            const double fd = (up - down) / (2.0 * h);
            const double an = grads[i].data[j];
            const double diff = std::abs(fd - an);
            const double mag = std::max(std::abs(fd), std::abs(an));
            ++report.checked;
            if (diff <= 5e-8) continue; // both effectively zero
            report.max_rel_err = std::max(report.max_rel_err, diff / mag);
        }
    }
    return report;
}

} // namespace dynbd::testing
