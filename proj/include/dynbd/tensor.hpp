#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynbd/util.hpp"

namespace dynbd {

// Dense row-major matrix of 64-bit floats. Scalars are 1x1, row vectors 1xC.
// Everything the models and the attack move around (snapshots, hidden
// states, trigger scores) fits rank 2.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw std::invalid_argument("Tensor: negative shape");
    }

    static Tensor zeros(int r, int c) { return Tensor(r, c); }

    static Tensor full(int r, int c, double v) {
        Tensor t(r, c);
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }

    static Tensor identity(int n) {
        Tensor t(n, n);
        for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
        return t;
    }

    static Tensor scalar(double v) {
        Tensor t(1, 1);
        t.data[0] = v;
        return t;
    }

    static Tensor random_uniform(int r, int c, double lo, double hi, Rng& rng) {
        Tensor t(r, c);
        for (auto& x : t.data) x = rng.uniform(lo, hi);
        return t;
    }

    size_t size() const { return data.size(); }
    bool is_scalar() const { return rows == 1 && cols == 1; }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    double scalar_value() const {
        if (!is_scalar()) throw std::runtime_error("Tensor: not a scalar");
        return data[0];
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    std::string shape_str() const {
        return std::to_string(rows) + "x" + std::to_string(cols);
    }
};

} // namespace dynbd
