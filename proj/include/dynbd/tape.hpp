#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dynbd/tensor.hpp"

namespace dynbd {

enum class Act { none, relu, sigmoid, tanh };

// One overwrite site for Tape::inject. Writes source(src_row, src_col) into
// the output at (row, col). In straight-through mode the forward value is
// `forced_value` instead, while the backward pass still routes the gradient
// to the source position.
struct InjectEntry {
    int row = 0, col = 0;
    int src_row = 0, src_col = 0;
    double forced_value = 0.0;
    bool straight_through = false;
};

// Reverse-mode tape over dense matrices. Ops are recorded in creation order,
// which is also a topological order, so backward() is a single reverse sweep.
// Gradients are available for every node created with requires_grad, inputs
// included. Any NaN/Inf produced by a forward or backward step throws
// immediately.
class Tape {
public:
    using Id = int;

    // With release_interior=true, interior values and gradients are freed as
    // soon as the backward sweep no longer needs them. Leaf nodes and the
    // loss node always keep theirs.
    explicit Tape(bool release_interior = false) : release_interior_(release_interior) {}

    // Leaves.
    Id constant(Tensor v) { return leaf(std::move(v), false); }
    Id input(Tensor v, bool requires_grad = true) { return leaf(std::move(v), requires_grad); }

    // y = a . b
    Id matmul(Id a, Id b);
    // Elementwise; shapes must match.
    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id mul(Id a, Id b);
    // y = scale * x + shift, elementwise.
    Id affine(Id x, double scale, double shift);
    // Adds a 1xC row vector to every row of a.
    Id add_rowvec(Id a, Id row);
    Id activation(Id x, Act act);
    Id slice_cols(Id x, int c0, int c1);
    Id slice_rows(Id x, int r0, int r1);
    Id concat_rows(std::span<const Id> parts);
    Id concat_cols(std::span<const Id> parts);
    // 1x1 view of a single element.
    Id pick(Id x, int r, int c);
    // Mean of squared differences, 1x1.
    Id mse(Id pred, Id target);
    // Copy of base with entries overwritten; see InjectEntry.
    Id inject(Id base, Id source, std::vector<InjectEntry> entries);
    // One LSTM step. state holds [h | c] side by side (R x 2H); the initial
    // state is a zero constant of that shape. Gate order i, f, g, o.
    Id lstm_cell(Id x, Id state, Id wx, Id wh, Id b);

    void backward(Id loss);

    const Tensor& value(Id id) const;
    // Only valid for nodes created with requires_grad (or reached from one);
    // querying a detached node throws.
    const Tensor& grad(Id id) const;
    double value_scalar(Id id) const { return value(id).scalar_value(); }
    bool requires_grad(Id id) const { return node(id).requires_grad; }

    size_t node_count() const { return nodes_.size(); }
    // Number of nodes visited by the most recent backward sweep.
    size_t last_backward_visits() const { return last_visits_; }

private:
    enum class Op : uint8_t {
        leaf, matmul, add, sub, mul, affine, add_rowvec, act,
        slice_cols, slice_rows, concat_rows, concat_cols, pick, mse,
        inject, lstm_cell
    };

    struct Node {
        Tensor value;
        Tensor grad;
        bool grad_set = false;
        bool requires_grad = false;
        bool released = false;
        Op op = Op::leaf;
        int a = -1, b = -1, c = -1, d = -1, e = -1;
        // Op payloads (only the relevant ones are populated).
        Act act = Act::none;
        int i0 = 0, i1 = 0;
        double s0 = 0.0, s1 = 0.0;
        std::vector<Id> list;
        std::vector<InjectEntry> entries;
        Tensor saved; // lstm_cell: post-activation gates [i|f|g|o]
    };

    Id leaf(Tensor v, bool requires_grad);
    Id push(Node n);
    Node& node(Id id);
    const Node& node(Id id) const;
    void check_finite(const Tensor& t, const char* what) const;
    void accumulate(Id id, const Tensor& g);
    void backward_node(Id id);

    std::vector<Node> nodes_;
    bool release_interior_ = false;
    size_t last_visits_ = 0;
    Id loss_id_ = -1;
};

// BLAS-backed GEMM used by the tape and by oracle-free callers:
// C = alpha * op(A) . op(B) + beta * C.
void gemm(bool trans_a, bool trans_b, double alpha, const Tensor& a, const Tensor& b,
          double beta, Tensor& c);

} // namespace dynbd
