#include "dynbd/tape.hpp"

#include <cblas.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dynbd {

void gemm(bool trans_a, bool trans_b, double alpha, const Tensor& a, const Tensor& b,
          double beta, Tensor& c) {
    const int m = trans_a ? a.cols : a.rows;
    const int k = trans_a ? a.rows : a.cols;
    const int kb = trans_b ? b.cols : b.rows;
    const int n = trans_b ? b.rows : b.cols;
    if (k != kb)
        throw std::invalid_argument("gemm: inner dimensions disagree (" + a.shape_str() +
                                    (trans_a ? "^T" : "") + " . " + b.shape_str() +
                                    (trans_b ? "^T" : "") + ")");
    if (c.rows != m || c.cols != n)
        throw std::invalid_argument("gemm: output shape mismatch");
    if (m == 0 || n == 0) return;
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a.data.data(),
                a.cols, b.data.data(), b.cols, beta, c.data.data(), c.cols);
}

Tape::Id Tape::leaf(Tensor v, bool requires_grad) {
    check_finite(v, "input");
    Node n;
    n.value = std::move(v);
    n.requires_grad = requires_grad;
    n.op = Op::leaf;
    return push(std::move(n));
}

Tape::Id Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Node& Tape::node(Id id) {
    if (id < 0 || static_cast<size_t>(id) >= nodes_.size())
        throw std::out_of_range("Tape: bad node id");
    return nodes_[static_cast<size_t>(id)];
}

const Tape::Node& Tape::node(Id id) const {
    if (id < 0 || static_cast<size_t>(id) >= nodes_.size())
        throw std::out_of_range("Tape: bad node id");
    return nodes_[static_cast<size_t>(id)];
}

void Tape::check_finite(const Tensor& t, const char* what) const {
    if (!t.all_finite())
        throw std::runtime_error(std::string("Tape: non-finite value in ") + what);
}

const Tensor& Tape::value(Id id) const {
    const Node& n = node(id);
    if (n.released) throw std::runtime_error("Tape: value was released");
    return n.value;
}

const Tensor& Tape::grad(Id id) const {
    const Node& n = node(id);
    if (!n.requires_grad) throw std::runtime_error("Tape: gradient of detached node queried");
    if (!n.grad_set) throw std::runtime_error("Tape: gradient not computed (no backward yet)");
    return n.grad;
}

Tape::Id Tape::matmul(Id a, Id b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    Node n;
    n.op = Op::matmul;
    n.a = a;
    n.b = b;
    n.requires_grad = na.requires_grad || nb.requires_grad;
    n.value = Tensor(na.value.rows, nb.value.cols);
    gemm(false, false, 1.0, na.value, nb.value, 0.0, n.value);
    check_finite(n.value, "matmul");
    return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (!na.value.same_shape(nb.value))
        throw std::invalid_argument("add: shape mismatch " + na.value.shape_str() + " vs " +
                                    nb.value.shape_str());
    Node n;
    n.op = Op::add;
    n.a = a;
    n.b = b;
    n.requires_grad = na.requires_grad || nb.requires_grad;
    n.value = na.value;
    for (size_t i = 0; i < n.value.size(); ++i) n.value.data[i] += nb.value.data[i];
    check_finite(n.value, "add");
    return push(std::move(n));
}

Tape::Id Tape::sub(Id a, Id b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (!na.value.same_shape(nb.value))
        throw std::invalid_argument("sub: shape mismatch");
    Node n;
    n.op = Op::sub;
    n.a = a;
    n.b = b;
    n.requires_grad = na.requires_grad || nb.requires_grad;
    n.value = na.value;
    for (size_t i = 0; i < n.value.size(); ++i) n.value.data[i] -= nb.value.data[i];
    check_finite(n.value, "sub");
    return push(std::move(n));
}

Tape::Id Tape::mul(Id a, Id b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (!na.value.same_shape(nb.value))
        throw std::invalid_argument("mul: shape mismatch");
    Node n;
    n.op = Op::mul;
    n.a = a;
    n.b = b;
    n.requires_grad = na.requires_grad || nb.requires_grad;
    n.value = na.value;
    for (size_t i = 0; i < n.value.size(); ++i) n.value.data[i] *= nb.value.data[i];
    check_finite(n.value, "mul");
    return push(std::move(n));
}

Tape::Id Tape::affine(Id x, double scale, double shift) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::affine;
    n.a = x;
    n.s0 = scale;
    n.s1 = shift;
    n.requires_grad = nx.requires_grad;
    n.value = nx.value;
    for (auto& v : n.value.data) v = scale * v + shift;
    check_finite(n.value, "affine");
    return push(std::move(n));
}

Tape::Id Tape::add_rowvec(Id a, Id row) {
    const Node& na = node(a);
    const Node& nr = node(row);
    if (nr.value.rows != 1 || nr.value.cols != na.value.cols)
        throw std::invalid_argument("add_rowvec: bias must be 1x" +
                                    std::to_string(na.value.cols));
    Node n;
    n.op = Op::add_rowvec;
    n.a = a;
    n.b = row;
    n.requires_grad = na.requires_grad || nr.requires_grad;
    n.value = na.value;
    for (int r = 0; r < n.value.rows; ++r)
        for (int c = 0; c < n.value.cols; ++c) n.value.at(r, c) += nr.value.at(0, c);
    check_finite(n.value, "add_rowvec");
    return push(std::move(n));
}

Tape::Id Tape::activation(Id x, Act act) {
    if (act == Act::none) return x;
    const Node& nx = node(x);
    Node n;
    n.op = Op::act;
    n.a = x;
    n.act = act;
    n.requires_grad = nx.requires_grad;
    n.value = nx.value;
    switch (act) {
    case Act::relu:
        for (auto& v : n.value.data) v = v > 0.0 ? v : 0.0;
        break;
    case Act::sigmoid:
        for (auto& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
        break;
    case Act::tanh:
        for (auto& v : n.value.data) v = std::tanh(v);
        break;
    case Act::none:
        break;
    }
    check_finite(n.value, "activation");
    return push(std::move(n));
}

Tape::Id Tape::slice_cols(Id x, int c0, int c1) {
    const Node& nx = node(x);
    if (c0 < 0 || c1 > nx.value.cols || c0 >= c1)
        throw std::invalid_argument("slice_cols: bad range");
    Node n;
    n.op = Op::slice_cols;
    n.a = x;
    n.i0 = c0;
    n.i1 = c1;
    n.requires_grad = nx.requires_grad;
    n.value = Tensor(nx.value.rows, c1 - c0);
    for (int r = 0; r < n.value.rows; ++r)
        for (int c = c0; c < c1; ++c) n.value.at(r, c - c0) = nx.value.at(r, c);
    return push(std::move(n));
}

Tape::Id Tape::slice_rows(Id x, int r0, int r1) {
    const Node& nx = node(x);
    if (r0 < 0 || r1 > nx.value.rows || r0 >= r1)
        throw std::invalid_argument("slice_rows: bad range");
    Node n;
    n.op = Op::slice_rows;
    n.a = x;
    n.i0 = r0;
    n.i1 = r1;
    n.requires_grad = nx.requires_grad;
    n.value = Tensor(r1 - r0, nx.value.cols);
    for (int r = r0; r < r1; ++r)
        for (int c = 0; c < nx.value.cols; ++c) n.value.at(r - r0, c) = nx.value.at(r, c);
    return push(std::move(n));
}

Tape::Id Tape::concat_rows(std::span<const Id> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: empty");
    int rows = 0;
    int cols = node(parts[0]).value.cols;
    bool rg = false;
    for (Id p : parts) {
        const Node& np = node(p);
        if (np.value.cols != cols) throw std::invalid_argument("concat_rows: column mismatch");
        rows += np.value.rows;
        rg = rg || np.requires_grad;
    }
    Node n;
    n.op = Op::concat_rows;
    n.list.assign(parts.begin(), parts.end());
    n.requires_grad = rg;
    n.value = Tensor(rows, cols);
    int r = 0;
    for (Id p : parts) {
        const Node& np = node(p);
        std::copy(np.value.data.begin(), np.value.data.end(),
                  n.value.data.begin() + static_cast<size_t>(r) * cols);
        r += np.value.rows;
    }
    return push(std::move(n));
}

Tape::Id Tape::concat_cols(std::span<const Id> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
    int rows = node(parts[0]).value.rows;
    int cols = 0;
    bool rg = false;
    for (Id p : parts) {
        const Node& np = node(p);
        if (np.value.rows != rows) throw std::invalid_argument("concat_cols: row mismatch");
        cols += np.value.cols;
        rg = rg || np.requires_grad;
    }
    Node n;
    n.op = Op::concat_cols;
    n.list.assign(parts.begin(), parts.end());
    n.requires_grad = rg;
    n.value = Tensor(rows, cols);
    int off = 0;
    for (Id p : parts) {
        const Node& np = node(p);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < np.value.cols; ++c) n.value.at(r, off + c) = np.value.at(r, c);
        off += np.value.cols;
    }
    return push(std::move(n));
}

Tape::Id Tape::pick(Id x, int r, int c) {
    const Node& nx = node(x);
    if (r < 0 || r >= nx.value.rows || c < 0 || c >= nx.value.cols)
        throw std::out_of_range("pick: index out of range");
    Node n;
    n.op = Op::pick;
    n.a = x;
    n.i0 = r;
    n.i1 = c;
    n.requires_grad = nx.requires_grad;
    n.value = Tensor::scalar(nx.value.at(r, c));
    return push(std::move(n));
}

Tape::Id Tape::mse(Id pred, Id target) {
    const Node& np = node(pred);
    const Node& nt = node(target);
    if (!np.value.same_shape(nt.value))
        throw std::invalid_argument("mse: shape mismatch " + np.value.shape_str() + " vs " +
                                    nt.value.shape_str());
    Node n;
    n.op = Op::mse;
    n.a = pred;
    n.b = target;
    n.requires_grad = np.requires_grad || nt.requires_grad;
    double acc = 0.0;
    for (size_t i = 0; i < np.value.size(); ++i) {
        double d = np.value.data[i] - nt.value.data[i];
        acc += d * d;
    }
    n.value = Tensor::scalar(acc / static_cast<double>(np.value.size()));
    check_finite(n.value, "mse");
    return push(std::move(n));
}

Tape::Id Tape::inject(Id base, Id source, std::vector<InjectEntry> entries) {
    const Node& nb = node(base);
    const Node& ns = node(source);
    for (const auto& e : entries) {
        if (e.row < 0 || e.row >= nb.value.rows || e.col < 0 || e.col >= nb.value.cols)
            throw std::out_of_range("inject: destination out of range");
        if (e.src_row < 0 || e.src_row >= ns.value.rows || e.src_col < 0 ||
            e.src_col >= ns.value.cols)
            throw std::out_of_range("inject: source out of range");
    }
    Node n;
    n.op = Op::inject;
    n.a = base;
    n.b = source;
    n.requires_grad = nb.requires_grad || ns.requires_grad;
    n.value = nb.value;
    for (const auto& e : entries)
        n.value.at(e.row, e.col) =
            e.straight_through ? e.forced_value : ns.value.at(e.src_row, e.src_col);
    n.entries = std::move(entries);
    check_finite(n.value, "inject");
    return push(std::move(n));
}

Tape::Id Tape::lstm_cell(Id x, Id state, Id wx, Id wh, Id b) {
    const Node& nx = node(x);
    const Node& ns = node(state);
    const Node& nwx = node(wx);
    const Node& nwh = node(wh);
    const Node& nb = node(b);
    const int rows = nx.value.rows;
    const int hidden = nwh.value.rows;
    if (nwx.value.cols != 4 * hidden || nwh.value.cols != 4 * hidden)
        throw std::invalid_argument("lstm_cell: gate width must be 4x hidden");
    if (nwx.value.rows != nx.value.cols)
        throw std::invalid_argument("lstm_cell: input width mismatch");
    if (ns.value.rows != rows || ns.value.cols != 2 * hidden)
        throw std::invalid_argument("lstm_cell: state must be rows x 2*hidden");
    if (nb.value.rows != 1 || nb.value.cols != 4 * hidden)
        throw std::invalid_argument("lstm_cell: bias must be 1 x 4*hidden");

    // Pre-activations for all four gates at once.
    Tensor gates(rows, 4 * hidden);
    gemm(false, false, 1.0, nx.value, nwx.value, 0.0, gates);
    {
        // h_prev . Wh added in place; h_prev is the left half of state.
        Tensor h_prev(rows, hidden);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < hidden; ++c) h_prev.at(r, c) = ns.value.at(r, c);
        gemm(false, false, 1.0, h_prev, nwh.value, 1.0, gates);
    }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < 4 * hidden; ++c) gates.at(r, c) += nb.value.at(0, c);

    // Gate order i, f, g, o; g uses tanh, the rest sigmoid.
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < 4 * hidden; ++c) {
            double v = gates.at(r, c);
            gates.at(r, c) = (c / hidden == 2) ? std::tanh(v) : 1.0 / (1.0 + std::exp(-v));
        }
    }

    Node n;
    n.op = Op::lstm_cell;
    n.a = x;
    n.b = state;
    n.c = wx;
    n.d = wh;
    n.e = b;
    n.requires_grad = nx.requires_grad || ns.requires_grad || nwx.requires_grad ||
                      nwh.requires_grad || nb.requires_grad;
    n.i0 = hidden;
    n.value = Tensor(rows, 2 * hidden);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < hidden; ++c) {
            double i = gates.at(r, c);
            double f = gates.at(r, hidden + c);
            double g = gates.at(r, 2 * hidden + c);
            double o = gates.at(r, 3 * hidden + c);
            double c_prev = ns.value.at(r, hidden + c);
            double c_new = f * c_prev + i * g;
            n.value.at(r, hidden + c) = c_new;
            n.value.at(r, c) = o * std::tanh(c_new);
        }
    }
    n.saved = std::move(gates);
    check_finite(n.value, "lstm_cell");
    return push(std::move(n));
}

void Tape::accumulate(Id id, const Tensor& g) {
    Node& n = node(id);
    if (!n.requires_grad) return;
    if (!n.grad_set) {
        n.grad = Tensor(n.value.rows, n.value.cols);
        n.grad_set = true;
    }
    if (!n.grad.same_shape(g)) throw std::runtime_error("Tape: gradient shape mismatch");
    for (size_t i = 0; i < g.size(); ++i) n.grad.data[i] += g.data[i];
}

void Tape::backward(Id loss) {
    Node& ln = node(loss);
    if (!ln.value.is_scalar()) throw std::runtime_error("backward: loss must be scalar");
    if (!ln.requires_grad)
        throw std::runtime_error("backward: loss does not depend on any differentiable input");
    loss_id_ = loss;
    ln.grad = Tensor::scalar(1.0);
    ln.grad_set = true;
    last_visits_ = 0;
    for (Id id = loss; id >= 0; --id) {
        ++last_visits_;
        Node& n = node(id);
        if (!n.requires_grad || !n.grad_set) continue;
        check_finite(n.grad, "gradient");
        backward_node(id);
        if (release_interior_ && n.op != Op::leaf && id != loss_id_) {
            n.value = Tensor();
            n.grad = Tensor();
            n.saved = Tensor();
            n.grad_set = false;
            n.released = true;
        }
    }
}

void Tape::backward_node(Id id) {
    Node& n = node(id);
    const Tensor& g = n.grad;
    switch (n.op) {
    case Op::leaf:
        break;
    case Op::matmul: {
        const Node& na = node(n.a);
        const Node& nb = node(n.b);
        if (na.requires_grad) {
            Tensor da(na.value.rows, na.value.cols);
            gemm(false, true, 1.0, g, nb.value, 0.0, da);
            accumulate(n.a, da);
        }
        if (nb.requires_grad) {
            Tensor db(nb.value.rows, nb.value.cols);
            gemm(true, false, 1.0, na.value, g, 0.0, db);
            accumulate(n.b, db);
        }
        break;
    }
    case Op::add:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
    case Op::sub: {
        accumulate(n.a, g);
        if (node(n.b).requires_grad) {
            Tensor gb = g;
            for (auto& v : gb.data) v = -v;
            accumulate(n.b, gb);
        }
        break;
    }
    case Op::mul: {
        const Node& na = node(n.a);
        const Node& nb = node(n.b);
        if (na.requires_grad) {
            Tensor da = g;
            for (size_t i = 0; i < da.size(); ++i) da.data[i] *= nb.value.data[i];
            accumulate(n.a, da);
        }
        if (nb.requires_grad) {
            Tensor db = g;
            for (size_t i = 0; i < db.size(); ++i) db.data[i] *= na.value.data[i];
            accumulate(n.b, db);
        }
        break;
    }
    case Op::affine: {
        Tensor da = g;
        for (auto& v : da.data) v *= n.s0;
        accumulate(n.a, da);
        break;
    }
    case Op::add_rowvec: {
        accumulate(n.a, g);
        if (node(n.b).requires_grad) {
            Tensor db(1, g.cols);
            for (int r = 0; r < g.rows; ++r)
                for (int c = 0; c < g.cols; ++c) db.at(0, c) += g.at(r, c);
            accumulate(n.b, db);
        }
        break;
    }
    case Op::act: {
        const Tensor& y = n.value;
        Tensor da = g;
        switch (n.act) {
        case Act::relu:
            for (size_t i = 0; i < da.size(); ++i)
                if (y.data[i] <= 0.0) da.data[i] = 0.0;
            break;
        case Act::sigmoid:
            for (size_t i = 0; i < da.size(); ++i)
                da.data[i] *= y.data[i] * (1.0 - y.data[i]);
            break;
        case Act::tanh:
            for (size_t i = 0; i < da.size(); ++i)
                da.data[i] *= 1.0 - y.data[i] * y.data[i];
            break;
        case Act::none:
            break;
        }
        accumulate(n.a, da);
        break;
    }
    case Op::slice_cols: {
        const Node& na = node(n.a);
        Tensor da(na.value.rows, na.value.cols);
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) da.at(r, n.i0 + c) = g.at(r, c);
        accumulate(n.a, da);
        break;
    }
    case Op::slice_rows: {
        const Node& na = node(n.a);
        Tensor da(na.value.rows, na.value.cols);
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) da.at(n.i0 + r, c) = g.at(r, c);
        accumulate(n.a, da);
        break;
    }
    case Op::concat_rows: {
        int r0 = 0;
        for (Id p : n.list) {
            const Node& np = node(p);
            if (np.requires_grad) {
                Tensor dp(np.value.rows, np.value.cols);
                for (int r = 0; r < dp.rows; ++r)
                    for (int c = 0; c < dp.cols; ++c) dp.at(r, c) = g.at(r0 + r, c);
                accumulate(p, dp);
            }
            r0 += np.value.rows;
        }
        break;
    }
    case Op::concat_cols: {
        int c0 = 0;
        for (Id p : n.list) {
            const Node& np = node(p);
            if (np.requires_grad) {
                Tensor dp(np.value.rows, np.value.cols);
                for (int r = 0; r < dp.rows; ++r)
                    for (int c = 0; c < dp.cols; ++c) dp.at(r, c) = g.at(r, c0 + c);
                accumulate(p, dp);
            }
            c0 += np.value.cols;
        }
        break;
    }
    case Op::pick: {
        const Node& na = node(n.a);
        Tensor da(na.value.rows, na.value.cols);
        da.at(n.i0, n.i1) = g.data[0];
        accumulate(n.a, da);
        break;
    }
    case Op::mse: {
        const Node& np = node(n.a);
        const Node& nt = node(n.b);
        const double scale = 2.0 * g.data[0] / static_cast<double>(np.value.size());
        if (np.requires_grad) {
            Tensor dp(np.value.rows, np.value.cols);
            for (size_t i = 0; i < dp.size(); ++i)
                dp.data[i] = scale * (np.value.data[i] - nt.value.data[i]);
            accumulate(n.a, dp);
        }
        if (nt.requires_grad) {
            Tensor dt(nt.value.rows, nt.value.cols);
            for (size_t i = 0; i < dt.size(); ++i)
                dt.data[i] = -scale * (np.value.data[i] - nt.value.data[i]);
            accumulate(n.b, dt);
        }
        break;
    }
    case Op::inject: {
        const Node& nb = node(n.b);
        if (node(n.a).requires_grad) {
            Tensor da = g;
            for (const auto& e : n.entries) da.at(e.row, e.col) = 0.0;
            accumulate(n.a, da);
        }
        if (nb.requires_grad) {
            Tensor db(nb.value.rows, nb.value.cols);
            for (const auto& e : n.entries) db.at(e.src_row, e.src_col) += g.at(e.row, e.col);
            accumulate(n.b, db);
        }
        break;
    }
    case Op::lstm_cell: {
        const Node& nx = node(n.a);
        const Node& ns = node(n.b);
        const Node& nwx = node(n.c);
        const Node& nwh = node(n.d);
        const int rows = nx.value.rows;
        const int hidden = n.i0;
        const Tensor& gates = n.saved;

        // Incoming gradient splits into dh (left half) and dc (right half).
        Tensor dpre(rows, 4 * hidden);
        Tensor dstate(rows, 2 * hidden);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < hidden; ++c) {
                double i = gates.at(r, c);
                double f = gates.at(r, hidden + c);
                double gg = gates.at(r, 2 * hidden + c);
                double o = gates.at(r, 3 * hidden + c);
                double c_prev = ns.value.at(r, hidden + c);
                double c_new = n.value.at(r, hidden + c);
                double tc = std::tanh(c_new);
                double dh = g.at(r, c);
                double dc = g.at(r, hidden + c) + dh * o * (1.0 - tc * tc);
                double d_o = dh * tc;
                double d_i = dc * gg;
                double d_g = dc * i;
                double d_f = dc * c_prev;
                dstate.at(r, hidden + c) = dc * f;         // d c_prev
                dpre.at(r, c) = d_i * i * (1.0 - i);
                dpre.at(r, hidden + c) = d_f * f * (1.0 - f);
                dpre.at(r, 2 * hidden + c) = d_g * (1.0 - gg * gg);
                dpre.at(r, 3 * hidden + c) = d_o * o * (1.0 - o);
            }
        }
        if (nx.requires_grad) {
            Tensor dx(rows, nx.value.cols);
            gemm(false, true, 1.0, dpre, nwx.value, 0.0, dx);
            accumulate(n.a, dx);
        }
        if (ns.requires_grad) {
            // d h_prev lands in the left half of dstate.
            Tensor dh_prev(rows, hidden);
            gemm(false, true, 1.0, dpre, nwh.value, 0.0, dh_prev);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < hidden; ++c) dstate.at(r, c) = dh_prev.at(r, c);
            accumulate(n.b, dstate);
        }
        if (nwx.requires_grad) {
            Tensor dwx(nwx.value.rows, nwx.value.cols);
            gemm(true, false, 1.0, nx.value, dpre, 0.0, dwx);
            accumulate(n.c, dwx);
        }
        if (nwh.requires_grad) {
            Tensor h_prev(rows, hidden);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < hidden; ++c) h_prev.at(r, c) = ns.value.at(r, c);
            Tensor dwh(nwh.value.rows, nwh.value.cols);
            gemm(true, false, 1.0, h_prev, dpre, 0.0, dwh);
            accumulate(n.d, dwh);
        }
        if (node(n.e).requires_grad) {
            Tensor db(1, 4 * hidden);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < 4 * hidden; ++c) db.at(0, c) += dpre.at(r, c);
            accumulate(n.e, db);
        }
        break;
    }
    }
}

} // namespace dynbd
