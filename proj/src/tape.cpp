#include "olgan/tape.hpp"

#include <cmath>

namespace olgan {

int Tape::emit(Node n) {
    n.value = compute(n);
    if (n.op != Op::Leaf) {
        bool ng = false;
        if (n.a >= 0) ng = ng || nodes_[n.a].needs_grad;
        if (n.b >= 0) ng = ng || nodes_[n.b].needs_grad;
        // LeakyMask has a declared zero derivative: it never carries gradient.
        n.needs_grad = (n.op == Op::LeakyMask) ? false : ng;
    }
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::leaf(DenseMatrix value, bool requires_grad) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    n.needs_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::add(int a, int b) {
    require_shape(nodes_[a].value.same_shape(nodes_[b].value), "add: shape mismatch");
    return emit(Node{Op::Add, a, b});
}
int Tape::hadamard(int a, int b) {
    require_shape(nodes_[a].value.same_shape(nodes_[b].value), "hadamard: shape mismatch");
    return emit(Node{Op::Hadamard, a, b});
}
int Tape::matmul(int a, int b) {
    require_shape(nodes_[a].value.cols() == nodes_[b].value.rows(), "matmul: shape mismatch");
    return emit(Node{Op::MatMul, a, b});
}
int Tape::transpose(int a) { return emit(Node{Op::Transpose, a}); }
int Tape::affine(int a, double alpha, double beta) {
    Node n{Op::Affine, a};
    n.alpha = alpha;
    n.beta = beta;
    return emit(n);
}
int Tape::leaky_relu(int a, double slope) {
    Node n{Op::LeakyRelu, a};
    n.alpha = slope;
    return emit(n);
}
int Tape::leaky_mask(int a, double slope) {
    Node n{Op::LeakyMask, a};
    n.alpha = slope;
    return emit(n);
}
int Tape::tanh_(int a) { return emit(Node{Op::Tanh, a}); }
int Tape::sqrt_(int a) { return emit(Node{Op::Sqrt, a}); }
int Tape::divide(int a, int b) {
    require_shape(nodes_[a].value.same_shape(nodes_[b].value), "divide: shape mismatch");
    return emit(Node{Op::Divide, a, b});
}
int Tape::sum_all(int a) { return emit(Node{Op::SumAll, a}); }
int Tape::row_sum(int a) { return emit(Node{Op::RowSum, a}); }
int Tape::col_sum(int a) { return emit(Node{Op::ColSum, a}); }
int Tape::bcast_cols(int a, std::size_t cols) {
    require_shape(nodes_[a].value.cols() == 1, "bcast_cols: operand must be Nx1");
    Node n{Op::BcastCols, a};
    n.i0 = cols;
    return emit(n);
}
int Tape::bcast_rows(int a, std::size_t rows) {
    require_shape(nodes_[a].value.rows() == 1, "bcast_rows: operand must be 1xM");
    Node n{Op::BcastRows, a};
    n.i0 = rows;
    return emit(n);
}
int Tape::bcast_full(int a, std::size_t rows, std::size_t cols) {
    require_shape(nodes_[a].value.size() == 1, "bcast_full: operand must be 1x1");
    Node n{Op::BcastFull, a};
    n.i0 = rows;
    n.i1 = cols;
    return emit(n);
}
int Tape::add_row_vec(int a, int v) {
    require_shape(nodes_[v].value.rows() == 1 && nodes_[v].value.cols() == nodes_[a].value.cols(),
                  "add_row_vec: vector must be 1 x cols(A)");
    return emit(Node{Op::AddRowVec, a, v});
}
int Tape::mul_row_vec(int a, int v) {
    require_shape(nodes_[v].value.rows() == 1 && nodes_[v].value.cols() == nodes_[a].value.cols(),
                  "mul_row_vec: vector must be 1 x cols(A)");
    return emit(Node{Op::MulRowVec, a, v});
}
int Tape::add_scalar(int a, int s) {
    require_shape(nodes_[s].value.size() == 1, "add_scalar: scalar node must be 1x1");
    return emit(Node{Op::AddScalar, a, s});
}
int Tape::concat2(int a, int b) {
    require_shape(nodes_[a].value.rows() == nodes_[b].value.rows(), "concat2: row mismatch");
    return emit(Node{Op::Concat2, a, b});
}
int Tape::slice_cols(int a, std::size_t begin, std::size_t end) {
    require_shape(begin < end && end <= nodes_[a].value.cols(), "slice_cols: bad range");
    Node n{Op::SliceCols, a};
    n.i0 = begin;
    n.i1 = end;
    return emit(n);
}
int Tape::pad_cols(int a, std::size_t begin, std::size_t total) {
    require_shape(begin + nodes_[a].value.cols() <= total, "pad_cols: bad range");
    Node n{Op::PadCols, a};
    n.i0 = begin;
    n.i1 = total;
    return emit(n);
}

int Tape::mean_all(int a) {
    const auto& v = nodes_[a].value;
    return affine(sum_all(a), 1.0 / static_cast<double>(v.size()), 0.0);
}

DenseMatrix Tape::compute(const Node& n) const {
    auto A = [&]() -> const DenseMatrix& { return nodes_[n.a].value; };
    auto B = [&]() -> const DenseMatrix& { return nodes_[n.b].value; };
    switch (n.op) {
        case Op::Leaf:
            return n.value;
        case Op::Add: {
            DenseMatrix c = A();
            const DenseMatrix& b = B();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
            return c;
        }
        case Op::Hadamard: {
            DenseMatrix c = A();
            const DenseMatrix& b = B();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] *= b[i];
            return c;
        }
        case Op::MatMul:
            return olgan::matmul(A(), B());
        case Op::Transpose:
            return olgan::transpose(A());
        case Op::Affine: {
            DenseMatrix c = A();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = n.alpha * c[i] + n.beta;
            return c;
        }
        case Op::LeakyRelu: {
            DenseMatrix c = A();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = c[i] > 0.0 ? c[i] : n.alpha * c[i];
            return c;
        }
        case Op::LeakyMask: {
            // subgradient at 0 takes the negative-side slope
            DenseMatrix c = A();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = c[i] > 0.0 ? 1.0 : n.alpha;
            return c;
        }
        case Op::Tanh: {
            DenseMatrix c = A();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::tanh(c[i]);
            return c;
        }
        case Op::Sqrt: {
            DenseMatrix c = A();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::sqrt(c[i]);
            return c;
        }
        case Op::Divide: {
            DenseMatrix c = A();
            const DenseMatrix& b = B();
            for (std::size_t i = 0; i < c.size(); ++i) c[i] /= b[i];
            return c;
        }
        case Op::SumAll: {
            DenseMatrix c(1, 1);
            const DenseMatrix& a = A();
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i];
            c[0] = s;
            return c;
        }
        case Op::RowSum: {
            const DenseMatrix& a = A();
            DenseMatrix c(a.rows(), 1);
            for (std::size_t r = 0; r < a.rows(); ++r) {
                double s = 0.0;
                for (std::size_t j = 0; j < a.cols(); ++j) s += a(r, j);
                c(r, 0) = s;
            }
            return c;
        }
        case Op::ColSum: {
            const DenseMatrix& a = A();
            DenseMatrix c(1, a.cols());
            for (std::size_t r = 0; r < a.rows(); ++r)
                for (std::size_t j = 0; j < a.cols(); ++j) c(0, j) += a(r, j);
            return c;
        }
        case Op::BcastCols: {
            const DenseMatrix& a = A();
            DenseMatrix c(a.rows(), n.i0);
            for (std::size_t r = 0; r < a.rows(); ++r)
                for (std::size_t j = 0; j < n.i0; ++j) c(r, j) = a(r, 0);
            return c;
        }
        case Op::BcastRows: {
            const DenseMatrix& a = A();
            DenseMatrix c(n.i0, a.cols());
            for (std::size_t r = 0; r < n.i0; ++r)
                for (std::size_t j = 0; j < a.cols(); ++j) c(r, j) = a(0, j);
            return c;
        }
        case Op::BcastFull: {
            const DenseMatrix& a = A();
            return DenseMatrix(n.i0, n.i1, a[0]);
        }
        case Op::AddRowVec: {
            DenseMatrix c = A();
            const DenseMatrix& v = B();
            for (std::size_t r = 0; r < c.rows(); ++r)
                for (std::size_t j = 0; j < c.cols(); ++j) c(r, j) += v(0, j);
            return c;
        }
        case Op::MulRowVec: {
            DenseMatrix c = A();
            const DenseMatrix& v = B();
            for (std::size_t r = 0; r < c.rows(); ++r)
                for (std::size_t j = 0; j < c.cols(); ++j) c(r, j) *= v(0, j);
            return c;
        }
        case Op::AddScalar: {
            DenseMatrix c = A();
            const double s = B()[0];
            for (std::size_t i = 0; i < c.size(); ++i) c[i] += s;
            return c;
        }
        case Op::Concat2: {
            const DenseMatrix& a = A();
            const DenseMatrix& b = B();
            DenseMatrix c(a.rows(), a.cols() + b.cols());
            for (std::size_t r = 0; r < a.rows(); ++r) {
                for (std::size_t j = 0; j < a.cols(); ++j) c(r, j) = a(r, j);
                for (std::size_t j = 0; j < b.cols(); ++j) c(r, a.cols() + j) = b(r, j);
            }
            return c;
        }
        case Op::SliceCols: {
            const DenseMatrix& a = A();
            DenseMatrix c(a.rows(), n.i1 - n.i0);
            for (std::size_t r = 0; r < a.rows(); ++r)
                for (std::size_t j = n.i0; j < n.i1; ++j) c(r, j - n.i0) = a(r, j);
            return c;
        }
        case Op::PadCols: {
            const DenseMatrix& a = A();
            DenseMatrix c(a.rows(), n.i1);
            for (std::size_t r = 0; r < a.rows(); ++r)
                for (std::size_t j = 0; j < a.cols(); ++j) c(r, n.i0 + j) = a(r, j);
            return c;
        }
    }
    throw std::logic_error("tape: unknown op");
}

std::vector<int> Tape::backward(int output) {
    return backward_impl(output, nullptr);
}

std::vector<int> Tape::backward(int output, const std::vector<int>& targets) {
    return backward_impl(output, &targets);
}

std::vector<int> Tape::backward_impl(int output, const std::vector<int>* targets) {
    require_shape(nodes_[output].value.size() == 1, "backward: output must be scalar");
    const int n_at_call = static_cast<int>(nodes_.size());

    // wants[id]: propagate gradient into this node's subtree. Defaults to the
    // needs_grad flags; with explicit targets it is the target-ancestor set.
    std::vector<char> wants(n_at_call, 0);
    if (targets) {
        for (int t : *targets) wants[t] = 1;
        for (int id = 0; id < n_at_call; ++id) {
            const Node& n = nodes_[id];
            if (n.op == Op::Leaf || n.op == Op::LeakyMask) continue;
            if ((n.a >= 0 && wants[n.a]) || (n.b >= 0 && wants[n.b])) wants[id] = 1;
        }
    } else {
        for (int id = 0; id < n_at_call; ++id) wants[id] = nodes_[id].needs_grad ? 1 : 0;
    }

    std::vector<int> grad(n_at_call, -1);
    grad[output] = leaf(DenseMatrix(1, 1, 1.0));

    auto accumulate = [&](int target, int contribution) {
        if (target >= n_at_call) return;  // gradients of emitted grad nodes are not tracked
        if (!wants[target]) return;
        grad[target] = (grad[target] == -1) ? contribution : add(grad[target], contribution);
    };
    auto propagates = [&](int id) { return id >= 0 && id < n_at_call && wants[id]; };

    for (int id = output; id >= 0; --id) {
        const int g = grad[id];
        if (g == -1) continue;
        // Copy op metadata; nodes_ may reallocate while emitting below.
        const Op op = nodes_[id].op;
        const int a = nodes_[id].a;
        const int b = nodes_[id].b;
        const double alpha = nodes_[id].alpha;
        const std::size_t i0 = nodes_[id].i0;
        [[maybe_unused]] const std::size_t i1 = nodes_[id].i1;
        const std::size_t a_rows = a >= 0 ? nodes_[a].value.rows() : 0;
        const std::size_t a_cols = a >= 0 ? nodes_[a].value.cols() : 0;
        const std::size_t b_cols = b >= 0 ? nodes_[b].value.cols() : 0;

        switch (op) {
            case Op::Leaf:
                break;
            case Op::Add:
                accumulate(a, g);
                accumulate(b, g);
                break;
            case Op::Hadamard:
                if (propagates(a)) accumulate(a, hadamard(g, b));
                if (propagates(b)) accumulate(b, hadamard(g, a));
                break;
            case Op::MatMul:
                if (propagates(a)) accumulate(a, matmul(g, transpose(b)));
                if (propagates(b)) accumulate(b, matmul(transpose(a), g));
                break;
            case Op::Transpose:
                accumulate(a, transpose(g));
                break;
            case Op::Affine:
                accumulate(a, affine(g, alpha, 0.0));
                break;
            case Op::LeakyRelu:
                accumulate(a, hadamard(g, leaky_mask(a, alpha)));
                break;
            case Op::LeakyMask:
                break;  // derivative declared zero
            case Op::Tanh:
                // d tanh = 1 - tanh^2, expressed through this node's value
                accumulate(a, hadamard(g, affine(hadamard(id, id), -1.0, 1.0)));
                break;
            case Op::Sqrt:
                accumulate(a, divide(g, affine(id, 2.0, 0.0)));
                break;
            case Op::Divide:
                if (propagates(a)) accumulate(a, divide(g, b));
                if (propagates(b)) accumulate(b, affine(hadamard(g, divide(id, b)), -1.0, 0.0));
                break;
            case Op::SumAll:
                accumulate(a, bcast_full(g, a_rows, a_cols));
                break;
            case Op::RowSum:
                accumulate(a, bcast_cols(g, a_cols));
                break;
            case Op::ColSum:
                accumulate(a, bcast_rows(g, a_rows));
                break;
            case Op::BcastCols:
                accumulate(a, row_sum(g));
                break;
            case Op::BcastRows:
                accumulate(a, col_sum(g));
                break;
            case Op::BcastFull:
                accumulate(a, sum_all(g));
                break;
            case Op::AddRowVec:
                accumulate(a, g);
                if (propagates(b)) accumulate(b, col_sum(g));
                break;
            case Op::MulRowVec:
                if (propagates(a)) accumulate(a, mul_row_vec(g, b));
                if (propagates(b)) accumulate(b, col_sum(hadamard(g, a)));
                break;
            case Op::AddScalar:
                accumulate(a, g);
                if (propagates(b)) accumulate(b, sum_all(g));
                break;
            case Op::Concat2:
                if (propagates(a)) accumulate(a, slice_cols(g, 0, a_cols));
                if (propagates(b)) accumulate(b, slice_cols(g, a_cols, a_cols + b_cols));
                break;
            case Op::SliceCols:
                accumulate(a, pad_cols(g, i0, a_cols));
                break;
            case Op::PadCols:
                accumulate(a, slice_cols(g, i0, i0 + a_cols));
                break;
        }
    }
    return grad;
}

DenseMatrix Tape::grad_or_zero(const std::vector<int>& grads, int id) const {
    if (id < static_cast<int>(grads.size()) && grads[id] >= 0) return nodes_[grads[id]].value;
    return DenseMatrix(nodes_[id].value.rows(), nodes_[id].value.cols());
}

void Tape::replay() {
    for (auto& n : nodes_) {
        if (n.op != Op::Leaf) n.value = compute(n);
    }
}

}  // namespace olgan
