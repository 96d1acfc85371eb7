#pragma once

#include "olgan/matrix.hpp"

#include <vector>

namespace olgan {

// Matrix-level reverse-mode differentiation tape.
//
// Every primitive is recorded with its operands; values are computed eagerly
// at emission. backward() does not write gradients into buffers: it emits new
// tape nodes that *compute* the gradients. The reverse pass is therefore
// itself differentiable, which is what the gradient-penalty term needs
// (parameter gradients of a function of input gradients). Calling backward()
// a second time on a scalar built from first-pass gradient nodes yields exact
// second-order derivatives.
//
// A Tape is single-threaded. Node ids are indices into the tape, so operands
// always precede their consumers and one reverse scan visits each node once.
enum class Op {
    Leaf,
    Add,
    Hadamard,
    MatMul,
    Transpose,
    Affine,         // alpha * x + beta, elementwise
    LeakyRelu,      // alpha = negative slope
    LeakyMask,      // derivative of LeakyRelu; declared derivative is zero
    Tanh,
    Sqrt,
    Divide,
    SumAll,         // -> 1x1
    RowSum,         // NxM -> Nx1
    ColSum,         // NxM -> 1xM
    BcastCols,      // Nx1 -> NxM (i0 = M)
    BcastRows,      // 1xM -> NxM (i0 = N)
    BcastFull,      // 1x1 -> NxM (i0 = N, i1 = M)
    AddRowVec,      // NxM + 1xM row broadcast
    MulRowVec,      // NxM * 1xM row broadcast
    AddScalar,      // NxM + 1x1 node broadcast
    Concat2,        // [A | B] along columns
    SliceCols,      // columns [i0, i1)
    PadCols,        // place into zeros at column offset i0, total width i1
};

struct Node {
    Op op = Op::Leaf;
    int a = -1;
    int b = -1;
    double alpha = 1.0;
    double beta = 0.0;
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    DenseMatrix value;
    bool needs_grad = false;
};

class Tape {
public:
    int leaf(DenseMatrix value, bool requires_grad = false);

    int add(int a, int b);
    int hadamard(int a, int b);
    int matmul(int a, int b);
    int transpose(int a);
    int affine(int a, double alpha, double beta);
    int leaky_relu(int a, double slope);
    int leaky_mask(int a, double slope);
    int tanh_(int a);
    int sqrt_(int a);
    int divide(int a, int b);
    int sum_all(int a);
    int row_sum(int a);
    int col_sum(int a);
    int bcast_cols(int a, std::size_t cols);
    int bcast_rows(int a, std::size_t rows);
    int bcast_full(int a, std::size_t rows, std::size_t cols);
    int add_row_vec(int a, int v);
    int mul_row_vec(int a, int v);
    int add_scalar(int a, int s);
    int concat2(int a, int b);
    int slice_cols(int a, std::size_t begin, std::size_t end);
    int pad_cols(int a, std::size_t begin, std::size_t total);

    // Composites
    int sub(int a, int b) { return add(a, affine(b, -1.0, 0.0)); }
    int mean_all(int a);
    int square(int a) { return hadamard(a, a); }
    // Per-row euclidean norm: NxM -> Nx1
    int row_l2_norm(int a) { return sqrt_(row_sum(square(a))); }

    const DenseMatrix& val(int id) const { return nodes_[id].value; }
    const Node& node(int id) const { return nodes_[id]; }
    int size() const { return static_cast<int>(nodes_.size()); }
    void clear() { nodes_.clear(); }

    // Reverse pass from a scalar (1x1) output. Emits gradient nodes and
    // returns, for each node id present at call time, the id of its gradient
    // node or -1 when the node is disconnected from the output (gradient is
    // identically zero). Gradients flow only into subgraphs containing a
    // requires_grad leaf.
    std::vector<int> backward(int output);

    // Same, but propagates only into subgraphs containing one of `targets`.
    std::vector<int> backward(int output, const std::vector<int>& targets);

    // Gradient value for `id` given a backward() result; zeros if detached.
    DenseMatrix grad_or_zero(const std::vector<int>& grads, int id) const;

    // Recompute every node value in emission order. Deterministic primitives
    // make the replay bit-identical to the original evaluation.
    void replay();

private:
    int emit(Node n);
    DenseMatrix compute(const Node& n) const;
    std::vector<int> backward_impl(int output, const std::vector<int>* targets);

    std::vector<Node> nodes_;
};

}  // namespace olgan
