#pragma once

#include "olgan/matrix.hpp"
#include "olgan/rng.hpp"
#include "olgan/tape.hpp"

#include <cstddef>
#include <vector>

namespace olgan {

enum class Activation { LeakyRelu, Tanh, Identity };

// One affine layer. weight is fan_out x fan_in, bias is 1 x fan_out.
struct FnnLayer {
    DenseMatrix weight;
    DenseMatrix bias;
};

// Fully-connected network. Hidden layers use `activation`; the final layer
// uses `output_activation` (Identity unless configured otherwise).
struct FnnParams {
    std::vector<FnnLayer> layers;
    Activation activation = Activation::LeakyRelu;
    Activation output_activation = Activation::Identity;
    double slope = 0.01;

    std::size_t input_dim() const { return layers.front().weight.cols(); }
    std::size_t output_dim() const { return layers.back().weight.rows(); }
    std::size_t n_layers() const { return layers.size(); }

    // Flat tensor list [w0, b0, w1, b1, ...] for optimizers and checkpoints.
    std::vector<DenseMatrix*> tensors();
    std::vector<const DenseMatrix*> tensors() const;
};

// Uniform on [-b, b] with b = gain * sqrt(3 / fan_in), gain = sqrt(2 / (1 + slope^2)).
DenseMatrix kaiming_uniform_init(std::size_t fan_out, std::size_t fan_in, double slope, Rng& rng);

// Build an FNN with the given layer widths (widths = {in, h1, ..., out}).
// Weights Kaiming-uniform, biases zero. Tanh/Identity nets initialize with
// slope 0 (pure sqrt(2) gain); LeakyRelu nets use their negative slope.
FnnParams make_fnn(const std::vector<std::size_t>& widths, Activation act, Rng& rng,
                   double slope = 0.01, Activation output_act = Activation::Identity);

// Plain forward pass, input is batch-rows x input_dim.
DenseMatrix fnn_forward(const FnnParams& net, const DenseMatrix& input);

// Network placed on a tape: parameter leaves plus a forward() that records
// every op. Gradients for the parameter nodes come from Tape::backward.
struct TapedFnn {
    const FnnParams* net = nullptr;
    std::vector<int> weight_nodes;
    std::vector<int> bias_nodes;

    int forward(Tape& tape, int input_node) const;
    std::vector<int> param_nodes() const;
};

TapedFnn put_on_tape(Tape& tape, const FnnParams& net, bool requires_grad);

// Gradient of the scalar network output with respect to its input (1 x in).
DenseMatrix input_gradient(const FnnParams& net, const DenseMatrix& input);

// Parameter gradients of lambda * (||grad_input net(input)||_2 - 1)^2 for a
// scalar-output network, computed by differentiating the recorded reverse
// pass a second time. Returns [dw0, db0, dw1, db1, ...] and optionally the
// penalty value itself.
std::vector<DenseMatrix> penalty_parameter_gradient(const FnnParams& net, const DenseMatrix& input,
                                                    double lambda, double* penalty_value = nullptr);

}  // namespace olgan
