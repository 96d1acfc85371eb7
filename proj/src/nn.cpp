#include "olgan/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace olgan {

std::vector<DenseMatrix*> FnnParams::tensors() {
    std::vector<DenseMatrix*> out;
    out.reserve(2 * layers.size());
    for (auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

std::vector<const DenseMatrix*> FnnParams::tensors() const {
    std::vector<const DenseMatrix*> out;
    out.reserve(2 * layers.size());
    for (const auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

DenseMatrix kaiming_uniform_init(std::size_t fan_out, std::size_t fan_in, double slope, Rng& rng) {
    if (fan_in == 0 || fan_out == 0) throw ShapeError("kaiming_uniform_init: zero fan");
    const double gain = std::sqrt(2.0 / (1.0 + slope * slope));
    const double bound = gain * std::sqrt(3.0 / static_cast<double>(fan_in));
    DenseMatrix w(fan_out, fan_in);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
    return w;
}

FnnParams make_fnn(const std::vector<std::size_t>& widths, Activation act, Rng& rng, double slope,
                   Activation output_act) {
    if (widths.size() < 2) throw ShapeError("make_fnn: need at least input and output widths");
    FnnParams net;
    net.activation = act;
    net.output_activation = output_act;
    net.slope = slope;
    const double init_slope = (act == Activation::LeakyRelu) ? slope : 0.0;
    for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
        FnnLayer layer;
        layer.weight = kaiming_uniform_init(widths[k + 1], widths[k], init_slope, rng);
        layer.bias = DenseMatrix(1, widths[k + 1]);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

void apply_activation(DenseMatrix& x, Activation act, double slope) {
    switch (act) {
        case Activation::LeakyRelu:
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] <= 0.0) x[i] *= slope;
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::tanh(x[i]);
            break;
        case Activation::Identity:
            break;
    }
}

}  // namespace

DenseMatrix fnn_forward(const FnnParams& net, const DenseMatrix& input) {
    require_shape(input.cols() == net.input_dim(), "fnn_forward: input dim mismatch");
    DenseMatrix x = input;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const FnnLayer& l = net.layers[k];
        DenseMatrix y = matmul_nt(x, l.weight);
        for (std::size_t r = 0; r < y.rows(); ++r)
            for (std::size_t j = 0; j < y.cols(); ++j) y(r, j) += l.bias(0, j);
        const bool last = (k + 1 == net.layers.size());
        apply_activation(y, last ? net.output_activation : net.activation, net.slope);
        x = std::move(y);
    }
    return x;
}

TapedFnn put_on_tape(Tape& tape, const FnnParams& net, bool requires_grad) {
    TapedFnn t;
    t.net = &net;
    for (const auto& l : net.layers) {
        t.weight_nodes.push_back(tape.leaf(l.weight, requires_grad));
        t.bias_nodes.push_back(tape.leaf(l.bias, requires_grad));
    }
    return t;
}

int TapedFnn::forward(Tape& tape, int input_node) const {
    require_shape(tape.val(input_node).cols() == net->input_dim(), "fnn_forward: input dim mismatch");
    int x = input_node;
    for (std::size_t k = 0; k < net->layers.size(); ++k) {
        int y = tape.matmul(x, tape.transpose(weight_nodes[k]));
        y = tape.add_row_vec(y, bias_nodes[k]);
        const bool last = (k + 1 == net->layers.size());
        const Activation act = last ? net->output_activation : net->activation;
        switch (act) {
            case Activation::LeakyRelu:
                y = tape.leaky_relu(y, net->slope);
                break;
            case Activation::Tanh:
                y = tape.tanh_(y);
                break;
            case Activation::Identity:
                break;
        }
        x = y;
    }
    return x;
}

std::vector<int> TapedFnn::param_nodes() const {
    std::vector<int> out;
    out.reserve(2 * weight_nodes.size());
    for (std::size_t k = 0; k < weight_nodes.size(); ++k) {
        out.push_back(weight_nodes[k]);
        out.push_back(bias_nodes[k]);
    }
    return out;
}

DenseMatrix input_gradient(const FnnParams& net, const DenseMatrix& input) {
    require_shape(net.output_dim() == 1, "input_gradient: network output must be scalar");
    Tape tape;
    const int in = tape.leaf(input, true);
    const TapedFnn taped = put_on_tape(tape, net, false);
    int out = taped.forward(tape, in);
    if (tape.val(out).size() != 1) out = tape.sum_all(out);  // 1-row batch
    const auto grads = tape.backward(out, {in});
    return tape.grad_or_zero(grads, in);
}

std::vector<DenseMatrix> penalty_parameter_gradient(const FnnParams& net, const DenseMatrix& input,
                                                    double lambda, double* penalty_value) {
    require_shape(net.output_dim() == 1, "penalty_parameter_gradient: output must be scalar");
    if (!input.all_finite()) throw std::invalid_argument("penalty_parameter_gradient: non-finite input");
    Tape tape;
    const int in = tape.leaf(input, true);
    const TapedFnn taped = put_on_tape(tape, net, true);
    int out = taped.forward(tape, in);
    if (tape.val(out).size() != 1) out = tape.sum_all(out);

    const auto in_grads = tape.backward(out, {in});
    const int g = in_grads[in];
    const int norm = tape.row_l2_norm(g);  // 1x1 for a single input row
    const int dev = tape.affine(norm, 1.0, -1.0);
    const int pen = tape.affine(tape.square(dev), lambda, 0.0);
    if (penalty_value) *penalty_value = tape.val(pen)[0];

    const auto params = taped.param_nodes();
    const auto grads = tape.backward(pen, params);
    std::vector<DenseMatrix> out_grads;
    out_grads.reserve(params.size());
    for (int p : params) out_grads.push_back(tape.grad_or_zero(grads, p));
    return out_grads;
}

}  // namespace olgan
