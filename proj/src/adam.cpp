#include "olgan/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace olgan {

void adam_step(AdamState& state, const std::vector<DenseMatrix*>& params,
               const std::vector<DenseMatrix>& grads) {
    if (params.size() != grads.size()) throw ShapeError("adam_step: param/grad count mismatch");
    if (state.lr <= 0.0) throw std::invalid_argument("adam_step: lr must be positive");

    if (state.m.empty()) {
        for (const auto* p : params) {
            state.m.emplace_back(p->rows(), p->cols());
            state.v.emplace_back(p->rows(), p->cols());
        }
    }
    for (std::size_t t = 0; t < params.size(); ++t) {
        require_shape(params[t]->same_shape(grads[t]), "adam_step: grad shape mismatch");
        if (!grads[t].all_finite()) throw std::runtime_error("adam_step: non-finite gradient");
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (std::size_t t = 0; t < params.size(); ++t) {
        DenseMatrix& p = *params[t];
        const DenseMatrix& g = grads[t];
        DenseMatrix& m = state.m[t];
        DenseMatrix& v = state.v[t];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace olgan
