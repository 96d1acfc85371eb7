#pragma once

#include "olgan/matrix.hpp"

#include <cstdint>
#include <vector>

namespace olgan {

// Bias-corrected Adam over a flat list of tensors. Moment tensors mirror the
// parameter shapes; they are created lazily on the first step.
struct AdamState {
    double lr = 1e-4;
    double beta1 = 0.0;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t step = 0;
    std::vector<DenseMatrix> m;
    std::vector<DenseMatrix> v;
};

// One update. Throws on non-finite gradients: training diagnostics depend on
// NaNs being a hard error, not a silent parameter wipe.
void adam_step(AdamState& state, const std::vector<DenseMatrix*>& params,
               const std::vector<DenseMatrix>& grads);

}  // namespace olgan
