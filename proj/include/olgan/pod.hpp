#pragma once

#include "olgan/matrix.hpp"

#include <vector>

namespace olgan {

// Snapshot POD. Modes are the left singular directions of the centered
// snapshot matrix arranged with one snapshot per column, i.e. orthonormal
// fields on the grid. Energies are squared singular values / (S - 1).
struct PodBasis {
    DenseMatrix mean;               // 1 x N
    DenseMatrix modes;              // N x k, k = min(S, N)
    std::vector<double> energies;   // nonincreasing
    DenseMatrix coords;             // N x dim training coordinates (optional)
};

PodBasis compute_pod(const DenseMatrix& snapshots /* S x N, rows are samples */);

}  // namespace olgan
