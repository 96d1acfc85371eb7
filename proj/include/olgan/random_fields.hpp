#pragma once

#include "olgan/matrix.hpp"
#include "olgan/rng.hpp"

#include <utility>
#include <vector>

namespace olgan {

struct SquaredExpKernel {
    double lengthscale = 0.2;
    double variance = 1.0;
};

// variance * exp(-0.5 ||x - y||^2 / lengthscale^2); points are rows of a
// coordinate matrix (any dimension).
double kernel_eval(const SquaredExpKernel& k, const double* x, const double* y, std::size_t dim);
double kernel_eval(const SquaredExpKernel& k, const DenseMatrix& pts, std::size_t i, std::size_t j);

DenseMatrix kernel_matrix(const SquaredExpKernel& k, const DenseMatrix& grid);

// Truncated Karhunen-Loeve basis of the kernel on a grid of points.
struct KleBasis {
    DenseMatrix grid;                   // n x dim
    std::vector<double> eigenvalues;    // retained, nonincreasing, >= 0
    DenseMatrix modes;                  // n x k, orthonormal columns
    double energy_fraction = 0.0;       // achieved sum(retained) / sum(all)
};

// Dense symmetric eigendecomposition; retains the smallest eigenpair prefix
// whose eigenvalue sum reaches `energy` of the total. Round-off negatives are
// clamped to zero.
KleBasis build_kle(const SquaredExpKernel& k, const DenseMatrix& grid, double energy);

// g = sum_k sqrt(lambda_k) xi_k psi_k with xi ~ N(0,1) i.i.d.
std::vector<double> sample_gp(const KleBasis& basis, Rng& rng);
std::vector<double> gp_from_coefficients(const KleBasis& basis, const std::vector<double>& xi);

// Latin hypercube: per dimension one sample in each of n equal-width strata,
// mapped affinely into the bounds.
DenseMatrix lhs_sample(std::size_t n, const std::vector<std::pair<double, double>>& bounds, Rng& rng);

}  // namespace olgan
