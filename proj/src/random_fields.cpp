#include "olgan/random_fields.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace olgan {

double kernel_eval(const SquaredExpKernel& k, const double* x, const double* y, std::size_t dim) {
    double d2 = 0.0;
    for (std::size_t t = 0; t < dim; ++t) {
        const double d = x[t] - y[t];
        d2 += d * d;
    }
    return k.variance * std::exp(-0.5 * d2 / (k.lengthscale * k.lengthscale));
}

double kernel_eval(const SquaredExpKernel& k, const DenseMatrix& pts, std::size_t i, std::size_t j) {
    return kernel_eval(k, pts.data() + i * pts.cols(), pts.data() + j * pts.cols(), pts.cols());
}

DenseMatrix kernel_matrix(const SquaredExpKernel& k, const DenseMatrix& grid) {
    const std::size_t n = grid.rows();
    DenseMatrix K(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        K(i, i) = k.variance;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = kernel_eval(k, grid, i, j);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

KleBasis build_kle(const SquaredExpKernel& k, const DenseMatrix& grid, double energy) {
    if (grid.rows() == 0) throw std::invalid_argument("build_kle: empty grid");
    if (!(energy > 0.0 && energy <= 1.0)) throw std::invalid_argument("build_kle: energy in (0,1]");
    if (!(k.lengthscale > 0.0)) throw std::invalid_argument("build_kle: lengthscale must be positive");

    const std::size_t n = grid.rows();
    const DenseMatrix K = kernel_matrix(k, grid);
    Eigen::MatrixXd Ke(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Ke(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = K(i, j);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ke);
    if (es.info() != Eigen::Success) throw std::runtime_error("build_kle: eigensolver did not converge");

    // Eigen returns ascending order; flip to nonincreasing and clamp round-off.
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = es.eigenvalues()(static_cast<Eigen::Index>(n - 1 - i));
        lambda[i] = std::max(v, 0.0);
    }
    const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);

    std::size_t keep = n;
    double run = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        run += lambda[i];
        if (run >= energy * total) {
            keep = i + 1;
            break;
        }
    }

    KleBasis basis;
    basis.grid = grid;
    basis.eigenvalues.assign(lambda.begin(), lambda.begin() + static_cast<std::ptrdiff_t>(keep));
    basis.modes = DenseMatrix(n, keep);
    for (std::size_t kcol = 0; kcol < keep; ++kcol)
        for (std::size_t i = 0; i < n; ++i)
            basis.modes(i, kcol) = es.eigenvectors()(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(n - 1 - kcol));
    basis.energy_fraction = total > 0.0 ? run / total : 1.0;
    return basis;
}

std::vector<double> gp_from_coefficients(const KleBasis& basis, const std::vector<double>& xi) {
    require_shape(xi.size() == basis.eigenvalues.size(), "gp_from_coefficients: coefficient count");
    const std::size_t n = basis.modes.rows();
    std::vector<double> g(n, 0.0);
    for (std::size_t k = 0; k < xi.size(); ++k) {
        const double c = std::sqrt(basis.eigenvalues[k]) * xi[k];
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) g[i] += c * basis.modes(i, k);
    }
    return g;
}

std::vector<double> sample_gp(const KleBasis& basis, Rng& rng) {
    std::vector<double> xi(basis.eigenvalues.size());
    for (auto& v : xi) v = rng.normal();
    return gp_from_coefficients(basis, xi);
}

DenseMatrix lhs_sample(std::size_t n, const std::vector<std::pair<double, double>>& bounds, Rng& rng) {
    if (n == 0) throw std::invalid_argument("lhs_sample: n must be >= 1");
    const std::size_t dim = bounds.size();
    for (const auto& [lo, hi] : bounds)
        if (!(lo < hi)) throw std::invalid_argument("lhs_sample: degenerate bounds");

    DenseMatrix out(n, dim);
    std::vector<std::size_t> perm(n);
    for (std::size_t d = 0; d < dim; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        // Fisher-Yates on our own RNG keeps runs reproducible across platforms
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(i + 1)]);
        const auto [lo, hi] = bounds[d];
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(n);
            out(i, d) = lo + (hi - lo) * u;
        }
    }
    return out;
}

}  // namespace olgan
