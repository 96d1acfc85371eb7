#include "olgan/pod.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace olgan {

PodBasis compute_pod(const DenseMatrix& snapshots) {
    const std::size_t S = snapshots.rows();
    const std::size_t N = snapshots.cols();
    if (S < 2) throw std::invalid_argument("compute_pod: need at least 2 snapshots");

    PodBasis basis;
    basis.mean = DenseMatrix(1, N);
    for (std::size_t j = 0; j < N; ++j) {
        double m = 0.0;
        for (std::size_t s = 0; s < S; ++s) m += snapshots(s, j);
        basis.mean(0, j) = m / static_cast<double>(S);
    }

    // centered snapshots as columns: N x S
    Eigen::MatrixXd X(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(S));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t j = 0; j < N; ++j)
            X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(s)) =
                snapshots(s, j) - basis.mean(0, j);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU);
    const auto& U = svd.matrixU();
    const auto& sv = svd.singularValues();
    const std::size_t k = static_cast<std::size_t>(sv.size());

    basis.modes = DenseMatrix(N, k);
    basis.energies.resize(k);
    for (std::size_t m = 0; m < k; ++m) {
        basis.energies[m] = sv(static_cast<Eigen::Index>(m)) * sv(static_cast<Eigen::Index>(m)) /
                            static_cast<double>(S - 1);
        for (std::size_t j = 0; j < N; ++j)
            basis.modes(j, m) = U(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m));
    }
    return basis;
}

}  // namespace olgan
