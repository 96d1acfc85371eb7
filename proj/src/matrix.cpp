#include "olgan/matrix.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace olgan {

namespace {

using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const EigenRowMajor>;
using Map = Eigen::Map<EigenRowMajor>;

MapC view(const DenseMatrix& m) {
    return MapC(m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

bool DenseMatrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    require_shape(a.cols() == b.rows(), "matmul: inner dimensions mismatch");
    DenseMatrix c(a.rows(), b.cols());
    Map(c.data(), c.rows(), c.cols()).noalias() = view(a) * view(b);
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    require_shape(a.rows() == b.rows(), "matmul_tn: inner dimensions mismatch");
    DenseMatrix c(a.cols(), b.cols());
    Map(c.data(), c.rows(), c.cols()).noalias() = view(a).transpose() * view(b);
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    require_shape(a.cols() == b.cols(), "matmul_nt: inner dimensions mismatch");
    DenseMatrix c(a.rows(), b.rows());
    Map(c.data(), c.rows(), c.cols()).noalias() = view(a) * view(b).transpose();
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix c(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t col = 0; col < a.cols(); ++col) c(col, r) = a(r, col);
    return c;
}

double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
    return std::sqrt(s);
}

}  // namespace olgan
