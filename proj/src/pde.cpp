#include "olgan/pde.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace olgan {

double gaussian_source_eval(double c1, double c2, double c3, double x, double y) {
    const double dx = x - c1;
    const double dy = y - c2;
    return 10.0 * std::exp(-0.5 * (dx * dx + dy * dy) / (c3 * c3));
}

PoissonProblem poisson_case1(double c1, double c2, double c3, std::size_t n) {
    if (!(c3 > 0.0)) throw std::invalid_argument("poisson_case1: c3 must be positive");
    PoissonProblem p;
    p.n = n;
    p.bc = PoissonBc::Case1Mixed;
    p.source = [=](double x, double y) { return gaussian_source_eval(c1, c2, c3, x, y); };
    p.neumann_flux = [](double x) { return std::sin(5.0 * x); };
    return p;
}

struct PoissonSolver::Impl {
    std::size_t n;
    PoissonBc bc;
    Eigen::SparseMatrix<double> A;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

namespace {

bool is_dirichlet_node(std::size_t i, std::size_t j, std::size_t n, PoissonBc bc) {
    if (bc == PoissonBc::AllDirichlet) return i == 0 || i == n - 1 || j == 0 || j == n - 1;
    return i == 0 || i == n - 1;  // Case1Mixed pins the x=0 and x=1 faces
}

}  // namespace

PoissonSolver::PoissonSolver(std::size_t n, PoissonBc bc) : impl_(std::make_unique<Impl>()) {
    if (n < 3) throw std::invalid_argument("PoissonSolver: need at least 3 nodes per axis");
    impl_->n = n;
    impl_->bc = bc;
    const double h = 1.0 / static_cast<double>(n - 1);
    const double ih2 = 1.0 / (h * h);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n * n);
    auto idx = [n](std::size_t i, std::size_t j) {
        return static_cast<int>(j * n + i);
    };

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const int row = idx(i, j);
            if (is_dirichlet_node(i, j, n, bc)) {
                trip.emplace_back(row, row, 1.0);
                continue;
            }
            // -lap with 5-point stencil; Neumann faces y=0, y=1 use a ghost
            // point eliminated by the flux condition, doubling the interior
            // neighbour coefficient.
            trip.emplace_back(row, row, 4.0 * ih2);
            trip.emplace_back(row, idx(i - 1, j), -ih2);
            trip.emplace_back(row, idx(i + 1, j), -ih2);
            if (j == 0) {
                trip.emplace_back(row, idx(i, 1), -2.0 * ih2);
            } else if (j == n - 1) {
                trip.emplace_back(row, idx(i, n - 2), -2.0 * ih2);
            } else {
                trip.emplace_back(row, idx(i, j - 1), -ih2);
                trip.emplace_back(row, idx(i, j + 1), -ih2);
            }
        }
    }

    impl_->A.resize(static_cast<int>(n * n), static_cast<int>(n * n));
    impl_->A.setFromTriplets(trip.begin(), trip.end());
    impl_->A.makeCompressed();
    impl_->lu.compute(impl_->A);
    if (impl_->lu.info() != Eigen::Success)
        throw std::runtime_error("PoissonSolver: factorization failed");
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

DenseMatrix PoissonSolver::solve(const PoissonProblem& p) const {
    const std::size_t n = impl_->n;
    if (p.n != n || p.bc != impl_->bc) throw std::invalid_argument("PoissonSolver: problem/solver mismatch");
    if (!p.source) throw std::invalid_argument("PoissonSolver: missing source");
    const double h = 1.0 / static_cast<double>(n - 1);

    Eigen::VectorXd b(static_cast<int>(n * n));
    for (std::size_t j = 0; j < n; ++j) {
        const double y = static_cast<double>(j) * h;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) * h;
            const int row = static_cast<int>(j * n + i);
            if (is_dirichlet_node(i, j, n, impl_->bc)) {
                b(row) = (impl_->bc == PoissonBc::AllDirichlet && p.dirichlet) ? p.dirichlet(x, y) : 0.0;
                continue;
            }
            double rhs = p.source(x, y);
            if (impl_->bc == PoissonBc::Case1Mixed && (j == 0 || j == n - 1)) {
                const double flux = p.neumann_flux ? p.neumann_flux(x) : 0.0;
                rhs += 2.0 / h * flux;
            }
            b(row) = rhs;
        }
    }

    Eigen::VectorXd u = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success) throw std::runtime_error("PoissonSolver: solve failed");
    const double resid = (impl_->A * u - b).norm();
    const double scale = std::max(1.0, b.norm());
    if (!(resid / scale < 1e-10)) throw std::runtime_error("PoissonSolver: residual above 1e-10");

    DenseMatrix field(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) field(j, i) = u(static_cast<int>(j * n + i));
    if (!field.all_finite()) throw std::runtime_error("PoissonSolver: non-finite solution");
    return field;
}

DenseMatrix solve_poisson(const PoissonProblem& p) {
    return PoissonSolver(p.n, p.bc).solve(p);
}

double interp_bilinear(const DenseMatrix& field, double x, double y) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
        throw std::invalid_argument("interp_bilinear: point outside the unit square");
    const std::size_t nx = field.cols();
    const std::size_t ny = field.rows();
    const double gx = x * static_cast<double>(nx - 1);
    const double gy = y * static_cast<double>(ny - 1);
    std::size_t i = std::min(static_cast<std::size_t>(gx), nx - 2);
    std::size_t j = std::min(static_cast<std::size_t>(gy), ny - 2);
    const double tx = gx - static_cast<double>(i);
    const double ty = gy - static_cast<double>(j);
    return (1 - tx) * (1 - ty) * field(j, i) + tx * (1 - ty) * field(j, i + 1) +
           (1 - tx) * ty * field(j + 1, i) + tx * ty * field(j + 1, i + 1);
}

std::vector<double> interp_sensors(const DenseMatrix& field, const SensorSet& sensors) {
    require_shape(sensors.coords.cols() == 2, "interp_sensors: sensors need (x, y) coordinates");
    std::vector<double> out(sensors.coords.rows());
    for (std::size_t s = 0; s < sensors.coords.rows(); ++s)
        out[s] = interp_bilinear(field, sensors.coords(s, 0), sensors.coords(s, 1));
    return out;
}

namespace {

// Tridiagonal solve (Thomas algorithm); b is the diagonal, a sub-, c super-.
void solve_tridiag(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                   std::vector<double>& rhs) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

// Linear interpolation of a uniform-grid sampled function onto nx points.
std::vector<double> regrid_linear(const std::vector<double>& src, std::size_t nx) {
    if (src.size() == nx) return src;
    std::vector<double> out(nx);
    const std::size_t m = src.size();
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(nx - 1);
        const double g = x * static_cast<double>(m - 1);
        const std::size_t k = std::min(static_cast<std::size_t>(g), m - 2);
        const double t = g - static_cast<double>(k);
        out[i] = (1 - t) * src[k] + t * src[k + 1];
    }
    return out;
}

}  // namespace

SpaceTimeField solve_diffusion_reaction(const DiffusionReactionProblem& p) {
    if (!(p.diffusion > 0.0)) throw std::invalid_argument("solve_diffusion_reaction: diffusion must be positive");
    if (p.nx < 3 || p.nt < 2) throw std::invalid_argument("solve_diffusion_reaction: grid too small");
    if (p.source.size() < 2) throw std::invalid_argument("solve_diffusion_reaction: need source samples");

    const std::size_t nx = p.nx;
    const std::size_t ni = nx - 2;  // interior unknowns
    const double h = 1.0 / static_cast<double>(nx - 1);
    const double dt = 1.0 / static_cast<double>(p.nt - 1);
    const double ih2 = 1.0 / (h * h);
    const std::vector<double> u = regrid_linear(p.source, nx);

    SpaceTimeField out;
    out.nx = nx;
    out.nt = p.nt;
    out.values = DenseMatrix(p.nt, nx);  // zero initial condition in row 0

    auto rate = [&](const std::vector<double>& s, std::size_t i) {
        // F(s)_i = D s_xx + k s^2 + u at interior index i (1-based grid index i+1)
        const double sm = i == 0 ? 0.0 : s[i - 1];
        const double sp = i == ni - 1 ? 0.0 : s[i + 1];
        return p.diffusion * (sm - 2.0 * s[i] + sp) * ih2 + p.reaction * s[i] * s[i] + u[i + 1];
    };

    std::vector<double> sn(ni, 0.0), v(ni), fn(ni), g(ni);
    std::vector<double> sub(ni), diag(ni), sup(ni), rhs(ni);

    for (std::size_t step = 1; step < p.nt; ++step) {
        for (std::size_t i = 0; i < ni; ++i) fn[i] = rate(sn, i);
        v = sn;  // warm start
        bool converged = false;
        for (int it = 0; it < p.newton_max_iter; ++it) {
            // G(v) = v - sn - dt/2 (F(v) + F(sn))
            double gmax = 0.0;
            for (std::size_t i = 0; i < ni; ++i) {
                g[i] = v[i] - sn[i] - 0.5 * dt * (rate(v, i) + fn[i]);
                gmax = std::max(gmax, std::fabs(g[i]));
            }
            if (gmax < p.newton_tol) {
                converged = true;
                break;
            }
            // J = I - dt/2 (D L + 2k diag(v))
            for (std::size_t i = 0; i < ni; ++i) {
                diag[i] = 1.0 - 0.5 * dt * (-2.0 * p.diffusion * ih2 + 2.0 * p.reaction * v[i]);
                sub[i] = -0.5 * dt * p.diffusion * ih2;
                sup[i] = -0.5 * dt * p.diffusion * ih2;
                rhs[i] = -g[i];
            }
            solve_tridiag(sub, diag, sup, rhs);
            for (std::size_t i = 0; i < ni; ++i) v[i] += rhs[i];
        }
        if (!converged) throw std::runtime_error("solve_diffusion_reaction: Newton did not converge");
        sn = v;
        for (std::size_t i = 0; i < ni; ++i) out.values(step, i + 1) = sn[i];
    }
    if (!out.values.all_finite()) throw std::runtime_error("solve_diffusion_reaction: non-finite solution");
    return out;
}

SpaceTimeField resample_space_time(const SpaceTimeField& f, std::size_t mx, std::size_t mt) {
    SpaceTimeField out;
    out.nx = mx;
    out.nt = mt;
    out.values = DenseMatrix(mt, mx);
    for (std::size_t k = 0; k < mt; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(mt - 1);
        for (std::size_t i = 0; i < mx; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(mx - 1);
            out.values(k, i) = interp_bilinear(f.values, x, t);
        }
    }
    return out;
}

}  // namespace olgan
