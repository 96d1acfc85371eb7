#pragma once

#include "olgan/matrix.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace olgan {

// ---------------------------------------------------------------------------
// Case-1 style Poisson problem on the unit square: -lap(u) = f.
//
// Case1Mixed: u = 0 on the faces x=0 and x=1; du/dn = flux(x) on y=0 and y=1
// with n the outward normal (ghost-point elimination, second order).
// AllDirichlet: u = dirichlet(x,y) on the whole boundary (verification mode).
// ---------------------------------------------------------------------------

enum class PoissonBc { Case1Mixed, AllDirichlet };

struct PoissonProblem {
    std::size_t n = 33;  // nodes per axis, >= 3
    PoissonBc bc = PoissonBc::Case1Mixed;
    std::function<double(double, double)> source;
    std::function<double(double)> neumann_flux;                  // Case1Mixed only
    std::function<double(double, double)> dirichlet;             // AllDirichlet only
};

// f = 10 exp(-0.5 ((x-c1)^2 + (y-c2)^2) / c3^2)
double gaussian_source_eval(double c1, double c2, double c3, double x, double y);

PoissonProblem poisson_case1(double c1, double c2, double c3, std::size_t n = 33);

// Factorizes the discrete operator once; solve() per right-hand side. The
// returned field is n x n with value(row=j, col=i) at (x_i, y_j).
class PoissonSolver {
public:
    PoissonSolver(std::size_t n, PoissonBc bc);
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;

    DenseMatrix solve(const PoissonProblem& p) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

DenseMatrix solve_poisson(const PoissonProblem& p);

// ---------------------------------------------------------------------------
// Sensors
// ---------------------------------------------------------------------------

enum class SensorLayout { Uniform, Random };

struct SensorSet {
    DenseMatrix coords;  // n x dim, inside the closed domain
    SensorLayout layout = SensorLayout::Uniform;
};

// Bilinear interpolation of a unit-square nodal field (n x n, row=y index).
std::vector<double> interp_sensors(const DenseMatrix& field, const SensorSet& sensors);
double interp_bilinear(const DenseMatrix& field, double x, double y);

// ---------------------------------------------------------------------------
// Case-3 diffusion-reaction system on x,t in [0,1]:
//   ds/dt = diffusion * s_xx + reaction * s^2 + u(x),  s(0)=s(1)=0, s(.,0)=0
// Crank-Nicolson in time with Newton iteration on the quadratic term.
// ---------------------------------------------------------------------------

struct DiffusionReactionProblem {
    double diffusion = 0.01;
    double reaction = 0.01;
    std::vector<double> source;  // values on uniform points of [0,1] (including endpoints)
    std::size_t nx = 100;        // grid points in x
    std::size_t nt = 100;        // time levels (t=0 included)
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
};

struct SpaceTimeField {
    std::size_t nx = 0;
    std::size_t nt = 0;
    DenseMatrix values;  // nt rows x nx cols; values(k, i) = s(x_i, t_k)
};

SpaceTimeField solve_diffusion_reaction(const DiffusionReactionProblem& p);

// Bilinear resampling of a space-time field onto an m_x x m_t uniform grid
// (used for the 33x33 training view).
SpaceTimeField resample_space_time(const SpaceTimeField& f, std::size_t mx, std::size_t mt);

}  // namespace olgan
