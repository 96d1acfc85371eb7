#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "olgan/generator.hpp"
#include "olgan/pde.hpp"
#include "olgan/pod.hpp"
#include "test_support.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

using namespace olgan;
using namespace olgan::test;

namespace {

DenseMatrix sensor_lattice_9x9() {
    DenseMatrix coords(81, 2);
    for (std::size_t j = 0; j < 9; ++j)
        for (std::size_t i = 0; i < 9; ++i) {
            coords(j * 9 + i, 0) = 0.1 * static_cast<double>(i + 1);
            coords(j * 9 + i, 1) = 0.1 * static_cast<double>(j + 1);
        }
    return coords;
}

// smooth synthetic snapshots on the 9x9 lattice
DenseMatrix smooth_snapshots(std::size_t S, Rng& rng, const DenseMatrix& coords) {
    DenseMatrix snaps(S, coords.rows());
    for (std::size_t s = 0; s < S; ++s) {
        const double a = rng.uniform(0.5, 2.0);
        const double b = rng.uniform(0.5, 2.0);
        const double amp = rng.uniform(0.5, 1.5);
        for (std::size_t i = 0; i < coords.rows(); ++i)
            snaps(s, i) = amp * std::sin(a * std::numbers::pi * coords(i, 0)) *
                          std::sin(b * std::numbers::pi * coords(i, 1));
    }
    return snaps;
}

void zero_last_layer(FnnParams& net) {
    net.layers.back().weight.fill(0.0);
    net.layers.back().bias.fill(0.0);
}

}  // namespace

TEST_CASE("pod: constant snapshots have zero energy and exact mean") {
    DenseMatrix snaps(5, 7);
    for (std::size_t j = 0; j < 7; ++j)
        for (std::size_t s = 0; s < 5; ++s) snaps(s, j) = 2.0 + 0.3 * static_cast<double>(j);
    PodBasis basis = compute_pod(snaps);
    for (std::size_t j = 0; j < 7; ++j) CHECK(basis.mean(0, j) == doctest::Approx(snaps(0, j)));
    for (double e : basis.energies) CHECK(e == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pod: rank-1 centered snapshots put all energy in the first mode") {
    Rng rng(31);
    DenseMatrix dir = random_matrix(rng, 1, 9);
    DenseMatrix snaps(6, 9);
    for (std::size_t s = 0; s < 6; ++s) {
        const double c = rng.uniform(-2.0, 2.0);
        for (std::size_t j = 0; j < 9; ++j) snaps(s, j) = 1.0 + c * dir(0, j);
    }
    PodBasis basis = compute_pod(snaps);
    double total = 0.0;
    for (double e : basis.energies) total += e;
    CHECK(basis.energies[0] / total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pod: full-mode reconstruction reproduces snapshots") {
    Rng rng(37);
    DenseMatrix snaps = random_matrix(rng, 8, 12);
    PodBasis basis = compute_pod(snaps);
    // modes are orthonormal
    for (std::size_t a = 0; a < basis.modes.cols(); ++a)
        for (std::size_t b = a; b < basis.modes.cols(); ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < 12; ++j) dot += basis.modes(j, a) * basis.modes(j, b);
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8));
        }
    // reconstruction: snapshot = mean + sum_k <centered, phi_k> phi_k
    for (std::size_t s = 0; s < 8; ++s)
        for (std::size_t j = 0; j < 12; ++j) {
            double rec = basis.mean(0, j);
            for (std::size_t k = 0; k < basis.modes.cols(); ++k) {
                double coef = 0.0;
                for (std::size_t jj = 0; jj < 12; ++jj)
                    coef += (snaps(s, jj) - basis.mean(0, jj)) * basis.modes(jj, k);
                rec += coef * basis.modes(j, k);
            }
            CHECK(rec == doctest::Approx(snaps(s, j)).epsilon(1e-8));
        }
}

TEST_CASE("deeponet combine hand case") {
    // p=2, b=(1,2), t(x)=(x, x^2) at x=0.5, b0=0.5 -> 1*0.5 + 2*0.25 + 0.5 = 1.5
    DenseMatrix b(1, 2);
    b(0, 0) = 1.0;
    b(0, 1) = 2.0;
    DenseMatrix t(1, 2);
    t(0, 0) = 0.5;
    t(0, 1) = 0.25;
    DenseMatrix out = deeponet_combine(b, t, 0.5);
    CHECK(out(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("vanilla head with zero branch output is the constant b0") {
    Rng rng(41);
    DenseMatrix coords = sensor_lattice_9x9();
    GeneratorHead head = make_vanilla_head("d", FieldRole::Response, coords, 3, 10, {16}, {16}, rng);
    zero_last_layer(head.branch);
    head.b0[0] = 0.5;
    DenseMatrix z = random_matrix(rng, 4, 3);
    DenseMatrix out = head_eval_std(head, z);
    CHECK(out.rows() == 4);
    CHECK(out.cols() == 81);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(0.5));
}

TEST_CASE("pod head with zero branch output returns the surrogate mean") {
    Rng rng(43);
    DenseMatrix coords = sensor_lattice_9x9();
    DenseMatrix snaps = smooth_snapshots(30, rng, coords);
    PodBasis basis = compute_pod(snaps);
    basis.coords = coords;
    TrunkSurrogateConfig cfg;
    cfg.max_iters = 2000;  // rough fit is fine here
    cfg.target_mse = 1e-8;
    TrunkSurrogate surr = fit_trunk_surrogates(basis, 4, cfg);

    GeneratorHead head = make_pod_head("d", FieldRole::Response, coords, 3, 4, {16}, surr, rng);
    zero_last_layer(head.branch);
    DenseMatrix z = random_matrix(rng, 2, 3);
    DenseMatrix out = head_eval_std(head, z);
    DenseMatrix mu = fnn_forward(head.surrogate.mean_net, coords);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t j = 0; j < 81; ++j) CHECK(out(r, j) == doctest::Approx(mu(j, 0)).epsilon(1e-12));
}

TEST_CASE("joint assembly round trips") {
    std::vector<double> m{0.1, 0.2, 0.3};
    std::vector<double> d(81, 1.5);
    auto a = assemble_joint(m, d);
    CHECK(a.size() == 84);  // case-1 dims: 3 + 81
    CHECK(extract_m(a, 3) == m);
    CHECK(extract_d(a, 3) == d);
}

TEST_CASE("resolution independence: restriction property") {
    Rng rng(47);
    DenseMatrix coords = sensor_lattice_9x9();

    // vanilla and pod heads, evaluated on A, B, and A (union) B
    DenseMatrix A(5, 2), B(3, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        A(i, 0) = 0.1 + 0.13 * static_cast<double>(i);
        A(i, 1) = 0.8 - 0.11 * static_cast<double>(i);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        B(i, 0) = 0.25 + 0.2 * static_cast<double>(i);
        B(i, 1) = 0.3 + 0.17 * static_cast<double>(i);
    }
    DenseMatrix AB(8, 2);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t d = 0; d < 2; ++d) AB(i, d) = A(i, d);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t d = 0; d < 2; ++d) AB(5 + i, d) = B(i, d);

    DenseMatrix snaps = smooth_snapshots(30, rng, coords);
    PodBasis basis = compute_pod(snaps);
    basis.coords = coords;
    TrunkSurrogateConfig cfg;
    cfg.max_iters = 500;
    TrunkSurrogate surr = fit_trunk_surrogates(basis, 4, cfg);

    GeneratorHead vanilla = make_vanilla_head("d", FieldRole::Response, coords, 3, 10, {16}, {16}, rng);
    GeneratorHead pod = make_pod_head("d", FieldRole::Response, coords, 3, 4, {16}, surr, rng);

    DenseMatrix z = random_matrix(rng, 2, 3);
    for (const GeneratorHead* head : {&vanilla, &pod}) {
        DenseMatrix ya = head_eval(*head, z, &A);
        DenseMatrix yb = head_eval(*head, z, &B);
        DenseMatrix yab = head_eval(*head, z, &AB);
        for (std::size_t r = 0; r < 2; ++r) {
            for (std::size_t i = 0; i < 5; ++i) CHECK(std::fabs(ya(r, i) - yab(r, i)) < 1e-12);
            for (std::size_t i = 0; i < 3; ++i) CHECK(std::fabs(yb(r, i) - yab(r, 5 + i)) < 1e-12);
        }
    }
}

TEST_CASE("parameter head output depends only on z") {
    Rng rng(53);
    GeneratorSpec gen;
    gen.latent_dim = 3;
    gen.heads.push_back(make_param_head("m", 3, 3, {8}, rng));
    gen.heads.push_back(
        make_vanilla_head("d", FieldRole::Response, sensor_lattice_9x9(), 3, 10, {8}, {8}, rng));

    DenseMatrix z = random_matrix(rng, 2, 3);
    DenseMatrix other(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        other(i, 0) = 0.2 + 0.1 * static_cast<double>(i);
        other(i, 1) = 0.5;
    }
    std::vector<const DenseMatrix*> override{nullptr, &other};
    DenseMatrix full = generator_forward(gen, z);
    DenseMatrix moved = generator_forward(gen, z, &override);
    CHECK(full.cols() == 3 + 81);
    CHECK(moved.cols() == 3 + 4);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t j = 0; j < 3; ++j) CHECK(full(r, j) == moved(r, j));
}

TEST_CASE("standardization round trip and scalar mode") {
    Rng rng(59);
    DenseMatrix data = random_matrix(rng, 40, 5, -3.0, 7.0);
    for (bool per_dim : {true, false}) {
        Standardization s = compute_standardization(data, per_dim);
        DenseMatrix back = destandardize(standardize(data, s), s);
        for (std::size_t i = 0; i < data.size(); ++i)
            CHECK(back[i] == doctest::Approx(data[i]).epsilon(1e-12));
    }
    // standardized per-dim data has zero mean, unit variance per column
    Standardization s = compute_standardization(data, true);
    DenseMatrix z = standardize(data, s);
    for (std::size_t j = 0; j < 5; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < 40; ++i) m += z(i, j);
        CHECK(std::fabs(m / 40.0) < 1e-12);
    }
}

TEST_CASE("trunk surrogate fits and freezes") {
    Rng rng(61);
    DenseMatrix coords = sensor_lattice_9x9();

    SUBCASE("constant snapshots: mean surrogate is a constant fit") {
        DenseMatrix snaps(20, 81);
        for (std::size_t i = 0; i < snaps.size(); ++i) snaps[i] = 1.7;
        PodBasis basis = compute_pod(snaps);
        basis.coords = coords;
        TrunkSurrogateConfig cfg;
        cfg.max_iters = 20000;
        cfg.target_mse = 1e-12;
        TrunkSurrogate s = fit_trunk_surrogates(basis, 2, cfg);
        CHECK(s.mean_mse < 1e-10);
        CHECK(s.frozen);
    }

    SUBCASE("smooth modes: surrogate agrees with bilinear interpolation off-grid") {
        DenseMatrix snaps = smooth_snapshots(60, rng, coords);
        PodBasis basis = compute_pod(snaps);
        basis.coords = coords;
        TrunkSurrogateConfig cfg;
        cfg.max_iters = 20000;
        cfg.target_mse = 1e-7;
        TrunkSurrogate s = fit_trunk_surrogates(basis, 3, cfg);
        CHECK(s.modes_mse < 1e-6);

        // bilinear oracle on the 9x9 lattice (mapped to its own unit box)
        for (std::size_t k = 0; k < 3; ++k) {
            DenseMatrix mode_grid(9, 9);
            for (std::size_t j = 0; j < 9; ++j)
                for (std::size_t i = 0; i < 9; ++i) mode_grid(j, i) = basis.modes(j * 9 + i, k);
            const double x = 0.43, y = 0.57;  // off-grid point
            DenseMatrix q(1, 2);
            q(0, 0) = x;
            q(0, 1) = y;
            const double pred = fnn_forward(s.modes_net, q)(0, k);
            const double oracle = interp_bilinear(mode_grid, (x - 0.1) / 0.8, (y - 0.1) / 0.8);
            CHECK(std::fabs(pred - oracle) < 1e-2);
        }
    }
}

TEST_CASE("generator checkpoint round trip") {
    Rng rng(67);
    DenseMatrix coords = sensor_lattice_9x9();
    DenseMatrix snaps = smooth_snapshots(30, rng, coords);
    PodBasis basis = compute_pod(snaps);
    basis.coords = coords;
    TrunkSurrogateConfig cfg;
    cfg.max_iters = 300;
    TrunkSurrogate surr = fit_trunk_surrogates(basis, 4, cfg);

    GeneratorSpec gen;
    gen.latent_dim = 3;
    gen.p = 10;
    gen.heads.push_back(make_param_head("m", 3, 3, {8, 8}, rng));
    gen.heads.back().std_.mean = {0.5, 0.5, 0.1};
    gen.heads.back().std_.stddev = {0.17, 0.17, 0.03};
    gen.heads.push_back(make_vanilla_head("d", FieldRole::Response, coords, 3, 10, {8}, {8}, rng));
    gen.heads.back().std_.mean = {0.3};
    gen.heads.back().std_.stddev = {0.9};
    gen.heads.push_back(make_pod_head("s", FieldRole::Response, coords, 3, 4, {8}, surr, rng));

    const auto dir = std::filesystem::temp_directory_path() / "olgan_test_ckpt";
    std::filesystem::remove_all(dir);
    save_generator(dir, gen);
    GeneratorSpec loaded = load_generator(dir);

    DenseMatrix z = random_matrix(rng, 3, 3);
    DenseMatrix a = generator_forward(gen, z);
    DenseMatrix b = generator_forward(loaded, z);
    REQUIRE(a.same_shape(b));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    std::filesystem::remove_all(dir);
}
