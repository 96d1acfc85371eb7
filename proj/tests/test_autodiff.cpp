#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "olgan/adam.hpp"
#include "olgan/matrix.hpp"
#include "olgan/nn.hpp"
#include "olgan/rng.hpp"
#include "olgan/tape.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace olgan;
using namespace olgan::test;

TEST_CASE("kaiming uniform bound and moments") {
    Rng rng(42);
    // fan_in=6, slope=0: bound = sqrt(2) * sqrt(3/6) = 1.0
    DenseMatrix w = kaiming_uniform_init(4, 6, 0.0, rng);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::fabs(w[i]) <= 1.0);

    // 1e5 draws: sample mean of U(-1,1) is within ~3.5 sigma/sqrt(n) of 0
    const std::size_t n = 100000;
    DenseMatrix big = kaiming_uniform_init(n / 10, 6, 0.0, rng);
    double mean = 0.0;
    for (std::size_t i = 0; i < big.size(); ++i) mean += big[i];
    mean /= static_cast<double>(big.size());
    CHECK(mean > -0.02);
    CHECK(mean < 0.02);

    CHECK_THROWS_AS(kaiming_uniform_init(3, 0, 0.0, rng), ShapeError);

    // slope carries into the gain
    DenseMatrix w2 = kaiming_uniform_init(4, 3, 0.01, rng);
    const double bound = std::sqrt(2.0 / (1.0 + 1e-4)) * std::sqrt(1.0);
    for (std::size_t i = 0; i < w2.size(); ++i) CHECK(std::fabs(w2[i]) <= bound);
}

TEST_CASE("fnn forward hand cases") {
    // identity map
    FnnParams id_net;
    id_net.activation = Activation::Identity;
    id_net.layers.push_back({DenseMatrix::identity(3), DenseMatrix(1, 3)});
    DenseMatrix x(2, 3);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * static_cast<double>(i) - 1.0;
    DenseMatrix y = fnn_forward(id_net, x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);

    // W=[[2]], b=[1], LeakyReLU(0.01) as the output activation, input -1:
    // pre-activation 2*(-1)+1 = -1, output -0.01
    FnnParams leaky;
    leaky.activation = Activation::LeakyRelu;
    leaky.output_activation = Activation::LeakyRelu;
    leaky.slope = 0.01;
    DenseMatrix w(1, 1);
    w[0] = 2.0;
    DenseMatrix b(1, 1);
    b[0] = 1.0;
    leaky.layers.push_back({w, b});
    DenseMatrix in(1, 1);
    in[0] = -1.0;
    CHECK(fnn_forward(leaky, in)[0] == doctest::Approx(-0.01).epsilon(1e-14));

    // tanh at the origin
    FnnParams tanh_net;
    tanh_net.activation = Activation::Tanh;
    tanh_net.output_activation = Activation::Tanh;
    tanh_net.layers.push_back({DenseMatrix::identity(1), DenseMatrix(1, 1)});
    DenseMatrix z(1, 1);
    CHECK(fnn_forward(tanh_net, z)[0] == 0.0);

    // shape mismatch is an error
    CHECK_THROWS_AS(fnn_forward(id_net, DenseMatrix(1, 2)), ShapeError);

    // deterministic: identical params and input give bit-identical output
    Rng rng(7);
    FnnParams net = random_fnn(rng, {4, 8, 1}, Activation::LeakyRelu);
    DenseMatrix probe = random_matrix(rng, 3, 4);
    DenseMatrix a = fnn_forward(net, probe);
    DenseMatrix c = fnn_forward(net, probe);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == c[i]);
}

TEST_CASE("reverse gradients hand cases") {
    // f(w) = w^2 at w=3 -> df/dw = 6
    Tape tape;
    int w = tape.leaf(DenseMatrix(1, 1, 3.0), true);
    int f = tape.square(w);
    auto grads = tape.backward(f);
    CHECK(tape.val(grads[w])[0] == doctest::Approx(6.0));
}

TEST_CASE("reverse gradients: sum of inputs is all ones") {
    Rng rng(3);
    Tape tape;
    int x = tape.leaf(random_matrix(rng, 4, 5), true);
    int s = tape.sum_all(x);
    auto grads = tape.backward(s);
    DenseMatrix g = tape.grad_or_zero(grads, x);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == 1.0);
}

TEST_CASE("disconnected node has zero gradient") {
    Tape tape;
    int x = tape.leaf(DenseMatrix(1, 1, 2.0), true);
    int y = tape.leaf(DenseMatrix(1, 1, 5.0), true);
    int f = tape.square(x);
    auto grads = tape.backward(f);
    CHECK(grads[y] == -1);
    DenseMatrix gz = tape.grad_or_zero(grads, y);
    CHECK(gz[0] == 0.0);
}

TEST_CASE("backward rejects non-scalar output") {
    Tape tape;
    int x = tape.leaf(DenseMatrix(2, 2, 1.0), true);
    CHECK_THROWS_AS(tape.backward(x), ShapeError);
}

TEST_CASE("primitive gradients match finite differences") {
    Rng rng(11);
    // One composite graph touching every differentiable primitive.
    auto build = [](Tape& t, const std::vector<int>& in) {
        int a = in[0];                      // 3x4
        int b = in[1];                      // 4x2
        int v = in[2];                      // 1x2
        int s = in[3];                      // 1x1
        int m = t.matmul(a, b);             // 3x2
        m = t.add_row_vec(m, v);
        m = t.mul_row_vec(m, v);
        m = t.add_scalar(m, s);
        int mt = t.transpose(m);            // 2x3
        int c = t.concat2(m, t.transpose(mt));  // 3x4
        int sl = t.slice_cols(c, 1, 3);     // 3x2
        int act = t.tanh_(t.leaky_relu(sl, 0.01));
        int sq = t.sqrt_(t.affine(t.square(act), 1.0, 0.5));
        int dv = t.divide(sq, t.affine(t.square(m), 1.0, 1.0));
        int rs = t.row_sum(dv);             // 3x1
        int bc = t.bcast_cols(rs, 3);       // 3x3
        int cs = t.col_sum(bc);             // 1x3
        int br = t.bcast_rows(cs, 2);       // 2x3
        int total = t.add(t.sum_all(br), t.sum_all(t.pad_cols(m, 1, 5)));
        int full = t.bcast_full(total, 2, 2);
        return t.mean_all(full);
    };
    std::vector<DenseMatrix> inputs = {random_matrix(rng, 3, 4), random_matrix(rng, 4, 2),
                                       random_matrix(rng, 1, 2, 0.5, 1.5),
                                       random_matrix(rng, 1, 1)};
    auto res = check_gradients(build, inputs);
    INFO("max rel err = ", res.max_rel_err);
    CHECK(res.ok);
}

TEST_CASE("fnn gradients match finite differences for both activations") {
    Rng rng(13);
    for (Activation act : {Activation::LeakyRelu, Activation::Tanh}) {
        FnnParams net = random_fnn(rng, {3, 6, 5, 1}, act);
        DenseMatrix input = random_matrix(rng, 1, 3);
        while (act == Activation::LeakyRelu && min_preactivation_gap(net, input) < 1e-3)
            input = random_matrix(rng, 1, 3);

        // flatten params+input into leaves and rebuild the net inside
        auto build = [&](Tape& t, const std::vector<int>& in) {
            int x = in.back();
            int h = x;
            for (std::size_t k = 0; k < net.layers.size(); ++k) {
                h = t.add_row_vec(t.matmul(h, t.transpose(in[2 * k])), in[2 * k + 1]);
                if (k + 1 < net.layers.size())
                    h = (act == Activation::Tanh) ? t.tanh_(h) : t.leaky_relu(h, net.slope);
            }
            return t.sum_all(h);
        };
        std::vector<DenseMatrix> inputs;
        for (const auto& l : net.layers) {
            inputs.push_back(l.weight);
            inputs.push_back(l.bias);
        }
        inputs.push_back(input);
        auto res = check_gradients(build, inputs);
        INFO("activation ", static_cast<int>(act), " max rel err ", res.max_rel_err);
        CHECK(res.ok);
    }
}

TEST_CASE("input gradient of linear and quadratic maps") {
    // D(a) = c^T a -> gradient c
    FnnParams lin;
    lin.activation = Activation::Identity;
    DenseMatrix c(1, 3);
    c(0, 0) = 1.5;
    c(0, 1) = -2.0;
    c(0, 2) = 0.25;
    lin.layers.push_back({c, DenseMatrix(1, 1)});
    Rng rng(5);
    for (int rep = 0; rep < 3; ++rep) {
        DenseMatrix a = random_matrix(rng, 1, 3);
        DenseMatrix g = input_gradient(lin, a);
        for (std::size_t j = 0; j < 3; ++j) CHECK(g[j] == doctest::Approx(c[j]));
    }

    // D(a) = 0.5 ||a||^2 composed from primitives -> gradient a
    Tape tape;
    DenseMatrix a = random_matrix(rng, 1, 4);
    int ai = tape.leaf(a, true);
    int d = tape.affine(tape.sum_all(tape.square(ai)), 0.5, 0.0);
    auto grads = tape.backward(d);
    DenseMatrix g = tape.grad_or_zero(grads, ai);
    for (std::size_t j = 0; j < 4; ++j) CHECK(g[j] == doctest::Approx(a[j]));

    // arbitrary 2-layer net vs finite differences
    FnnParams net = random_fnn(rng, {4, 8, 1}, Activation::LeakyRelu);
    DenseMatrix x = random_matrix(rng, 1, 4);
    while (min_preactivation_gap(net, x) < 1e-3) x = random_matrix(rng, 1, 4);
    DenseMatrix gx = input_gradient(net, x);
    const double h = 1e-5;
    for (std::size_t j = 0; j < 4; ++j) {
        DenseMatrix xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const double fd = (fnn_forward(net, xp)[0] - fnn_forward(net, xm)[0]) / (2 * h);
        CHECK(rel_err(gx[j], fd) < 1e-5);
    }

    // non-scalar output is rejected
    FnnParams wide = random_fnn(rng, {3, 4, 2}, Activation::Tanh);
    CHECK_THROWS_AS(input_gradient(wide, DenseMatrix(1, 3, 0.1)), ShapeError);
}

TEST_CASE("penalty parameter gradient: scalar hand case") {
    // D(a) = theta * a with theta=3: ||grad_a D|| = 3, penalty (3-1)^2 = 4,
    // d penalty / d theta = 2 (theta - 1) = 4
    FnnParams net;
    net.activation = Activation::Identity;
    net.layers.push_back({DenseMatrix(1, 1, 3.0), DenseMatrix(1, 1)});
    double pen = 0.0;
    auto grads = penalty_parameter_gradient(net, DenseMatrix(1, 1, 0.7), 1.0, &pen);
    CHECK(pen == doctest::Approx(4.0));
    CHECK(grads[0][0] == doctest::Approx(4.0));

    // theta = 1: penalty 0, gradient 0
    net.layers[0].weight[0] = 1.0;
    grads = penalty_parameter_gradient(net, DenseMatrix(1, 1, 0.7), 1.0, &pen);
    CHECK(pen == doctest::Approx(0.0));
    CHECK(grads[0][0] == doctest::Approx(0.0));
}

TEST_CASE("penalty parameter gradient matches finite differences") {
    Rng rng(17);
    for (Activation act : {Activation::LeakyRelu, Activation::Tanh}) {
        FnnParams net = random_fnn(rng, {3, 5, 1}, act);
        DenseMatrix x = random_matrix(rng, 1, 3);
        while (act == Activation::LeakyRelu && min_preactivation_gap(net, x) < 1e-3)
            x = random_matrix(rng, 1, 3);
        const double lambda = 10.0;
        auto grads = penalty_parameter_gradient(net, x, lambda);

        auto penalty_of = [&](const FnnParams& p) {
            DenseMatrix g = input_gradient(p, x);
            double n2 = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) n2 += g[i] * g[i];
            const double dev = std::sqrt(n2) - 1.0;
            return lambda * dev * dev;
        };

        const double h = 1e-5;
        std::size_t gi = 0;
        for (std::size_t layer = 0; layer < net.layers.size(); ++layer) {
            for (DenseMatrix FnnLayer::* field : {&FnnLayer::weight, &FnnLayer::bias}) {
                const DenseMatrix& g = grads[gi++];
                for (std::size_t i = 0; i < (net.layers[layer].*field).size(); ++i) {
                    FnnParams pert = net;
                    (pert.layers[layer].*field)[i] += h;
                    const double fp = penalty_of(pert);
                    (pert.layers[layer].*field)[i] -= 2 * h;
                    const double fm = penalty_of(pert);
                    const double fd = (fp - fm) / (2 * h);
                    CHECK(rel_err(g[i], fd) < 1e-4);
                }
            }
        }
    }
}

TEST_CASE("adam hand-unrolled recursion") {
    AdamState st;
    st.lr = 0.1;
    st.beta1 = 0.0;
    st.beta2 = 0.999;

    DenseMatrix p(1, 2);
    p[0] = 1.0;
    p[1] = -2.0;
    DenseMatrix p0 = p;

    // zero gradient is a fixed point
    adam_step(st, {&p}, {DenseMatrix(1, 2)});
    CHECK(p[0] == p0[0]);
    CHECK(p[1] == p0[1]);

    // first nonzero step has magnitude ~ lr (beta1 = 0)
    AdamState st2;
    st2.lr = 0.1;
    st2.beta1 = 0.0;
    st2.beta2 = 0.999;
    DenseMatrix q(1, 1, 5.0);
    DenseMatrix g(1, 1, 0.37);
    adam_step(st2, {&q}, {g});
    CHECK(std::fabs(5.0 - q[0]) == doctest::Approx(st2.lr).epsilon(1e-6));

    // two steps with constant gradient: hand-unrolled recursion to 1e-12
    const double lr = 0.01, b1 = 0.0, b2 = 0.999, eps = 1e-8, gc = 0.37;
    double hp = 5.0, m = 0.0, v = 0.0;
    for (int tstep = 1; tstep <= 2; ++tstep) {
        m = b1 * m + (1 - b1) * gc;
        v = b2 * v + (1 - b2) * gc * gc;
        const double mhat = m / (1 - std::pow(b1, tstep));
        const double vhat = v / (1 - std::pow(b2, tstep));
        hp -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    AdamState st3;
    st3.lr = lr;
    st3.beta1 = b1;
    st3.beta2 = b2;
    st3.eps = eps;
    DenseMatrix r(1, 1, 5.0);
    adam_step(st3, {&r}, {DenseMatrix(1, 1, gc)});
    adam_step(st3, {&r}, {DenseMatrix(1, 1, gc)});
    CHECK(std::fabs(r[0] - hp) < 1e-12);

    // NaN gradient is a hard error
    DenseMatrix bad(1, 1, std::nan(""));
    CHECK_THROWS_AS(adam_step(st3, {&r}, {bad}), std::runtime_error);
}

TEST_CASE("tape replay reproduces values bit-identically") {
    Rng rng(23);
    Tape tape;
    int x = tape.leaf(random_matrix(rng, 3, 3), true);
    int y = tape.tanh_(tape.matmul(x, x));
    int s = tape.sum_all(y);
    const double before_y = tape.val(y)[4];
    const double before_s = tape.val(s)[0];
    tape.replay();
    CHECK(tape.val(y)[4] == before_y);
    CHECK(tape.val(s)[0] == before_s);
}
