#include "olgan/generator.hpp"

#include "olgan/adam.hpp"
#include "olgan/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace olgan {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

Standardization Standardization::identity(std::size_t dim, bool per_dimension) {
    Standardization s;
    s.per_dimension = per_dimension;
    const std::size_t n = per_dimension ? dim : 1;
    s.mean.assign(n, 0.0);
    s.stddev.assign(n, 1.0);
    return s;
}

Standardization compute_standardization(const DenseMatrix& data, bool per_dimension) {
    Standardization s;
    s.per_dimension = per_dimension;
    const std::size_t S = data.rows();
    if (S < 2) throw std::invalid_argument("compute_standardization: need at least 2 rows");
    if (per_dimension) {
        const std::size_t D = data.cols();
        s.mean.assign(D, 0.0);
        s.stddev.assign(D, 0.0);
        for (std::size_t j = 0; j < D; ++j) {
            double m = 0.0;
            for (std::size_t i = 0; i < S; ++i) m += data(i, j);
            m /= static_cast<double>(S);
            double v = 0.0;
            for (std::size_t i = 0; i < S; ++i) v += (data(i, j) - m) * (data(i, j) - m);
            v /= static_cast<double>(S - 1);
            s.mean[j] = m;
            s.stddev[j] = v > 0.0 ? std::sqrt(v) : 1.0;
        }
    } else {
        double m = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) m += data[i];
        m /= static_cast<double>(data.size());
        double v = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) v += (data[i] - m) * (data[i] - m);
        v /= static_cast<double>(data.size() - 1);
        s.mean.assign(1, m);
        s.stddev.assign(1, v > 0.0 ? std::sqrt(v) : 1.0);
    }
    return s;
}

DenseMatrix standardize(const DenseMatrix& data, const Standardization& s) {
    DenseMatrix out = data;
    if (s.per_dimension) {
        require_shape(data.cols() == s.mean.size(), "standardize: dimension mismatch");
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j)
                out(i, j) = (out(i, j) - s.mean[j]) / s.stddev[j];
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - s.mean[0]) / s.stddev[0];
    }
    return out;
}

DenseMatrix destandardize(const DenseMatrix& data, const Standardization& s) {
    DenseMatrix out = data;
    if (s.per_dimension) {
        require_shape(data.cols() == s.mean.size(), "destandardize: dimension mismatch");
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = out(i, j) * s.stddev[j] + s.mean[j];
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] * s.stddev[0] + s.mean[0];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Surrogate fitting
// ---------------------------------------------------------------------------

double fit_regression(FnnParams& net, const DenseMatrix& inputs, const DenseMatrix& targets,
                      double lr, std::size_t max_iters, double target_mse) {
    AdamState opt;
    opt.lr = lr;
    opt.beta1 = 0.9;
    opt.beta2 = 0.999;
    const double lr_end = lr * 1e-3;
    auto tensors = net.tensors();

    double mse = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        Tape tape;
        const TapedFnn taped = put_on_tape(tape, net, true);
        const int x = tape.leaf(inputs, false);
        const int y = tape.leaf(targets, false);
        const int pred = taped.forward(tape, x);
        const int loss = tape.mean_all(tape.square(tape.sub(pred, y)));
        mse = tape.val(loss)[0];
        if (mse < target_mse) return mse;

        const auto params = taped.param_nodes();
        const auto grads = tape.backward(loss, params);
        std::vector<DenseMatrix> grad_values;
        grad_values.reserve(params.size());
        for (int p : params) grad_values.push_back(tape.grad_or_zero(grads, p));

        const double t = static_cast<double>(it) / static_cast<double>(max_iters);
        opt.lr = lr_end + 0.5 * (lr - lr_end) * (1.0 + std::cos(3.14159265358979323846 * t));
        adam_step(opt, tensors, grad_values);
    }
    // final evaluation after the last update
    DenseMatrix pred = fnn_forward(net, inputs);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - targets[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

TrunkSurrogate fit_trunk_surrogates(const PodBasis& basis, std::size_t p,
                                    const TrunkSurrogateConfig& cfg) {
    require_shape(p <= basis.modes.cols(), "fit_trunk_surrogates: p exceeds available modes");
    require_shape(basis.coords.rows() == basis.modes.rows(),
                  "fit_trunk_surrogates: basis carries no coordinates");
    const std::size_t dim = basis.coords.cols();

    DenseMatrix mode_targets(basis.modes.rows(), p);
    for (std::size_t i = 0; i < mode_targets.rows(); ++i)
        for (std::size_t k = 0; k < p; ++k) mode_targets(i, k) = basis.modes(i, k);
    DenseMatrix mean_targets = transpose(basis.mean);

    Rng rng(cfg.seed);
    TrunkSurrogate s;
    std::vector<std::size_t> mode_widths{dim};
    mode_widths.insert(mode_widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    mode_widths.push_back(p);
    s.modes_net = make_fnn(mode_widths, cfg.activation, rng);

    std::vector<std::size_t> mean_widths{dim};
    mean_widths.insert(mean_widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    mean_widths.push_back(1);
    s.mean_net = make_fnn(mean_widths, cfg.activation, rng);

    s.modes_mse = fit_regression(s.modes_net, basis.coords, mode_targets, cfg.lr, cfg.max_iters,
                                 cfg.target_mse);
    s.mean_mse = fit_regression(s.mean_net, basis.coords, mean_targets, cfg.lr, cfg.max_iters,
                                cfg.target_mse);
    s.reached_target = s.modes_mse < cfg.target_mse && s.mean_mse < cfg.target_mse;
    s.frozen = true;
    if (!s.reached_target)
        std::cerr << "fit_trunk_surrogates: target mse " << cfg.target_mse
                  << " not reached (modes " << s.modes_mse << ", mean " << s.mean_mse << ")\n";
    return s;
}

// ---------------------------------------------------------------------------
// Heads
// ---------------------------------------------------------------------------

std::size_t GeneratorSpec::n_m() const {
    std::size_t n = 0;
    for (const auto& h : heads)
        if (h.role == FieldRole::Parameter) n += h.size;
    return n;
}

std::size_t GeneratorSpec::n_d() const {
    std::size_t n = 0;
    for (const auto& h : heads)
        if (h.role == FieldRole::Response) n += h.size;
    return n;
}

std::vector<DenseMatrix*> GeneratorSpec::trainable_tensors() {
    std::vector<DenseMatrix*> out;
    for (auto& h : heads) {
        for (auto* t : h.branch.tensors()) out.push_back(t);
        if (h.kind == HeadKind::VanillaDeepONet) {
            for (auto* t : h.trunk.tensors()) out.push_back(t);
            out.push_back(&h.b0);
        }
    }
    return out;
}

namespace {

void append_fnn_tensors(std::vector<std::pair<std::string, const DenseMatrix*>>& out,
                        const std::string& prefix, const FnnParams& net) {
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        out.emplace_back(prefix + ".w" + std::to_string(k), &net.layers[k].weight);
        out.emplace_back(prefix + ".b" + std::to_string(k), &net.layers[k].bias);
    }
}

}  // namespace

std::vector<std::pair<std::string, const DenseMatrix*>> GeneratorSpec::named_tensors() const {
    std::vector<std::pair<std::string, const DenseMatrix*>> out;
    for (std::size_t i = 0; i < heads.size(); ++i) {
        const auto& h = heads[i];
        const std::string hp = "h" + std::to_string(i);
        append_fnn_tensors(out, hp + ".branch", h.branch);
        if (h.kind == HeadKind::VanillaDeepONet) {
            append_fnn_tensors(out, hp + ".trunk", h.trunk);
            out.emplace_back(hp + ".b0", &h.b0);
        }
        if (h.kind == HeadKind::PodDeepONet) {
            append_fnn_tensors(out, hp + ".surrogate.modes", h.surrogate.modes_net);
            append_fnn_tensors(out, hp + ".surrogate.mean", h.surrogate.mean_net);
        }
        if (h.is_field()) out.emplace_back(hp + ".coords", &h.coords);
    }
    return out;
}

GeneratorHead make_param_head(const std::string& name, std::size_t dim, std::size_t latent_dim,
                              const std::vector<std::size_t>& hidden, Rng& rng, Activation act) {
    GeneratorHead h;
    h.kind = HeadKind::Param;
    h.role = FieldRole::Parameter;
    h.name = name;
    h.size = dim;
    std::vector<std::size_t> widths{latent_dim};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(dim);
    h.branch = make_fnn(widths, act, rng);
    h.std_ = Standardization::identity(dim, true);
    return h;
}

GeneratorHead make_vanilla_head(const std::string& name, FieldRole role, const DenseMatrix& coords,
                                std::size_t latent_dim, std::size_t p,
                                const std::vector<std::size_t>& branch_hidden,
                                const std::vector<std::size_t>& trunk_hidden, Rng& rng) {
    GeneratorHead h;
    h.kind = HeadKind::VanillaDeepONet;
    h.role = role;
    h.name = name;
    h.size = coords.rows();
    h.coords = coords;
    std::vector<std::size_t> bw{latent_dim};
    bw.insert(bw.end(), branch_hidden.begin(), branch_hidden.end());
    bw.push_back(p);
    h.branch = make_fnn(bw, Activation::LeakyRelu, rng);
    std::vector<std::size_t> tw{coords.cols()};
    tw.insert(tw.end(), trunk_hidden.begin(), trunk_hidden.end());
    tw.push_back(p);
    h.trunk = make_fnn(tw, Activation::Tanh, rng);
    h.b0 = DenseMatrix(1, 1, 0.0);
    h.std_ = Standardization::identity(1, false);
    return h;
}

GeneratorHead make_pod_head(const std::string& name, FieldRole role, const DenseMatrix& coords,
                            std::size_t latent_dim, std::size_t p,
                            const std::vector<std::size_t>& branch_hidden, TrunkSurrogate surrogate,
                            Rng& rng) {
    GeneratorHead h;
    h.kind = HeadKind::PodDeepONet;
    h.role = role;
    h.name = name;
    h.size = coords.rows();
    h.coords = coords;
    std::vector<std::size_t> bw{latent_dim};
    bw.insert(bw.end(), branch_hidden.begin(), branch_hidden.end());
    bw.push_back(p);
    h.branch = make_fnn(bw, Activation::LeakyRelu, rng);
    h.surrogate = std::move(surrogate);
    h.std_ = Standardization::identity(1, false);
    return h;
}

GeneratorHead make_plain_head(const std::string& name, FieldRole role, std::size_t dim,
                              std::size_t latent_dim, const std::vector<std::size_t>& hidden,
                              Rng& rng, Activation act) {
    GeneratorHead h;
    h.kind = HeadKind::PlainFnn;
    h.role = role;
    h.name = name;
    h.size = dim;
    std::vector<std::size_t> widths{latent_dim};
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(dim);
    h.branch = make_fnn(widths, act, rng);
    h.std_ = Standardization::identity(1, false);
    return h;
}

DenseMatrix deeponet_combine(const DenseMatrix& branch_out, const DenseMatrix& trunk_out, double b0) {
    require_shape(branch_out.cols() == trunk_out.cols(), "deeponet_combine: p mismatch");
    DenseMatrix out = matmul_nt(branch_out, trunk_out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b0;
    return out;
}

namespace {

void warn_if_outside_training_box(const GeneratorHead& head, const DenseMatrix& coords) {
    for (std::size_t d = 0; d < head.coords.cols(); ++d) {
        double lo = head.coords(0, d), hi = lo;
        for (std::size_t i = 1; i < head.coords.rows(); ++i) {
            lo = std::min(lo, head.coords(i, d));
            hi = std::max(hi, head.coords(i, d));
        }
        for (std::size_t i = 0; i < coords.rows(); ++i) {
            if (coords(i, d) < lo || coords(i, d) > hi) {
                std::cerr << "head '" << head.name
                          << "': evaluation coordinate outside the training range; "
                             "extrapolating\n";
                return;
            }
        }
    }
}

}  // namespace

DenseMatrix head_eval_std(const GeneratorHead& head, const DenseMatrix& z_batch,
                          const DenseMatrix* coords) {
    switch (head.kind) {
        case HeadKind::Param:
        case HeadKind::PlainFnn:
            return fnn_forward(head.branch, z_batch);  // coords ignored by contract
        case HeadKind::VanillaDeepONet: {
            const DenseMatrix& C = coords ? *coords : head.coords;
            if (coords) warn_if_outside_training_box(head, C);
            const DenseMatrix B = fnn_forward(head.branch, z_batch);
            const DenseMatrix T = fnn_forward(head.trunk, C);
            return deeponet_combine(B, T, head.b0[0]);
        }
        case HeadKind::PodDeepONet: {
            const DenseMatrix& C = coords ? *coords : head.coords;
            if (coords) warn_if_outside_training_box(head, C);
            const DenseMatrix B = fnn_forward(head.branch, z_batch);
            const DenseMatrix Phi = fnn_forward(head.surrogate.modes_net, C);
            const DenseMatrix Mu = fnn_forward(head.surrogate.mean_net, C);
            DenseMatrix out = matmul_nt(B, Phi);
            for (std::size_t r = 0; r < out.rows(); ++r)
                for (std::size_t j = 0; j < out.cols(); ++j) out(r, j) += Mu(j, 0);
            return out;
        }
    }
    throw std::logic_error("head_eval_std: unknown head kind");
}

DenseMatrix head_eval(const GeneratorHead& head, const DenseMatrix& z_batch,
                      const DenseMatrix* coords) {
    return destandardize(head_eval_std(head, z_batch, coords), head.std_);
}

DenseMatrix generator_forward(const GeneratorSpec& gen, const DenseMatrix& z_batch,
                              const std::vector<const DenseMatrix*>* coords_override) {
    require_shape(z_batch.cols() == gen.latent_dim, "generator_forward: latent dim mismatch");
    if (coords_override)
        require_shape(coords_override->size() == gen.heads.size(),
                      "generator_forward: per-head coordinate list size mismatch");
    std::vector<DenseMatrix> parts;
    parts.reserve(gen.heads.size());
    for (std::size_t i = 0; i < gen.heads.size(); ++i) {
        const DenseMatrix* c = coords_override ? (*coords_override)[i] : nullptr;
        parts.push_back(head_eval(gen.heads[i], z_batch, c));
    }
    std::size_t total = 0;
    for (const auto& p : parts) total += p.cols();
    DenseMatrix out(z_batch.rows(), total);
    std::size_t off = 0;
    for (const auto& p : parts) {
        for (std::size_t r = 0; r < p.rows(); ++r)
            for (std::size_t j = 0; j < p.cols(); ++j) out(r, off + j) = p(r, j);
        off += p.cols();
    }
    return out;
}

DenseMatrix generator_forward_std(const GeneratorSpec& gen, const DenseMatrix& z_batch) {
    require_shape(z_batch.cols() == gen.latent_dim, "generator_forward_std: latent dim mismatch");
    DenseMatrix out(z_batch.rows(), gen.n_m() + gen.n_d());
    std::size_t off = 0;
    for (const auto& h : gen.heads) {
        DenseMatrix part = head_eval_std(h, z_batch, nullptr);
        for (std::size_t r = 0; r < part.rows(); ++r)
            for (std::size_t j = 0; j < part.cols(); ++j) out(r, off + j) = part(r, j);
        off += part.cols();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Joint plumbing
// ---------------------------------------------------------------------------

std::vector<double> assemble_joint(const std::vector<double>& m, const std::vector<double>& d) {
    std::vector<double> a;
    a.reserve(m.size() + d.size());
    a.insert(a.end(), m.begin(), m.end());
    a.insert(a.end(), d.begin(), d.end());
    return a;
}

std::vector<double> extract_m(const std::vector<double>& a, std::size_t n_m) {
    require_shape(n_m <= a.size(), "extract_m: n_m exceeds joint size");
    return std::vector<double>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n_m));
}

std::vector<double> extract_d(const std::vector<double>& a, std::size_t n_m) {
    require_shape(n_m <= a.size(), "extract_d: n_m exceeds joint size");
    return std::vector<double>(a.begin() + static_cast<std::ptrdiff_t>(n_m), a.end());
}

// ---------------------------------------------------------------------------
// Taped generator
// ---------------------------------------------------------------------------

TapedGenerator put_generator_on_tape(Tape& tape, const GeneratorSpec& gen, bool trainable) {
    TapedGenerator tg;
    tg.spec = &gen;
    for (const auto& h : gen.heads) {
        tg.branches.push_back(put_on_tape(tape, h.branch, trainable));
        for (int n : tg.branches.back().param_nodes()) tg.trainable_nodes.push_back(n);
        if (h.kind == HeadKind::VanillaDeepONet) {
            tg.trunks.push_back(put_on_tape(tape, h.trunk, trainable));
            for (int n : tg.trunks.back().param_nodes()) tg.trainable_nodes.push_back(n);
            tg.b0_nodes.push_back(tape.leaf(h.b0, trainable));
            tg.trainable_nodes.push_back(tg.b0_nodes.back());
            tg.pod_modes_nodes.push_back(-1);
            tg.pod_mean_nodes.push_back(-1);
        } else if (h.kind == HeadKind::PodDeepONet) {
            tg.trunks.emplace_back();
            tg.b0_nodes.push_back(-1);
            // frozen surrogate evaluated once at the training coordinates
            tg.pod_modes_nodes.push_back(tape.leaf(fnn_forward(h.surrogate.modes_net, h.coords), false));
            tg.pod_mean_nodes.push_back(
                tape.leaf(transpose(fnn_forward(h.surrogate.mean_net, h.coords)), false));
        } else {
            tg.trunks.emplace_back();
            tg.b0_nodes.push_back(-1);
            tg.pod_modes_nodes.push_back(-1);
            tg.pod_mean_nodes.push_back(-1);
        }
    }
    return tg;
}

int TapedGenerator::forward_std(Tape& tape, int z_node) const {
    int joint = -1;
    for (std::size_t i = 0; i < spec->heads.size(); ++i) {
        const auto& h = spec->heads[i];
        int part = -1;
        switch (h.kind) {
            case HeadKind::Param:
            case HeadKind::PlainFnn:
                part = branches[i].forward(tape, z_node);
                break;
            case HeadKind::VanillaDeepONet: {
                const int B = branches[i].forward(tape, z_node);
                const int C = tape.leaf(h.coords, false);
                const int T = trunks[i].forward(tape, C);
                part = tape.add_scalar(tape.matmul(B, tape.transpose(T)), b0_nodes[i]);
                break;
            }
            case HeadKind::PodDeepONet: {
                const int B = branches[i].forward(tape, z_node);
                part = tape.add_row_vec(tape.matmul(B, tape.transpose(pod_modes_nodes[i])),
                                        pod_mean_nodes[i]);
                break;
            }
        }
        joint = (joint == -1) ? part : tape.concat2(joint, part);
    }
    return joint;
}

// ---------------------------------------------------------------------------
// Checkpointing
// ---------------------------------------------------------------------------

namespace {

std::string act_name(Activation a) {
    switch (a) {
        case Activation::LeakyRelu: return "leaky_relu";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation act_from(const std::string& s) {
    if (s == "leaky_relu") return Activation::LeakyRelu;
    if (s == "tanh") return Activation::Tanh;
    if (s == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + s);
}

std::string kind_name(HeadKind k) {
    switch (k) {
        case HeadKind::Param: return "param";
        case HeadKind::VanillaDeepONet: return "vanilla_deeponet";
        case HeadKind::PodDeepONet: return "pod_deeponet";
        case HeadKind::PlainFnn: return "plain_fnn";
    }
    return "param";
}

HeadKind kind_from(const std::string& s) {
    if (s == "param") return HeadKind::Param;
    if (s == "vanilla_deeponet") return HeadKind::VanillaDeepONet;
    if (s == "pod_deeponet") return HeadKind::PodDeepONet;
    if (s == "plain_fnn") return HeadKind::PlainFnn;
    throw std::invalid_argument("unknown head kind: " + s);
}

json fnn_meta(const FnnParams& net) {
    json widths = json::array();
    widths.push_back(net.input_dim());
    for (const auto& l : net.layers) widths.push_back(l.weight.rows());
    return json{{"widths", widths},
                {"activation", act_name(net.activation)},
                {"output_activation", act_name(net.output_activation)},
                {"slope", net.slope}};
}

FnnParams fnn_from_meta(const json& j) {
    FnnParams net;
    net.activation = act_from(j.at("activation"));
    net.output_activation = act_from(j.at("output_activation"));
    net.slope = j.at("slope");
    const auto widths = j.at("widths").get<std::vector<std::size_t>>();
    for (std::size_t k = 0; k + 1 < widths.size(); ++k)
        net.layers.push_back({DenseMatrix(widths[k + 1], widths[k]), DenseMatrix(1, widths[k + 1])});
    return net;
}

json std_meta(const Standardization& s) {
    return json{{"mean", s.mean}, {"stddev", s.stddev}, {"per_dimension", s.per_dimension}};
}

Standardization std_from_meta(const json& j) {
    Standardization s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    s.per_dimension = j.at("per_dimension");
    return s;
}

void fill_fnn(FnnParams& net, const std::string& prefix,
              const std::map<std::string, DenseMatrix>& tensors) {
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        net.layers[k].weight = tensors.at(prefix + ".w" + std::to_string(k));
        net.layers[k].bias = tensors.at(prefix + ".b" + std::to_string(k));
    }
}

}  // namespace

json generator_meta(const GeneratorSpec& gen) {
    json heads = json::array();
    for (const auto& h : gen.heads) {
        json hj{{"kind", kind_name(h.kind)},
                {"role", h.role == FieldRole::Parameter ? "parameter" : "response"},
                {"name", h.name},
                {"size", h.size},
                {"branch", fnn_meta(h.branch)},
                {"standardization", std_meta(h.std_)}};
        if (h.kind == HeadKind::VanillaDeepONet) hj["trunk"] = fnn_meta(h.trunk);
        if (h.kind == HeadKind::PodDeepONet)
            hj["surrogate"] = json{{"modes", fnn_meta(h.surrogate.modes_net)},
                                   {"mean", fnn_meta(h.surrogate.mean_net)},
                                   {"modes_mse", h.surrogate.modes_mse},
                                   {"mean_mse", h.surrogate.mean_mse},
                                   {"reached_target", h.surrogate.reached_target}};
        heads.push_back(hj);
    }
    return json{{"model", "olgan-generator/1"},
                {"latent_dim", gen.latent_dim},
                {"p", gen.p},
                {"heads", heads}};
}

void save_generator(const std::filesystem::path& dir, const GeneratorSpec& gen,
                    const json* extra_meta) {
    json meta = generator_meta(gen);
    if (extra_meta) meta["run"] = *extra_meta;
    save_checkpoint(dir, meta, gen.named_tensors());
}

GeneratorSpec load_generator(const std::filesystem::path& dir, json* meta_out) {
    std::map<std::string, DenseMatrix> tensors;
    json meta = load_checkpoint(dir, tensors);
    if (meta.value("model", "") != std::string("olgan-generator/1"))
        throw std::runtime_error("load_generator: not a generator checkpoint");

    GeneratorSpec gen;
    gen.latent_dim = meta.at("latent_dim");
    gen.p = meta.at("p");
    std::size_t i = 0;
    for (const auto& hj : meta.at("heads")) {
        GeneratorHead h;
        h.kind = kind_from(hj.at("kind"));
        h.role = hj.at("role") == "parameter" ? FieldRole::Parameter : FieldRole::Response;
        h.name = hj.at("name");
        h.size = hj.at("size");
        h.std_ = std_from_meta(hj.at("standardization"));
        const std::string hp = "h" + std::to_string(i);
        h.branch = fnn_from_meta(hj.at("branch"));
        fill_fnn(h.branch, hp + ".branch", tensors);
        if (h.kind == HeadKind::VanillaDeepONet) {
            h.trunk = fnn_from_meta(hj.at("trunk"));
            fill_fnn(h.trunk, hp + ".trunk", tensors);
            h.b0 = tensors.at(hp + ".b0");
        }
        if (h.kind == HeadKind::PodDeepONet) {
            h.surrogate.modes_net = fnn_from_meta(hj.at("surrogate").at("modes"));
            h.surrogate.mean_net = fnn_from_meta(hj.at("surrogate").at("mean"));
            fill_fnn(h.surrogate.modes_net, hp + ".surrogate.modes", tensors);
            fill_fnn(h.surrogate.mean_net, hp + ".surrogate.mean", tensors);
            h.surrogate.modes_mse = hj.at("surrogate").at("modes_mse");
            h.surrogate.mean_mse = hj.at("surrogate").at("mean_mse");
            h.surrogate.reached_target = hj.at("surrogate").at("reached_target");
        }
        if (h.is_field()) h.coords = tensors.at(hp + ".coords");
        gen.heads.push_back(std::move(h));
        ++i;
    }
    if (meta_out) *meta_out = meta;
    return gen;
}

}  // namespace olgan
