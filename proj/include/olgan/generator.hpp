#pragma once

#include "olgan/matrix.hpp"
#include "olgan/nn.hpp"
#include "olgan/pod.hpp"
#include "olgan/rng.hpp"
#include "olgan/tape.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace olgan {

// ---------------------------------------------------------------------------
// Standardization
//
// Parameter heads are standardized per dimension. Coordinate-described field
// heads use a single scalar mean/std for the whole field: a per-sensor
// transform would not extend to unseen coordinates, which would defeat
// resolution independence. Constants live in the head and in checkpoints.
// ---------------------------------------------------------------------------
struct Standardization {
    std::vector<double> mean;    // size dim (per-dimension) or 1 (scalar field)
    std::vector<double> stddev;  // entries > 0
    bool per_dimension = true;

    static Standardization identity(std::size_t dim, bool per_dimension);
};

Standardization compute_standardization(const DenseMatrix& data, bool per_dimension);
DenseMatrix standardize(const DenseMatrix& data, const Standardization& s);
DenseMatrix destandardize(const DenseMatrix& data, const Standardization& s);

// ---------------------------------------------------------------------------
// Trunk surrogates for POD heads: two small FNNs regressing coordinates onto
// the POD modes and mean. Frozen after fitting.
// ---------------------------------------------------------------------------
struct TrunkSurrogateConfig {
    std::vector<std::size_t> hidden{64, 64};
    Activation activation = Activation::Tanh;
    double lr = 1e-3;
    std::size_t max_iters = 30000;
    double target_mse = 1e-6;
    std::uint64_t seed = 1;
};

struct TrunkSurrogate {
    FnnParams modes_net;  // x -> (phi_1 .. phi_p)
    FnnParams mean_net;   // x -> mu(x)
    bool frozen = true;
    double modes_mse = 0.0;
    double mean_mse = 0.0;
    bool reached_target = false;
};

TrunkSurrogate fit_trunk_surrogates(const PodBasis& basis, std::size_t p,
                                    const TrunkSurrogateConfig& cfg);

// Full-batch Adam regression used by the surrogate fit; returns final MSE.
double fit_regression(FnnParams& net, const DenseMatrix& inputs, const DenseMatrix& targets,
                      double lr, std::size_t max_iters, double target_mse);

// ---------------------------------------------------------------------------
// Generator heads. All heads of a generator consume the same latent vector.
// ---------------------------------------------------------------------------
enum class HeadKind { Param, VanillaDeepONet, PodDeepONet, PlainFnn };
enum class FieldRole { Parameter, Response };

struct GeneratorHead {
    HeadKind kind = HeadKind::Param;
    FieldRole role = FieldRole::Response;
    std::string name = "d";
    std::size_t size = 0;         // output dim at training coordinates
    FnnParams branch;             // z -> p (DeepONet) or z -> size (Param/PlainFnn)
    FnnParams trunk;              // vanilla: x -> p, trainable
    DenseMatrix b0{1, 1};         // vanilla trainable scalar bias
    TrunkSurrogate surrogate;     // pod: frozen trunk surrogate
    DenseMatrix coords;           // size x coord_dim (field heads only)
    Standardization std_;

    bool is_field() const { return kind == HeadKind::VanillaDeepONet || kind == HeadKind::PodDeepONet; }
};

struct GeneratorSpec {
    std::size_t latent_dim = 3;
    std::size_t p = 10;
    std::vector<GeneratorHead> heads;  // parameter-role heads precede response heads

    std::size_t n_m() const;
    std::size_t n_d() const;

    // GAN-trainable tensors: branches, vanilla trunks, b0. POD surrogates are
    // frozen and excluded.
    std::vector<DenseMatrix*> trainable_tensors();
    // Every tensor (including frozen surrogates) for checkpointing.
    std::vector<std::pair<std::string, const DenseMatrix*>> named_tensors() const;
};

// Head builders (Kaiming init, zero biases).
GeneratorHead make_param_head(const std::string& name, std::size_t dim, std::size_t latent_dim,
                              const std::vector<std::size_t>& hidden, Rng& rng,
                              Activation act = Activation::LeakyRelu);
GeneratorHead make_vanilla_head(const std::string& name, FieldRole role, const DenseMatrix& coords,
                                std::size_t latent_dim, std::size_t p,
                                const std::vector<std::size_t>& branch_hidden,
                                const std::vector<std::size_t>& trunk_hidden, Rng& rng);
GeneratorHead make_pod_head(const std::string& name, FieldRole role, const DenseMatrix& coords,
                            std::size_t latent_dim, std::size_t p,
                            const std::vector<std::size_t>& branch_hidden, TrunkSurrogate surrogate,
                            Rng& rng);
GeneratorHead make_plain_head(const std::string& name, FieldRole role, std::size_t dim,
                              std::size_t latent_dim, const std::vector<std::size_t>& hidden,
                              Rng& rng, Activation act = Activation::LeakyRelu);

// sum_k branch(:,k) trunk(:,k)^T + b0  (batch x coords output)
DenseMatrix deeponet_combine(const DenseMatrix& branch_out, const DenseMatrix& trunk_out, double b0);

// Standardized head output at the given coordinates (nullptr = training
// coordinates). Coordinates outside the training bounding box trigger a
// stderr warning; extrapolation is the caller's risk.
DenseMatrix head_eval_std(const GeneratorHead& head, const DenseMatrix& z_batch,
                          const DenseMatrix* coords = nullptr);
// Physical units.
DenseMatrix head_eval(const GeneratorHead& head, const DenseMatrix& z_batch,
                      const DenseMatrix* coords = nullptr);

// Full joint sample [m, d] in physical units; coords_override (if nonnull)
// supplies per-head evaluation coordinates, nullptr entries meaning training
// coordinates. Output is batch x (n_m + n_d_eval).
DenseMatrix generator_forward(const GeneratorSpec& gen, const DenseMatrix& z_batch,
                              const std::vector<const DenseMatrix*>* coords_override = nullptr);

// Standardized joint at training coordinates (the WGAN training space).
DenseMatrix generator_forward_std(const GeneratorSpec& gen, const DenseMatrix& z_batch);

// ---------------------------------------------------------------------------
// Joint vector plumbing: a = [m, d]
// ---------------------------------------------------------------------------
std::vector<double> assemble_joint(const std::vector<double>& m, const std::vector<double>& d);
std::vector<double> extract_m(const std::vector<double>& a, std::size_t n_m);
std::vector<double> extract_d(const std::vector<double>& a, std::size_t n_m);

// ---------------------------------------------------------------------------
// Taped generator for gradient-based training. POD surrogate outputs at the
// training coordinates are baked in as constants, so frozen parameters cannot
// receive updates by construction.
// ---------------------------------------------------------------------------
struct TapedGenerator {
    const GeneratorSpec* spec = nullptr;
    std::vector<TapedFnn> branches;          // per head
    std::vector<TapedFnn> trunks;            // vanilla heads only (empty otherwise)
    std::vector<int> b0_nodes;               // -1 unless vanilla
    std::vector<int> pod_modes_nodes;        // -1 unless pod (constant leaves)
    std::vector<int> pod_mean_nodes;
    std::vector<int> trainable_nodes;        // aligned with GeneratorSpec::trainable_tensors()

    // batch x (n_m + n_d), standardized, training coordinates
    int forward_std(Tape& tape, int z_node) const;
};

TapedGenerator put_generator_on_tape(Tape& tape, const GeneratorSpec& gen, bool trainable);

// ---------------------------------------------------------------------------
// Checkpointing
// ---------------------------------------------------------------------------
nlohmann::json generator_meta(const GeneratorSpec& gen);
void save_generator(const std::filesystem::path& dir, const GeneratorSpec& gen,
                    const nlohmann::json* extra_meta = nullptr);
GeneratorSpec load_generator(const std::filesystem::path& dir, nlohmann::json* meta_out = nullptr);

}  // namespace olgan
