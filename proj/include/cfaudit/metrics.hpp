#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cfaudit/tabular.hpp"

namespace cfaudit {

enum class UtilityKind { Sparsity, L2Normalized, HeomNegative, Im1Negative, Penalized };
enum class PenaltyMode { HardConstant, SparsitySaturating };

std::string utility_kind_name(UtilityKind kind);
UtilityKind utility_kind_from_name(const std::string& name);

// Declarative description of a utility function over (factual, counterfactual)
// pairs. Higher utility is better everywhere in the toolkit.
//
// penalized wraps a non-penalized base:
//   hard-constant        u'(x,e) = penalty_value if a sensitive feature changed,
//                                  else base(x,e). penalty_value is a large
//                                  negative constant so penalised records sink
//                                  to the bottom of the ranking.
//   sparsity-saturating  u'(x,e) = -min{ ||x-e||_0 + d*[sensitive changed], d }
//                                  (base must be sparsity).
struct UtilitySpec {
    UtilityKind kind = UtilityKind::Sparsity;
    NormalizationMode normalization = NormalizationMode::TrainRanges;  // l2 / heom
    size_t im1_components = 2;
    double im1_epsilon = 1e-6;
    std::shared_ptr<UtilitySpec> base;          // penalized only
    std::vector<std::string> sensitive;         // penalized only
    PenaltyMode penalty_mode = PenaltyMode::HardConstant;
    double penalty_value = -100000.0;
};

// Number of features whose values differ.
size_t changed_count(const FeatureSchema& schema, const Instance& x, const Instance& e);

// u(x,e) = -||x-e||_0, in {-d, ..., 0}.
double sparsity_u(const FeatureSchema& schema, const Instance& x, const Instance& e);

// u(x,e) = -||encode(x)-encode(e)||_2 under the given context.
double l2_normalized_u(const Instance& x, const Instance& e, const NormalizationContext& ctx);

// Heterogeneous Euclidean-overlap metric: per-feature distance is the 0/1
// overlap for categoricals and |dx|/range clamped to [0,1] for numerics,
// combined as sqrt of the sum of squares. Range [0, sqrt(d)].
double heom(const Instance& x, const Instance& e, const NormalizationContext& ctx);

// Linear reconstruction map for one class: project onto the top principal
// components around the class mean.
struct ClassRecon {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;  // orthonormal rows
};

// Squared residual ||v - recon(v)||^2.
double reconstruction_error(const ClassRecon& recon, const std::vector<double>& v);

// Per-class principal-component reconstructions fitted on encoded training
// rows. Deterministic; `seed` is recorded as fit provenance only.
struct ReconPair {
    NormalizationContext ctx;
    std::array<ClassRecon, 2> recon;
    size_t k = 2;
    uint64_t seed = 0;
    std::string fit_source;
};

// Throws DegenerateData unless both classes are present; requires
// 1 <= k <= encoded dimension.
ReconPair fit_recon(const Dataset& data, size_t k, uint64_t seed);

// Plausibility ratio: residual under the counterfactual class over residual
// under the factual class (plus eps). Lower means the point looks more like
// the class it claims to belong to.
double im1(const Instance& e, const ReconPair& pair, int predicted_class, double eps);

// Evaluates a UtilitySpec on concrete pairs. For IM1 the counterfactual's
// predicted class is read from e.label, which generated records always carry.
class UtilityEvaluator {
public:
    // `train` supplies ranges / reconstruction fits for train-ranges
    // normalization and IM1; `local_set` supplies the reference instances
    // ({x} union E) for local-set normalization. Either may be null when the
    // spec does not need it.
    UtilityEvaluator(const UtilitySpec& spec, const FeatureSchema& schema, const Dataset* train,
                     const std::vector<Instance>* local_set);

    double eval(const Instance& x, const Instance& e) const;

    const UtilitySpec& spec() const { return spec_; }
    const NormalizationContext* context() const { return ctx_ ? &*ctx_ : nullptr; }

private:
    UtilitySpec spec_;
    FeatureSchema schema_;
    std::optional<NormalizationContext> ctx_;
    std::shared_ptr<ReconPair> recon_;
    std::shared_ptr<UtilityEvaluator> base_;
    std::vector<size_t> sensitive_idx_;
};

// Jacobi eigendecomposition of a symmetric matrix; returned pairs are sorted
// by descending eigenvalue with a deterministic sign convention. Exposed for
// tests.
struct EigenPair {
    double value;
    std::vector<double> vector;
};
std::vector<EigenPair> symmetric_eigen(std::vector<std::vector<double>> m);

}  // namespace cfaudit
