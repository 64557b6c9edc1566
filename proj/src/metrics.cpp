#include "cfaudit/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cfaudit {

std::string utility_kind_name(UtilityKind kind) {
    switch (kind) {
        case UtilityKind::Sparsity: return "sparsity";
        case UtilityKind::L2Normalized: return "l2_normalized";
        case UtilityKind::HeomNegative: return "heom_negative";
        case UtilityKind::Im1Negative: return "im1_negative";
        case UtilityKind::Penalized: return "penalized";
    }
    return "unknown";
}

UtilityKind utility_kind_from_name(const std::string& name) {
    if (name == "sparsity") return UtilityKind::Sparsity;
    if (name == "l2_normalized") return UtilityKind::L2Normalized;
    if (name == "heom_negative") return UtilityKind::HeomNegative;
    if (name == "im1_negative") return UtilityKind::Im1Negative;
    if (name == "penalized") return UtilityKind::Penalized;
    throw ParseError("unknown utility kind '" + name + "'");
}

size_t changed_count(const FeatureSchema& schema, const Instance& x, const Instance& e) {
    if (x.values.size() != schema.arity() || e.values.size() != schema.arity()) {
        throw SchemaMismatch("instances do not match the schema arity");
    }
    size_t changed = 0;
    for (size_t i = 0; i < schema.arity(); ++i) {
        changed += static_cast<size_t>(!value_equal(x.values[i], e.values[i]));
    }
    return changed;
}

double sparsity_u(const FeatureSchema& schema, const Instance& x, const Instance& e) {
    return -static_cast<double>(changed_count(schema, x, e));
}

double l2_normalized_u(const Instance& x, const Instance& e, const NormalizationContext& ctx) {
    const Encoded ex = encode(x, ctx);
    const Encoded ee = encode(e, ctx);
    double sum = 0.0;
    for (size_t i = 0; i < ctx.dim; ++i) {
        const double d = ex.coords[i] - ee.coords[i];
        sum += d * d;
    }
    return -std::sqrt(sum);
}

double heom(const Instance& x, const Instance& e, const NormalizationContext& ctx) {
    validate_instance(ctx.schema, x);
    validate_instance(ctx.schema, e);
    double sum = 0.0;
    for (size_t i = 0; i < ctx.schema.arity(); ++i) {
        const auto& spec = ctx.schema.at(i);
        double d;
        if (spec.kind == FeatureKind::Categorical) {
            d = x.cat(i) == e.cat(i) ? 0.0 : 1.0;
        } else {
            d = std::abs(x.num(i) - e.num(i)) / ctx.range(i);
            d = std::min(d, 1.0);
        }
        sum += d * d;
    }
    return std::sqrt(sum);
}

// --- per-class linear reconstruction -----------------------------------------

double reconstruction_error(const ClassRecon& recon, const std::vector<double>& v) {
    const size_t dim = recon.mean.size();
    std::vector<double> centered(dim);
    for (size_t i = 0; i < dim; ++i) centered[i] = v[i] - recon.mean[i];
    std::vector<double> rec(dim, 0.0);
    for (const auto& comp : recon.components) {
        double proj = 0.0;
        for (size_t i = 0; i < dim; ++i) proj += centered[i] * comp[i];
        for (size_t i = 0; i < dim; ++i) rec[i] += proj * comp[i];
    }
    double err = 0.0;
    for (size_t i = 0; i < dim; ++i) {
        const double d = centered[i] - rec[i];
        err += d * d;
    }
    return err;
}

std::vector<EigenPair> symmetric_eigen(std::vector<std::vector<double>> m) {
    const size_t n = m.size();
    // v starts as identity and accumulates the rotations; columns end up as
    // eigenvectors.
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    // Cyclic Jacobi sweeps with a fixed pivot order keep the decomposition
    // bit-reproducible across platforms.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
        }
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(m[p][q]) < 1e-300) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t i = 0; i < n; ++i) {
                    const double mip = m[i][p];
                    const double miq = m[i][q];
                    m[i][p] = c * mip - s * miq;
                    m[i][q] = s * mip + c * miq;
                }
                for (size_t i = 0; i < n; ++i) {
                    const double mpi = m[p][i];
                    const double mqi = m[q][i];
                    m[p][i] = c * mpi - s * mqi;
                    m[q][i] = s * mpi + c * mqi;
                }
                for (size_t i = 0; i < n; ++i) {
                    const double vip = v[i][p];
                    const double viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<EigenPair> pairs(n);
    for (size_t j = 0; j < n; ++j) {
        pairs[j].value = m[j][j];
        pairs[j].vector.resize(n);
        for (size_t i = 0; i < n; ++i) pairs[j].vector[i] = v[i][j];
        // Sign convention: the largest-magnitude entry is positive.
        size_t arg = 0;
        for (size_t i = 1; i < n; ++i) {
            if (std::abs(pairs[j].vector[i]) > std::abs(pairs[j].vector[arg])) arg = i;
        }
        if (pairs[j].vector[arg] < 0.0) {
            for (auto& x : pairs[j].vector) x = -x;
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const EigenPair& a, const EigenPair& b) { return a.value > b.value; });
    return pairs;
}

namespace {

ClassRecon fit_class_recon(const std::vector<std::vector<double>>& rows, size_t k) {
    const size_t dim = rows[0].size();
    ClassRecon out;
    out.mean.assign(dim, 0.0);
    for (const auto& r : rows) {
        for (size_t i = 0; i < dim; ++i) out.mean[i] += r[i];
    }
    for (size_t i = 0; i < dim; ++i) out.mean[i] /= static_cast<double>(rows.size());

    std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
    for (const auto& r : rows) {
        for (size_t i = 0; i < dim; ++i) {
            const double di = r[i] - out.mean[i];
            for (size_t j = i; j < dim; ++j) {
                cov[i][j] += di * (r[j] - out.mean[j]);
            }
        }
    }
    for (size_t i = 0; i < dim; ++i) {
        for (size_t j = i; j < dim; ++j) {
            cov[i][j] /= static_cast<double>(rows.size());
            cov[j][i] = cov[i][j];
        }
    }

    const auto pairs = symmetric_eigen(std::move(cov));
    for (size_t j = 0; j < k; ++j) out.components.push_back(pairs[j].vector);
    return out;
}

}  // namespace

ReconPair fit_recon(const Dataset& data, size_t k, uint64_t seed) {
    if (data.rows.empty()) throw EmptyData("fit_recon over an empty dataset");
    ReconPair pair;
    pair.ctx = make_normalization(data.schema, data.rows, NormalizationMode::TrainRanges);
    if (k < 1 || k > pair.ctx.dim) {
        throw Error("fit_recon requires 1 <= k <= encoded dimension");
    }
    pair.k = k;
    pair.seed = seed;
    pair.fit_source = data.provenance.source;

    std::vector<std::vector<double>> by_class[2];
    for (const auto& row : data.rows) {
        if (!row.label) throw DegenerateData("fit_recon requires labeled rows");
        by_class[*row.label].push_back(encode(row, pair.ctx).coords);
    }
    if (by_class[0].empty() || by_class[1].empty()) {
        throw DegenerateData("fit_recon requires both classes");
    }
    pair.recon[0] = fit_class_recon(by_class[0], k);
    pair.recon[1] = fit_class_recon(by_class[1], k);
    return pair;
}

double im1(const Instance& e, const ReconPair& pair, int predicted_class, double eps) {
    if (predicted_class != 0 && predicted_class != 1) {
        throw Error("im1 predicted_class must be 0 or 1");
    }
    if (eps <= 0.0) throw Error("im1 eps must be positive");
    const Encoded enc = encode(e, pair.ctx);
    const double res_target = reconstruction_error(pair.recon[static_cast<size_t>(predicted_class)], enc.coords);
    const double res_other = reconstruction_error(pair.recon[static_cast<size_t>(1 - predicted_class)], enc.coords);
    return res_target / (res_other + eps);
}

// --- evaluator ----------------------------------------------------------------

UtilityEvaluator::UtilityEvaluator(const UtilitySpec& spec, const FeatureSchema& schema,
                                   const Dataset* train, const std::vector<Instance>* local_set)
    : spec_(spec), schema_(schema) {
    switch (spec.kind) {
        case UtilityKind::Sparsity:
            break;
        case UtilityKind::L2Normalized:
        case UtilityKind::HeomNegative: {
            if (spec.normalization == NormalizationMode::LocalSet) {
                if (local_set == nullptr || local_set->empty()) {
                    throw Error("local-set normalization needs the local instance set");
                }
                ctx_ = make_normalization(schema, *local_set, NormalizationMode::LocalSet);
            } else {
                if (train == nullptr || train->rows.empty()) {
                    throw Error("train-ranges normalization needs training data");
                }
                ctx_ = make_normalization(schema, train->rows, NormalizationMode::TrainRanges);
            }
            break;
        }
        case UtilityKind::Im1Negative: {
            if (train == nullptr) throw Error("im1 utility needs training data");
            if (spec.im1_epsilon <= 0.0) throw Error("im1 epsilon must be positive");
            recon_ = std::make_shared<ReconPair>(
                fit_recon(*train, spec.im1_components, /*seed=*/0));
            ctx_ = recon_->ctx;
            break;
        }
        case UtilityKind::Penalized: {
            if (!spec.base) throw Error("penalized utility needs a base");
            if (spec.base->kind == UtilityKind::Penalized) {
                throw Error("penalized utility must wrap a non-penalized base");
            }
            if (spec.penalty_mode == PenaltyMode::SparsitySaturating &&
                spec.base->kind != UtilityKind::Sparsity) {
                throw Error("sparsity-saturating penalty requires a sparsity base");
            }
            base_ = std::make_shared<UtilityEvaluator>(*spec.base, schema, train, local_set);
            for (const auto& name : spec.sensitive) {
                sensitive_idx_.push_back(schema.index_of(name));
            }
            if (sensitive_idx_.empty()) {
                throw Error("penalized utility needs a non-empty sensitive set");
            }
            break;
        }
    }
}

double UtilityEvaluator::eval(const Instance& x, const Instance& e) const {
    switch (spec_.kind) {
        case UtilityKind::Sparsity:
            return sparsity_u(schema_, x, e);
        case UtilityKind::L2Normalized:
            return l2_normalized_u(x, e, *ctx_);
        case UtilityKind::HeomNegative:
            return -heom(x, e, *ctx_);
        case UtilityKind::Im1Negative: {
            if (!e.label) throw Error("im1 utility needs the counterfactual class on e.label");
            return -im1(e, *recon_, *e.label, spec_.im1_epsilon);
        }
        case UtilityKind::Penalized: {
            bool sensitive_changed = false;
            for (size_t idx : sensitive_idx_) {
                if (!value_equal(x.values.at(idx), e.values.at(idx))) {
                    sensitive_changed = true;
                    break;
                }
            }
            if (spec_.penalty_mode == PenaltyMode::HardConstant) {
                return sensitive_changed ? spec_.penalty_value : base_->eval(x, e);
            }
            const double d = static_cast<double>(schema_.arity());
            const double l0 = static_cast<double>(changed_count(schema_, x, e));
            return -std::min(l0 + (sensitive_changed ? d : 0.0), d);
        }
    }
    throw Error("unreachable utility kind");
}

}  // namespace cfaudit
