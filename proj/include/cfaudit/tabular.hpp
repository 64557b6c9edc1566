#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cfaudit/errors.hpp"

namespace cfaudit {

enum class FeatureKind { Numeric, Categorical };

// One column of the tabular space: a numeric range in feature units, or an
// ordered set of category tokens. `sensitive` marks membership in the
// restricted feature set S used by avoiding providers and masked methods.
struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    double lo = 0.0;   // numeric only
    double hi = 0.0;   // numeric only
    std::vector<std::string> categories;  // categorical only, order fixed
    bool sensitive = false;
};

// Ordered, validated feature list. Feature order is fixed for a run and all
// instances, encodings and masks index against it.
class FeatureSchema {
public:
    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<FeatureSpec> features);

    const std::vector<FeatureSpec>& features() const { return features_; }
    size_t arity() const { return features_.size(); }
    const FeatureSpec& at(size_t i) const { return features_.at(i); }

    // Index of a feature by name; throws SchemaError if absent.
    size_t index_of(const std::string& name) const;
    bool has_feature(const std::string& name) const;

    // Names of all features flagged sensitive, in schema order.
    std::vector<std::string> sensitive_set() const;

    bool operator==(const FeatureSchema& other) const;

private:
    std::vector<FeatureSpec> features_;
};

// A cell value: numeric in feature units, or a category token.
using FeatureValue = std::variant<double, std::string>;

bool value_equal(const FeatureValue& a, const FeatureValue& b);
std::string value_to_string(const FeatureValue& v);

// One row. `label` is the optional binary class; generated counterfactual
// records also carry the predicted class here.
struct Instance {
    std::vector<FeatureValue> values;
    std::optional<int> label;

    double num(size_t i) const { return std::get<double>(values.at(i)); }
    const std::string& cat(size_t i) const { return std::get<std::string>(values.at(i)); }

    bool same_values(const Instance& other) const;
};

// Validates an instance against a schema; throws SchemaMismatch / SchemaError.
void validate_instance(const FeatureSchema& schema, const Instance& inst);

struct DatasetProvenance {
    std::string source;  // "synthetic-loan", "synthetic-xor", or a file path
    uint64_t seed = 0;
};

struct Dataset {
    FeatureSchema schema;
    std::vector<Instance> rows;  // row index is the stable row ID
    DatasetProvenance provenance;
};

enum class NormalizationMode { TrainRanges, LocalSet };

// Min-max ranges for numerics and integer codes for category tokens.
// Binary categoricals map to a single {0,1} coordinate (first category 0,
// second 1, in schema order); wider categoricals one-hot into a block.
struct NormalizationContext {
    FeatureSchema schema;
    NormalizationMode mode = NormalizationMode::TrainRanges;
    std::vector<double> num_min;  // per feature; unused slots 0 for categoricals
    std::vector<double> num_max;
    std::vector<size_t> offset;   // start coordinate of each feature in the encoded vector
    size_t dim = 0;               // total encoded dimension

    double range(size_t feature) const { return num_max[feature] - num_min[feature]; }
};

struct Encoded {
    std::vector<double> coords;  // numerics in [0,1], categoricals 0/1 codes
    bool clamped = false;        // an out-of-range numeric was clamped
};

// Builds a normalization context from a reference set of instances.
// TrainRanges: reference = training rows. LocalSet: reference = {x} union E,
// i.e. the instances of one explanation space.
// Throws DegenerateRange if a numeric feature is constant over the reference.
NormalizationContext make_normalization(const FeatureSchema& schema,
                                        const std::vector<Instance>& reference,
                                        NormalizationMode mode);

// Deterministic embedding into [0,1]^dim. Out-of-range numerics clamp to the
// boundary and set the clamp flag instead of erroring, so that sweeps over
// generated counterfactuals stay total.
Encoded encode(const Instance& inst, const NormalizationContext& ctx);

// Inverse of encode on representable values (grid points of the context).
Instance decode(const std::vector<double>& coords, const NormalizationContext& ctx);

// Context whose numeric ranges are the schema's declared [lo, hi] bounds.
// Lets a data-less auditor encode reported explanations consistently.
NormalizationContext schema_ranges_context(const FeatureSchema& schema);

// --- file ingestion ------------------------------------------------------

// Schema config grammar (one feature per line, '#' comments, blank lines ok):
//   feature <name> numeric <lo> <hi> [sensitive]
//   feature <name> categorical <cat1>,<cat2>[,...] [sensitive]
// Names must be unique and whitespace-free.
FeatureSchema load_schema(const std::string& path);
FeatureSchema parse_schema_text(const std::string& text);

// RFC-4180 CSV with a header row; header names must match the schema
// (order-insensitive); an extra column named "label" holds {0,1} labels.
Dataset load_csv(const std::string& path, const FeatureSchema& schema);
Dataset parse_csv_text(const std::string& text, const FeatureSchema& schema,
                       const std::string& source_name);

void write_csv(const Dataset& data, const std::string& path);

// --- synthetic generators ------------------------------------------------

// The four-feature loan schema used throughout: Income [0,100000],
// Gender {F,M} (sensitive), Employment {Temporary,Permanent}, Age [18,80].
FeatureSchema loan_schema();

// Two-feature schema for the hand-coded parity rule model:
// Income [0,100000], Gender {0,1} (sensitive).
FeatureSchema xor_schema();

// Labeled loan dataset from a documented generative rule (see the README).
// Pure function of (n, seed). Requires n >= 10.
Dataset gen_synthetic_loan(size_t n, uint64_t seed);

// Dataset labeled exactly by Gender XOR (Income > 50000), class-balanced by
// construction. Requires n >= 4 and even.
Dataset gen_xor(size_t n, uint64_t seed);

}  // namespace cfaudit
