#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfaudit/tabular.hpp"

namespace cfaudit {

enum class ModelKind { Logistic, Tree, Forest, RuleXor };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

// Documented defaults for every trainable kind. All counts positive.
struct HyperParams {
    // logistic
    double learning_rate = 0.5;
    size_t epochs = 400;
    double l2 = 0.01;  // ridge penalty on weights (not the bias)
    // tree / forest
    size_t max_depth = 6;
    size_t min_leaf = 1;
    // forest
    size_t tree_count = 25;
    double bootstrap_fraction = 1.0;
};

// Axis-aligned split on encoded coordinates; feature == -1 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;  // go left when coord <= threshold
    int left = -1;
    int right = -1;
    int leaf_label = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

// A trained binary classifier. Immutable after training; predict is a pure,
// single-valued function of the instance, so a fixed (kind, hyperparams,
// data, seed) tuple stands for exactly one element of the model set.
struct Model {
    ModelKind kind = ModelKind::RuleXor;
    FeatureSchema schema;
    NormalizationContext ctx;  // train-ranges encoding; unused by the rule model
    HyperParams hp;
    uint64_t train_seed = 0;

    // logistic parameters
    std::vector<double> weights;
    double bias = 0.0;

    // tree / forest parameters
    std::vector<DecisionTree> trees;
};

// Gradient-descent logistic regression on encoded [0,1] features. Zero
// initialisation and a fixed epoch budget keep retraining bit-identical.
// Throws DegenerateData unless both classes are present.
Model train_logistic(const Dataset& data, const HyperParams& hp, uint64_t seed);

// Single Gini-split CART tree, all features considered at every split.
Model train_tree(const Dataset& data, const HyperParams& hp, uint64_t seed);

// Bagged Gini trees with per-split feature subsets of size ceil(sqrt(dim)).
// Every bootstrap and subset draw comes from streams derived from `seed`.
Model train_forest(const Dataset& data, const HyperParams& hp, uint64_t seed);

// Hand-coded rule over xor_schema(): label = Gender XOR (Income > 50000).
// The threshold is strict; no training.
Model rule_model_xor();

// Deterministic hard label in {0,1}. Forest votes break ties toward class 0.
// Throws SchemaMismatch if the instance does not conform to the model schema.
int predict(const Model& model, const Instance& inst);

// Exact-match fraction over a labeled dataset. Throws EmptyData when there
// is nothing to score.
double accuracy(const Model& model, const Dataset& data);

// Stable identifier used in provenance, e.g. "forest#seed=42".
std::string model_id(const Model& model);

}  // namespace cfaudit
