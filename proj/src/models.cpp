#include "cfaudit/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfaudit/rng.hpp"

namespace cfaudit {

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Logistic: return "logistic";
        case ModelKind::Tree: return "tree";
        case ModelKind::Forest: return "forest";
        case ModelKind::RuleXor: return "rule-xor";
    }
    return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "logistic") return ModelKind::Logistic;
    if (name == "tree") return ModelKind::Tree;
    if (name == "forest") return ModelKind::Forest;
    if (name == "rule-xor") return ModelKind::RuleXor;
    throw ParseError("unknown model kind '" + name + "'");
}

namespace {

struct EncodedTrainSet {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    NormalizationContext ctx;
};

EncodedTrainSet encode_training_data(const Dataset& data) {
    if (data.rows.empty()) throw EmptyData("training set is empty");
    EncodedTrainSet out;
    out.ctx = make_normalization(data.schema, data.rows, NormalizationMode::TrainRanges);
    out.x.reserve(data.rows.size());
    out.y.reserve(data.rows.size());
    bool seen[2] = {false, false};
    for (const auto& row : data.rows) {
        if (!row.label) throw DegenerateData("training rows must be labeled");
        out.x.push_back(encode(row, out.ctx).coords);
        out.y.push_back(*row.label);
        seen[*row.label] = true;
    }
    if (!seen[0] || !seen[1]) throw DegenerateData("training set contains a single class");
    return out;
}

double gini(size_t c0, size_t c1) {
    const double n = static_cast<double>(c0 + c1);
    if (n == 0.0) return 0.0;
    const double p0 = static_cast<double>(c0) / n;
    const double p1 = static_cast<double>(c1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
};

// Best weighted-Gini split over the given feature candidates. Ties resolve
// to the lower feature index, then the lower threshold, so training order
// never depends on container iteration quirks.
SplitChoice best_split(const EncodedTrainSet& train, const std::vector<size_t>& rows,
                       const std::vector<size_t>& features, size_t min_leaf) {
    SplitChoice best;
    std::vector<size_t> order(rows);
    for (size_t f : features) {
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            const double va = train.x[a][f];
            const double vb = train.x[b][f];
            if (va != vb) return va < vb;
            return a < b;
        });
        size_t total1 = 0;
        for (size_t r : order) total1 += static_cast<size_t>(train.y[r]);
        const size_t total = order.size();
        size_t left1 = 0;
        for (size_t i = 0; i + 1 < total; ++i) {
            left1 += static_cast<size_t>(train.y[order[i]]);
            const double v = train.x[order[i]][f];
            const double vnext = train.x[order[i + 1]][f];
            if (v == vnext) continue;
            const size_t nl = i + 1;
            const size_t nr = total - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            const double imp =
                (static_cast<double>(nl) * gini(nl - left1, left1) +
                 static_cast<double>(nr) * gini(nr - (total1 - left1), total1 - left1)) /
                static_cast<double>(total);
            const double thr = 0.5 * (v + vnext);
            if (imp < best.impurity - 1e-15 ||
                (std::abs(imp - best.impurity) <= 1e-15 &&
                 (static_cast<int>(f) < best.feature ||
                  (static_cast<int>(f) == best.feature && thr < best.threshold)))) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = thr;
                best.impurity = imp;
            }
        }
    }
    return best;
}

int majority_label(const EncodedTrainSet& train, const std::vector<size_t>& rows) {
    size_t c1 = 0;
    for (size_t r : rows) c1 += static_cast<size_t>(train.y[r]);
    const size_t c0 = rows.size() - c1;
    if (c1 > c0) return 1;
    return 0;  // ties toward class 0
}

// rng == nullptr means use all features at every split (plain tree);
// otherwise draw a fresh subset of ceil(sqrt(dim)) per split (forest).
int grow_node(DecisionTree& tree, const EncodedTrainSet& train, std::vector<size_t> rows,
              size_t depth, const HyperParams& hp, Rng* rng) {
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    size_t c1 = 0;
    for (size_t r : rows) c1 += static_cast<size_t>(train.y[r]);
    const bool pure = c1 == 0 || c1 == rows.size();

    if (pure || depth >= hp.max_depth || rows.size() < 2 * hp.min_leaf) {
        tree.nodes[node_index].leaf_label = majority_label(train, rows);
        return node_index;
    }

    const size_t dim = train.ctx.dim;
    std::vector<size_t> features;
    if (rng != nullptr) {
        const size_t k = static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(dim))));
        features = rng->sample_distinct(dim, k);
        std::sort(features.begin(), features.end());
    } else {
        features.resize(dim);
        std::iota(features.begin(), features.end(), 0);
    }

    const SplitChoice split = best_split(train, rows, features, hp.min_leaf);
    if (!split.found) {
        tree.nodes[node_index].leaf_label = majority_label(train, rows);
        return node_index;
    }

    std::vector<size_t> left_rows;
    std::vector<size_t> right_rows;
    for (size_t r : rows) {
        if (train.x[r][static_cast<size_t>(split.feature)] <= split.threshold) {
            left_rows.push_back(r);
        } else {
            right_rows.push_back(r);
        }
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left = grow_node(tree, train, std::move(left_rows), depth + 1, hp, rng);
    const int right = grow_node(tree, train, std::move(right_rows), depth + 1, hp, rng);
    tree.nodes[node_index].feature = split.feature;
    tree.nodes[node_index].threshold = split.threshold;
    tree.nodes[node_index].left = left;
    tree.nodes[node_index].right = right;
    return node_index;
}

int tree_predict(const DecisionTree& tree, const std::vector<double>& coords) {
    int node = 0;
    while (tree.nodes[static_cast<size_t>(node)].feature >= 0) {
        const auto& n = tree.nodes[static_cast<size_t>(node)];
        node = coords[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return tree.nodes[static_cast<size_t>(node)].leaf_label;
}

void check_hyperparams(const HyperParams& hp) {
    if (hp.learning_rate <= 0.0 || hp.l2 < 0.0 || hp.epochs == 0 || hp.max_depth == 0 || hp.min_leaf == 0 ||
        hp.tree_count == 0 || hp.bootstrap_fraction <= 0.0) {
        throw Error("hyperparameters must be positive");
    }
}

}  // namespace

Model train_logistic(const Dataset& data, const HyperParams& hp, uint64_t seed) {
    check_hyperparams(hp);
    const EncodedTrainSet train = encode_training_data(data);
    const size_t n = train.x.size();
    const size_t dim = train.ctx.dim;

    Model model;
    model.kind = ModelKind::Logistic;
    model.schema = data.schema;
    model.ctx = train.ctx;
    model.hp = hp;
    model.train_seed = seed;  // recorded; zero-init full-batch descent draws nothing
    model.weights.assign(dim, 0.0);
    model.bias = 0.0;

    std::vector<double> grad(dim);
    for (size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double z = model.bias;
            for (size_t j = 0; j < dim; ++j) z += model.weights[j] * train.x[i][j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double err = p - static_cast<double>(train.y[i]);
            for (size_t j = 0; j < dim; ++j) grad[j] += err * train.x[i][j];
            grad_b += err;
        }
        const double step = hp.learning_rate / static_cast<double>(n);
        for (size_t j = 0; j < dim; ++j) {
            model.weights[j] -=
                step * grad[j] + hp.learning_rate * hp.l2 * model.weights[j];
        }
        model.bias -= step * grad_b;
    }
    return model;
}

Model train_tree(const Dataset& data, const HyperParams& hp, uint64_t seed) {
    check_hyperparams(hp);
    const EncodedTrainSet train = encode_training_data(data);
    Model model;
    model.kind = ModelKind::Tree;
    model.schema = data.schema;
    model.ctx = train.ctx;
    model.hp = hp;
    model.train_seed = seed;
    std::vector<size_t> rows(train.x.size());
    std::iota(rows.begin(), rows.end(), 0);
    DecisionTree tree;
    grow_node(tree, train, std::move(rows), 0, hp, nullptr);
    model.trees.push_back(std::move(tree));
    return model;
}

Model train_forest(const Dataset& data, const HyperParams& hp, uint64_t seed) {
    check_hyperparams(hp);
    const EncodedTrainSet train = encode_training_data(data);
    const size_t n = train.x.size();
    const size_t draws =
        std::max<size_t>(1, static_cast<size_t>(std::llround(hp.bootstrap_fraction *
                                                             static_cast<double>(n))));

    Model model;
    model.kind = ModelKind::Forest;
    model.schema = data.schema;
    model.ctx = train.ctx;
    model.hp = hp;
    model.train_seed = seed;
    model.trees.reserve(hp.tree_count);

    for (size_t t = 0; t < hp.tree_count; ++t) {
        Rng rng(derive_seed(seed, t));
        std::vector<size_t> rows;
        rows.reserve(draws);
        for (size_t i = 0; i < draws; ++i) rows.push_back(rng.uniform_index(n));
        DecisionTree tree;
        grow_node(tree, train, std::move(rows), 0, hp, &rng);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

Model rule_model_xor() {
    Model model;
    model.kind = ModelKind::RuleXor;
    model.schema = xor_schema();
    return model;
}

int predict(const Model& model, const Instance& inst) {
    validate_instance(model.schema, inst);
    switch (model.kind) {
        case ModelKind::RuleXor: {
            const int gender = inst.cat(1) == "1" ? 1 : 0;
            const int high_income = inst.num(0) > 50000.0 ? 1 : 0;
            return gender ^ high_income;
        }
        case ModelKind::Logistic: {
            const Encoded enc = encode(inst, model.ctx);
            double z = model.bias;
            for (size_t j = 0; j < enc.coords.size(); ++j) z += model.weights[j] * enc.coords[j];
            return z >= 0.0 ? 1 : 0;
        }
        case ModelKind::Tree:
        case ModelKind::Forest: {
            const Encoded enc = encode(inst, model.ctx);
            size_t votes1 = 0;
            for (const auto& tree : model.trees) {
                votes1 += static_cast<size_t>(tree_predict(tree, enc.coords));
            }
            const size_t votes0 = model.trees.size() - votes1;
            return votes1 > votes0 ? 1 : 0;
        }
    }
    throw Error("unreachable model kind");
}

double accuracy(const Model& model, const Dataset& data) {
    if (data.rows.empty()) throw EmptyData("accuracy over an empty dataset");
    size_t hits = 0;
    for (const auto& row : data.rows) {
        if (!row.label) throw EmptyData("accuracy requires labeled rows");
        hits += static_cast<size_t>(predict(model, row) == *row.label);
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows.size());
}

std::string model_id(const Model& model) {
    if (model.kind == ModelKind::RuleXor) return "rule-xor";
    return model_kind_name(model.kind) + "#seed=" + std::to_string(model.train_seed);
}

}  // namespace cfaudit
