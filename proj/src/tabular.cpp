#include "cfaudit/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cfaudit/rng.hpp"

namespace cfaudit {

namespace {

bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_char(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a finite number for " + what + ", got '" + tok + "'");
    }
}

}  // namespace

// --- schema ----------------------------------------------------------------

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
    std::unordered_set<std::string> seen;
    for (const auto& f : features_) {
        if (f.name.empty()) throw SchemaError("feature with empty name");
        if (!seen.insert(f.name).second) throw SchemaError("duplicate feature name '" + f.name + "'");
        if (f.kind == FeatureKind::Numeric) {
            if (!(f.lo < f.hi)) {
                throw SchemaError("numeric feature '" + f.name + "' needs lo < hi");
            }
        } else {
            if (f.categories.size() < 2) {
                throw SchemaError("categorical feature '" + f.name + "' needs >= 2 categories");
            }
            std::unordered_set<std::string> cats(f.categories.begin(), f.categories.end());
            if (cats.size() != f.categories.size()) {
                throw SchemaError("categorical feature '" + f.name + "' has duplicate categories");
            }
        }
    }
}

size_t FeatureSchema::index_of(const std::string& name) const {
    for (size_t i = 0; i < features_.size(); ++i) {
        if (features_[i].name == name) return i;
    }
    throw SchemaError("unknown feature '" + name + "'");
}

bool FeatureSchema::has_feature(const std::string& name) const {
    return std::any_of(features_.begin(), features_.end(),
                       [&](const FeatureSpec& f) { return f.name == name; });
}

std::vector<std::string> FeatureSchema::sensitive_set() const {
    std::vector<std::string> out;
    for (const auto& f : features_) {
        if (f.sensitive) out.push_back(f.name);
    }
    return out;
}

bool FeatureSchema::operator==(const FeatureSchema& other) const {
    if (features_.size() != other.features_.size()) return false;
    for (size_t i = 0; i < features_.size(); ++i) {
        const auto& a = features_[i];
        const auto& b = other.features_[i];
        if (a.name != b.name || a.kind != b.kind || a.sensitive != b.sensitive) return false;
        if (a.kind == FeatureKind::Numeric) {
            if (a.lo != b.lo || a.hi != b.hi) return false;
        } else if (a.categories != b.categories) {
            return false;
        }
    }
    return true;
}

bool value_equal(const FeatureValue& a, const FeatureValue& b) {
    return a == b;
}

std::string value_to_string(const FeatureValue& v) {
    if (std::holds_alternative<double>(v)) {
        const double d = std::get<double>(v);
        if (d == std::floor(d) && std::abs(d) < 1e15) {
            return std::to_string(static_cast<long long>(d));
        }
        std::ostringstream os;
        os.precision(17);
        os << d;
        return os.str();
    }
    return std::get<std::string>(v);
}

bool Instance::same_values(const Instance& other) const {
    return values == other.values;
}

void validate_instance(const FeatureSchema& schema, const Instance& inst) {
    if (inst.values.size() != schema.arity()) {
        throw SchemaMismatch("instance has " + std::to_string(inst.values.size()) +
                             " values, schema arity is " + std::to_string(schema.arity()));
    }
    for (size_t i = 0; i < schema.arity(); ++i) {
        const auto& spec = schema.at(i);
        if (spec.kind == FeatureKind::Numeric) {
            if (!std::holds_alternative<double>(inst.values[i]) ||
                !std::isfinite(std::get<double>(inst.values[i]))) {
                throw SchemaMismatch("feature '" + spec.name + "' expects a finite number");
            }
        } else {
            if (!std::holds_alternative<std::string>(inst.values[i])) {
                throw SchemaMismatch("feature '" + spec.name + "' expects a category token");
            }
            const auto& tok = std::get<std::string>(inst.values[i]);
            if (std::find(spec.categories.begin(), spec.categories.end(), tok) ==
                spec.categories.end()) {
                throw SchemaMismatch("'" + tok + "' is not a category of '" + spec.name + "'");
            }
        }
    }
    if (inst.label && *inst.label != 0 && *inst.label != 1) {
        throw SchemaMismatch("label must be 0 or 1");
    }
}

// --- normalization ----------------------------------------------------------

NormalizationContext make_normalization(const FeatureSchema& schema,
                                        const std::vector<Instance>& reference,
                                        NormalizationMode mode) {
    if (reference.empty()) throw EmptyData("normalization reference set is empty");
    for (const auto& inst : reference) validate_instance(schema, inst);

    NormalizationContext ctx;
    ctx.schema = schema;
    ctx.mode = mode;
    ctx.num_min.assign(schema.arity(), 0.0);
    ctx.num_max.assign(schema.arity(), 0.0);
    ctx.offset.assign(schema.arity(), 0);

    size_t off = 0;
    for (size_t i = 0; i < schema.arity(); ++i) {
        const auto& spec = schema.at(i);
        ctx.offset[i] = off;
        if (spec.kind == FeatureKind::Numeric) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (const auto& inst : reference) {
                lo = std::min(lo, inst.num(i));
                hi = std::max(hi, inst.num(i));
            }
            if (!(lo < hi)) {
                throw DegenerateRange("numeric feature '" + spec.name +
                                      "' is constant over the reference set");
            }
            ctx.num_min[i] = lo;
            ctx.num_max[i] = hi;
            off += 1;
        } else {
            off += spec.categories.size() == 2 ? 1 : spec.categories.size();
        }
    }
    ctx.dim = off;
    return ctx;
}

Encoded encode(const Instance& inst, const NormalizationContext& ctx) {
    validate_instance(ctx.schema, inst);
    Encoded out;
    out.coords.assign(ctx.dim, 0.0);
    for (size_t i = 0; i < ctx.schema.arity(); ++i) {
        const auto& spec = ctx.schema.at(i);
        const size_t off = ctx.offset[i];
        if (spec.kind == FeatureKind::Numeric) {
            double t = (inst.num(i) - ctx.num_min[i]) / ctx.range(i);
            if (t < 0.0) {
                t = 0.0;
                out.clamped = true;
            } else if (t > 1.0) {
                t = 1.0;
                out.clamped = true;
            }
            out.coords[off] = t;
        } else {
            const auto& tok = inst.cat(i);
            const size_t code = static_cast<size_t>(
                std::find(spec.categories.begin(), spec.categories.end(), tok) -
                spec.categories.begin());
            if (spec.categories.size() == 2) {
                out.coords[off] = static_cast<double>(code);
            } else {
                out.coords[off + code] = 1.0;
            }
        }
    }
    return out;
}

NormalizationContext schema_ranges_context(const FeatureSchema& schema) {
    NormalizationContext ctx;
    ctx.schema = schema;
    ctx.mode = NormalizationMode::TrainRanges;
    ctx.num_min.assign(schema.arity(), 0.0);
    ctx.num_max.assign(schema.arity(), 0.0);
    ctx.offset.assign(schema.arity(), 0);
    size_t off = 0;
    for (size_t i = 0; i < schema.arity(); ++i) {
        const auto& spec = schema.at(i);
        ctx.offset[i] = off;
        if (spec.kind == FeatureKind::Numeric) {
            ctx.num_min[i] = spec.lo;
            ctx.num_max[i] = spec.hi;
            off += 1;
        } else {
            off += spec.categories.size() == 2 ? 1 : spec.categories.size();
        }
    }
    ctx.dim = off;
    return ctx;
}

Instance decode(const std::vector<double>& coords, const NormalizationContext& ctx) {
    if (coords.size() != ctx.dim) throw SchemaMismatch("coordinate vector has wrong dimension");
    Instance inst;
    inst.values.reserve(ctx.schema.arity());
    for (size_t i = 0; i < ctx.schema.arity(); ++i) {
        const auto& spec = ctx.schema.at(i);
        const size_t off = ctx.offset[i];
        if (spec.kind == FeatureKind::Numeric) {
            inst.values.emplace_back(ctx.num_min[i] + coords[off] * ctx.range(i));
        } else if (spec.categories.size() == 2) {
            inst.values.emplace_back(spec.categories[coords[off] >= 0.5 ? 1 : 0]);
        } else {
            size_t best = 0;
            for (size_t c = 1; c < spec.categories.size(); ++c) {
                if (coords[off + c] > coords[off + best]) best = c;
            }
            inst.values.emplace_back(spec.categories[best]);
        }
    }
    return inst;
}

// --- schema config ----------------------------------------------------------

FeatureSchema parse_schema_text(const std::string& text) {
    std::vector<FeatureSpec> specs;
    std::istringstream is(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (is_blank(line)) continue;

        auto toks = split_ws(line);
        if (toks[0] != "feature" || toks.size() < 3) {
            throw ParseError("schema line " + std::to_string(lineno) +
                             ": expected 'feature <name> <kind> ...'");
        }
        FeatureSpec spec;
        spec.name = toks[1];
        const std::string& kind = toks[2];
        size_t next = 3;
        if (kind == "numeric") {
            if (toks.size() < 5) {
                throw ParseError("schema line " + std::to_string(lineno) +
                                 ": numeric feature needs <lo> <hi>");
            }
            spec.kind = FeatureKind::Numeric;
            spec.lo = parse_double(toks[3], "numeric lo");
            spec.hi = parse_double(toks[4], "numeric hi");
            next = 5;
        } else if (kind == "categorical") {
            if (toks.size() < 4) {
                throw ParseError("schema line " + std::to_string(lineno) +
                                 ": categorical feature needs a comma-separated category list");
            }
            spec.kind = FeatureKind::Categorical;
            for (auto& cat : split_char(toks[3], ',')) {
                if (cat.empty()) {
                    throw ParseError("schema line " + std::to_string(lineno) +
                                     ": empty category token");
                }
                spec.categories.push_back(cat);
            }
            next = 4;
        } else {
            throw ParseError("schema line " + std::to_string(lineno) + ": unknown kind '" +
                             kind + "'");
        }
        if (next < toks.size()) {
            if (toks[next] == "sensitive" && next + 1 == toks.size()) {
                spec.sensitive = true;
            } else {
                throw ParseError("schema line " + std::to_string(lineno) +
                                 ": unexpected trailing token '" + toks[next] + "'");
            }
        }
        specs.push_back(std::move(spec));
    }
    if (specs.empty()) throw ParseError("schema config declares no features");
    return FeatureSchema(std::move(specs));  // constructor enforces invariants
}

FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ParseError("cannot open schema config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema_text(buf.str());
}

// --- CSV ---------------------------------------------------------------------

namespace {

// RFC-4180: fields separated by commas, optionally quoted; quoted fields may
// contain commas, newlines and doubled quotes. Accepts both \n and \r\n.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&]() {
        end_field();
        records.push_back(row);
        row.clear();
    };

    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() || field_started || !row.empty()) end_row();
        } else if (c == '\r') {
            // swallowed; \r\n handled at the \n
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw ParseError("CSV ends inside a quoted field");
    if (!field.empty() || field_started || !row.empty()) end_row();
    return records;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

Dataset parse_csv_text(const std::string& text, const FeatureSchema& schema,
                       const std::string& source_name) {
    auto records = parse_csv_records(text);
    if (records.empty()) throw ParseError("CSV '" + source_name + "' is empty");

    const auto& header = records[0];
    // Map each schema feature to its column; order-insensitive. A lone extra
    // column named "label" carries the class.
    std::vector<size_t> col_of_feature(schema.arity(), SIZE_MAX);
    std::optional<size_t> label_col;
    for (size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") {
            if (label_col) throw ParseError("duplicate 'label' column");
            label_col = c;
            continue;
        }
        if (!schema.has_feature(header[c])) {
            throw ParseError("CSV column '" + header[c] + "' is not a schema feature");
        }
        const size_t f = schema.index_of(header[c]);
        if (col_of_feature[f] != SIZE_MAX) {
            throw ParseError("duplicate CSV column '" + header[c] + "'");
        }
        col_of_feature[f] = c;
    }
    for (size_t f = 0; f < schema.arity(); ++f) {
        if (col_of_feature[f] == SIZE_MAX) {
            throw ParseError("CSV is missing schema column '" + schema.at(f).name + "'");
        }
    }

    Dataset data;
    data.schema = schema;
    data.provenance.source = source_name;

    for (size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != header.size()) {
            throw ValidationError("row has " + std::to_string(rec.size()) +
                                      " cells, header has " + std::to_string(header.size()),
                                  r + 1, rec.size() + 1);
        }
        Instance inst;
        inst.values.reserve(schema.arity());
        for (size_t f = 0; f < schema.arity(); ++f) {
            const size_t c = col_of_feature[f];
            const std::string& cell = rec[c];
            const auto& spec = schema.at(f);
            if (spec.kind == FeatureKind::Numeric) {
                try {
                    size_t pos = 0;
                    const double v = std::stod(cell, &pos);
                    if (pos != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
                    inst.values.emplace_back(v);
                } catch (const std::exception&) {
                    throw ValidationError("'" + cell + "' is not a number for feature '" +
                                              spec.name + "'",
                                          r + 1, c + 1);
                }
            } else {
                if (std::find(spec.categories.begin(), spec.categories.end(), cell) ==
                    spec.categories.end()) {
                    throw ValidationError("'" + cell + "' is not a category of '" + spec.name +
                                              "'",
                                          r + 1, c + 1);
                }
                inst.values.emplace_back(cell);
            }
        }
        if (label_col) {
            const std::string& cell = rec[*label_col];
            if (cell != "0" && cell != "1") {
                throw ValidationError("label must be 0 or 1, got '" + cell + "'", r + 1,
                                      *label_col + 1);
            }
            inst.label = cell == "1" ? 1 : 0;
        }
        data.rows.push_back(std::move(inst));
    }
    return data;
}

Dataset load_csv(const std::string& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw ParseError("cannot open CSV '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_text(buf.str(), schema, path);
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw Error("cannot open '" + path + "' for writing");
    bool labeled = !data.rows.empty() && data.rows[0].label.has_value();
    for (size_t f = 0; f < data.schema.arity(); ++f) {
        if (f) out << ',';
        out << csv_escape(data.schema.at(f).name);
    }
    if (labeled) out << ",label";
    out << "\r\n";
    for (const auto& row : data.rows) {
        for (size_t f = 0; f < data.schema.arity(); ++f) {
            if (f) out << ',';
            out << csv_escape(value_to_string(row.values[f]));
        }
        if (labeled) out << ',' << (row.label.value_or(0));
        out << "\r\n";
    }
}

// --- synthetic data -----------------------------------------------------------

FeatureSchema loan_schema() {
    return FeatureSchema({
        {"Income", FeatureKind::Numeric, 0.0, 100000.0, {}, false},
        {"Gender", FeatureKind::Categorical, 0.0, 0.0, {"F", "M"}, true},
        {"Employment", FeatureKind::Categorical, 0.0, 0.0, {"Temporary", "Permanent"}, false},
        {"Age", FeatureKind::Numeric, 18.0, 80.0, {}, false},
    });
}

FeatureSchema xor_schema() {
    return FeatureSchema({
        {"Income", FeatureKind::Numeric, 0.0, 100000.0, {}, false},
        {"Gender", FeatureKind::Categorical, 0.0, 0.0, {"0", "1"}, true},
    });
}

// Generative rule for the loan toy (documented in the README):
//   income ~ U{0..100000}, gender ~ U{F,M}, employment ~ U{Temp,Perm},
//   age ~ U{18..80}, noise ~ U[0,1)
//   score = 0.40*income/100000 + 0.22*[Permanent] + 0.16*[M]
//         + 0.12*(age-18)/62 + 0.20*noise
//   label = 1 iff score > 0.55
// Gender carries real signal so that sensitive-avoiding selection is a
// substantive intervention rather than a no-op.
Dataset gen_synthetic_loan(size_t n, uint64_t seed) {
    if (n < 10) throw Error("gen_synthetic_loan requires n >= 10");
    Dataset data;
    data.schema = loan_schema();
    data.provenance = {"synthetic-loan", seed};
    Rng rng(seed);
    data.rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const double income = static_cast<double>(rng.uniform_int(0, 100000));
        const bool male = rng.uniform_index(2) == 1;
        const bool permanent = rng.uniform_index(2) == 1;
        const double age = static_cast<double>(rng.uniform_int(18, 80));
        const double noise = rng.uniform_real();
        const double score = 0.40 * income / 100000.0 + 0.22 * (permanent ? 1.0 : 0.0) +
                             0.16 * (male ? 1.0 : 0.0) + 0.12 * (age - 18.0) / 62.0 +
                             0.20 * noise;
        Instance inst;
        inst.values = {FeatureValue(income), FeatureValue(std::string(male ? "M" : "F")),
                       FeatureValue(std::string(permanent ? "Permanent" : "Temporary")),
                       FeatureValue(age)};
        inst.label = score > 0.55 ? 1 : 0;
        data.rows.push_back(std::move(inst));
    }
    return data;
}

Dataset gen_xor(size_t n, uint64_t seed) {
    if (n < 4 || n % 2 != 0) throw Error("gen_xor requires n >= 4 and even");
    Dataset data;
    data.schema = xor_schema();
    data.provenance = {"synthetic-xor", seed};
    Rng rng(seed);
    const size_t per_class = n / 2;
    size_t count[2] = {0, 0};
    data.rows.reserve(n);
    // Rejection-sample rows until each class quota is filled; the label is
    // exactly the parity rule, so balance is forced rather than approximate.
    while (data.rows.size() < n) {
        const double income = static_cast<double>(rng.uniform_int(0, 100000));
        const int gender = static_cast<int>(rng.uniform_index(2));
        const int label = gender ^ (income > 50000.0 ? 1 : 0);
        if (count[label] >= per_class) continue;
        ++count[label];
        Instance inst;
        inst.values = {FeatureValue(income), FeatureValue(std::string(gender ? "1" : "0"))};
        inst.label = label;
        data.rows.push_back(std::move(inst));
    }
    return data;
}

}  // namespace cfaudit
