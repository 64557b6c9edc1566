#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cfaudit/serialize.hpp"
#include "cfaudit/tabular.hpp"
#include "fixtures.hpp"

using namespace cfaudit;

namespace {

const char* kLoanSchemaText =
    "# loan toy schema\n"
    "feature Income numeric 0 100000\n"
    "feature Gender categorical F,M sensitive\n"
    "feature Employment categorical Temporary,Permanent\n"
    "feature Age numeric 18 80\n";

}  // namespace

TEST_CASE("schema config parses the loan schema") {
    const FeatureSchema schema = parse_schema_text(kLoanSchemaText);
    CHECK(schema.arity() == 4);
    CHECK(schema.at(0).name == "Income");
    CHECK(schema.at(0).kind == FeatureKind::Numeric);
    CHECK(schema.at(0).lo == 0.0);
    CHECK(schema.at(0).hi == 100000.0);
    CHECK(schema.at(1).categories == std::vector<std::string>{"F", "M"});
    CHECK(schema.at(1).sensitive);
    CHECK_FALSE(schema.at(2).sensitive);
    CHECK(schema.sensitive_set() == std::vector<std::string>{"Gender"});
    CHECK(schema == loan_schema());
}

TEST_CASE("schema config parses the two-feature parity schema") {
    const FeatureSchema schema = parse_schema_text(
        "feature Income numeric 0 100000\n"
        "feature Gender categorical 0,1 sensitive\n");
    CHECK(schema.arity() == 2);
    CHECK(schema == xor_schema());
}

TEST_CASE("duplicate feature names are rejected") {
    CHECK_THROWS_AS(parse_schema_text("feature age numeric 0 10\nfeature age numeric 0 20\n"),
                    SchemaError);
}

TEST_CASE("schema invariants are enforced") {
    CHECK_THROWS_AS(parse_schema_text("feature a numeric 5 5\n"), SchemaError);
    CHECK_THROWS_AS(parse_schema_text("feature a categorical only\n"), SchemaError);
    CHECK_THROWS_AS(parse_schema_text("feature a bogus 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_schema_text(""), ParseError);
}

TEST_CASE("csv round-trips and validates cells") {
    const FeatureSchema schema = loan_schema();
    const std::string csv =
        "Income,Gender,Employment,Age,label\r\n"
        "25000,F,Temporary,30,0\r\n"
        "65000,M,Permanent,45,1\r\n"
        "30000,F,Permanent,35,1\r\n";
    const Dataset data = parse_csv_text(csv, schema, "inline");
    REQUIRE(data.rows.size() == 3);
    CHECK(data.rows[0].num(0) == 25000.0);
    CHECK(data.rows[0].cat(1) == "F");
    CHECK(data.rows[1].label == 1);

    SUBCASE("out-of-category cell reports its position") {
        const std::string bad =
            "Income,Gender,Employment,Age\r\n"
            "25000,X,Temporary,30\r\n";
        try {
            parse_csv_text(bad, schema, "inline");
            FAIL("expected ValidationError");
        } catch (const ValidationError& err) {
            CHECK(err.row == 2);
            CHECK(err.column == 2);
        }
    }
    SUBCASE("header order is free, unknown columns are not") {
        const std::string reordered =
            "Age,Income,Employment,Gender\r\n"
            "30,25000,Temporary,F\r\n";
        const Dataset d2 = parse_csv_text(reordered, schema, "inline");
        CHECK(d2.rows[0].num(0) == 25000.0);
        CHECK_THROWS_AS(
            parse_csv_text("Income,Gender,Employment,Age,extra\r\n1,F,Temporary,30,x\r\n", schema,
                           "inline"),
            ParseError);
    }
    SUBCASE("quoted fields parse per RFC 4180") {
        const std::string quoted =
            "Income,Gender,Employment,Age\r\n"
            "\"25000\",F,Temporary,30\r\n";
        const Dataset d3 = parse_csv_text(quoted, schema, "inline");
        CHECK(d3.rows[0].num(0) == 25000.0);
    }
}

TEST_CASE("csv file round-trip through disk") {
    const Dataset data = gen_synthetic_loan(50, 3);
    const std::string path = "tabular_roundtrip.csv";
    write_csv(data, path);
    const Dataset back = load_csv(path, data.schema);
    REQUIRE(back.rows.size() == data.rows.size());
    bool same = true;
    for (size_t i = 0; i < data.rows.size(); ++i) {
        same = same && back.rows[i].same_values(data.rows[i]) &&
               back.rows[i].label == data.rows[i].label;
    }
    CHECK(same);
    std::remove(path.c_str());
}

TEST_CASE("local-set normalization reproduces the worked example exactly") {
    const FeatureSchema schema = loan_schema();
    std::vector<Instance> reference = {fixtures::loan_x()};
    for (const auto& e : fixtures::loan_counterfactuals()) reference.push_back(e);

    const NormalizationContext ctx =
        make_normalization(schema, reference, NormalizationMode::LocalSet);
    CHECK(ctx.num_min[0] == 25000.0);
    CHECK(ctx.num_max[0] == 35000.0);
    CHECK(ctx.num_min[3] == 30.0);
    CHECK(ctx.num_max[3] == 35.0);

    const std::vector<std::vector<double>> expected = {
        {0.0, 0, 0, 0.0},  // x
        {0.3, 1, 0, 0.0},  // e1
        {0.5, 0, 1, 1.0},  // e2
        {0.1, 0, 1, 0.2},  // e3
        {1.0, 1, 0, 0.4},  // e4
        {0.5, 1, 1, 1.0},  // e5
    };
    for (size_t i = 0; i < reference.size(); ++i) {
        const Encoded enc = encode(reference[i], ctx);
        REQUIRE(enc.coords.size() == 4);
        for (size_t c = 0; c < 4; ++c) {
            CHECK(enc.coords[c] == doctest::Approx(expected[i][c]).epsilon(1e-12));
        }
        CHECK_FALSE(enc.clamped);
    }
}

TEST_CASE("encode clamps out-of-range numerics and flags it") {
    const FeatureSchema schema = loan_schema();
    std::vector<Instance> reference = {fixtures::loan_row(25000, "F", "Temporary", 30, 0),
                                       fixtures::loan_row(80000, "M", "Permanent", 65, 1)};
    const NormalizationContext ctx =
        make_normalization(schema, reference, NormalizationMode::LocalSet);
    const Encoded enc = encode(fixtures::loan_row(90000, "F", "Temporary", 40, 0), ctx);
    CHECK(enc.coords[0] == 1.0);
    CHECK(enc.clamped);
}

TEST_CASE("encode is deterministic and idempotent through decode") {
    const FeatureSchema schema = loan_schema();
    const Dataset data = gen_synthetic_loan(100, 5);
    const NormalizationContext ctx =
        make_normalization(schema, data.rows, NormalizationMode::TrainRanges);
    bool all_ok = true;
    for (const auto& row : data.rows) {
        const Encoded a = encode(row, ctx);
        const Encoded b = encode(row, ctx);
        const Encoded c = encode(decode(a.coords, ctx), ctx);
        all_ok = all_ok && a.coords == b.coords && a.coords == c.coords;
        for (double v : a.coords) all_ok = all_ok && v >= 0.0 && v <= 1.0;
    }
    CHECK(all_ok);
}

TEST_CASE("constant numeric feature in the reference set is degenerate") {
    const FeatureSchema schema = loan_schema();
    std::vector<Instance> reference = {fixtures::loan_row(25000, "F", "Temporary", 30, 0),
                                       fixtures::loan_row(25000, "M", "Permanent", 30, 1)};
    CHECK_THROWS_AS(make_normalization(schema, reference, NormalizationMode::LocalSet),
                    DegenerateRange);
}

TEST_CASE("one-hot and binary categorical layout") {
    const FeatureSchema schema = FeatureSchema({
        {"color", FeatureKind::Categorical, 0, 0, {"red", "green", "blue"}, false},
        {"flag", FeatureKind::Categorical, 0, 0, {"no", "yes"}, false},
    });
    Instance inst;
    inst.values = {FeatureValue(std::string("green")), FeatureValue(std::string("yes"))};
    std::vector<Instance> reference = {inst};
    const NormalizationContext ctx =
        make_normalization(schema, reference, NormalizationMode::LocalSet);
    CHECK(ctx.dim == 4);  // 3 one-hot + 1 binary
    const Encoded enc = encode(inst, ctx);
    CHECK(enc.coords == std::vector<double>{0.0, 1.0, 0.0, 1.0});
}

namespace {

bool datasets_identical(const Dataset& a, const Dataset& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        if (!a.rows[i].same_values(b.rows[i]) || a.rows[i].label != b.rows[i].label) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("loan generator is pure and label-balanced across seeds") {
    const Dataset a = gen_synthetic_loan(500, 1);
    const Dataset b = gen_synthetic_loan(500, 1);
    REQUIRE(a.rows.size() == 500);
    CHECK(datasets_identical(a, b));

    const Dataset c = gen_synthetic_loan(500, 2);
    bool any_diff = false;
    for (size_t i = 0; i < a.rows.size(); ++i) {
        any_diff = any_diff || !a.rows[i].same_values(c.rows[i]);
    }
    CHECK(any_diff);

    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const Dataset d = gen_synthetic_loan(500, seed);
        size_t ones = 0;
        for (const auto& row : d.rows) ones += static_cast<size_t>(*row.label);
        const double balance = static_cast<double>(ones) / 500.0;
        CHECK(balance >= 0.3);
        CHECK(balance <= 0.7);
    }
    CHECK_THROWS_AS(gen_synthetic_loan(5, 1), Error);
}

TEST_CASE("xor generator labels by the rule and forces balance") {
    const Dataset data = gen_xor(200, 1);
    REQUIRE(data.rows.size() == 200);
    size_t ones = 0;
    bool rule_holds = true;
    for (const auto& row : data.rows) {
        const int expected = (row.cat(1) == "1" ? 1 : 0) ^ (row.num(0) > 50000.0 ? 1 : 0);
        rule_holds = rule_holds && *row.label == expected;
        ones += static_cast<size_t>(*row.label);
    }
    CHECK(rule_holds);
    CHECK(ones == 100);

    // spot values of the labeling rule
    CHECK(((40000.0 > 50000.0 ? 1 : 0) ^ 0) == 0);
    CHECK(((40000.0 > 50000.0 ? 1 : 0) ^ 1) == 1);
    CHECK(((60000.0 > 50000.0 ? 1 : 0) ^ 1) == 0);

    CHECK_THROWS_AS(gen_xor(3, 1), Error);
    CHECK_THROWS_AS(gen_xor(7, 1), Error);
}
