#include "reri/error.hpp"
#include "reri/model_io.hpp"

#include <doctest.h>

#include <string>

using namespace reri;

namespace {

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const char* kWorkedExample = R"({
  "factors": ["lowMD", "highBMI", "smoking"],
  "coefficients": {"lowMD": 0.36, "highBMI": 0.29, "smoking": 0.41,
                   "lowMD*highBMI": -0.27, "lowMD*smoking": -0.23, "highBMI*smoking": -0.24,
                   "lowMD*highBMI*smoking": 0.92}
})";

}  // namespace

TEST_CASE("coefficient document parses into mask-indexed table") {
    const auto spec = parse_coefficient_spec(kWorkedExample);
    const auto& c = spec.coefficients;
    CHECK(c.factor_count() == 3);
    CHECK(c[0b001] == 0.36);
    CHECK(c[0b110] == -0.24);
    CHECK(c[0b111] == 0.92);
    CHECK(c.saturated());
    CHECK_FALSE(spec.covariance.has_value());
}

TEST_CASE("permuted term labels resolve to the same subset") {
    const auto spec = parse_coefficient_spec(
        R"({"factors": ["a", "b"], "coefficients": {"a": 0.1, "b": 0.2, "b*a": 0.3}})");
    CHECK(spec.coefficients[0b11] == 0.3);
}

TEST_CASE("duplicate subset keys are rejected") {
    const auto msg = message_of([] {
        parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a": 0.1, "b": 0.2, "a*b": 0.3, "b*a": 0.4}})");
    });
    CHECK(msg.find("duplicate subset key") != std::string::npos);
    CHECK_THROWS_AS(parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a": 0.1, "a": 0.2, "b": 0.3, "a*b": 0}})"),
                    InputError);
}

TEST_CASE("missing product terms need an explicit opt-in") {
    const char* doc = R"({"factors": ["a", "b", "c"], "coefficients": {"a": 0.1, "b": 0.2, "c": 0.3}})";
    CHECK_THROWS_AS(parse_coefficient_spec(doc), InputError);
    const auto spec = parse_coefficient_spec(doc, {true});
    CHECK(spec.coefficients[0b111] == 0.0);
    CHECK_FALSE(spec.coefficients.saturated());
    const auto declared = parse_coefficient_spec(
        R"({"factors": ["a", "b"], "coefficients": {"a": 0.1, "b": 0.2}, "saturated": false})");
    CHECK(declared.coefficients[0b11] == 0.0);
}

TEST_CASE("main effects are always required") {
    const auto msg = message_of([] {
        parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a": 0.1, "a*b": 0.2}})", {true});
    });
    CHECK(msg.find("missing main effect for factor 'b'") != std::string::npos);
}

TEST_CASE("malformed documents are input errors") {
    CHECK_THROWS_AS(parse_coefficient_spec("{"), InputError);
    CHECK_THROWS_AS(parse_coefficient_spec("[]"), InputError);
    CHECK_THROWS_AS(parse_coefficient_spec(R"({"factors": ["a"], "coefficients": {"a": 1}})"), InputError);
    CHECK_THROWS_AS(parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a": "x", "b": 1, "a*b": 0}})"),
                    InputError);
    CHECK_THROWS_AS(parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a": 1, "b": 1, "a*c": 0}})"),
                    InputError);
}

TEST_CASE("covariance with wrong dimension is rejected") {
    const auto msg = message_of([] {
        parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a": 0.1, "b": 0.2, "a*b": 0.3},
                                   "covariance": [[1, 0], [0, 1]]})");
    });
    CHECK(msg.find("covariance dimension mismatch") != std::string::npos);
}

TEST_CASE("covariance defaults to canonical term order and accepts explicit terms") {
    const auto spec = parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a*b": 0.3, "b": 0.2, "a": 0.1},
        "covariance": [[0.01, 0, 0], [0, 0.02, 0], [0, 0, 0.03]]})");
    REQUIRE(spec.covariance.has_value());
    CHECK(spec.covariance->variance(0b01) == doctest::Approx(0.01));
    CHECK(spec.covariance->variance(0b11) == doctest::Approx(0.03));

    FactorSet f({"a", "b"});
    const auto block = parse_covariance(R"({"terms": ["b*a", "a"], "matrix": [[0.5, 0.1], [0.1, 0.4]]})", f);
    CHECK(block.variance(0b11) == doctest::Approx(0.5));
    CHECK(block.variance(0b01) == doctest::Approx(0.4));
    CHECK_THROWS_AS(parse_covariance("[[1]]", f), InputError);
    const auto bare = parse_covariance("[[1,0,0],[0,2,0],[0,0,3]]", f);
    CHECK(bare.variance(0b10) == doctest::Approx(2.0));
}

TEST_CASE("orientation labels are read") {
    const auto spec = parse_coefficient_spec(R"({"factors": ["a", "b"], "coefficients": {"a": 0.1, "b": 0.2, "a*b": 0},
        "orientation": {"b": "protective"}})");
    CHECK(spec.coefficients.factors().orientation(1) == Orientation::protective);
    CHECK(spec.coefficients.factors().orientation(0) == Orientation::unknown);
}

TEST_CASE("data table parsing") {
    DataTableConfig cfg;
    cfg.factors = {"x1", "x2"};
    cfg.confounders = {"age", "site"};
    const auto t = parse_data_table("y,x1,x2,age,site\n1,0,1,50.5,north\n0,1,1,61,south\n\n0,0,0,40,\"north\"\n", cfg);
    CHECK(t.rows() == 3);
    CHECK(t.pattern(0) == 0b10);
    CHECK(t.pattern(1) == 0b11);
    CHECK(t.outcome == std::vector<std::uint8_t>{1, 0, 0});
    REQUIRE(t.confounders.size() == 2);
    CHECK_FALSE(t.confounders[0].categorical);
    CHECK(t.confounders[0].numeric[0] == doctest::Approx(50.5));
    CHECK(t.confounders[1].categorical);
    CHECK(t.confounders[1].levels[2] == "north");
}

TEST_CASE("data table factor defaults to remaining columns") {
    const auto t = parse_data_table("a,y,b\n1,0,0\n0,1,1\n", {});
    CHECK(t.factors.names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("non-binary exposure names line and column") {
    DataTableConfig cfg;
    cfg.factors = {"x1", "x2"};
    const auto msg = message_of([&] { parse_data_table("y,x1,x2\n1,0,1\n0,2,1\n", cfg); });
    CHECK(msg == "line 3, column 'x1': value '2' is not binary (0/1)");
    CHECK_THROWS_AS(parse_data_table("y,x1,x2\n", cfg), InputError);
    CHECK_THROWS_AS(parse_data_table("", cfg), InputError);
    CHECK_THROWS_AS(parse_data_table("y,x1\n1,0\n", cfg), InputError);
    CHECK_THROWS_AS(parse_data_table("y,x1,x2\n1,0\n", cfg), InputError);
    DataTableConfig missing_outcome = cfg;
    missing_outcome.outcome = "event";
    CHECK_THROWS_AS(parse_data_table("y,x1,x2\n1,0,1\n", missing_outcome), InputError);
}

TEST_CASE("data table round trip") {
    DataTableConfig cfg;
    cfg.factors = {"x1", "x2", "x3"};
    cfg.confounders = {"bmi", "grp"};
    const std::string text = "y,x1,x2,x3,bmi,grp\n1,0,1,1,0.1,a\n0,1,1,0,27.333333333333332,b\n0,0,0,0,-3e-05,a\n";
    const auto t = parse_data_table(text, cfg);
    const auto again = parse_data_table(write_data_table(t), cfg);
    CHECK(again == t);
}
