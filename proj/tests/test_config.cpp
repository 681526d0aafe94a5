#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "basket/config.hpp"
#include "basket/errors.hpp"

using namespace basket;
using nlohmann::json;

TEST_CASE("minimal config fills the published defaults") {
    const json doc = json::parse(R"({"methods": ["cbhm"], "scenario": {"indications": 6}})");
    const RunConfig rc = parse_config_json(doc);
    CHECK(rc.scenario.q0 == std::vector<double>(6, 0.2));
    CHECK(rc.scenario.q1 == std::vector<double>(6, 0.4));
    CHECK(rc.scenario.n1 == std::vector<int>(6, 14));
    CHECK(rc.scenario.n == std::vector<int>(6, 24));
    CHECK(rc.scenario.interim_cutoff == 0.05);
    CHECK(rc.scenario.mcmc.burn_in == 5000);
    CHECK(rc.scenario.mcmc.keep == 10000);
    CHECK(rc.scenario.truth == rc.scenario.q0);  // null scenario by default
    // echo carries the same values
    CHECK(rc.effective["design"]["n1"][0] == 14);
    CHECK(rc.effective["design"]["n"][5] == 24);
    CHECK(rc.effective["mcmc"]["burn_in"] == 5000);
    CHECK(rc.effective["mcmc"]["keep"] == 10000);
    CHECK(rc.effective["design"]["interim_cutoff"] == 0.05);
    // default CBHM recipe: B distance, exponential correlation, G(1,1) phi
    const auto& m = rc.effective["methods"][0];
    CHECK(m["measure"] == "b");
    CHECK(m["correlation"] == "exponential");
    CHECK(m["phi_prior"]["gamma"] == 1.0);
    CHECK(m["sigma2_prior"]["ig"][0] == 0.01);
}

TEST_CASE("rate ordering violations are ConfigErrors") {
    CHECK_THROWS_AS(parse_config_json(json::parse(R"({"scenario": {"q0": 0.4, "q1": 0.2}})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_json(json::parse(R"({"scenario": {"q0": 0.3, "q1": 0.3}})")),
                    ConfigError);
}

TEST_CASE("unknown keys are rejected with their path") {
    try {
        parse_config_json(json::parse(R"({"scenario": {"indication": 6}})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("scenario.indication") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_json(json::parse(R"({"designs": {}})")), ConfigError);
}

TEST_CASE("table-4 prior settings expand to the documented priors") {
    const json doc = json::parse(R"({"methods": [{"name": "cbhm", "prior_setting": 3}]})");
    const RunConfig rc = parse_config_json(doc);
    const auto& m = rc.effective["methods"][0];
    CHECK(m["sigma2_prior"]["ig"][0] == 0.001);
    CHECK(m["sigma2_prior"]["ig"][1] == 0.001);
    CHECK(m["tau2_prior"]["ig"][0] == 0.001);
    CHECK(m["phi_prior"]["gamma"] == 1.0);
}

TEST_CASE("kl measure defaults to the squared-exponential uniform-prior recipe") {
    const json doc = json::parse(R"({"methods": [{"name": "cbhm", "measure": "kl"}]})");
    const RunConfig rc = parse_config_json(doc);
    const CbhmParams& p = rc.scenario.methods[0].spec.cbhm;
    CHECK(p.corr == CorrelationKind::squared_exponential);
    CHECK(p.phi.kind == ScalarPrior::Kind::uniform);
    CHECK(p.phi.a == doctest::Approx(0.189));
    CHECK(p.phi.b == doctest::Approx(0.5));
    CHECK(p.sigma2.kind == ScalarPrior::Kind::uniform);
    CHECK(p.sigma2.a == 2.0);
    CHECK(p.sigma2.b == 3.0);
    CHECK(p.tau2.a == 2.0);
    CHECK(p.tau2.b == 4.0);
}

TEST_CASE("hellinger measure defaults the phi prior shape to 1.5") {
    const json doc = json::parse(R"({"methods": [{"name": "cbhm", "measure": "h"}]})");
    const RunConfig rc = parse_config_json(doc);
    CHECK(rc.scenario.methods[0].spec.cbhm.phi.a == 1.5);
}

TEST_CASE("final cutoffs resolve from numbers and maps") {
    const json doc = json::parse(R"({
        "methods": ["independent", "bhm"],
        "design": {"final_cutoff": {"independent": 0.91, "bhm": 0.93}}
    })");
    const RunConfig rc = parse_config_json(doc);
    CHECK(rc.scenario.methods[0].final_cutoff == 0.91);
    CHECK(rc.scenario.methods[1].final_cutoff == 0.93);
    CHECK_THROWS_AS(parse_config_json(json::parse(
                        R"({"methods": ["bhm"], "design": {"final_cutoff": {"nope": 0.9}}})")),
                    ConfigError);
}

TEST_CASE("liu methods compute the Simon thresholds automatically") {
    const json doc = json::parse(R"({"methods": ["liu"]})");
    const RunConfig rc = parse_config_json(doc);
    REQUIRE(rc.scenario.simon.has_value());
    CHECK(rc.scenario.simon->n1 == 14);
    CHECK(rc.scenario.simon->n == 24);
    CHECK(rc.effective["liu"]["simon"]["n1"] == 14);
}

TEST_CASE("echoed config reparses to the identical effective document") {
    const json doc = json::parse(R"({
        "scenario": {"indications": 4, "truth": [0.4, 0.2, 0.2, 0.2], "seed": 99},
        "methods": ["independent", {"name": "cbhm", "measure": "h"}, "liu"],
        "design": {"final_cutoff": 0.9},
        "output": {"prefix": "x"}
    })");
    const RunConfig first = parse_config_json(doc);
    const RunConfig second = parse_config_json(first.effective);
    CHECK(first.effective == second.effective);
    CHECK(first.scenario.truth == second.scenario.truth);
    CHECK(first.scenario.seed == second.scenario.seed);
}

TEST_CASE("duplicate method labels are rejected") {
    CHECK_THROWS_AS(parse_config_json(json::parse(R"({"methods": ["cbhm", "cbhm"]})")),
                    ConfigError);
}
