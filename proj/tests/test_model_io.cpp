#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cavc/capacity.hpp"
#include "cavc/errors.hpp"
#include "cavc/model_io.hpp"
#include "test_util.hpp"

using namespace cavc;

namespace {
const std::string kModels = CAVC_MODELS_DIR;
}

TEST_CASE("bundled models load and validate") {
    for (const char* name :
         {"example1.json", "adder_avc.json", "bsc_pair.json", "bsc_overlap.json",
          "bsc_disjoint.json", "bsc_avc.json", "cis_disjoint_outputs.json", "noiseless.json",
          "random_a.json", "random_b.json"}) {
        const CavcModel m = load_model(kModels + "/" + name);
        CHECK(m.kernel.num_inputs() >= 2);
        CHECK(!m.family_one.empty());
        CHECK(!m.family_two.empty());
    }
}

TEST_CASE("model serialization round-trips bit-faithfully on decimal text") {
    const CavcModel m = testutil::bsc_family_model({0.1, 0.3}, {0.2, 0.4});
    const Json once = model_to_json(m);
    const CavcModel parsed = model_from_json(once);
    const Json twice = model_to_json(parsed);
    CHECK(once.dump() == twice.dump());
    // decimal text like 0.1 survives the double round-trip
    CHECK(once.dump().find("0.1") != std::string::npos);
    for (int s = 0; s < m.kernel.num_states(); ++s)
        CHECK(m.kernel.state_matrix(s) == parsed.kernel.state_matrix(s));
}

TEST_CASE("family tags parse and reemit") {
    const Json j = Json::parse(R"({
        "input_alphabet": ["a", "b"],
        "output_alphabet": 2,
        "states": [{"label": "calm", "family": "both"}, {"label": "angry", "family": 2}],
        "kernel": [[[1.0, 0.0], [0.5, 0.5]], [[0.0, 1.0], [0.5, 0.5]]]
    })");
    const CavcModel m = model_from_json(j);
    CHECK(m.family_one == std::vector<int>{0});
    CHECK(m.family_two == std::vector<int>{0, 1});
    const Json out = model_to_json(m);
    CHECK(out["states"][0]["family"] == "both");
    CHECK(out["states"][1]["family"] == 2);
    CHECK(out["input_alphabet"][1] == "b");
}

TEST_CASE("malformed models are rejected with coordinates") {
    Json j = model_to_json(testutil::adder_model());
    j["kernel"][0][0][0] = 0.9;  // row sums to 0.9
    CHECK_THROWS_WITH_AS(model_from_json(j), doctest::Contains("row 0"), ModelError);

    Json empty_family = model_to_json(testutil::bsc_family_model({0.1}, {0.2}));
    empty_family["states"][1]["family"] = 1;  // family two becomes empty
    CHECK_THROWS_AS(model_from_json(empty_family), ModelError);

    CHECK_THROWS_AS(load_model(kModels + "/does_not_exist.json"), ModelError);
}

TEST_CASE("codebook serialization round-trips") {
    const Codebook cb = generate_codebook(Eigen::Vector2d(0.5, 0.5), 6, 3, 99);
    const Json j = codebook_to_json(cb);
    const Codebook back = codebook_from_json(j);
    CHECK(back.codewords == cb.codewords);
    CHECK(back.n == cb.n);
    CHECK(back.num_messages == cb.num_messages);
    CHECK(back.seed == cb.seed);
}

TEST_CASE("report serializers carry the contract fields") {
    const CavcModel m = testutil::example1_model();
    const Json c = classification_to_json(classify(m));
    CHECK(c["trans"]["feasible"] == true);
    CHECK(c["cis1"]["feasible"] == false);
    CHECK(c["positive_deterministic_capacity"]["or"] == false);

    const CapacityResult inf_result = capacity_or(testutil::bsc_family_model({0.05, 0.1}, {0.3, 0.4}));
    const Json cap = capacity_to_json(inf_result, Task::Or, nullptr);
    CHECK(cap["value"] == "inf");

    CHECK(format_sig6(0.2780719051) == "0.278072");
}
