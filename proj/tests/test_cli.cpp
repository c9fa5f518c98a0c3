#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kCli = CAVC_CLI_PATH;
const std::string kModels = CAVC_MODELS_DIR;
const std::string kSuites = CAVC_SUITES_DIR;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string out_file = "/tmp/cavc_cli_test_out.txt";
    const std::string cmd = env + " " + kCli + " " + args + " > " + out_file + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(raw);
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("analyze reports example 1 as trans-symmetrizable, exit 0") {
    const RunResult r = run("analyze " + kModels + "/example1.json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.stdout_text);
    CHECK(j["trans"]["feasible"] == true);
    CHECK(j["cis1"]["feasible"] == false);
    CHECK(j["cis2"]["feasible"] == false);
    CHECK(j["positive_deterministic_capacity"]["com"] == false);
    CHECK(j["config"]["command"] == "analyze");  // config echo
}

TEST_CASE("analyze rejects malformed kernels with exit 2 and coordinates") {
    const std::string bad = "/tmp/cavc_bad_model.json";
    {
        auto j = nlohmann::json::parse(slurp(kModels + "/adder_avc.json"));
        j["kernel"][0][0][0] = 0.9;
        std::ofstream out(bad);
        out << j.dump(2);
    }
    const RunResult r = run("analyze " + bad);
    CHECK(r.exit_code == 2);
}

TEST_CASE("analyze of an AVC reports a nonempty intersection") {
    const RunResult r = run("analyze " + kModels + "/bsc_avc.json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.stdout_text);
    CHECK(j["intersection_empty"] == false);
}

TEST_CASE("capacity subcommand closed forms and oracle bracket") {
    const RunResult com = run("capacity " + kModels + "/bsc_pair.json --task com --oracle");
    REQUIRE(com.exit_code == 0);
    const auto j = nlohmann::json::parse(com.stdout_text);
    const double value = std::stod(j["value"].get<std::string>());
    CHECK(std::abs(value - 0.27807) <= 1e-3);
    const double lo = std::stod(j["oracle_bracket"]["lower"].get<std::string>());
    const double hi = std::stod(j["oracle_bracket"]["upper"].get<std::string>());
    CHECK(lo <= value);
    CHECK(hi >= value);

    const RunResult inf = run("capacity " + kModels + "/bsc_disjoint.json --task or");
    REQUIRE(inf.exit_code == 0);
    CHECK(nlohmann::json::parse(inf.stdout_text)["value"] == "inf");

    const RunResult bad = run("capacity " + kModels + "/bsc_pair.json --task nonsense");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("simulate runs the bundled regression suite deterministically") {
    const std::string dir1 = "/tmp/cavc_sim_run1";
    const std::string dir2 = "/tmp/cavc_sim_run2";
    const RunResult r1 =
        run("simulate " + kSuites + "/regression.json --output-dir " + dir1, "CAVC_SEED=777");
    REQUIRE(r1.exit_code == 0);
    const RunResult r2 =
        run("simulate " + kSuites + "/regression.json --output-dir " + dir2, "CAVC_SEED=777");
    REQUIRE(r2.exit_code == 0);
    for (const char* base : {"adder_cis_exact", "disjoint_identify", "avc_com_mc"}) {
        const std::string csv1 = slurp(dir1 + "/" + std::string(base) + ".csv");
        const std::string csv2 = slurp(dir2 + "/" + std::string(base) + ".csv");
        REQUIRE(!csv1.empty());
        CHECK(csv1 == csv2);  // bit-identical under the same CAVC_SEED
        CHECK(csv1.rfind("scenario_id,task,n,M,rate,attack,estimate,ci_low,ci_high,exact,seed",
                         0) == 0);
        const std::string js1 = slurp(dir1 + "/" + std::string(base) + ".json");
        const std::string js2 = slurp(dir2 + "/" + std::string(base) + ".json");
        CHECK(js1 == js2);
        // config echo carries the resolved seed
        CHECK(nlohmann::json::parse(js1)["config"]["seed"] == 777);
    }
}

TEST_CASE("simulate rejects unknown tasks with exit 2 and partial failures with exit 4") {
    const std::string bad_task = "/tmp/cavc_suite_bad_task.json";
    {
        std::ofstream out(bad_task);
        out << R"({"scenarios": [{"name": "x", "model": ")" << kModels
            << R"(/noiseless.json", "task": "telepathy"}]})";
    }
    CHECK(run("simulate " + bad_task).exit_code == 2);

    const std::string partial = "/tmp/cavc_suite_partial.json";
    {
        std::ofstream out(partial);
        out << R"({"scenarios": [
            {"name": "works", "model": ")" << kModels << R"(/noiseless.json", "task": "com",
             "n": 4, "M": 2, "trials": 20, "seed": 5,
             "attack": {"kind": "iid_uniform"}, "decoder": {"kind": "mmi", "delta": 0.1}},
            {"name": "broken", "model": ")" << kModels << R"(/missing_model.json", "task": "com",
             "n": 4, "M": 2}
        ]})";
    }
    const RunResult r = run("simulate " + partial + " --output-dir /tmp/cavc_sim_partial");
    CHECK(r.exit_code == 4);
    CHECK(!slurp("/tmp/cavc_sim_partial/works.csv").empty());  // the good one completed
}

TEST_CASE("attack-demo reports the witness and the converse-level error") {
    const RunResult r = run("attack-demo " + kModels +
                            "/adder_avc.json --attack cis --task com --n 4 --M 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.stdout_text);
    CHECK(j["witness"]["feasible"] == true);
    CHECK(j["error"]["estimate"].get<double>() >= 0.25);
    CHECK(j["bound_reference"].get<double>() == 0.25);

    // infeasible witness reported, not crashed
    const RunResult r2 = run("attack-demo " + kModels +
                             "/bsc_disjoint.json --attack trans --task or --n 4 --M 2");
    REQUIRE(r2.exit_code == 0);
    CHECK(nlohmann::json::parse(r2.stdout_text)["witness"]["feasible"] == false);
}

TEST_CASE("verify passes clean and fails under fault injection with exit 5") {
    CHECK(run("verify --quick").exit_code == 0);
    CHECK(run("verify --quick --inject-lp-tol 0.01").exit_code == 5);
}

TEST_CASE("simulate handles n_list scenarios with one CSV row per blocklength") {
    const std::string suite = "/tmp/cavc_suite_trend.json";
    {
        std::ofstream out(suite);
        out << R"({"scenarios": [
            {"name": "trend", "model": ")" << kModels << R"(/bsc_avc.json", "task": "com",
             "n_list": [8, 12], "rate": 0.1, "trials": 30, "seed": 9,
             "attack": {"kind": "iid_uniform"}, "decoder": {"kind": "mmi", "delta": 0.05}}
        ]})";
    }
    const RunResult r = run("simulate " + suite + " --output-dir /tmp/cavc_sim_trend");
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp("/tmp/cavc_sim_trend/trend.csv");
    int lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 3);  // header plus one row per n
    const auto j = nlohmann::json::parse(slurp("/tmp/cavc_sim_trend/trend.json"));
    CHECK(j["results"].size() == 2);
    CHECK(j["results"][0]["n"] == 8);
    CHECK(j["results"][1]["n"] == 12);
}

TEST_CASE("attack-demo emulation and exhaustive branches") {
    const RunResult em = run("attack-demo " + kModels +
                             "/bsc_avc.json --attack emulate --task and --n 4 --M 2");
    REQUIRE(em.exit_code == 0);
    const auto je = nlohmann::json::parse(em.stdout_text);
    CHECK(je["witness"]["distance"].get<double>() <= 1e-9);
    // emulation defeats joint identification: per-state errors sum to one
    const auto per = je["error"]["per_state"];
    CHECK(per[0]["estimate"].get<double>() + per[1]["estimate"].get<double>() >= 1.0 - 1e-9);

    const RunResult ex = run("attack-demo " + kModels +
                             "/noiseless.json --attack exhaustive --task com --n 4 --M 2");
    REQUIRE(ex.exit_code == 0);
    CHECK(nlohmann::json::parse(ex.stdout_text)["error"]["estimate"].get<double>() ==
          doctest::Approx(0.0));

    // emulation on disjoint hulls is unavailable and says so
    const RunResult no = run("attack-demo " + kModels +
                             "/bsc_disjoint.json --attack emulate --task or --n 4 --M 2");
    REQUIRE(no.exit_code == 0);
    CHECK(nlohmann::json::parse(no.stdout_text).contains("note"));
}

namespace {

// FNV-1a over the canonical dump of the config echo, with the model path
// normalized to its basename so goldens hold across checkouts.
std::uint64_t config_checksum(const std::string& json_path) {
    auto j = nlohmann::json::parse(slurp(json_path));
    auto cfg = j["config"];
    const std::string model = cfg["model"].get<std::string>();
    cfg["model"] = model.substr(model.find_last_of('/') + 1);
    const std::string dump = cfg.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

TEST_CASE("regression suite config echoes match their golden checksums") {
    const std::string dir = "/tmp/cavc_golden_check";
    REQUIRE(run("simulate " + kSuites + "/regression.json --output-dir " + dir, "CAVC_SEED=777")
                .exit_code == 0);
    const std::pair<const char*, std::uint64_t> golden[] = {
        {"adder_cis_exact", 0xa65c0ab16e85e886ULL},
        {"disjoint_identify", 0xd720049844460859ULL},
        {"avc_com_mc", 0x710f5c692c8dd47cULL},
    };
    for (const auto& [base, expected] : golden) {
        const std::uint64_t actual = config_checksum(dir + "/" + base + ".json");
        INFO(base << " checksum 0x" << std::hex << actual);
        CHECK(actual == expected);
    }
}
