#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cavc/adversary.hpp"
#include "cavc/capacity.hpp"
#include "cavc/codec.hpp"
#include "cavc/errors.hpp"
#include "cavc/model_io.hpp"
#include "cavc/rng.hpp"
#include "cavc/simulation.hpp"
#include "cavc/symmetry.hpp"

namespace fs = std::filesystem;
using namespace cavc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPartial = 4;
constexpr int kExitVerify = 5;

std::optional<std::uint64_t> env_seed_override() {
    if (const char* v = std::getenv("CAVC_SEED")) return std::strtoull(v, nullptr, 10);
    return std::nullopt;
}

void emit(const Json& j, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(output_path);
        if (!out) throw ModelError("cannot write output file: " + output_path);
        out << j.dump(2) << "\n";
    }
}

Json json_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open file: " + path);
    try {
        Json j;
        in >> j;
        return j;
    } catch (const Json::exception& e) {
        throw ModelError("invalid JSON in " + path + ": " + e.what());
    }
}

Eigen::VectorXd vector_from_json(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json vector_to_json_array(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

// ---------------------------------------------------------------- analyze --

int cmd_analyze(const std::string& model_path, double tol, const std::string& output) {
    const CavcModel model = load_model(model_path);
    const ClassificationReport rep = classify(model, tol);
    Json j = classification_to_json(rep);
    Json config;
    config["command"] = "analyze";
    config["model"] = model_path;
    config["tol"] = tol;
    j["config"] = std::move(config);
    emit(j, output);
    return kExitOk;
}

// --------------------------------------------------------------- capacity --

int cmd_capacity(const std::string& model_path, const std::string& task_name, bool oracle,
                 double input_res, double mixture_res, const std::string& output) {
    const CavcModel model = load_model(model_path);
    const Task task = task_from_string(task_name);
    CapacityResult result;
    switch (task) {
        case Task::Com: result = capacity_com(model); break;
        case Task::And: result = capacity_and(model); break;
        case Task::Or: result = capacity_or(model); break;
        default: throw ModelError("capacity: task must be com, and or or");
    }
    GridBracket bracket;
    if (oracle) bracket = capacity_grid_oracle(model, task, input_res, mixture_res);
    Json j = capacity_to_json(result, task, oracle ? &bracket : nullptr);
    Json config;
    config["command"] = "capacity";
    config["model"] = model_path;
    config["task"] = task_name;
    config["oracle"] = oracle;
    if (oracle) {
        config["input_resolution"] = input_res;
        config["mixture_resolution"] = mixture_res;
    }
    j["config"] = std::move(config);
    emit(j, output);
    return kExitOk;
}

// --------------------------------------------------------------- simulate --

AttackStrategy attack_from_json(const CavcModel& model, Task task, const Json& spec,
                                const Eigen::VectorXd& composition) {
    const std::string kind = spec.value("kind", "iid_uniform");
    if (kind == "iid") {
        Eigen::VectorXd q1, q2;
        if (spec.contains("q1")) q1 = vector_from_json(spec.at("q1"));
        if (spec.contains("q2")) q2 = vector_from_json(spec.at("q2"));
        return iid_attack_pair(q1, q2);
    }
    if (kind == "iid_uniform") {
        return iid_attack_pair(
            Eigen::VectorXd::Constant(model.family_size(1), 1.0 / model.family_size(1)),
            Eigen::VectorXd::Constant(model.family_size(2), 1.0 / model.family_size(2)));
    }
    if (kind == "iid_worst") {
        if (task == Task::Identify) {
            // hardest identification attack: the closest pair of mixtures
            return emulation_attack(hull_separation(model, 1e-9));
        }
        // per family, the mutual-information-minimizing mixture
        const HullMin h1 = min_mi_over_hull(composition, model, 1);
        const HullMin h2 = min_mi_over_hull(composition, model, 2);
        return iid_attack_pair(h1.q, h2.q);
    }
    if (kind == "emulation") return emulation_attack(hull_separation(model, 1e-9));
    if (kind == "cis") {
        const int family = spec.value("family", 1);
        const SymmetryWitness w = check_cis(model, family, 1e-9);
        if (!w.feasible(1e-9))
            throw ModelError("attack: model is not cis-symmetrizable for family " +
                             std::to_string(family));
        return cis_attack(w, 1e-9);
    }
    if (kind == "trans") {
        const SymmetryWitness w = check_trans(model, 1e-9);
        if (!w.feasible(1e-9)) throw ModelError("attack: model is not trans-symmetrizable");
        return trans_attack(w, 1e-9);
    }
    if (kind == "worst_case") {
        AttackStrategy a;
        a.kind = AttackStrategy::Kind::WorstCase;
        return a;
    }
    throw ModelError("unknown attack kind: " + kind);
}

struct Scenario {
    std::string name;
    std::string model_path;
    ExperimentConfig cfg;
    std::vector<int> n_list;  // nonempty selects error_vs_n
    Json attack_echo;
    std::string output_base;
};

Scenario scenario_from_json(const Json& j, const fs::path& base_dir) {
    Scenario sc;
    sc.name = j.at("name").get<std::string>();
    sc.cfg.scenario_id = sc.name;
    const fs::path model_rel = j.at("model").get<std::string>();
    sc.model_path = (model_rel.is_absolute() ? model_rel : base_dir / model_rel).string();
    sc.cfg.task = task_from_string(j.at("task").get<std::string>());
    sc.cfg.n = j.value("n", 0);
    sc.cfg.num_messages = j.value("M", 0);
    sc.cfg.rate = j.value("rate", 0.0);
    if (j.contains("composition")) sc.cfg.composition = vector_from_json(j.at("composition"));
    if (j.contains("n_list")) sc.n_list = j.at("n_list").get<std::vector<int>>();
    sc.cfg.trials = j.value("trials", 1000);
    sc.cfg.master_seed = j.value("seed", 1ULL);
    sc.cfg.training_length = j.value("training_length", -1);
    sc.cfg.fresh_codebook = j.value("fresh_codebook", true);
    const std::string mode = j.value("mode", "monte_carlo");
    if (mode == "monte_carlo")
        sc.cfg.mode = EvalMode::MonteCarlo;
    else if (mode == "exact")
        sc.cfg.mode = EvalMode::Exact;
    else
        throw ModelError("scenario " + sc.name + ": unknown mode " + mode);

    const Json dec = j.value("decoder", Json::object());
    const std::string dkind = dec.value("kind", "mmi");
    if (dkind == "mmi")
        sc.cfg.decoder.kind = DecoderKind::Mmi;
    else if (dkind == "joint")
        sc.cfg.decoder.kind = DecoderKind::Joint;
    else if (dkind == "mmi_identify")
        sc.cfg.decoder.kind = DecoderKind::MmiIdentify;
    else
        throw ModelError("scenario " + sc.name + ": unknown decoder " + dkind);
    sc.cfg.decoder.delta = dec.value("delta", 0.01);
    sc.cfg.decoder.eta = dec.value("eta", 0.05);
    sc.cfg.decoder.eps = dec.value("eps", 0.07);
    sc.cfg.use_frame =
        j.value("use_frame", sc.cfg.decoder.kind == DecoderKind::MmiIdentify &&
                                 (sc.cfg.task == Task::And || sc.cfg.task == Task::Or));
    sc.attack_echo = j.value("attack", Json{{"kind", "iid_uniform"}});
    sc.output_base = j.value("output", sc.name);
    return sc;
}

Json config_echo(const Scenario& sc, const CavcModel& model) {
    Json e;
    e["name"] = sc.name;
    e["model"] = sc.model_path;
    e["task"] = to_string(sc.cfg.task);
    e["n"] = sc.cfg.n;
    if (!sc.n_list.empty()) e["n_list"] = sc.n_list;
    e["M"] = sc.cfg.num_messages;
    e["rate"] = sc.cfg.rate;
    const int nx = model.kernel.num_inputs();
    e["composition"] = vector_to_json_array(
        sc.cfg.composition.size() ? sc.cfg.composition : Eigen::VectorXd::Constant(nx, 1.0 / nx));
    e["attack"] = sc.attack_echo;
    Json dec;
    dec["kind"] = sc.cfg.decoder.kind == DecoderKind::Mmi         ? "mmi"
                  : sc.cfg.decoder.kind == DecoderKind::Joint     ? "joint"
                                                                  : "mmi_identify";
    dec["delta"] = sc.cfg.decoder.delta;
    dec["eta"] = sc.cfg.decoder.eta;
    dec["eps"] = sc.cfg.decoder.eps;
    e["decoder"] = std::move(dec);
    e["training_length"] = sc.cfg.training_length;
    e["use_frame"] = sc.cfg.use_frame;
    e["trials"] = sc.cfg.trials;
    e["seed"] = sc.cfg.master_seed;
    e["fresh_codebook"] = sc.cfg.fresh_codebook;
    e["mode"] = sc.cfg.mode == EvalMode::Exact ? "exact" : "monte_carlo";
    return e;
}

Json estimate_to_json(const ErrorEstimate& est) {
    Json j;
    j["estimate"] = est.estimate;
    j["ci_low"] = est.ci_low;
    j["ci_high"] = est.ci_high;
    j["exact"] = est.exact;
    Json per = Json::array();
    for (const auto& arm : est.per_state) {
        Json a;
        a["applicable"] = arm.applicable;
        a["estimate"] = arm.estimate;
        a["ci_low"] = arm.ci_low;
        a["ci_high"] = arm.ci_high;
        a["trials"] = arm.trials;
        per.push_back(std::move(a));
    }
    j["per_state"] = std::move(per);
    return j;
}

std::string csv_row(const std::string& scenario_id, Task task, int n, int m, double rate,
                    const std::string& attack, const ErrorEstimate& est, std::uint64_t seed) {
    std::ostringstream row;
    row << scenario_id << ',' << to_string(task) << ',' << n << ',' << m << ','
        << format_sig6(rate) << ',' << attack << ',' << format_sig6(est.estimate) << ','
        << format_sig6(est.ci_low) << ',' << format_sig6(est.ci_high) << ','
        << (est.exact ? 1 : 0) << ',' << seed;
    return row.str();
}

int cmd_simulate(const std::string& suite_path, const std::string& output_dir) {
    const Json suite = json_from_file(suite_path);
    if (!suite.contains("scenarios") || !suite.at("scenarios").is_array())
        throw ModelError("suite file needs a scenarios array");
    const fs::path base_dir = fs::path(suite_path).parent_path();
    const fs::path out_dir = output_dir.empty() ? fs::path(".") : fs::path(output_dir);
    fs::create_directories(out_dir);
    const auto seed_override = env_seed_override();

    // phase 1: parse every scenario; malformed suites are input errors
    std::vector<Scenario> scenarios;
    std::set<std::string> names;
    for (const Json& sj : suite.at("scenarios")) {
        Scenario sc = scenario_from_json(sj, base_dir);
        if (!names.insert(sc.name).second)
            throw ModelError("duplicate scenario name: " + sc.name);
        if (seed_override) sc.cfg.master_seed = *seed_override;
        scenarios.push_back(std::move(sc));
    }

    // phase 2: run; one failing scenario does not stop the rest
    int failures = 0;
    for (Scenario& sc : scenarios) {
        const std::string name = sc.name;
        try {
            const CavcModel model = load_model(sc.model_path);
            const Eigen::VectorXd comp2 =
                sc.cfg.composition.size()
                    ? sc.cfg.composition
                    : Eigen::VectorXd::Constant(model.kernel.num_inputs(),
                                                1.0 / model.kernel.num_inputs());
            sc.cfg.attack = attack_from_json(model, sc.cfg.task, sc.attack_echo, comp2);

            const std::string attack_kind = sc.attack_echo.value("kind", "iid_uniform");
            std::ostringstream csv;
            csv << "scenario_id,task,n,M,rate,attack,estimate,ci_low,ci_high,exact,seed\n";
            Json results = Json::array();
            if (!sc.n_list.empty()) {
                const auto rows = error_vs_n(model, sc.cfg, sc.n_list);
                for (const auto& row : rows) {
                    csv << csv_row(sc.name, sc.cfg.task, row.n, row.num_messages, row.rate,
                                   attack_kind, row.estimate, sc.cfg.master_seed)
                        << "\n";
                    Json r = estimate_to_json(row.estimate);
                    r["n"] = row.n;
                    r["M"] = row.num_messages;
                    r["rate"] = row.rate;
                    results.push_back(std::move(r));
                }
            } else {
                const ErrorEstimate est = run_trials(model, sc.cfg);
                const int m = sc.cfg.task == Task::Identify ? 0 : derive_num_messages(sc.cfg);
                const double rate = sc.cfg.n > 0 && m > 0 ? std::log2(double(m)) / sc.cfg.n : 0.0;
                csv << csv_row(sc.name, sc.cfg.task, sc.cfg.n, m, rate, attack_kind, est,
                               sc.cfg.master_seed)
                    << "\n";
                Json r = estimate_to_json(est);
                r["n"] = sc.cfg.n;
                r["M"] = m;
                r["rate"] = rate;
                results.push_back(std::move(r));
            }

            Json mirror;
            mirror["config"] = config_echo(sc, model);
            mirror["results"] = std::move(results);
            std::ofstream csv_out(out_dir / (sc.output_base + ".csv"));
            csv_out << csv.str();
            std::ofstream json_out(out_dir / (sc.output_base + ".json"));
            json_out << mirror.dump(2) << "\n";
            std::cout << "scenario " << sc.name << ": done\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cerr << "scenario " << name << ": FAILED: " << e.what() << "\n";
        }
    }
    if (failures > 0) {
        std::cerr << failures << " scenario(s) failed\n";
        return kExitPartial;
    }
    return kExitOk;
}

// ------------------------------------------------------------ attack demo --

int cmd_attack_demo(const std::string& model_path, const std::string& attack_name,
                    const std::string& task_name, int n, int m_count, std::uint64_t seed,
                    double eta, const std::string& output) {
    const CavcModel model = load_model(model_path);
    const Task task = task_from_string(task_name);
    if (const auto o = env_seed_override()) seed = *o;

    Json j;
    Json config;
    config["command"] = "attack-demo";
    config["model"] = model_path;
    config["attack"] = attack_name;
    config["task"] = task_name;
    config["n"] = n;
    config["M"] = m_count;
    config["seed"] = seed;
    config["eta"] = eta;
    j["config"] = std::move(config);

    ExperimentConfig cfg;
    cfg.task = task;
    cfg.n = n;
    cfg.num_messages = m_count;
    cfg.master_seed = seed;
    cfg.decoder.kind = DecoderKind::Joint;
    cfg.decoder.eta = eta;
    cfg.mode = EvalMode::Exact;

    Json witness;
    if (attack_name == "cis") {
        SymmetryWitness w1 = check_cis(model, 1, 1e-9);
        SymmetryWitness w2 = check_cis(model, 2, 1e-9);
        const SymmetryWitness& w = w1.residual <= w2.residual ? w1 : w2;
        witness["kind"] = w.kind == SymmetryWitness::Kind::Cis1 ? "cis-1" : "cis-2";
        witness["residual"] = w.residual;
        witness["feasible"] = w.feasible(1e-9);
        if (!w.feasible(1e-9)) {
            j["witness"] = std::move(witness);
            j["note"] = "model is not cis-symmetrizable; no attack run";
            emit(j, output);
            return kExitOk;
        }
        cfg.attack = cis_attack(w, 1e-9);
    } else if (attack_name == "trans") {
        const SymmetryWitness w = check_trans(model, 1e-9);
        witness["kind"] = "trans";
        witness["residual"] = w.residual;
        witness["feasible"] = w.feasible(1e-9);
        if (!w.feasible(1e-9)) {
            j["witness"] = std::move(witness);
            j["note"] = "model is not trans-symmetrizable; no attack run";
            emit(j, output);
            return kExitOk;
        }
        cfg.attack = trans_attack(w, 1e-9);
    } else if (attack_name == "emulate") {
        const SeparationReport sep = hull_separation(model, 1e-9);
        witness["kind"] = "emulation";
        witness["distance"] = sep.distance;
        witness["q1"] = vector_to_json_array(sep.witness_q1);
        witness["q2"] = vector_to_json_array(sep.witness_q2);
        if (sep.intersection_empty()) {
            j["witness"] = std::move(witness);
            j["note"] = "hulls are disjoint; emulation attack unavailable";
            emit(j, output);
            return kExitOk;
        }
        cfg.attack = emulation_attack(sep);
    } else if (attack_name == "exhaustive") {
        witness["kind"] = "exhaustive_worst_case";
        cfg.attack.kind = AttackStrategy::Kind::WorstCase;
    } else {
        throw ModelError("unknown attack: " + attack_name);
    }
    j["witness"] = std::move(witness);

    const ErrorEstimate est = exact_error(model, cfg);
    j["error"] = estimate_to_json(est);
    j["bound_reference"] = (m_count - 1) / (2.0 * m_count);
    emit(j, output);
    return kExitOk;
}

// ----------------------------------------------------------------- verify --

int cmd_verify(bool quick, double inject_lp_tol) {
    bool all_pass = true;
    auto report = [&](const std::string& battery, bool pass, const std::string& detail) {
        std::cout << "[" << (pass ? "PASS" : "FAIL") << "] " << battery
                  << (detail.empty() ? "" : ": " + detail) << "\n";
        all_pass = all_pass && pass;
    };

    // battery A: LP optimum never exceeds the exhaustive grid optimum
    {
        const int count = quick ? 6 : 20;
        const double res = quick ? 0.1 : 0.05;
        int band_disagreements = 0;
        bool pass = true;
        double worst_gap = 0.0;
        for (int rep = 0; rep < count; ++rep) {
            CounterRng mk(derive_seed(0xA11CE, rep));
            std::vector<Eigen::MatrixXd> mats;
            for (int s = 0; s < 4; ++s) {
                Eigen::MatrixXd w(2, 2);
                for (int x = 0; x < 2; ++x) {
                    const double a = mk.next_double();
                    w(x, 0) = a;
                    w(x, 1) = 1.0 - a;
                }
                mats.push_back(std::move(w));
            }
            ChannelKernel kernel(make_alphabet(2), make_alphabet(4), make_alphabet(2),
                                 std::move(mats));
            const CavcModel m = make_model(std::move(kernel), {0, 1}, {2, 3});
            for (auto kind :
                 {SymmetryWitness::Kind::Cis1, SymmetryWitness::Kind::Cis2,
                  SymmetryWitness::Kind::Trans}) {
                const double lp = (kind == SymmetryWitness::Kind::Trans
                                       ? check_trans(m, 1e-9)
                                       : check_cis(m, kind == SymmetryWitness::Kind::Cis1 ? 1 : 2,
                                                   1e-9))
                                      .residual +
                                  inject_lp_tol;
                const double grid = grid_oracle_symmetrizable(m, kind, res);
                worst_gap = std::max(worst_gap, lp - grid);
                if (lp > grid + 1e-9) pass = false;
                const bool lp_feasible = lp <= 1e-9;
                const bool grid_feasible = grid <= 1e-9;
                if (lp_feasible != grid_feasible) ++band_disagreements;
            }
        }
        report("grid-vs-lp", pass,
               "worst lp-minus-grid " + format_sig6(worst_gap) + ", threshold-band disagreements " +
                   std::to_string(band_disagreements) + " (reported, not failed)");
    }

    // battery B: exact enumeration matches Monte Carlo
    {
        bool pass = true;
        std::string detail;
        const int trials = quick ? 300 : 1500;
        for (int rep = 0; rep < (quick ? 3 : 10); ++rep) {
            CavcModel m = rep % 2 == 0 ? CavcModel{ChannelKernel(make_alphabet(2), make_alphabet(2),
                                                                 make_alphabet(2),
                                                                 {Eigen::MatrixXd{{0.9, 0.1}, {0.1, 0.9}},
                                                                  Eigen::MatrixXd{{0.7, 0.3}, {0.3, 0.7}}}),
                                                   {0, 1},
                                                   {0, 1}}
                                        : CavcModel{ChannelKernel(make_alphabet(2), make_alphabet(2),
                                                                  make_alphabet(2),
                                                                  {Eigen::MatrixXd{{0.8, 0.2}, {0.2, 0.8}},
                                                                   Eigen::MatrixXd{{0.6, 0.4}, {0.4, 0.6}}}),
                                                    {0, 1},
                                                    {0, 1}};
            ExperimentConfig cfg;
            cfg.task = Task::Com;
            cfg.n = 6;
            cfg.num_messages = 2;
            cfg.trials = trials;
            cfg.master_seed = derive_seed(0xB0B, rep);
            cfg.fresh_codebook = false;
            cfg.decoder.kind = DecoderKind::Mmi;
            cfg.decoder.delta = 0.05;
            const double qa = 0.3 + 0.04 * rep;
            cfg.attack = iid_attack_pair(Eigen::Vector2d(qa, 1.0 - qa),
                                         Eigen::Vector2d(qa, 1.0 - qa));
            cfg.mode = EvalMode::Exact;
            const ErrorEstimate exact = exact_error(m, cfg);
            cfg.mode = EvalMode::MonteCarlo;
            const ErrorEstimate mc = run_trials(m, cfg);
            const double e = exact.per_state[0].estimate;
            const double p = mc.per_state[0].estimate;
            const double sigma = std::sqrt(std::max(e * (1 - e), 1e-4) / trials);
            if (std::abs(p - e) > 3.5 * sigma) {
                pass = false;
                detail = "exact " + format_sig6(e) + " vs mc " + format_sig6(p);
            }
        }
        report("exact-vs-monte-carlo", pass, detail);
    }

    // battery C: exact-types and convex-relaxation explanation searches agree
    {
        bool pass = true;
        std::string detail;
        const int count = quick ? 10 : 50;
        for (int rep = 0; rep < count; ++rep) {
            CounterRng mk(derive_seed(0xCAFE, rep));
            std::vector<Eigen::MatrixXd> mats;
            for (int s = 0; s < 2; ++s) {
                Eigen::MatrixXd w(2, 2);
                for (int x = 0; x < 2; ++x) {
                    const double a = 0.1 + 0.8 * mk.next_double();
                    w(x, 0) = a;
                    w(x, 1) = 1.0 - a;
                }
                mats.push_back(std::move(w));
            }
            ChannelKernel kernel(make_alphabet(2), make_alphabet(2), make_alphabet(2),
                                 std::move(mats));
            const CavcModel m = make_model(std::move(kernel), {0, 1}, {0, 1});
            const int n = 12;
            std::vector<int> x(n), s(n);
            CounterRng seq(derive_seed(0xDEAF, rep));
            for (int i = 0; i < n; ++i) {
                x[static_cast<std::size_t>(i)] = static_cast<int>(seq.next_below(2));
                s[static_cast<std::size_t>(i)] = static_cast<int>(seq.next_below(2));
            }
            const std::vector<int> y = channel_sample(m.kernel, x, s, derive_seed(0xFEED, rep));
            ExplanationOptions exact_opts;
            exact_opts.mode = ExplanationMode::ExactTypes;
            ExplanationOptions relax_opts;
            relax_opts.mode = ExplanationMode::ConvexRelaxation;
            const Explanation ee = state_explanation_search(x, y, m, 1, exact_opts);
            const Explanation er = state_explanation_search(x, y, m, 1, relax_opts);
            const double slack = 2.0 * 2 * 2 * 2 / static_cast<double>(n);
            if (er.relaxed_divergence > ee.divergence.value() + 1e-6 ||
                er.divergence.value() > ee.divergence.value() + slack) {
                pass = false;
                detail = "instance " + std::to_string(rep);
            }
        }
        report("dual-mode-explanation", pass, detail);
    }

    std::cout << (all_pass ? "verification passed" : "verification FAILED") << "\n";
    return all_pass ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compound arbitrarily varying channel toolkit"};
    app.require_subcommand(1);

    std::string model_path, output, task_name = "com", suite_path, attack_name, output_dir;
    double tol = 1e-9, eta = 0.05;
    bool oracle = false, quick = false;
    double input_res = 0.02, mixture_res = 0.02, inject_lp_tol = 0.0;
    int n = 4, m_count = 2;
    std::uint64_t seed = 1;

    auto* analyze = app.add_subcommand("analyze", "classify symmetrizability and hull separation");
    analyze->add_option("model", model_path)->required();
    analyze->add_option("--tol", tol);
    analyze->add_option("--output", output);

    auto* capacity = app.add_subcommand("capacity", "compute task capacities");
    capacity->add_option("model", model_path)->required();
    capacity->add_option("--task", task_name)->required();
    capacity->add_flag("--oracle", oracle, "append the grid-oracle bracket");
    capacity->add_option("--input-res", input_res);
    capacity->add_option("--mixture-res", mixture_res);
    capacity->add_option("--output", output);

    auto* simulate = app.add_subcommand("simulate", "run a scenario suite");
    simulate->add_option("suite", suite_path)->required();
    simulate->add_option("--output-dir", output_dir);

    auto* demo = app.add_subcommand("attack-demo", "run one attack and report the exact error");
    demo->add_option("model", model_path)->required();
    demo->add_option("--attack", attack_name)->required();
    demo->add_option("--task", task_name)->required();
    demo->add_option("--n", n);
    demo->add_option("--M", m_count);
    demo->add_option("--seed", seed);
    demo->add_option("--eta", eta);
    demo->add_option("--output", output);

    auto* verify = app.add_subcommand("verify", "cross-check oracle batteries");
    verify->add_flag("--quick", quick, "reduced budgets");
    verify->add_option("--inject-lp-tol", inject_lp_tol)->group("");  // fault-injection hook

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(model_path, tol, output);
        if (capacity->parsed())
            return cmd_capacity(model_path, task_name, oracle, input_res, mixture_res, output);
        if (simulate->parsed()) return cmd_simulate(suite_path, output_dir);
        if (demo->parsed())
            return cmd_attack_demo(model_path, attack_name, task_name, n, m_count, seed, eta, output);
        if (verify->parsed()) return cmd_verify(quick, inject_lp_tol);
    } catch (const ModelError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
