#include "cavc/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "cavc/errors.hpp"

namespace cavc {

namespace {

Alphabet alphabet_from_json(const Json& j, const std::string& field) {
    if (j.is_number_integer()) return make_alphabet(j.get<int>());
    if (j.is_array()) {
        std::vector<std::string> labels;
        for (const auto& it : j) labels.push_back(it.get<std::string>());
        return make_alphabet(std::move(labels));
    }
    throw ModelError(field + ": expected an integer size or a label array");
}

Json alphabet_to_json(const Alphabet& a) {
    if (a.labels.empty()) return Json(a.size);
    return Json(a.labels);
}

}  // namespace

CavcModel model_from_json(const Json& j) {
    try {
        const Alphabet input = alphabet_from_json(j.at("input_alphabet"), "input_alphabet");
        const Alphabet output = alphabet_from_json(j.at("output_alphabet"), "output_alphabet");

        const Json& states = j.at("states");
        if (!states.is_array() || states.empty()) throw ModelError("states: expected a nonempty array");
        std::vector<std::string> state_labels;
        std::vector<int> family_one, family_two;
        int idx = 0;
        for (const auto& st : states) {
            state_labels.push_back(st.contains("label") ? st.at("label").get<std::string>()
                                                        : "s" + std::to_string(idx));
            const Json& fam = st.at("family");
            if (fam.is_string() && fam.get<std::string>() == "both") {
                family_one.push_back(idx);
                family_two.push_back(idx);
            } else if (fam.is_number_integer() && (fam.get<int>() == 1 || fam.get<int>() == 2)) {
                (fam.get<int>() == 1 ? family_one : family_two).push_back(idx);
            } else {
                throw ModelError("states[" + std::to_string(idx) + "].family: expected 1, 2 or \"both\"");
            }
            ++idx;
        }
        const Alphabet state = make_alphabet(std::move(state_labels));

        const Json& kernel = j.at("kernel");
        if (!kernel.is_array() || static_cast<int>(kernel.size()) != input.size)
            throw ModelError("kernel: expected one row block per input symbol");
        std::vector<Eigen::MatrixXd> per_state(static_cast<std::size_t>(state.size),
                                               Eigen::MatrixXd::Zero(input.size, output.size));
        for (int x = 0; x < input.size; ++x) {
            const Json& by_state = kernel.at(static_cast<std::size_t>(x));
            if (!by_state.is_array() || static_cast<int>(by_state.size()) != state.size)
                throw ModelError("kernel[" + std::to_string(x) + "]: expected one row per state");
            for (int s = 0; s < state.size; ++s) {
                const Json& row = by_state.at(static_cast<std::size_t>(s));
                if (!row.is_array() || static_cast<int>(row.size()) != output.size)
                    throw ModelError("kernel[" + std::to_string(x) + "][" + std::to_string(s) +
                                     "]: expected " + std::to_string(output.size) + " outputs");
                for (int y = 0; y < output.size; ++y)
                    per_state[static_cast<std::size_t>(s)](x, y) = row.at(static_cast<std::size_t>(y)).get<double>();
            }
        }
        ChannelKernel ck(input, state, output, std::move(per_state));
        return make_model(std::move(ck), std::move(family_one), std::move(family_two));
    } catch (const Json::exception& e) {
        throw ModelError(std::string("model parse error: ") + e.what());
    }
}

Json model_to_json(const CavcModel& model) {
    const ChannelKernel& k = model.kernel;
    Json j;
    j["input_alphabet"] = alphabet_to_json(k.input_alphabet());
    j["output_alphabet"] = alphabet_to_json(k.output_alphabet());
    Json states = Json::array();
    for (int s = 0; s < k.num_states(); ++s) {
        const bool in1 = std::find(model.family_one.begin(), model.family_one.end(), s) !=
                         model.family_one.end();
        const bool in2 = std::find(model.family_two.begin(), model.family_two.end(), s) !=
                         model.family_two.end();
        Json st;
        st["label"] = k.state_alphabet().labels.empty() ? "s" + std::to_string(s)
                                                        : k.state_alphabet().labels[static_cast<std::size_t>(s)];
        if (in1 && in2)
            st["family"] = "both";
        else
            st["family"] = in1 ? 1 : 2;
        states.push_back(std::move(st));
    }
    j["states"] = std::move(states);
    Json kernel = Json::array();
    for (int x = 0; x < k.num_inputs(); ++x) {
        Json by_state = Json::array();
        for (int s = 0; s < k.num_states(); ++s) {
            Json row = Json::array();
            for (int y = 0; y < k.num_outputs(); ++y) row.push_back(k.prob(x, s, y));
            by_state.push_back(std::move(row));
        }
        kernel.push_back(std::move(by_state));
    }
    j["kernel"] = std::move(kernel);
    return j;
}

CavcModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw ModelError("invalid JSON in " + path + ": " + e.what());
    }
    return model_from_json(j);
}

void save_model(const CavcModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << "\n";
}

Json codebook_to_json(const Codebook& cb) {
    Json j;
    j["n"] = cb.n;
    j["M"] = cb.num_messages;
    Json comp = Json::array();
    for (int i = 0; i < cb.composition.size(); ++i) comp.push_back(cb.composition(i));
    j["composition"] = std::move(comp);
    j["codewords"] = cb.codewords;
    j["seed"] = cb.seed;
    if (cb.has_duplicates) j["warning"] = "duplicate codewords";
    return j;
}

Codebook codebook_from_json(const Json& j) {
    try {
        Codebook cb;
        cb.n = j.at("n").get<int>();
        cb.num_messages = j.at("M").get<int>();
        const auto comp = j.at("composition").get<std::vector<double>>();
        cb.composition = Eigen::Map<const Eigen::VectorXd>(comp.data(),
                                                           static_cast<Eigen::Index>(comp.size()));
        cb.codewords = j.at("codewords").get<std::vector<std::vector<int>>>();
        cb.seed = j.at("seed").get<std::uint64_t>();
        if (static_cast<int>(cb.codewords.size()) != cb.num_messages)
            throw ModelError("codebook: codeword count does not match M");
        for (const auto& w : cb.codewords)
            if (static_cast<int>(w.size()) != cb.n) throw ModelError("codebook: codeword length mismatch");
        std::set<std::vector<int>> distinct(cb.codewords.begin(), cb.codewords.end());
        cb.has_duplicates = static_cast<int>(distinct.size()) != cb.num_messages;
        return cb;
    } catch (const Json::exception& e) {
        throw ModelError(std::string("codebook parse error: ") + e.what());
    }
}

std::string format_sig6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Eigen::VectorXd& v) {
    Json row = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
    return row;
}

Json witness_to_json(const SymmetryWitness& w, double tol) {
    Json j;
    j["feasible"] = w.feasible(tol);
    j["residual"] = w.residual;
    j["u"] = matrix_to_json(w.u);
    if (w.kind == SymmetryWitness::Kind::Trans) j["v"] = matrix_to_json(w.v);
    return j;
}

}  // namespace

Json classification_to_json(const ClassificationReport& rep) {
    Json j;
    j["tol"] = rep.tol;
    j["cis1"] = witness_to_json(rep.cis1, rep.tol);
    j["cis2"] = witness_to_json(rep.cis2, rep.tol);
    j["trans"] = witness_to_json(rep.trans, rep.tol);
    j["any_symmetrizable"] = rep.any_symmetrizable;
    j["intersection_empty"] = rep.intersection_empty;
    Json sep;
    sep["distance"] = rep.separation.distance;
    sep["eta"] = rep.separation.eta;
    sep["q1"] = vector_to_json(rep.separation.witness_q1);
    sep["q2"] = vector_to_json(rep.separation.witness_q2);
    j["separation"] = std::move(sep);
    Json pos;
    pos["com"] = rep.com_positive;
    pos["and"] = rep.and_positive;
    pos["or"] = rep.or_positive;
    j["positive_deterministic_capacity"] = std::move(pos);
    return j;
}

Json capacity_to_json(const CapacityResult& result, Task task, const GridBracket* bracket) {
    Json j;
    j["task"] = to_string(task);
    if (result.value.is_infinite())
        j["value"] = "inf";
    else
        j["value"] = format_sig6(result.value.value());
    if (result.optimal_input.size() > 0) j["optimal_input"] = vector_to_json(result.optimal_input);
    Json worst;
    if (result.worst_q1.size() > 0) worst["q1"] = vector_to_json(result.worst_q1);
    if (result.worst_q2.size() > 0) worst["q2"] = vector_to_json(result.worst_q2);
    j["worst_mixtures"] = std::move(worst);
    Json trace;
    trace["outer_iterations"] = result.trace.outer_iterations;
    trace["final_gap"] = result.trace.final_gap;
    trace["grid_best"] = result.trace.grid_best;
    trace["grid_certified"] = result.trace.grid_certified;
    j["solver_trace"] = std::move(trace);
    if (bracket) {
        Json b;
        b["lower"] = bracket->lower.is_infinite() ? Json("inf") : Json(format_sig6(bracket->lower.value()));
        b["upper"] = bracket->upper.is_infinite() ? Json("inf") : Json(format_sig6(bracket->upper.value()));
        b["grid_value"] =
            bracket->grid_value.is_infinite() ? Json("inf") : Json(format_sig6(bracket->grid_value.value()));
        j["oracle_bracket"] = std::move(b);
    }
    return j;
}

}  // namespace cavc
