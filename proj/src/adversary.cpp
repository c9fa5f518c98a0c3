#include "cavc/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cavc/errors.hpp"
#include "cavc/rng.hpp"

namespace cavc {

namespace {

// Is `support` (global indices) contained in the family's index set?
bool contained(const std::vector<int>& family, const std::vector<int>& support) {
    const std::set<int> fam(family.begin(), family.end());
    for (int s : support)
        if (!fam.count(s)) return false;
    return true;
}

// Family-local weights of a globally-indexed distribution. Zero-weight
// entries may sit outside the family and are skipped.
Eigen::VectorXd localize(const std::vector<int>& family, const SimplexVector& p) {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(family.size()));
    for (int i = 0; i < p.dim(); ++i) {
        if (p.weights()(i) <= 0.0) continue;
        const int g = p.global_index(i);
        const auto it = std::find(family.begin(), family.end(), g);
        q(static_cast<Eigen::Index>(it - family.begin())) += p.weights()(i);
    }
    return q;
}

}  // namespace

AttackStrategy iid_attack(const CavcModel& model, const SimplexVector& p_s) {
    std::vector<int> support;
    for (int i = 0; i < p_s.dim(); ++i)
        if (p_s.weights()(i) > 0.0) support.push_back(p_s.global_index(i));
    const bool in1 = contained(model.family_one, support);
    const bool in2 = contained(model.family_two, support);
    if (!in1 && !in2)
        throw ModelError("iid_attack: support crosses both families");
    AttackStrategy a;
    a.kind = AttackStrategy::Kind::Iid;
    if (in1) a.q1 = localize(model.family_one, p_s);
    if (in2) a.q2 = localize(model.family_two, p_s);
    return a;
}

AttackStrategy iid_attack_pair(const Eigen::VectorXd& q1_local, const Eigen::VectorXd& q2_local) {
    for (const auto* q : {&q1_local, &q2_local}) {
        if (q->size() == 0) continue;
        if (q->minCoeff() < 0.0 || std::abs(q->sum() - 1.0) > kStochasticTol)
            throw ModelError("iid_attack_pair: weights are not a distribution");
    }
    AttackStrategy a;
    a.kind = AttackStrategy::Kind::Iid;
    a.q1 = q1_local;
    a.q2 = q2_local;
    return a;
}

AttackStrategy emulation_attack(const SeparationReport& separation) {
    AttackStrategy a;
    a.kind = AttackStrategy::Kind::Emulation;
    a.q1 = separation.witness_q1;
    a.q2 = separation.witness_q2;
    return a;
}

AttackStrategy cis_attack(const SymmetryWitness& witness, double tol) {
    if (witness.kind == SymmetryWitness::Kind::Trans)
        throw ModelError("cis_attack: witness is a trans witness");
    if (!witness.feasible(tol))
        throw ModelError("cis_attack: witness residual " + std::to_string(witness.residual) +
                         " exceeds tol");
    AttackStrategy a;
    a.kind = AttackStrategy::Kind::Cis;
    a.witness = witness;
    a.cis_family = witness.kind == SymmetryWitness::Kind::Cis1 ? 1 : 2;
    return a;
}

AttackStrategy trans_attack(const SymmetryWitness& witness, double tol) {
    if (witness.kind != SymmetryWitness::Kind::Trans)
        throw ModelError("trans_attack: witness is not a trans witness");
    if (!witness.feasible(tol))
        throw ModelError("trans_attack: witness residual " + std::to_string(witness.residual) +
                         " exceeds tol");
    AttackStrategy a;
    a.kind = AttackStrategy::Kind::Trans;
    a.witness = witness;
    return a;
}

std::vector<int> sample_attack_states(const AttackStrategy& attack, const CavcModel& model,
                                      const Codebook& cb, int active_family, int exclude_message,
                                      int length, std::uint64_t seed) {
    if (active_family != 1 && active_family != 2)
        throw ModelError("sample_attack_states: active family must be 1 or 2");
    const auto& fam = model.family(active_family);
    CounterRng rng(seed);
    std::vector<int> s(static_cast<std::size_t>(length));

    switch (attack.kind) {
        case AttackStrategy::Kind::Iid:
        case AttackStrategy::Kind::Emulation: {
            const Eigen::VectorXd& q = active_family == 1 ? attack.q1 : attack.q2;
            if (q.size() != static_cast<Eigen::Index>(fam.size()))
                throw ModelError("sample_attack_states: attack has no rule for this family");
            for (int i = 0; i < length; ++i)
                s[static_cast<std::size_t>(i)] = fam[static_cast<std::size_t>(rng.next_categorical(q))];
            return s;
        }
        case AttackStrategy::Kind::Cis:
        case AttackStrategy::Kind::Trans: {
            Eigen::MatrixXd rows;  // conditional rows over the active family
            if (attack.kind == AttackStrategy::Kind::Cis) {
                if (active_family != attack.cis_family)
                    throw ModelError("sample_attack_states: cis witness covers the other family");
                rows = attack.witness.u;
            } else {
                rows = active_family == 1 ? attack.witness.u : attack.witness.v;
            }
            if (length != cb.n)
                throw ModelError("sample_attack_states: codeword-directed attacks need length n");
            if (cb.num_messages < 1) throw ModelError("sample_attack_states: empty codebook");
            // spurious message, excluding the true one when M >= 2
            int spurious;
            if (cb.num_messages == 1) {
                spurious = 0;
            } else if (exclude_message < 0) {
                spurious = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cb.num_messages)));
            } else {
                spurious = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cb.num_messages - 1)));
                if (spurious >= exclude_message) ++spurious;
            }
            const auto& xw = cb.codewords[static_cast<std::size_t>(spurious)];
            for (int i = 0; i < length; ++i) {
                const int local = rng.next_categorical(rows.row(xw[static_cast<std::size_t>(i)]));
                s[static_cast<std::size_t>(i)] = fam[static_cast<std::size_t>(local)];
            }
            return s;
        }
        case AttackStrategy::Kind::WorstCase:
            throw ModelError("sample_attack_states: worst-case attack is an exact-mode evaluator");
    }
    throw ModelError("sample_attack_states: unknown attack kind");
}

std::vector<Verdict> decode_all_outputs(int num_outputs, int n, const DecoderFn& decoder) {
    const double space = std::pow(static_cast<double>(num_outputs), n);
    std::vector<Verdict> verdicts;
    verdicts.reserve(static_cast<std::size_t>(space));
    std::vector<int> y(static_cast<std::size_t>(n), 0);
    while (true) {
        verdicts.push_back(decoder(y));
        int pos = n - 1;
        while (pos >= 0) {
            if (++y[static_cast<std::size_t>(pos)] < num_outputs) break;
            y[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return verdicts;
}

namespace {

// Sum over all y of indicator(error) * prod_i rows[i](y_i), where rows gives
// a per-position output distribution. Verdicts are in lexicographic order.
double error_mass(const std::vector<Eigen::VectorXd>& rows, const std::vector<Verdict>& verdicts,
                  Task task, int true_message, int true_state, int num_outputs) {
    const int n = static_cast<int>(rows.size());
    double total = 0.0;
    std::vector<int> y(static_cast<std::size_t>(n), 0);
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 1.0);
    for (int i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i) + 1] =
        prefix[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(i)](0);
    std::size_t index = 0;
    while (true) {
        const double p = prefix[static_cast<std::size_t>(n)];
        if (p > 0.0 && is_error(verdicts[index], task, true_message, true_state)) total += p;
        // lexicographic advance with prefix-product maintenance
        int pos = n - 1;
        while (pos >= 0) {
            if (++y[static_cast<std::size_t>(pos)] < num_outputs) break;
            y[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        for (int i = pos; i < n; ++i)
            prefix[static_cast<std::size_t>(i) + 1] =
                prefix[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>(i)](y[static_cast<std::size_t>(i)]);
        index = 0;
        for (int i = 0; i < n; ++i) index = index * static_cast<std::size_t>(num_outputs) + static_cast<std::size_t>(y[static_cast<std::size_t>(i)]);
    }
    return total;
}

}  // namespace

AveragingAttackReport averaging_attack_error_bound(const CavcModel& model, const Codebook& cb,
                                                   const SymmetryWitness& witness, Task task,
                                                   const DecoderFn& decoder) {
    const int n = cb.n;
    const int ny = model.kernel.num_outputs();
    const int big_m = cb.num_messages;
    const double y_space = std::pow(static_cast<double>(ny), n);
    if (y_space > 1e7)
        throw BudgetError("averaging_attack_error_bound: |Y|^n exceeds the enumeration budget");

    const std::vector<Verdict> verdicts = decode_all_outputs(ny, n, decoder);

    // Effective per-position channel sending x_m while the witness row set T
    // attacks codeword x_sp: B(y) = sum_s T(s|x_sp_i) W(y|x_m_i, s).
    auto pair_rows = [&](const Eigen::MatrixXd& t_rows, int fam_k, int m, int sp) {
        const auto& fam = model.family(fam_k);
        std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(ny);
            const int xm = cb.codewords[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
            const int xs = cb.codewords[static_cast<std::size_t>(sp)][static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < fam.size(); ++j)
                row += t_rows(xs, static_cast<int>(j)) *
                       model.kernel.state_matrix(fam[j]).row(xm).transpose();
            rows[static_cast<std::size_t>(i)] = row;
        }
        return rows;
    };

    auto averaged_error = [&](const Eigen::MatrixXd& t_rows, int fam_k) {
        double total = 0.0;
        for (int m = 0; m < big_m; ++m) {
            if (big_m == 1) {
                total += error_mass(pair_rows(t_rows, fam_k, m, m), verdicts, task, m + 1, fam_k, ny);
                continue;
            }
            double inner = 0.0;
            for (int sp = 0; sp < big_m; ++sp) {
                if (sp == m) continue;
                inner += error_mass(pair_rows(t_rows, fam_k, m, sp), verdicts, task, m + 1, fam_k, ny);
            }
            total += inner / (big_m - 1);
        }
        return total / big_m;
    };

    AveragingAttackReport rep;
    rep.bound = (big_m - 1) / (2.0 * big_m);
    if (witness.kind == SymmetryWitness::Kind::Trans) {
        rep.error_family1 = averaged_error(witness.u, 1);
        rep.error_family2 = averaged_error(witness.v, 2);
        rep.max_error = std::max(rep.error_family1, rep.error_family2);
    } else {
        const int k = witness.kind == SymmetryWitness::Kind::Cis1 ? 1 : 2;
        const double err = averaged_error(witness.u, k);
        rep.error_family1 = k == 1 ? err : -1.0;
        rep.error_family2 = k == 2 ? err : -1.0;
        rep.max_error = err;
    }
    rep.bound_met = rep.max_error >= rep.bound - 1e-12;
    return rep;
}

WorstCaseReport exhaustive_worst_case(const CavcModel& model, const Codebook& cb,
                                      const DecoderFn& decoder, Task task, int family,
                                      std::uint64_t budget) {
    const int n = cb.n;
    const int ny = model.kernel.num_outputs();
    const auto& fam = model.family(family);
    const double terms = std::pow(static_cast<double>(fam.size()), n) *
                         std::pow(static_cast<double>(ny), n) * cb.num_messages;
    if (terms > static_cast<double>(budget))
        throw BudgetError("exhaustive_worst_case: enumeration exceeds the budget");

    const std::vector<Verdict> verdicts = decode_all_outputs(ny, n, decoder);

    WorstCaseReport best;
    best.error = -1.0;
    std::vector<int> s_local(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<int> s(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = fam[static_cast<std::size_t>(s_local[static_cast<std::size_t>(i)])];
        double err = 0.0;
        for (int m = 0; m < cb.num_messages; ++m) {
            std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                rows[static_cast<std::size_t>(i)] =
                    model.kernel.state_matrix(s[static_cast<std::size_t>(i)])
                        .row(cb.codewords[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)])
                        .transpose();
            err += error_mass(rows, verdicts, task, m + 1, family, ny);
        }
        err /= cb.num_messages;
        if (err > best.error + 1e-15) {  // strict improvement keeps the first maximizer
            best.error = err;
            best.states = s;
        }
        int pos = n - 1;
        while (pos >= 0) {
            if (++s_local[static_cast<std::size_t>(pos)] < static_cast<int>(fam.size())) break;
            s_local[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return best;
}

}  // namespace cavc
