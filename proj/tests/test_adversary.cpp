#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cavc/adversary.hpp"
#include "cavc/errors.hpp"
#include "cavc/rng.hpp"
#include "cavc/simulation.hpp"
#include "test_util.hpp"

using namespace cavc;

namespace {

Codebook two_word_codebook(std::vector<int> a, std::vector<int> b) {
    Codebook cb;
    cb.n = static_cast<int>(a.size());
    cb.num_messages = 2;
    Eigen::VectorXd comp = Eigen::VectorXd::Zero(2);
    for (int s : a) comp(s) += 1.0 / cb.n;
    cb.composition = comp;
    cb.codewords = {std::move(a), std::move(b)};
    cb.has_duplicates = cb.codewords[0] == cb.codewords[1];
    return cb;
}

// P(y | send `sent`, per-symbol attack rows T applied to `attacked`) for all
// y in lexicographic order, exact product distribution.
Eigen::VectorXd directed_attack_output_law(const CavcModel& m, int family,
                                           const Eigen::MatrixXd& t_rows,
                                           const std::vector<int>& sent,
                                           const std::vector<int>& attacked) {
    const int ny = m.kernel.num_outputs();
    const int n = static_cast<int>(sent.size());
    const auto& fam = m.family(family);
    Eigen::VectorXd law = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(std::pow(ny, n)));
    std::vector<int> y(static_cast<std::size_t>(n), 0);
    for (Eigen::Index flat = 0; flat < law.size(); ++flat) {
        double p = 1.0;
        Eigen::Index rem = flat;
        for (int i = n - 1; i >= 0; --i) {
            y[static_cast<std::size_t>(i)] = static_cast<int>(rem % ny);
            rem /= ny;
        }
        for (int i = 0; i < n; ++i) {
            double cell = 0.0;
            for (std::size_t j = 0; j < fam.size(); ++j)
                cell += t_rows(attacked[static_cast<std::size_t>(i)], static_cast<int>(j)) *
                        m.kernel.prob(sent[static_cast<std::size_t>(i)], fam[j],
                                      y[static_cast<std::size_t>(i)]);
            p *= cell;
        }
        law(flat) = p;
    }
    return law;
}

}  // namespace

TEST_CASE("iid attack: support rules and sampling") {
    const CavcModel m = testutil::bsc_family_model({0.1, 0.3}, {0.2, 0.4});
    // point mass: constant state sequence
    const AttackStrategy pm = iid_attack(m, SimplexVector::point_mass(4, 1));
    const Codebook cb = two_word_codebook({0, 0, 1, 1}, {0, 1, 0, 1});
    const std::vector<int> s = sample_attack_states(pm, m, cb, 1, -1, 64, 9);
    for (int v : s) CHECK(v == 1);
    // the point mass lies in family one only: no rule under family two
    CHECK_THROWS_AS(sample_attack_states(pm, m, cb, 2, -1, 8, 9), ModelError);
    // support spanning both families is rejected
    CHECK_THROWS_AS(iid_attack(m, SimplexVector(Eigen::Vector2d(0.5, 0.5), {0, 2})), ModelError);
    // overlapping families accept shared support
    CavcModel shared = testutil::bsc_avc_model({0.1, 0.3});
    const AttackStrategy both = iid_attack(shared, SimplexVector(Eigen::Vector2d(0.5, 0.5)));
    CHECK(both.q1.size() == 2);
    CHECK(both.q2.size() == 2);
}

TEST_CASE("iid attack induces the mixture channel empirically") {
    const CavcModel m = testutil::bsc_family_model({0.1, 0.3}, {0.2});
    const AttackStrategy a = iid_attack(m, SimplexVector(Eigen::Vector2d(0.5, 0.5), {0, 1}));
    const int n = 100000;
    const Codebook cb = two_word_codebook({0, 0}, {1, 1});
    std::vector<int> x(n, 0);
    const std::vector<int> s = sample_attack_states(a, m, cb, 1, -1, n, 31);
    const std::vector<int> y = channel_sample(m.kernel, x, s, 32);
    double flips = 0;
    for (int v : y) flips += v;
    CHECK(std::abs(flips / n - 0.2) < 0.01);  // mixture of 0.1 and 0.3
    for (int v : s) CHECK((v == 0 || v == 1));
}

TEST_CASE("emulation attack matches both hulls when they intersect") {
    const CavcModel m = testutil::bsc_family_model({0.1, 0.3}, {0.2, 0.4});
    const SeparationReport sep = hull_separation(m, 1e-9);
    const AttackStrategy a = emulation_attack(sep);
    const Codebook cb = two_word_codebook({0, 0}, {1, 1});
    const int n = 100000;
    std::vector<int> x(n, 0);
    // under either compound-state the induced flip rate is the same point of
    // the intersection, up to the separation distance plus sampling noise
    double rates[2];
    for (int k = 1; k <= 2; ++k) {
        const std::vector<int> s = sample_attack_states(a, m, cb, k, -1, n, 100 + k);
        const std::vector<int> y = channel_sample(m.kernel, x, s, 200 + k);
        double flips = 0;
        for (int v : y) flips += v;
        rates[k - 1] = flips / n;
    }
    const double sigma = std::sqrt(0.25 / n);
    CHECK(std::abs(rates[0] - rates[1]) <= sep.distance + 6 * sigma);
}

TEST_CASE("cis attack on the adder: deterministic witness rows") {
    const CavcModel m = testutil::adder_model();
    const SymmetryWitness w = check_cis(m, 1, 1e-9);
    REQUIRE(w.feasible(1e-9));
    const AttackStrategy a = cis_attack(w, 1e-9);
    const Codebook cb = two_word_codebook({0, 0}, {1, 1});
    // excluding message 1 leaves spurious message 2: U rows select s = x = 1
    const std::vector<int> s = sample_attack_states(a, m, cb, 1, 0, 2, 77);
    CHECK(s == std::vector<int>{1, 1});
    // M = 1 degenerates to attacking the only codeword
    Codebook single = two_word_codebook({0, 1}, {0, 1});
    single.num_messages = 1;
    single.codewords.pop_back();
    const std::vector<int> s1 = sample_attack_states(a, m, single, 1, 0, 2, 78);
    CHECK(s1 == std::vector<int>{0, 1});
}

TEST_CASE("infeasible witnesses are rejected") {
    SymmetryWitness bad;
    bad.kind = SymmetryWitness::Kind::Cis1;
    bad.residual = 0.3;
    CHECK_THROWS_AS(cis_attack(bad, 1e-9), ModelError);
    bad.kind = SymmetryWitness::Kind::Trans;
    CHECK_THROWS_AS(trans_attack(bad, 1e-9), ModelError);
}

TEST_CASE("cis symmetry: swapped likelihoods coincide (tiny-n enumeration)") {
    const CavcModel m = testutil::adder_model();
    const SymmetryWitness w = check_cis(m, 1, 1e-9);
    const std::vector<int> xa{0, 0, 1, 0};
    const std::vector<int> xb{1, 1, 0, 1};
    const Eigen::VectorXd ab = directed_attack_output_law(m, 1, w.u, xa, xb);
    const Eigen::VectorXd ba = directed_attack_output_law(m, 1, w.u, xb, xa);
    CHECK((ab - ba).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("trans symmetry on example 1: cross-family likelihoods coincide") {
    const CavcModel m = testutil::example1_model();
    const SymmetryWitness w = check_trans(m, 1e-9);
    REQUIRE(w.feasible(1e-9));
    const std::vector<int> xa{0, 0};
    const std::vector<int> xb{1, 1};
    // send xa under sigma_1 attacking xb with U == send xb under sigma_2
    // attacking xa with V
    const Eigen::VectorXd lhs = directed_attack_output_law(m, 1, w.u, xa, xb);
    const Eigen::VectorXd rhs = directed_attack_output_law(m, 2, w.v, xb, xa);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);

    // sampling path: sigma_1 active, spurious codeword 11 -> states (1,1) local
    const AttackStrategy a = trans_attack(w, 1e-9);
    const Codebook cb = two_word_codebook({0, 0}, {1, 1});
    const std::vector<int> s = sample_attack_states(a, m, cb, 1, 0, 2, 5);
    CHECK(s == std::vector<int>{1, 1});  // family-one state (x'=1, k=1)
    const std::vector<int> s2 = sample_attack_states(a, m, cb, 2, 0, 2, 5);
    CHECK(s2 == std::vector<int>{3, 3});  // family-two state (x'=1, k=2)
}

TEST_CASE("avc special case: trans attack with V = U matches the cis attack") {
    const CavcModel m = testutil::adder_model();
    const SymmetryWitness cis = check_cis(m, 1, 1e-9);
    SymmetryWitness paired;
    paired.kind = SymmetryWitness::Kind::Trans;
    paired.u = cis.u;
    paired.v = cis.u;
    paired.residual = symmetry_residual(m, paired);
    REQUIRE(paired.feasible(1e-9));
    const AttackStrategy ta = trans_attack(paired, 1e-9);
    const AttackStrategy ca = cis_attack(cis, 1e-9);
    const Codebook cb = two_word_codebook({0, 0, 1, 1}, {0, 1, 0, 1});
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        CHECK(sample_attack_states(ta, m, cb, 1, 0, 4, seed) ==
              sample_attack_states(ca, m, cb, 1, 0, 4, seed));
    }
}

TEST_CASE("averaging attack bound on the symmetrizable adder (com task)") {
    const CavcModel m = testutil::adder_model();
    const SymmetryWitness w = check_cis(m, 1, 1e-9);
    const Codebook cb = generate_codebook(Eigen::Vector2d(0.5, 0.5), 4, 2, 3);
    REQUIRE_FALSE(cb.has_duplicates);

    DecodeOptions opts;
    opts.eta = 0.05;
    const DecoderFn joint = [&](const std::vector<int>& y) {
        return decode_com(cb, y, m, opts);
    };
    const AveragingAttackReport r1 = averaging_attack_error_bound(m, cb, w, Task::Com, joint);
    CHECK(r1.bound == doctest::Approx(0.25));
    CHECK(r1.bound_met);
    CHECK(r1.max_error >= 0.25);

    const DecoderFn mmi = [&](const std::vector<int>& y) {
        return mmi_decode(cb, y, m.kernel.num_outputs(), cb.rate(), 0.05);
    };
    const AveragingAttackReport r2 = averaging_attack_error_bound(m, cb, w, Task::Com, mmi);
    CHECK(r2.max_error >= 0.25);
}

TEST_CASE("averaging attack bound on example 1 (trans witness, and task)") {
    const CavcModel m = testutil::example1_model();
    const SymmetryWitness w = check_trans(m, 1e-9);
    const Codebook cb = generate_codebook(Eigen::Vector2d(0.5, 0.5), 4, 2, 5);
    DecodeOptions opts;
    opts.eta = 0.05;
    const DecoderFn dec = [&](const std::vector<int>& y) {
        return decode_and(cb, y, m, opts);
    };
    const AveragingAttackReport r = averaging_attack_error_bound(m, cb, w, Task::And, dec);
    // the paired terms sum to at least (M-1)/M, so the max clears (M-1)/2M
    CHECK(r.error_family1 + r.error_family2 >= 0.5 - 1e-12);
    CHECK(r.max_error >= 0.25);
    CHECK(r.bound_met);
}

TEST_CASE("exhaustive worst case") {
    // noiseless single state, distinct codewords: zero error
    const CavcModel clean = testutil::noiseless_model();
    const Codebook cb = two_word_codebook({0, 0, 1}, {1, 1, 0});
    DecodeOptions opts;
    opts.eta = 0.05;
    const DecoderFn dec = [&](const std::vector<int>& y) {
        return decode_com(cb, y, clean, opts);
    };
    const WorstCaseReport wc = exhaustive_worst_case(clean, cb, dec, Task::Com, 1);
    CHECK(wc.error == doctest::Approx(0.0));

    // symmetrizable adder at n = 3: confusion is unavoidable
    const CavcModel adder = testutil::adder_model();
    const Codebook acb = generate_codebook(Eigen::Vector2d(1.0 / 3, 2.0 / 3), 3, 2, 10);
    const DecoderFn mmi = [&](const std::vector<int>& y) {
        return mmi_decode(acb, y, adder.kernel.num_outputs(), acb.rate(), 0.05);
    };
    const WorstCaseReport awc = exhaustive_worst_case(adder, acb, mmi, Task::Com, 1);
    CHECK(awc.error >= 0.25);
    for (int s : awc.states) CHECK((s == 0 || s == 1));

    // an iid attack never beats the worst case (same codebook and decoder)
    const Eigen::MatrixXd mix = family_mixture(adder, 1, Eigen::Vector2d(0.5, 0.5));
    const std::vector<Verdict> verdicts = decode_all_outputs(3, 3, mmi);
    double iid_err = 0.0;
    for (int m = 0; m < 2; ++m) {
        std::vector<int> y(3, 0);
        for (std::size_t flat = 0; flat < verdicts.size(); ++flat) {
            std::size_t rem = flat;
            for (int i = 2; i >= 0; --i) {
                y[static_cast<std::size_t>(i)] = static_cast<int>(rem % 3);
                rem /= 3;
            }
            double p = 1.0;
            for (int i = 0; i < 3; ++i)
                p *= mix(acb.codewords[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)],
                         y[static_cast<std::size_t>(i)]);
            if (p > 0.0 && is_error(verdicts[flat], Task::Com, m + 1, 1)) iid_err += p;
        }
    }
    iid_err /= 2.0;
    CHECK(iid_err <= awc.error + 1e-12);
}

TEST_CASE("worst case error is monotone in the family") {
    // family {0} vs family {0,1} on the adder: more states, no less error
    const CavcModel adder = testutil::adder_model();
    CavcModel small = adder;
    small.family_one = {0};
    const Codebook cb = generate_codebook(Eigen::Vector2d(0.5, 0.5), 4, 2, 21);
    const DecoderFn mmi = [&](const std::vector<int>& y) {
        return mmi_decode(cb, y, adder.kernel.num_outputs(), cb.rate(), 0.05);
    };
    const double small_err = exhaustive_worst_case(small, cb, mmi, Task::Com, 1).error;
    const double full_err = exhaustive_worst_case(adder, cb, mmi, Task::Com, 1).error;
    CHECK(full_err >= small_err - 1e-12);
}

TEST_CASE("cis witness residual bounds the symmetrized output gap at n = 1") {
    for (int rep = 0; rep < 10; ++rep) {
        const CavcModel m = testutil::random_model(derive_seed(404, rep), 2, 2, 2);
        const SymmetryWitness w = check_cis(m, 1, 1e-9);
        const int ny = m.kernel.num_outputs();
        for (int xa = 0; xa < 2; ++xa) {
            for (int xb = 0; xb < 2; ++xb) {
                if (xa == xb) continue;
                const Eigen::VectorXd pa =
                    directed_attack_output_law(m, 1, w.u, {xa}, {xb});
                const Eigen::VectorXd pb =
                    directed_attack_output_law(m, 1, w.u, {xb}, {xa});
                const double tv = 0.5 * (pa - pb).cwiseAbs().sum();
                CHECK(tv <= ny * w.residual + 1e-12);
            }
        }
    }
}
