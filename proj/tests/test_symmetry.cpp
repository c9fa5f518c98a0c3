#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cavc/rng.hpp"
#include "cavc/symmetry.hpp"
#include "test_util.hpp"

using namespace cavc;

namespace {
constexpr double kTol = 1e-9;
}

TEST_CASE("adder channel is cis-symmetrizable with the identity witness") {
    const CavcModel m = testutil::adder_model();
    const SymmetryWitness w = check_cis(m, 1, kTol);
    CHECK(w.feasible(kTol));
    CHECK(w.residual <= 1e-12);
    // U(s|x) = 1{s = x} is a valid witness; verify by substitution
    SymmetryWitness manual;
    manual.kind = SymmetryWitness::Kind::Cis1;
    manual.u = Eigen::MatrixXd::Identity(2, 2);
    CHECK(symmetry_residual(m, manual) == doctest::Approx(0.0));
}

TEST_CASE("example 1 is trans- but not cis-symmetrizable") {
    const CavcModel m = testutil::example1_model();
    const SymmetryWitness c1 = check_cis(m, 1, kTol);
    const SymmetryWitness c2 = check_cis(m, 2, kTol);
    const SymmetryWitness tr = check_trans(m, kTol);
    CHECK_FALSE(c1.feasible(kTol));
    CHECK_FALSE(c2.feasible(kTol));
    // the minimum cis residual is 1/2: every row of U has a >= 1/2 entry
    CHECK(c1.residual == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(c2.residual == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(tr.feasible(kTol));
    CHECK(tr.residual <= 1e-12);

    // the canonical witness: U(s|x') = 1{s = (x',1)}, V(s|x) = 1{s = (x,2)}
    SymmetryWitness manual;
    manual.kind = SymmetryWitness::Kind::Trans;
    manual.u = Eigen::MatrixXd::Identity(2, 2);
    manual.v = Eigen::MatrixXd::Identity(2, 2);
    CHECK(symmetry_residual(m, manual) == doctest::Approx(0.0));
}

TEST_CASE("single identity state is not symmetrizable") {
    std::vector<Eigen::MatrixXd> mats(1, Eigen::MatrixXd::Identity(2, 2));
    ChannelKernel k(make_alphabet(2), make_alphabet(1), make_alphabet(2), std::move(mats));
    const CavcModel m = make_model(std::move(k), {0}, {0});
    const SymmetryWitness w = check_cis(m, 1, kTol);
    CHECK_FALSE(w.feasible(kTol));
    // grid oracle at resolution 0.01 agrees that the residual floor is large
    const double grid = grid_oracle_symmetrizable(m, SymmetryWitness::Kind::Cis1, 0.01);
    CHECK(grid >= 0.9);  // unique state: U is forced, residual = 1
    CHECK(w.residual <= grid + 1e-9);
}

TEST_CASE("disjoint-output cis pair is not trans-symmetrizable") {
    const CavcModel m = testutil::cis_disjoint_outputs_model();
    CHECK(check_cis(m, 1, kTol).feasible(kTol));
    CHECK(check_cis(m, 2, kTol).feasible(kTol));
    const SymmetryWitness tr = check_trans(m, kTol);
    CHECK_FALSE(tr.feasible(kTol));
    CHECK(tr.residual >= 0.1);
}

TEST_CASE("avc special case: trans feasibility follows cis with V = U") {
    const CavcModel m = testutil::adder_model();  // S1 = S2
    const SymmetryWitness cis = check_cis(m, 1, kTol);
    const SymmetryWitness tr = check_trans(m, kTol);
    REQUIRE(cis.feasible(kTol));
    CHECK(tr.feasible(kTol));
    // substituting V = U reproduces the cis residual exactly
    SymmetryWitness paired;
    paired.kind = SymmetryWitness::Kind::Trans;
    paired.u = cis.u;
    paired.v = cis.u;
    CHECK(symmetry_residual(m, paired) == doctest::Approx(cis.residual).epsilon(1e-9));
}

TEST_CASE("hull separation on BSC families") {
    // overlapping crossover ranges -> distance 0, witnesses meet in [0.2, 0.3]
    const CavcModel overlap = testutil::bsc_family_model({0.1, 0.3}, {0.2, 0.4});
    const SeparationReport sep = hull_separation(overlap, kTol);
    CHECK(sep.distance <= 1e-10);
    CHECK_FALSE(sep.intersection_empty());
    const Eigen::MatrixXd w1 = family_mixture(overlap, 1, sep.witness_q1);
    const double crossover = w1(0, 1);
    CHECK(crossover >= 0.2 - 1e-9);
    CHECK(crossover <= 0.3 + 1e-9);

    // disjoint ranges: closest points are BSC(0.1) and BSC(0.3)
    const CavcModel disjoint = testutil::bsc_family_model({0.05, 0.1}, {0.3, 0.4});
    const SeparationReport sep2 = hull_separation(disjoint, kTol);
    CHECK(sep2.distance == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(sep2.intersection_empty());
    CHECK(sep2.eta == doctest::Approx(0.1).epsilon(1e-9));  // distance / |X|

    // identical families always intersect
    const CavcModel avc = testutil::bsc_avc_model({0.1, 0.3});
    CHECK(hull_separation(avc, kTol).distance <= 1e-10);
}

TEST_CASE("classification verdicts follow the condition table") {
    const ClassificationReport ex1 = classify(testutil::example1_model());
    CHECK_FALSE(ex1.cis1_feasible);
    CHECK_FALSE(ex1.cis2_feasible);
    CHECK(ex1.trans_feasible);
    CHECK(ex1.any_symmetrizable);
    CHECK(ex1.intersection_empty);
    CHECK_FALSE(ex1.com_positive);
    CHECK_FALSE(ex1.and_positive);
    CHECK_FALSE(ex1.or_positive);

    // non-symmetrizable AVC: com and or positive, and impossible
    const ClassificationReport avc = classify(testutil::bsc_avc_model({0.1, 0.3}));
    CHECK_FALSE(avc.any_symmetrizable);
    CHECK_FALSE(avc.intersection_empty);
    CHECK(avc.com_positive);
    CHECK_FALSE(avc.and_positive);
    CHECK(avc.or_positive);

    // cis-symmetrizable disjoint-output pair: only the or task is possible
    const ClassificationReport dis = classify(testutil::cis_disjoint_outputs_model());
    CHECK(dis.any_symmetrizable);
    CHECK(dis.intersection_empty);
    CHECK_FALSE(dis.com_positive);
    CHECK_FALSE(dis.and_positive);
    CHECK(dis.or_positive);
}

TEST_CASE("grid oracle: adder vertex witness found at coarse resolution") {
    const CavcModel m = testutil::adder_model();
    const double grid = grid_oracle_symmetrizable(m, SymmetryWitness::Kind::Cis1, 0.5);
    CHECK(grid <= 1e-12);  // the identity witness sits on the grid
}

TEST_CASE("grid oracle: example 1 floor at coarse resolution") {
    const CavcModel m = testutil::example1_model();
    const double grid = grid_oracle_symmetrizable(m, SymmetryWitness::Kind::Cis1, 0.25);
    CHECK(grid >= 0.25);
    CHECK(grid == doctest::Approx(0.5).epsilon(1e-9));  // exact floor, confirmed by the LP
}

TEST_CASE("grid oracle upper-bounds the LP optimum on random models") {
    for (int rep = 0; rep < 20; ++rep) {
        const CavcModel m = testutil::random_model(derive_seed(1234, rep), 2, 2, 2);
        const SymmetryWitness cis = check_cis(m, 1, kTol);
        const double grid = grid_oracle_symmetrizable(m, SymmetryWitness::Kind::Cis1, 0.05);
        CHECK(cis.residual <= grid + 1e-9);
        const SymmetryWitness tr = check_trans(m, kTol);
        const double grid_tr = grid_oracle_symmetrizable(m, SymmetryWitness::Kind::Trans, 0.05);
        CHECK(tr.residual <= grid_tr + 1e-9);
    }
}

TEST_CASE("separation distance is symmetric and zero when families share a state") {
    for (int rep = 0; rep < 10; ++rep) {
        CavcModel m = testutil::random_model(derive_seed(77, rep), 2, 3, 2);
        const double d12 = hull_separation(m, kTol).distance;
        std::swap(m.family_one, m.family_two);
        const double d21 = hull_separation(m, kTol).distance;
        CHECK(d12 == doctest::Approx(d21).epsilon(1e-9));
    }
    // shared state forces intersection
    CavcModel shared = testutil::random_model(4242, 2, 2, 2);
    shared.family_one.push_back(shared.family_two.front());
    CHECK(hull_separation(shared, kTol).distance <= 1e-9);
}

TEST_CASE("feasible witnesses reproduce their residual under substitution") {
    for (int rep = 0; rep < 10; ++rep) {
        const CavcModel m = testutil::random_model(derive_seed(555, rep), 2, 2, 2);
        for (int fam : {1, 2}) {
            const SymmetryWitness w = check_cis(m, fam, kTol);
            CHECK(symmetry_residual(m, w) == doctest::Approx(w.residual).epsilon(1e-9));
        }
        const SymmetryWitness tr = check_trans(m, kTol);
        CHECK(symmetry_residual(m, tr) == doctest::Approx(tr.residual).epsilon(1e-9));
    }
}

TEST_CASE("output relabeling leaves residuals and distances unchanged") {
    const CavcModel m = testutil::random_model(31337, 2, 3, 2);
    // permute output labels: y -> (y + 1) mod 3
    std::vector<Eigen::MatrixXd> permuted;
    for (int s = 0; s < m.kernel.num_states(); ++s) {
        Eigen::MatrixXd w = m.kernel.state_matrix(s);
        Eigen::MatrixXd p(2, 3);
        for (int y = 0; y < 3; ++y) p.col((y + 1) % 3) = w.col(y);
        permuted.push_back(std::move(p));
    }
    ChannelKernel k(make_alphabet(2), make_alphabet(4), make_alphabet(3), std::move(permuted));
    const CavcModel mp = make_model(std::move(k), m.family_one, m.family_two);

    CHECK(check_cis(m, 1, kTol).residual ==
          doctest::Approx(check_cis(mp, 1, kTol).residual).epsilon(1e-9));
    CHECK(check_trans(m, kTol).residual ==
          doctest::Approx(check_trans(mp, kTol).residual).epsilon(1e-9));
    CHECK(hull_separation(m, kTol).distance ==
          doctest::Approx(hull_separation(mp, kTol).distance).epsilon(1e-9));
}
