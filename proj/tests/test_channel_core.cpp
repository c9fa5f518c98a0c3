#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cavc/channel.hpp"
#include "cavc/errors.hpp"
#include "cavc/info.hpp"
#include "cavc/joint_type.hpp"
#include "cavc/rng.hpp"
#include "test_util.hpp"

using namespace cavc;

TEST_CASE("alphabet validation") {
    CHECK_THROWS_AS(make_alphabet(0), ModelError);
    CHECK_THROWS_AS(make_alphabet({"a", "a"}), ModelError);
    CHECK(make_alphabet({"x0", "x1"}).size == 2);
}

TEST_CASE("kernel construction rejects non-stochastic rows") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.4, 0.5, 0.5;  // first row sums to 0.9
    CHECK_THROWS_WITH_AS(
        ChannelKernel(make_alphabet(2), make_alphabet(1), make_alphabet(2), {bad}),
        doctest::Contains("row 0"), ModelError);
}

TEST_CASE("simplex vector validation") {
    CHECK_THROWS_AS(SimplexVector(Eigen::Vector2d(0.6, 0.5)), ModelError);
    CHECK_THROWS_AS(SimplexVector(Eigen::Vector2d(-0.1, 1.1)), ModelError);
    const SimplexVector u = SimplexVector::uniform(4);
    CHECK(u.weights().sum() == doctest::Approx(1.0));
}

TEST_CASE("mixture_channel point mass returns the state channel exactly") {
    const CavcModel m = testutil::bsc_family_model({0.1, 0.3}, {0.2});
    const Dmc d = mixture_channel(m.kernel, SimplexVector::point_mass(3, 0));
    CHECK(d.prob(0, 1) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("mixture_channel adder half-half") {
    // hand-summed 2x2x3 table: W_q(y|0) = (1/2, 1/2, 0), W_q(y|1) = (0, 1/2, 1/2)
    const CavcModel m = testutil::adder_model();
    const Dmc d = mixture_channel(m.kernel, SimplexVector(Eigen::Vector2d(0.5, 0.5)));
    CHECK(d.prob(0, 0) == doctest::Approx(0.5));
    CHECK(d.prob(0, 1) == doctest::Approx(0.5));
    CHECK(d.prob(0, 2) == doctest::Approx(0.0));
    CHECK(d.prob(1, 0) == doctest::Approx(0.0));
    CHECK(d.prob(1, 1) == doctest::Approx(0.5));
    CHECK(d.prob(1, 2) == doctest::Approx(0.5));
}

TEST_CASE("mixture of BSCs is the BSC of the mixed crossover") {
    const CavcModel m = testutil::bsc_family_model({0.1, 0.3}, {0.2});
    SimplexVector q(Eigen::Vector2d(0.5, 0.5), {0, 1});
    const Dmc d = mixture_channel(m.kernel, q);
    CHECK(d.prob(0, 1) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.prob(1, 0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("mixture_channel rejects out-of-range support") {
    const CavcModel m = testutil::bsc_family_model({0.1}, {0.2});
    CHECK_THROWS_AS(mixture_channel(m.kernel, SimplexVector(Eigen::Vector2d(0.5, 0.5), {0, 7})),
                    ModelError);
}

TEST_CASE("mixture rows stay stochastic for random kernels and weights") {
    for (int rep = 0; rep < 100; ++rep) {
        const CavcModel m = testutil::random_model(derive_seed(42, rep), 2, 3, 2);
        CounterRng rng(derive_seed(43, rep));
        Eigen::VectorXd q(4);
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            q(i) = rng.next_double();
            sum += q(i);
        }
        q /= sum;
        const Dmc d = mixture_channel(m.kernel, SimplexVector(q));
        for (int x = 0; x < 2; ++x)
            CHECK(d.probs().row(x).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("mutual information closed forms") {
    const Eigen::Vector2d uniform(0.5, 0.5);
    CHECK(mutual_information(uniform, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(1.0));
    CHECK(mutual_information(uniform, testutil::bsc(0.5)) == doctest::Approx(0.0).epsilon(1e-12));
    // 1 - h2(0.2)
    CHECK(mutual_information(uniform, testutil::bsc(0.2)) ==
          doctest::Approx(0.27807).epsilon(1e-5 / 0.27807));
    Eigen::Vector2d skew(0.9, 0.1);
    CHECK(mutual_information(skew, testutil::bsc(0.5)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mutual information: two entropy decompositions agree") {
    for (int rep = 0; rep < 50; ++rep) {
        const CavcModel m = testutil::random_model(derive_seed(7, rep), 3, 4, 1);
        CounterRng rng(derive_seed(8, rep));
        Eigen::VectorXd p(3);
        double sum = 0;
        for (int i = 0; i < 3; ++i) {
            p(i) = rng.next_double();
            sum += p(i);
        }
        p /= sum;
        const Eigen::MatrixXd w = m.kernel.state_matrix(0);
        const double via_y = mutual_information(p, w);
        // H(X) - H(X|Y) route via the joint distribution
        Eigen::MatrixXd joint = p.asDiagonal() * w;
        const Eigen::VectorXd py = joint.colwise().sum().transpose();
        double hxy = 0.0;
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 4; ++y)
                if (joint(x, y) > 0.0) hxy -= joint(x, y) * std::log2(joint(x, y));
        const double via_x = entropy_bits(p) + entropy_bits(py) - hxy;
        CHECK(via_y == doctest::Approx(via_x).epsilon(1e-9));
    }
}

TEST_CASE("kl divergence values and properties") {
    CHECK(kl_divergence(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.3, 0.7)).value() == 0.0);
    CHECK(kl_divergence(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.5, 0.5)).value() ==
          doctest::Approx(1.0));
    // 1 - h2(0.3)
    CHECK(kl_divergence(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.5, 0.5)).value() ==
          doctest::Approx(0.11871).epsilon(1e-4));
    CHECK(kl_divergence(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1.0, 0.0)).is_infinite());
    // nonnegativity fuzz
    CounterRng rng(99);
    for (int rep = 0; rep < 200; ++rep) {
        Eigen::VectorXd p(3), q(3);
        double sp = 0, sq = 0;
        for (int i = 0; i < 3; ++i) {
            p(i) = rng.next_double();
            q(i) = 0.05 + rng.next_double();
            sp += p(i);
            sq += q(i);
        }
        p /= sp;
        q /= sq;
        CHECK(kl_divergence(p, q).value() >= 0.0);
    }
}

TEST_CASE("joint types") {
    const JointType single = joint_type({{0, 0, 1, 1}}, {2});
    CHECK(single.count_at({0}) == 2);
    CHECK(single.count_at({1}) == 2);

    const JointType pair = joint_type({{0, 0, 1, 1}, {0, 1, 0, 1}}, {2, 2});
    CHECK(pair.count_at({0, 0}) == 1);
    CHECK(pair.count_at({0, 1}) == 1);
    CHECK(pair.count_at({1, 0}) == 1);
    CHECK(pair.count_at({1, 1}) == 1);

    const JointType triple = joint_type({{0, 0}, {0, 1}, {0, 1}}, {2, 2, 2});
    CHECK(triple.count_at({0, 0, 0}) == 1);
    CHECK(triple.count_at({0, 1, 1}) == 1);
    CHECK(triple.count_at({1, 1, 1}) == 0);

    CHECK_THROWS_AS(joint_type({{0, 1}, {0}}, {2, 2}), ModelError);
    CHECK_THROWS_AS(joint_type({{0, 3}}, {2}), ModelError);
}

TEST_CASE("joint type marginalization commutes with typing the sequence") {
    CounterRng rng(5);
    std::vector<int> a(20), b(20);
    for (int i = 0; i < 20; ++i) {
        a[i] = static_cast<int>(rng.next_below(3));
        b[i] = static_cast<int>(rng.next_below(2));
    }
    const JointType joint = joint_type({a, b}, {3, 2});
    const JointType direct = joint_type({a}, {3});
    const JointType marg = joint.marginal({0});
    CHECK(marg.counts() == direct.counts());
}

TEST_CASE("conditional mutual information") {
    // constant B axis gives zero
    const JointType t1 = joint_type({{0, 1, 0, 1}, {1, 1, 1, 1}}, {2, 2});
    CHECK(conditional_mutual_information(t1, {0}, {1}, {}) == doctest::Approx(0.0));
    // exact product type gives zero
    const JointType t2 = joint_type({{0, 0, 1, 1}, {0, 1, 0, 1}}, {2, 2});
    CHECK(conditional_mutual_information(t2, {0}, {1}, {}) == doctest::Approx(0.0));
    // perfect copy gives one bit
    const JointType t3 = joint_type({{0, 1, 0, 1}, {0, 1, 0, 1}}, {2, 2});
    CHECK(conditional_mutual_information(t3, {0}, {1}, {}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(conditional_mutual_information(t3, {0}, {0}, {}), ModelError);
}

TEST_CASE("cmi chain rule on random types") {
    CounterRng rng(17);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<int> a(24), b(24), c(24);
        for (int i = 0; i < 24; ++i) {
            a[i] = static_cast<int>(rng.next_below(2));
            b[i] = static_cast<int>(rng.next_below(3));
            c[i] = static_cast<int>(rng.next_below(2));
        }
        const JointType t = joint_type({a, b, c}, {2, 3, 2});
        const double lhs = conditional_mutual_information(t, {0}, {1, 2}, {});
        const double rhs = conditional_mutual_information(t, {0}, {1}, {}) +
                           conditional_mutual_information(t, {0}, {2}, {1});
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        CHECK(conditional_mutual_information(t, {0}, {1}, {2}) >= 0.0);
    }
}

TEST_CASE("typicality is entrywise") {
    const JointType t = joint_type({{0, 0, 0, 1, 1, 1, 1, 1, 1, 1}}, {2});  // (0.3, 0.7)
    Eigen::Vector2d target(0.3, 0.7);
    CHECK(is_typical(t, target, 0.0));
    CHECK_FALSE(is_typical(t, Eigen::Vector2d(0.5, 0.5), 0.05));  // deviation 0.2
    CHECK(is_typical(t, Eigen::Vector2d(0.28, 0.72), 0.05));
}

TEST_CASE("channel_sample determinism and exactness") {
    const CavcModel adder = testutil::adder_model();
    const std::vector<int> x{0, 1};
    const std::vector<int> s{1, 1};
    const std::vector<int> y = channel_sample(adder.kernel, x, s, 123);
    CHECK(y == std::vector<int>{1, 2});
    // identical seeds give identical outputs on a noisy channel
    const CavcModel noisy = testutil::bsc_avc_model({0.3});
    std::vector<int> xs(64, 0);
    std::vector<int> ss(64, 0);
    CHECK(channel_sample(noisy.kernel, xs, ss, 99) == channel_sample(noisy.kernel, xs, ss, 99));
    CHECK_THROWS_AS(channel_sample(noisy.kernel, {0, 1}, {0}, 1), ModelError);
}

TEST_CASE("channel_sample empirical law at n = 1e5") {
    const CavcModel m = testutil::bsc_avc_model({0.2});
    const int n = 100000;
    std::vector<int> x(n, 0), s(n, 0);
    const std::vector<int> y = channel_sample(m.kernel, x, s, 2024);
    double flips = 0;
    for (int v : y) flips += v;
    const double rate = flips / n;
    CHECK(std::abs(rate - 0.2) < 0.01);
    // max cell deviation against the kernel row at 5 / sqrt(n)
    CHECK(std::abs(rate - 0.2) <= 5.0 * std::sqrt(1.0 / n));
}

TEST_CASE("counter rng is counter-based and derive_seed spreads") {
    CounterRng a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
}
