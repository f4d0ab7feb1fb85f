#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <random>

#include "specdyn/cayley.hpp"

using namespace specdyn;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

CircleMeasure cantor() {
    return CircleMeasure::self_similar(3, {0, 2}, {0.5, 0.5});
}

CircleMeasure dirichlet() {
    return CircleMeasure::infinite_convolution(2, ExponentRule::power(2), 64);
}

std::shared_ptr<CayleyBridge> bridge_over(CircleMeasure mu) {
    return std::make_shared<CayleyBridge>(OperatorModel::cyclic_unitary(std::move(mu)));
}

} // namespace

TEST_CASE("angle map fixed points") {
    CHECK(CayleyAngleMap::lambda_of_theta(0.0) == 0.0);
    CHECK(CayleyAngleMap::lambda_of_theta(0.25) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(CayleyAngleMap::theta_of_lambda(0.0) == 0.0);
    CHECK(CayleyAngleMap::theta_of_lambda(1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(CayleyAngleMap::theta_of_lambda(-1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(CayleyAngleMap::lambda_of_theta(0.5), std::domain_error);
}

TEST_CASE("property: Cayley round trip across twelve decades") {
    std::mt19937_64 rng(20241101);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double lambda = mantissa(rng) * std::pow(10.0, static_cast<int>(rng() % 7));
        double theta = CayleyAngleMap::theta_of_lambda(lambda);
        CHECK(theta >= 0.0);
        CHECK(theta < 1.0);
        double back = CayleyAngleMap::lambda_of_theta(theta);
        CHECK(std::abs(back - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda)));
    }
}

TEST_CASE("cogenerator recovery at the spectral level") {
    // (i - lambda)/(i + lambda) evaluated at the image atoms reproduces the
    // source phases e^{2 pi i theta}
    std::mt19937_64 rng(20241102);
    std::vector<Atom> atoms;
    std::vector<double> w = {0.25, 0.25, 0.25, 0.25};
    std::vector<long long> nums = {0, 1, 3, 9};
    for (int i = 0; i < 4; ++i) atoms.push_back({Angle::rational(nums[i], 13), w[i]});
    auto nu = pushforward_to_line(CircleMeasure::atomic(atoms));
    auto image = nu.atoms();
    for (int i = 0; i < 4; ++i) {
        Complex z = CayleyAngleMap::cayley_z(image[i].first);
        CHECK(std::abs(z - unit_phase(atoms[i].angle.value())) <= 1e-12);
    }
}

TEST_CASE("pushforward places atoms by the tangent map") {
    auto zero = pushforward_to_line(CircleMeasure::atomic({{Angle::rational(0, 1), 1.0}}));
    CHECK(zero.atoms()[0].first == 0.0);
    auto quarter = pushforward_to_line(CircleMeasure::atomic({{Angle::rational(1, 4), 1.0}}));
    CHECK(quarter.atoms()[0].first == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(pushforward_to_line(CircleMeasure::atomic({{Angle::rational(1, 2), 1.0}})),
                    std::invalid_argument);
}

TEST_CASE("pushforward characteristic function is quadrature-consistent") {
    // deep refinements agree: depth 24 vs depth 28 within 1e-6
    auto mu = cantor();
    Complex acc24{0.0, 0.0}, acc28{0.0, 0.0};
    for_each_quad_node(mu, 24, [&](double th, double w) {
        acc24 += w * unit_phase(std::tan(3.14159265358979323846 * th) / kTwoPi);
    }, std::size_t(1) << 29);
    for_each_quad_node(mu, 28, [&](double th, double w) {
        acc28 += w * unit_phase(std::tan(3.14159265358979323846 * th) / kTwoPi);
    }, std::size_t(1) << 29);
    CHECK(std::abs(acc24 - acc28) <= 1e-6);
    // pre-build oracle: nu^(1) = 0.644006581336 (real by symmetry)
    CHECK(acc24.real() == doctest::Approx(0.644006581336).epsilon(1e-7));
    FourierValue via_bridge = pushforward_to_line(mu).characteristic(1.0, 1e-6);
    CHECK(std::abs(via_bridge.value - Complex(0.644006581336, 0.0)) <= 1e-6);
}

TEST_CASE("group elements evaluate weakly") {
    SUBCASE("identity at t = 0") {
        auto bridge = bridge_over(cantor());
        GroupElement g = apply_group(bridge, 0.0, VectorRep::e(0), 1e-8);
        FourierValue v = g.pair_with(VectorRep::e(0));
        CHECK(std::abs(v.value - Complex(1.0, 0.0)) <= 1e-12);
    }
    SUBCASE("single point spectrum rotates with e^{it}") {
        auto bridge = bridge_over(CircleMeasure::atomic({{Angle::rational(1, 4), 1.0}}));
        GroupElement g = apply_group(bridge, 2.0, VectorRep::e(0), 1e-10);
        FourierValue v = g.pair_with(VectorRep::e(0));
        CHECK(std::abs(v.value - Complex(std::cos(2.0), std::sin(2.0))) <= 1e-12);
    }
    SUBCASE("group law under the quadrature oracle") {
        auto bridge = bridge_over(cantor());
        double tol = 1e-7;
        GroupScanner scan(*bridge, VectorRep::e(0), VectorRep::e(0), tol, 1.0);
        FourierValue joint = scan.at(0.3 + 0.7);
        // split evaluation: integrate the pointwise product e^{i s l} e^{i t l}
        FourierValue split = bridge->integrate(
            [](double lam) {
                return unit_phase(0.3 * lam / kTwoPi) * unit_phase(0.7 * lam / kTwoPi);
            },
            1.0, 1.0, LaurentPoly{{0, {1.0, 0.0}}}, tol);
        CHECK(std::abs(joint.value - split.value) <= 2 * tol);
    }
}

TEST_CASE("resolvent evaluated two independent ways") {
    SUBCASE("atom at lambda = 0: both sides are 1") {
        CayleyBridge b(OperatorModel::cyclic_unitary(
            CircleMeasure::atomic({{Angle::rational(0, 1), 1.0}})));
        ResolventComparison cmp = resolvent_two_ways(b, VectorRep::e(0), VectorRep::e(0), 1e-8);
        CHECK(std::abs(cmp.spectral - Complex(1.0, 0.0)) <= 1e-10);
        CHECK(std::abs(cmp.laplace - Complex(1.0, 0.0)) <= 1e-6);
        CHECK(cmp.discrepancy <= 1e-6);
    }
    SUBCASE("atom at lambda = 1: both sides are (1+i)/2") {
        CayleyBridge b(OperatorModel::cyclic_unitary(
            CircleMeasure::atomic({{Angle::rational(1, 4), 1.0}})));
        ResolventComparison cmp = resolvent_two_ways(b, VectorRep::e(0), VectorRep::e(0), 1e-8);
        CHECK(std::abs(cmp.spectral - Complex(0.5, 0.5)) <= 1e-10);
        CHECK(std::abs(cmp.laplace - Complex(0.5, 0.5)) <= 1e-6);
    }
    SUBCASE("cantor cyclic vector at tol 1e-6") {
        CayleyBridge b(OperatorModel::cyclic_unitary(cantor()));
        ResolventComparison cmp = resolvent_two_ways(b, VectorRep::e(0), VectorRep::e(0), 1e-6);
        CHECK(cmp.discrepancy <= 1e-5);
        // oracle value of the spectral side: (1 + mu^(1))/2
        CHECK(std::abs(cmp.spectral - Complex(0.6857186783543828, 0.0)) <= 1e-9);
    }
}

TEST_CASE("generator difference quotients converge to the oracle target") {
    std::vector<double> ts;
    for (int k = 0; k <= 8; ++k) ts.push_back(std::ldexp(1.0, -k));
    SUBCASE("atom at lambda = 0: everything vanishes") {
        CayleyBridge b(OperatorModel::cyclic_unitary(
            CircleMeasure::atomic({{Angle::rational(0, 1), 1.0}})));
        DifferenceQuotients dq =
            generator_difference_quotient(b, VectorRep::e(0), VectorRep::e(0), ts, 1e-10);
        CHECK(std::abs(dq.target) <= 1e-12);
        for (const auto& q : dq.quotients) CHECK(std::abs(q) <= 1e-10);
    }
    SUBCASE("atom at lambda = 1: scalar calculus") {
        CayleyBridge b(OperatorModel::cyclic_unitary(
            CircleMeasure::atomic({{Angle::rational(1, 4), 1.0}})));
        std::vector<double> fine = {std::ldexp(1.0, -10)};
        DifferenceQuotients dq =
            generator_difference_quotient(b, VectorRep::e(0), VectorRep::e(0), fine, 1e-10);
        CHECK(std::abs(dq.target - Complex(-0.5, 0.5)) <= 1e-12); // i (1-i)^{-1}
        CHECK(std::abs(dq.quotients[0] - dq.target) <= 1e-3);
    }
    SUBCASE("cantor: errors decrease along t = 2^-k") {
        CayleyBridge b(OperatorModel::cyclic_unitary(cantor()));
        DifferenceQuotients dq =
            generator_difference_quotient(b, VectorRep::e(0), VectorRep::e(0), ts, 1e-7);
        double prev = 1e300;
        for (const auto& q : dq.quotients) {
            double err = std::abs(q - dq.target);
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev <= 1e-3);
    }
    SUBCASE("t lists must decrease") {
        CayleyBridge b(OperatorModel::cyclic_unitary(cantor()));
        CHECK_THROWS_AS(
            generator_difference_quotient(b, VectorRep::e(0), VectorRep::e(0), {0.5, 1.0}, 1e-7),
            std::invalid_argument);
    }
}

TEST_CASE("property: group pairings are positive definite in t") {
    std::mt19937_64 rng(20241103);
    std::uniform_real_distribution<double> dt(0.05, 0.9);
    for (const CircleMeasure& mu :
         {dirichlet(), CircleMeasure::atomic({{Angle::rational(1, 4), 0.5},
                                              {Angle::rational(2, 3), 0.5}})}) {
        auto bridge = bridge_over(mu);
        for (int trial = 0; trial < 10; ++trial) {
            int n = 4 + static_cast<int>(rng() % 3);
            std::vector<double> ts(n);
            double t = 0.0;
            for (auto& x : ts) {
                t += dt(rng);
                x = t;
            }
            GroupScanner scan(*bridge, VectorRep::e(0), VectorRep::e(0), 1e-9, 2.0 * t);
            Eigen::MatrixXcd gram(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) gram(a, b) = scan.at(ts[a] - ts[b]).value;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (gram + gram.adjoint()));
            CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
        }
    }
}

TEST_CASE("angle-window mass equals image-window mass") {
    // the pushforward is a relabeling of the refinement tree: the image of a
    // window carries exactly the window's mass
    auto mu = cantor();
    auto rule = quadrature(mu, 12);
    double lo = 0.1, hi = 0.3;
    double window_mass = 0.0, image_mass = 0.0;
    double lam_lo = CayleyAngleMap::lambda_of_theta(lo), lam_hi = CayleyAngleMap::lambda_of_theta(hi);
    for (const auto& node : rule.nodes) {
        if (node.theta >= lo && node.theta < hi) window_mass += node.weight;
        double lam = CayleyAngleMap::lambda_of_theta(node.theta);
        if (lam >= lam_lo && lam < lam_hi) image_mass += node.weight;
    }
    CHECK(window_mass == image_mass);
    CHECK(window_mass > 0.0);
}

TEST_CASE("certified bounds stall where Lipschitz control fails") {
    CayleyBridge b(OperatorModel::cyclic_unitary(CircleMeasure::lebesgue()));
    CHECK_THROWS_AS(resolvent_two_ways(b, VectorRep::e(0), VectorRep::e(0), 1e-6), PrecisionError);
}
