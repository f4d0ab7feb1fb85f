#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "specdyn/finite.hpp"

using namespace specdyn;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
    ComplexMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = m(i, j);
    return out;
}

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
    Eigen::MatrixXcd out(m.n, m.m);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.m; ++j) out(i, j) = m.at(i, j);
    return out;
}

Eigen::MatrixXcd random_ginibre(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int d) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_ginibre(rng, d));
    Eigen::MatrixXcd q = qr.householderQ();
    return q;
}

Eigen::MatrixXcd random_strict_contraction(std::mt19937_64& rng, int d, double scale) {
    Eigen::MatrixXcd g = random_ginibre(rng, d);
    double top = g.jacobiSvd().singularValues()(0);
    return g * (scale / top);
}

// largest principal angle between the column spans of two orthonormal bases
double principal_angle_gap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.cols() != b.cols()) return 1.0;
    if (a.cols() == 0) return 0.0;
    Eigen::VectorXd s = (a.adjoint() * b).jacobiSvd().singularValues();
    double smin = s(s.size() - 1);
    return std::sqrt(std::max(0.0, 1.0 - smin * smin)); // sin of the largest angle
}

} // namespace

TEST_CASE("unitary part extraction") {
    SUBCASE("mixed diagonal splits on the axis") {
        ComplexMatrix t(2);
        t.at(0, 0) = std::polar(1.0, 0.9);
        t.at(1, 1) = 0.5;
        FiniteAnalysis a = unitary_part(t);
        REQUIRE(a.unitary_basis.m == 1);
        CHECK(std::abs(std::abs(a.unitary_basis.at(0, 0)) - 1.0) <= 1e-12);
        CHECK(std::abs(a.unitary_basis.at(1, 0)) <= 1e-12);
        CHECK(a.unitarity_defect <= 1e-9);
        REQUIRE(a.unitary_eigenvalues.size() == 1);
        CHECK(std::abs(a.unitary_eigenvalues[0] - std::polar(1.0, 0.9)) <= 1e-9);
    }
    SUBCASE("a strict Jordan-type block has no unitary vectors") {
        ComplexMatrix t(2);
        t.at(0, 0) = 0.9;
        t.at(0, 1) = 0.1;
        t.at(1, 1) = 0.9;
        FiniteAnalysis a = unitary_part(t);
        CHECK(a.unitary_basis.m == 0);
        CHECK(a.cnu_basis.m == 2);
    }
    SUBCASE("planted unitary summands are recovered to tiny principal angles") {
        std::mt19937_64 rng(20250201);
        for (int trial = 0; trial < 10; ++trial) {
            int du = 2 + static_cast<int>(rng() % 2);
            int dc = 6 - du;
            Eigen::MatrixXcd u = random_unitary(rng, du);
            Eigen::MatrixXcd c = random_strict_contraction(rng, dc, 0.8);
            Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(6, 6);
            block.topLeftCorner(du, du) = u;
            block.bottomRightCorner(dc, dc) = c;
            Eigen::MatrixXcd q = random_unitary(rng, 6);
            Eigen::MatrixXcd t = q * block * q.adjoint();

            FiniteAnalysis a = unitary_part(from_eigen(t));
            REQUIRE(a.unitary_basis.m == du);
            Eigen::MatrixXcd planted = q.leftCols(du);
            CHECK(principal_angle_gap(planted, to_eigen(a.unitary_basis)) <= 1e-8);
        }
    }
    SUBCASE("extraction is idempotent on the restriction") {
        std::mt19937_64 rng(20250202);
        Eigen::MatrixXcd u = random_unitary(rng, 3);
        FiniteAnalysis a = unitary_part(from_eigen(u));
        CHECK(a.unitary_basis.m == 3);
        // restrict and re-run: the full space comes back
        Eigen::MatrixXcd basis = to_eigen(a.unitary_basis);
        Eigen::MatrixXcd restricted = basis.adjoint() * u * basis;
        FiniteAnalysis again = unitary_part(from_eigen(restricted));
        CHECK(again.unitary_basis.m == 3);
    }
    SUBCASE("expansions are rejected") {
        ComplexMatrix t(1);
        t.at(0, 0) = 1.5;
        CHECK_THROWS_AS(unitary_part(t), std::invalid_argument);
    }
}

TEST_CASE("finite splitting cross-checks decay") {
    SUBCASE("diagonal mixed case") {
        ComplexMatrix t(2);
        t.at(0, 0) = std::polar(1.0, kTwoPi / std::sqrt(2.0));
        t.at(1, 1) = 0.3;
        FiniteSplitting s = classify_finite(t);
        CHECK(s.analysis.unitary_basis.m == 1);
        CHECK(s.recurrent_part_trivial);
        CHECK(s.max_late_pairing <= 1e-6);
    }
    SUBCASE("the nilpotent shift truncation is all flight") {
        ComplexMatrix t(8);
        for (int i = 1; i < 8; ++i) t.at(i, i - 1) = 1.0;
        FiniteSplitting s = classify_finite(t);
        CHECK(s.analysis.unitary_basis.m == 0);
        CHECK(s.recurrent_part_trivial);
        CHECK(s.max_late_pairing == 0.0);
    }
    SUBCASE("random batch agrees with the long-power decay oracle") {
        std::mt19937_64 rng(20250203);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::MatrixXcd g = random_strict_contraction(rng, 8, 0.95);
            FiniteSplitting s = classify_finite(from_eigen(g));
            CHECK(s.analysis.unitary_basis.m == 0); // strict contraction: all flight
            CHECK(s.recurrent_part_trivial);
            CHECK(s.max_late_pairing <= 1e-6);
        }
    }
}

TEST_CASE("limit operator sampling on finite unitaries") {
    SUBCASE("the identity is its own closure") {
        ComplexMatrix u(1);
        u.at(0, 0) = 1.0;
        auto samples = sample_limit_operators(u, 1000, 1e-3);
        REQUIRE(samples.size() == 1);
        CHECK(std::abs(samples[0].representative.at(0, 0) - Complex(1.0, 0.0)) <= 1e-12);
        CHECK(samples[0].visits == 1000);
    }
    SUBCASE("rational rotations close up into cyclic groups") {
        ComplexMatrix u(1);
        u.at(0, 0) = std::polar(1.0, kTwoPi * 2.0 / 5.0);
        auto samples = sample_limit_operators(u, 10000, 1e-3);
        CHECK(samples.size() == 5);
        long long total = 0;
        for (const auto& s : samples) total += s.visits;
        CHECK(total == 10000);
    }
    SUBCASE("irrational torus orbits equidistribute") {
        ComplexMatrix u(2);
        double alpha = std::fmod(std::sqrt(2.0), 1.0);
        double beta = std::fmod(std::sqrt(3.0), 1.0);
        u.at(0, 0) = std::polar(1.0, kTwoPi * alpha);
        u.at(1, 1) = std::polar(1.0, kTwoPi * beta);
        auto samples = sample_limit_operators(u, 100000, 1.0 / 64.0, 100000);
        // every 64x64 phase cell is visited (pre-build oracle: max gap 0.00356)
        CHECK(samples.size() == 4096);
        double worst = 0.0;
        for (int qa = 0; qa < 32; ++qa)
            for (int qb = 0; qb < 32; ++qb) {
                double px = (qa + 0.5) / 32.0, py = (qb + 0.5) / 32.0;
                double best = 1e9;
                for (const auto& s : samples) {
                    double da = std::abs(std::arg(s.representative.at(0, 0)) / kTwoPi - px);
                    da = std::min(da - std::floor(da), 1.0 - (da - std::floor(da)));
                    double db = std::abs(std::arg(s.representative.at(1, 1)) / kTwoPi - py);
                    db = std::min(db - std::floor(db), 1.0 - (db - std::floor(db)));
                    best = std::min(best, std::sqrt(da * da + db * db));
                }
                worst = std::max(worst, best);
            }
        CHECK(worst <= 0.04); // grid-cell quantization dominates the oracle gap
    }
    SUBCASE("invariant: samples are contractions commuting with the generator") {
        std::mt19937_64 rng(20250204);
        Eigen::MatrixXcd u = random_unitary(rng, 3);
        auto samples = sample_limit_operators(from_eigen(u), 2000, 0.35, 64);
        for (const auto& s : samples) {
            Eigen::MatrixXcd v = to_eigen(s.representative);
            CHECK(v.jacobiSvd().singularValues()(0) <= 1.0 + 1e-8);
            CHECK((v * u - u * v).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
    SUBCASE("non-unitary input is rejected") {
        ComplexMatrix t(2);
        t.at(0, 0) = 0.5;
        t.at(1, 1) = 0.5;
        CHECK_THROWS_AS(sample_limit_operators(t, 100, 1e-2), std::invalid_argument);
    }
}
