#include <doctest.h>

#include <cmath>
#include <random>

#include "specdyn/dynamics.hpp"

using namespace specdyn;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

CircleMeasure cantor() {
    return CircleMeasure::self_similar(3, {0, 2}, {0.5, 0.5});
}

CircleMeasure dirichlet() {
    return CircleMeasure::infinite_convolution(2, ExponentRule::power(2), 64);
}

std::vector<VectorRep> frame_window(long long lo, long long hi) {
    std::vector<VectorRep> f;
    for (long long n = lo; n <= hi; ++n) f.push_back(VectorRep::e(n));
    return f;
}

} // namespace

TEST_CASE("sequence specs enumerate and guard overflow") {
    CHECK(SequenceSpec::powers(3, 4).discrete_entries() ==
          std::vector<long long>{3, 9, 27, 81});
    CHECK(SequenceSpec::arithmetic(5, 2, 3).discrete_entries() ==
          std::vector<long long>{5, 7, 9});
    CHECK(SequenceSpec::tower_powers(2, ExponentRule::power(2), 3).discrete_entries() ==
          std::vector<long long>{4, 16, 256});
    CHECK_THROWS_AS(SequenceSpec::powers(3, 60).discrete_entries(), std::overflow_error);
    CHECK_THROWS_AS(SequenceSpec::tower_powers(2, ExponentRule::power(2), 7).discrete_entries(),
                    std::overflow_error);
    CHECK_THROWS_AS(SequenceSpec::explicit_list({3, 2}), std::invalid_argument);
}

TEST_CASE("trajectories") {
    SUBCASE("shift orbits leave every window immediately") {
        auto model = OperatorModel::unilateral_shift(8);
        auto traj = trajectory(model, VectorRep::basis(0), VectorRep::basis(0),
                               SequenceSpec::powers(2, 6), 1e-12);
        for (const auto& v : traj) CHECK(v.value == Complex(0.0, 0.0));
    }
    SUBCASE("cantor along powers of three is constant") {
        auto model = OperatorModel::cyclic_unitary(cantor());
        auto traj = trajectory(model, VectorRep::e(0), VectorRep::e(0),
                               SequenceSpec::powers(3, 8), 1e-12);
        Complex first = traj[0].value;
        for (const auto& v : traj) CHECK(std::abs(v.value - first) <= 2e-12);
        CHECK(std::abs(first - fourier_stieltjes(cantor(), 1.0, 1e-12).value) <= 2e-12);
    }
    SUBCASE("lebesgue orbits are orthogonal") {
        auto model = OperatorModel::cyclic_unitary(CircleMeasure::lebesgue());
        auto traj = trajectory(model, VectorRep::e(0), VectorRep::e(0),
                               SequenceSpec::arithmetic(1, 1, 10), 1e-12);
        for (const auto& v : traj) CHECK(v.value == Complex(0.0, 0.0));
    }
}

TEST_CASE("limit operator estimates") {
    SUBCASE("cantor along powers(3): certified V = mu^(1) I") {
        auto model = OperatorModel::cyclic_unitary(cantor());
        auto est = limit_operator_estimate(model, SequenceSpec::powers(3, 16),
                                           frame_window(0, 1), 1e-10);
        REQUIRE(est.has_prediction);
        CHECK(est.tier == Certificate::Tier::Certified);
        REQUIRE(est.prediction_scalar);
        Complex mu1 = fourier_stieltjes(cantor(), 1.0, 1e-12).value;
        CHECK(std::abs(*est.prediction_scalar - mu1) <= 1e-10);
        for (std::size_t i = 0; i < est.frame.size(); ++i)
            for (std::size_t j = 0; j < est.frame.size(); ++j) {
                CHECK(std::abs(est.matrix_elements[i][j].value - est.predicted[i][j]) <= 1e-8);
                CHECK(std::abs(est.matrix_elements[i][j].value - est.predicted[i][j]) <=
                      est.prediction_rate_bound);
            }
        // oracle cross-check: k = 12 against k = 16
        auto est12 = limit_operator_estimate(model, SequenceSpec::powers(3, 12),
                                             frame_window(0, 1), 1e-10);
        for (std::size_t i = 0; i < est.frame.size(); ++i)
            for (std::size_t j = 0; j < est.frame.size(); ++j)
                CHECK(std::abs(est.matrix_elements[i][j].value -
                               est12.matrix_elements[i][j].value) <= 1e-5);
    }
    SUBCASE("dirichlet along tower powers: certified V = I") {
        auto model = OperatorModel::cyclic_unitary(dirichlet());
        auto est = limit_operator_estimate(model, SequenceSpec::tower_powers(2, ExponentRule::power(2), 5),
                                           {VectorRep::e(0)}, 1e-10);
        REQUIRE(est.has_prediction);
        CHECK(est.prediction_scalar->real() == 1.0);
        double tail = kTwoPi / 2.0 * std::ldexp(1.0, -16);
        CHECK(est.matrix_elements[0][0].value.real() >= 1.0 - tail);
    }
    SUBCASE("shift frames see the zero operator") {
        auto model = OperatorModel::unilateral_shift(8);
        std::vector<VectorRep> frame = {VectorRep::basis(0), VectorRep::basis(1)};
        auto est = limit_operator_estimate(model, SequenceSpec::powers(2, 6), frame, 1e-12);
        CHECK(est.cauchy_residual == 0.0);
        REQUIRE(est.has_prediction);
        CHECK(*est.prediction_scalar == Complex(0.0, 0.0));
        for (const auto& row : est.matrix_elements)
            for (const auto& v : row) CHECK(v.value == Complex(0.0, 0.0));
    }
    SUBCASE("needs two entries") {
        auto model = OperatorModel::unilateral_shift(8);
        CHECK_THROWS_AS(limit_operator_estimate(model, SequenceSpec::explicit_list({5}),
                                                {VectorRep::basis(0)}, 1e-12),
                        std::invalid_argument);
    }
}

TEST_CASE("recurrence certificates") {
    RecurrencePolicy policy;
    SUBCASE("dirichlet: certified Poisson recurrence along b^{n_k}") {
        auto model = OperatorModel::cyclic_unitary(dirichlet());
        Certificate cert = recurrence_certificate(model, policy);
        REQUIRE(cert.kind == Certificate::Kind::PoissonRecurrence);
        CHECK(cert.tier == Certificate::Tier::Certified);
        REQUIRE(cert.eps.size() == 5);
        // eps_4 = 2 pi 2^{-16} (1 + 2^{-48} + ...)
        double lead = kTwoPi / 2.0 * 2.0 * std::ldexp(1.0, -16);
        CHECK(cert.eps[3] <= lead * 1.001);
        CHECK(cert.eps[3] >= lead * 0.999);
        for (std::size_t k = 0; k < cert.eps.size(); ++k) {
            CHECK(cert.observed_deficit[k] <= cert.eps[k]);
            CHECK(cert.strong_return[k] <= 2.0 * cert.eps[k]);
            CHECK(std::abs(cert.strong_return[k] - 2.0 * cert.observed_deficit[k]) <= 1e-15);
        }
        // eps decreases to zero along the sequence
        for (std::size_t k = 1; k < cert.eps.size(); ++k) CHECK(cert.eps[k] < cert.eps[k - 1]);
    }
    SUBCASE("rational atoms recur exactly along the common period") {
        auto model = OperatorModel::cyclic_unitary(
            CircleMeasure::atomic({{Angle::rational(0, 1), 1.0}}));
        Certificate cert = recurrence_certificate(model, policy);
        REQUIRE(cert.kind == Certificate::Kind::PoissonRecurrence);
        REQUIRE(cert.sequence);
        CHECK(cert.sequence->form == SequenceSpec::Form::Arithmetic);
        for (double e : cert.eps) CHECK(e == 0.0);
        for (double d : cert.observed_deficit) CHECK(d == 0.0);
    }
    SUBCASE("lebesgue: empirical with nothing found") {
        auto model = OperatorModel::cyclic_unitary(CircleMeasure::lebesgue());
        Certificate cert = recurrence_certificate(model, policy);
        CHECK(cert.kind == Certificate::Kind::Empirical);
        double best = -1.0;
        for (const auto& [n, re] : cert.observations) {
            (void)n;
            best = std::max(best, re);
        }
        CHECK(best == 0.0);
    }
}

TEST_CASE("component classification policy") {
    RecurrencePolicy policy;
    SUBCASE("shift is weakly stable by structure") {
        auto r = classify_component(OperatorModel::unilateral_shift(8), policy);
        CHECK(r.label == SubspaceLabel::H_w);
        CHECK(r.certificate.reason == Certificate::StabilityReason::ShiftStructure);
    }
    SUBCASE("cantor carries a certified scalar limit") {
        auto r = classify_component(OperatorModel::cyclic_unitary(cantor()), policy);
        CHECK(r.label == SubspaceLabel::H_m);
        REQUIRE(r.certificate.kind == Certificate::Kind::ScalarLimit);
        CHECK(std::abs(*r.certificate.scalar -
                       fourier_stieltjes(cantor(), 1.0, 1e-12).value) <= 1e-10);
        CHECK(std::abs(*r.certificate.scalar) > 1e-6);
    }
    SUBCASE("lebesgue and trig densities ride Riemann-Lebesgue") {
        auto r = classify_component(OperatorModel::cyclic_unitary(CircleMeasure::lebesgue()), policy);
        CHECK(r.label == SubspaceLabel::H_w);
        CHECK(r.certificate.reason == Certificate::StabilityReason::RiemannLebesgue);
        auto r2 = classify_component(
            OperatorModel::cyclic_unitary(
                CircleMeasure::trig_density({{0, {1.0, 0.0}}, {1, {0.5, 0.0}}})),
            policy);
        CHECK(r2.label == SubspaceLabel::H_w);
    }
    SUBCASE("strict finite contractions decay") {
        ComplexMatrix m(2);
        m.at(0, 0) = 0.9;
        m.at(1, 0) = 0.1;
        m.at(1, 1) = 0.3;
        auto r = classify_component(OperatorModel::finite_contraction(std::move(m)), policy);
        CHECK(r.label == SubspaceLabel::H_w);
        CHECK(r.certificate.reason == Certificate::StabilityReason::SpectralRadiusLt1);
    }
    SUBCASE("peripheral finite spectrum is surfaced as unknown") {
        ComplexMatrix m(2);
        m.at(0, 0) = std::polar(1.0, 0.5);
        m.at(1, 1) = 0.5;
        auto r = classify_component(OperatorModel::finite_contraction(std::move(m)), policy);
        CHECK(r.label == SubspaceLabel::Unknown);
    }
    SUBCASE("dirichlet recurs") {
        auto r = classify_component(OperatorModel::cyclic_unitary(dirichlet()), policy);
        CHECK(r.label == SubspaceLabel::H_m);
        CHECK(r.certificate.kind == Certificate::Kind::PoissonRecurrence);
        CHECK(r.certificate.tier == Certificate::Tier::Certified);
    }
}

TEST_CASE("weakly wandering search") {
    SUBCASE("shift orbits are wandering at eps = 0") {
        auto model = OperatorModel::unilateral_shift(8);
        WanderReport r = weakly_wandering_search(model, VectorRep::basis(0), 5, 0.0, 100);
        REQUIRE(r.success);
        CHECK(r.indices == std::vector<long long>{0, 1, 2, 3, 4});
        CHECK(r.achieved_eps == 0.0);
    }
    SUBCASE("lebesgue: any distinct indices work") {
        auto model = OperatorModel::cyclic_unitary(CircleMeasure::lebesgue());
        WanderReport r = weakly_wandering_search(model, VectorRep::e(0), 8, 1e-9, 100);
        REQUIRE(r.success);
        CHECK(r.indices == std::vector<long long>{0, 1, 2, 3, 4, 5, 6, 7});
    }
    SUBCASE("cantor greedy run matches the pre-build oracle") {
        auto model = OperatorModel::cyclic_unitary(cantor());
        WanderReport r = weakly_wandering_search(model, VectorRep::e(0), 4, 0.1, 19683);
        REQUIRE(r.success);
        CHECK(r.indices == std::vector<long long>{0, 2, 8, 19});
        CHECK(r.achieved_eps == doctest::Approx(0.08723136706623276).epsilon(1e-9));
        REQUIRE(r.certificate);
        CHECK(r.certificate->kind == Certificate::Kind::WeaklyWandering);
    }
    SUBCASE("an unreachable eps produces a failure report") {
        auto model = OperatorModel::cyclic_unitary(
            CircleMeasure::atomic({{Angle::rational(0, 1), 1.0}}));
        WanderReport r = weakly_wandering_search(model, VectorRep::e(0), 3, 0.5, 50);
        CHECK(!r.success);
        CHECK(r.best_blocking_eps == doctest::Approx(1.0));
    }
}

TEST_CASE("limit cycles follow the certified prediction") {
    SUBCASE("cantor: shifted tails match mu^(1)-scaled orbits") {
        auto model = OperatorModel::cyclic_unitary(cantor());
        auto est = limit_operator_estimate(model, SequenceSpec::powers(3, 16),
                                           frame_window(-2, 2), 1e-10);
        LimitCycleReport report =
            limit_cycle_check(model, est, VectorRep::e(0), {1, 2, 3}, 1e-6);
        CHECK(report.all_pass);
        for (const auto& row : report.shifts) {
            CHECK(row.max_residual <= 1e-6);
            CHECK(row.pass);
        }
    }
    SUBCASE("shift: both sides vanish") {
        auto model = OperatorModel::unilateral_shift(8);
        std::vector<VectorRep> frame = {VectorRep::basis(0), VectorRep::basis(1)};
        auto est = limit_operator_estimate(model, SequenceSpec::powers(2, 6), frame, 1e-12);
        LimitCycleReport report =
            limit_cycle_check(model, est, VectorRep::basis(0), {1, 2}, 1e-12);
        CHECK(report.all_pass);
        for (const auto& row : report.shifts) CHECK(row.max_residual == 0.0);
    }
    SUBCASE("fixed atom: both sides are the constant orbit") {
        auto model = OperatorModel::cyclic_unitary(
            CircleMeasure::atomic({{Angle::rational(0, 1), 1.0}}));
        auto est = limit_operator_estimate(model, SequenceSpec::arithmetic(1, 1, 4),
                                           {VectorRep::e(0)}, 1e-12);
        REQUIRE(est.has_prediction);
        CHECK(*est.prediction_scalar == Complex(1.0, 0.0));
        LimitCycleReport report =
            limit_cycle_check(model, est, VectorRep::e(0), {1, 2, 5}, 1e-10);
        CHECK(report.all_pass);
    }
}

TEST_CASE("invariant: H_w labels never coexist with certified nonzero limits") {
    RecurrencePolicy policy;
    auto cantor_label = classify_component(OperatorModel::cyclic_unitary(cantor()), policy);
    CHECK(cantor_label.label == SubspaceLabel::H_m); // certified V = mu^(1) I, nonzero
    // H_w components have vanishing estimates at the final index
    auto shift = OperatorModel::unilateral_shift(8);
    auto est = limit_operator_estimate(shift, SequenceSpec::powers(2, 6),
                                       {VectorRep::basis(0), VectorRep::basis(1)}, 1e-12);
    for (const auto& row : est.matrix_elements)
        for (const auto& v : row) CHECK(std::abs(v.value) <= 1e-12);
    auto leb = OperatorModel::cyclic_unitary(CircleMeasure::lebesgue());
    auto est2 = limit_operator_estimate(leb, SequenceSpec::powers(2, 6),
                                        {VectorRep::e(0), VectorRep::e(1)}, 1e-12);
    for (const auto& row : est2.matrix_elements)
        for (const auto& v : row) CHECK(std::abs(v.value) <= 1e-12);
}

TEST_CASE("invariant: frame orbit of a wPr vector is adjoint-symmetric") {
    // {U^n x : |n| <= N} and the adjoint orbit have identical index sets
    auto model = OperatorModel::cyclic_unitary(cantor());
    for (long long n = -8; n <= 8; ++n) {
        VectorRep fwd = apply_power(model, n, VectorRep::e(0));
        VectorRep adj = apply_adjoint_power(model, std::abs(n), VectorRep::e(0));
        if (n <= 0) {
            REQUIRE(fwd.coeffs().size() == 1);
            CHECK(fwd.coeffs().begin()->first == adj.coeffs().begin()->first);
        }
        CHECK(fwd.coeffs().begin()->first == n);
    }
}

TEST_CASE("invariant: contraction bound on scanned estimates") {
    std::mt19937_64 rng(20241201);
    auto model = OperatorModel::cyclic_unitary(cantor());
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        VectorRep::SparseMap xm, ym;
        for (int i = 0; i < 3; ++i) {
            xm[static_cast<long long>(rng() % 9) - 4] = {coef(rng), coef(rng)};
            ym[static_cast<long long>(rng() % 9) - 4] = {coef(rng), coef(rng)};
        }
        VectorRep x = VectorRep::frequencies(xm);
        VectorRep y = VectorRep::frequencies(ym);
        double nx = vector_norm(model, x, 1e-12).value.real();
        double ny = vector_norm(model, y, 1e-12).value.real();
        long long n = static_cast<long long>(rng() % 1000);
        FourierValue v = inner_product(model, apply_power(model, n, x), y, 1e-12);
        CHECK(std::abs(v.value) <= nx * ny + 1e-9);
    }
}
