#include <doctest.h>

#include <cmath>
#include <random>

#include "specdyn/laguerre.hpp"
#include "specdyn/model.hpp"

using namespace specdyn;

namespace {

CircleMeasure cantor() {
    return CircleMeasure::self_similar(3, {0, 2}, {0.5, 0.5});
}

OperatorModel jordan_half() {
    // lower-triangular single-eigenvalue block, off-diagonal 0.5 (norm ~ 0.809)
    ComplexMatrix j(2);
    j.at(0, 0) = 0.5;
    j.at(1, 0) = 0.5;
    j.at(1, 1) = 0.5;
    return OperatorModel::finite_contraction(std::move(j));
}

VectorRep random_freq_vector(std::mt19937_64& rng, int max_terms = 4, long long span = 10) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    VectorRep::SparseMap m;
    int terms = 1 + static_cast<int>(rng() % max_terms);
    for (int i = 0; i < terms; ++i)
        m[static_cast<long long>(rng() % (2 * span + 1)) - span] = {coef(rng), coef(rng)};
    return VectorRep::frequencies(std::move(m));
}

// brute-force power oracle: plain repeated matrix-vector products
std::vector<Complex> naive_power_apply(const ComplexMatrix& m, long long n,
                                       std::vector<Complex> v) {
    for (long long step = 0; step < n; ++step) {
        std::vector<Complex> next(m.n, Complex(0.0, 0.0));
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j) next[i] += m.at(i, j) * v[j];
        v = std::move(next);
    }
    return v;
}

} // namespace

TEST_CASE("cyclic inner products are Fourier coefficients") {
    auto model = OperatorModel::cyclic_unitary(cantor());
    SUBCASE("e_0 against itself is the total mass") {
        FourierValue v = inner_product(model, VectorRep::e(0), VectorRep::e(0), 1e-12);
        CHECK(v.value == Complex(1.0, 0.0));
    }
    SUBCASE("e_1 against e_0 is mu^(1), cross-checked by quadrature") {
        FourierValue v = inner_product(model, VectorRep::e(1), VectorRep::e(0), 1e-12);
        FourierValue direct = fourier_stieltjes(cantor(), 1.0, 1e-12);
        CHECK(std::abs(v.value - direct.value) == 0.0);
        Complex acc{0.0, 0.0};
        for (const auto& node : quadrature(cantor(), 20).nodes)
            acc += node.weight * unit_phase(node.theta);
        CHECK(std::abs(v.value - acc) <= 1e-8);
    }
}

TEST_CASE("shift basis vectors are orthonormal") {
    auto model = OperatorModel::unilateral_shift(8);
    CHECK(inner_product(model, VectorRep::basis(0), VectorRep::basis(1), 1e-12).value ==
          Complex(0.0, 0.0));
    CHECK(inner_product(model, VectorRep::basis(3), VectorRep::basis(3), 1e-12).value ==
          Complex(1.0, 0.0));
    CHECK(inner_product(model, VectorRep::basis(0), VectorRep::basis(1), 1e-12).error_bound == 0.0);
}

TEST_CASE("powers shift indices exactly") {
    SUBCASE("forward shift") {
        auto model = OperatorModel::unilateral_shift(8);
        VectorRep v = apply_power(model, 3, VectorRep::basis(0));
        REQUIRE(v.coeffs().size() == 1);
        CHECK(v.coeffs().begin()->first == 3);
        CHECK_THROWS_AS(apply_power(model, -1, VectorRep::basis(2)), std::invalid_argument);
    }
    SUBCASE("negative cyclic powers are exact index arithmetic") {
        auto model = OperatorModel::cyclic_unitary(cantor());
        VectorRep v = apply_power(model, -2, VectorRep::e(5));
        REQUIRE(v.coeffs().size() == 1);
        CHECK(v.coeffs().begin()->first == 3);
        CHECK(v.coeffs().begin()->second == Complex(1.0, 0.0));
    }
    SUBCASE("finite block power matches the brute-force oracle") {
        auto model = jordan_half();
        VectorRep x = VectorRep::dense({Complex(1.0, 0.0), Complex(0.0, 0.0)});
        VectorRep y = apply_power(model, 10, x);
        auto oracle = naive_power_apply(model.matrix(), 10, x.dense_coeffs());
        CHECK(std::abs(y.dense_coeffs()[0] - oracle[0]) <= 1e-15);
        CHECK(std::abs(y.dense_coeffs()[1] - oracle[1]) <= 1e-15);
        CHECK(y.dense_coeffs()[0].real() == doctest::Approx(std::pow(0.5, 10)).epsilon(1e-12));
        CHECK(y.dense_coeffs()[1].real() ==
              doctest::Approx(10.0 * std::pow(0.5, 9) * 0.5).epsilon(1e-12));
    }
}

TEST_CASE("adjoint powers") {
    auto shift = OperatorModel::unilateral_shift(8);
    CHECK(apply_adjoint_power(shift, 1, VectorRep::basis(0)).is_zero());
    VectorRep v = apply_adjoint_power(shift, 1, VectorRep::basis(1));
    REQUIRE(v.coeffs().size() == 1);
    CHECK(v.coeffs().begin()->first == 0);

    auto cyclic = OperatorModel::cyclic_unitary(cantor());
    VectorRep w = apply_adjoint_power(cyclic, 4, VectorRep::e(1));
    REQUIRE(w.coeffs().size() == 1);
    CHECK(w.coeffs().begin()->first == -3);
}

TEST_CASE("construction rejects expansions and mismatched shapes") {
    ComplexMatrix too_big(2);
    too_big.at(0, 0) = 0.5;
    too_big.at(0, 1) = 1.0; // unit off-diagonal block has norm ~1.207
    too_big.at(1, 1) = 0.5;
    CHECK_THROWS_AS(OperatorModel::finite_contraction(std::move(too_big)), std::invalid_argument);

    auto model = OperatorModel::cyclic_unitary(cantor());
    CHECK_THROWS_AS(inner_product(model, VectorRep::basis(0), VectorRep::e(0), 1e-12),
                    std::invalid_argument);
}

TEST_CASE("negative powers of a unitary finite block fall back to the adjoint") {
    ComplexMatrix u(2);
    u.at(0, 0) = std::polar(1.0, 0.7);
    u.at(1, 1) = std::polar(1.0, -1.3);
    auto model = OperatorModel::finite_contraction(std::move(u));
    VectorRep x = VectorRep::dense({Complex(0.3, 0.1), Complex(-0.2, 0.5)});
    VectorRep back = apply_power(model, -3, apply_power(model, 3, x));
    for (int i = 0; i < 2; ++i)
        CHECK(std::abs(back.dense_coeffs()[i] - x.dense_coeffs()[i]) <= 1e-14);
    CHECK_THROWS_AS(apply_power(jordan_half(), -1, VectorRep::dense({{1.0, 0.0}, {0.0, 0.0}})),
                    std::invalid_argument);
}

// ---------------------------------------------------------------------------
// translation semigroup

TEST_CASE("translation semigroup in the Laguerre basis") {
    auto model = OperatorModel::unilateral_shift(8);
    SUBCASE("t = 0 is the identity, exactly") {
        VectorRep x = VectorRep::indices({{0, {0.5, 0.0}}, {3, {0.0, -0.5}}});
        TranslationResult r = shift_semigroup_element(model, 0.0, x, 1e-10);
        CHECK(r.projected.coeffs() == x.coeffs());
        CHECK(r.tail_mass == 0.0);
        CHECK(r.error_bound == 0.0);
    }
    SUBCASE("long translation empties every fixed mode") {
        TranslationResult r = shift_semigroup_element(model, 50.0, VectorRep::basis(0), 1e-8);
        double max_coeff = 0.0;
        for (const auto& [j, c] : r.projected.coeffs()) {
            (void)j;
            max_coeff = std::max(max_coeff, std::abs(c));
        }
        CHECK(max_coeff <= 1e-4);  // pre-build oracle: true max is 2.445e-12
        CHECK(max_coeff <= 1e-7);
        CHECK(r.tail_mass == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("isometry: reported mass plus tail is the full norm") {
        TranslationResult r = shift_semigroup_element(model, 1.0, VectorRep::basis(0), 1e-10);
        double mass = 0.0;
        for (const auto& [j, c] : r.projected.coeffs()) {
            (void)j;
            mass += std::norm(c);
        }
        CHECK(mass + r.tail_mass == doctest::Approx(1.0).epsilon(1e-6));
        // pre-build oracle: sum_{j<8} C_j0(1)^2 = 0.823107214956
        CHECK(mass == doctest::Approx(0.823107214956).epsilon(1e-8));
    }
    SUBCASE("frozen oracle coefficients at t = 1") {
        auto c00 = translation_coefficient(0, 0, 1.0, 1e-10);
        auto c10 = translation_coefficient(1, 0, 1.0, 1e-10);
        CHECK(c00.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
        CHECK(c10.value == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-10));
    }
    SUBCASE("the analytic multiplier is lower triangular") {
        CHECK(translation_coefficient(0, 1, 1.0, 1e-10).value == 0.0);
        CHECK(translation_coefficient(2, 3, 0.7, 1e-10).value == 0.0);
    }
    SUBCASE("support past the window is rejected") {
        CHECK_THROWS_AS(shift_semigroup_element(model, 1.0, VectorRep::basis(9), 1e-8),
                        std::invalid_argument);
    }
}

// ---------------------------------------------------------------------------
// property suites

TEST_CASE("property: cyclic powers preserve inner products exactly") {
    std::mt19937_64 rng(20241001);
    auto model = OperatorModel::cyclic_unitary(cantor());
    for (int trial = 0; trial < 200; ++trial) {
        VectorRep x = random_freq_vector(rng);
        VectorRep y = random_freq_vector(rng);
        long long n = static_cast<long long>(rng() % 201) - 100;
        FourierValue before = inner_product(model, x, y, 1e-12);
        FourierValue after =
            inner_product(model, apply_power(model, n, x), apply_power(model, n, y), 1e-12);
        CHECK(after.value == before.value); // same pairings, bit for bit
    }
}

TEST_CASE("property: single application is a contraction") {
    std::mt19937_64 rng(20241002);
    auto cyclic = OperatorModel::cyclic_unitary(cantor());
    auto shift = OperatorModel::unilateral_shift(8);
    auto finite = jordan_half();
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        VectorRep x = random_freq_vector(rng);
        double norm_before = vector_norm(cyclic, x, 1e-12).value.real();
        double norm_after = vector_norm(cyclic, apply_power(cyclic, 1, x), 1e-12).value.real();
        CHECK(norm_after <= norm_before + 1e-9);

        VectorRep::SparseMap im;
        for (int i = 0; i < 3; ++i) im[rng() % 6] = {coef(rng), coef(rng)};
        VectorRep ix = VectorRep::indices(std::move(im));
        CHECK(vector_norm(shift, apply_power(shift, 1, ix), 1e-12).value.real() <=
              vector_norm(shift, ix, 1e-12).value.real() + 1e-9);

        VectorRep dx = VectorRep::dense({{coef(rng), coef(rng)}, {coef(rng), coef(rng)}});
        CHECK(vector_norm(finite, apply_power(finite, 1, dx), 1e-12).value.real() <=
              vector_norm(finite, dx, 1e-12).value.real() + 1e-9);
    }
}

TEST_CASE("property: direct-sum components are orthogonal") {
    std::mt19937_64 rng(20241003);
    auto model = OperatorModel::direct_sum(
        {OperatorModel::cyclic_unitary(cantor()), OperatorModel::unilateral_shift(8)});
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        VectorRep left = VectorRep::direct_sum({random_freq_vector(rng), VectorRep::indices({})});
        VectorRep right = VectorRep::direct_sum(
            {VectorRep::frequencies({}),
             VectorRep::indices({{static_cast<long long>(rng() % 5), {coef(rng), coef(rng)}}})});
        CHECK(inner_product(model, left, right, 1e-12).value == Complex(0.0, 0.0));
    }
}

TEST_CASE("property: shift pairings vanish past the support spread") {
    std::mt19937_64 rng(20241004);
    auto shift = OperatorModel::unilateral_shift(16);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        VectorRep::SparseMap xm, ym;
        long long x_max = 0, y_max = 0;
        for (int i = 0; i < 3; ++i) {
            long long kx = rng() % 8, ky = rng() % 8;
            xm[kx] = {coef(rng), coef(rng)};
            ym[ky] = {coef(rng), coef(rng)};
            x_max = std::max(x_max, kx);
            y_max = std::max(y_max, ky);
        }
        VectorRep x = VectorRep::indices(std::move(xm));
        VectorRep y = VectorRep::indices(std::move(ym));
        long long n = y_max + 1; // shifted support starts above y entirely
        CHECK(inner_product(shift, apply_power(shift, n, x), y, 1e-12).value ==
              Complex(0.0, 0.0));
    }
}

TEST_CASE("property: adjoint consistency of the pairing") {
    std::mt19937_64 rng(20241005);
    auto cyclic = OperatorModel::cyclic_unitary(cantor());
    auto finite = jordan_half();
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        VectorRep x = random_freq_vector(rng);
        VectorRep y = random_freq_vector(rng);
        Complex lhs = inner_product(cyclic, apply_power(cyclic, 1, x), y, 1e-12).value;
        Complex rhs = inner_product(cyclic, x, apply_adjoint_power(cyclic, 1, y), 1e-12).value;
        CHECK(std::abs(lhs - rhs) <= 1e-10);

        VectorRep dx = VectorRep::dense({{coef(rng), coef(rng)}, {coef(rng), coef(rng)}});
        VectorRep dy = VectorRep::dense({{coef(rng), coef(rng)}, {coef(rng), coef(rng)}});
        Complex fl = inner_product(finite, apply_power(finite, 1, dx), dy, 1e-12).value;
        Complex fr = inner_product(finite, dx, apply_adjoint_power(finite, 1, dy), 1e-12).value;
        CHECK(std::abs(fl - fr) <= 1e-12);
    }
}
