/*
 * measure.hpp — computable probability measures on the circle [0,1)
 *
 * Every measure carries a Fourier–Stieltjes oracle
 *
 *     mu^(xi) = ∫ e^{2 pi i xi theta} dmu(theta)
 *
 * returning a value together with a certified absolute error bound.
 *
 * Variants and their oracles:
 *   Atomic              mu^(xi) = sum_a w_a e^{2 pi i xi theta_a}        (exact)
 *   Lebesgue            mu^(xi) = (e^{2 pi i xi} - 1)/(2 pi i xi)        (exact)
 *   TrigDensity         dmu = g dtheta, g = sum_k c_k e^{2 pi i k theta} (exact)
 *   SelfSimilar         mu = sum_d p_d mu∘S_d^{-1}, S_d(t) = (t+d)/b:
 *                       mu^(xi) = m(xi/b) mu^(xi/b),  m(t) = sum_d p_d e^{2 pi i t d},
 *                       truncated at depth J with tail |mu^(eta) - 1| <= 2 pi |eta|
 *   InfiniteConvolution mu = *_j (1/2)(delta_0 + delta_{b^{-n_j}}):
 *                       mu^(xi) = prod_j (1/2)(1 + e^{2 pi i xi b^{-n_j}}),
 *                       tail sum_{j>J} pi |xi| b^{-n_j}
 *   Mixture             convex combination of the above
 *
 * Quadrature produces refinement rules (IFS cylinder leaves, partial-convolution
 * atoms, uniform composite cells) whose integration error for a Lipschitz-L
 * integrand is L * cell_diameter.
 *
 * All measures are immutable after construction; every operation is pure.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace specdyn {

using Complex = std::complex<double>;

// e^{2 pi i t}, with the argument reduced to [-1/2, 1/2] before the trig
// calls so that integer t gives exactly 1.
Complex unit_phase(double t);

// A complex number with a certified absolute error bound.
struct FourierValue {
    Complex value{0.0, 0.0};
    double error_bound = 0.0;

    FourierValue() = default;
    FourierValue(Complex v, double b) : value(v), error_bound(b) {}
};

// Requested precision cannot be certified within the configured budget.
// Carries the best bound that *is* achievable.
class PrecisionError : public std::runtime_error {
public:
    PrecisionError(const std::string& what, double best)
        : std::runtime_error(what), best_achievable(best) {}
    double best_achievable;
};

// A quadrature or scan request exceeds the configured node budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Angle on the circle, stored modulo 1. Exact rational when constructed from
// one (reproducible quadrature nodes, exact pole tests); plain double otherwise.
class Angle {
public:
    Angle() = default;
    static Angle of(double v);                        // reduced mod 1
    static Angle rational(long long num, long long den);

    double value() const { return value_; }
    bool is_rational() const { return rational_; }
    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_half() const;                             // exact test for theta = 1/2

private:
    double value_ = 0.0;
    bool rational_ = false;
    long long num_ = 0, den_ = 1;
};

struct Atom {
    Angle angle;
    double weight = 0.0;
};

// Strictly increasing positive exponent sequence n_1 < n_2 < ..., either
// rule-generated (n_j = base^j) or an explicit finite list.
struct ExponentRule {
    enum class Form { Power, Explicit };
    Form form = Form::Power;
    long long power_base = 2;
    std::vector<long long> entries;

    static ExponentRule power(long long base);
    static ExponentRule explicit_list(std::vector<long long> list);

    // 1-based. Power-rule exponents are clamped at 2^62 (factors with such
    // exponents are numerically exactly 1 anyway).
    long long exponent(int j) const;
    // Explicit lists define a *finite* convolution: no factors past the list.
    bool finite() const { return form == Form::Explicit; }
    int factor_limit(int j_max) const;
};

class CircleMeasure {
public:
    enum class Kind { Atomic, Lebesgue, TrigDensity, SelfSimilar, InfiniteConvolution, Mixture };

    static CircleMeasure atomic(std::vector<Atom> atoms);
    static CircleMeasure lebesgue();
    // Density coefficients c_k of g(theta) = sum c_k e^{2 pi i k theta}.
    // Requires c_0 = 1; missing negative frequencies are filled with the
    // conjugates; a 4096-point sampled minimum below -1e-9 is rejected.
    static CircleMeasure trig_density(std::map<long long, Complex> coeffs);
    static CircleMeasure self_similar(int base, std::vector<int> digits,
                                      std::vector<double> weights);
    static CircleMeasure infinite_convolution(int base, ExponentRule rule, int j_max = 64);
    static CircleMeasure mixture(std::vector<std::pair<CircleMeasure, double>> parts);

    Kind kind() const { return kind_; }

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::map<long long, Complex>& density_coeffs() const { return coeffs_; }
    int base() const { return base_; }
    const std::vector<int>& digits() const { return digits_; }
    const std::vector<double>& digit_weights() const { return weights_; }
    const ExponentRule& exponents() const { return rule_; }
    int j_max() const { return j_max_; }
    const std::vector<std::pair<CircleMeasure, double>>& parts() const { return parts_; }

    // True when the measure has no atomic part (Lebesgue/TrigDensity/
    // SelfSimilar with >= 2 digits/InfiniteConvolution, and mixtures thereof).
    bool is_continuous() const;

    // Upper bound for the mass of [center-radius, center+radius], computed by
    // walking the refinement tree (exact for Atomic). Used for pole checks.
    double mass_near(double center, double radius, int depth) const;

    std::string describe() const;

private:
    CircleMeasure() = default;

    Kind kind_ = Kind::Lebesgue;
    std::vector<Atom> atoms_;
    std::map<long long, Complex> coeffs_;
    int base_ = 0;
    std::vector<int> digits_;
    std::vector<double> weights_;
    ExponentRule rule_;
    int j_max_ = 64;
    std::vector<std::pair<CircleMeasure, double>> parts_;
};

// mu^(xi) with certified error bound <= tol.
// Throws std::invalid_argument for tol <= 0 and PrecisionError when an
// InfiniteConvolution tail cannot reach tol within its j_max cap.
FourierValue fourier_stieltjes(const CircleMeasure& mu, double xi, double tol);

// W_N = (1/N) sum_{n=1}^{N} |mu^(n)|^2, each term at tol = 1e-12.
// W_N -> sum of squared atom masses (Wiener).
double wiener_atom_index(const CircleMeasure& mu, long long n_terms);

struct QuadNode {
    double theta = 0.0;
    double weight = 0.0;
};

struct QuadratureRule {
    std::vector<QuadNode> nodes;
    // Integration error for a Lipschitz-L integrand is <= L * cell_diameter.
    double cell_diameter = 0.0;
};

inline constexpr std::size_t kDefaultNodeBudget = std::size_t(1) << 26;

// Refinement quadrature; weights sum to 1. Throws BudgetError when the leaf
// count exceeds the node budget.
QuadratureRule quadrature(const CircleMeasure& mu, int depth,
                          std::size_t node_budget = kDefaultNodeBudget);

// Streaming form of the same rule (identical nodes, identical order), for
// depths whose leaf count should not be materialized.
void for_each_quad_node(const CircleMeasure& mu, int depth,
                        const std::function<void(double theta, double weight)>& fn,
                        std::size_t node_budget = kDefaultNodeBudget);

// Leaf count and cell diameter of the depth-d rule without generating it.
std::size_t quad_node_count(const CircleMeasure& mu, int depth);
double quad_cell_diameter(const CircleMeasure& mu, int depth);

} // namespace specdyn
