/*
 * cayley.hpp — bridge between a unitary cogenerator and its C_0 group
 *
 * The Cayley transform z = (i - lambda)/(i + lambda) identifies the line with
 * the circle minus one point. With theta = arg(z)/(2 pi) normalized to [0,1),
 *
 *     lambda(theta) = tan(pi theta),       theta(lambda) = arctan(lambda)/pi mod 1,
 *
 * so z = e^{2 pi i theta} and the excluded point is theta = 1/2 (lambda = inf).
 * This normalization makes the operator identity (iI - A)(iI + A)^{-1} = U hold
 * at the spectral level; measures with mass at theta = 1/2 are rejected.
 *
 * Group elements act weakly: <U_t x, y> = ∫ e^{i t lambda(theta)} Phi_{x,y}(theta) dmu
 * with Phi_{x,y} the finite Laurent polynomial of the coefficient pairings.
 * Integrals are evaluated by refinement quadrature with a per-cell Lipschitz
 * bound; cells within 2^{-depth} of the pole contribute their raw mass to the
 * error bound instead of a function value.
 *
 * Two identities make the resolvent and generator targets oracle-exact:
 *     (1 - i lambda(theta))^{-1}          = (1 + e^{2 pi i theta})/2
 *     i lambda(theta) (1 - i lambda)^{-1} = (e^{2 pi i theta} - 1)/2
 */
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "specdyn/measure.hpp"
#include "specdyn/model.hpp"

namespace specdyn {

struct CayleyAngleMap {
    // tan(pi theta), evaluated in pole-shifted form near theta = 1/2.
    // Throws std::domain_error at the pole itself.
    static double lambda_of_theta(double theta);
    // arctan(lambda)/pi reduced to [0,1); accurate through the pole region.
    static double theta_of_lambda(double lambda);
    static Complex cayley_z(double lambda); // (i - lambda)/(i + lambda)
};

// Pushforward of a circle measure to the real line under lambda(theta).
class LineMeasure {
public:
    const CircleMeasure& source() const { return *source_; }

    // characteristic function nu^(t) = ∫ e^{i t lambda(theta)} dmu(theta)
    FourierValue characteristic(double t, double tol) const;

    // image atoms (lambda, weight) for atomic sources
    std::vector<std::pair<double, double>> atoms() const;

private:
    friend LineMeasure pushforward_to_line(const CircleMeasure& mu);
    std::shared_ptr<const CircleMeasure> source_;
};

// Rejects measures with mass at theta = 1/2 (exactly for atoms; by a depth-20
// cylinder mass bound <= 1e-9 for continuous parts).
LineMeasure pushforward_to_line(const CircleMeasure& mu);

// Laurent polynomial sum_r coef_r e^{2 pi i r theta}.
using LaurentPoly = std::map<long long, Complex>;

// coefficient pairings of x against y: Phi(theta) with <U_t x, y> = ∫ e^{itl} Phi dmu
LaurentPoly pairing_poly(const VectorRep& x, const VectorRep& y);

// A cyclic-unitary model together with cached line-side quadrature rules.
class CayleyBridge {
public:
    explicit CayleyBridge(OperatorModel cyclic_model,
                          std::size_t node_budget = std::size_t(1) << 24);

    const OperatorModel& model() const { return model_; }
    const CircleMeasure& measure() const { return model_.measure(); }
    const LineMeasure& line_measure() const { return line_; }

    // Certified ∫ g(lambda(theta)) Phi(theta) dmu for |g| <= g_sup, |g'| <= g_lip.
    FourierValue integrate(const std::function<Complex(double)>& g, double g_sup,
                           double g_lip, const LaurentPoly& phi, double tol) const;

    struct Rule; // per-depth line quadrature rule
    std::shared_ptr<const Rule> rule_for(double error_budget, double g_sup, double g_lip,
                                         double poly_abs_sum, double poly_lip) const;

private:
    OperatorModel model_;
    LineMeasure line_;
    std::size_t node_budget_;
    mutable std::mutex cache_mutex_;
    mutable std::map<int, std::shared_ptr<const Rule>> rules_;
};

// Weak evaluation map representing U_t x: pairs against test vectors.
class GroupElement {
public:
    GroupElement(std::shared_ptr<const CayleyBridge> bridge, double t, VectorRep x, double tol);

    // <U_t x, y> with certified bound <= tol
    FourierValue pair_with(const VectorRep& y) const;
    double time() const { return t_; }

private:
    std::shared_ptr<const CayleyBridge> bridge_;
    double t_;
    VectorRep x_;
    double tol_;
};

GroupElement apply_group(std::shared_ptr<const CayleyBridge> bridge, double t,
                         const VectorRep& x, double tol);

// Repeated-t evaluation of <U_t x, y> over a fixed rule chosen for |t| <= t_max.
class GroupScanner {
public:
    GroupScanner(const CayleyBridge& bridge, const VectorRep& x, const VectorRep& y,
                 double tol, double t_max);
    FourierValue at(double t) const;

private:
    std::shared_ptr<const CayleyBridge::Rule> rule_;
    std::vector<double> lambda_;
    std::vector<Complex> phi_weight_;
    double base_bound_ = 0.0; // t-independent part of the certified bound
    double slope_bound_ = 0.0; // coefficient of |t|
};

struct ResolventComparison {
    Complex spectral;        // sum_r coef_r (mu^(r) + mu^(r+1))/2
    double spectral_bound;
    Complex laplace;         // ∫_0^inf e^{-t} <U_t x, y> dt by adaptive Simpson
    double laplace_bound;
    double discrepancy;      // |spectral - laplace|
};

// <(I - iA)^{-1} x, y> computed two independent ways.
ResolventComparison resolvent_two_ways(const CayleyBridge& bridge, const VectorRep& x,
                                       const VectorRep& y, double tol);

struct DifferenceQuotients {
    std::vector<Complex> quotients; // <(1/t)(U_t - I)(I - iA)^{-1} x, y> per t
    std::vector<double> bounds;
    Complex target;                 // ∫ i lambda (1 - i lambda)^{-1} dnu_{x,y}, oracle route
    double target_bound;
};

DifferenceQuotients generator_difference_quotient(const CayleyBridge& bridge,
                                                  const VectorRep& x, const VectorRep& y,
                                                  const std::vector<double>& t_list, double tol);

} // namespace specdyn
