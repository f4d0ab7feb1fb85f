#include "specdyn/cayley.hpp"

#include <algorithm>
#include <cmath>

namespace specdyn {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

// ---------------------------------------------------------------------------
// CayleyAngleMap

double CayleyAngleMap::lambda_of_theta(double theta) {
    double r = theta - std::nearbyint(theta); // [-1/2, 1/2]
    if (std::abs(r) <= 0.25) return std::tan(kPi * r);
    double s = r - (r > 0 ? 0.5 : -0.5); // (-1/4, 1/4), 0 at the pole
    if (s == 0.0) throw std::domain_error("lambda_of_theta: theta = 1/2 is the excluded point");
    return -1.0 / std::tan(kPi * s);
}

double CayleyAngleMap::theta_of_lambda(double lambda) {
    if (std::abs(lambda) <= 1.0) {
        double th = std::atan(lambda) / kPi; // [-1/4, 1/4]
        return th < 0.0 ? th + 1.0 : th;
    }
    return 0.5 - std::atan(1.0 / lambda) / kPi; // (1/4, 1/2) or (1/2, 3/4)
}

Complex CayleyAngleMap::cayley_z(double lambda) {
    return (Complex(0.0, 1.0) - lambda) / (Complex(0.0, 1.0) + lambda);
}

// ---------------------------------------------------------------------------
// pushforward

LineMeasure pushforward_to_line(const CircleMeasure& mu) {
    if (mu.kind() == CircleMeasure::Kind::Atomic) {
        for (const auto& a : mu.atoms())
            if (a.angle.is_half())
                throw std::invalid_argument(
                    "pushforward_to_line: atom at the excluded point theta = 1/2");
    }
    if (mu.kind() == CircleMeasure::Kind::Mixture) {
        for (const auto& [part, w] : mu.parts()) {
            (void)w;
            pushforward_to_line(part); // component checks
        }
    } else if (mu.kind() == CircleMeasure::Kind::SelfSimilar ||
               mu.kind() == CircleMeasure::Kind::InfiniteConvolution) {
        // Lebesgue/TrigDensity have bounded densities, hence no point mass
        // anywhere; the cylinder walk covers the singular variants.
        constexpr int kDepth = 20;
        double cell = quad_cell_diameter(mu, kDepth);
        double mass = mu.mass_near(0.5, std::max(cell, 0x1p-20), kDepth);
        if (mass > 1e-9)
            throw std::invalid_argument(
                "pushforward_to_line: cylinder mass at theta = 1/2 exceeds 1e-9");
    }
    LineMeasure nu;
    nu.source_ = std::make_shared<const CircleMeasure>(mu);
    return nu;
}

std::vector<std::pair<double, double>> LineMeasure::atoms() const {
    if (source_->kind() != CircleMeasure::Kind::Atomic)
        throw std::invalid_argument("LineMeasure::atoms: source is not atomic");
    std::vector<std::pair<double, double>> out;
    out.reserve(source_->atoms().size());
    for (const auto& a : source_->atoms())
        out.emplace_back(CayleyAngleMap::lambda_of_theta(a.angle.value()), a.weight);
    return out;
}

// ---------------------------------------------------------------------------
// pairing polynomial

LaurentPoly pairing_poly(const VectorRep& x, const VectorRep& y) {
    if (x.kind() != VectorRep::Kind::Frequencies || y.kind() != VectorRep::Kind::Frequencies)
        throw std::invalid_argument("pairing_poly: cyclic-component vectors required");
    LaurentPoly phi;
    for (const auto& [n, cn] : x.coeffs())
        for (const auto& [m, dm] : y.coeffs()) phi[n - m] += cn * std::conj(dm);
    return phi;
}

namespace {

double poly_abs_sum(const LaurentPoly& p) {
    double s = 0.0;
    for (const auto& [r, c] : p) {
        (void)r;
        s += std::abs(c);
    }
    return s;
}

double poly_lipschitz(const LaurentPoly& p) {
    double s = 0.0;
    for (const auto& [r, c] : p) s += 2.0 * kPi * std::abs(r) * std::abs(c);
    return s;
}

Complex poly_eval(const LaurentPoly& p, double theta) {
    Complex acc{0.0, 0.0};
    for (const auto& [r, c] : p) acc += c * unit_phase(static_cast<double>(r) * theta);
    return acc;
}

} // namespace

// ---------------------------------------------------------------------------
// line rule

struct CayleyBridge::Rule {
    int depth = 0;
    double cell = 0.0;          // cylinder diameter
    double diverted_mass = 0.0; // mass of cells near the pole
    double weight_sum = 0.0;    // S0 over kept cells
    double lambda_moment = 0.0; // S2 = sum w (1 + lambda_sup^2)
    std::vector<double> theta;
    std::vector<double> weight;
    std::vector<double> lambda;

    // certified integration error for |g| <= g_sup, |g'| <= g_lip against a
    // polynomial with |Phi| <= B and Lipschitz constant L
    double bound(double g_sup, double g_lip, double B, double L) const {
        return cell * (g_lip * kPi * lambda_moment * B + g_sup * L * weight_sum) +
               diverted_mass * g_sup * B;
    }
};

namespace {

// sup |tan(pi .)| over [theta, theta+cell]: attained at the end nearest 1/2
double lambda_sup_on_cell(double theta, double cell) {
    double lo = theta, hi = theta + cell;
    double a = std::abs(CayleyAngleMap::lambda_of_theta(lo));
    double b = std::abs(CayleyAngleMap::lambda_of_theta(hi));
    return std::max(a, b);
}

double dist_to_half(double lo, double hi) {
    // distance from [lo, hi] to 1/2 + Z
    double best = 1e300;
    for (double pole : {-0.5, 0.5, 1.5}) {
        if (lo <= pole && pole <= hi) return 0.0;
        best = std::min(best, std::min(std::abs(lo - pole), std::abs(hi - pole)));
    }
    return best;
}

} // namespace

CayleyBridge::CayleyBridge(OperatorModel cyclic_model, std::size_t node_budget)
    : model_(std::move(cyclic_model)), node_budget_(node_budget) {
    if (model_.kind() != OperatorModel::Kind::CyclicUnitary)
        throw std::invalid_argument("CayleyBridge: cyclic unitary model required");
    line_ = pushforward_to_line(model_.measure());
}

std::shared_ptr<const CayleyBridge::Rule> CayleyBridge::rule_for(double error_budget,
                                                                 double g_sup, double g_lip,
                                                                 double B, double L) const {
    const CircleMeasure& mu = measure();
    if (mu.kind() == CircleMeasure::Kind::Atomic) {
        // atoms are exact; build once at depth 0
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = rules_.find(0);
        if (it == rules_.end()) {
            auto rule = std::make_shared<Rule>();
            rule->depth = 0;
            for (const auto& a : mu.atoms()) {
                rule->theta.push_back(a.angle.value());
                rule->weight.push_back(a.weight);
                double lam = CayleyAngleMap::lambda_of_theta(a.angle.value());
                rule->lambda.push_back(lam);
                rule->weight_sum += a.weight;
                rule->lambda_moment += a.weight * (1.0 + lam * lam);
            }
            it = rules_.emplace(0, std::move(rule)).first;
        }
        return it->second;
    }

    double best_bound = 1e300;
    double prev_bound = 1e300;
    for (int depth = 4; depth <= 40; ++depth) {
        if (quad_node_count(mu, depth) > node_budget_)
            throw PrecisionError("CayleyBridge: node budget reached before certified bound " +
                                     std::to_string(error_budget),
                                 best_bound);
        std::shared_ptr<const Rule> rule;
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = rules_.find(depth);
            if (it != rules_.end()) rule = it->second;
        }
        if (!rule) {
            auto fresh = std::make_shared<Rule>();
            fresh->depth = depth;
            fresh->cell = quad_cell_diameter(mu, depth);
            double divert = std::max(std::ldexp(1.0, -depth), fresh->cell);
            // the widened window [th-cell, th+cell] covers both left-endpoint
            // and midpoint node conventions
            for_each_quad_node(mu, depth, [&](double th, double w) {
                if (dist_to_half(th - fresh->cell, th + fresh->cell) < divert) {
                    fresh->diverted_mass += w;
                    return;
                }
                double lam_sup = lambda_sup_on_cell(th - fresh->cell, 2.0 * fresh->cell);
                fresh->theta.push_back(th);
                fresh->weight.push_back(w);
                fresh->lambda.push_back(CayleyAngleMap::lambda_of_theta(th));
                fresh->weight_sum += w;
                fresh->lambda_moment += w * (1.0 + lam_sup * lam_sup);
            }, node_budget_);
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto [it, inserted] = rules_.emplace(depth, std::move(fresh));
            (void)inserted;
            rule = it->second;
        }
        double bound = rule->bound(g_sup, g_lip, B, L);
        best_bound = std::min(best_bound, bound);
        if (bound <= error_budget) return rule;
        // a stalled bound means refinement cannot certify (mass piles up at
        // the pole faster than the cells shrink); fail fast
        if (depth > 6 && bound > 0.7 * prev_bound)
            throw PrecisionError("CayleyBridge: certified bound stalled at depth " +
                                     std::to_string(depth),
                                 best_bound);
        prev_bound = bound;
    }
    throw PrecisionError("CayleyBridge: certified bound unreachable at depth 40", best_bound);
}

FourierValue CayleyBridge::integrate(const std::function<Complex(double)>& g, double g_sup,
                                     double g_lip, const LaurentPoly& phi, double tol) const {
    if (!(tol > 0.0)) throw std::invalid_argument("CayleyBridge::integrate: tol must be > 0");
    double B = poly_abs_sum(phi);
    if (B == 0.0) return {Complex(0.0, 0.0), 0.0};
    double L = poly_lipschitz(phi);
    auto rule = rule_for(tol, g_sup, g_lip, B, L);
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < rule->theta.size(); ++i)
        acc += rule->weight[i] * g(rule->lambda[i]) * poly_eval(phi, rule->theta[i]);
    return {acc, rule->bound(g_sup, g_lip, B, L)};
}

FourierValue LineMeasure::characteristic(double t, double tol) const {
    CayleyBridge bridge(OperatorModel::cyclic_unitary(*source_));
    GroupScanner scan(bridge, VectorRep::e(0), VectorRep::e(0), tol, std::abs(t));
    return scan.at(t);
}

// ---------------------------------------------------------------------------
// group elements

GroupElement::GroupElement(std::shared_ptr<const CayleyBridge> bridge, double t, VectorRep x,
                           double tol)
    : bridge_(std::move(bridge)), t_(t), x_(std::move(x)), tol_(tol) {
    if (!(tol_ > 0.0)) throw std::invalid_argument("apply_group: tol must be > 0");
    if (x_.kind() != VectorRep::Kind::Frequencies)
        throw std::invalid_argument("apply_group: cyclic-component vector required");
}

FourierValue GroupElement::pair_with(const VectorRep& y) const {
    LaurentPoly phi = pairing_poly(x_, y);
    double t = t_;
    return bridge_->integrate([t](double lam) { return unit_phase(t * lam / (2.0 * kPi)); },
                              1.0, std::abs(t), phi, tol_);
}

GroupElement apply_group(std::shared_ptr<const CayleyBridge> bridge, double t,
                         const VectorRep& x, double tol) {
    return GroupElement(std::move(bridge), t, x, tol);
}

GroupScanner::GroupScanner(const CayleyBridge& bridge, const VectorRep& x, const VectorRep& y,
                           double tol, double t_max) {
    LaurentPoly phi = pairing_poly(x, y);
    double B = poly_abs_sum(phi);
    double L = poly_lipschitz(phi);
    if (B == 0.0) {
        base_bound_ = 0.0;
        slope_bound_ = 0.0;
        return;
    }
    rule_ = bridge.rule_for(tol, 1.0, std::max(std::abs(t_max), 1e-300), B, L);
    lambda_ = rule_->lambda;
    phi_weight_.resize(rule_->theta.size());
    for (std::size_t i = 0; i < rule_->theta.size(); ++i)
        phi_weight_[i] = rule_->weight[i] * poly_eval(phi, rule_->theta[i]);
    // bound(t) = base + slope |t|
    base_bound_ = rule_->cell * L * rule_->weight_sum + rule_->diverted_mass * B;
    slope_bound_ = rule_->cell * kPi * rule_->lambda_moment * B;
}

FourierValue GroupScanner::at(double t) const {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < lambda_.size(); ++i) {
        double ph = t * lambda_[i];
        acc += phi_weight_[i] * Complex(std::cos(ph), std::sin(ph));
    }
    return {acc, base_bound_ + slope_bound_ * std::abs(t)};
}

// ---------------------------------------------------------------------------
// resolvent two ways

namespace {

// adaptive Simpson for a complex integrand; standard |S2-S1|/15 acceptance
struct SimpsonState {
    const std::function<Complex(double)>* f;
    int evals = 0;
};

Complex adaptive_simpson(SimpsonState& st, double a, double b, Complex fa, Complex fm, Complex fb,
                         Complex whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Complex flm = (*st.f)(lm), frm = (*st.f)(rm);
    st.evals += 2;
    Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    Complex delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(st, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(st, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

Complex integrate_simpson(const std::function<Complex(double)>& f, double a, double b,
                          double tol) {
    SimpsonState st{&f, 0};
    Complex fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(st, a, b, fa, fm, fb, whole, tol, 28);
}

FourierValue spectral_resolvent(const CayleyBridge& bridge, const LaurentPoly& phi, double tol) {
    // (1 - i lambda(theta))^{-1} = (1 + e^{2 pi i theta})/2 exactly
    double B = poly_abs_sum(phi);
    if (B == 0.0) return {Complex(0.0, 0.0), 0.0};
    double tol_each = tol / (2.0 * B);
    Complex acc{0.0, 0.0};
    double bound = 0.0;
    for (const auto& [r, c] : phi) {
        FourierValue v0 = fourier_stieltjes(bridge.measure(), static_cast<double>(r), tol_each);
        FourierValue v1 = fourier_stieltjes(bridge.measure(), static_cast<double>(r + 1), tol_each);
        acc += c * 0.5 * (v0.value + v1.value);
        bound += std::abs(c) * 0.5 * (v0.error_bound + v1.error_bound);
    }
    return {acc, bound};
}

} // namespace

ResolventComparison resolvent_two_ways(const CayleyBridge& bridge, const VectorRep& x,
                                       const VectorRep& y, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("resolvent_two_ways: tol must be > 0");
    LaurentPoly phi = pairing_poly(x, y);
    double B = poly_abs_sum(phi);

    ResolventComparison out{};
    FourierValue spec = spectral_resolvent(bridge, phi, tol);
    out.spectral = spec.value;
    out.spectral_bound = spec.error_bound;

    if (B == 0.0) {
        out.laplace = Complex(0.0, 0.0);
        out.laplace_bound = 0.0;
        out.discrepancy = std::abs(out.spectral - out.laplace);
        return out;
    }

    // truncation T with e^{-T} B <= tol/4
    double T = std::log(4.0 * std::max(B, 1.0) / tol);
    GroupScanner scan(bridge, x, y, tol / 4.0, T);
    std::function<Complex(double)> f = [&scan](double t) {
        return std::exp(-t) * scan.at(t).value;
    };
    Complex val = integrate_simpson(f, 0.0, T, tol / 4.0);
    // ∫_0^T e^{-t} bound(t) dt <= base + slope (over [0, inf))
    FourierValue probe = scan.at(T);
    double point_bound_integral = probe.error_bound; // base + slope*T >= ∫ e^{-t}(base+slope t)
    out.laplace = val;
    out.laplace_bound = tol / 4.0 + std::exp(-T) * B + point_bound_integral;
    out.discrepancy = std::abs(out.spectral - out.laplace);
    return out;
}

DifferenceQuotients generator_difference_quotient(const CayleyBridge& bridge, const VectorRep& x,
                                                  const VectorRep& y,
                                                  const std::vector<double>& t_list, double tol) {
    for (std::size_t i = 0; i < t_list.size(); ++i)
        if (!(t_list[i] > 0.0) || (i > 0 && t_list[i] >= t_list[i - 1]))
            throw std::invalid_argument(
                "generator_difference_quotient: t_list must be positive decreasing");
    LaurentPoly phi = pairing_poly(x, y);
    // r = (I - iA)^{-1} x folds the resolvent symbol into the polynomial:
    // (1 + e^{2 pi i theta})/2 * Phi
    LaurentPoly folded;
    for (const auto& [r, c] : phi) {
        folded[r] += 0.5 * c;
        folded[r + 1] += 0.5 * c;
    }

    DifferenceQuotients out;
    for (double t : t_list) {
        // g_t(lambda) = (e^{i t lambda} - 1)/t: |g_t| <= 2/t, |g_t'| <= 1
        FourierValue v = bridge.integrate(
            [t](double lam) {
                return (Complex(std::cos(t * lam), std::sin(t * lam)) - Complex(1.0, 0.0)) / t;
            },
            2.0 / t, 1.0, folded, tol);
        out.quotients.push_back(v.value);
        out.bounds.push_back(v.error_bound);
    }

    // independent target: i lambda (1 - i lambda)^{-1} = (e^{2 pi i theta} - 1)/2
    double B = poly_abs_sum(phi);
    double tol_each = B > 0.0 ? tol / (2.0 * B) : tol;
    Complex target{0.0, 0.0};
    double target_bound = 0.0;
    for (const auto& [r, c] : phi) {
        FourierValue v0 = fourier_stieltjes(bridge.measure(), static_cast<double>(r), tol_each);
        FourierValue v1 = fourier_stieltjes(bridge.measure(), static_cast<double>(r + 1), tol_each);
        target += c * 0.5 * (v1.value - v0.value);
        target_bound += std::abs(c) * 0.5 * (v0.error_bound + v1.error_bound);
    }
    out.target = target;
    out.target_bound = target_bound;
    return out;
}

} // namespace specdyn
