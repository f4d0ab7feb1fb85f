#include "specdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace specdyn {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr long long kSeqCap = (1LL << 62);

long long checked_pow(long long base, long long exp, const char* who) {
    if (exp > 62) throw std::overflow_error(std::string(who) + ": entry past 2^62");
    long long v = 1;
    for (long long i = 0; i < exp; ++i) {
        if (v > kSeqCap / base) throw std::overflow_error(std::string(who) + ": entry past 2^62");
        v *= base;
    }
    return v;
}

} // namespace

// ---------------------------------------------------------------------------
// SequenceSpec

SequenceSpec SequenceSpec::powers(long long base, int k) {
    if (base < 2 || k < 1) throw std::invalid_argument("SequenceSpec::powers: base >= 2, K >= 1");
    SequenceSpec s;
    s.form = Form::Powers;
    s.base = base;
    s.length = k;
    return s;
}

SequenceSpec SequenceSpec::tower_powers(long long base, ExponentRule rule, int k) {
    if (base < 2 || k < 1) throw std::invalid_argument("SequenceSpec::tower_powers: base >= 2, K >= 1");
    SequenceSpec s;
    s.form = Form::TowerPowers;
    s.base = base;
    s.exponents = std::move(rule);
    s.length = k;
    return s;
}

SequenceSpec SequenceSpec::arithmetic(long long start, long long step, int k) {
    if (start < 1 || step < 1 || k < 1)
        throw std::invalid_argument("SequenceSpec::arithmetic: start, step, K >= 1");
    SequenceSpec s;
    s.form = Form::Arithmetic;
    s.start = start;
    s.step = step;
    s.length = k;
    return s;
}

SequenceSpec SequenceSpec::explicit_list(std::vector<long long> entries) {
    if (entries.empty()) throw std::invalid_argument("SequenceSpec: empty explicit list");
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i] < 1 || (i > 0 && entries[i] <= entries[i - 1]))
            throw std::invalid_argument("SequenceSpec: entries must be strictly increasing positive");
    SequenceSpec s;
    s.form = Form::Explicit;
    s.entries = std::move(entries);
    s.length = static_cast<int>(s.entries.size());
    return s;
}

SequenceSpec SequenceSpec::continuous_grid(std::vector<double> times) {
    if (times.empty()) throw std::invalid_argument("SequenceSpec: empty grid");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("SequenceSpec: grid must be strictly increasing");
    SequenceSpec s;
    s.form = Form::ContinuousGrid;
    s.times = std::move(times);
    s.length = static_cast<int>(s.times.size());
    return s;
}

std::vector<long long> SequenceSpec::discrete_entries() const {
    switch (form) {
    case Form::Powers: {
        std::vector<long long> out;
        long long v = 1;
        for (int k = 1; k <= length; ++k) {
            if (v > kSeqCap / base) throw std::overflow_error("SequenceSpec: power past 2^62");
            v *= base;
            out.push_back(v);
        }
        return out;
    }
    case Form::TowerPowers: {
        std::vector<long long> out;
        for (int k = 1; k <= length; ++k)
            out.push_back(checked_pow(base, exponents.exponent(k), "SequenceSpec"));
        return out;
    }
    case Form::Arithmetic: {
        std::vector<long long> out;
        for (int k = 0; k < length; ++k) out.push_back(start + step * k);
        return out;
    }
    case Form::Explicit: return entries;
    case Form::ContinuousGrid:
        throw std::invalid_argument("SequenceSpec: continuous grid has no discrete entries");
    }
    throw std::logic_error("SequenceSpec: unreachable");
}

std::string SequenceSpec::describe() const {
    std::ostringstream os;
    switch (form) {
    case Form::Powers: os << "powers(b=" << base << ", K=" << length << ")"; break;
    case Form::TowerPowers: os << "tower(b=" << base << ", K=" << length << ")"; break;
    case Form::Arithmetic:
        os << "arithmetic(start=" << start << ", step=" << step << ", K=" << length << ")";
        break;
    case Form::Explicit: os << "explicit(K=" << length << ")"; break;
    case Form::ContinuousGrid: os << "grid(K=" << length << ")"; break;
    }
    return os.str();
}

std::string to_string(SubspaceLabel label) {
    switch (label) {
    case SubspaceLabel::H_m: return "H_m";
    case SubspaceLabel::H_w: return "H_w";
    case SubspaceLabel::Unknown: return "unknown";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// trajectory

std::vector<FourierValue> trajectory(const OperatorModel& model, const VectorRep& x,
                                     const VectorRep& y, const SequenceSpec& seq, double tol) {
    if (seq.is_continuous())
        throw std::invalid_argument("trajectory: continuous grids pair with the Cayley bridge");
    std::vector<FourierValue> out;
    for (long long n : seq.discrete_entries())
        out.push_back(inner_product(model, apply_power(model, n, x), y, tol));
    return out;
}

// ---------------------------------------------------------------------------
// limit_operator_estimate

namespace {

// rate of |mu^(b^k + m) - mu^(m) mu^(1)| summed over the pairings of f_i, f_j
double self_similar_rate(const VectorRep& fi, const VectorRep& fj, long long n_last,
                         long long base) {
    double rate = 0.0;
    for (const auto& [n, cn] : fi.coeffs())
        for (const auto& [m, dm] : fj.coeffs())
            rate += std::abs(cn) * std::abs(dm) * 4.0 * kPi * std::abs(double(n - m)) /
                    static_cast<double>(n_last) * 1.0; // b^{-k} = 1/n_last for n_last = b^k
    (void)base;
    return rate;
}

bool rules_match(const ExponentRule& a, const ExponentRule& b, int upto) {
    for (int j = 1; j <= upto + 1; ++j) {
        long long ea, eb;
        try {
            ea = a.exponent(j);
            eb = b.exponent(j);
        } catch (const std::invalid_argument&) {
            return false;
        }
        if (ea != eb) return false;
    }
    return true;
}

} // namespace

LimitOperatorEstimate limit_operator_estimate(const OperatorModel& model, const SequenceSpec& seq,
                                              const std::vector<VectorRep>& frame, double tol) {
    if (frame.empty()) throw std::invalid_argument("limit_operator_estimate: empty frame");
    if (seq.is_continuous())
        throw std::invalid_argument("limit_operator_estimate: continuous grids pair with the bridge");
    std::vector<long long> entries = seq.discrete_entries();
    if (entries.size() < 2)
        throw std::invalid_argument("limit_operator_estimate: need at least two sequence entries");

    long long n_prev = entries[entries.size() - 2];
    long long n_last = entries.back();

    LimitOperatorEstimate est;
    est.sequence = seq;
    est.frame = frame;
    est.matrix_elements.resize(frame.size());
    est.cauchy_residual = 0.0;

    for (std::size_t i = 0; i < frame.size(); ++i) {
        VectorRep last = apply_power(model, n_last, frame[i]);
        VectorRep prev = apply_power(model, n_prev, frame[i]);
        est.matrix_elements[i].resize(frame.size());
        for (std::size_t j = 0; j < frame.size(); ++j) {
            FourierValue el = inner_product(model, last, frame[j], tol);
            FourierValue ep = inner_product(model, prev, frame[j], tol);
            est.matrix_elements[i][j] = el;
            est.cauchy_residual = std::max(
                est.cauchy_residual, std::abs(el.value - ep.value) + el.error_bound + ep.error_bound);
        }
    }

    // forward shifts escape every frame window: certified V = 0 once the
    // previous entry already clears the index spread
    if (model.kind() == OperatorModel::Kind::UnilateralShift) {
        long long spread = 0;
        for (const auto& fi : frame)
            for (const auto& fj : frame)
                if (!fi.coeffs().empty() && !fj.coeffs().empty())
                    spread = std::max(spread,
                                      fj.coeffs().rbegin()->first - fi.coeffs().begin()->first);
        if (n_prev > spread) {
            est.has_prediction = true;
            est.tier = Certificate::Tier::Certified;
            est.prediction_scalar = Complex(0.0, 0.0);
            est.prediction_rate_bound = 0.0;
            est.prediction_note = "V = 0 (forward shift escapes every window)";
            est.predicted.assign(frame.size(),
                                 std::vector<Complex>(frame.size(), Complex(0.0, 0.0)));
        }
        return est;
    }

    // closed-form predictions on cyclic components
    if (model.kind() == OperatorModel::Kind::CyclicUnitary) {
        const CircleMeasure& mu = model.measure();
        bool self_similar_powers = mu.kind() == CircleMeasure::Kind::SelfSimilar &&
                                   seq.form == SequenceSpec::Form::Powers && seq.base == mu.base();
        bool convolution_tower = mu.kind() == CircleMeasure::Kind::InfiniteConvolution &&
                                 seq.form == SequenceSpec::Form::TowerPowers &&
                                 seq.base == mu.base() &&
                                 rules_match(seq.exponents, mu.exponents(), seq.length);
        // rational atoms along multiples of the common period recur exactly
        bool atomic_periodic = false;
        if (mu.kind() == CircleMeasure::Kind::Atomic &&
            seq.form == SequenceSpec::Form::Arithmetic) {
            atomic_periodic = true;
            for (const auto& a : mu.atoms()) {
                if (!a.angle.is_rational() || seq.start % a.angle.den() != 0 ||
                    seq.step % a.angle.den() != 0)
                    atomic_periodic = false;
            }
        }
        if (atomic_periodic) {
            est.has_prediction = true;
            est.tier = Certificate::Tier::Certified;
            est.prediction_scalar = Complex(1.0, 0.0);
            est.prediction_rate_bound = 2.0 * tol;
            est.prediction_note = "V = I (exact period of the rational atoms)";
            est.predicted.resize(frame.size());
            for (std::size_t i = 0; i < frame.size(); ++i) {
                est.predicted[i].resize(frame.size());
                for (std::size_t j = 0; j < frame.size(); ++j)
                    est.predicted[i][j] = inner_product(model, frame[i], frame[j], tol).value;
            }
            return est;
        }
        if (self_similar_powers || convolution_tower) {
            est.has_prediction = true;
            est.tier = Certificate::Tier::Certified;
            est.predicted.resize(frame.size());
            double rate = 0.0;
            FourierValue mu1 = self_similar_powers
                                   ? fourier_stieltjes(mu, 1.0, tol)
                                   : FourierValue(Complex(1.0, 0.0), 0.0);
            for (std::size_t i = 0; i < frame.size(); ++i) {
                est.predicted[i].resize(frame.size());
                for (std::size_t j = 0; j < frame.size(); ++j) {
                    FourierValue gram = inner_product(model, frame[i], frame[j], tol);
                    est.predicted[i][j] = gram.value * mu1.value;
                    if (self_similar_powers)
                        rate = std::max(rate, self_similar_rate(frame[i], frame[j], n_last, mu.base()));
                }
            }
            est.prediction_scalar = mu1.value;
            if (convolution_tower) {
                // |mu^(b^{n_K} + w) - mu^(w)| <= 2 pi b^{n_K - n_{K+1}} per unit pairing mass
                long long nK = mu.exponents().exponent(seq.length);
                long long nK1 = mu.exponents().exponent(seq.length + 1);
                double per_mass =
                    2.0 * kPi * std::pow(static_cast<double>(mu.base()),
                                         static_cast<double>(nK) - static_cast<double>(nK1));
                for (const auto& f : frame) {
                    double s = f.coeff_abs_sum();
                    rate = std::max(rate, per_mass * s * s);
                }
                est.prediction_note = "V = I (Dirichlet recurrence along b^{n_k})";
            } else {
                est.prediction_note = "V = mu^(1) I (self-similar scaling along b^k)";
            }
            est.prediction_rate_bound = rate + 2.0 * tol;
        }
    }
    return est;
}

// ---------------------------------------------------------------------------
// recurrence certificates

namespace {

// eps_k = 2 sum_{j>k} pi b^{n_k - n_j}: exact partial sum plus geometric closure
double dirichlet_eps(const CircleMeasure& mu, int k) {
    double b = mu.base();
    long long nk = mu.exponents().exponent(k);
    double acc = 0.0;
    int limit = mu.exponents().finite()
                    ? static_cast<int>(mu.exponents().entries.size())
                    : k + 64;
    for (int j = k + 1; j <= limit; ++j) {
        double e = static_cast<double>(nk) - static_cast<double>(mu.exponents().exponent(j));
        if (e * std::log2(b) < -1060.0) break;
        acc += kPi * std::pow(b, e);
    }
    if (!mu.exponents().finite()) {
        double e = static_cast<double>(nk) - static_cast<double>(mu.exponents().exponent(limit + 1));
        if (e * std::log2(b) >= -1060.0) acc += kPi * std::pow(b, e) * (b / (b - 1.0));
    }
    return 2.0 * acc;
}

Certificate dirichlet_recurrence(const OperatorModel& model, const RecurrencePolicy& policy) {
    const CircleMeasure& mu = model.measure();
    int k_max = policy.sequence_length;
    // cap K so b^{n_k} stays below 2^62
    while (k_max > 1) {
        long long nk = mu.exponents().exponent(k_max);
        if (static_cast<double>(nk) * std::log2(static_cast<double>(mu.base())) <= 62.0) break;
        --k_max;
    }
    SequenceSpec seq = SequenceSpec::tower_powers(mu.base(), mu.exponents(), k_max);
    Certificate cert;
    cert.kind = Certificate::Kind::PoissonRecurrence;
    cert.tier = Certificate::Tier::Certified;
    cert.sequence = seq;
    cert.note = "Dirichlet-type recurrence: mu^(b^{n_k}) -> 1 with certified tail";
    for (int k = 1; k <= k_max; ++k) {
        double eps = dirichlet_eps(mu, k);
        long long nk = seq.discrete_entries()[k - 1];
        FourierValue hat = fourier_stieltjes(mu, static_cast<double>(nk), policy.tol);
        double deficit = 1.0 - hat.value.real();
        cert.eps.push_back(eps);
        cert.observed_deficit.push_back(deficit);
        cert.strong_return.push_back(2.0 - 2.0 * hat.value.real());
        if (deficit - hat.error_bound > eps)
            throw std::logic_error("dirichlet_recurrence: certified bound violated");
    }
    return cert;
}

Certificate rational_atomic_recurrence(const OperatorModel& model, const RecurrencePolicy& policy) {
    const CircleMeasure& mu = model.measure();
    long long l = 1;
    for (const auto& a : mu.atoms()) {
        long long d = a.angle.den();
        long long g = std::gcd(l, d);
        if (l / g > kSeqCap / d) throw std::overflow_error("recurrence: lcm of denominators past 2^62");
        l = l / g * d;
    }
    SequenceSpec seq = SequenceSpec::arithmetic(l, l, policy.sequence_length);
    Certificate cert;
    cert.kind = Certificate::Kind::PoissonRecurrence;
    cert.tier = Certificate::Tier::Certified;
    cert.sequence = seq;
    cert.note = "rational atoms: U^{lcm} fixes the cyclic vector exactly";
    double norm2 = fourier_stieltjes(mu, 0.0, policy.tol).value.real();
    for (long long n : seq.discrete_entries()) {
        FourierValue hat = fourier_stieltjes(mu, static_cast<double>(n), policy.tol);
        double deficit = norm2 - hat.value.real();
        cert.eps.push_back(0.0);
        cert.observed_deficit.push_back(deficit);
        cert.strong_return.push_back(2.0 * deficit);
    }
    return cert;
}

Certificate greedy_recurrence(const OperatorModel& model, const RecurrencePolicy& policy) {
    const CircleMeasure& mu = model.measure();
    Certificate cert;
    cert.kind = Certificate::Kind::Empirical;
    cert.tier = Certificate::Tier::Empirical;
    double best = -2.0;
    std::vector<long long> picks;
    for (long long n = 1; n <= policy.greedy_limit; ++n) {
        double re = fourier_stieltjes(mu, static_cast<double>(n), policy.tol).value.real();
        if (re > best + 1e-15) {
            best = re;
            picks.push_back(n);
            cert.observations.emplace_back(static_cast<double>(n), re);
        }
    }
    if (!picks.empty()) cert.sequence = SequenceSpec::explicit_list(picks);
    std::ostringstream os;
    os << "greedy search over n <= " << policy.greedy_limit << ": max Re mu^ = " << best;
    cert.note = os.str();
    return cert;
}

} // namespace

Certificate recurrence_certificate(const OperatorModel& model, const RecurrencePolicy& policy) {
    if (model.kind() != OperatorModel::Kind::CyclicUnitary)
        throw std::invalid_argument("recurrence_certificate: cyclic model required");
    const CircleMeasure& mu = model.measure();
    if (mu.kind() == CircleMeasure::Kind::InfiniteConvolution)
        return dirichlet_recurrence(model, policy);
    if (mu.kind() == CircleMeasure::Kind::Atomic) {
        bool all_rational = std::all_of(mu.atoms().begin(), mu.atoms().end(),
                                        [](const Atom& a) { return a.angle.is_rational(); });
        if (all_rational) {
            try {
                return rational_atomic_recurrence(model, policy);
            } catch (const std::overflow_error&) {
                // fall through to the greedy search
            }
        }
    }
    return greedy_recurrence(model, policy);
}

// ---------------------------------------------------------------------------
// classification

ClassificationResult classify_component(const OperatorModel& component,
                                        const RecurrencePolicy& policy) {
    ClassificationResult out;
    switch (component.kind()) {
    case OperatorModel::Kind::UnilateralShift: {
        out.label = SubspaceLabel::H_w;
        out.certificate.kind = Certificate::Kind::WeakStabilityByClass;
        out.certificate.tier = Certificate::Tier::Certified;
        out.certificate.reason = Certificate::StabilityReason::ShiftStructure;
        out.certificate.note = "completely non-unitary isometry: weakly stable";
        return out;
    }
    case OperatorModel::Kind::FiniteContraction: {
        if (component.finite_spectral_radius() < 1.0 - 1e-9) {
            out.label = SubspaceLabel::H_w;
            out.certificate.kind = Certificate::Kind::WeakStabilityByClass;
            out.certificate.tier = Certificate::Tier::Certified;
            out.certificate.reason = Certificate::StabilityReason::SpectralRadiusLt1;
            out.certificate.note = "spectral radius < 1: powers decay geometrically";
            return out;
        }
        out.label = SubspaceLabel::Unknown;
        out.certificate.note = "finite contraction with peripheral spectrum: outside the "
                               "flight-vector regime; see the finite oracle";
        return out;
    }
    case OperatorModel::Kind::DirectSum:
        throw std::invalid_argument("classify_component: pass a single direct summand");
    case OperatorModel::Kind::CyclicUnitary: break;
    }

    const CircleMeasure& mu = component.measure();
    switch (mu.kind()) {
    case CircleMeasure::Kind::Lebesgue:
    case CircleMeasure::Kind::TrigDensity: {
        out.label = SubspaceLabel::H_w;
        out.certificate.kind = Certificate::Kind::WeakStabilityByClass;
        out.certificate.tier = Certificate::Tier::Certified;
        out.certificate.reason = Certificate::StabilityReason::RiemannLebesgue;
        out.certificate.note = "absolutely continuous spectral measure: mu^(n) -> 0";
        return out;
    }
    case CircleMeasure::Kind::SelfSimilar: {
        SequenceSpec seq = SequenceSpec::powers(mu.base(), 16);
        LimitOperatorEstimate est =
            limit_operator_estimate(component, seq, {VectorRep::e(0)}, policy.tol);
        FourierValue mu1 = fourier_stieltjes(mu, 1.0, policy.tol);
        if (est.has_prediction && std::abs(mu1.value) - mu1.error_bound > 1e-6) {
            out.label = SubspaceLabel::H_m;
            out.certificate.kind = Certificate::Kind::ScalarLimit;
            out.certificate.tier = Certificate::Tier::Certified;
            out.certificate.sequence = seq;
            out.certificate.scalar = mu1.value;
            out.certificate.rate_bound = est.prediction_rate_bound;
            out.certificate.note =
                "certified V = mu^(1) I with mu^(1) != 0: c^{-1} V x = x lies in sp(Omega x)";
            return out;
        }
        break;
    }
    case CircleMeasure::Kind::InfiniteConvolution: {
        Certificate cert = recurrence_certificate(component, policy);
        if (cert.kind == Certificate::Kind::PoissonRecurrence) {
            out.label = SubspaceLabel::H_m;
            out.certificate = std::move(cert);
            return out;
        }
        break;
    }
    case CircleMeasure::Kind::Atomic: {
        Certificate cert = recurrence_certificate(component, policy);
        if (cert.kind == Certificate::Kind::PoissonRecurrence) {
            out.label = SubspaceLabel::H_m;
            out.certificate = std::move(cert);
            return out;
        }
        out.certificate = std::move(cert);
        out.label = SubspaceLabel::Unknown;
        return out;
    }
    case CircleMeasure::Kind::Mixture: break;
    }

    // no analytic class matched: report the best empirical evidence
    out.label = SubspaceLabel::Unknown;
    if (out.certificate.note.empty()) {
        Certificate cert = recurrence_certificate(component, policy);
        out.certificate = std::move(cert);
        if (out.certificate.kind == Certificate::Kind::PoissonRecurrence)
            out.label = SubspaceLabel::H_m;
    }
    return out;
}

// ---------------------------------------------------------------------------
// weakly wandering search

WanderReport weakly_wandering_search(const OperatorModel& model, const VectorRep& x, int count,
                                     double eps, long long n_max, double tol) {
    if (count < 2) throw std::invalid_argument("weakly_wandering_search: need m >= 2");
    if (eps < 0.0) throw std::invalid_argument("weakly_wandering_search: eps must be >= 0");

    auto pairing = [&](long long a, long long b) {
        VectorRep ua = apply_power(model, a, x);
        VectorRep ub = apply_power(model, b, x);
        return inner_product(model, ua, ub, tol);
    };

    WanderReport report;
    report.requested_eps = eps;
    report.best_blocking_eps = 1e300;
    std::vector<long long> chosen{0};
    for (long long n = 1; n <= n_max && static_cast<int>(chosen.size()) < count; ++n) {
        double worst = 0.0;
        for (long long j : chosen)
            worst = std::max(worst, std::abs(pairing(n, j).value));
        if (worst <= eps)
            chosen.push_back(n);
        else
            report.best_blocking_eps = std::min(report.best_blocking_eps, worst);
    }
    report.indices = chosen;
    report.success = static_cast<int>(chosen.size()) == count;

    // re-verify the certificate from scratch
    double achieved = 0.0;
    for (std::size_t a = 0; a < chosen.size(); ++a)
        for (std::size_t b = a + 1; b < chosen.size(); ++b)
            achieved = std::max(achieved, std::abs(pairing(chosen[a], chosen[b]).value));
    report.achieved_eps = achieved;
    if (report.success) {
        if (achieved > eps) throw std::logic_error("weakly_wandering_search: re-verification failed");
        Certificate cert;
        cert.kind = Certificate::Kind::WeaklyWandering;
        cert.tier = Certificate::Tier::Certified;
        cert.wander_indices = chosen;
        cert.wander_eps = std::max(achieved, 0.0);
        cert.note = "greedy orbit orthogonality certificate";
        report.certificate = cert;
    }
    return report;
}

// ---------------------------------------------------------------------------
// limit cycles

LimitCycleReport limit_cycle_check(const OperatorModel& model,
                                   const LimitOperatorEstimate& estimate, const VectorRep& x,
                                   const std::vector<long long>& shifts, double tol) {
    if (!estimate.has_prediction)
        throw std::invalid_argument("limit_cycle_check: estimate carries no closed-form prediction");
    std::vector<long long> entries = estimate.sequence.discrete_entries();
    long long n_last = entries.back();

    if (!estimate.prediction_scalar)
        throw std::invalid_argument("limit_cycle_check: prediction is not of scalar form");
    Complex c = *estimate.prediction_scalar;

    LimitCycleReport report;
    report.all_pass = true;
    for (long long m : shifts) {
        LimitCycleShift row;
        row.shift = m;
        double rate = 0.0;
        bool self_similar = model.kind() == OperatorModel::Kind::CyclicUnitary &&
                            model.measure().kind() == CircleMeasure::Kind::SelfSimilar;
        bool convolution = model.kind() == OperatorModel::Kind::CyclicUnitary &&
                           model.measure().kind() == CircleMeasure::Kind::InfiniteConvolution;
        for (const auto& f : estimate.frame) {
            FourierValue lhs = inner_product(model, apply_power(model, n_last + m, x), f, tol);
            FourierValue rhs = inner_product(model, apply_power(model, m, x), f, tol);
            double resid = std::abs(lhs.value - c * rhs.value);
            row.max_residual = std::max(row.max_residual, resid);
            if (self_similar) {
                for (const auto& [n, cn] : x.coeffs())
                    for (const auto& [s, ds] : f.coeffs())
                        rate = std::max(rate, std::abs(cn) * std::abs(ds) * 4.0 * kPi *
                                                  std::abs(double(m + n - s)) /
                                                  static_cast<double>(n_last));
            }
        }
        if (convolution) rate = estimate.prediction_rate_bound;
        row.allowed = tol + rate;
        row.pass = row.max_residual <= row.allowed;
        report.all_pass = report.all_pass && row.pass;
        report.shifts.push_back(row);
    }
    return report;
}

} // namespace specdyn
