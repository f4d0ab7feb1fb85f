#include "specdyn/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace specdyn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr long long kSeqCap = (1LL << 62);

bool is_integer_valued(double x) {
    return std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.2e18;
}

} // namespace

Complex unit_phase(double t) {
    double r = t - std::nearbyint(t); // r in [-1/2, 1/2], exact for integer t
    if (r == 0.0) return {1.0, 0.0};
    return {std::cos(kTwoPi * r), std::sin(kTwoPi * r)};
}

// ---------------------------------------------------------------------------
// Angle

Angle Angle::of(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("Angle: non-finite value");
    Angle a;
    a.value_ = v - std::floor(v);
    if (a.value_ >= 1.0) a.value_ = 0.0; // floor rounding at the seam
    return a;
}

Angle Angle::rational(long long num, long long den) {
    if (den <= 0) throw std::invalid_argument("Angle: denominator must be positive");
    long long r = num % den;
    if (r < 0) r += den;
    long long g = std::gcd(r, den);
    Angle a;
    a.rational_ = true;
    a.num_ = r / g;
    a.den_ = den / g;
    a.value_ = static_cast<double>(a.num_) / static_cast<double>(a.den_);
    return a;
}

bool Angle::is_half() const {
    if (rational_) return num_ * 2 == den_;
    return value_ == 0.5;
}

// ---------------------------------------------------------------------------
// ExponentRule

ExponentRule ExponentRule::power(long long base) {
    if (base < 2) throw std::invalid_argument("ExponentRule: power base must be >= 2");
    ExponentRule r;
    r.form = Form::Power;
    r.power_base = base;
    return r;
}

ExponentRule ExponentRule::explicit_list(std::vector<long long> list) {
    if (list.empty()) throw std::invalid_argument("ExponentRule: empty exponent list");
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i] < 1 || (i > 0 && list[i] <= list[i - 1]))
            throw std::invalid_argument("ExponentRule: exponents must be strictly increasing positive");
    }
    ExponentRule r;
    r.form = Form::Explicit;
    r.entries = std::move(list);
    return r;
}

long long ExponentRule::exponent(int j) const {
    if (j < 1) throw std::invalid_argument("ExponentRule: index is 1-based");
    if (form == Form::Explicit) {
        if (j > static_cast<int>(entries.size()))
            throw std::invalid_argument("ExponentRule: index past explicit list");
        return entries[j - 1];
    }
    long long n = 1;
    for (int i = 0; i < j; ++i) {
        if (n > kSeqCap / power_base) return kSeqCap;
        n *= power_base;
    }
    return n;
}

int ExponentRule::factor_limit(int j_max) const {
    if (form == Form::Explicit)
        return std::min<int>(j_max, static_cast<int>(entries.size()));
    return j_max;
}

// ---------------------------------------------------------------------------
// Construction

CircleMeasure CircleMeasure::atomic(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("atomic: no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("atomic: weights must be positive");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("atomic: weights must sum to 1");
    CircleMeasure m;
    m.kind_ = Kind::Atomic;
    m.atoms_ = std::move(atoms);
    return m;
}

CircleMeasure CircleMeasure::lebesgue() {
    CircleMeasure m;
    m.kind_ = Kind::Lebesgue;
    return m;
}

CircleMeasure CircleMeasure::trig_density(std::map<long long, Complex> coeffs) {
    auto it0 = coeffs.find(0);
    if (it0 == coeffs.end() || std::abs(it0->second - Complex(1.0, 0.0)) > 1e-12)
        throw std::invalid_argument("trig_density: c_0 must be 1 (unit total mass)");
    it0->second = Complex(1.0, 0.0);
    // fill c_{-k} = conj(c_k); verify when both given
    std::map<long long, Complex> full = coeffs;
    for (const auto& [k, c] : coeffs) {
        auto itm = full.find(-k);
        if (itm == full.end()) {
            full[-k] = std::conj(c);
        } else if (std::abs(itm->second - std::conj(c)) > 1e-12) {
            throw std::invalid_argument("trig_density: coefficients are not Hermitian");
        }
    }
    // sampled nonnegativity check on a 4096-point grid
    constexpr int kGrid = 4096;
    double min_val = 1e300;
    for (int i = 0; i < kGrid; ++i) {
        double th = (i + 0.5) / kGrid;
        double g = 0.0;
        for (const auto& [k, c] : full)
            g += (c * unit_phase(k * th)).real();
        min_val = std::min(min_val, g);
    }
    if (min_val < -1e-9)
        throw std::invalid_argument("trig_density: sampled density minimum below -1e-9");
    CircleMeasure m;
    m.kind_ = Kind::TrigDensity;
    m.coeffs_ = std::move(full);
    return m;
}

CircleMeasure CircleMeasure::self_similar(int base, std::vector<int> digits,
                                          std::vector<double> weights) {
    if (base < 2) throw std::invalid_argument("self_similar: base must be >= 2");
    if (digits.size() < 2) throw std::invalid_argument("self_similar: need at least 2 digits");
    if (digits.size() != weights.size())
        throw std::invalid_argument("self_similar: digit/weight count mismatch");
    std::vector<std::size_t> order(digits.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return digits[a] < digits[b];
    });
    std::vector<int> d;
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t i : order) {
        if (digits[i] < 0 || digits[i] >= base)
            throw std::invalid_argument("self_similar: digit out of range");
        if (!d.empty() && digits[i] == d.back())
            throw std::invalid_argument("self_similar: duplicate digit");
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("self_similar: weights must be positive");
        d.push_back(digits[i]);
        w.push_back(weights[i]);
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("self_similar: weights must sum to 1");
    CircleMeasure m;
    m.kind_ = Kind::SelfSimilar;
    m.base_ = base;
    m.digits_ = std::move(d);
    m.weights_ = std::move(w);
    return m;
}

CircleMeasure CircleMeasure::infinite_convolution(int base, ExponentRule rule, int j_max) {
    if (base < 2) throw std::invalid_argument("infinite_convolution: base must be >= 2");
    if (j_max < 1) throw std::invalid_argument("infinite_convolution: j_max must be >= 1");
    CircleMeasure m;
    m.kind_ = Kind::InfiniteConvolution;
    m.base_ = base;
    m.rule_ = std::move(rule);
    m.j_max_ = j_max;
    return m;
}

CircleMeasure CircleMeasure::mixture(std::vector<std::pair<CircleMeasure, double>> parts) {
    if (parts.empty()) throw std::invalid_argument("mixture: no components");
    double total = 0.0;
    for (const auto& [part, w] : parts) {
        (void)part;
        if (!(w > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("mixture: weights must sum to 1");
    CircleMeasure m;
    m.kind_ = Kind::Mixture;
    m.parts_ = std::move(parts);
    return m;
}

bool CircleMeasure::is_continuous() const {
    switch (kind_) {
    case Kind::Atomic: return false;
    case Kind::Lebesgue:
    case Kind::TrigDensity: return true;
    case Kind::SelfSimilar: return true; // >= 2 digits, all weights < 1
    case Kind::InfiniteConvolution:
        // an explicit finite factor list is a finite convolution of atoms
        return !rule_.finite();
    case Kind::Mixture:
        return std::all_of(parts_.begin(), parts_.end(),
                           [](const auto& p) { return p.first.is_continuous(); });
    }
    return false;
}

// ---------------------------------------------------------------------------
// Fourier-Stieltjes oracle

namespace {

// Phases t_j = frac(xi / b^j), j = 1, 2, ... with exact integer reduction
// while b^j fits in int64 (frac(N/b^j) = (N mod b^j)/b^j).
class ScaledPhaseSequence {
public:
    ScaledPhaseSequence(double xi, int base) : base_(base) {
        if (is_integer_valued(xi) && std::abs(xi) < static_cast<double>(kSeqCap)) {
            integer_mode_ = true;
            n_ = static_cast<long long>(std::abs(xi));
            neg_ = xi < 0;
            pow_ = 1;
        } else {
            t_ = xi;
        }
    }

    double next() {
        if (integer_mode_) {
            if (pow_ <= kSeqCap / base_) {
                pow_ *= base_;
                double t = static_cast<double>(n_ % pow_) / static_cast<double>(pow_);
                if (pow_ > n_) {
                    // all mass reduced; continue by plain division
                    integer_mode_ = false;
                    t_ = t;
                }
                return neg_ ? -t : t;
            }
            integer_mode_ = false;
            t_ = (neg_ ? -1.0 : 1.0) * static_cast<double>(n_) / static_cast<double>(pow_);
        }
        t_ /= base_;
        return t_;
    }

private:
    int base_;
    bool integer_mode_ = false;
    bool neg_ = false;
    long long n_ = 0;
    long long pow_ = 1;
    double t_ = 0.0;
};

// frac(xi * b^{-e}) with exact reduction for integer xi; 0 once the scale
// underflows.
double scaled_phase_at(double xi, int base, long long e) {
    double mag = std::abs(xi);
    if (mag == 0.0) return 0.0;
    double log2t = std::log2(mag) - static_cast<double>(e) * std::log2(static_cast<double>(base));
    if (log2t < -1076.0) return 0.0;
    if (is_integer_valued(xi) && std::abs(xi) < static_cast<double>(kSeqCap)) {
        long long n = static_cast<long long>(std::abs(xi));
        bool neg = xi < 0;
        if (base == 2) {
            if (e < 63) {
                long long r = n & ((1LL << e) - 1);
                double t = std::ldexp(static_cast<double>(r), -static_cast<int>(e));
                return neg ? -t : t;
            }
            double t = std::ldexp(static_cast<double>(n), -static_cast<int>(std::min<long long>(e, 2000)));
            return neg ? -t : t;
        }
        long long pow = 1;
        long long steps = 0;
        while (steps < e && pow <= kSeqCap / base) {
            pow *= base;
            ++steps;
        }
        long long r = n % pow;
        double t = static_cast<double>(r) / static_cast<double>(pow);
        for (long long s = steps; s < e; ++s) {
            t /= base;
            if (t == 0.0) break;
        }
        return neg ? -t : t;
    }
    double t = xi;
    for (long long s = 0; s < e; ++s) {
        t /= base;
        if (t == 0.0) break;
    }
    return t;
}

Complex digit_symbol(const CircleMeasure& mu, double t) {
    if (t == 0.0) return {1.0, 0.0}; // weights sum to 1
    Complex s{0.0, 0.0};
    const auto& d = mu.digits();
    const auto& w = mu.digit_weights();
    for (std::size_t i = 0; i < d.size(); ++i)
        s += w[i] * unit_phase(t * d[i]);
    return s;
}

FourierValue hat_atomic(const CircleMeasure& mu, double xi) {
    Complex s{0.0, 0.0};
    bool integral = is_integer_valued(xi);
    for (const auto& a : mu.atoms()) {
        if (integral && a.angle.is_rational()) {
            // exact phase: frac(n p / q) = ((n p) mod q)/q
            auto n = static_cast<long long>(xi);
            long long q = a.angle.den();
            long long r = static_cast<long long>(
                (static_cast<__int128>(n) * a.angle.num()) % q);
            if (r < 0) r += q;
            s += a.weight * unit_phase(static_cast<double>(r) / static_cast<double>(q));
        } else {
            s += a.weight * unit_phase(xi * a.angle.value());
        }
    }
    return {s, 0.0};
}

FourierValue hat_lebesgue(double xi) {
    if (xi == 0.0) return {Complex(1.0, 0.0), 0.0};
    if (is_integer_valued(xi)) return {Complex(0.0, 0.0), 0.0};
    Complex num = unit_phase(xi) - Complex(1.0, 0.0);
    return {num / Complex(0.0, kTwoPi * xi), 0.0};
}

FourierValue hat_trig(const CircleMeasure& mu, double xi) {
    const auto& coeffs = mu.density_coeffs();
    if (is_integer_valued(xi)) {
        auto it = coeffs.find(-static_cast<long long>(xi));
        return {it == coeffs.end() ? Complex(0.0, 0.0) : it->second, 0.0};
    }
    Complex s{0.0, 0.0};
    for (const auto& [k, c] : coeffs) {
        double arg = xi + static_cast<double>(k);
        Complex e = (unit_phase(arg) - Complex(1.0, 0.0)) / Complex(0.0, kTwoPi * arg);
        s += c * e;
    }
    return {s, 0.0};
}

FourierValue hat_self_similar(const CircleMeasure& mu, double xi, double tol) {
    // least J with 2 pi |xi| / b^J <= tol; remaining tail replaces mu^(xi/b^J) by 1
    double bound = kTwoPi * std::abs(xi);
    int depth = 0;
    while (bound > tol && depth < 4000) {
        bound /= mu.base();
        ++depth;
    }
    ScaledPhaseSequence seq(xi, mu.base());
    Complex prod{1.0, 0.0};
    for (int j = 0; j < depth; ++j)
        prod *= digit_symbol(mu, seq.next());
    return {prod, bound};
}

// sum_{j>J} pi |xi| b^{-n_j} <= pi |xi| b^{-n_{J+1}} * b/(b-1)   (n_j increase by >= 1)
double convolution_tail_bound(const CircleMeasure& mu, double xi, int truncated_at) {
    const auto& rule = mu.exponents();
    if (rule.finite() && truncated_at >= static_cast<int>(rule.entries.size()))
        return 0.0;
    long long n_next = rule.exponent(truncated_at + 1);
    double b = mu.base();
    double log2term = std::log2(kPi * std::max(std::abs(xi), 1e-300)) -
                      static_cast<double>(n_next) * std::log2(b);
    if (log2term < -1060.0) return 0.0;
    return kPi * std::abs(xi) * std::pow(b, -static_cast<double>(n_next)) * (b / (b - 1.0));
}

FourierValue hat_infinite_convolution(const CircleMeasure& mu, double xi, double tol) {
    int limit = mu.exponents().factor_limit(mu.j_max());
    int depth = -1;
    double bound = 0.0;
    for (int j = 0; j <= limit; ++j) {
        bound = convolution_tail_bound(mu, xi, j);
        if (bound <= tol) {
            depth = j;
            break;
        }
    }
    if (depth < 0) {
        std::ostringstream os;
        os << "fourier_stieltjes: tail bound " << convolution_tail_bound(mu, xi, limit)
           << " not within tol " << tol << " at j_max " << mu.j_max();
        throw PrecisionError(os.str(), convolution_tail_bound(mu, xi, limit));
    }
    Complex prod{1.0, 0.0};
    for (int j = 1; j <= depth; ++j) {
        double t = scaled_phase_at(xi, mu.base(), mu.exponents().exponent(j));
        prod *= 0.5 * (Complex(1.0, 0.0) + unit_phase(t));
    }
    return {prod, bound};
}

} // namespace

FourierValue fourier_stieltjes(const CircleMeasure& mu, double xi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("fourier_stieltjes: tol must be > 0");
    if (!std::isfinite(xi)) throw std::invalid_argument("fourier_stieltjes: xi must be finite");
    // evaluate at |xi| and conjugate, so Hermitian symmetry is exact
    if (xi < 0.0) {
        FourierValue v = fourier_stieltjes(mu, -xi, tol);
        return {std::conj(v.value), v.error_bound};
    }
    switch (mu.kind()) {
    case CircleMeasure::Kind::Atomic: return hat_atomic(mu, xi);
    case CircleMeasure::Kind::Lebesgue: return hat_lebesgue(xi);
    case CircleMeasure::Kind::TrigDensity: return hat_trig(mu, xi);
    case CircleMeasure::Kind::SelfSimilar: return hat_self_similar(mu, xi, tol);
    case CircleMeasure::Kind::InfiniteConvolution: return hat_infinite_convolution(mu, xi, tol);
    case CircleMeasure::Kind::Mixture: {
        Complex s{0.0, 0.0};
        double bound = 0.0;
        for (const auto& [part, w] : mu.parts()) {
            FourierValue v = fourier_stieltjes(part, xi, tol);
            s += w * v.value;
            bound += w * v.error_bound;
        }
        return {s, bound};
    }
    }
    throw std::logic_error("fourier_stieltjes: unreachable");
}

double wiener_atom_index(const CircleMeasure& mu, long long n_terms) {
    if (n_terms < 1) throw std::invalid_argument("wiener_atom_index: N must be >= 1");
    double acc = 0.0;
    for (long long n = 1; n <= n_terms; ++n)
        acc += std::norm(fourier_stieltjes(mu, static_cast<double>(n), 1e-12).value);
    return acc / static_cast<double>(n_terms);
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

double pow_ll(double b, long long e) {
    double log2v = -static_cast<double>(e) * std::log2(b);
    if (log2v < -1076.0) return 0.0;
    return std::pow(b, -static_cast<double>(e));
}

std::size_t checked_pow_count(std::size_t radix, int depth, std::size_t budget) {
    std::size_t n = 1;
    for (int i = 0; i < depth; ++i) {
        if (n > budget / radix) return budget + 1;
        n *= radix;
    }
    return n;
}

} // namespace

std::size_t quad_node_count(const CircleMeasure& mu, int depth) {
    switch (mu.kind()) {
    case CircleMeasure::Kind::Atomic: return mu.atoms().size();
    case CircleMeasure::Kind::Lebesgue:
    case CircleMeasure::Kind::TrigDensity:
        return checked_pow_count(2, depth, std::size_t(1) << 62);
    case CircleMeasure::Kind::SelfSimilar:
        return checked_pow_count(mu.digits().size(), depth, std::size_t(1) << 62);
    case CircleMeasure::Kind::InfiniteConvolution: {
        int level = std::min(depth, mu.exponents().factor_limit(mu.j_max()));
        return checked_pow_count(2, level, std::size_t(1) << 62);
    }
    case CircleMeasure::Kind::Mixture: {
        std::size_t n = 0;
        for (const auto& [part, w] : mu.parts()) {
            (void)w;
            n += quad_node_count(part, depth);
        }
        return n;
    }
    }
    return 0;
}

double quad_cell_diameter(const CircleMeasure& mu, int depth) {
    switch (mu.kind()) {
    case CircleMeasure::Kind::Atomic: return 0.0;
    case CircleMeasure::Kind::Lebesgue:
    case CircleMeasure::Kind::TrigDensity:
        return std::ldexp(1.0, -depth);
    case CircleMeasure::Kind::SelfSimilar:
        return std::pow(static_cast<double>(mu.base()), -static_cast<double>(depth));
    case CircleMeasure::Kind::InfiniteConvolution: {
        int level = std::min(depth, mu.exponents().factor_limit(mu.j_max()));
        const auto& rule = mu.exponents();
        if (rule.finite() && level >= static_cast<int>(rule.entries.size())) return 0.0;
        double b = mu.base();
        return pow_ll(b, rule.exponent(level + 1)) * (b / (b - 1.0));
    }
    case CircleMeasure::Kind::Mixture: {
        double d = 0.0;
        for (const auto& [part, w] : mu.parts()) {
            (void)w;
            d = std::max(d, quad_cell_diameter(part, depth));
        }
        return d;
    }
    }
    return 0.0;
}

void for_each_quad_node(const CircleMeasure& mu, int depth,
                        const std::function<void(double, double)>& fn,
                        std::size_t node_budget) {
    if (depth < 1) throw std::invalid_argument("quadrature: depth must be >= 1");
    if (quad_node_count(mu, depth) > node_budget)
        throw BudgetError("quadrature: node budget exceeded at depth " + std::to_string(depth));

    switch (mu.kind()) {
    case CircleMeasure::Kind::Atomic:
        for (const auto& a : mu.atoms()) fn(a.angle.value(), a.weight);
        return;
    case CircleMeasure::Kind::Lebesgue: {
        std::size_t cells = std::size_t(1) << depth;
        double h = std::ldexp(1.0, -depth);
        for (std::size_t i = 0; i < cells; ++i) fn((i + 0.5) * h, h);
        return;
    }
    case CircleMeasure::Kind::TrigDensity: {
        std::size_t cells = std::size_t(1) << depth;
        double h = std::ldexp(1.0, -depth);
        const auto& coeffs = mu.density_coeffs();
        for (std::size_t i = 0; i < cells; ++i) {
            double a = i * h;
            // exact cell mass: sum_k c_k (e^{2 pi i k (a+h)} - e^{2 pi i k a})/(2 pi i k)
            double w = 0.0;
            for (const auto& [k, c] : coeffs) {
                if (k == 0) {
                    w += h;
                } else {
                    Complex diff = unit_phase(k * (a + h)) - unit_phase(k * a);
                    w += (c * diff / Complex(0.0, kTwoPi * k)).real();
                }
            }
            fn(a + 0.5 * h, w);
        }
        return;
    }
    case CircleMeasure::Kind::SelfSimilar: {
        const auto& digs = mu.digits();
        const auto& ws = mu.digit_weights();
        std::size_t leaves = checked_pow_count(digs.size(), depth, node_budget);
        std::vector<int> digit_index(depth, 0);
        std::vector<double> scale(depth);
        double s = 1.0;
        for (int l = 0; l < depth; ++l) {
            s /= mu.base();
            scale[l] = s; // b^{-(l+1)}
        }
        for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
            double theta = 0.0, w = 1.0;
            for (int l = 0; l < depth; ++l) {
                theta += digs[digit_index[l]] * scale[l];
                w *= ws[digit_index[l]];
            }
            fn(theta, w);
            // odometer, least-significant level last -> nodes ascend in theta
            for (int l = depth - 1; l >= 0; --l) {
                if (++digit_index[l] < static_cast<int>(digs.size())) break;
                digit_index[l] = 0;
            }
        }
        return;
    }
    case CircleMeasure::Kind::InfiniteConvolution: {
        int level = std::min(depth, mu.exponents().factor_limit(mu.j_max()));
        std::size_t count = std::size_t(1) << level;
        std::vector<double> offs(level);
        for (int j = 1; j <= level; ++j)
            offs[j - 1] = pow_ll(mu.base(), mu.exponents().exponent(j));
        double w = 1.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < count; ++i) {
            double theta = 0.0;
            // bit 0 toggles the smallest offset: superincreasing offsets make
            // the binary-counter order ascend in theta
            for (int j = 0; j < level; ++j)
                if (i & (std::size_t(1) << j)) theta += offs[level - 1 - j];
            fn(theta, w);
        }
        return;
    }
    case CircleMeasure::Kind::Mixture:
        for (const auto& [part, pw] : mu.parts()) {
            double scale = pw;
            for_each_quad_node(part, depth,
                               [&](double th, double w) { fn(th, scale * w); },
                               node_budget);
        }
        return;
    }
}

QuadratureRule quadrature(const CircleMeasure& mu, int depth, std::size_t node_budget) {
    QuadratureRule rule;
    rule.cell_diameter = quad_cell_diameter(mu, depth);
    rule.nodes.reserve(quad_node_count(mu, depth));
    for_each_quad_node(mu, depth, [&](double th, double w) {
        rule.nodes.push_back({th, w});
    }, node_budget);
    return rule;
}

// ---------------------------------------------------------------------------
// mass_near

namespace {

double circle_dist(double a, double b) {
    double d = std::abs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

// interval [lo, lo+len] vs window [c-r, c+r], both on the line; the circle
// wrap is handled by the caller passing c, c-1, c+1
bool interval_hits(double lo, double len, double c, double r) {
    return lo <= c + r && lo + len >= c - r;
}

double mass_near_self_similar(const CircleMeasure& mu, double lo, double len, double w,
                              int level, int depth, double c, double r) {
    if (!(interval_hits(lo, len, c, r) || interval_hits(lo, len, c - 1.0, r) ||
          interval_hits(lo, len, c + 1.0, r)))
        return 0.0;
    if (level == depth) return w;
    double sub = len / mu.base();
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.digits().size(); ++i)
        acc += mass_near_self_similar(mu, lo + mu.digits()[i] * sub, sub,
                                      w * mu.digit_weights()[i], level + 1, depth, c, r);
    return acc;
}

double mass_near_convolution(const CircleMeasure& mu, double partial, int j, int level,
                             double tail, double w, double c, double r) {
    if (j > level) {
        return (interval_hits(partial, tail, c, r) || interval_hits(partial, tail, c - 1.0, r) ||
                interval_hits(partial, tail, c + 1.0, r))
                   ? w
                   : 0.0;
    }
    // remaining spread: offsets j..level plus the tail past the truncation
    double spread = tail;
    for (int i = j; i <= level; ++i)
        spread += pow_ll(mu.base(), mu.exponents().exponent(i));
    if (!(interval_hits(partial, spread, c, r) || interval_hits(partial, spread, c - 1.0, r) ||
          interval_hits(partial, spread, c + 1.0, r)))
        return 0.0;
    double off = pow_ll(mu.base(), mu.exponents().exponent(j));
    return mass_near_convolution(mu, partial, j + 1, level, tail, w * 0.5, c, r) +
           mass_near_convolution(mu, partial + off, j + 1, level, tail, w * 0.5, c, r);
}

} // namespace

double CircleMeasure::mass_near(double center, double radius, int depth) const {
    switch (kind_) {
    case Kind::Atomic: {
        double acc = 0.0;
        for (const auto& a : atoms_)
            if (circle_dist(a.angle.value(), center) <= radius) acc += a.weight;
        return acc;
    }
    case Kind::Lebesgue: return std::min(1.0, 2.0 * radius);
    case Kind::TrigDensity: {
        double sup = 0.0;
        for (const auto& [k, c] : coeffs_) {
            (void)k;
            sup += std::abs(c);
        }
        return std::min(1.0, 2.0 * radius * sup);
    }
    case Kind::SelfSimilar:
        return mass_near_self_similar(*this, 0.0, 1.0, 1.0, 0, depth, center, radius);
    case Kind::InfiniteConvolution: {
        int level = std::min(depth, rule_.factor_limit(j_max_));
        double tail = quad_cell_diameter(*this, level);
        return mass_near_convolution(*this, 0.0, 1, level, tail, 1.0, center, radius);
    }
    case Kind::Mixture: {
        double acc = 0.0;
        for (const auto& [part, w] : parts_)
            acc += w * part.mass_near(center, radius, depth);
        return acc;
    }
    }
    return 1.0;
}

std::string CircleMeasure::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::Atomic: os << "atomic(" << atoms_.size() << " atoms)"; break;
    case Kind::Lebesgue: os << "lebesgue"; break;
    case Kind::TrigDensity: os << "trig_density(" << coeffs_.size() << " coeffs)"; break;
    case Kind::SelfSimilar: {
        os << "self_similar(b=" << base_ << ", D={";
        for (std::size_t i = 0; i < digits_.size(); ++i) os << (i ? "," : "") << digits_[i];
        os << "})";
        break;
    }
    case Kind::InfiniteConvolution:
        os << "infinite_convolution(b=" << base_ << ", j_max=" << j_max_ << ")";
        break;
    case Kind::Mixture: os << "mixture(" << parts_.size() << " parts)"; break;
    }
    return os.str();
}

} // namespace specdyn
