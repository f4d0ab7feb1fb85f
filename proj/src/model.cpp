#include "specdyn/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specdyn/laguerre.hpp"

namespace specdyn {

namespace {

constexpr long long kFreqCap = (1LL << 62);

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
    Eigen::MatrixXcd out(m.n, m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) out(i, j) = m.at(i, j);
    return out;
}

void check_shape(const OperatorModel& model, const VectorRep& x, const char* who) {
    bool ok = false;
    switch (model.kind()) {
    case OperatorModel::Kind::CyclicUnitary:
        ok = x.kind() == VectorRep::Kind::Frequencies;
        break;
    case OperatorModel::Kind::UnilateralShift:
        ok = x.kind() == VectorRep::Kind::Indices;
        break;
    case OperatorModel::Kind::FiniteContraction:
        ok = x.kind() == VectorRep::Kind::Dense &&
             static_cast<int>(x.dense_coeffs().size()) == model.matrix().n;
        break;
    case OperatorModel::Kind::DirectSum:
        ok = x.kind() == VectorRep::Kind::Sum &&
             x.components().size() == model.components().size();
        break;
    }
    if (!ok) throw std::invalid_argument(std::string(who) + ": vector shape does not match model");
}

} // namespace

// ---------------------------------------------------------------------------
// OperatorModel

OperatorModel OperatorModel::cyclic_unitary(CircleMeasure mu) {
    OperatorModel m;
    m.kind_ = Kind::CyclicUnitary;
    m.measure_ = std::make_shared<const CircleMeasure>(std::move(mu));
    return m;
}

OperatorModel OperatorModel::unilateral_shift(int truncation) {
    if (truncation < 1) throw std::invalid_argument("unilateral_shift: truncation must be >= 1");
    OperatorModel m;
    m.kind_ = Kind::UnilateralShift;
    m.truncation_ = truncation;
    return m;
}

OperatorModel OperatorModel::finite_contraction(ComplexMatrix matrix) {
    if (matrix.n < 1 || matrix.m != matrix.n ||
        matrix.a.size() != static_cast<std::size_t>(matrix.n) * matrix.n)
        throw std::invalid_argument("finite_contraction: bad matrix shape");
    Eigen::MatrixXcd t = to_eigen(matrix);
    double norm = t.jacobiSvd().singularValues()(0);
    if (norm > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "finite_contraction: operator norm " << norm << " exceeds 1 + 1e-12";
        throw std::invalid_argument(os.str());
    }
    OperatorModel m;
    m.kind_ = Kind::FiniteContraction;
    m.matrix_ = std::move(matrix);
    m.matrix_unitary_ =
        (t.adjoint() * t - Eigen::MatrixXcd::Identity(t.rows(), t.cols())).cwiseAbs().maxCoeff() <=
        1e-10;
    m.spectral_radius_ = t.eigenvalues().cwiseAbs().maxCoeff();
    return m;
}

OperatorModel OperatorModel::direct_sum(std::vector<OperatorModel> components) {
    if (components.empty()) throw std::invalid_argument("direct_sum: no components");
    for (const auto& c : components)
        if (c.kind() == Kind::DirectSum)
            throw std::invalid_argument("direct_sum: nested direct sums are flattened by the caller");
    OperatorModel m;
    m.kind_ = Kind::DirectSum;
    m.components_ = std::move(components);
    return m;
}

std::size_t OperatorModel::component_count() const {
    return kind_ == Kind::DirectSum ? components_.size() : 1;
}

const OperatorModel& OperatorModel::component(std::size_t i) const {
    if (kind_ == Kind::DirectSum) {
        if (i >= components_.size()) throw std::out_of_range("component index");
        return components_[i];
    }
    if (i != 0) throw std::out_of_range("component index");
    return *this;
}

bool OperatorModel::is_invertible() const {
    switch (kind_) {
    case Kind::CyclicUnitary: return true;
    case Kind::UnilateralShift: return false;
    case Kind::FiniteContraction: return matrix_unitary_;
    case Kind::DirectSum:
        return std::all_of(components_.begin(), components_.end(),
                           [](const OperatorModel& c) { return c.is_invertible(); });
    }
    return false;
}

std::string OperatorModel::describe() const {
    switch (kind_) {
    case Kind::CyclicUnitary: return "cyclic_unitary over " + measure_->describe();
    case Kind::UnilateralShift: return "unilateral_shift(N=" + std::to_string(truncation_) + ")";
    case Kind::FiniteContraction: return "finite(" + std::to_string(matrix_.n) + "x" + std::to_string(matrix_.n) + ")";
    case Kind::DirectSum: {
        std::string s = "direct_sum[";
        for (std::size_t i = 0; i < components_.size(); ++i)
            s += (i ? ", " : "") + components_[i].describe();
        return s + "]";
    }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// VectorRep

namespace {

VectorRep::SparseMap pruned(VectorRep::SparseMap m) {
    for (auto it = m.begin(); it != m.end();)
        it = (it->second == Complex(0.0, 0.0)) ? m.erase(it) : std::next(it);
    return m;
}

} // namespace

VectorRep VectorRep::frequencies(SparseMap coeffs) {
    VectorRep v;
    v.kind_ = Kind::Frequencies;
    v.coeffs_ = pruned(std::move(coeffs));
    return v;
}

VectorRep VectorRep::indices(SparseMap coeffs) {
    for (const auto& [k, c] : coeffs) {
        (void)c;
        if (k < 0) throw std::invalid_argument("VectorRep::indices: negative basis index");
    }
    VectorRep v;
    v.kind_ = Kind::Indices;
    v.coeffs_ = pruned(std::move(coeffs));
    return v;
}

VectorRep VectorRep::dense(std::vector<Complex> coords) {
    VectorRep v;
    v.kind_ = Kind::Dense;
    v.dense_ = std::move(coords);
    return v;
}

VectorRep VectorRep::direct_sum(std::vector<VectorRep> components) {
    VectorRep v;
    v.kind_ = Kind::Sum;
    v.components_ = std::move(components);
    return v;
}

bool VectorRep::is_zero() const {
    switch (kind_) {
    case Kind::Frequencies:
    case Kind::Indices: return coeffs_.empty();
    case Kind::Dense:
        return std::all_of(dense_.begin(), dense_.end(),
                           [](Complex c) { return c == Complex(0.0, 0.0); });
    case Kind::Sum:
        return std::all_of(components_.begin(), components_.end(),
                           [](const VectorRep& c) { return c.is_zero(); });
    }
    return true;
}

double VectorRep::coeff_abs_sum() const {
    double acc = 0.0;
    switch (kind_) {
    case Kind::Frequencies:
    case Kind::Indices:
        for (const auto& [k, c] : coeffs_) {
            (void)k;
            acc += std::abs(c);
        }
        break;
    case Kind::Dense:
        for (Complex c : dense_) acc += std::abs(c);
        break;
    case Kind::Sum:
        for (const auto& c : components_) acc += c.coeff_abs_sum();
        break;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// inner products

namespace {

FourierValue inner_cyclic(const CircleMeasure& mu, const VectorRep& x, const VectorRep& y,
                          double tol) {
    double sx = x.coeff_abs_sum(), sy = y.coeff_abs_sum();
    if (sx == 0.0 || sy == 0.0) return {Complex(0.0, 0.0), 0.0};
    // group by frequency difference: <x, y> = sum_r (sum_{n-m=r} c_n conj(d_m)) mu^(r)
    std::map<long long, Complex> by_diff;
    for (const auto& [n, cn] : x.coeffs())
        for (const auto& [m, dm] : y.coeffs())
            by_diff[n - m] += cn * std::conj(dm);
    double tol_each = tol / (sx * sy);
    Complex acc{0.0, 0.0};
    double bound = 0.0;
    for (const auto& [r, coef] : by_diff) {
        FourierValue v = fourier_stieltjes(mu, static_cast<double>(r), tol_each);
        acc += coef * v.value;
        bound += std::abs(coef) * v.error_bound;
    }
    return {acc, bound};
}

FourierValue inner_sparse_exact(const VectorRep& x, const VectorRep& y) {
    Complex acc{0.0, 0.0};
    for (const auto& [k, c] : x.coeffs()) {
        auto it = y.coeffs().find(k);
        if (it != y.coeffs().end()) acc += c * std::conj(it->second);
    }
    return {acc, 0.0};
}

FourierValue inner_dense_exact(const VectorRep& x, const VectorRep& y) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < x.dense_coeffs().size(); ++i)
        acc += x.dense_coeffs()[i] * std::conj(y.dense_coeffs()[i]);
    return {acc, 0.0};
}

} // namespace

FourierValue inner_product(const OperatorModel& model, const VectorRep& x, const VectorRep& y,
                           double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("inner_product: tol must be > 0");
    check_shape(model, x, "inner_product");
    check_shape(model, y, "inner_product");
    switch (model.kind()) {
    case OperatorModel::Kind::CyclicUnitary: return inner_cyclic(model.measure(), x, y, tol);
    case OperatorModel::Kind::UnilateralShift: return inner_sparse_exact(x, y);
    case OperatorModel::Kind::FiniteContraction: return inner_dense_exact(x, y);
    case OperatorModel::Kind::DirectSum: {
        Complex acc{0.0, 0.0};
        double bound = 0.0;
        double tol_each = tol / static_cast<double>(model.components().size());
        for (std::size_t i = 0; i < model.components().size(); ++i) {
            FourierValue v = inner_product(model.components()[i], x.components()[i],
                                           y.components()[i], tol_each);
            acc += v.value;
            bound += v.error_bound;
        }
        return {acc, bound};
    }
    }
    throw std::logic_error("inner_product: unreachable");
}

FourierValue vector_norm(const OperatorModel& model, const VectorRep& x, double tol) {
    FourierValue ip = inner_product(model, x, x, tol);
    double re = std::max(0.0, ip.value.real());
    double norm = std::sqrt(re);
    // |sqrt(a+e) - sqrt(a)| <= sqrt(e)
    return {Complex(norm, 0.0), std::sqrt(ip.error_bound)};
}

// ---------------------------------------------------------------------------
// powers

namespace {

VectorRep shift_keys(const VectorRep& x, long long n, bool drop_negative, VectorRep::Kind kind) {
    VectorRep::SparseMap out;
    for (const auto& [k, c] : x.coeffs()) {
        if (std::abs(k) > kFreqCap - std::abs(n))
            throw std::overflow_error("apply_power: frequency index overflow");
        long long nk = k + n;
        if (drop_negative && nk < 0) continue;
        out[nk] = c;
    }
    return kind == VectorRep::Kind::Frequencies ? VectorRep::frequencies(std::move(out))
                                                : VectorRep::indices(std::move(out));
}

ComplexMatrix matrix_multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            Complex aik = a.at(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (int j = 0; j < a.n; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

ComplexMatrix matrix_adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) out.at(i, j) = std::conj(a.at(j, i));
    return out;
}

std::vector<Complex> matrix_apply(const ComplexMatrix& a, const std::vector<Complex>& v) {
    std::vector<Complex> out(a.n, Complex(0.0, 0.0));
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) out[i] += a.at(i, j) * v[j];
    return out;
}

// binary exponentiation; n >= 1
ComplexMatrix matrix_power(ComplexMatrix base, long long n) {
    ComplexMatrix result(base.n);
    for (int i = 0; i < base.n; ++i) result.at(i, i) = Complex(1.0, 0.0);
    while (n > 0) {
        if (n & 1) result = matrix_multiply(result, base);
        n >>= 1;
        if (n > 0) base = matrix_multiply(base, base);
    }
    return result;
}

} // namespace

VectorRep apply_power(const OperatorModel& model, long long n, const VectorRep& x) {
    check_shape(model, x, "apply_power");
    switch (model.kind()) {
    case OperatorModel::Kind::CyclicUnitary:
        return shift_keys(x, n, false, VectorRep::Kind::Frequencies);
    case OperatorModel::Kind::UnilateralShift:
        if (n < 0)
            throw std::invalid_argument("apply_power: negative power of the unilateral shift");
        return shift_keys(x, n, false, VectorRep::Kind::Indices);
    case OperatorModel::Kind::FiniteContraction: {
        if (n == 0) return x;
        if (n < 0) {
            if (!model.is_invertible())
                throw std::invalid_argument(
                    "apply_power: negative power of a non-invertible finite contraction");
            return apply_adjoint_power(model, -n, x); // unitary: T^{-1} = T*
        }
        return VectorRep::dense(matrix_apply(matrix_power(model.matrix(), n), x.dense_coeffs()));
    }
    case OperatorModel::Kind::DirectSum: {
        std::vector<VectorRep> comps;
        comps.reserve(model.components().size());
        for (std::size_t i = 0; i < model.components().size(); ++i)
            comps.push_back(apply_power(model.components()[i], n, x.components()[i]));
        return VectorRep::direct_sum(std::move(comps));
    }
    }
    throw std::logic_error("apply_power: unreachable");
}

VectorRep apply_adjoint_power(const OperatorModel& model, long long n, const VectorRep& x) {
    if (n < 0) throw std::invalid_argument("apply_adjoint_power: n must be >= 0");
    check_shape(model, x, "apply_adjoint_power");
    switch (model.kind()) {
    case OperatorModel::Kind::CyclicUnitary:
        return shift_keys(x, -n, false, VectorRep::Kind::Frequencies);
    case OperatorModel::Kind::UnilateralShift:
        // backward shift truncates below index 0
        return shift_keys(x, -n, true, VectorRep::Kind::Indices);
    case OperatorModel::Kind::FiniteContraction: {
        if (n == 0) return x;
        return VectorRep::dense(
            matrix_apply(matrix_power(matrix_adjoint(model.matrix()), n), x.dense_coeffs()));
    }
    case OperatorModel::Kind::DirectSum: {
        std::vector<VectorRep> comps;
        comps.reserve(model.components().size());
        for (std::size_t i = 0; i < model.components().size(); ++i)
            comps.push_back(apply_adjoint_power(model.components()[i], n, x.components()[i]));
        return VectorRep::direct_sum(std::move(comps));
    }
    }
    throw std::logic_error("apply_adjoint_power: unreachable");
}

// ---------------------------------------------------------------------------
// translation semigroup

TranslationResult shift_semigroup_element(const OperatorModel& model, double t,
                                          const VectorRep& x, double tol) {
    if (model.kind() != OperatorModel::Kind::UnilateralShift)
        throw std::invalid_argument("shift_semigroup_element: not a shift component");
    if (t < 0.0) throw std::invalid_argument("shift_semigroup_element: t must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("shift_semigroup_element: tol must be > 0");
    check_shape(model, x, "shift_semigroup_element");
    int window = model.truncation();
    for (const auto& [k, c] : x.coeffs()) {
        (void)c;
        if (k >= window)
            throw std::invalid_argument(
                "shift_semigroup_element: vector support exceeds the truncation window");
    }
    if (t == 0.0) return {x, 0.0, 0.0};

    double abs_sum = x.coeff_abs_sum();
    double tol_each = abs_sum > 0.0 ? tol / abs_sum : tol;

    VectorRep::SparseMap out;
    double bound = 0.0;
    double mass = 0.0;
    for (int j = 0; j < window; ++j) {
        Complex acc{0.0, 0.0};
        double coeff_bound = 0.0;
        for (const auto& [k, c] : x.coeffs()) {
            auto tc = translation_coefficient(j, static_cast<int>(k), t, tol_each);
            acc += c * tc.value;
            coeff_bound += std::abs(c) * tc.error_bound;
        }
        if (acc != Complex(0.0, 0.0)) out[j] = acc;
        bound = std::max(bound, coeff_bound);
        mass += std::norm(acc);
    }

    double norm2 = 0.0; // translation is isometric: ||W_t x||^2 = ||x||^2
    for (const auto& [k, c] : x.coeffs()) {
        (void)k;
        norm2 += std::norm(c);
    }
    TranslationResult result;
    result.projected = VectorRep::indices(std::move(out));
    result.tail_mass = std::max(0.0, norm2 - mass);
    result.error_bound = bound;
    return result;
}

} // namespace specdyn
