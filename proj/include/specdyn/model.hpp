/*
 * model.hpp — structured contraction operators and their vectors
 *
 * Variants:
 *   CyclicUnitary(mu)    multiplication by e^{2 pi i theta} on the span of
 *                        e_n = e^{2 pi i n theta} in L^2(mu); powers shift
 *                        frequency indices exactly, <e_n, e_m> = mu^(n - m)
 *   UnilateralShift(N)   l^2(Z_+); forward shift is exact and unwindowed,
 *                        N only windows the W_t translation report
 *   FiniteContraction    dense d x d matrix, largest singular value
 *                        <= 1 + 1e-12 checked at construction
 *   DirectSum            ordered orthogonal components
 *
 * Vectors are finite coefficient maps per component; all floating error is
 * quarantined inside the mu^ oracle. Models and vectors are immutable values.
 */
#pragma once

#include <map>
#include <memory>
#include <vector>

#include "specdyn/measure.hpp"

namespace specdyn {

struct ComplexMatrix {
    int n = 0; // rows
    int m = 0; // cols; operators are square, bases may be rectangular
    std::vector<Complex> a; // row-major

    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim) : n(dim), m(dim), a(static_cast<std::size_t>(dim) * dim) {}
    ComplexMatrix(int rows, int cols)
        : n(rows), m(cols), a(static_cast<std::size_t>(rows) * cols) {}
    Complex& at(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
    const Complex& at(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }
};

class OperatorModel {
public:
    enum class Kind { CyclicUnitary, UnilateralShift, FiniteContraction, DirectSum };

    static OperatorModel cyclic_unitary(CircleMeasure mu);
    static OperatorModel unilateral_shift(int truncation);
    static OperatorModel finite_contraction(ComplexMatrix matrix);
    static OperatorModel direct_sum(std::vector<OperatorModel> components);

    Kind kind() const { return kind_; }
    const CircleMeasure& measure() const { return *measure_; }
    int truncation() const { return truncation_; }
    const ComplexMatrix& matrix() const { return matrix_; }
    const std::vector<OperatorModel>& components() const { return components_; }

    // leaf models count as one component
    std::size_t component_count() const;
    const OperatorModel& component(std::size_t i) const;

    // true when every power, including negative ones, is defined
    bool is_invertible() const;
    double finite_spectral_radius() const { return spectral_radius_; }

    std::string describe() const;

private:
    OperatorModel() = default;

    Kind kind_ = Kind::UnilateralShift;
    std::shared_ptr<const CircleMeasure> measure_;
    int truncation_ = 1;
    ComplexMatrix matrix_;
    bool matrix_unitary_ = false;
    double spectral_radius_ = 0.0;
    std::vector<OperatorModel> components_;
};

class VectorRep {
public:
    enum class Kind { Frequencies, Indices, Dense, Sum };
    using SparseMap = std::map<long long, Complex>;

    static VectorRep frequencies(SparseMap coeffs);
    static VectorRep indices(SparseMap coeffs);
    static VectorRep dense(std::vector<Complex> coords);
    static VectorRep direct_sum(std::vector<VectorRep> components);

    // e_n on a cyclic component / basis_k on a shift component
    static VectorRep e(long long freq) { return frequencies({{freq, {1.0, 0.0}}}); }
    static VectorRep basis(long long k) { return indices({{k, {1.0, 0.0}}}); }

    Kind kind() const { return kind_; }
    const SparseMap& coeffs() const { return coeffs_; }
    const std::vector<Complex>& dense_coeffs() const { return dense_; }
    const std::vector<VectorRep>& components() const { return components_; }

    bool is_zero() const;
    double coeff_abs_sum() const; // sum of |coefficients| across all components

private:
    Kind kind_ = Kind::Frequencies;
    SparseMap coeffs_;
    std::vector<Complex> dense_;
    std::vector<VectorRep> components_;
};

// <x, y> with certified bound <= tol; exact (bound 0) away from cyclic parts.
FourierValue inner_product(const OperatorModel& model, const VectorRep& x,
                           const VectorRep& y, double tol);

// ||x|| from <x, x>; the certified bound is propagated.
FourierValue vector_norm(const OperatorModel& model, const VectorRep& x, double tol);

// T^n x. Negative n requires an invertible component.
VectorRep apply_power(const OperatorModel& model, long long n, const VectorRep& x);

// (T*)^n x, n >= 0.
VectorRep apply_adjoint_power(const OperatorModel& model, long long n, const VectorRep& x);

struct TranslationResult {
    VectorRep projected;      // coefficients <W_t x, basis_j>, j < truncation
    double tail_mass = 0.0;   // ||W_t x||^2 - reported coefficient mass
    double error_bound = 0.0; // certified bound on each reported coefficient
};

// W_t in the Laguerre translation model of a UnilateralShift component.
// Pre: x supported below the truncation window.
TranslationResult shift_semigroup_element(const OperatorModel& model, double t,
                                          const VectorRep& x, double tol);

} // namespace specdyn
