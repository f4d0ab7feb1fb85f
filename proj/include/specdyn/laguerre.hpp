/*
 * laguerre.hpp — Laguerre functions and the translation semigroup matrix
 *
 * The orthonormal Laguerre functions on (0, inf)
 *
 *     l_k(s) = sqrt(2) e^{-s} L_k(2s)
 *
 * realize l^2(Z_+) inside L^2(0, inf). Right translation by t >= 0 has matrix
 *
 *     C_{jk}(t) = <W_t l_k, l_j> = int_0^inf l_k(u) l_j(u + t) du
 *               = e^{-t} int_0^inf e^{-v} L_k(v) L_j(v + 2t) dv,
 *
 * a Gauss–Laguerre-exact integral (polynomial integrand of degree j + k).
 * Node counts are doubled until two successive evaluations agree to tol/2,
 * which certifies the reported bound. C_{jk}(t) = 0 exactly for j < k.
 */
#pragma once

#include <vector>

namespace specdyn {

struct GaussLaguerreRule {
    std::vector<double> nodes;
    std::vector<double> weights; // for the weight e^{-x} on (0, inf)
};

// Golub–Welsch rule for the weight e^{-x}; results are cached per count.
const GaussLaguerreRule& gauss_laguerre(int count);

// L_k(x) by the three-term recurrence.
double laguerre_polynomial(int k, double x);

// l_k(s) = sqrt(2) e^{-s} L_k(2s)
double laguerre_function(int k, double s);

struct TranslationCoefficient {
    double value = 0.0;
    double error_bound = 0.0;
};

// C_{jk}(t) to absolute precision tol. Throws PrecisionError if the doubling
// comparison fails to settle within the node budget.
TranslationCoefficient translation_coefficient(int j, int k, double t, double tol);

} // namespace specdyn
