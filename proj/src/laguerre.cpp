#include "specdyn/laguerre.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "specdyn/measure.hpp"

namespace specdyn {

namespace {

GaussLaguerreRule build_rule(int count) {
    // Jacobi matrix for the weight e^{-x}: diag 2i+1, offdiag -(i+1)
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(count, count);
    for (int i = 0; i < count; ++i) {
        jacobi(i, i) = 2.0 * i + 1.0;
        if (i + 1 < count) {
            jacobi(i, i + 1) = i + 1.0;
            jacobi(i + 1, i) = i + 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussLaguerreRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    for (int i = 0; i < count; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = v0 * v0; // mu_0 = int e^{-x} dx = 1
    }
    return rule;
}

} // namespace

const GaussLaguerreRule& gauss_laguerre(int count) {
    if (count < 1) throw std::invalid_argument("gauss_laguerre: count must be >= 1");
    static std::map<int, GaussLaguerreRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(count);
    if (it == cache.end()) it = cache.emplace(count, build_rule(count)).first;
    return it->second;
}

double laguerre_polynomial(int k, double x) {
    if (k < 0) throw std::invalid_argument("laguerre_polynomial: negative degree");
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = 1.0 - x;
    for (int i = 1; i < k; ++i) {
        double next = ((2.0 * i + 1.0 - x) * cur - i * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double laguerre_function(int k, double s) {
    return std::sqrt(2.0) * std::exp(-s) * laguerre_polynomial(k, 2.0 * s);
}

TranslationCoefficient translation_coefficient(int j, int k, double t, double tol) {
    if (j < 0 || k < 0) throw std::invalid_argument("translation_coefficient: negative index");
    if (t < 0.0) throw std::invalid_argument("translation_coefficient: t must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("translation_coefficient: tol must be > 0");
    if (j < k) return {0.0, 0.0}; // analytic multiplier is lower triangular
    if (t == 0.0) return {j == k ? 1.0 : 0.0, 0.0};

    double scale = std::exp(-t);
    auto evaluate = [&](int count) {
        const auto& rule = gauss_laguerre(count);
        double acc = 0.0;
        for (int i = 0; i < count; ++i) {
            double v = rule.nodes[i];
            acc += rule.weights[i] * laguerre_polynomial(k, v) *
                   laguerre_polynomial(j, v + 2.0 * t);
        }
        return scale * acc;
    };

    int count = std::max(8, (j + k) / 2 + 2); // already degree-exact
    constexpr int kMaxNodes = 4096;
    double prev = evaluate(count);
    while (2 * count <= kMaxNodes) {
        count *= 2;
        double cur = evaluate(count);
        double diff = std::abs(cur - prev);
        if (diff < tol / 2.0) return {cur, diff};
        prev = cur;
    }
    throw PrecisionError("translation_coefficient: node budget exhausted", std::abs(prev));
}

} // namespace specdyn
