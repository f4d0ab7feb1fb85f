/*
 * dynamics.hpp — trajectory scans, limit-operator detection, certificates
 *
 * Limit claims are three-tiered and every output is tagged:
 *   certified  — closed-form rate bound (truncated-product families)
 *   predicted  — closed-form limit with only an empirical rate
 *   empirical  — Cauchy residual only; no convergence claim
 *
 * Certified closed forms on cyclic components:
 *   SelfSimilar(b) along Powers(b):
 *     |mu^(b^k + m) - mu^(m) mu^(1)| <= 4 pi |m| b^{-k}
 *     (split the product at depth k; both factors move by at most 2 pi |m| b^{-k})
 *   InfiniteConvolution(b, n_j) along TowerPowers b^{n_k}:
 *     |mu^(b^{n_k} + w) - mu^(w)| <= sum_{j>k} pi b^{n_k - n_j} <= 2 pi b^{n_k - n_{k+1}}
 *   so the limit operators are mu^(1)·I and I respectively.
 *
 * A Poisson recurrence certificate carries the explicit bound sequence
 * eps_k with <U^{n_k} x, x> >= ||x||^2 - eps_k, and the exact algebra
 * ||U^{n_k} x - x||^2 = 2(||x||^2 - Re <U^{n_k} x, x>) <= 2 eps_k upgrades the
 * weak return to a strong one.
 */
#pragma once

#include <optional>
#include <string>

#include "specdyn/measure.hpp"
#include "specdyn/model.hpp"

namespace specdyn {

struct SequenceSpec {
    enum class Form { Powers, TowerPowers, Arithmetic, Explicit, ContinuousGrid };

    Form form = Form::Powers;
    long long base = 2;       // Powers / TowerPowers
    ExponentRule exponents;   // TowerPowers
    long long start = 1, step = 1;
    std::vector<long long> entries;
    std::vector<double> times;
    int length = 1;

    static SequenceSpec powers(long long base, int k);
    static SequenceSpec tower_powers(long long base, ExponentRule rule, int k);
    static SequenceSpec arithmetic(long long start, long long step, int k);
    static SequenceSpec explicit_list(std::vector<long long> entries);
    static SequenceSpec continuous_grid(std::vector<double> times);

    bool is_continuous() const { return form == Form::ContinuousGrid; }
    // strictly increasing; throws std::overflow_error past 2^62
    std::vector<long long> discrete_entries() const;
    std::string describe() const;
};

struct Certificate {
    enum class Kind { PoissonRecurrence, WeakStabilityByClass, ScalarLimit, WeaklyWandering, Empirical };
    enum class Tier { Certified, Predicted, Empirical };
    enum class StabilityReason { RiemannLebesgue, ShiftStructure, SpectralRadiusLt1 };

    Kind kind = Kind::Empirical;
    Tier tier = Tier::Empirical;
    std::string note;

    // PoissonRecurrence
    std::optional<SequenceSpec> sequence;
    std::vector<double> eps;              // bound sequence eps_k
    std::vector<double> observed_deficit; // ||x||^2 - Re<U^{n_k} x, x>
    std::vector<double> strong_return;    // ||U^{n_k} x - x||^2 = 2 * deficit

    // WeakStabilityByClass
    std::optional<StabilityReason> reason;

    // ScalarLimit: certified V = c I along `sequence`
    std::optional<Complex> scalar;
    double rate_bound = 0.0;

    // WeaklyWandering
    std::vector<long long> wander_indices;
    double wander_eps = 0.0;

    // Empirical observations (n or t, observed Re pairing)
    std::vector<std::pair<double, double>> observations;
};

// ⟨T^{n_k} x, y⟩ for a discrete sequence (continuous grids live in the bridge layer).
std::vector<FourierValue> trajectory(const OperatorModel& model, const VectorRep& x,
                                     const VectorRep& y, const SequenceSpec& seq, double tol);

struct LimitOperatorEstimate {
    SequenceSpec sequence;
    std::vector<VectorRep> frame;
    std::vector<std::vector<FourierValue>> matrix_elements; // at the largest k
    double cauchy_residual = 0.0; // max element move between the last two k
    Certificate::Tier tier = Certificate::Tier::Empirical;
    bool has_prediction = false;
    std::vector<std::vector<Complex>> predicted;
    std::optional<Complex> prediction_scalar; // V = c I when the class supports it
    double prediction_rate_bound = 0.0;
    std::string prediction_note;
};

// Needs at least two sequence entries. Reports evidence, never convergence;
// closed-form predictions are attached for the certified measure classes.
LimitOperatorEstimate limit_operator_estimate(const OperatorModel& model,
                                              const SequenceSpec& seq,
                                              const std::vector<VectorRep>& frame, double tol);

struct RecurrencePolicy {
    int sequence_length = 5;       // K for certified families
    long long greedy_limit = 4096; // N_max for the greedy search
    double tol = 1e-12;
};

// Poisson recurrence certificate for the cyclic vector e_0, or Empirical data.
Certificate recurrence_certificate(const OperatorModel& model, const RecurrencePolicy& policy);

enum class SubspaceLabel { H_m, H_w, Unknown };
std::string to_string(SubspaceLabel label);

struct ClassificationResult {
    SubspaceLabel label = SubspaceLabel::Unknown;
    Certificate certificate;
};

// Closed-form classes first, then certificate search, then unknown.
ClassificationResult classify_component(const OperatorModel& component,
                                        const RecurrencePolicy& policy);

struct WanderReport {
    bool success = false;
    std::vector<long long> indices;
    double achieved_eps = 0.0;      // max pairwise |<T^a x, T^b x>| of the set
    double requested_eps = 0.0;
    double best_blocking_eps = 0.0; // on failure: nearest miss while extending
    std::optional<Certificate> certificate;
};

// Greedy search (smallest admissible index first) for m indices with all
// pairwise orbit pairings <= eps; the certificate is re-verified before return.
WanderReport weakly_wandering_search(const OperatorModel& model, const VectorRep& x, int count,
                                     double eps, long long n_max, double tol = 1e-12);

struct LimitCycleShift {
    long long shift = 0;
    double max_residual = 0.0; // over the frame
    double allowed = 0.0;      // tol + certified rate bound
    bool pass = false;
};

struct LimitCycleReport {
    std::vector<LimitCycleShift> shifts;
    bool all_pass = false;
};

// |<T^{m + n_K} x, f_j> - <T^m V x, f_j>| <= tol + rate over the estimate frame,
// with V the estimate's closed-form prediction.
LimitCycleReport limit_cycle_check(const OperatorModel& model,
                                   const LimitOperatorEstimate& estimate, const VectorRep& x,
                                   const std::vector<long long>& shifts, double tol);

} // namespace specdyn
