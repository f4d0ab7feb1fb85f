/*
 * algebra.hpp — polynomial functional calculus, splitting, entanglement
 *
 * The limit algebra is exercised through two finitely-checkable surfaces:
 *   (i)  the polynomial calculus w(U): exact frequency-domain convolution,
 *   (ii) frame-scale membership residuals: least squares against the exact
 *        Gram matrix of {U^n x : |n| <= N}, pseudo-inverted with spectral
 *        truncation at 1e-10 (singular measures make the orbit nearly
 *        dependent; silent inversion would fabricate memberships).
 *
 * The entanglement verdict implements the subspace-equality criterion: the
 * per-component discrete and continuous labels must agree with no unknowns.
 * Disagreeing certified labels with trivially intersecting H_m sets yield
 * "decoupled"; any unknown side yields "undetermined". Refining the policy
 * can only resolve undetermined — it never flips a determined verdict.
 */
#pragma once

#include <optional>

#include "specdyn/cayley.hpp"
#include "specdyn/dynamics.hpp"
#include "specdyn/model.hpp"

namespace specdyn {

// finite Fourier polynomial w(z) = sum_k w_k z^k acting as w(U)
using CalculusElement = std::map<long long, Complex>;

CalculusElement calculus_multiply(const CalculusElement& a, const CalculusElement& b);

struct CalculusResult {
    VectorRep vector;
    double sup_norm_estimate = 0.0; // max |w(e^{2 pi i theta})| on a 4096 grid
};

// w(U) x by exact coefficient convolution (cyclic components only).
CalculusResult apply_calculus(const OperatorModel& model, const CalculusElement& w,
                              const VectorRep& x);

struct MembershipResult {
    double residual = 0.0;  // distance from y to span{U^n x : |n| <= N}
    int rank = 0;           // Gram rank kept after spectral truncation
    double condition = 0.0; // kept-eigenvalue spread
    double truncation = 1e-10;
};

MembershipResult limit_space_membership(const OperatorModel& model, const VectorRep& x,
                                        const VectorRep& y, int window, double tol);

struct SplittingReport {
    std::vector<ClassificationResult> components;
    std::vector<std::size_t> h_m_components;
    std::vector<std::size_t> h_w_components;
    std::vector<std::size_t> unknown_components;
};

SplittingReport classify_model(const OperatorModel& model, const RecurrencePolicy& policy);

// componentwise copy per label; exact. Refuses when x has mass on an
// unknown-labeled component.
std::pair<VectorRep, VectorRep> projection_P_m(const OperatorModel& model,
                                               const SplittingReport& splitting,
                                               const VectorRep& x);

struct FlightTerm {
    std::size_t component = 0;
    CalculusElement element; // T_tau with T_tau x_tau = the component of x
};

struct FlightDecomposition {
    std::vector<FlightTerm> recurrent_terms;
    VectorRep x_w;
};

// x = sum_tau T_tau x_tau + x_w with x_tau = e_0 per H_m component; exact.
FlightDecomposition flight_decomposition(const OperatorModel& model,
                                         const SplittingReport& splitting, const VectorRep& x);

struct EntanglementPolicy {
    RecurrencePolicy discrete;
    // continuous-side recurrence candidates t = 2 pi b^{n_k}; filled from the
    // component's own exponent rule when empty
    std::vector<double> grid_times;
    long long scan_multiples = 4096;   // almost-period scan over t = 2 pi m
    double empirical_threshold = 0.75; // best observed Re nu^ accepted as H_m evidence
    double tol = 1e-6;
    int membership_window = 8;
    double shift_decay_probe = 50.0;
    // validation hook: inject a continuous-side label for one component
    std::optional<std::pair<std::size_t, SubspaceLabel>> continuous_label_override;
};

struct ComponentEntanglement {
    std::size_t index = 0;
    SubspaceLabel discrete_label = SubspaceLabel::Unknown;
    SubspaceLabel continuous_label = SubspaceLabel::Unknown;
    Certificate discrete_certificate;
    Certificate continuous_certificate;
    bool agree = false;
    bool decoupled_flag = false;
    // frame-scale witnesses on H_m components (identity element included, so
    // the wPr witness itself must sit in both spans)
    std::optional<MembershipResult> witness_discrete;
    std::optional<MembershipResult> witness_continuous;
};

struct EntanglementVerdict {
    enum class Verdict { Entangled, Decoupled, Undetermined };
    Verdict verdict = Verdict::Undetermined;
    std::vector<ComponentEntanglement> components;
    std::string note;
};

std::string to_string(EntanglementVerdict::Verdict v);

EntanglementVerdict entanglement_check(const OperatorModel& model,
                                       const EntanglementPolicy& policy);

// Continuous-side classification of a single component (exposed for tests).
ClassificationResult classify_component_continuous(const OperatorModel& component,
                                                   const EntanglementPolicy& policy);

} // namespace specdyn
