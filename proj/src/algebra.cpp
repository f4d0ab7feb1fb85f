#include "specdyn/algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specdyn {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kGramTruncation = 1e-10;
}

// ---------------------------------------------------------------------------
// calculus

CalculusElement calculus_multiply(const CalculusElement& a, const CalculusElement& b) {
    CalculusElement out;
    for (const auto& [i, ci] : a)
        for (const auto& [j, cj] : b) out[i + j] += ci * cj;
    for (auto it = out.begin(); it != out.end();)
        it = (it->second == Complex(0.0, 0.0)) ? out.erase(it) : std::next(it);
    return out;
}

CalculusResult apply_calculus(const OperatorModel& model, const CalculusElement& w,
                              const VectorRep& x) {
    if (model.kind() != OperatorModel::Kind::CyclicUnitary)
        throw std::invalid_argument("apply_calculus: cyclic component required");
    if (x.kind() != VectorRep::Kind::Frequencies)
        throw std::invalid_argument("apply_calculus: frequency vector required");
    VectorRep::SparseMap out;
    for (const auto& [k, wk] : w)
        for (const auto& [n, cn] : x.coeffs()) out[n + k] += wk * cn;

    double sup = 0.0;
    constexpr int kGrid = 4096;
    for (int i = 0; i < kGrid; ++i) {
        double th = static_cast<double>(i) / kGrid;
        Complex v{0.0, 0.0};
        for (const auto& [k, wk] : w) v += wk * unit_phase(k * th);
        sup = std::max(sup, std::abs(v));
    }
    return {VectorRep::frequencies(std::move(out)), sup};
}

// ---------------------------------------------------------------------------
// membership

namespace {

MembershipResult solve_membership(const Eigen::MatrixXcd& gram, const Eigen::VectorXcd& rhs,
                                  double y_norm2) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        0.5 * (gram + gram.adjoint())); // symmetrize rounding noise
    MembershipResult out;
    out.truncation = kGramTruncation;
    double lambda_min = 1e300, lambda_max = 0.0;
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(rhs.size());
    for (int i = 0; i < solver.eigenvalues().size(); ++i) {
        double ev = solver.eigenvalues()(i);
        if (ev <= kGramTruncation) continue;
        ++out.rank;
        lambda_min = std::min(lambda_min, ev);
        lambda_max = std::max(lambda_max, ev);
        Eigen::VectorXcd u = solver.eigenvectors().col(i);
        proj += u * (u.dot(rhs) / ev);
    }
    out.condition = out.rank > 0 ? lambda_max / lambda_min : 0.0;
    double fitted = std::real(rhs.dot(proj));
    out.residual = std::sqrt(std::max(0.0, y_norm2 - fitted));
    return out;
}

} // namespace

MembershipResult limit_space_membership(const OperatorModel& model, const VectorRep& x,
                                        const VectorRep& y, int window, double tol) {
    if (model.kind() != OperatorModel::Kind::CyclicUnitary)
        throw std::invalid_argument("limit_space_membership: cyclic component required");
    if (window < 0) throw std::invalid_argument("limit_space_membership: window must be >= 0");
    int dim = 2 * window + 1;
    std::vector<VectorRep> orbit;
    orbit.reserve(dim);
    for (int n = -window; n <= window; ++n) orbit.push_back(apply_power(model, n, x));

    Eigen::MatrixXcd gram(dim, dim);
    Eigen::VectorXcd rhs(dim);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b)
            gram(a, b) = inner_product(model, orbit[a], orbit[b], tol).value;
        rhs(a) = inner_product(model, y, orbit[a], tol).value;
    }
    double y_norm2 = inner_product(model, y, y, tol).value.real();
    // residual^2 = ||y||^2 - v* G^+ v with v_a = <y, U^a x>
    Eigen::VectorXcd v = rhs;
    return solve_membership(gram, v, y_norm2);
}

// ---------------------------------------------------------------------------
// splitting

SplittingReport classify_model(const OperatorModel& model, const RecurrencePolicy& policy) {
    SplittingReport report;
    for (std::size_t i = 0; i < model.component_count(); ++i) {
        ClassificationResult r = classify_component(model.component(i), policy);
        switch (r.label) {
        case SubspaceLabel::H_m: report.h_m_components.push_back(i); break;
        case SubspaceLabel::H_w: report.h_w_components.push_back(i); break;
        case SubspaceLabel::Unknown: report.unknown_components.push_back(i); break;
        }
        report.components.push_back(std::move(r));
    }
    return report;
}

namespace {

VectorRep component_zero_like(const VectorRep& x) {
    switch (x.kind()) {
    case VectorRep::Kind::Frequencies: return VectorRep::frequencies({});
    case VectorRep::Kind::Indices: return VectorRep::indices({});
    case VectorRep::Kind::Dense:
        return VectorRep::dense(std::vector<Complex>(x.dense_coeffs().size(), Complex(0.0, 0.0)));
    case VectorRep::Kind::Sum: break;
    }
    throw std::invalid_argument("component_zero_like: nested sums unsupported");
}

const VectorRep& component_of(const VectorRep& x, std::size_t i, std::size_t count) {
    if (count == 1) return x;
    if (x.kind() != VectorRep::Kind::Sum || x.components().size() != count)
        throw std::invalid_argument("projection_P_m: vector shape does not match model");
    return x.components()[i];
}

} // namespace

std::pair<VectorRep, VectorRep> projection_P_m(const OperatorModel& model,
                                               const SplittingReport& splitting,
                                               const VectorRep& x) {
    std::size_t count = model.component_count();
    if (splitting.components.size() != count)
        throw std::invalid_argument("projection_P_m: splitting does not match model");
    std::vector<VectorRep> m_parts, w_parts;
    for (std::size_t i = 0; i < count; ++i) {
        const VectorRep& xi = component_of(x, i, count);
        SubspaceLabel label = splitting.components[i].label;
        if (label == SubspaceLabel::Unknown && !xi.is_zero())
            throw std::invalid_argument(
                "projection_P_m: component " + std::to_string(i) +
                " is unlabeled but carries mass; refusing to project");
        if (label == SubspaceLabel::H_m) {
            m_parts.push_back(xi);
            w_parts.push_back(component_zero_like(xi));
        } else {
            m_parts.push_back(component_zero_like(xi));
            w_parts.push_back(xi);
        }
    }
    if (count == 1) return {m_parts[0], w_parts[0]};
    return {VectorRep::direct_sum(std::move(m_parts)), VectorRep::direct_sum(std::move(w_parts))};
}

FlightDecomposition flight_decomposition(const OperatorModel& model,
                                         const SplittingReport& splitting, const VectorRep& x) {
    auto [x_m, x_w] = projection_P_m(model, splitting, x);
    FlightDecomposition out;
    out.x_w = std::move(x_w);
    std::size_t count = model.component_count();
    for (std::size_t i : splitting.h_m_components) {
        const OperatorModel& comp = model.component(i);
        if (comp.kind() != OperatorModel::Kind::CyclicUnitary)
            throw std::invalid_argument("flight_decomposition: H_m component is not cyclic");
        const VectorRep& xi = component_of(x, i, count);
        if (xi.is_zero()) continue;
        // x_tau = e_0, so T_tau is the coefficient polynomial itself
        FlightTerm term;
        term.component = i;
        for (const auto& [n, c] : xi.coeffs()) term.element[n] = c;
        out.recurrent_terms.push_back(std::move(term));
    }
    return out;
}

// ---------------------------------------------------------------------------
// continuous-side classification

namespace {

std::vector<double> default_grid_times(const CircleMeasure& mu, int count) {
    std::vector<double> ts;
    if (mu.kind() == CircleMeasure::Kind::InfiniteConvolution ||
        mu.kind() == CircleMeasure::Kind::SelfSimilar) {
        double b = mu.base();
        for (int k = 1; k <= count; ++k) {
            double e = mu.kind() == CircleMeasure::Kind::InfiniteConvolution
                           ? static_cast<double>(mu.exponents().exponent(k))
                           : static_cast<double>(k);
            double t = kTwoPi * std::pow(b, e);
            if (!std::isfinite(t) || t > 1e15) break;
            ts.push_back(t);
        }
    }
    return ts;
}

} // namespace

ClassificationResult classify_component_continuous(const OperatorModel& component,
                                                   const EntanglementPolicy& policy) {
    ClassificationResult out;
    switch (component.kind()) {
    case OperatorModel::Kind::UnilateralShift: {
        out.label = SubspaceLabel::H_w;
        out.certificate.kind = Certificate::Kind::WeakStabilityByClass;
        out.certificate.tier = Certificate::Tier::Certified;
        out.certificate.reason = Certificate::StabilityReason::ShiftStructure;
        out.certificate.note = "cnu isometric semigroup: weakly stable; decay evidence attached";
        TranslationResult probe = shift_semigroup_element(component, policy.shift_decay_probe,
                                                          VectorRep::basis(0), 1e-8);
        double max_coeff = 0.0;
        for (const auto& [j, c] : probe.projected.coeffs()) {
            (void)j;
            max_coeff = std::max(max_coeff, std::abs(c));
        }
        out.certificate.observations.emplace_back(policy.shift_decay_probe, max_coeff);
        return out;
    }
    case OperatorModel::Kind::FiniteContraction: {
        if (component.finite_spectral_radius() < 1.0 - 1e-9) {
            out.label = SubspaceLabel::H_w;
            out.certificate.kind = Certificate::Kind::WeakStabilityByClass;
            out.certificate.tier = Certificate::Tier::Certified;
            out.certificate.reason = Certificate::StabilityReason::SpectralRadiusLt1;
            out.certificate.note = "spectral radius < 1: the semigroup decays";
            return out;
        }
        out.label = SubspaceLabel::Unknown;
        out.certificate.note = "finite contraction with peripheral spectrum";
        return out;
    }
    case OperatorModel::Kind::DirectSum:
        throw std::invalid_argument("classify_component_continuous: pass a single summand");
    case OperatorModel::Kind::CyclicUnitary: break;
    }

    const CircleMeasure& mu = component.measure();
    if (mu.kind() == CircleMeasure::Kind::Lebesgue || mu.kind() == CircleMeasure::Kind::TrigDensity) {
        // the pushforward of an absolutely continuous measure under the smooth
        // angle map is absolutely continuous on the line
        out.label = SubspaceLabel::H_w;
        out.certificate.kind = Certificate::Kind::WeakStabilityByClass;
        out.certificate.tier = Certificate::Tier::Certified;
        out.certificate.reason = Certificate::StabilityReason::RiemannLebesgue;
        out.certificate.note = "absolutely continuous pushforward: nu^(t) -> 0";
        return out;
    }

    if (mu.kind() == CircleMeasure::Kind::Atomic && mu.atoms().size() == 1) {
        // U_t e_0 = e^{i t lambda_0} e_0: exact recurrence at t = 2 pi k / lambda_0
        double lambda0 = CayleyAngleMap::lambda_of_theta(mu.atoms()[0].angle.value());
        out.label = SubspaceLabel::H_m;
        out.certificate.kind = Certificate::Kind::PoissonRecurrence;
        out.certificate.tier = Certificate::Tier::Certified;
        std::ostringstream os;
        os << "single line atom at lambda = " << lambda0 << ": exact almost periods";
        out.certificate.note = os.str();
        for (int k = 1; k <= 4; ++k) {
            double t = lambda0 == 0.0 ? static_cast<double>(k) : kTwoPi * k / lambda0;
            out.certificate.eps.push_back(0.0);
            out.certificate.observations.emplace_back(t, 1.0);
        }
        return out;
    }

    // singular (or multi-atom) component: empirical recurrence scan
    CayleyBridge bridge(OperatorModel::cyclic_unitary(mu));
    std::vector<double> grid = policy.grid_times;
    if (grid.empty()) grid = default_grid_times(mu, policy.discrete.sequence_length);

    Certificate evidence;
    evidence.kind = Certificate::Kind::Empirical;
    evidence.tier = Certificate::Tier::Empirical;
    double best = -2.0;
    try {
        double t_max = grid.empty() ? 0.0 : grid.back();
        if (policy.scan_multiples > 0)
            t_max = std::max(t_max, kTwoPi * static_cast<double>(policy.scan_multiples));
        GroupScanner scan(bridge, VectorRep::e(0), VectorRep::e(0), policy.tol, t_max);
        for (double t : grid) {
            double re = scan.at(t).value.real();
            evidence.observations.emplace_back(t, re);
            best = std::max(best, re);
        }
        double improving = -2.0;
        for (long long m = 1; m <= policy.scan_multiples; ++m) {
            double t = kTwoPi * static_cast<double>(m);
            double re = scan.at(t).value.real();
            if (re > improving + 1e-12) {
                improving = re;
                evidence.observations.emplace_back(t, re);
            }
            best = std::max(best, re);
        }
    } catch (const PrecisionError& e) {
        evidence.note = std::string("scan skipped: ") + e.what();
    }

    std::ostringstream os;
    os << "continuous recurrence scan: best Re nu^ = " << best
       << (evidence.note.empty() ? "" : ("; " + evidence.note));
    evidence.note = os.str();
    if (best >= policy.empirical_threshold) {
        out.label = SubspaceLabel::H_m;
        out.certificate = std::move(evidence);
        out.certificate.note += "; accepted as H_m evidence (no certified bound)";
    } else {
        out.label = SubspaceLabel::Unknown;
        out.certificate = std::move(evidence);
    }
    return out;
}

// ---------------------------------------------------------------------------
// entanglement

std::string to_string(EntanglementVerdict::Verdict v) {
    switch (v) {
    case EntanglementVerdict::Verdict::Entangled: return "entangled";
    case EntanglementVerdict::Verdict::Decoupled: return "decoupled";
    case EntanglementVerdict::Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

EntanglementVerdict entanglement_check(const OperatorModel& model,
                                       const EntanglementPolicy& policy) {
    EntanglementVerdict out;
    bool any_unknown = false;
    bool all_agree = true;
    std::vector<std::size_t> h_m_discrete, h_m_continuous;

    for (std::size_t i = 0; i < model.component_count(); ++i) {
        const OperatorModel& comp = model.component(i);
        ComponentEntanglement row;
        row.index = i;

        ClassificationResult d = classify_component(comp, policy.discrete);
        row.discrete_label = d.label;
        row.discrete_certificate = std::move(d.certificate);

        ClassificationResult c;
        if (policy.continuous_label_override && policy.continuous_label_override->first == i) {
            c.label = policy.continuous_label_override->second;
            c.certificate.kind = Certificate::Kind::Empirical;
            c.certificate.tier = Certificate::Tier::Empirical;
            c.certificate.note = "continuous label injected by override (validation hook)";
        } else {
            c = classify_component_continuous(comp, policy);
        }
        row.continuous_label = c.label;
        row.continuous_certificate = std::move(c.certificate);

        row.agree = row.discrete_label == row.continuous_label &&
                    row.discrete_label != SubspaceLabel::Unknown;
        any_unknown = any_unknown || row.discrete_label == SubspaceLabel::Unknown ||
                      row.continuous_label == SubspaceLabel::Unknown;
        all_agree = all_agree && row.agree;
        if (row.discrete_label == SubspaceLabel::H_m) h_m_discrete.push_back(i);
        if (row.continuous_label == SubspaceLabel::H_m) h_m_continuous.push_back(i);

        // frame-scale witnesses: the wPr witness must sit in both orbit spans
        if (row.discrete_label == SubspaceLabel::H_m &&
            comp.kind() == OperatorModel::Kind::CyclicUnitary) {
            VectorRep witness = VectorRep::e(0);
            row.witness_discrete = limit_space_membership(comp, VectorRep::e(0), witness,
                                                          policy.membership_window, policy.tol);
            // continuous span over a small grid through t = 0
            CayleyBridge bridge(OperatorModel::cyclic_unitary(comp.measure()));
            int half = std::min(policy.membership_window, 8);
            std::vector<double> ts;
            for (int k = -half; k <= half; ++k) ts.push_back(0.5 * k);
            GroupScanner scan(bridge, VectorRep::e(0), VectorRep::e(0), policy.tol, ts.back() * 2.0 + 1.0);
            int dim = static_cast<int>(ts.size());
            Eigen::MatrixXcd gram(dim, dim);
            Eigen::VectorXcd rhs(dim);
            for (int a = 0; a < dim; ++a) {
                for (int b = 0; b < dim; ++b)
                    gram(a, b) = scan.at(ts[a] - ts[b]).value;
                rhs(a) = std::conj(scan.at(ts[a]).value);
            }
            row.witness_continuous = solve_membership(gram, rhs, 1.0);
        }
        out.components.push_back(std::move(row));
    }

    if (any_unknown) {
        out.verdict = EntanglementVerdict::Verdict::Undetermined;
        out.note = "at least one side is unlabeled; refine the policy to resolve";
    } else if (all_agree) {
        out.verdict = EntanglementVerdict::Verdict::Entangled;
        out.note = "per-component labels agree on both sides";
    } else {
        std::vector<std::size_t> common;
        std::set_intersection(h_m_discrete.begin(), h_m_discrete.end(), h_m_continuous.begin(),
                              h_m_continuous.end(), std::back_inserter(common));
        for (auto& row : out.components)
            row.decoupled_flag = !row.agree;
        if (common.empty()) {
            out.verdict = EntanglementVerdict::Verdict::Decoupled;
            out.note = "certified recurrent subspaces intersect trivially";
        } else {
            out.verdict = EntanglementVerdict::Verdict::Undetermined;
            out.note = "labels disagree but the recurrent subspaces overlap";
        }
    }
    return out;
}

} // namespace specdyn
