#include "specdyn/harness.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace specdyn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string tier_name(Certificate::Tier t) {
    switch (t) {
    case Certificate::Tier::Certified: return "certified";
    case Certificate::Tier::Predicted: return "predicted";
    case Certificate::Tier::Empirical: return "empirical";
    }
    return "?";
}

std::string reason_name(Certificate::StabilityReason r) {
    switch (r) {
    case Certificate::StabilityReason::RiemannLebesgue: return "riemann_lebesgue";
    case Certificate::StabilityReason::ShiftStructure: return "shift_structure";
    case Certificate::StabilityReason::SpectralRadiusLt1: return "spectral_radius_lt_1";
    }
    return "?";
}

OrderedJson sequence_json(const SequenceSpec& seq) {
    OrderedJson j;
    switch (seq.form) {
    case SequenceSpec::Form::Powers:
        j["form"] = "powers";
        j["base"] = seq.base;
        j["length"] = seq.length;
        break;
    case SequenceSpec::Form::TowerPowers: {
        j["form"] = "tower";
        j["base"] = seq.base;
        if (seq.exponents.form == ExponentRule::Form::Power) {
            j["exponents"] = {{"form", "power"}, {"base", seq.exponents.power_base}};
        } else {
            j["exponents"] = {{"form", "explicit"}, {"entries", seq.exponents.entries}};
        }
        j["length"] = seq.length;
        break;
    }
    case SequenceSpec::Form::Arithmetic:
        j["form"] = "arithmetic";
        j["start"] = seq.start;
        j["step"] = seq.step;
        j["length"] = seq.length;
        break;
    case SequenceSpec::Form::Explicit:
        j["form"] = "explicit";
        j["entries"] = seq.entries;
        break;
    case SequenceSpec::Form::ContinuousGrid:
        j["form"] = "grid";
        j["times"] = seq.times;
        break;
    }
    return j;
}

std::string format_e(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

} // namespace

// ---------------------------------------------------------------------------
// serializers

OrderedJson certificate_json(const Certificate& cert) {
    OrderedJson j;
    switch (cert.kind) {
    case Certificate::Kind::PoissonRecurrence: {
        j["kind"] = "poisson_recurrence";
        j["tier"] = tier_name(cert.tier);
        if (cert.sequence) j["sequence"] = sequence_json(*cert.sequence);
        auto entries = OrderedJson::array();
        for (std::size_t k = 0; k < cert.eps.size(); ++k) {
            OrderedJson row;
            row["eps"] = cert.eps[k];
            if (k < cert.observed_deficit.size())
                row["deficit"] = real_leaf(cert.observed_deficit[k], cert.eps[k]);
            if (k < cert.strong_return.size())
                row["strong_return"] = real_leaf(cert.strong_return[k], 2.0 * cert.eps[k]);
            entries.push_back(std::move(row));
        }
        j["bounds"] = std::move(entries);
        break;
    }
    case Certificate::Kind::WeakStabilityByClass:
        j["kind"] = "weak_stability_by_class";
        j["tier"] = tier_name(cert.tier);
        if (cert.reason) j["reason"] = reason_name(*cert.reason);
        break;
    case Certificate::Kind::ScalarLimit:
        j["kind"] = "scalar_limit";
        j["tier"] = tier_name(cert.tier);
        if (cert.sequence) j["sequence"] = sequence_json(*cert.sequence);
        if (cert.scalar) j["scalar"] = complex_leaf(*cert.scalar, cert.rate_bound);
        break;
    case Certificate::Kind::WeaklyWandering:
        j["kind"] = "weakly_wandering";
        j["tier"] = tier_name(cert.tier);
        j["indices"] = cert.wander_indices;
        j["eps"] = cert.wander_eps;
        break;
    case Certificate::Kind::Empirical:
        j["kind"] = "empirical";
        j["tier"] = "empirical";
        break;
    }
    if (!cert.observations.empty()) {
        auto obs = OrderedJson::array();
        for (const auto& [t, re] : cert.observations) {
            OrderedJson row;
            row["at"] = t;
            row["re_pairing"] = cert.tier == Certificate::Tier::Certified && cert.kind != Certificate::Kind::Empirical
                                    ? real_leaf(re, cert.eps.empty() ? 0.0 : cert.eps.front())
                                    : real_leaf_empirical(re);
            obs.push_back(std::move(row));
        }
        j["observations"] = std::move(obs);
    }
    if (!cert.note.empty()) j["note"] = cert.note;
    return j;
}

OrderedJson classification_json(const ClassificationResult& r) {
    OrderedJson j;
    j["label"] = to_string(r.label);
    j["certificate"] = certificate_json(r.certificate);
    return j;
}

OrderedJson splitting_json(const SplittingReport& report) {
    OrderedJson j;
    auto comps = OrderedJson::array();
    for (std::size_t i = 0; i < report.components.size(); ++i) {
        OrderedJson row = classification_json(report.components[i]);
        row["component"] = i;
        comps.push_back(std::move(row));
    }
    j["components"] = std::move(comps);
    j["h_m_components"] = report.h_m_components;
    j["h_w_components"] = report.h_w_components;
    j["unknown_components"] = report.unknown_components;
    return j;
}

std::string splitting_csv(const SplittingReport& report) {
    std::string out = "component,label,certificate,tier\n";
    for (std::size_t i = 0; i < report.components.size(); ++i) {
        const auto& c = report.components[i];
        OrderedJson cert = certificate_json(c.certificate);
        out += std::to_string(i) + "," + to_string(c.label) + "," +
               cert["kind"].get<std::string>() + "," + tier_name(c.certificate.tier) + "\n";
    }
    return out;
}

OrderedJson estimate_json(const LimitOperatorEstimate& est) {
    OrderedJson j;
    j["sequence"] = sequence_json(est.sequence);
    j["frame_size"] = est.frame.size();
    auto rows = OrderedJson::array();
    for (const auto& row : est.matrix_elements) {
        auto cells = OrderedJson::array();
        for (const auto& v : row) cells.push_back(fourier_leaf(v));
        rows.push_back(std::move(cells));
    }
    j["matrix_elements"] = std::move(rows);
    j["cauchy_residual"] = real_leaf_empirical(est.cauchy_residual);
    j["tier"] = tier_name(est.tier);
    if (est.has_prediction) {
        auto rows2 = OrderedJson::array();
        for (const auto& row : est.predicted) {
            auto cells = OrderedJson::array();
            for (const auto& v : row) cells.push_back(complex_leaf(v, est.prediction_rate_bound));
            rows2.push_back(std::move(cells));
        }
        j["predicted"] = std::move(rows2);
        j["prediction_rate_bound"] = est.prediction_rate_bound;
        j["prediction"] = est.prediction_note;
    }
    return j;
}

OrderedJson verdict_json(const EntanglementVerdict& verdict) {
    OrderedJson j;
    j["verdict"] = to_string(verdict.verdict);
    j["note"] = verdict.note;
    auto comps = OrderedJson::array();
    for (const auto& c : verdict.components) {
        OrderedJson row;
        row["component"] = c.index;
        row["discrete_label"] = to_string(c.discrete_label);
        row["continuous_label"] = to_string(c.continuous_label);
        row["agree"] = c.agree;
        if (c.decoupled_flag) row["decoupled_flag"] = true;
        row["discrete_certificate"] = certificate_json(c.discrete_certificate);
        row["continuous_certificate"] = certificate_json(c.continuous_certificate);
        if (c.witness_discrete) {
            row["witness_residual_discrete"] =
                real_leaf_empirical(c.witness_discrete->residual);
            row["witness_rank_discrete"] = c.witness_discrete->rank;
        }
        if (c.witness_continuous) {
            row["witness_residual_continuous"] =
                real_leaf_empirical(c.witness_continuous->residual);
            row["witness_rank_continuous"] = c.witness_continuous->rank;
        }
        comps.push_back(std::move(row));
    }
    j["components"] = std::move(comps);
    return j;
}

OrderedJson resolvent_json(const ResolventComparison& cmp) {
    OrderedJson j;
    j["spectral"] = complex_leaf(cmp.spectral, cmp.spectral_bound);
    j["laplace"] = complex_leaf(cmp.laplace, cmp.laplace_bound);
    j["discrepancy"] = real_leaf(cmp.discrepancy, cmp.spectral_bound + cmp.laplace_bound);
    return j;
}

OrderedJson wander_json(const WanderReport& report) {
    OrderedJson j;
    j["success"] = report.success;
    j["indices"] = report.indices;
    j["achieved_eps"] = real_leaf_empirical(report.achieved_eps);
    j["requested_eps"] = report.requested_eps;
    if (!report.success && report.best_blocking_eps < 1e300)
        j["best_blocking_eps"] = real_leaf_empirical(report.best_blocking_eps);
    if (report.certificate) j["certificate"] = certificate_json(*report.certificate);
    return j;
}

OrderedJson finite_analysis_json(const FiniteAnalysis& analysis) {
    OrderedJson j;
    j["dimension"] = analysis.matrix.n;
    j["unitary_rank"] = analysis.unitary_basis.m;
    j["rank_tolerance"] = analysis.rank_tolerance;
    j["unitarity_defect"] = real_leaf(analysis.unitarity_defect, analysis.rank_tolerance);
    auto eigs = OrderedJson::array();
    for (const auto& ev : analysis.unitary_eigenvalues)
        eigs.push_back(complex_leaf(ev, analysis.rank_tolerance));
    j["unitary_eigenvalues"] = std::move(eigs);
    j["scope_note"] = "point-spectrum regime: validates the limit machinery, not the "
                      "flight-vector models";
    return j;
}

// ---------------------------------------------------------------------------
// commands

namespace {

const CircleMeasure& measure_of(const OperatorModel& model, const char* who) {
    if (model.kind() == OperatorModel::Kind::CyclicUnitary) return model.measure();
    if (model.kind() == OperatorModel::Kind::DirectSum)
        for (const auto& c : model.components())
            if (c.kind() == OperatorModel::Kind::CyclicUnitary) return c.measure();
    throw std::invalid_argument(std::string(who) + ": no cyclic component in the model");
}

Json measure_file_or_model(const std::string& path, CircleMeasure& out_measure) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file: " + path);
    Json j;
    in >> j;
    std::string kind = j.is_object() && j.contains("kind") ? j["kind"].get<std::string>() : "";
    if (kind == "atomic" || kind == "lebesgue" || kind == "trig_density" ||
        kind == "self_similar" || kind == "infinite_convolution" || kind == "mixture") {
        out_measure = measure_from_json(j);
        return j;
    }
    ModelFile f = parse_model_file(j);
    out_measure = measure_of(f.model, "fourier");
    return j;
}

} // namespace

CommandResult cmd_fourier(const ExperimentConfig& config) {
    CircleMeasure mu = CircleMeasure::lebesgue();
    Json echo = measure_file_or_model(config.model_path, mu);

    std::vector<double> xis;
    if (config.seq) {
        SequenceSpec seq = sequence_from_json(*config.seq);
        if (seq.is_continuous()) {
            xis = seq.times;
        } else {
            for (long long n : seq.discrete_entries()) xis.push_back(static_cast<double>(n));
        }
    } else {
        for (int n = 1; n <= 10; ++n) xis.push_back(n);
    }

    double tol = config.tol;
    CommandResult out;
    out.report["command"] = "fourier";
    out.report["measure"] = OrderedJson(echo.contains("measure") ? echo["measure"] : echo);
    out.report["tol"] = tol;
    auto rows = OrderedJson::array();
    std::string csv = "xi,re,im,bound\n";
    for (double xi : xis) {
        FourierValue v = fourier_stieltjes(mu, xi, tol);
        OrderedJson row;
        row["xi"] = xi;
        row["hat"] = fourier_leaf(v);
        rows.push_back(std::move(row));
        csv += format_e(xi) + "," + format_e(v.value.real()) + "," + format_e(v.value.imag()) +
               "," + format_e(v.error_bound) + "\n";
    }
    out.report["values"] = std::move(rows);
    out.files["fourier.csv"] = csv;
    out.exit_code = 0;
    return out;
}

CommandResult cmd_classify(const ExperimentConfig& config) {
    ModelFile file = load_model_file(config.model_path);
    RecurrencePolicy policy;
    policy.tol = std::min(config.tol, 1e-10);
    SplittingReport report = classify_model(file.model, policy);

    CommandResult out;
    out.report["command"] = "classify";
    out.report["model"] = model_to_json(file.model);
    out.report["splitting"] = splitting_json(report);
    out.files["labels.csv"] = splitting_csv(report);
    out.exit_code = report.unknown_components.empty() ? 0 : 2;
    return out;
}

CommandResult cmd_wander(const ExperimentConfig& config) {
    ModelFile file = load_model_file(config.model_path);
    const OperatorModel& model = file.model.component(0);

    int count = 4;
    double eps = 0.1;
    long long n_max = 19683; // 3^9
    VectorRep x = model.kind() == OperatorModel::Kind::UnilateralShift ? VectorRep::basis(0)
                                                                       : VectorRep::e(0);
    if (config.frame) {
        const Json& f = *config.frame;
        count = f.value("count", count);
        eps = f.value("eps", eps);
        n_max = f.value("n_max", n_max);
        if (f.contains("x")) x = vector_from_json(f.at("x"), model);
    }
    WanderReport report = weakly_wandering_search(model, x, count, eps, n_max);

    CommandResult out;
    out.report["command"] = "wander";
    out.report["model"] = model_to_json(model);
    out.report["count"] = count;
    out.report["eps"] = eps;
    out.report["n_max"] = n_max;
    out.report["result"] = wander_json(report);
    out.exit_code = report.success ? 0 : 2;
    return out;
}

CommandResult cmd_resolvent(const ExperimentConfig& config) {
    ModelFile file = load_model_file(config.model_path);
    const OperatorModel* cyclic = nullptr;
    for (std::size_t i = 0; i < file.model.component_count(); ++i)
        if (file.model.component(i).kind() == OperatorModel::Kind::CyclicUnitary) {
            cyclic = &file.model.component(i);
            break;
        }
    if (!cyclic) throw std::invalid_argument("resolvent: no cyclic component");

    VectorRep x = VectorRep::e(0), y = VectorRep::e(0);
    if (config.frame) {
        if (config.frame->contains("x")) x = vector_from_json(config.frame->at("x"), *cyclic);
        if (config.frame->contains("y")) y = vector_from_json(config.frame->at("y"), *cyclic);
    }
    double tol = config.tol == 1e-9 ? 1e-6 : config.tol;
    CayleyBridge bridge(OperatorModel::cyclic_unitary(cyclic->measure()));
    ResolventComparison cmp = resolvent_two_ways(bridge, x, y, tol);

    CommandResult out;
    out.report["command"] = "resolvent";
    out.report["model"] = model_to_json(*cyclic);
    out.report["tol"] = tol;
    out.report["result"] = resolvent_json(cmp);
    out.exit_code = cmp.discrepancy <= 10.0 * (cmp.spectral_bound + cmp.laplace_bound + tol) ? 0 : 1;
    return out;
}

CommandResult cmd_oracle(const ExperimentConfig& config) {
    ModelFile file = load_model_file(config.model_path);
    if (file.model.kind() != OperatorModel::Kind::FiniteContraction)
        throw std::invalid_argument("oracle: finite model required");
    FiniteSplitting split = classify_finite(file.model.matrix());

    CommandResult out;
    out.report["command"] = "oracle";
    out.report["model"] = model_to_json(file.model);
    out.report["analysis"] = finite_analysis_json(split.analysis);
    out.report["probe_power"] = split.probe_power;
    out.report["max_late_pairing"] = real_leaf_empirical(split.max_late_pairing);
    out.report["recurrent_part_trivial"] = split.recurrent_part_trivial;
    out.exit_code = split.recurrent_part_trivial ? 0 : 2;
    return out;
}

// ---------------------------------------------------------------------------
// the composite pipeline

namespace {

SequenceSpec natural_sequence(const CircleMeasure& mu, int length) {
    if (mu.kind() == CircleMeasure::Kind::InfiniteConvolution) {
        int k = length;
        while (k > 1 &&
               static_cast<double>(mu.exponents().exponent(k)) *
                       std::log2(static_cast<double>(mu.base())) >
                   62.0)
            --k;
        return SequenceSpec::tower_powers(mu.base(), mu.exponents(), k);
    }
    if (mu.kind() == CircleMeasure::Kind::SelfSimilar)
        return SequenceSpec::powers(mu.base(), 16);
    return SequenceSpec::arithmetic(1, 1, 10);
}

std::vector<VectorRep> default_cyclic_frame() {
    std::vector<VectorRep> frame;
    for (long long n = -2; n <= 2; ++n) frame.push_back(VectorRep::e(n));
    return frame;
}

std::vector<VectorRep> default_shift_frame() {
    std::vector<VectorRep> frame;
    for (long long k = 0; k <= 3; ++k) frame.push_back(VectorRep::basis(k));
    return frame;
}

} // namespace

CommandResult cmd_example56(const ExperimentConfig& config) {
    ModelFile file = load_model_file(config.model_path);
    const OperatorModel& model = file.model;

    RecurrencePolicy discrete_policy;
    discrete_policy.tol = 1e-12;
    EntanglementPolicy policy;
    policy.discrete = discrete_policy;
    policy.tol = 1e-6;
    policy.continuous_label_override = file.continuous_label_override;

    CommandResult out;
    out.report["command"] = "example56";
    out.report["model"] = model_to_json(model);

    bool certified_ok = true;

    // per-component trajectories and limit-operator estimates
    auto comps = OrderedJson::array();
    for (std::size_t i = 0; i < model.component_count(); ++i) {
        const OperatorModel& comp = model.component(i);
        OrderedJson row;
        row["component"] = i;
        row["describe"] = comp.describe();
        if (comp.kind() == OperatorModel::Kind::CyclicUnitary) {
            SequenceSpec seq = natural_sequence(comp.measure(), 5);
            auto traj = trajectory(comp, VectorRep::e(0), VectorRep::e(0), seq, 1e-12);
            auto tj = OrderedJson::array();
            for (const auto& v : traj) tj.push_back(fourier_leaf(v));
            row["trajectory"] = std::move(tj);
            row["trajectory_sequence"] = sequence_json(seq);
            if (seq.form != SequenceSpec::Form::Arithmetic) {
                LimitOperatorEstimate est =
                    limit_operator_estimate(comp, seq, default_cyclic_frame(), 1e-10);
                row["limit_operator"] = estimate_json(est);
                if (est.has_prediction) {
                    double worst = 0.0;
                    for (std::size_t a = 0; a < est.frame.size(); ++a)
                        for (std::size_t b = 0; b < est.frame.size(); ++b)
                            worst = std::max(worst,
                                             std::abs(est.matrix_elements[a][b].value -
                                                      est.predicted[a][b]));
                    bool ok = worst <= est.prediction_rate_bound + 1e-9;
                    row["limit_operator_within_rate"] = ok;
                    certified_ok = certified_ok && ok;
                }
            }
            try {
                ResolventComparison cmp =
                    resolvent_two_ways(CayleyBridge(OperatorModel::cyclic_unitary(comp.measure())),
                                       VectorRep::e(0), VectorRep::e(0), policy.tol);
                row["resolvent"] = resolvent_json(cmp);
                bool rok =
                    cmp.discrepancy <= 10.0 * (cmp.spectral_bound + cmp.laplace_bound + policy.tol);
                row["resolvent_consistent"] = rok;
                certified_ok = certified_ok && rok;
            } catch (const PrecisionError& e) {
                // pole-adjacent mass defeats the Lipschitz certificates; the
                // skip is reported rather than silently downgraded
                row["resolvent_skipped"] = std::string(e.what());
            }
        } else if (comp.kind() == OperatorModel::Kind::UnilateralShift) {
            SequenceSpec seq = SequenceSpec::powers(2, 6);
            auto traj = trajectory(comp, VectorRep::basis(0), VectorRep::basis(0), seq, 1e-12);
            auto tj = OrderedJson::array();
            for (const auto& v : traj) tj.push_back(fourier_leaf(v));
            row["trajectory"] = std::move(tj);
            row["trajectory_sequence"] = sequence_json(seq);
            LimitOperatorEstimate est =
                limit_operator_estimate(comp, seq, default_shift_frame(), 1e-12);
            row["limit_operator"] = estimate_json(est);
            double worst = 0.0;
            for (const auto& r2 : est.matrix_elements)
                for (const auto& v : r2) worst = std::max(worst, std::abs(v.value));
            bool zok = worst == 0.0;
            row["limit_operator_is_zero"] = zok;
            certified_ok = certified_ok && zok;
        }
        comps.push_back(std::move(row));
    }
    out.report["pipeline"] = std::move(comps);

    // splitting and the P_m projection of the canonical probe vector
    SplittingReport splitting = classify_model(model, discrete_policy);
    out.report["splitting"] = splitting_json(splitting);

    // entanglement
    EntanglementVerdict verdict = entanglement_check(model, policy);
    out.report["entanglement"] = verdict_json(verdict);

    for (std::size_t i : splitting.h_m_components) {
        const auto& cert = splitting.components[i].certificate;
        certified_ok = certified_ok && cert.tier == Certificate::Tier::Certified;
    }

    out.files["labels.csv"] = splitting_csv(splitting);
    if (!certified_ok)
        out.exit_code = 1;
    else if (verdict.verdict == EntanglementVerdict::Verdict::Undetermined ||
             !splitting.unknown_components.empty())
        out.exit_code = 2;
    else
        out.exit_code = 0;
    return out;
}

CommandResult cmd_lint(const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw std::invalid_argument("cannot open report: " + report_path);
    Json j;
    in >> j;
    auto issues = lint_report(OrderedJson(j));
    CommandResult out;
    out.report["command"] = "lint";
    out.report["file"] = report_path;
    auto list = OrderedJson::array();
    for (const auto& issue : issues) {
        OrderedJson row;
        row["path"] = issue.path;
        row["message"] = issue.message;
        list.push_back(std::move(row));
    }
    out.report["issues"] = std::move(list);
    out.exit_code = issues.empty() ? 0 : 1;
    return out;
}

} // namespace specdyn
