/*
 * harness.hpp — batch experiment drivers behind the `lab` CLI
 *
 * Every driver is a pure function from a config to a report; identical config
 * and fixture produce byte-identical JSON (ordered keys, %.12e floats). Exit
 * codes encode verdict classes: 0 certified-pass, 2 undetermined, 1 failure.
 */
#pragma once

#include <map>
#include <optional>
#include <string>

#include "specdyn/algebra.hpp"
#include "specdyn/finite.hpp"
#include "specdyn/report.hpp"
#include "specdyn/schema.hpp"

namespace specdyn {

struct ExperimentConfig {
    std::string model_path;
    double tol = 1e-9;
    std::optional<Json> seq;   // sequence spec
    std::optional<Json> frame; // frame / operation parameters
    std::string format = "json"; // "json" or "csv" (csv adds a table next to the json)
};

struct CommandResult {
    int exit_code = 0;
    OrderedJson report;
    std::map<std::string, std::string> files; // filename -> contents
};

OrderedJson certificate_json(const Certificate& cert);
OrderedJson classification_json(const ClassificationResult& r);
OrderedJson splitting_json(const SplittingReport& report);
std::string splitting_csv(const SplittingReport& report);
OrderedJson estimate_json(const LimitOperatorEstimate& est);
OrderedJson verdict_json(const EntanglementVerdict& verdict);
OrderedJson resolvent_json(const ResolventComparison& cmp);
OrderedJson wander_json(const WanderReport& report);
OrderedJson finite_analysis_json(const FiniteAnalysis& analysis);

CommandResult cmd_fourier(const ExperimentConfig& config);
CommandResult cmd_classify(const ExperimentConfig& config);
CommandResult cmd_example56(const ExperimentConfig& config);
CommandResult cmd_oracle(const ExperimentConfig& config);
CommandResult cmd_wander(const ExperimentConfig& config);
CommandResult cmd_resolvent(const ExperimentConfig& config);
CommandResult cmd_lint(const std::string& report_path);

} // namespace specdyn
