// lab — batch experiment driver
//
// lab <subcommand> --model <file> --out <dir> [--tol <x>] [--seq <json>]
//     [--frame <json>] [--format json|csv]
//
// Exit codes: 0 certified-pass, 2 undetermined, 1 failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "specdyn/harness.hpp"

namespace fs = std::filesystem;
using namespace specdyn;

namespace {

struct CliOptions {
    ExperimentConfig config;
    std::string out_dir = ".";
    std::string seq_text, frame_text;
};

void add_common(CLI::App* cmd, CliOptions& opts, bool model_required = true) {
    auto* m = cmd->add_option("--model", opts.config.model_path, "model or measure file (JSON)");
    if (model_required) m->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--tol", opts.config.tol, "tolerance override");
    cmd->add_option("--seq", opts.seq_text, "sequence spec (JSON)");
    cmd->add_option("--frame", opts.frame_text, "frame / operation parameters (JSON)");
    cmd->add_option("--format", opts.config.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
}

int write_outputs(const std::string& name, const CliOptions& opts, const CommandResult& result) {
    fs::create_directories(opts.out_dir);
    fs::path json_path = fs::path(opts.out_dir) / (name + ".json");
    std::ofstream out(json_path);
    out << dump_fixed(result.report);
    out.close();
    if (opts.config.format == "csv") {
        for (const auto& [fname, contents] : result.files) {
            std::ofstream f(fs::path(opts.out_dir) / fname);
            f << contents;
        }
    }
    std::cout << name << ": exit " << result.exit_code << ", report " << json_path.string()
              << "\n";
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator-dynamics laboratory"};
    app.require_subcommand(1);

    CliOptions opts;
    std::string lint_path;

    auto* fourier = app.add_subcommand("fourier", "Fourier-Stieltjes table of a measure");
    add_common(fourier, opts);
    auto* classify = app.add_subcommand("classify", "split a model into H_m / H_w components");
    add_common(classify, opts);
    auto* example56 = app.add_subcommand("example56", "run the full splitting/entanglement pipeline");
    add_common(example56, opts);
    auto* oracle = app.add_subcommand("oracle", "finite-dimensional brute-force analysis");
    add_common(oracle, opts);
    auto* wander = app.add_subcommand("wander", "greedy weakly wandering search");
    add_common(wander, opts);
    auto* resolvent = app.add_subcommand("resolvent", "resolvent identity two ways");
    add_common(resolvent, opts);
    auto* lint = app.add_subcommand("lint", "check that every numeric leaf carries its bound");
    lint->add_option("report", lint_path, "report JSON to check")->required();
    lint->add_option("--out", opts.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!opts.seq_text.empty()) opts.config.seq = Json::parse(opts.seq_text);
        if (!opts.frame_text.empty()) opts.config.frame = Json::parse(opts.frame_text);

        if (fourier->parsed()) return write_outputs("fourier", opts, cmd_fourier(opts.config));
        if (classify->parsed()) return write_outputs("classify", opts, cmd_classify(opts.config));
        if (example56->parsed())
            return write_outputs("example56", opts, cmd_example56(opts.config));
        if (oracle->parsed()) return write_outputs("oracle", opts, cmd_oracle(opts.config));
        if (wander->parsed()) return write_outputs("wander", opts, cmd_wander(opts.config));
        if (resolvent->parsed())
            return write_outputs("resolvent", opts, cmd_resolvent(opts.config));
        if (lint->parsed()) return write_outputs("lint", opts, cmd_lint(lint_path));
    } catch (const PrecisionError& e) {
        std::cerr << "precision unreachable: " << e.what()
                  << " (best achievable " << e.best_achievable << ")\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
