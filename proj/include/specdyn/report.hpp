/*
 * report.hpp — machine-readable reports
 *
 * Every numeric leaf is an object carrying its provenance: a certified
 * "bound", or a "tier" of "predicted"/"empirical". The linter walks any
 * report and flags leaves that claim neither. Floats are serialized in fixed
 * scientific notation (%.12e) with insertion-ordered keys, so identical
 * configs produce byte-identical files.
 */
#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "specdyn/measure.hpp"

namespace specdyn {

using OrderedJson = nlohmann::ordered_json;

OrderedJson real_leaf(double value, double bound);
OrderedJson real_leaf_empirical(double value);
OrderedJson complex_leaf(Complex value, double bound);
OrderedJson complex_leaf_empirical(Complex value);
OrderedJson fourier_leaf(const FourierValue& v);

// deterministic dump: ordered keys, doubles as %.12e
std::string dump_fixed(const OrderedJson& j, int indent = 2);

struct LintIssue {
    std::string path;
    std::string message;
};

// every object with a "value"/"re" key must carry "bound" >= 0 or a
// tier of "empirical"/"predicted"
std::vector<LintIssue> lint_report(const OrderedJson& j);

} // namespace specdyn
