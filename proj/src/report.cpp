#include "specdyn/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace specdyn {

OrderedJson real_leaf(double value, double bound) {
    OrderedJson j;
    j["value"] = value;
    j["bound"] = bound;
    j["tier"] = "certified";
    return j;
}

OrderedJson real_leaf_empirical(double value) {
    OrderedJson j;
    j["value"] = value;
    j["tier"] = "empirical";
    return j;
}

OrderedJson complex_leaf(Complex value, double bound) {
    OrderedJson j;
    j["re"] = value.real();
    j["im"] = value.imag();
    j["bound"] = bound;
    j["tier"] = "certified";
    return j;
}

OrderedJson complex_leaf_empirical(Complex value) {
    OrderedJson j;
    j["re"] = value.real();
    j["im"] = value.imag();
    j["tier"] = "empirical";
    return j;
}

OrderedJson fourier_leaf(const FourierValue& v) {
    return complex_leaf(v.value, v.error_bound);
}

// ---------------------------------------------------------------------------
// fixed-format dump

namespace {

void dump_value(const OrderedJson& j, std::string& out, int indent, int depth) {
    auto pad = [&](int d) { out.append(static_cast<std::size_t>(d) * indent, ' '); };
    switch (j.type()) {
    case nlohmann::detail::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            pad(depth + 1);
            out += OrderedJson(it.key()).dump();
            out += ": ";
            dump_value(it.value(), out, indent, depth + 1);
            if (i + 1 < j.size()) out += ',';
            out += '\n';
        }
        pad(depth);
        out += '}';
        return;
    }
    case nlohmann::detail::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            pad(depth + 1);
            dump_value(j[i], out, indent, depth + 1);
            if (i + 1 < j.size()) out += ',';
            out += '\n';
        }
        pad(depth);
        out += ']';
        return;
    }
    case nlohmann::detail::value_t::number_float: {
        double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += v > 0 ? "1e999" : (v < 0 ? "-1e999" : "null");
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12e", v);
        out += buf;
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

void lint_walk(const OrderedJson& j, const std::string& path, std::vector<LintIssue>& issues) {
    if (j.is_object()) {
        bool numeric_leaf = j.contains("value") || j.contains("re");
        if (numeric_leaf) {
            bool has_bound = j.contains("bound") && j["bound"].is_number() &&
                             j["bound"].get<double>() >= 0.0;
            bool has_tier = j.contains("tier") && j["tier"].is_string() &&
                            (j["tier"] == "empirical" || j["tier"] == "predicted" ||
                             (j["tier"] == "certified" && has_bound));
            if (!has_bound && !has_tier)
                issues.push_back({path, "numeric leaf without bound or empirical/predicted tier"});
            if (j.contains("tier") && j["tier"] == "certified" && !has_bound)
                issues.push_back({path, "certified leaf without a bound"});
        }
        for (auto it = j.begin(); it != j.end(); ++it)
            lint_walk(it.value(), path + "/" + it.key(), issues);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            lint_walk(j[i], path + "/" + std::to_string(i), issues);
    }
}

} // namespace

std::string dump_fixed(const OrderedJson& j, int indent) {
    std::string out;
    dump_value(j, out, indent, 0);
    out += '\n';
    return out;
}

std::vector<LintIssue> lint_report(const OrderedJson& j) {
    std::vector<LintIssue> issues;
    lint_walk(j, "", issues);
    return issues;
}

} // namespace specdyn
