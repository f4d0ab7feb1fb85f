#include "specdyn/schema.hpp"

#include <fstream>

namespace specdyn {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument("schema: " + where + ": " + what);
}

Angle angle_from_json(const Json& j) {
    if (j.is_number()) return Angle::of(j.get<double>());
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer())
        return Angle::rational(j[0].get<long long>(), j[1].get<long long>());
    fail("angle", "expected a number or [num, den]");
}

Json angle_to_json(const Angle& a) {
    if (a.is_rational()) return Json::array({a.num(), a.den()});
    return a.value();
}

Complex complex_from_json(const Json& j, const char* where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(where, "expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

ExponentRule exponents_from_json(const Json& j) {
    if (j.is_array()) return ExponentRule::explicit_list(j.get<std::vector<long long>>());
    if (j.is_object()) {
        std::string form = j.value("form", "");
        if (form == "power") return ExponentRule::power(j.at("base").get<long long>());
        if (form == "explicit")
            return ExponentRule::explicit_list(j.at("entries").get<std::vector<long long>>());
        fail("exponents", "unknown form '" + form + "'");
    }
    fail("exponents", "expected a rule object or an explicit list");
}

Json exponents_to_json(const ExponentRule& r) {
    Json j;
    if (r.form == ExponentRule::Form::Power) {
        j["form"] = "power";
        j["base"] = r.power_base;
    } else {
        j["form"] = "explicit";
        j["entries"] = r.entries;
    }
    return j;
}

} // namespace

CircleMeasure measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) fail("measure", "missing kind");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "lebesgue") return CircleMeasure::lebesgue();
    if (kind == "atomic") {
        std::vector<Atom> atoms;
        for (const auto& entry : j.at("atoms")) {
            if (!entry.is_array() || entry.size() != 2) fail("atomic", "atom must be [angle, weight]");
            atoms.push_back({angle_from_json(entry[0]), entry[1].get<double>()});
        }
        return CircleMeasure::atomic(std::move(atoms));
    }
    if (kind == "trig_density") {
        std::map<long long, Complex> coeffs;
        for (const auto& entry : j.at("coeffs")) {
            if (!entry.is_array() || entry.size() != 3) fail("trig_density", "coeff must be [k, re, im]");
            coeffs[entry[0].get<long long>()] = {entry[1].get<double>(), entry[2].get<double>()};
        }
        return CircleMeasure::trig_density(std::move(coeffs));
    }
    if (kind == "self_similar") {
        return CircleMeasure::self_similar(j.at("base").get<int>(),
                                           j.at("digits").get<std::vector<int>>(),
                                           j.at("weights").get<std::vector<double>>());
    }
    if (kind == "infinite_convolution") {
        return CircleMeasure::infinite_convolution(j.at("base").get<int>(),
                                                   exponents_from_json(j.at("exponents")),
                                                   j.value("j_max", 64));
    }
    if (kind == "mixture") {
        std::vector<std::pair<CircleMeasure, double>> parts;
        for (const auto& entry : j.at("components")) {
            if (!entry.is_array() || entry.size() != 2) fail("mixture", "component must be [measure, weight]");
            parts.emplace_back(measure_from_json(entry[0]), entry[1].get<double>());
        }
        return CircleMeasure::mixture(std::move(parts));
    }
    fail("measure", "unknown kind '" + kind + "'");
}

nlohmann::ordered_json measure_to_json(const CircleMeasure& mu) {
    nlohmann::ordered_json j;
    switch (mu.kind()) {
    case CircleMeasure::Kind::Lebesgue: j["kind"] = "lebesgue"; break;
    case CircleMeasure::Kind::Atomic: {
        j["kind"] = "atomic";
        auto atoms = nlohmann::ordered_json::array();
        for (const auto& a : mu.atoms()) atoms.push_back({angle_to_json(a.angle), a.weight});
        j["atoms"] = std::move(atoms);
        break;
    }
    case CircleMeasure::Kind::TrigDensity: {
        j["kind"] = "trig_density";
        auto coeffs = nlohmann::ordered_json::array();
        for (const auto& [k, c] : mu.density_coeffs())
            coeffs.push_back({k, c.real(), c.imag()});
        j["coeffs"] = std::move(coeffs);
        break;
    }
    case CircleMeasure::Kind::SelfSimilar:
        j["kind"] = "self_similar";
        j["base"] = mu.base();
        j["digits"] = mu.digits();
        j["weights"] = mu.digit_weights();
        break;
    case CircleMeasure::Kind::InfiniteConvolution:
        j["kind"] = "infinite_convolution";
        j["base"] = mu.base();
        j["exponents"] = exponents_to_json(mu.exponents());
        j["j_max"] = mu.j_max();
        break;
    case CircleMeasure::Kind::Mixture: {
        j["kind"] = "mixture";
        auto parts = nlohmann::ordered_json::array();
        for (const auto& [part, w] : mu.parts()) parts.push_back({measure_to_json(part), w});
        j["components"] = std::move(parts);
        break;
    }
    }
    return j;
}

OperatorModel model_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) fail("model", "missing kind");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "cyclic_unitary")
        return OperatorModel::cyclic_unitary(measure_from_json(j.at("measure")));
    if (kind == "shift") return OperatorModel::unilateral_shift(j.value("truncation", 8));
    if (kind == "finite") {
        const Json& rows = j.at("matrix");
        int n = static_cast<int>(rows.size());
        ComplexMatrix mat(n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != n) fail("finite", "matrix must be square");
            for (int k = 0; k < n; ++k) mat.at(i, k) = complex_from_json(rows[i][k], "finite");
        }
        return OperatorModel::finite_contraction(std::move(mat));
    }
    if (kind == "direct_sum") {
        std::vector<OperatorModel> comps;
        for (const auto& c : j.at("components")) comps.push_back(model_from_json(c));
        return OperatorModel::direct_sum(std::move(comps));
    }
    fail("model", "unknown kind '" + kind + "'");
}

nlohmann::ordered_json model_to_json(const OperatorModel& model) {
    nlohmann::ordered_json j;
    switch (model.kind()) {
    case OperatorModel::Kind::CyclicUnitary:
        j["kind"] = "cyclic_unitary";
        j["measure"] = measure_to_json(model.measure());
        break;
    case OperatorModel::Kind::UnilateralShift:
        j["kind"] = "shift";
        j["truncation"] = model.truncation();
        break;
    case OperatorModel::Kind::FiniteContraction: {
        j["kind"] = "finite";
        auto rows = nlohmann::ordered_json::array();
        for (int i = 0; i < model.matrix().n; ++i) {
            auto row = nlohmann::ordered_json::array();
            for (int k = 0; k < model.matrix().n; ++k) {
                const Complex& c = model.matrix().at(i, k);
                row.push_back({c.real(), c.imag()});
            }
            rows.push_back(std::move(row));
        }
        j["matrix"] = std::move(rows);
        break;
    }
    case OperatorModel::Kind::DirectSum: {
        j["kind"] = "direct_sum";
        auto comps = nlohmann::ordered_json::array();
        for (const auto& c : model.components()) comps.push_back(model_to_json(c));
        j["components"] = std::move(comps);
        break;
    }
    }
    return j;
}

namespace {

VectorRep component_vector_from_json(const Json& j, const OperatorModel& component) {
    switch (component.kind()) {
    case OperatorModel::Kind::CyclicUnitary:
    case OperatorModel::Kind::UnilateralShift: {
        if (!j.is_object()) fail("vector", "expected a sparse {index: [re, im]} map");
        VectorRep::SparseMap coeffs;
        for (auto it = j.begin(); it != j.end(); ++it)
            coeffs[std::stoll(it.key())] = complex_from_json(it.value(), "vector");
        return component.kind() == OperatorModel::Kind::CyclicUnitary
                   ? VectorRep::frequencies(std::move(coeffs))
                   : VectorRep::indices(std::move(coeffs));
    }
    case OperatorModel::Kind::FiniteContraction: {
        std::vector<Complex> coords(component.matrix().n, Complex(0.0, 0.0));
        if (j.is_array()) {
            if (static_cast<int>(j.size()) != component.matrix().n)
                fail("vector", "dense coordinate count mismatch");
            for (std::size_t i = 0; i < j.size(); ++i)
                coords[i] = complex_from_json(j[i], "vector");
        } else if (j.is_object()) {
            for (auto it = j.begin(); it != j.end(); ++it) {
                long long idx = std::stoll(it.key());
                if (idx < 0 || idx >= component.matrix().n) fail("vector", "index out of range");
                coords[idx] = complex_from_json(it.value(), "vector");
            }
        } else {
            fail("vector", "expected a map or a dense list");
        }
        return VectorRep::dense(std::move(coords));
    }
    case OperatorModel::Kind::DirectSum: break;
    }
    fail("vector", "unexpected component kind");
}

} // namespace

VectorRep vector_from_json(const Json& j, const OperatorModel& model) {
    if (model.kind() == OperatorModel::Kind::DirectSum) {
        if (!j.is_array() || j.size() != model.components().size())
            fail("vector", "direct sum vector must list one map per component");
        std::vector<VectorRep> comps;
        for (std::size_t i = 0; i < j.size(); ++i)
            comps.push_back(component_vector_from_json(j[i], model.components()[i]));
        return VectorRep::direct_sum(std::move(comps));
    }
    return component_vector_from_json(j, model);
}

SequenceSpec sequence_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("form")) fail("sequence", "missing form");
    std::string form = j.at("form").get<std::string>();
    if (form == "powers")
        return SequenceSpec::powers(j.at("base").get<long long>(), j.at("length").get<int>());
    if (form == "tower")
        return SequenceSpec::tower_powers(j.at("base").get<long long>(),
                                          exponents_from_json(j.at("exponents")),
                                          j.at("length").get<int>());
    if (form == "arithmetic")
        return SequenceSpec::arithmetic(j.at("start").get<long long>(),
                                        j.at("step").get<long long>(), j.at("length").get<int>());
    if (form == "explicit")
        return SequenceSpec::explicit_list(j.at("entries").get<std::vector<long long>>());
    if (form == "grid")
        return SequenceSpec::continuous_grid(j.at("times").get<std::vector<double>>());
    fail("sequence", "unknown form '" + form + "'");
}

ModelFile parse_model_file(const Json& j) {
    ModelFile file{model_from_json(j.contains("model") ? j.at("model") : j), std::nullopt};
    if (j.contains("continuous_label_override")) {
        const Json& o = j.at("continuous_label_override");
        std::string label = o.at("label").get<std::string>();
        SubspaceLabel l;
        if (label == "H_m")
            l = SubspaceLabel::H_m;
        else if (label == "H_w")
            l = SubspaceLabel::H_w;
        else if (label == "unknown")
            l = SubspaceLabel::Unknown;
        else
            fail("continuous_label_override", "unknown label '" + label + "'");
        file.continuous_label_override = {{o.at("component").get<std::size_t>(), l}};
    }
    return file;
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument("model file " + path + ": " + e.what());
    }
    return parse_model_file(j);
}

} // namespace specdyn
