/*
 * schema.hpp — JSON descriptions of measures, models, vectors, sequences
 *
 * Measure: {"kind": "atomic"|"lebesgue"|"trig_density"|"self_similar"|
 *           "infinite_convolution"|"mixture", ...variant fields}
 *   angles are numbers or exact [num, den] pairs;
 *   exponent rules are {"form": "power", "base": 2} or {"form": "explicit",
 *   "entries": [...]}.
 * Model: {"kind": "cyclic_unitary"|"shift"|"finite"|"direct_sum", ...}
 *   matrices are row-major [[re, im], ...] rows.
 * Vector: sparse {"index_or_freq": [re, im]} maps, or a list of such maps for
 *   direct sums.
 * Sequence: {"form": "powers"|"tower"|"arithmetic"|"explicit"|"grid", ...}.
 *
 * A model file is either a bare model object or {"model": ..., plus optional
 * "continuous_label_override": {"component": i, "label": "H_w"}} — the latter
 * is a validation hook for the entanglement negative path.
 */
#pragma once

#include <json.hpp>

#include <optional>
#include <string>

#include "specdyn/dynamics.hpp"
#include "specdyn/measure.hpp"
#include "specdyn/model.hpp"

namespace specdyn {

using Json = nlohmann::json;

CircleMeasure measure_from_json(const Json& j);
nlohmann::ordered_json measure_to_json(const CircleMeasure& mu);

OperatorModel model_from_json(const Json& j);
nlohmann::ordered_json model_to_json(const OperatorModel& model);

VectorRep vector_from_json(const Json& j, const OperatorModel& model);
SequenceSpec sequence_from_json(const Json& j);

struct ModelFile {
    OperatorModel model;
    std::optional<std::pair<std::size_t, SubspaceLabel>> continuous_label_override;
};

ModelFile parse_model_file(const Json& j);
ModelFile load_model_file(const std::string& path);

} // namespace specdyn
