#pragma once

#include <string>

#include "json.hpp"
#include "spx/dataset.hpp"
#include "spx/detector_sim.hpp"
#include "spx/metrics.hpp"
#include "spx/sampling.hpp"
#include "spx/scene_gen.hpp"
#include "spx/training.hpp"

namespace spx::io {

using Json = nlohmann::json;

// Shortest form that parses back to the same double.
std::string format_double(double v);

Json to_json(const scene::SceneSpec& spec);
scene::SceneSpec spec_from_json(const Json& j);

Json to_json(const scene::DatasetManifest& manifest);
scene::DatasetManifest manifest_from_json(const Json& j);

Json to_json(const data::GenConfig& cfg);
data::GenConfig gen_config_from_json(const Json& j);

Json to_json(const sampling::PatternSequence& seq);

Json to_json(const metrics::EvalReport& report);
metrics::EvalReport report_from_json(const Json& j);

// Header `index,value`, one row per measurement.
std::string trace_to_csv(const detector::SignalTrace& trace);
detector::SignalTrace trace_from_csv(const std::string& text);

// Header `step,epoch,loss` plus `,loss_d,loss_g` when `adversarial`.
std::string loss_curve_to_csv(const train::LossCurve& curve, bool adversarial);
train::LossCurve loss_curve_from_csv(const std::string& text);

}  // namespace spx::io
