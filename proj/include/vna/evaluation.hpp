// Copyright 2026 The vna Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Robustness sweeps: noise-level grids, per-level Acc-2/F1, AIR aggregation,
// the external predictor contract, and curve export.
//
// Predictor command contract. For every (level, repeat) the runner writes
//   <work>/<kind>/s<k>_r<r>/manifest.json
//     {"sigma", "intensity", "kind", "repeat", "denoiser",
//      "instances": [{"id", "path", "modality", "source"}]}
// substitutes {manifest} {output} {sigma} {intensity} {kind} {dataset}
// {denoiser} into the command template, runs it, and reads {output}: a CSV
// with header `id,prediction` and one row per instance.
//
// Precomputed predictions are a CSV with header `sigma,id,prediction`.

#ifndef VNA_EVALUATION_HPP
#define VNA_EVALUATION_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vna/config.hpp"

namespace vna::eval {

struct Interval {
  double min = 0.0;
  double max = 1.0;
  double step = 0.1;

  bool operator==(const Interval&) const = default;
};

/// Ten uniform interior points min + k (max - min) / 11, k = 1..10.
std::vector<double> default_points(const Interval& interval);

/// Indicator name, default interval, and the factor mapping an indicator
/// value to item intensity, per noise kind.
struct IndicatorInfo {
  std::string name;
  Interval interval;
  double to_intensity = 1.0;
};
IndicatorInfo indicator_for(NoiseKind kind);

/// Mean of metric_at over `points`; multiplied by (max - min) when not
/// normalized. Throws MissingLevel when a point has no value.
double air(const std::map<double, double>& metric_at, std::span<const double> points,
           const Interval& interval, bool normalize = true);
double air(const std::map<double, double>& metric_at, const Interval& interval,
           bool normalize = true);

enum class LabelType { regression, classification };

struct PredictionRecord {
  std::string id;
  double label = 0.0;
  double prediction = 0.0;
  double sigma = 0.0;

  bool operator==(const PredictionRecord&) const = default;
};

struct Metrics {
  double acc2 = 0.0;
  double f1 = 0.0;

  bool operator==(const Metrics&) const = default;
};

/// Regression values are binarized at 0 (x < 0 negative, else
/// non-negative); class ids are compared directly. f1 is the
/// support-weighted mean of per-class F1. Throws EmptyLevel.
Metrics acc2_f1(std::span<const PredictionRecord> records, LabelType type = LabelType::regression);

struct Instance {
  std::string id;
  std::filesystem::path path;
  std::optional<double> label;
  std::string split;
  /// "feature" (.vfs), "media", or "text" (a transcript JSON).
  std::string modality;
};

struct Dataset {
  std::filesystem::path source;
  std::vector<Instance> instances;
};

/// {"instances": [{"id", "path", "label", "split", "modality"?}]}; relative
/// paths resolve against the manifest's directory.
Dataset load_dataset(const std::filesystem::path& manifest);
void save_dataset(const std::filesystem::path& manifest, const Dataset& dataset);

struct PredictorSpec {
  enum class Mode { command, precomputed };
  std::string name = "predictor";
  Mode mode = Mode::command;
  /// argv template; a single element runs through /bin/sh -c.
  std::vector<std::string> command;
  std::filesystem::path predictions;
  LabelType label_type = LabelType::regression;
  /// Levels may be predicted concurrently.
  bool stateless = false;
  std::string denoiser;
};

PredictorSpec predictor_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
nlohmann::json to_json(const PredictorSpec& p);

/// Writes `manifest` to <dir>/manifest.json, runs the command with the
/// placeholders filled from the manifest and `extra_vars`, and parses
/// <dir>/predictions.csv. Throws PredictorFailure.
std::map<std::string, double> invoke_predictor(const PredictorSpec& predictor, const nlohmann::json& manifest,
                                               const std::filesystem::path& dir,
                                               const std::map<std::string, std::string>& extra_vars = {},
                                               const std::string& context = {});

struct SweepPlan {
  NoiseKind kind = NoiseKind::random_drop;
  std::string indicator;
  Interval interval;
  /// Overrides default_points when set.
  std::optional<std::vector<double>> points;
  std::filesystem::path dataset;
  PredictorSpec predictor;
  std::uint64_t seed = 0;
  int repeats = 1;
  /// Extra item params (e.g. {"asset": "park"} for bg_mix).
  nlohmann::json params = nlohmann::json::object();
  std::filesystem::path work_dir = "vna-work";
  std::optional<std::filesystem::path> assets;
  unsigned workers = 0;  // 0: hardware concurrency
  bool lossless = true;

  std::vector<double> resolved_points() const;
};

/// Reads a plan; relative paths resolve against the plan file's directory.
/// Missing indicator/interval fields default from indicator_for(kind).
SweepPlan load_plan(const std::filesystem::path& path);
SweepPlan plan_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
nlohmann::json to_json(const SweepPlan& plan);

/// Seed for one noised instance.
std::uint64_t instance_seed(std::uint64_t plan_seed, double sigma, const std::string& id, int repeat);

struct Level {
  double sigma = 0.0;
  Metrics metrics;
  std::size_t count = 0;
  std::vector<PredictionRecord> records;
};

struct RobustnessReport {
  std::string predictor;
  std::string kind;
  std::string indicator;
  Interval interval;
  std::vector<Level> levels;
  Metrics air;
  Metrics air_area;
  nlohmann::json plan;
  std::string started;
  std::string finished;

  /// Series name for merged plots.
  std::string label() const;
};

RobustnessReport run_sweep(const SweepPlan& plan);

nlohmann::json to_json(const RobustnessReport& report, bool with_records = true);
RobustnessReport report_from_json(const nlohmann::json& j);
RobustnessReport load_report(const std::filesystem::path& path);

/// Recomputes AIR from per-level metrics over the report's own sigmas.
void finalize(RobustnessReport& report);

enum class CurveFormat { csv, json, svg };
enum class CurveMetric { acc2, f1 };

std::string export_csv(const RobustnessReport& report);
std::string export_json(const RobustnessReport& report);
std::string export_svg(std::span<const RobustnessReport> reports, CurveMetric metric = CurveMetric::acc2);
void export_curves(const RobustnessReport& report, CurveFormat format, const std::filesystem::path& out);

/// Parses export_csv output back into a report carrying metadata and levels.
RobustnessReport import_csv(std::string_view text);

struct AugmentOptions {
  int copies = 1;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> assets;
  bool lossless = true;
  /// Only instances of this split, when set.
  std::optional<std::string> split;
};

/// Writes `copies` noised variants of every instance and returns a dataset
/// listing originals followed by copies (ids "<id>#<c>").
Dataset augment(const Dataset& dataset, const ConfigFile& config, const AugmentOptions& options);

}  // namespace vna::eval

#endif  // VNA_EVALUATION_HPP
