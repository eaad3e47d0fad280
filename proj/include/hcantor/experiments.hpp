#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hcantor/dim_entropy.hpp"
#include "hcantor/geometry.hpp"
#include "hcantor/measure_table.hpp"
#include "hcantor/oracle_grid.hpp"
#include "hcantor/wos.hpp"

namespace hcantor {

enum class ExperimentKind {
  Sample,
  Dims,
  Continuity,
  Gap,
  Harnack,
  Delta,
  OracleCompare,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

struct SequenceSpec {
  SequenceKind kind = SequenceKind::Constant;
  std::vector<double> values{0.25};

  ScaleSequence build() const;
};

// Every tunable of every experiment; sections of the config file map onto
// the nested structs. Zero-valued epsilon/spacing select the documented
// depth-dependent defaults.
struct ExperimentConfig {
  SequenceSpec sequence;

  struct Wos {
    int depth = 4;
    double absorb_epsilon = 0.0;
    double start_radius = 8.0;
    double outer_radius = 16.0;
    double reentry_radius = 8.0;
    std::uint64_t max_steps = 1'000'000;
  } wos;

  struct Campaign {
    std::uint64_t walkers = 100'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
  } campaign;

  struct Statistics {
    std::uint64_t count_floor = kDefaultCountFloor;
    int bootstrap_resamples = kDefaultBootstrapResamples;
    std::uint64_t bootstrap_seed = 24301;
    std::size_t local_dimension_samples = 100'000;
  } statistics;

  struct Continuity {
    std::vector<double> deltas{0.05, 0.02, 0.01};
    PerturbationPattern pattern = PerturbationPattern::Alternating;
    bool control = true;
  } continuity;

  struct Gap {
    bool synthetic_uniform = false;
    int cantor_n_max = 10'000;
  } gap;

  struct Harnack {
    int n = 1;
    int m = 1;
    int k_max = 3;
    double min_r_squared = 0.8;
  } harnack;

  struct Delta {
    int j = 1;
    int k_max = 3;
  } delta;

  struct Oracle {
    std::uint64_t walkers = 1'000'000;
    double spacing = 0.0;
    double start_radius = 1.0;
    double outer_radius = 2.0;
    double tolerance = 0.01;
    std::uint64_t richardson_walkers = 0;  // 0 skips the h vs h/2 check
  } oracle;

  struct Output {
    std::string dir = "out";
    bool plots = false;
  } output;

  WosParams wos_params(const ScaleSequence& seq) const;
  GridOracleParams oracle_params() const;
  ScanOptions scan_options() const;
  // Checks every precondition an experiment of this kind depends on, before
  // any sampling starts.
  void validate(ExperimentKind kind) const;
  nlohmann::json to_json() const;
};

// Parses the sectioned key = value format produced by config_reference().
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
// Every key with its default value and a one-line description.
std::string config_reference();

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::Sample;
  nlohmann::json json;  // kind, inputs, metrics, verdicts, timing
  std::vector<std::pair<std::string, std::string>> side_tables;  // name, CSV
};

using OptionalTable = std::optional<CylinderMeasureTable>;

ExperimentResult run_sample(const ExperimentConfig& config);
// For the runners taking `table`, a given table replaces the campaign; its
// depth must satisfy the same preconditions as wos.depth.
ExperimentResult run_dims(const ExperimentConfig& config,
                          const OptionalTable& table = {});
ExperimentResult run_continuity_sweep(const ExperimentConfig& config);
ExperimentResult run_gap_test(const ExperimentConfig& config,
                              const OptionalTable& table = {});
ExperimentResult run_harnack_scan(const ExperimentConfig& config,
                                  const OptionalTable& table = {});
ExperimentResult run_delta_decay(const ExperimentConfig& config,
                                 const OptionalTable& table = {});
ExperimentResult run_oracle_compare(const ExperimentConfig& config);

ExperimentResult run_experiment(ExperimentKind kind,
                                const ExperimentConfig& config,
                                const OptionalTable& table = {});
// True for the kinds whose runner accepts an existing table.
bool accepts_table(ExperimentKind kind);

// SVG documents derived only from the result JSON.
std::vector<std::pair<std::string, std::string>> render_plots(
    const nlohmann::json& result);

// Writes <kind>.json, side tables and (optionally) plots into `dir`;
// returns the written paths.
std::vector<std::string> write_result(const ExperimentResult& result,
                                      const std::string& dir, bool plots);

// Shared building blocks, exposed for the acceptance suite.
nlohmann::json entropy_report_json(const EntropyReport& report);
std::string entropy_report_csv(const EntropyReport& report);

}  // namespace hcantor
