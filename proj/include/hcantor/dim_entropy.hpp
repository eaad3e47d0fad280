#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcantor/geometry.hpp"
#include "hcantor/measure_table.hpp"

namespace hcantor {

// h_k(L) = -(1/k) sum_K (w(LK)/w(L)) log(w(LK)/w(L)) over generation-k
// words K, plug-in, natural log, 0 log 0 = 0. Sampled tables require
// count(L) >= count_floor (InsufficientCounts otherwise); a zero count is
// always UndefinedConditional.
double entropy_hk(const CylinderMeasureTable& table, const CylinderAddress& base,
                  int k, std::uint64_t count_floor = kDefaultCountFloor);

struct OscillationValue {
  double delta = 0.0;
  double max_h = 0.0;
  double min_h = 0.0;
  std::uint64_t cells_used = 0;
  std::uint64_t cells_excluded = 0;
};

// max_J h_k(IJ) - min_J h_k(IJ) over generation-j words J passing the floor.
OscillationValue delta_jk(const CylinderMeasureTable& table,
                          const CylinderAddress& base, int j, int k,
                          std::uint64_t count_floor = kDefaultCountFloor);

struct OscillationReport {
  int j = 0;
  int k = 0;
  int base_generation = 0;
  std::vector<std::string> bases;
  std::vector<double> values;
  double max_value = 0.0;
};

// delta_jk for every base I of one generation. Bases without two cells over
// the floor are skipped; throws InsufficientCounts if all are skipped.
OscillationReport oscillation_report(const CylinderMeasureTable& table,
                                     int base_generation, int j, int k,
                                     std::uint64_t count_floor = kDefaultCountFloor);

struct EntropyOptions {
  int bootstrap_resamples = kDefaultBootstrapResamples;
  std::uint64_t bootstrap_seed = 0xd1e5;
};

struct EntropyReport {
  int depth = 0;
  std::uint64_t n_effective = 0;
  bool exact = false;
  // Index n-1 holds generation n.
  std::vector<double> plugin_entropy;
  std::vector<double> miller_madow;  // (m - 1) / (2 N), 0 for exact tables
  std::vector<double> entropy;       // corrected, clamped to [0, n log 4]
  std::vector<std::uint64_t> occupied;
  std::vector<double> lyapunov;      // -log l(n)
  std::vector<double> ratio;         // d_n
  std::vector<double> capacity_bound;  // n log 4 / -log l(n)
  double estimate = 0.0;             // d_depth
  double sigma_bootstrap = 0.0;
  double sigma_spread = 0.0;         // half-range of the last three d_n
  double sigma = 0.0;                // sqrt(boot^2 + spread^2)
};

// Entropy-ratio dimension d_n = H_n / (-log l(n)) with Miller-Madow bias
// correction. Requires depth >= 3.
EntropyReport entropy_ratio_dimension(const CylinderMeasureTable& table,
                                      const ScaleSequence& seq,
                                      const EntropyOptions& options = {});

struct LocalDimensionSummary {
  std::vector<double> samples;
  double mean = 0.0;
  double stddev = 0.0;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
};

// log w(I_depth(x)) / log l(depth) for exit addresses x drawn in proportion
// to the counts.
LocalDimensionSummary local_dimension_samples(const CylinderMeasureTable& table,
                                              const ScaleSequence& seq,
                                              std::size_t sample_count,
                                              std::uint64_t seed = 0x10ca1);

// -log l(n), summed in log space.
double lyapunov_sum(const ScaleSequence& seq, int n);

// n log 4 / -log l(n).
double capacity_ratio(const ScaleSequence& seq, int n);

// Minimum of capacity_ratio over the tail window n_max-window+1 .. n_max
// (window 0 means n_max/2, at least 1).
double dim_cantor(const ScaleSequence& seq, int n_max, int window = 0);

}  // namespace hcantor
