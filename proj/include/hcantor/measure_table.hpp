#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcantor/geometry.hpp"
#include "hcantor/rng.hpp"

namespace hcantor {

// Ratio statistics only use cells holding at least this many walkers.
inline constexpr std::uint64_t kDefaultCountFloor = 100;
inline constexpr int kDefaultBootstrapResamples = 1000;
inline constexpr int kMaxTableDepth = 12;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Estimate {
  double value = 0.0;
  Interval interval;
};

// Wilson score interval for k successes out of n at 95% coverage.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

// Provenance carried alongside the counts and written into the file header.
struct TableMetadata {
  std::uint64_t seed = 0;
  std::string seq_fingerprint;
  std::string sequence;   // ScaleSequence::describe()
  std::string params;     // JSON text of the sampler parameters
  bool oracle = false;
  // Counts are an exact (synthetic) measure rather than samples: no bias
  // correction, no count floor, zero sampling error.
  bool exact = false;
  std::uint64_t discarded = 0;
};

// Exit counts per generation-`depth` cylinder. Shallower generations are
// derived by summation, so the tower (partition) identity holds by
// construction. Immutable after construction.
class CylinderMeasureTable {
 public:
  CylinderMeasureTable(int depth, std::vector<std::uint64_t> counts,
                       TableMetadata meta = {});

  // Synthetic measure with the given integer weights on generation-depth
  // cells, flagged exact.
  static CylinderMeasureTable exact_measure(int depth,
                                            std::vector<std::uint64_t> weights);
  // Uniform measure: every generation-depth cell gets weight 1.
  static CylinderMeasureTable uniform(int depth);
  // Product measure whose conditional law under every cell is
  // weights[0..3] / sum (integer weights).
  static CylinderMeasureTable product(int depth,
                                      const std::array<std::uint64_t, 4>& w);

  int depth() const { return depth_; }
  std::uint64_t n_effective() const { return levels_[0][0]; }
  const TableMetadata& metadata() const { return meta_; }
  bool exact() const { return meta_.exact; }

  std::uint64_t count(const CylinderAddress& addr) const;
  // All counts of one generation, indexed by address code.
  const std::vector<std::uint64_t>& generation_counts(int generation) const {
    return levels_[static_cast<std::size_t>(generation)];
  }

  // Multinomial resample of the walkers (equivalent to drawing n_effective
  // walkers with replacement). Exact tables are returned unchanged.
  CylinderMeasureTable resample(RngStream& rng) const;

  // CSV body with one row per address of every generation, preceded by a
  // '#'-prefixed JSON header line.
  void write_csv(std::ostream& out) const;
  static CylinderMeasureTable read_csv(std::istream& in);
  void save(const std::string& path) const;
  static CylinderMeasureTable load(const std::string& path);

  std::string header_json() const;

 private:
  int depth_;
  std::vector<std::vector<std::uint64_t>> levels_;
  TableMetadata meta_;
};

Estimate probability(const CylinderMeasureTable& table,
                     const CylinderAddress& addr);

// count(IJ) / count(I); throws UndefinedConditional when count(I) == 0.
Estimate conditional(const CylinderMeasureTable& table,
                     const CylinderAddress& base, const CylinderAddress& tail);

struct ScanOptions {
  std::uint64_t count_floor = kDefaultCountFloor;
  int bootstrap_resamples = kDefaultBootstrapResamples;
  std::uint64_t bootstrap_seed = 0x5eed;
};

struct RatioScanReport {
  int n = 0;
  int k = 0;
  int m = 0;
  double max_abs_deviation = 0.0;
  // Median over the scanned combinations; a diagnostic alongside the max.
  double median_abs_deviation = 0.0;
  std::uint64_t pairs_scanned = 0;
  std::uint64_t pairs_excluded = 0;
  // Percentile bootstrap interval of the maximum.
  Interval confidence;
  std::string argmax;  // "I|I'|J|L" of the maximizing combination
};

// max over I, I' in generation n, J in generation k, L in generation m of
// |(w(IJL)/w(IJ)) / (w(I'JL)/w(I'J)) - 1|, over combinations where all four
// cells pass the count floor.
RatioScanReport harnack_ratio_scan(const CylinderMeasureTable& table, int n,
                                   int k, int m,
                                   const ScanOptions& options = {});

struct DecayFit {
  double q_hat = 0.0;     // exp(slope) of log(deviation) against k
  double log_c = 0.0;     // intercept
  double r_squared = 0.0;
  bool decaying = false;  // slope < 0
  std::vector<int> ks;
  std::vector<double> deviations;
};

// Least-squares fit of log(deviation) = log C + k log q.
DecayFit fit_geometric_decay(const std::vector<RatioScanReport>& reports);

struct CodimComparison {
  double max_abs_deviation = 0.0;
  Interval confidence;
  std::uint64_t pairs_scanned = 0;
  std::uint64_t pairs_excluded = 0;
  std::string argmax;
};

// Compares the one-step conditional ratios w(I)/w(parent I) of two tables
// cylinder by cylinder (same address word), over generations 1..depth.
CodimComparison codim_compare(const CylinderMeasureTable& a,
                              const CylinderMeasureTable& b,
                              const ScanOptions& options = {});

struct QuasiInvarianceReport {
  int n = 0;
  int k = 0;
  double max_ratio = 1.0;
  Interval confidence;
  std::uint64_t pairs_scanned = 0;
  std::uint64_t pairs_excluded = 0;
};

// max over I, I' in generation n and J in generation k of
// (w(IJ)/w(I)) / (w(I'J)/w(I')).
QuasiInvarianceReport quasi_invariance_check(const CylinderMeasureTable& table,
                                             int n, int k,
                                             const ScanOptions& options = {});

}  // namespace hcantor
