#include "hcantor/dim_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "hcantor/error.hpp"
#include "hcantor/rng.hpp"

namespace hcantor {

namespace {

const double kLog4 = std::log(4.0);

double plogp_sum(const std::vector<std::uint64_t>& counts, std::uint64_t begin,
                 std::uint64_t end, double total) {
  double h = 0.0;
  for (std::uint64_t c = begin; c < end; ++c) {
    if (counts[c] == 0) continue;
    const double p = static_cast<double>(counts[c]) / total;
    h -= p * std::log(p);
  }
  return h;
}

struct GenerationEntropy {
  double plugin = 0.0;
  std::uint64_t occupied = 0;
};

GenerationEntropy generation_entropy(const CylinderMeasureTable& table, int n) {
  const auto& counts = table.generation_counts(n);
  GenerationEntropy out;
  out.plugin = plogp_sum(counts, 0, counts.size(),
                         static_cast<double>(table.n_effective()));
  for (std::uint64_t c : counts) out.occupied += c > 0 ? 1 : 0;
  return out;
}

double corrected_entropy(const CylinderMeasureTable& table, int n,
                         const GenerationEntropy& g, double* correction) {
  double mm = 0.0;
  if (!table.exact()) {
    mm = static_cast<double>(g.occupied - (g.occupied > 0 ? 1 : 0)) /
         (2.0 * static_cast<double>(table.n_effective()));
  }
  if (correction) *correction = mm;
  return std::clamp(g.plugin + mm, 0.0, n * kLog4);
}

}  // namespace

double entropy_hk(const CylinderMeasureTable& table, const CylinderAddress& base,
                  int k, std::uint64_t count_floor) {
  require(k >= 1, "entropy_hk needs k >= 1");
  require(base.generation() + k <= table.depth(),
          "gen(L) + k exceeds the table depth");
  const std::uint64_t total = table.count(base);
  if (total == 0) {
    throw Error(ErrorCode::UndefinedConditional,
                "no mass in cylinder '" + base.to_string() + "'");
  }
  if (!table.exact() && total < count_floor) {
    throw Error(ErrorCode::InsufficientCounts,
                "cylinder '" + base.to_string() + "' holds " +
                    std::to_string(total) + " walkers, below the floor of " +
                    std::to_string(count_floor));
  }
  const auto& counts = table.generation_counts(base.generation() + k);
  const std::uint64_t begin = base.code() << (2 * k);
  const std::uint64_t end = begin + cells_in_generation(k);
  return plogp_sum(counts, begin, end, static_cast<double>(total)) / k;
}

OscillationValue delta_jk(const CylinderMeasureTable& table,
                          const CylinderAddress& base, int j, int k,
                          std::uint64_t count_floor) {
  require(j >= 0 && k >= 1, "delta_jk needs j >= 0 and k >= 1");
  require(base.generation() + j + k <= table.depth(),
          "gen(I) + j + k exceeds the table depth");
  OscillationValue out;
  if (j == 0) {
    out.cells_used = 1;
    out.max_h = out.min_h = entropy_hk(table, base, k, count_floor);
    return out;
  }
  out.max_h = -1.0;
  out.min_h = std::numeric_limits<double>::infinity();
  for (const CylinderAddress& tail : generation_addresses(j)) {
    const CylinderAddress cell = concat(base, tail);
    const std::uint64_t c = table.count(cell);
    if (c == 0 || (!table.exact() && c < count_floor)) {
      ++out.cells_excluded;
      continue;
    }
    const double h = entropy_hk(table, cell, k, count_floor);
    out.max_h = std::max(out.max_h, h);
    out.min_h = std::min(out.min_h, h);
    ++out.cells_used;
  }
  if (out.cells_used < 2) {
    throw Error(ErrorCode::InsufficientCounts,
                "fewer than two cells below '" + base.to_string() +
                    "' pass the count floor");
  }
  out.delta = out.max_h - out.min_h;
  return out;
}

OscillationReport oscillation_report(const CylinderMeasureTable& table,
                                     int base_generation, int j, int k,
                                     std::uint64_t count_floor) {
  OscillationReport report;
  report.j = j;
  report.k = k;
  report.base_generation = base_generation;
  for (const CylinderAddress& base : generation_addresses(base_generation)) {
    try {
      const OscillationValue v = delta_jk(table, base, j, k, count_floor);
      report.bases.push_back(base.to_string());
      report.values.push_back(v.delta);
      report.max_value = std::max(report.max_value, v.delta);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientCounts &&
          e.code() != ErrorCode::UndefinedConditional) {
        throw;
      }
    }
  }
  if (report.values.empty()) {
    throw Error(ErrorCode::InsufficientCounts,
                "no generation-" + std::to_string(base_generation) +
                    " base passes the count floor");
  }
  return report;
}

double lyapunov_sum(const ScaleSequence& seq, int n) {
  double s = 0.0;
  for (int i = 1; i <= n; ++i) s -= std::log(seq.ratio(i));
  return s;
}

double capacity_ratio(const ScaleSequence& seq, int n) {
  require(n >= 1, "capacity ratio needs n >= 1");
  return n * kLog4 / lyapunov_sum(seq, n);
}

double dim_cantor(const ScaleSequence& seq, int n_max, int window) {
  require(n_max >= 1, "dim_cantor needs n_max >= 1");
  if (window <= 0) window = std::max(1, n_max / 2);
  window = std::min(window, n_max);
  double lyap = lyapunov_sum(seq, n_max - window);
  double best = std::numeric_limits<double>::infinity();
  for (int n = n_max - window + 1; n <= n_max; ++n) {
    lyap -= std::log(seq.ratio(n));
    best = std::min(best, n * kLog4 / lyap);
  }
  return best;
}

EntropyReport entropy_ratio_dimension(const CylinderMeasureTable& table,
                                      const ScaleSequence& seq,
                                      const EntropyOptions& options) {
  require(table.depth() >= 3, "entropy_ratio_dimension needs depth >= 3");
  const int depth = table.depth();
  EntropyReport r;
  r.depth = depth;
  r.n_effective = table.n_effective();
  r.exact = table.exact();
  double lyap = 0.0;
  for (int n = 1; n <= depth; ++n) {
    lyap -= std::log(seq.ratio(n));
    const GenerationEntropy g = generation_entropy(table, n);
    double mm = 0.0;
    const double h = corrected_entropy(table, n, g, &mm);
    r.plugin_entropy.push_back(g.plugin);
    r.miller_madow.push_back(mm);
    r.entropy.push_back(h);
    r.occupied.push_back(g.occupied);
    r.lyapunov.push_back(lyap);
    r.ratio.push_back(h / lyap);
    r.capacity_bound.push_back(n * kLog4 / lyap);
  }
  r.estimate = r.ratio.back();

  if (table.exact()) return r;  // sigma stays 0 for exact tables

  const auto last = r.ratio.end() - 3;
  const auto [lo, hi] = std::minmax_element(last, r.ratio.end());
  r.sigma_spread = 0.5 * (*hi - *lo);

  if (options.bootstrap_resamples > 1) {
    const double lyap_depth = r.lyapunov.back();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(options.bootstrap_resamples));
    for (int b = 0; b < options.bootstrap_resamples; ++b) {
      RngStream rng(options.bootstrap_seed, static_cast<std::uint64_t>(b));
      const CylinderMeasureTable t = table.resample(rng);
      const GenerationEntropy g = generation_entropy(t, depth);
      values.push_back(corrected_entropy(t, depth, g, nullptr) / lyap_depth);
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    r.sigma_bootstrap = std::sqrt(ss / (values.size() - 1));
  }
  r.sigma = std::hypot(r.sigma_bootstrap, r.sigma_spread);
  return r;
}

LocalDimensionSummary local_dimension_samples(const CylinderMeasureTable& table,
                                              const ScaleSequence& seq,
                                              std::size_t sample_count,
                                              std::uint64_t seed) {
  require(table.n_effective() > 0, "local dimension needs a nonempty table");
  require(table.depth() >= 1, "local dimension needs depth >= 1");
  const int depth = table.depth();
  const auto& counts = table.generation_counts(depth);
  std::vector<std::uint64_t> cumulative(counts.size());
  std::partial_sum(counts.begin(), counts.end(), cumulative.begin());
  const double total = static_cast<double>(table.n_effective());
  const double log_side = -lyapunov_sum(seq, depth);

  LocalDimensionSummary out;
  out.samples.reserve(sample_count);
  RngStream rng(seed, 0);
  std::uniform_int_distribution<std::uint64_t> pick(0, table.n_effective() - 1);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const std::uint64_t u = pick(rng);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto cell = static_cast<std::size_t>(it - cumulative.begin());
    const double p = static_cast<double>(counts[cell]) / total;
    out.samples.push_back(std::log(p) / log_side);
  }
  if (out.samples.empty()) return out;
  const double n = static_cast<double>(out.samples.size());
  out.mean = std::accumulate(out.samples.begin(), out.samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : out.samples) ss += (v - out.mean) * (v - out.mean);
  out.stddev = out.samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> sorted = out.samples;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double f) {
    return sorted[static_cast<std::size_t>(f * static_cast<double>(sorted.size() - 1))];
  };
  out.q05 = q(0.05);
  out.median = q(0.5);
  out.q95 = q(0.95);
  return out;
}

}  // namespace hcantor
