#include "hcantor/measure_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "json.hpp"

#include "hcantor/error.hpp"

namespace hcantor {

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {k == 0 ? 0.0 : std::max(0.0, centre - half),
          k == n ? 1.0 : std::min(1.0, centre + half)};
}

CylinderMeasureTable::CylinderMeasureTable(int depth,
                                           std::vector<std::uint64_t> counts,
                                           TableMetadata meta)
    : depth_(depth), meta_(std::move(meta)) {
  require(depth >= 0 && depth <= kMaxTableDepth,
          "table depth must be in [0, " + std::to_string(kMaxTableDepth) + "]");
  require(counts.size() == cells_in_generation(depth),
          "count vector must have 4^depth entries");
  levels_.resize(static_cast<std::size_t>(depth) + 1);
  levels_[static_cast<std::size_t>(depth)] = std::move(counts);
  for (int g = depth - 1; g >= 0; --g) {
    const auto& below = levels_[static_cast<std::size_t>(g) + 1];
    auto& level = levels_[static_cast<std::size_t>(g)];
    level.assign(cells_in_generation(g), 0);
    for (std::size_t c = 0; c < level.size(); ++c) {
      level[c] = below[4 * c] + below[4 * c + 1] + below[4 * c + 2] +
                 below[4 * c + 3];
    }
  }
}

CylinderMeasureTable CylinderMeasureTable::exact_measure(
    int depth, std::vector<std::uint64_t> weights) {
  TableMetadata meta;
  meta.exact = true;
  meta.sequence = "synthetic";
  CylinderMeasureTable t(depth, std::move(weights), std::move(meta));
  require(t.n_effective() > 0, "synthetic measure needs positive total weight");
  return t;
}

CylinderMeasureTable CylinderMeasureTable::uniform(int depth) {
  return exact_measure(depth,
                       std::vector<std::uint64_t>(cells_in_generation(depth), 1));
}

CylinderMeasureTable CylinderMeasureTable::product(
    int depth, const std::array<std::uint64_t, 4>& w) {
  std::vector<std::uint64_t> weights(cells_in_generation(depth), 1);
  for (std::size_t c = 0; c < weights.size(); ++c) {
    std::uint64_t code = c;
    for (int g = 0; g < depth; ++g) {
      weights[c] *= w[code & 3u];
      code >>= 2;
    }
  }
  return exact_measure(depth, std::move(weights));
}

std::uint64_t CylinderMeasureTable::count(const CylinderAddress& addr) const {
  require(addr.generation() <= depth_,
          "address generation exceeds table depth");
  return levels_[static_cast<std::size_t>(addr.generation())][addr.code()];
}

CylinderMeasureTable CylinderMeasureTable::resample(RngStream& rng) const {
  if (exact()) return *this;
  // Multinomial draw by binomial splitting down the tree.
  std::vector<std::uint64_t> current{n_effective()};
  for (int g = 1; g <= depth_; ++g) {
    const auto& parent_counts = levels_[static_cast<std::size_t>(g) - 1];
    const auto& child_counts = levels_[static_cast<std::size_t>(g)];
    std::vector<std::uint64_t> next(child_counts.size(), 0);
    for (std::size_t c = 0; c < current.size(); ++c) {
      std::uint64_t remaining = current[c];
      const double parent = static_cast<double>(parent_counts[c]);
      if (remaining == 0 || parent == 0.0) continue;
      double mass_left = 1.0;
      for (std::size_t s = 0; s < 3 && remaining > 0; ++s) {
        const double p = static_cast<double>(child_counts[4 * c + s]) / parent;
        const double cond = std::clamp(mass_left > 0.0 ? p / mass_left : 1.0,
                                       0.0, 1.0);
        std::uint64_t draw = 0;
        if (cond >= 1.0) {
          draw = remaining;
        } else if (cond > 0.0) {
          std::binomial_distribution<std::uint64_t> binom(remaining, cond);
          draw = binom(rng);
        }
        next[4 * c + s] = draw;
        remaining -= draw;
        mass_left -= p;
      }
      next[4 * c + 3] += remaining;
    }
    current = std::move(next);
  }
  return CylinderMeasureTable(depth_, std::move(current), meta_);
}

std::string CylinderMeasureTable::header_json() const {
  nlohmann::json params = nlohmann::json::object();
  if (!meta_.params.empty()) params = nlohmann::json::parse(meta_.params);
  nlohmann::json j = {{"depth", depth_},
                      {"n_effective", n_effective()},
                      {"discarded", meta_.discarded},
                      {"seed", meta_.seed},
                      {"seq_fingerprint", meta_.seq_fingerprint},
                      {"sequence", meta_.sequence},
                      {"params", params},
                      {"oracle", meta_.oracle},
                      {"exact", meta_.exact}};
  return j.dump();
}

void CylinderMeasureTable::write_csv(std::ostream& out) const {
  out << "# " << header_json() << "\n";
  out << "address,count,probability,wilson_lo,wilson_hi\n";
  out.precision(17);
  const std::uint64_t n = n_effective();
  for (int g = 0; g <= depth_; ++g) {
    const auto& level = levels_[static_cast<std::size_t>(g)];
    for (std::size_t c = 0; c < level.size(); ++c) {
      const Interval ci = wilson_interval(level[c], n);
      out << CylinderAddress::from_code(c, g).to_string() << ","
          << level[c] << ","
          << static_cast<double>(level[c]) / static_cast<double>(n) << ","
          << ci.lo << "," << ci.hi << "\n";
    }
  }
}

CylinderMeasureTable CylinderMeasureTable::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw Error(ErrorCode::Io, "table file lacks its JSON header line");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad table header: ") + e.what());
  }
  const int depth = header.at("depth").get<int>();
  require(depth >= 0 && depth <= kMaxTableDepth, "table depth out of range");
  TableMetadata meta;
  meta.seed = header.value("seed", std::uint64_t{0});
  meta.seq_fingerprint = header.value("seq_fingerprint", std::string{});
  meta.sequence = header.value("sequence", std::string{});
  if (header.contains("params")) meta.params = header["params"].dump();
  meta.oracle = header.value("oracle", false);
  meta.exact = header.value("exact", false);
  meta.discarded = header.value("discarded", std::uint64_t{0});

  std::getline(in, line);  // column names
  std::vector<std::uint64_t> counts(cells_in_generation(depth), 0);
  std::vector<std::pair<CylinderAddress, std::uint64_t>> shallow;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string word, count;
    std::getline(row, word, ',');
    std::getline(row, count, ',');
    const CylinderAddress addr = CylinderAddress::parse(word);
    const std::uint64_t c = std::stoull(count);
    if (addr.generation() == depth) {
      counts[addr.code()] = c;
    } else if (addr.generation() < depth) {
      shallow.emplace_back(addr, c);
    } else {
      throw Error(ErrorCode::Io, "row address deeper than table depth");
    }
  }
  CylinderMeasureTable table(depth, std::move(counts), std::move(meta));
  for (const auto& [addr, c] : shallow) {
    if (table.count(addr) != c) {
      throw Error(ErrorCode::Io, "row " + addr.to_string() +
                                     " violates the partition identity");
    }
  }
  if (header.contains("n_effective") &&
      header["n_effective"].get<std::uint64_t>() != table.n_effective()) {
    throw Error(ErrorCode::Io, "n_effective does not match the row counts");
  }
  return table;
}

void CylinderMeasureTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_csv(out);
}

CylinderMeasureTable CylinderMeasureTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  return read_csv(in);
}

Estimate probability(const CylinderMeasureTable& table,
                     const CylinderAddress& addr) {
  const std::uint64_t k = table.count(addr);
  const std::uint64_t n = table.n_effective();
  const double p = static_cast<double>(k) / static_cast<double>(n);
  if (table.exact()) return {p, {p, p}};
  return {p, wilson_interval(k, n)};
}

Estimate conditional(const CylinderMeasureTable& table,
                     const CylinderAddress& base, const CylinderAddress& tail) {
  require(base.generation() + tail.generation() <= table.depth(),
          "conditional reaches below the table depth");
  const std::uint64_t parent = table.count(base);
  if (parent == 0) {
    throw Error(ErrorCode::UndefinedConditional,
                "no walkers in cylinder '" + base.to_string() + "'");
  }
  const std::uint64_t k = table.count(concat(base, tail));
  const double p = static_cast<double>(k) / static_cast<double>(parent);
  if (table.exact()) return {p, {p, p}};
  return {p, wilson_interval(k, parent)};
}

namespace {

bool passes(const CylinderMeasureTable& t, std::uint64_t count,
            std::uint64_t floor) {
  return t.exact() ? count > 0 : count >= floor;
}

// Percentile bootstrap of a statistic recomputed on multinomial resamples.
Interval bootstrap_percentiles(
    const std::function<double(const CylinderMeasureTable&)>& stat,
    const CylinderMeasureTable& table, const ScanOptions& options,
    double point) {
  if (table.exact() || options.bootstrap_resamples <= 0) return {point, point};
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(options.bootstrap_resamples));
  for (int b = 0; b < options.bootstrap_resamples; ++b) {
    RngStream rng(options.bootstrap_seed, static_cast<std::uint64_t>(b));
    values.push_back(stat(table.resample(rng)));
  }
  std::sort(values.begin(), values.end());
  auto q = [&](double f) {
    const double pos = f * static_cast<double>(values.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= values.size()) return values.back();
    return values[i] * (1.0 - frac) + values[i + 1] * frac;
  };
  return {q(0.025), q(0.975)};
}

struct RatioCombo {
  std::uint64_t ij, ijl, pj, pjl;
};

}  // namespace

RatioScanReport harnack_ratio_scan(const CylinderMeasureTable& table, int n,
                                   int k, int m, const ScanOptions& options) {
  require(n >= 0 && k >= 0 && m >= 0, "scan generations must be non-negative");
  require(n + k + m <= table.depth(), "n + k + m exceeds the table depth");
  RatioScanReport report;
  report.n = n;
  report.k = k;
  report.m = m;

  const auto& mid = table.generation_counts(n + k);
  const auto& low = table.generation_counts(n + k + m);
  const std::uint64_t n_cells = cells_in_generation(n);
  const std::uint64_t k_cells = cells_in_generation(k);
  const std::uint64_t m_cells = cells_in_generation(m);

  std::vector<RatioCombo> combos;
  for (std::uint64_t i = 0; i < n_cells; ++i) {
    for (std::uint64_t ip = 0; ip < n_cells; ++ip) {
      if (i == ip) continue;  // identical bases contribute exactly 0
      for (std::uint64_t j = 0; j < k_cells; ++j) {
        const std::uint64_t ij = (i << (2 * k)) | j;
        const std::uint64_t pj = (ip << (2 * k)) | j;
        for (std::uint64_t l = 0; l < m_cells; ++l) {
          const std::uint64_t ijl = (ij << (2 * m)) | l;
          const std::uint64_t pjl = (pj << (2 * m)) | l;
          if (passes(table, mid[ij], options.count_floor) &&
              passes(table, mid[pj], options.count_floor) &&
              passes(table, low[ijl], options.count_floor) &&
              passes(table, low[pjl], options.count_floor)) {
            combos.push_back({ij, ijl, pj, pjl});
          } else {
            ++report.pairs_excluded;
          }
        }
      }
    }
  }
  report.pairs_scanned = combos.size();
  if (n == 0) {
    // Only I = I' = root: the deviation is identically zero.
    report.pairs_scanned = cells_in_generation(k) * m_cells;
    return report;
  }
  if (combos.empty()) {
    throw Error(ErrorCode::InsufficientCounts,
                "no (I, I', J, L) combination passes the count floor");
  }

  std::size_t best = 0;
  auto stat = [&](const CylinderMeasureTable& t, std::size_t* arg) {
    const auto& tm = t.generation_counts(n + k);
    const auto& tl = t.generation_counts(n + k + m);
    double worst = 0.0;
    for (std::size_t c = 0; c < combos.size(); ++c) {
      const RatioCombo& r = combos[c];
      const double a = static_cast<double>(tl[r.ijl]) / static_cast<double>(tm[r.ij]);
      const double b = static_cast<double>(tl[r.pjl]) / static_cast<double>(tm[r.pj]);
      if (b == 0.0 || tm[r.ij] == 0 || tm[r.pj] == 0) continue;
      const double dev = std::abs(a / b - 1.0);
      if (dev > worst) {
        worst = dev;
        if (arg) *arg = c;
      }
    }
    return worst;
  };
  report.max_abs_deviation = stat(table, &best);
  {
    const auto& tm = table.generation_counts(n + k);
    const auto& tl = table.generation_counts(n + k + m);
    std::vector<double> devs;
    devs.reserve(combos.size());
    for (const RatioCombo& r : combos) {
      const double a = static_cast<double>(tl[r.ijl]) / static_cast<double>(tm[r.ij]);
      const double b = static_cast<double>(tl[r.pjl]) / static_cast<double>(tm[r.pj]);
      devs.push_back(std::abs(a / b - 1.0));
    }
    auto mid_it = devs.begin() + static_cast<std::ptrdiff_t>(devs.size() / 2);
    std::nth_element(devs.begin(), mid_it, devs.end());
    report.median_abs_deviation = *mid_it;
  }
  report.confidence = bootstrap_percentiles(
      [&](const CylinderMeasureTable& t) { return stat(t, nullptr); }, table,
      options, report.max_abs_deviation);
  const RatioCombo& b = combos[best];
  const int gk = n + k;
  report.argmax = CylinderAddress::from_code(b.ij, gk).prefix(n).to_string() +
                  "|" +
                  CylinderAddress::from_code(b.pj, gk).prefix(n).to_string() +
                  "|" +
                  CylinderAddress::from_code(b.ij & (k_cells - 1), k).to_string() +
                  "|" +
                  CylinderAddress::from_code(b.ijl & (m_cells - 1), m).to_string();
  return report;
}

DecayFit fit_geometric_decay(const std::vector<RatioScanReport>& reports) {
  require(reports.size() >= 2, "a decay fit needs at least two offsets");
  DecayFit fit;
  std::vector<double> x, y;
  for (const auto& r : reports) {
    fit.ks.push_back(r.k);
    fit.deviations.push_back(r.max_abs_deviation);
    x.push_back(static_cast<double>(r.k));
    y.push_back(std::log(std::max(r.max_abs_deviation, 1e-300)));
  }
  const double nn = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nn;
  my /= nn;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "decay fit needs distinct offsets");
  const double slope = sxy / sxx;
  fit.q_hat = std::exp(slope);
  fit.log_c = my - slope * mx;
  // Flat data carries no evidence of decay.
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  fit.decaying = slope < 0.0 && syy > 0.0;
  return fit;
}

CodimComparison codim_compare(const CylinderMeasureTable& a,
                              const CylinderMeasureTable& b,
                              const ScanOptions& options) {
  if (a.depth() != b.depth()) {
    throw Error(ErrorCode::DepthMismatch,
                "codim_compare needs tables of equal depth (" +
                    std::to_string(a.depth()) + " vs " +
                    std::to_string(b.depth()) + ")");
  }
  CodimComparison out;
  struct Cell {
    int generation;
    std::uint64_t code;
  };
  std::vector<Cell> cells;
  for (int g = 1; g <= a.depth(); ++g) {
    const auto& ca = a.generation_counts(g);
    const auto& cb = b.generation_counts(g);
    for (std::uint64_t c = 0; c < ca.size(); ++c) {
      if (passes(a, ca[c], options.count_floor) &&
          passes(b, cb[c], options.count_floor)) {
        cells.push_back({g, c});
      } else {
        ++out.pairs_excluded;
      }
    }
  }
  out.pairs_scanned = cells.size();
  if (cells.empty()) return out;

  auto stat = [&](const CylinderMeasureTable& ta, const CylinderMeasureTable& tb,
                  std::size_t* arg) {
    double worst = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Cell& cell = cells[i];
      const auto& a_here = ta.generation_counts(cell.generation);
      const auto& a_up = ta.generation_counts(cell.generation - 1);
      const auto& b_here = tb.generation_counts(cell.generation);
      const auto& b_up = tb.generation_counts(cell.generation - 1);
      const std::uint64_t up = cell.code >> 2;
      if (a_up[up] == 0 || b_up[up] == 0 || b_here[cell.code] == 0) continue;
      const double ra = static_cast<double>(a_here[cell.code]) /
                        static_cast<double>(a_up[up]);
      const double rb = static_cast<double>(b_here[cell.code]) /
                        static_cast<double>(b_up[up]);
      const double dev = std::abs(ra / rb - 1.0);
      if (dev > worst) {
        worst = dev;
        if (arg) *arg = i;
      }
    }
    return worst;
  };
  std::size_t best = 0;
  out.max_abs_deviation = stat(a, b, &best);
  out.argmax = CylinderAddress::from_code(cells[best].code, cells[best].generation)
                   .to_string();

  if (!(a.exact() && b.exact()) && options.bootstrap_resamples > 0) {
    std::vector<double> values;
    for (int r = 0; r < options.bootstrap_resamples; ++r) {
      RngStream ra(options.bootstrap_seed, 2 * static_cast<std::uint64_t>(r));
      RngStream rb(options.bootstrap_seed, 2 * static_cast<std::uint64_t>(r) + 1);
      values.push_back(stat(a.resample(ra), b.resample(rb), nullptr));
    }
    std::sort(values.begin(), values.end());
    const std::size_t last = values.size() - 1;
    out.confidence = {values[static_cast<std::size_t>(0.025 * last)],
                      values[static_cast<std::size_t>(0.975 * last)]};
  } else {
    out.confidence = {out.max_abs_deviation, out.max_abs_deviation};
  }
  return out;
}

QuasiInvarianceReport quasi_invariance_check(const CylinderMeasureTable& table,
                                             int n, int k,
                                             const ScanOptions& options) {
  require(n >= 0 && k >= 0, "generations must be non-negative");
  require(n + k <= table.depth(), "n + k exceeds the table depth");
  QuasiInvarianceReport report;
  report.n = n;
  report.k = k;
  report.confidence = {1.0, 1.0};
  if (n == 0 || k == 0) {
    // A single base cell, or J = root: every ratio is exactly 1.
    report.pairs_scanned = cells_in_generation(n) * cells_in_generation(n) *
                           cells_in_generation(k);
    return report;
  }
  const auto& low = table.generation_counts(n + k);
  const std::uint64_t n_cells = cells_in_generation(n);
  const std::uint64_t k_cells = cells_in_generation(k);
  struct Combo {
    std::uint64_t i, ij, ip, ipj;
  };
  std::vector<Combo> combos;
  for (std::uint64_t i = 0; i < n_cells; ++i) {
    for (std::uint64_t ip = 0; ip < n_cells; ++ip) {
      if (i == ip) continue;
      for (std::uint64_t j = 0; j < k_cells; ++j) {
        const std::uint64_t ij = (i << (2 * k)) | j;
        const std::uint64_t ipj = (ip << (2 * k)) | j;
        if (passes(table, low[ij], options.count_floor) &&
            passes(table, low[ipj], options.count_floor)) {
          combos.push_back({i, ij, ip, ipj});
        } else {
          ++report.pairs_excluded;
        }
      }
    }
  }
  report.pairs_scanned = combos.size();
  if (combos.empty()) {
    throw Error(ErrorCode::InsufficientCounts,
                "no (I, I', J) combination passes the count floor");
  }
  auto stat = [&](const CylinderMeasureTable& t) {
    const auto& tt = t.generation_counts(n);
    const auto& tl = t.generation_counts(n + k);
    double worst = 1.0;
    for (const Combo& c : combos) {
      if (tl[c.ipj] == 0 || tt[c.i] == 0) continue;
      const double a = static_cast<double>(tl[c.ij]) / static_cast<double>(tt[c.i]);
      const double b = static_cast<double>(tl[c.ipj]) / static_cast<double>(tt[c.ip]);
      worst = std::max(worst, a / b);
    }
    return worst;
  };
  report.max_ratio = stat(table);
  report.confidence =
      bootstrap_percentiles(stat, table, options, report.max_ratio);
  return report;
}

}  // namespace hcantor
