#include "hcantor/oracle_grid.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hcantor/error.hpp"

namespace hcantor {

namespace {

constexpr std::uint64_t kBlock = 1024;
constexpr int kStepX[4] = {1, -1, 0, 0};
constexpr int kStepY[4] = {0, 0, 1, -1};

// Lattice sites of the closed unit square, each tagged with 1 + the code of
// the generation-depth square containing it (0 when free).
class AbsorptionGrid {
 public:
  AbsorptionGrid(const ScaleSequence& seq, int depth, double h)
      : sites_(static_cast<int>(std::floor(1.0 / h + 1e-9))) {
    tags_.assign(static_cast<std::size_t>(sites_ + 1) * (sites_ + 1), 0);
    const double tol = 1e-9 * h;
    // Rasterize every square independently of the distance machinery.
    for (const CylinderAddress& addr : generation_addresses(depth)) {
      const SquareRegion sq = square_of(addr, seq);
      const int i0 = static_cast<int>(std::ceil((sq.min_x() - tol) / h));
      const int i1 = static_cast<int>(std::floor((sq.max_x() + tol) / h));
      const int j0 = static_cast<int>(std::ceil((sq.min_y() - tol) / h));
      const int j1 = static_cast<int>(std::floor((sq.max_y() + tol) / h));
      for (int i = std::max(i0, 0); i <= std::min(i1, sites_); ++i) {
        for (int j = std::max(j0, 0); j <= std::min(j1, sites_); ++j) {
          tags_[index(i, j)] = static_cast<std::uint32_t>(addr.code() + 1);
        }
      }
    }
  }

  // 0 when (i, j) is free or outside the unit square.
  std::uint32_t tag(int i, int j) const {
    if (i < 0 || j < 0 || i > sites_ || j > sites_) return 0;
    return tags_[index(i, j)];
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * (sites_ + 1) + static_cast<std::size_t>(j);
  }

  int sites_;
  std::vector<std::uint32_t> tags_;
};

}  // namespace

double GridOracleParams::resolved_spacing(const ScaleSequence& seq) const {
  return spacing > 0.0 ? spacing : seq.sidelength(depth) / 8.0;
}

void GridOracleParams::validate(const ScaleSequence& seq) const {
  if (depth < 0 || depth > kOracleMaxDepth) {
    throw Error(ErrorCode::CostGuard,
                "lattice oracle is limited to depth <= " +
                    std::to_string(kOracleMaxDepth));
  }
  const double h = resolved_spacing(seq);
  require(h > 0.0 && h <= seq.sidelength(depth) / 8.0 * (1.0 + 1e-12),
          "oracle spacing must satisfy h <= l(depth)/8");
  require(start_radius > std::numbers::sqrt2 / 2.0 + 2.0 * h,
          "oracle start circle must clear the unit square");
  require(outer_radius > start_radius, "oracle outer radius must exceed start");
  require(walkers >= 1, "oracle needs at least one walker");
}

std::string GridOracleParams::to_json(const ScaleSequence& seq) const {
  nlohmann::json j = {{"depth", depth},
                      {"spacing", resolved_spacing(seq)},
                      {"start_radius", start_radius},
                      {"outer_radius", outer_radius},
                      {"walkers", walkers},
                      {"reentry", "uniform"}};
  return j.dump();
}

CylinderMeasureTable grid_harmonic_measure(const ScaleSequence& seq,
                                           const GridOracleParams& params,
                                           std::uint64_t seed,
                                           unsigned workers) {
  params.validate(seq);
  const double h = params.resolved_spacing(seq);
  const AbsorptionGrid grid(seq, params.depth, h);
  const double cx = kCenterX / h;
  const double cy = kCenterY / h;
  const double r_start = params.start_radius / h;
  const double r_out_sq = (params.outer_radius / h) * (params.outer_radius / h);
  const std::uint64_t blocks = (params.walkers + kBlock - 1) / kBlock;
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));

  struct Partial {
    std::vector<std::uint64_t> counts;
    std::uint64_t discarded = 0;
  };
  std::vector<Partial> partials(workers);
  std::atomic<std::uint64_t> next_block{0};

  auto work = [&](Partial& part) {
    part.counts.assign(cells_in_generation(params.depth), 0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (;;) {
      const std::uint64_t block = next_block.fetch_add(1);
      if (block >= blocks) break;
      std::seed_seq sseq{static_cast<std::uint32_t>(seed),
                         static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(block),
                         static_cast<std::uint32_t>(block >> 32), 0x6f72u};
      std::mt19937_64 gen(sseq);
      auto start_site = [&](int& i, int& j) {
        const double t = angle(gen);
        i = static_cast<int>(std::lround(cx + r_start * std::cos(t)));
        j = static_cast<int>(std::lround(cy + r_start * std::sin(t)));
      };
      const std::uint64_t end = std::min(params.walkers, (block + 1) * kBlock);
      for (std::uint64_t w = block * kBlock; w < end; ++w) {
        int i = 0, j = 0;
        start_site(i, j);
        std::uint64_t bits = 0;
        int bits_left = 0;
        std::uint32_t hit = 0;
        for (std::uint64_t step = 0; step < params.max_steps; ++step) {
          if (bits_left == 0) {
            bits = gen();
            bits_left = 32;
          }
          i += kStepX[bits & 3u];
          j += kStepY[bits & 3u];
          bits >>= 2;
          --bits_left;
          hit = grid.tag(i, j);
          if (hit) break;
          const double dx = i - cx;
          const double dy = j - cy;
          if (dx * dx + dy * dy > r_out_sq) start_site(i, j);
        }
        if (hit) {
          ++part.counts[hit - 1];
        } else {
          ++part.discarded;
        }
      }
    }
  };

  if (workers == 1) {
    work(partials[0]);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] { work(partials[w]); });
    }
  }

  std::vector<std::uint64_t> counts(cells_in_generation(params.depth), 0);
  TableMetadata meta;
  meta.seed = seed;
  meta.oracle = true;
  meta.seq_fingerprint = seq.fingerprint();
  meta.sequence = seq.describe();
  meta.params = params.to_json(seq);
  for (const Partial& p : partials) {
    for (std::size_t c = 0; c < counts.size(); ++c) counts[c] += p.counts[c];
    meta.discarded += p.discarded;
  }
  if (meta.discarded == params.walkers) {
    throw Error(ErrorCode::DiscardLimitExceeded, "no oracle walker was absorbed");
  }
  return CylinderMeasureTable(params.depth, std::move(counts), std::move(meta));
}

ProbabilityDifference max_probability_difference(const CylinderMeasureTable& a,
                                                 const CylinderMeasureTable& b) {
  if (a.depth() != b.depth()) {
    throw Error(ErrorCode::DepthMismatch, "tables differ in depth");
  }
  const auto& ca = a.generation_counts(a.depth());
  const auto& cb = b.generation_counts(b.depth());
  const double na = static_cast<double>(a.n_effective());
  const double nb = static_cast<double>(b.n_effective());
  ProbabilityDifference out;
  std::size_t best = 0;
  for (std::size_t c = 0; c < ca.size(); ++c) {
    const double d = std::abs(static_cast<double>(ca[c]) / na -
                              static_cast<double>(cb[c]) / nb);
    if (d > out.max_abs) {
      out.max_abs = d;
      best = c;
    }
  }
  const double pa = static_cast<double>(ca[best]) / na;
  const double pb = static_cast<double>(cb[best]) / nb;
  out.combined_se = std::sqrt((a.exact() ? 0.0 : pa * (1.0 - pa) / na) +
                              (b.exact() ? 0.0 : pb * (1.0 - pb) / nb));
  out.argmax = CylinderAddress::from_code(best, a.depth()).to_string();
  return out;
}

RichardsonReport richardson_check(const ScaleSequence& seq,
                                  const GridOracleParams& params,
                                  std::uint64_t seed, unsigned workers,
                                  int refinement) {
  require(refinement >= 1, "refinement must be >= 1");
  RichardsonReport report;
  GridOracleParams coarse = params;
  coarse.spacing = params.resolved_spacing(seq);
  GridOracleParams fine = coarse;
  fine.spacing = coarse.spacing / refinement;
  report.coarse_spacing = coarse.spacing;
  report.fine_spacing = fine.spacing;
  const CylinderMeasureTable a = grid_harmonic_measure(seq, coarse, seed, workers);
  const CylinderMeasureTable b = grid_harmonic_measure(seq, fine, seed, workers);
  report.difference = max_probability_difference(a, b);
  return report;
}

}  // namespace hcantor
