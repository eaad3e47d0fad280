#include "hcantor/wos.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hcantor/error.hpp"

namespace hcantor {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kChunk = 4096;

}  // namespace

WosParams WosParams::defaults(const ScaleSequence& seq, int depth) {
  WosParams p;
  p.depth = depth;
  p.absorb_epsilon = seq.sidelength(depth) * 1e-3;
  return p;
}

void WosParams::validate(const ScaleSequence& seq) const {
  require(depth >= 0 && depth <= kMaxTableDepth,
          "wos depth must be in [0, " + std::to_string(kMaxTableDepth) + "]");
  const double l = seq.sidelength(depth);
  require(absorb_epsilon > 0.0 && absorb_epsilon < l / 4.0,
          "absorb_epsilon must lie in (0, l(depth)/4)");
  // The unit square must sit strictly inside the re-entry circle.
  require(reentry_radius > std::numbers::sqrt2 / 2.0,
          "reentry_radius must exceed the half-diagonal of the unit square");
  require(reentry_radius < outer_radius, "reentry_radius must be < outer_radius");
  require(start_radius <= reentry_radius, "start_radius must be <= reentry_radius");
  require(start_radius > std::numbers::sqrt2 / 2.0,
          "start_radius must enclose the unit square");
  require(max_steps > 0, "max_steps must be positive");
}

std::string WosParams::to_json() const {
  nlohmann::json j = {{"depth", depth},
                      {"absorb_epsilon", absorb_epsilon},
                      {"start_radius", start_radius},
                      {"outer_radius", outer_radius},
                      {"reentry_radius", reentry_radius},
                      {"max_steps", max_steps}};
  return j.dump();
}

StepLimitExceeded::StepLimitExceeded(std::uint64_t steps)
    : Error(ErrorCode::StepLimitExceeded,
            "walker not absorbed after " + std::to_string(steps) + " steps") {}

double exterior_kernel_cdf(double phi, double rho) {
  require(rho > 1.0, "exterior kernel needs rho > 1");
  // With r = 1/rho the density is the interior Poisson kernel
  // (1 - r^2) / (2 pi (1 - 2 r cos phi + r^2)); its antiderivative is
  // (1/pi) atan(((1 + r)/(1 - r)) tan(phi/2)).
  const double r = 1.0 / rho;
  const double scale = (1.0 + r) / (1.0 - r);
  if (phi >= std::numbers::pi) return 1.0;
  if (phi <= -std::numbers::pi) return 0.0;
  return 0.5 + std::atan(scale * std::tan(0.5 * phi)) / std::numbers::pi;
}

Point exterior_reentry(const Point& p, double reentry_radius, RngStream& rng) {
  const double dx = p.x - kCenterX;
  const double dy = p.y - kCenterY;
  const double dist = std::hypot(dx, dy);
  require(dist > reentry_radius, "exterior_reentry needs a point outside the circle");
  const double r = reentry_radius / dist;
  const double theta0 = std::atan2(dy, dx);
  // Inverse of the CDF above.
  const double u = rng.uniform();
  const double phi = 2.0 * std::atan((1.0 - r) / (1.0 + r) *
                                     std::tan(std::numbers::pi * (u - 0.5)));
  const double theta = theta0 + phi;
  return {kCenterX + reentry_radius * std::cos(theta),
          kCenterY + reentry_radius * std::sin(theta)};
}

WalkOutcome walk_to_exit(const CantorApproximation& set, const WosParams& params,
                         RngStream& rng) {
  WalkOutcome out;
  const double start_angle = kTwoPi * rng.uniform();
  Point p{kCenterX + params.start_radius * std::cos(start_angle),
          kCenterY + params.start_radius * std::sin(start_angle)};
  const double outer_sq = params.outer_radius * params.outer_radius;

  for (std::uint64_t step = 0; step < params.max_steps; ++step) {
    const double dx = p.x - kCenterX;
    const double dy = p.y - kCenterY;
    if (dx * dx + dy * dy > outer_sq) {
      p = exterior_reentry(p, params.reentry_radius, rng);
      ++out.reentries;
      ++out.steps;
      continue;
    }
    const NearestSquare hit = set.nearest(p, params.absorb_epsilon);
    ++out.steps;
    if (hit.distance < params.absorb_epsilon) {
      out.address = hit.address;
      return out;
    }
    const double angle = kTwoPi * rng.uniform();
    p.x += hit.distance * std::cos(angle);
    p.y += hit.distance * std::sin(angle);
  }
  return out;
}

CylinderAddress sample_exit(const ScaleSequence& seq, const WosParams& params,
                            RngStream& rng) {
  params.validate(seq);
  const CantorApproximation set(seq, params.depth);
  WalkOutcome outcome = walk_to_exit(set, params, rng);
  if (!outcome.address) throw StepLimitExceeded(outcome.steps);
  return *outcome.address;
}

CylinderMeasureTable run_campaign(const ScaleSequence& seq,
                                  const WosParams& params,
                                  std::uint64_t n_walkers, std::uint64_t seed,
                                  unsigned workers, CampaignStats* stats) {
  require(n_walkers >= 1, "a campaign needs at least one walker");
  params.validate(seq);
  const auto t0 = std::chrono::steady_clock::now();
  const CantorApproximation set(seq, params.depth);
  const std::size_t cells = cells_in_generation(params.depth);
  if (workers == 0) workers = 1;
  const std::uint64_t chunks = (n_walkers + kChunk - 1) / kChunk;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

  struct Partial {
    std::vector<std::uint64_t> counts;
    std::uint64_t discarded = 0;
    std::uint64_t steps = 0;
    std::uint64_t reentries = 0;
  };
  std::vector<Partial> partials(workers);
  std::atomic<std::uint64_t> next_chunk{0};

  auto work = [&](Partial& part) {
    part.counts.assign(cells, 0);
    for (;;) {
      const std::uint64_t chunk = next_chunk.fetch_add(1);
      if (chunk >= chunks) break;
      const std::uint64_t begin = chunk * kChunk;
      const std::uint64_t end = std::min(n_walkers, begin + kChunk);
      for (std::uint64_t i = begin; i < end; ++i) {
        RngStream rng(seed, i);
        const WalkOutcome w = walk_to_exit(set, params, rng);
        part.steps += w.steps;
        part.reentries += w.reentries;
        if (w.address) {
          ++part.counts[w.address->code()];
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
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] { work(partials[w]); });
    }
  }

  std::vector<std::uint64_t> counts(cells, 0);
  TableMetadata meta;
  meta.seed = seed;
  meta.seq_fingerprint = seq.fingerprint();
  meta.sequence = seq.describe();
  meta.params = params.to_json();
  std::uint64_t steps = 0, reentries = 0;
  for (const Partial& part : partials) {
    for (std::size_t c = 0; c < cells; ++c) counts[c] += part.counts[c];
    meta.discarded += part.discarded;
    steps += part.steps;
    reentries += part.reentries;
  }
  // Fails when more than 0.1% of the walkers were discarded.
  if (meta.discarded * 1000 > n_walkers) {
    throw Error(ErrorCode::DiscardLimitExceeded,
                std::to_string(meta.discarded) + " of " +
                    std::to_string(n_walkers) +
                    " walkers hit the step limit (limit 0.1%)");
  }
  if (meta.discarded == n_walkers) {
    throw Error(ErrorCode::DiscardLimitExceeded, "every walker was discarded");
  }
  if (stats) {
    stats->total_steps = steps;
    stats->reentries = reentries;
    stats->seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  }
  return CylinderMeasureTable(params.depth, std::move(counts), std::move(meta));
}

}  // namespace hcantor
