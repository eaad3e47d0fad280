#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hcantor/error.hpp"
#include "hcantor/geometry.hpp"
#include "hcantor/measure_table.hpp"
#include "hcantor/rng.hpp"

namespace hcantor {

// Walk-on-spheres parameters. Radii are measured from the centre (0.5, 0.5)
// of the unit square.
struct WosParams {
  int depth = 4;
  // Absolute absorption distance; defaults to l(depth) * 1e-3.
  double absorb_epsilon = 0.0;
  double start_radius = 8.0;
  double outer_radius = 16.0;
  double reentry_radius = 8.0;
  std::uint64_t max_steps = 1'000'000;

  static WosParams defaults(const ScaleSequence& seq, int depth);
  // Throws InvalidArgument describing the first violated constraint.
  void validate(const ScaleSequence& seq) const;
  std::string to_json() const;
};

class StepLimitExceeded : public Error {
 public:
  explicit StepLimitExceeded(std::uint64_t steps);
};

struct WalkOutcome {
  std::optional<CylinderAddress> address;  // empty when the step limit hit
  std::uint64_t steps = 0;
  std::uint64_t reentries = 0;
};

// One Brownian path from the start circle to K_depth. Never throws on the
// step limit; reports it through an empty address instead.
WalkOutcome walk_to_exit(const CantorApproximation& set, const WosParams& params,
                         RngStream& rng);

// Exit cylinder of one walker; throws StepLimitExceeded.
CylinderAddress sample_exit(const ScaleSequence& seq, const WosParams& params,
                            RngStream& rng);

// Point on the circle of radius reentry_radius about the centre, distributed
// as the hitting law of Brownian motion started at p outside that circle
// (exterior Poisson kernel, sampled by exact inverse CDF).
Point exterior_reentry(const Point& p, double reentry_radius, RngStream& rng);

// Closed-form CDF of the exterior Poisson kernel in the angle offset
// phi = theta - theta0 in (-pi, pi], for rho = |p - c| / R > 1.
double exterior_kernel_cdf(double phi, double rho);

struct CampaignStats {
  std::uint64_t total_steps = 0;
  std::uint64_t reentries = 0;
  double seconds = 0.0;
};

// Runs n_walkers walkers on streams RngStream(seed, i). Counts are merged
// by addition, so the table does not depend on `workers`. Fails with
// DiscardLimitExceeded if more than 0.1% of walkers hit the step limit.
CylinderMeasureTable run_campaign(const ScaleSequence& seq,
                                  const WosParams& params,
                                  std::uint64_t n_walkers, std::uint64_t seed,
                                  unsigned workers,
                                  CampaignStats* stats = nullptr);

}  // namespace hcantor
