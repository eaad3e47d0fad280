#pragma once

#include <cstdint>
#include <string>

#include "hcantor/geometry.hpp"
#include "hcantor/measure_table.hpp"

namespace hcantor {

inline constexpr int kOracleMaxDepth = 3;

// Simple random walk on the lattice hZ^2, started on a circle about the
// centre of the unit square, absorbed on lattice sites inside a
// generation-depth square, restarted uniformly on the start circle when it
// crosses the outer circle.
struct GridOracleParams {
  int depth = 2;
  double spacing = 0.0;  // 0 selects l(depth) / 8
  double start_radius = 1.0;
  double outer_radius = 2.0;
  std::uint64_t walkers = 1'000'000;
  std::uint64_t max_steps = 4'000'000'000ull;

  double resolved_spacing(const ScaleSequence& seq) const;
  void validate(const ScaleSequence& seq) const;
  std::string to_json(const ScaleSequence& seq) const;
};

// Count table flagged oracle=true. Walker blocks draw from std::mt19937_64,
// a different generator and seed derivation than the walk-on-spheres engine.
CylinderMeasureTable grid_harmonic_measure(const ScaleSequence& seq,
                                           const GridOracleParams& params,
                                           std::uint64_t seed,
                                           unsigned workers = 1);

struct ProbabilityDifference {
  double max_abs = 0.0;
  double combined_se = 0.0;  // at the maximizing cell
  std::string argmax;
};

// Largest |p_a(I) - p_b(I)| over generation-depth cells of equal-depth tables.
ProbabilityDifference max_probability_difference(const CylinderMeasureTable& a,
                                                 const CylinderMeasureTable& b);

struct RichardsonReport {
  double coarse_spacing = 0.0;
  double fine_spacing = 0.0;
  ProbabilityDifference difference;
};

// Runs the oracle at spacing h and h / refinement with the same seed and
// reports the largest probability difference. refinement = 1 reruns the
// identical configuration.
RichardsonReport richardson_check(const ScaleSequence& seq,
                                  const GridOracleParams& params,
                                  std::uint64_t seed, unsigned workers = 1,
                                  int refinement = 2);

}  // namespace hcantor
