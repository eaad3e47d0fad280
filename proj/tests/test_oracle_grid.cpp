#include <cmath>

#include "doctest.h"

#include "hcantor/error.hpp"
#include "hcantor/oracle_grid.hpp"

using namespace hcantor;

TEST_CASE("oracle parameters and cost guard") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  GridOracleParams p;
  p.depth = 2;
  CHECK(p.resolved_spacing(q) == doctest::Approx(1.0 / 128));
  CHECK_NOTHROW(p.validate(q));
  p.depth = 4;
  try {
    p.validate(q);
    FAIL("expected the cost guard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CostGuard);
  }
  p.depth = 2;
  p.spacing = 0.01;
  CHECK_THROWS_AS(p.validate(q), Error);
  p.spacing = 0.0;
  p.outer_radius = 0.9;
  CHECK_THROWS_AS(p.validate(q), Error);
}

TEST_CASE("depth 0 oracle absorbs every walker at the root") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  GridOracleParams p;
  p.depth = 0;
  p.walkers = 200;
  const CylinderMeasureTable t = grid_harmonic_measure(q, p, 1);
  CHECK(t.n_effective() == 200);
  CHECK(t.metadata().oracle);
}

TEST_CASE("depth 1 oracle is symmetric within noise") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  GridOracleParams p;
  p.depth = 1;
  p.walkers = 20'000;
  const CylinderMeasureTable t = grid_harmonic_measure(q, p, 3);
  const double sd = std::sqrt(0.25 * 0.75 / 20'000.0);
  for (auto c : t.generation_counts(1)) {
    CHECK(std::abs(static_cast<double>(c) / 20'000.0 - 0.25) < 5 * sd);
  }
}

TEST_CASE("oracle is deterministic across worker counts") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  GridOracleParams p;
  p.depth = 1;
  p.walkers = 5000;
  const CylinderMeasureTable a = grid_harmonic_measure(q, p, 9, 1);
  const CylinderMeasureTable b = grid_harmonic_measure(q, p, 9, 4);
  CHECK(a.generation_counts(1) == b.generation_counts(1));
}

TEST_CASE("richardson check") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  GridOracleParams p;
  p.depth = 1;
  p.walkers = 3000;
  const RichardsonReport same = richardson_check(q, p, 5, 1, 1);
  CHECK(same.difference.max_abs == 0.0);
  const RichardsonReport half = richardson_check(q, p, 5, 1, 2);
  CHECK(half.fine_spacing == doctest::Approx(half.coarse_spacing / 2));
  CHECK(half.difference.max_abs < 2.0 * half.difference.combined_se + 0.03);
}

TEST_CASE("probability difference") {
  const CylinderMeasureTable u = CylinderMeasureTable::uniform(2);
  const ProbabilityDifference d = max_probability_difference(u, u);
  CHECK(d.max_abs == 0.0);
  CHECK(d.combined_se == 0.0);
  CHECK_THROWS_AS(max_probability_difference(u, CylinderMeasureTable::uniform(1)), Error);
}
