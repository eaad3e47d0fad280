#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "hcantor/wos.hpp"

using namespace hcantor;

namespace {

// Kolmogorov-Smirnov distance between reentry samples and the analytic CDF.
double kernel_ks(double rho, int samples, std::uint64_t seed) {
  const double radius = 2.0;
  const Point p{kCenterX + rho * radius, kCenterY};
  RngStream rng(seed, 0);
  std::vector<double> phis;
  phis.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const Point q = exterior_reentry(p, radius, rng);
    phis.push_back(std::atan2(q.y - kCenterY, q.x - kCenterX));
  }
  std::sort(phis.begin(), phis.end());
  double d = 0.0;
  const double n = static_cast<double>(samples);
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const double f = exterior_kernel_cdf(phis[i], rho);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                  std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

}  // namespace

TEST_CASE("kernel CDF matches frozen quadrature values") {
  // Reference values from adaptive quadrature of the exterior Poisson
  // kernel density (rho^2 - 1) / (2 pi (rho^2 - 2 rho cos phi + 1)).
  struct Row {
    double rho, phi, cdf;
  };
  const Row rows[] = {
      {1.5, -2.5, 0.021122125905413545}, {1.5, -0.3, 0.2940140585975636},
      {1.5, 0.7, 0.8404531004165859},    {1.5, 3.0, 0.9954857234722022},
      {2.0, -2.5, 0.03511219405566405},  {2.0, -0.3, 0.3645010650660044},
      {2.0, 0.7, 0.7644365919855787},    {2.0, 2.0, 0.9328844666874074},
      {8.0, -2.5, 0.08050104241091488},  {8.0, 0.7, 0.6396761929185397},
      {8.0, 2.0, 0.8525678401712088},    {8.0, 3.0, 0.9824610742329708},
  };
  for (const Row& r : rows) {
    CHECK(exterior_kernel_cdf(r.phi, r.rho) == doctest::Approx(r.cdf).epsilon(1e-12));
  }
  CHECK(exterior_kernel_cdf(0.0, 3.0) == doctest::Approx(0.5));
  CHECK(exterior_kernel_cdf(std::numbers::pi, 3.0) == 1.0);
  CHECK(exterior_kernel_cdf(-std::numbers::pi, 3.0) == 0.0);
  CHECK_THROWS_AS(exterior_kernel_cdf(0.1, 1.0), Error);
}

TEST_CASE("kernel samples pass a KS test at rho 2 and rho 8") {
  CHECK(kernel_ks(2.0, 100'000, 11) < 0.01);
  CHECK(kernel_ks(8.0, 100'000, 12) < 0.01);
}

TEST_CASE("kernel flattens towards uniform as rho grows") {
  for (double phi : {-2.0, -0.5, 1.0, 2.5}) {
    const double uniform = 0.5 + phi / (2.0 * std::numbers::pi);
    CHECK(std::abs(exterior_kernel_cdf(phi, 1e6) - uniform) < 1e-5);
  }
}

TEST_CASE("kernel samples are symmetric about the start direction") {
  RngStream rng(99, 3);
  const Point p{kCenterX + 20.0, kCenterY};
  int above = 0;
  int near = 0;
  const int n = 40'000;
  for (int i = 0; i < n; ++i) {
    const Point q = exterior_reentry(p, 8.0, rng);
    const double th = std::atan2(q.y - kCenterY, q.x - kCenterX);
    if (th > 0) ++above;
    if (std::abs(th) < 0.5) ++near;
    CHECK(std::hypot(q.x - kCenterX, q.y - kCenterY) == doctest::Approx(8.0));
  }
  CHECK(std::abs(above / static_cast<double>(n) - 0.5) < 0.0125);
  const double expect = exterior_kernel_cdf(0.5, 2.5) - exterior_kernel_cdf(-0.5, 2.5);
  CHECK(std::abs(near / static_cast<double>(n) - expect) < 0.0125);
}

TEST_CASE("parameter defaults and validation") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const WosParams p = WosParams::defaults(q, 3);
  CHECK(p.absorb_epsilon == doctest::Approx(q.sidelength(3) * 1e-3));
  CHECK_NOTHROW(p.validate(q));
  WosParams bad = p;
  bad.absorb_epsilon = q.sidelength(3);
  CHECK_THROWS_AS(bad.validate(q), Error);
  bad = p;
  bad.reentry_radius = 0.6;
  CHECK_THROWS_AS(bad.validate(q), Error);
  bad = p;
  bad.outer_radius = bad.reentry_radius;
  CHECK_THROWS_AS(bad.validate(q), Error);
  bad = p;
  bad.start_radius = 9.0;
  CHECK_THROWS_AS(bad.validate(q), Error);
}

TEST_CASE("depth 0 sends every walker to the root") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const CylinderMeasureTable t = run_campaign(q, WosParams::defaults(q, 0), 500, 3, 1);
  CHECK(t.depth() == 0);
  CHECK(t.n_effective() == 500);
}

TEST_CASE("walker counts: zero is rejected, one gives a single count") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  CHECK_THROWS_AS(run_campaign(q, WosParams::defaults(q, 2), 0, 1, 1), Error);
  const CylinderMeasureTable t = run_campaign(q, WosParams::defaults(q, 2), 1, 1, 1);
  CHECK(t.n_effective() == 1);
  std::uint64_t total = 0;
  for (auto c : t.generation_counts(2)) total += c;
  CHECK(total == 1);
}

TEST_CASE("campaign tables do not depend on the worker count") {
  const ScaleSequence s = ScaleSequence::constant(1.0 / 3);
  const WosParams p = WosParams::defaults(s, 3);
  const CylinderMeasureTable a = run_campaign(s, p, 10'000, 42, 1);
  const CylinderMeasureTable b = run_campaign(s, p, 10'000, 42, 8);
  CHECK(a.generation_counts(3) == b.generation_counts(3));
  const CylinderMeasureTable c = run_campaign(s, p, 10'000, 43, 1);
  CHECK(a.generation_counts(3) != c.generation_counts(3));
}

TEST_CASE("frozen campaign counts for a fixed seed") {
  // Regression values recorded from the engine.
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const CylinderMeasureTable t = run_campaign(q, WosParams::defaults(q, 1), 4000, 2024, 1);
  const std::vector<std::uint64_t> expected{1035, 1004, 992, 969};
  CHECK(t.generation_counts(1) == expected);
}

TEST_CASE("depth-1 symmetry within Monte Carlo error") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const std::uint64_t n = 200'000;
  CampaignStats stats;
  const CylinderMeasureTable t =
      run_campaign(q, WosParams::defaults(q, 1), n, 5, 1, &stats);
  CHECK(stats.total_steps > n);
  const double sd = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
  for (auto c : t.generation_counts(1)) {
    CHECK(std::abs(static_cast<double>(c) / static_cast<double>(n) - 0.25) < 5 * sd);
  }
}

TEST_CASE("conservation: counts plus discards equal walkers") {
  const ScaleSequence s = ScaleSequence::constant(1.0 / 3);
  const std::uint64_t n = 20'000;
  const CylinderMeasureTable t = run_campaign(s, WosParams::defaults(s, 4), n, 8, 1);
  CHECK(t.n_effective() + t.metadata().discarded == n);
}

TEST_CASE("step limit surfaces as an error") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  WosParams p = WosParams::defaults(q, 4);
  p.max_steps = 2;
  RngStream rng(1, 1);
  CHECK_THROWS_AS(sample_exit(q, p, rng), StepLimitExceeded);
  CHECK_THROWS_AS(run_campaign(q, p, 100, 1, 1), Error);
}

TEST_CASE("sequences equal up to the depth give identical tables") {
  const ScaleSequence a = ScaleSequence::explicit_prefix({0.25, 0.3, 0.2});
  const ScaleSequence b = ScaleSequence::explicit_prefix({0.25, 0.3, 0.4});
  const CylinderMeasureTable ta = run_campaign(a, WosParams::defaults(a, 2), 3000, 6, 1);
  const CylinderMeasureTable tb = run_campaign(b, WosParams::defaults(b, 2), 3000, 6, 1);
  CHECK(ta.generation_counts(2) == tb.generation_counts(2));
}
