#include <cmath>

#include "doctest.h"

#include "hcantor/dim_entropy.hpp"
#include "hcantor/error.hpp"
#include "hcantor/wos.hpp"

using namespace hcantor;

namespace {

// Exact chain rule (j + k) h_{j+k}(L) = j h_j(L) + k sum_J cond(J) h_k(LJ)
// for plug-in entropies.
double chain_rule_gap(const CylinderMeasureTable& t, const CylinderAddress& base,
                      int j, int k) {
  const double lhs = (j + k) * entropy_hk(t, base, j + k, 0);
  double rhs = j * entropy_hk(t, base, j, 0);
  for (const CylinderAddress& J : generation_addresses(j)) {
    const CylinderAddress bj = concat(base, J);
    const std::uint64_t n = t.count(bj);
    if (n == 0) continue;
    rhs += k * conditional(t, base, J).value * entropy_hk(t, bj, k, 0);
  }
  return std::abs(lhs - rhs);
}

}  // namespace

TEST_CASE("entropy of uniform and degenerate conditionals") {
  const CylinderMeasureTable u = CylinderMeasureTable::uniform(3);
  CHECK(entropy_hk(u, CylinderAddress(), 1) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(entropy_hk(u, CylinderAddress::parse("2"), 2) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));
  std::vector<std::uint64_t> w(16, 0);
  w[5] = 1000;
  const CylinderMeasureTable d(2, w);
  CHECK(entropy_hk(d, CylinderAddress(), 2) == 0.0);
  CHECK_THROWS_AS(entropy_hk(d, CylinderAddress::parse("4"), 1), Error);
  CHECK_THROWS_AS(entropy_hk(u, CylinderAddress(), 0), Error);
  CHECK_THROWS_AS(entropy_hk(u, CylinderAddress::parse("12"), 2), Error);
}

TEST_CASE("entropy of a product measure") {
  // -sum p log p for p = (0.1, 0.2, 0.3, 0.4).
  const double h1 = 1.2798542258336676;
  const CylinderMeasureTable p = CylinderMeasureTable::product(4, {1, 2, 3, 4});
  for (int k = 1; k <= 4; ++k) {
    CHECK(entropy_hk(p, CylinderAddress(), k) == doctest::Approx(h1).epsilon(1e-12));
  }
  CHECK(entropy_hk(p, CylinderAddress::parse("31"), 2) == doctest::Approx(h1).epsilon(1e-12));
}

TEST_CASE("entropy below the count floor is refused for sampled tables") {
  const ScaleSequence s = ScaleSequence::constant(0.25);
  const CylinderMeasureTable t = run_campaign(s, WosParams::defaults(s, 3), 300, 1, 1);
  try {
    entropy_hk(t, CylinderAddress::parse("12"), 1, 100);
    FAIL("expected InsufficientCounts");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientCounts);
  }
}

TEST_CASE("plug-in chain rule is exact on a campaign table") {
  const ScaleSequence s = ScaleSequence::constant(1.0 / 3);
  const CylinderMeasureTable t = run_campaign(s, WosParams::defaults(s, 5), 20'000, 31, 1);
  for (int j = 1; j <= 3; ++j) {
    for (int k = 1; j + k <= 5; ++k) {
      CHECK(chain_rule_gap(t, CylinderAddress(), j, k) < 1e-10);
    }
  }
  CHECK(chain_rule_gap(t, CylinderAddress::parse("3"), 1, 2) < 1e-10);
}

TEST_CASE("oscillation") {
  const CylinderMeasureTable p = CylinderMeasureTable::product(5, {1, 2, 3, 4});
  CHECK(delta_jk(p, CylinderAddress(), 2, 2).delta == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(delta_jk(p, CylinderAddress::parse("1"), 0, 3).delta == 0.0);
  const OscillationReport rep = oscillation_report(p, 1, 1, 2);
  CHECK(rep.bases.size() == 4);
  CHECK(rep.max_value == doctest::Approx(0.0).epsilon(1e-12));
  std::vector<std::uint64_t> w(16, 1);
  w[0] = 13;  // word "11" heavier than its siblings
  const CylinderMeasureTable skew = CylinderMeasureTable::exact_measure(2, w);
  const OscillationValue v = delta_jk(skew, CylinderAddress(), 1, 1, 0);
  CHECK(v.delta > 0.0);
  CHECK(v.max_h == doctest::Approx(std::log(4.0)));
  CHECK(v.cells_used == 4);
}

TEST_CASE("capacity ratio and dim_cantor") {
  CHECK(dim_cantor(ScaleSequence::constant(0.25), 50) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dim_cantor(ScaleSequence::constant(1.0 / 3), 50) ==
        doctest::Approx(1.2618595071429148).epsilon(1e-14));
  const ScaleSequence alt = ScaleSequence::periodic({0.2, 0.3});
  CHECK(capacity_ratio(alt, 2) == doctest::Approx(0.9854902114799412).epsilon(1e-14));
  CHECK(dim_cantor(alt, 100'000) == doctest::Approx(0.98549).epsilon(1e-4));
  const ScaleSequence per = ScaleSequence::periodic({0.2, 0.35, 0.45});
  const double expected[] = {0.8613531161467861, 1.0426166240732582, 1.2027653111246714,
                             1.0943265050455169, 1.1331437531638067, 1.2027653111246717};
  for (int n = 1; n <= 6; ++n) {
    CHECK(capacity_ratio(per, n) == doctest::Approx(expected[n - 1]).epsilon(1e-13));
    CHECK(dim_cantor(per, n, 1) == doctest::Approx(expected[n - 1]).epsilon(1e-13));
  }
  CHECK(lyapunov_sum(per, 3) == doctest::Approx(-std::log(0.2 * 0.35 * 0.45)));
}

TEST_CASE("entropy-ratio dimension on synthetic measures") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const ScaleSequence t = ScaleSequence::constant(1.0 / 3);
  const EntropyReport uq = entropy_ratio_dimension(CylinderMeasureTable::uniform(5), q);
  for (double d : uq.ratio) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uq.sigma == 0.0);
  const EntropyReport ut = entropy_ratio_dimension(CylinderMeasureTable::uniform(5), t);
  CHECK(ut.estimate == doctest::Approx(1.2618595071429148).epsilon(1e-12));
  const EntropyReport pq =
      entropy_ratio_dimension(CylinderMeasureTable::product(5, {1, 2, 3, 4}), q);
  CHECK(pq.estimate == doctest::Approx(0.9232196723355078).epsilon(1e-12));
  CHECK_THROWS_AS(entropy_ratio_dimension(CylinderMeasureTable::uniform(2), q), Error);
}

TEST_CASE("entropy-ratio dimension on a campaign carries an uncertainty") {
  const ScaleSequence s = ScaleSequence::constant(1.0 / 3);
  const CylinderMeasureTable t = run_campaign(s, WosParams::defaults(s, 4), 20'000, 5, 1);
  EntropyOptions o;
  o.bootstrap_resamples = 50;
  const EntropyReport r = entropy_ratio_dimension(t, s, o);
  CHECK(r.estimate > 0.8);
  CHECK(r.estimate < 1.26186);
  CHECK(r.sigma > 0.0);
  CHECK(r.sigma >= r.sigma_bootstrap);
  for (std::size_t n = 0; n < r.ratio.size(); ++n) {
    CHECK(r.entropy[n] >= r.plugin_entropy[n]);
    CHECK(r.entropy[n] <= (n + 1) * std::log(4.0) + 1e-12);
  }
  CHECK(r.ratio[0] == doctest::Approx(1.2618595071429148).epsilon(1e-4));
}

TEST_CASE("local dimension samples") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const LocalDimensionSummary u =
      local_dimension_samples(CylinderMeasureTable::uniform(4), q, 500);
  for (double v : u.samples) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<std::uint64_t> w(256, 0);
  w[17] = 50;
  const LocalDimensionSummary point =
      local_dimension_samples(CylinderMeasureTable::exact_measure(4, w), q, 100);
  for (double v : point.samples) CHECK(v == 0.0);
}
