#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "hcantor/error.hpp"
#include "hcantor/geometry.hpp"

using namespace hcantor;

namespace {

double box_distance(const Point& p, const SquareRegion& sq) {
  const double dx = std::max({sq.min_x() - p.x, 0.0, p.x - sq.max_x()});
  const double dy = std::max({sq.min_y() - p.y, 0.0, p.y - sq.max_y()});
  return std::hypot(dx, dy);
}

}  // namespace

TEST_CASE("sidelength is the product of the ratios") {
  CHECK(ScaleSequence::constant(0.25).sidelength(2) == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(ScaleSequence::explicit_prefix({0.3, 0.2}).sidelength(2) ==
        doctest::Approx(0.06).epsilon(1e-15));
  CHECK(ScaleSequence::periodic({0.2, 0.3}).sidelength(0) == 1.0);
  CHECK(ScaleSequence::constant(1.0 / 3).sidelength(0) == 1.0);
}

TEST_CASE("sequence construction rejects ratios outside (0, 1/2)") {
  CHECK_THROWS_AS(ScaleSequence::constant(0.5), Error);
  CHECK_THROWS_AS(ScaleSequence::constant(0.0), Error);
  CHECK_THROWS_AS(ScaleSequence::periodic({0.2, 0.6}), Error);
  CHECK_THROWS_AS(ScaleSequence::periodic({}), Error);
  CHECK_THROWS_AS(ScaleSequence::constant(0.25).ratio(0), Error);
}

TEST_CASE("explicit prefix cycles past its end") {
  const ScaleSequence s = ScaleSequence::explicit_prefix({0.3, 0.2, 0.4});
  CHECK(s.ratio(1) == 0.3);
  CHECK(s.ratio(3) == 0.4);
  CHECK(s.ratio(4) == 0.3);
  CHECK(s.ratio(8) == 0.2);
  CHECK(s.lower_bound() == 0.2);
  CHECK(s.upper_bound() == 0.4);
}

TEST_CASE("perturbation follows the sign pattern and throws on bound violation") {
  const ScaleSequence base = ScaleSequence::constant(0.25);
  const ScaleSequence alt =
      ScaleSequence::perturbation(base, 0.05, PerturbationPattern::Alternating);
  CHECK(alt.ratio(1) == doctest::Approx(0.30));
  CHECK(alt.ratio(2) == doctest::Approx(0.20));
  CHECK(alt.ratio(3) == doctest::Approx(0.30));
  const ScaleSequence same =
      ScaleSequence::perturbation(base, 0.01, PerturbationPattern::ConstantSign);
  CHECK(same.ratio(5) == doctest::Approx(0.26));
  CHECK_THROWS_AS(
      ScaleSequence::perturbation(base, 0.3, PerturbationPattern::Alternating),
      Error);
  const ScaleSequence periodic = ScaleSequence::periodic({0.2, 0.3, 0.4});
  const ScaleSequence p2 =
      ScaleSequence::perturbation(periodic, 0.01, PerturbationPattern::Alternating);
  for (int n = 1; n <= 12; ++n) {
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    CHECK(p2.ratio(n) == doctest::Approx(periodic.ratio(n) + 0.01 * sign));
  }
}

TEST_CASE("fingerprint identifies the sequence") {
  CHECK(ScaleSequence::constant(0.25).fingerprint() ==
        ScaleSequence::constant(0.25).fingerprint());
  CHECK(ScaleSequence::constant(0.25).fingerprint() !=
        ScaleSequence::constant(0.26).fingerprint());
  CHECK(ScaleSequence::constant(0.25).fingerprint().size() == 16);
}

TEST_CASE("address parsing, printing and tree relations") {
  const CylinderAddress a = CylinderAddress::parse("1423");
  CHECK(a.generation() == 4);
  CHECK(a.to_string() == "1423");
  CHECK(a.symbol(0) == 1);
  CHECK(a.symbol(3) == 3);
  CHECK(a.parent().to_string() == "142");
  CHECK(a.prefix(2).to_string() == "14");
  CHECK(a.parent().child(3) == a);
  CHECK(a.prefix(1).is_ancestor_of(a));
  CHECK_FALSE(a.is_ancestor_of(a.prefix(1)));
  CHECK(CylinderAddress().is_ancestor_of(a));
  CHECK(concat(CylinderAddress::parse("14"), CylinderAddress::parse("23")) == a);
  CHECK(CylinderAddress::parse("").is_root());
  CHECK(CylinderAddress::from_code(a.code(), 4) == a);
  CHECK_THROWS_AS(CylinderAddress::parse("125"), Error);
  CHECK_THROWS_AS(CylinderAddress().parent(), Error);
  CHECK_THROWS_AS(a.child(0), Error);
}

TEST_CASE("generation enumeration is complete and in code order") {
  for (int g = 0; g <= 4; ++g) {
    const auto all = generation_addresses(g);
    REQUIRE(all.size() == cells_in_generation(g));
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(all[i].code() == i);
      CHECK(all[i].generation() == g);
    }
  }
}

TEST_CASE("square_of places children in the declared corners") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const SquareRegion root = square_of(CylinderAddress(), q);
  CHECK(root.center.x == 0.5);
  CHECK(root.center.y == 0.5);
  CHECK(root.sidelength == 1.0);
  const SquareRegion s1 = square_of(CylinderAddress::parse("1"), q);
  CHECK(s1.center.x == doctest::Approx(0.125));
  CHECK(s1.center.y == doctest::Approx(0.125));
  CHECK(s1.min_x() == doctest::Approx(0.0));
  CHECK(s1.max_y() == doctest::Approx(0.25));
  const SquareRegion s13 = square_of(CylinderAddress::parse("13"), q);
  CHECK(s13.center.x == doctest::Approx(0.21875));
  CHECK(s13.center.y == doctest::Approx(0.21875));
  CHECK(s13.sidelength == doctest::Approx(1.0 / 16));
  const SquareRegion s2 = square_of(CylinderAddress::parse("2"), q);
  CHECK(s2.center.x == doctest::Approx(0.875));
  CHECK(s2.center.y == doctest::Approx(0.125));
  const SquareRegion s4 = square_of(CylinderAddress::parse("4"), q);
  CHECK(s4.center.x == doctest::Approx(0.125));
  CHECK(s4.center.y == doctest::Approx(0.875));
}

TEST_CASE("child squares nest inside their parents") {
  const ScaleSequence s = ScaleSequence::periodic({0.2, 0.45, 0.3});
  const double tol = 1e-15;
  for (const CylinderAddress& a : generation_addresses(4)) {
    const SquareRegion outer = square_of(a.parent(), s);
    const SquareRegion inner = square_of(a, s);
    CHECK(inner.min_x() >= outer.min_x() - tol);
    CHECK(inner.max_x() <= outer.max_x() + tol);
    CHECK(inner.min_y() >= outer.min_y() - tol);
    CHECK(inner.max_y() <= outer.max_y() + tol);
  }
}

TEST_CASE("distance examples") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  CHECK(distance_to_approximation({0.5, 0.5}, q, 1) ==
        doctest::Approx(std::sqrt(2.0) * 0.25).epsilon(1e-14));
  const SquareRegion s = square_of(CylinderAddress::parse("32"), q);
  CHECK(distance_to_approximation(s.center, q, 2) == 0.0);
  CHECK(distance_to_approximation({-1.0, 0.0}, q, 3) == doctest::Approx(1.0));
  CHECK(distance_to_approximation({0.3, 0.3}, q, 0) == 0.0);
}

TEST_CASE("distance agrees with brute force over all squares") {
  const ScaleSequence seqs[] = {ScaleSequence::constant(0.25),
                                ScaleSequence::constant(1.0 / 3),
                                ScaleSequence::periodic({0.2, 0.45})};
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> coord(-0.5, 1.5);
  for (const ScaleSequence& seq : seqs) {
    const CantorApproximation set(seq, 4);
    std::vector<SquareRegion> squares;
    for (const CylinderAddress& a : generation_addresses(4)) {
      squares.push_back(square_of(a, seq));
    }
    for (int i = 0; i < 1000; ++i) {
      const Point p{coord(gen), coord(gen)};
      double best = std::numeric_limits<double>::infinity();
      for (const SquareRegion& sq : squares) best = std::min(best, box_distance(p, sq));
      const NearestSquare ns = set.nearest(p);
      CHECK(std::abs(ns.distance - best) <= 1e-12);
      CHECK(std::abs(box_distance(p, squares[ns.address.code()]) - best) <= 1e-12);
    }
  }
}

TEST_CASE("containing cylinder examples") {
  const ScaleSequence q = ScaleSequence::constant(0.25);
  const auto a = containing_cylinder({0.01, 0.01}, q, 1);
  REQUIRE(a.has_value());
  CHECK(a->to_string() == "1");
  CHECK_FALSE(containing_cylinder({0.5, 0.5}, q, 1).has_value());
  CHECK_FALSE(containing_cylinder({0.5, 0.5}, ScaleSequence::constant(0.45), 3).has_value());
  const SquareRegion s23 = square_of(CylinderAddress::parse("23"), q);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 100; ++i) {
    const Point p{s23.center.x + u(gen) * s23.sidelength,
                  s23.center.y + u(gen) * s23.sidelength};
    const auto c = containing_cylinder(p, q, 2);
    REQUIRE(c.has_value());
    CHECK(c->to_string() == "23");
  }
}
