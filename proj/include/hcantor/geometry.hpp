#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hcantor {

// Corner convention for child squares: 1 = lower-left, 2 = lower-right,
// 3 = upper-right, 4 = upper-left.
inline constexpr int kCornerX[4] = {0, 1, 1, 0};
inline constexpr int kCornerY[4] = {0, 0, 1, 1};

inline constexpr double kCenterX = 0.5;
inline constexpr double kCenterY = 0.5;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class SequenceKind { Constant, Periodic, ExplicitPrefix, Perturbation };

std::string_view to_string(SequenceKind kind);
SequenceKind parse_sequence_kind(std::string_view text);

enum class PerturbationPattern { Alternating, ConstantSign };

std::string_view to_string(PerturbationPattern pattern);
PerturbationPattern parse_perturbation_pattern(std::string_view text);

// Per-generation contraction ratios a_1, a_2, ... of the 4-corner
// construction. Stores a finite pattern that ratio(n) cycles. Immutable
// once built.
class ScaleSequence {
 public:
  static ScaleSequence constant(double a);
  static ScaleSequence periodic(std::vector<double> period);
  // The prefix is repeated cyclically past its end.
  static ScaleSequence explicit_prefix(std::vector<double> prefix);
  // a'_n = a_n + delta * s_n with s_n = +1,-1,+1,... (alternating) or +1.
  // Throws when a perturbed ratio leaves (0, 1/2).
  static ScaleSequence perturbation(const ScaleSequence& base, double delta,
                                    PerturbationPattern pattern);

  SequenceKind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }
  double lower_bound() const { return lo_; }
  double upper_bound() const { return hi_; }

  // a_n for n >= 1.
  double ratio(int n) const;
  // l(n) = a_1 * ... * a_n; l(0) = 1.
  double sidelength(int n) const;
  // A short hex digest identifying the sequence, stable across runs.
  std::string fingerprint() const;
  std::string describe() const;

 private:
  ScaleSequence(SequenceKind kind, std::vector<double> values);

  SequenceKind kind_;
  std::vector<double> values_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline double sidelength(const ScaleSequence& seq, int n) {
  return seq.sidelength(n);
}

// Word over {1,2,3,4} naming a square of the construction. Stored as a
// base-4 code (symbol s contributes digit s-1, first symbol most
// significant), which doubles as the index into full-depth count arrays.
class CylinderAddress {
 public:
  static constexpr int kMaxGeneration = 31;

  CylinderAddress() = default;
  static CylinderAddress from_code(std::uint64_t code, int generation);
  static CylinderAddress parse(std::string_view word);

  int generation() const { return generation_; }
  std::uint64_t code() const { return code_; }
  bool is_root() const { return generation_ == 0; }

  // Symbol at position i (0-based), in 1..4.
  int symbol(int i) const;
  CylinderAddress parent() const;
  CylinderAddress child(int symbol) const;
  CylinderAddress prefix(int generation) const;
  // True when this address is a prefix of (or equal to) other.
  bool is_ancestor_of(const CylinderAddress& other) const;

  std::string to_string() const;

  friend CylinderAddress concat(const CylinderAddress& a,
                                const CylinderAddress& b);
  friend bool operator==(const CylinderAddress&,
                         const CylinderAddress&) = default;

 private:
  CylinderAddress(std::uint64_t code, int generation)
      : code_(code), generation_(generation) {}

  std::uint64_t code_ = 0;
  int generation_ = 0;
};

// All addresses of one generation, in code order.
std::vector<CylinderAddress> generation_addresses(int generation);

inline std::uint64_t cells_in_generation(int generation) {
  return std::uint64_t{1} << (2 * generation);
}

struct SquareRegion {
  Point center;
  double sidelength = 1.0;

  double min_x() const { return center.x - 0.5 * sidelength; }
  double min_y() const { return center.y - 0.5 * sidelength; }
  double max_x() const { return center.x + 0.5 * sidelength; }
  double max_y() const { return center.y + 0.5 * sidelength; }
  bool contains(const Point& p) const;
  bool contains(const SquareRegion& other) const;
};

SquareRegion square_of(const CylinderAddress& addr, const ScaleSequence& seq);

struct NearestSquare {
  double distance = 0.0;
  CylinderAddress address;
};

// Finite-depth approximation K_depth: the union of the 4^depth squares of
// generation `depth`. Holds the per-generation sidelengths and corner
// offsets.
class CantorApproximation {
 public:
  CantorApproximation(ScaleSequence seq, int depth);

  const ScaleSequence& sequence() const { return seq_; }
  int depth() const { return depth_; }
  double sidelength(int generation) const { return side_[generation]; }

  // Exact Euclidean distance to K_depth together with the generation-depth
  // square realizing it. Best-first quadtree descent; a subtree is pruned
  // once its bounding square is no closer than the best leaf so far.
  // When stop_below > 0 the search returns as soon as a leaf closer than
  // stop_below is found (squares are disjoint, so at most one leaf lies
  // within any distance smaller than the smallest gap).
  NearestSquare nearest(const Point& p, double stop_below = 0.0) const;
  double distance(const Point& p) const { return nearest(p).distance; }

  std::optional<CylinderAddress> containing_cylinder(const Point& p) const;

 private:
  ScaleSequence seq_;
  int depth_;
  std::vector<double> side_;    // l(n), n = 0..depth
  std::vector<double> offset_;  // l(n-1) - l(n), n = 1..depth
};

double distance_to_approximation(const Point& p, const ScaleSequence& seq,
                                 int depth);
std::optional<CylinderAddress> containing_cylinder(const Point& p,
                                                   const ScaleSequence& seq,
                                                   int depth);

}  // namespace hcantor
