#include "hcantor/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hcantor/error.hpp"

namespace hcantor {

std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Constant: return "constant";
    case SequenceKind::Periodic: return "periodic";
    case SequenceKind::ExplicitPrefix: return "explicit";
    case SequenceKind::Perturbation: return "perturbation";
  }
  return "unknown";
}

SequenceKind parse_sequence_kind(std::string_view text) {
  if (text == "constant") return SequenceKind::Constant;
  if (text == "periodic") return SequenceKind::Periodic;
  if (text == "explicit") return SequenceKind::ExplicitPrefix;
  if (text == "perturbation") return SequenceKind::Perturbation;
  throw Error(ErrorCode::InvalidArgument,
              "unknown sequence kind '" + std::string(text) + "'");
}

std::string_view to_string(PerturbationPattern pattern) {
  return pattern == PerturbationPattern::Alternating ? "alternating"
                                                     : "constant-sign";
}

PerturbationPattern parse_perturbation_pattern(std::string_view text) {
  if (text == "alternating") return PerturbationPattern::Alternating;
  if (text == "constant-sign") return PerturbationPattern::ConstantSign;
  throw Error(ErrorCode::InvalidArgument,
              "unknown perturbation pattern '" + std::string(text) + "'");
}

ScaleSequence::ScaleSequence(SequenceKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  require(!values_.empty(), "scale sequence needs at least one ratio");
  for (double a : values_) {
    if (!(a > 0.0 && a < 0.5)) {
      std::ostringstream msg;
      msg << "scale ratio " << a << " outside (0, 1/2)";
      throw Error(ErrorCode::InvalidArgument, msg.str());
    }
  }
  auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  lo_ = *lo;
  hi_ = *hi;
}

ScaleSequence ScaleSequence::constant(double a) {
  return ScaleSequence(SequenceKind::Constant, {a});
}

ScaleSequence ScaleSequence::periodic(std::vector<double> period) {
  return ScaleSequence(SequenceKind::Periodic, std::move(period));
}

ScaleSequence ScaleSequence::explicit_prefix(std::vector<double> prefix) {
  return ScaleSequence(SequenceKind::ExplicitPrefix, std::move(prefix));
}

ScaleSequence ScaleSequence::perturbation(const ScaleSequence& base,
                                          double delta,
                                          PerturbationPattern pattern) {
  require(std::isfinite(delta), "perturbation size must be finite");
  // The perturbed sequence is periodic with period lcm(base period, 2).
  std::size_t period = base.values_.size();
  if (pattern == PerturbationPattern::Alternating && period % 2 == 1) {
    period *= 2;
  }
  std::vector<double> values(period);
  for (std::size_t i = 0; i < period; ++i) {
    double sign = (pattern == PerturbationPattern::Alternating && i % 2 == 1)
                      ? -1.0
                      : 1.0;
    values[i] = base.values_[i % base.values_.size()] + delta * sign;
  }
  return ScaleSequence(SequenceKind::Perturbation, std::move(values));
}

double ScaleSequence::ratio(int n) const {
  require(n >= 1, "ratio index starts at 1");
  return values_[static_cast<std::size_t>(n - 1) % values_.size()];
}

double ScaleSequence::sidelength(int n) const {
  require(n >= 0, "generation must be non-negative");
  double l = 1.0;
  for (int i = 1; i <= n; ++i) l *= ratio(i);
  return l;
}

std::string ScaleSequence::describe() const {
  std::ostringstream out;
  out << to_string(kind_) << ":";
  out.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out << (i ? "," : "") << values_[i];
  }
  return out.str();
}

std::string ScaleSequence::fingerprint() const {
  // FNV-1a over the canonical description.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : describe()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CylinderAddress CylinderAddress::from_code(std::uint64_t code, int generation) {
  require(generation >= 0 && generation <= kMaxGeneration,
          "address generation out of range");
  require(generation == kMaxGeneration ||
              code < cells_in_generation(generation),
          "address code out of range for its generation");
  return CylinderAddress(code, generation);
}

CylinderAddress CylinderAddress::parse(std::string_view word) {
  require(word.size() <= static_cast<std::size_t>(kMaxGeneration),
          "address too long");
  std::uint64_t code = 0;
  for (char c : word) {
    if (c < '1' || c > '4') {
      throw Error(ErrorCode::InvalidArgument,
                  "address symbols must be in 1234, got '" + std::string(word) +
                      "'");
    }
    code = code * 4 + static_cast<std::uint64_t>(c - '1');
  }
  return CylinderAddress(code, static_cast<int>(word.size()));
}

int CylinderAddress::symbol(int i) const {
  require(i >= 0 && i < generation_, "symbol index out of range");
  int shift = 2 * (generation_ - 1 - i);
  return static_cast<int>((code_ >> shift) & 3u) + 1;
}

CylinderAddress CylinderAddress::parent() const {
  require(generation_ > 0, "the root address has no parent");
  return CylinderAddress(code_ >> 2, generation_ - 1);
}

CylinderAddress CylinderAddress::child(int s) const {
  require(s >= 1 && s <= 4, "child symbol must be in 1..4");
  require(generation_ < kMaxGeneration, "address too long");
  return CylinderAddress(code_ * 4 + static_cast<std::uint64_t>(s - 1),
                         generation_ + 1);
}

CylinderAddress CylinderAddress::prefix(int generation) const {
  require(generation >= 0 && generation <= generation_,
          "prefix generation out of range");
  return CylinderAddress(code_ >> (2 * (generation_ - generation)), generation);
}

bool CylinderAddress::is_ancestor_of(const CylinderAddress& other) const {
  return generation_ <= other.generation_ &&
         other.prefix(generation_).code_ == code_;
}

std::string CylinderAddress::to_string() const {
  std::string word(static_cast<std::size_t>(generation_), '1');
  std::uint64_t c = code_;
  for (int i = generation_ - 1; i >= 0; --i) {
    word[static_cast<std::size_t>(i)] = static_cast<char>('1' + (c & 3u));
    c >>= 2;
  }
  return word;
}

CylinderAddress concat(const CylinderAddress& a, const CylinderAddress& b) {
  int gen = a.generation_ + b.generation_;
  require(gen <= CylinderAddress::kMaxGeneration, "address too long");
  return CylinderAddress((a.code_ << (2 * b.generation_)) | b.code_, gen);
}

std::vector<CylinderAddress> generation_addresses(int generation) {
  std::vector<CylinderAddress> out;
  std::uint64_t n = cells_in_generation(generation);
  out.reserve(n);
  for (std::uint64_t c = 0; c < n; ++c) {
    out.push_back(CylinderAddress::from_code(c, generation));
  }
  return out;
}

bool SquareRegion::contains(const Point& p) const {
  return p.x >= min_x() && p.x <= max_x() && p.y >= min_y() && p.y <= max_y();
}

bool SquareRegion::contains(const SquareRegion& o) const {
  return o.min_x() >= min_x() && o.max_x() <= max_x() &&
         o.min_y() >= min_y() && o.max_y() <= max_y();
}

SquareRegion square_of(const CylinderAddress& addr, const ScaleSequence& seq) {
  double x = 0.0, y = 0.0, side = 1.0;
  for (int k = 1; k <= addr.generation(); ++k) {
    double child = side * seq.ratio(k);
    int s = addr.symbol(k - 1) - 1;
    x += kCornerX[s] * (side - child);
    y += kCornerY[s] * (side - child);
    side = child;
  }
  return SquareRegion{{x + 0.5 * side, y + 0.5 * side}, side};
}

CantorApproximation::CantorApproximation(ScaleSequence seq, int depth)
    : seq_(std::move(seq)), depth_(depth) {
  require(depth >= 0 && depth <= CylinderAddress::kMaxGeneration,
          "depth out of range");
  side_.resize(static_cast<std::size_t>(depth) + 1);
  offset_.resize(static_cast<std::size_t>(depth) + 1, 0.0);
  side_[0] = 1.0;
  for (int n = 1; n <= depth; ++n) {
    side_[n] = side_[n - 1] * seq_.ratio(n);
    offset_[n] = side_[n - 1] - side_[n];
  }
}

namespace {

inline double box_distance_sq(const Point& p, double x0, double y0,
                              double side) {
  double dx = std::max({x0 - p.x, 0.0, p.x - (x0 + side)});
  double dy = std::max({y0 - p.y, 0.0, p.y - (y0 + side)});
  return dx * dx + dy * dy;
}

struct Node {
  double x, y;
  std::uint64_t code;
  int generation;
  double dist_sq;
};

}  // namespace

NearestSquare CantorApproximation::nearest(const Point& p,
                                           double stop_below) const {
  if (depth_ == 0) {
    return {std::sqrt(box_distance_sq(p, 0.0, 0.0, 1.0)), CylinderAddress{}};
  }
  const double stop_sq = stop_below * stop_below;
  double best_sq = std::numeric_limits<double>::infinity();
  std::uint64_t best_code = 0;

  // Depth-first stack with children pushed farthest first, giving a
  // best-first order along each branch.
  std::array<Node, 4 * CylinderAddress::kMaxGeneration + 4> stack;
  std::size_t top = 0;
  stack[top++] = {0.0, 0.0, 0, 0, box_distance_sq(p, 0.0, 0.0, 1.0)};

  while (top > 0) {
    const Node node = stack[--top];
    if (node.dist_sq >= best_sq) continue;
    const int gen = node.generation + 1;
    const double side = side_[gen];
    const double off = offset_[gen];
    std::array<Node, 4> kids;
    for (int s = 0; s < 4; ++s) {
      double x = node.x + kCornerX[s] * off;
      double y = node.y + kCornerY[s] * off;
      kids[s] = {x, y, node.code * 4 + static_cast<std::uint64_t>(s), gen,
                 box_distance_sq(p, x, y, side)};
    }
    if (gen == depth_) {
      for (const Node& k : kids) {
        if (k.dist_sq < best_sq) {
          best_sq = k.dist_sq;
          best_code = k.code;
        }
      }
      if (best_sq < stop_sq) break;
      continue;
    }
    std::sort(kids.begin(), kids.end(), [](const Node& a, const Node& b) {
      return a.dist_sq > b.dist_sq;
    });
    for (const Node& k : kids) {
      if (k.dist_sq < best_sq) stack[top++] = k;
    }
  }
  return {std::sqrt(best_sq), CylinderAddress::from_code(best_code, depth_)};
}

std::optional<CylinderAddress> CantorApproximation::containing_cylinder(
    const Point& p) const {
  double x = 0.0, y = 0.0;
  if (box_distance_sq(p, x, y, 1.0) > 0.0) return std::nullopt;
  std::uint64_t code = 0;
  for (int gen = 1; gen <= depth_; ++gen) {
    const double side = side_[gen];
    const double off = offset_[gen];
    int found = -1;
    for (int s = 0; s < 4; ++s) {
      double cx = x + kCornerX[s] * off;
      double cy = y + kCornerY[s] * off;
      if (box_distance_sq(p, cx, cy, side) == 0.0) {
        found = s;
        x = cx;
        y = cy;
        break;
      }
    }
    if (found < 0) return std::nullopt;
    code = code * 4 + static_cast<std::uint64_t>(found);
  }
  return CylinderAddress::from_code(code, depth_);
}

double distance_to_approximation(const Point& p, const ScaleSequence& seq,
                                 int depth) {
  return CantorApproximation(seq, depth).distance(p);
}

std::optional<CylinderAddress> containing_cylinder(const Point& p,
                                                   const ScaleSequence& seq,
                                                   int depth) {
  return CantorApproximation(seq, depth).containing_cylinder(p);
}

}  // namespace hcantor
