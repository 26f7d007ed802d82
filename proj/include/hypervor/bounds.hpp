#pragma once

// Volume, graph and rank bound formulas. Everything that is a rational
// expression in integer or decimal inputs is computed exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hypervor/errors.hpp"
#include "hypervor/rational.hpp"

namespace hypervor {

// Volume of a hyperbolic ball of radius r.
inline double ball_volume(double r) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  return M_PI * (std::sinh(2.0 * r) - 2.0 * r);
}

struct GraphBoundInputs {
  std::int64_t edges = 0, loops = 0, vertices = 0;
  std::vector<std::int64_t> loop_group_ranks;  // one per vertex
};

inline void validate(const GraphBoundInputs& g) {
  if (g.edges < 0 || g.loops < 0 || g.vertices < 0)
    throw InputError("graph counts must be nonnegative");
  if (g.loops > g.edges) throw InputError("more loops than edges");
}

// (15/16)(E - L) - s + 1
inline Rational betti_bound(const GraphBoundInputs& g) {
  validate(g);
  return Rational(15, 16) * Rational(g.edges - g.loops) - Rational(g.vertices) + 1;
}

// (15/16)E - s + 1 + (1/16) sum of ranks
inline Rational rank_bound_graph(const GraphBoundInputs& g) {
  validate(g);
  if (static_cast<std::int64_t>(g.loop_group_ranks.size()) != g.vertices)
    throw InputError("one loop-group rank per vertex is required");
  std::int64_t sum = 0;
  for (auto r : g.loop_group_ranks) {
    if (r < 0) throw InputError("ranks must be nonnegative");
    sum += r;
  }
  return Rational(15, 16) * Rational(g.edges) - Rational(g.vertices) + 1 +
         Rational(sum, 16);
}

struct BoundInputs {
  double volume = 0.0;
  double epsilon = 0.0;
  double R = 0.0;
  double c = 0.0;
  std::int64_t rho = 0;
  double b = 0.0;  // b(epsilon / 2)
};

struct RankVolumeBound {
  double ball = 0.0;              // B(R)
  double packing_ratio = 0.0;     // (B(R) - b) / c
  std::int64_t packing_floor = 0;
  std::int64_t volume_floor = 0;  // floor(V / b)
  Rational per_piece;             // (15/32) floor - 1 + rho/16
  Rational bound;
};

// 1 + floor(V/b) * max(0, (15/32) floor((B(R) - b)/c) - 1 + rho/16).
// Conditions on c tying it to the packing function are the caller's.
inline RankVolumeBound rank_volume_bound(const BoundInputs& in) {
  if (!(in.volume > 0.0) || !(in.b > 0.0) || !(in.c > 0.0))
    throw DomainError("volume, b and c must be positive");
  if (in.rho < 0) throw DomainError("rho must be nonnegative");
  if (!(2.0 * in.epsilon < in.R && in.R < 2.5 * in.epsilon))
    throw DomainError("R must satisfy 2 epsilon < R < 5 epsilon / 2");
  RankVolumeBound out;
  out.ball = ball_volume(in.R);
  out.packing_ratio = (out.ball - in.b) / in.c;
  out.packing_floor = static_cast<std::int64_t>(std::floor(out.packing_ratio));
  out.volume_floor = static_cast<std::int64_t>(std::floor(in.volume / in.b));
  out.per_piece = Rational(15, 32) * Rational(out.packing_floor) - 1 + Rational(in.rho, 16);
  const Rational piece = std::max(out.per_piece, Rational(0));
  out.bound = 1 + Rational(out.volume_floor) * piece;
  return out;
}

// (15/32) * 314 - 1
inline const Rational kCorollaryCoefficient{2339, 16};

// 1 + floor(V/b) * (146.1875 + rho/16)
inline Rational corollary_bound(double volume, std::int64_t rho, double b) {
  if (!(volume > 0.0) || !(b > 0.0)) throw DomainError("volume and b must be positive");
  if (rho < 0) throw DomainError("rho must be nonnegative");
  const auto vf = static_cast<std::int64_t>(std::floor(volume / b));
  return 1 + Rational(vf) * (kCorollaryCoefficient + Rational(rho, 16));
}

// Parameters of the epsilon = log 3 corollary.
namespace log3 {
inline double epsilon() { return std::log(3.0); }
inline double R() { return 2.0 * std::log(3.0) + 0.15; }
inline const Rational c{62, 125};  // 0.496
inline const Rational paper_ratio_low = Rational::parse("314.62");
// b must exceed 146.4375 / 157.497 for the five-free constant ...
inline Rational b_lower_exclusive() {
  return (kCorollaryCoefficient + Rational(4, 16)) / Rational::parse("157.497");
}
// ... and keep (B(R) - b)/c >= 314.62.
inline double b_upper_inclusive() {
  return ball_volume(R()) - paper_ratio_low.to_double() * c.to_double();
}
inline constexpr double kDefaultB = 0.93;
inline bool b_accepted(double b) {
  return b > b_lower_exclusive().to_double() && b <= b_upper_inclusive();
}
}  // namespace log3

struct Log2k1Result {
  double sum = 0.0;
  bool violates = false;  // sum > 1/2: the elements cannot be independent
  double max_displacement = 0.0;
  double threshold = 0.0;  // log(2k - 1)
};

// Sums below 1/2 + this are treated as consistent; the equality case is
// computed in floating point.
inline constexpr double kLog2k1Slack = 1e-12;

inline Log2k1Result log2k1_check(const std::vector<double>& d) {
  Log2k1Result r;
  for (double x : d) {
    if (!(x >= 0.0)) throw DomainError("displacements must be nonnegative");
    r.sum += 1.0 / (1.0 + std::exp(x));
    r.max_displacement = std::max(r.max_displacement, x);
  }
  const double k = static_cast<double>(d.size());
  r.threshold = d.empty() ? 0.0 : std::log(2.0 * k - 1.0);
  r.violates = r.sum > 0.5 + kLog2k1Slack;
  return r;
}

// Indices of the first r vectors that are linearly independent over Q,
// scanning in order.
inline std::vector<int> select_independent(const std::vector<std::vector<std::int64_t>>& v,
                                           int r) {
  if (r < 0) throw DomainError("r must be nonnegative");
  std::vector<int> chosen;
  std::vector<std::vector<Rational>> basis;  // echelon rows
  std::vector<std::size_t> pivots;
  for (int i = 0; i < static_cast<int>(v.size()) && static_cast<int>(chosen.size()) < r; ++i) {
    std::vector<Rational> row(v[i].begin(), v[i].end());
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const std::size_t p = pivots[b];
      if (p >= row.size() || row[p] == Rational(0)) continue;
      const Rational f = row[p] / basis[b][p];
      for (std::size_t k = 0; k < row.size(); ++k) row[k] -= f * basis[b][k];
    }
    std::size_t p = 0;
    while (p < row.size() && row[p] == Rational(0)) ++p;
    if (p == row.size()) continue;
    basis.push_back(row);
    pivots.push_back(p);
    chosen.push_back(i);
  }
  if (static_cast<int>(chosen.size()) < r)
    throw RankDeficient("the images span rank " + std::to_string(chosen.size()) +
                        " < " + std::to_string(r));
  return chosen;
}

// Rank of the images over Q.
inline int rational_rank(const std::vector<std::vector<std::int64_t>>& v) {
  int lo = 0;
  for (int r = 1; r <= static_cast<int>(v.size()); ++r) {
    try {
      select_independent(v, r);
      lo = r;
    } catch (const RankDeficient&) {
      break;
    }
  }
  return lo;
}

enum class FreenessKind { KFree, Semifree };

struct FreenessMode {
  FreenessKind kind = FreenessKind::KFree;
  int k = 5;
};

struct RhoResult {
  std::int64_t rho = 0;
  int independent_k = 0;  // size of an independent set ruled out by the check
  Log2k1Result check;     // over the independent_k largest displacements
  bool checked = false;
};

// k-free: a subgroup generated by short loops has rank < k, so rho = k - 1.
// (2k-1)-semifree: rank <= 2k - 2 unless k of the loops are independent.
inline RhoResult rho_from_mode(const FreenessMode& mode, std::vector<double> displacements) {
  if (mode.k < 1) throw DomainError("freeness parameter must be positive");
  for (double d : displacements)
    if (!(d < std::log(9.0)))
      throw PreconditionError("loop displacement must be below log 9");
  RhoResult r;
  if (mode.kind == FreenessKind::KFree) {
    r.rho = mode.k - 1;
    r.independent_k = mode.k;
  } else {
    const int k = (mode.k + 1) / 2;
    r.rho = 2 * k - 2;
    r.independent_k = k;
  }
  if (static_cast<int>(displacements.size()) >= r.independent_k) {
    std::sort(displacements.rbegin(), displacements.rend());
    displacements.resize(r.independent_k);
    r.check = log2k1_check(displacements);
    r.checked = true;
  }
  return r;
}

enum class HeadlineCase { FiveFree, NineSemifree, ClosedHomology, CuspedHomology };

struct NamedCheck {
  std::string name;
  bool pass = false;
};

struct HeadlineReport {
  HeadlineCase which = HeadlineCase::FiveFree;
  double volume = 0.0;
  double b = 0.0;
  Rational constant;  // the stated coefficient of vol(M)
  double bound = 0.0;  // the stated bound at this volume
  std::vector<std::pair<std::string, Rational>> intermediates;
  std::vector<std::pair<std::string, double>> branches;  // homology cases
  std::vector<NamedCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline std::string case_name(HeadlineCase c) {
  switch (c) {
    case HeadlineCase::FiveFree: return "five_free";
    case HeadlineCase::NineSemifree: return "nine_semifree";
    case HeadlineCase::ClosedHomology: return "closed_homology";
    case HeadlineCase::CuspedHomology: return "cusped_homology";
  }
  return "?";
}

inline HeadlineCase parse_case(const std::string& s) {
  if (s == "five_free") return HeadlineCase::FiveFree;
  if (s == "nine_semifree") return HeadlineCase::NineSemifree;
  if (s == "closed_homology") return HeadlineCase::ClosedHomology;
  if (s == "cusped_homology") return HeadlineCase::CuspedHomology;
  throw InputError("unknown headline case: " + s);
}

namespace headline {
inline const Rational kFiveFree = Rational::parse("157.497");
inline const Rational kNineSemifree = Rational::parse("157.766");
inline const Rational kClosed = Rational::parse("157.763");
inline const Rational kCusped = Rational::parse("158.12");
inline const Rational kClosedVolume = Rational::parse("3.77");
inline const Rational kCuspedVolume = Rational::parse("2.848");
inline const Rational kMinVolume = Rational::parse("0.94");
}  // namespace headline

// Evaluates a headline bound; constants are the stated decimals, and the
// b-dependent derivations are reported as checks.
inline HeadlineReport headline_bounds(double volume, HeadlineCase which,
                                      double b = log3::kDefaultB) {
  if (!(volume > 0.0)) throw DomainError("volume must be positive");
  if (!(b > 0.0)) throw DomainError("b must be positive");
  using namespace headline;
  HeadlineReport r;
  r.which = which;
  r.volume = volume;
  r.b = b;
  const Rational four = kCorollaryCoefficient + Rational(4, 16);
  const Rational eight = kCorollaryCoefficient + Rational(8, 16);
  auto derived = [&](const Rational& coeff, const Rational& stated, const std::string& tag) {
    r.intermediates.push_back({"coefficient_" + tag, coeff});
    // b is a measured real; the comparison is coeff < stated * b.
    r.checks.push_back({"coefficient_over_b_below_" + stated.str(),
                        coeff.to_double() < stated.to_double() * b});
  };
  auto small_homology = [&]() {
    // dim <= 10 < 11 * 0.94 <= 11 V
    r.checks.push_back({"ten_below_11_times_0.94", Rational(10) < Rational(11) * kMinVolume});
    r.checks.push_back({"eleven_below_constant", Rational(11) < r.constant});
  };
  switch (which) {
    case HeadlineCase::FiveFree:
      r.constant = kFiveFree;
      derived(four, kFiveFree, "rho4");
      r.bound = 1.0 + kFiveFree.to_double() * volume;
      break;
    case HeadlineCase::NineSemifree:
      r.constant = kNineSemifree;
      derived(eight, kNineSemifree, "rho8");
      r.bound = 1.0 + kNineSemifree.to_double() * volume;
      break;
    case HeadlineCase::ClosedHomology: {
      r.constant = kClosed;
      const Rational x = 1 / kClosedVolume + kFiveFree;
      r.intermediates.push_back({"inverse_3.77_plus_157.497", x});
      r.checks.push_back({"inverse_3.77_plus_157.497_below_157.763", x < kClosed});
      derived(four, kFiveFree, "rho4");
      small_homology();
      r.branches = {{"dim_at_most_10", 11.0 * volume}, {"five_free", x.to_double() * volume}};
      r.bound = kClosed.to_double() * volume;
      break;
    }
    case HeadlineCase::CuspedHomology: {
      r.constant = kCusped;
      const Rational x = 1 / kCuspedVolume + kNineSemifree;
      r.intermediates.push_back({"inverse_2.848_plus_157.766", x});
      r.checks.push_back({"inverse_2.848_plus_157.766_below_158.12", x < kCusped});
      derived(eight, kNineSemifree, "rho8");
      small_homology();
      r.branches = {{"dim_at_most_10", 11.0 * volume}, {"nine_semifree", x.to_double() * volume}};
      r.bound = kCusped.to_double() * volume;
      break;
    }
  }
  return r;
}

}  // namespace hypervor
