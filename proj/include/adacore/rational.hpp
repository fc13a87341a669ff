#pragma once

// Keep-ratio to rational-rate selection over the Farey sequence of order
// d_max (fractions in [0, 1] with denominator <= d_max).
//
// The bracketing neighbours of a target are found by Stern-Brocot descent;
// each run of same-direction steps is one continued-fraction partial
// quotient, located by binary search so the walk is O(log^2 d_max).
// Comparisons against the target are exact.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>

#include "adacore/errors.hpp"
#include "adacore/types.hpp"

namespace adacore::rational {

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Neighbours in the order-d_max Farey sequence: lower <= target <= upper,
/// equal when the target itself belongs to the sequence.
struct FareyBracket {
  Fraction lower;
  Fraction upper;
  bool exact = false;
};

namespace detail {

// cmp(p, q) returns the sign of p/q - target. Requires 0 < target < 1 in the
// sense cmp(0,1) < 0 and cmp(1,1) > 0.
template <typename Cmp>
FareyBracket descend(Cmp cmp, std::uint64_t max_den) {
  Fraction lo{0, 1}, hi{1, 1};
  while (lo.den + hi.den <= max_den) {
    const Fraction mid{lo.num + hi.num, lo.den + hi.den};
    const int s = cmp(mid.num, mid.den);
    if (s == 0) return {mid, mid, true};
    if (s < 0) {
      // Advance lo by k copies of hi while staying below the target.
      const std::uint64_t kmax = (max_den - lo.den) / hi.den;
      std::uint64_t a = 1, b = kmax;
      while (a < b) {
        const std::uint64_t m = a + (b - a + 1) / 2;
        if (cmp(lo.num + m * hi.num, lo.den + m * hi.den) < 0) a = m; else b = m - 1;
      }
      lo = {lo.num + a * hi.num, lo.den + a * hi.den};
      if (a < kmax) {
        const Fraction next{lo.num + hi.num, lo.den + hi.den};
        if (cmp(next.num, next.den) == 0) return {next, next, true};
      }
    } else {
      const std::uint64_t kmax = (max_den - hi.den) / lo.den;
      std::uint64_t a = 1, b = kmax;
      while (a < b) {
        const std::uint64_t m = a + (b - a + 1) / 2;
        if (cmp(hi.num + m * lo.num, hi.den + m * lo.den) > 0) a = m; else b = m - 1;
      }
      hi = {hi.num + a * lo.num, hi.den + a * lo.den};
      if (a < kmax) {
        const Fraction next{hi.num + lo.num, hi.den + lo.den};
        if (cmp(next.num, next.den) == 0) return {next, next, true};
      }
    }
  }
  return {lo, hi, false};
}

inline int sign(long double v) { return (v > 0) - (v < 0); }

}  // namespace detail

/// Farey neighbours of a real target in [0, 1].
inline FareyBracket farey_neighbors(double target, std::uint64_t max_den) {
  if (!(target >= 0.0 && target <= 1.0)) throw ParameterError("target must lie in [0, 1]");
  if (max_den < 1) throw ParameterError("d_max must be >= 1");
  if (target == 0.0) return {{0, 1}, {0, 1}, true};
  if (target == 1.0) return {{1, 1}, {1, 1}, true};
  // fma rounds once, so the sign of p - target*q is exact.
  return detail::descend(
      [target](std::uint64_t p, std::uint64_t q) {
        return detail::sign(std::fma(-target, static_cast<double>(q), static_cast<double>(p)));
      },
      max_den);
}

/// Largest fraction <= a/b and smallest fraction > a/b, for 0 <= a/b < 1.
struct StrictBracket {
  Fraction at_most;
  Fraction above;
};

inline StrictBracket bracket_ratio(std::uint64_t a, std::uint64_t b, std::uint64_t max_den) {
  if (b == 0 || a >= b) throw ParameterError("ratio must lie in [0, 1)");
  if (a == 0) return {{0, 1}, {1, max_den}};
  // Treat equality as "below": the descent then separates a/b from its
  // strict successor.
  __extension__ using wide = unsigned __int128;
  const auto r = detail::descend(
      [a, b](std::uint64_t p, std::uint64_t q) {
        const auto lhs = static_cast<wide>(p) * b;
        const auto rhs = static_cast<wide>(a) * q;
        return lhs > rhs ? 1 : -1;
      },
      max_den);
  return {r.lower, r.upper};
}

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

/// Best u/d with 1 <= d <= d_max, u >= 1, minimizing |u/d - r|; ties go to the
/// smaller denominator.
inline RationalRate rational_approx(double r, std::uint32_t max_den) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("keep ratio must lie in (0, 1]");
  if (max_den < 1) throw ParameterError("d_max must be >= 1");
  const auto b = farey_neighbors(r, max_den);
  if (b.exact) return RationalRate::make(static_cast<std::uint32_t>(b.lower.num),
                                         static_cast<std::uint32_t>(b.lower.den));
  Fraction best = b.upper;
  if (b.lower.num >= 1) {
    const double dl = std::abs(b.lower.value() - r);
    const double du = std::abs(b.upper.value() - r);
    if (dl < du || (dl == du && b.lower.den < b.upper.den)) best = b.lower;
  }
  return RationalRate::make(static_cast<std::uint32_t>(best.num), static_cast<std::uint32_t>(best.den));
}

/// Rate minimizing | ceil(N*u/d) + protected_count - r*N | over the order-d_max
/// Farey sequence. Ties go to the smaller kept count, then to the smaller
/// ratio.
///
/// The kept count ceil(N*q) is monotone in q, so the optimum is either the
/// largest achievable count at or below the adjusted target r*N - |P| or the
/// smallest one at or above it. Each is reached from a Farey neighbour of
/// that target expressed as a ratio over N.
inline RationalRate refine_farey(double r, std::uint32_t length, std::uint32_t protected_count,
                                 std::uint32_t max_den) {
  if (!(r > 0.0 && r <= 1.0)) throw ParameterError("keep ratio must lie in (0, 1]");
  if (max_den < 1) throw ParameterError("d_max must be >= 1");
  if (length < 1) throw LengthError("segment length must be >= 1");
  const std::uint64_t n = length;
  const double rn = r * static_cast<double>(length);
  const double target = rn - static_cast<double>(protected_count);

  struct Candidate {
    Fraction rate;
    std::uint64_t kept;
    double objective;
  };
  auto evaluate = [&](Fraction f) {
    const std::uint64_t kept = ceil_div(n * f.num, f.den);
    return Candidate{f, kept, std::abs(static_cast<double>(kept + protected_count) - rn)};
  };
  // Smallest fraction whose kept count is at least `k` (k >= 1).
  auto smallest_reaching = [&](std::uint64_t k) -> std::optional<Fraction> {
    if (k > n) return std::nullopt;
    return bracket_ratio(k - 1, n, max_den).above;
  };

  std::optional<Candidate> best;
  auto consider = [&](const Candidate& c) {
    if (!best || c.objective < best->objective ||
        (c.objective == best->objective &&
         (c.kept < best->kept || (c.kept == best->kept && c.rate.value() < best->rate.value())))) {
      best = c;
    }
  };

  // Upper side.
  const double up_target = std::ceil(target);
  const std::uint64_t k_up = up_target <= 1.0 ? 1 : static_cast<std::uint64_t>(up_target);
  if (auto f = smallest_reaching(k_up)) consider(evaluate(*f));

  // Lower side.
  const double down_target = std::floor(target);
  if (down_target >= 1.0) {
    const auto k_down = std::min<std::uint64_t>(static_cast<std::uint64_t>(down_target), n);
    const Fraction q = k_down == n ? Fraction{1, 1} : bracket_ratio(k_down, n, max_den).at_most;
    if (q.num >= 1) {
      const std::uint64_t kept = ceil_div(n * q.num, q.den);
      if (auto f = smallest_reaching(kept)) consider(evaluate(*f));
    }
  }

  if (!best) return RationalRate::make(1, max_den);
  return RationalRate::make(static_cast<std::uint32_t>(best->rate.num),
                            static_cast<std::uint32_t>(best->rate.den));
}

}  // namespace adacore::rational
