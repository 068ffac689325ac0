#pragma once

// Per-prime series: the divergent density series of the special sets and the
// convergent projective union bound on common fixed vectors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symon/exact.hpp"
#include "symon/sympgroup.hpp"

namespace symon {

/// Rigorous enclosure lower <= x <= upper of a real number.
struct RealBound {
  Rational lower;
  Rational upper;

  double value() const { return (lower.get_d() + upper.get_d()) / 2; }
  double relative_width() const;
};

inline constexpr double kRootPrecision = 1e-12;

/// Encloses base^(-num/den) with relative width below kRootPrecision, using the
/// integer den-th root of base^num scaled by a power of ten.
RealBound inverse_fractional_power(const BigInt& base, unsigned num, unsigned den);

/// (l^2g - 1)/(l - 1) * |G|^(-e/2g): one term per line of the projective space.
RealBound projective_union_bound(unsigned g, unsigned e, std::uint64_t prime,
                                 const BigInt& group_order);

/// |S^(q)(l)| / |GSp^(q)_2g(F_l)| from closed forms (canonical B selection).
Rational density_ratio(unsigned g, std::uint64_t prime, QParam q);

/// (l^2g - 1)/(l - 1) * s_l^(-e/2g) with s_l = |Sp_2g(F_l)|.
RealBound part_b_term(unsigned g, unsigned e, std::uint64_t prime);

enum class SeriesKind { PartADensity, PartBBound };

struct SeriesRow {
  std::uint64_t ell = 0;
  Rational term;      // exact (part a) or rounded-up upper bound (part b)
  Rational partial;   // prefix sum of `term`
  double diagnostic = 0;  // term * l (part a) or term * l^(e(g+1/2) - (2g-1)) (part b)
};

struct SeriesReport {
  SeriesKind kind = SeriesKind::PartADensity;
  unsigned g = 0;
  unsigned e = 0;                 // part b only
  QParam q = QParam::infinity();  // part a only
  std::uint64_t ell_max = 0;
  std::vector<SeriesRow> rows;
  // Part b: bound on the sum over primes beyond ell_max, and the decay exponent.
  std::optional<double> tail_bound;
  double decay_exponent = 0;
};

SeriesReport part_a_series(unsigned g, QParam q, std::uint64_t ell_max, unsigned threads = 1);
SeriesReport part_b_series(unsigned g, unsigned e, std::uint64_t ell_max, unsigned threads = 1);

/// e(g + 1/2) - (2g - 1): the terms decay like l^-exponent.
double part_b_decay_exponent(unsigned g, unsigned e);

}  // namespace symon
