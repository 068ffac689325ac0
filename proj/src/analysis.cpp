#include "symon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "symon/arith.hpp"
#include "symon/error.hpp"
#include "symon/specialsets.hpp"

namespace symon {

namespace {

template <typename Fn>
void parallel_indices(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1U, threads);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers, count] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

BigInt pow10(unsigned long k) { return big_pow(10, k); }

BigInt ceil_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

double RealBound::relative_width() const {
  const Rational mid = (lower + upper) / 2;
  if (mid == 0) return 0;
  return Rational((upper - lower) / mid).get_d();
}

RealBound inverse_fractional_power(const BigInt& base, unsigned num, unsigned den) {
  if (base <= 0 || den == 0) throw DomainError("inverse_fractional_power: invalid arguments");
  BigInt x;
  mpz_pow_ui(x.get_mpz_t(), base.get_mpz_t(), num);
  // Scale so the truncated root carries at least 16 significant digits.
  const double digits = static_cast<double>(mpz_sizeinbase(x.get_mpz_t(), 10)) / den;
  const long scale = std::max(0L, 17L - static_cast<long>(std::floor(digits)));
  const BigInt scaled = x * pow10(static_cast<unsigned long>(scale) * den);
  BigInt root;
  mpz_root(root.get_mpz_t(), scaled.get_mpz_t(), den);
  // root <= x^(1/den) 10^scale < root + 1
  const BigInt ten = pow10(static_cast<unsigned long>(scale));
  return {make_rational(ten, root + 1), make_rational(ten, root)};
}

RealBound projective_union_bound(unsigned g, unsigned e, std::uint64_t prime,
                                 const BigInt& group_order) {
  const BigInt lines_num = big_pow(prime, 2UL * g) - 1;
  const Rational lines = make_rational(lines_num, big(prime) - 1);
  const RealBound power = inverse_fractional_power(group_order, e, 2 * g);
  return {lines * power.lower, lines * power.upper};
}

Rational density_ratio(unsigned g, std::uint64_t prime, QParam q) {
  if (g < 2) throw DomainError("density ratio needs g >= 2");
  if (prime == 2) {
    throw DomainError("density ratio undefined at l = 2: beta(l, g) carries the factor (l - 2)");
  }
  const GroupContext ctx(g, Modulus(prime), q);
  const BigInt fibers = q.is_infinite() ? big(prime - 1) : big(ord_mod(q.value(), prime));
  const BigInt set_size = fibers * s_lambda_cardinality(prime, g, BStrategy::LexCanonical);
  return make_rational(set_size, gsp_q_order(ctx));
}

RealBound part_b_term(unsigned g, unsigned e, std::uint64_t prime) {
  return projective_union_bound(g, e, prime, sp_order(g, prime));
}

double part_b_decay_exponent(unsigned g, unsigned e) {
  return e * (g + 0.5) - (2.0 * g - 1.0);
}

SeriesReport part_a_series(unsigned g, QParam q, std::uint64_t ell_max, unsigned threads) {
  if (g < 2) throw DomainError("part-a series needs g >= 2");
  SeriesReport report;
  report.kind = SeriesKind::PartADensity;
  report.g = g;
  report.q = q;
  report.ell_max = ell_max;
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p : primes_in_range(3, ell_max)) {
    if (!q.is_infinite() && q.value() % p == 0) continue;
    primes.push_back(p);
  }
  report.rows.resize(primes.size());
  parallel_indices(primes.size(), threads, [&](std::size_t i) {
    auto& row = report.rows[i];
    row.ell = primes[i];
    row.term = density_ratio(g, primes[i], q);
    row.diagnostic = Rational(row.term * big(primes[i])).get_d();
  });
  Rational acc = 0;
  for (auto& row : report.rows) {
    acc += row.term;
    row.partial = acc;
  }
  return report;
}

SeriesReport part_b_series(unsigned g, unsigned e, std::uint64_t ell_max, unsigned threads) {
  if (g < 1) throw DomainError("part-b series needs g >= 1");
  if (e < 2) throw DomainError("part-b series needs e >= 2");
  SeriesReport report;
  report.kind = SeriesKind::PartBBound;
  report.g = g;
  report.e = e;
  report.ell_max = ell_max;
  report.decay_exponent = part_b_decay_exponent(g, e);
  const auto primes = primes_in_range(2, ell_max);
  std::vector<RealBound> bounds(primes.size());
  parallel_indices(primes.size(), threads,
                   [&](std::size_t i) { bounds[i] = part_b_term(g, e, primes[i]); });

  // Common decimal denominator so prefix sums stay small: round every upper
  // bound up to 10^-digits with digits covering 16 significant figures of the
  // smallest term.
  double smallest = 1;
  for (const auto& b : bounds) smallest = std::min(smallest, b.upper.get_d());
  const auto digits = static_cast<unsigned long>(
      std::max(16.0, std::ceil(-std::log10(std::max(smallest, 1e-300))) + 16.0));
  const BigInt den = pow10(digits);
  report.rows.resize(primes.size());
  Rational acc = 0;
  double max_diag = 0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    auto& row = report.rows[i];
    row.ell = primes[i];
    const BigInt num =
        ceil_div(bounds[i].upper.get_num() * den, BigInt(bounds[i].upper.get_den()));
    row.term = make_rational(num, den);
    acc += row.term;
    row.partial = acc;
    row.diagnostic =
        bounds[i].value() * std::pow(static_cast<double>(primes[i]), report.decay_exponent);
    max_diag = std::max(max_diag, row.diagnostic);
  }
  if (!primes.empty() && report.decay_exponent > 1) {
    const double tail_from = static_cast<double>(ell_max);
    report.tail_bound = max_diag * std::pow(tail_from, 1.0 - report.decay_exponent) /
                        (report.decay_exponent - 1.0);
  }
  return report;
}

}  // namespace symon
