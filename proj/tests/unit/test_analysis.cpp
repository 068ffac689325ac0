#include <doctest.h>

#include <cmath>

#include "symon/analysis.hpp"
#include "symon/arith.hpp"
#include "symon/error.hpp"
#include "symon/specialsets.hpp"

using namespace symon;

namespace {

BigInt ipow(std::uint64_t b, unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= static_cast<unsigned long>(b);
  return r;
}

BigInt sp_naive(unsigned g, std::uint64_t p) {
  BigInt r = ipow(p, g * g);
  for (unsigned i = 1; i <= g; ++i) r *= ipow(p, 2 * i) - 1;
  return r;
}

// Density ratio as an unsimplified product: fibers, conjugates, B and the group order.
Rational unsimplified_ratio(unsigned g, std::uint64_t l) {
  const BigInt beta_num = ipow(l, 2 * g - 3) * (ipow(l, 2 * g - 2) - 1) * (l - 2);
  const BigInt beta = beta_num / (l - 1);
  const BigInt sp = sp_naive(g - 2, l);
  const BigInt num = (ipow(l, 2 * g - 2) * (l - 1) + 1) * ipow(l, 2 * g - 2) * (l - 1) * beta * sp;
  const BigInt den = (ipow(l, 2 * g) - 1) * ipow(l, 2 * g - 1) * (ipow(l, 2 * g - 2) - 1) *
                     ipow(l, 2 * g - 3) * sp;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational frac(const BigInt& a, const BigInt& b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

double rational_d(const Rational& r) { return r.get_d(); }

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("density ratio examples") {
    CHECK(density_ratio(2, 5, QParam::finite(2)) == frac(909000, 9360000));
    CHECK(density_ratio(2, 5, QParam::infinity()) == frac(909000, 9360000));
    CHECK(density_ratio(2, 3, QParam::finite(2)) == frac(4104, 51840));
    CHECK(std::abs(rational_d(density_ratio(2, 5, QParam::finite(2))) - 0.097115) < 1e-6);
    CHECK_THROWS_AS(density_ratio(2, 2, QParam::infinity()), DomainError);
    CHECK_THROWS_AS(density_ratio(1, 5, QParam::infinity()), DomainError);
  }

  TEST_CASE("density ratio equals the unsimplified product") {
    for (unsigned g : {2U, 3U, 4U}) {
      for (std::uint64_t p : {3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 101ULL}) {
        CHECK(density_ratio(g, p, QParam::infinity()) == unsimplified_ratio(g, p));
      }
    }
  }

  TEST_CASE("density ratio equals materialized counts") {
    for (std::uint64_t p : {3ULL, 5ULL}) {
      for (const QParam q : {QParam::finite(2), QParam::finite(4), QParam::infinity()}) {
        const GroupContext ctx(2, Modulus(p), q);
        const auto set = build_Sq(ctx, BStrategy::LexCanonical);
        REQUIRE(set.materialized());
        CHECK(density_ratio(2, p, q) == frac(set.cardinality(), gsp_q_order(ctx)));
      }
    }
  }

  TEST_CASE("inverse fractional power encloses the true value") {
    const auto half = inverse_fractional_power(4, 1, 2);
    CHECK(half.lower <= Rational(1, 2));
    CHECK(half.upper >= Rational(1, 2));
    CHECK(half.relative_width() < kRootPrecision);
    const auto b = inverse_fractional_power(9360000, 2, 4);
    const double truth = 1.0 / std::sqrt(9360000.0);
    CHECK(b.lower.get_d() <= truth * (1 + 1e-15));
    CHECK(b.upper.get_d() >= truth * (1 - 1e-15));
    CHECK(b.relative_width() < kRootPrecision);
  }

  TEST_CASE("part-b term examples") {
    CHECK(std::abs(part_b_term(2, 2, 5).value() - 156.0 / std::sqrt(9360000.0)) < 1e-12);
    // exponent e/2g = 1 at g = 1, so the group order enters to the first power
    CHECK(std::abs(part_b_term(1, 2, 3).value() - 4.0 / 24.0) < 1e-12);
    CHECK(part_b_decay_exponent(2, 2) == doctest::Approx(2.0));
    for (std::uint64_t p : {5ULL, 7ULL, 101ULL}) {
      CHECK(part_b_term(2, 3, p).upper < part_b_term(2, 2, p).lower);
    }
  }

  TEST_CASE("part-a series") {
    const auto r = part_a_series(2, QParam::finite(2), 2000);
    REQUIRE(!r.rows.empty());
    CHECK(r.rows.front().ell == 3);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      CHECK(r.rows[i].partial > r.rows[i - 1].partial);
      CHECK(r.rows[i].partial == r.rows[i - 1].partial + r.rows[i].term);
    }
    const auto r3 = part_a_series(2, QParam::finite(9), 20);
    for (const auto& row : r3.rows) CHECK(row.ell != 3);
    CHECK_THROWS_AS(part_a_series(1, QParam::finite(2), 100), DomainError);
  }

  TEST_CASE("part-a diagnostics and divergence signature") {
    const auto r = part_a_series(2, QParam::finite(2), 10000);
    double prev = 0;
    Rational at_1000 = 0;
    for (const auto& row : r.rows) {
      if (row.ell <= 1000) at_1000 = row.partial;
      if (row.ell < 100) continue;
      CHECK(row.diagnostic > 0);
      CHECK(row.diagnostic < 1);
      CHECK(row.diagnostic > prev);
      prev = row.diagnostic;
    }
    Rational harmonic = 0;
    for (std::uint64_t p : primes_in_range(1001, 10000)) harmonic += Rational(1, 2 * p);
    CHECK(r.rows.back().partial - at_1000 > harmonic);
  }

  TEST_CASE("part-b series") {
    const auto r = part_b_series(2, 2, 10000);
    Rational s100 = 0, s1000 = 0;
    for (const auto& row : r.rows) {
      if (row.ell <= 100) s100 = row.partial;
      if (row.ell <= 1000) s1000 = row.partial;
      CHECK(row.term >= part_b_term(2, 2, row.ell).upper);
      if (row.ell >= 5) CHECK(row.term <= Rational(2, row.ell * row.ell));
    }
    const Rational s10000 = r.rows.back().partial;
    CHECK(s10000 - s1000 < s1000 - s100);
    REQUIRE(r.tail_bound.has_value());
    CHECK(*r.tail_bound > 0);
    CHECK(*r.tail_bound < 1e-3);
    CHECK_THROWS_AS(part_b_series(2, 1, 100), DomainError);
  }

  TEST_CASE("part-b asymptotic window") {
    for (auto [g, e] : {std::pair{2U, 2U}, {2U, 3U}, {3U, 2U}}) {
      const auto r = part_b_series(g, e, 10000);
      for (const auto& row : r.rows) {
        if (row.ell < 50) continue;
        CHECK(row.diagnostic > 0.5);
        CHECK(row.diagnostic < 1.5);
      }
    }
  }

  TEST_CASE("series output does not depend on thread count") {
    const auto a1 = part_a_series(2, QParam::infinity(), 3000, 1);
    const auto a4 = part_a_series(2, QParam::infinity(), 3000, 4);
    REQUIRE(a1.rows.size() == a4.rows.size());
    for (std::size_t i = 0; i < a1.rows.size(); ++i) CHECK(a1.rows[i].partial == a4.rows[i].partial);
    const auto b1 = part_b_series(2, 2, 3000, 1);
    const auto b8 = part_b_series(2, 2, 3000, 8);
    for (std::size_t i = 0; i < b1.rows.size(); ++i) CHECK(b1.rows[i].term == b8.rows[i].term);
  }
}
