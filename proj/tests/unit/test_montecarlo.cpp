#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "symon/error.hpp"
#include "symon/montecarlo.hpp"

using namespace symon;

namespace {

GroupContext ctx_of(unsigned g, std::uint64_t n, QParam q = QParam::infinity()) {
  return GroupContext(g, Modulus(n), q);
}

// Common nonzero fixed vector of all matrices, by scanning F_p^dim.
bool brute_common_fixed(const std::vector<ModMatrix>& ms, std::int64_t p) {
  const int dim = static_cast<int>(ms.front().dim());
  std::vector<std::vector<std::vector<std::int64_t>>> fixed;
  for (const auto& m : ms) {
    oracle::Mat om;
    for (auto x : m.entries()) om.push_back(static_cast<std::int64_t>(x % static_cast<Residue>(p)));
    fixed.push_back(oracle::fixed_vectors(om, dim, p));
  }
  for (const auto& v : fixed.front()) {
    bool all = true;
    for (std::size_t k = 1; k < fixed.size() && all; ++k) {
      all = std::find(fixed[k].begin(), fixed[k].end(), v) != fixed[k].end();
    }
    if (all) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("montecarlo") {
  TEST_CASE("sample_sigma: membership and consistent multipliers mod 15") {
    const auto ctx = ctx_of(2, 15, QParam::finite(2));
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const auto sigma = sample_sigma(ctx, 2, 5, i);
      REQUIRE(sigma.e() == 2);
      for (const auto& a : sigma.elements) CHECK(is_member(ctx, a));
    }
    const auto a = sample_sigma(ctx, 3, 9, 9);
    const auto b = sample_sigma(ctx, 3, 9, 9);
    CHECK(a.elements == b.elements);
    CHECK_THROWS_AS(sample_sigma(ctx, 0, 1, 1), DomainError);
  }

  TEST_CASE("sample_sigma reaches every admissible multiplier with finite q") {
    const auto ctx = ctx_of(1, 15, QParam::finite(2));
    std::set<Residue> seen;
    for (std::uint64_t i = 0; i < 400; ++i) seen.insert(*multiplier(ctx, sample_sigma(ctx, 1, 3, i).elements[0]));
    CHECK(seen == std::set<Residue>{1, 2, 4, 8});
  }

  TEST_CASE("event_X basics") {
    const Modulus m(5);
    std::vector<ModMatrix> ids(3, ModMatrix::identity(m, 4));
    CHECK(event_X(ids, 5));
    CHECK_THROWS_AS(event_X(ids, 3), DomainError);
    // diag(2, 3, 4, 4) fixes nothing; pair it with a unipotent element.
    const std::int64_t d[] = {2, 3, 4, 4};
    std::vector<ModMatrix> pair{ModMatrix::diagonal(m, d), ModMatrix::identity(m, 4)};
    CHECK_FALSE(event_X(pair, 5));
    CHECK_FALSE(brute_common_fixed(pair, 5));
  }

  TEST_CASE("event_X agrees with brute force on random pairs") {
    const auto ctx = ctx_of(2, 3);
    int positives = 0;
    for (std::uint64_t i = 0; i < 400; ++i) {
      const auto sigma = sample_sigma(ctx, 2, 31, i);
      const bool x = event_X(sigma, 3);
      CHECK(x == brute_common_fixed(sigma.elements, 3));
      positives += x ? 1 : 0;
    }
    CHECK(positives > 0);
  }

  TEST_CASE("special-set membership implies X for e = 1") {
    const auto set = build_Sq(ctx_of(2, 3, QParam::finite(2)), BStrategy::LexCanonical);
    for (std::size_t i = 0; i < set.keys().size(); ++i) {
      const ModMatrix a = set.element(i);
      const ModMatrix one[] = {a};
      CHECK(event_X(one, 3));
    }
  }

  TEST_CASE("exact mu(X) for g = 1") {
    const auto c3 = ctx_of(1, 3);
    const Rational enumerated = exact_mu_X_enumerated(c3, 3, 2);
    CHECK(enumerated == exact_mu_X_lines(c3, 3, 2));
    for (std::uint64_t p : {3ULL, 5ULL}) {
      const auto ctx = ctx_of(1, p);
      Rational prev = 2;
      for (unsigned e = 1; e <= 3; ++e) {
        const Rational lines = exact_mu_X_lines(ctx, p, e);
        if (e <= 2) CHECK(lines == exact_mu_X_enumerated(ctx, p, e));
        CHECK(lines < prev);
        CHECK(lines <= union_bound_mu_X(ctx, p, e).upper);
        prev = lines;
      }
    }
    CHECK_THROWS_AS(exact_mu_X_enumerated(ctx_of(1, 7), 7, 3, 1000), BudgetExceeded);
    CHECK(exact_mu_X(ctx_of(1, 7), 7, 3, 1000) == exact_mu_X_lines(ctx_of(1, 7), 7, 3));
    CHECK_THROWS_AS(exact_mu_X_lines(ctx_of(2, 3), 3, 2), DomainError);
  }

  TEST_CASE("union bound") {
    const auto b = union_bound_mu_X(ctx_of(2, 3), 3, 2);
    CHECK(b.value() == doctest::Approx(40 / std::sqrt(103680.0)).epsilon(1e-12));
    CHECK(std::abs(b.value() - 0.1242) < 1e-4);
    CHECK(union_bound_mu_X(ctx_of(2, 3), 3, 3).upper < b.lower);
  }

  TEST_CASE("binomial standard error") {
    CHECK(binomial_std_error(0, 10) == 0);
    CHECK(binomial_std_error(50, 100) == doctest::Approx(0.05));
  }

  TEST_CASE("hit frequency near the exact density, independent of threads") {
    const auto ctx = ctx_of(2, 5, QParam::finite(2));
    SimulationOptions o1, o4;
    o4.threads = 4;
    const auto est = estimate_event(ctx, Event::hit(5), 1, 20000, 1234, o1);
    const auto est4 = estimate_event(ctx, Event::hit(5), 1, 20000, 1234, o4);
    CHECK(est.hits == est4.hits);
    REQUIRE(est.exact_value.has_value());
    CHECK(*est.exact_value == Rational(101, 1040));
    CHECK(std::abs(est.estimate - est.exact_value->get_d()) <= 4 * est.std_error);
    CHECK(est.std_error == doctest::Approx(std::sqrt(est.estimate * (1 - est.estimate) / 20000)));
  }

  TEST_CASE("joint hits match the product of marginals") {
    const auto ctx = ctx_of(2, 15, QParam::finite(2));
    const std::uint64_t ells[] = {3, 5};
    const auto rep = independence_experiment(ctx, ells, 20000, 77);
    CHECK(rep.within(4));
    REQUIRE(rep.exact_joint.has_value());
    CHECK(*rep.exact_joint == *rep.singles[0].exact_value * *rep.singles[1].exact_value);
  }

  TEST_CASE("X(3) respects the union bound; g = 1 matches the exact value") {
    const auto est = estimate_event(ctx_of(2, 3), Event::x(3), 2, 20000, 5);
    REQUIRE(est.bound.has_value());
    CHECK(est.estimate <= est.bound->upper.get_d() + 4 * est.std_error);
    const auto est1 = estimate_event(ctx_of(1, 3), Event::x(3), 2, 20000, 5);
    REQUIRE(est1.exact_value.has_value());
    CHECK(std::abs(est1.estimate - est1.exact_value->get_d()) <= 4 * est1.std_error);
  }

  TEST_CASE("Borel-Cantelli regimes") {
    const std::vector<std::uint64_t> ells{3, 5, 7, 11, 13};
    const auto a = borel_cantelli_experiment(2, QParam::finite(2), ells, 1, 5000, 3);
    CHECK(a.regime == BorelCantelliRegime::PartA);
    CHECK(std::abs(a.mean_hits - a.expected_mean) <= 4 * a.mean_std_error);
    std::uint64_t total = 0;
    for (auto h : a.histogram) total += h;
    CHECK(total == 5000);
    CHECK(a.streams_hit_beyond + a.streams_zero_beyond == 5000);

    const auto b = borel_cantelli_experiment(2, QParam::finite(2), ells, 2, 5000, 3);
    CHECK(b.regime == BorelCantelliRegime::PartB);
    CHECK(b.mean_hits <= b.expected_mean + 4 * b.mean_std_error);

    const auto empty = borel_cantelli_experiment(2, QParam::finite(2), {}, 1, 100, 3);
    CHECK(empty.histogram == std::vector<std::uint64_t>{100});
    CHECK(empty.mean_hits == 0);
  }
}
