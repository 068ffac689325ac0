#include "symon/verify.hpp"

#include <algorithm>
#include <map>

#include "symon/analysis.hpp"
#include "symon/arith.hpp"
#include "symon/error.hpp"

namespace symon {

namespace {

std::string str(const BigInt& x) { return x.get_str(); }
std::string str(const Rational& x) { return x.get_str(); }

struct CheckSpec {
  std::optional<std::uint64_t> ell{};
  std::optional<std::uint64_t> n{};
  std::optional<std::string> q{};
  std::optional<Residue> lambda{};
  std::string relation = "==";
};

IdentityCheck check(std::string identity, unsigned g, CheckSpec spec) {
  IdentityCheck c;
  c.identity = std::move(identity);
  c.g = g;
  c.ell = spec.ell;
  c.n = spec.n;
  c.q = std::move(spec.q);
  c.lambda = spec.lambda;
  c.relation = std::move(spec.relation);
  return c;
}

long double candidates(std::uint64_t prime, std::size_t dim) {
  long double c = 1;
  for (std::size_t i = 0; i < dim * dim; ++i) c *= static_cast<long double>(prime);
  return c;
}

void validate(const VerifyGrid& grid) {
  for (unsigned g : grid.genera) {
    if (g < 2) throw DomainError("verify-counts needs g >= 2 (special sets start at g = 2)");
  }
  for (std::uint64_t p : grid.ells) {
    if (p == 2) {
      throw DomainError(
          "l = 2 is not admissible: beta(l, g) carries the factor (l - 2), so every special set is "
          "empty");
    }
    if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  }
}

}  // namespace

std::size_t VerifyReport::failed() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.ok ? 0 : 1;
  return n;
}

VerifyReport verify_counts(const VerifyGrid& grid) {
  validate(grid);
  VerifyReport report;
  report.grid = grid;
  auto& out = report.checks;

  auto push = [&](IdentityCheck c, const std::string& expected, const std::string& actual) {
    c.expected = expected;
    c.actual = actual;
    c.ok = c.relation == ">=" ? BigInt(actual) >= BigInt(expected) : expected == actual;
    out.push_back(std::move(c));
  };

  for (unsigned g : grid.genera) {
    // |S_lambda(l)| per (l, lambda), materialized where possible.
    std::map<std::pair<std::uint64_t, Residue>, BigInt> s_count;

    for (std::uint64_t p : grid.ells) {
      const GroupContext full(g, Modulus(p), QParam::infinity());

      for (unsigned h = 1; h <= g; ++h) {
        IdentityCheck c = check("sp_order_recursion", h, {.ell = p});
        const BigInt rhs = (big_pow(p, 2 * h) - 1) * big_pow(p, 2 * h - 1) * sp_order(h - 1, p);
        push(c, str(rhs), str(sp_order(h, p)));
      }

      if (candidates(p, full.dim()) <= static_cast<long double>(grid.budget)) {
        std::uint64_t count = 0;
        for_each_member(full, std::nullopt, [&count](const ModMatrix&) { return ++count, true; },
                        grid.budget);
        IdentityCheck c = check("gsp_order_enumeration", g, {.ell = p, .q = "inf"});
        push(c, str(gsp_q_order(full)), std::to_string(count));
      }

      const BigInt needed = beta(p, g - 1) * sp_order(g - 2, p);
      const bool materialize = g == 2 && p <= grid.max_materialize_prime;
      BuildOptions opts;
      opts.threads = grid.threads;
      opts.budget = grid.budget;
      opts.max_materialize_prime = grid.max_materialize_prime;
      const BigInt b_size = strategy_b_size(p, g, grid.strategy);

      for (Residue lambda = 1; lambda < p; ++lambda) {
        IdentityCheck avail = check("b_availability", g, {.ell = p, .lambda = lambda, .relation = ">="});
        push(avail, str(needed), str(count_no_eigenvalue_one(p, g - 1, lambda, grid.budget)));

        if (!materialize) {
          s_count[{p, lambda}] = s_cardinality(p, g, b_size);
          continue;
        }
        BigInt s0_expected = s0_cardinality(p, g, b_size);
        if (grid.tamper) s0_expected += 1;
        {
          const SpecialSet s0 = build_S0(full, lambda, grid.strategy, opts);
          IdentityCheck c = check("s0_cardinality", g, {.ell = p, .lambda = lambda});
          push(c, str(s0_expected), str(s0.cardinality()));
        }
        const SpecialSet s = build_S(full, lambda, grid.strategy, opts);
        IdentityCheck c = check("s_cardinality", g, {.ell = p, .lambda = lambda});
        push(c, str(s_cardinality(p, g, b_size)), str(s.cardinality()));
        s_count[{p, lambda}] = s.cardinality();
      }

      for (const QParam& q : grid.qs) {
        if (!q.is_infinite() && q.value() % p == 0) continue;
        const GroupContext ctx(g, Modulus(p), q);
        const auto lambdas = ctx.allowed_multipliers();
        BigInt total = 0;
        for (Residue l : lambdas) total += s_count.at({p, l});
        IdentityCheck u = check("sq_union_cardinality", g, {.ell = p, .q = q.to_string()});
        push(u, str(BigInt(big(lambdas.size()) * s_lambda_cardinality(p, g, grid.strategy))), str(total));

        if (grid.strategy == BStrategy::LexCanonical) {
          IdentityCheck d = check("density_ratio", g, {.ell = p, .q = q.to_string()});
          push(d, str(density_ratio(g, p, q)), str(make_rational(total, gsp_q_order(ctx))));
          IdentityCheck f = check("fiber_uniformity", g, {.ell = p, .q = q.to_string()});
          push(f, str(density_ratio(g, p, q)),
               str(make_rational(s_count.at({p, lambdas.front()}), sp_order(g, p))));
        }
      }
    }

    for (const QParam& q : grid.qs) {
      std::vector<std::uint64_t> primes;
      std::uint64_t n = 1;
      for (std::uint64_t p : grid.ells) {
        if (!q.is_infinite() && q.value() % p == 0) continue;
        if (std::find(primes.begin(), primes.end(), p) != primes.end()) continue;
        if (n * p >= (std::uint64_t{1} << 32U)) break;
        primes.push_back(p);
        n *= p;
      }
      if (primes.size() < 2) continue;
      const GroupContext ctx(g, Modulus(n), q);
      BigInt independent = 0;
      if (q.is_infinite()) {
        independent = 1;
        for (std::uint64_t p : primes) {
          BigInt sum = 0;
          for (Residue l = 1; l < p; ++l) sum += s_count.at({p, l});
          independent *= sum;
        }
      } else {
        for (std::uint64_t i = 1; i <= ctx.q_order(); ++i) {
          BigInt term = 1;
          for (std::uint64_t p : primes) term *= s_count.at({p, pow_mod(q.value(), i, p)});
          independent += term;
        }
      }
      const BigInt counted = count_Sq_composite(g, ctx.modulus(), q, grid.strategy);
      IdentityCheck c = check("composite_count", g, {.n = n, .q = q.to_string()});
      push(c, str(independent), str(counted));

      if (grid.strategy == BStrategy::LexCanonical) {
        Rational product = 1;
        for (std::uint64_t p : primes) product *= density_ratio(g, p, q);
        IdentityCheck d = check("composite_density_product", g, {.n = n, .q = q.to_string()});
        push(d, str(product), str(make_rational(counted, gsp_q_order(ctx))));
      }
    }
  }
  return report;
}

}  // namespace symon
