#include "symon/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "symon/arith.hpp"
#include "symon/error.hpp"

namespace symon {

namespace {

constexpr std::uint64_t lane_for(std::size_t element, std::uint64_t prime) {
  return (static_cast<std::uint64_t>(element + 1) << 32U) | prime;
}

// Sums fn(begin, end) over contiguous blocks of [0, count) on `threads` workers.
template <typename T, typename Fn>
std::vector<T> map_blocks(std::uint64_t count, unsigned threads, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, count)));
  std::vector<T> results(workers);
  const std::uint64_t chunk = (count + workers - 1) / std::max(1U, workers);
  if (workers == 1) {
    results[0] = fn(std::uint64_t{0}, count);
    return results;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min(count, w * chunk);
    const std::uint64_t end = std::min(count, begin + chunk);
    pool.emplace_back([&results, &fn, w, begin, end] { results[w] = fn(begin, end); });
  }
  for (auto& t : pool) t.join();
  return results;
}

// Per-prime reductions of one draw, without lifting to Z/n.
struct PrimeDraws {
  // draws[j][k]: element j reduced mod primes[k]
  std::vector<std::vector<ModMatrix>> draws;
};

PrimeDraws sample_per_prime(const GroupContext& ctx, unsigned e, std::uint64_t seed,
                            std::uint64_t index) {
  const auto primes = ctx.modulus().primes();
  const std::uint64_t n = ctx.modulus().value();
  CounterStream exponents(seed, index, 0);
  PrimeDraws out;
  out.draws.resize(e);
  for (unsigned j = 0; j < e; ++j) {
    std::optional<Residue> global;
    if (!ctx.q().is_infinite()) {
      const std::uint64_t i = 1 + exponents.below(ctx.q_order());
      global = pow_mod(ctx.q().value(), i, n);
    }
    for (std::uint64_t p : primes) {
      CounterStream stream(seed, index, lane_for(j, p));
      const Residue lambda = global ? *global % p : 1 + stream.below(p - 1);
      const GroupContext local(ctx.g(), Modulus(p), QParam::infinity());
      out.draws[j].push_back(sample_uniform(local, lambda, stream));
    }
  }
  return out;
}

std::size_t prime_slot(const GroupContext& ctx, std::uint64_t prime) {
  const auto primes = ctx.modulus().primes();
  const auto it = std::find(primes.begin(), primes.end(), prime);
  if (it == primes.end()) {
    throw DomainError(std::to_string(prime) + " does not divide n = " +
                      std::to_string(ctx.modulus().value()));
  }
  return static_cast<std::size_t>(it - primes.begin());
}

bool x_event_local(const std::vector<std::vector<ModMatrix>>& draws, std::size_t slot,
                   std::uint64_t p) {
  const std::size_t d = draws.front()[slot].dim();
  std::vector<Residue> stacked;
  stacked.reserve(draws.size() * d * d);
  for (const auto& element : draws) {
    const ModMatrix& a = element[slot];
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        stacked.push_back((a(r, c) % p + (r == c ? p - 1 : 0)) % p);
      }
    }
  }
  return field::rank(std::move(stacked), draws.size() * d, d, p) < d;
}

}  // namespace

// ---------------------------------------------------------------- sampling

SigmaTuple sample_sigma(const GroupContext& ctx, unsigned e, std::uint64_t seed,
                        std::uint64_t index) {
  if (e == 0) throw DomainError("sample_sigma: e must be positive");
  const auto primes = ctx.modulus().primes();
  PrimeDraws draws = sample_per_prime(ctx, e, seed, index);
  SigmaTuple out;
  out.seed = seed;
  out.index = index;
  for (auto& element : draws.draws) {
    if (primes.size() == 1) {
      out.elements.push_back(std::move(element.front()));
      continue;
    }
    std::vector<std::pair<ModMatrix, std::uint64_t>> parts;
    for (std::size_t k = 0; k < primes.size(); ++k) parts.emplace_back(std::move(element[k]), primes[k]);
    out.elements.push_back(crt_lift(parts));
  }
  return out;
}

// ---------------------------------------------------------------- X_l

bool event_X(std::span<const ModMatrix> sigma, std::uint64_t prime) {
  if (sigma.empty()) throw DomainError("event_X: empty tuple");
  const std::size_t d = sigma.front().dim();
  std::vector<Residue> stacked;
  stacked.reserve(sigma.size() * d * d);
  for (const auto& a : sigma) {
    if (!a.modulus().divisible_by(prime) || !is_prime(prime)) {
      throw DomainError("event_X: " + std::to_string(prime) + " does not divide the modulus");
    }
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        stacked.push_back((a(r, c) % prime + (r == c ? prime - 1 : 0)) % prime);
      }
    }
  }
  return field::rank(std::move(stacked), sigma.size() * d, d, prime) < d;
}

Rational exact_mu_X_enumerated(const GroupContext& ctx, std::uint64_t prime, unsigned e,
                               std::uint64_t budget) {
  const GroupContext local = ctx.modulus().is_prime() ? ctx : ctx.at_prime(prime);
  if (local.g() != 1) throw DomainError("exact mu(X) is only available for g = 1");
  if (e == 0) throw DomainError("exact mu(X): e must be positive");
  const auto group = enumerate_group(local, std::nullopt, budget);
  const long double tuples = std::pow(static_cast<long double>(group.size()), e);
  if (tuples > static_cast<long double>(budget)) throw BudgetExceeded(tuples, budget);

  std::vector<std::size_t> odometer(e, 0);
  std::vector<ModMatrix> tuple(e, group.front());
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  while (true) {
    for (unsigned j = 0; j < e; ++j) tuple[j] = group[odometer[j]];
    if (event_X(tuple, prime)) ++hits;
    ++total;
    unsigned pos = 0;
    while (pos < e && ++odometer[pos] == group.size()) odometer[pos++] = 0;
    if (pos == e) break;
  }
  return make_rational(big(hits), big(total));
}

Rational exact_mu_X_lines(const GroupContext& ctx, std::uint64_t prime, unsigned e) {
  const GroupContext local = ctx.modulus().is_prime() ? ctx : ctx.at_prime(prime);
  if (local.g() != 1) throw DomainError("exact mu(X) is only available for g = 1");
  const auto group = enumerate_group(local, std::nullopt);
  const Modulus mod(prime);
  // Lines of F_l^2: spanned by (1, t) for t in F_l, and by (0, 1).
  std::vector<ModVector> lines;
  for (Residue t = 0; t < prime; ++t) lines.emplace_back(mod, std::vector<Residue>{1, t});
  lines.emplace_back(mod, std::vector<Residue>{0, 1});
  BigInt covered = 0;
  for (const auto& v : lines) {
    std::uint64_t fixing = 0;
    for (const auto& a : group) {
      if (a.apply(v) == v) ++fixing;
    }
    BigInt term;
    mpz_ui_pow_ui(term.get_mpz_t(), fixing, e);
    covered += term;
  }
  // The all-identity tuple fixes every one of the l + 1 lines.
  covered -= big(prime);
  BigInt total;
  mpz_ui_pow_ui(total.get_mpz_t(), group.size(), e);
  return make_rational(covered, total);
}

Rational exact_mu_X(const GroupContext& ctx, std::uint64_t prime, unsigned e,
                    std::uint64_t budget) {
  try {
    return exact_mu_X_enumerated(ctx, prime, e, budget);
  } catch (const BudgetExceeded&) {
    return exact_mu_X_lines(ctx, prime, e);
  }
}

RealBound union_bound_mu_X(const GroupContext& ctx, std::uint64_t prime, unsigned e) {
  if (e == 0) throw DomainError("union bound: e must be positive");
  const GroupContext local = ctx.modulus().is_prime() ? ctx : ctx.at_prime(prime);
  return projective_union_bound(ctx.g(), e, prime, gsp_q_order(local));
}

// ---------------------------------------------------------------- estimates

std::string Event::name() const {
  std::string list;
  for (std::size_t i = 0; i < ells.size(); ++i) {
    if (i > 0) list += ",";
    list += std::to_string(ells[i]);
  }
  switch (kind) {
    case Kind::X:
      return "X(" + list + ")";
    case Kind::SpecialSetHit:
      return "SpecialSetHit(" + list + ")";
    case Kind::JointSpecialSetHit:
      return "JointSpecialSetHit(" + list + ")";
  }
  return "?";
}

double binomial_std_error(std::uint64_t hits, std::uint64_t n) {
  if (n == 0) return 0;
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return std::sqrt(p * (1 - p) / static_cast<double>(n));
}

std::vector<SpecialSet> special_sets_for(const GroupContext& ctx,
                                         std::span<const std::uint64_t> ells,
                                         const SimulationOptions& opts) {
  BuildOptions build;
  build.materialize = false;
  build.budget = opts.budget;
  std::vector<SpecialSet> out;
  for (std::uint64_t p : ells) out.push_back(build_Sq(ctx.at_prime(p), opts.strategy, build));
  return out;
}

namespace {

Rational exact_hit_density(const GroupContext& ctx, std::span<const std::uint64_t> ells,
                           BStrategy strategy) {
  std::uint64_t sub = 1;
  for (std::uint64_t p : ells) sub *= p;
  const GroupContext local(ctx.g(), Modulus(sub), ctx.q());
  return make_rational(count_Sq_composite(ctx.g(), local.modulus(), ctx.q(), strategy),
                       gsp_q_order(local));
}

}  // namespace

EventEstimate estimate_event(const GroupContext& ctx, const Event& event, unsigned e,
                             std::uint64_t n_samples, std::uint64_t seed,
                             const SimulationOptions& opts) {
  if (event.ells.empty()) throw DomainError("event needs at least one prime");
  if (n_samples == 0) throw DomainError("n_samples must be positive");
  std::vector<std::size_t> slots;
  for (std::uint64_t p : event.ells) slots.push_back(prime_slot(ctx, p));

  std::vector<SpecialSet> sets;
  if (event.kind != Event::Kind::X) sets = special_sets_for(ctx, event.ells, opts);

  const auto partial = map_blocks<std::uint64_t>(
      n_samples, opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
          const auto draws = sample_per_prime(ctx, e, seed, i);
          bool hit = true;
          for (std::size_t k = 0; k < slots.size() && hit; ++k) {
            if (event.kind == Event::Kind::X) {
              hit = x_event_local(draws.draws, slots[k], event.ells[k]);
            } else {
              hit = sets[k].contains(draws.draws.front()[slots[k]]);
            }
          }
          if (hit) ++hits;
        }
        return hits;
      });

  EventEstimate est;
  est.event_name = event.name();
  est.n_samples = n_samples;
  for (auto h : partial) est.hits += h;
  est.estimate = static_cast<double>(est.hits) / static_cast<double>(n_samples);
  est.std_error = binomial_std_error(est.hits, n_samples);
  if (event.kind == Event::Kind::X) {
    const std::uint64_t p = event.ells.front();
    est.bound = union_bound_mu_X(ctx, p, e);
    if (ctx.g() == 1) {
      try {
        est.exact_value = exact_mu_X(ctx, p, e, opts.budget);
      } catch (const BudgetExceeded&) {
      }
    }
  } else {
    est.exact_value = exact_hit_density(ctx, event.ells, opts.strategy);
  }
  return est;
}

IndependenceReport independence_experiment(const GroupContext& ctx,
                                           std::span<const std::uint64_t> ells,
                                           std::uint64_t n_samples, std::uint64_t seed,
                                           const SimulationOptions& opts) {
  if (ells.size() < 2) throw DomainError("independence needs at least two primes");
  std::vector<std::size_t> slots;
  for (std::uint64_t p : ells) slots.push_back(prime_slot(ctx, p));
  const auto sets = special_sets_for(ctx, ells, opts);

  struct Counts {
    std::vector<std::uint64_t> singles;
    std::uint64_t joint = 0;
  };
  const auto partial =
      map_blocks<Counts>(n_samples, opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        Counts c;
        c.singles.assign(ells.size(), 0);
        for (std::uint64_t i = begin; i < end; ++i) {
          const auto draws = sample_per_prime(ctx, 1, seed, i);
          bool all = true;
          for (std::size_t k = 0; k < ells.size(); ++k) {
            const bool hit = sets[k].contains(draws.draws.front()[slots[k]]);
            if (hit) ++c.singles[k];
            all = all && hit;
          }
          if (all) ++c.joint;
        }
        return c;
      });

  IndependenceReport report;
  std::vector<std::uint64_t> singles(ells.size(), 0);
  std::uint64_t joint = 0;
  for (const auto& c : partial) {
    for (std::size_t k = 0; k < ells.size(); ++k) singles[k] += c.singles[k];
    joint += c.joint;
  }
  report.product_of_marginals = 1;
  for (std::size_t k = 0; k < ells.size(); ++k) {
    EventEstimate s;
    s.event_name = Event::hit(ells[k]).name();
    s.n_samples = n_samples;
    s.hits = singles[k];
    s.estimate = static_cast<double>(singles[k]) / static_cast<double>(n_samples);
    s.std_error = binomial_std_error(singles[k], n_samples);
    const std::uint64_t one[] = {ells[k]};
    s.exact_value = exact_hit_density(ctx, one, opts.strategy);
    report.product_of_marginals *= s.estimate;
    report.singles.push_back(std::move(s));
  }
  report.joint.event_name = Event::joint({ells.begin(), ells.end()}).name();
  report.joint.n_samples = n_samples;
  report.joint.hits = joint;
  report.joint.estimate = static_cast<double>(joint) / static_cast<double>(n_samples);
  report.joint.std_error = binomial_std_error(joint, n_samples);
  report.exact_joint = exact_hit_density(ctx, ells, opts.strategy);
  report.joint.exact_value = report.exact_joint;
  // Delta-method error of (joint - prod p_k) treating the terms as independent.
  double var = report.joint.std_error * report.joint.std_error;
  for (std::size_t k = 0; k < ells.size(); ++k) {
    double others = 1;
    for (std::size_t m = 0; m < ells.size(); ++m) {
      if (m != k) others *= report.singles[m].estimate;
    }
    var += others * others * report.singles[k].std_error * report.singles[k].std_error;
  }
  report.combined_std_error = std::sqrt(var);
  return report;
}

// ---------------------------------------------------------------- Borel-Cantelli

BorelCantelliReport borel_cantelli_experiment(unsigned g, QParam q,
                                              std::span<const std::uint64_t> ells, unsigned e,
                                              std::uint64_t n_samples, std::uint64_t seed,
                                              std::optional<std::uint64_t> threshold,
                                              const SimulationOptions& opts) {
  if (e == 0) throw DomainError("borel-cantelli: e must be positive");
  BorelCantelliReport report;
  report.regime = e == 1 ? BorelCantelliRegime::PartA : BorelCantelliRegime::PartB;
  report.g = g;
  report.e = e;
  report.q = q;
  report.ells.assign(ells.begin(), ells.end());
  std::sort(report.ells.begin(), report.ells.end());
  report.ells.erase(std::unique(report.ells.begin(), report.ells.end()), report.ells.end());
  report.n_samples = n_samples;
  report.seed = seed;
  report.hits_per_ell.assign(report.ells.size(), 0);
  report.histogram.assign(report.ells.size() + 1, 0);
  if (report.ells.empty()) {
    report.histogram[0] = n_samples;
    report.streams_zero_beyond = n_samples;
    return report;
  }
  report.threshold = threshold.value_or(report.ells[(report.ells.size() - 1) / 2]);

  std::uint64_t n = 1;
  for (std::uint64_t p : report.ells) {
    if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
    n *= p;
  }
  const GroupContext ctx(g, Modulus(n), q);
  std::vector<SpecialSet> sets;
  if (report.regime == BorelCantelliRegime::PartA) sets = special_sets_for(ctx, report.ells, opts);

  struct Tally {
    std::vector<std::uint64_t> per_ell;
    std::vector<std::uint64_t> histogram;
    std::uint64_t hit_beyond = 0;
    std::uint64_t zero_beyond = 0;
    double sum_sq = 0;
  };
  const std::size_t r = report.ells.size();
  const auto partial =
      map_blocks<Tally>(n_samples, opts.threads, [&](std::uint64_t begin, std::uint64_t end) {
        Tally t;
        t.per_ell.assign(r, 0);
        t.histogram.assign(r + 1, 0);
        for (std::uint64_t i = begin; i < end; ++i) {
          const auto draws = sample_per_prime(ctx, e, seed, i);
          std::size_t count = 0;
          bool beyond = false;
          for (std::size_t k = 0; k < r; ++k) {
            const bool hit = report.regime == BorelCantelliRegime::PartA
                                 ? sets[k].contains(draws.draws.front()[k])
                                 : x_event_local(draws.draws, k, report.ells[k]);
            if (!hit) continue;
            ++t.per_ell[k];
            ++count;
            if (report.ells[k] > report.threshold) beyond = true;
          }
          ++t.histogram[count];
          if (beyond) {
            ++t.hit_beyond;
          } else {
            ++t.zero_beyond;
          }
          t.sum_sq += static_cast<double>(count * count);
        }
        return t;
      });

  double sum_sq = 0;
  for (const auto& t : partial) {
    for (std::size_t k = 0; k < r; ++k) report.hits_per_ell[k] += t.per_ell[k];
    for (std::size_t k = 0; k <= r; ++k) report.histogram[k] += t.histogram[k];
    report.streams_hit_beyond += t.hit_beyond;
    report.streams_zero_beyond += t.zero_beyond;
    sum_sq += t.sum_sq;
  }
  double total = 0;
  for (auto h : report.hits_per_ell) total += static_cast<double>(h);
  const double dn = static_cast<double>(n_samples);
  report.mean_hits = total / dn;
  const double var = std::max(0.0, sum_sq / dn - report.mean_hits * report.mean_hits);
  report.mean_std_error = std::sqrt(var / dn);

  if (report.regime == BorelCantelliRegime::PartA) {
    double miss_beyond = 1;
    for (std::size_t k = 0; k < r; ++k) {
      const std::uint64_t one[] = {report.ells[k]};
      const double density = exact_hit_density(ctx, one, opts.strategy).get_d();
      report.expected_mean += density;
      if (report.ells[k] > report.threshold) miss_beyond *= 1 - density;
    }
    report.expected_fraction_hit_beyond = 1 - miss_beyond;
  } else {
    for (std::uint64_t p : report.ells) report.expected_mean += union_bound_mu_X(ctx, p, e).upper.get_d();
  }
  return report;
}

}  // namespace symon
