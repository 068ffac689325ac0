#pragma once

// Seeded simulation of Haar-random e-tuples in GSp^(q)_2g(Z/n), the events
// X_l (common nonzero fixed vector) and special-set hits, their exact measures
// where the group is small enough, and finite-range Borel-Cantelli runs.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symon/analysis.hpp"
#include "symon/exact.hpp"
#include "symon/modmat.hpp"
#include "symon/specialsets.hpp"
#include "symon/sympgroup.hpp"

namespace symon {

struct SigmaTuple {
  std::vector<ModMatrix> elements;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  std::size_t e() const noexcept { return elements.size(); }
};

/// e independent uniform draws from GSp^(q)_2g(Z/n). With finite q each draw
/// picks one exponent i in [1, ord_n q] and samples GSp[q^i mod l_j] per prime;
/// with q = inf the per-prime multipliers are independent units.
SigmaTuple sample_sigma(const GroupContext& ctx, unsigned e, std::uint64_t seed,
                        std::uint64_t index);

/// True iff the reductions mod l of all elements share a nonzero fixed vector,
/// i.e. the stacked matrix [(s_1 - I); ...; (s_e - I)] has rank < 2g over F_l.
bool event_X(std::span<const ModMatrix> sigma, std::uint64_t prime);
inline bool event_X(const SigmaTuple& sigma, std::uint64_t prime) {
  return event_X(sigma.elements, prime);
}

/// mu(X_l) by enumerating all e-tuples of GSp^(q)_2(F_l). g = 1 only.
Rational exact_mu_X_enumerated(const GroupContext& ctx, std::uint64_t prime, unsigned e,
                               std::uint64_t budget = enumeration_budget());
/// mu(X_l) for g = 1 by inclusion-exclusion over lines:
/// (sum_L |G_L|^e - l) / |G|^e, G_L the pointwise stabilizer of L.
Rational exact_mu_X_lines(const GroupContext& ctx, std::uint64_t prime, unsigned e);
/// Enumeration when |G|^e fits the budget, otherwise the line formula.
Rational exact_mu_X(const GroupContext& ctx, std::uint64_t prime, unsigned e,
                    std::uint64_t budget = enumeration_budget());

/// (l^2g - 1)/(l - 1) |G_l|^(-e/2g) with G_l = GSp^(q)_2g(F_l).
RealBound union_bound_mu_X(const GroupContext& ctx, std::uint64_t prime, unsigned e);

struct Event {
  enum class Kind { X, SpecialSetHit, JointSpecialSetHit };
  Kind kind = Kind::X;
  std::vector<std::uint64_t> ells;

  static Event x(std::uint64_t ell) { return {Kind::X, {ell}}; }
  static Event hit(std::uint64_t ell) { return {Kind::SpecialSetHit, {ell}}; }
  static Event joint(std::vector<std::uint64_t> ells) {
    return {Kind::JointSpecialSetHit, std::move(ells)};
  }
  std::string name() const;
};

struct EventEstimate {
  std::string event_name;
  std::uint64_t n_samples = 0;
  std::uint64_t hits = 0;
  double estimate = 0;
  double std_error = 0;
  std::optional<Rational> exact_value;
  std::optional<RealBound> bound;
};

double binomial_std_error(std::uint64_t hits, std::uint64_t n);

struct SimulationOptions {
  BStrategy strategy = BStrategy::LexCanonical;
  unsigned threads = 1;
  std::uint64_t budget = enumeration_budget();
};

/// Special sets S^(q)(l) for the given primes, with structural membership.
std::vector<SpecialSet> special_sets_for(const GroupContext& ctx,
                                         std::span<const std::uint64_t> ells,
                                         const SimulationOptions& opts);

EventEstimate estimate_event(const GroupContext& ctx, const Event& event, unsigned e,
                             std::uint64_t n_samples, std::uint64_t seed,
                             const SimulationOptions& opts = {});

/// Singles for each prime and the joint hit, all from the same samples.
struct IndependenceReport {
  std::vector<EventEstimate> singles;
  EventEstimate joint;
  double product_of_marginals = 0;
  double combined_std_error = 0;
  std::optional<Rational> exact_joint;

  bool within(double sigmas) const {
    const double diff = joint.estimate - product_of_marginals;
    return (diff < 0 ? -diff : diff) <= sigmas * combined_std_error;
  }
};

IndependenceReport independence_experiment(const GroupContext& ctx,
                                           std::span<const std::uint64_t> ells,
                                           std::uint64_t n_samples, std::uint64_t seed,
                                           const SimulationOptions& opts = {});

enum class BorelCantelliRegime { PartA, PartB };

struct BorelCantelliReport {
  BorelCantelliRegime regime = BorelCantelliRegime::PartA;
  unsigned g = 0;
  unsigned e = 0;
  QParam q = QParam::infinity();
  std::vector<std::uint64_t> ells;
  std::uint64_t threshold = 0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> hits_per_ell;  // streams triggering the event at each l
  std::vector<std::uint64_t> histogram;     // histogram[k] = streams with k hits
  double mean_hits = 0;
  double mean_std_error = 0;
  double expected_mean = 0;  // sum of exact densities (part a) or of union bounds (part b)
  std::uint64_t streams_hit_beyond = 0;   // at least one hit at l > threshold
  std::uint64_t streams_zero_beyond = 0;  // no hit at l > threshold
  std::optional<double> expected_fraction_hit_beyond;  // part a: 1 - prod (1 - d_l)
};

/// One stream per sample index; each stream is a draw from GSp^(q)(Z/prod l)
/// and records which l trigger the event (special-set hit of sigma_1 for
/// e = 1, X_l for e >= 2). `threshold` defaults to the median of the range.
BorelCantelliReport borel_cantelli_experiment(unsigned g, QParam q,
                                              std::span<const std::uint64_t> ells, unsigned e,
                                              std::uint64_t n_samples, std::uint64_t seed,
                                              std::optional<std::uint64_t> threshold = {},
                                              const SimulationOptions& opts = {});

}  // namespace symon
