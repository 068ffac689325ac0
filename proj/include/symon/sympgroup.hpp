#pragma once

// Symplectic similitude groups GSp^(q)_{2g}(Z/n) in the basis e_1, ..., e_2g
// with form matrix J_g = diag(J_1, ..., J_1), J_1 = [[0, 1], [-1, 0]].

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symon/exact.hpp"
#include "symon/modmat.hpp"
#include "symon/rng.hpp"

namespace symon {

// Either a prime power q or the distinguished value "inf" (all unit multipliers).
class QParam {
 public:
  static QParam infinity() noexcept { return QParam(0); }
  static QParam finite(std::uint64_t q);
  static QParam parse(std::string_view text);

  bool is_infinite() const noexcept { return q_ == 0; }
  std::uint64_t value() const;
  std::string to_string() const { return is_infinite() ? "inf" : std::to_string(q_); }

  friend bool operator==(QParam a, QParam b) noexcept { return a.q_ == b.q_; }

 private:
  explicit QParam(std::uint64_t q) noexcept : q_(q) {}
  std::uint64_t q_;
};

class GroupContext {
 public:
  GroupContext(unsigned g, Modulus modulus, QParam q);

  unsigned g() const noexcept { return g_; }
  std::size_t dim() const noexcept { return 2 * std::size_t{g_}; }
  const Modulus& modulus() const noexcept { return modulus_; }
  std::uint64_t prime() const;  // throws unless the modulus is prime
  QParam q() const noexcept { return q_; }
  const ModMatrix& form() const noexcept { return form_; }

  bool allows_multiplier(Residue lambda) const;
  /// Ascending list of admissible multipliers (powers of q, or all units).
  std::vector<Residue> allowed_multipliers() const;
  /// ord_n(q); throws DomainError when q is infinite.
  std::uint64_t q_order() const;
  /// q mod n == 1: GSp^(q) collapses to Sp. Allowed, reported as degenerate.
  bool degenerate_q() const noexcept;

  GroupContext at_prime(std::uint64_t prime) const;
  GroupContext with_genus(unsigned g) const;

 private:
  unsigned g_;
  Modulus modulus_;
  QParam q_;
  ModMatrix form_;
  std::vector<Residue> q_powers_;  // sorted; empty when q is infinite
};

Residue pairing(const GroupContext& ctx, const ModVector& v, const ModVector& w);

/// The unit lambda with a^t J a = lambda J, or nullopt if a is not a similitude.
std::optional<Residue> multiplier(const GroupContext& ctx, const ModMatrix& a);

bool is_member(const GroupContext& ctx, const ModMatrix& a);

/// |Sp_2g(F_l)| = l^(g^2) prod_{i=1..g} (l^(2i) - 1); g = 0 gives 1.
BigInt sp_order(unsigned g, std::uint64_t prime);

/// |GSp^(q)_2g(Z/n)|: ord_n(q) prod |Sp|, or prod (l - 1)|Sp| when q is infinite.
BigInt gsp_q_order(const GroupContext& ctx);

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

/// Candidate-matrix budget for exhaustive enumeration; SYMON_BUDGET overrides the default.
std::uint64_t enumeration_budget();

/// Visits every member of GSp^(q)[lambda] (all admissible multipliers when
/// lambda is empty) exactly once, in row-major lexicographic order of entries.
/// The visitor returns false to stop early. Throws BudgetExceeded when
/// l^(dim^2) exceeds `budget`.
void for_each_member(const GroupContext& ctx, std::optional<Residue> lambda,
                     const std::function<bool(const ModMatrix&)>& visit,
                     std::uint64_t budget = enumeration_budget());

std::vector<ModMatrix> enumerate_group(const GroupContext& ctx, std::optional<Residue> lambda,
                                       std::uint64_t budget = enumeration_budget());

/// Uniform element of GSp_2g(F_l)[lambda], built column by column as the image
/// of a symplectic basis. Deterministic in the stream state.
ModMatrix sample_uniform(const GroupContext& ctx, Residue lambda, CounterStream& stream);
ModMatrix sample_uniform(const GroupContext& ctx, Residue lambda, std::uint64_t seed,
                         std::uint64_t index);

/// Matrix of v -> v + beta e(v, u) u with u = e_2 + alpha_3 e_3 + ... + alpha_2g e_2g.
ModMatrix transvection(const GroupContext& ctx, std::span<const Residue> alpha, Residue beta);

struct StabilizerParams {
  Residue lambda = 1;
  Residue d = 0;
  std::vector<Residue> d_vec;  // d_1 ... d_{2g-2}
  std::optional<ModMatrix> block;  // B in GSp_{2g-2}[lambda]; empty iff g = 1
};

/// Assembles the e_1-fixing similitude with the given parameters. The first row
/// carries b_k = lambda^-1 sum_j (d_{2j-1} B_{2j,k} - d_{2j} B_{2j-1,k}).
ModMatrix stabilizer_matrix(const GroupContext& ctx, const StabilizerParams& params);

/// The b_k entries for given d_vec and B.
std::vector<Residue> stabilizer_first_row(const GroupContext& ctx, Residue lambda,
                                          std::span<const Residue> d_vec, const ModMatrix& block);

/// Size of the orbit of a nonzero v under the group of ctx, by breadth-first
/// search over transvection (and multiplier) generators.
std::uint64_t orbit_size(const GroupContext& ctx, const ModVector& v);

}  // namespace symon
