#pragma once

// The special sets B_lambda, S_lambda(l)_0, S_lambda(l), S^(q)(l) and S^(q)(n):
// similitudes whose fixed space is a single line, with density ~ 1/l.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "symon/exact.hpp"
#include "symon/modmat.hpp"
#include "symon/rng.hpp"
#include "symon/sympgroup.hpp"

namespace symon {

enum class BStrategy { LexCanonical, RemarkG2 };
enum class SetLevel { S0, SFull, SQUnion };

std::string_view to_string(BStrategy s) noexcept;
std::string_view to_string(SetLevel s) noexcept;
BStrategy parse_strategy(std::string_view text);
SetLevel parse_level(std::string_view text);

/// beta(l, g) = l^(2g-1) (l^(2g) - 1) (l - 2) / (l - 1); zero at l = 2.
BigInt beta(std::uint64_t prime, unsigned g);

/// Number of members of GSp_2g(F_l)[lambda] without eigenvalue 1, by enumeration.
BigInt count_no_eigenvalue_one(std::uint64_t prime, unsigned g, Residue lambda,
                               std::uint64_t budget = enumeration_budget());

// Closed-form cardinalities for the canonical B selection.
BigInt b_lambda_size(std::uint64_t prime, unsigned g);          // beta(l, g-1) |Sp_{2g-4}|
BigInt conjugation_factor(std::uint64_t prime, unsigned g);     // l^(2g-2) (l-1) + 1
BigInt s0_cardinality(std::uint64_t prime, unsigned g, const BigInt& b_size);
BigInt s_cardinality(std::uint64_t prime, unsigned g, const BigInt& b_size);
/// |B_lambda| implied by a strategy: beta(l, 1) |Sp_0| or l (l-1)^2.
BigInt strategy_b_size(std::uint64_t prime, unsigned g, BStrategy strategy);

/// B_lambda inside GSp_{2g-2}(F_l)[lambda]. LexCanonical takes the first
/// beta(l, g-1)|Sp_{2g-4}| members without eigenvalue 1 in enumeration order;
/// RemarkG2 (g = 2 only) is the explicit set of l (l-1)^2 matrices.
std::vector<ModMatrix> select_B(const GroupContext& ctx, Residue lambda, BStrategy strategy,
                                std::uint64_t budget = enumeration_budget());

// Base-l packing of a row-major matrix into one 64-bit key. Numeric order of
// keys equals lexicographic order of entries.
class MatrixPacker {
 public:
  MatrixPacker(std::uint64_t prime, std::size_t dim);
  static bool fits(std::uint64_t prime, std::size_t dim) noexcept;

  std::uint64_t pack(std::span<const Residue> entries) const noexcept;
  void unpack(std::uint64_t key, std::span<Residue> out) const noexcept;
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::uint64_t prime_;
  std::size_t dim_;
};

struct BuildOptions {
  bool materialize = true;
  unsigned threads = 1;
  std::uint64_t budget = enumeration_budget();
  std::uint64_t max_materialize_prime = 13;
};

class SpecialSet {
 public:
  const GroupContext& context() const noexcept { return ctx_; }
  std::uint64_t prime() const noexcept { return ctx_.modulus().value(); }
  SetLevel level() const noexcept { return level_; }
  BStrategy strategy() const noexcept { return strategy_; }
  std::span<const Residue> multipliers() const noexcept { return multipliers_; }

  /// Number of stored elements when materialized, otherwise the count implied
  /// by the construction.
  const BigInt& cardinality() const noexcept { return cardinality_; }
  bool materialized() const noexcept { return materialized_; }
  std::span<const std::uint64_t> keys() const noexcept { return keys_; }
  ModMatrix element(std::size_t i) const;

  bool has_b_lists() const noexcept { return !b_keys_.empty(); }
  std::vector<ModMatrix> b_list(Residue lambda) const;

  /// Hash lookup when materialized, otherwise a structural test: the fixed
  /// space must be one line through a vector e_1 - beta u_alpha, and undoing
  /// the transvection conjugation must give an element of S_lambda(l)_0.
  bool contains(const ModMatrix& a) const;
  bool contains_structural(const ModMatrix& a) const;

  /// Uniform random element, generated from its construction parameters.
  ModMatrix sample(CounterStream& stream) const;

 private:
  friend SpecialSet build_special_set(const GroupContext&, SetLevel, std::span<const Residue>,
                                      BStrategy, const BuildOptions&);
  SpecialSet(GroupContext ctx, SetLevel level, BStrategy strategy)
      : ctx_(std::move(ctx)), level_(level), strategy_(strategy) {}

  const std::vector<std::uint64_t>* b_keys_for(Residue lambda) const;

  GroupContext ctx_;
  SetLevel level_;
  BStrategy strategy_;
  std::vector<Residue> multipliers_;
  std::vector<std::vector<std::uint64_t>> b_keys_;  // sorted, aligned with multipliers_
  BigInt cardinality_;
  bool materialized_ = false;
  std::vector<std::uint64_t> keys_;  // sorted
};

/// General builder; `lambdas` are the multipliers of the union.
SpecialSet build_special_set(const GroupContext& ctx, SetLevel level,
                             std::span<const Residue> lambdas, BStrategy strategy,
                             const BuildOptions& opts = {});

SpecialSet build_S0(const GroupContext& ctx, Residue lambda, BStrategy strategy,
                    const BuildOptions& opts = {});
SpecialSet build_S(const GroupContext& ctx, Residue lambda, BStrategy strategy,
                   const BuildOptions& opts = {});
/// Union of S_lambda(l) over the multipliers admitted by ctx.q().
SpecialSet build_Sq(const GroupContext& ctx, BStrategy strategy, const BuildOptions& opts = {});

/// S^(q)(n) for squarefree n: members of GSp^(q)(Z/n) whose reduction mod each
/// prime factor lies in S^(q)(l_j).
class CompositeSpecialSet {
 public:
  CompositeSpecialSet(GroupContext ctx, std::vector<SpecialSet> parts);

  const GroupContext& context() const noexcept { return ctx_; }
  std::span<const SpecialSet> parts() const noexcept { return parts_; }
  const SpecialSet& part(std::uint64_t prime) const;
  bool contains(const ModMatrix& a) const;

 private:
  GroupContext ctx_;
  std::vector<SpecialSet> parts_;
};

CompositeSpecialSet build_Sq_composite(const GroupContext& ctx, BStrategy strategy,
                                       const BuildOptions& opts = {});

bool membership(const SpecialSet& set, const ModMatrix& a);
bool membership(const CompositeSpecialSet& set, const ModMatrix& a);

/// |S_lambda(l)| for the given strategy, from closed forms.
BigInt s_lambda_cardinality(std::uint64_t prime, unsigned g, BStrategy strategy);

/// |S^(q)(n)| = sum_{i=1..ord_n q} prod_j |S_{q^i}(l_j)|, or prod_j |S^(inf)(l_j)|.
BigInt count_Sq_composite(unsigned g, const Modulus& n, QParam q,
                          BStrategy strategy = BStrategy::LexCanonical);

}  // namespace symon
