#include "symon/specialsets.hpp"

#include <algorithm>
#include <thread>

#include "symon/arith.hpp"
#include "symon/error.hpp"

namespace symon {

namespace {

void require_constructible(const GroupContext& ctx, BStrategy strategy) {
  const std::uint64_t p = ctx.prime();
  if (p == 2) {
    throw DomainError(
        "special sets are empty at l = 2: beta(l, g) carries the factor (l - 2)");
  }
  if (ctx.g() < 2) throw DomainError("special sets need g >= 2");
  if (strategy == BStrategy::RemarkG2 && ctx.g() != 2) {
    throw DomainError("the remark-g2 B selection is only defined for g = 2");
  }
}

std::uint64_t ipow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

// Runs fn(worker, begin, end) over [0, count) split into contiguous blocks.
template <typename Fn>
void parallel_blocks(std::size_t count, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(
                                                                        std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    fn(0U, std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
  }
  for (auto& t : pool) t.join();
}

std::vector<std::uint64_t> concat(std::vector<std::vector<std::uint64_t>>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<std::uint64_t> out;
  out.reserve(total);
  for (auto& p : parts) {
    out.insert(out.end(), p.begin(), p.end());
    std::vector<std::uint64_t>().swap(p);
  }
  return out;
}

// S_lambda(l)_0 keys for one multiplier.
std::vector<std::uint64_t> materialize_s0(const GroupContext& ctx, Residue lambda,
                                          const std::vector<ModMatrix>& blocks,
                                          const MatrixPacker& packer, unsigned threads) {
  const std::uint64_t p = ctx.prime();
  const std::size_t d = ctx.dim();
  const std::size_t m = d - 2;
  const std::uint64_t dvec_count = ipow(p, m);
  std::vector<std::vector<std::uint64_t>> out(std::max(1U, threads));
  parallel_blocks(blocks.size(), threads, [&](unsigned w, std::size_t begin, std::size_t end) {
    auto& keys = out[w];
    std::vector<Residue> entries(d * d);
    std::vector<Residue> d_vec(m);
    for (std::size_t bi = begin; bi < end; ++bi) {
      const ModMatrix& block = blocks[bi];
      const ModMatrix inv_ib = mat_inv(mat_sub(ModMatrix::identity(block.modulus(), m), block));
      for (std::uint64_t code = 0; code < dvec_count; ++code) {
        std::uint64_t x = code;
        for (std::size_t k = m; k-- > 0;) {
          d_vec[k] = x % p;
          x /= p;
        }
        const auto b = stabilizer_first_row(ctx, lambda, d_vec, block);
        // Excluded d = -(b_1..b_m) (I - B)^-1 (d_1..d_m)^t.
        Residue excluded = 0;
        for (std::size_t r = 0; r < m; ++r) {
          Residue w_r = 0;
          for (std::size_t c = 0; c < m; ++c) w_r = (w_r + inv_ib(r, c) * d_vec[c]) % p;
          excluded = (excluded + b[r] * w_r) % p;
        }
        excluded = (p - excluded) % p;
        std::fill(entries.begin(), entries.end(), 0);
        entries[0] = 1;
        entries[d + 1] = lambda;
        for (std::size_t k = 0; k < m; ++k) {
          entries[k + 2] = b[k];
          entries[(k + 2) * d + 1] = d_vec[k];
          for (std::size_t c = 0; c < m; ++c) entries[(k + 2) * d + c + 2] = block(k, c);
        }
        for (Residue dd = 0; dd < p; ++dd) {
          if (dd == excluded) continue;
          entries[1] = dd;
          keys.push_back(packer.pack(entries));
        }
      }
    }
  });
  return concat(out);
}

// Adds every conjugate T_u[beta]^-1 A T_u[beta], beta != 0, of each A in s0.
// beta = 0 gives A itself, which is already present.
std::vector<std::uint64_t> materialize_conjugates(const GroupContext& ctx,
                                                  std::span<const std::uint64_t> s0,
                                                  const MatrixPacker& packer, unsigned threads) {
  const std::uint64_t p = ctx.prime();
  const std::size_t d = ctx.dim();
  const std::size_t m = d - 2;
  const std::uint64_t alpha_count = ipow(p, m);
  const auto sp = static_cast<std::int64_t>(p);

  // u_alpha and c = J u_alpha for every alpha.
  std::vector<std::int64_t> us(alpha_count * d);
  std::vector<std::int64_t> cs(alpha_count * d);
  for (std::uint64_t code = 0; code < alpha_count; ++code) {
    std::int64_t* u = &us[code * d];
    std::int64_t* c = &cs[code * d];
    std::uint64_t x = code;
    for (std::size_t k = d; k-- > 2;) {
      u[k] = static_cast<std::int64_t>(x % p);
      x /= p;
    }
    u[0] = 0;
    u[1] = 1;
    for (std::size_t k = 0; k < d; k += 2) {
      c[k] = u[k + 1];
      c[k + 1] = (sp - u[k]) % sp;
    }
  }

  std::vector<std::vector<std::uint64_t>> out(std::max(1U, threads));
  parallel_blocks(s0.size(), threads, [&](unsigned w, std::size_t begin, std::size_t end) {
    auto& keys = out[w];
    keys.reserve((end - begin) * (alpha_count * (p - 1) + 1));
    std::vector<Residue> a(d * d);
    std::vector<std::int64_t> xa(d), ya(d), pm(d * d), qm(d * d), rm(d * d);
    std::vector<Residue> conj(d * d);
    for (std::size_t i = begin; i < end; ++i) {
      packer.unpack(s0[i], a);
      keys.push_back(s0[i]);
      for (std::uint64_t code = 0; code < alpha_count; ++code) {
        const std::int64_t* u = &us[code * d];
        const std::int64_t* c = &cs[code * d];
        std::int64_t s = 0;
        for (std::size_t r = 0; r < d; ++r) {
          std::int64_t xr = 0;
          std::int64_t yr = 0;
          for (std::size_t k = 0; k < d; ++k) {
            xr += static_cast<std::int64_t>(a[r * d + k]) * u[k];
            yr += c[k] * static_cast<std::int64_t>(a[k * d + r]);
          }
          xa[r] = xr % sp;
          ya[r] = yr % sp;
        }
        for (std::size_t r = 0; r < d; ++r) s += c[r] * xa[r];
        s %= sp;
        // T^-1 A T = A + beta x c^t - beta u y^t - beta^2 s u c^t
        for (std::size_t r = 0; r < d; ++r) {
          for (std::size_t col = 0; col < d; ++col) {
            pm[r * d + col] = xa[r] * c[col] % sp;
            qm[r * d + col] = (sp - u[r] * ya[col] % sp) % sp;
            rm[r * d + col] = (sp - s * u[r] % sp * c[col] % sp) % sp;
          }
        }
        for (std::int64_t beta = 1; beta < sp; ++beta) {
          const std::int64_t beta2 = beta * beta % sp;
          for (std::size_t e = 0; e < d * d; ++e) {
            conj[e] = static_cast<Residue>(
                (static_cast<std::int64_t>(a[e]) + beta * (pm[e] + qm[e]) + beta2 * rm[e]) % sp);
          }
          keys.push_back(packer.pack(conj));
        }
      }
    }
  });
  return concat(out);
}

void sort_unique(std::vector<std::uint64_t>& keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
}

}  // namespace

// ---------------------------------------------------------------- names

std::string_view to_string(BStrategy s) noexcept {
  return s == BStrategy::LexCanonical ? "lex" : "remark-g2";
}

std::string_view to_string(SetLevel s) noexcept {
  switch (s) {
    case SetLevel::S0:
      return "S0";
    case SetLevel::SFull:
      return "S";
    case SetLevel::SQUnion:
      return "Sq";
  }
  return "?";
}

BStrategy parse_strategy(std::string_view text) {
  if (text == "lex" || text == "lex-canonical") return BStrategy::LexCanonical;
  if (text == "remark-g2" || text == "remark") return BStrategy::RemarkG2;
  throw DomainError("unknown B strategy '" + std::string(text) + "'");
}

SetLevel parse_level(std::string_view text) {
  if (text == "S0") return SetLevel::S0;
  if (text == "S") return SetLevel::SFull;
  if (text == "Sq") return SetLevel::SQUnion;
  throw DomainError("unknown set level '" + std::string(text) + "'");
}

// ---------------------------------------------------------------- counting

BigInt beta(std::uint64_t prime, unsigned g) {
  if (g == 0) throw DomainError("beta: g must be positive");
  BigInt num = big_pow(prime, 2UL * g - 1) * (big_pow(prime, 2UL * g) - 1) * (big(prime) - 2);
  BigInt out;
  mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), BigInt(big(prime) - 1).get_mpz_t());
  return out;
}

BigInt count_no_eigenvalue_one(std::uint64_t prime, unsigned g, Residue lambda,
                               std::uint64_t budget) {
  const GroupContext ctx(g, Modulus(prime), QParam::infinity());
  std::uint64_t count = 0;
  for_each_member(
      ctx, lambda,
      [&](const ModMatrix& a) {
        if (!has_eigenvalue_one(a)) ++count;
        return true;
      },
      budget);
  return big(count);
}

BigInt b_lambda_size(std::uint64_t prime, unsigned g) {
  if (g < 2) throw DomainError("B_lambda needs g >= 2");
  return beta(prime, g - 1) * sp_order(g - 2, prime);
}

BigInt conjugation_factor(std::uint64_t prime, unsigned g) {
  return big_pow(prime, 2UL * g - 2) * (big(prime) - 1) + 1;
}

BigInt s0_cardinality(std::uint64_t prime, unsigned g, const BigInt& b_size) {
  return big_pow(prime, 2UL * g - 2) * (big(prime) - 1) * b_size;
}

BigInt s_cardinality(std::uint64_t prime, unsigned g, const BigInt& b_size) {
  return conjugation_factor(prime, g) * s0_cardinality(prime, g, b_size);
}

BigInt strategy_b_size(std::uint64_t prime, unsigned g, BStrategy strategy) {
  if (strategy == BStrategy::RemarkG2) {
    if (g != 2) throw DomainError("the remark-g2 B selection is only defined for g = 2");
    return big(prime) * (big(prime) - 1) * (big(prime) - 1);
  }
  return b_lambda_size(prime, g);
}

BigInt s_lambda_cardinality(std::uint64_t prime, unsigned g, BStrategy strategy) {
  return s_cardinality(prime, g, strategy_b_size(prime, g, strategy));
}

// ---------------------------------------------------------------- B selection

std::vector<ModMatrix> select_B(const GroupContext& ctx, Residue lambda, BStrategy strategy,
                                std::uint64_t budget) {
  require_constructible(ctx, strategy);
  const std::uint64_t p = ctx.prime();
  lambda %= p;
  if (lambda == 0) throw DomainError("select_B: multiplier must be a unit");
  std::vector<ModMatrix> out;
  if (strategy == BStrategy::RemarkG2) {
    const Modulus mod(p);
    for (Residue b11 = 0; b11 < p; ++b11) {
      const Residue skip = (1 + p - b11 + lambda) % p;
      for (Residue b22 = 0; b22 < p; ++b22) {
        if (b22 == skip) continue;
        for (Residue b12 = 1; b12 < p; ++b12) {
          const Residue b21 = *inverse_mod(b12, p) * ((b11 * b22 + p - lambda) % p) % p;
          out.emplace_back(mod, 2, std::vector<Residue>{b11, b12, b21, b22});
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  const BigInt wanted_big = b_lambda_size(p, ctx.g());
  const std::uint64_t wanted = wanted_big.get_ui();
  const GroupContext sub(ctx.g() - 1, Modulus(p), QParam::infinity());
  for_each_member(
      sub, lambda,
      [&](const ModMatrix& b) {
        if (!has_eigenvalue_one(b)) out.push_back(b);
        return out.size() < wanted;
      },
      budget);
  if (out.size() < wanted) {
    throw InsufficientMatrices("only " + std::to_string(out.size()) +
                               " matrices without eigenvalue 1 available, need " +
                               wanted_big.get_str());
  }
  return out;
}

// ---------------------------------------------------------------- packing

MatrixPacker::MatrixPacker(std::uint64_t prime, std::size_t dim) : prime_(prime), dim_(dim) {
  if (!fits(prime, dim)) {
    throw DomainError("cannot pack " + std::to_string(dim) + "x" + std::to_string(dim) +
                      " matrices over F_" + std::to_string(prime) + " into 64 bits");
  }
}

bool MatrixPacker::fits(std::uint64_t prime, std::size_t dim) noexcept {
  long double total = 1;
  for (std::size_t i = 0; i < dim * dim; ++i) total *= static_cast<long double>(prime);
  return total <= 18446744073709551615.0L;
}

std::uint64_t MatrixPacker::pack(std::span<const Residue> entries) const noexcept {
  std::uint64_t key = 0;
  for (Residue x : entries) key = key * prime_ + x;
  return key;
}

void MatrixPacker::unpack(std::uint64_t key, std::span<Residue> out) const noexcept {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = key % prime_;
    key /= prime_;
  }
}

// ---------------------------------------------------------------- SpecialSet

SpecialSet build_special_set(const GroupContext& ctx, SetLevel level,
                             std::span<const Residue> lambdas, BStrategy strategy,
                             const BuildOptions& opts) {
  require_constructible(ctx, strategy);
  const std::uint64_t p = ctx.prime();
  if (lambdas.empty()) throw DomainError("special set needs at least one multiplier");
  if (level != SetLevel::SQUnion && lambdas.size() != 1) {
    throw DomainError("S0 and S levels take exactly one multiplier");
  }

  SpecialSet set(ctx, level, strategy);
  for (Residue l : lambdas) {
    if (l % p == 0) throw DomainError("multiplier must be a unit");
    set.multipliers_.push_back(l % p);
  }
  std::sort(set.multipliers_.begin(), set.multipliers_.end());
  set.multipliers_.erase(std::unique(set.multipliers_.begin(), set.multipliers_.end()),
                         set.multipliers_.end());

  // B lists, when the sub-enumeration fits the budget.
  std::vector<std::vector<ModMatrix>> blocks;
  try {
    for (Residue l : set.multipliers_) blocks.push_back(select_B(ctx, l, strategy, opts.budget));
  } catch (const BudgetExceeded&) {
    if (opts.materialize) throw;
    blocks.clear();
  }
  if (!blocks.empty()) {
    const MatrixPacker bpack(p, ctx.dim() - 2);
    for (const auto& list : blocks) {
      std::vector<std::uint64_t> keys;
      keys.reserve(list.size());
      for (const auto& b : list) keys.push_back(bpack.pack(b.entries()));
      std::sort(keys.begin(), keys.end());
      set.b_keys_.push_back(std::move(keys));
    }
  }

  BigInt card = 0;
  for (std::size_t i = 0; i < set.multipliers_.size(); ++i) {
    const BigInt b_size =
        blocks.empty() ? strategy_b_size(p, ctx.g(), strategy) : big(blocks[i].size());
    card += level == SetLevel::S0 ? s0_cardinality(p, ctx.g(), b_size)
                                  : s_cardinality(p, ctx.g(), b_size);
  }
  set.cardinality_ = card;

  if (!opts.materialize) return set;
  if (ctx.g() != 2) throw DomainError("materialization is restricted to g = 2");
  if (p > opts.max_materialize_prime) {
    throw DomainError("materialization capped at l <= " + std::to_string(opts.max_materialize_prime));
  }
  const MatrixPacker packer(p, ctx.dim());
  for (std::size_t i = 0; i < set.multipliers_.size(); ++i) {
    auto s0 = materialize_s0(ctx, set.multipliers_[i], blocks[i], packer, opts.threads);
    if (level == SetLevel::S0) {
      set.keys_.insert(set.keys_.end(), s0.begin(), s0.end());
    } else {
      sort_unique(s0);
      auto full = materialize_conjugates(ctx, s0, packer, opts.threads);
      std::vector<std::uint64_t>().swap(s0);
      set.keys_.insert(set.keys_.end(), full.begin(), full.end());
    }
  }
  sort_unique(set.keys_);
  set.materialized_ = true;
  set.cardinality_ = big(set.keys_.size());
  return set;
}

SpecialSet build_S0(const GroupContext& ctx, Residue lambda, BStrategy strategy,
                    const BuildOptions& opts) {
  const Residue l[] = {lambda};
  return build_special_set(ctx, SetLevel::S0, l, strategy, opts);
}

SpecialSet build_S(const GroupContext& ctx, Residue lambda, BStrategy strategy,
                   const BuildOptions& opts) {
  const Residue l[] = {lambda};
  return build_special_set(ctx, SetLevel::SFull, l, strategy, opts);
}

SpecialSet build_Sq(const GroupContext& ctx, BStrategy strategy, const BuildOptions& opts) {
  const auto lambdas = ctx.allowed_multipliers();
  return build_special_set(ctx, SetLevel::SQUnion, lambdas, strategy, opts);
}

ModMatrix SpecialSet::element(std::size_t i) const {
  if (!materialized_) throw DomainError("special set is not materialized");
  std::vector<Residue> entries(ctx_.dim() * ctx_.dim());
  MatrixPacker(prime(), ctx_.dim()).unpack(keys_.at(i), entries);
  return {ctx_.modulus(), ctx_.dim(), std::move(entries)};
}

const std::vector<std::uint64_t>* SpecialSet::b_keys_for(Residue lambda) const {
  const auto it = std::lower_bound(multipliers_.begin(), multipliers_.end(), lambda);
  if (it == multipliers_.end() || *it != lambda || b_keys_.empty()) return nullptr;
  return &b_keys_[static_cast<std::size_t>(it - multipliers_.begin())];
}

std::vector<ModMatrix> SpecialSet::b_list(Residue lambda) const {
  const auto* keys = b_keys_for(lambda % prime());
  if (keys == nullptr) throw DomainError("no B list for multiplier " + std::to_string(lambda));
  const std::size_t m = ctx_.dim() - 2;
  const MatrixPacker bpack(prime(), m);
  std::vector<ModMatrix> out;
  for (std::uint64_t k : *keys) {
    std::vector<Residue> e(m * m);
    bpack.unpack(k, e);
    out.emplace_back(ctx_.modulus(), m, std::move(e));
  }
  return out;
}

bool SpecialSet::contains(const ModMatrix& a) const {
  if (a.dim() != ctx_.dim() || !(a.modulus() == ctx_.modulus())) return false;
  if (materialized_) {
    const std::uint64_t key = MatrixPacker(prime(), ctx_.dim()).pack(a.entries());
    return std::binary_search(keys_.begin(), keys_.end(), key);
  }
  return contains_structural(a);
}

bool SpecialSet::contains_structural(const ModMatrix& a) const {
  if (b_keys_.empty()) {
    throw DomainError("special set is not materialized and has no B lists for membership");
  }
  if (a.dim() != ctx_.dim() || !(a.modulus() == ctx_.modulus())) return false;
  const std::uint64_t p = prime();
  const std::size_t d = ctx_.dim();
  const GroupContext any_mult(ctx_.g(), ctx_.modulus(), QParam::infinity());
  const auto lambda = multiplier(any_mult, a);
  if (!lambda) return false;
  const auto* bkeys = b_keys_for(*lambda);
  if (bkeys == nullptr) return false;

  const auto fixed = fixed_space(a);
  if (fixed.size() != 1) return false;
  const ModVector& v = fixed.front();
  if (v[0] == 0) return false;
  const Residue inv0 = *inverse_mod(v[0], p);
  std::vector<Residue> w(d);
  for (std::size_t k = 0; k < d; ++k) w[k] = v[k] * inv0 % p;

  ModMatrix a0 = a;
  const bool on_e1 = std::all_of(w.begin() + 1, w.end(), [](Residue x) { return x == 0; });
  if (!on_e1) {
    if (level_ == SetLevel::S0 || w[1] == 0) return false;
    // w = e_1 - beta u_alpha: beta = -w_2, alpha_k = w_k / w_2.
    const Residue beta = (p - w[1]) % p;
    const Residue inv1 = *inverse_mod(w[1], p);
    std::vector<Residue> alpha(d - 2);
    for (std::size_t k = 2; k < d; ++k) alpha[k - 2] = w[k] * inv1 % p;
    const ModMatrix t = transvection(ctx_, alpha, beta);
    const ModMatrix t_inv = transvection(ctx_, alpha, (p - beta) % p);
    a0 = t * a * t_inv;
  }
  // a0 fixes e_1 and has the block shape; its lower-right block must lie in B_lambda.
  if (a0(0, 0) != 1 || a0(1, 1) != *lambda) return false;
  for (std::size_t r = 1; r < d; ++r) {
    if (a0(r, 0) != 0) return false;
  }
  for (std::size_t c = 2; c < d; ++c) {
    if (a0(1, c) != 0) return false;
  }
  std::vector<Residue> block((d - 2) * (d - 2));
  for (std::size_t r = 2; r < d; ++r) {
    for (std::size_t c = 2; c < d; ++c) block[(r - 2) * (d - 2) + (c - 2)] = a0(r, c);
  }
  const std::uint64_t bkey = MatrixPacker(p, d - 2).pack(block);
  if (!std::binary_search(bkeys->begin(), bkeys->end(), bkey)) return false;

  // d = a0(0, 1) must avoid -b (I - B)^-1 d_vec.
  const std::size_t m = d - 2;
  const ModMatrix b_mat(ctx_.modulus(), m, std::move(block));
  const ModMatrix inv_ib = mat_inv(mat_sub(ModMatrix::identity(ctx_.modulus(), m), b_mat));
  Residue excluded = 0;
  for (std::size_t r = 0; r < m; ++r) {
    Residue w_r = 0;
    for (std::size_t c = 0; c < m; ++c) w_r = (w_r + inv_ib(r, c) * a0(c + 2, 1)) % p;
    excluded = (excluded + a0(0, r + 2) * w_r) % p;
  }
  return a0(0, 1) != (p - excluded) % p;
}

ModMatrix SpecialSet::sample(CounterStream& stream) const {
  if (b_keys_.empty()) throw DomainError("sampling needs B lists");
  const std::uint64_t p = prime();
  const std::size_t d = ctx_.dim();
  const std::size_t m = d - 2;
  const std::size_t li = stream.below(multipliers_.size());
  const Residue lambda = multipliers_[li];
  const auto& bkeys = b_keys_[li];
  std::vector<Residue> be(m * m);
  MatrixPacker(p, m).unpack(bkeys[stream.below(bkeys.size())], be);
  ModMatrix block(ctx_.modulus(), m, std::move(be));

  StabilizerParams params;
  params.lambda = lambda;
  params.d_vec.resize(m);
  for (auto& x : params.d_vec) x = stream.below(p);
  const auto b = stabilizer_first_row(ctx_, lambda, params.d_vec, block);
  const ModMatrix inv_ib = mat_inv(mat_sub(ModMatrix::identity(ctx_.modulus(), m), block));
  Residue excluded = 0;
  for (std::size_t r = 0; r < m; ++r) {
    Residue w_r = 0;
    for (std::size_t c = 0; c < m; ++c) w_r = (w_r + inv_ib(r, c) * params.d_vec[c]) % p;
    excluded = (excluded + b[r] * w_r) % p;
  }
  excluded = (p - excluded) % p;
  const Residue r = stream.below(p - 1);
  params.d = r < excluded ? r : r + 1;
  params.block = std::move(block);
  ModMatrix a0 = stabilizer_matrix(ctx_, params);
  if (level_ == SetLevel::S0) return a0;

  const std::uint64_t alpha_count = ipow(p, m);
  const std::uint64_t choice = stream.below(alpha_count * (p - 1) + 1);
  if (choice == 0) return a0;
  std::uint64_t code = (choice - 1) % alpha_count;
  const Residue beta = 1 + (choice - 1) / alpha_count;
  std::vector<Residue> alpha(m);
  for (std::size_t k = m; k-- > 0;) {
    alpha[k] = code % p;
    code /= p;
  }
  const ModMatrix t = transvection(ctx_, alpha, beta);
  const ModMatrix t_inv = transvection(ctx_, alpha, p - beta);
  return t_inv * a0 * t;
}

// ---------------------------------------------------------------- composite

CompositeSpecialSet::CompositeSpecialSet(GroupContext ctx, std::vector<SpecialSet> parts)
    : ctx_(std::move(ctx)), parts_(std::move(parts)) {
  const auto primes = ctx_.modulus().primes();
  if (parts_.size() != primes.size()) throw DomainError("one special set per prime factor required");
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (parts_[i].prime() != primes[i]) throw DomainError("special set parts out of order");
  }
}

const SpecialSet& CompositeSpecialSet::part(std::uint64_t prime) const {
  for (const auto& s : parts_) {
    if (s.prime() == prime) return s;
  }
  throw DomainError(std::to_string(prime) + " does not divide the modulus");
}

bool CompositeSpecialSet::contains(const ModMatrix& a) const {
  if (a.dim() != ctx_.dim() || !(a.modulus() == ctx_.modulus())) return false;
  if (!is_member(ctx_, a)) return false;
  for (const auto& s : parts_) {
    if (!s.contains(reduce_mod(a, s.prime()))) return false;
  }
  return true;
}

CompositeSpecialSet build_Sq_composite(const GroupContext& ctx, BStrategy strategy,
                                       const BuildOptions& opts) {
  std::vector<SpecialSet> parts;
  for (std::uint64_t p : ctx.modulus().primes()) parts.push_back(build_Sq(ctx.at_prime(p), strategy, opts));
  return {ctx, std::move(parts)};
}

bool membership(const SpecialSet& set, const ModMatrix& a) { return set.contains(a); }
bool membership(const CompositeSpecialSet& set, const ModMatrix& a) { return set.contains(a); }

BigInt count_Sq_composite(unsigned g, const Modulus& n, QParam q, BStrategy strategy) {
  if (q.is_infinite()) {
    BigInt out = 1;
    for (std::uint64_t p : n.primes()) out *= (big(p) - 1) * s_lambda_cardinality(p, g, strategy);
    return out;
  }
  // S_{q^i}(n) ~ prod_j S_{q^i}(l_j), and |S_lambda(l)| does not depend on lambda.
  const std::uint64_t order = ord_mod(q.value(), n.value());
  BigInt out = 0;
  for (std::uint64_t i = 1; i <= order; ++i) {
    BigInt term = 1;
    for (std::uint64_t p : n.primes()) term *= s_lambda_cardinality(p, g, strategy);
    out += term;
  }
  return out;
}

}  // namespace symon
