#include "symon/sympgroup.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numeric>

#include "symon/arith.hpp"
#include "symon/error.hpp"

namespace symon {

namespace {

ModMatrix make_form(const Modulus& m, std::size_t dim) {
  ModMatrix j(m, dim);
  for (std::size_t k = 0; k + 1 < dim; k += 2) {
    j.set(k, k + 1, 1);
    j.set(k + 1, k, -1);
  }
  return j;
}

// e(x, y) on raw residue buffers.
inline Residue raw_pairing(const Residue* x, const Residue* y, std::size_t dim, std::uint64_t n) {
  Residue acc = 0;
  for (std::size_t k = 0; k < dim; k += 2) {
    acc = (acc + x[k] * y[k + 1] + (n - x[k + 1]) * y[k]) % n;
  }
  return acc;
}

std::uint64_t primitive_root(std::uint64_t p) {
  if (p == 2) return 1;
  const auto factors = factorize(p - 1);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [f, mult] : factors) {
      if (pow_mod(g, (p - 1) / f, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  return 1;
}

}  // namespace

// ---------------------------------------------------------------- QParam

QParam QParam::finite(std::uint64_t q) {
  if (!prime_power_base(q)) {
    throw DomainError("q must be a prime power, got " + std::to_string(q));
  }
  return QParam(q);
}

QParam QParam::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "oo") return infinity();
  std::uint64_t q = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), q);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError("cannot parse q from '" + std::string(text) + "'");
  }
  return finite(q);
}

std::uint64_t QParam::value() const {
  if (is_infinite()) throw DomainError("q is infinite");
  return q_;
}

// ---------------------------------------------------------------- GroupContext

GroupContext::GroupContext(unsigned g, Modulus modulus, QParam q)
    : g_(g), modulus_(modulus), q_(q), form_(make_form(modulus, std::max<std::size_t>(2 * g, 1))) {
  if (g == 0 || 2 * g > kMaxDim) {
    throw DomainError("genus must be in [1, " + std::to_string(kMaxDim / 2) + "], got " +
                      std::to_string(g));
  }
  if (!q.is_infinite()) {
    const std::uint64_t n = modulus.value();
    if (std::gcd(q.value(), n) != 1) {
      throw DomainError("q = " + std::to_string(q.value()) + " is not coprime to n = " +
                        std::to_string(n));
    }
    Residue x = q.value() % n;
    Residue power = x;
    do {
      q_powers_.push_back(power);
      power = power * x % n;
    } while (power != x);
    std::sort(q_powers_.begin(), q_powers_.end());
  }
}

std::uint64_t GroupContext::prime() const {
  if (!modulus_.is_prime()) {
    throw DomainError("modulus " + std::to_string(modulus_.value()) + " is not prime");
  }
  return modulus_.value();
}

bool GroupContext::allows_multiplier(Residue lambda) const {
  if (q_.is_infinite()) return modulus_.is_unit(lambda);
  return std::binary_search(q_powers_.begin(), q_powers_.end(), lambda % modulus_.value());
}

std::vector<Residue> GroupContext::allowed_multipliers() const {
  if (!q_.is_infinite()) return q_powers_;
  std::vector<Residue> out;
  for (Residue x = 1; x < modulus_.value(); ++x) {
    if (modulus_.is_unit(x)) out.push_back(x);
  }
  return out;
}

std::uint64_t GroupContext::q_order() const {
  if (q_.is_infinite()) throw DomainError("q_order: q is infinite");
  return q_powers_.size();
}

bool GroupContext::degenerate_q() const noexcept {
  return !q_.is_infinite() && q_powers_.size() == 1;
}

GroupContext GroupContext::at_prime(std::uint64_t prime) const {
  if (!modulus_.divisible_by(prime) || !is_prime(prime)) {
    throw DomainError(std::to_string(prime) + " is not a prime divisor of " +
                      std::to_string(modulus_.value()));
  }
  return {g_, Modulus(prime), q_};
}

GroupContext GroupContext::with_genus(unsigned g) const { return {g, modulus_, q_}; }

// ---------------------------------------------------------------- form and membership

Residue pairing(const GroupContext& ctx, const ModVector& v, const ModVector& w) {
  if (v.dim() != ctx.dim() || w.dim() != ctx.dim()) {
    throw DomainError("pairing: vectors must have dimension " + std::to_string(ctx.dim()));
  }
  if (!(v.modulus() == ctx.modulus()) || !(w.modulus() == ctx.modulus())) {
    throw DomainError("pairing: modulus mismatch");
  }
  return raw_pairing(v.entries().data(), w.entries().data(), ctx.dim(), ctx.modulus().value());
}

std::optional<Residue> multiplier(const GroupContext& ctx, const ModMatrix& a) {
  if (a.dim() != ctx.dim() || !(a.modulus() == ctx.modulus())) {
    throw DomainError("multiplier: matrix does not match the group context");
  }
  const std::size_t d = ctx.dim();
  const std::uint64_t n = ctx.modulus().value();
  // Columns of a as contiguous buffers.
  std::vector<Residue> cols(d * d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) cols[c * d + r] = a(r, c);
  }
  const Residue lambda = raw_pairing(&cols[0], &cols[d], d, n);
  if (!ctx.modulus().is_unit(lambda)) return std::nullopt;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const Residue expect = (j == i + 1 && i % 2 == 0) ? lambda : 0;
      if (raw_pairing(&cols[i * d], &cols[j * d], d, n) != expect) return std::nullopt;
    }
  }
  return lambda;
}

bool is_member(const GroupContext& ctx, const ModMatrix& a) {
  const auto lambda = multiplier(ctx, a);
  return lambda && ctx.allows_multiplier(*lambda);
}

BigInt sp_order(unsigned g, std::uint64_t prime) {
  BigInt out = big_pow(prime, static_cast<unsigned long>(g) * g);
  for (unsigned i = 1; i <= g; ++i) out *= big_pow(prime, 2UL * i) - 1;
  return out;
}

BigInt gsp_q_order(const GroupContext& ctx) {
  BigInt out = 1;
  for (std::uint64_t p : ctx.modulus().primes()) {
    out *= sp_order(ctx.g(), p);
    if (ctx.q().is_infinite()) out *= big(p - 1);
  }
  if (!ctx.q().is_infinite()) out *= big(ord_mod(ctx.q().value(), ctx.modulus().value()));
  return out;
}

// ---------------------------------------------------------------- enumeration

std::uint64_t enumeration_budget() {
  if (const char* env = std::getenv("SYMON_BUDGET")) {
    std::uint64_t b = 0;
    const std::string_view s(env);
    if (std::from_chars(s.data(), s.data() + s.size(), b).ec == std::errc{} && b > 0) return b;
  }
  return kDefaultBudget;
}

void for_each_member(const GroupContext& ctx, std::optional<Residue> lambda,
                     const std::function<bool(const ModMatrix&)>& visit, std::uint64_t budget) {
  const std::uint64_t p = ctx.prime();
  const std::size_t d = ctx.dim();
  const long double candidates =
      std::pow(static_cast<long double>(p), static_cast<long double>(d * d));
  if (candidates > static_cast<long double>(budget)) throw BudgetExceeded(candidates, budget);
  if (lambda && !ctx.allows_multiplier(*lambda)) return;

  // All vectors of F_p^d in lexicographic order.
  std::size_t count = 1;
  for (std::size_t i = 0; i < d; ++i) count *= p;
  std::vector<Residue> vecs(count * d);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t x = idx;
    for (std::size_t k = d; k-- > 0;) {
      vecs[idx * d + k] = x % p;
      x /= p;
    }
  }

  // Rows satisfy r_i J r_j^t = lambda J_ij, equivalent to a^t J a = lambda J.
  std::vector<std::size_t> chosen(d);
  ModMatrix current(ctx.modulus(), d);
  Residue lam = lambda.value_or(0);
  bool stop = false;

  std::function<void(std::size_t)> descend = [&](std::size_t row) {
    for (std::size_t idx = row == 0 ? 1 : 0; idx < count && !stop; ++idx) {
      const Residue* v = &vecs[idx * d];
      bool ok = true;
      for (std::size_t j = 0; j < row && ok; ++j) {
        const Residue e = raw_pairing(&vecs[chosen[j] * d], v, d, p);
        if (row == 1) {
          if (lambda) {
            ok = e == lam;
          } else {
            ok = e != 0 && ctx.allows_multiplier(e);
            if (ok) lam = e;
          }
        } else {
          const Residue expect = (j + 1 == row && j % 2 == 0) ? lam : 0;
          ok = e == expect;
        }
      }
      if (!ok) continue;
      chosen[row] = idx;
      for (std::size_t c = 0; c < d; ++c) current.set_residue(row, c, v[c]);
      if (row + 1 == d) {
        if (!visit(current)) stop = true;
      } else {
        descend(row + 1);
      }
    }
  };
  descend(0);
}

std::vector<ModMatrix> enumerate_group(const GroupContext& ctx, std::optional<Residue> lambda,
                                       std::uint64_t budget) {
  std::vector<ModMatrix> out;
  for_each_member(
      ctx, lambda,
      [&](const ModMatrix& m) {
        out.push_back(m);
        return true;
      },
      budget);
  return out;
}

// ---------------------------------------------------------------- sampling

ModMatrix sample_uniform(const GroupContext& ctx, Residue lambda, CounterStream& stream) {
  const std::uint64_t p = ctx.prime();
  const std::size_t d = ctx.dim();
  lambda %= p;
  if (lambda == 0) throw DomainError("sample_uniform: multiplier must be a unit");

  // images[i] = A e_i; constraints e(images[j], v) = target_j are linear in v.
  std::vector<std::vector<Residue>> images;
  images.reserve(d);
  std::vector<Residue> coeffs;
  std::vector<Residue> rhs;
  for (std::size_t i = 0; i < d; ++i) {
    coeffs.assign(i * d, 0);
    rhs.assign(i, 0);
    for (std::size_t j = 0; j < i; ++j) {
      const auto& x = images[j];
      for (std::size_t k = 0; k < d; k += 2) {
        coeffs[j * d + k + 1] = x[k];
        coeffs[j * d + k] = (p - x[k + 1]) % p;
      }
      if (i % 2 == 1 && j + 1 == i) rhs[j] = lambda;
    }
    std::vector<Residue> v;
    if (i == 0) {
      do {
        v.assign(d, 0);
        for (auto& x : v) x = stream.below(p);
      } while (std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; }));
    } else {
      const auto sol = field::solve(coeffs, i, d, rhs, p);
      // Nondegeneracy of the remaining complement guarantees a solution.
      if (!sol) throw Error("sample_uniform: inconsistent symplectic constraints");
      do {
        v = sol->particular;
        for (const auto& k : sol->kernel) {
          const Residue t = stream.below(p);
          for (std::size_t c = 0; c < d; ++c) v[c] = (v[c] + t * k[c]) % p;
        }
      } while (i % 2 == 0 && std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; }));
    }
    images.push_back(std::move(v));
  }
  ModMatrix out(ctx.modulus(), d);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < d; ++r) out.set_residue(r, c, images[c][r]);
  }
  return out;
}

ModMatrix sample_uniform(const GroupContext& ctx, Residue lambda, std::uint64_t seed,
                         std::uint64_t index) {
  CounterStream stream(seed, index);
  return sample_uniform(ctx, lambda, stream);
}

// ---------------------------------------------------------------- transvections

ModMatrix transvection(const GroupContext& ctx, std::span<const Residue> alpha, Residue beta) {
  const std::uint64_t p = ctx.prime();
  const std::size_t d = ctx.dim();
  if (alpha.size() != d - 2) {
    throw DomainError("transvection: alpha must have " + std::to_string(d - 2) + " entries");
  }
  std::vector<Residue> u(d, 0);
  u[1] = 1;
  for (std::size_t k = 2; k < d; ++k) u[k] = alpha[k - 2] % p;
  // T = I + beta u c^t with c_i = e(e_i, u) = (J u)_i.
  std::vector<Residue> c(d, 0);
  for (std::size_t k = 0; k < d; k += 2) {
    c[k] = u[k + 1];
    c[k + 1] = (p - u[k]) % p;
  }
  ModMatrix t = ModMatrix::identity(ctx.modulus(), d);
  beta %= p;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t col = 0; col < d; ++col) {
      t.set_residue(r, col, (t(r, col) + beta * u[r] % p * c[col]) % p);
    }
  }
  return t;
}

// ---------------------------------------------------------------- stabilizer of e_1

std::vector<Residue> stabilizer_first_row(const GroupContext& ctx, Residue lambda,
                                          std::span<const Residue> d_vec, const ModMatrix& block) {
  const std::uint64_t p = ctx.prime();
  const std::size_t m = ctx.dim() - 2;
  const Residue lam_inv = *inverse_mod(lambda, p);
  std::vector<Residue> b(m, 0);
  for (std::size_t k = 0; k < m; ++k) {
    Residue acc = 0;
    for (std::size_t j = 0; j + 1 < m; j += 2) {
      acc = (acc + d_vec[j] * block(j + 1, k) + (p - d_vec[j + 1]) * block(j, k)) % p;
    }
    b[k] = acc * lam_inv % p;
  }
  return b;
}

ModMatrix stabilizer_matrix(const GroupContext& ctx, const StabilizerParams& params) {
  const std::uint64_t p = ctx.prime();
  const std::size_t d = ctx.dim();
  const Residue lambda = params.lambda % p;
  if (lambda == 0) throw DomainError("stabilizer_matrix: multiplier must be a unit");
  if (params.d_vec.size() != d - 2) {
    throw DomainError("stabilizer_matrix: d_vec must have " + std::to_string(d - 2) + " entries");
  }
  ModMatrix out(ctx.modulus(), d);
  out.set_residue(0, 0, 1);
  out.set_residue(0, 1, params.d % p);
  out.set_residue(1, 1, lambda);
  if (d == 2) {
    if (params.block) throw DomainError("stabilizer_matrix: g = 1 takes no block");
    return out;
  }
  if (!params.block) throw DomainError("stabilizer_matrix: block B is required for g >= 2");
  const ModMatrix& block = *params.block;
  const GroupContext sub(ctx.g() - 1, ctx.modulus(), QParam::infinity());
  if (block.dim() != d - 2 || !(block.modulus() == ctx.modulus())) {
    throw DomainError("stabilizer_matrix: block has wrong shape");
  }
  const auto block_mult = multiplier(sub, block);
  if (!block_mult || *block_mult != lambda) {
    throw DomainError("stabilizer_matrix: block is not a similitude with multiplier " +
                      std::to_string(lambda));
  }
  const auto b = stabilizer_first_row(ctx, lambda, params.d_vec, block);
  for (std::size_t k = 0; k < d - 2; ++k) {
    out.set_residue(0, k + 2, b[k]);
    out.set_residue(k + 2, 1, params.d_vec[k] % p);
    for (std::size_t c = 0; c < d - 2; ++c) out.set_residue(k + 2, c + 2, block(k, c));
  }
  return out;
}

// ---------------------------------------------------------------- orbits

std::uint64_t orbit_size(const GroupContext& ctx, const ModVector& v) {
  const std::uint64_t p = ctx.prime();
  const std::size_t d = ctx.dim();
  if (v.dim() != d || !(v.modulus() == ctx.modulus())) {
    throw DomainError("orbit_size: vector does not match the group context");
  }
  if (v.is_zero()) throw DomainError("orbit_size: zero vector");

  // Generators: transvections along e_i and e_i + e_j, plus a diagonal
  // similitude diag(1, mu, 1, mu, ...) per generator mu of the multiplier group.
  std::vector<ModMatrix> gens;
  auto add_transvection = [&](const std::vector<Residue>& u) {
    ModMatrix t = ModMatrix::identity(ctx.modulus(), d);
    std::vector<Residue> c(d);
    for (std::size_t k = 0; k < d; k += 2) {
      c[k] = u[k + 1];
      c[k + 1] = (p - u[k]) % p;
    }
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t col = 0; col < d; ++col) t.set_residue(r, col, (t(r, col) + u[r] * c[col]) % p);
    }
    gens.push_back(std::move(t));
  };
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Residue> u(d, 0);
    u[i] = 1;
    add_transvection(u);
    for (std::size_t j = i + 1; j < d; ++j) {
      u[j] = 1;
      add_transvection(u);
      u[j] = 0;
    }
  }
  const Residue mu = ctx.q().is_infinite() ? primitive_root(p) : ctx.q().value() % p;
  if (mu != 1) {
    ModMatrix diag = ModMatrix::identity(ctx.modulus(), d);
    for (std::size_t k = 1; k < d; k += 2) diag.set_residue(k, k, mu);
    gens.push_back(std::move(diag));
  }

  auto encode = [&](std::span<const Residue> x) {
    std::uint64_t key = 0;
    for (Residue e : x) key = key * p + e;
    return key;
  };
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < d; ++i) space *= p;
  std::vector<bool> seen(space, false);
  std::deque<ModVector> frontier{v};
  seen[encode(v.entries())] = true;
  std::uint64_t size = 1;
  while (!frontier.empty()) {
    const ModVector cur = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& g : gens) {
      ModVector next = g.apply(cur);
      const auto key = encode(next.entries());
      if (seen[key]) continue;
      seen[key] = true;
      ++size;
      frontier.push_back(std::move(next));
    }
  }
  return size;
}

}  // namespace symon
