#include "symon/arith.hpp"

#include <numeric>
#include <string>

#include "symon/error.hpp"

namespace symon {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t n) {
  std::uint64_t result = 1 % n;
  base %= n;
  while (exp > 0) {
    if (exp & 1U) result = result * base % n;
    base = base * base % n;
    exp >>= 1U;
  }
  return result;
}

std::optional<std::uint64_t> inverse_mod(std::uint64_t a, std::uint64_t n) {
  std::int64_t r0 = static_cast<std::int64_t>(n);
  std::int64_t r1 = static_cast<std::int64_t>(a % n);
  std::int64_t t0 = 0;
  std::int64_t t1 = 1;
  while (r1 != 0) {
    const std::int64_t quot = r0 / r1;
    std::int64_t tmp = r0 - quot * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - quot * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (r0 != 1) return std::nullopt;
  if (t0 < 0) t0 += static_cast<std::int64_t>(n);
  return static_cast<std::uint64_t>(t0) % n;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    unsigned mult = 0;
    while (n % p == 0) {
      n /= p;
      ++mult;
    }
    if (mult > 0) out.emplace_back(p, mult);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::optional<std::uint64_t> prime_power_base(std::uint64_t q) {
  if (q < 2) return std::nullopt;
  const auto f = factorize(q);
  if (f.size() != 1) return std::nullopt;
  return f.front().first;
}

std::uint64_t ord_mod(std::uint64_t q, std::uint64_t n) {
  if (n < 1 || std::gcd(q, n) != 1) {
    throw DomainError("ord_mod: gcd(" + std::to_string(q) + ", " + std::to_string(n) +
                      ") != 1");
  }
  if (n == 1) return 1;
  const std::uint64_t base = q % n;
  std::uint64_t power = base;
  std::uint64_t k = 1;
  while (power != 1) {
    power = power * base % n;
    ++k;
  }
  return k;
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  if (hi < 2) return out;
  std::vector<bool> composite(hi + 1, false);
  for (std::uint64_t p = 2; p <= hi; ++p) {
    if (composite[p]) continue;
    if (p >= lo) out.push_back(p);
    for (std::uint64_t m = p * p; m <= hi; m += p) composite[m] = true;
  }
  return out;
}

}  // namespace symon
