#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace symon {

/// Modular exponentiation; `n` must fit in 32 bits so products stay in 64 bits.
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t n);

/// Inverse of `a` modulo `n` via extended Euclid, or nullopt when gcd(a, n) > 1.
std::optional<std::uint64_t> inverse_mod(std::uint64_t a, std::uint64_t n);

bool is_prime(std::uint64_t n);

/// Distinct prime factors paired with multiplicities, ascending.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

/// If `q` is p^k for a prime p, returns p.
std::optional<std::uint64_t> prime_power_base(std::uint64_t q);

/// Least k >= 1 with q^k = 1 mod n. Throws DomainError when gcd(q, n) != 1.
std::uint64_t ord_mod(std::uint64_t q, std::uint64_t n);

/// Primes p with lo <= p <= hi, ascending (sieve of Eratosthenes).
std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi);

}  // namespace symon
