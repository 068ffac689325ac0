#pragma once

// Exact linear algebra over Z/n for squarefree n.

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symon {

using Residue = std::uint64_t;

inline constexpr std::size_t kMaxDim = 16;

// Squarefree modulus n = l_1 * ... * l_r with its factorization.
// n < 2^32 so that a product of two residues fits in 64 bits.
class Modulus {
 public:
  explicit Modulus(std::uint64_t n);

  std::uint64_t value() const noexcept { return n_; }
  std::span<const std::uint64_t> primes() const noexcept { return {primes_.data(), count_}; }
  bool is_prime() const noexcept { return count_ == 1; }
  bool divisible_by(std::uint64_t p) const noexcept { return p != 0 && n_ % p == 0; }

  Residue reduce(std::int64_t x) const noexcept {
    const auto n = static_cast<std::int64_t>(n_);
    const std::int64_t r = x % n;
    return static_cast<Residue>(r < 0 ? r + n : r);
  }
  Residue add(Residue a, Residue b) const noexcept { return (a + b) % n_; }
  Residue sub(Residue a, Residue b) const noexcept { return (a + n_ - b) % n_; }
  Residue mul(Residue a, Residue b) const noexcept { return a * b % n_; }
  Residue neg(Residue a) const noexcept { return (n_ - a) % n_; }
  std::optional<Residue> inverse(Residue a) const;
  bool is_unit(Residue a) const;

  friend bool operator==(const Modulus& a, const Modulus& b) noexcept { return a.n_ == b.n_; }

 private:
  std::uint64_t n_;
  // A squarefree n < 2^32 has at most 9 distinct prime factors.
  std::array<std::uint64_t, 10> primes_{};
  std::size_t count_ = 0;
};

class ModVector {
 public:
  ModVector(Modulus modulus, std::size_t dim);
  ModVector(Modulus modulus, std::vector<Residue> entries);

  static ModVector basis(Modulus modulus, std::size_t dim, std::size_t i);

  const Modulus& modulus() const noexcept { return modulus_; }
  std::size_t dim() const noexcept { return entries_.size(); }
  Residue operator[](std::size_t i) const noexcept { return entries_[i]; }
  void set(std::size_t i, std::int64_t value) { entries_[i] = modulus_.reduce(value); }
  std::span<const Residue> entries() const noexcept { return entries_; }
  bool is_zero() const noexcept;

  friend bool operator==(const ModVector& a, const ModVector& b) noexcept {
    return a.modulus_ == b.modulus_ && a.entries_ == b.entries_;
  }

 private:
  Modulus modulus_;
  std::vector<Residue> entries_;
};

// Square matrix over Z/n, row-major, every entry in [0, n).
class ModMatrix {
 public:
  ModMatrix(Modulus modulus, std::size_t dim);
  ModMatrix(Modulus modulus, std::size_t dim, std::vector<Residue> row_major);

  static ModMatrix identity(Modulus modulus, std::size_t dim);
  static ModMatrix from_rows(Modulus modulus,
                             std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static ModMatrix diagonal(Modulus modulus, std::span<const std::int64_t> diag);

  const Modulus& modulus() const noexcept { return modulus_; }
  std::size_t dim() const noexcept { return dim_; }

  Residue operator()(std::size_t r, std::size_t c) const noexcept { return entries_[r * dim_ + c]; }
  void set(std::size_t r, std::size_t c, std::int64_t value) {
    entries_[r * dim_ + c] = modulus_.reduce(value);
  }
  void set_residue(std::size_t r, std::size_t c, Residue value) noexcept {
    entries_[r * dim_ + c] = value;
  }
  std::span<const Residue> entries() const noexcept { return entries_; }

  ModVector column(std::size_t c) const;
  ModVector apply(const ModVector& v) const;
  ModMatrix transpose() const;
  bool is_identity() const noexcept;

  friend bool operator==(const ModMatrix& a, const ModMatrix& b) noexcept {
    return a.modulus_ == b.modulus_ && a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }
  // Row-major lexicographic order of entries; only meaningful for equal shapes.
  friend std::strong_ordering operator<=>(const ModMatrix& a, const ModMatrix& b) noexcept {
    return a.entries_ <=> b.entries_;
  }

 private:
  Modulus modulus_;
  std::size_t dim_;
  std::vector<Residue> entries_;
};

ModMatrix mat_mul(const ModMatrix& a, const ModMatrix& b);
inline ModMatrix operator*(const ModMatrix& a, const ModMatrix& b) { return mat_mul(a, b); }
ModMatrix mat_sub(const ModMatrix& a, const ModMatrix& b);

Residue determinant(const ModMatrix& a);

/// Inverse over Z/n. Composite moduli are inverted prime by prime and lifted by
/// CRT so no pivot is ever a zero divisor. Throws NotInvertible.
ModMatrix mat_inv(const ModMatrix& a);

/// Basis of ker(a - I) over F_l; empty when only the zero vector is fixed.
/// Throws DomainError for a composite modulus.
std::vector<ModVector> fixed_space(const ModMatrix& a);

bool has_eigenvalue_one(const ModMatrix& a);

/// The unique matrix mod prod(l_j) reducing to each residue.
ModMatrix crt_lift(std::span<const std::pair<ModMatrix, std::uint64_t>> residues);

ModMatrix reduce_mod(const ModMatrix& a, std::uint64_t prime);
ModVector reduce_mod(const ModVector& v, std::uint64_t prime);

// Dense linear algebra over a prime field F_p on row-major buffers.
namespace field {

std::size_t rank(std::vector<Residue> m, std::size_t rows, std::size_t cols, std::uint64_t p);

/// Basis of {x : m x = 0}, in reduced echelon parameterization (one vector per free column).
std::vector<std::vector<Residue>> kernel(std::vector<Residue> m, std::size_t rows,
                                         std::size_t cols, std::uint64_t p);

struct AffineSolution {
  std::vector<Residue> particular;
  std::vector<std::vector<Residue>> kernel;
};

/// All solutions of m x = rhs, or nullopt if the system is inconsistent.
std::optional<AffineSolution> solve(std::vector<Residue> m, std::size_t rows, std::size_t cols,
                                    std::span<const Residue> rhs, std::uint64_t p);

Residue determinant(std::vector<Residue> m, std::size_t dim, std::uint64_t p);

}  // namespace field

// Text serialization: `# dim=<d> mod=<n>` header, then one matrix per line,
// row-major decimal entries separated by commas.
std::string dump_header(std::size_t dim, std::uint64_t n);
std::string to_line(const ModMatrix& a);
ModMatrix parse_line(std::string_view line, const Modulus& modulus, std::size_t dim);
std::pair<std::size_t, std::uint64_t> parse_header(std::string_view line);

}  // namespace symon
