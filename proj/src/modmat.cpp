#include "symon/modmat.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>

#include "symon/arith.hpp"
#include "symon/error.hpp"

namespace symon {

namespace {

void check_dim(std::size_t dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw DomainError("matrix dimension must be in [1, " + std::to_string(kMaxDim) +
                      "], got " + std::to_string(dim));
  }
}

void check_same_shape(const ModMatrix& a, const ModMatrix& b, const char* op) {
  if (!(a.modulus() == b.modulus()) || a.dim() != b.dim()) {
    throw DomainError(std::string(op) + ": modulus/dimension mismatch");
  }
}

std::uint64_t require_prime_modulus(const Modulus& m, const char* op) {
  if (!m.is_prime()) {
    throw DomainError(std::string(op) + ": modulus " + std::to_string(m.value()) +
                      " is not prime");
  }
  return m.value();
}

// Gaussian elimination to reduced row echelon form. Returns pivot columns.
std::vector<std::size_t> rref(std::vector<Residue>& m, std::size_t rows, std::size_t cols,
                              std::uint64_t p, std::size_t pivot_cols_limit) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < pivot_cols_limit && row < rows; ++col) {
    std::size_t sel = row;
    while (sel < rows && m[sel * cols + col] == 0) ++sel;
    if (sel == rows) continue;
    if (sel != row) {
      std::swap_ranges(m.begin() + static_cast<std::ptrdiff_t>(sel * cols),
                       m.begin() + static_cast<std::ptrdiff_t>((sel + 1) * cols),
                       m.begin() + static_cast<std::ptrdiff_t>(row * cols));
    }
    const Residue inv = *inverse_mod(m[row * cols + col], p);
    for (std::size_t c = 0; c < cols; ++c) m[row * cols + c] = m[row * cols + c] * inv % p;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row) continue;
      const Residue f = m[r * cols + col];
      if (f == 0) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        m[r * cols + c] = (m[r * cols + c] + (p - f) * m[row * cols + c]) % p;
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

Residue crt_combine(std::span<const std::uint64_t> primes, std::span<const Residue> values,
                    std::uint64_t n) {
  Residue acc = 0;
  for (std::size_t j = 0; j < primes.size(); ++j) {
    const std::uint64_t co = n / primes[j];
    const Residue inv = *inverse_mod(co % primes[j], primes[j]);
    acc = (acc + values[j] % primes[j] * inv % primes[j] * co) % n;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------- Modulus

Modulus::Modulus(std::uint64_t n) : n_(n) {
  if (n < 2 || n >= (std::uint64_t{1} << 32U)) {
    throw DomainError("modulus must lie in [2, 2^32), got " + std::to_string(n));
  }
  for (const auto& [p, mult] : factorize(n)) {
    if (mult != 1) throw DomainError("modulus " + std::to_string(n) + " is not squarefree");
    primes_[count_++] = p;
  }
}

std::optional<Residue> Modulus::inverse(Residue a) const { return inverse_mod(a, n_); }

bool Modulus::is_unit(Residue a) const { return std::gcd(a % n_, n_) == 1; }

// ---------------------------------------------------------------- ModVector

ModVector::ModVector(Modulus modulus, std::size_t dim) : modulus_(modulus), entries_(dim, 0) {
  check_dim(dim);
}

ModVector::ModVector(Modulus modulus, std::vector<Residue> entries)
    : modulus_(modulus), entries_(std::move(entries)) {
  check_dim(entries_.size());
  for (Residue& x : entries_) x %= modulus_.value();
}

ModVector ModVector::basis(Modulus modulus, std::size_t dim, std::size_t i) {
  ModVector v(modulus, dim);
  v.entries_.at(i) = 1;
  return v;
}

bool ModVector::is_zero() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](Residue x) { return x == 0; });
}

// ---------------------------------------------------------------- ModMatrix

ModMatrix::ModMatrix(Modulus modulus, std::size_t dim)
    : modulus_(modulus), dim_(dim), entries_(dim * dim, 0) {
  check_dim(dim);
}

ModMatrix::ModMatrix(Modulus modulus, std::size_t dim, std::vector<Residue> row_major)
    : modulus_(modulus), dim_(dim), entries_(std::move(row_major)) {
  check_dim(dim);
  if (entries_.size() != dim * dim) {
    throw DomainError("expected " + std::to_string(dim * dim) + " entries, got " +
                      std::to_string(entries_.size()));
  }
  for (Residue& x : entries_) x %= modulus_.value();
}

ModMatrix ModMatrix::identity(Modulus modulus, std::size_t dim) {
  ModMatrix m(modulus, dim);
  for (std::size_t i = 0; i < dim; ++i) m.entries_[i * dim + i] = 1;
  return m;
}

ModMatrix ModMatrix::from_rows(Modulus modulus,
                               std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  const std::size_t dim = rows.size();
  ModMatrix m(modulus, dim);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != dim) throw DomainError("from_rows: matrix is not square");
    std::size_t c = 0;
    for (std::int64_t x : row) m.set(r, c++, x);
    ++r;
  }
  return m;
}

ModMatrix ModMatrix::diagonal(Modulus modulus, std::span<const std::int64_t> diag) {
  ModMatrix m(modulus, diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

ModVector ModMatrix::column(std::size_t c) const {
  std::vector<Residue> v(dim_);
  for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
  return {modulus_, std::move(v)};
}

ModVector ModMatrix::apply(const ModVector& v) const {
  if (!(v.modulus() == modulus_) || v.dim() != dim_) {
    throw DomainError("apply: modulus/dimension mismatch");
  }
  const std::uint64_t n = modulus_.value();
  std::vector<Residue> out(dim_, 0);
  for (std::size_t r = 0; r < dim_; ++r) {
    Residue acc = 0;
    for (std::size_t c = 0; c < dim_; ++c) acc = (acc + (*this)(r, c) * v[c]) % n;
    out[r] = acc;
  }
  return {modulus_, std::move(out)};
}

ModMatrix ModMatrix::transpose() const {
  ModMatrix t(modulus_, dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) t.entries_[c * dim_ + r] = (*this)(r, c);
  }
  return t;
}

bool ModMatrix::is_identity() const noexcept {
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      if ((*this)(r, c) != (r == c ? 1U : 0U)) return false;
    }
  }
  return true;
}

ModMatrix mat_mul(const ModMatrix& a, const ModMatrix& b) {
  check_same_shape(a, b, "mat_mul");
  const std::size_t d = a.dim();
  const std::uint64_t n = a.modulus().value();
  std::vector<Residue> out(d * d, 0);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      const Residue x = a(r, k);
      if (x == 0) continue;
      for (std::size_t c = 0; c < d; ++c) out[r * d + c] = (out[r * d + c] + x * b(k, c)) % n;
    }
  }
  return {a.modulus(), d, std::move(out)};
}

ModMatrix mat_sub(const ModMatrix& a, const ModMatrix& b) {
  check_same_shape(a, b, "mat_sub");
  const auto& m = a.modulus();
  std::vector<Residue> out(a.entries().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.sub(a.entries()[i], b.entries()[i]);
  return {m, a.dim(), std::move(out)};
}

Residue determinant(const ModMatrix& a) {
  const auto primes = a.modulus().primes();
  std::vector<Residue> per_prime;
  per_prime.reserve(primes.size());
  for (std::uint64_t p : primes) {
    std::vector<Residue> m(a.entries().begin(), a.entries().end());
    for (Residue& x : m) x %= p;
    per_prime.push_back(field::determinant(std::move(m), a.dim(), p));
  }
  return crt_combine(primes, per_prime, a.modulus().value());
}

ModMatrix mat_inv(const ModMatrix& a) {
  const std::size_t d = a.dim();
  std::vector<std::pair<ModMatrix, std::uint64_t>> parts;
  for (std::uint64_t p : a.modulus().primes()) {
    // [A | I] -> [I | A^-1]
    std::vector<Residue> aug(d * 2 * d, 0);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) aug[r * 2 * d + c] = a(r, c) % p;
      aug[r * 2 * d + d + r] = 1;
    }
    const auto pivots = rref(aug, d, 2 * d, p, d);
    if (pivots.size() != d) {
      throw NotInvertible("matrix is not invertible modulo " + std::to_string(p) +
                          " (modulus " + std::to_string(a.modulus().value()) + ")");
    }
    std::vector<Residue> inv(d * d);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) inv[r * d + c] = aug[r * 2 * d + d + c];
    }
    parts.emplace_back(ModMatrix(Modulus(p), d, std::move(inv)), p);
  }
  if (parts.size() == 1) return ModMatrix(a.modulus(), d, {parts[0].first.entries().begin(),
                                                           parts[0].first.entries().end()});
  return crt_lift(parts);
}

std::vector<ModVector> fixed_space(const ModMatrix& a) {
  const std::uint64_t p = require_prime_modulus(a.modulus(), "fixed_space");
  const std::size_t d = a.dim();
  std::vector<Residue> m(a.entries().begin(), a.entries().end());
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = (m[i * d + i] + p - 1) % p;
  std::vector<ModVector> out;
  for (auto& v : field::kernel(std::move(m), d, d, p)) out.emplace_back(a.modulus(), std::move(v));
  return out;
}

bool has_eigenvalue_one(const ModMatrix& a) {
  const std::uint64_t p = require_prime_modulus(a.modulus(), "has_eigenvalue_one");
  const std::size_t d = a.dim();
  std::vector<Residue> m(a.entries().begin(), a.entries().end());
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = (m[i * d + i] + p - 1) % p;
  return field::determinant(std::move(m), d, p) == 0;
}

ModMatrix crt_lift(std::span<const std::pair<ModMatrix, std::uint64_t>> residues) {
  if (residues.empty()) throw DomainError("crt_lift: no residues");
  const std::size_t d = residues.front().first.dim();
  std::vector<std::uint64_t> primes;
  std::uint64_t n = 1;
  for (const auto& [m, p] : residues) {
    if (!is_prime(p)) throw DomainError("crt_lift: " + std::to_string(p) + " is not prime");
    if (m.dim() != d) throw DomainError("crt_lift: dimension mismatch");
    if (m.modulus().value() % p != 0) {
      throw DomainError("crt_lift: matrix modulus is not divisible by " + std::to_string(p));
    }
    if (std::find(primes.begin(), primes.end(), p) != primes.end()) {
      throw DomainError("crt_lift: duplicate prime " + std::to_string(p));
    }
    primes.push_back(p);
    n *= p;
  }
  std::vector<Residue> values(primes.size());
  std::vector<Residue> out(d * d);
  for (std::size_t i = 0; i < d * d; ++i) {
    for (std::size_t j = 0; j < primes.size(); ++j) values[j] = residues[j].first.entries()[i];
    out[i] = crt_combine(primes, values, n);
  }
  return {Modulus(n), d, std::move(out)};
}

ModMatrix reduce_mod(const ModMatrix& a, std::uint64_t prime) {
  if (!a.modulus().divisible_by(prime) || !is_prime(prime)) {
    throw DomainError("reduce_mod: " + std::to_string(prime) + " is not a prime divisor of " +
                      std::to_string(a.modulus().value()));
  }
  return {Modulus(prime), a.dim(), {a.entries().begin(), a.entries().end()}};
}

ModVector reduce_mod(const ModVector& v, std::uint64_t prime) {
  if (!v.modulus().divisible_by(prime) || !is_prime(prime)) {
    throw DomainError("reduce_mod: " + std::to_string(prime) + " is not a prime divisor of " +
                      std::to_string(v.modulus().value()));
  }
  return {Modulus(prime), {v.entries().begin(), v.entries().end()}};
}

// ---------------------------------------------------------------- field

namespace field {

std::size_t rank(std::vector<Residue> m, std::size_t rows, std::size_t cols, std::uint64_t p) {
  return rref(m, rows, cols, p, cols).size();
}

std::vector<std::vector<Residue>> kernel(std::vector<Residue> m, std::size_t rows,
                                         std::size_t cols, std::uint64_t p) {
  const auto pivots = rref(m, rows, cols, p, cols);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Residue>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Residue> v(cols, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = (p - m[i * cols + free]) % p;
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<AffineSolution> solve(std::vector<Residue> m, std::size_t rows, std::size_t cols,
                                    std::span<const Residue> rhs, std::uint64_t p) {
  std::vector<Residue> aug(rows * (cols + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) aug[r * (cols + 1) + c] = m[r * cols + c] % p;
    aug[r * (cols + 1) + cols] = rhs[r] % p;
  }
  const auto pivots = rref(aug, rows, cols + 1, p, cols);
  for (std::size_t r = pivots.size(); r < rows; ++r) {
    if (aug[r * (cols + 1) + cols] != 0) return std::nullopt;
  }
  AffineSolution sol;
  sol.particular.assign(cols, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    sol.particular[pivots[i]] = aug[i * (cols + 1) + cols];
  }
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Residue> v(cols, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      v[pivots[i]] = (p - aug[i * (cols + 1) + free]) % p;
    }
    sol.kernel.push_back(std::move(v));
  }
  return sol;
}

Residue determinant(std::vector<Residue> m, std::size_t dim, std::uint64_t p) {
  Residue det = 1;
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t sel = col;
    while (sel < dim && m[sel * dim + col] == 0) ++sel;
    if (sel == dim) return 0;
    if (sel != col) {
      std::swap_ranges(m.begin() + static_cast<std::ptrdiff_t>(sel * dim),
                       m.begin() + static_cast<std::ptrdiff_t>((sel + 1) * dim),
                       m.begin() + static_cast<std::ptrdiff_t>(col * dim));
      det = (p - det) % p;
    }
    const Residue pivot = m[col * dim + col];
    det = det * pivot % p;
    const Residue inv = *inverse_mod(pivot, p);
    for (std::size_t r = col + 1; r < dim; ++r) {
      const Residue f = m[r * dim + col] * inv % p;
      if (f == 0) continue;
      for (std::size_t c = col; c < dim; ++c) {
        m[r * dim + c] = (m[r * dim + c] + (p - f) * m[col * dim + c]) % p;
      }
    }
  }
  return det;
}

}  // namespace field

// ---------------------------------------------------------------- text format

std::string dump_header(std::size_t dim, std::uint64_t n) {
  return "# dim=" + std::to_string(dim) + " mod=" + std::to_string(n);
}

std::string to_line(const ModMatrix& a) {
  std::string out;
  out.reserve(a.entries().size() * 3);
  bool first = true;
  for (Residue x : a.entries()) {
    if (!first) out.push_back(',');
    first = false;
    out += std::to_string(x);
  }
  return out;
}

ModMatrix parse_line(std::string_view line, const Modulus& modulus, std::size_t dim) {
  std::vector<Residue> entries;
  entries.reserve(dim * dim);
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p < end) {
    Residue x = 0;
    auto [next, ec] = std::from_chars(p, end, x);
    if (ec != std::errc{}) throw DomainError("parse_line: malformed entry in '" + std::string(line) + "'");
    if (x >= modulus.value()) throw DomainError("parse_line: entry out of range");
    entries.push_back(x);
    p = next;
    if (p < end) {
      if (*p != ',') throw DomainError("parse_line: expected ',' in '" + std::string(line) + "'");
      ++p;
    }
  }
  return {modulus, dim, std::move(entries)};
}

std::pair<std::size_t, std::uint64_t> parse_header(std::string_view line) {
  constexpr std::string_view kDim = "# dim=";
  constexpr std::string_view kMod = " mod=";
  if (line.substr(0, kDim.size()) != kDim) throw DomainError("dump header missing");
  const auto mod_pos = line.find(kMod);
  if (mod_pos == std::string_view::npos) throw DomainError("dump header missing mod=");
  std::size_t dim = 0;
  std::uint64_t n = 0;
  const auto dim_part = line.substr(kDim.size(), mod_pos - kDim.size());
  const auto mod_part = line.substr(mod_pos + kMod.size());
  if (std::from_chars(dim_part.data(), dim_part.data() + dim_part.size(), dim).ec != std::errc{} ||
      std::from_chars(mod_part.data(), mod_part.data() + mod_part.size(), n).ec != std::errc{}) {
    throw DomainError("malformed dump header '" + std::string(line) + "'");
  }
  return {dim, n};
}

}  // namespace symon
