#pragma once

// The exact-identity suite behind `symon verify-counts`: closed-form counts
// against enumeration and materialized special sets over a (g, l, q) grid.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symon/specialsets.hpp"
#include "symon/sympgroup.hpp"

namespace symon {

struct IdentityCheck {
  std::string identity;
  unsigned g = 0;
  std::optional<std::uint64_t> ell;
  std::optional<std::uint64_t> n;
  std::optional<std::string> q;
  std::optional<Residue> lambda;
  std::string relation = "==";  // or ">="
  std::string expected;
  std::string actual;
  bool ok = false;
};

struct VerifyGrid {
  std::vector<unsigned> genera{2};
  std::vector<std::uint64_t> ells{3, 5, 7};
  std::vector<QParam> qs{QParam::finite(2), QParam::infinity()};
  BStrategy strategy = BStrategy::LexCanonical;
  unsigned threads = 1;
  std::uint64_t budget = enumeration_budget();
  std::uint64_t max_materialize_prime = 13;
  // Negative control: perturbs the S0 closed form so the suite must fail.
  bool tamper = false;
};

struct VerifyReport {
  VerifyGrid grid;
  std::vector<IdentityCheck> checks;

  std::size_t failed() const;
  bool ok() const { return failed() == 0; }
};

/// Runs every identity on the grid. Throws DomainError for grids the
/// construction rejects (l = 2, g < 2) and BudgetExceeded when a required
/// enumeration does not fit.
VerifyReport verify_counts(const VerifyGrid& grid);

}  // namespace symon
