#pragma once

// Machine-readable output: JSON reports with a fixed key order, CSV series
// tables, and special-set dumps with their JSON sidecar.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symon/analysis.hpp"
#include "symon/montecarlo.hpp"
#include "symon/specialsets.hpp"
#include "symon/verify.hpp"

namespace symon {

using Json = nlohmann::ordered_json;

/// "num/den", always with an explicit denominator.
std::string rational_string(Rational r);
Json to_json(const RealBound& b);

Json to_json(const VerifyReport& report);
Json to_json(const SeriesReport& report);
std::string to_csv(const SeriesReport& report);

// Common prefix of simulation reports.
struct SimulationHeader {
  std::string event;
  unsigned g = 0;
  std::optional<std::uint64_t> n;      // single-modulus runs
  std::vector<std::uint64_t> ell_range;  // Borel-Cantelli runs
  QParam q = QParam::infinity();
  unsigned e = 1;
  std::uint64_t seed = 0;
};

Json to_json(const SimulationHeader& header, const EventEstimate& est);
Json to_json(const SimulationHeader& header, const IndependenceReport& report);
Json to_json(const BorelCantelliReport& report);

/// Group orders for g, n, q: |Sp| per prime, ord_n q and |GSp^(q)|.
Json orders_report(const GroupContext& ctx);

Json special_set_sidecar(const SpecialSet& set);
/// Header line, then one sorted matrix per line.
void write_set_dump(std::ostream& out, const SpecialSet& set);

struct SetDump {
  std::size_t dim = 0;
  std::uint64_t modulus = 0;
  std::vector<std::string> lines;  // in file order, header excluded
};
SetDump read_set_dump(std::istream& in);

/// Re-checks a dump against its sidecar: header, strict sort order, count,
/// membership and fixed-space invariants of every line, and equality with a
/// fresh rebuild from the sidecar parameters.
Json verify_set_dump(const SetDump& dump, const Json& sidecar, unsigned threads,
                     std::uint64_t budget);

/// Pretty-printed with two-space indent and a trailing newline.
std::string render(const Json& j);

}  // namespace symon
