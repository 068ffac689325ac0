#include "symon/report.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>

#include "symon/arith.hpp"
#include "symon/error.hpp"

namespace symon {

namespace {

Json q_json(QParam q) { return q.to_string(); }

std::string format_entries(std::span<const Residue> entries) {
  std::string line;
  char buf[24];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) line.push_back(',');
    const auto res = std::to_chars(buf, buf + sizeof buf, entries[i]);
    line.append(buf, res.ptr);
  }
  return line;
}

std::string series_kind(SeriesKind k) {
  return k == SeriesKind::PartADensity ? "part-a" : "part-b";
}

}  // namespace

std::string rational_string(Rational r) {
  r.canonicalize();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Json to_json(const RealBound& b) {
  Json j;
  j["lower"] = rational_string(b.lower);
  j["upper"] = rational_string(b.upper);
  j["value"] = b.value();
  return j;
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- verify-counts

Json to_json(const VerifyReport& report) {
  Json j;
  j["command"] = "verify-counts";
  Json grid;
  grid["g"] = report.grid.genera;
  grid["ell"] = report.grid.ells;
  Json qs = Json::array();
  for (const auto& q : report.grid.qs) qs.push_back(q_json(q));
  grid["q"] = qs;
  grid["strategy"] = std::string(to_string(report.grid.strategy));
  j["grid"] = grid;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json row;
    row["identity"] = c.identity;
    row["g"] = c.g;
    if (c.ell) row["ell"] = *c.ell;
    if (c.n) row["n"] = *c.n;
    if (c.q) row["q"] = *c.q;
    if (c.lambda) row["lambda"] = *c.lambda;
    row["relation"] = c.relation;
    row["expected"] = c.expected;
    row["actual"] = c.actual;
    row["ok"] = c.ok;
    checks.push_back(std::move(row));
  }
  j["checks"] = std::move(checks);
  j["passed"] = report.checks.size() - report.failed();
  j["failed"] = report.failed();
  j["ok"] = report.ok();
  return j;
}

// ---------------------------------------------------------------- series

Json to_json(const SeriesReport& report) {
  Json j;
  j["kind"] = series_kind(report.kind);
  j["g"] = report.g;
  if (report.kind == SeriesKind::PartBBound) {
    j["e"] = report.e;
  } else {
    j["q"] = q_json(report.q);
  }
  j["ell_max"] = report.ell_max;
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row;
    row["ell"] = r.ell;
    row["term_num"] = r.term.get_num().get_str();
    row["term_den"] = r.term.get_den().get_str();
    row["partial_num"] = r.partial.get_num().get_str();
    row["partial_den"] = r.partial.get_den().get_str();
    row["diagnostic"] = r.diagnostic;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  if (!report.rows.empty()) j["partial_sum"] = report.rows.back().partial.get_d();
  if (report.kind == SeriesKind::PartBBound) {
    j["decay_exponent"] = report.decay_exponent;
    j["tail_bound"] = report.tail_bound ? Json(*report.tail_bound) : Json(nullptr);
  }
  return j;
}

std::string to_csv(const SeriesReport& report) {
  std::string out = "ell,term_num,term_den,partial_num,partial_den,diagnostic\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.ell) + "," + r.term.get_num().get_str() + "," +
           r.term.get_den().get_str() + "," + r.partial.get_num().get_str() + "," +
           r.partial.get_den().get_str() + "," + Json(r.diagnostic).dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- simulations

namespace {

Json header_json(const SimulationHeader& h) {
  Json j;
  j["event"] = h.event;
  j["g"] = h.g;
  if (h.n) {
    j["n"] = *h.n;
  } else {
    j["ell_range"] = h.ell_range;
  }
  j["q"] = q_json(h.q);
  j["e"] = h.e;
  j["seed"] = h.seed;
  return j;
}

void append_estimate(Json& j, const EventEstimate& est) {
  j["n_samples"] = est.n_samples;
  j["hits"] = est.hits;
  j["estimate"] = rational_string(make_rational(big(est.hits), big(est.n_samples)));
  j["estimate_decimal"] = est.estimate;
  j["std_error"] = est.std_error;
  if (est.exact_value) {
    j["exact_value"] = rational_string(*est.exact_value);
    j["exact_value_decimal"] = est.exact_value->get_d();
  }
  if (est.bound) j["bound"] = to_json(*est.bound);
}

}  // namespace

Json to_json(const SimulationHeader& header, const EventEstimate& est) {
  Json j = header_json(header);
  append_estimate(j, est);
  if (est.exact_value && est.std_error > 0) {
    j["z_score"] = (est.estimate - est.exact_value->get_d()) / est.std_error;
  }
  return j;
}

Json to_json(const SimulationHeader& header, const IndependenceReport& report) {
  Json j = header_json(header);
  j["n_samples"] = report.joint.n_samples;
  Json singles = Json::array();
  for (const auto& s : report.singles) {
    Json row;
    row["event"] = s.event_name;
    append_estimate(row, s);
    singles.push_back(std::move(row));
  }
  j["singles"] = std::move(singles);
  Json joint;
  joint["event"] = report.joint.event_name;
  append_estimate(joint, report.joint);
  j["joint"] = std::move(joint);
  j["product_of_marginals"] = report.product_of_marginals;
  j["combined_std_error"] = report.combined_std_error;
  const double diff = report.joint.estimate - report.product_of_marginals;
  j["deviation_sigmas"] = report.combined_std_error > 0 ? diff / report.combined_std_error : 0.0;
  j["within_4_sigma"] = report.within(4);
  return j;
}

Json to_json(const BorelCantelliReport& r) {
  Json j;
  j["event"] = r.regime == BorelCantelliRegime::PartA ? "borel-cantelli-part-a"
                                                       : "borel-cantelli-part-b";
  j["g"] = r.g;
  j["ell_range"] = r.ells;
  j["q"] = q_json(r.q);
  j["e"] = r.e;
  j["seed"] = r.seed;
  j["n_samples"] = r.n_samples;
  j["threshold"] = r.threshold;
  Json per_ell = Json::array();
  for (std::size_t k = 0; k < r.ells.size(); ++k) {
    Json row;
    row["ell"] = r.ells[k];
    row["hits"] = r.hits_per_ell[k];
    per_ell.push_back(std::move(row));
  }
  j["hits_per_ell"] = std::move(per_ell);
  j["hit_count_histogram"] = r.histogram;
  j["mean_hits"] = r.mean_hits;
  j["mean_std_error"] = r.mean_std_error;
  j["expected_mean"] = r.expected_mean;
  j["streams_hit_beyond_threshold"] = r.streams_hit_beyond;
  j["streams_zero_beyond_threshold"] = r.streams_zero_beyond;
  if (r.expected_fraction_hit_beyond) {
    j["expected_fraction_hit_beyond"] = *r.expected_fraction_hit_beyond;
  }
  j["note"] = "finite-range evidence only";
  return j;
}

// ---------------------------------------------------------------- orders

Json orders_report(const GroupContext& ctx) {
  Json j;
  j["g"] = ctx.g();
  j["n"] = ctx.modulus().value();
  j["q"] = q_json(ctx.q());
  Json per = Json::array();
  for (std::uint64_t p : ctx.modulus().primes()) {
    Json row;
    row["ell"] = p;
    row["sp_order"] = sp_order(ctx.g(), p).get_str();
    row["gsp_q_order"] = gsp_q_order(GroupContext(ctx.g(), Modulus(p), ctx.q())).get_str();
    per.push_back(std::move(row));
  }
  j["primes"] = std::move(per);
  j["q_order"] = ctx.q().is_infinite() ? Json(nullptr) : Json(ctx.q_order());
  j["degenerate_q"] = ctx.degenerate_q();
  j["gsp_q_order"] = gsp_q_order(ctx).get_str();
  return j;
}

// ---------------------------------------------------------------- set dumps

Json special_set_sidecar(const SpecialSet& set) {
  const auto& ctx = set.context();
  Json j;
  j["g"] = ctx.g();
  j["ell"] = set.prime();
  j["q"] = q_json(ctx.q());
  j["level"] = std::string(to_string(set.level()));
  if (set.level() != SetLevel::SQUnion) j["lambda"] = set.multipliers().front();
  j["strategy"] = std::string(to_string(set.strategy()));
  j["cardinality"] = set.cardinality().get_str();
  j["seed-independent"] = true;
  return j;
}

void write_set_dump(std::ostream& out, const SpecialSet& set) {
  if (!set.materialized()) throw DomainError("only materialized sets can be dumped");
  const std::size_t d = set.context().dim();
  const MatrixPacker packer(set.prime(), d);
  std::vector<Residue> entries(d * d);
  out << dump_header(d, set.prime()) << '\n';
  std::string buffer;
  for (std::uint64_t key : set.keys()) {
    packer.unpack(key, entries);
    buffer += format_entries(entries);
    buffer.push_back('\n');
    if (buffer.size() > (1U << 20U)) {
      out << buffer;
      buffer.clear();
    }
  }
  out << buffer;
}

SetDump read_set_dump(std::istream& in) {
  SetDump dump;
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty set dump");
  std::tie(dump.dim, dump.modulus) = parse_header(line);
  while (std::getline(in, line)) {
    if (!line.empty()) dump.lines.push_back(std::move(line));
  }
  return dump;
}

Json verify_set_dump(const SetDump& dump, const Json& sidecar, unsigned threads,
                     std::uint64_t budget) {
  Json checks = Json::array();
  bool all_ok = true;
  auto record = [&](const std::string& name, bool ok, const std::string& detail) {
    Json c;
    c["check"] = name;
    c["ok"] = ok;
    c["detail"] = detail;
    checks.push_back(std::move(c));
    all_ok = all_ok && ok;
  };

  const unsigned g = sidecar.at("g").get<unsigned>();
  const std::uint64_t ell = sidecar.at("ell").get<std::uint64_t>();
  const QParam q = QParam::parse(sidecar.at("q").get<std::string>());
  const SetLevel level = parse_level(sidecar.at("level").get<std::string>());
  const BStrategy strategy = parse_strategy(sidecar.at("strategy").get<std::string>());
  const std::optional<Residue> lambda =
      sidecar.contains("lambda") ? std::optional<Residue>(sidecar.at("lambda").get<Residue>())
                                 : std::nullopt;
  const GroupContext ctx(g, Modulus(ell), q);

  record("header", dump.dim == ctx.dim() && dump.modulus == ell,
         "dim=" + std::to_string(dump.dim) + " mod=" + std::to_string(dump.modulus));
  const std::string expected_card = sidecar.at("cardinality").get<std::string>();
  record("count", std::to_string(dump.lines.size()) == expected_card,
         std::to_string(dump.lines.size()) + " lines, sidecar " + expected_card);

  const MatrixPacker packer(ell, ctx.dim());
  std::vector<std::uint64_t> keys;
  keys.reserve(dump.lines.size());
  std::uint64_t bad_member = 0;
  std::uint64_t bad_fixed = 0;
  bool sorted = true;
  for (const auto& line : dump.lines) {
    const ModMatrix a = parse_line(line, ctx.modulus(), ctx.dim());
    const std::uint64_t key = packer.pack(a.entries());
    if (!keys.empty() && keys.back() >= key) sorted = false;
    keys.push_back(key);
    const auto mult = multiplier(ctx, a);
    if (!mult || !ctx.allows_multiplier(*mult) || (lambda && *mult != *lambda)) ++bad_member;
    const auto fixed = fixed_space(a);
    if (level == SetLevel::S0) {
      const bool e1_line = fixed.size() == 1 &&
                           std::all_of(fixed[0].entries().begin() + 1, fixed[0].entries().end(),
                                       [](Residue x) { return x == 0; });
      if (!e1_line) ++bad_fixed;
    } else if (fixed.empty()) {
      ++bad_fixed;
    }
  }
  record("sorted", sorted, "strictly increasing row-major order");
  record("membership", bad_member == 0, std::to_string(bad_member) + " bad multipliers");
  record("fixed_space", bad_fixed == 0,
         std::to_string(bad_fixed) +
             (level == SetLevel::S0 ? " without the e1 line as fixed space"
                                    : " without a nonzero fixed vector"));

  BuildOptions opts;
  opts.threads = threads;
  opts.budget = budget;
  opts.max_materialize_prime = std::max<std::uint64_t>(ell, opts.max_materialize_prime);
  std::vector<Residue> lambdas =
      lambda ? std::vector<Residue>{*lambda} : ctx.allowed_multipliers();
  const SpecialSet rebuilt = build_special_set(ctx, level, lambdas, strategy, opts);
  const bool same = std::equal(keys.begin(), keys.end(), rebuilt.keys().begin(),
                               rebuilt.keys().end());
  record("rebuild", same, "dump equals a fresh build with the sidecar parameters");

  Json j;
  j["command"] = "special-set verify";
  j["sidecar"] = sidecar;
  j["checks"] = std::move(checks);
  j["ok"] = all_ok;
  return j;
}

}  // namespace symon
