// symon: verification suites, special-set dumps, series reports and
// simulations for symplectic similitude groups over Z/n.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or budget error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "symon/analysis.hpp"
#include "symon/arith.hpp"
#include "symon/error.hpp"
#include "symon/montecarlo.hpp"
#include "symon/report.hpp"
#include "symon/specialsets.hpp"
#include "symon/sympgroup.hpp"
#include "symon/verify.hpp"

namespace {

using namespace symon;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Global {
  unsigned threads = 1;
  std::uint64_t budget = 0;
};

struct UsageError : Error {
  using Error::Error;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + out_path);
  f << text;
}

std::vector<QParam> parse_qs(const std::vector<std::string>& texts) {
  std::vector<QParam> out;
  for (const auto& t : texts) out.push_back(QParam::parse(t));
  return out;
}

void require_prime(std::uint64_t p, const char* what) {
  if (!is_prime(p)) throw UsageError(std::string(what) + " must be prime, got " + std::to_string(p));
}

SimulationOptions sim_options(const Global& global, const std::string& strategy) {
  SimulationOptions o;
  o.strategy = parse_strategy(strategy);
  o.threads = global.threads;
  o.budget = global.budget;
  return o;
}

// ---------------------------------------------------------------- verify-counts

struct VerifyArgs {
  std::vector<unsigned> genera{2};
  std::vector<std::uint64_t> ells{3, 5, 7};
  std::vector<std::string> qs{"2", "inf"};
  std::string strategy = "lex";
  std::uint64_t max_materialize = 13;
  bool tamper = false;
  std::string out;
};

int run_verify(const Global& global, const VerifyArgs& a) {
  VerifyGrid grid;
  grid.genera = a.genera;
  grid.ells = a.ells;
  grid.qs = parse_qs(a.qs);
  grid.strategy = parse_strategy(a.strategy);
  grid.threads = global.threads;
  grid.budget = global.budget;
  grid.max_materialize_prime = a.max_materialize;
  grid.tamper = a.tamper;
  const VerifyReport report = verify_counts(grid);
  emit(render(to_json(report)), a.out);
  if (!report.ok()) {
    std::cerr << "verify-counts: " << report.failed() << " identities failed\n";
    return kFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------- special-set

struct SetArgs {
  unsigned g = 2;
  std::uint64_t ell = 5;
  std::string q = "inf";
  std::string level = "Sq";
  std::optional<Residue> lambda;
  std::string strategy = "lex";
  std::uint64_t max_materialize = 13;
  std::string out;
  std::string in;
  std::string sidecar;
};

int run_set_build(const Global& global, const SetArgs& a) {
  require_prime(a.ell, "--ell");
  const GroupContext ctx(a.g, Modulus(a.ell), QParam::parse(a.q));
  const SetLevel level = parse_level(a.level);
  std::vector<Residue> lambdas;
  if (level == SetLevel::SQUnion) {
    if (a.lambda) throw UsageError("--lambda applies to the S0 and S levels only");
    lambdas = ctx.allowed_multipliers();
  } else {
    if (!a.lambda) throw UsageError("--lambda is required for the S0 and S levels");
    if (!ctx.allows_multiplier(*a.lambda % a.ell)) {
      throw UsageError("lambda " + std::to_string(*a.lambda) + " is not admitted by q = " + a.q);
    }
    lambdas = {*a.lambda};
  }
  BuildOptions opts;
  opts.threads = global.threads;
  opts.budget = global.budget;
  opts.max_materialize_prime = a.max_materialize;
  opts.materialize = !a.out.empty();
  const SpecialSet set = build_special_set(ctx, level, lambdas, parse_strategy(a.strategy), opts);
  const std::string sidecar = render(special_set_sidecar(set));
  if (!a.out.empty()) {
    {
      std::ofstream f(a.out, std::ios::binary);
      if (!f) throw UsageError("cannot write " + a.out);
      write_set_dump(f, set);
    }
    std::ofstream s(a.out + ".json", std::ios::binary);
    if (!s) throw UsageError("cannot write " + a.out + ".json");
    s << sidecar;
  }
  std::cout << sidecar;
  return kOk;
}

int run_set_verify(const Global& global, const SetArgs& a) {
  std::ifstream dump_file(a.in, std::ios::binary);
  if (!dump_file) throw UsageError("cannot read " + a.in);
  const std::string sidecar_path = a.sidecar.empty() ? a.in + ".json" : a.sidecar;
  std::ifstream sidecar_file(sidecar_path, std::ios::binary);
  if (!sidecar_file) throw UsageError("cannot read " + sidecar_path);
  Json sidecar;
  try {
    sidecar = Json::parse(sidecar_file);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed sidecar " + sidecar_path + ": " + e.what());
  }
  const SetDump dump = read_set_dump(dump_file);
  const Json report = verify_set_dump(dump, sidecar, global.threads, global.budget);
  emit(render(report), a.out);
  return report.at("ok").get<bool>() ? kOk : kFailed;
}

// ---------------------------------------------------------------- series

struct SeriesArgs {
  unsigned g = 2;
  unsigned e = 2;
  std::string q = "2";
  std::uint64_t ell_max = 10000;
  std::string format = "json";
  std::string out;
};

int run_series(const Global& global, const SeriesArgs& a, bool part_a) {
  const SeriesReport report = part_a ? part_a_series(a.g, QParam::parse(a.q), a.ell_max, global.threads)
                                     : part_b_series(a.g, a.e, a.ell_max, global.threads);
  emit(a.format == "csv" ? to_csv(report) : render(to_json(report)), a.out);
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  unsigned g = 2;
  std::uint64_t n = 5;
  std::optional<std::uint64_t> ell;
  std::optional<std::uint64_t> mu_n;
  std::vector<std::uint64_t> ells;
  std::uint64_t ell_min = 3;
  std::uint64_t ell_max = 13;
  std::optional<std::uint64_t> threshold;
  std::string q = "2";
  unsigned e = 1;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  std::string strategy = "lex";
  std::string out;
};

int run_hit_frequency(const Global& global, const SimArgs& a) {
  const GroupContext ctx(a.g, Modulus(a.n), QParam::parse(a.q));
  const auto primes = ctx.modulus().primes();
  std::vector<std::uint64_t> ells(primes.begin(), primes.end());
  const Event event = ells.size() == 1 ? Event::hit(ells.front()) : Event::joint(ells);
  const EventEstimate est =
      estimate_event(ctx, event, a.e, a.samples, a.seed, sim_options(global, a.strategy));
  SimulationHeader h{event.name(), a.g, a.n, {}, ctx.q(), a.e, a.seed};
  emit(render(to_json(h, est)), a.out);
  return kOk;
}

int run_independence(const Global& global, const SimArgs& a) {
  if (a.ells.size() < 2) throw UsageError("--ells needs at least two primes");
  std::uint64_t n = 1;
  for (auto p : a.ells) {
    require_prime(p, "--ells entry");
    n *= p;
  }
  const GroupContext ctx(a.g, Modulus(n), QParam::parse(a.q));
  const IndependenceReport report =
      independence_experiment(ctx, a.ells, a.samples, a.seed, sim_options(global, a.strategy));
  SimulationHeader h{"independence", a.g, n, {}, ctx.q(), 1, a.seed};
  emit(render(to_json(h, report)), a.out);
  return kOk;
}

int run_mu_x(const Global& global, const SimArgs& a) {
  if (!a.ell) throw UsageError("--ell is required");
  require_prime(*a.ell, "--ell");
  const std::uint64_t n = a.mu_n.value_or(*a.ell);
  if (n % *a.ell != 0) throw UsageError("--n must be divisible by --ell");
  const GroupContext ctx(a.g, Modulus(n), QParam::parse(a.q));
  const Event event = Event::x(*a.ell);
  const EventEstimate est =
      estimate_event(ctx, event, a.e, a.samples, a.seed, sim_options(global, a.strategy));
  SimulationHeader h{event.name(), a.g, n, {}, ctx.q(), a.e, a.seed};
  emit(render(to_json(h, est)), a.out);
  return kOk;
}

int run_borel_cantelli(const Global& global, const SimArgs& a) {
  std::vector<std::uint64_t> ells = a.ells;
  if (ells.empty()) {
    for (auto p : primes_in_range(a.ell_min, a.ell_max)) ells.push_back(p);
  }
  for (auto p : ells) require_prime(p, "--ells entry");
  const QParam q = QParam::parse(a.q);
  // Primes dividing q are not part of the range.
  std::erase_if(ells, [&q](std::uint64_t p) { return !q.is_infinite() && q.value() % p == 0; });
  const BorelCantelliReport report = borel_cantelli_experiment(
      a.g, q, ells, a.e, a.samples, a.seed, a.threshold, sim_options(global, a.strategy));
  emit(render(to_json(report)), a.out);
  return kOk;
}

// ---------------------------------------------------------------- orders / enumerate

struct GroupArgs {
  unsigned g = 2;
  std::uint64_t n = 3;
  std::string q = "inf";
  std::optional<Residue> lambda;
  bool count_only = false;
  std::string out;
};

int run_orders(const GroupArgs& a) {
  const GroupContext ctx(a.g, Modulus(a.n), QParam::parse(a.q));
  emit(render(orders_report(ctx)), a.out);
  return kOk;
}

int run_enumerate(const Global& global, const GroupArgs& a) {
  require_prime(a.n, "--n");
  const GroupContext ctx(a.g, Modulus(a.n), QParam::parse(a.q));
  if (a.lambda && !ctx.allows_multiplier(*a.lambda % a.n)) {
    throw UsageError("lambda " + std::to_string(*a.lambda) + " is not admitted by q = " + a.q);
  }
  const std::optional<Residue> lambda =
      a.lambda ? std::optional<Residue>(*a.lambda % a.n) : std::nullopt;
  if (a.count_only) {
    std::uint64_t count = 0;
    for_each_member(ctx, lambda, [&count](const ModMatrix&) { return ++count, true; },
                    global.budget);
    Json j;
    j["g"] = a.g;
    j["n"] = a.n;
    j["q"] = ctx.q().to_string();
    j["lambda"] = lambda ? Json(*lambda) : Json(nullptr);
    j["count"] = std::to_string(count);
    emit(render(j), a.out);
    return kOk;
  }
  std::string text = dump_header(ctx.dim(), a.n) + "\n";
  for_each_member(
      ctx, lambda,
      [&text](const ModMatrix& m) {
        text += to_line(m);
        text += '\n';
        return true;
      },
      global.budget);
  emit(text, a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symon: exact counts, special sets, series and simulations for GSp^(q)_2g(Z/n)"};
  app.require_subcommand(1);
  app.fallthrough();
  Global global;
  std::optional<std::uint64_t> budget_flag;
  app.add_option("--threads", global.threads, "Worker threads; output does not depend on it")
      ->check(CLI::Range(1U, 256U))
      ->capture_default_str();
  app.add_option("--budget", budget_flag,
                 "Enumeration budget in candidate matrices (default: $SYMON_BUDGET or 1e8)");

  // verify-counts
  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-counts", "Run the exact-identity suite over a grid");
  verify->add_option("--g", va.genera, "Genera")->capture_default_str()->delimiter(',');
  verify->add_option("--ell", va.ells, "Primes")->capture_default_str()->delimiter(',');
  verify->add_option("--q", va.qs, "q values (prime powers or inf)")->capture_default_str()->delimiter(',');
  verify->add_option("--strategy", va.strategy, "B selection: lex or remark-g2")->capture_default_str();
  verify->add_option("--max-materialize", va.max_materialize, "Largest l to materialize")
      ->capture_default_str();
  verify->add_option("--out", va.out, "Write the report here instead of stdout");
  verify->add_flag("--tamper-formula", va.tamper)->group("");

  // special-set
  SetArgs sa;
  auto* set_cmd = app.add_subcommand("special-set", "Build or verify special-set dumps");
  set_cmd->require_subcommand(1);
  auto* set_build = set_cmd->add_subcommand("build", "Build S0, S or S^(q) at a prime");
  set_build->add_option("--g", sa.g, "Genus")->capture_default_str();
  set_build->add_option("--ell", sa.ell, "Prime l")->capture_default_str();
  set_build->add_option("--q", sa.q, "Prime power q or inf")->capture_default_str();
  set_build->add_option("--level", sa.level, "S0, S or Sq")->capture_default_str();
  set_build->add_option("--lambda", sa.lambda, "Multiplier for the S0 and S levels");
  set_build->add_option("--strategy", sa.strategy, "B selection: lex or remark-g2")
      ->capture_default_str();
  set_build->add_option("--max-materialize", sa.max_materialize, "Largest l to materialize")
      ->capture_default_str();
  set_build->add_option("--out", sa.out,
                        "Dump path (sidecar at <out>.json); without it only the sidecar is printed");
  auto* set_verify = set_cmd->add_subcommand("verify", "Re-check a dump against its sidecar");
  set_verify->add_option("--in", sa.in, "Dump path")->required();
  set_verify->add_option("--sidecar", sa.sidecar, "Sidecar path (default <in>.json)");
  set_verify->add_option("--out", sa.out, "Write the report here instead of stdout");

  // series
  SeriesArgs ra;
  auto* series = app.add_subcommand("series", "Density and union-bound series over primes");
  series->require_subcommand(1);
  auto* part_a = series->add_subcommand("part-a", "Sum of |S^(q)(l)| / |GSp^(q)(F_l)|");
  part_a->add_option("--g", ra.g, "Genus (>= 2)")->capture_default_str();
  part_a->add_option("--q", ra.q, "Prime power q or inf")->capture_default_str();
  auto* part_b = series->add_subcommand("part-b", "Sum of the projective union bounds");
  part_b->add_option("--g", ra.g, "Genus")->capture_default_str();
  part_b->add_option("--e", ra.e, "Tuple length (>= 2)")->capture_default_str();
  for (auto* sub : {part_a, part_b}) {
    sub->add_option("--ell-max", ra.ell_max, "Largest prime")->capture_default_str();
    sub->add_option("--format", ra.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub->add_option("--out", ra.out, "Write the report here instead of stdout");
  }

  // simulate
  SimArgs ma;
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo experiments");
  simulate->require_subcommand(1);
  auto* hit = simulate->add_subcommand("hit-frequency", "Frequency of special-set hits mod n");
  hit->add_option("--n", ma.n, "Squarefree modulus")->capture_default_str();
  auto* indep = simulate->add_subcommand("independence", "Joint vs product of single hits");
  indep->add_option("--ells", ma.ells, "Primes, comma separated")->delimiter(',')->required();
  auto* mux = simulate->add_subcommand("mu-x", "Frequency of a common fixed vector mod l");
  mux->add_option("--ell", ma.ell, "Prime l")->required();
  mux->add_option("--n", ma.mu_n, "Modulus divisible by l (default l)");
  auto* bc = simulate->add_subcommand("borel-cantelli", "Hit counts over a range of primes");
  bc->add_option("--ells", ma.ells, "Primes, comma separated")->delimiter(',');
  bc->add_option("--ell-min", ma.ell_min, "Smallest prime of the range")->capture_default_str();
  bc->add_option("--ell-max", ma.ell_max, "Largest prime of the range")->capture_default_str();
  bc->add_option("--threshold", ma.threshold, "Split point (default: median of the range)");
  for (auto* sub : {hit, indep, mux, bc}) {
    sub->add_option("--g", ma.g, "Genus")->capture_default_str();
    sub->add_option("--q", ma.q, "Prime power q or inf")->capture_default_str();
    sub->add_option("--samples", ma.samples, "Number of samples")->capture_default_str();
    sub->add_option("--seed", ma.seed, "PRNG seed")->capture_default_str();
    sub->add_option("--strategy", ma.strategy, "B selection: lex or remark-g2")
        ->capture_default_str();
    sub->add_option("--out", ma.out, "Write the report here instead of stdout");
    if (sub != indep) sub->add_option("--e", ma.e, "Tuple length")->capture_default_str();
  }

  // orders / enumerate
  GroupArgs ga;
  auto* orders = app.add_subcommand("orders", "Group orders |Sp| and |GSp^(q)| mod n");
  auto* enumerate = app.add_subcommand("enumerate", "List GSp^(q)_2g(F_l) in lexicographic order");
  for (auto* sub : {orders, enumerate}) {
    sub->add_option("--g", ga.g, "Genus")->capture_default_str();
    sub->add_option("--n", ga.n, "Modulus (prime for enumerate)")->capture_default_str();
    sub->add_option("--q", ga.q, "Prime power q or inf")->capture_default_str();
    sub->add_option("--out", ga.out, "Write the output here instead of stdout");
  }
  enumerate->add_option("--lambda", ga.lambda, "Restrict to one multiplier");
  enumerate->add_flag("--count-only", ga.count_only, "Print only the number of members");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    global.budget = budget_flag.value_or(enumeration_budget());
    if (verify->parsed()) return run_verify(global, va);
    if (set_build->parsed()) return run_set_build(global, sa);
    if (set_verify->parsed()) return run_set_verify(global, sa);
    if (part_a->parsed()) return run_series(global, ra, true);
    if (part_b->parsed()) return run_series(global, ra, false);
    if (hit->parsed()) return run_hit_frequency(global, ma);
    if (indep->parsed()) return run_independence(global, ma);
    if (mux->parsed()) return run_mu_x(global, ma);
    if (bc->parsed()) return run_borel_cantelli(global, ma);
    if (orders->parsed()) return run_orders(ga);
    if (enumerate->parsed()) return run_enumerate(global, ga);
  } catch (const BudgetExceeded& e) {
    std::cerr << "symon: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "symon: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "symon: internal error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
