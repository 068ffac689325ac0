#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "symon/analysis.hpp"
#include "symon/error.hpp"
#include "symon/montecarlo.hpp"
#include "symon/report.hpp"
#include "symon/specialsets.hpp"
#include "symon/sympgroup.hpp"
#include "symon/verify.hpp"

namespace py = pybind11;
using namespace symon;

namespace {

using Rows = std::vector<std::vector<std::int64_t>>;

Rows to_rows(const ModMatrix& a) {
  Rows out(a.dim(), std::vector<std::int64_t>(a.dim()));
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out[r][c] = static_cast<std::int64_t>(a(r, c));
  return out;
}

ModMatrix from_rows(const Rows& rows, std::uint64_t n) {
  const std::size_t d = rows.size();
  ModMatrix m(Modulus(n), d);
  for (std::size_t r = 0; r < d; ++r) {
    if (rows[r].size() != d) throw DomainError("matrix must be square");
    for (std::size_t c = 0; c < d; ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

GroupContext context(unsigned g, std::uint64_t n, const std::string& q) {
  return GroupContext(g, Modulus(n), QParam::parse(q));
}

// Big integers and rationals cross the boundary as decimal text; the Python
// side turns them into int and Fraction.
std::string big(const BigInt& x) { return x.get_str(); }

SimulationOptions sim(const std::string& strategy, unsigned threads) {
  SimulationOptions o;
  o.strategy = parse_strategy(strategy);
  o.threads = threads;
  return o;
}

}  // namespace

PYBIND11_MODULE(_symon, m) {
  m.doc() = "Symplectic similitude groups mod n: counts, special sets, series, simulations";

  static py::exception<Error> error(m, "SymonError");
  static py::exception<DomainError> domain_error(m, "DomainError", error.ptr());
  static py::exception<BudgetExceeded> budget_error(m, "BudgetExceeded", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    } catch (const BudgetExceeded& e) {
      py::set_error(budget_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("sp_order", [](unsigned g, std::uint64_t ell) { return big(sp_order(g, ell)); },
        py::arg("g"), py::arg("ell"));
  m.def("gsp_order",
        [](unsigned g, std::uint64_t n, const std::string& q) { return big(gsp_q_order(context(g, n, q))); },
        py::arg("g"), py::arg("n"), py::arg("q") = "inf");
  m.def("orders",
        [](unsigned g, std::uint64_t n, const std::string& q) { return render(orders_report(context(g, n, q))); },
        py::arg("g"), py::arg("n"), py::arg("q") = "inf");

  m.def("multiplier",
        [](const Rows& a, std::uint64_t n, const std::string& q) -> std::optional<std::uint64_t> {
          const auto ctx = context(static_cast<unsigned>(a.size() / 2), n, q);
          return multiplier(ctx, from_rows(a, n));
        },
        py::arg("matrix"), py::arg("n"), py::arg("q") = "inf");
  m.def("is_member",
        [](const Rows& a, std::uint64_t n, const std::string& q) {
          const auto ctx = context(static_cast<unsigned>(a.size() / 2), n, q);
          return is_member(ctx, from_rows(a, n));
        },
        py::arg("matrix"), py::arg("n"), py::arg("q") = "inf");

  m.def("enumerate",
        [](unsigned g, std::uint64_t ell, std::optional<Residue> lambda, const std::string& q,
           std::optional<std::uint64_t> budget) {
          std::vector<Rows> out;
          const auto ctx = context(g, ell, q);
          py::gil_scoped_release release;
          for (const auto& a : enumerate_group(ctx, lambda, budget.value_or(enumeration_budget())))
            out.push_back(to_rows(a));
          return out;
        },
        py::arg("g"), py::arg("ell"), py::arg("lam") = py::none(), py::arg("q") = "inf",
        py::arg("budget") = py::none());

  m.def("sample",
        [](unsigned g, std::uint64_t n, const std::string& q, unsigned e, std::uint64_t seed,
           std::uint64_t index) {
          std::vector<Rows> out;
          for (const auto& a : sample_sigma(context(g, n, q), e, seed, index).elements)
            out.push_back(to_rows(a));
          return out;
        },
        py::arg("g"), py::arg("n"), py::arg("q") = "inf", py::arg("e") = 1, py::arg("seed") = 42,
        py::arg("index") = 0);

  m.def("event_x",
        [](const std::vector<Rows>& sigma, std::uint64_t n, std::uint64_t ell) {
          std::vector<ModMatrix> ms;
          for (const auto& a : sigma) ms.push_back(from_rows(a, n));
          return event_X(ms, ell);
        },
        py::arg("sigma"), py::arg("n"), py::arg("ell"));

  m.def("density",
        [](unsigned g, std::uint64_t ell, const std::string& q) {
          return rational_string(density_ratio(g, ell, QParam::parse(q)));
        },
        py::arg("g"), py::arg("ell"), py::arg("q") = "inf");
  m.def("exact_mu_x",
        [](unsigned g, std::uint64_t ell, unsigned e) {
          return rational_string(exact_mu_X(context(g, ell, "inf"), ell, e));
        },
        py::arg("g"), py::arg("ell"), py::arg("e"));
  m.def("part_b_term",
        [](unsigned g, unsigned e, std::uint64_t ell) { return render(to_json(part_b_term(g, e, ell))); },
        py::arg("g"), py::arg("e"), py::arg("ell"));

  py::class_<SpecialSet>(m, "SpecialSet")
      .def_property_readonly("ell", &SpecialSet::prime)
      .def_property_readonly("cardinality", [](const SpecialSet& s) { return big(s.cardinality()); })
      .def_property_readonly("materialized", &SpecialSet::materialized)
      .def("contains", [](const SpecialSet& s, const Rows& a) { return s.contains(from_rows(a, s.prime())); })
      .def("__len__", [](const SpecialSet& s) { return s.keys().size(); })
      .def("__getitem__",
           [](const SpecialSet& s, std::size_t i) {
             if (i >= s.keys().size()) throw py::index_error();
             return to_rows(s.element(i));
           })
      .def("sidecar", [](const SpecialSet& s) { return render(special_set_sidecar(s)); });

  m.def("special_set",
        [](unsigned g, std::uint64_t ell, const std::string& q, const std::string& level,
           std::optional<Residue> lambda, const std::string& strategy, bool materialize) {
          const auto ctx = context(g, ell, q);
          const SetLevel lv = parse_level(level);
          const BStrategy st = parse_strategy(strategy);
          BuildOptions opts;
          opts.materialize = materialize;
          py::gil_scoped_release release;
          if (lv == SetLevel::SQUnion) return build_Sq(ctx, st, opts);
          if (!lambda) throw DomainError("levels S0 and S need lam");
          return lv == SetLevel::S0 ? build_S0(ctx, *lambda, st, opts) : build_S(ctx, *lambda, st, opts);
        },
        py::arg("g"), py::arg("ell"), py::arg("q") = "2", py::arg("level") = "Sq",
        py::arg("lam") = py::none(), py::arg("strategy") = "lex", py::arg("materialize") = true);

  m.def("verify_counts",
        [](std::vector<unsigned> genera, std::vector<std::uint64_t> ells, std::vector<std::string> qs,
           const std::string& strategy) {
          VerifyGrid grid;
          grid.genera = std::move(genera);
          grid.ells = std::move(ells);
          grid.qs.clear();
          for (const auto& q : qs) grid.qs.push_back(QParam::parse(q));
          grid.strategy = parse_strategy(strategy);
          py::gil_scoped_release release;
          return render(to_json(verify_counts(grid)));
        },
        py::arg("g") = std::vector<unsigned>{2}, py::arg("ells") = std::vector<std::uint64_t>{3, 5},
        py::arg("qs") = std::vector<std::string>{"2", "inf"}, py::arg("strategy") = "lex");

  m.def("series_part_a",
        [](unsigned g, const std::string& q, std::uint64_t ell_max, unsigned threads) {
          py::gil_scoped_release release;
          return render(to_json(part_a_series(g, QParam::parse(q), ell_max, threads)));
        },
        py::arg("g"), py::arg("q"), py::arg("ell_max"), py::arg("threads") = 1);
  m.def("series_part_b",
        [](unsigned g, unsigned e, std::uint64_t ell_max, unsigned threads) {
          py::gil_scoped_release release;
          return render(to_json(part_b_series(g, e, ell_max, threads)));
        },
        py::arg("g"), py::arg("e"), py::arg("ell_max"), py::arg("threads") = 1);

  m.def("hit_frequency",
        [](unsigned g, std::uint64_t n, const std::string& q, std::uint64_t samples, std::uint64_t seed,
           const std::string& strategy, unsigned threads) {
          const auto ctx = context(g, n, q);
          const auto primes = ctx.modulus().primes();
          std::vector<std::uint64_t> ells(primes.begin(), primes.end());
          const Event ev = ells.size() == 1 ? Event::hit(ells.front()) : Event::joint(ells);
          py::gil_scoped_release release;
          const auto est = estimate_event(ctx, ev, 1, samples, seed, sim(strategy, threads));
          return render(to_json(SimulationHeader{ev.name(), g, n, {}, ctx.q(), 1, seed}, est));
        },
        py::arg("g"), py::arg("n"), py::arg("q") = "2", py::arg("samples") = 100000,
        py::arg("seed") = 42, py::arg("strategy") = "lex", py::arg("threads") = 1);
  m.def("independence",
        [](unsigned g, std::vector<std::uint64_t> ells, const std::string& q, std::uint64_t samples,
           std::uint64_t seed, unsigned threads) {
          std::uint64_t n = 1;
          for (auto p : ells) n *= p;
          const auto ctx = context(g, n, q);
          py::gil_scoped_release release;
          const auto rep = independence_experiment(ctx, ells, samples, seed, sim("lex", threads));
          return render(to_json(SimulationHeader{"independence", g, n, {}, ctx.q(), 1, seed}, rep));
        },
        py::arg("g"), py::arg("ells"), py::arg("q") = "2", py::arg("samples") = 100000,
        py::arg("seed") = 42, py::arg("threads") = 1);
  m.def("mu_x",
        [](unsigned g, std::uint64_t ell, unsigned e, const std::string& q, std::uint64_t samples,
           std::uint64_t seed, unsigned threads) {
          const auto ctx = context(g, ell, q);
          const Event ev = Event::x(ell);
          py::gil_scoped_release release;
          const auto est = estimate_event(ctx, ev, e, samples, seed, sim("lex", threads));
          return render(to_json(SimulationHeader{ev.name(), g, ell, {}, ctx.q(), e, seed}, est));
        },
        py::arg("g"), py::arg("ell"), py::arg("e"), py::arg("q") = "2", py::arg("samples") = 100000,
        py::arg("seed") = 42, py::arg("threads") = 1);
  m.def("borel_cantelli",
        [](unsigned g, std::vector<std::uint64_t> ells, unsigned e, const std::string& q,
           std::uint64_t samples, std::uint64_t seed, std::optional<std::uint64_t> threshold,
           unsigned threads) {
          py::gil_scoped_release release;
          const auto rep = borel_cantelli_experiment(g, QParam::parse(q), ells, e, samples, seed,
                                                     threshold, sim("lex", threads));
          return render(to_json(rep));
        },
        py::arg("g"), py::arg("ells"), py::arg("e"), py::arg("q") = "2", py::arg("samples") = 10000,
        py::arg("seed") = 42, py::arg("threshold") = py::none(), py::arg("threads") = 1);
}
