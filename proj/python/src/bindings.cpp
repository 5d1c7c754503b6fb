#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "popdiff/json_io.hpp"

namespace py = pybind11;
using namespace popdiff;

namespace {

using Rows = std::vector<std::vector<std::int64_t>>;

FpMatrix to_matrix(const Rows& rows, std::uint32_t p) {
  if (rows.empty()) throw InvalidArgument("matrix needs at least one row");
  return FpMatrix::from_rows(rows, p);
}

py::dict check(std::uint32_t p, const Rows& m1, const Rows& m2) {
  const PatternSpec spec(to_matrix(m1, p), to_matrix(m2, p));
  py::dict out;
  out["admissible"] = check_admissible(spec);
  if (is_invertible(spec.m1) && is_invertible(spec.m2)) {
    out["spectral"] = check_spectral(spec);
  } else {
    out["spectral"] = py::none();
  }
  return out;
}

py::dict core_table() {
  const auto t = cex::core_expectation_table(cex::make_core());
  py::dict out;
  out["sup"] = to_string(t.sup);
  out["mean"] = to_string(t.mean_g1);
  out["strict"] = t.strict;
  py::list shifts;
  for (const auto& r : t.by_shift) shifts.append(to_string(r));
  out["by_shift"] = shifts;
  return out;
}

std::vector<std::uint64_t> bohr(std::uint64_t order, std::vector<std::uint64_t> freqs,
                                const std::string& radius) {
  const FiniteGroup g = FiniteGroup::cyclic(order);
  return bohr_set(g, std::move(freqs), parse_rational(radius)).elements;
}

py::tuple run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::dispatch(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_popdiff, m) {
  m.doc() = "Native core of popdiff";
  m.attr("__version__") = POPDIFF_VERSION;

  const auto& error = py::register_exception<Error>(m, "PopdiffError", PyExc_ValueError);
  py::register_exception<TooLarge>(m, "TooLarge", error.ptr());

  m.def("is_prime", &is_prime_u64, py::arg("n"));
  m.def("check", &check, py::arg("p"), py::arg("m1"), py::arg("m2"),
        "Admissibility and the spectral condition for integer matrices reduced mod p.");
  m.def("core_table", &core_table, "Exact expectation table of the F_5 counterexample core.");
  m.def("bohr_set", &bohr, py::arg("order"), py::arg("frequencies"), py::arg("radius"),
        "Elements of B(S, radius) in Z/NZ; radius as a rational string such as '1/4'.");
  m.def("run", &run, py::arg("args"),
        "Run the command-line tool in process; returns (exit_code, stdout, stderr).");
}
