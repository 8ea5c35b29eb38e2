#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cournot/cli.hpp"
#include "cournot/error.hpp"
#include "cournot/nlcp.hpp"
#include "cournot/oligopoly.hpp"

namespace py = pybind11;
using namespace cournot;

namespace {

// Scenario and report documents cross the boundary as JSON text; the Python
// side turns them into dicts.
std::string solve_json(const std::string& scenario, const std::string& method, std::optional<double> tol,
                       std::optional<std::size_t> max_iters) {
  SolveOptions opt;
  opt.method = method;
  opt.tol = tol;
  opt.max_iters = max_iters;
  return report_to_json(solve_scenario(parse_scenario_text(scenario), opt)).dump();
}

std::string verify_json(const std::string& scenario, const std::vector<double>& q, double tol) {
  const ScenarioFile s = parse_scenario_text(scenario);
  return render_verification(s, verify_quantities(s, q, tol), OutputFormat::Json);
}

std::string generate_json(std::uint64_t seed, std::size_t firms, std::size_t markets, double density,
                          const std::string& family, bool integral) {
  return write_scenario(generate_scenario({seed, firms, markets, density, family, integral}));
}

std::optional<std::vector<Quantity>> oligopoly(double alpha, double beta,
                                               const std::vector<std::pair<double, double>>& costs) {
  std::vector<IntegerCost> c;
  for (const auto& [lambda, mu] : costs) c.push_back(IntegerCost::quadratic(lambda, mu));
  return solve_oligopoly(make_oligopoly(IntegerPrice(PriceFunction::linear(alpha, beta)), std::move(c))).quantities;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cournot equilibrium solvers";

  static py::exception<Error> cournot_error(m, "CournotError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(cournot_error, e.what());
    }
  });

  m.def("solve_json", &solve_json, py::arg("scenario"), py::arg("method") = "auto", py::arg("tol") = py::none(),
        py::arg("max_iters") = py::none());
  m.def("verify_json", &verify_json, py::arg("scenario"), py::arg("quantities"), py::arg("tol") = 1e-6);
  m.def("generate_json", &generate_json, py::arg("seed") = 1, py::arg("firms") = 2, py::arg("markets") = 2,
        py::arg("density") = 1.0, py::arg("family") = "linear", py::arg("integral") = false);
  m.def("solve_oligopoly", &oligopoly, py::arg("alpha"), py::arg("beta"), py::arg("costs"),
        "Pure integral equilibrium of P = alpha - beta Q with costs lambda q^2/2 + mu q, or None.");
  m.def("revenue_margin", [](double alpha, double b, double c, double D) {
    return cournot::revenue_margin(PriceFunction::quadratic(alpha, b, c), D);
  }, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("demand"));
}
