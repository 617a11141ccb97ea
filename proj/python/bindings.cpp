#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adaptcb/checks.hpp"
#include "adaptcb/harness.hpp"
#include "adaptcb/selection.hpp"

namespace py = pybind11;
using namespace adaptcb;

namespace {

// Rows of `m` are actions.
ActionSet rows_to_actions(const Matrix& m) { return ActionSet::from_columns(m.transpose()); }

Vector dense(const SparseDistribution& p, std::size_t n) { return p.to_dense(n); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Contextual-bandit reductions: selectors, master, harness";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  m.def("affine_dimension", [](const Matrix& actions) {
    return affine_dimension(rows_to_actions(actions));
  }, py::arg("actions"));

  m.def("igw", [](const Vector& theta, double gamma) {
    return dense(igw(theta, gamma), static_cast<std::size_t>(theta.size()));
  }, py::arg("theta"), py::arg("gamma"));

  m.def("log_barrier", [](const Vector& theta, double gamma) {
    const auto sol = log_barrier(theta, gamma);
    return py::make_tuple(dense(sol.dist, static_cast<std::size_t>(theta.size())), sol.lambda);
  }, py::arg("theta"), py::arg("gamma"), "Returns (p, lambda).");

  m.def("minimax_value", [](const Vector& p, const Vector& theta_hat, double gamma,
                            const Matrix& actions) {
    return minimax_value(SparseDistribution::from_dense(p), theta_hat, gamma,
                         rows_to_actions(actions)).value;
  }, py::arg("p"), py::arg("theta_hat"), py::arg("gamma"), py::arg("actions"));

  m.def("logdet_barrier", [](const Matrix& actions, const Vector& theta_hat, double gamma,
                             double eta) {
    const ActionSet acts = rows_to_actions(actions);
    const auto sol = logdet_barrier_solve(acts, theta_hat, gamma, eta);
    py::dict report;
    report["iterations"] = sol.report.iterations;
    report["iteration_cap"] = sol.report.iteration_cap;
    report["cap_hit"] = sol.report.cap_hit;
    report["eta_achieved"] = sol.report.eta_achieved;
    report["affine_dim"] = sol.report.affine_dim;
    report["objective_trace"] = sol.report.objective_trace;
    return py::make_tuple(dense(sol.dist, acts.size()), report);
  }, py::arg("actions"), py::arg("theta_hat"), py::arg("gamma"), py::arg("eta") = 0.5,
     "Returns (p, report).");

  m.def("eta_rounding_check", [](const Vector& p, const Matrix& actions, const Vector& theta_hat,
                                 double gamma, double eta) {
    const auto r = eta_rounding_check(SparseDistribution::from_dense(p), rows_to_actions(actions),
                                      theta_hat, gamma, eta);
    return py::make_tuple(r.passed, r.worst_eta);
  }, py::arg("p"), py::arg("actions"), py::arg("theta_hat"), py::arg("gamma"), py::arg("eta"));

  m.def("tsallis_solve", [](const Vector& losses, double eta) { return tsallis_solve(losses, eta); },
        py::arg("losses"), py::arg("eta"));

  py::class_<HedgedTsallisInf>(m, "HedgedTsallisInf")
      .def(py::init<std::size_t, double, double, double>(), py::arg("arms"), py::arg("eta"),
           py::arg("alpha") = 0.5, py::arg("hedge") = 0.0)
      .def("sample", [](HedgedTsallisInf& self, RngStream& rng) {
        const MasterDraw d = self.sample(rng);
        return py::make_tuple(d.arm, d.prob, d.rho);
      })
      .def("update", [](HedgedTsallisInf& self, double loss) {
        const BiasEvent e = self.update(loss);
        return py::make_tuple(e.triggered, e.bias);
      })
      .def_property_readonly("play_distribution", &HedgedTsallisInf::play_distribution)
      .def_property_readonly("ledger", &HedgedTsallisInf::ledger)
      .def_property_readonly("rho", &HedgedTsallisInf::rho);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
      .def("uniform", py::overload_cast<>(&RngStream::uniform));

  m.def("run", [](const std::string& config_json) {
    const ExperimentConfig config = parse_config(config_json);
    py::gil_scoped_release release;
    return summary_to_json(run_experiment(config));
  }, py::arg("config_json"), "Runs a JSON config; returns the summary as JSON text.");

  m.def("round_rows", [](const std::string& config_json) {
    ExperimentConfig config = parse_config(config_json);
    std::vector<std::tuple<std::uint64_t, std::size_t, int, std::size_t, double, double>> rows;
    for (auto seed : config.seeds)
      run_seed(config, seed, [&](const RoundRow& r) {
        rows.emplace_back(r.seed, r.t, r.base, r.action, r.loss, r.cum_regret);
      });
    return rows;
  }, py::arg("config_json"), "(seed, t, base, action, loss, cum_regret) per round.");

  m.def("check", [](const std::string& suite) {
    std::vector<std::tuple<std::string, std::string, bool, std::string>> out;
    for (const auto& r : run_checks(suite)) out.emplace_back(r.suite, r.name, r.passed, r.detail);
    return out;
  }, py::arg("suite") = "all");
}
