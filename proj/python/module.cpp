#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <gsbf/duality.hpp>
#include <gsbf/errors.hpp>
#include <gsbf/harness/report.hpp>
#include <gsbf/harness/runner.hpp>
#include <gsbf/harness/spec.hpp>
#include <gsbf/model.hpp>
#include <gsbf/reweighted.hpp>
#include <gsbf/rmt.hpp>
#include <gsbf/stages.hpp>

namespace py = pybind11;
using namespace gsbf;

namespace {

reweighted::ReweightParams make_params(double p, double epsilon, int max_iters, double obj_tol)
{
    reweighted::ReweightParams r;
    r.p = p;
    r.epsilon = epsilon;
    r.max_iters = max_iters;
    r.obj_tol = obj_tol;
    r.validate();
    return r;
}

stages::Stage1Mode parse_stage1(const std::string& s)
{
    if (s == "instantaneous") return stages::Stage1Mode::instantaneous;
    if (s == "statistical") return stages::Stage1Mode::statistical;
    if (s == "l1l2-approx") return stages::Stage1Mode::l1l2_approx;
    throw ConfigError("unknown stage-1 mode '" + s + "' (instantaneous, statistical, l1l2-approx)");
}

stages::SelectionMode parse_selection(const std::string& s)
{
    if (s == "bisection") return stages::SelectionMode::bisection;
    if (s == "exhaustive-prefix") return stages::SelectionMode::exhaustive_prefix;
    throw ConfigError("unknown selection mode '" + s + "' (bisection, exhaustive-prefix)");
}

BeamformerSet as_beamformers(const Eigen::MatrixXcd& v, const NetworkConfig& c)
{
    if (v.rows() != c.antennas() || v.cols() != c.K)
        throw ConfigError("beamformer matrix must be LN x K");
    return BeamformerSet{v, c.L, c.N};
}

py::dict summary_cell(const harness::SummaryCell& s)
{
    py::dict d;
    d["algorithm"] = std::string(harness::to_string(s.algorithm));
    d["sinr_db"] = s.sinr_db;
    d["feasible_trials"] = s.feasible_trials;
    d["total_trials"] = s.total_trials;
    d["mean_network_power_w"] = s.mean_network_power_w;
    d["mean_f1_w"] = s.mean_f1_w;
    d["mean_f2_w"] = s.mean_f2_w;
    d["mean_active_count"] = s.mean_active_count;
    d["mean_stage1_iterations"] = s.mean_stage1_iterations;
    return d;
}

} // namespace

PYBIND11_MODULE(_gsbf, m)
{
    m.doc() = "Group sparse beamforming for Cloud-RAN: three-stage RRH selection.";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", error.ptr());
    py::register_exception<AsymptoticInfeasibleError>(m, "AsymptoticInfeasibleError", error.ptr());

    py::class_<NetworkConfig>(m, "NetworkConfig")
        .def_static("with_defaults", &NetworkConfig::with_defaults, py::arg("L"), py::arg("K"), py::arg("N"),
                    py::arg("region_half_width") = 0.0)
        .def_readonly("L", &NetworkConfig::L)
        .def_readonly("K", &NetworkConfig::K)
        .def_readonly("N", &NetworkConfig::N)
        .def_readwrite("pc", &NetworkConfig::pc)
        .def_readwrite("zeta", &NetworkConfig::zeta)
        .def_readwrite("nu", &NetworkConfig::nu)
        .def_readwrite("gamma", &NetworkConfig::gamma)
        .def_readwrite("sigma2", &NetworkConfig::sigma2)
        .def_readwrite("region_half_width", &NetworkConfig::region_half_width)
        .def_property(
            "reference_gain", [](const NetworkConfig& c) { return c.pathloss.reference_gain; },
            [](NetworkConfig& c, double g) { c.pathloss.reference_gain = g; })
        .def_property(
            "pathloss_exponent", [](const NetworkConfig& c) { return c.pathloss.exponent; },
            [](NetworkConfig& c, double a) { c.pathloss.exponent = a; })
        .def("set_sinr_db",
             [](NetworkConfig& c, double db) { c.gamma.setConstant(c.K, std::pow(10.0, db / 10.0)); })
        .def("validate", &NetworkConfig::validate);

    py::class_<Topology>(m, "Topology")
        .def_readonly("rrh_positions", &Topology::rrh_positions)
        .def_readonly("user_positions", &Topology::user_positions)
        .def_readonly("gains", &Topology::gains);

    py::class_<ChannelRealization>(m, "Channel")
        .def_readonly("h", &ChannelRealization::h)
        .def_readonly("gains", &ChannelRealization::gains)
        .def_readonly("L", &ChannelRealization::L)
        .def_readonly("N", &ChannelRealization::N)
        .def("restrict_to", &ChannelRealization::restrict_to, py::arg("active"));

    m.def("generate_topology", &generate_topology, py::arg("config"), py::arg("seed"));
    m.def("sample_channel", py::overload_cast<const Eigen::MatrixXd&, int, std::uint64_t>(&sample_channel),
          py::arg("gains"), py::arg("N"), py::arg("seed"), "h_kl = sqrt(d_kl) g_kl, g_kl ~ CN(0, I_N).");
    m.def(
        "network_power",
        [](const Eigen::MatrixXcd& v, const NetworkConfig& c) {
            const auto p = network_power(as_beamformers(v, c), c);
            return py::make_tuple(p.f1, p.f2, p.total);
        },
        py::arg("V"), py::arg("config"), "(f1, f2, total) for an LN x K beamformer matrix.");

    py::class_<duality::DualitySolution>(m, "DualitySolution")
        .def_readonly("lambda_", &duality::DualitySolution::lambda)
        .def_readonly("p", &duality::DualitySolution::p)
        .def_property_readonly("V", [](const duality::DualitySolution& s) { return s.V.v; })
        .def_readonly("group_norms", &duality::DualitySolution::group_norms)
        .def_readonly("iterations", &duality::DualitySolution::iterations);

    m.def(
        "solve_subproblem",
        [](const ChannelRealization& ch, const Eigen::VectorXd& gamma, const Eigen::VectorXd& sigma2,
           const Eigen::VectorXd& omega) { return duality::solve_subproblem(ch, gamma, sigma2, omega); },
        py::arg("channel"), py::arg("gamma"), py::arg("sigma2"), py::arg("omega"),
        "Weighted power minimization under SINR targets, in closed form via the dual.");
    m.def(
        "check_feasibility",
        [](const ChannelRealization& ch, const Eigen::VectorXd& gamma, const Eigen::VectorXd& sigma2) {
            const auto v = duality::check_feasibility(ch, gamma, sigma2);
            return py::make_tuple(v.feasible, std::string(to_string(v.reason)));
        },
        py::arg("channel"), py::arg("gamma"), py::arg("sigma2"));

    m.def(
        "run_instantaneous",
        [](const ChannelRealization& ch, const Eigen::VectorXd& gamma, const Eigen::VectorXd& sigma2,
           const Eigen::VectorXd& nu, double p, double epsilon, int max_iters, double obj_tol) {
            const auto r =
                reweighted::run_instantaneous(ch, gamma, sigma2, nu, make_params(p, epsilon, max_iters, obj_tol));
            return py::make_tuple(r.theta, r.trace.objectives);
        },
        py::arg("channel"), py::arg("gamma"), py::arg("sigma2"), py::arg("nu"), py::arg("p") = 1.0,
        py::arg("epsilon") = 1e-3, py::arg("max_iters") = 30, py::arg("obj_tol") = 1e-3,
        "Reweighted ordering from instantaneous CSI; returns (theta, objectives).");
    m.def(
        "run_statistical",
        [](const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma, const Eigen::VectorXd& sigma2,
           const Eigen::VectorXd& nu, int N, double p, double epsilon, int max_iters, double obj_tol) {
            const auto r =
                rmt::run_statistical(D, gamma, sigma2, nu, make_params(p, epsilon, max_iters, obj_tol), N);
            return py::make_tuple(r.theta_bar, r.trace.objectives);
        },
        py::arg("gains"), py::arg("gamma"), py::arg("sigma2"), py::arg("nu"), py::arg("N"), py::arg("p") = 1.0,
        py::arg("epsilon") = 1e-3, py::arg("max_iters") = 30, py::arg("obj_tol") = 1e-3,
        "Reweighted ordering from pathloss statistics only; returns (theta_bar, objectives).");

    py::class_<stages::StageOutcome>(m, "StageOutcome")
        .def_property_readonly("theta", [](const stages::StageOutcome& o) { return o.ordering.theta; })
        .def_property_readonly("switch_off_priority",
                               [](const stages::StageOutcome& o) { return o.ordering.switch_off_priority; })
        .def_readonly("active_set", &stages::StageOutcome::active_set)
        .def_property_readonly("V", [](const stages::StageOutcome& o) { return o.V.v; })
        .def_readonly("f1", &stages::StageOutcome::f1)
        .def_readonly("f2", &stages::StageOutcome::f2)
        .def_readonly("total", &stages::StageOutcome::total)
        .def_readonly("stage1_objectives", &stages::StageOutcome::stage1_objectives);

    m.def(
        "run_three_stage",
        [](const ChannelRealization& ch, const NetworkConfig& c, const std::string& stage1,
           const std::string& selection, double p, double epsilon, int max_iters, double obj_tol) {
            return stages::run_three_stage(ch, c, parse_stage1(stage1), parse_selection(selection),
                                           make_params(p, epsilon, max_iters, obj_tol));
        },
        py::arg("channel"), py::arg("config"), py::arg("stage1") = "instantaneous",
        py::arg("selection") = "exhaustive-prefix", py::arg("p") = 1.0, py::arg("epsilon") = 1e-3,
        py::arg("max_iters") = 30, py::arg("obj_tol") = 1e-3);

    py::class_<harness::ExperimentSpec>(m, "ExperimentSpec")
        .def_readwrite("trials", &harness::ExperimentSpec::trials)
        .def_readwrite("base_seed", &harness::ExperimentSpec::base_seed)
        .def_readwrite("sinr_grid_db", &harness::ExperimentSpec::sinr_grid_db)
        .def_readwrite("output_dir", &harness::ExperimentSpec::output_dir)
        .def_readonly("scenario", &harness::ExperimentSpec::scenario)
        .def_property_readonly("algorithms",
                               [](const harness::ExperimentSpec& s) {
                                   std::vector<std::string> out;
                                   for (auto a : s.algorithms) out.emplace_back(harness::to_string(a));
                                   return out;
                               })
        .def("echo", [](const harness::ExperimentSpec& s) { return harness::echo_spec(s); });

    m.def("parse_spec", &harness::parse_spec, py::arg("text"), py::arg("origin") = "<config>");
    m.def("load_spec", &harness::load_spec, py::arg("path"));

    py::class_<harness::RunResult>(m, "RunResult")
        .def_property_readonly("summary",
                               [](const harness::RunResult& r) {
                                   py::list out;
                                   for (const auto& s : r.summary) out.append(summary_cell(s));
                                   return out;
                               })
        .def_property_readonly("record_count", [](const harness::RunResult& r) { return r.records.size(); })
        .def("all_infeasible", &harness::RunResult::all_infeasible)
        .def("trials_csv", [](const harness::RunResult& r) { return harness::trials_csv(r.records); });

    m.def(
        "run_trials",
        [](const harness::ExperimentSpec& s, int jobs) { return harness::run_trials(s, {jobs}); },
        py::arg("spec"), py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("emit_reports", &harness::emit_reports, py::arg("spec"), py::arg("result"), py::arg("output_dir"));
}
