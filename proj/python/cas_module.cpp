#include "cas/discrete_limits.hpp"
#include "cas/errors.hpp"
#include "cas/experiment.hpp"
#include "cas/gaussian_cas.hpp"
#include "cas/model_io.hpp"
#include "cas/simulator.hpp"
#include "cas/waveform_opt.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace cas;

namespace {

// JSON documents cross the boundary as text; the Python side parses them.
std::string dump(const io::json& j)
{
    return j.dump();
}

} // namespace

PYBIND11_MODULE(_cas, m)
{
    m.doc() = "Capacity-distortion-cost limits for communication with active sensing";

    auto base = py::register_exception<Error>(m, "CasError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    auto solver = py::register_exception<SolverError>(m, "SolverError", base.ptr());
    py::register_exception<InfeasibleConstraint>(m, "InfeasibleConstraint", solver.ptr());
    py::register_exception<UnreachableDistortion>(m, "UnreachableDistortion", solver.ptr());

    py::class_<TradeoffPoint>(m, "TradeoffPoint")
        .def_readonly("d_s", &TradeoffPoint::d_s)
        .def_readonly("d_c", &TradeoffPoint::d_c)
        .def_readonly("d_total", &TradeoffPoint::d_total)
        .def_readonly("rate", &TradeoffPoint::rate)
        .def_readonly("capacity", &TradeoffPoint::capacity)
        .def_readonly("budget", &TradeoffPoint::budget);

    // ---- finite alphabets
    using discrete::FiniteCasModel;
    py::class_<FiniteCasModel>(m, "FiniteCasModel")
        .def(py::init([](discrete::Vector prior, std::vector<discrete::Matrix> sensing, discrete::Matrix comm,
                         discrete::Matrix distortion, discrete::Vector cost) {
                 FiniteCasModel f;
                 f.state_prior = std::move(prior);
                 f.sensing_law = std::move(sensing);
                 f.comm_law = std::move(comm);
                 f.distortion = std::move(distortion);
                 f.cost = std::move(cost);
                 discrete::validate(f);
                 return f;
             }),
             py::arg("state_prior"), py::arg("sensing_law"), py::arg("comm_law"), py::arg("distortion"),
             py::arg("cost"))
        .def_readonly("state_prior", &FiniteCasModel::state_prior)
        .def_readonly("sensing_law", &FiniteCasModel::sensing_law)
        .def_readonly("comm_law", &FiniteCasModel::comm_law)
        .def_readonly("distortion", &FiniteCasModel::distortion)
        .def_readonly("cost", &FiniteCasModel::cost)
        .def("to_json", [](const FiniteCasModel& f) { return dump(io::to_json(f)); });

    m.def("load_finite_model", &io::load_finite_model, py::arg("path"));
    m.def("estimate_costs", &discrete::estimate_costs, py::arg("model"));
    m.def("optimal_estimate", &discrete::optimal_estimate, py::arg("model"), py::arg("x"), py::arg("z"));

    m.def(
        "constrained_capacity",
        [](const FiniteCasModel& f, double d_s, double budget) {
            const auto r = discrete::constrained_capacity(f, d_s, budget);
            return py::make_tuple(r.capacity, r.argmax.probs);
        },
        py::arg("model"), py::arg("d_s"), py::arg("budget"),
        "Returns (capacity in nats, capacity-achieving input distribution).");
    m.def(
        "rate_distortion",
        [](const discrete::Vector& source, const discrete::Matrix& d, double d_c) {
            const auto r = discrete::rate_distortion_discrete(source, d, d_c);
            return py::make_tuple(r.rate, r.test_channel);
        },
        py::arg("source"), py::arg("distortion"), py::arg("d_c"),
        "Returns (rate in nats, test channel P(s^ | s~)).");
    m.def(
        "feasibility_margin",
        [](const FiniteCasModel& f, double d_s, double d_c, double budget) {
            return discrete::theorem1_feasible(f, d_s, d_c, budget).margin;
        },
        py::arg("model"), py::arg("d_s"), py::arg("d_c"), py::arg("budget"));
    m.def(
        "min_total_distortion",
        [](const FiniteCasModel& f, double budget, double grid_step) {
            return discrete::min_total_distortion(f, budget, grid_step);
        },
        py::arg("model"), py::arg("budget"), py::arg("grid_step") = 1e-3);

    // ---- Gaussian model
    using gaussian::TrmModel;
    py::class_<TrmModel>(m, "TrmModel")
        .def_readonly("sigma_s", &TrmModel::sigma_s)
        .def_readonly("h_c", &TrmModel::h_c)
        .def_readonly("noise_s", &TrmModel::noise_s)
        .def_readonly("noise_c", &TrmModel::noise_c)
        .def_readonly("power", &TrmModel::power)
        .def_property_readonly("dims",
                               [](const TrmModel& t) {
                                   return py::make_tuple(t.dims.symbols, t.dims.tx, t.dims.sensing_rx,
                                                         t.dims.comm_rx);
                               })
        .def("trace_budget", &TrmModel::trace_budget)
        .def("to_json", [](const TrmModel& t) { return dump(io::to_json(t)); });

    m.def(
        "random_trm_model",
        [](int t, int n, int ms, int mc, double power, double noise_s, double noise_c, std::uint64_t seed) {
            return gaussian::random_trm_model({{t, n, ms, mc}, power, noise_s, noise_c, seed});
        },
        py::arg("T") = 16, py::arg("N") = 4, py::arg("M_s") = 4, py::arg("M_c") = 4, py::arg("power") = 1.0,
        py::arg("noise_s") = 1.0, py::arg("noise_c") = 1.0, py::arg("seed") = 1);
    m.def("load_trm_model", &io::load_trm_model, py::arg("path"));
    m.def("with_snr", &waveform::with_snr, py::arg("model"), py::arg("snr_db"));

    m.def(
        "sensing_mse",
        [](const TrmModel& t, const gaussian::CMatrix& q) { return gaussian::sensing_mse(t, gaussian::GramMatrix(q)); },
        py::arg("model"), py::arg("Q"));
    m.def(
        "channel_mi",
        [](const TrmModel& t, const gaussian::CMatrix& q) { return gaussian::channel_mi(t, gaussian::GramMatrix(q)); },
        py::arg("model"), py::arg("Q"));
    m.def(
        "reverse_waterfill",
        [](const std::vector<double>& lam, double rate) {
            const auto r = gaussian::reverse_waterfill(lam, rate);
            return py::make_tuple(r.d_c, r.xi, r.allocations);
        },
        py::arg("eigenvalues"), py::arg("rate"), "Returns (D_c, water level, per-mode allocations).");

    m.def(
        "optimize_isac", [](const TrmModel& t) { return dump(io::opt_result_json(waveform::optimize_isac(t))); },
        py::arg("model"));
    m.def(
        "optimize_sw",
        [](const TrmModel& t, int grid) { return dump(io::opt_result_json(waveform::optimize_sw(t, grid))); },
        py::arg("model"), py::arg("split_grid") = 201);
    m.def(
        "sweep_snr",
        [](const TrmModel& t, const std::vector<double>& snr) {
            const auto curve = waveform::sweep_snr(t, snr, {waveform::Scheme::Isac, waveform::Scheme::Sw});
            return io::sweep_csv(io::sweep_rows(curve));
        },
        py::arg("model"), py::arg("snr_db"), "Returns the sweep as CSV text.");

    m.def(
        "simulate",
        [](const TrmModel& t, const gaussian::CMatrix& x, std::optional<double> rate, std::size_t trials,
           std::uint64_t seed, unsigned workers) {
            sim::SimOptions o;
            o.trials = trials;
            o.seed = seed;
            o.workers = workers;
            py::gil_scoped_release release;
            const auto rep = rate ? sim::simulate_end_to_end(t, x, *rate, o) : sim::simulate_sensing(t, x, o);
            return dump(io::sim_report_json(rep));
        },
        py::arg("model"), py::arg("X"), py::arg("rate") = py::none(), py::arg("trials") = 100000,
        py::arg("seed") = 1, py::arg("workers") = 1);

    m.def(
        "run_config",
        [](const std::filesystem::path& config, std::optional<std::filesystem::path> out_dir,
           std::optional<std::uint64_t> seed) {
            experiment::Overrides o;
            o.out_dir = std::move(out_dir);
            o.seed = seed;
            std::ostringstream out, err;
            const int code = experiment::run_file(config, o, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("config"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(),
        "Runs a config file like cas_cli. Returns (exit status, stdout text, stderr text).");

    m.attr("modes") = experiment::mode_names();
}
