#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pilot_borrow/decision.hpp"
#include "pilot_borrow/feasibility.hpp"
#include "pilot_borrow/map_prior.hpp"
#include "pilot_borrow/scenario_io.hpp"
#include "pilot_borrow/stats.hpp"
#include "pilot_borrow/trial_sim.hpp"

namespace py = pybind11;
namespace pb = pilot_borrow;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust mixture-prior borrowing of pilot data: priors, decisions, power, feasibility";

    py::register_exception<pb::DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<pb::ConfigValidationError>(m, "ConfigValidationError", PyExc_ValueError);
    py::register_exception<pb::ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);

    m.def("log_gamma", [](double x) { return pb::log_gamma(x).value; }, py::arg("x"));
    m.def("log_beta_fn", [](double a, double b) { return pb::log_beta_fn(a, b).value; }, py::arg("a"), py::arg("b"));
    m.def("reg_inc_beta", py::overload_cast<double, double, double>(&pb::reg_inc_beta), py::arg("x"), py::arg("a"),
          py::arg("b"));
    m.def(
        "log_beta_binomial_pmf",
        [](std::int64_t y, std::int64_t n, double a, double b) { return pb::log_beta_binomial_pmf(y, n, a, b).value; },
        py::arg("y"), py::arg("n"), py::arg("a"), py::arg("b"));

    py::class_<pb::ArmCounts>(m, "ArmCounts")
        .def(py::init([](std::int64_t y, std::int64_t n) {
                 pb::ArmCounts c{y, n};
                 c.validate();
                 return c;
             }),
             py::arg("successes"), py::arg("size"))
        .def_readonly("successes", &pb::ArmCounts::successes)
        .def_readonly("size", &pb::ArmCounts::size)
        .def("__repr__", [](const pb::ArmCounts& c) {
            return "ArmCounts(" + std::to_string(c.successes) + ", " + std::to_string(c.size) + ")";
        });

    py::class_<pb::BetaParams>(m, "BetaParams")
        .def(py::init([](double a, double b) {
                 pb::BetaParams p{a, b};
                 p.validate();
                 return p;
             }),
             py::arg("alpha"), py::arg("beta"))
        .def_readonly("alpha", &pb::BetaParams::alpha)
        .def_readonly("beta", &pb::BetaParams::beta)
        .def("__eq__", [](const pb::BetaParams& a, const pb::BetaParams& b) { return a == b; })
        .def("__repr__", [](const pb::BetaParams& p) {
            return "BetaParams(" + pb::format_number(p.alpha) + ", " + pb::format_number(p.beta) + ")";
        });

    py::class_<pb::BetaMixture>(m, "BetaMixture")
        .def(py::init([](const std::vector<std::pair<double, pb::BetaParams>>& comps) {
                 std::vector<pb::MixtureComponent> out;
                 for (const auto& [w, p] : comps) out.push_back({w, p});
                 return pb::BetaMixture(std::move(out));
             }),
             py::arg("components"))
        .def_property_readonly("weights",
                               [](const pb::BetaMixture& mix) {
                                   std::vector<double> w;
                                   for (const auto& c : mix.components()) w.push_back(c.weight);
                                   return w;
                               })
        .def_property_readonly("params",
                               [](const pb::BetaMixture& mix) {
                                   std::vector<pb::BetaParams> p;
                                   for (const auto& c : mix.components()) p.push_back(c.params);
                                   return p;
                               })
        .def("mean", &pb::BetaMixture::mean)
        .def("density", &pb::BetaMixture::density, py::arg("p"))
        .def("__len__", &pb::BetaMixture::size);

    m.def("build_robust_map", &pb::build_robust_map, py::arg("pilot"), py::arg("w") = 0.5, py::arg("a0") = 1.0,
          py::arg("b0") = 1.0, py::arg("vague") = pb::kUniformPrior);
    m.def("update_posterior", &pb::update_posterior, py::arg("prior"), py::arg("data"));
    m.def("informative_weight", &pb::informative_weight, py::arg("mixture"));

    m.def("beta_exceedance", &pb::beta_exceedance, py::arg("t"), py::arg("c"));
    m.def("superiority_probability", &pb::superiority_probability, py::arg("treatment"), py::arg("control"));
    m.def(
        "decide", [](double prob, double phi) { return pb::decide(prob, pb::DecisionRule(phi)); }, py::arg("prob"),
        py::arg("phi") = 0.975);

    py::class_<pb::DesignScenario>(m, "DesignScenario")
        .def(py::init(&pb::DesignScenario::make), py::arg("p_control"), py::arg("rr"),
             py::arg("rr_pilot_multiplier") = 1.0, py::arg("pilot_fraction") = 0.0, py::arg("phi") = 0.975,
             py::arg("prior_weight") = 0.5, py::arg("replicates") = pb::kDefaultReplicates,
             py::arg("master_seed") = pb::kDefaultSeed)
        .def_readonly("p_control", &pb::DesignScenario::p_control)
        .def_readonly("rr", &pb::DesignScenario::rr)
        .def_readonly("rr_pilot_multiplier", &pb::DesignScenario::rr_pilot_multiplier)
        .def_readonly("pilot_fraction", &pb::DesignScenario::pilot_fraction)
        .def_readonly("phi", &pb::DesignScenario::phi)
        .def_readonly("prior_weight", &pb::DesignScenario::prior_weight)
        .def_readonly("replicates", &pb::DesignScenario::replicates)
        .def_readonly("master_seed", &pb::DesignScenario::master_seed);

    py::class_<pb::PowerEstimate>(m, "PowerEstimate")
        .def_readonly("power", &pb::PowerEstimate::power)
        .def_readonly("standard_error", &pb::PowerEstimate::standard_error)
        .def_readonly("replicates", &pb::PowerEstimate::replicates)
        .def_readonly("n_total", &pb::PowerEstimate::n_total);

    py::class_<pb::SampleSizeResult>(m, "SampleSizeResult")
        .def_property_readonly("found", [](const pb::SampleSizeResult& r) { return r.status == pb::SearchStatus::found; })
        .def_readonly("n_total", &pb::SampleSizeResult::n_total)
        .def_readonly("pilot_total", &pb::SampleSizeResult::pilot_total)
        .def_readonly("power_at_n", &pb::SampleSizeResult::power_at_n)
        .def_property_readonly("probes", [](const pb::SampleSizeResult& r) {
            std::vector<std::pair<std::int64_t, double>> out;
            for (const auto& p : r.probes) out.emplace_back(p.n_total, p.power);
            return out;
        });

    m.def("split_arms", [](std::int64_t total) {
        const auto s = pb::split_arms(total);
        return std::make_pair(s.control, s.treatment);
    });
    m.def(
        "simulate_replicate",
        [](const pb::DesignScenario& s, std::int64_t n_total, std::int64_t index) {
            auto rng = pb::replicate_stream(s.master_seed, n_total, index);
            return pb::simulate_replicate(s, n_total, rng);
        },
        py::arg("scenario"), py::arg("n_total"), py::arg("index") = 0);
    m.def("estimate_power", &pb::estimate_power, py::arg("scenario"), py::arg("n_total"), py::arg("workers") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("find_min_sample_size", &pb::find_min_sample_size, py::arg("scenario"), py::arg("target_power") = 0.80,
          py::arg("n_lo") = 20, py::arg("n_hi") = 10000, py::arg("workers") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_conflict_grid", &pb::run_conflict_grid, py::arg("base"), py::arg("multipliers"),
          py::arg("target_power") = 0.80, py::arg("n_lo") = 20, py::arg("n_hi") = 10000, py::arg("workers") = 1,
          py::call_guard<py::gil_scoped_release>());

    py::class_<pb::RecruitmentModel>(m, "RecruitmentModel")
        .def(py::init(&pb::RecruitmentModel::from_pilot_rate), py::arg("lambda0"))
        .def_readonly("lambda0", &pb::RecruitmentModel::lambda0)
        .def_readonly("gamma_shape", &pb::RecruitmentModel::gamma_shape)
        .def_readonly("gamma_rate", &pb::RecruitmentModel::gamma_rate);

    m.def("expected_duration", &pb::expected_duration, py::arg("n"), py::arg("rate"));
    m.def(
        "negbin_params",
        [](const pb::RecruitmentModel& model, double months) {
            const auto nb = pb::negbin_params(model, months);
            return std::make_pair(nb.r, nb.p);
        },
        py::arg("model"), py::arg("months"));
    m.def("recruitment_probability", &pb::recruitment_probability, py::arg("model"), py::arg("n"), py::arg("months"));
    m.def("months_for_probability", &pb::months_for_probability, py::arg("model"), py::arg("n"), py::arg("target"));

    m.def(
        "parse_config", [](const std::string& text) { return pb::to_json(pb::parse_config(text)); }, py::arg("text"),
        "Validate a JSON run configuration and return its canonical form.");
    m.def(
        "run_grid_csv",
        [](const std::string& text) {
            const auto cfg = pb::parse_config(text);
            py::gil_scoped_release release;
            return pb::format_csv(pb::run_grid(cfg));
        },
        py::arg("config_text"), "Run a grid config and return the CSV text.");
}
