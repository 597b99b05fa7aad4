#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wdmqkd/config.hpp"
#include "wdmqkd/errors.hpp"
#include "wdmqkd/figures.hpp"
#include "wdmqkd/mc.hpp"
#include "wdmqkd/version.hpp"

namespace py = pybind11;
using namespace wdmqkd;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Key rates for wavelength-multiplexed entanglement-based QKD with a pulsed "
              "SPDC source";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<StatsKind>(m, "StatsKind")
        .value("Thermal", StatsKind::Thermal)
        .value("Poisson", StatsKind::Poisson)
        .value("Multimode", StatsKind::Multimode);
    py::enum_<CorrelationSign>(m, "CorrelationSign")
        .value("Negative", CorrelationSign::Negative)
        .value("Positive", CorrelationSign::Positive);
    py::enum_<ProfileKind>(m, "ProfileKind")
        .value("Rect", ProfileKind::Rect)
        .value("Gauss", ProfileKind::Gauss);

    py::class_<SourceParams>(m, "SourceParams")
        .def(py::init([](double sigma_cr, double tau_p, double mu, StatsKind stats, int modes) {
                 SourceParams s{sigma_cr, tau_p, mu, stats, modes};
                 s.validate();
                 return s;
             }),
             py::arg("sigma_cr"), py::arg("tau_p"), py::arg("mu") = 0.0,
             py::arg("stats") = StatsKind::Poisson, py::arg("modes") = 1)
        .def_readwrite("sigma_cr", &SourceParams::sigma_cr)
        .def_readwrite("tau_p", &SourceParams::tau_p)
        .def_readwrite("mu", &SourceParams::mu)
        .def_readwrite("stats", &SourceParams::stats)
        .def_readwrite("modes", &SourceParams::modes);

    py::class_<DerivedSpectral>(m, "DerivedSpectral")
        .def_readonly("sigma", &DerivedSpectral::sigma)
        .def_readonly("rho", &DerivedSpectral::rho);

    py::class_<PairDistribution>(m, "PairDistribution")
        .def_readonly("probs", &PairDistribution::probs)
        .def_readonly("tail_bound", &PairDistribution::tail_bound)
        .def("mean", &PairDistribution::mean)
        .def("k_max", &PairDistribution::k_max);

    py::class_<ChannelPlan>(m, "ChannelPlan")
        .def(py::init([](int n_pairs, CorrelationSign sign, double omega_sep, ProfileKind profile,
                         double width) {
                 ChannelPlan p{n_pairs, sign, omega_sep, profile, width};
                 p.validate();
                 return p;
             }),
             py::arg("n_pairs"), py::arg("sign"), py::arg("omega_sep"), py::arg("profile"),
             py::arg("width"))
        .def_readwrite("n_pairs", &ChannelPlan::n_pairs)
        .def_readwrite("sign", &ChannelPlan::sign)
        .def_readwrite("omega_sep", &ChannelPlan::omega_sep)
        .def_readwrite("profile", &ChannelPlan::profile)
        .def_readwrite("width", &ChannelPlan::width);

    py::class_<ChannelPair>(m, "ChannelPair")
        .def(py::init([](int id, double omega_s0, double omega_i0) {
                 return ChannelPair{id, omega_s0, omega_i0};
             }),
             py::arg("id"), py::arg("omega_s0"), py::arg("omega_i0"))
        .def_readonly("id", &ChannelPair::id)
        .def_readonly("omega_s0", &ChannelPair::omega_s0)
        .def_readonly("omega_i0", &ChannelPair::omega_i0);

    py::class_<BucketProbs>(m, "BucketProbs")
        .def_readonly("p_pp", &BucketProbs::p_pp)
        .def_readonly("p_pm", &BucketProbs::p_pm)
        .def_readonly("p_mp", &BucketProbs::p_mp)
        .def_readonly("p_mm", &BucketProbs::p_mm)
        .def("sum", &BucketProbs::sum);

    py::class_<LinkParams>(m, "LinkParams")
        .def(py::init([](double t_a, double t_b) {
                 LinkParams l{t_a, t_b};
                 l.validate();
                 return l;
             }),
             py::arg("t_a"), py::arg("t_b"))
        .def(py::init([](double t) {
                 LinkParams l{t, t};
                 l.validate();
                 return l;
             }),
             py::arg("t"))
        .def_readwrite("t_a", &LinkParams::t_a)
        .def_readwrite("t_b", &LinkParams::t_b);

    py::class_<ClickTable>(m, "ClickTable")
        .def_readonly("p_hh", &ClickTable::p_hh)
        .def_readonly("p_hv", &ClickTable::p_hv)
        .def_readonly("p_vh", &ClickTable::p_vh)
        .def_readonly("p_vv", &ClickTable::p_vv)
        .def_readonly("truncation_error", &ClickTable::truncation_error)
        .def("sum", &ClickTable::sum);

    py::class_<PairRate>(m, "PairRate")
        .def_readonly("id", &PairRate::id)
        .def_readonly("p_acc", &PairRate::p_acc)
        .def_readonly("qber", &PairRate::qber)
        .def_readonly("key_rate", &PairRate::key_rate);

    py::class_<KeyRateResult>(m, "KeyRateResult")
        .def_readonly("per_pair", &KeyRateResult::per_pair)
        .def_readonly("k_total", &KeyRateResult::k_total)
        .def_readonly("mu_used", &KeyRateResult::mu_used)
        .def_readonly("gain", &KeyRateResult::gain)
        .def_readonly("r_per_second", &KeyRateResult::r_per_second);

    py::class_<MuOptResult>(m, "MuOptResult")
        .def_readonly("mu_star", &MuOptResult::mu_star)
        .def_readonly("rate_star", &MuOptResult::rate_star)
        .def_readonly("bracket_failure", &MuOptResult::bracket_failure)
        .def_readonly("evaluations", &MuOptResult::evaluations);

    py::class_<McPairEstimate>(m, "McPairEstimate")
        .def_readonly("id", &McPairEstimate::id)
        .def_readonly("f_hh", &McPairEstimate::f_hh)
        .def_readonly("f_hv", &McPairEstimate::f_hv)
        .def_readonly("f_vh", &McPairEstimate::f_vh)
        .def_readonly("f_vv", &McPairEstimate::f_vv)
        .def_readonly("se_hh", &McPairEstimate::se_hh)
        .def_readonly("se_hv", &McPairEstimate::se_hv)
        .def_readonly("se_vh", &McPairEstimate::se_vh)
        .def_readonly("se_vv", &McPairEstimate::se_vv)
        .def_readonly("qber", &McPairEstimate::qber)
        .def_readonly("bucket_counts", &McPairEstimate::bucket_counts);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("per_pair", &McEstimate::per_pair)
        .def_readonly("trials", &McEstimate::trials)
        .def_readonly("seed", &McEstimate::seed)
        .def_readonly("pairs_emitted", &McEstimate::pairs_emitted)
        .def_readonly("hv_count_hist", &McEstimate::hv_count_hist);

    py::class_<Table>(m, "Table")
        .def_readonly("columns", &Table::columns)
        .def_readonly("rows", &Table::rows)
        .def_readonly("meta", &Table::meta);

    m.def("biphoton_density", &biphoton_density, py::arg("omega_s"), py::arg("omega_i"),
          py::arg("src"));
    m.def("derived_params", &derived_params, py::arg("src"));
    m.def("mode_strengths", &mode_strengths, py::arg("src"), py::arg("m_count"));
    m.def("auto_k_max", &auto_k_max, py::arg("src"), py::arg("tail_tol"));
    m.def("pair_distribution", &pair_distribution, py::arg("src"), py::arg("k_max"),
          py::arg("max_tail") = 1e-9);
    m.def("build_grid", &build_grid, py::arg("plan"));
    m.def("bucket_probs_rect", &bucket_probs_rect, py::arg("pair"), py::arg("delta_omega"),
          py::arg("src"));
    m.def("bucket_probs_gauss", &bucket_probs_gauss, py::arg("pair"), py::arg("sigma_f"),
          py::arg("src"));
    m.def("bucket_probs", &bucket_probs, py::arg("pair"), py::arg("plan"), py::arg("src"));
    m.def(
        "rescale",
        [](const ChannelPlan& plan, const SourceParams& src, double factor) {
            const RescaledConfig r = rescale(plan, src, factor);
            return py::make_tuple(r.plan, r.src);
        },
        py::arg("plan"), py::arg("src"), py::arg("factor"));
    m.def("joint_entry_prob", &joint_entry_prob, py::arg("m_h"), py::arg("m_v"), py::arg("n_h"),
          py::arg("n_v"), py::arg("buckets"), py::arg("pi_hv"), py::arg("pi_vh"));
    m.def("click_table", &click_table, py::arg("buckets"), py::arg("pi_hv"), py::arg("pi_vh"),
          py::arg("link"), py::arg("rel_tol") = 1e-9);
    m.def("click_table_nowdm", &click_table_nowdm, py::arg("pi_hv"), py::arg("pi_vh"),
          py::arg("link"), py::arg("rel_tol") = 1e-9);
    m.def(
        "acceptance_and_qber",
        [](const ClickTable& t) {
            const Acceptance a = acceptance_and_qber(t);
            return py::make_tuple(a.p_acc, a.qber);
        },
        py::arg("table"));
    m.def("binary_entropy", &binary_entropy, py::arg("q"));
    m.def("secret_key_rate", &secret_key_rate, py::arg("p_acc"), py::arg("qber"));
    m.def("total_wdm_rate",
          py::overload_cast<const ChannelPlan&, const SourceParams&, const LinkParams&>(
              &total_wdm_rate),
          py::arg("plan"), py::arg("src"), py::arg("link"));
    m.def(
        "no_wdm_rate",
        [](const SourceParams& src, const LinkParams& link) {
            const NoWdmRate r = no_wdm_rate(src, link);
            return py::make_tuple(r.p_acc, r.qber, r.key_rate);
        },
        py::arg("src"), py::arg("link"));
    m.def("gain", &gain, py::arg("k_wdm_total"), py::arg("k_nowdm_thermal"));
    m.def("repetition_rate", &repetition_rate, py::arg("tau_rec"), py::arg("tau_p"));
    m.def("time_rate", &time_rate, py::arg("key_rate_per_use"), py::arg("tau_rec"),
          py::arg("tau_p"));
    m.def("optimize_wdm_mu", &optimize_wdm_mu, py::arg("plan"), py::arg("src"), py::arg("link"),
          py::arg("mu_lo") = kDefaultMuLo, py::arg("mu_hi") = kDefaultMuHi);
    m.def("optimize_nowdm_mu", &optimize_nowdm_mu, py::arg("src"), py::arg("link"),
          py::arg("mu_lo") = kDefaultMuLo, py::arg("mu_hi") = kDefaultMuHi);
    m.def("thermal_baseline_rate", &thermal_baseline_rate, py::arg("link"),
          py::arg("mu_lo") = kDefaultMuLo, py::arg("mu_hi") = kDefaultMuHi);
    m.def("simulate", &simulate, py::arg("plan"), py::arg("src"), py::arg("link"),
          py::arg("trials"), py::arg("seed"), py::arg("jobs") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_figure", &run_figure, py::arg("id"), py::arg("jobs") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("appendix_delta_k", &appendix_delta_k, py::arg("sigma_cr"), py::arg("tau_p"),
          py::arg("modes"), py::arg("jobs") = 0, py::call_guard<py::gil_scoped_release>());
}
