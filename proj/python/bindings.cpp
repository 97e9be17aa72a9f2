#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "siga/convergence.hpp"
#include "siga/harness.hpp"
#include "siga/io.hpp"
#include "siga/linmodel.hpp"
#include "siga/mimo.hpp"
#include "siga/siga.hpp"

namespace py = pybind11;
using namespace siga;

namespace {

GaussianLinearModel make_model(CMatrix A, RVector D, double sigma_z2, CVector y)
{
    GaussianLinearModel m;
    m.A = std::move(A);
    m.D = std::move(D);
    m.sigma_z2 = sigma_z2;
    m.y = std::move(y);
    return m;
}

std::vector<std::string> validation_messages(const GaussianLinearModel& m, double tol)
{
    std::vector<std::string> out;
    for (const auto& v : validate_model(m, tol)) {
        out.push_back(to_string(v));
    }
    return out;
}

SigaResult run_model(const GaussianLinearModel& m, double d, int t_max, double tol_nu, double tol_theta,
                     std::optional<RVector> nu_init, std::optional<CVector> theta_init,
                     std::optional<double> divergence_guard, bool nu_only)
{
    SigaConfig cfg;
    cfg.d = d;
    cfg.t_max = t_max;
    cfg.tol_nu = tol_nu;
    cfg.tol_theta = tol_theta;
    cfg.nu_init = std::move(nu_init);
    cfg.theta_init = std::move(theta_init);
    cfg.divergence_guard = divergence_guard;
    cfg.nu_only = nu_only;
    py::gil_scoped_release release;
    return run(m, cfg);
}

std::string run_experiment_json(const std::string& spec_json, const std::string& base_dir)
{
    auto doc = nlohmann::json::parse(spec_json);
    harness::ExperimentSpec spec = harness::parse_spec(doc);
    auto& support = spec.mimo.support;
    if (!base_dir.empty() && support.kind == harness::SupportSource::Kind::File &&
        std::filesystem::path(support.path).is_relative()) {
        support.path = (std::filesystem::path(base_dir) / support.path).string();
    }
    harness::Manifest manifest;
    {
        py::gil_scoped_release release;
        manifest = harness::run_experiment(spec);
    }
    return io::dump_json(manifest.document, -1);
}

std::string list_scenarios_json()
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : harness::list_scenarios()) {
        out.push_back({{"name", s.name},
                       {"description", s.description},
                       {"snr_definition", s.snr_definition},
                       {"defaults", s.defaults}});
    }
    return io::dump_json(out, -1);
}

}  // namespace

PYBIND11_MODULE(_siga, m)
{
    m.doc() = "Damped first-order iteration for Gaussian linear models";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);

    py::class_<GaussianLinearModel>(m, "GaussianLinearModel")
        .def(py::init(&make_model), py::arg("A"), py::arg("D"), py::arg("sigma_z2"), py::arg("y"))
        .def_readwrite("A", &GaussianLinearModel::A)
        .def_readwrite("D", &GaussianLinearModel::D)
        .def_readwrite("sigma_z2", &GaussianLinearModel::sigma_z2)
        .def_readwrite("y", &GaussianLinearModel::y)
        .def_property_readonly("N", &GaussianLinearModel::rows)
        .def_property_readonly("M", &GaussianLinearModel::cols);

    py::class_<PosteriorExact>(m, "PosteriorExact")
        .def_readonly("mu", &PosteriorExact::mu)
        .def_readonly("Sigma", &PosteriorExact::Sigma)
        .def_readonly("mean_form_gap", &PosteriorExact::mean_form_gap);

    py::enum_<SigaStatus>(m, "SigaStatus")
        .value("Converged", SigaStatus::Converged)
        .value("MaxIterations", SigaStatus::MaxIterations)
        .value("Diverged", SigaStatus::Diverged);

    py::class_<SigaResult>(m, "SigaResult")
        .def_readonly("theta_star", &SigaResult::theta_star)
        .def_readonly("nu_star", &SigaResult::nu_star)
        .def_readonly("theta0", &SigaResult::theta0)
        .def_readonly("nu0", &SigaResult::nu0)
        .def_readonly("mu0", &SigaResult::mu0)
        .def_readonly("sigma0_diag", &SigaResult::sigma0_diag)
        .def_readonly("iterations", &SigaResult::iterations)
        .def_readonly("status", &SigaResult::status)
        .def_readonly("residual_nu", &SigaResult::residual_nu)
        .def_readonly("residual_theta", &SigaResult::residual_theta)
        .def_property_readonly("nu_norm2", [](const SigaResult& r) {
            std::vector<double> out;
            for (const auto& rec : r.trajectory) {
                out.push_back(rec.nu_norm2);
            }
            return out;
        })
        .def_property_readonly("theta_norm2", [](const SigaResult& r) {
            std::vector<double> out;
            for (const auto& rec : r.trajectory) {
                out.push_back(rec.theta_norm2);
            }
            return out;
        });

    py::class_<FixedPointData>(m, "FixedPointData")
        .def_readonly("nu_star", &FixedPointData::nu_star)
        .def_readonly("Lambda_star", &FixedPointData::Lambda_star)
        .def_readonly("beta_star", &FixedPointData::beta_star)
        .def_readonly("residual_g", &FixedPointData::residual_g)
        .def_readonly("residual_eq21", &FixedPointData::residual_eq21)
        .def_readonly("iterations", &FixedPointData::iterations);

    py::class_<ConvergenceCertificate>(m, "ConvergenceCertificate")
        .def_readonly("d", &ConvergenceCertificate::d)
        .def_readonly("rho_shift", &ConvergenceCertificate::rho_shift)
        .def_readonly("bound_general", &ConvergenceCertificate::bound_general)
        .def_readonly("bound_worst", &ConvergenceCertificate::bound_worst)
        .def_readonly("eig_Bstar", &ConvergenceCertificate::eig_Bstar)
        .def_readonly("eig_Btilde", &ConvergenceCertificate::eig_Btilde)
        .def_readonly("rho_Btilde", &ConvergenceCertificate::rho_Btilde)
        .def_readonly("certified", &ConvergenceCertificate::certified)
        .def_readonly("lemma_checks", &ConvergenceCertificate::lemma_checks)
        .def_readonly("lambda_margin", &ConvergenceCertificate::lambda_margin)
        .def_readonly("fixed_point", &ConvergenceCertificate::fixed_point);

    py::class_<DampingBounds>(m, "DampingBounds")
        .def_readonly("general", &DampingBounds::general)
        .def_readonly("worst", &DampingBounds::worst)
        .def_readonly("mimo", &DampingBounds::mimo)
        .def_readonly("apsp", &DampingBounds::apsp);

    m.def("validate_model", &validation_messages, py::arg("model"), py::arg("tol") = kUnitMagnitudeTol);
    m.def("exact_posterior", &exact_posterior, py::arg("model"));
    m.def("random_unit_magnitude_matrix", &random_unit_magnitude_matrix, py::arg("N"), py::arg("M"), py::arg("seed"));
    m.def("make_general_random_model", &make_general_random_model, py::arg("N"), py::arg("M"), py::arg("sigma_z2"),
          py::arg("seed"));

    m.def("nu_step", &nu_step, py::arg("nu"), py::arg("d"), py::arg("D"), py::arg("sigma_z2"), py::arg("N"));
    m.def("nu_lower_bound", &nu_lower_bound, py::arg("M"), py::arg("N"), py::arg("sigma_z2"));
    m.def(
        "theta_step",
        [](const CVector& theta, const RVector& nu, double d, const GaussianLinearModel& model) {
            return theta_step(theta, nu, d, SigaWorkspace(model));
        },
        py::arg("theta"), py::arg("nu"), py::arg("d"), py::arg("model"));
    m.def("run", &run_model, py::arg("model"), py::arg("d") = 1.0, py::arg("t_max") = 10000,
          py::arg("tol_nu") = 1e-12, py::arg("tol_theta") = 1e-10, py::arg("nu_init") = py::none(),
          py::arg("theta_init") = py::none(), py::arg("divergence_guard") = py::none(), py::arg("nu_only") = false);

    m.def("nu_fixed_point", &nu_fixed_point, py::arg("model"), py::arg("d") = 1.0, py::arg("tol") = 1e-13,
          py::arg("itmax") = 100000, py::arg("nu_init") = py::none());
    m.def("rho_shift", py::overload_cast<const CMatrix&, Index>(&rho_shift), py::arg("A"), py::arg("dense_limit") = 3000);
    m.def(
        "damping_bounds",
        [](double rho, Index N, Index M, std::optional<std::tuple<int, int, int, int>> structure) {
            std::optional<MimoStructure> s;
            if (structure) {
                auto [K, Fv, Fh, Ftau] = *structure;
                s = MimoStructure{K, Fv, Fh, Ftau};
            }
            return damping_bounds(rho, N, M, s);
        },
        py::arg("rho_shift"), py::arg("N"), py::arg("M"), py::arg("structure") = py::none());
    m.def(
        "certify",
        [](const GaussianLinearModel& model, double d, std::optional<double> rho) {
            CertifyOptions opts;
            opts.rho_shift = rho;
            py::gil_scoped_release release;
            return certify(model, d, opts);
        },
        py::arg("model"), py::arg("d"), py::arg("rho_shift") = py::none());

    m.def("save_model", &io::save_model, py::arg("path"), py::arg("model"));
    m.def("load_model", &io::load_model, py::arg("path"));

    auto mm = m.def_submodule("mimo", "MIMO-OFDM measurement construction");
    py::class_<mimo::MimoOfdmConfig>(mm, "MimoOfdmConfig")
        .def(py::init<>())
        .def_readwrite("Nrv", &mimo::MimoOfdmConfig::Nrv)
        .def_readwrite("Nrh", &mimo::MimoOfdmConfig::Nrh)
        .def_readwrite("K", &mimo::MimoOfdmConfig::K)
        .def_readwrite("Np", &mimo::MimoOfdmConfig::Np)
        .def_readwrite("Nc", &mimo::MimoOfdmConfig::Nc)
        .def_readwrite("Ng", &mimo::MimoOfdmConfig::Ng)
        .def_readwrite("Fv", &mimo::MimoOfdmConfig::Fv)
        .def_readwrite("Fh", &mimo::MimoOfdmConfig::Fh)
        .def_readwrite("Ftau", &mimo::MimoOfdmConfig::Ftau)
        .def_property_readonly("N", &mimo::MimoOfdmConfig::N)
        .def_property_readonly("Nf", &mimo::MimoOfdmConfig::Nf)
        .def_property_readonly("Mtilde_general", &mimo::MimoOfdmConfig::Mtilde_general)
        .def_property_readonly("Mtilde_apsp", &mimo::MimoOfdmConfig::Mtilde_apsp)
        .def("validate", &mimo::MimoOfdmConfig::validate);
    mm.def("small_config", &mimo::small_config);
    mm.def("table_config", &mimo::table_config);
    mm.def("full_general_matrix",
           [](const mimo::MimoOfdmConfig& cfg, std::uint64_t seed) {
               return mimo::full_general_matrix(cfg, mimo::random_general_pilots(cfg, seed));
           },
           py::arg("cfg"), py::arg("pilot_seed"));
    mm.def("full_apsp_matrix", &mimo::full_apsp_matrix, py::arg("cfg"));

    auto hm = m.def_submodule("harness", "Experiment harness");
    hm.def("_run_experiment_json", &run_experiment_json, py::arg("spec_json"), py::arg("base_dir") = "");
    hm.def("_list_scenarios_json", &list_scenarios_json);
}
