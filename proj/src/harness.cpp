#include "siga/harness.hpp"
#include "siga/io.hpp"
#include "siga/random.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace siga::harness {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what)
{
    throw std::invalid_argument("spec field '" + field + "': " + what);
}

template <typename T>
T read(const json& obj, const std::string& key, const std::string& path, T fallback)
{
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        field_error(path + key, e.what());
    }
}

NuInit parse_nu_init(const json& v, const std::string& field)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "zero") {
            return {NuInit::Kind::Zero, 0.0};
        }
        if (s == "g_min") {
            return {NuInit::Kind::GMin, 0.0};
        }
        field_error(field, "expected \"zero\", \"g_min\" or a number, got \"" + s + "\"");
    }
    if (v.is_number()) {
        return {NuInit::Kind::Constant, v.get<double>()};
    }
    field_error(field, "expected \"zero\", \"g_min\" or a number");
}

json nu_init_to_json(const NuInit& n)
{
    switch (n.kind) {
    case NuInit::Kind::Zero:
        return "zero";
    case NuInit::Kind::GMin:
        return "g_min";
    case NuInit::Kind::Constant:
        break;
    }
    return n.value;
}

RVector make_nu_init(const NuInit& n, Index N, Index M, double sigma_z2)
{
    switch (n.kind) {
    case NuInit::Kind::Zero:
        return RVector::Zero(M);
    case NuInit::Kind::GMin:
        return nu_lower_bound(M, N, sigma_z2);
    case NuInit::Kind::Constant:
        break;
    }
    return RVector::Constant(M, n.value);
}

std::vector<int> default_shifts(const mimo::MimoOfdmConfig& cfg)
{
    std::vector<int> shifts;
    const int span = cfg.Ftau * cfg.Np;
    for (int k = 0; k < cfg.K; ++k) {
        shifts.push_back(static_cast<int>((static_cast<long long>(k) * span) / cfg.K));
    }
    return shifts;
}

mimo::BeamSupport make_support(const SupportSource& src, Index Mtilde, std::uint64_t seed)
{
    switch (src.kind) {
    case SupportSource::Kind::Full:
        return mimo::full_support(Mtilde);
    case SupportSource::Kind::Random:
        return mimo::random_support(Mtilde, src.count, seed, src.omega_min, src.omega_max);
    case SupportSource::Kind::File:
        break;
    }
    return mimo::load_support(src.path);
}

std::string cell_stem(int id)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "cell_%04d", id);
    return buf;
}

struct Instance {
    std::uint64_t seed = 0;
    GaussianLinearModel model;
    double rho = 0.0;
    double bound_general = 0.0;
    double snr = 0.0;
    std::optional<PosteriorExact> posterior;
    std::optional<std::string> error;
};

struct CellPlan {
    int id = 0;
    std::size_t instance = 0;
    DampingChoice damping;
    NuInit nu_init;
    double theta_init = 0.0;
};

CellOutcome run_cell(const ExperimentSpec& spec, const Instance& inst, const CellPlan& plan)
{
    CellOutcome out;
    out.id = plan.id;
    out.seed = inst.seed;
    out.nu_init = plan.nu_init.label();
    out.theta_init = plan.theta_init;
    out.d_source = plan.damping.bound_fraction ? ("bound_fraction:" + io::format_double(plan.damping.value))
                                               : std::string("fixed");
    try {
        if (inst.error) {
            throw std::runtime_error("instance construction failed: " + *inst.error);
        }
        const Index N = inst.model.rows();
        const Index M = inst.model.cols();
        double d = plan.damping.value;
        if (plan.damping.bound_fraction) {
            d = std::min(1.0, plan.damping.value * inst.bound_general);
        }
        out.d = d;

        SigaConfig cfg;
        cfg.d = d;
        cfg.t_max = spec.t_max;
        cfg.tol_nu = spec.tol_nu;
        cfg.tol_theta = spec.tol_theta;
        cfg.divergence_guard = spec.divergence_guard;
        cfg.nu_only = spec.nu_only;
        cfg.nu_init = make_nu_init(plan.nu_init, N, M, inst.model.sigma_z2);
        cfg.theta_init = CVector::Constant(M, Complex(plan.theta_init, 0.0));

        const SigaResult result = run(inst.model, cfg);
        out.status = result.status;
        out.iterations = result.iterations;
        out.residual_nu = result.residual_nu;
        out.residual_theta = result.residual_theta;
        out.nu_star_norm2 = result.nu_star.norm();
        out.theta_star_norm2 = result.theta_star.norm();
        if (inst.posterior && result.status == SigaStatus::Converged && !spec.nu_only) {
            const double denom = inst.posterior->mu.norm();
            out.mu0_rel_error = denom > 0.0 ? (result.mu0 - inst.posterior->mu).norm() / denom
                                            : result.mu0.norm();
        }

        CertifyOptions copts;
        copts.rho_shift = inst.rho;
        const ConvergenceCertificate cert = certify(inst.model, d, copts);
        out.certified = cert.certified;
        out.rho_Btilde = cert.rho_Btilde;
        out.lemma_checks = cert.lemma_checks;

        const std::filesystem::path dir(spec.output_dir);
        const std::string stem = cell_stem(plan.id);

        std::ostringstream csv;
        io::write_trajectory_csv(csv, result.trajectory);
        io::write_file_atomic((dir / (stem + ".trajectory.csv")).string(), csv.str());

        json rj = io::to_json(result);
        rj["d"] = d;
        rj["seed"] = inst.seed;
        io::write_file_atomic((dir / (stem + ".result.json")).string(), io::dump_json(rj) + "\n");
        io::write_file_atomic((dir / (stem + ".certificate.json")).string(),
                              io::dump_json(io::to_json(cert)) + "\n");
        out.files = {stem + ".trajectory.csv", stem + ".result.json", stem + ".certificate.json"};
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

json outcome_to_json(const CellOutcome& c)
{
    json j;
    j["id"] = c.id;
    j["seed"] = c.seed;
    j["d"] = c.d;
    j["d_source"] = c.d_source;
    j["nu_init"] = c.nu_init;
    j["theta_init"] = c.theta_init;
    if (c.error) {
        j["error"] = *c.error;
        return j;
    }
    j["status"] = std::string(to_string(c.status));
    j["iterations"] = c.iterations;
    j["certified"] = c.certified;
    j["rho_Btilde"] = c.rho_Btilde;
    j["residual_nu"] = c.residual_nu;
    j["residual_theta"] = c.residual_theta;
    j["nu_star_norm2"] = c.nu_star_norm2;
    j["theta_star_norm2"] = c.theta_star_norm2;
    j["mu0_rel_error"] = c.mu0_rel_error ? json(*c.mu0_rel_error) : json(nullptr);
    j["lemma_checks"] = c.lemma_checks;
    j["files"] = c.files;
    return j;
}

}  // namespace

std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::GeneralRandom:
        return "general_random";
    case Scenario::MimoGeneralPilot:
        return "mimo_general_pilot";
    case Scenario::MimoApsp:
        return "mimo_apsp";
    }
    return "unknown";
}

Scenario scenario_from_string(const std::string& name)
{
    if (name == "general_random") {
        return Scenario::GeneralRandom;
    }
    if (name == "mimo_general_pilot") {
        return Scenario::MimoGeneralPilot;
    }
    if (name == "mimo_apsp") {
        return Scenario::MimoApsp;
    }
    field_error("scenario", "unknown scenario \"" + name + "\"");
}

std::string NuInit::label() const
{
    switch (kind) {
    case Kind::Zero:
        return "zero";
    case Kind::GMin:
        return "g_min";
    case Kind::Constant:
        break;
    }
    return io::format_double(value);
}

ExperimentSpec parse_spec(const json& doc)
{
    if (!doc.is_object()) {
        field_error("<root>", "expected an object");
    }
    ExperimentSpec spec;
    spec.name = read<std::string>(doc, "name", "", spec.name);
    spec.scenario = scenario_from_string(read<std::string>(doc, "scenario", "", "general_random"));

    if (doc.contains("general")) {
        const json& g = doc.at("general");
        spec.general.N = read<Index>(g, "N", "general.", spec.general.N);
        spec.general.M = read<Index>(g, "M", "general.", spec.general.M);
        spec.general.sigma_z2 = read<double>(g, "sigma_z2", "general.", spec.general.sigma_z2);
    }
    if (doc.contains("mimo")) {
        const json& m = doc.at("mimo");
        auto& c = spec.mimo.config;
        c.Nrv = read<int>(m, "Nrv", "mimo.", c.Nrv);
        c.Nrh = read<int>(m, "Nrh", "mimo.", c.Nrh);
        c.K = read<int>(m, "K", "mimo.", c.K);
        c.Np = read<int>(m, "Np", "mimo.", c.Np);
        c.Nc = read<int>(m, "Nc", "mimo.", c.Nc);
        c.Ng = read<int>(m, "Ng", "mimo.", c.Ng);
        c.Fv = read<int>(m, "Fv", "mimo.", c.Fv);
        c.Fh = read<int>(m, "Fh", "mimo.", c.Fh);
        c.Ftau = read<int>(m, "Ftau", "mimo.", c.Ftau);
        const auto rounding = read<std::string>(m, "nf_rounding", "mimo.", "floor");
        if (rounding == "floor") {
            c.rounding = mimo::NfRounding::Floor;
        } else if (rounding == "ceil") {
            c.rounding = mimo::NfRounding::Ceil;
        } else {
            field_error("mimo.nf_rounding", "expected \"floor\" or \"ceil\"");
        }
        spec.mimo.sigma_z2 = read<double>(m, "sigma_z2", "mimo.", spec.mimo.sigma_z2);
        spec.mimo.shifts = read<std::vector<int>>(m, "shifts", "mimo.", {});
        if (m.contains("support")) {
            const json& s = m.at("support");
            const auto kind = read<std::string>(s, "kind", "mimo.support.", "full");
            auto& src = spec.mimo.support;
            if (kind == "full") {
                src.kind = SupportSource::Kind::Full;
            } else if (kind == "random") {
                src.kind = SupportSource::Kind::Random;
                src.count = read<Index>(s, "count", "mimo.support.", 0);
                src.omega_min = read<double>(s, "omega_min", "mimo.support.", src.omega_min);
                src.omega_max = read<double>(s, "omega_max", "mimo.support.", src.omega_max);
            } else if (kind == "file") {
                src.kind = SupportSource::Kind::File;
                src.path = read<std::string>(s, "path", "mimo.support.", "");
            } else {
                field_error("mimo.support.kind", "expected \"full\", \"random\" or \"file\"");
            }
        }
    }

    spec.seeds = read<std::vector<std::uint64_t>>(doc, "seeds", "", spec.seeds);
    if (doc.contains("sweep")) {
        const json& sw = doc.at("sweep");
        std::vector<DampingChoice> damping;
        for (double d : read<std::vector<double>>(sw, "d", "sweep.", {})) {
            damping.push_back({d, false});
        }
        for (double f : read<std::vector<double>>(sw, "d_bound_fraction", "sweep.", {})) {
            damping.push_back({f, true});
        }
        if (!damping.empty()) {
            spec.damping = std::move(damping);
        }
        if (sw.contains("nu_init")) {
            spec.nu_inits.clear();
            const json& arr = sw.at("nu_init");
            if (!arr.is_array()) {
                field_error("sweep.nu_init", "expected an array");
            }
            for (std::size_t k = 0; k < arr.size(); ++k) {
                spec.nu_inits.push_back(parse_nu_init(arr[k], "sweep.nu_init[" + std::to_string(k) + "]"));
            }
        }
        spec.theta_inits = read<std::vector<double>>(sw, "theta_init", "sweep.", spec.theta_inits);
    }
    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        spec.t_max = read<int>(s, "t_max", "solver.", spec.t_max);
        spec.tol_nu = read<double>(s, "tol_nu", "solver.", spec.tol_nu);
        spec.tol_theta = read<double>(s, "tol_theta", "solver.", spec.tol_theta);
        const auto mode = read<std::string>(s, "mode", "solver.", "joint");
        if (mode != "joint" && mode != "nu_only") {
            field_error("solver.mode", "expected \"joint\" or \"nu_only\"");
        }
        spec.nu_only = mode == "nu_only";
        if (s.contains("divergence_guard") && !s.at("divergence_guard").is_null()) {
            spec.divergence_guard = read<double>(s, "divergence_guard", "solver.", 0.0);
        }
    }
    spec.posterior_error = read<bool>(doc, "posterior_error", "", spec.posterior_error);
    spec.workers = read<int>(doc, "workers", "", spec.workers);
    spec.output_dir = read<std::string>(doc, "output_dir", "", spec.output_dir);
    validate_spec(spec);
    return spec;
}

ExperimentSpec load_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open spec " + path);
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    ExperimentSpec spec = parse_spec(doc);
    auto& support = spec.mimo.support;
    if (support.kind == SupportSource::Kind::File && std::filesystem::path(support.path).is_relative()) {
        support.path = (std::filesystem::path(path).parent_path() / support.path).string();
    }
    return spec;
}

json spec_to_json(const ExperimentSpec& spec)
{
    json j;
    j["name"] = spec.name;
    j["scenario"] = to_string(spec.scenario);
    if (spec.scenario == Scenario::GeneralRandom) {
        j["general"] = {{"N", spec.general.N}, {"M", spec.general.M}, {"sigma_z2", spec.general.sigma_z2}};
    } else {
        const auto& c = spec.mimo.config;
        json m = {{"Nrv", c.Nrv}, {"Nrh", c.Nrh}, {"K", c.K},   {"Np", c.Np},     {"Nc", c.Nc},
                  {"Ng", c.Ng},   {"Fv", c.Fv},   {"Fh", c.Fh}, {"Ftau", c.Ftau}, {"sigma_z2", spec.mimo.sigma_z2}};
        m["nf_rounding"] = c.rounding == mimo::NfRounding::Floor ? "floor" : "ceil";
        const auto& src = spec.mimo.support;
        switch (src.kind) {
        case SupportSource::Kind::Full:
            m["support"] = {{"kind", "full"}};
            break;
        case SupportSource::Kind::Random:
            m["support"] = {{"kind", "random"}, {"count", src.count}, {"omega_min", src.omega_min},
                            {"omega_max", src.omega_max}};
            break;
        case SupportSource::Kind::File:
            m["support"] = {{"kind", "file"}, {"path", src.path}};
            break;
        }
        if (spec.scenario == Scenario::MimoApsp) {
            m["shifts"] = spec.mimo.shifts.empty() ? default_shifts(c) : spec.mimo.shifts;
        }
        j["mimo"] = m;
    }
    j["seeds"] = spec.seeds;
    json d = json::array();
    json frac = json::array();
    for (const auto& c : spec.damping) {
        (c.bound_fraction ? frac : d).push_back(c.value);
    }
    json nu = json::array();
    for (const auto& n : spec.nu_inits) {
        nu.push_back(nu_init_to_json(n));
    }
    j["sweep"] = {{"d", d}, {"d_bound_fraction", frac}, {"nu_init", nu}, {"theta_init", spec.theta_inits}};
    j["solver"] = {{"t_max", spec.t_max},
                   {"tol_nu", spec.tol_nu},
                   {"tol_theta", spec.tol_theta},
                   {"mode", spec.nu_only ? "nu_only" : "joint"},
                   {"divergence_guard", spec.divergence_guard ? json(*spec.divergence_guard) : json(nullptr)}};
    j["posterior_error"] = spec.posterior_error;
    return j;
}

void validate_spec(const ExperimentSpec& spec)
{
    if (spec.seeds.empty()) {
        field_error("seeds", "at least one seed is required");
    }
    if (spec.damping.empty()) {
        field_error("sweep.d", "at least one damping factor is required");
    }
    for (const auto& c : spec.damping) {
        if (c.bound_fraction) {
            if (!(c.value > 0.0)) {
                field_error("sweep.d_bound_fraction", "fractions must be positive");
            }
        } else if (!(c.value > 0.0 && c.value <= 1.0)) {
            field_error("sweep.d", "every damping factor must lie in (0, 1]");
        }
    }
    if (spec.nu_inits.empty() || spec.theta_inits.empty()) {
        field_error("sweep", "nu_init and theta_init lists must not be empty");
    }
    if (spec.t_max < 1) {
        field_error("solver.t_max", "must be positive");
    }
    if (!(spec.tol_nu > 0.0) || !(spec.tol_theta > 0.0)) {
        field_error("solver", "tolerances must be positive");
    }
    if (spec.workers < 1) {
        field_error("workers", "must be positive");
    }
    Index N = 0;
    double sigma_z2 = 0.0;
    if (spec.scenario == Scenario::GeneralRandom) {
        if (spec.general.N < 2) {
            field_error("general.N", "must be at least 2");
        }
        if (spec.general.M < 2) {
            field_error("general.M", "must be at least 2");
        }
        if (!(spec.general.sigma_z2 > 0.0)) {
            field_error("general.sigma_z2", "must be positive");
        }
        N = spec.general.N;
        sigma_z2 = spec.general.sigma_z2;
    } else {
        try {
            spec.mimo.config.validate();
        } catch (const std::exception& e) {
            field_error("mimo", e.what());
        }
        if (!(spec.mimo.sigma_z2 > 0.0)) {
            field_error("mimo.sigma_z2", "must be positive");
        }
        const auto& src = spec.mimo.support;
        if (src.kind == SupportSource::Kind::Random && src.count < 2) {
            field_error("mimo.support.count", "must be at least 2");
        }
        if (src.kind == SupportSource::Kind::File && src.path.empty()) {
            field_error("mimo.support.path", "required for kind \"file\"");
        }
        if (spec.scenario == Scenario::MimoApsp && !spec.mimo.shifts.empty() &&
            static_cast<int>(spec.mimo.shifts.size()) != spec.mimo.config.K) {
            field_error("mimo.shifts", "expected one shift per user");
        }
        N = spec.mimo.config.N();
        sigma_z2 = spec.mimo.sigma_z2;
    }
    const double lower = -static_cast<double>(N - 1) / sigma_z2;
    for (const auto& n : spec.nu_inits) {
        if (n.kind == NuInit::Kind::Constant && !(n.value <= 0.0 && n.value >= lower)) {
            field_error("sweep.nu_init", "constant " + io::format_double(n.value) + " outside [-(N-1)/sigma_z2, 0]");
        }
    }
}

GaussianLinearModel build_model(const ExperimentSpec& spec, std::uint64_t seed)
{
    switch (spec.scenario) {
    case Scenario::GeneralRandom:
        return make_general_random_model(spec.general.N, spec.general.M, spec.general.sigma_z2, seed);
    case Scenario::MimoGeneralPilot: {
        const auto& cfg = spec.mimo.config;
        const auto pilots = mimo::random_general_pilots(cfg, seed);
        const auto support = make_support(spec.mimo.support, cfg.Mtilde_general(), seed + 1);
        return mimo::make_model(mimo::build_general_measurement(cfg, pilots, support), spec.mimo.sigma_z2, seed + 2);
    }
    case Scenario::MimoApsp: {
        const auto& cfg = spec.mimo.config;
        mimo::ApspPilots pilots;
        pilots.shifts = spec.mimo.shifts.empty() ? default_shifts(cfg) : spec.mimo.shifts;
        detail::ComplexGaussian gauss(seed);
        pilots.p.resize(cfg.Np);
        for (Index i = 0; i < cfg.Np; ++i) {
            pilots.p(i) = gauss.phase();
        }
        const auto support = make_support(spec.mimo.support, cfg.Mtilde_apsp(), seed + 1);
        return mimo::make_model(mimo::build_apsp_measurement(cfg, pilots, support), spec.mimo.sigma_z2, seed + 2);
    }
    }
    throw std::logic_error("unhandled scenario");
}

double scenario_snr(const ExperimentSpec& spec, const GaussianLinearModel& model)
{
    if (spec.scenario == Scenario::GeneralRandom) {
        // E||A h||^2 / E||z||^2 = N sum(D) / (N sigma_z2) for unit-magnitude A
        return model.D.sum() / model.sigma_z2;
    }
    return 1.0 / model.sigma_z2;
}

Manifest run_experiment(const ExperimentSpec& spec)
{
    validate_spec(spec);
    std::filesystem::create_directories(spec.output_dir);

    std::vector<Instance> instances(spec.seeds.size());
    for (std::size_t k = 0; k < spec.seeds.size(); ++k) {
        Instance& inst = instances[k];
        inst.seed = spec.seeds[k];
        try {
            inst.model = build_model(spec, inst.seed);
            inst.rho = rho_shift(inst.model.A);
            inst.bound_general = damping_bounds(inst.rho, inst.model.rows(), inst.model.cols()).general;
            inst.snr = scenario_snr(spec, inst.model);
            if (spec.posterior_error) {
                inst.posterior = exact_posterior(inst.model);
            }
        } catch (const std::exception& e) {
            inst.error = e.what();
        }
    }

    std::vector<CellPlan> plans;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        for (const auto& d : spec.damping) {
            for (const auto& nu : spec.nu_inits) {
                for (double th : spec.theta_inits) {
                    plans.push_back({static_cast<int>(plans.size()) + 1, k, d, nu, th});
                }
            }
        }
    }

    std::vector<CellOutcome> outcomes(plans.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t i = next++; i < plans.size(); i = next++) {
            outcomes[i] = run_cell(spec, instances[plans[i].instance], plans[i]);
        }
    };
    const int nthreads = std::max(1, std::min<int>(spec.workers, static_cast<int>(plans.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
    }

    Manifest manifest;
    json doc;
    doc["spec"] = spec_to_json(spec);
    json inst_json = json::array();
    for (const Instance& inst : instances) {
        json ij = {{"seed", inst.seed}};
        if (inst.error) {
            ij["error"] = *inst.error;
            manifest.any_error = true;
        } else {
            ij["N"] = inst.model.rows();
            ij["M"] = inst.model.cols();
            ij["sigma_z2"] = inst.model.sigma_z2;
            ij["rho_shift"] = inst.rho;
            ij["bound_general"] = inst.bound_general;
            ij["bound_worst"] = 2.0 / static_cast<double>(inst.model.cols());
            ij["snr"] = inst.snr;
            ij["snr_db"] = 10.0 * std::log10(inst.snr);
        }
        inst_json.push_back(ij);
    }
    doc["instances"] = inst_json;
    doc["tolerances"] = {{"tol_nu", spec.tol_nu},
                         {"tol_theta", spec.tol_theta},
                         {"t_max", spec.t_max},
                         {"certification", kCertificationTol}};
    json cells = json::array();
    for (const CellOutcome& c : outcomes) {
        cells.push_back(outcome_to_json(c));
        manifest.any_error = manifest.any_error || c.error.has_value();
    }
    doc["cells"] = cells;
    doc["any_error"] = manifest.any_error;
    io::write_file_atomic((std::filesystem::path(spec.output_dir) / "manifest.json").string(),
                          io::dump_json(doc) + "\n");

    manifest.document = std::move(doc);
    manifest.cells = std::move(outcomes);
    return manifest;
}

std::vector<ScenarioInfo> list_scenarios()
{
    std::vector<ScenarioInfo> out;

    ExperimentSpec general;
    general.scenario = Scenario::GeneralRandom;
    out.push_back({"general_random",
                   "Unit-magnitude A from normalized CN(0,1) draws, h ~ CN(0, I), sigma_z2 = 0.15 (30 dB).",
                   "SNR = E||A h||^2 / E||z||^2 = sum(D) / sigma_z2",
                   spec_to_json(general)});

    ExperimentSpec mg;
    mg.scenario = Scenario::MimoGeneralPilot;
    json mg_defaults = spec_to_json(mg);
    const auto table = mimo::table_config();
    mg_defaults["table_reference"] = {
        {"Nrv", table.Nrv}, {"Nrh", table.Nrh}, {"K", table.K},   {"Np", table.Np},     {"Nc", table.Nc},
        {"Ng", table.Ng},   {"Fv", table.Fv},   {"Fh", table.Fh}, {"Ftau", table.Ftau}, {"N", table.N()},
        {"note", "full scale, not CI-tested; desk default keeps K and the fine factors of the reduced config"}};
    out.push_back({"mimo_general_pilot",
                   "Desk-scaled MIMO-OFDM with random unit-magnitude pilots per user, A = (M^T (x) V) E.",
                   "SNR = 1 / sigma_z2", mg_defaults});

    ExperimentSpec ap;
    ap.scenario = Scenario::MimoApsp;
    json ap_defaults = spec_to_json(ap);
    ap_defaults["table_reference"] = mg_defaults["table_reference"];
    out.push_back({"mimo_apsp",
                   "Desk-scaled MIMO-OFDM with adjustable phase shift pilots, A = (Fd (x) V) E_p.",
                   "SNR = 1 / sigma_z2", ap_defaults});
    return out;
}

}  // namespace siga::harness
