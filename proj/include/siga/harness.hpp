#pragma once

#include "siga/convergence.hpp"
#include "siga/linmodel.hpp"
#include "siga/mimo.hpp"
#include "siga/siga.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace siga::harness {

enum class Scenario { GeneralRandom, MimoGeneralPilot, MimoApsp };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct GeneralParams {
    Index N = 300;
    Index M = 150;
    double sigma_z2 = 0.15;
};

struct SupportSource {
    enum class Kind { Full, Random, File } kind = Kind::Full;
    Index count = 0;  // Random only
    double omega_min = 0.1;
    double omega_max = 1.0;
    std::string path;  // File only
};

struct MimoParams {
    mimo::MimoOfdmConfig config = mimo::small_config();
    double sigma_z2 = 0.01;
    SupportSource support;
    std::vector<int> shifts;  // APSP only; evenly spread over [0, Ftau Np) when empty
};

/// Either a fixed damping factor or a fraction of the certified bound 2 / (1 + rho_shift / N).
struct DampingChoice {
    double value = 1.0;
    bool bound_fraction = false;
};

/// nu(0) = 0, nu(0) = -(N-1)/sigma_z2 * 1, or nu(0) = c * 1.
struct NuInit {
    enum class Kind { Zero, GMin, Constant } kind = Kind::Zero;
    double value = 0.0;
    std::string label() const;
};

struct ExperimentSpec {
    std::string name = "experiment";
    Scenario scenario = Scenario::GeneralRandom;
    GeneralParams general;
    MimoParams mimo;
    std::vector<std::uint64_t> seeds{1};
    std::vector<DampingChoice> damping{{1.0, false}};
    std::vector<NuInit> nu_inits{NuInit{}};
    std::vector<double> theta_inits{0.0};  // theta(0) = c * 1
    int t_max = 10000;
    double tol_nu = 1e-12;
    double tol_theta = 1e-10;
    std::optional<double> divergence_guard;
    bool nu_only = false;  // iterate nu alone (theta held at its initialization)
    bool posterior_error = true;  // record mu0 error against the exact posterior
    int workers = 1;
    std::string output_dir = "siga_out";
};

/// Parses a spec document; throws std::invalid_argument naming the offending field.
ExperimentSpec parse_spec(const nlohmann::json& doc);
ExperimentSpec load_spec(const std::string& path);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Field-level validation; throws std::invalid_argument.
void validate_spec(const ExperimentSpec& spec);

/// Builds the model of one scenario instance.
GaussianLinearModel build_model(const ExperimentSpec& spec, std::uint64_t seed);

/// Expected-SNR bookkeeping of each scenario: sum(D) / sigma_z2 for the general case, 1 / sigma_z2 for MIMO.
double scenario_snr(const ExperimentSpec& spec, const GaussianLinearModel& model);

struct CellOutcome {
    int id = 0;
    std::uint64_t seed = 0;
    double d = 0.0;
    std::string d_source;
    std::string nu_init;
    double theta_init = 0.0;
    std::optional<std::string> error;
    SigaStatus status = SigaStatus::MaxIterations;
    int iterations = 0;
    bool certified = false;
    double rho_Btilde = 0.0;
    double residual_nu = 0.0;
    double residual_theta = 0.0;
    double nu_star_norm2 = 0.0;
    double theta_star_norm2 = 0.0;
    std::optional<double> mu0_rel_error;
    std::map<std::string, bool> lemma_checks;
    std::vector<std::string> files;
};

struct Manifest {
    nlohmann::json document;
    std::vector<CellOutcome> cells;
    bool any_error = false;
};

/// Runs every (seed, d, nu_init, theta_init) cell, writing per-cell trajectory CSV, result and
/// certificate JSON, and manifest.json into spec.output_dir.
Manifest run_experiment(const ExperimentSpec& spec);

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::string snr_definition;
    nlohmann::json defaults;
};

std::vector<ScenarioInfo> list_scenarios();

}  // namespace siga::harness
