#include <CLI11.hpp>
#include <json.hpp>

#include "siga/convergence.hpp"
#include "siga/harness.hpp"
#include "siga/io.hpp"
#include "siga/linmodel.hpp"
#include "siga/mimo.hpp"

#include <iostream>
#include <optional>

namespace {

using nlohmann::json;

int cmd_run(const std::string& spec_path, const std::string& out_dir, int workers,
            std::optional<std::uint64_t> seed)
{
    siga::harness::ExperimentSpec spec = siga::harness::load_spec(spec_path);
    if (!out_dir.empty()) {
        spec.output_dir = out_dir;
    }
    if (workers > 0) {
        spec.workers = workers;
    }
    if (seed) {
        spec.seeds = {*seed};
    }
    const auto manifest = siga::harness::run_experiment(spec);
    for (const auto& cell : manifest.cells) {
        std::cout << "cell " << cell.id << " seed=" << cell.seed << " d=" << siga::io::format_double(cell.d)
                  << " nu0=" << cell.nu_init << " theta0=" << siga::io::format_double(cell.theta_init) << ": ";
        if (cell.error) {
            std::cout << "ERROR " << *cell.error << "\n";
            continue;
        }
        std::cout << siga::to_string(cell.status) << " after " << cell.iterations
                  << " iterations, certified=" << (cell.certified ? "true" : "false") << "\n";
    }
    std::cout << "manifest: " << spec.output_dir << "/manifest.json\n";
    return manifest.any_error ? 1 : 0;
}

int cmd_list()
{
    json catalog = json::array();
    for (const auto& s : siga::harness::list_scenarios()) {
        catalog.push_back({{"name", s.name},
                           {"description", s.description},
                           {"snr_definition", s.snr_definition},
                           {"defaults", s.defaults}});
    }
    std::cout << siga::io::dump_json(catalog) << "\n";
    return 0;
}

int cmd_certify(const std::string& model_path, double d)
{
    const auto model = siga::io::load_model(model_path);
    siga::require_valid(model);
    const auto cert = siga::certify(model, d);
    std::cout << siga::io::dump_json(siga::io::to_json(cert)) << "\n";
    return 0;
}

int cmd_oracle(const std::string& model_path)
{
    const auto model = siga::io::load_model(model_path);
    siga::require_valid(model);
    std::cout << siga::io::dump_json(siga::io::to_json(siga::exact_posterior(model))) << "\n";
    return 0;
}

int cmd_make_model(const std::string& scenario, const std::string& spec_path, std::uint64_t seed,
                   const std::string& out)
{
    siga::harness::ExperimentSpec spec;
    if (!spec_path.empty()) {
        spec = siga::harness::load_spec(spec_path);
    } else {
        spec.scenario = siga::harness::scenario_from_string(scenario);
    }
    siga::io::save_model(out, siga::harness::build_model(spec, seed));
    std::cout << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Damped first-order iteration for Gaussian linear models: experiments and certificates"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir;
    int workers = 0;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run an experiment spec");
    run->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides the spec)");
    run->add_option("--workers", workers, "Concurrent cells (overrides the spec)")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Run a single seed instead of the spec's list");

    auto* list = app.add_subcommand("list", "Print the scenario catalog");

    std::string model_path;
    double d = 1.0;
    auto* cert = app.add_subcommand("certify", "Convergence certificate of a model at damping d");
    cert->add_option("--model", model_path, "Model container or CSV directory")->required();
    cert->add_option("--d", d, "Damping factor in (0, 1]")->required()->check(CLI::Range(0.0, 1.0));

    auto* oracle = app.add_subcommand("oracle", "Exact posterior of a model");
    oracle->add_option("--model", model_path, "Model container or CSV directory")->required();

    std::string scenario = "general_random";
    std::string out_path;
    std::uint64_t model_seed = 1;
    auto* make = app.add_subcommand("make-model", "Build a scenario instance and save it");
    make->add_option("--scenario", scenario, "Scenario name (ignored with --spec)");
    make->add_option("--spec", spec_path, "Experiment spec providing the scenario parameters");
    make->add_option("--seed", model_seed, "Instance seed");
    make->add_option("--out", out_path, "Output container path, or a directory for CSV files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return cmd_run(spec_path, out_dir, workers, seed);
        }
        if (*list) {
            return cmd_list();
        }
        if (*cert) {
            return cmd_certify(model_path, d);
        }
        if (*oracle) {
            return cmd_oracle(model_path);
        }
        if (*make) {
            return cmd_make_model(scenario, spec_path, model_seed, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
