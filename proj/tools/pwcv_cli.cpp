#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pwcv/benchmarks.hpp"
#include "pwcv/experiment.hpp"
#include "pwcv/medium.hpp"

namespace {

// Optional command-line overrides layered on top of the config file.
struct Overrides {
    std::int64_t seed = -1;
    std::int64_t runs = -1;
    std::int64_t threads = -1;
    std::string out_csv;
    std::string out_image;

    void apply(pwcv::ExperimentConfig& config) const {
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        if (runs >= 0) config.runs = static_cast<std::size_t>(runs);
        if (threads > 0) config.threads = static_cast<std::size_t>(threads);
        if (!out_csv.empty()) config.out_csv = out_csv;
        if (!out_image.empty()) config.out_image = out_image;
    }
};

void add_overrides(CLI::App* cmd, std::string& config_path, Overrides& overrides) {
    cmd->add_option("--config", config_path, "experiment config file (key = value lines)")
        ->required();
    cmd->add_option("--seed", overrides.seed, "override the base RNG seed");
    cmd->add_option("--runs", overrides.runs, "override the replication count");
    cmd->add_option("--threads", overrides.threads, "worker threads (results are thread-count independent)");
    cmd->add_option("--out-csv", overrides.out_csv, "override the CSV output path");
    cmd->add_option("--out-image", overrides.out_image, "override the PFM output path (bucketed mode)");
}

std::vector<std::size_t> parse_axis(const std::string& text) {
    std::vector<std::size_t> axis;
    std::string token;
    std::istringstream is(text);
    while (std::getline(is, token, ','))
        if (!token.empty()) axis.push_back(static_cast<std::size_t>(std::stoull(token)));
    if (axis.empty()) throw CLI::ValidationError("axis must be a comma-separated list of counts");
    return axis;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pwcv: unbiased integration with adaptive piecewise-polynomial control variates"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;

    CLI::App* run = app.add_subcommand("run", "run an experiment and emit a CSV of per-run rows");
    add_overrides(run, config_path, overrides);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "error/cost/efficiency maps over CV-vs-residual sample allocations");
    std::string cv_axis_text = "0,9,33,129,513";
    std::string res_axis_text = "0,16,64,256,1024";
    add_overrides(sweep, config_path, overrides);
    sweep->add_option("--cv-axis", cv_axis_text, "CV budgets, comma separated (0 = plain MC column)");
    sweep->add_option("--residual-axis", res_axis_text,
                      "residual sample counts, comma separated (0 = quadrature-only row)");

    CLI::App* bench = app.add_subcommand("bench-list", "list built-in integrands and media");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed()) {
            for (const auto& name : pwcv::benchmark_names()) std::cout << "benchmark " << name << "\n";
            for (const auto& name : pwcv::medium_names()) std::cout << "medium " << name << "\n";
            std::cout << "integrand single-scattering\n"
                      << "integrand single-scattering-uniform\n";
            return 0;
        }

        pwcv::ExperimentConfig config = pwcv::load_config_file(config_path);
        overrides.apply(config);

        if (run->parsed()) {
            const pwcv::CsvTable table = pwcv::run_experiment(config);
            if (config.out_csv.empty())
                table.write(std::cout);
            else
                table.write_file(config.out_csv);
            return 0;
        }

        const pwcv::SweepResult result =
            pwcv::sweep_allocation(config, parse_axis(cv_axis_text), parse_axis(res_axis_text));
        const std::string base = config.out_csv.empty() ? "sweep" : config.out_csv;
        result.error.write_file(base + ".error.csv");
        result.cost.write_file(base + ".cost.csv");
        result.efficiency.write_file(base + ".efficiency.csv");
        std::cout << "best_cv_fraction " << result.best_cv_fraction << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
