#pragma once

#include <iosfwd>
#include <string>

#include "pwcv/estimator.hpp"

namespace pwcv {

// Flat key-value experiment description; parsed from "key = value" lines
// ('#' starts a comment).  Unknown keys are rejected with the field name.
struct ExperimentConfig {
    std::string mode = "full";  // full | bucketed | highdim | transmittance
    std::string integrand = "gaussian-2d";   // benchmark or medium name
    std::string method = "rrt-adaptive";     // transmittance: delta | rrt-const | rrt-adaptive
    std::size_t total_evals = 1024;          // per run (transmittance: tracking samples)
    double cv_fraction = -1.0;               // <0: mode default (1/3 full, 1/16 bucketed)
    std::vector<std::size_t> bucket_res;     // bucketed mode, e.g. 32x32
    std::size_t spp = 16;                    // bucketed: residual samples per bucket
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    std::string alpha_mode = "per_run";      // per_run | fixed:<value>
    double epsilon = 1e-5;
    std::size_t n_star = 4;                  // highdim inner samples
    std::size_t cv_dims = 2;                 // highdim: L
    std::vector<std::size_t> checkpoints;    // residual counts for convergence rows
    std::string out_csv;
    std::string out_image;
    std::size_t threads = 1;

    double effective_cv_fraction() const {
        if (cv_fraction >= 0.0) return cv_fraction;
        return mode == "bucketed" ? 1.0 / 16.0 : 1.0 / 3.0;
    }
    AlphaMode parsed_alpha_mode() const;
};

ExperimentConfig load_config(std::istream& is);
ExperimentConfig load_config_file(const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const;
    void write_file(const std::string& path) const;
};

// Executes `runs` replications and emits one row per (run, checkpoint).
// Bucketed mode also writes the estimate image and, when a reference is
// computable, an error image next to it.
CsvTable run_experiment(const ExperimentConfig& config);

struct SweepResult {
    std::vector<std::size_t> cv_axis;        // CV evaluation budgets (0 = plain MC)
    std::vector<std::size_t> residual_axis;  // residual sample counts
    CsvTable error;       // seed-averaged RMSE per (residual, cv) cell
    CsvTable cost;        // mean integrand evaluations per cell
    CsvTable efficiency;  // 1 / (error * cost)
    double best_cv_fraction = 0.0;  // cv / (cv + residual) at max efficiency
};

// Error/cost/efficiency maps over CV-vs-residual allocations.  The first
// cv_axis entry of 0 yields the pure-MC column; residual 0 yields the pure
// nested-quadrature row (biased, reported as-is).
SweepResult sweep_allocation(const ExperimentConfig& config,
                             const std::vector<std::size_t>& cv_axis,
                             const std::vector<std::size_t>& residual_axis);

}  // namespace pwcv
