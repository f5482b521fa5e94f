#include "pwcv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pwcv/benchmarks.hpp"
#include "pwcv/highdim.hpp"
#include "pwcv/medium.hpp"
#include "pwcv/pfm.hpp"
#include "pwcv/primary.hpp"
#include "pwcv/scattering.hpp"
#include "pwcv/stats.hpp"
#include "pwcv/transmittance.hpp"

namespace pwcv {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_field(const std::string& key, const std::string& value) {
    throw std::runtime_error("config: invalid value '" + value + "' for field '" + key + "'");
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    try {
        const long long v = std::stoll(value);
        if (v < 0) bad_field(key, value);
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        bad_field(key, value);
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) bad_field(key, value);
        return v;
    } catch (const std::logic_error&) {
        bad_field(key, value);
    }
}

// "32x32", "32,32" or a single count; also used for checkpoint lists.
std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    std::string token;
    std::istringstream is(value);
    while (std::getline(is, token, value.find('x') != std::string::npos ? 'x' : ',')) {
        token = trim(token);
        if (!token.empty()) out.push_back(parse_size(key, token));
    }
    if (out.empty()) bad_field(key, value);
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void parallel_runs(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count == 0 ? 1 : count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Resolved primary-space integrand for the full/bucketed/highdim modes.
struct Problem {
    std::size_t dim = 0;
    PrimaryIntegrand g;
    double reference = 0.0;
    bool has_reference = false;
};

Problem resolve_problem(const ExperimentConfig& config) {
    if (config.integrand == "single-scattering" || config.integrand == "single-scattering-uniform") {
        SingleScatteringScene scene;
        SingleScattering ss = single_scattering_integrand(scene);
        MappingSet set;
        if (config.integrand == "single-scattering") {
            set.mappings.push_back(ss.mapping);
        } else {
            Mapping uniform;
            uniform.dim = 1;
            const double t_max = scene.t_max;
            uniform.warp = [t_max](const Point& u) { return Point{u[0] * t_max}; };
            uniform.pdf_at = [t_max](const Point&) { return 1.0 / t_max; };
            set.mappings.push_back(uniform);
        }
        auto f = [ss](const Point& x) { return ss.radiance_at(x[0]); };
        return Problem{1, make_primary_integrand(f, set), single_scattering_reference(scene), true};
    }
    Benchmark b = benchmark_by_name(config.integrand);
    return Problem{b.dim, PrimaryIntegrand(b.f), b.reference, true};
}

std::vector<std::string> columns() {
    return {"run",       "checkpoint_n", "n_cv_evals", "n_residual_evals",
            "estimate",  "reference",    "abs_error",  "rmse",
            "alpha",     "wall_time_ms", "integrand_evals"};
}

struct CheckpointRow {
    std::size_t n = 0;
    double estimate = 0.0;
    double alpha = 0.0;
    double wall_ms = 0.0;
};

// Fill the rmse column: RMSE across runs of the estimates sharing a checkpoint.
void finalize_rmse(CsvTable& table, const std::vector<std::vector<CheckpointRow>>& per_run,
                   double reference, bool has_reference) {
    if (per_run.empty()) return;
    const std::size_t n_checkpoints = per_run.front().size();
    for (std::size_t c = 0; c < n_checkpoints; ++c) {
        std::vector<double> values;
        values.reserve(per_run.size());
        for (const auto& run : per_run) values.push_back(run[c].estimate);
        const double ref = has_reference ? reference : mean_of(values);
        const double rmse = run_statistics(values, ref).rmse;
        for (std::size_t r = 0; r < per_run.size(); ++r)
            table.rows[r * n_checkpoints + c][7] = fmt(rmse);
    }
}

CsvTable run_full(const ExperimentConfig& config) {
    Problem problem = resolve_problem(config);
    const double fraction = config.effective_cv_fraction();

    PiecewiseCV cv;
    std::size_t n_cv = 0;
    problem.g.reset_count();
    if (fraction > 0.0) {
        const auto target = std::max(pow3(problem.dim),
                                     static_cast<std::size_t>(std::llround(fraction * static_cast<double>(config.total_evals))));
        cv = PiecewiseCV::build(problem.g, problem.dim, BuildBudget{target}, config.epsilon);
        n_cv = cv.eval_count();
    }
    const std::size_t n_res_total = config.total_evals > n_cv ? config.total_evals - n_cv : 0;
    std::vector<std::size_t> checkpoints = config.checkpoints;
    if (checkpoints.empty()) checkpoints = {n_res_total};
    std::sort(checkpoints.begin(), checkpoints.end());

    const AlphaMode alpha_mode = config.parsed_alpha_mode();
    std::vector<std::vector<CheckpointRow>> per_run(config.runs);

    parallel_runs(config.runs, config.threads, [&](std::size_t run) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng rng(mix_seed(config.seed, run));
        std::vector<double> f_terms, h_terms;
        f_terms.reserve(checkpoints.back());
        h_terms.reserve(checkpoints.back());
        std::vector<CheckpointRow> rows;
        for (std::size_t n : checkpoints) {
            while (f_terms.size() < n) {
                if (fraction > 0.0) {
                    const ResidualSample s = sample_residual(cv, problem.g, rng);
                    f_terms.push_back(s.g_val / s.p_h);
                    h_terms.push_back(s.h_val / s.p_h);
                } else {
                    Point u(problem.dim);
                    for (double& c : u) c = rng.uniform();
                    f_terms.push_back(problem.g(u));
                    h_terms.push_back(0.0);
                }
            }
            CheckpointRow row;
            row.n = n;
            if (fraction > 0.0) {
                row.alpha = alpha_mode.kind == AlphaMode::Kind::fixed
                                ? alpha_mode.fixed_value
                                : estimate_alpha(f_terms, h_terms);
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += f_terms[i] - row.alpha * h_terms[i];
                row.estimate = row.alpha * cv.total_integral() + (n > 0 ? acc / static_cast<double>(n) : 0.0);
                if (n == 0) row.estimate = cv.total_integral();  // degenerate budget: quadrature only
            } else {
                row.alpha = 0.0;
                row.estimate = n > 0 ? mean_of({f_terms.data(), n}) : 0.0;
            }
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            rows.push_back(row);
        }
        per_run[run] = std::move(rows);
    });

    CsvTable table;
    table.header = columns();
    for (std::size_t run = 0; run < config.runs; ++run) {
        for (const CheckpointRow& row : per_run[run]) {
            table.rows.push_back({std::to_string(run), std::to_string(row.n), std::to_string(n_cv),
                                  std::to_string(row.n), fmt(row.estimate),
                                  problem.has_reference ? fmt(problem.reference) : "",
                                  problem.has_reference ? fmt(std::abs(row.estimate - problem.reference)) : "",
                                  "", fmt(row.alpha), fmt(row.wall_ms),
                                  std::to_string(n_cv + row.n)});
        }
    }
    finalize_rmse(table, per_run, problem.reference, problem.has_reference);
    return table;
}

// Per-bucket reference means by midpoint quadrature (64 nodes per dimension);
// only attempted when every dimension is bucketed and the cost stays small.
std::vector<double> bucket_reference(const Problem& problem, const BucketGrid& grid) {
    if (grid.dims_bucketed() != problem.dim || problem.dim > 2) return {};
    const std::size_t per_dim = 64;
    std::size_t nodes = 1;
    for (std::size_t d = 0; d < problem.dim; ++d) nodes *= per_dim;
    std::vector<double> ref(grid.bucket_count(), 0.0);
    for (std::size_t b = 0; b < grid.bucket_count(); ++b) {
        const Box box = grid.bucket_box(b);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            Point u(problem.dim);
            std::size_t rest = i;
            for (std::size_t d = 0; d < problem.dim; ++d) {
                const std::size_t k = rest % per_dim;
                rest /= per_dim;
                u[d] = box.lo[d] + (static_cast<double>(k) + 0.5) / static_cast<double>(per_dim) * (box.hi[d] - box.lo[d]);
            }
            acc += problem.g(u);
        }
        ref[b] = acc / static_cast<double>(nodes);
    }
    return ref;
}

Image bucket_image(const BucketGrid& grid, const std::vector<double>& values) {
    Image img;
    if (grid.dims_bucketed() == 1) {
        img.width = grid.resolution[0];
        img.height = 1;
    } else {
        img.height = grid.resolution[0];
        img.width = grid.resolution[1];
    }
    img.channels = 1;
    img.data.resize(img.width * img.height);
    for (std::size_t i = 0; i < values.size(); ++i) img.data[i] = static_cast<float>(values[i]);
    return img;
}

CsvTable run_bucketed(const ExperimentConfig& config) {
    Problem problem = resolve_problem(config);
    BucketGrid grid;
    grid.resolution = config.bucket_res.empty() ? std::vector<std::size_t>{32, 32} : config.bucket_res;
    if (grid.dims_bucketed() > problem.dim)
        throw std::runtime_error("config: bucket_res has more dimensions than integrand '" + config.integrand + "'");
    const double fraction = config.effective_cv_fraction();
    const std::size_t residual_total = config.spp * grid.bucket_count();

    problem.g.reset_count();
    PiecewiseCV cv;
    AlphaMode alpha_mode = config.parsed_alpha_mode();
    if (fraction > 0.0) {
        const double target = fraction / (1.0 - fraction) * static_cast<double>(residual_total);
        const auto budget = std::max(pow3(problem.dim), static_cast<std::size_t>(std::llround(target)));
        cv = PiecewiseCV::build(problem.g, problem.dim, BuildBudget{budget}, config.epsilon);
    } else {
        cv = PiecewiseCV::constant(problem.dim, 0.0);
        alpha_mode = AlphaMode::fixed(0.0);
    }
    const std::size_t n_cv = cv.eval_count();
    const std::vector<double> reference = bucket_reference(problem, grid);

    CsvTable table;
    table.header = columns();
    std::vector<std::vector<CheckpointRow>> per_run(config.runs);
    for (std::size_t run = 0; run < config.runs; ++run) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<Estimate> buckets = estimate_buckets(cv, problem.g, grid, config.spp,
                                                               mix_seed(config.seed, run), alpha_mode,
                                                               config.threads);
        double total = 0.0;
        double alpha_mean = 0.0;
        for (const Estimate& e : buckets) {
            total += e.value * grid.bucket_volume();
            alpha_mean += e.alpha / static_cast<double>(buckets.size());
        }
        double bucket_rmse = std::numeric_limits<double>::quiet_NaN();
        if (!reference.empty()) {
            double acc = 0.0;
            for (std::size_t b = 0; b < buckets.size(); ++b) {
                const double d = buckets[b].value - reference[b];
                acc += d * d;
            }
            bucket_rmse = std::sqrt(acc / static_cast<double>(buckets.size()));
        }
        const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        per_run[run] = {CheckpointRow{residual_total, total, alpha_mean, wall}};
        table.rows.push_back({std::to_string(run), std::to_string(residual_total), std::to_string(n_cv),
                              std::to_string(residual_total), fmt(total),
                              problem.has_reference ? fmt(problem.reference) : "",
                              problem.has_reference ? fmt(std::abs(total - problem.reference)) : "",
                              reference.empty() ? "" : fmt(bucket_rmse), fmt(alpha_mean), fmt(wall),
                              std::to_string(n_cv + residual_total)});

        if (run == 0 && !config.out_image.empty() && grid.dims_bucketed() <= 2) {
            std::vector<double> means(buckets.size());
            for (std::size_t b = 0; b < buckets.size(); ++b) means[b] = buckets[b].value;
            write_pfm(bucket_image(grid, means), config.out_image);
            if (!reference.empty()) {
                std::vector<double> err(buckets.size());
                for (std::size_t b = 0; b < buckets.size(); ++b)
                    err[b] = std::abs(buckets[b].value - reference[b]);
                write_pfm(bucket_image(grid, err), config.out_image + ".err.pfm");
            }
        }
    }
    return table;
}

CsvTable run_highdim(const ExperimentConfig& config) {
    Problem problem = resolve_problem(config);
    if (config.cv_dims == 0 || config.cv_dims > problem.dim)
        throw std::runtime_error("config: cv_dims must be in [1, integrand dimension]");
    ProjectionConfig proj_cfg;
    proj_cfg.cv_dims = config.cv_dims;
    proj_cfg.full_dims = problem.dim;
    proj_cfg.n_star = config.n_star;
    proj_cfg.seed = config.seed;

    problem.g.reset_count();
    const double fraction = config.effective_cv_fraction();
    const auto budget = std::max(
        pow3(config.cv_dims),
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(config.total_evals) /
                                              static_cast<double>(config.n_star))));
    const Integrand projected = project_integrand(problem.g, proj_cfg);
    const PiecewiseCV cv = PiecewiseCV::build(projected, config.cv_dims, BuildBudget{budget}, config.epsilon);
    const std::size_t n_cv_g_evals = problem.g.eval_count();
    const std::size_t n_res = config.total_evals > n_cv_g_evals ? config.total_evals - n_cv_g_evals : 0;

    const AlphaMode alpha_mode = config.parsed_alpha_mode();
    std::vector<std::vector<CheckpointRow>> per_run(config.runs);
    parallel_runs(config.runs, config.threads, [&](std::size_t run) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng rng(mix_seed(config.seed, run));
        const Estimate e = estimate_highdim(cv, problem.g, proj_cfg, n_res, rng, alpha_mode);
        const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        per_run[run] = {CheckpointRow{n_res, e.value, e.alpha, wall}};
    });

    CsvTable table;
    table.header = columns();
    for (std::size_t run = 0; run < config.runs; ++run) {
        const CheckpointRow& row = per_run[run].front();
        table.rows.push_back({std::to_string(run), std::to_string(row.n), std::to_string(cv.eval_count()),
                              std::to_string(row.n), fmt(row.estimate),
                              problem.has_reference ? fmt(problem.reference) : "",
                              problem.has_reference ? fmt(std::abs(row.estimate - problem.reference)) : "",
                              "", fmt(row.alpha), fmt(row.wall_ms),
                              std::to_string(n_cv_g_evals + row.n)});
    }
    finalize_rmse(table, per_run, problem.reference, problem.has_reference);
    return table;
}

CsvTable run_transmittance(const ExperimentConfig& config) {
    const Medium medium = medium_by_name(config.integrand);
    const double reference = std::exp(-tau_oracle(medium));

    OpticalDepthCV control;
    if (config.method == "rrt-const") {
        control = constant_control_cv(medium);
    } else if (config.method == "rrt-adaptive") {
        control = optical_depth_cv(medium, 9, config.epsilon);
    } else if (config.method != "delta") {
        throw std::runtime_error("config: unknown transmittance method '" + config.method + "'");
    }

    std::vector<std::vector<CheckpointRow>> per_run(config.runs);
    std::vector<std::size_t> queries(config.runs, 0);
    parallel_runs(config.runs, config.threads, [&](std::size_t run) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng rng(mix_seed(config.seed, run));
        double acc = 0.0;
        std::size_t q = 0;
        for (std::size_t i = 0; i < config.total_evals; ++i) {
            const TrackingResult r = config.method == "delta"
                                         ? transmittance_delta_tracking(medium, rng)
                                         : transmittance_adaptive_rrt(medium, control, rng);
            acc += r.value;
            q += r.medium_queries;
        }
        const double value = config.total_evals > 0 ? acc / static_cast<double>(config.total_evals) : 0.0;
        const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        per_run[run] = {CheckpointRow{config.total_evals, value, 0.0, wall}};
        queries[run] = q;
    });

    CsvTable table;
    table.header = columns();
    for (std::size_t run = 0; run < config.runs; ++run) {
        const CheckpointRow& row = per_run[run].front();
        table.rows.push_back({std::to_string(run), std::to_string(row.n),
                              std::to_string(control.build_queries), std::to_string(row.n),
                              fmt(row.estimate), fmt(reference), fmt(std::abs(row.estimate - reference)),
                              "", "", fmt(row.wall_ms), std::to_string(queries[run])});
    }
    finalize_rmse(table, per_run, reference, true);
    return table;
}

}  // namespace

AlphaMode ExperimentConfig::parsed_alpha_mode() const {
    if (alpha_mode == "per_run") return AlphaMode::per_run();
    if (alpha_mode.rfind("fixed:", 0) == 0)
        return AlphaMode::fixed(parse_double("alpha_mode", alpha_mode.substr(6)));
    bad_field("alpha_mode", alpha_mode);
}

ExperimentConfig load_config(std::istream& is) {
    ExperimentConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(line_no) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "mode") config.mode = value;
        else if (key == "integrand") config.integrand = value;
        else if (key == "method") config.method = value;
        else if (key == "total_evals") config.total_evals = parse_size(key, value);
        else if (key == "cv_fraction") config.cv_fraction = parse_double(key, value);
        else if (key == "bucket_res") config.bucket_res = parse_size_list(key, value);
        else if (key == "spp") config.spp = parse_size(key, value);
        else if (key == "runs") config.runs = parse_size(key, value);
        else if (key == "seed") config.seed = parse_size(key, value);
        else if (key == "alpha_mode") config.alpha_mode = value;
        else if (key == "epsilon") config.epsilon = parse_double(key, value);
        else if (key == "n_star") config.n_star = parse_size(key, value);
        else if (key == "cv_dims") config.cv_dims = parse_size(key, value);
        else if (key == "checkpoints") config.checkpoints = parse_size_list(key, value);
        else if (key == "out_csv") config.out_csv = value;
        else if (key == "out_image") config.out_image = value;
        else if (key == "threads") config.threads = std::max<std::size_t>(1, parse_size(key, value));
        else throw std::runtime_error("config: unknown field '" + key + "'");
    }
    if (config.mode != "full" && config.mode != "bucketed" && config.mode != "highdim" &&
        config.mode != "transmittance")
        bad_field("mode", config.mode);
    config.parsed_alpha_mode();  // validate eagerly so errors carry the field name
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open '" + path + "'");
    return load_config(is);
}

void CsvTable::write(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

void CsvTable::write_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write(os);
    if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

CsvTable run_experiment(const ExperimentConfig& config) {
    if (config.mode == "bucketed") return run_bucketed(config);
    if (config.mode == "highdim") return run_highdim(config);
    if (config.mode == "transmittance") return run_transmittance(config);
    return run_full(config);
}

SweepResult sweep_allocation(const ExperimentConfig& config,
                             const std::vector<std::size_t>& cv_axis,
                             const std::vector<std::size_t>& residual_axis) {
    Problem problem = resolve_problem(config);
    const AlphaMode alpha_mode = config.parsed_alpha_mode();

    SweepResult result;
    result.cv_axis = cv_axis;
    result.residual_axis = residual_axis;
    std::vector<std::string> header{"n_residual"};
    for (std::size_t c : cv_axis) header.push_back("cv_" + std::to_string(c));
    result.error.header = header;
    result.cost.header = header;
    result.efficiency.header = header;

    // CVs are deterministic: build each budget once, reuse across cells.
    std::vector<PiecewiseCV> cvs(cv_axis.size());
    std::vector<std::size_t> cv_evals(cv_axis.size(), 0);
    for (std::size_t ci = 0; ci < cv_axis.size(); ++ci) {
        if (cv_axis[ci] == 0) continue;
        cvs[ci] = PiecewiseCV::build(problem.g, problem.dim,
                                     BuildBudget{std::max(pow3(problem.dim), cv_axis[ci])},
                                     config.epsilon);
        cv_evals[ci] = cvs[ci].eval_count();
    }

    double best_eff = -1.0;
    for (std::size_t n : residual_axis) {
        std::vector<std::string> err_row{std::to_string(n)};
        std::vector<std::string> cost_row{std::to_string(n)};
        std::vector<std::string> eff_row{std::to_string(n)};
        for (std::size_t ci = 0; ci < cv_axis.size(); ++ci) {
            const bool pure_mc = cv_axis[ci] == 0;
            if (pure_mc && n == 0) {
                err_row.push_back("nan");
                cost_row.push_back("0");
                eff_row.push_back("nan");
                continue;
            }
            std::vector<double> values(config.runs, 0.0);
            parallel_runs(config.runs, config.threads, [&](std::size_t run) {
                Rng rng(mix_seed(config.seed, run));
                if (n == 0) {
                    values[run] = cvs[ci].total_integral();
                } else if (pure_mc) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        Point u(problem.dim);
                        for (double& c : u) c = rng.uniform();
                        acc += problem.g(u);
                    }
                    values[run] = acc / static_cast<double>(n);
                } else {
                    values[run] = estimate_full(cvs[ci], problem.g, n, rng, alpha_mode).value;
                }
            });
            const double err = run_statistics(values, problem.reference).rmse;
            const double cost = static_cast<double>(cv_evals[ci] + n);
            const double eff = 1.0 / (std::max(err, 1e-16) * cost);
            err_row.push_back(fmt(err));
            cost_row.push_back(fmt(cost));
            eff_row.push_back(fmt(eff));
            if (!pure_mc && n > 0 && eff > best_eff) {
                best_eff = eff;
                result.best_cv_fraction = static_cast<double>(cv_evals[ci]) / cost;
            }
        }
        result.error.rows.push_back(err_row);
        result.cost.rows.push_back(cost_row);
        result.efficiency.rows.push_back(eff_row);
    }
    return result;
}

}  // namespace pwcv
