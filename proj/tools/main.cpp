#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mixkrig/ego.hpp"
#include "mixkrig/io.hpp"
#include "mixkrig/kriging.hpp"
#include "mixkrig/parallel.hpp"
#include "mixkrig/problems.hpp"
#include "mixkrig/sampling.hpp"

namespace {

using namespace mixkrig;
namespace fs = std::filesystem;
using nlohmann::json;

// Exit codes: 0 success, 1 I/O failure, 2 usage/schema, 3 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::vector<std::string> g_argv;

void write_sidecar_manifest(const std::string& command, std::uint64_t seed,
                            const std::vector<std::string>& outputs, double wall) {
    const fs::path path = outputs.front() + ".manifest.json";
    io::write_json(io::make_manifest(command, g_argv, seed, outputs, wall), path);
}

LhsCriterion criterion_from_name(const std::string& name) {
    if (name == "random") return LhsCriterion::Jittered;
    if (name == "center") return LhsCriterion::Center;
    if (name == "maximin") return LhsCriterion::Maximin;
    if (name == "centermaximin") return LhsCriterion::CenterMaximin;
    if (name == "correlation") return LhsCriterion::Correlation;
    if (name == "ese") return LhsCriterion::Ese;
    throw CLI::ValidationError("--criterion", "unknown LHS criterion '" + name + "'");
}

struct KernelFlags {
    std::string corr = "squar_exp";
    std::string cat = "CONT_RELAX";
    std::string hier = "ALG_KERNEL";

    KernelConfig to_config() const {
        KernelConfig config;
        config.continuous = continuous_kernel_from_string(corr);
        config.categorical = categorical_kernel_from_string(cat);
        config.hierarchical = hierarchical_kernel_from_string(hier);
        return config;
    }
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& flags) {
    cmd->add_option("--corr", flags.corr, "continuous kernel")
        ->check(CLI::IsMember({"abs_exp", "squar_exp", "matern32", "matern52"}));
    cmd->add_option("--cat-kernel", flags.cat, "categorical kernel")
        ->check(CLI::IsMember({"GOWER", "CONT_RELAX", "EXP_HOMO_HSPHERE", "HOMO_HSPHERE"}));
    cmd->add_option("--hier-kernel", flags.hier, "hierarchical kernel")
        ->check(CLI::IsMember({"ALG_KERNEL", "ARC_KERNEL", "IMP_KERNEL"}));
}

json fit_report(const KrigingModel& model) {
    const Eigen::VectorXd mu = model.predict_values(model.training_points());
    const Eigen::VectorXd var = model.predict_variances(model.training_points());
    const double n = static_cast<double>(model.num_points());
    return json{
        {"neg_log_likelihood", model.neg_log_likelihood()},
        {"hyperparameter_count", model.hyperparameters().size()},
        {"n_points", model.num_points()},
        {"train_rmse", std::sqrt((mu - model.training_values()).squaredNorm() / n)},
        {"train_variance_rmse", std::sqrt(var.squaredNorm() / n)},
        {"nugget_used", model.nugget_used()},
        {"process_variance", model.process_variance()},
    };
}

DesignSpace resolve_space(const std::string& space_file, const std::string& problem_name) {
    if (!space_file.empty()) return io::load_space(space_file);
    if (!problem_name.empty()) return problem_by_name(problem_name).space;
    throw io::SchemaError("need either --space or --problem");
}

int cmd_sample(const std::string& space_file, const std::string& problem_name,
               const std::string& method, const std::string& criterion, int n, std::uint64_t seed,
               const std::string& out, bool stratify) {
    Clock clock;
    const DesignSpace space = resolve_space(space_file, problem_name);
    SamplerConfig config;
    config.n_points = n;
    config.seed = seed;
    if (method == "random")
        config.method = SampleMethod::Random;
    else if (method == "full_factorial")
        config.method = SampleMethod::FullFactorial;
    else
        config.method = SampleMethod::Lhs;
    config.criterion = criterion_from_name(criterion);
    const SampledDoe doe = sample_valid(space, config, stratify);
    io::write_doe_csv(space, doe.points, out);
    write_sidecar_manifest("sample", seed, {out}, clock.seconds());
    return kExitOk;
}

int cmd_fit(const std::string& space_file, const std::string& doe_file, const std::string& y_file,
            const KernelFlags& kernels, double nugget, int n_starts, int budget,
            std::uint64_t seed, int jobs, const std::string& out) {
    Clock clock;
    const DesignSpace space = io::load_space(space_file);
    KrigingConfig config;
    config.kernel = kernels.to_config();
    config.nugget = nugget;
    config.n_starts = n_starts;
    config.budget = budget;
    config.seed = seed;
    config.jobs = jobs;

    std::vector<DesignPoint> points = io::read_doe_csv(space, doe_file);
    // Re-impute under the model's policy (the imputation kernel reads them).
    for (auto& p : points) p = space.impute(p, impute_policy_for(config.kernel));
    const Eigen::VectorXd y = io::read_values_csv(y_file);
    if (static_cast<Eigen::Index>(points.size()) != y.size())
        throw io::SchemaError("DoE has " + std::to_string(points.size()) + " rows but y has " +
                              std::to_string(y.size()));

    const KrigingModel model = train(space, config, points, y);
    io::save_model(model, out);
    std::cout << fit_report(model).dump(2) << "\n";
    write_sidecar_manifest("fit", seed, {out}, clock.seconds());
    return kExitOk;
}

int cmd_predict(const std::string& model_file, const std::string& x_file, const std::string& out,
                bool variances, bool derivatives) {
    Clock clock;
    const KrigingModel model = io::load_model(model_file);
    const std::vector<DesignPoint> queries = io::read_doe_csv(model.space(), x_file);

    std::vector<std::string> header{"mean"};
    std::vector<Eigen::VectorXd> columns{model.predict_values(queries)};
    if (variances) {
        header.emplace_back("variance");
        columns.push_back(model.predict_variances(queries));
    }
    if (derivatives) {
        if (model.config().kernel.continuous == ContinuousKernel::AbsExp)
            throw io::SchemaError("derivatives are unavailable for abs_exp");
        for (int dim = 0; dim < model.space().num_variables(); ++dim) {
            if (model.space().variable(dim).kind() != VarKind::Float) continue;
            auto [dmean, dvar] = model.predict_derivatives(queries, dim);
            header.push_back("dmean/" + model.space().variable(dim).name());
            columns.push_back(std::move(dmean));
            header.push_back("dvar/" + model.space().variable(dim).name());
            columns.push_back(std::move(dvar));
        }
    }
    io::write_values_csv(header, columns, out);
    write_sidecar_manifest("predict", model.config().seed, {out}, clock.seconds());
    return kExitOk;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    a ^= b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2);
    return a;
}

int cmd_optimize(const std::string& problem_name, const std::string& criterion, int doe_size,
                 int n_iter, int runs, std::uint64_t seed, const std::string& out_dir,
                 double kappa, const KernelFlags& kernels, int pool_size, int n_starts,
                 int budget, int jobs, bool use_random_search) {
    Clock clock;
    const Problem problem = problem_by_name(problem_name);
    EgoConfig config;
    config.criterion = infill_criterion_from_string(criterion);
    config.n_iter = n_iter;
    config.lcb_kappa = kappa;
    config.candidate_pool_size = pool_size;
    config.kriging.kernel = kernels.to_config();
    config.kriging.n_starts = n_starts;
    config.kriging.budget = budget;
    config.kriging.jobs = 1;  // parallelism goes across runs

    fs::create_directories(out_dir);
    std::vector<OptimizationHistory> histories(static_cast<size_t>(runs));
    parallel_for(runs, jobs, [&](int run) {
        SamplerConfig sampler;
        sampler.n_points = doe_size;
        sampler.seed = mix(seed, 0xD0EULL + static_cast<std::uint64_t>(run));
        const SampledDoe doe = sample_valid(problem.space, sampler, false,
                                            impute_policy_for(config.kriging.kernel));
        if (use_random_search) {
            histories[static_cast<size_t>(run)] =
                random_search(problem, doe, n_iter, mix(seed, 0x5EA4C4ULL + run));
        } else {
            EgoConfig run_config = config;
            run_config.seed = mix(seed, 0xE60ULL + static_cast<std::uint64_t>(run));
            histories[static_cast<size_t>(run)] = optimize(problem, doe, run_config);
        }
    });

    std::vector<std::string> outputs;
    for (int run = 0; run < runs; ++run) {
        char name[32];
        std::snprintf(name, sizeof(name), "run_%03d.csv", run);
        const fs::path path = fs::path(out_dir) / name;
        io::write_history_csv(problem.space, histories[static_cast<size_t>(run)], path);
        outputs.push_back(path.string());
    }
    const fs::path conv = fs::path(out_dir) / "convergence.csv";
    io::write_convergence_csv(histories, conv);
    outputs.push_back(conv.string());

    // Box-plot data: best value per run.
    std::vector<double> best_per_run;
    int best_run = 0;
    for (int run = 0; run < runs; ++run) {
        best_per_run.push_back(histories[static_cast<size_t>(run)].y_opt);
        if (histories[static_cast<size_t>(run)].y_opt < histories[static_cast<size_t>(best_run)].y_opt)
            best_run = run;
    }
    {
        const fs::path box = fs::path(out_dir) / "best_per_run.csv";
        Eigen::VectorXd col =
            Eigen::Map<Eigen::VectorXd>(best_per_run.data(), static_cast<Eigen::Index>(runs));
        io::write_values_csv({"y_best"}, {col}, box);
        outputs.push_back(box.string());
    }

    json summary = io::history_summary_json(problem.space, histories[static_cast<size_t>(best_run)]);
    summary["problem"] = problem.name;
    summary["criterion"] = use_random_search ? "random-search" : criterion;
    summary["runs"] = runs;
    summary["median_best"] = io::quantile(best_per_run, 0.5);
    summary["per_run_y_opt"] = best_per_run;
    if (problem.known_optimum.has_value()) summary["known_optimum"] = *problem.known_optimum;
    const fs::path summary_path = fs::path(out_dir) / "summary.json";
    io::write_json(summary, summary_path);
    outputs.push_back(summary_path.string());
    std::cout << summary.dump(2) << "\n";

    io::write_json(io::make_manifest("optimize", g_argv, seed, outputs, clock.seconds()),
                   fs::path(out_dir) / "manifest.json");
    return kExitOk;
}

int cmd_propose(const std::string& space_file, const std::string& doe_file,
                const std::string& y_file, const std::string& criterion, double kappa,
                const KernelFlags& kernels, int pool_size, int n_starts, int budget,
                std::uint64_t seed, const std::string& out) {
    Clock clock;
    const DesignSpace space = io::load_space(space_file);
    EgoConfig config;
    config.criterion = infill_criterion_from_string(criterion);
    config.lcb_kappa = kappa;
    config.candidate_pool_size = pool_size;
    config.kriging.kernel = kernels.to_config();
    config.kriging.n_starts = n_starts;
    config.kriging.budget = budget;
    config.kriging.seed = seed;

    std::vector<DesignPoint> points = io::read_doe_csv(space, doe_file);
    for (auto& p : points) p = space.impute(p, impute_policy_for(config.kriging.kernel));
    const Eigen::VectorXd y = io::read_values_csv(y_file);
    if (static_cast<Eigen::Index>(points.size()) != y.size())
        throw io::SchemaError("DoE/y row mismatch");
    const KrigingModel model = train(space, config.kriging, points, y);
    const DesignPoint next = propose_next(space, model, config, y.minCoeff(), mix(seed, 0xA5CULL));
    io::write_doe_csv(space, {next}, out);
    write_sidecar_manifest("propose", seed, {out}, clock.seconds());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) g_argv.emplace_back(argv[i]);

    CLI::App app{"Kriging surrogates and Bayesian optimization over mixed and "
                 "hierarchical design spaces"};
    app.require_subcommand(1);

    // export-space
    auto* export_cmd = app.add_subcommand("export-space", "write a built-in problem's design space");
    std::string export_problem, export_out;
    export_cmd->add_option("--problem", export_problem, "toy|goldstein-hier|branin-mixed|mlp")
        ->required();
    export_cmd->add_option("--out", export_out, "design-space JSON output")->required();

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw a DoE of valid design points");
    std::string space_file, out_file, method = "lhs", criterion = "ese", sample_problem;
    int n_points = 10;
    std::uint64_t seed = 0;
    bool stratify = false;
    sample_cmd->add_option("--space", space_file, "design-space JSON");
    sample_cmd->add_option("--problem", sample_problem, "built-in problem name");
    sample_cmd->add_option("--method", method)->check(CLI::IsMember({"lhs", "random", "full_factorial"}));
    sample_cmd->add_option("--criterion", criterion,
                           "LHS criterion: random|center|maximin|centermaximin|correlation|ese");
    sample_cmd->add_option("--n", n_points, "number of points")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", seed);
    sample_cmd->add_flag("--stratify-meta", stratify, "split points across the meta levels");
    sample_cmd->add_option("--out", out_file, "output CSV")->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "train a Kriging surrogate");
    std::string doe_file, y_file, model_out;
    KernelFlags fit_kernels;
    double nugget = 1e-10;
    int n_starts = 10, budget = 200, jobs = 0;
    fit_cmd->add_option("--space", space_file, "design-space JSON")->required();
    fit_cmd->add_option("--doe", doe_file, "training DoE CSV")->required();
    fit_cmd->add_option("--y", y_file, "training outputs CSV")->required();
    add_kernel_flags(fit_cmd, fit_kernels);
    fit_cmd->add_option("--nugget", nugget);
    fit_cmd->add_option("--n-starts", n_starts)->check(CLI::PositiveNumber);
    fit_cmd->add_option("--budget", budget)->check(CLI::PositiveNumber);
    fit_cmd->add_option("--seed", seed);
    fit_cmd->add_option("--jobs", jobs);
    fit_cmd->add_option("--out", model_out, "model JSON output")->required();

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "evaluate a trained model");
    std::string model_file, x_file;
    bool variances = false, derivatives = false;
    predict_cmd->add_option("--model", model_file, "model JSON")->required();
    predict_cmd->add_option("--x", x_file, "query CSV")->required();
    predict_cmd->add_flag("--variances", variances);
    predict_cmd->add_flag("--derivatives", derivatives);
    predict_cmd->add_option("--out", out_file, "prediction CSV")->required();

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "run EGO (or random search) on a problem");
    std::string problem_name, infill = "EI", out_dir, propose_out;
    int doe_size = 10, n_iter = 20, runs = 1, pool_size = 1000;
    double kappa = 1.96;
    bool random_flag = false;
    KernelFlags opt_kernels;
    opt_cmd->add_option("--problem", problem_name, "toy|goldstein-hier|branin-mixed|mlp");
    opt_cmd->add_option("--criterion", infill)->check(CLI::IsMember({"EI", "SBO", "LCB"}));
    opt_cmd->add_option("--doe-size", doe_size)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--n-iter", n_iter)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--runs", runs)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--seed", seed);
    opt_cmd->add_option("--kappa", kappa);
    add_kernel_flags(opt_cmd, opt_kernels);
    opt_cmd->add_option("--pool-size", pool_size);
    opt_cmd->add_option("--n-starts", n_starts)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--budget", budget)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--jobs", jobs);
    opt_cmd->add_flag("--random-search", random_flag, "expand the DoE instead of running EGO");
    opt_cmd->add_option("--out", out_dir, "output directory");
    // ask/tell round trip: fit the given data once and propose the next point
    opt_cmd->add_option("--space", space_file, "design-space JSON (ask/tell mode)");
    opt_cmd->add_option("--doe", doe_file, "evaluated DoE CSV (ask/tell mode)");
    opt_cmd->add_option("--y", y_file, "objective values CSV (ask/tell mode)");
    opt_cmd->add_option("--propose-out", propose_out, "next-point CSV (ask/tell mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (export_cmd->parsed()) {
            io::save_space(problem_by_name(export_problem).space, export_out);
            return kExitOk;
        }
        if (sample_cmd->parsed())
            return cmd_sample(space_file, sample_problem, method, criterion, n_points, seed,
                              out_file, stratify);
        if (fit_cmd->parsed())
            return cmd_fit(space_file, doe_file, y_file, fit_kernels, nugget, n_starts, budget,
                           seed, jobs, model_out);
        if (predict_cmd->parsed())
            return cmd_predict(model_file, x_file, out_file, variances, derivatives);
        if (opt_cmd->parsed()) {
            const bool ask_tell = !propose_out.empty();
            if (ask_tell) {
                if (space_file.empty() || doe_file.empty() || y_file.empty()) {
                    std::cerr << "error: ask/tell mode needs --space, --doe, --y and --propose-out\n";
                    return kExitUsage;
                }
                return cmd_propose(space_file, doe_file, y_file, infill, kappa, opt_kernels,
                                   pool_size, n_starts, budget, seed, propose_out);
            }
            if (problem_name.empty() || out_dir.empty()) {
                std::cerr << "error: optimize needs --problem and --out (or the ask/tell flags)\n";
                return kExitUsage;
            }
            return cmd_optimize(problem_name, infill, doe_size, n_iter, runs, seed, out_dir, kappa,
                                opt_kernels, pool_size, n_starts, budget, jobs, random_flag);
        }
    } catch (const io::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
