#include "mixkrig/ego.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mixkrig {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    a ^= b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2);
    return a;
}

double normalized_distance(const KernelPoint& a, const KernelPoint& b) {
    return (a.x - b.x).norm();
}

/// Golden-section minimization of a 1-D slice; returns the best coordinate
/// found, the incumbent included.
template <typename Fn>
std::pair<double, double> golden_section(Fn f, double lo, double hi, double x0, double f0,
                                         int iters) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    double xb = fc < fd ? c : d;
    double fb = std::min(fc, fd);
    if (f0 <= fb) return {x0, f0};
    return {xb, fb};
}

}  // namespace

double expected_improvement(const KrigingModel& model, const DesignPoint& x, double y_min) {
    const double mu = model.predict_value(x);
    const double s = std::sqrt(std::max(0.0, model.predict_variance(x)));
    if (s <= 1e-12 * std::max(1.0, model.y_std())) return std::max(y_min - mu, 0.0);
    const double z = (y_min - mu) / s;
    return std::max(0.0, (y_min - mu) * normal_cdf(z) + s * normal_pdf(z));
}

double infill_value(InfillCriterion criterion, const KrigingModel& model, const DesignPoint& x,
                    double y_min, double kappa) {
    switch (criterion) {
        case InfillCriterion::EI:
            return -expected_improvement(model, x, y_min);
        case InfillCriterion::SBO:
            return model.predict_value(x);
        case InfillCriterion::LCB:
            return model.predict_value(x) -
                   kappa * std::sqrt(std::max(0.0, model.predict_variance(x)));
    }
    throw std::logic_error("unreachable");
}

DesignPoint propose_next(const DesignSpace& space, const KrigingModel& model,
                         const EgoConfig& config, double y_min, std::uint64_t iteration_seed) {
    if (config.candidate_pool_size < 100)
        throw std::invalid_argument("propose_next: candidate_pool_size must be >= 100");

    SamplerConfig sampler;
    sampler.method = SampleMethod::Lhs;
    sampler.criterion = LhsCriterion::Jittered;
    sampler.n_points = config.candidate_pool_size;
    sampler.seed = iteration_seed;
    const ImputePolicy policy = impute_policy_for(config.kriging.kernel);
    const SampledDoe pool = sample_valid(space, sampler, false, policy);

    std::vector<KernelPoint> train_pts;
    train_pts.reserve(model.training_points().size());
    for (const DesignPoint& p : model.training_points())
        train_pts.push_back(make_kernel_point(space, space.impute(p, policy)));
    auto is_duplicate = [&](const DesignPoint& cand) {
        const KernelPoint kp = make_kernel_point(space, cand);
        for (const KernelPoint& t : train_pts)
            if (normalized_distance(kp, t) < 1e-9) return true;
        return false;
    };

    // Criterion over the pool; near-duplicates of the training set are
    // skipped (falling back to the plain best if everything is a duplicate).
    int best = -1, best_any = -1;
    double best_val = std::numeric_limits<double>::infinity();
    double best_any_val = std::numeric_limits<double>::infinity();
    std::vector<double> values(pool.points.size());
    for (size_t i = 0; i < pool.points.size(); ++i) {
        values[i] = infill_value(config.criterion, model, pool.points[i], y_min, config.lcb_kappa);
        if (values[i] < best_any_val) {
            best_any_val = values[i];
            best_any = static_cast<int>(i);
        }
        if (values[i] < best_val && !is_duplicate(pool.points[i])) {
            best_val = values[i];
            best = static_cast<int>(i);
        }
    }
    if (best < 0) best = best_any;

    // Coordinate-wise refinement of the acting continuous coordinates; the
    // discrete coordinates stay frozen so the acting mask cannot change.
    DesignPoint incumbent = pool.points[static_cast<size_t>(best)];
    double incumbent_val = values[static_cast<size_t>(best)];
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int dim = 0; dim < space.num_variables(); ++dim) {
            const Variable& var = space.variable(dim);
            if (var.kind() != VarKind::Float || !incumbent.is_acting(dim)) continue;
            auto slice = [&](double t) {
                DesignPoint probe = incumbent;
                probe.values[static_cast<size_t>(dim)] = t;
                return infill_value(config.criterion, model, probe, y_min, config.lcb_kappa);
            };
            const auto [t_best, v_best] =
                golden_section(slice, var.lower(), var.upper(),
                               incumbent.values[static_cast<size_t>(dim)], incumbent_val, 16);
            incumbent.values[static_cast<size_t>(dim)] = t_best;
            incumbent_val = v_best;
        }
    }

    if (is_duplicate(incumbent)) {
        // Next-best non-duplicate pool candidate.
        int fallback = -1;
        double fallback_val = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < pool.points.size(); ++i) {
            if (static_cast<int>(i) == best) continue;
            if (values[i] < fallback_val && !is_duplicate(pool.points[i])) {
                fallback_val = values[i];
                fallback = static_cast<int>(i);
            }
        }
        if (fallback >= 0) return pool.points[static_cast<size_t>(fallback)];
    }
    return incumbent;
}

OptimizationHistory optimize(const Problem& problem, const SampledDoe& initial_doe,
                             const EgoConfig& config) {
    if (initial_doe.points.empty()) throw std::invalid_argument("optimize: empty initial DoE");
    if (config.n_iter < 1) throw std::invalid_argument("optimize: n_iter must be >= 1");

    OptimizationHistory history;
    history.n_initial = static_cast<int>(initial_doe.points.size());
    double best = std::numeric_limits<double>::infinity();
    auto record = [&](const DesignPoint& p, double y) {
        best = std::min(best, y);
        history.entries.push_back(HistoryEntry{p, y, best});
    };

    std::vector<DesignPoint> xs = initial_doe.points;
    Eigen::VectorXd ys(static_cast<Eigen::Index>(xs.size()));
    for (size_t i = 0; i < xs.size(); ++i) {
        const double y = problem.evaluate(xs[i]);
        ys(static_cast<Eigen::Index>(i)) = y;
        record(xs[i], y);
    }

    KrigingConfig kconfig = config.kriging;
    kconfig.seed = mix(config.seed, 0xEC0ULL);
    KrigingModel model = train(problem.space, kconfig, xs, ys);

    for (int it = 0; it < config.n_iter; ++it) {
        const DesignPoint x =
            propose_next(problem.space, model, config, best, mix(config.seed, 1000ULL + it));
        double y;
        try {
            y = problem.evaluate(x);
        } catch (const std::exception& e) {
            std::string coords;
            for (double v : x.values) coords += (coords.empty() ? "" : ", ") + std::to_string(v);
            throw std::runtime_error("optimize: problem evaluation failed at (" + coords +
                                     "): " + e.what());
        }
        xs.push_back(x);
        ys.conservativeResize(ys.size() + 1);
        ys(ys.size() - 1) = y;
        record(x, y);

        const Eigen::VectorXd warm = model.hyperparameters();
        model = train(problem.space, kconfig, xs, ys, &warm);
    }

    int arg = 0;
    for (int i = 1; i < static_cast<int>(history.entries.size()); ++i)
        if (history.entries[static_cast<size_t>(i)].y < history.entries[static_cast<size_t>(arg)].y)
            arg = i;
    history.x_opt = history.entries[static_cast<size_t>(arg)].point;
    history.y_opt = history.entries[static_cast<size_t>(arg)].y;
    return history;
}

OptimizationHistory random_search(const Problem& problem, const SampledDoe& initial_doe, int n_add,
                                  std::uint64_t seed) {
    const DoeMatrix expanded = expand_lhs(initial_doe.unit, n_add, seed);

    OptimizationHistory history;
    history.n_initial = static_cast<int>(initial_doe.points.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(expanded.cols()));
    for (int i = 0; i < expanded.rows(); ++i) {
        for (int j = 0; j < expanded.cols(); ++j) u[static_cast<size_t>(j)] = expanded(i, j);
        const DesignPoint p = problem.space.correct(problem.space.from_unit_cube(u));
        const double y = problem.evaluate(p);
        best = std::min(best, y);
        history.entries.push_back(HistoryEntry{p, y, best});
    }

    int arg = 0;
    for (int i = 1; i < static_cast<int>(history.entries.size()); ++i)
        if (history.entries[static_cast<size_t>(i)].y < history.entries[static_cast<size_t>(arg)].y)
            arg = i;
    history.x_opt = history.entries[static_cast<size_t>(arg)].point;
    history.y_opt = history.entries[static_cast<size_t>(arg)].y;
    return history;
}

std::string to_string(InfillCriterion c) {
    switch (c) {
        case InfillCriterion::EI: return "EI";
        case InfillCriterion::SBO: return "SBO";
        case InfillCriterion::LCB: return "LCB";
    }
    throw std::logic_error("unreachable");
}

InfillCriterion infill_criterion_from_string(const std::string& s) {
    if (s == "EI") return InfillCriterion::EI;
    if (s == "SBO") return InfillCriterion::SBO;
    if (s == "LCB") return InfillCriterion::LCB;
    throw std::invalid_argument("unknown infill criterion '" + s + "'");
}

}  // namespace mixkrig
