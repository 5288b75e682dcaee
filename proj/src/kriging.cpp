#include "mixkrig/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "mixkrig/parallel.hpp"
#include "mixkrig/sampling.hpp"

namespace mixkrig {

namespace {

constexpr double kMaxNugget = 1e-6;
constexpr double kSigma2Floor = 1e-30;

struct LikelihoodCore {
    Eigen::MatrixXd rmat;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;
    Eigen::VectorXd rinv_ones;
    double ones_rinv_ones = 0.0;
    double beta = 0.0;
    double sigma2 = 0.0;
    double nll = 0.0;
    double nugget_used = 0.0;
};

/// Assembles R(hp), factorizes with the nugget ladder and concentrates out
/// the trend and process variance. Returns nullopt when the factorization
/// fails at the maximum nugget.
std::optional<LikelihoodCore> eval_core(const KernelEvaluator& eval,
                                        const std::vector<KernelPoint>& points,
                                        const Eigen::VectorXd& y, const Eigen::VectorXd& hp,
                                        double nugget) {
    const int n = static_cast<int>(points.size());
    const Eigen::MatrixXd r = eval.matrix(points, hp);

    LikelihoodCore core;
    double nu = nugget;
    while (true) {
        core.rmat = r;
        core.rmat.diagonal().array() += nu;
        core.llt.compute(core.rmat);
        if (core.llt.info() == Eigen::Success) break;
        if (nugget <= 0.0 || nu >= kMaxNugget) return std::nullopt;
        nu = std::min(kMaxNugget, nu * 10.0);
    }
    core.nugget_used = nu;

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    core.rinv_ones = core.llt.solve(ones);
    core.ones_rinv_ones = ones.dot(core.rinv_ones);
    const Eigen::VectorXd rinv_y = core.llt.solve(y);
    core.beta = ones.dot(rinv_y) / core.ones_rinv_ones;
    const Eigen::VectorXd resid = y - core.beta * ones;
    core.alpha = rinv_y - core.beta * core.rinv_ones;
    core.sigma2 = std::max(0.0, resid.dot(core.alpha) / static_cast<double>(n));

    double logdet = 0.0;
    const auto& l = core.llt.matrixLLT();
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(l(i, i));
    core.nll = 0.5 * static_cast<double>(n) * std::log(std::max(core.sigma2, kSigma2Floor)) +
               0.5 * logdet;
    return core;
}

Eigen::VectorXd nll_gradient(const KernelEvaluator& eval, const std::vector<KernelPoint>& points,
                             const Eigen::VectorXd& hp, const LikelihoodCore& core) {
    const int n = static_cast<int>(points.size());
    const std::vector<Eigen::MatrixXd> grads = eval.matrix_grad(points, hp);
    const Eigen::MatrixXd rinv = core.llt.solve(Eigen::MatrixXd::Identity(n, n));
    const double sigma2 = std::max(core.sigma2, kSigma2Floor);
    Eigen::VectorXd g(hp.size());
    for (Eigen::Index k = 0; k < hp.size(); ++k) {
        const Eigen::MatrixXd& dr = grads[static_cast<size_t>(k)];
        const double trace_term = rinv.cwiseProduct(dr).sum();
        const double quad_term = core.alpha.dot(dr * core.alpha);
        g(k) = 0.5 * (trace_term - quad_term / sigma2);
    }
    return g;
}

/// Bound-constrained spectral projected gradient with Armijo backtracking.
/// Works in a transformed space (log for positive scale parameters).
struct SpgResult {
    Eigen::VectorXd z;
    double value = std::numeric_limits<double>::infinity();
    bool ok = false;
};

template <typename ValueFn, typename ValueGradFn>
SpgResult spg_minimize(Eigen::VectorXd z, const Eigen::VectorXd& zlo, const Eigen::VectorXd& zhi,
                       int budget, ValueFn value_only, ValueGradFn value_grad) {
    auto clamp = [&](Eigen::VectorXd v) {
        return v.cwiseMax(zlo).cwiseMin(zhi).eval();
    };
    SpgResult result;
    z = clamp(std::move(z));
    int evals = 0;

    auto fg = value_grad(z);
    ++evals;
    if (!fg.has_value()) return result;
    double f = fg->first;
    Eigen::VectorXd g = fg->second;
    result = {z, f, true};

    double step = 1.0 / std::max(1e-12, g.cwiseAbs().maxCoeff());
    step = std::min(step, 1.0);

    while (evals < budget) {
        // Projected gradient stationarity test.
        const Eigen::VectorXd pg = z - clamp(z - g);
        if (pg.cwiseAbs().maxCoeff() < 1e-9 * (1.0 + std::fabs(f))) break;

        double t = step;
        bool accepted = false;
        Eigen::VectorXd zn;
        double fn = 0.0;
        for (int bt = 0; bt < 25 && evals < budget; ++bt) {
            zn = clamp(z - t * g);
            const Eigen::VectorXd d = zn - z;
            if (d.cwiseAbs().maxCoeff() < 1e-14) break;
            const auto fv = value_only(zn);
            ++evals;
            if (fv.has_value() && *fv <= f + 1e-4 * g.dot(d)) {
                fn = *fv;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted || evals >= budget) break;

        const auto fgn = value_grad(zn);
        ++evals;
        if (!fgn.has_value()) break;
        const Eigen::VectorXd s = zn - z;
        const Eigen::VectorXd yv = fgn->second - g;
        const double sy = s.dot(yv);
        step = sy > 1e-16 ? std::clamp(s.dot(s) / sy, 1e-8, 1e3) : std::min(2.0 * t, 1e3);

        const double f_prev = f;
        z = zn;
        f = std::min(fn, fgn->first);
        g = fgn->second;
        if (f < result.value) result = {z, f, true};
        if (f_prev - f < 1e-12 * (1.0 + std::fabs(f_prev))) break;
    }
    return result;
}

Eigen::VectorXd to_search_space(const Eigen::VectorXd& hp, const HyperparameterLayout& layout) {
    Eigen::VectorXd z = hp;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (layout.log_scale[static_cast<size_t>(i)]) z(i) = std::log(z(i));
    return z;
}

Eigen::VectorXd from_search_space(const Eigen::VectorXd& z, const HyperparameterLayout& layout) {
    Eigen::VectorXd hp = z;
    for (Eigen::Index i = 0; i < hp.size(); ++i)
        if (layout.log_scale[static_cast<size_t>(i)]) hp(i) = std::exp(hp(i));
    return hp;
}

}  // namespace

ImputePolicy impute_policy_for(const KernelConfig& config) {
    return config.hierarchical == HierarchicalKernel::Imp ? ImputePolicy::MeanFloor
                                                          : ImputePolicy::Standard;
}

KrigingModel train(const DesignSpace& space, const KrigingConfig& config,
                   const std::vector<DesignPoint>& points, const Eigen::VectorXd& y,
                   const Eigen::VectorXd* warm_hp) {
    if (config.n_starts < 1) throw std::invalid_argument("train: n_starts must be >= 1");
    KrigingModel model = KrigingModel::assemble(space, config, points, y);
    const KernelEvaluator eval(model.space_, config.kernel);
    const HyperparameterLayout& layout = eval.layout();
    const Eigen::VectorXd zlo = to_search_space(layout.lower, layout);
    const Eigen::VectorXd zhi = to_search_space(layout.upper, layout);

    // Start points: optional warm start, a canonical high-correlation start,
    // then an LHS fill. The canonical start sits at the log-space box center
    // for scale parameters; hypersphere angles start small so every kernel
    // family begins from comparably strong cross-level correlation.
    std::vector<Eigen::VectorXd> starts;
    if (warm_hp != nullptr) {
        if (warm_hp->size() != layout.total)
            throw std::invalid_argument("train: warm-start hyperparameter count mismatch");
        starts.push_back(to_search_space(*warm_hp, layout));
    }
    if (static_cast<int>(starts.size()) < config.n_starts) {
        Eigen::VectorXd center = 0.5 * (zlo + zhi);
        for (int i = 0; i < layout.total; ++i)
            if (!layout.log_scale[static_cast<size_t>(i)])
                center(i) = std::min(0.1, 0.5 * (layout.lower(i) + layout.upper(i)));
        starts.push_back(std::move(center));
    }
    if (static_cast<int>(starts.size()) < config.n_starts) {
        const int extra = config.n_starts - static_cast<int>(starts.size());
        SamplerConfig sampler;
        sampler.method = SampleMethod::Lhs;
        sampler.criterion = LhsCriterion::Jittered;
        sampler.n_points = extra;
        sampler.seed = config.seed ^ 0xB0075ULL;
        const DoeMatrix u = sample(sampler, layout.total);
        for (int s = 0; s < extra; ++s) {
            Eigen::VectorXd z(layout.total);
            for (int k = 0; k < layout.total; ++k) z(k) = zlo(k) + u(s, k) * (zhi(k) - zlo(k));
            starts.push_back(std::move(z));
        }
    }

    auto value_only = [&](const Eigen::VectorXd& z) -> std::optional<double> {
        const auto core =
            eval_core(eval, model.kpoints_, model.y_norm_, from_search_space(z, layout), config.nugget);
        if (!core.has_value()) return std::nullopt;
        return core->nll;
    };
    auto value_grad =
        [&](const Eigen::VectorXd& z) -> std::optional<std::pair<double, Eigen::VectorXd>> {
        const Eigen::VectorXd hp = from_search_space(z, layout);
        const auto core = eval_core(eval, model.kpoints_, model.y_norm_, hp, config.nugget);
        if (!core.has_value()) return std::nullopt;
        Eigen::VectorXd g = nll_gradient(eval, model.kpoints_, hp, *core);
        // Chain rule into the search space (z = log(hp) for scale entries).
        for (Eigen::Index i = 0; i < g.size(); ++i)
            if (layout.log_scale[static_cast<size_t>(i)]) g(i) *= hp(i);
        return std::make_pair(core->nll, std::move(g));
    };

    std::vector<SpgResult> results(starts.size());
    parallel_for(static_cast<int>(starts.size()), config.jobs, [&](int s) {
        results[static_cast<size_t>(s)] =
            spg_minimize(starts[static_cast<size_t>(s)], zlo, zhi, config.budget, value_only,
                         value_grad);
    });

    int best = -1;
    for (size_t s = 0; s < results.size(); ++s)
        if (results[s].ok && (best < 0 || results[s].value < results[static_cast<size_t>(best)].value))
            best = static_cast<int>(s);
    if (best < 0) throw std::runtime_error("train: all optimization starts failed");

    model.finalize(eval, from_search_space(results[static_cast<size_t>(best)].z, layout));
    return model;
}

KrigingModel train(const DesignSpace& space, const KrigingConfig& config,
                   const std::vector<std::vector<double>>& raw_rows, const Eigen::VectorXd& y) {
    std::vector<DesignPoint> points;
    points.reserve(raw_rows.size());
    const ImputePolicy policy = impute_policy_for(config.kernel);
    for (const auto& row : raw_rows) points.push_back(space.correct(row, policy));
    return train(space, config, points, y);
}

KrigingModel rebuild(const DesignSpace& space, const KrigingConfig& config,
                     const std::vector<DesignPoint>& points, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& hp) {
    KrigingModel model = KrigingModel::assemble(space, config, points, y);
    const KernelEvaluator eval(model.space_, config.kernel);
    if (hp.size() != eval.layout().total)
        throw std::invalid_argument("rebuild: hyperparameter count mismatch");
    model.finalize(eval, hp);
    return model;
}

KrigingModel KrigingModel::assemble(const DesignSpace& space, const KrigingConfig& config,
                                    const std::vector<DesignPoint>& points,
                                    const Eigen::VectorXd& y) {
    if (points.empty()) throw std::invalid_argument("train: empty training set");
    if (static_cast<Eigen::Index>(points.size()) != y.size())
        throw std::invalid_argument("train: point/value count mismatch");

    KrigingModel model;
    model.space_ = space;
    model.config_ = config;
    model.points_ = points;

    const ImputePolicy policy = impute_policy_for(config.kernel);
    model.kpoints_.reserve(points.size());
    for (const DesignPoint& p : points)
        model.kpoints_.push_back(make_kernel_point(model.space_, model.space_.impute(p, policy)));

    model.y_raw_ = y;
    model.y_mean_ = y.mean();
    const double var = (y.array() - model.y_mean_).square().mean();
    model.y_std_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    model.y_norm_ = (y.array() - model.y_mean_) / model.y_std_;
    return model;
}

void KrigingModel::finalize(const KernelEvaluator& eval, Eigen::VectorXd hp) {
    auto core = eval_core(eval, kpoints_, y_norm_, hp, config_.nugget);
    if (!core.has_value())
        throw std::runtime_error("train: correlation matrix is not positive definite "
                                 "(Cholesky failed after nugget escalation)");
    hp_ = std::move(hp);
    rmat_ = std::move(core->rmat);
    llt_ = std::move(core->llt);
    alpha_ = std::move(core->alpha);
    rinv_ones_ = std::move(core->rinv_ones);
    ones_rinv_ones_ = core->ones_rinv_ones;
    beta_ = core->beta;
    sigma2_ = core->sigma2;
    nll_ = core->nll;
    nugget_used_ = core->nugget_used;
}

KernelPoint KrigingModel::prepared(const DesignPoint& q) const {
    return make_kernel_point(space_, space_.impute(q, impute_policy_for(config_.kernel)));
}

DesignPoint KrigingModel::prepare_query(const std::vector<double>& raw) const {
    return space_.correct(raw, impute_policy_for(config_.kernel));
}

Eigen::VectorXd KrigingModel::predict_values(const std::vector<DesignPoint>& queries) const {
    const KernelEvaluator eval(space_, config_.kernel);
    Eigen::VectorXd out(static_cast<Eigen::Index>(queries.size()));
    for (size_t i = 0; i < queries.size(); ++i) {
        const Eigen::VectorXd r = eval.cross(kpoints_, prepared(queries[i]), hp_);
        out(static_cast<Eigen::Index>(i)) = y_mean_ + y_std_ * (beta_ + r.dot(alpha_));
    }
    return out;
}

double KrigingModel::predict_value(const DesignPoint& q) const {
    return predict_values({q})(0);
}

Eigen::VectorXd KrigingModel::predict_variances(const std::vector<DesignPoint>& queries) const {
    const KernelEvaluator eval(space_, config_.kernel);
    Eigen::VectorXd out(static_cast<Eigen::Index>(queries.size()));
    for (size_t i = 0; i < queries.size(); ++i) {
        const Eigen::VectorXd r = eval.cross(kpoints_, prepared(queries[i]), hp_);
        const Eigen::VectorXd u = llt_.solve(r);
        const double interp = 1.0 - r.dot(u);
        const double trend = 1.0 - rinv_ones_.dot(r);
        const double s2 = sigma2_ * (interp + trend * trend / ones_rinv_ones_);
        out(static_cast<Eigen::Index>(i)) = y_std_ * y_std_ * std::max(0.0, s2);
    }
    return out;
}

double KrigingModel::predict_variance(const DesignPoint& q) const {
    return predict_variances({q})(0);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> KrigingModel::predict_derivatives(
    const std::vector<DesignPoint>& queries, int dim) const {
    const Variable& var = space_.variable(dim);
    if (var.kind() != VarKind::Float)
        throw std::invalid_argument("predict_derivatives: '" + var.name() + "' is not continuous");
    const KernelEvaluator eval(space_, config_.kernel);
    const double scale = 1.0 / (var.upper() - var.lower());

    Eigen::VectorXd dmean(static_cast<Eigen::Index>(queries.size()));
    Eigen::VectorXd dvar(static_cast<Eigen::Index>(queries.size()));
    for (size_t i = 0; i < queries.size(); ++i) {
        const KernelPoint q = prepared(queries[i]);
        const Eigen::VectorXd r = eval.cross(kpoints_, q, hp_);
        const Eigen::VectorXd dr = eval.cross_ddim(kpoints_, q, hp_, dim);
        dmean(static_cast<Eigen::Index>(i)) = y_std_ * dr.dot(alpha_) * scale;
        const Eigen::VectorXd u = llt_.solve(r);
        const double trend = 1.0 - rinv_ones_.dot(r);
        const double ds2 =
            sigma2_ * (-2.0 * dr.dot(u) - 2.0 * trend * rinv_ones_.dot(dr) / ones_rinv_ones_);
        dvar(static_cast<Eigen::Index>(i)) = y_std_ * y_std_ * ds2 * scale;
    }
    return {std::move(dmean), std::move(dvar)};
}

double KrigingModel::nll(const Eigen::VectorXd& hp) const {
    const KernelEvaluator eval(space_, config_.kernel);
    const auto core = eval_core(eval, kpoints_, y_norm_, hp, config_.nugget);
    if (!core.has_value())
        throw std::runtime_error("nll: Cholesky failed after nugget escalation");
    return core->nll;
}

std::pair<double, Eigen::VectorXd> KrigingModel::nll_with_grad(const Eigen::VectorXd& hp) const {
    const KernelEvaluator eval(space_, config_.kernel);
    const auto core = eval_core(eval, kpoints_, y_norm_, hp, config_.nugget);
    if (!core.has_value())
        throw std::runtime_error("nll_with_grad: Cholesky failed after nugget escalation");
    return {core->nll, nll_gradient(eval, kpoints_, hp, *core)};
}

}  // namespace mixkrig
