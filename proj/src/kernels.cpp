#include "mixkrig/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mixkrig {

namespace {

constexpr double kThetaLower = 1e-6;
constexpr double kThetaUpper = 20.0;
constexpr double kAngleMargin = 1e-8;

/// Theta-weighted distance for a plain quantitative dimension.
double weighted_distance(ContinuousKernel kind, double theta, double delta) {
    switch (kind) {
        case ContinuousKernel::SquarExp: return theta * delta * delta;
        case ContinuousKernel::AbsExp:
        case ContinuousKernel::Matern32:
        case ContinuousKernel::Matern52: return theta * std::fabs(delta);
    }
    throw std::logic_error("unreachable");
}

/// d(weighted distance)/d(theta).
double weighted_distance_dtheta(ContinuousKernel kind, double delta) {
    switch (kind) {
        case ContinuousKernel::SquarExp: return delta * delta;
        case ContinuousKernel::AbsExp:
        case ContinuousKernel::Matern32:
        case ContinuousKernel::Matern52: return std::fabs(delta);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

double continuous_corr(ContinuousKernel kind, double d) {
    if (d < 0.0) throw std::invalid_argument("continuous_corr: distance must be nonnegative");
    switch (kind) {
        case ContinuousKernel::AbsExp:
        case ContinuousKernel::SquarExp:
            return std::exp(-d);
        case ContinuousKernel::Matern32: {
            const double a = std::numbers::sqrt3 * d;
            return (1.0 + a) * std::exp(-a);
        }
        case ContinuousKernel::Matern52: {
            const double a = std::sqrt(5.0) * d;
            return (1.0 + a + a * a / 3.0) * std::exp(-a);
        }
    }
    throw std::logic_error("unreachable");
}

double continuous_corr_ddist(ContinuousKernel kind, double d) {
    if (d < 0.0) throw std::invalid_argument("continuous_corr_ddist: distance must be nonnegative");
    switch (kind) {
        case ContinuousKernel::AbsExp:
        case ContinuousKernel::SquarExp:
            return -std::exp(-d);
        case ContinuousKernel::Matern32:
            return -3.0 * d * std::exp(-std::numbers::sqrt3 * d);
        case ContinuousKernel::Matern52: {
            const double s5 = std::sqrt(5.0);
            return -(5.0 / 3.0) * d * (1.0 + s5 * d) * std::exp(-s5 * d);
        }
    }
    throw std::logic_error("unreachable");
}

Eigen::MatrixXd hypersphere_lower(const Eigen::VectorXd& angles, int levels) {
    if (levels < 2) throw std::invalid_argument("hypersphere_lower: need at least 2 levels");
    const int expected = levels * (levels - 1) / 2;
    if (angles.size() != expected)
        throw std::invalid_argument("hypersphere_lower: expected " + std::to_string(expected) +
                                    " angles, got " + std::to_string(angles.size()));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(levels, levels);
    c(0, 0) = 1.0;
    int pos = 0;
    for (int r = 1; r < levels; ++r) {
        double sin_prod = 1.0;
        for (int k = 0; k < r; ++k) {
            c(r, k) = std::cos(angles(pos + k)) * sin_prod;
            sin_prod *= std::sin(angles(pos + k));
        }
        c(r, r) = sin_prod;
        pos += r;
    }
    return c;
}

int categorical_param_count(CategoricalKernel kind, int levels) {
    switch (kind) {
        case CategoricalKernel::Gower: return 1;
        case CategoricalKernel::ContRelax: return levels;
        case CategoricalKernel::ExpHomoHSphere:
        case CategoricalKernel::HomoHSphere: return levels * (levels - 1) / 2;
    }
    throw std::logic_error("unreachable");
}

Eigen::MatrixXd categorical_table(CategoricalKernel kind, const Eigen::VectorXd& params,
                                  int levels, double epsilon) {
    if (params.size() != categorical_param_count(kind, levels))
        throw std::invalid_argument("categorical_table: parameter count mismatch");
    Eigen::MatrixXd t = Eigen::MatrixXd::Ones(levels, levels);
    switch (kind) {
        case CategoricalKernel::Gower: {
            // kappa(0) * kappa(theta/2) * kappa(theta/2) = exp(-theta)
            const double off = std::exp(-params(0));
            for (int r = 0; r < levels; ++r)
                for (int s = 0; s < levels; ++s)
                    if (r != s) t(r, s) = off;
            break;
        }
        case CategoricalKernel::ContRelax: {
            // kappa(0) * kappa(theta_r) * kappa(theta_s) = exp(-theta_r - theta_s)
            for (int r = 0; r < levels; ++r)
                for (int s = 0; s < levels; ++s)
                    if (r != s) t(r, s) = std::exp(-params(r) - params(s));
            break;
        }
        case CategoricalKernel::ExpHomoHSphere: {
            const Eigen::MatrixXd c = hypersphere_lower(params, levels);
            const Eigen::MatrixXd m = c * c.transpose();
            // kappa(log(eps) * (m - 1)) * kappa(0) * kappa(0) = eps^(1 - m)
            const double log_eps = std::log(epsilon);
            for (int r = 0; r < levels; ++r)
                for (int s = 0; s < levels; ++s)
                    if (r != s) t(r, s) = std::exp(log_eps * (1.0 - m(r, s)));
            break;
        }
        case CategoricalKernel::HomoHSphere: {
            const Eigen::MatrixXd c = hypersphere_lower(params, levels);
            const Eigen::MatrixXd m = c * c.transpose();
            // kappa = identity: 2 * (m/2) * 1 * 1 = m
            for (int r = 0; r < levels; ++r)
                for (int s = 0; s < levels; ++s)
                    if (r != s) t(r, s) = m(r, s);
            break;
        }
    }
    return t;
}

double categorical_corr(CategoricalKernel kind, int level_r, int level_s,
                        const Eigen::VectorXd& params, int levels, double epsilon) {
    if (level_r < 0 || level_r >= levels || level_s < 0 || level_s >= levels)
        throw std::invalid_argument("categorical_corr: level index out of range");
    if (level_r == level_s) return 1.0;
    return categorical_table(kind, params, levels, epsilon)(level_r, level_s);
}

double alg_distance(double a, double b, double theta) {
    if (theta <= 0.0) throw std::invalid_argument("alg_distance: theta must be positive");
    return theta * 2.0 * std::fabs(a - b) / (std::sqrt(a * a + 1.0) * std::sqrt(b * b + 1.0));
}

double arc_distance(double a, double b, double theta) {
    if (theta <= 0.0) throw std::invalid_argument("arc_distance: theta must be positive");
    const double ds = std::sin(std::numbers::pi * 0.5 * a) - std::sin(std::numbers::pi * 0.5 * b);
    const double dc = std::cos(std::numbers::pi * 0.5 * a) - std::cos(std::numbers::pi * 0.5 * b);
    return theta * std::sqrt(ds * ds + dc * dc);
}

const HyperparameterLayout::Block& HyperparameterLayout::block_for(int var_index) const {
    for (const Block& b : blocks)
        if (b.var_index == var_index) return b;
    throw std::out_of_range("no hyperparameter block for variable " + std::to_string(var_index));
}

HyperparameterLayout make_hyperparameter_layout(const DesignSpace& space, const KernelConfig& config) {
    HyperparameterLayout layout;
    std::vector<double> lo, hi;
    for (int i = 0; i < space.num_variables(); ++i) {
        const Variable& var = space.variable(i);
        HyperparameterLayout::Block block;
        block.var_index = i;
        block.offset = layout.total;
        if (var.is_categorical()) {
            if (space.is_decreed(i) && config.hierarchical != HierarchicalKernel::Imp)
                throw std::invalid_argument(
                    "hierarchical kernels other than the imputation kernel require quantitative "
                    "decreed variables ('" + var.name() + "' is categorical)");
            block.type = HyperparameterLayout::BlockType::Categorical;
            block.count = categorical_param_count(config.categorical, var.num_levels());
            const bool angles = config.categorical == CategoricalKernel::ExpHomoHSphere ||
                                config.categorical == CategoricalKernel::HomoHSphere;
            for (int k = 0; k < block.count; ++k) {
                lo.push_back(angles ? kAngleMargin : kThetaLower);
                hi.push_back(angles ? std::numbers::pi - kAngleMargin : kThetaUpper);
                layout.log_scale.push_back(angles ? 0 : 1);
            }
        } else {
            block.type = HyperparameterLayout::BlockType::QuantTheta;
            block.count = 1;
            lo.push_back(kThetaLower);
            hi.push_back(kThetaUpper);
            layout.log_scale.push_back(1);
        }
        layout.total += block.count;
        layout.blocks.push_back(block);
    }
    layout.lower = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    layout.upper = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    return layout;
}

int count_hyperparameters(const DesignSpace& space, const KernelConfig& config) {
    return make_hyperparameter_layout(space, config).total;
}

int count_hyperparameters_original_arc(const DesignSpace& space, const KernelConfig& config) {
    return count_hyperparameters(space, config) + static_cast<int>(space.decreed_indices().size());
}

KernelPoint make_kernel_point(const DesignSpace& space, const DesignPoint& point) {
    KernelPoint kp;
    const std::vector<double> norm = space.normalize(point);
    kp.x = Eigen::Map<const Eigen::VectorXd>(norm.data(), static_cast<Eigen::Index>(norm.size()));
    kp.acting = point.acting;
    return kp;
}

KernelEvaluator::KernelEvaluator(const DesignSpace& space, const KernelConfig& config)
    : space_(&space), config_(config), layout_(make_hyperparameter_layout(space, config)) {}

std::vector<Eigen::MatrixXd> KernelEvaluator::build_tables(const Eigen::VectorXd& hp) const {
    std::vector<Eigen::MatrixXd> tables(static_cast<size_t>(space_->num_variables()));
    for (const auto& block : layout_.blocks) {
        if (block.type != HyperparameterLayout::BlockType::Categorical) continue;
        const Variable& var = space_->variable(block.var_index);
        tables[static_cast<size_t>(block.var_index)] = categorical_table(
            config_.categorical, hp.segment(block.offset, block.count), var.num_levels(),
            config_.epsilon);
    }
    return tables;
}

double KernelEvaluator::pair_factor(int var, const KernelPoint& u, const KernelPoint& v,
                                    const Eigen::VectorXd& hp,
                                    const std::vector<Eigen::MatrixXd>& tables) const {
    const auto& block = layout_.blocks[static_cast<size_t>(var)];
    if (block.type == HyperparameterLayout::BlockType::Categorical) {
        const int lr = static_cast<int>(u.x(var));
        const int ls = static_cast<int>(v.x(var));
        if (lr == ls) return 1.0;
        return tables[static_cast<size_t>(var)](lr, ls);
    }
    const double theta = hp(block.offset);
    if (!space_->is_decreed(var) || config_.hierarchical == HierarchicalKernel::Imp)
        return continuous_corr(config_.continuous,
                               weighted_distance(config_.continuous, theta, u.x(var) - v.x(var)));
    const bool au = u.acting[static_cast<size_t>(var)] != 0;
    const bool av = v.acting[static_cast<size_t>(var)] != 0;
    if (!au && !av) return 1.0;
    double d;
    if (au && av)
        d = config_.hierarchical == HierarchicalKernel::Alg ? alg_distance(u.x(var), v.x(var), theta)
                                                            : arc_distance(u.x(var), v.x(var), theta);
    else
        d = theta;  // unit residual distance between different subspaces
    return continuous_corr(config_.continuous, d);
}

double KernelEvaluator::corr(const KernelPoint& u, const KernelPoint& v,
                             const Eigen::VectorXd& hp) const {
    if (hp.size() != layout_.total)
        throw std::invalid_argument("corr: hyperparameter count mismatch");
    const std::vector<Eigen::MatrixXd> tables = build_tables(hp);
    double k = 1.0;
    for (int i = 0; i < space_->num_variables(); ++i) k *= pair_factor(i, u, v, hp, tables);
    return k;
}

double KernelEvaluator::meta_decreed_corr(const KernelPoint& u, const KernelPoint& v,
                                          const Eigen::VectorXd& hp) const {
    if (hp.size() != layout_.total)
        throw std::invalid_argument("meta_decreed_corr: hyperparameter count mismatch");
    const std::vector<Eigen::MatrixXd> tables = build_tables(hp);
    double k = 1.0;
    for (int i : space_->decreed_indices()) k *= pair_factor(i, u, v, hp, tables);
    return k;
}

Eigen::MatrixXd KernelEvaluator::matrix(const std::vector<KernelPoint>& points,
                                        const Eigen::VectorXd& hp) const {
    if (points.empty()) throw std::invalid_argument("matrix: need at least one point");
    if (hp.size() != layout_.total)
        throw std::invalid_argument("matrix: hyperparameter count mismatch");
    const int n = static_cast<int>(points.size());
    const std::vector<Eigen::MatrixXd> tables = build_tables(hp);
    Eigen::MatrixXd r = Eigen::MatrixXd::Ones(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double k = 1.0;
            for (int var = 0; var < space_->num_variables(); ++var)
                k *= pair_factor(var, points[static_cast<size_t>(i)], points[static_cast<size_t>(j)],
                                 hp, tables);
            r(i, j) = k;
            r(j, i) = k;
        }
    return r;
}

Eigen::VectorXd KernelEvaluator::cross(const std::vector<KernelPoint>& points, const KernelPoint& q,
                                       const Eigen::VectorXd& hp) const {
    const std::vector<Eigen::MatrixXd> tables = build_tables(hp);
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    for (size_t i = 0; i < points.size(); ++i) {
        double k = 1.0;
        for (int var = 0; var < space_->num_variables(); ++var)
            k *= pair_factor(var, q, points[i], hp, tables);
        r(static_cast<Eigen::Index>(i)) = k;
    }
    return r;
}

std::vector<Eigen::MatrixXd> KernelEvaluator::matrix_grad(const std::vector<KernelPoint>& points,
                                                          const Eigen::VectorXd& hp) const {
    if (points.empty()) throw std::invalid_argument("matrix_grad: need at least one point");
    if (hp.size() != layout_.total)
        throw std::invalid_argument("matrix_grad: hyperparameter count mismatch");
    const int n = static_cast<int>(points.size());
    const int nv = space_->num_variables();
    const std::vector<Eigen::MatrixXd> tables = build_tables(hp);

    // Per-variable factor tables F_v and leave-one-out products Rest_v
    // computed with prefix/suffix Hadamard products.
    std::vector<Eigen::MatrixXd> factors(static_cast<size_t>(nv));
    for (int var = 0; var < nv; ++var) {
        Eigen::MatrixXd f = Eigen::MatrixXd::Ones(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double k = pair_factor(var, points[static_cast<size_t>(i)],
                                             points[static_cast<size_t>(j)], hp, tables);
                f(i, j) = k;
                f(j, i) = k;
            }
        factors[static_cast<size_t>(var)] = std::move(f);
    }
    std::vector<Eigen::MatrixXd> prefix(static_cast<size_t>(nv + 1)),
        suffix(static_cast<size_t>(nv + 1));
    prefix[0] = Eigen::MatrixXd::Ones(n, n);
    for (int var = 0; var < nv; ++var)
        prefix[static_cast<size_t>(var + 1)] =
            prefix[static_cast<size_t>(var)].cwiseProduct(factors[static_cast<size_t>(var)]);
    suffix[static_cast<size_t>(nv)] = Eigen::MatrixXd::Ones(n, n);
    for (int var = nv - 1; var >= 0; --var)
        suffix[static_cast<size_t>(var)] =
            suffix[static_cast<size_t>(var + 1)].cwiseProduct(factors[static_cast<size_t>(var)]);

    std::vector<Eigen::MatrixXd> grads(static_cast<size_t>(layout_.total),
                                       Eigen::MatrixXd::Zero(n, n));
    for (const auto& block : layout_.blocks) {
        const int var = block.var_index;
        const Eigen::MatrixXd rest =
            prefix[static_cast<size_t>(var)].cwiseProduct(suffix[static_cast<size_t>(var + 1)]);
        if (block.type == HyperparameterLayout::BlockType::QuantTheta) {
            const double theta = hp(block.offset);
            Eigen::MatrixXd df = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const KernelPoint& u = points[static_cast<size_t>(i)];
                    const KernelPoint& v = points[static_cast<size_t>(j)];
                    double d = 0.0, dd_dtheta = 0.0;
                    bool contributes = true;
                    if (!space_->is_decreed(var) || config_.hierarchical == HierarchicalKernel::Imp) {
                        const double delta = u.x(var) - v.x(var);
                        d = weighted_distance(config_.continuous, theta, delta);
                        dd_dtheta = weighted_distance_dtheta(config_.continuous, delta);
                    } else {
                        const bool au = u.acting[static_cast<size_t>(var)] != 0;
                        const bool av = v.acting[static_cast<size_t>(var)] != 0;
                        if (!au && !av) {
                            contributes = false;
                        } else if (au && av) {
                            d = config_.hierarchical == HierarchicalKernel::Alg
                                    ? alg_distance(u.x(var), v.x(var), theta)
                                    : arc_distance(u.x(var), v.x(var), theta);
                            dd_dtheta = d / theta;
                        } else {
                            d = theta;
                            dd_dtheta = 1.0;
                        }
                    }
                    if (!contributes) continue;
                    const double g = continuous_corr_ddist(config_.continuous, d) * dd_dtheta;
                    df(i, j) = g;
                    df(j, i) = g;
                }
            grads[static_cast<size_t>(block.offset)] = rest.cwiseProduct(df);
            continue;
        }

        // Categorical block
        const Variable& variable = space_->variable(var);
        const int levels = variable.num_levels();
        const Eigen::VectorXd params = hp.segment(block.offset, block.count);
        const Eigen::MatrixXd& f = factors[static_cast<size_t>(var)];
        auto level_of = [&](int p) { return static_cast<int>(points[static_cast<size_t>(p)].x(var)); };

        switch (config_.categorical) {
            case CategoricalKernel::Gower: {
                Eigen::MatrixXd df = Eigen::MatrixXd::Zero(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (level_of(i) != level_of(j)) {
                            df(i, j) = -f(i, j);
                            df(j, i) = df(i, j);
                        }
                grads[static_cast<size_t>(block.offset)] = rest.cwiseProduct(df);
                break;
            }
            case CategoricalKernel::ContRelax: {
                for (int lev = 0; lev < levels; ++lev) {
                    Eigen::MatrixXd df = Eigen::MatrixXd::Zero(n, n);
                    for (int i = 0; i < n; ++i)
                        for (int j = i + 1; j < n; ++j) {
                            const int lr = level_of(i), ls = level_of(j);
                            if (lr == ls) continue;
                            const double mult = (lr == lev ? 1.0 : 0.0) + (ls == lev ? 1.0 : 0.0);
                            if (mult != 0.0) {
                                df(i, j) = -mult * f(i, j);
                                df(j, i) = df(i, j);
                            }
                        }
                    grads[static_cast<size_t>(block.offset + lev)] = rest.cwiseProduct(df);
                }
                break;
            }
            case CategoricalKernel::ExpHomoHSphere:
            case CategoricalKernel::HomoHSphere: {
                // Central finite differences on the level table, step 1e-6
                // relative (floored at 1e-6 absolute for small angles).
                for (int a = 0; a < block.count; ++a) {
                    const double h = 1e-6 * std::max(1.0, std::fabs(params(a)));
                    Eigen::VectorXd p_plus = params, p_minus = params;
                    p_plus(a) += h;
                    p_minus(a) -= h;
                    const Eigen::MatrixXd dt =
                        (categorical_table(config_.categorical, p_plus, levels, config_.epsilon) -
                         categorical_table(config_.categorical, p_minus, levels, config_.epsilon)) /
                        (2.0 * h);
                    Eigen::MatrixXd df = Eigen::MatrixXd::Zero(n, n);
                    for (int i = 0; i < n; ++i)
                        for (int j = i + 1; j < n; ++j) {
                            const int lr = level_of(i), ls = level_of(j);
                            if (lr == ls) continue;
                            df(i, j) = dt(lr, ls);
                            df(j, i) = df(i, j);
                        }
                    grads[static_cast<size_t>(block.offset + a)] = rest.cwiseProduct(df);
                }
                break;
            }
        }
    }
    return grads;
}

Eigen::VectorXd KernelEvaluator::cross_ddim(const std::vector<KernelPoint>& points,
                                            const KernelPoint& q, const Eigen::VectorXd& hp,
                                            int dim) const {
    const Variable& variable = space_->variable(dim);
    if (variable.kind() != VarKind::Float)
        throw std::invalid_argument("cross_ddim: derivatives are only defined for Float variables");
    if (config_.continuous == ContinuousKernel::AbsExp)
        throw std::invalid_argument("cross_ddim: abs_exp is not differentiable at coincident points");
    const auto& block = layout_.block_for(dim);
    const double theta = hp(block.offset);
    const std::vector<Eigen::MatrixXd> tables = build_tables(hp);

    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    for (size_t i = 0; i < points.size(); ++i) {
        const KernelPoint& v = points[i];
        double rest = 1.0;
        for (int var = 0; var < space_->num_variables(); ++var)
            if (var != dim) rest *= pair_factor(var, q, v, hp, tables);

        const double a = q.x(dim);
        const double b = v.x(dim);
        double dfactor = 0.0;
        if (!space_->is_decreed(dim) || config_.hierarchical == HierarchicalKernel::Imp) {
            const double delta = a - b;
            const double d = weighted_distance(config_.continuous, theta, delta);
            const double dd_da = config_.continuous == ContinuousKernel::SquarExp
                                     ? 2.0 * theta * delta
                                     : theta * (delta >= 0.0 ? 1.0 : -1.0);
            dfactor = continuous_corr_ddist(config_.continuous, d) * dd_da;
        } else {
            const bool aq = q.acting[static_cast<size_t>(dim)] != 0;
            const bool av = v.acting[static_cast<size_t>(dim)] != 0;
            if (aq && av) {
                double d, dd_da;
                if (config_.hierarchical == HierarchicalKernel::Alg) {
                    d = alg_distance(a, b, theta);
                    const double sa = std::sqrt(a * a + 1.0);
                    const double sb = std::sqrt(b * b + 1.0);
                    const double sign = a >= b ? 1.0 : -1.0;
                    dd_da = theta * 2.0 / sb * (sign / sa - std::fabs(a - b) * a / (sa * sa * sa));
                } else {
                    d = arc_distance(a, b, theta);
                    // ||omega(a)-omega(b)|| = 2 |sin(pi (a-b) / 4)|
                    const double arg = 0.25 * std::numbers::pi * (a - b);
                    const double sign = std::sin(arg) >= 0.0 ? 1.0 : -1.0;
                    dd_da = theta * 2.0 * std::cos(arg) * (0.25 * std::numbers::pi) * sign;
                }
                dfactor = continuous_corr_ddist(config_.continuous, d) * dd_da;
            } else {
                dfactor = 0.0;  // residual factor does not depend on the values
            }
        }
        out(static_cast<Eigen::Index>(i)) = rest * dfactor;
    }
    return out;
}

double full_corr(const DesignSpace& space, const KernelConfig& config, const KernelPoint& u,
                 const KernelPoint& v, const HyperparameterSet& hp) {
    return KernelEvaluator(space, config).corr(u, v, hp.values);
}

double meta_decreed_corr(const DesignSpace& space, const KernelConfig& config,
                         const KernelPoint& u, const KernelPoint& v,
                         const HyperparameterSet& hp) {
    return KernelEvaluator(space, config).meta_decreed_corr(u, v, hp.values);
}

Eigen::MatrixXd corr_matrix(const DesignSpace& space, const KernelConfig& config,
                            const std::vector<KernelPoint>& points, const HyperparameterSet& hp) {
    return KernelEvaluator(space, config).matrix(points, hp.values);
}

std::vector<Eigen::MatrixXd> corr_matrix_grad(const DesignSpace& space, const KernelConfig& config,
                                              const std::vector<KernelPoint>& points,
                                              const HyperparameterSet& hp) {
    return KernelEvaluator(space, config).matrix_grad(points, hp.values);
}

std::string to_string(ContinuousKernel k) {
    switch (k) {
        case ContinuousKernel::AbsExp: return "abs_exp";
        case ContinuousKernel::SquarExp: return "squar_exp";
        case ContinuousKernel::Matern32: return "matern32";
        case ContinuousKernel::Matern52: return "matern52";
    }
    throw std::logic_error("unreachable");
}

std::string to_string(CategoricalKernel k) {
    switch (k) {
        case CategoricalKernel::Gower: return "GOWER";
        case CategoricalKernel::ContRelax: return "CONT_RELAX";
        case CategoricalKernel::ExpHomoHSphere: return "EXP_HOMO_HSPHERE";
        case CategoricalKernel::HomoHSphere: return "HOMO_HSPHERE";
    }
    throw std::logic_error("unreachable");
}

std::string to_string(HierarchicalKernel k) {
    switch (k) {
        case HierarchicalKernel::Alg: return "ALG_KERNEL";
        case HierarchicalKernel::Arc: return "ARC_KERNEL";
        case HierarchicalKernel::Imp: return "IMP_KERNEL";
    }
    throw std::logic_error("unreachable");
}

ContinuousKernel continuous_kernel_from_string(const std::string& s) {
    if (s == "abs_exp") return ContinuousKernel::AbsExp;
    if (s == "squar_exp") return ContinuousKernel::SquarExp;
    if (s == "matern32") return ContinuousKernel::Matern32;
    if (s == "matern52") return ContinuousKernel::Matern52;
    throw std::invalid_argument("unknown continuous kernel '" + s + "'");
}

CategoricalKernel categorical_kernel_from_string(const std::string& s) {
    if (s == "GOWER") return CategoricalKernel::Gower;
    if (s == "CONT_RELAX") return CategoricalKernel::ContRelax;
    if (s == "EXP_HOMO_HSPHERE") return CategoricalKernel::ExpHomoHSphere;
    if (s == "HOMO_HSPHERE") return CategoricalKernel::HomoHSphere;
    throw std::invalid_argument("unknown categorical kernel '" + s + "'");
}

HierarchicalKernel hierarchical_kernel_from_string(const std::string& s) {
    if (s == "ALG_KERNEL") return HierarchicalKernel::Alg;
    if (s == "ARC_KERNEL") return HierarchicalKernel::Arc;
    if (s == "IMP_KERNEL") return HierarchicalKernel::Imp;
    throw std::invalid_argument("unknown hierarchical kernel '" + s + "'");
}

}  // namespace mixkrig
