#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mixkrig/design_space.hpp"

namespace mixkrig {

enum class ContinuousKernel { AbsExp, SquarExp, Matern32, Matern52 };
enum class CategoricalKernel { Gower, ContRelax, ExpHomoHSphere, HomoHSphere };
enum class HierarchicalKernel { Alg, Arc, Imp };

struct KernelConfig {
    ContinuousKernel continuous = ContinuousKernel::SquarExp;
    CategoricalKernel categorical = CategoricalKernel::ContRelax;
    HierarchicalKernel hierarchical = HierarchicalKernel::Alg;
    /// Correlation floor between maximally dissimilar levels (ExpHomoHSphere).
    double epsilon = 1e-13;
};

/// Scalar correlation g(d) for a theta-weighted distance d >= 0. The
/// weighting convention is theta*|delta| for AbsExp/Matern kinds and
/// theta*delta^2 for SquarExp; hierarchical distances are consumed as-is.
double continuous_corr(ContinuousKernel kind, double d);
/// dg/dd of the above.
double continuous_corr_ddist(ContinuousKernel kind, double d);

/// Lower-triangular hypersphere factor with unit-norm rows; row j (0-based)
/// consumes j angles, so `angles` has L(L-1)/2 entries for L levels.
/// C*C^T is a valid correlation matrix for any angles.
Eigen::MatrixXd hypersphere_lower(const Eigen::VectorXd& angles, int levels);

/// Number of hyperparameters one categorical variable contributes.
int categorical_param_count(CategoricalKernel kind, int levels);

/// Level-pair correlation table (levels x levels, unit diagonal) for one
/// categorical variable. `params` holds the single Gower theta, the per-level
/// ContRelax thetas, or the hypersphere angles.
Eigen::MatrixXd categorical_table(CategoricalKernel kind, const Eigen::VectorXd& params,
                                  int levels, double epsilon);

double categorical_corr(CategoricalKernel kind, int level_r, int level_s,
                        const Eigen::VectorXd& params, int levels, double epsilon);

/// Algebraic distance between two acting decreed values (normalized inputs):
/// 2|a-b| / (sqrt(a^2+1) sqrt(b^2+1)) * theta.
double alg_distance(double a, double b, double theta);
/// Arc-embedding distance: theta * || omega(a) - omega(b) || with
/// omega(t) = (sin(pi t / 2), cos(pi t / 2)), i.e. theta * 2 sin(pi|a-b|/4).
double arc_distance(double a, double b, double theta);

/// Mapping from the flat hyperparameter vector to per-variable blocks.
struct HyperparameterLayout {
    enum class BlockType { QuantTheta, Categorical };
    struct Block {
        int var_index = -1;
        BlockType type = BlockType::QuantTheta;
        int offset = 0;
        int count = 0;
    };
    std::vector<Block> blocks;
    int total = 0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<uint8_t> log_scale;  // search these entries in log space

    const Block& block_for(int var_index) const;
};

HyperparameterLayout make_hyperparameter_layout(const DesignSpace& space, const KernelConfig& config);
int count_hyperparameters(const DesignSpace& space, const KernelConfig& config);
/// Count-only comparison helper: the original arc kernel keeps an extra
/// continuous hyperparameter per decreed dimension.
int count_hyperparameters_original_arc(const DesignSpace& space, const KernelConfig& config);

struct HyperparameterSet {
    Eigen::VectorXd values;
};

/// A corrected+imputed point prepared for kernel evaluation: normalized
/// coordinates (level indices for categorical variables) plus acting flags.
struct KernelPoint {
    Eigen::VectorXd x;
    std::vector<uint8_t> acting;
};

KernelPoint make_kernel_point(const DesignSpace& space, const DesignPoint& point);

/// Pairwise correlation machinery bound to one (space, config) pair.
/// All evaluations are pure; instances are safe to share across threads.
class KernelEvaluator {
public:
    KernelEvaluator(const DesignSpace& space, const KernelConfig& config);

    const HyperparameterLayout& layout() const { return layout_; }
    const DesignSpace& space() const { return *space_; }
    const KernelConfig& config() const { return config_; }

    /// Full correlation k(u,v) = k_neu * k_met * k_met,dec.
    double corr(const KernelPoint& u, const KernelPoint& v, const Eigen::VectorXd& hp) const;

    /// Only the decreed-dimension part of the product (the meta-decreed
    /// kernel; for the imputation kernel this is the plain factor over the
    /// imputed decreed coordinates).
    double meta_decreed_corr(const KernelPoint& u, const KernelPoint& v,
                             const Eigen::VectorXd& hp) const;

    /// n x n correlation matrix: symmetric, unit diagonal.
    Eigen::MatrixXd matrix(const std::vector<KernelPoint>& points, const Eigen::VectorXd& hp) const;

    /// dR/dhp for every hyperparameter. Analytic for quantitative thetas
    /// (including decreed ones); hypersphere angles use central finite
    /// differences on the level table.
    std::vector<Eigen::MatrixXd> matrix_grad(const std::vector<KernelPoint>& points,
                                             const Eigen::VectorXd& hp) const;

    /// Cross-correlation vector r_i = k(q, X_i).
    Eigen::VectorXd cross(const std::vector<KernelPoint>& points, const KernelPoint& q,
                          const Eigen::VectorXd& hp) const;

    /// d r / d q_dim in normalized coordinates; `dim` must be a Float
    /// variable and the continuous kernel differentiable (not AbsExp).
    Eigen::VectorXd cross_ddim(const std::vector<KernelPoint>& points, const KernelPoint& q,
                               const Eigen::VectorXd& hp, int dim) const;

private:
    double pair_factor(int var, const KernelPoint& u, const KernelPoint& v,
                       const Eigen::VectorXd& hp,
                       const std::vector<Eigen::MatrixXd>& tables) const;
    std::vector<Eigen::MatrixXd> build_tables(const Eigen::VectorXd& hp) const;

    const DesignSpace* space_;
    KernelConfig config_;
    HyperparameterLayout layout_;
};

// Convenience wrappers over a throwaway evaluator.
double full_corr(const DesignSpace& space, const KernelConfig& config, const KernelPoint& u,
                 const KernelPoint& v, const HyperparameterSet& hp);
double meta_decreed_corr(const DesignSpace& space, const KernelConfig& config,
                         const KernelPoint& u, const KernelPoint& v,
                         const HyperparameterSet& hp);
Eigen::MatrixXd corr_matrix(const DesignSpace& space, const KernelConfig& config,
                            const std::vector<KernelPoint>& points, const HyperparameterSet& hp);
std::vector<Eigen::MatrixXd> corr_matrix_grad(const DesignSpace& space, const KernelConfig& config,
                                              const std::vector<KernelPoint>& points,
                                              const HyperparameterSet& hp);

// Name <-> enum mappings used by the CLI and JSON formats.
std::string to_string(ContinuousKernel k);
std::string to_string(CategoricalKernel k);
std::string to_string(HierarchicalKernel k);
ContinuousKernel continuous_kernel_from_string(const std::string& s);
CategoricalKernel categorical_kernel_from_string(const std::string& s);
HierarchicalKernel hierarchical_kernel_from_string(const std::string& s);

}  // namespace mixkrig
