#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mixkrig/design_space.hpp"
#include "mixkrig/kernels.hpp"

namespace mixkrig {

struct KrigingConfig {
    KernelConfig kernel;
    /// Diagonal regularization; escalated by factors of 10 up to 1e-6 on
    /// Cholesky failure. A nugget of exactly 0 disables escalation.
    double nugget = 1e-10;
    int n_starts = 10;
    /// Maximum likelihood evaluations per start.
    int budget = 200;
    std::uint64_t seed = 0;
    /// Thread cap for the multi-starts (<= 0 picks the hardware default).
    int jobs = 0;
};

/// Imputation convention implied by the hierarchical kernel choice: the
/// imputation baseline reads decreed values, so it uses the floored-mean
/// policy; the algebraic/arc kernels never read non-acting values and keep
/// the standard defaults.
ImputePolicy impute_policy_for(const KernelConfig& config);

/// Ordinary-Kriging surrogate with a constant trend, trained by multi-start
/// maximization of the concentrated likelihood. Immutable once trained;
/// queries are safe from multiple threads.
class KrigingModel {
public:
    const DesignSpace& space() const { return space_; }
    const KrigingConfig& config() const { return config_; }
    const Eigen::VectorXd& hyperparameters() const { return hp_; }
    double beta() const { return beta_; }
    double process_variance() const { return sigma2_; }
    double nugget_used() const { return nugget_used_; }
    double neg_log_likelihood() const { return nll_; }
    double y_mean() const { return y_mean_; }
    double y_std() const { return y_std_; }
    int num_points() const { return static_cast<int>(points_.size()); }
    const std::vector<DesignPoint>& training_points() const { return points_; }
    const Eigen::VectorXd& training_values() const { return y_raw_; }
    /// The factorized matrix R + nugget*I.
    const Eigen::MatrixXd& regularized_corr_matrix() const { return rmat_; }

    Eigen::VectorXd predict_values(const std::vector<DesignPoint>& queries) const;
    Eigen::VectorXd predict_variances(const std::vector<DesignPoint>& queries) const;
    /// Mean and variance derivatives with respect to the raw coordinate of
    /// the Float variable `dim`.
    std::pair<Eigen::VectorXd, Eigen::VectorXd> predict_derivatives(
        const std::vector<DesignPoint>& queries, int dim) const;

    double predict_value(const DesignPoint& q) const;
    double predict_variance(const DesignPoint& q) const;

    /// Concentrated negative log-likelihood at arbitrary hyperparameters
    /// over this model's training data (used by tests and the optimizer).
    double nll(const Eigen::VectorXd& hp) const;
    std::pair<double, Eigen::VectorXd> nll_with_grad(const Eigen::VectorXd& hp) const;

    /// Corrects and re-imputes a query with this model's policy.
    DesignPoint prepare_query(const std::vector<double>& raw) const;

private:
    friend KrigingModel train(const DesignSpace&, const KrigingConfig&,
                              const std::vector<DesignPoint>&, const Eigen::VectorXd&,
                              const Eigen::VectorXd*);
    friend KrigingModel rebuild(const DesignSpace&, const KrigingConfig&,
                                const std::vector<DesignPoint>&, const Eigen::VectorXd&,
                                const Eigen::VectorXd&);
    KrigingModel() = default;

    static KrigingModel assemble(const DesignSpace& space, const KrigingConfig& config,
                                 const std::vector<DesignPoint>& points, const Eigen::VectorXd& y);
    void finalize(const KernelEvaluator& eval, Eigen::VectorXd hp);

    KernelPoint prepared(const DesignPoint& q) const;

    DesignSpace space_{std::vector<Variable>{Variable::real("_", 0.0, 1.0)}};
    KrigingConfig config_;
    std::vector<DesignPoint> points_;
    std::vector<KernelPoint> kpoints_;
    Eigen::VectorXd y_raw_;
    Eigen::VectorXd y_norm_;
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    Eigen::VectorXd hp_;
    Eigen::MatrixXd rmat_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;      // (R+nu I)^-1 (y - beta 1)
    Eigen::VectorXd rinv_ones_;  // (R+nu I)^-1 1
    double ones_rinv_ones_ = 0.0;
    double beta_ = 0.0;
    double sigma2_ = 0.0;
    double nll_ = 0.0;
    double nugget_used_ = 0.0;
};

/// Trains on already-valid design points. `warm_hp`, when given, seeds the
/// first optimization start (the remaining starts are fresh).
KrigingModel train(const DesignSpace& space, const KrigingConfig& config,
                   const std::vector<DesignPoint>& points, const Eigen::VectorXd& y,
                   const Eigen::VectorXd* warm_hp = nullptr);

/// Convenience overload correcting raw rows through the space first.
KrigingModel train(const DesignSpace& space, const KrigingConfig& config,
                   const std::vector<std::vector<double>>& raw_rows, const Eigen::VectorXd& y);

/// Reassembles a trained model at fixed hyperparameters (deserialization
/// path): the Cholesky factor is recomputed, no optimization runs.
KrigingModel rebuild(const DesignSpace& space, const KrigingConfig& config,
                     const std::vector<DesignPoint>& points, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& hp);

}  // namespace mixkrig
