#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "mixkrig/kernels.hpp"
#include "mixkrig/kriging.hpp"
#include "mixkrig/problems.hpp"
#include "mixkrig/sampling.hpp"
#include "test_helpers.hpp"

using namespace mixkrig;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd random_hp(const HyperparameterLayout& layout, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd hp(layout.total);
    for (int i = 0; i < layout.total; ++i) {
        if (layout.log_scale[static_cast<size_t>(i)]) {
            // log-uniform over a well-conditioned band
            const double lo = std::log(0.05), hi = std::log(5.0);
            hp(i) = std::exp(lo + unif(rng) * (hi - lo));
        } else {
            hp(i) = 0.2 + unif(rng) * (kPi - 0.4);
        }
    }
    return hp;
}

double max_rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max({1e-10, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TEST_CASE("continuous_corr") {
    SUBCASE("zero distance gives exactly 1") {
        for (auto kind : {ContinuousKernel::AbsExp, ContinuousKernel::SquarExp,
                          ContinuousKernel::Matern32, ContinuousKernel::Matern52})
            CHECK(continuous_corr(kind, 0.0) == 1.0);
    }
    SUBCASE("exponential value at unit weighted distance") {
        // theta=1, delta=1 -> d = theta*delta^2 = 1
        CHECK(continuous_corr(ContinuousKernel::SquarExp, 1.0) ==
              doctest::Approx(0.36787944117144233).epsilon(1e-12));
    }
    SUBCASE("matern32 is flat at zero distance") {
        CHECK(continuous_corr_ddist(ContinuousKernel::Matern32, 0.0) == 0.0);
        CHECK(continuous_corr_ddist(ContinuousKernel::Matern52, 0.0) == 0.0);
    }
    SUBCASE("strictly decreasing, in (0,1]") {
        for (auto kind : {ContinuousKernel::AbsExp, ContinuousKernel::SquarExp,
                          ContinuousKernel::Matern32, ContinuousKernel::Matern52}) {
            double prev = 1.0;
            for (double d = 0.125; d < 8.0; d += 0.125) {
                const double k = continuous_corr(kind, d);
                CHECK(k > 0.0);
                CHECK(k < prev);
                prev = k;
            }
        }
    }
    SUBCASE("negative distance errors") {
        CHECK_THROWS_AS(continuous_corr(ContinuousKernel::SquarExp, -0.1), std::invalid_argument);
    }
}

TEST_CASE("hypersphere_lower") {
    SUBCASE("L=2 right angle gives the identity") {
        Eigen::VectorXd a(1);
        a << kPi / 2.0;
        const Eigen::MatrixXd c = hypersphere_lower(a, 2);
        const Eigen::MatrixXd m = c * c.transpose();
        CHECK(m(0, 0) == doctest::Approx(1.0));
        CHECK(m(1, 1) == doctest::Approx(1.0));
        CHECK(std::fabs(m(0, 1)) < 1e-12);
    }
    SUBCASE("L=2 vanishing angle: perfectly correlated limit") {
        Eigen::VectorXd a(1);
        a << 1e-9;
        const Eigen::MatrixXd m =
            hypersphere_lower(a, 2) * hypersphere_lower(a, 2).transpose();
        CHECK(m(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("rows have unit norm and C*C^T is PSD (eigen-solver oracle)") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> unif(1e-3, kPi - 1e-3);
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::VectorXd a(3);
            for (int i = 0; i < 3; ++i) a(i) = unif(rng);
            const Eigen::MatrixXd c = hypersphere_lower(a, 3);
            for (int r = 0; r < 3; ++r) CHECK(c.row(r).norm() == doctest::Approx(1.0));
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c * c.transpose());
            CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        }
    }
    SUBCASE("wrong angle count errors") {
        CHECK_THROWS_AS(hypersphere_lower(Eigen::VectorXd::Ones(2), 2), std::invalid_argument);
    }
}

TEST_CASE("categorical_corr") {
    SUBCASE("gower mismatch: exp(-0) * exp(-theta/2) * exp(-theta/2)") {
        Eigen::VectorXd theta(1);
        theta << 1.0;
        CHECK(categorical_corr(CategoricalKernel::Gower, 0, 1, theta, 3, 1e-13) ==
              doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("matching levels give exactly 1 for every kind") {
        std::mt19937_64 rng(3);
        for (auto kind : {CategoricalKernel::Gower, CategoricalKernel::ContRelax,
                          CategoricalKernel::ExpHomoHSphere, CategoricalKernel::HomoHSphere}) {
            const int L = 4;
            Eigen::VectorXd params(categorical_param_count(kind, L));
            std::uniform_real_distribution<double> unif(0.1, 1.5);
            for (int i = 0; i < params.size(); ++i) params(i) = unif(rng);
            for (int lev = 0; lev < L; ++lev)
                CHECK(categorical_corr(kind, lev, lev, params, L, 1e-13) == 1.0);
        }
    }
    SUBCASE("homoscedastic hypersphere at L=2 is cos(angle)") {
        for (double angle : {0.3, 1.0, kPi / 2.0, 2.5}) {
            Eigen::VectorXd a(1);
            a << angle;
            CHECK(categorical_corr(CategoricalKernel::HomoHSphere, 0, 1, a, 2, 1e-13) ==
                  doctest::Approx(std::cos(angle)).epsilon(1e-12));
        }
    }
    SUBCASE("exp variant at L=2 is eps^(1-cos(angle)), bounded by [eps^2, 1]") {
        const double eps = 1e-13;
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> unif(1e-3, kPi - 1e-3);
        for (int trial = 0; trial < 50; ++trial) {
            const double angle = unif(rng);
            Eigen::VectorXd a(1);
            a << angle;
            const double k = categorical_corr(CategoricalKernel::ExpHomoHSphere, 0, 1, a, 2, eps);
            CHECK(k == doctest::Approx(std::pow(eps, 1.0 - std::cos(angle))).epsilon(1e-9));
            CHECK(k >= eps * eps * (1.0 - 1e-9));
            CHECK(k <= 1.0);
        }
    }
    SUBCASE("continuous relaxation: exp(-theta_r - theta_s) off the diagonal") {
        Eigen::VectorXd theta(3);
        theta << 0.3, 0.7, 1.1;
        CHECK(categorical_corr(CategoricalKernel::ContRelax, 0, 2, theta, 3, 1e-13) ==
              doctest::Approx(std::exp(-0.3 - 1.1)).epsilon(1e-12));
        CHECK(categorical_corr(CategoricalKernel::ContRelax, 2, 1, theta, 3, 1e-13) ==
              doctest::Approx(std::exp(-1.1 - 0.7)).epsilon(1e-12));
    }
    SUBCASE("closed forms hold pairwise for larger L (table property)") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unif(0.1, kPi - 0.1);
        const int L = 5;
        Eigen::VectorXd angles(L * (L - 1) / 2);
        for (int i = 0; i < angles.size(); ++i) angles(i) = unif(rng);
        const Eigen::MatrixXd m =
            hypersphere_lower(angles, L) * hypersphere_lower(angles, L).transpose();
        const double eps = 1e-13;
        for (int r = 0; r < L; ++r)
            for (int s = 0; s < L; ++s) {
                if (r == s) continue;
                CHECK(categorical_corr(CategoricalKernel::HomoHSphere, r, s, angles, L, eps) ==
                      doctest::Approx(m(r, s)).epsilon(1e-10));
                CHECK(categorical_corr(CategoricalKernel::ExpHomoHSphere, r, s, angles, L, eps) ==
                      doctest::Approx(std::pow(eps, 1.0 - m(r, s))).epsilon(1e-8));
            }
    }
    SUBCASE("invalid level index errors") {
        Eigen::VectorXd theta(1);
        theta << 1.0;
        CHECK_THROWS_AS(categorical_corr(CategoricalKernel::Gower, 0, 3, theta, 3, 1e-13),
                        std::invalid_argument);
    }
}

TEST_CASE("alg_distance") {
    SUBCASE("reference values") {
        CHECK(std::fabs(alg_distance(51.0, 54.0, 1.0) - 2.178e-3) < 1e-6);
        CHECK(std::fabs(alg_distance(0.2, 0.8, 1.0) - 0.919) < 1e-3);
        CHECK(std::fabs(alg_distance(0.0, 1.0, 1.0) - 1.414) < 1e-3);
    }
    SUBCASE("symmetric, zero iff equal, scales with theta") {
        CHECK(alg_distance(0.3, 0.9, 2.0) == doctest::Approx(2.0 * alg_distance(0.3, 0.9, 1.0)));
        CHECK(alg_distance(0.9, 0.3, 1.7) == doctest::Approx(alg_distance(0.3, 0.9, 1.7)));
        CHECK(alg_distance(0.4, 0.4, 1.0) == 0.0);
        CHECK(alg_distance(0.4, 0.41, 1.0) > 0.0);
    }
    SUBCASE("nonpositive theta errors") {
        CHECK_THROWS_AS(alg_distance(0.0, 1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("arc_distance") {
    SUBCASE("unit-circle chord: 2 sin(pi |a-b| / 4)") {
        for (auto [a, b] : {std::pair{0.0, 1.0}, {0.2, 0.8}, {0.5, 0.5}}) {
            const double expect = 2.0 * std::sin(kPi * std::fabs(a - b) / 4.0);
            CHECK(arc_distance(a, b, 1.0) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("theta scaling") {
        CHECK(arc_distance(0.1, 0.6, 3.0) == doctest::Approx(3.0 * arc_distance(0.1, 0.6, 1.0)));
    }
}

TEST_CASE("meta_decreed_corr on the layered-network example") {
    // Two points with 2 vs 3 hidden layers; all quantitative thetas 1.
    const DesignSpace space = testing::mlp_space_all_decreed();
    KernelConfig config;
    config.continuous = ContinuousKernel::SquarExp;
    config.categorical = CategoricalKernel::HomoHSphere;
    config.hierarchical = HierarchicalKernel::Alg;
    const HyperparameterLayout layout = make_hyperparameter_layout(space, config);
    HyperparameterSet hp{Eigen::VectorXd::Ones(layout.total)};

    const DesignPoint u = space.correct({2, 2e-4, 0.9, 0, 4, 55, 51, 53});
    const DesignPoint v = space.correct({3, 5e-3, 0.8, 1, 6, 50, 54, 53});
    const KernelPoint ku = make_kernel_point(space, u);
    const KernelPoint kv = make_kernel_point(space, v);

    SUBCASE("product of the three decreed factors") {
        // Scalar-by-scalar: normalized layer sizes 55->1, 50->0 and
        // 51->0.2, 54->0.8; the third layer is acting in only one point.
        const double d1 = 2.0 * std::fabs(1.0 - 0.0) / (std::sqrt(2.0) * 1.0);
        const double d2 = 2.0 * std::fabs(0.2 - 0.8) / (std::sqrt(1.04) * std::sqrt(1.64));
        const double expect = std::exp(-d1) * std::exp(-d2) * std::exp(-1.0);
        const double got = meta_decreed_corr(space, config, ku, kv, hp);
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
        // Rounded reference factors: exp(-1) * exp(-1.414) * exp(-0.919).
        CHECK(std::fabs(got - std::exp(-1.0) * std::exp(-1.414) * std::exp(-0.919)) < 1e-3);
    }
    SUBCASE("identical points give 1") {
        CHECK(meta_decreed_corr(space, config, ku, ku, hp) == 1.0);
    }
    SUBCASE("same meta level and equal decreed values give 1 for every kind") {
        const DesignPoint a = space.correct({2, 1e-4, 0.1, 0, 3, 52, 54, 51});
        const DesignPoint b = space.correct({2, 9e-3, 0.7, 2, 8, 52, 54, 50});
        for (auto kind : {HierarchicalKernel::Alg, HierarchicalKernel::Arc, HierarchicalKernel::Imp}) {
            KernelConfig c2 = config;
            c2.hierarchical = kind;
            const ImputePolicy policy = kind == HierarchicalKernel::Imp ? ImputePolicy::MeanFloor
                                                                        : ImputePolicy::Standard;
            const KernelPoint ka = make_kernel_point(space, space.impute(a, policy));
            const KernelPoint kb = make_kernel_point(space, space.impute(b, policy));
            CHECK(meta_decreed_corr(space, c2, ka, kb, HyperparameterSet{hp.values}) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("arc variant uses the chord distance plus the unit residual") {
        KernelConfig arc = config;
        arc.hierarchical = HierarchicalKernel::Arc;
        const double d1 = 2.0 * std::sin(kPi * 1.0 / 4.0);
        const double d2 = 2.0 * std::sin(kPi * 0.6 / 4.0);
        const double expect = std::exp(-d1) * std::exp(-d2) * std::exp(-1.0);
        CHECK(meta_decreed_corr(space, arc, ku, kv, hp) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("full_corr") {
    SUBCASE("all-continuous space reduces to the product of 1-D factors") {
        const DesignSpace space({Variable::real("a", 0, 1), Variable::real("b", 0, 2)});
        KernelConfig config;
        config.continuous = ContinuousKernel::SquarExp;
        HyperparameterSet hp{Eigen::VectorXd::Ones(2) * 0.7};
        const KernelPoint u = make_kernel_point(space, space.correct({0.2, 0.5}));
        const KernelPoint v = make_kernel_point(space, space.correct({0.9, 1.7}));
        const double expect = continuous_corr(ContinuousKernel::SquarExp, 0.7 * 0.49) *
                              continuous_corr(ContinuousKernel::SquarExp, 0.7 * 0.36);
        CHECK(full_corr(space, config, u, v, hp) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("mixed space factors into continuous times categorical") {
        const DesignSpace space = testing::simple_mixed_space();
        KernelConfig config;
        config.continuous = ContinuousKernel::Matern52;
        config.categorical = CategoricalKernel::Gower;
        const HyperparameterLayout layout = make_hyperparameter_layout(space, config);
        Eigen::VectorXd hp(layout.total);
        hp << 0.9, 1.3, 0.4;
        const KernelPoint u = make_kernel_point(space, space.correct({2.0, 51, 0}));
        const KernelPoint v = make_kernel_point(space, space.correct({7.0, 54, 2}));
        const double expect = continuous_corr(ContinuousKernel::Matern52, 0.9 * 0.5) *
                              continuous_corr(ContinuousKernel::Matern52, 1.3 * 0.6) *
                              std::exp(-0.4);
        CHECK(full_corr(space, config, u, v, HyperparameterSet{hp}) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("layered-network example: neutral x meta x meta-decreed") {
        const DesignSpace space = testing::mlp_space_all_decreed();
        KernelConfig config;
        config.continuous = ContinuousKernel::SquarExp;
        config.categorical = CategoricalKernel::HomoHSphere;
        config.hierarchical = HierarchicalKernel::Alg;
        const HyperparameterLayout layout = make_hyperparameter_layout(space, config);
        Eigen::VectorXd hp = Eigen::VectorXd::Ones(layout.total);
        // Angles of the 3-level activation variable.
        const auto& cat = layout.block_for(3);
        hp(cat.offset) = 0.8;
        hp(cat.offset + 1) = 1.1;
        hp(cat.offset + 2) = 2.0;

        const DesignPoint u = space.correct({2, 2e-4, 0.9, 0, 4, 55, 51, 53});
        const DesignPoint v = space.correct({3, 5e-3, 0.8, 1, 6, 50, 54, 53});
        const KernelPoint ku = make_kernel_point(space, u);
        const KernelPoint kv = make_kernel_point(space, v);

        // Independent scalar-by-scalar evaluation on normalized inputs.
        auto sq = [](double t) { return t * t; };
        const double r_norm = (2e-4 - 5e-3) / (1e-2 - 1e-5);
        const double cat_factor = std::cos(0.8);  // [CC^T]_{0,1} at these angles
        const double k_neu = cat_factor * std::exp(-sq(r_norm)) * std::exp(-sq(0.9 - 0.8)) *
                             std::exp(-sq((4.0 - 6.0) / 5.0));
        const double k_met = std::exp(-sq((2.0 - 3.0) / 2.0));
        const double d1 = 2.0 / std::sqrt(2.0);
        const double d2 = 1.2 / (std::sqrt(1.04) * std::sqrt(1.64));
        const double k_md = std::exp(-d1) * std::exp(-d2) * std::exp(-1.0);
        CHECK(full_corr(space, config, ku, kv, HyperparameterSet{hp}) ==
              doctest::Approx(k_neu * k_met * k_md).epsilon(1e-10));
    }
    SUBCASE("diagonal normalization and symmetry over random pairs") {
        const Problem gold = goldstein_problem();
        std::mt19937_64 rng(23);
        for (auto cat : {CategoricalKernel::Gower, CategoricalKernel::ContRelax,
                         CategoricalKernel::ExpHomoHSphere, CategoricalKernel::HomoHSphere})
            for (auto hier :
                 {HierarchicalKernel::Alg, HierarchicalKernel::Arc, HierarchicalKernel::Imp}) {
                KernelConfig config;
                config.categorical = cat;
                config.hierarchical = hier;
                const HyperparameterLayout layout =
                    make_hyperparameter_layout(gold.space, config);
                const ImputePolicy policy = impute_policy_for(config);
                for (int trial = 0; trial < 10; ++trial) {
                    const Eigen::VectorXd hp = random_hp(layout, rng);
                    const DesignPoint a =
                        gold.space.correct(testing::random_raw(gold.space, rng), policy);
                    const DesignPoint b =
                        gold.space.correct(testing::random_raw(gold.space, rng), policy);
                    const KernelPoint ka = make_kernel_point(gold.space, a);
                    const KernelPoint kb = make_kernel_point(gold.space, b);
                    const HyperparameterSet hset{hp};
                    CHECK(full_corr(gold.space, config, ka, ka, hset) == 1.0);
                    CHECK(full_corr(gold.space, config, ka, kb, hset) ==
                          full_corr(gold.space, config, kb, ka, hset));
                }
            }
    }
    SUBCASE("imputation invariance: non-acting raw values never reach the kernel") {
        const Problem gold = goldstein_problem();
        KernelConfig config;
        config.hierarchical = HierarchicalKernel::Alg;
        const HyperparameterLayout layout = make_hyperparameter_layout(gold.space, config);
        std::mt19937_64 rng(29);
        const Eigen::VectorXd hp = random_hp(layout, rng);
        const HyperparameterSet hset{hp};
        std::uniform_real_distribution<double> unif(0.0, 100.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> raw_a = testing::random_raw(gold.space, rng);
            std::vector<double> raw_b = testing::random_raw(gold.space, rng);
            const double base = full_corr(
                gold.space, config, make_kernel_point(gold.space, gold.space.correct(raw_a)),
                make_kernel_point(gold.space, gold.space.correct(raw_b)), hset);
            // Perturb every non-acting coordinate of both raw vectors.
            const auto mask_a = gold.space.activity_mask(gold.space.correct(raw_a).values);
            const auto mask_b = gold.space.activity_mask(gold.space.correct(raw_b).values);
            for (int i = 0; i < gold.space.num_variables(); ++i) {
                if (!mask_a[static_cast<size_t>(i)]) raw_a[static_cast<size_t>(i)] = unif(rng);
                if (!mask_b[static_cast<size_t>(i)]) raw_b[static_cast<size_t>(i)] = unif(rng);
            }
            const double perturbed = full_corr(
                gold.space, config, make_kernel_point(gold.space, gold.space.correct(raw_a)),
                make_kernel_point(gold.space, gold.space.correct(raw_b)), hset);
            CHECK(perturbed == base);
        }
    }
}

TEST_CASE("count_hyperparameters") {
    SUBCASE("beam cross-section space per categorical kind") {
        const DesignSpace space = testing::cantilever_space();
        KernelConfig config;
        config.categorical = CategoricalKernel::Gower;
        CHECK(count_hyperparameters(space, config) == 3);
        config.categorical = CategoricalKernel::ContRelax;
        CHECK(count_hyperparameters(space, config) == 14);
        config.categorical = CategoricalKernel::ExpHomoHSphere;
        CHECK(count_hyperparameters(space, config) == 68);
        config.categorical = CategoricalKernel::HomoHSphere;
        CHECK(count_hyperparameters(space, config) == 68);
    }
    SUBCASE("mlp space with the algebraic kernel and hypersphere activation") {
        KernelConfig config;
        config.categorical = CategoricalKernel::HomoHSphere;
        config.hierarchical = HierarchicalKernel::Alg;
        CHECK(count_hyperparameters(mlp_problem().space, config) == 10);
        CHECK(count_hyperparameters_original_arc(mlp_problem().space, config) == 12);
    }
    SUBCASE("single continuous variable") {
        const DesignSpace space({Variable::real("x", 0, 1)});
        CHECK(count_hyperparameters(space, KernelConfig{}) == 1);
    }
    SUBCASE("per-kind closed forms for arbitrary level counts") {
        for (int L = 2; L <= 12; ++L) {
            CHECK(categorical_param_count(CategoricalKernel::Gower, L) == 1);
            CHECK(categorical_param_count(CategoricalKernel::ContRelax, L) == L);
            CHECK(categorical_param_count(CategoricalKernel::ExpHomoHSphere, L) == L * (L - 1) / 2);
            CHECK(categorical_param_count(CategoricalKernel::HomoHSphere, L) == L * (L - 1) / 2);
        }
    }
    SUBCASE("categorical decreed variables are rejected outside the imputation kernel") {
        DesignSpace space({
            Variable::integer("m", 0, 1),
            Variable::categorical("c", {"a", "b"}),
        });
        space.declare_decreed_var(1, 0, {1.0});
        KernelConfig config;
        config.hierarchical = HierarchicalKernel::Alg;
        CHECK_THROWS_AS(make_hyperparameter_layout(space, config), std::invalid_argument);
        config.hierarchical = HierarchicalKernel::Imp;
        CHECK(count_hyperparameters(space, config) == 1 + 2);  // theta + CR levels
    }
}

TEST_CASE("corr_matrix") {
    const Problem gold = goldstein_problem();
    SUBCASE("single point gives [[1]]") {
        KernelConfig config;
        const HyperparameterLayout layout = make_hyperparameter_layout(gold.space, config);
        const DesignPoint p = gold.space.correct({1, 2, 3, 4, 0, 1, 2, 0, 5, 0, 1});
        const Eigen::MatrixXd r =
            corr_matrix(gold.space, config, {make_kernel_point(gold.space, p)},
                        HyperparameterSet{Eigen::VectorXd::Ones(layout.total)});
        CHECK(r.rows() == 1);
        CHECK(r(0, 0) == 1.0);
    }
    SUBCASE("duplicated points give identical rows") {
        KernelConfig config;
        const HyperparameterLayout layout = make_hyperparameter_layout(gold.space, config);
        const DesignPoint p = gold.space.correct({1, 2, 3, 4, 0, 1, 2, 0, 5, 0, 1});
        const DesignPoint q = gold.space.correct({9, 8, 7, 6, 1, 0, 0, 2, 50, 3, 0});
        const std::vector<KernelPoint> pts{make_kernel_point(gold.space, p),
                                           make_kernel_point(gold.space, p),
                                           make_kernel_point(gold.space, q)};
        const Eigen::MatrixXd r = corr_matrix(gold.space, config, pts,
                                              HyperparameterSet{Eigen::VectorXd::Ones(layout.total)});
        CHECK(r(0, 1) == 1.0);
        CHECK(r.row(0) == r.row(1));
    }
    SUBCASE("PSD over random mixed DoEs for every kind combination") {
        std::mt19937_64 rng(31);
        for (auto cat : {CategoricalKernel::Gower, CategoricalKernel::ContRelax,
                         CategoricalKernel::ExpHomoHSphere, CategoricalKernel::HomoHSphere})
            for (auto hier :
                 {HierarchicalKernel::Alg, HierarchicalKernel::Arc, HierarchicalKernel::Imp}) {
                KernelConfig config;
                config.categorical = cat;
                config.hierarchical = hier;
                const HyperparameterLayout layout = make_hyperparameter_layout(gold.space, config);
                SamplerConfig sampler;
                sampler.n_points = 25;
                sampler.seed = rng();
                const SampledDoe doe =
                    sample_valid(gold.space, sampler, false, impute_policy_for(config));
                std::vector<KernelPoint> pts;
                for (const auto& p : doe.points) pts.push_back(make_kernel_point(gold.space, p));
                const Eigen::MatrixXd r =
                    corr_matrix(gold.space, config, pts, HyperparameterSet{random_hp(layout, rng)});
                CHECK(r == r.transpose().eval());
                const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
                CHECK(es.eigenvalues().minCoeff() >= -1e-8);
            }
    }
}

TEST_CASE("corr_matrix_grad") {
    SUBCASE("1-D exponential: dk/dtheta = -delta^2 k") {
        const DesignSpace space({Variable::real("x", 0, 1)});
        KernelConfig config;
        config.continuous = ContinuousKernel::SquarExp;
        const std::vector<KernelPoint> pts{
            make_kernel_point(space, space.correct({0.0})),
            make_kernel_point(space, space.correct({1.0})),
        };
        Eigen::VectorXd hp(1);
        hp << 1.0;
        const auto grads = corr_matrix_grad(space, config, pts, HyperparameterSet{hp});
        REQUIRE(grads.size() == 1);
        CHECK(grads[0](0, 1) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
        CHECK(grads[0](0, 0) == 0.0);
    }
    SUBCASE("zero distances give a zero gradient matrix") {
        const DesignSpace space({Variable::real("x", 0, 1)});
        KernelConfig config;
        const std::vector<KernelPoint> pts{
            make_kernel_point(space, space.correct({0.4})),
            make_kernel_point(space, space.correct({0.4})),
        };
        Eigen::VectorXd hp(1);
        hp << 2.0;
        const auto grads = corr_matrix_grad(space, config, pts, HyperparameterSet{hp});
        CHECK(grads[0].cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("matches central finite differences on random instances") {
        const Problem gold = goldstein_problem();
        std::mt19937_64 rng(37);
        for (auto cont : {ContinuousKernel::SquarExp, ContinuousKernel::AbsExp,
                          ContinuousKernel::Matern32, ContinuousKernel::Matern52})
            for (auto cat : {CategoricalKernel::ContRelax, CategoricalKernel::HomoHSphere,
                             CategoricalKernel::ExpHomoHSphere})
                for (auto hier : {HierarchicalKernel::Alg, HierarchicalKernel::Arc}) {
                    KernelConfig config;
                    config.continuous = cont;
                    config.categorical = cat;
                    config.hierarchical = hier;
                    const HyperparameterLayout layout =
                        make_hyperparameter_layout(gold.space, config);
                    SamplerConfig sampler;
                    sampler.n_points = 12;
                    sampler.seed = rng();
                    const SampledDoe doe = sample_valid(gold.space, sampler);
                    std::vector<KernelPoint> pts;
                    for (const auto& p : doe.points)
                        pts.push_back(make_kernel_point(gold.space, p));
                    const Eigen::VectorXd hp = random_hp(layout, rng);
                    const auto grads =
                        corr_matrix_grad(gold.space, config, pts, HyperparameterSet{hp});
                    for (int k = 0; k < layout.total; ++k) {
                        const double h = 1e-6 * std::max(1.0, std::fabs(hp(k)));
                        Eigen::VectorXd hp_p = hp, hp_m = hp;
                        hp_p(k) += h;
                        hp_m(k) -= h;
                        const Eigen::MatrixXd fd =
                            (corr_matrix(gold.space, config, pts, HyperparameterSet{hp_p}) -
                             corr_matrix(gold.space, config, pts, HyperparameterSet{hp_m})) /
                            (2.0 * h);
                        CHECK(max_rel_error(grads[static_cast<size_t>(k)], fd) < 1e-5);
                        CHECK(grads[static_cast<size_t>(k)] ==
                              grads[static_cast<size_t>(k)].transpose().eval());
                    }
                }
    }
}
