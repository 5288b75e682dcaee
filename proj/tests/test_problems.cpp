#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mixkrig/kernels.hpp"
#include "mixkrig/problems.hpp"

using namespace mixkrig;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("toy_eval") {
    SUBCASE("reference values") {
        CHECK(toy_eval(0.0, 4) == 0.0);
        CHECK(toy_eval(0.0, 8) == 1.0);
        CHECK(toy_eval(0.5, 2) == doctest::Approx(-0.75).epsilon(1e-12));
    }
    SUBCASE("independent transcription agrees across the grid") {
        // Second transcription of the ten branches, written separately.
        auto oracle = [](double x, int c) {
            switch (c) {
                case 0: return std::cos(3.6 * kPi * (x - 2)) + x - 1;
                case 1: return 2 * std::cos(1.1 * kPi * std::exp(x)) - x / 2 + 2;
                case 2: return std::cos(2 * kPi * x) + x / 2;
                case 3: return x * (std::cos(3.4 * kPi * (x - 1)) - (x - 1) / 2);
                case 4: return -x * x / 2;
                case 5: {
                    double c5 = std::cos(kPi / 4 * std::exp(-x * x * x * x));
                    return 2 * c5 * c5 - x / 2 + 1;
                }
                case 6: return x * std::cos(3.4 * kPi * x) - x / 2 + 1;
                case 7: return -x * (std::cos(3.5 * kPi * x) + x / 2) + 2;
                case 8: return -std::pow(x, 5) / 2 + 1;
                default: {
                    double c9 = std::cos(2.5 * kPi * x);
                    return -c9 * c9 * std::sqrt(x) - 0.5 * std::log(x + 0.5) - 1.3;
                }
            }
        };
        for (int c = 0; c < 10; ++c)
            for (int k = 0; k <= 100; ++k) {
                const double x = k / 100.0;
                CHECK(toy_eval(x, c) == doctest::Approx(oracle(x, c)).epsilon(1e-14));
            }
    }
    SUBCASE("finite on a dense grid") {
        for (int c = 0; c < 10; ++c)
            for (int k = 0; k <= 1000; ++k) CHECK(std::isfinite(toy_eval(k / 1000.0, c)));
    }
    SUBCASE("out-of-domain level errors") {
        CHECK_THROWS_AS(toy_eval(0.5, 10), std::invalid_argument);
        CHECK_THROWS_AS(toy_eval(0.5, -1), std::invalid_argument);
    }
}

TEST_CASE("goldstein_eval") {
    SUBCASE("vanishing terms leave only the constant") {
        CHECK(goldstein_cont(0, 0, 0, 0, 1, 1, 0, 0) == doctest::Approx(53.3108).epsilon(1e-12));
    }
    SUBCASE("w1=3 dispatches straight to the continuous core") {
        CHECK(goldstein_eval(12, 34, 56, 78, 0, 0, 1, 2, 90, 3, 1) ==
              goldstein_cont(12, 34, 56, 78, 1, 2, 90, 1));
    }
    SUBCASE("the w2 toggle at x5=0 shifts by exactly 3") {
        const double off = goldstein_eval(10, 20, 30, 40, 0, 0, 1, 1, 0, 3, 0);
        const double on = goldstein_eval(10, 20, 30, 40, 0, 0, 1, 1, 0, 3, 1);
        CHECK(on - off == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("w1 in {0,1,2} is constant in its excluded coordinates") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> unif(0.0, 100.0);
        std::uniform_int_distribution<int> z(0, 2);
        for (int trial = 0; trial < 50; ++trial) {
            const double x1 = unif(rng), x2 = unif(rng), x5 = unif(rng);
            const int z3 = z(rng), z4 = z(rng);
            // w1=0: x3 and x4 are replaced by the z-lattice
            CHECK(goldstein_eval(x1, x2, unif(rng), unif(rng), 1, 2, z3, z4, x5, 0, 1) ==
                  goldstein_eval(x1, x2, unif(rng), unif(rng), 1, 2, z3, z4, x5, 0, 1));
            // w1=1: constant in x4 and z1
            CHECK(goldstein_eval(x1, x2, 55.0, unif(rng), z(rng), 2, z3, z4, x5, 1, 0) ==
                  goldstein_eval(x1, x2, 55.0, unif(rng), z(rng), 2, z3, z4, x5, 1, 0));
            // w1=2: constant in x3 and z2
            CHECK(goldstein_eval(x1, x2, unif(rng), 44.0, 2, z(rng), z3, z4, x5, 2, 0) ==
                  goldstein_eval(x1, x2, unif(rng), 44.0, 2, z(rng), z3, z4, x5, 2, 0));
        }
    }
    SUBCASE("z lattice dispatch for w1=0") {
        // z1, z2 select x3, x4 from {20, 50, 80}.
        CHECK(goldstein_eval(1, 2, 99, 99, 0, 2, 1, 1, 3, 0, 0) ==
              goldstein_cont(1, 2, 20, 80, 1, 1, 3, 0));
        CHECK(goldstein_eval(1, 2, 99, 99, 2, 1, 1, 1, 3, 0, 0) ==
              goldstein_cont(1, 2, 80, 50, 1, 1, 3, 0));
    }
    SUBCASE("f2 keeps the published argument order in its z1=1 branch") {
        CHECK(goldstein_eval(10, 25, 99, 40, 1, 0, 1, 1, 5, 2, 0) ==
              goldstein_cont(10, 50, 25, 40, 1, 1, 5, 0));
    }
    SUBCASE("out-of-domain discrete values error") {
        CHECK_THROWS_AS(goldstein_eval(0, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0), std::invalid_argument);
        CHECK_THROWS_AS(goldstein_eval(0, 0, 0, 0, 0, 0, 0, 0, 0, 4, 0), std::invalid_argument);
        CHECK_THROWS_AS(goldstein_eval(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2), std::invalid_argument);
    }
}

TEST_CASE("branin_eval") {
    SUBCASE("independent transcription at the origin") {
        const double b = 5.1 / (4.0 * kPi * kPi);
        const double c = 5.0 / kPi;
        const double expect = std::pow(0.0 - b * 0.0 + c * 0.0 - 6.0, 2) +
                              10.0 * (1.0 - 1.0 / (8.0 * kPi)) * std::cos(0.0) + 10.0;
        CHECK(branin_eval(0.0, 0.0) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(branin_eval(0.0, 0.0) > 0.0);
    }
    SUBCASE("continuous minimum value on a dense grid near (pi, 2.275)") {
        // Dense-grid oracle over the x1=3 slice cannot reach 0.397887, but
        // evaluating the standard formula at the continuous minimizer must.
        const double b = 5.1 / (4.0 * kPi * kPi);
        const double c = 5.0 / kPi;
        const double x2_star = b * kPi * kPi - c * kPi + 6.0;
        const double u = x2_star - b * kPi * kPi + c * kPi - 6.0;
        const double value = u * u + 10.0 * (1.0 - 1.0 / (8.0 * kPi)) * std::cos(kPi) + 10.0;
        CHECK(value == doctest::Approx(0.39788735772973816).epsilon(1e-10));
    }
    SUBCASE("integer-constrained optimum near 0.494 (enumeration oracle)") {
        double best = 1e30;
        for (int x1 = -5; x1 <= 10; ++x1)
            for (int k = 0; k <= 15000; ++k)
                best = std::min(best, branin_eval(x1, 15.0 * k / 15000.0));
        CHECK(best == doctest::Approx(0.4939805326401636).epsilon(1e-6));
        CHECK(std::fabs(best - branin_problem().known_optimum.value()) < 1e-6);
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(branin_eval(0.5, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(branin_eval(11.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(branin_eval(0.0, 16.0), std::invalid_argument);
    }
}

TEST_CASE("mlp_problem") {
    const Problem mlp = mlp_problem();
    SUBCASE("space shape: 8 variables, 2 rules") {
        CHECK(mlp.space.num_variables() == 8);
        CHECK(mlp.space.rules().size() == 2);
    }
    SUBCASE("hyperparameter counts for the hierarchical kernels") {
        KernelConfig config;
        config.categorical = CategoricalKernel::HomoHSphere;
        config.hierarchical = HierarchicalKernel::Alg;
        CHECK(count_hyperparameters(mlp.space, config) == 10);
        CHECK(count_hyperparameters_original_arc(mlp.space, config) == 12);
    }
    SUBCASE("evaluator respects the hierarchy") {
        DesignPoint p = mlp.space.correct({1, 5e-3, 0.5, 1, 4, 52, 51, 50});
        const double base = mlp.evaluate(p);
        // Layer 2 and 3 sizes are imputed; evaluating after changing the raw
        // inputs that fed them must give the same value.
        DesignPoint q = mlp.space.correct({1, 5e-3, 0.5, 1, 4, 52, 55, 53});
        CHECK(mlp.evaluate(q) == base);
        // With all three layers acting the extra terms contribute:
        // (51-52.5)^2/25 + (50-52.5)^2/25 = 0.34.
        DesignPoint r3 = mlp.space.correct({3, 5e-3, 0.5, 1, 4, 52, 51, 50});
        CHECK(mlp.evaluate(r3) == doctest::Approx(base + 0.34).epsilon(1e-12));
    }
    SUBCASE("evaluators are deterministic") {
        const Problem gold = goldstein_problem();
        const DesignPoint p = gold.space.correct({10, 20, 30, 40, 0, 1, 2, 0, 50, 3, 1});
        CHECK(gold.evaluate(p) == gold.evaluate(p));
    }
}

TEST_CASE("problem_by_name") {
    CHECK(problem_by_name("toy").name == "toy");
    CHECK(problem_by_name("goldstein-hier").space.num_variables() == 11);
    CHECK(problem_by_name("branin-mixed").known_optimum.has_value());
    CHECK(problem_by_name("mlp").space.rules().size() == 2);
    CHECK_THROWS_AS(problem_by_name("nope"), std::invalid_argument);
}
