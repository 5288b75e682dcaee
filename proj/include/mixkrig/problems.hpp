#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mixkrig/design_space.hpp"

namespace mixkrig {

/// A built-in benchmark: a design space plus a pure, deterministic evaluator
/// over valid design points. known_optimum carries (x*, y*) together with a
/// note on how the value was established.
struct Problem {
    std::string name;
    DesignSpace space;
    std::function<double(const DesignPoint&)> evaluate;
    std::optional<double> known_optimum;
    std::string optimum_note;
};

/// Piecewise 1-D test function over x in [0,1] with a 10-level categorical
/// selector. Throws on an out-of-range level.
double toy_eval(double x, int c1);

/// Continuous Goldstein core over (x1..x4, z3, z4, x5, w2).
double goldstein_cont(double x1, double x2, double x3, double x4, int z3, int z4, double x5,
                      int w2);

/// Hierarchical mixed Goldstein function; w1 selects which of x3, x4, z1, z2
/// take part. Throws on out-of-domain discrete values.
double goldstein_eval(double x1, double x2, double x3, double x4, int z1, int z2, int z3, int z4,
                      double x5, int w1, int w2);

/// Branin with the first variable restricted to integers in [-5, 10].
double branin_eval(double x1, double x2);

Problem toy_problem();
Problem goldstein_problem();
Problem branin_problem();
Problem mlp_problem();

/// Lookup by CLI name: "toy", "goldstein-hier", "branin-mixed", "mlp".
Problem problem_by_name(const std::string& name);

}  // namespace mixkrig
