#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mixkrig/design_space.hpp"

namespace mixkrig {

enum class SampleMethod { Random, FullFactorial, Lhs };

/// Placement rule for LHS points. Jittered places each point uniformly
/// within its stratum, Center* at stratum centers. Maximin/Correlation keep
/// the best of a small pool of candidate designs; Ese runs a swap-based
/// annealing pass maximizing the minimum pairwise distance.
enum class LhsCriterion { Jittered, Center, Maximin, CenterMaximin, Correlation, Ese };

struct SamplerConfig {
    SampleMethod method = SampleMethod::Lhs;
    LhsCriterion criterion = LhsCriterion::Maximin;
    std::uint64_t seed = 0;
    int n_points = 1;
};

/// Unit-hypercube design, one row per point.
using DoeMatrix = Eigen::MatrixXd;

/// Draws n_points in [0,1]^n_dims. LHS designs have exactly one point per
/// axis-aligned stratum [k/n,(k+1)/n) in every dimension and are
/// deterministic for a fixed seed.
DoeMatrix sample(const SamplerConfig& config, int n_dims);

/// Grows an existing unit-hypercube LHS by n_add points. The input rows are
/// returned unmodified; each new point occupies, in every dimension, a
/// stratum of width 1/(n+n_add) left empty by the other points.
DoeMatrix expand_lhs(const DoeMatrix& doe, int n_add, std::uint64_t seed);

/// A sampled DoE over a design space: the generating unit-hypercube rows and
/// the corrected+imputed design points.
struct SampledDoe {
    DoeMatrix unit;
    std::vector<DesignPoint> points;
};

/// Samples valid design points: unit-hypercube sample -> denormalize ->
/// correct -> impute. With stratify_by_meta, n_points are split evenly
/// across the levels of the (single) meta variable and the meta coordinate
/// is pinned per group.
SampledDoe sample_valid(const DesignSpace& space, const SamplerConfig& config,
                        bool stratify_by_meta = false,
                        ImputePolicy policy = ImputePolicy::Standard);

/// Minimum pairwise Euclidean distance of a design (rows as points).
double min_pairwise_distance(const DoeMatrix& doe);

}  // namespace mixkrig
