#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixkrig/kriging.hpp"
#include "mixkrig/problems.hpp"
#include "mixkrig/sampling.hpp"

namespace mixkrig {

enum class InfillCriterion { EI, SBO, LCB };

struct EgoConfig {
    int n_iter = 20;
    InfillCriterion criterion = InfillCriterion::EI;
    double lcb_kappa = 1.96;
    std::uint64_t seed = 0;
    int candidate_pool_size = 1000;
    KrigingConfig kriging;
};

struct HistoryEntry {
    DesignPoint point;
    double y = 0.0;
    double best_so_far = 0.0;
};

struct OptimizationHistory {
    std::vector<HistoryEntry> entries;
    int n_initial = 0;
    DesignPoint x_opt;
    double y_opt = 0.0;
};

/// EI(x) = (y_min - mu) Phi(z) + s phi(z) with z = (y_min - mu)/s; reduces to
/// max(y_min - mu, 0) when the predicted deviation vanishes. Always >= 0.
double expected_improvement(const KrigingModel& model, const DesignPoint& x, double y_min);

/// Value to MINIMIZE: -EI, the surrogate mean (SBO), or mu - kappa*s (LCB).
double infill_value(InfillCriterion criterion, const KrigingModel& model, const DesignPoint& x,
                    double y_min, double kappa);

/// Picks the next infill point: evaluates the criterion on a corrected LHS
/// candidate pool, refines the continuous coordinates of the best candidate
/// by coordinate-wise golden-section descent (discrete coordinates frozen),
/// and filters out near-duplicates of the training set. Deterministic for a
/// fixed seed.
DesignPoint propose_next(const DesignSpace& space, const KrigingModel& model,
                         const EgoConfig& config, double y_min, std::uint64_t iteration_seed);

/// Sequential EGO loop: evaluates the initial DoE, then n_iter infill points
/// with the model retrained (warm-started) after each evaluation.
OptimizationHistory optimize(const Problem& problem, const SampledDoe& initial_doe,
                             const EgoConfig& config);

/// Random-search baseline: grows the initial LHS by n_add points via
/// expand_lhs and evaluates everything.
OptimizationHistory random_search(const Problem& problem, const SampledDoe& initial_doe, int n_add,
                                  std::uint64_t seed);

std::string to_string(InfillCriterion c);
InfillCriterion infill_criterion_from_string(const std::string& s);

}  // namespace mixkrig
