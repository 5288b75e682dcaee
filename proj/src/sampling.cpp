#include "mixkrig/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mixkrig {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt));
}

DoeMatrix lhs_design(int n, int d, std::mt19937_64& rng, bool centered) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    DoeMatrix out(n, d);
    std::vector<int> perm(static_cast<size_t>(n));
    for (int j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < n; ++i) {
            const double offset = centered ? 0.5 : unif(rng);
            out(i, j) = (static_cast<double>(perm[static_cast<size_t>(i)]) + offset) / static_cast<double>(n);
        }
    }
    return out;
}

double max_abs_offdiag_corr(const DoeMatrix& x) {
    const int d = static_cast<int>(x.cols());
    if (d < 2) return 0.0;
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered;
    Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    double worst = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            const double denom = sd(a) * sd(b);
            if (denom > 0.0) worst = std::max(worst, std::fabs(cov(a, b) / denom));
        }
    return worst;
}

// Keep the best of a small pool of candidate designs under `score`
// (higher is better).
template <typename ScoreFn>
DoeMatrix best_of_pool(int n, int d, std::mt19937_64& rng, bool centered, ScoreFn score) {
    constexpr int kPool = 20;
    DoeMatrix best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < kPool; ++c) {
        DoeMatrix cand = lhs_design(n, d, rng, centered);
        const double s = score(cand);
        if (s > best_score) {
            best_score = s;
            best = std::move(cand);
        }
    }
    return best;
}

// Swap-based annealing pass maximizing the minimum pairwise distance.
// Fixed schedule: T0 = 0.5 * initial maximin, geometric cooling 0.95,
// 30 proposed swaps per outer iteration, 50 outer iterations.
DoeMatrix ese_optimize(DoeMatrix x, std::mt19937_64& rng) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (n < 3 || d < 1) return x;
    std::uniform_int_distribution<int> pick_dim(0, d - 1);
    std::uniform_int_distribution<int> pick_row(0, n - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double current = min_pairwise_distance(x);
    double temperature = 0.5 * current;
    DoeMatrix best = x;
    double best_score = current;

    for (int outer = 0; outer < 50; ++outer) {
        for (int inner = 0; inner < 30; ++inner) {
            const int j = pick_dim(rng);
            int r1 = pick_row(rng);
            int r2 = pick_row(rng);
            if (r1 == r2) continue;
            std::swap(x(r1, j), x(r2, j));
            const double trial = min_pairwise_distance(x);
            const double delta = trial - current;
            if (delta >= 0.0 || (temperature > 0.0 && unif(rng) < std::exp(delta / temperature))) {
                current = trial;
                if (current > best_score) {
                    best_score = current;
                    best = x;
                }
            } else {
                std::swap(x(r1, j), x(r2, j));  // revert
            }
        }
        temperature *= 0.95;
    }
    return best;
}

// Balanced factorization of n into d grid sizes (ascending), assigning the
// largest prime factors to the dimensions with the smallest running product.
std::vector<int> factorial_grid_sizes(int n, int d) {
    std::vector<int> factors;
    int m = n;
    for (int p = 2; p * p <= m; ++p)
        while (m % p == 0) {
            factors.push_back(p);
            m /= p;
        }
    if (m > 1) factors.push_back(m);
    std::sort(factors.rbegin(), factors.rend());
    std::vector<int> sizes(static_cast<size_t>(d), 1);
    for (int f : factors) {
        auto it = std::min_element(sizes.begin(), sizes.end());
        *it *= f;
    }
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

DoeMatrix full_factorial(int n, int d) {
    const std::vector<int> sizes = factorial_grid_sizes(n, d);
    DoeMatrix out(n, d);
    for (int i = 0; i < n; ++i) {
        int rest = i;
        for (int j = 0; j < d; ++j) {
            const int k = sizes[static_cast<size_t>(j)];
            const int idx = rest % k;
            rest /= k;
            out(i, j) = k == 1 ? 0.5 : static_cast<double>(idx) / static_cast<double>(k - 1);
        }
    }
    return out;
}

int fine_stratum(double x, int m) {
    return std::min(m - 1, static_cast<int>(std::floor(x * static_cast<double>(m))));
}

}  // namespace

double min_pairwise_distance(const DoeMatrix& doe) {
    const int n = static_cast<int>(doe.rows());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) best = std::min(best, (doe.row(i) - doe.row(j)).norm());
    return best;
}

DoeMatrix sample(const SamplerConfig& config, int n_dims) {
    if (config.n_points < 1) throw std::invalid_argument("sample: n_points must be >= 1");
    if (n_dims < 1) throw std::invalid_argument("sample: n_dims must be >= 1");
    std::mt19937_64 rng(mix_seed(config.seed, 0x5A4D01ULL));
    const int n = config.n_points;

    switch (config.method) {
        case SampleMethod::Random: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            DoeMatrix out(n, n_dims);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n_dims; ++j) out(i, j) = unif(rng);
            return out;
        }
        case SampleMethod::FullFactorial:
            return full_factorial(n, n_dims);
        case SampleMethod::Lhs:
            break;
    }

    switch (config.criterion) {
        case LhsCriterion::Jittered:
            return lhs_design(n, n_dims, rng, false);
        case LhsCriterion::Center:
            return lhs_design(n, n_dims, rng, true);
        case LhsCriterion::Maximin:
            return best_of_pool(n, n_dims, rng, false,
                                [](const DoeMatrix& x) { return min_pairwise_distance(x); });
        case LhsCriterion::CenterMaximin:
            return best_of_pool(n, n_dims, rng, true,
                                [](const DoeMatrix& x) { return min_pairwise_distance(x); });
        case LhsCriterion::Correlation:
            return best_of_pool(n, n_dims, rng, false,
                                [](const DoeMatrix& x) { return -max_abs_offdiag_corr(x); });
        case LhsCriterion::Ese:
            return ese_optimize(lhs_design(n, n_dims, rng, false), rng);
    }
    throw std::logic_error("unreachable");
}

DoeMatrix expand_lhs(const DoeMatrix& doe, int n_add, std::uint64_t seed) {
    if (n_add < 1) throw std::invalid_argument("expand_lhs: n_add must be >= 1");
    const int n = static_cast<int>(doe.rows());
    const int d = static_cast<int>(doe.cols());
    if (n < 1 || d < 1) throw std::invalid_argument("expand_lhs: input design is empty");
    if ((doe.array() < 0.0).any() || (doe.array() > 1.0).any())
        throw std::invalid_argument("expand_lhs: input design must lie in the unit hypercube");
    const int m = n + n_add;

    std::mt19937_64 rng(mix_seed(seed, 0xEC5A4DULL));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    DoeMatrix out(m, d);
    out.topRows(n) = doe;
    for (int j = 0; j < d; ++j) {
        std::vector<uint8_t> occupied(static_cast<size_t>(m), 0);
        for (int i = 0; i < n; ++i) occupied[static_cast<size_t>(fine_stratum(doe(i, j), m))] = 1;
        std::vector<int> empty;
        for (int k = 0; k < m; ++k)
            if (!occupied[static_cast<size_t>(k)]) empty.push_back(k);
        std::shuffle(empty.begin(), empty.end(), rng);
        for (int i = 0; i < n_add; ++i) {
            const int k = empty[static_cast<size_t>(i)];
            out(n + i, j) = (static_cast<double>(k) + unif(rng)) / static_cast<double>(m);
        }
    }
    return out;
}

SampledDoe sample_valid(const DesignSpace& space, const SamplerConfig& config,
                        bool stratify_by_meta, ImputePolicy policy) {
    const int d = space.num_variables();
    SampledDoe result;

    if (!stratify_by_meta) {
        result.unit = sample(config, d);
    } else {
        const std::vector<int> metas = space.meta_indices();
        if (metas.size() != 1)
            throw std::invalid_argument("sample_valid: meta-stratified sampling needs exactly one meta variable");
        const int mi = metas.front();
        const Variable& meta = space.variable(mi);
        const int levels = meta.num_levels();
        if (config.n_points < levels)
            throw std::invalid_argument("sample_valid: need at least one point per meta level");

        result.unit.resize(config.n_points, d);
        int row = 0;
        for (int lev = 0; lev < levels; ++lev) {
            int count = config.n_points / levels;
            if (lev < config.n_points % levels) ++count;
            SamplerConfig sub = config;
            sub.n_points = count;
            sub.seed = mix_seed(config.seed, 0x57A7ULL + static_cast<std::uint64_t>(lev));
            DoeMatrix block = sample(sub, d);
            // Pin the meta coordinate at the center of this level's cell.
            const double u = (static_cast<double>(lev) + 0.5) / static_cast<double>(levels);
            block.col(mi).setConstant(u);
            result.unit.middleRows(row, count) = block;
            row += count;
        }
    }

    result.points.reserve(static_cast<size_t>(result.unit.rows()));
    std::vector<double> u(static_cast<size_t>(d));
    for (int i = 0; i < result.unit.rows(); ++i) {
        for (int j = 0; j < d; ++j) u[static_cast<size_t>(j)] = result.unit(i, j);
        result.points.push_back(space.correct(space.from_unit_cube(u), policy));
    }
    return result;
}

}  // namespace mixkrig
