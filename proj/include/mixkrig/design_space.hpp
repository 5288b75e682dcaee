#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixkrig {

enum class VarKind { Float, Integer, Ordinal, Categorical };

/// A single typed design variable. Float/Integer are bounded intervals,
/// Ordinal carries an ordered list of numeric levels, Categorical a list of
/// unordered labels. Ordinal and Categorical values are handled as level
/// indices everywhere inside the library; labels/level values appear only at
/// I/O boundaries.
class Variable {
public:
    static Variable real(std::string name, double lower, double upper);
    static Variable integer(std::string name, double lower, double upper);
    static Variable ordinal(std::string name, std::vector<double> levels);
    static Variable categorical(std::string name, std::vector<std::string> levels);

    VarKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    int num_levels() const;
    const std::vector<double>& ordinal_levels() const { return ord_levels_; }
    const std::vector<std::string>& labels() const { return cat_levels_; }

    bool is_discrete() const { return kind_ != VarKind::Float; }
    bool is_categorical() const { return kind_ == VarKind::Categorical; }
    /// Quantitative = handled by a distance-based kernel (Float/Integer/Ordinal).
    bool is_quantitative() const { return kind_ != VarKind::Categorical; }

    /// Snap a raw numeric value into the variable's domain: clip for Float,
    /// clip+floor for Integer, nearest-index (ties toward the lower index)
    /// for Ordinal/Categorical. Throws on NaN.
    double correct_value(double raw) const;

    /// Kernel-side mapping of a corrected value: affine to [0,1] for
    /// Float/Integer, rank/(L-1) for Ordinal, identity (level index) for
    /// Categorical.
    double normalize_value(double corrected) const;

    /// Sampling-side mapping of a unit-hypercube coordinate to a raw value;
    /// discrete domains get equal-width cells so every level is reachable.
    double from_unit(double u) const;

    /// True if v is a valid member of the domain (integral level index for
    /// discrete kinds).
    bool in_domain(double v) const;

private:
    Variable() = default;
    VarKind kind_ = VarKind::Float;
    std::string name_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    std::vector<double> ord_levels_;
    std::vector<std::string> cat_levels_;
};

/// Activation rule: the decreed variable acts iff its meta variable is itself
/// acting and takes one of the activating values (level indices for
/// Ordinal/Categorical metas, plain values for Integer metas).
struct DecreedRule {
    int decreed_index = -1;
    int meta_index = -1;
    std::vector<double> activating_values;
};

/// Replacement values for non-acting coordinates.
///  - Standard: 0 for discrete variables, midpoint for Float.
///  - MeanFloor: midpoint for Float, floor of the bound/index mean for
///    discrete variables (the convention of the imputation-kernel baseline).
enum class ImputePolicy { Standard, MeanFloor };

/// One design vector: raw per-variable values (level indices for
/// Ordinal/Categorical) plus the acting mask.
struct DesignPoint {
    std::vector<double> values;
    std::vector<uint8_t> acting;

    bool is_acting(int i) const { return acting[static_cast<size_t>(i)] != 0; }
};

/// An ordered collection of typed variables plus meta->decreed activation
/// rules. Immutable once the rules are declared; all queries are pure and
/// safe to call concurrently.
class DesignSpace {
public:
    explicit DesignSpace(std::vector<Variable> variables);

    /// Declares that variable `decreed_index` is activated exactly when the
    /// (recursively acting) variable `meta_index` takes one of
    /// `activating_values`. Throws if indices are invalid, a value lies
    /// outside the meta domain, the meta variable is continuous, or the rule
    /// would close a cycle in the activation graph.
    DesignSpace& declare_decreed_var(int decreed_index, int meta_index,
                                     std::vector<double> activating_values);

    int num_variables() const { return static_cast<int>(vars_.size()); }
    const Variable& variable(int i) const { return vars_[static_cast<size_t>(i)]; }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<DecreedRule>& rules() const { return rules_; }

    bool is_meta(int i) const { return meta_[static_cast<size_t>(i)] != 0; }
    bool is_decreed(int i) const { return decreed_[static_cast<size_t>(i)] != 0; }
    bool is_neutral(int i) const { return !is_meta(i) && !is_decreed(i); }
    bool has_hierarchy() const { return !rules_.empty(); }
    std::vector<int> meta_indices() const;
    std::vector<int> decreed_indices() const;

    /// Acting mask for a raw vector, resolved root-first through chained
    /// rules. Neutral and meta variables are always acting.
    std::vector<uint8_t> activity_mask(const std::vector<double>& raw) const;

    /// Correction pipeline: per-variable snap, acting-mask computation, then
    /// imputation of the non-acting coordinates.
    DesignPoint correct(const std::vector<double>& raw,
                        ImputePolicy policy = ImputePolicy::Standard) const;

    /// Rewrites non-acting coordinates of an already-masked point.
    DesignPoint impute(DesignPoint point,
                       ImputePolicy policy = ImputePolicy::Standard) const;

    /// Kernel-side coordinates of a corrected point.
    std::vector<double> normalize(const DesignPoint& point) const;

    /// Raw values for a unit-hypercube row (sampling-side denormalization).
    std::vector<double> from_unit_cube(const std::vector<double>& u) const;

    /// Full validity check used by tests: mask consistency, domain
    /// membership of acting values, integrality of discrete values.
    bool is_valid(const DesignPoint& point) const;

    double impute_value(int i, ImputePolicy policy) const;

private:
    bool creates_cycle(int decreed_index, int meta_index) const;
    bool resolve_acting(int index, const std::vector<double>& raw,
                        std::vector<int8_t>& memo) const;

    std::vector<Variable> vars_;
    std::vector<DecreedRule> rules_;
    std::vector<uint8_t> meta_;
    std::vector<uint8_t> decreed_;
    std::vector<std::vector<int>> rules_for_;  // variable index -> rule ids
};

}  // namespace mixkrig
