#include "mixkrig/design_space.hpp"

#include <algorithm>
#include <cmath>

namespace mixkrig {

namespace {
constexpr double kValueTol = 1e-9;

bool value_matches(double a, double b) { return std::fabs(a - b) < kValueTol; }
}  // namespace

Variable Variable::real(std::string name, double lower, double upper) {
    if (!(lower < upper)) throw std::invalid_argument("Float variable '" + name + "': lower must be < upper");
    Variable v;
    v.kind_ = VarKind::Float;
    v.name_ = std::move(name);
    v.lower_ = lower;
    v.upper_ = upper;
    return v;
}

Variable Variable::integer(std::string name, double lower, double upper) {
    if (std::floor(lower) != lower || std::floor(upper) != upper)
        throw std::invalid_argument("Integer variable '" + name + "': bounds must be integers");
    if (!(lower < upper)) throw std::invalid_argument("Integer variable '" + name + "': lower must be < upper");
    Variable v;
    v.kind_ = VarKind::Integer;
    v.name_ = std::move(name);
    v.lower_ = lower;
    v.upper_ = upper;
    return v;
}

Variable Variable::ordinal(std::string name, std::vector<double> levels) {
    if (levels.size() < 2) throw std::invalid_argument("Ordinal variable '" + name + "': needs at least 2 levels");
    for (size_t i = 0; i + 1 < levels.size(); ++i)
        if (!(levels[i] < levels[i + 1]))
            throw std::invalid_argument("Ordinal variable '" + name + "': levels must be strictly increasing");
    Variable v;
    v.kind_ = VarKind::Ordinal;
    v.name_ = std::move(name);
    v.ord_levels_ = std::move(levels);
    return v;
}

Variable Variable::categorical(std::string name, std::vector<std::string> levels) {
    if (levels.size() < 2)
        throw std::invalid_argument("Categorical variable '" + name + "': needs at least 2 levels");
    for (size_t i = 0; i < levels.size(); ++i)
        for (size_t j = i + 1; j < levels.size(); ++j)
            if (levels[i] == levels[j])
                throw std::invalid_argument("Categorical variable '" + name + "': duplicate level '" + levels[i] + "'");
    Variable v;
    v.kind_ = VarKind::Categorical;
    v.name_ = std::move(name);
    v.cat_levels_ = std::move(levels);
    return v;
}

int Variable::num_levels() const {
    switch (kind_) {
        case VarKind::Ordinal: return static_cast<int>(ord_levels_.size());
        case VarKind::Categorical: return static_cast<int>(cat_levels_.size());
        case VarKind::Integer: return static_cast<int>(upper_ - lower_) + 1;
        default: throw std::logic_error("num_levels on a Float variable");
    }
}

double Variable::correct_value(double raw) const {
    if (std::isnan(raw)) throw std::invalid_argument("non-numeric value for variable '" + name_ + "'");
    switch (kind_) {
        case VarKind::Float:
            return std::clamp(raw, lower_, upper_);
        case VarKind::Integer:
            return std::floor(std::clamp(raw, lower_, upper_));
        case VarKind::Ordinal:
        case VarKind::Categorical: {
            const double hi = static_cast<double>(num_levels() - 1);
            // Nearest index with ties resolved toward the lower index.
            return std::ceil(std::clamp(raw, 0.0, hi) - 0.5);
        }
    }
    throw std::logic_error("unreachable");
}

double Variable::normalize_value(double corrected) const {
    switch (kind_) {
        case VarKind::Float:
        case VarKind::Integer:
            return (corrected - lower_) / (upper_ - lower_);
        case VarKind::Ordinal:
            return corrected / static_cast<double>(num_levels() - 1);
        case VarKind::Categorical:
            return corrected;
    }
    throw std::logic_error("unreachable");
}

double Variable::from_unit(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    switch (kind_) {
        case VarKind::Float:
            return lower_ + u * (upper_ - lower_);
        case VarKind::Integer: {
            const double n = upper_ - lower_ + 1.0;
            return std::min(upper_, lower_ + std::floor(u * n));
        }
        case VarKind::Ordinal:
        case VarKind::Categorical: {
            const double n = static_cast<double>(num_levels());
            return std::min(n - 1.0, std::floor(u * n));
        }
    }
    throw std::logic_error("unreachable");
}

bool Variable::in_domain(double v) const {
    if (std::isnan(v)) return false;
    switch (kind_) {
        case VarKind::Float:
            return v >= lower_ && v <= upper_;
        case VarKind::Integer:
            return v >= lower_ && v <= upper_ && std::floor(v) == v;
        case VarKind::Ordinal:
        case VarKind::Categorical:
            return std::floor(v) == v && v >= 0.0 && v <= static_cast<double>(num_levels() - 1);
    }
    return false;
}

DesignSpace::DesignSpace(std::vector<Variable> variables) : vars_(std::move(variables)) {
    if (vars_.empty()) throw std::invalid_argument("design space needs at least one variable");
    meta_.assign(vars_.size(), 0);
    decreed_.assign(vars_.size(), 0);
    rules_for_.assign(vars_.size(), {});
}

DesignSpace& DesignSpace::declare_decreed_var(int decreed_index, int meta_index,
                                              std::vector<double> activating_values) {
    const int n = num_variables();
    if (decreed_index < 0 || decreed_index >= n || meta_index < 0 || meta_index >= n)
        throw std::out_of_range("declare_decreed_var: variable index out of range");
    if (decreed_index == meta_index)
        throw std::invalid_argument("declare_decreed_var: a variable cannot decree itself");
    const Variable& meta = vars_[static_cast<size_t>(meta_index)];
    if (meta.kind() == VarKind::Float)
        throw std::invalid_argument("declare_decreed_var: meta variable '" + meta.name() + "' must be discrete");
    if (activating_values.empty())
        throw std::invalid_argument("declare_decreed_var: activating value set is empty");
    for (double v : activating_values) {
        const bool ok = meta.kind() == VarKind::Integer
                            ? meta.in_domain(v)
                            : (std::floor(v) == v && v >= 0.0 && v < meta.num_levels());
        if (!ok)
            throw std::invalid_argument("declare_decreed_var: activating value outside the domain of '" +
                                        meta.name() + "'");
    }
    if (creates_cycle(decreed_index, meta_index))
        throw std::invalid_argument("declare_decreed_var: rule would create an activation cycle");

    rules_.push_back(DecreedRule{decreed_index, meta_index, std::move(activating_values)});
    rules_for_[static_cast<size_t>(decreed_index)].push_back(static_cast<int>(rules_.size()) - 1);
    decreed_[static_cast<size_t>(decreed_index)] = 1;
    meta_[static_cast<size_t>(meta_index)] = 1;
    return *this;
}

bool DesignSpace::creates_cycle(int decreed_index, int meta_index) const {
    // The new edge is meta -> decreed; a cycle appears iff meta is already
    // reachable from decreed through existing edges.
    std::vector<uint8_t> seen(vars_.size(), 0);
    std::vector<int> stack{decreed_index};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (v == meta_index) return true;
        if (seen[static_cast<size_t>(v)]) continue;
        seen[static_cast<size_t>(v)] = 1;
        for (const DecreedRule& r : rules_)
            if (r.meta_index == v) stack.push_back(r.decreed_index);
    }
    return false;
}

std::vector<int> DesignSpace::meta_indices() const {
    std::vector<int> out;
    for (int i = 0; i < num_variables(); ++i)
        if (is_meta(i)) out.push_back(i);
    return out;
}

std::vector<int> DesignSpace::decreed_indices() const {
    std::vector<int> out;
    for (int i = 0; i < num_variables(); ++i)
        if (is_decreed(i)) out.push_back(i);
    return out;
}

bool DesignSpace::resolve_acting(int index, const std::vector<double>& raw,
                                 std::vector<int8_t>& memo) const {
    int8_t& state = memo[static_cast<size_t>(index)];
    if (state >= 0) return state != 0;
    if (!is_decreed(index)) {
        state = 1;
        return true;
    }
    bool acting = true;
    for (int rid : rules_for_[static_cast<size_t>(index)]) {
        const DecreedRule& rule = rules_[static_cast<size_t>(rid)];
        if (!resolve_acting(rule.meta_index, raw, memo)) {
            acting = false;
            break;
        }
        const double mv = raw[static_cast<size_t>(rule.meta_index)];
        const bool in_set = std::any_of(rule.activating_values.begin(), rule.activating_values.end(),
                                        [mv](double a) { return value_matches(a, mv); });
        if (!in_set) {
            acting = false;
            break;
        }
    }
    state = acting ? 1 : 0;
    return acting;
}

std::vector<uint8_t> DesignSpace::activity_mask(const std::vector<double>& raw) const {
    if (raw.size() != vars_.size())
        throw std::invalid_argument("activity_mask: value count does not match the variable count");
    std::vector<int8_t> memo(vars_.size(), -1);
    std::vector<uint8_t> mask(vars_.size(), 0);
    for (int i = 0; i < num_variables(); ++i)
        mask[static_cast<size_t>(i)] = resolve_acting(i, raw, memo) ? 1 : 0;
    return mask;
}

double DesignSpace::impute_value(int i, ImputePolicy policy) const {
    const Variable& v = vars_[static_cast<size_t>(i)];
    switch (v.kind()) {
        case VarKind::Float:
            return 0.5 * (v.lower() + v.upper());
        case VarKind::Integer:
            return policy == ImputePolicy::Standard ? 0.0
                                                    : std::floor(0.5 * (v.lower() + v.upper()));
        case VarKind::Ordinal:
        case VarKind::Categorical:
            return policy == ImputePolicy::Standard
                       ? 0.0
                       : std::floor(0.5 * static_cast<double>(v.num_levels() - 1));
    }
    throw std::logic_error("unreachable");
}

DesignPoint DesignSpace::correct(const std::vector<double>& raw, ImputePolicy policy) const {
    if (raw.size() != vars_.size())
        throw std::invalid_argument("correct: value count does not match the variable count");
    DesignPoint pt;
    pt.values.resize(raw.size());
    for (int i = 0; i < num_variables(); ++i)
        pt.values[static_cast<size_t>(i)] = vars_[static_cast<size_t>(i)].correct_value(raw[static_cast<size_t>(i)]);
    pt.acting = activity_mask(pt.values);
    return impute(std::move(pt), policy);
}

DesignPoint DesignSpace::impute(DesignPoint point, ImputePolicy policy) const {
    if (point.values.size() != vars_.size() || point.acting.size() != vars_.size())
        throw std::invalid_argument("impute: point does not match the space");
    for (int i = 0; i < num_variables(); ++i)
        if (!point.is_acting(i)) point.values[static_cast<size_t>(i)] = impute_value(i, policy);
    return point;
}

std::vector<double> DesignSpace::normalize(const DesignPoint& point) const {
    std::vector<double> out(vars_.size());
    for (int i = 0; i < num_variables(); ++i)
        out[static_cast<size_t>(i)] =
            vars_[static_cast<size_t>(i)].normalize_value(point.values[static_cast<size_t>(i)]);
    return out;
}

std::vector<double> DesignSpace::from_unit_cube(const std::vector<double>& u) const {
    if (u.size() != vars_.size())
        throw std::invalid_argument("from_unit_cube: coordinate count does not match the variable count");
    std::vector<double> out(u.size());
    for (int i = 0; i < num_variables(); ++i)
        out[static_cast<size_t>(i)] = vars_[static_cast<size_t>(i)].from_unit(u[static_cast<size_t>(i)]);
    return out;
}

bool DesignSpace::is_valid(const DesignPoint& point) const {
    if (point.values.size() != vars_.size() || point.acting.size() != vars_.size()) return false;
    const std::vector<uint8_t> mask = activity_mask(point.values);
    for (int i = 0; i < num_variables(); ++i) {
        if (mask[static_cast<size_t>(i)] != point.acting[static_cast<size_t>(i)]) return false;
        if (point.is_acting(i) && !vars_[static_cast<size_t>(i)].in_domain(point.values[static_cast<size_t>(i)]))
            return false;
    }
    return true;
}

}  // namespace mixkrig
