#include "mixkrig/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mixkrig::io {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("not a number: '" + s + "'");
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

/// Encodes an internal value for CSV/rule output: labels for categorical,
/// level values for ordinal, numbers otherwise.
std::string encode_value(const Variable& var, double v) {
    switch (var.kind()) {
        case VarKind::Categorical:
            return var.labels()[static_cast<size_t>(v)];
        case VarKind::Ordinal:
            return format_double(var.ordinal_levels()[static_cast<size_t>(v)]);
        default:
            return format_double(v);
    }
}

/// Parses an external representation back to the internal value.
double decode_value(const Variable& var, const std::string& field) {
    const std::string s = trim(field);
    switch (var.kind()) {
        case VarKind::Categorical: {
            const auto& labels = var.labels();
            for (size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == s) return static_cast<double>(i);
            throw SchemaError("unknown level '" + s + "' for variable '" + var.name() + "'");
        }
        case VarKind::Ordinal: {
            const double v = parse_double(s);
            const auto& levels = var.ordinal_levels();
            for (size_t i = 0; i < levels.size(); ++i)
                if (std::fabs(levels[i] - v) < 1e-9) return static_cast<double>(i);
            throw SchemaError("value '" + s + "' is not a level of ordinal variable '" +
                              var.name() + "'");
        }
        default:
            return parse_double(s);
    }
}

double rule_value_from_json(const Variable& meta, const json& v) {
    if (v.is_string()) {
        if (meta.kind() != VarKind::Categorical)
            throw SchemaError("string rule value for non-categorical meta '" + meta.name() + "'");
        return decode_value(meta, v.get<std::string>());
    }
    if (!v.is_number()) throw SchemaError("rule values must be numbers or labels");
    const double x = v.get<double>();
    if (meta.kind() == VarKind::Ordinal) {
        const auto& levels = meta.ordinal_levels();
        for (size_t i = 0; i < levels.size(); ++i)
            if (std::fabs(levels[i] - x) < 1e-9) return static_cast<double>(i);
        throw SchemaError("rule value is not a level of ordinal variable '" + meta.name() + "'");
    }
    return x;
}

json rule_value_to_json(const Variable& meta, double v) {
    switch (meta.kind()) {
        case VarKind::Categorical:
            return meta.labels()[static_cast<size_t>(v)];
        case VarKind::Ordinal:
            return meta.ordinal_levels()[static_cast<size_t>(v)];
        default:
            return v;
    }
}

}  // namespace

json space_to_json(const DesignSpace& space) {
    json vars = json::array();
    for (int i = 0; i < space.num_variables(); ++i) {
        const Variable& v = space.variable(i);
        json entry;
        entry["name"] = v.name();
        switch (v.kind()) {
            case VarKind::Float:
                entry["kind"] = "float";
                entry["lower"] = v.lower();
                entry["upper"] = v.upper();
                break;
            case VarKind::Integer:
                entry["kind"] = "integer";
                entry["lower"] = v.lower();
                entry["upper"] = v.upper();
                break;
            case VarKind::Ordinal:
                entry["kind"] = "ordinal";
                entry["levels"] = v.ordinal_levels();
                break;
            case VarKind::Categorical:
                entry["kind"] = "categorical";
                entry["levels"] = v.labels();
                break;
        }
        vars.push_back(std::move(entry));
    }
    json rules = json::array();
    for (const DecreedRule& r : space.rules()) {
        json entry;
        entry["decreed"] = r.decreed_index;
        entry["meta"] = r.meta_index;
        json values = json::array();
        for (double v : r.activating_values)
            values.push_back(rule_value_to_json(space.variable(r.meta_index), v));
        entry["values"] = std::move(values);
        rules.push_back(std::move(entry));
    }
    return json{{"format_version", kFormatVersion}, {"variables", vars}, {"rules", rules}};
}

DesignSpace space_from_json(const json& doc) {
    try {
        if (!doc.contains("variables") || !doc["variables"].is_array() || doc["variables"].empty())
            throw SchemaError("design space document needs a non-empty 'variables' array");
        std::vector<Variable> vars;
        for (const json& entry : doc["variables"]) {
            const std::string name = entry.at("name").get<std::string>();
            const std::string kind = entry.at("kind").get<std::string>();
            if (kind == "float")
                vars.push_back(Variable::real(name, entry.at("lower").get<double>(),
                                              entry.at("upper").get<double>()));
            else if (kind == "integer")
                vars.push_back(Variable::integer(name, entry.at("lower").get<double>(),
                                                 entry.at("upper").get<double>()));
            else if (kind == "ordinal")
                vars.push_back(Variable::ordinal(name, entry.at("levels").get<std::vector<double>>()));
            else if (kind == "categorical")
                vars.push_back(
                    Variable::categorical(name, entry.at("levels").get<std::vector<std::string>>()));
            else
                throw SchemaError("unknown variable kind '" + kind + "'");
        }
        DesignSpace space(std::move(vars));
        if (doc.contains("rules"))
            for (const json& entry : doc["rules"]) {
                const int decreed = entry.at("decreed").get<int>();
                const int meta = entry.at("meta").get<int>();
                if (meta < 0 || meta >= space.num_variables())
                    throw SchemaError("rule meta index out of range");
                std::vector<double> values;
                for (const json& v : entry.at("values"))
                    values.push_back(rule_value_from_json(space.variable(meta), v));
                space.declare_decreed_var(decreed, meta, std::move(values));
            }
        return space;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed design space document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("invalid design space: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw SchemaError(std::string("invalid design space: ") + e.what());
    }
}

void save_space(const DesignSpace& space, const std::filesystem::path& path) {
    write_json(space_to_json(space), path);
}

DesignSpace load_space(const std::filesystem::path& path) {
    return space_from_json(read_json(path));
}

void write_doe_csv(const DesignSpace& space, const std::vector<DesignPoint>& points,
                   const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (int i = 0; i < space.num_variables(); ++i)
        out << (i > 0 ? "," : "") << space.variable(i).name();
    out << "\n";
    for (const DesignPoint& p : points) {
        for (int i = 0; i < space.num_variables(); ++i)
            out << (i > 0 ? "," : "")
                << encode_value(space.variable(i), p.values[static_cast<size_t>(i)]);
        out << "\n";
    }
}

std::vector<DesignPoint> read_doe_csv(const DesignSpace& space,
                                      const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty DoE file '" + path.string() + "'");
    const std::vector<std::string> header = split_csv_line(line);
    if (static_cast<int>(header.size()) != space.num_variables())
        throw SchemaError("DoE header has " + std::to_string(header.size()) + " columns, expected " +
                          std::to_string(space.num_variables()));
    for (int i = 0; i < space.num_variables(); ++i)
        if (trim(header[static_cast<size_t>(i)]) != space.variable(i).name())
            throw SchemaError("DoE column '" + header[static_cast<size_t>(i)] +
                              "' does not match variable '" + space.variable(i).name() + "'");

    std::vector<DesignPoint> points;
    std::vector<double> raw(static_cast<size_t>(space.num_variables()));
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != space.num_variables())
            throw SchemaError("DoE row with " + std::to_string(fields.size()) + " fields");
        for (int i = 0; i < space.num_variables(); ++i)
            raw[static_cast<size_t>(i)] = decode_value(space.variable(i), fields[static_cast<size_t>(i)]);
        points.push_back(space.correct(raw));
    }
    return points;
}

Eigen::VectorXd read_values_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (first) {
            first = false;
            try {
                values.push_back(parse_double(s));
            } catch (const SchemaError&) {
                // header line, skip
            }
            continue;
        }
        values.push_back(parse_double(s));
    }
    if (values.empty()) throw SchemaError("no values in '" + path.string() + "'");
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_values_csv(const std::vector<std::string>& header,
                      const std::vector<Eigen::VectorXd>& columns,
                      const std::filesystem::path& path) {
    if (header.size() != columns.size())
        throw std::invalid_argument("write_values_csv: header/column mismatch");
    std::ofstream out = open_out(path);
    for (size_t i = 0; i < header.size(); ++i) out << (i > 0 ? "," : "") << header[i];
    out << "\n";
    const Eigen::Index n = columns.empty() ? 0 : columns.front().size();
    for (Eigen::Index r = 0; r < n; ++r) {
        for (size_t c = 0; c < columns.size(); ++c)
            out << (c > 0 ? "," : "") << format_double(columns[c](r));
        out << "\n";
    }
}

json kernel_config_to_json(const KernelConfig& config) {
    return json{{"corr", to_string(config.continuous)},
                {"categorical_kernel", to_string(config.categorical)},
                {"hierarchical_kernel", to_string(config.hierarchical)},
                {"epsilon", config.epsilon}};
}

KernelConfig kernel_config_from_json(const json& doc) {
    KernelConfig config;
    try {
        if (doc.contains("corr")) config.continuous = continuous_kernel_from_string(doc["corr"]);
        if (doc.contains("categorical_kernel"))
            config.categorical = categorical_kernel_from_string(doc["categorical_kernel"]);
        if (doc.contains("hierarchical_kernel"))
            config.hierarchical = hierarchical_kernel_from_string(doc["hierarchical_kernel"]);
        if (doc.contains("epsilon")) config.epsilon = doc["epsilon"].get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed kernel config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return config;
}

json model_to_json(const KrigingModel& model) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["type"] = "kriging_model";
    doc["space"] = space_to_json(model.space());
    doc["kernel"] = kernel_config_to_json(model.config().kernel);
    doc["nugget"] = model.config().nugget;
    doc["n_starts"] = model.config().n_starts;
    doc["budget"] = model.config().budget;
    doc["seed"] = model.config().seed;
    doc["hyperparameters"] = std::vector<double>(
        model.hyperparameters().data(),
        model.hyperparameters().data() + model.hyperparameters().size());
    doc["y_mean"] = model.y_mean();
    doc["y_std"] = model.y_std();
    doc["nugget_used"] = model.nugget_used();
    json xs = json::array();
    for (const DesignPoint& p : model.training_points()) xs.push_back(p.values);
    doc["x"] = std::move(xs);
    doc["y"] = std::vector<double>(model.training_values().data(),
                                   model.training_values().data() + model.training_values().size());
    return doc;
}

KrigingModel model_from_json(const json& doc) {
    try {
        if (doc.value("type", "") != "kriging_model")
            throw SchemaError("not a kriging model document");
        DesignSpace space = space_from_json(doc.at("space"));
        KrigingConfig config;
        config.kernel = kernel_config_from_json(doc.at("kernel"));
        config.nugget = doc.value("nugget", config.nugget);
        config.n_starts = doc.value("n_starts", config.n_starts);
        config.budget = doc.value("budget", config.budget);
        config.seed = doc.value("seed", config.seed);

        std::vector<DesignPoint> points;
        for (const json& row : doc.at("x")) {
            const std::vector<double> values = row.get<std::vector<double>>();
            points.push_back(space.correct(values, impute_policy_for(config.kernel)));
        }
        const std::vector<double> yv = doc.at("y").get<std::vector<double>>();
        const Eigen::VectorXd y =
            Eigen::Map<const Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
        const std::vector<double> hv = doc.at("hyperparameters").get<std::vector<double>>();
        const Eigen::VectorXd hp =
            Eigen::Map<const Eigen::VectorXd>(hv.data(), static_cast<Eigen::Index>(hv.size()));
        return rebuild(space, config, points, y, hp);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed model document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("invalid model document: ") + e.what());
    }
}

void save_model(const KrigingModel& model, const std::filesystem::path& path) {
    write_json(model_to_json(model), path);
}

KrigingModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_json(path));
}

void write_history_csv(const DesignSpace& space, const OptimizationHistory& history,
                       const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "iter";
    for (int i = 0; i < space.num_variables(); ++i) out << "," << space.variable(i).name();
    out << ",y,best\n";
    for (size_t k = 0; k < history.entries.size(); ++k) {
        const HistoryEntry& e = history.entries[k];
        out << k;
        for (int i = 0; i < space.num_variables(); ++i)
            out << "," << encode_value(space.variable(i), e.point.values[static_cast<size_t>(i)]);
        out << "," << format_double(e.y) << "," << format_double(e.best_so_far) << "\n";
    }
}

json history_summary_json(const DesignSpace& space, const OptimizationHistory& history) {
    json x_opt;
    for (int i = 0; i < space.num_variables(); ++i) {
        const Variable& var = space.variable(i);
        const double v = history.x_opt.values[static_cast<size_t>(i)];
        if (var.kind() == VarKind::Categorical)
            x_opt[var.name()] = var.labels()[static_cast<size_t>(v)];
        else if (var.kind() == VarKind::Ordinal)
            x_opt[var.name()] = var.ordinal_levels()[static_cast<size_t>(v)];
        else
            x_opt[var.name()] = v;
    }
    return json{{"x_opt", x_opt},
                {"y_opt", history.y_opt},
                {"n_eval", history.entries.size()},
                {"n_initial", history.n_initial}};
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = static_cast<size_t>(std::ceil(h));
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

void write_convergence_csv(const std::vector<OptimizationHistory>& runs,
                           const std::filesystem::path& path) {
    if (runs.empty()) throw std::invalid_argument("write_convergence_csv: no runs");
    size_t n_iter = runs.front().entries.size();
    for (const auto& r : runs) n_iter = std::min(n_iter, r.entries.size());
    std::ofstream out = open_out(path);
    out << "iter,q1,median,q3\n";
    for (size_t k = 0; k < n_iter; ++k) {
        std::vector<double> best;
        best.reserve(runs.size());
        for (const auto& r : runs) best.push_back(r.entries[k].best_so_far);
        out << k << "," << format_double(quantile(best, 0.25)) << ","
            << format_double(quantile(best, 0.5)) << "," << format_double(quantile(best, 0.75))
            << "\n";
    }
}

json make_manifest(const std::string& command, const std::vector<std::string>& args,
                   std::uint64_t seed, const std::vector<std::string>& outputs,
                   double wall_clock_s) {
    return json{{"format_version", kFormatVersion}, {"command", command},
                {"args", args},                     {"seed", seed},
                {"outputs", outputs},               {"wall_clock_s", wall_clock_s},
                {"version", kLibraryVersion}};
}

void write_json(const json& doc, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << doc.dump(2) << "\n";
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

}  // namespace mixkrig::io
