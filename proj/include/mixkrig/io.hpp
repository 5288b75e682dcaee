#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixkrig/design_space.hpp"
#include "mixkrig/ego.hpp"
#include "mixkrig/kriging.hpp"

namespace mixkrig::io {

/// File-system failures (missing/unwritable files).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed documents: bad JSON, wrong headers, level mismatches.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

// --- design-space JSON ------------------------------------------------------
nlohmann::json space_to_json(const DesignSpace& space);
DesignSpace space_from_json(const nlohmann::json& doc);
void save_space(const DesignSpace& space, const std::filesystem::path& path);
DesignSpace load_space(const std::filesystem::path& path);

// --- DoE CSV (header of variable names; categorical levels as labels,
// ordinal levels as their values) --------------------------------------------
void write_doe_csv(const DesignSpace& space, const std::vector<DesignPoint>& points,
                   const std::filesystem::path& path);
std::vector<DesignPoint> read_doe_csv(const DesignSpace& space, const std::filesystem::path& path);

// --- plain numeric column(s) -------------------------------------------------
Eigen::VectorXd read_values_csv(const std::filesystem::path& path);
void write_values_csv(const std::vector<std::string>& header,
                      const std::vector<Eigen::VectorXd>& columns,
                      const std::filesystem::path& path);

// --- trained-model JSON ------------------------------------------------------
nlohmann::json model_to_json(const KrigingModel& model);
KrigingModel model_from_json(const nlohmann::json& doc);
void save_model(const KrigingModel& model, const std::filesystem::path& path);
KrigingModel load_model(const std::filesystem::path& path);

KernelConfig kernel_config_from_json(const nlohmann::json& doc);
nlohmann::json kernel_config_to_json(const KernelConfig& config);

// --- optimization histories ---------------------------------------------------
void write_history_csv(const DesignSpace& space, const OptimizationHistory& history,
                       const std::filesystem::path& path);
nlohmann::json history_summary_json(const DesignSpace& space, const OptimizationHistory& history);

/// Convergence statistics across runs: per evaluation index, the first
/// quartile, median and third quartile of best-so-far (columns
/// iter,q1,median,q3).
void write_convergence_csv(const std::vector<OptimizationHistory>& runs,
                           const std::filesystem::path& path);

/// Type-7 linear-interpolation quantile of a sample, p in [0,1].
double quantile(std::vector<double> values, double p);

// --- run manifests -------------------------------------------------------------
nlohmann::json make_manifest(const std::string& command, const std::vector<std::string>& args,
                             std::uint64_t seed, const std::vector<std::string>& outputs,
                             double wall_clock_s);
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace mixkrig::io
