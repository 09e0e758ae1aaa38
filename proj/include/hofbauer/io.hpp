#pragma once

#include "hofbauer/shift.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hofbauer {

/// Malformed scenario or map configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModeRequest { exact, floating };

/// A parameter beta: exact (number field) or a plain double.
struct BetaSpec {
    FieldPtr field;
    std::optional<double> value;
};

/// Accepts "golden", "plastic", an integer polynomial such as "x^3-x-1"
/// (largest real root in (1, 2)), or a decimal such as "1.8".
BetaSpec parse_beta(const std::string& text);
/// Accepts the string forms above or {"minpoly": [...], "interval": [a, b]}.
BetaSpec parse_beta(const nlohmann::json& j);

/// Exact scalar from "p/q", an integer, a decimal, or a polynomial in b (needs a field).
Scalar parse_scalar(const nlohmann::json& j, const NumericMode& mode);

struct PipelineOptions {
    std::size_t max_depth = 64;
    std::size_t max_levels = 100000;
    std::size_t n_cesaro = 10000;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    std::size_t samples = 10000;
    std::size_t return_cap = 40;
    std::size_t depth_cap = 10;
    std::vector<std::size_t> mass_ns{100, 1000, 10000};
};

struct Scenario {
    nlohmann::json map_config;
    PipelineOptions options;
    std::filesystem::path out_dir = "out";
    /// Canonical JSON of everything that affects outputs.
    nlohmann::json canonical() const;
};

/// Builds the map described by {"preset": ...} or {"custom": ...}.
PartitionMap build_map(const nlohmann::json& config);
Scenario parse_scenario(const nlohmann::json& j);

std::string sha256_hex(const std::string& data);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::json scalar_json(const Scalar& s);
nlohmann::json cell_json(const Cell& c);

nlohmann::json tower_json(const TowerGraph& graph);
std::string adjacency_text(const TowerGraph& graph);
std::string measures_csv(const TowerGraph& graph, const LevelMeasure& m);
std::string transitions_csv(const LevelMeasure& m);
std::string returns_csv(const std::vector<ReturnPartition>& partitions);
nlohmann::json mixing_json(const MixingReport& rep);
std::string liftability_csv(const MassProfile& profile);
std::string trajectory_csv(const Orbit& orbit);

/// One panel per rug, strips colored by source level, exact geometry in data attributes.
std::string rugs_svg(const RugSet& rugs, const std::string& title);

} // namespace hofbauer
