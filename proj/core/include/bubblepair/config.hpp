#pragma once

// Run configuration: JSON parsing with defaults, validation and the resolved
// JSON form written into run manifests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bubblepair/chaos.hpp"
#include "bubblepair/continuation.hpp"
#include "bubblepair/integrator.hpp"
#include "bubblepair/model.hpp"

namespace bubblepair {

struct PoincareBlock {
    State state;
    long skip = 1000;
    long collect = 1000;
};

struct SweepBlock {
    Axis axis = Axis::Eps;
    double from = 0.95;
    double to = 1.05;
    double step = 5e-4;
    double start = 1.0;
    std::vector<Seed> seeds;
};

struct ChartBlock {
    ChartAxis x{Axis::DRatio, 6.0, 35.0, 60};
    ChartAxis y{Axis::Pac, 1.2e6, 1.8e6, 60};
    double seed_x = 17.5;
    double seed_y = 1.52e6;
    State seed_state{1.09, -0.47, 0.77, 0.49, 0.0};
};

struct ProbeBlock {
    std::size_t n_random = 20;
    ProbeBox box;
};

struct RunConfig {
    PhysicalParams physics;
    IntegratorConfig integrator;
    AnalysisConfig analysis;
    State analyze_state;
    PoincareBlock poincare;
    SweepBlock sweep;
    ChartBlock chart;
    ProbeBlock probe;
    std::string out = "out";
    unsigned threads = 1;
    std::uint64_t rng_seed = 1;
};

/// Validates every block; throws InvalidParameters naming the offending key.
void validate(const RunConfig& rc);

/// Parses JSON text. Missing keys take defaults; unknown keys, wrong types
/// and constraint violations throw InvalidParameters. A run manifest is
/// accepted as well (its "config" member is used).
RunConfig parse_config_text(std::string_view json_text);

/// Reads and parses a JSON file. Throws InvalidParameters if it cannot be read.
RunConfig parse_config(const std::filesystem::path& path);

/// Fully resolved configuration as JSON text (parse_config_text inverts it).
std::string to_json_text(const RunConfig& rc, int indent = 2);

/// Seeds from a JSON file: [{"label": .., "state": [r1,u1,r2,u2(,theta)]}, ..]
/// or {"seeds": [...]}.
std::vector<Seed> parse_seeds_file(const std::filesystem::path& path);

/// A state from JSON: [r1,u1,r2,u2(,theta)] or {"state": [...]}.
State parse_state_file(const std::filesystem::path& path);

SweepConfig make_sweep_config(const RunConfig& rc);
ChartConfig make_chart_config(const RunConfig& rc);

}  // namespace bubblepair
