#pragma once

// Parameter continuation with initial-condition inheritance: one-parameter
// sweeps, coexisting-attractor discovery, two-parameter charts and
// random-start monostability probes.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bubblepair/chaos.hpp"
#include "bubblepair/integrator.hpp"
#include "bubblepair/model.hpp"

namespace bubblepair {

enum class Axis { Eps, DRatio, Pac };

std::string_view to_string(Axis a);
std::optional<Axis> parse_axis(std::string_view s);
double get(const PhysicalParams& p, Axis a);
PhysicalParams with_value(PhysicalParams p, Axis a, double value);

struct Seed {
    std::string label;
    State state;
};

struct SweepConfig {
    Axis axis = Axis::Eps;
    double lo = 0.95;
    double hi = 1.05;
    double step = 5e-4;
    double start = 1.0;
    std::vector<Seed> seeds;
    AnalysisConfig analysis;
    unsigned threads = 1;
};

void validate(const SweepConfig& sc);

enum class Termination { RangeEnd, Breakdown };
std::string_view to_string(Termination t);

struct BranchPoint {
    double value = 0.0;
    AttractorRecord record;
    std::string event;  // non-empty when a jump was detected on arrival at this point
};

struct Arm {
    int direction = +1;  // +1 increasing, -1 decreasing
    std::vector<BranchPoint> points;
    Termination termination = Termination::RangeEnd;
    std::string reason;
};

struct Branch {
    std::string label;
    BranchPoint start;
    Arm up{+1, {}, Termination::RangeEnd, {}};
    Arm down{-1, {}, Termination::RangeEnd, {}};
};

/// Jump rule: class change and Poincare-set Hausdorff distance above threshold.
bool is_jump(const AttractorRecord& prev, const AttractorRecord& next, double threshold);

/// Grid values of an arm: start +/- k*step while inside [lo, hi] (start excluded).
std::vector<double> arm_values(double start, double step, double lo, double hi, int direction);

/// Continues every seed in both directions from the start value.
std::vector<Branch> sweep(const SweepConfig& sc, const PhysicalParams& base, const IntegratorConfig& cfg);

struct DistinctAttractor {
    AttractorRecord record;
    std::vector<std::size_t> members;  // indices of the inputs merged into this attractor
    bool counterpart = false;          // a separate swap image of this attractor was found
};

/// Merges records describing the same attractor (same class, Hausdorff distance
/// within threshold, possibly after the swap when eps == 1).
std::vector<DistinctAttractor> merge_records(const std::vector<AttractorRecord>& records, double threshold);

std::vector<DistinctAttractor> find_coexisting(const PhysicalParams& point, const std::vector<State>& seeds,
                                               const IntegratorConfig& cfg, const AnalysisConfig& acfg,
                                               unsigned threads = 1);

struct ChartAxis {
    Axis param = Axis::DRatio;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 1;

    double value(std::size_t i) const;
    std::size_t nearest(double v) const;
};

struct ChartConfig {
    ChartAxis x{Axis::DRatio, 6.0, 35.0, 60};
    ChartAxis y{Axis::Pac, 1.2e6, 1.8e6, 60};
    double seed_x = 17.5;
    double seed_y = 1.52e6;
    State seed_state{1.09, -0.47, 0.77, 0.49, 0.0};
    AnalysisConfig analysis;
    unsigned threads = 1;
};

void validate(const ChartConfig& cc);

struct ChartCell {
    std::size_t ix = 0;
    std::size_t iy = 0;
    double x = 0.0;
    double y = 0.0;
    EffectivePair effective;
    Regime regime = Regime::Periodic;
    Synchrony synchrony = Synchrony::NotApplicable;
    bool converged = false;
    bool failed = false;
    std::string diagnostic;
    State inherited;  // state the cell's analysis started from
    State final;
};

struct ChartGrid {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t seed_ix = 0;
    std::size_t seed_iy = 0;
    std::vector<ChartCell> cells;  // row-major: cells[iy * nx + ix]

    const ChartCell& at(std::size_t ix, std::size_t iy) const { return cells[iy * nx + ix]; }
    ChartCell& at(std::size_t ix, std::size_t iy) { return cells[iy * nx + ix]; }
};

ChartCell to_cell(const AttractorRecord& rec, std::size_t ix, std::size_t iy, double x, double y);

/// Seed column first (both ways from the seed cell), then every row left and
/// right from its seed-column cell. Rows run in parallel.
ChartGrid chart(const ChartConfig& cc, const PhysicalParams& base, const IntegratorConfig& cfg);

struct ProbeBox {
    double r_lo = 0.5, r_hi = 1.5;
    double u_lo = -0.5, u_hi = 0.5;
    double theta = 0.0;
};

struct ProbeResult {
    std::vector<State> starts;
    std::vector<DistinctAttractor> attractors;
    std::vector<AttractorRecord> failures;
    std::uint64_t rng_seed = 0;
};

/// Random initial states from `box` (deterministic given rng_seed).
std::vector<State> probe_starts(std::size_t n, std::uint64_t rng_seed, const ProbeBox& box = {});

ProbeResult monostability_probe(const PhysicalParams& point, std::size_t n_random, const IntegratorConfig& cfg,
                                const AnalysisConfig& acfg, std::uint64_t rng_seed, const ProbeBox& box = {},
                                unsigned threads = 1);

}  // namespace bubblepair
