#pragma once

// CSV and JSON result files with fixed schemas, plus the run manifest.
//
//   poincare.csv  k,r1,u1,r2,u2
//   sweep.csv     branch,arm,eps,lambda1,lambda2,lambda3,lambda4,lambda5,eff_l1,eff_l2,class,sync,period,event
//   chart.csv     ix,iy,x_value,y_value,eff_l1,eff_l2,class,converged
//
// Floating point values carry 17 significant digits; files are UTF-8 with LF
// line endings and always start with the header row.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bubblepair/chaos.hpp"
#include "bubblepair/config.hpp"
#include "bubblepair/continuation.hpp"

namespace bubblepair {

inline constexpr const char* kPoincareHeader = "k,r1,u1,r2,u2";
inline constexpr const char* kSweepHeader =
    "branch,arm,eps,lambda1,lambda2,lambda3,lambda4,lambda5,eff_l1,eff_l2,class,sync,period,event";
inline constexpr const char* kChartHeader = "ix,iy,x_value,y_value,eff_l1,eff_l2,class,converged";

/// %.17g formatting ("nan" and "inf" for non-finite values).
std::string format_double(double v);

std::string poincare_csv(const PoincareSet& ps);
std::string sweep_csv(const std::vector<Branch>& branches, Axis axis = Axis::Eps);
std::string chart_csv(const ChartGrid& grid);

/// JSON summaries (not part of the fixed CSV schemas).
std::string record_json(const AttractorRecord& rec);
std::string attractors_json(const std::vector<DistinctAttractor>& attractors, const std::vector<AttractorRecord>& failures);

struct Results {
    std::optional<PoincareSet> poincare;
    std::optional<std::vector<Branch>> branches;
    Axis sweep_axis = Axis::Eps;
    std::optional<ChartGrid> grid;
    std::optional<AttractorRecord> record;
    std::optional<std::vector<DistinctAttractor>> attractors;
    std::vector<AttractorRecord> failures;
};

/// Writes every present result into `dir`. Files are written to temporaries
/// and renamed; on any I/O failure all files of this call are removed and
/// the error is rethrown. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const Results& results, const std::filesystem::path& dir);

struct JobStatus {
    std::string name;
    bool ok = true;
    std::string diagnostic;
};

struct RunManifest {
    RunConfig config;
    std::string command;
    std::string tool_version;
    std::string platform;
    std::string started_utc;
    double wall_clock_s = 0.0;
    std::vector<JobStatus> jobs;
};

std::string manifest_json(const RunManifest& m);

/// Atomic write (temporary file plus rename) of manifest.json into `dir`.
std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& dir);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace bubblepair
