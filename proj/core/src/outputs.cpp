#include "bubblepair/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "bubblepair/error.hpp"
#include "json.hpp"

namespace bubblepair {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// CSV fields are never quoted, so separators inside free text are replaced.
std::string field(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

std::string class_name(const AttractorRecord& rec) {
    return rec.failed ? "failed" : std::string(to_string(rec.cls.regime));
}

void sweep_row(std::ostringstream& out, const std::string& label, const char* arm, const BranchPoint& bp) {
    const AttractorRecord& r = bp.record;
    const LyapunovSpectrum& s = r.spectrum;
    const bool have = !r.failed;
    out << field(label) << ',' << arm << ',' << format_double(bp.value);
    for (double l : s.exponents) out << ',' << format_double(have ? l : NAN);
    out << ',' << format_double(have ? s.effective.l1 : NAN) << ',' << format_double(have ? s.effective.l2 : NAN);
    out << ',' << class_name(r) << ',' << (have ? to_string(r.cls.synchrony) : "n/a") << ',';
    if (have && r.period) out << *r.period;
    out << ',';
    if (r.failed)
        out << "breakdown";
    else
        out << field(bp.event);
    out << '\n';
}

json state_json(const State& s) { return json::array({s.r1, s.u1, s.r2, s.u2, s.theta}); }

json record_to_json(const AttractorRecord& rec) {
    json j;
    j["point"] = {{"p_ac", rec.point.p_ac}, {"d_ratio", rec.point.d_ratio}, {"eps", rec.point.eps}};
    j["initial_state"] = state_json(rec.initial);
    j["final_state"] = state_json(rec.final);
    j["failed"] = rec.failed;
    j["diagnostic"] = rec.diagnostic;
    const LyapunovSpectrum& s = rec.spectrum;
    j["spectrum"] = {{"exponents", s.exponents},
                     {"referent_index", s.referent_index},
                     {"effective", {s.effective.l1, s.effective.l2}},
                     {"converged", s.converged},
                     {"max_change", s.max_change},
                     {"trace_average", s.trace_average},
                     {"transient_periods", s.transient_periods},
                     {"measure_periods", s.measure_periods}};
    j["class"] = rec.failed ? "failed" : std::string(to_string(rec.cls.regime));
    j["sync"] = std::string(to_string(rec.cls.synchrony));
    j["period"] = rec.period ? json(*rec.period) : json(nullptr);
    j["poincare_count"] = rec.poincare.count();
    return j;
}

}  // namespace

std::string poincare_csv(const PoincareSet& ps) {
    std::ostringstream out;
    out << kPoincareHeader << '\n';
    for (std::size_t k = 0; k < ps.samples.size(); ++k) {
        const auto& p = ps.samples[k];
        out << k << ',' << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(p[2]) << ','
            << format_double(p[3]) << '\n';
    }
    return out.str();
}

std::string sweep_csv(const std::vector<Branch>& branches, Axis axis) {
    std::ostringstream out;
    std::string header = kSweepHeader;
    if (axis != Axis::Eps) header.replace(header.find(",eps,"), 5, "," + std::string(to_string(axis)) + ",");
    out << header << '\n';
    for (const Branch& b : branches) {
        sweep_row(out, b.label, "start", b.start);
        for (const BranchPoint& bp : b.up.points) sweep_row(out, b.label, "up", bp);
        for (const BranchPoint& bp : b.down.points) sweep_row(out, b.label, "down", bp);
    }
    return out.str();
}

std::string chart_csv(const ChartGrid& grid) {
    std::ostringstream out;
    out << kChartHeader << '\n';
    for (const ChartCell& c : grid.cells) {
        out << c.ix << ',' << c.iy << ',' << format_double(c.x) << ',' << format_double(c.y) << ','
            << format_double(c.failed ? NAN : c.effective.l1) << ',' << format_double(c.failed ? NAN : c.effective.l2)
            << ',' << (c.failed ? "failed" : to_string(c.regime)) << ',' << (c.converged ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string record_json(const AttractorRecord& rec) { return record_to_json(rec).dump(2) + "\n"; }

std::string attractors_json(const std::vector<DistinctAttractor>& attractors,
                            const std::vector<AttractorRecord>& failures) {
    json j;
    j["attractors"] = json::array();
    for (const DistinctAttractor& d : attractors) {
        json a = record_to_json(d.record);
        a["members"] = d.members;
        a["counterpart"] = d.counterpart;
        j["attractors"].push_back(a);
    }
    j["failures"] = json::array();
    for (const AttractorRecord& f : failures) j["failures"].push_back(record_to_json(f));
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot rename into '" + path.string() + "'");
    }
}

std::vector<std::filesystem::path> write_outputs(const Results& results, const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::string>> files;
    if (results.poincare) files.emplace_back("poincare.csv", poincare_csv(*results.poincare));
    if (results.branches) files.emplace_back("sweep.csv", sweep_csv(*results.branches, results.sweep_axis));
    if (results.grid) files.emplace_back("chart.csv", chart_csv(*results.grid));
    if (results.record) files.emplace_back("record.json", record_json(*results.record));
    if (results.attractors) files.emplace_back("attractors.json", attractors_json(*results.attractors, results.failures));

    std::vector<std::filesystem::path> written;
    try {
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : files) {
            const auto path = dir / name;
            write_file_atomic(path, content);
            written.push_back(path);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
        throw;
    }
    return written;
}

std::string manifest_json(const RunManifest& m) {
    json j;
    j["manifest_version"] = 1;
    j["tool"] = "bubblepair";
    j["tool_version"] = m.tool_version;
    j["platform"] = m.platform;
    j["command"] = m.command;
    j["started_utc"] = m.started_utc;
    j["wall_clock_s"] = m.wall_clock_s;
    j["config"] = json::parse(to_json_text(m.config));
    j["jobs"] = json::array();
    for (const JobStatus& s : m.jobs)
        j["jobs"].push_back({{"name", s.name}, {"status", s.ok ? "ok" : "failed"}, {"diagnostic", s.diagnostic}});
    return j.dump(2) + "\n";
}

std::filesystem::path write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "manifest.json";
    write_file_atomic(path, manifest_json(m));
    return path;
}

}  // namespace bubblepair
