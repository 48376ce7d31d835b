// bubblepair: command-line front end for the coupled-bubble analysis library.
//
//   bubblepair analyze   --pac 1.2e6 --d-ratio 21 --eps 1.0 --state 1,0,1,0
//   bubblepair poincare  --pac 1.2e6 --d-ratio 13 --state 1,0,1,0 --skip 1000 --collect 1000
//   bubblepair sweep-eps --from 0.95 --to 1.05 --step 5e-4 --seeds seeds.json
//   bubblepair chart     --x d_ratio:6:35:120 --y pac:1.2e6:1.8e6:120 --seed 17.5,1.52e6,state.json
//   bubblepair probe     --pac 1.35e6 --d-ratio 28 --n-random 20 --rng-seed 7
//
// Exit codes: 0 success, 2 invalid input, 3 numerical breakdown.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bubblepair/chaos.hpp"
#include "bubblepair/config.hpp"
#include "bubblepair/continuation.hpp"
#include "bubblepair/error.hpp"
#include "bubblepair/outputs.hpp"
#include "bubblepair/version.hpp"

namespace bp = bubblepair;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitBreakdown = 3;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_number(const std::string& s, const std::string& flag) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw bp::InvalidParameters("flag " + flag + ": '" + s + "' is not a number");
    }
}

bp::State parse_state_list(const std::string& s, const std::string& flag) {
    const auto parts = split(s, ',');
    if (parts.size() != 4 && parts.size() != 5)
        throw bp::InvalidParameters("flag " + flag + ": expected r1,u1,r2,u2[,theta]");
    std::array<double, 5> a{0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < parts.size(); ++i) a[i] = to_number(parts[i], flag);
    bp::State st = bp::State::from_array(a);
    if (!(st.r1 > 0 && st.r2 > 0)) throw bp::InvalidParameters("flag " + flag + ": radii must be > 0");
    return st;
}

bp::ChartAxis parse_axis_spec(const std::string& s, const std::string& flag) {
    const auto parts = split(s, ':');
    if (parts.size() != 4) throw bp::InvalidParameters("flag " + flag + ": expected param:lo:hi:n");
    const auto param = bp::parse_axis(parts[0]);
    if (!param) throw bp::InvalidParameters("flag " + flag + ": unknown parameter '" + parts[0] + "'");
    const double n = to_number(parts[3], flag);
    if (n < 1 || n != static_cast<double>(static_cast<long>(n)))
        throw bp::InvalidParameters("flag " + flag + ": resolution must be a positive integer");
    return {*param, to_number(parts[1], flag), to_number(parts[2], flag), static_cast<std::size_t>(n)};
}

// Flags that override config keys. Unset optionals leave the config untouched.
struct Overrides {
    std::optional<double> pac, d_ratio, eps, omega, p_stat;
    std::optional<double> rtol, atol;
    std::optional<long> transient, measure;
    std::optional<double> conv_tol, lambda_tr, delta_sync, jump_threshold;
    std::optional<long> collect_samples;
    std::optional<int> max_extensions;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> rng_seed;

    std::optional<std::string> state;
    std::optional<long> skip, collect;
    std::optional<double> from, to, step, start;
    std::optional<std::string> seeds;
    std::optional<std::string> x_axis, y_axis, seed;
    std::optional<std::size_t> n_random;

    void apply(bp::RunConfig& rc, const std::string& command) const {
        if (pac) rc.physics.p_ac = *pac;
        if (d_ratio) rc.physics.set_d_ratio(*d_ratio);
        if (eps) rc.physics.eps = *eps;
        if (omega) rc.physics.omega = *omega;
        if (p_stat) rc.physics.p_stat = *p_stat;
        if (rtol) rc.integrator.rtol = *rtol;
        if (atol) rc.integrator.atol = *atol;
        if (transient) rc.analysis.run.transient_periods = *transient;
        if (measure) rc.analysis.run.measure_periods = *measure;
        if (conv_tol) rc.analysis.run.conv_tol = *conv_tol;
        if (lambda_tr) rc.analysis.lambda_tr = *lambda_tr;
        if (delta_sync) rc.analysis.delta_sync = *delta_sync;
        if (jump_threshold) rc.analysis.jump_threshold = *jump_threshold;
        if (collect_samples) rc.analysis.poincare_collect = *collect_samples;
        if (max_extensions) rc.analysis.max_extensions = *max_extensions;
        if (out) rc.out = *out;
        if (threads) rc.threads = *threads;
        if (rng_seed) rc.rng_seed = *rng_seed;

        if (state) {
            const bp::State st = parse_state_list(*state, "--state");
            if (command == "poincare")
                rc.poincare.state = st;
            else
                rc.analyze_state = st;
        }
        if (skip) rc.poincare.skip = *skip;
        if (collect) rc.poincare.collect = *collect;
        if (from) rc.sweep.from = *from;
        if (to) rc.sweep.to = *to;
        if (step) rc.sweep.step = *step;
        if (start) rc.sweep.start = *start;
        if (seeds) rc.sweep.seeds = bp::parse_seeds_file(*seeds);
        if (x_axis) rc.chart.x = parse_axis_spec(*x_axis, "--x");
        if (y_axis) rc.chart.y = parse_axis_spec(*y_axis, "--y");
        if (seed) {
            // x,y,state.json  or  x,y,r1,u1,r2,u2[,theta]
            const auto parts = split(*seed, ',');
            if (parts.size() != 3 && parts.size() != 6 && parts.size() != 7)
                throw bp::InvalidParameters("flag --seed: expected x,y,state.json or x,y,r1,u1,r2,u2[,theta]");
            rc.chart.seed_x = to_number(parts[0], "--seed");
            rc.chart.seed_y = to_number(parts[1], "--seed");
            if (parts.size() == 3) {
                rc.chart.seed_state = bp::parse_state_file(parts[2]);
            } else {
                std::string rest;
                for (std::size_t i = 2; i < parts.size(); ++i) rest += (i > 2 ? "," : "") + parts[i];
                rc.chart.seed_state = parse_state_list(rest, "--seed");
            }
        }
        if (n_random) rc.probe.n_random = *n_random;
    }
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string platform_note() {
    std::ostringstream os;
#if defined(__linux__)
    os << "linux";
#elif defined(__APPLE__)
    os << "macos";
#elif defined(_WIN32)
    os << "windows";
#else
    os << "unknown-os";
#endif
#if defined(__clang__)
    os << " clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
    os << " gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#endif
    os << " hw_threads=" << std::thread::hardware_concurrency();
    return os.str();
}

std::string describe(const bp::AttractorRecord& r) {
    std::ostringstream os;
    if (r.failed) return "failed: " + r.diagnostic;
    os << bp::to_string(r.cls.regime) << " " << bp::to_string(r.cls.synchrony) << " l1=" << r.spectrum.effective.l1
       << " l2=" << r.spectrum.effective.l2 << " converged=" << (r.spectrum.converged ? "yes" : "no");
    if (r.period) os << " period=" << *r.period;
    return os.str();
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--pac", o.pac, "Drive amplitude P_ac (Pa)");
    cmd->add_option("--d-ratio", o.d_ratio, "Bubble distance d / R10");
    cmd->add_option("--eps", o.eps, "Radii ratio R20 / R10");
    cmd->add_option("--omega", o.omega, "Drive angular frequency (rad/s)");
    cmd->add_option("--p-stat", o.p_stat, "Static pressure (Pa)");
    cmd->add_option("--rtol", o.rtol, "Integrator relative tolerance");
    cmd->add_option("--atol", o.atol, "Integrator absolute tolerance");
    cmd->add_option("--transient", o.transient, "Transient drive periods");
    cmd->add_option("--measure", o.measure, "Measurement drive periods");
    cmd->add_option("--conv-tol", o.conv_tol, "Spectrum convergence tolerance");
    cmd->add_option("--lambda-tr", o.lambda_tr, "Classification threshold");
    cmd->add_option("--delta-sync", o.delta_sync, "Synchrony tolerance");
    cmd->add_option("--jump-threshold", o.jump_threshold, "Hausdorff jump / merge threshold");
    cmd->add_option("--samples", o.collect_samples, "Poincare samples kept per analysis");
    cmd->add_option("--max-extensions", o.max_extensions, "Extensions of unconverged measurements");
    cmd->add_option("--rng-seed", o.rng_seed, "Random seed");
}

struct Outcome {
    bp::Results results;
    std::vector<bp::JobStatus> jobs;
    bool breakdown = false;
};

Outcome run_command(const std::string& command, const bp::RunConfig& rc) {
    Outcome o;
    if (command == "analyze") {
        const bp::Model model(rc.physics);
        bp::AttractorRecord rec = bp::analyze(rc.analyze_state, model, rc.integrator, rc.analysis);
        std::cout << describe(rec) << "\n";
        o.jobs.push_back({"analyze", !rec.failed, rec.diagnostic});
        o.breakdown = rec.failed;
        o.results.poincare = rec.poincare;
        o.results.record = std::move(rec);
    } else if (command == "poincare") {
        const bp::Model model(rc.physics);
        bp::PoincareSet ps = bp::poincare(rc.poincare.state, model, rc.integrator, rc.poincare.skip, rc.poincare.collect);
        const auto period = bp::detect_period(ps, rc.analysis.period_tol);
        std::cout << "samples=" << ps.count() << " period=" << (period ? std::to_string(*period) : "none")
                  << " sync=" << bp::to_string(bp::is_synchronous(ps, rc.physics.eps, rc.analysis.delta_sync)) << "\n";
        o.jobs.push_back({"poincare", true, {}});
        o.results.poincare = std::move(ps);
    } else if (command == "sweep-eps") {
        bp::SweepConfig sc = bp::make_sweep_config(rc);
        if (sc.seeds.empty()) throw bp::InvalidParameters("sweep-eps: no seeds given (use --seeds or sweep.seeds)");
        auto branches = bp::sweep(sc, rc.physics, rc.integrator);
        for (const auto& b : branches) {
            for (const bp::Arm* arm : {&b.up, &b.down})
                o.jobs.push_back({b.label + (arm->direction > 0 ? "/up" : "/down"),
                                  arm->termination == bp::Termination::RangeEnd, arm->reason});
            std::cout << b.label << " start: " << describe(b.start.record) << "\n";
        }
        o.results.sweep_axis = sc.axis;
        o.results.branches = std::move(branches);
    } else if (command == "chart") {
        bp::ChartGrid grid = bp::chart(bp::make_chart_config(rc), rc.physics, rc.integrator);
        std::size_t failed = 0;
        for (const auto& c : grid.cells) failed += c.failed ? 1 : 0;
        std::cout << "cells=" << grid.cells.size() << " failed=" << failed << "\n";
        o.jobs.push_back({"chart", failed == 0, failed ? std::to_string(failed) + " cells failed" : ""});
        o.results.grid = std::move(grid);
    } else if (command == "probe") {
        bp::ProbeResult pr = bp::monostability_probe(rc.physics, rc.probe.n_random, rc.integrator, rc.analysis,
                                                     rc.rng_seed, rc.probe.box, rc.threads);
        std::cout << "distinct=" << pr.attractors.size() << " failed_probes=" << pr.failures.size() << "\n";
        for (const auto& a : pr.attractors)
            std::cout << "  " << describe(a.record) << " members=" << a.members.size()
                      << (a.counterpart ? " (+swap counterpart)" : "") << "\n";
        o.jobs.push_back({"probe", true, std::to_string(pr.failures.size()) + " probes failed"});
        o.results.attractors = std::move(pr.attractors);
        o.results.failures = std::move(pr.failures);
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled microbubble oscillator analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<std::string> config_path;
    Overrides ov;
    app.add_option("--config", config_path, "JSON run configuration or manifest")->check(CLI::ExistingFile);
    app.add_option("--out", ov.out, "Output directory");
    app.add_option("--threads", ov.threads, "Worker threads")->check(CLI::PositiveNumber);

    CLI::App* analyze = app.add_subcommand("analyze", "Analyze the attractor reached from one state");
    add_common(analyze, ov);
    analyze->add_option("--state", ov.state, "Initial state r1,u1,r2,u2[,theta]");

    CLI::App* poinc = app.add_subcommand("poincare", "Stroboscopic Poincare samples");
    add_common(poinc, ov);
    poinc->add_option("--state", ov.state, "Initial state r1,u1,r2,u2[,theta]");
    poinc->add_option("--skip", ov.skip, "Periods skipped before sampling");
    poinc->add_option("--collect", ov.collect, "Number of samples");

    CLI::App* sweep = app.add_subcommand("sweep-eps", "Continue seeded attractors in eps");
    add_common(sweep, ov);
    sweep->add_option("--from", ov.from, "Lower eps bound");
    sweep->add_option("--to", ov.to, "Upper eps bound");
    sweep->add_option("--step", ov.step, "Continuation step");
    sweep->add_option("--start", ov.start, "Start value (seeds live here)");
    sweep->add_option("--seeds", ov.seeds, "Seeds JSON file")->check(CLI::ExistingFile);

    CLI::App* chart = app.add_subcommand("chart", "Two-parameter Lyapunov chart");
    add_common(chart, ov);
    chart->add_option("--x", ov.x_axis, "x axis param:lo:hi:n");
    chart->add_option("--y", ov.y_axis, "y axis param:lo:hi:n");
    chart->add_option("--seed", ov.seed, "Seed x,y,state.json or x,y,r1,u1,r2,u2");

    CLI::App* probe = app.add_subcommand("probe", "Random-start monostability probe");
    add_common(probe, ov);
    probe->add_option("--n-random", ov.n_random, "Number of random starts")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    bp::RunConfig rc;
    try {
        if (config_path) rc = bp::parse_config(*config_path);
        ov.apply(rc, command);
        bp::validate(rc);
    } catch (const bp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    const auto t0 = std::chrono::steady_clock::now();
    bp::RunManifest manifest;
    manifest.config = rc;
    manifest.command = command;
    manifest.tool_version = bp::kVersion;
    manifest.platform = platform_note();
    manifest.started_utc = utc_now();

    int code = kExitOk;
    try {
        Outcome o = run_command(command, rc);
        manifest.jobs = std::move(o.jobs);
        const auto files = bp::write_outputs(o.results, rc.out);
        for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
        if (o.breakdown) code = kExitBreakdown;
    } catch (const bp::InvalidParameters& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const bp::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const bp::Error& e) {
        std::cerr << "numerical breakdown: " << e.what() << "\n";
        manifest.jobs.push_back({command, false, e.what()});
        code = kExitBreakdown;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBreakdown;
    }

    manifest.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        std::cout << "wrote " << bp::write_manifest(manifest, rc.out).string() << "\n";
    } catch (const bp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBreakdown;
    }
    return code;
}
