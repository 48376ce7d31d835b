#include "bubblepair/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "bubblepair/error.hpp"
#include "json.hpp"

namespace bubblepair {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw InvalidParameters("config key '" + key + "': " + what);
}

// Walks one JSON object, tracking which keys were consumed so that unknown
// keys can be reported.
class Reader {
public:
    Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) fail(prefix_.empty() ? "<root>" : prefix_, "expected an object");
    }

    std::string key(const std::string& k) const { return prefix_.empty() ? k : prefix_ + "." + k; }
    bool has(const std::string& k) const { return obj_.contains(k); }

    void number(const std::string& k, double& out) {
        if (!take(k)) return;
        const json& v = obj_.at(k);
        if (!v.is_number()) fail(key(k), "expected a number");
        out = v.get<double>();
    }

    template <class Int>
    void integer(const std::string& k, Int& out, long long min_value) {
        if (!take(k)) return;
        const json& v = obj_.at(k);
        if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key(k), "expected an integer");
        if (v.is_number_unsigned()) {
            const auto n = v.get<unsigned long long>();
            if (n > static_cast<unsigned long long>(std::numeric_limits<Int>::max())) fail(key(k), "out of range");
            if (min_value > 0 && n < static_cast<unsigned long long>(min_value))
                fail(key(k), "must be >= " + std::to_string(min_value));
            out = static_cast<Int>(n);
            return;
        }
        const long long n = v.get<long long>();
        if (n < min_value) fail(key(k), "must be >= " + std::to_string(min_value));
        out = static_cast<Int>(n);
    }

    void string(const std::string& k, std::string& out) {
        if (!take(k)) return;
        const json& v = obj_.at(k);
        if (!v.is_string()) fail(key(k), "expected a string");
        out = v.get<std::string>();
    }

    const json* object(const std::string& k) {
        if (!take(k)) return nullptr;
        return &obj_.at(k);
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) fail(key(it.key()), "unknown key");
    }

private:
    bool take(const std::string& k) {
        if (!obj_.contains(k)) return false;
        seen_.insert(k);
        return true;
    }

    const json& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

State state_from_json(const json& v, const std::string& key) {
    if (!v.is_array() || (v.size() != 4 && v.size() != 5)) fail(key, "expected [r1, u1, r2, u2] or [r1, u1, r2, u2, theta]");
    std::array<double, 5> a{0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(key, "state entries must be numbers");
        a[i] = v[i].get<double>();
    }
    State s = State::from_array(a);
    if (!(s.r1 > 0 && s.r2 > 0)) fail(key, "radii must be > 0");
    return s;
}

json state_to_json(const State& s) { return json::array({s.r1, s.u1, s.r2, s.u2, s.theta}); }

Axis axis_from(const std::string& name, const std::string& key) {
    const auto a = parse_axis(name);
    if (!a) fail(key, "unknown parameter '" + name + "' (expected eps, d_ratio or pac)");
    return *a;
}

std::vector<Seed> seeds_from_json(const json& v, const std::string& key) {
    const json& arr = v.is_object() && v.contains("seeds") ? v.at("seeds") : v;
    if (!arr.is_array()) fail(key, "expected an array of seeds");
    std::vector<Seed> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string k = key + "[" + std::to_string(i) + "]";
        Reader r(arr[i], k);
        Seed s;
        s.label = "seed" + std::to_string(i);
        r.string("label", s.label);
        const json* st = r.object("state");
        if (!st) fail(k + ".state", "missing");
        s.state = state_from_json(*st, k + ".state");
        r.finish();
        out.push_back(s);
    }
    return out;
}

void read_physics(const json& j, PhysicalParams& p) {
    Reader r(j, "physics");
    r.number("p_stat", p.p_stat);
    r.number("p_v", p.p_v);
    r.number("sigma", p.sigma);
    r.number("rho", p.rho);
    r.number("eta_l", p.eta_l);
    r.number("c", p.c);
    r.number("gamma", p.gamma);
    r.number("chi", p.chi);
    r.number("kappa_s", p.kappa_s);
    r.number("r10", p.r10);
    r.number("eps", p.eps);
    r.number("p_ac", p.p_ac);
    r.number("omega", p.omega);
    if (r.has("d") && r.has("d_ratio")) fail("physics.d", "give either d or d_ratio, not both");
    double ratio = p.d_ratio();
    r.number("d_ratio", ratio);
    p.set_d_ratio(ratio);
    r.number("d", p.d);
    r.finish();
}

void read_integrator(const json& j, IntegratorConfig& c) {
    Reader r(j, "integrator");
    r.number("rtol", c.rtol);
    r.number("atol", c.atol);
    r.number("h0", c.h0);
    r.number("h_max", c.h_max);
    r.number("safety", c.safety);
    r.finish();
}

void read_analysis(const json& j, AnalysisConfig& a) {
    Reader r(j, "analysis");
    r.number("lambda_tr", a.lambda_tr);
    r.number("delta_sync", a.delta_sync);
    r.integer("transient_periods", a.run.transient_periods, 0);
    r.integer("measure_periods", a.run.measure_periods, 1);
    r.integer("renorm_periods", a.run.renorm_periods, 1);
    r.number("conv_tol", a.run.conv_tol);
    r.integer("poincare_collect", a.poincare_collect, 1);
    r.number("period_tol", a.period_tol);
    r.number("jump_threshold", a.jump_threshold);
    r.integer("max_extensions", a.max_extensions, 0);
    r.finish();
}

void read_chart_axis(const json& j, ChartAxis& a, const std::string& prefix) {
    Reader r(j, prefix);
    std::string name(to_string(a.param));
    r.string("param", name);
    a.param = axis_from(name, r.key("param"));
    r.number("lo", a.lo);
    r.number("hi", a.hi);
    r.integer("n", a.n, 1);
    r.finish();
}

RunConfig from_json(const json& root) {
    const json& j = root.is_object() && root.contains("manifest_version") ? root.at("config") : root;
    RunConfig rc;
    Reader r(j, "");
    if (const json* v = r.object("physics")) read_physics(*v, rc.physics);
    if (const json* v = r.object("integrator")) read_integrator(*v, rc.integrator);
    if (const json* v = r.object("analysis")) read_analysis(*v, rc.analysis);
    if (const json* v = r.object("analyze")) {
        Reader a(*v, "analyze");
        if (const json* s = a.object("state")) rc.analyze_state = state_from_json(*s, "analyze.state");
        a.finish();
    }
    if (const json* v = r.object("poincare")) {
        Reader a(*v, "poincare");
        if (const json* s = a.object("state")) rc.poincare.state = state_from_json(*s, "poincare.state");
        a.integer("skip", rc.poincare.skip, 0);
        a.integer("collect", rc.poincare.collect, 1);
        a.finish();
    }
    if (const json* v = r.object("sweep")) {
        Reader a(*v, "sweep");
        std::string axis(to_string(rc.sweep.axis));
        a.string("axis", axis);
        rc.sweep.axis = axis_from(axis, "sweep.axis");
        a.number("from", rc.sweep.from);
        a.number("to", rc.sweep.to);
        a.number("step", rc.sweep.step);
        a.number("start", rc.sweep.start);
        if (const json* s = a.object("seeds")) rc.sweep.seeds = seeds_from_json(*s, "sweep.seeds");
        a.finish();
    }
    if (const json* v = r.object("chart")) {
        Reader a(*v, "chart");
        if (const json* x = a.object("x")) read_chart_axis(*x, rc.chart.x, "chart.x");
        if (const json* y = a.object("y")) read_chart_axis(*y, rc.chart.y, "chart.y");
        if (const json* s = a.object("seed")) {
            Reader sr(*s, "chart.seed");
            sr.number("x", rc.chart.seed_x);
            sr.number("y", rc.chart.seed_y);
            if (const json* st = sr.object("state")) rc.chart.seed_state = state_from_json(*st, "chart.seed.state");
            sr.finish();
        }
        a.finish();
    }
    if (const json* v = r.object("probe")) {
        Reader a(*v, "probe");
        a.integer("n_random", rc.probe.n_random, 1);
        if (const json* b = a.object("box")) {
            Reader br(*b, "probe.box");
            br.number("r_lo", rc.probe.box.r_lo);
            br.number("r_hi", rc.probe.box.r_hi);
            br.number("u_lo", rc.probe.box.u_lo);
            br.number("u_hi", rc.probe.box.u_hi);
            br.number("theta", rc.probe.box.theta);
            br.finish();
        }
        a.finish();
    }
    r.string("out", rc.out);
    r.integer("threads", rc.threads, 1);
    r.integer("rng_seed", rc.rng_seed, 0);
    r.finish();
    validate(rc);
    return rc;
}

json chart_axis_json(const ChartAxis& a) {
    return {{"param", std::string(to_string(a.param))}, {"lo", a.lo}, {"hi", a.hi}, {"n", a.n}};
}

json to_json(const RunConfig& rc) {
    const PhysicalParams& p = rc.physics;
    json j;
    j["physics"] = {{"p_stat", p.p_stat}, {"p_v", p.p_v},         {"sigma", p.sigma}, {"rho", p.rho},
                    {"eta_l", p.eta_l},   {"c", p.c},             {"gamma", p.gamma}, {"chi", p.chi},
                    {"kappa_s", p.kappa_s}, {"r10", p.r10},       {"eps", p.eps},     {"d", p.d},
                    {"p_ac", p.p_ac},     {"omega", p.omega}};
    const IntegratorConfig& c = rc.integrator;
    j["integrator"] = {{"rtol", c.rtol}, {"atol", c.atol}, {"h0", c.h0}, {"h_max", c.h_max}, {"safety", c.safety}};
    const AnalysisConfig& a = rc.analysis;
    j["analysis"] = {{"lambda_tr", a.lambda_tr},
                     {"delta_sync", a.delta_sync},
                     {"transient_periods", a.run.transient_periods},
                     {"measure_periods", a.run.measure_periods},
                     {"renorm_periods", a.run.renorm_periods},
                     {"conv_tol", a.run.conv_tol},
                     {"poincare_collect", a.poincare_collect},
                     {"period_tol", a.period_tol},
                     {"jump_threshold", a.jump_threshold},
                     {"max_extensions", a.max_extensions}};
    j["analyze"] = {{"state", state_to_json(rc.analyze_state)}};
    j["poincare"] = {{"state", state_to_json(rc.poincare.state)},
                     {"skip", rc.poincare.skip},
                     {"collect", rc.poincare.collect}};
    json seeds = json::array();
    for (const Seed& s : rc.sweep.seeds) seeds.push_back({{"label", s.label}, {"state", state_to_json(s.state)}});
    j["sweep"] = {{"axis", std::string(to_string(rc.sweep.axis))},
                  {"from", rc.sweep.from},
                  {"to", rc.sweep.to},
                  {"step", rc.sweep.step},
                  {"start", rc.sweep.start},
                  {"seeds", seeds}};
    j["chart"] = {{"x", chart_axis_json(rc.chart.x)},
                  {"y", chart_axis_json(rc.chart.y)},
                  {"seed",
                   {{"x", rc.chart.seed_x}, {"y", rc.chart.seed_y}, {"state", state_to_json(rc.chart.seed_state)}}}};
    const ProbeBox& b = rc.probe.box;
    j["probe"] = {{"n_random", rc.probe.n_random},
                  {"box", {{"r_lo", b.r_lo}, {"r_hi", b.r_hi}, {"u_lo", b.u_lo}, {"u_hi", b.u_hi}, {"theta", b.theta}}}};
    j["out"] = rc.out;
    j["threads"] = rc.threads;
    j["rng_seed"] = rc.rng_seed;
    return j;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameters("cannot read file '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidParameters("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

void prefixed(const std::string& block, const auto& fn) {
    try {
        fn();
    } catch (const InvalidParameters& e) {
        throw InvalidParameters("config block '" + block + "': " + e.what());
    }
}

}  // namespace

void validate(const RunConfig& rc) {
    prefixed("physics", [&] {
        validate(rc.physics);
        derive_scales(rc.physics);
    });
    prefixed("integrator", [&] { validate(rc.integrator); });
    prefixed("analysis", [&] { validate(rc.analysis); });
    prefixed("sweep", [&] {
        const SweepBlock& s = rc.sweep;
        if (!(s.from <= s.to)) fail("sweep.from", "must not exceed sweep.to");
        if (!(s.step > 0)) fail("sweep.step", "must be > 0");
        if (s.start < s.from || s.start > s.to) fail("sweep.start", "must lie in [from, to]");
    });
    prefixed("chart", [&] {
        ChartConfig cc = make_chart_config(rc);
        validate(cc);
    });
    prefixed("probe", [&] {
        const ProbeBox& b = rc.probe.box;
        if (!(b.r_lo > 0)) fail("probe.box.r_lo", "must be > 0");
        if (!(b.r_lo <= b.r_hi)) fail("probe.box.r_hi", "must be >= r_lo");
        if (!(b.u_lo <= b.u_hi)) fail("probe.box.u_hi", "must be >= u_lo");
    });
    if (rc.threads == 0) fail("threads", "must be >= 1");
    if (rc.out.empty()) fail("out", "must not be empty");
}

RunConfig parse_config_text(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidParameters(std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
}

RunConfig parse_config(const std::filesystem::path& path) { return from_json(load_json(path)); }

std::string to_json_text(const RunConfig& rc, int indent) { return to_json(rc).dump(indent); }

std::vector<Seed> parse_seeds_file(const std::filesystem::path& path) {
    return seeds_from_json(load_json(path), "seeds");
}

State parse_state_file(const std::filesystem::path& path) {
    const json j = load_json(path);
    if (j.is_object() && j.contains("state")) return state_from_json(j.at("state"), "state");
    return state_from_json(j, "state");
}

SweepConfig make_sweep_config(const RunConfig& rc) {
    SweepConfig sc;
    sc.axis = rc.sweep.axis;
    sc.lo = rc.sweep.from;
    sc.hi = rc.sweep.to;
    sc.step = rc.sweep.step;
    sc.start = rc.sweep.start;
    sc.seeds = rc.sweep.seeds;
    sc.analysis = rc.analysis;
    sc.threads = rc.threads;
    return sc;
}

ChartConfig make_chart_config(const RunConfig& rc) {
    ChartConfig cc;
    cc.x = rc.chart.x;
    cc.y = rc.chart.y;
    cc.seed_x = rc.chart.seed_x;
    cc.seed_y = rc.chart.seed_y;
    cc.seed_state = rc.chart.seed_state;
    cc.analysis = rc.analysis;
    cc.threads = rc.threads;
    return cc;
}

}  // namespace bubblepair
