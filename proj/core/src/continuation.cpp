#include "bubblepair/continuation.hpp"

#include <cmath>
#include <random>

#include "bubblepair/error.hpp"
#include "bubblepair/parallel.hpp"

namespace bubblepair {

std::string_view to_string(Axis a) {
    switch (a) {
        case Axis::Eps: return "eps";
        case Axis::DRatio: return "d_ratio";
        case Axis::Pac: return "pac";
    }
    return "unknown";
}

std::optional<Axis> parse_axis(std::string_view s) {
    if (s == "eps") return Axis::Eps;
    if (s == "d_ratio" || s == "d-ratio") return Axis::DRatio;
    if (s == "pac" || s == "p_ac") return Axis::Pac;
    return std::nullopt;
}

double get(const PhysicalParams& p, Axis a) {
    switch (a) {
        case Axis::Eps: return p.eps;
        case Axis::DRatio: return p.d_ratio();
        case Axis::Pac: return p.p_ac;
    }
    return 0.0;
}

PhysicalParams with_value(PhysicalParams p, Axis a, double value) {
    switch (a) {
        case Axis::Eps: p.eps = value; break;
        case Axis::DRatio: p.set_d_ratio(value); break;
        case Axis::Pac: p.p_ac = value; break;
    }
    return p;
}

std::string_view to_string(Termination t) { return t == Termination::RangeEnd ? "range_end" : "breakdown"; }

void validate(const SweepConfig& sc) {
    if (!(sc.lo <= sc.hi)) throw InvalidParameters("invalid sweep config: 'from' must not exceed 'to'");
    if (!(sc.step > 0)) throw InvalidParameters("invalid sweep config: step must be > 0");
    if (sc.start < sc.lo || sc.start > sc.hi) throw InvalidParameters("invalid sweep config: start outside [from, to]");
    if (sc.seeds.empty()) throw InvalidParameters("invalid sweep config: at least one seed is required");
    validate(sc.analysis);
}

bool is_jump(const AttractorRecord& prev, const AttractorRecord& next, double threshold) {
    if (prev.failed || next.failed) return false;
    if (prev.cls == next.cls) return false;
    return hausdorff_distance(prev.poincare.samples, next.poincare.samples) > threshold;
}

std::vector<double> arm_values(double start, double step, double lo, double hi, int direction) {
    std::vector<double> out;
    const double slack = 1e-9 * step;
    for (long k = 1;; ++k) {
        const double v = start + direction * static_cast<double>(k) * step;
        if (v > hi + slack || v < lo - slack) break;
        out.push_back(v);
    }
    return out;
}

namespace {

void continue_arm(Arm& arm, const BranchPoint& start, const std::vector<double>& values, Axis axis,
                  const PhysicalParams& base, const IntegratorConfig& cfg, const AnalysisConfig& acfg) {
    const AttractorRecord* prev = &start.record;
    State carry = start.record.failed ? start.record.initial : start.record.final;
    for (double v : values) {
        const Model model(with_value(base, axis, v));
        BranchPoint bp;
        bp.value = v;
        bp.record = analyze(carry, model, cfg, acfg);
        if (bp.record.failed) {
            arm.termination = Termination::Breakdown;
            arm.reason = bp.record.diagnostic;
            arm.points.push_back(std::move(bp));
            return;
        }
        if (is_jump(*prev, bp.record, acfg.jump_threshold))
            bp.event = std::string("jump:") + std::string(to_string(prev->cls.regime)) + "->" +
                       std::string(to_string(bp.record.cls.regime));
        carry = bp.record.final;
        arm.points.push_back(std::move(bp));
        prev = &arm.points.back().record;
    }
    arm.termination = Termination::RangeEnd;
}

}  // namespace

std::vector<Branch> sweep(const SweepConfig& sc, const PhysicalParams& base, const IntegratorConfig& cfg) {
    validate(sc);
    validate(cfg);
    std::vector<Branch> branches(sc.seeds.size());
    const Model start_model(with_value(base, sc.axis, sc.start));

    parallel_for(sc.seeds.size(), sc.threads, [&](std::size_t i) {
        Branch& b = branches[i];
        b.label = sc.seeds[i].label;
        b.start.value = sc.start;
        b.start.record = analyze(sc.seeds[i].state, start_model, cfg, sc.analysis);
    });

    const auto up = arm_values(sc.start, sc.step, sc.lo, sc.hi, +1);
    const auto down = arm_values(sc.start, sc.step, sc.lo, sc.hi, -1);
    parallel_for(2 * branches.size(), sc.threads, [&](std::size_t job) {
        Branch& b = branches[job / 2];
        const bool upward = job % 2 == 0;
        Arm& arm = upward ? b.up : b.down;
        if (b.start.record.failed) {
            arm.termination = Termination::Breakdown;
            arm.reason = b.start.record.diagnostic;
            return;
        }
        continue_arm(arm, b.start, upward ? up : down, sc.axis, base, cfg, sc.analysis);
    });
    return branches;
}

std::vector<DistinctAttractor> merge_records(const std::vector<AttractorRecord>& records, double threshold) {
    std::vector<DistinctAttractor> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const AttractorRecord& rec = records[i];
        if (rec.failed) continue;
        bool merged = false;
        for (DistinctAttractor& d : out) {
            if (!(d.record.cls == rec.cls)) continue;
            const auto& rep = d.record.poincare.samples;
            const auto& pts = rec.poincare.samples;
            if (hausdorff_distance(rep, pts) <= threshold) {
                d.members.push_back(i);
                merged = true;
                break;
            }
            if (rec.point.eps == 1.0 && hausdorff_distance(rep, swapped(pts)) <= threshold) {
                d.members.push_back(i);
                if (hausdorff_distance(rep, swapped(rep)) > threshold) d.counterpart = true;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back({rec, {i}, false});
    }
    return out;
}

std::vector<DistinctAttractor> find_coexisting(const PhysicalParams& point, const std::vector<State>& seeds,
                                               const IntegratorConfig& cfg, const AnalysisConfig& acfg,
                                               unsigned threads) {
    if (seeds.empty()) throw DomainError("find_coexisting: at least one seed is required");
    const Model model(point);
    std::vector<AttractorRecord> records(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) { records[i] = analyze(seeds[i], model, cfg, acfg); });
    return merge_records(records, acfg.jump_threshold);
}

double ChartAxis::value(std::size_t i) const {
    if (n <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::size_t ChartAxis::nearest(double v) const {
    if (n <= 1 || hi == lo) return 0;
    const double t = (v - lo) / (hi - lo) * static_cast<double>(n - 1);
    const long i = std::lround(t);
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
}

void validate(const ChartConfig& cc) {
    for (const ChartAxis* a : {&cc.x, &cc.y}) {
        if (a->n == 0) throw InvalidParameters("invalid chart config: axis resolution must be >= 1");
        if (!(a->lo <= a->hi)) throw InvalidParameters("invalid chart config: axis lo must not exceed hi");
        if (a->n == 1 && a->lo != a->hi)
            throw InvalidParameters("invalid chart config: a single-cell axis needs lo == hi");
    }
    if (cc.x.param == cc.y.param) throw InvalidParameters("invalid chart config: x and y must be different parameters");
    auto inside = [](const ChartAxis& a, double v) { return v >= a.lo && v <= a.hi; };
    if (!inside(cc.x, cc.seed_x) || !inside(cc.y, cc.seed_y))
        throw InvalidParameters("invalid chart config: seed point lies outside the grid");
    validate(cc.analysis);
}

ChartCell to_cell(const AttractorRecord& rec, std::size_t ix, std::size_t iy, double x, double y) {
    ChartCell c;
    c.ix = ix;
    c.iy = iy;
    c.x = x;
    c.y = y;
    c.effective = rec.spectrum.effective;
    c.regime = rec.cls.regime;
    c.synchrony = rec.cls.synchrony;
    c.converged = !rec.failed && rec.spectrum.converged;
    c.failed = rec.failed;
    c.diagnostic = rec.diagnostic;
    c.inherited = rec.initial;
    c.final = rec.final;
    return c;
}

ChartGrid chart(const ChartConfig& cc, const PhysicalParams& base, const IntegratorConfig& cfg) {
    validate(cc);
    validate(cfg);
    ChartGrid grid;
    grid.nx = cc.x.n;
    grid.ny = cc.y.n;
    grid.seed_ix = cc.x.nearest(cc.seed_x);
    grid.seed_iy = cc.y.nearest(cc.seed_y);
    grid.cells.resize(grid.nx * grid.ny);

    auto run_cell = [&](std::size_t ix, std::size_t iy, const State& from) -> const ChartCell& {
        const double xv = cc.x.value(ix);
        const double yv = cc.y.value(iy);
        const Model model(with_value(with_value(base, cc.x.param, xv), cc.y.param, yv));
        grid.at(ix, iy) = to_cell(analyze(from, model, cfg, cc.analysis), ix, iy, xv, yv);
        return grid.at(ix, iy);
    };
    // A failed cell passes on the state it started from.
    auto carry_of = [](const ChartCell& c) { return c.failed ? c.inherited : c.final; };

    const std::size_t ix0 = grid.seed_ix;
    const std::size_t iy0 = grid.seed_iy;
    run_cell(ix0, iy0, cc.seed_state);

    // Seed column: upward and downward halves are independent.
    parallel_for(2, cc.threads, [&](std::size_t half) {
        State carry = carry_of(grid.at(ix0, iy0));
        if (half == 0) {
            for (std::size_t iy = iy0 + 1; iy < grid.ny; ++iy) carry = carry_of(run_cell(ix0, iy, carry));
        } else {
            for (std::size_t iy = iy0; iy-- > 0;) carry = carry_of(run_cell(ix0, iy, carry));
        }
    });

    // Rows: each half-row continues from its seed-column cell.
    parallel_for(2 * grid.ny, cc.threads, [&](std::size_t job) {
        const std::size_t iy = job / 2;
        State carry = carry_of(grid.at(ix0, iy));
        if (job % 2 == 0) {
            for (std::size_t ix = ix0 + 1; ix < grid.nx; ++ix) carry = carry_of(run_cell(ix, iy, carry));
        } else {
            for (std::size_t ix = ix0; ix-- > 0;) carry = carry_of(run_cell(ix, iy, carry));
        }
    });
    return grid;
}

std::vector<State> probe_starts(std::size_t n, std::uint64_t rng_seed, const ProbeBox& box) {
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> r(box.r_lo, box.r_hi);
    std::uniform_real_distribution<double> u(box.u_lo, box.u_hi);
    std::vector<State> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        State s;
        s.r1 = r(rng);
        s.u1 = u(rng);
        s.r2 = r(rng);
        s.u2 = u(rng);
        s.theta = box.theta;
        out.push_back(s);
    }
    return out;
}

ProbeResult monostability_probe(const PhysicalParams& point, std::size_t n_random, const IntegratorConfig& cfg,
                                const AnalysisConfig& acfg, std::uint64_t rng_seed, const ProbeBox& box,
                                unsigned threads) {
    if (n_random == 0) throw DomainError("monostability_probe: n_random must be >= 1");
    if (!(box.r_lo > 0 && box.r_lo <= box.r_hi && box.u_lo <= box.u_hi))
        throw InvalidParameters("invalid probe box: need 0 < r_lo <= r_hi and u_lo <= u_hi");
    ProbeResult out;
    out.rng_seed = rng_seed;
    out.starts = probe_starts(n_random, rng_seed, box);
    const Model model(point);
    std::vector<AttractorRecord> records(n_random);
    parallel_for(n_random, threads, [&](std::size_t i) { records[i] = analyze(out.starts[i], model, cfg, acfg); });
    for (const auto& r : records)
        if (r.failed) out.failures.push_back(r);
    out.attractors = merge_records(records, acfg.jump_threshold);
    return out;
}

}  // namespace bubblepair
