#include "bubblepair/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bubblepair {

double LyapunovSpectrum::sum() const { return std::accumulate(exponents.begin(), exponents.end(), 0.0); }

LyapunovSpectrum make_spectrum(const std::array<double, 5>& rates) {
    LyapunovSpectrum ls;
    ls.exponents = rates;
    std::sort(ls.exponents.begin(), ls.exponents.end(), std::greater<>());
    std::size_t ref = 0;
    for (std::size_t i = 1; i < 5; ++i)
        if (std::abs(ls.exponents[i]) < std::abs(ls.exponents[ref])) ref = i;
    ls.referent_index = ref;
    std::array<double, 4> rest{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < 5; ++i)
        if (i != ref) rest[n++] = ls.exponents[i];
    ls.effective = {rest[0], rest[1]};
    return ls;
}

namespace {

struct Measurement {
    LyapunovSpectrum spectrum;
    std::vector<PoincarePoint> samples;
    State final;
};

PoincarePoint strobe(const State& x) { return {x.r1, x.u1, x.r2, x.u2}; }

// Runs the tangent flow from `x` (already past the transient) and evaluates
// the spectrum with its convergence flag.
Measurement measure(const Model& model, const IntegratorConfig& cfg, const State& x, double tau0,
                    const LyapunovRun& run, long collect, int max_extensions) {
    const double period = model.period();
    const double renorm = static_cast<double>(run.renorm_periods) * period;

    TangentFlow flow(model, TangentBundle::identity(x), cfg, tau0);
    std::vector<std::array<double, 5>> running;  // per-vector estimates after each renormalization
    std::vector<PoincarePoint> samples;
    auto observer = [&](double, const TangentBundle& tb, const TangentLog& log) {
        std::array<double, 5> est{};
        for (std::size_t i = 0; i < 5; ++i) est[i] = log.log_norms[i] / log.elapsed;
        running.push_back(est);
        samples.push_back(strobe(tb.base));
    };

    auto evaluate = [&]() {
        std::array<double, 5> rates{};
        const TangentLog& log = flow.log();
        for (std::size_t i = 0; i < 5; ++i) rates[i] = log.elapsed > 0 ? log.log_norms[i] / log.elapsed : 0.0;
        LyapunovSpectrum ls = make_spectrum(rates);
        ls.trace_average = log.elapsed > 0 ? log.trace_integral / log.elapsed : 0.0;
        ls.transient_periods = run.transient_periods;
        ls.measure_periods = static_cast<long>(std::lround(log.elapsed / period));
        double change = 0.0;
        if (!running.empty()) {
            const std::size_t n = running.size();
            const std::size_t first = n - std::max<std::size_t>(1, n / 4);
            for (std::size_t k = first; k < n; ++k)
                for (std::size_t i = 0; i < 5; ++i) change = std::max(change, std::abs(running[k][i] - running.back()[i]));
        }
        ls.max_change = change;
        ls.converged = running.size() >= 4 && change < run.conv_tol;
        return ls;
    };

    const double span = static_cast<double>(run.measure_periods) * period;
    try {
        flow.advance(span, renorm, observer);
        LyapunovSpectrum ls = evaluate();
        for (int ext = 0; !ls.converged && ext < max_extensions; ++ext) {
            flow.advance(span, renorm, observer);
            ls = evaluate();
        }
        Measurement m;
        m.spectrum = ls;
        if (collect > 0 && samples.size() > static_cast<std::size_t>(collect))
            samples.erase(samples.begin(), samples.end() - collect);
        m.samples = std::move(samples);
        m.final = flow.bundle().base;
        return m;
    } catch (const NumericalDegeneracy& e) {
        throw SpectrumFailure(e.what(), evaluate(), true);
    } catch (const ModelBreakdown& e) {
        throw SpectrumFailure(e.what(), evaluate(), false);
    }
}

}  // namespace

LyapunovSpectrum lyapunov_spectrum(const State& x0, const Model& model, const IntegratorConfig& cfg,
                                   const LyapunovRun& run) {
    if (run.transient_periods < 0 || run.measure_periods <= 0 || run.renorm_periods <= 0 || !(run.conv_tol > 0))
        throw DomainError("lyapunov_spectrum: run lengths and tolerance must be positive");
    Trajectory traj(model, x0, cfg);
    traj.advance_periods(run.transient_periods);
    return measure(model, cfg, traj.state(), traj.time(), run, 0, 0).spectrum;
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::Periodic: return "periodic";
        case Regime::Quasiperiodic: return "quasiperiodic";
        case Regime::Chaotic: return "chaotic";
        case Regime::Hyperchaotic: return "hyperchaotic";
    }
    return "unknown";
}

std::string_view to_string(Synchrony s) {
    switch (s) {
        case Synchrony::Synchronous: return "synchronous";
        case Synchrony::Asynchronous: return "asynchronous";
        case Synchrony::NotApplicable: return "n/a";
    }
    return "unknown";
}

std::optional<Regime> parse_regime(std::string_view s) {
    for (Regime r : {Regime::Periodic, Regime::Quasiperiodic, Regime::Chaotic, Regime::Hyperchaotic})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

Regime classify_effective(EffectivePair eff, double lambda_tr) {
    if (eff.l1 < -lambda_tr) return Regime::Periodic;
    if (eff.l1 <= lambda_tr) return Regime::Quasiperiodic;
    if (eff.l2 > lambda_tr) return Regime::Hyperchaotic;
    return Regime::Chaotic;
}

Regime classify(const LyapunovSpectrum& ls, double lambda_tr) {
    if (!ls.converged) throw ClassificationRefused("classification refused: spectrum not converged");
    return classify_effective(ls.effective, lambda_tr);
}

PoincareSet poincare(const State& x0, const Model& model, const IntegratorConfig& cfg, long skip, long collect,
                     State* final_state) {
    if (skip < 0 || collect <= 0) throw DomainError("poincare: skip must be >= 0 and collect > 0");
    Trajectory traj(model, x0, cfg);
    traj.advance_periods(skip);
    PoincareSet ps;
    ps.skip = skip;
    ps.theta0 = traj.state().theta;
    ps.samples.reserve(static_cast<std::size_t>(collect));
    ps.samples.push_back(strobe(traj.state()));
    for (long k = 1; k < collect; ++k) {
        traj.advance_periods(1);
        ps.samples.push_back(strobe(traj.state()));
    }
    if (final_state) *final_state = traj.state();
    return ps;
}

namespace {

double distance(const PoincarePoint& a, const PoincarePoint& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

std::optional<int> detect_period(const PoincareSet& ps, double tol) {
    const std::size_t n = ps.samples.size();
    for (std::size_t p = 1; p <= n / 4; ++p) {
        bool ok = true;
        for (std::size_t i = 0; i + p < n && ok; ++i) ok = distance(ps.samples[i], ps.samples[i + p]) <= tol;
        if (ok) return static_cast<int>(p);
    }
    return std::nullopt;
}

Synchrony is_synchronous(const PoincareSet& ps, double eps, double delta_sync) {
    if (eps != 1.0) return Synchrony::NotApplicable;
    for (const auto& s : ps.samples)
        if (std::hypot(s[0] - s[2], s[1] - s[3]) >= delta_sync) return Synchrony::Asynchronous;
    return Synchrony::Synchronous;
}

double hausdorff_distance(const std::vector<PoincarePoint>& a, const std::vector<PoincarePoint>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto directed = [](const std::vector<PoincarePoint>& from, const std::vector<PoincarePoint>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                best = std::min(best, distance(p, q));
                if (best <= worst) break;  // cannot raise the maximum
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

std::vector<PoincarePoint> swapped(const std::vector<PoincarePoint>& pts) {
    std::vector<PoincarePoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back({p[2], p[3], p[0], p[1]});
    return out;
}

void validate(const AnalysisConfig& cfg) {
    const LyapunovRun& r = cfg.run;
    if (r.transient_periods < 0) throw InvalidParameters("invalid analysis config: transient_periods must be >= 0");
    if (r.measure_periods <= 0) throw InvalidParameters("invalid analysis config: measure_periods must be > 0");
    if (r.renorm_periods <= 0) throw InvalidParameters("invalid analysis config: renorm_periods must be > 0");
    if (!(r.conv_tol > 0)) throw InvalidParameters("invalid analysis config: conv_tol must be > 0");
    if (!(cfg.lambda_tr > 0)) throw InvalidParameters("invalid analysis config: lambda_tr must be > 0");
    if (!(cfg.delta_sync > 0)) throw InvalidParameters("invalid analysis config: delta_sync must be > 0");
    if (cfg.poincare_collect <= 0) throw InvalidParameters("invalid analysis config: poincare_collect must be > 0");
    if (!(cfg.period_tol > 0)) throw InvalidParameters("invalid analysis config: period_tol must be > 0");
    if (!(cfg.jump_threshold > 0)) throw InvalidParameters("invalid analysis config: jump_threshold must be > 0");
    if (cfg.max_extensions < 0) throw InvalidParameters("invalid analysis config: max_extensions must be >= 0");
}

ParameterPoint point_of(const PhysicalParams& p) { return {p.p_ac, p.d_ratio(), p.eps}; }

PhysicalParams with_point(PhysicalParams p, const ParameterPoint& pt) {
    p.p_ac = pt.p_ac;
    p.eps = pt.eps;
    p.set_d_ratio(pt.d_ratio);
    return p;
}

AttractorRecord analyze(const State& x0, const Model& model, const IntegratorConfig& cfg, const AnalysisConfig& acfg) {
    validate(acfg);
    AttractorRecord rec;
    rec.point = point_of(model.params());
    rec.initial = x0;
    rec.final = x0;
    try {
        Trajectory traj(model, x0, cfg);
        traj.advance_periods(acfg.run.transient_periods);
        Measurement m =
            measure(model, cfg, traj.state(), traj.time(), acfg.run, acfg.poincare_collect, acfg.max_extensions);
        rec.final = m.final;
        rec.spectrum = m.spectrum;
        rec.poincare.samples = std::move(m.samples);
        rec.poincare.skip = acfg.run.transient_periods;
        rec.poincare.theta0 = traj.state().theta;
        rec.cls.regime = classify_effective(rec.spectrum.effective, acfg.lambda_tr);
        rec.cls.synchrony = is_synchronous(rec.poincare, model.params().eps, acfg.delta_sync);
        rec.period = detect_period(rec.poincare, acfg.period_tol);
        if (!rec.spectrum.converged) rec.diagnostic = "spectrum not converged";
    } catch (const SpectrumFailure& e) {
        rec.failed = true;
        rec.spectrum = e.partial();
        rec.diagnostic = e.what();
    } catch (const ModelBreakdown& e) {
        rec.failed = true;
        rec.diagnostic = e.what();
    } catch (const NumericalDegeneracy& e) {
        rec.failed = true;
        rec.diagnostic = e.what();
    }
    return rec;
}

}  // namespace bubblepair
