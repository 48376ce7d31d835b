#pragma once

// Lyapunov spectra, regime classification, stroboscopic Poincare sets and
// the per-attractor analysis record.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bubblepair/error.hpp"
#include "bubblepair/integrator.hpp"
#include "bubblepair/model.hpp"

namespace bubblepair {

struct LyapunovRun {
    long transient_periods = 2000;
    long measure_periods = 20000;
    double conv_tol = 5e-4;
    /// Reorthonormalization interval in drive periods.
    long renorm_periods = 1;
};

struct EffectivePair {
    double l1 = 0.0;
    double l2 = 0.0;
};

struct LyapunovSpectrum {
    std::array<double, 5> exponents{};  // descending, per unit tau
    std::size_t referent_index = 0;
    EffectivePair effective;
    bool converged = false;
    long transient_periods = 0;
    long measure_periods = 0;
    double trace_average = 0.0;  // time average of trace(J) over the measured span
    double max_change = 0.0;     // largest change of a running estimate over the final quarter

    double referent() const { return exponents[referent_index]; }
    double sum() const;
};

/// Sorts raw per-vector rates, removes the exponent of smallest magnitude and
/// fills the effective pair.
LyapunovSpectrum make_spectrum(const std::array<double, 5>& rates);

/// A failed spectrum computation with whatever was accumulated before the failure.
class SpectrumFailure : public Error {
public:
    SpectrumFailure(const std::string& what, LyapunovSpectrum partial, bool degeneracy)
        : Error(what), partial_(partial), degeneracy_(degeneracy) {}
    const LyapunovSpectrum& partial() const { return partial_; }
    bool degeneracy() const { return degeneracy_; }

private:
    LyapunovSpectrum partial_;
    bool degeneracy_;
};

/// Discards the transient, then accumulates Benettin log norms over the
/// measurement span. Converged iff no running estimate moves by conv_tol or
/// more over the final quarter of the run.
LyapunovSpectrum lyapunov_spectrum(const State& x0, const Model& model, const IntegratorConfig& cfg,
                                   const LyapunovRun& run = {});

enum class Regime { Periodic, Quasiperiodic, Chaotic, Hyperchaotic };
enum class Synchrony { Synchronous, Asynchronous, NotApplicable };

std::string_view to_string(Regime r);
std::string_view to_string(Synchrony s);
std::optional<Regime> parse_regime(std::string_view s);

struct AttractorClass {
    Regime regime = Regime::Periodic;
    Synchrony synchrony = Synchrony::NotApplicable;
    bool operator==(const AttractorClass&) const = default;
};

inline constexpr double kDefaultLambdaThreshold = 1e-3;

/// The threshold rule on the effective pair, without the convergence gate.
/// l1 in [-tr, tr] is quasiperiodic; l2 == tr counts as chaotic.
Regime classify_effective(EffectivePair eff, double lambda_tr = kDefaultLambdaThreshold);

/// Gated classification: throws ClassificationRefused on unconverged spectra.
Regime classify(const LyapunovSpectrum& ls, double lambda_tr = kDefaultLambdaThreshold);

using PoincarePoint = std::array<double, 4>;  // r1, u1, r2, u2

struct PoincareSet {
    std::vector<PoincarePoint> samples;
    long skip = 0;
    double theta0 = 0.0;

    std::size_t count() const { return samples.size(); }
};

/// Skips `skip` drive periods, then records `collect` samples exactly one
/// period apart. `final_state`, if given, receives the state at the last sample.
PoincareSet poincare(const State& x0, const Model& model, const IntegratorConfig& cfg, long skip = 1000,
                     long collect = 1000, State* final_state = nullptr);

/// Smallest p <= count/4 with every sample within `tol` of the sample p later.
std::optional<int> detect_period(const PoincareSet& ps, double tol = 1e-6);

/// NotApplicable unless eps == 1; otherwise Synchronous iff every sample lies
/// within delta_sync of the synchronization manifold.
Synchrony is_synchronous(const PoincareSet& ps, double eps, double delta_sync = 1e-6);

/// Directed-both-ways Hausdorff distance between two sample sets.
double hausdorff_distance(const std::vector<PoincarePoint>& a, const std::vector<PoincarePoint>& b);

/// Poincare set with the bubbles exchanged.
std::vector<PoincarePoint> swapped(const std::vector<PoincarePoint>& pts);

struct AnalysisConfig {
    LyapunovRun run;
    double lambda_tr = kDefaultLambdaThreshold;
    double delta_sync = 1e-6;
    long poincare_collect = 5000;
    double period_tol = 1e-6;
    double jump_threshold = 0.05;
    /// How many times an unconverged measurement is extended by measure_periods.
    int max_extensions = 1;
};

void validate(const AnalysisConfig& cfg);

struct ParameterPoint {
    double p_ac = 0.0;
    double d_ratio = 0.0;
    double eps = 1.0;
};

ParameterPoint point_of(const PhysicalParams& p);
PhysicalParams with_point(PhysicalParams p, const ParameterPoint& pt);

struct AttractorRecord {
    ParameterPoint point;
    State initial;                    // state the analysis started from
    State final;                      // state at the end of the measurement
    LyapunovSpectrum spectrum;
    AttractorClass cls;               // rule outcome on spectrum.effective
    PoincareSet poincare;
    std::optional<int> period;
    bool failed = false;
    std::string diagnostic;

    bool classified() const { return !failed && spectrum.converged; }
};

/// Transient, Poincare collection, spectrum, classification, synchrony and
/// period detection. Numerical breakdown yields a record with failed = true.
AttractorRecord analyze(const State& x0, const Model& model, const IntegratorConfig& cfg,
                        const AnalysisConfig& acfg = {});

}  // namespace bubblepair
