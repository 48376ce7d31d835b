#pragma once

// Cash-Karp embedded Runge-Kutta 4(5) stepping for the bubble-pair flow, with
// exact landing on requested times and co-integration of tangent vectors.

#include <array>
#include <cstddef>
#include <functional>

#include "bubblepair/model.hpp"

namespace bubblepair {

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 0.01;     // initial step, fraction of the drive period
    double h_max = 0.1;   // largest step, fraction of the drive period
    double safety = 0.9;
};

void validate(const IntegratorConfig& cfg);

template <std::size_t N>
using Vec = std::array<double, N>;

namespace rkck {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 3.0 / 5.0, c5 = 1.0, c6 = 7.0 / 8.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 3.0 / 10.0, a42 = -9.0 / 10.0, a43 = 6.0 / 5.0;
inline constexpr double a51 = -11.0 / 54.0, a52 = 5.0 / 2.0, a53 = -70.0 / 27.0, a54 = 35.0 / 27.0;
inline constexpr double a61 = 1631.0 / 55296.0, a62 = 175.0 / 512.0, a63 = 575.0 / 13824.0,
                        a64 = 44275.0 / 110592.0, a65 = 253.0 / 4096.0;
inline constexpr double b1 = 37.0 / 378.0, b3 = 250.0 / 621.0, b4 = 125.0 / 594.0, b6 = 512.0 / 1771.0;
inline constexpr double e1 = b1 - 2825.0 / 27648.0, e3 = b3 - 18575.0 / 48384.0, e4 = b4 - 13525.0 / 55296.0,
                        e5 = -277.0 / 14336.0, e6 = b6 - 0.25;

}  // namespace rkck

/// One Cash-Karp step of an autonomous system `rhs(x, dxdt)`.
/// `k1` is rhs(x). Writes the fifth-order solution to `y` and the difference
/// between the fifth- and fourth-order solutions to `err`.
template <std::size_t N, class Rhs>
void cash_karp_step(const Rhs& rhs, const Vec<N>& x, const Vec<N>& k1, double h, Vec<N>& y, Vec<N>& err) {
    using namespace rkck;
    Vec<N> k2, k3, k4, k5, k6, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * a21 * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(tmp, k6);
    for (std::size_t i = 0; i < N; ++i) {
        y[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b6 * k6[i]);
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i]);
    }
}

/// Step-size proposal h * safety * err^(-1/5), clamped to [h/10, 5h] and h_max.
double next_step_size(double h, double err, double safety, double h_max);

struct StepResult {
    State x;
    double err = 0.0;
    double h_next = 0.0;
    bool accepted() const { return err <= 1.0; }
};

/// One embedded step of the model flow. Does not wrap theta.
StepResult step(const Model& model, const State& x, double h, const IntegratorConfig& cfg);

/// Weighted RMS of the error of a 5-component state, symmetric under bubble swap.
double error_norm(const Vec<5>& x0, const Vec<5>& x1, const Vec<5>& err, double atol, double rtol);

/// A trajectory that owns its state, time, and current step size.
class Trajectory {
public:
    Trajectory(const Model& model, const State& x0, const IntegratorConfig& cfg, double tau0 = 0.0);

    const State& state() const { return x_; }
    double time() const { return tau_; }
    double step_size() const { return h_; }
    std::size_t accepted_steps() const { return accepted_; }
    std::size_t rejected_steps() const { return rejected_; }

    /// Adaptive stepping landing exactly on `tau_target`. Throws DomainError
    /// if the target lies in the past.
    void advance_to(double tau_target);
    void advance_periods(long periods);

private:
    const Model* model_;
    IntegratorConfig cfg_;
    State x_;
    double tau_;
    double h_;
    double h_max_;
    double h_min_;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
};

/// Integrates from (x, tau) to tau_target.
State integrate_to(const Model& model, const State& x, double tau, double tau_target, const IntegratorConfig& cfg);

/// Base state plus five tangent vectors (vectors[i] is the i-th vector).
struct TangentBundle {
    State base;
    std::array<Vec<5>, 5> vectors{};

    /// Identity frame; the theta direction is the last vector.
    static TangentBundle identity(const State& x);
};

struct TangentLog {
    Vec<5> log_norms{};        // accumulated log stretch of each vector
    double trace_integral = 0; // integral of trace(J) over the span
    double elapsed = 0;        // tau covered
    long renormalizations = 0;
};

/// Observer called after each reorthonormalization with the time, the
/// bundle (orthonormal frame) and the log stretches accumulated so far.
using RenormObserver = std::function<void(double tau, const TangentBundle&, const TangentLog&)>;

/// Co-integrates a base trajectory and its tangent vectors (dv/dtau = J(x) v).
class TangentFlow {
public:
    TangentFlow(const Model& model, const TangentBundle& tb, const IntegratorConfig& cfg, double tau0 = 0.0,
                double jacobian_h_rel = 1e-6);

    const TangentBundle& bundle() const { return tb_; }
    double time() const { return tau_; }
    const TangentLog& log() const { return log_; }

    /// Advances by `span`, reorthonormalizing (modified Gram-Schmidt) every
    /// `renorm_interval` and at the end of the span.
    void advance(double span, double renorm_interval, const RenormObserver& observer = {});

private:
    void advance_to(double tau_target);
    void reorthonormalize();

    static constexpr std::size_t kDim = 5 + 25 + 1;

    const Model* model_;
    IntegratorConfig cfg_;
    TangentBundle tb_;
    double trace_acc_ = 0.0;
    double tau_;
    double h_;
    double h_max_;
    double h_min_;
    double h_rel_;
    TangentLog log_;
};

/// Convenience wrapper: propagates `tb` over `tau_span` and returns the
/// accumulated log norms.
TangentLog integrate_with_tangents(TangentBundle& tb, double tau_span, const Model& model,
                                   const IntegratorConfig& cfg, double renorm_interval);

}  // namespace bubblepair
