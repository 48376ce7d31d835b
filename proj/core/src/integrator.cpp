#include "bubblepair/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bubblepair/error.hpp"

namespace bubblepair {

void validate(const IntegratorConfig& cfg) {
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!pos(cfg.rtol)) throw InvalidParameters("invalid integrator config: rtol must be > 0");
    if (!pos(cfg.atol)) throw InvalidParameters("invalid integrator config: atol must be > 0");
    if (!pos(cfg.h0)) throw InvalidParameters("invalid integrator config: h0 must be > 0");
    if (!pos(cfg.h_max) || cfg.h0 > cfg.h_max)
        throw InvalidParameters("invalid integrator config: h_max must be >= h0");
    if (!pos(cfg.safety) || cfg.safety > 1.0)
        throw InvalidParameters("invalid integrator config: safety must be in (0, 1]");
}

double next_step_size(double h, double err, double safety, double h_max) {
    double factor = err > 0.0 ? safety * std::pow(err, -0.2) : 5.0;
    factor = std::clamp(factor, 0.1, 5.0);
    return std::min(h * factor, h_max);
}

double error_norm(const Vec<5>& x0, const Vec<5>& x1, const Vec<5>& err, double atol, double rtol) {
    auto w = [&](std::size_t i) {
        const double e = err[i] / (atol + rtol * std::max(std::abs(x0[i]), std::abs(x1[i])));
        return e * e;
    };
    // Pairwise sums keep the norm bitwise invariant under the bubble swap.
    const double sum = (w(0) + w(2)) + (w(1) + w(3)) + w(4);
    return std::sqrt(sum / 5.0);
}

namespace {

// Evaluates the model, mapping any breakdown inside a trial stage to a rejection.
struct ModelRhs {
    const Model* model;
    void operator()(const Vec<5>& x, Vec<5>& dxdt) const {
        dxdt = model->vector_field(State::from_array(x)).to_array();
    }
};

void check_radius_floor(const State& x) {
    if (x.r1 < kRadiusFloor || x.r2 < kRadiusFloor)
        throw ModelBreakdown("model breakdown: bubble radius fell below the floor " + std::to_string(kRadiusFloor));
}

bool finite(const Vec<5>& v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

}  // namespace

StepResult step(const Model& model, const State& x, double h, const IntegratorConfig& cfg) {
    if (!(h > 0.0)) throw DomainError("step: h must be positive");
    const ModelRhs rhs{&model};
    const Vec<5> x0 = x.to_array();
    Vec<5> k1, y, err;
    rhs(x0, k1);
    StepResult out;
    try {
        cash_karp_step<5>(rhs, x0, k1, h, y, err);
        out.err = finite(y) && finite(err) ? error_norm(x0, y, err, cfg.atol, cfg.rtol) : INFINITY;
    } catch (const ModelBreakdown&) {
        y = x0;
        out.err = INFINITY;
    }
    out.x = State::from_array(y);
    out.h_next = next_step_size(h, out.err, cfg.safety, cfg.h_max * model.period());
    return out;
}

Trajectory::Trajectory(const Model& model, const State& x0, const IntegratorConfig& cfg, double tau0)
    : model_(&model), cfg_(cfg), x_(x0), tau_(tau0) {
    validate(cfg_);
    const double period = model.period();
    h_ = cfg_.h0 * period;
    h_max_ = cfg_.h_max * period;
    h_min_ = 1e-14 * period;
    x_.theta = wrap_phase(x_.theta);
    check_radius_floor(x_);
}

void Trajectory::advance_to(double tau_target) {
    if (tau_target < tau_) throw DomainError("integrate_to: target time lies in the past");
    IntegratorConfig cfg = cfg_;
    cfg.h_max = h_max_ / model_->period();
    while (tau_ < tau_target) {
        const double remaining = tau_target - tau_;
        const bool landing = h_ >= remaining;
        const double h = landing ? remaining : h_;
        const StepResult s = step(*model_, x_, h, cfg);
        if (s.accepted()) {
            ++accepted_;
            x_ = s.x;
            x_.theta = wrap_phase(x_.theta);
            tau_ = landing ? tau_target : tau_ + h;
            check_radius_floor(x_);
            h_ = landing ? std::max(s.h_next, std::min(h_, h_max_)) : s.h_next;
        } else {
            ++rejected_;
            h_ = s.h_next;
            if (h_ < h_min_) throw ModelBreakdown("model breakdown: step size underflow");
        }
    }
}

void Trajectory::advance_periods(long periods) {
    const double period = model_->period();
    // Land on integer multiples of the period measured from the start time.
    const double k0 = std::round(tau_ / period);
    for (long k = 1; k <= periods; ++k) advance_to((k0 + static_cast<double>(k)) * period);
}

State integrate_to(const Model& model, const State& x, double tau, double tau_target, const IntegratorConfig& cfg) {
    Trajectory traj(model, x, cfg, tau);
    traj.advance_to(tau_target);
    return traj.state();
}

TangentBundle TangentBundle::identity(const State& x) {
    TangentBundle tb;
    tb.base = x;
    for (std::size_t i = 0; i < 5; ++i) {
        tb.vectors[i].fill(0.0);
        tb.vectors[i][i] = 1.0;
    }
    return tb;
}

TangentFlow::TangentFlow(const Model& model, const TangentBundle& tb, const IntegratorConfig& cfg, double tau0,
                         double jacobian_h_rel)
    : model_(&model), cfg_(cfg), tb_(tb), tau_(tau0), h_rel_(jacobian_h_rel) {
    validate(cfg_);
    const double period = model.period();
    h_ = cfg_.h0 * period;
    h_max_ = cfg_.h_max * period;
    h_min_ = 1e-14 * period;
    tb_.base.theta = wrap_phase(tb_.base.theta);
    check_radius_floor(tb_.base);
}

void TangentFlow::advance(double span, double renorm_interval, const RenormObserver& observer) {
    if (!(renorm_interval > 0.0)) throw DomainError("integrate_with_tangents: renorm interval must be positive");
    if (span < 0.0) throw DomainError("integrate_with_tangents: span must be non-negative");
    const double start = tau_;
    const double end = start + span;
    long k = 1;
    while (tau_ < end) {
        const double target = std::min(start + static_cast<double>(k) * renorm_interval, end);
        const double before = tau_;
        advance_to(target);
        log_.elapsed += tau_ - before;
        reorthonormalize();
        if (observer) observer(tau_, tb_, log_);
        ++k;
    }
}

void TangentFlow::advance_to(double tau_target) {
    const Model& model = *model_;
    const double h_rel = h_rel_;

    auto rhs = [&model, h_rel](const Vec<kDim>& X, Vec<kDim>& dX) {
        const State x{X[0], X[1], X[2], X[3], X[4]};
        const Vec<5> f = model.vector_field(x).to_array();
        const Jacobian jac = model.jacobian(x, h_rel);
        for (std::size_t i = 0; i < 5; ++i) dX[i] = f[i];
        for (std::size_t v = 0; v < 5; ++v) {
            const double* vec = &X[5 + 5 * v];
            for (std::size_t row = 0; row < 5; ++row) {
                double acc = 0.0;
                for (std::size_t col = 0; col < 5; ++col) acc += jac[row][col] * vec[col];
                dX[5 + 5 * v + row] = acc;
            }
        }
        dX[30] = jac[0][0] + jac[1][1] + jac[2][2] + jac[3][3] + jac[4][4];
    };

    Vec<kDim> X{};
    auto pack = [&] {
        const Vec<5> b = tb_.base.to_array();
        for (std::size_t i = 0; i < 5; ++i) X[i] = b[i];
        for (std::size_t v = 0; v < 5; ++v)
            for (std::size_t i = 0; i < 5; ++i) X[5 + 5 * v + i] = tb_.vectors[v][i];
        X[30] = 0.0;
    };
    pack();

    while (tau_ < tau_target) {
        const double remaining = tau_target - tau_;
        const bool landing = h_ >= remaining;
        const double h = landing ? remaining : h_;

        Vec<kDim> k1, Y, E;
        rhs(X, k1);
        double err;
        try {
            cash_karp_step<kDim>(rhs, X, k1, h, Y, E);
            Vec<5> x0, x1, e;
            for (std::size_t i = 0; i < 5; ++i) {
                x0[i] = X[i];
                x1[i] = Y[i];
                e[i] = E[i];
            }
            err = finite(x1) && finite(e) ? error_norm(x0, x1, e, cfg_.atol, cfg_.rtol) : INFINITY;
        } catch (const ModelBreakdown&) {
            err = INFINITY;
        }
        const double h_next = next_step_size(h, err, cfg_.safety, h_max_);
        if (err <= 1.0) {
            X = Y;
            X[4] = wrap_phase(X[4]);
            tau_ = landing ? tau_target : tau_ + h;
            check_radius_floor(State{X[0], X[1], X[2], X[3], X[4]});
            h_ = landing ? std::max(h_next, std::min(h_, h_max_)) : h_next;
        } else {
            h_ = h_next;
            if (h_ < h_min_) throw ModelBreakdown("model breakdown: step size underflow");
        }
    }

    tb_.base = State{X[0], X[1], X[2], X[3], X[4]};
    for (std::size_t v = 0; v < 5; ++v)
        for (std::size_t i = 0; i < 5; ++i) tb_.vectors[v][i] = X[5 + 5 * v + i];
    log_.trace_integral += X[30];
}

void TangentFlow::reorthonormalize() {
    auto& vs = tb_.vectors;
    for (std::size_t i = 0; i < 5; ++i) {
        double before = 0.0;
        for (double e : vs[i]) before += e * e;
        for (std::size_t j = 0; j < i; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < 5; ++k) dot += vs[i][k] * vs[j][k];
            for (std::size_t k = 0; k < 5; ++k) vs[i][k] -= dot * vs[j][k];
        }
        double norm2 = 0.0;
        for (double e : vs[i]) norm2 += e * e;
        const double norm = std::sqrt(norm2);
        if (!std::isfinite(norm) || norm < 1e-300 || norm2 < 1e-28 * before)
            throw NumericalDegeneracy("numerical degeneracy: tangent frame lost rank");
        for (double& e : vs[i]) e /= norm;
        log_.log_norms[i] += std::log(norm);
    }
    ++log_.renormalizations;
}

TangentLog integrate_with_tangents(TangentBundle& tb, double tau_span, const Model& model,
                                   const IntegratorConfig& cfg, double renorm_interval) {
    TangentFlow flow(model, tb, cfg);
    flow.advance(tau_span, renorm_interval);
    tb = flow.bundle();
    return flow.log();
}

}  // namespace bubblepair
