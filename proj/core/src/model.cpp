#include "bubblepair/model.hpp"

#include <cmath>
#include <string>

#include "bubblepair/error.hpp"

namespace bubblepair {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw InvalidParameters(std::string("invalid parameters: ") + what);
}

}  // namespace

void validate(const PhysicalParams& p) {
    auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(finite_positive(p.p_stat), "p_stat must be > 0");
    require(finite_positive(p.p_v), "p_v must be > 0");
    require(p.p_stat > p.p_v, "p_stat must exceed p_v");
    require(finite_positive(p.sigma), "sigma must be > 0");
    require(finite_positive(p.rho), "rho must be > 0");
    require(finite_positive(p.eta_l), "eta_l must be > 0");
    require(finite_positive(p.c), "c must be > 0");
    require(finite_positive(p.gamma), "gamma must be > 0");
    require(finite_positive(p.chi), "chi must be > 0");
    require(finite_positive(p.kappa_s), "kappa_s must be > 0");
    require(finite_positive(p.r10), "r10 must be > 0");
    require(finite_positive(p.eps), "eps must be > 0");
    require(finite_positive(p.d), "d must be > 0");
    require(p.d > p.r10 * (1.0 + p.eps), "d must exceed r10 * (1 + eps) (bubbles overlap)");
    require(std::isfinite(p.p_ac) && p.p_ac >= 0.0, "p_ac must be >= 0");
    require(finite_positive(p.omega), "omega must be > 0");
}

DerivedScales derive_scales(const PhysicalParams& p) {
    DerivedScales s;
    s.p0 = p.p_stat - p.p_v;
    const double radicand =
        (3.0 * p.gamma * s.p0 + 2.0 * (3.0 * p.gamma - 1.0) * p.sigma / p.r10 + 4.0 * p.chi / p.r10) /
        (p.rho * p.r10 * p.r10);
    if (!(radicand > 0.0) || !std::isfinite(radicand))
        throw InvalidParameters("invalid parameters: natural frequency squared is not positive");
    s.omega0 = std::sqrt(radicand);
    s.t_drive = kTwoPi / p.omega;
    s.omega_nd = p.omega / s.omega0;
    s.d_ratio = p.d / p.r10;
    return s;
}

Model::Model(const PhysicalParams& params) : params_(params) {
    validate(params_);
    scales_ = derive_scales(params_);

    const double w0 = scales_.omega0;
    const double r10 = params_.r10;
    const double p_scale = params_.rho * r10 * r10 * w0 * w0;

    for (int i = 0; i < 2; ++i) {
        WallCoefficients& w = wall_[i];
        w.r_eq = i == 0 ? 1.0 : params_.eps;
        w.gas = (scales_.p0 + 2.0 * params_.sigma / (w.r_eq * r10)) / p_scale;
        w.exponent = 3.0 * params_.gamma;
        w.viscous = 4.0 * params_.eta_l * w0 / p_scale;
        w.surface = 2.0 * params_.sigma / r10 / p_scale;
        w.ambient = scales_.p0 / p_scale;
        w.shell = 4.0 * params_.chi / r10 / p_scale;
        w.shell_visc = 4.0 * params_.kappa_s * w0 / r10 / p_scale;
        w.drive = params_.p_ac / p_scale;
    }
    c_nd_ = params_.c / (r10 * w0);
    d_nd_ = params_.d / r10;
}

namespace {

// Wall pressure and its partial derivatives with respect to r, u and tau.
struct WallPressure {
    double p;
    double dp_dr;
    double dp_du;
    double dp_dtau;
};

WallPressure wall_pressure(const WallCoefficients& w, double r, double u, double sin_t, double cos_t,
                           double omega_nd) {
    const double inv_r = 1.0 / r;
    const double gas = w.gas * std::pow(w.r_eq * inv_r, w.exponent);
    WallPressure out;
    out.p = gas - w.viscous * u * inv_r - w.surface * inv_r - w.ambient -
            w.shell * (1.0 / w.r_eq - inv_r) - w.shell_visc * u * inv_r * inv_r - w.drive * sin_t;
    out.dp_dr = inv_r * inv_r *
                (-w.exponent * gas * r + w.viscous * u + w.surface - w.shell + 2.0 * w.shell_visc * u * inv_r);
    out.dp_du = -inv_r * (w.viscous + w.shell_visc * inv_r);
    out.dp_dtau = -w.drive * omega_nd * cos_t;
    return out;
}

}  // namespace

double Model::shell_pressure(double r, double u, int bubble, double theta) const {
    if (!(r > 0.0)) throw DomainError("shell_pressure: radius must be positive");
    return wall_pressure(wall(bubble), r, u, std::sin(theta), std::cos(theta), scales_.omega_nd).p;
}

Accelerations Model::acceleration(const State& x) const {
    if (!(x.r1 > 0.0) || !(x.r2 > 0.0)) throw ModelBreakdown("model breakdown: non-positive bubble radius");

    const double sin_t = std::sin(x.theta);
    const double cos_t = std::cos(x.theta);
    const WallPressure w1 = wall_pressure(wall_[0], x.r1, x.u1, sin_t, cos_t, scales_.omega_nd);
    const WallPressure w2 = wall_pressure(wall_[1], x.r2, x.u2, sin_t, cos_t, scales_.omega_nd);
    const double c = c_nd_;
    const double d = d_nd_;

    // Row i:  A_ii a_i + A_ij a_j = b_i.
    const double a11 = (1.0 - x.u1 / c) * x.r1 - x.r1 / c * w1.dp_du;
    const double a22 = (1.0 - x.u2 / c) * x.r2 - x.r2 / c * w2.dp_du;
    const double a12 = x.r2 * x.r2 / d;
    const double a21 = x.r1 * x.r1 / d;

    const double b1 = -1.5 * (1.0 - x.u1 / (3.0 * c)) * x.u1 * x.u1 + (1.0 + x.u1 / c) * w1.p +
                      x.r1 / c * (w1.dp_dr * x.u1 + w1.dp_dtau) - 2.0 * x.r2 * x.u2 * x.u2 / d;
    const double b2 = -1.5 * (1.0 - x.u2 / (3.0 * c)) * x.u2 * x.u2 + (1.0 + x.u2 / c) * w2.p +
                      x.r2 / c * (w2.dp_dr * x.u2 + w2.dp_dtau) - 2.0 * x.r1 * x.u1 * x.u1 / d;

    const double det = a11 * a22 - a12 * a21;
    const double norm2 = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
    if (!(std::abs(det) > det_rel_tol_ * norm2))
        throw ModelBreakdown("model breakdown: near-singular acceleration system");

    // Written so that swapping the bubbles swaps the results bit for bit.
    return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det};
}

Deriv Model::vector_field(const State& x) const {
    const Accelerations a = acceleration(x);
    return {x.u1, a.a1, x.u2, a.a2, scales_.omega_nd};
}

Jacobian Model::jacobian(const State& x, double h_rel) const {
    Jacobian jac{};
    const std::array<double, 5> base = x.to_array();
    for (std::size_t k = 0; k < 5; ++k) {
        const double h = h_rel * std::max(std::abs(base[k]), 1.0);
        std::array<double, 5> plus = base;
        std::array<double, 5> minus = base;
        plus[k] += h;
        minus[k] -= h;
        const double span = plus[k] - minus[k];
        const auto fp = vector_field(State::from_array(plus)).to_array();
        const auto fm = vector_field(State::from_array(minus)).to_array();
        for (std::size_t row = 0; row < 5; ++row) jac[row][k] = (fp[row] - fm[row]) / span;
    }
    return jac;
}

double sync_deviation(const State& x) { return std::hypot(x.r1 - x.r2, x.u1 - x.u2); }

double wrap_phase(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

}  // namespace bubblepair
