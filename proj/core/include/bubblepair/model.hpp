#pragma once

// Two encapsulated gas bubbles driven by a common acoustic field and coupled
// through the Bjerknes pressure term. Each bubble obeys a Keller-Miksis
// equation with de Jong shell terms. The model is written in nondimensional
// variables
//
//   R_i = R10 * r_i,   t = tau / omega0,   dR_i/dt = R10 * omega0 * u_i,
//
// and made autonomous by the drive phase theta = omega * t.

#include <array>
#include <numbers>

namespace bubblepair {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Dimensional model constants (SI units).
struct PhysicalParams {
    double p_stat = 101.325e3;  // static pressure, Pa
    double p_v = 2.33e3;        // vapour pressure, Pa
    double sigma = 0.0725;      // surface tension, N/m
    double rho = 1000.0;        // liquid density, kg/m^3
    double eta_l = 0.001;       // liquid viscosity, Pa s
    double c = 1500.0;          // sound speed, m/s
    double gamma = 4.0 / 3.0;   // polytropic exponent
    double chi = 0.22;          // shell elasticity, N/m
    double kappa_s = 2.5e-9;    // shell surface viscosity, kg/s
    double r10 = 1.72e-6;       // equilibrium radius of bubble 1, m
    double eps = 1.0;           // R20 / R10
    double d = 21.0 * 1.72e-6;  // centre distance, m
    double p_ac = 1.2e6;        // drive amplitude, Pa
    double omega = 2.87e7;      // drive angular frequency, rad/s

    double d_ratio() const { return d / r10; }
    void set_d_ratio(double ratio) { d = ratio * r10; }
};

/// Throws InvalidParameters naming the first violated constraint.
void validate(const PhysicalParams& p);

struct DerivedScales {
    double p0 = 0.0;        // p_stat - p_v, Pa
    double omega0 = 0.0;    // natural frequency, rad/s
    double t_drive = 0.0;   // drive period 2 pi / omega, s
    double omega_nd = 0.0;  // omega / omega0
    double d_ratio = 0.0;   // d / R10

    /// Drive period in units of tau.
    double period() const { return kTwoPi / omega_nd; }
};

/// omega0^2 = [3 gamma P0 + 2 (3 gamma - 1) sigma / R10 + 4 chi / R10] / (rho R10^2).
DerivedScales derive_scales(const PhysicalParams& p);

/// Phase point of the autonomous system.
struct State {
    double r1 = 1.0;
    double u1 = 0.0;
    double r2 = 1.0;
    double u2 = 0.0;
    double theta = 0.0;

    std::array<double, 5> to_array() const { return {r1, u1, r2, u2, theta}; }
    static State from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
    bool operator==(const State&) const = default;
};

/// d/dtau of each State component.
struct Deriv {
    double dr1 = 0.0;
    double du1 = 0.0;
    double dr2 = 0.0;
    double du2 = 0.0;
    double dtheta = 0.0;

    std::array<double, 5> to_array() const { return {dr1, du1, dr2, du2, dtheta}; }
};

struct Accelerations {
    double a1 = 0.0;
    double a2 = 0.0;
};

using Jacobian = std::array<std::array<double, 5>, 5>;

/// Radius below which the model is considered broken down.
inline constexpr double kRadiusFloor = 0.01;

/// Nondimensional coefficients of the wall-pressure expression of one bubble.
/// Pressures are scaled by rho R10^2 omega0^2.
struct WallCoefficients {
    double r_eq = 1.0;     // equilibrium radius R_i0 / R10
    double gas = 0.0;      // (P0 + 2 sigma / R_i0)
    double exponent = 0;   // 3 gamma
    double viscous = 0.0;  // 4 eta_l
    double surface = 0.0;  // 2 sigma
    double ambient = 0.0;  // P0
    double shell = 0.0;    // 4 chi
    double shell_visc = 0; // 4 kappa_s
    double drive = 0.0;    // P_ac
};

/// Immutable, thread-safe evaluator of the coupled vector field.
class Model {
public:
    explicit Model(const PhysicalParams& params);

    const PhysicalParams& params() const { return params_; }
    const DerivedScales& scales() const { return scales_; }
    const WallCoefficients& wall(int bubble) const { return wall_[bubble == 1 ? 0 : 1]; }
    double sound_speed() const { return c_nd_; }
    double distance() const { return d_nd_; }
    double period() const { return scales_.period(); }

    /// Relative determinant threshold of the acceleration system.
    void set_singularity_threshold(double rel) { det_rel_tol_ = rel; }

    /// Nondimensional wall pressure P_i of bubble 1 or 2. Throws DomainError for r <= 0.
    double shell_pressure(double r, double u, int bubble, double theta) const;

    /// Solves the 2x2 linear system for (d u1/dtau, d u2/dtau).
    /// Throws ModelBreakdown on non-positive radius or near-singular system.
    Accelerations acceleration(const State& x) const;

    Deriv vector_field(const State& x) const;

    /// Central finite differences, h_k = h_rel * max(|x_k|, 1).
    Jacobian jacobian(const State& x, double h_rel = 1e-6) const;

private:
    PhysicalParams params_;
    DerivedScales scales_;
    std::array<WallCoefficients, 2> wall_{};
    double c_nd_ = 0.0;
    double d_nd_ = 0.0;
    double det_rel_tol_ = 1e-12;
};

/// Exchanges the bubbles: (r1, u1, r2, u2, theta) -> (r2, u2, r1, u1, theta).
constexpr State swap(const State& x) { return {x.r2, x.u2, x.r1, x.u1, x.theta}; }
constexpr Deriv swap(const Deriv& f) { return {f.dr2, f.du2, f.dr1, f.du1, f.dtheta}; }

/// Euclidean distance of (r1 - r2, u1 - u2) from the synchronization manifold.
double sync_deviation(const State& x);

/// Wraps an angle into [0, 2 pi).
double wrap_phase(double theta);

}  // namespace bubblepair
