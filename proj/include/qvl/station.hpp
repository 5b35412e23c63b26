#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qvl/qfield.hpp"

namespace qvl {

/// Domain vector field given in closed form: value X(x) in R^m and Jacobian
/// DX(x) as an m x m row-major matrix. Supplying the Jacobian analytically
/// avoids a second layer of differencing error.
struct VectorFieldSpec {
    std::function<std::vector<double>(std::span<const double>)> value;
    std::function<std::vector<double>(std::span<const double>)> jacobian;
};

/// Fiber deformation Y(x, y) with partial Jacobians D_x Y (n x m) and
/// D_y Y (n x n), row-major.
struct FiberFieldSpec {
    std::function<std::vector<double>(std::span<const double>, std::span<const double>)> value;
    std::function<std::vector<double>(std::span<const double>, std::span<const double>)> dx;
    std::function<std::vector<double>(std::span<const double>, std::span<const double>)> dy;
};

/// X(x) = chi(|x|) x with a smoothstep cutoff: chi = 1 on [0, r0], 0 beyond r1.
VectorFieldSpec radial_cutoff_field(int m, double r0, double r1);
/// Y(x, y) = chi(|x|) y with the same cutoff.
FiberFieldSpec radial_cutoff_fiber(int m, int n, double r0, double r1);

/// Inner-variation residual
///   2 sum_i int <Df_i, Df_i o DX> - int |Df|^2 div X,
/// zero (to discretization error) iff the discrete inner variation vanishes.
double squeeze_residual(const QField& f, const VectorFieldSpec& x_field);

/// Outer-variation residual
///   sum_i int <Df_i, D_x Y(x, f_i)> + sum_i int <Df_i, D_y Y(x, f_i) o Df_i>.
double squash_residual(const QField& f, const FiberFieldSpec& y_field);

/// Ball-vs-boundary identity residual
///   int_B |Df|^2 - int_dB sum_i <df_i/dnu, f_i>.
double squash_identity_residual(const QField& f, std::span<const double> a, double r);

struct FrequencyEntry {
    double r = 0.0;
    double d = 0.0;        ///< energy integral over B(a, r)
    double h = 0.0;        ///< boundary integral of |f|^2
    double n = 0.0;        ///< r d / h
    double theta = 0.0;    ///< r^{2-m} d
    double radial_pair = 0.0;
    double radial_square = 0.0;
    double h_prime_residual = -1.0;      ///< relative residual of the H' identity (-1 where undefined)
    double theta_prime_residual = -1.0;  ///< relative residual of the Theta' identity
};

struct FrequencyProfile {
    int m = 2;
    std::vector<double> center;
    std::vector<FrequencyEntry> entries;
    double min_n_step = 0.0;      ///< min consecutive increment of N
    double min_theta_step = 0.0;  ///< min consecutive increment of Theta
    double max_h_residual = 0.0;
    double max_theta_residual = 0.0;
    bool vanishing_violation = false;  ///< H = 0 on a sphere but f not identically zero inside
    bool degenerate = false;           ///< identically zero data
};

/// Samples D, H, N, Theta on the given radii with derivative-identity
/// residuals and monotonicity margins.
FrequencyProfile frequency_profile(const QField& f, std::span<const double> a, std::span<const double> radii);

struct FrequencyBoundsRow {
    double r = 0.0;
    double h_lower_margin = 0.0;  ///< relative slack of the lower two-sided bound
    double h_upper_margin = 0.0;  ///< relative slack of the upper two-sided bound
    double d_margin = 0.0;        ///< relative slack of the density bound
};

struct FrequencyBoundsReport {
    double r0 = 0.0;
    std::vector<FrequencyBoundsRow> rows;
    double worst_margin = 0.0;
    bool skipped_density_bound = false;  ///< N(r0) = 0
};

/// Verifies the integrated frequency bounds against the profile at r <= r0.
FrequencyBoundsReport frequency_bounds_check(const FrequencyProfile& profile, double r0);

struct LinfBoundReport {
    double sup_sq = 0.0;    ///< max over B(a, r0) of |f|^2
    double mass3 = 0.0;     ///< integral of |f|^2 over B(a, 3 r0)
    double c_hat = 0.0;     ///< sup_sq * r0^m / mass3
    std::vector<double> centered_oscillations;  ///< oscillation about Q[[y]] on shrinking balls
};

/// Empirical boundedness constant and the centered-oscillation continuity
/// check at a density branch point.
LinfBoundReport linf_bound_check(const QField& f, std::span<const double> a, double r0);

struct VMOEntry {
    double r = 0.0;
    double omega = 0.0;              ///< sup over centers of r^{2-m} mu(B(a, r))
    double worst_oscillation = 0.0;  ///< sup over centers of the mean oscillation
    double oscillation_ratio = 0.0;  ///< worst_oscillation / omega
};

struct VMOStep {
    double rho_j = 0.0, rho_j1 = 0.0;
    double theta_j = 0.0, theta_j1 = 0.0;
    double n_j = 0.0;
    bool theta_halves = false;
    bool n_small = false;  ///< N(rho_j) < 2^{-j-1}
    bool pass = false;
};

struct VMOReport {
    int m = 2;
    std::vector<VMOEntry> entries;
    double min_omega_step = 0.0;  ///< monotonicity margin of omega over the radius grid
    std::vector<VMOStep> steps;   ///< contraction dichotomy at rho_j = 2^{-2^j}
    bool contraction_ok = false;
    double required_contraction_c = 0.0;  ///< smallest C with omega(rho_{j+1}) <= max(C 2^{-j-1}, omega(rho_j)/2)
    double fit_c = 0.0;                   ///< omega(rho) ~ C |ln rho|^{-alpha}
    double fit_alpha = 0.0;
    bool better_than_log = false;  ///< decay steeper than any log power
    double worst_oscillation_ratio = 0.0;
};

/// Energy modulus omega(r), mean oscillations, the dyadic-squared contraction
/// dichotomy, and the logarithmic decay fit. Centers that cannot resolve a
/// radius are skipped for that radius; the dichotomy runs at the origin.
VMOReport vmo_report(const QField& f, std::span<const std::vector<double>> centers, std::span<const double> radii,
                     int jmax = 4);

}  // namespace qvl
