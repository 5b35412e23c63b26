#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "qvl/qfield.hpp"

namespace qvl {

/// Dimension threshold for matched interpolation: p-1 for integer p,
/// floor(p) otherwise.
int m_p(double p);

/// Squared-metric Frechet mean of a list of points (alternating
/// matching/averaging, deterministic initialization from the first point).
QPoint frechet_mean(std::span<const QPoint> points);

/// Q-valued samples on the unit sphere S^{m-1} with quadrature weights.
/// m = 2 uses equispaced circle angles; m = 3 a latitude/longitude grid with
/// weights normalized to total area 4*pi.
class SphereSamples {
  public:
    static SphereSamples circle(int ntheta, int q, int n);
    static SphereSamples lat_long(int nphi, int npsi, int q, int n);
    /// Outer-ring trace of a polar-grid field, as unit-circle samples.
    static SphereSamples from_polar_trace(const QField& f);

    int m() const { return m_; }
    int count() const { return static_cast<int>(values_.size()); }
    int q() const { return q_; }
    int n() const { return n_; }
    std::span<const double> direction(int i) const { return {dirs_.data() + 3 * static_cast<std::size_t>(i), 3}; }
    double weight(int i) const { return weights_[i]; }
    const QPoint& value(int i) const { return values_[i]; }
    void set_value(int i, QPoint v);
    int nearest(std::span<const double> dir) const;

    /// Tangential matched-difference density at sample i: sum over sheets of
    /// the squared tangential differential (unit sphere scale).
    double tangential_density(int i) const;
    /// Integral over the unit sphere of density^{p/2}.
    double tangential_energy(double p) const;
    /// Integral of |g|^p.
    double norm_p_integral(double p) const;
    /// Integral of metric(g1, g2)^p against this grid's weights.
    double metric_p_integral(const SphereSamples& other, double p) const;

    // circle-specific helpers
    int circle_count() const;
    double dtheta() const;

  private:
    SphereSamples() = default;
    int m_ = 2, q_ = 1, n_ = 1;
    int nphi_ = 0, npsi_ = 0;
    std::vector<double> dirs_;     // 3 per sample
    std::vector<double> weights_;  // quadrature weights on the unit sphere
    std::vector<QPoint> values_;
};

/// Radial competitor v_alpha(x) = |x|^alpha g(x/|x|) sampled on the target
/// grid (polar disc or Cartesian ball); sheets are transported as whole
/// QPoints so there is no matching ambiguity. Trace equals g at sphere nodes.
QField radial_extension(const SphereSamples& g, double alpha, std::shared_ptr<const GridDomain> target);

/// Closed-form energy integral of the radial competitor:
/// (m - p + p*alpha)^{-1} * integral over S^{m-1} of
/// (alpha^2 |g|^2 + |D_T g|^2)^{p/2}.
double radial_energy_closed_form(const SphereSamples& g, double alpha, double p, int m);

/// Elementary-inequality constant C(p) for p > 2 in
/// (a+b)^{p/2} <= (1+delta) a^{p/2} + C delta^{-(p/2-1)} b^{p/2},
/// found by a small deterministic numeric search.
double elementary_inequality_constant(double p);

/// Radial comparison bound M(m, p, M, alpha, delta); c is the configurable
/// constant of the estimate (pass c <= 0 for the built-in default: 1 for
/// p <= 2, the elementary-inequality constant for p > 2).
double m_bound(int m, double p, double big_m, double alpha, double delta, double c = -1.0);

struct GapCertificate {
    int m = 0;
    double p = 0.0;
    double big_m = 0.0;  ///< the diameter-vs-energy constant M
    double c = 0.0;      ///< constant used in the bound
    double alpha0 = 0.0;
    double delta0 = 0.0;
    double eta0 = 0.0;  ///< (1/(m-p) - mval) / 2
    double mval = 0.0;  ///< M(m, p, M, alpha0, delta0)
    double eps0 = 0.0;  ///< (m-p) * eta0
};

/// Maximizes the radial-comparison gap over alpha (delta = alpha^2 for
/// p > 2); deterministic ternary search, bit-reproducible for fixed inputs.
GapCertificate find_gap(int m, double p, double big_m, double c = -1.0);

struct InterpolationReport {
    double p = 0.0;
    double eps = 0.0;
    double energy = 0.0;               ///< measured p-energy integral of the interpolant
    double boundary_energy_sum = 0.0;  ///< sum of the two boundary p-energy integrals
    double gap_integral = 0.0;         ///< integral of metric(g1, g2)^p
    double bound = 0.0;                ///< eps * sum + eps^{1-p} * gap
    double achieved_constant = 0.0;    ///< energy / bound
    double k_to_p = 0.0;               ///< sum + eps^{-p} * gap
    double trace_residual_first = 0.0;
    double trace_residual_second = 0.0;
};

/// Matched interpolation between g1 and g2 across the slab
/// I^m x [-eps, eps] (supported for m <= m_p(p) and m <= 2): vertex means on
/// cells of scale ~eps, matched skeleton extension, linear transit; traces
/// equal g1 at +eps and g2 at -eps exactly at grid nodes.
std::pair<QField, InterpolationReport> slab_interpolate(const QField& g1, const QField& g2, double eps, double p);

/// Circle-to-circle interpolation across the annulus B \ B(0, 1-eps); the
/// arc decomposition offset is chosen to minimize the 0-skeleton energy over
/// all grid offsets. Traces equal g1 at radius 1 and g2 at radius 1-eps.
std::pair<QField, InterpolationReport> annulus_interpolate_2d(const SphereSamples& g1, const SphereSamples& g2,
                                                              double eps, double p);

/// Degree-0 homogeneous extension of sphere data to the ball of the given
/// radius (cell dimension j = m-1, requires j+1 > p for finite energy).
QField homogeneous0_extension(const SphereSamples& g, int cell_dim, double p, double radius, double h);

}  // namespace qvl
