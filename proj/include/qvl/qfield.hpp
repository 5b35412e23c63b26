#pragma once

#include <memory>
#include <span>
#include <vector>

#include "qvl/grid.hpp"
#include "qvl/qpoint.hpp"

namespace qvl {

/// Q-valued field on a grid domain. Node values are canonical QPoints.
class QField {
  public:
    QField(std::shared_ptr<const GridDomain> domain, int q, int n);
    static QField constant(std::shared_ptr<const GridDomain> domain, const QPoint& value);

    const GridDomain& domain() const { return *domain_; }
    const std::shared_ptr<const GridDomain>& domain_ptr() const { return domain_; }
    int q() const { return q_; }
    int n() const { return n_; }

    const QPoint& value(int node) const { return values_[node]; }
    void set(int node, QPoint v);
    const std::vector<QPoint>& values() const { return values_; }

  private:
    std::shared_ptr<const GridDomain> domain_;
    int q_, n_;
    std::vector<QPoint> values_;
};

/// Per-node first-order data: the sheets and their partials along each grid
/// axis, obtained by optimal-assignment matching with the axis neighbors.
struct MatchedJet {
    int base = -1;
    int q = 0, n = 0, axes = 0;
    std::vector<double> sheets;    ///< q*n
    std::vector<double> partials;  ///< q*axes*n, sheet-major

    std::span<const double> partial(int sheet, int axis) const {
        return {partials.data() + (static_cast<std::size_t>(sheet) * axes + axis) * n, static_cast<std::size_t>(n)};
    }
};

/// Optimal matching of the sheets of a onto the sheets of b (cost = squared
/// distances); sigma[i] is the sheet of b assigned to sheet i of a.
std::vector<int> match_sheets(const QPoint& a, const QPoint& b);

/// Matched-difference jet at an interior node; central differences where both
/// axis neighbors exist. Boundary nodes (and the polar center) are rejected.
MatchedJet jet(const QField& f, int node);

/// Root sum of squared Hilbert-Schmidt norms of the sheet differentials.
double triple_norm(const MatchedJet& j);

/// Node-jet p-energy integral over the region: sum of measure * norm^p.
/// Region nodes missing a neighbor fall back to one-sided differences; the
/// polar center node contributes zero.
double energy(const QField& f, std::span<const int> region, double p);
double energy(const QField& f, double p);  ///< whole domain

/// Edge-based p-energy (the solver objective): sum over edges of
/// weight * (metric(f(a), f(b)) / len)^p. The region form keeps edges with
/// both endpoints in the region.
double edge_energy(const QField& f, double p);
double edge_energy(const QField& f, std::span<const int> region, double p);

struct NodeValues {
    std::vector<int> nodes;
    std::vector<QPoint> values;
};

/// Boundary restriction.
NodeValues trace(const QField& f);

/// Frechet mean under squared metric by alternating matching/averaging,
/// deterministically initialized from the first region node.
QPoint mean_on(const QField& f, std::span<const int> region);

/// Snaps every node value (sheet merging within tol).
QField snap_field(const QField& f, double tol);

struct SphereIntegrals {
    double radius;         ///< radius actually used (snapped to the grid)
    double h2;             ///< integral of |f|^2
    double radial_pair;    ///< integral of sum_i <df_i/dnu, f_i>
    double radial_square;  ///< integral of sum_i |df_i/dnu|^2
};

/// Sphere integrals on the circle/shell of radius r about a. Polar grids use
/// exact circle quadrature with matched radial differences (a must be the
/// origin); Cartesian grids bin nodes into the shell [r-h/2, r+h/2) with
/// exact sphere-area normalization.
SphereIntegrals sphere_integrals(const QField& f, std::span<const double> a, double r);

/// Integral of the triple-bar norm^p over the ball B(a, r); polar grids snap
/// r to a ring radius and clip the outermost cells at it.
double ball_energy(const QField& f, std::span<const double> a, double r, double p);
/// Integral of |f|^2 over the ball.
double ball_l2(const QField& f, std::span<const double> a, double r);
/// Discrete volume of the ball region (sum of node measures).
double ball_volume(const QField& f, std::span<const double> a, double r);
/// (1/vol) * integral of metric(f, mean)^2 over the ball.
double mean_oscillation(const QField& f, std::span<const double> a, double r);

/// Tangential p-energy integral over the sphere of radius r about a:
/// integral of (sum_i |tangential D f_i|^2)^{p/2}.
double boundary_tangential_energy(const QField& f, std::span<const double> a, double r, double p);

/// Per-node jet-norm^p density (zero at the polar center). Computing this
/// once and integrating with ball_integral amortizes the jets across many
/// ball queries.
std::vector<double> jet_density(const QField& f, double p);
/// Ball integral of a per-node density (same region rules as ball_energy).
double ball_integral(const QField& f, std::span<const double> density, std::span<const double> a, double r);

/// Snapped radius that ball/sphere quadratures will actually use.
double snapped_radius(const GridDomain& g, double r);

}  // namespace qvl
