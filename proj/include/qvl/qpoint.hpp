#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qvl {

/// A point of the space of unordered Q-tuples of vectors in R^n.
///
/// Sheets are stored flat (Q*n doubles, sheet-major) in canonical
/// lexicographic order, so equal multisets compare equal bitwise.
class QPoint {
  public:
    QPoint() = default;
    /// From flat data, sheet-major. Canonicalizes.
    QPoint(int q, int n, std::vector<double> flat);
    /// From nested rows. Canonicalizes.
    static QPoint from_rows(const std::vector<std::vector<double>>& rows);
    /// Q copies of the origin of R^n.
    static QPoint zero(int q, int n);
    /// Q copies of the same vector.
    static QPoint splat(int q, std::span<const double> value);

    int q() const { return q_; }
    int n() const { return n_; }
    std::span<const double> sheet(int i) const { return {data_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)}; }
    const std::vector<double>& flat() const { return data_; }

    bool operator==(const QPoint& other) const = default;

  private:
    int q_ = 0;
    int n_ = 0;
    std::vector<double> data_;
};

/// Decomposition of a Q-point into its distinct values.
struct QSplit {
    std::vector<std::vector<int>> groups;  ///< partition of sheet indices
    std::vector<std::vector<double>> centers;
    std::vector<int> multiplicities;
    int j() const { return static_cast<int>(centers.size()); }
};

/// A quantity carried both as log and (possibly underflowed) linear value.
struct LogValue {
    double log_value;
    double value;
};

/// Optimal-assignment distance between two Q-points.
double metric(const QPoint& u, const QPoint& v);

/// |u| = distance to Q copies of the origin.
double norm(const QPoint& u);

/// Arithmetic mean of the sheets.
std::vector<double> barycenter(const QPoint& u);

/// Subtracts a from every sheet.
QPoint translate(const QPoint& u, std::span<const double> a);

/// Multiset union of the sheets of u and v.
QPoint concat(const QPoint& u, const QPoint& v);

/// Max pairwise sheet distance.
double diameter(const QPoint& v);

/// Min distance between sheets with distinct values; +infinity when all
/// sheets coincide. Distinctness is exact equality of canonical coordinates.
double splitting(const QPoint& v);

/// Merges sheets closer than tol (single linkage), replacing each cluster by
/// its barycenter. Intended for snapping fields built from floating
/// computation before exact-equality queries.
QPoint snap(const QPoint& v, double tol);

/// Lipschitz retraction onto the closed metric ball B(v, r).
/// Requires 0 < r < splitting(v)/4 < +infinity.
QPoint retraction(const QPoint& v, double r, const QPoint& u);

/// beta(eps, Q) = (eps/3)^(3^Q), evaluated in log space. Underflows the
/// linear value for Q >= 5; consumers should use log_value.
LogValue beta(double eps, int q);

/// Finds a nearby point with large splitting: the output satisfies
///   beta(eps, Q) * diameter(P) <= splitting(out) < +infinity
///   metric(out, P) <= eps * splitting(out)
/// by single-linkage clustering at increasing scales; both inequalities are
/// checked on the output and a ConstructionError is thrown if unsatisfied.
QPoint separate(const QPoint& p, double eps);

/// Groups sheets by exact value.
QSplit split_point(const QPoint& p);

/// Splits u along the distinct values of pt (requires metric(u, pt) <
/// splitting(pt)/4): returns one QPoint per cluster, sheet counts matching
/// the cluster multiplicities, whose concatenation reproduces u.
std::vector<QPoint> split_value(const QPoint& u, const QPoint& pt);

}  // namespace qvl
