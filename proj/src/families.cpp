#include "qvl/families.hpp"

#include <cmath>

#include "qvl/errors.hpp"

namespace qvl {

QField make_constant_field(std::shared_ptr<const GridDomain> domain, const QPoint& value) {
    return QField::constant(std::move(domain), value);
}

QField make_linear_field(std::shared_ptr<const GridDomain> domain, const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    const int m = domain->m();
    for (const auto& row : a) {
        if (static_cast<int>(row.size()) != m) throw ShapeError("make_linear_field: matrix must be n x m");
    }
    return sample_field(std::move(domain), 1, n, [&a, n, m](const std::array<double, 3>& x) {
        std::vector<double> value(n, 0.0);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < m; ++c) value[r] += a[r][c] * x[c];
        }
        return QPoint(1, n, std::move(value));
    });
}

QField make_harmonic_field(std::shared_ptr<const GridDomain> domain, int degree) {
    if (domain->m() != 2) throw ParameterError("make_harmonic_field: m = 2 only");
    if (degree < 1) throw ParameterError("make_harmonic_field: degree >= 1");
    return sample_field(std::move(domain), 1, 1, [degree](const std::array<double, 3>& x) {
        const double r = std::hypot(x[0], x[1]);
        const double th = std::atan2(x[1], x[0]);
        return QPoint(1, 1, {std::pow(r, degree) * std::cos(degree * th)});
    });
}

QField make_branch_pair_field(std::shared_ptr<const GridDomain> domain, int k) {
    if (domain->m() != 2) throw ParameterError("make_branch_pair_field: m = 2 only");
    if (k < 1) throw ParameterError("make_branch_pair_field: k >= 1");
    return sample_field(std::move(domain), 2, 2, [k](const std::array<double, 3>& x) {
        const double r = std::hypot(x[0], x[1]);
        const double th = std::atan2(x[1], x[0]);
        const double rho = std::pow(r, 0.5 * k);
        const double c = rho * std::cos(0.5 * k * th);
        const double s = rho * std::sin(0.5 * k * th);
        return QPoint::from_rows({{c, s}, {-c, -s}});
    });
}

QField make_branch_pair_angular_field(std::shared_ptr<const GridDomain> domain, int k) {
    if (domain->m() != 2) throw ParameterError("make_branch_pair_angular_field: m = 2 only");
    return sample_field(std::move(domain), 2, 2, [k](const std::array<double, 3>& x) {
        const double th = std::atan2(x[1], x[0]);
        const double c = std::cos(0.5 * k * th);
        const double s = std::sin(0.5 * k * th);
        return QPoint::from_rows({{c, s}, {-c, -s}});
    });
}

}  // namespace qvl
