#include "qvl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qvl/errors.hpp"

namespace qvl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string to_string(GridKind kind) {
    switch (kind) {
        case GridKind::Box: return "box";
        case GridKind::Ball: return "ball";
        case GridKind::PolarDisc: return "polar-disc";
        case GridKind::PolarAnnulus: return "polar-annulus";
    }
    return "box";
}

GridKind grid_kind_from_string(const std::string& s) {
    if (s == "box" || s == "cube") return GridKind::Box;
    if (s == "ball") return GridKind::Ball;
    if (s == "polar-disc") return GridKind::PolarDisc;
    if (s == "polar-annulus") return GridKind::PolarAnnulus;
    throw ParameterError("unknown grid kind: " + s);
}

GridDomain GridDomain::box(std::vector<double> lo, std::vector<double> hi, std::vector<int> cells) {
    const int m = static_cast<int>(lo.size());
    if (m < 1 || m > 3 || hi.size() != lo.size() || cells.size() != lo.size()) {
        throw ParameterError("box: need matching lo/hi/cells for m in {1,2,3}");
    }
    GridDomain g;
    g.kind_ = GridKind::Box;
    g.m_ = m;
    g.lo_ = std::move(lo);
    g.hi_ = std::move(hi);
    g.npts_.resize(m);
    g.hstep_.resize(m);
    int count = 1;
    double hmax = 0.0;
    for (int k = 0; k < m; ++k) {
        if (cells[k] < 1 || g.hi_[k] <= g.lo_[k]) throw ParameterError("box: bad axis extent");
        g.npts_[k] = cells[k] + 1;
        g.hstep_[k] = (g.hi_[k] - g.lo_[k]) / cells[k];
        hmax = std::max(hmax, g.hstep_[k]);
        count *= g.npts_[k];
    }
    g.node_count_ = count;
    g.h_ = hmax;
    g.build_edges();
    return g;
}

GridDomain GridDomain::cube(int m, int cells_per_axis) {
    return box(std::vector<double>(m, -1.0), std::vector<double>(m, 1.0), std::vector<int>(m, cells_per_axis));
}

GridDomain GridDomain::ball(int m, double h, double radius) {
    if (m < 1 || m > 3) throw ParameterError("ball: m must be 1, 2, or 3");
    if (h <= 0.0 || radius <= 0.0) throw ParameterError("ball: need h > 0 and radius > 0");
    GridDomain g;
    g.kind_ = GridKind::Ball;
    g.m_ = m;
    g.radius_ = radius;
    g.hstep_.assign(m, h);
    g.h_ = h;
    g.nlat_ = static_cast<int>(std::floor(radius / h + 1e-12));
    const int width = 2 * g.nlat_ + 1;
    std::size_t boxsize = 1;
    for (int k = 0; k < m; ++k) boxsize *= width;
    g.lattice_lookup_.assign(boxsize, -1);

    std::array<int, 3> idx{0, 0, 0};
    const double r2 = radius * radius * (1.0 + 1e-12);
    auto in_ball = [&](const std::array<int, 3>& ix) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += (ix[k] * h) * (ix[k] * h);
        return s <= r2;
    };
    // Enumerate lattice points in row-major order over [-nlat, nlat]^m.
    std::vector<int> cursor(m, -g.nlat_);
    while (true) {
        for (int k = 0; k < m; ++k) idx[k] = cursor[k];
        if (in_ball(idx)) {
            std::size_t flat = 0;
            for (int k = 0; k < m; ++k) flat = flat * width + (idx[k] + g.nlat_);
            g.lattice_lookup_[flat] = static_cast<int>(g.node_lattice_.size());
            g.node_lattice_.push_back(idx);
        }
        int k = m - 1;
        while (k >= 0 && ++cursor[k] > g.nlat_) cursor[k--] = -g.nlat_;
        if (k < 0) break;
    }
    g.node_count_ = static_cast<int>(g.node_lattice_.size());
    if (g.node_count_ == 0) throw ParameterError("ball: grid too coarse");

    g.boundary_flag_.assign(g.node_count_, 0);
    for (int node = 0; node < g.node_count_; ++node) {
        for (int k = 0; k < m && !g.boundary_flag_[node]; ++k) {
            for (int dir = -1; dir <= 1; dir += 2) {
                std::array<int, 3> nb = g.node_lattice_[node];
                nb[k] += dir;
                bool outside = std::abs(nb[k]) > g.nlat_ || !in_ball(nb);
                if (outside) {
                    g.boundary_flag_[node] = 1;
                    break;
                }
            }
        }
    }
    g.build_edges();
    return g;
}

GridDomain GridDomain::polar_disc(int nr, int ntheta, double radius, bool center_node) {
    if (nr < 2 || ntheta < 4) throw ParameterError("polar_disc: need nr >= 2, ntheta >= 4");
    GridDomain g;
    g.kind_ = GridKind::PolarDisc;
    g.m_ = 2;
    g.nr_ = nr;
    g.ntheta_ = ntheta;
    g.radius_ = radius;
    g.center_ = center_node;
    g.radii_.resize(nr);
    const double dr = radius / nr;
    for (int i = 1; i <= nr; ++i) g.radii_[i - 1] = i * dr;
    g.node_count_ = (center_node ? 1 : 0) + nr * ntheta;
    g.h_ = std::max(dr, radius * kTwoPi / ntheta);
    g.build_edges();
    return g;
}

GridDomain GridDomain::polar_disc_geometric(int nr, int ntheta, double r_min, double radius) {
    if (nr < 2 || ntheta < 4) throw ParameterError("polar_disc_geometric: need nr >= 2, ntheta >= 4");
    if (!(r_min > 0.0 && r_min < radius)) throw ParameterError("polar_disc_geometric: need 0 < r_min < radius");
    GridDomain g;
    g.kind_ = GridKind::PolarDisc;
    g.m_ = 2;
    g.nr_ = nr;
    g.ntheta_ = ntheta;
    g.radius_ = radius;
    g.center_ = false;
    g.radii_.resize(nr);
    const double ratio = std::pow(radius / r_min, 1.0 / (nr - 1));
    for (int i = 0; i < nr; ++i) g.radii_[i] = r_min * std::pow(ratio, i);
    g.radii_.back() = radius;
    g.node_count_ = nr * ntheta;
    g.h_ = std::max(g.radii_[nr - 1] - g.radii_[nr - 2], radius * kTwoPi / ntheta);
    g.build_edges();
    return g;
}

GridDomain GridDomain::polar_annulus(int nr, int ntheta, double r_in, double r_out) {
    if (nr < 1 || ntheta < 4) throw ParameterError("polar_annulus: need nr >= 1, ntheta >= 4");
    if (!(r_in > 0.0 && r_in < r_out)) throw ParameterError("polar_annulus: need 0 < r_in < r_out");
    GridDomain g;
    g.kind_ = GridKind::PolarAnnulus;
    g.m_ = 2;
    g.nr_ = nr + 1;  // rings r_in .. r_out inclusive
    g.ntheta_ = ntheta;
    g.radius_ = r_out;
    g.r_in_ = r_in;
    g.center_ = false;
    g.radii_.resize(g.nr_);
    const double dr = (r_out - r_in) / nr;
    for (int i = 0; i < g.nr_; ++i) g.radii_[i] = r_in + i * dr;
    g.node_count_ = g.nr_ * ntheta;
    g.h_ = std::max(dr, r_out * kTwoPi / ntheta);
    g.build_edges();
    return g;
}

double GridDomain::theta(int j) const { return kTwoPi * j / ntheta_; }
double GridDomain::dtheta() const { return kTwoPi / ntheta_; }

int GridDomain::ring_of(int node) const {
    if (center_ && node == 0) return 0;
    return (node - (center_ ? 1 : 0)) / ntheta_ + 1;
}

int GridDomain::theta_index_of(int node) const { return (node - (center_ ? 1 : 0)) % ntheta_; }

int GridDomain::node_at(int ring, int jtheta) const {
    const int j = ((jtheta % ntheta_) + ntheta_) % ntheta_;
    return (center_ ? 1 : 0) + (ring - 1) * ntheta_ + j;
}

int GridDomain::nearest_ring(double r) const {
    int best = 1;
    double bestd = std::abs(radii_[0] - r);
    for (int i = 2; i <= nr_; ++i) {
        const double d = std::abs(radii_[i - 1] - r);
        if (d < bestd) {
            bestd = d;
            best = i;
        }
    }
    return best;
}

double GridDomain::ring_inner_face(int ring) const {
    if (ring == 1) {
        if (kind_ == GridKind::PolarAnnulus) return r_in_;
        // innermost disc ring: cell reaches halfway to the origin/previous scale
        const double below = center_ ? 0.0 : std::max(radii_[0] - (radii_[1] - radii_[0]) * 0.5, radii_[0] * 0.5);
        return center_ ? radii_[0] * 0.5 : below;
    }
    return 0.5 * (radii_[ring - 2] + radii_[ring - 1]);
}

double GridDomain::ring_cell_width(int ring) const {
    const double inner = ring_inner_face(ring);
    const double outer = (ring == nr_) ? radii_[nr_ - 1] : 0.5 * (radii_[ring - 1] + radii_[ring]);
    return outer - inner;
}

std::array<double, 3> GridDomain::coord(int node) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    if (is_polar()) {
        if (center_ && node == 0) return x;
        const double r = radii_[ring_of(node) - 1];
        const double th = theta(theta_index_of(node));
        x[0] = r * std::cos(th);
        x[1] = r * std::sin(th);
        return x;
    }
    if (kind_ == GridKind::Ball) {
        for (int k = 0; k < m_; ++k) x[k] = node_lattice_[node][k] * hstep_[k];
        return x;
    }
    int rem = node;
    for (int k = m_ - 1; k >= 0; --k) {
        const int i = rem % npts_[k];
        rem /= npts_[k];
        x[k] = lo_[k] + i * hstep_[k];
    }
    return x;
}

bool GridDomain::is_boundary(int node) const {
    if (is_polar()) {
        if (center_ && node == 0) return false;
        const int ring = ring_of(node);
        if (kind_ == GridKind::PolarAnnulus) return ring == 1 || ring == nr_;
        return ring == nr_;
    }
    if (kind_ == GridKind::Ball) return boundary_flag_[node] != 0;
    int rem = node;
    for (int k = m_ - 1; k >= 0; --k) {
        const int i = rem % npts_[k];
        rem /= npts_[k];
        if (i == 0 || i == npts_[k] - 1) return true;
    }
    return false;
}

std::vector<int> GridDomain::boundary_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < node_count_; ++i) {
        if (is_boundary(i)) out.push_back(i);
    }
    return out;
}

std::vector<int> GridDomain::interior_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < node_count_; ++i) {
        if (!is_boundary(i)) out.push_back(i);
    }
    return out;
}

std::vector<int> GridDomain::all_nodes() const {
    std::vector<int> out(node_count_);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

int GridDomain::lattice_node(std::span<const int> idx) const {
    const int width = 2 * nlat_ + 1;
    std::size_t flat = 0;
    for (int k = 0; k < m_; ++k) {
        if (std::abs(idx[k]) > nlat_) return -1;
        flat = flat * width + (idx[k] + nlat_);
    }
    return lattice_lookup_[flat];
}

int GridDomain::neighbor(int node, int axis, int dir) const {
    if (is_polar()) {
        if (center_ && node == 0) return -1;
        const int ring = ring_of(node);
        const int j = theta_index_of(node);
        if (axis == 0) {
            const int target = ring + dir;
            if (target >= 1 && target <= nr_) return node_at(target, j);
            if (target == 0 && center_) return 0;
            return -1;
        }
        return node_at(ring, j + dir);
    }
    if (kind_ == GridKind::Ball) {
        std::array<int, 3> idx = node_lattice_[node];
        idx[axis] += dir;
        return lattice_node(std::span<const int>(idx.data(), m_));
    }
    // Box: decode, step, re-encode.
    std::array<int, 3> idx{0, 0, 0};
    int rem = node;
    for (int k = m_ - 1; k >= 0; --k) {
        idx[k] = rem % npts_[k];
        rem /= npts_[k];
    }
    idx[axis] += dir;
    if (idx[axis] < 0 || idx[axis] >= npts_[axis]) return -1;
    int out = 0;
    for (int k = 0; k < m_; ++k) out = out * npts_[k] + idx[k];
    return out;
}

double GridDomain::spacing(int node, int axis, int dir) const {
    if (is_polar()) {
        const int ring = ring_of(node);
        if (axis == 1) return radii_[ring - 1] * dtheta();
        const int target = ring + dir;
        if (target == 0 && center_) return radii_[0];
        return std::abs(radii_[target - 1] - radii_[ring - 1]);
    }
    (void)dir;
    return hstep_[axis];
}

double GridDomain::measure(int node) const {
    if (is_polar()) {
        if (center_ && node == 0) {
            const double rc = radii_[0] * 0.5;
            return std::numbers::pi * rc * rc;
        }
        const int ring = ring_of(node);
        return radii_[ring - 1] * ring_cell_width(ring) * dtheta();
    }
    double w = 1.0;
    for (int k = 0; k < m_; ++k) w *= hstep_[k];
    return w;
}

void GridDomain::build_edges() {
    edges_.clear();
    if (is_polar()) {
        const double dth = dtheta();
        if (center_) {
            const double r1 = radii_[0];
            for (int j = 0; j < ntheta_; ++j) {
                edges_.push_back({0, node_at(1, j), r1, 0.5 * r1 * r1 * dth, 0});
            }
        }
        for (int ring = 1; ring <= nr_; ++ring) {
            const double r = radii_[ring - 1];
            for (int j = 0; j < ntheta_; ++j) {
                const int a = node_at(ring, j);
                if (ring < nr_) {
                    const double rn = radii_[ring];
                    edges_.push_back({a, node_at(ring + 1, j), rn - r, 0.5 * (r + rn) * (rn - r) * dth, 0});
                }
                edges_.push_back({a, node_at(ring, j + 1), r * dth, r * ring_cell_width(ring) * dth, 1});
            }
        }
        return;
    }
    double cell = 1.0;
    for (int k = 0; k < m_; ++k) cell *= hstep_[k];
    for (int node = 0; node < node_count_; ++node) {
        for (int k = 0; k < m_; ++k) {
            const int nb = neighbor(node, k, +1);
            if (nb >= 0) edges_.push_back({node, nb, hstep_[k], cell, k});
        }
    }
}

std::vector<int> GridDomain::nodes_in_ball(std::span<const double> center, double r) const {
    std::vector<int> out;
    const double r2 = r * r * (1.0 + 1e-12);
    for (int node = 0; node < node_count_; ++node) {
        const auto x = coord(node);
        double s = 0.0;
        for (int k = 0; k < m_; ++k) {
            const double d = x[k] - (k < static_cast<int>(center.size()) ? center[k] : 0.0);
            s += d * d;
        }
        if (s <= r2) out.push_back(node);
    }
    return out;
}

}  // namespace qvl
