#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qvl {

enum class GridKind { Box, Ball, PolarDisc, PolarAnnulus };

std::string to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& s);

/// Discretized domain: a Cartesian box/ball lattice (m = 1, 2, 3) or an
/// m = 2 polar disc/annulus (Nr rings x Ntheta angles, uniform or geometric
/// radial spacing). Nodes carry quadrature measures; edges carry the lengths
/// and cell weights used by the edge energy and the relaxation solver.
class GridDomain {
  public:
    struct Edge {
        int a;
        int b;
        double len;     ///< frame distance between the nodes (arc length for angular)
        double weight;  ///< cell measure attributed to the edge
        int axis;
    };

    static GridDomain box(std::vector<double> lo, std::vector<double> hi, std::vector<int> cells);
    static GridDomain cube(int m, int cells_per_axis);  ///< [-1,1]^m
    static GridDomain ball(int m, double h, double radius = 1.0);
    static GridDomain polar_disc(int nr, int ntheta, double radius = 1.0, bool center_node = true);
    /// Geometric radial spacing from r_min to radius; no center node.
    static GridDomain polar_disc_geometric(int nr, int ntheta, double r_min, double radius = 1.0);
    static GridDomain polar_annulus(int nr, int ntheta, double r_in, double r_out = 1.0);

    GridKind kind() const { return kind_; }
    int m() const { return m_; }
    int node_count() const { return node_count_; }
    /// Number of difference axes (m for Cartesian, 2 for polar).
    int axes() const { return is_polar() ? 2 : m_; }
    bool is_polar() const { return kind_ == GridKind::PolarDisc || kind_ == GridKind::PolarAnnulus; }

    std::array<double, 3> coord(int node) const;
    bool is_boundary(int node) const;
    std::vector<int> boundary_nodes() const;
    std::vector<int> interior_nodes() const;
    std::vector<int> all_nodes() const;

    /// Neighbor along axis in direction dir (-1/+1); -1 if absent. The polar
    /// center node reports no axis neighbors (it is reached through edges).
    int neighbor(int node, int axis, int dir) const;
    /// Frame distance to that neighbor (arc length r*dtheta for the angular axis).
    double spacing(int node, int axis, int dir) const;
    /// Quadrature measure of the node's cell.
    double measure(int node) const;

    const std::vector<Edge>& edges() const { return edges_; }

    /// Representative spacing (max cell extent), used in h-scaled tolerances.
    double h() const { return h_; }

    // Polar accessors.
    bool has_center() const { return center_; }
    int center_node() const { return 0; }
    int ring_count() const { return nr_; }
    int n_theta() const { return ntheta_; }
    double ring_radius(int ring) const { return radii_[ring - 1]; }
    double theta(int j) const;
    double dtheta() const;
    int ring_of(int node) const;
    int theta_index_of(int node) const;
    int node_at(int ring, int jtheta) const;
    int nearest_ring(double r) const;
    /// Radial extent of the ring's quadrature cell.
    double ring_cell_width(int ring) const;
    /// Inner face radius of the ring's cell.
    double ring_inner_face(int ring) const;

    double outer_radius() const { return radius_; }
    double inner_radius() const { return r_in_; }

    // Cartesian accessors.
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    const std::vector<double>& step() const { return hstep_; }

    std::vector<int> nodes_in_ball(std::span<const double> center, double r) const;

  private:
    GridDomain() = default;
    void build_edges();

    GridKind kind_ = GridKind::Box;
    int m_ = 0;
    int node_count_ = 0;
    double h_ = 0.0;
    std::vector<Edge> edges_;

    // Cartesian state.
    std::vector<double> lo_, hi_, hstep_;
    std::vector<int> npts_;
    // Ball state: lattice index range [-nlat_, nlat_]^m, lookup into compact ids.
    int nlat_ = 0;
    std::vector<int> lattice_lookup_;
    std::vector<std::array<int, 3>> node_lattice_;
    std::vector<char> boundary_flag_;

    // Polar state.
    int nr_ = 0, ntheta_ = 0;
    bool center_ = false;
    double radius_ = 1.0, r_in_ = 0.0;
    std::vector<double> radii_;

    int lattice_node(std::span<const int> idx) const;
};

}  // namespace qvl
