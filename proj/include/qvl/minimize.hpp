#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qvl/competitor.hpp"
#include "qvl/errors.hpp"
#include "qvl/qfield.hpp"

namespace qvl {

struct SolveOptions {
    int max_sweeps = 4000;
    double tolerance = 1e-10;  ///< relative energy decrease over a rematch+sweep step
    int rematch_period = 1;
    int restarts = 1;
    std::uint64_t seed = 1;
    double p = 2.0;
    double relaxation = 1.6;       ///< successive over-relaxation factor in (0, 2)
    double noise_amplitude = 0.1;  ///< initializer perturbation for restarts > 0
    int gradient_steps = 3;        ///< per-node descent steps when p != 2
};

struct DirichletSolution {
    QField field;
    std::vector<double> energy_trace;  ///< objective after each sweep
    std::vector<int> rematch_trace;    ///< edges whose matching changed per sweep
    double final_energy = 0.0;
    int sweeps = 0;
    int restart_used = 0;
    bool converged = false;
};

struct DirichletConvergenceError : ConvergenceError {
    QField last_iterate;
    DirichletConvergenceError(const std::string& what, std::vector<double> trace, QField last)
        : ConvergenceError(what, std::move(trace)), last_iterate(std::move(last)) {}
};

/// Minimizes the edge p-energy with the given boundary values held fixed.
/// Block-coordinate descent: freeze per-edge optimal matchings, relax nodes
/// (exact weighted averaging with over-relaxation for p = 2, backtracking
/// gradient steps otherwise), recompute matchings; best of seeded restarts.
/// The objective never increases across sweeps.
DirichletSolution solve_dirichlet(std::shared_ptr<const GridDomain> domain, const NodeValues& boundary,
                                  const SolveOptions& opts);

/// Modular function: monotone, omega(0+) = 0. Plain std::function.
using ModularFunction = std::function<double(double)>;

struct BallSpec {
    std::vector<double> center;
    double radius;
};

struct AlmostMinRow {
    std::vector<double> center;
    double radius;
    double u_energy;
    double resolve_energy;
    double radial_energy;  ///< -1 when the radial competitor is unavailable
    double best_competitor;
    double ratio;  ///< u_energy / ((1 + omega(r)) * best_competitor)
};

struct AlmostMinReport {
    std::vector<AlmostMinRow> rows;
    double worst_ratio = 0.0;
};

/// Almost-minimality audit: for each ball, compares the edge energy of u
/// against competitors rebuilt from its own trace (an in-place re-solve with
/// the ball boundary frozen, plus the radial competitor on centered polar
/// balls). A necessary-condition check, not a proof.
AlmostMinReport verify_almost_min(const QField& u, const ModularFunction& omega, std::span<const BallSpec> balls,
                                  const SolveOptions& opts);

struct RadialComparisonRow {
    std::vector<double> center;
    double radius;
    double ball_energy;      ///< integral over the ball of the jet norm^p
    double boundary_energy;  ///< tangential integral over the sphere
    double rhs;              ///< (1/(m-p) - eta0) * r * boundary
    double margin;           ///< rhs - ball_energy
    bool pass;
};

struct RadialComparisonReport {
    std::vector<RadialComparisonRow> rows;
    double worst_margin = 0.0;
    bool all_pass = true;
};

/// Checks the radial-comparison decay inequality on sampled balls.
RadialComparisonReport radial_comparison_check(const QField& u, const GapCertificate& cert,
                                               std::span<const BallSpec> balls);

struct DecayRow {
    double radius;
    double ball_energy;
    double boundary_term;  ///< r * boundary tangential energy
    double ratio;          ///< ball_energy / boundary_term
};

struct DecayReport {
    std::vector<double> center;
    double p = 2.0;
    std::vector<DecayRow> rows;
    double slope = 0.0;     ///< least-squares slope of log E vs log r
    double eta_hat = 0.0;   ///< slope - (m - p)
    double fit_residual = 0.0;
    double min_normalized_step = 0.0;  ///< min consecutive increment of r^{-(m-p+eta)} E(r)
    bool degenerate = false;           ///< all sampled energies vanish
};

/// Samples E(r) on the given radii and fits the decay exponent.
DecayReport decay_profile(const QField& u, std::span<const double> center, std::span<const double> radii, double p);

/// Sobolev exponent of p in dimension m-1 (the arbitrary q > p branch picks 2p).
double sobolev_exponent(double p, int m);

struct DiagnosticConstants {
    double p_star;
    double eta;    ///< eta0 / c
    double big_m;  ///< (c^2/eta0^2)^{p*/(p*-p)}
};

/// Constant bookkeeping for the induction-step diagnostics (reporting only).
DiagnosticConstants diagnostic_constants(const GapCertificate& cert);

}  // namespace qvl
