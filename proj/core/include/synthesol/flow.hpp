#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "synthesol/geometry.hpp"

namespace synthesol {

/// A point z = (q, xi) of T*M in chart coordinates; xi is the rescaled
/// momentum of the characteristic flow.
struct CotangentState {
    Eigen::VectorXd q;
    Eigen::VectorXd xi;
    int chart = 0;

    CotangentState() = default;
    CotangentState(Eigen::VectorXd q_, Eigen::VectorXd xi_, int chart_ = 0)
        : q(std::move(q_)), xi(std::move(xi_)), chart(chart_) {}
    static CotangentState on_circle(double theta, double xi) {
        return {Eigen::VectorXd::Constant(1, theta), Eigen::VectorXd::Constant(1, xi)};
    }
    ChartPoint point() const { return ChartPoint{q, chart}; }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<CotangentState> states;
    std::vector<double> energies;
    /// Quadrature of alpha * |xi|^2, integrated alongside the state; the
    /// energy law says energies[k] - energies[0] should match it.
    std::vector<double> discount_work;

    std::size_t size() const { return times.size(); }
    const CotangentState& back_state() const { return states.back(); }
};

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 1e-2;
    double min_step = 1e-13;
    /// Positive value switches to deterministic fixed-step integration.
    double fixed_step = 0.0;
    /// Throw BlowupError when |xi| (euclidean) exceeds this bound.
    double blowup_xi_bound = std::numeric_limits<double>::infinity();
    /// Record only every k-th accepted step (endpoints always recorded).
    int record_stride = 1;
};

double hamiltonian(const ManifoldSpec& m, const PotentialSpec& pot, const CotangentState& z);

/// Right-hand side of the characteristic flow with discount alpha:
/// dq = g^{-1} xi, dxi_i = -d_i U - (1/2) xi^T (d_i g^{-1}) xi + alpha xi_i.
void vector_field_h_alpha(const ManifoldSpec& m, const PotentialSpec& pot,
                          const CotangentState& z, double alpha,
                          Eigen::VectorXd& dq, Eigen::VectorXd& dxi);

/// Adaptive embedded Runge-Kutta integration of the characteristic flow over
/// [t0, t1] (backward spans allowed). Sphere trajectories are re-chartered
/// when they approach a chart pole.
Trajectory integrate(const ManifoldSpec& m, const PotentialSpec& pot, const CotangentState& z0,
                     double alpha, double t0, double t1, const StepControl& ctl = {});

/// Max deviation of the integrated energy from the work quadrature,
/// normalized per sample: max_k |H_k - H_0 - W_k|.
double energy_law_residual(const Trajectory& traj, double alpha);

enum class Boundedness { BoundedTo, Escaped, Undecided };

struct BoundednessResult {
    Boundedness kind = Boundedness::Undecided;
    ChartPoint limit;     // equilibrium position for BoundedTo
    double decision_time = 0.0;
};

struct BoundednessOptions {
    double near_ball = 0.1;   // close-approach radius for the BoundedTo verdict
    double energy_tol = 1e-9;
};

BoundednessResult classify_boundedness(const ManifoldSpec& m, const PotentialSpec& pot,
                                       const CotangentState& z0, double alpha, double t_max,
                                       const BoundednessOptions& opts = {});

enum class EquilibriumType { Saddle, UnstableNode, UnstableFocus, Degenerate };

struct EquilibriumInfo {
    ChartPoint q_star;
    double potential_value = 0.0;
    std::vector<std::complex<double>> eigenvalues; // of the 2n x 2n linearization
    EquilibriumType type = EquilibriumType::Degenerate;
    std::vector<EquilibriumType> block_types;      // per Hessian eigen-block
    Eigen::VectorXd hessian_eigenvalues;           // metric eigenvalues of the covariant Hessian
    bool degenerate = false;
};

/// Newton refinement of dU = 0 from a dense grid of seeds, deduplicated.
/// Degenerate Hessians (non-Morse potentials) are flagged, not dropped.
std::vector<EquilibriumInfo> find_equilibria(const ManifoldSpec& m, const PotentialSpec& pot);

/// Eigenvalues and type of the linearized flow at an equilibrium, for the
/// given discount. Throws DegenerateError on a (near) singular Hessian.
EquilibriumInfo classify_equilibrium(const ManifoldSpec& m, const PotentialSpec& pot,
                                     const ChartPoint& q_star, double alpha);

/// The covector sign flip z -> -z conjugating the flow with the
/// time-reversed positive-friction flow.
CotangentState dissipative_conjugate(const CotangentState& z);

struct PotentialRange {
    double max_value;
    double min_value;
    ChartPoint argmax;
};

/// max/min of U over the manifold (grid scan plus Newton polish on dU = 0).
PotentialRange potential_range(const ManifoldSpec& m, const PotentialSpec& pot);

/// Step control with the escape bound derived from the potential range.
StepControl default_step_control(const ManifoldSpec& m, const PotentialSpec& pot);

const char* to_string(EquilibriumType t);

} // namespace synthesol
