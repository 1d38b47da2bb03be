#pragma once

#include <Eigen/Dense>
#include <vector>

#include "synthesol/flow.hpp"

namespace synthesol {

/// The curvature operator of the Hamiltonian at z, acting on covector
/// components: Riemann term plus covariant Hessian of the potential. It is
/// self-adjoint for the metric inner product, so its spectrum is real.
struct CurvatureOperator {
    Eigen::MatrixXd matrix;      // action on covector components
    Eigen::VectorXd eigenvalues; // real spectrum (metric-symmetrized)
};

CurvatureOperator curvature_operator(const ManifoldSpec& m, const PotentialSpec& pot,
                                     const CotangentState& z);

/// Stratified samples of the energy sublevel set {H <= max U}: a q-grid
/// crossed with metric-unit covector directions and radii up to the local
/// bound sqrt(2 (max U - U(q))), always including the zero section and the
/// boundary shell.
std::vector<CotangentState> sample_B_H(const ManifoldSpec& m, const PotentialSpec& pot,
                                       int density);

struct ConditionReport {
    double alpha = 0.0;
    double lambda_max = 0.0;
    CotangentState argmax_state;
    double alpha_critical = 0.0;
    bool pass = false;
    int samples_used = 0;
    double margin = 0.0;
    double safety_margin = 0.0;
};

/// Sampled verification of the sufficient condition: largest curvature
/// eigenvalue over B_H against alpha^2/4, with a local polish step at the
/// sampled argmax. A safety margin guards the strict inequality.
ConditionReport check_condition(const ManifoldSpec& m, const PotentialSpec& pot, double alpha,
                                int density, double safety_margin = 1e-6);

struct CorollaryBound {
    bool pass = false;
    double rhs = 0.0;
    double max_hessian_eigenvalue = 0.0;
};

/// The coarser sectional-curvature bound: max eigenvalue of the covariant
/// Hessian against alpha^2/4 - 2 r (max U - min U), with r the sectional
/// curvature bound of the catalog manifold (0 flat, 1 sphere).
CorollaryBound corollary_bound(const ManifoldSpec& m, const PotentialSpec& pot, double alpha,
                               double safety_margin = 1e-6);

} // namespace synthesol
