#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "synthesol/errors.hpp"

namespace synthesol {

enum class ManifoldKind { Circle, FlatTorus, Sphere };

/// Chart-based description of one of the catalog manifolds: the circle,
/// flat tori in dimension 1 or 2, and the round unit sphere. The sphere is
/// covered by two colatitude/azimuth charts with orthogonal polar axes
/// (chart 0 poles on the z-axis, chart 1 poles on the x-axis), so every
/// point is at colatitude >= pi/4 from the active chart's poles after
/// normalization.
struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::Circle;
    int dim = 1;
    std::vector<double> periods;      // per-coordinate period, flat kinds only
    double sphere_chart_switch = 0.0; // colatitude switch threshold, sphere only

    static ManifoldSpec circle(double period = 2.0 * EIGEN_PI);
    static ManifoldSpec flat_torus(int dim, double period = 2.0 * EIGEN_PI);
    static ManifoldSpec sphere(double chart_switch = EIGEN_PI / 6.0);

    bool flat() const { return kind != ManifoldKind::Sphere; }
    void validate() const; // throws std::invalid_argument on bad combinations
};

/// Potential energy U as a trigonometric polynomial (circle/torus) or a
/// combination of a fixed basis of smooth functions on the sphere
/// ({x, y, z, xy, yz, zx, x^2-y^2, 3z^2-1} in embedded coordinates).
struct PotentialSpec {
    struct TrigTerm {
        Eigen::VectorXi freq; // integer frequency vector, size = dim
        double amplitude = 0.0;
        bool is_sin = false;
    };
    std::vector<TrigTerm> trig_terms;
    static constexpr int kSphereBasisSize = 8;
    std::array<double, kSphereBasisSize> sphere_coeffs{};

    static PotentialSpec pendulum(); // U(theta) = cos(theta)
    static PotentialSpec torus_cosines(int dim, double amplitude = 1.0);
    static PotentialSpec zero();
    static PotentialSpec sphere_basis(const std::vector<double>& coeffs);
};

/// A point of the manifold in chart coordinates.
struct ChartPoint {
    Eigen::VectorXd q;
    int chart = 0;
};

/// Dense tensors for the small dimensions used here (n <= 2).
struct Tensor3 {
    int n = 0;
    std::vector<double> a;
    void init(int n_) { n = n_; a.assign(static_cast<std::size_t>(n) * n * n, 0.0); }
    double& operator()(int i, int j, int k) { return a[(static_cast<std::size_t>(i) * n + j) * n + k]; }
    double operator()(int i, int j, int k) const { return a[(static_cast<std::size_t>(i) * n + j) * n + k]; }
};

struct Tensor4 {
    int n = 0;
    std::vector<double> a;
    void init(int n_) { n = n_; a.assign(static_cast<std::size_t>(n) * n * n * n, 0.0); }
    double& operator()(int i, int j, int k, int l) {
        return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
    }
};

/// Metric data at a point: g, g^{-1}, first and second coordinate
/// derivatives of g, Christoffel symbols and the Riemann tensor.
///
/// Index conventions: dg(k,i,j) = d_k g_ij, d2g(l,k,i,j) = d_l d_k g_ij,
/// christoffel(k,i,j) = Gamma^k_ij, and riemann(l,i,j,k) = R^l_ijk with
/// R(e_j, e_k) e_i = R^l_ijk e_l.
struct MetricJet {
    Eigen::MatrixXd g;
    Eigen::MatrixXd g_inv;
    Tensor3 dg;
    Tensor4 d2g;
    Tensor3 christoffel;
    Tensor4 riemann;

    int dim() const { return static_cast<int>(g.rows()); }
    /// d_k (g^{-1}) as a matrix.
    Eigen::MatrixXd dg_inv(int k) const;
    /// d_l d_k (g^{-1}) as a matrix.
    Eigen::MatrixXd d2g_inv(int l, int k) const;
    /// (Gamma^k_ij xi_k)_ij, the symmetric matrix entering horizontal lifts.
    Eigen::MatrixXd christoffel_contraction(const Eigen::VectorXd& xi) const;
};

/// Potential data at a point: value, coordinate gradient, covariant Hessian
/// (hessian) and plain coordinate Hessian (hessian_coord).
struct ScalarJet {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;       // covariant: d^2 U - Gamma . dU
    Eigen::MatrixXd hessian_coord; // plain coordinate second derivatives
};

MetricJet metric_jet(const ManifoldSpec& manifold, const ChartPoint& q);
ScalarJet potential_jet(const ManifoldSpec& manifold, const PotentialSpec& pot, const ChartPoint& q);

/// Wrap periodic coordinates into [0, period); re-chart sphere points into
/// the chart whose poles are farthest. Throws ChartDomainError if the point
/// is inside the polar caps of both sphere charts.
ChartPoint normalize_point(const ManifoldSpec& manifold, const ChartPoint& q);

Eigen::VectorXd raise_index(const MetricJet& jet, const Eigen::VectorXd& xi);
Eigen::VectorXd lower_index(const MetricJet& jet, const Eigen::VectorXd& v);
double co_norm(const MetricJet& jet, const Eigen::VectorXd& xi);

/// Sphere chart machinery. Chart 0 embeds (phi, theta) with poles on the
/// z-axis, chart 1 with poles on the x-axis.
Eigen::Vector3d sphere_embed(const ChartPoint& q);
ChartPoint sphere_from_embedded(const Eigen::Vector3d& p, int chart);
/// Distance (in radians) to the nearest singular pole of the given chart.
double sphere_pole_distance(const ChartPoint& q);
/// Re-express a point and covector in the other sphere chart.
void sphere_transition(const ManifoldSpec& manifold, ChartPoint& q, Eigen::VectorXd& xi, int target_chart);
/// Minimal periodic representative of a coordinate difference.
Eigen::VectorXd wrap_difference(const ManifoldSpec& manifold, const Eigen::VectorXd& d);

} // namespace synthesol
