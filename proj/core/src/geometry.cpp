#include "synthesol/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace synthesol {

namespace {

constexpr double kPi = EIGEN_PI;

double wrap_into(double x, double period) {
    double y = std::fmod(x, period);
    if (y < 0.0) y += period;
    // fmod can land exactly on period after the correction
    if (y >= period) y -= period;
    return y;
}

// Permutation sending the chart-0 embedding to the chart-1 embedding:
// poles move from the z-axis to the x-axis.
Eigen::Matrix3d chart1_permutation() {
    Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
    p(0, 2) = 1.0;
    p(1, 0) = 1.0;
    p(2, 1) = 1.0;
    return p;
}

// Embedding derivatives of the colatitude/azimuth chart about the z-axis.
void sphere_embedding_jets(double phi, double theta,
                           Eigen::Vector3d& e,
                           Eigen::Matrix<double, 3, 2>& de,
                           std::array<Eigen::Vector3d, 3>& d2e) {
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double st = std::sin(theta), ct = std::cos(theta);
    e = {sp * ct, sp * st, cp};
    de.col(0) = Eigen::Vector3d(cp * ct, cp * st, -sp);
    de.col(1) = Eigen::Vector3d(-sp * st, sp * ct, 0.0);
    d2e[0] = Eigen::Vector3d(-sp * ct, -sp * st, -cp); // phi phi
    d2e[1] = Eigen::Vector3d(-cp * st, cp * ct, 0.0);  // phi theta
    d2e[2] = Eigen::Vector3d(-sp * ct, -sp * st, 0.0); // theta theta
}

struct SphereBasisJet {
    double value;
    Eigen::Vector3d grad;
    Eigen::Matrix3d hess;
};

// Fixed smooth basis on S^2 in embedded coordinates:
// {x, y, z, xy, yz, zx, x^2 - y^2, 3z^2 - 1}.
SphereBasisJet sphere_basis_jet(int i, const Eigen::Vector3d& p) {
    SphereBasisJet b;
    b.grad.setZero();
    b.hess.setZero();
    const double x = p.x(), y = p.y(), z = p.z();
    switch (i) {
        case 0: b.value = x; b.grad = {1, 0, 0}; break;
        case 1: b.value = y; b.grad = {0, 1, 0}; break;
        case 2: b.value = z; b.grad = {0, 0, 1}; break;
        case 3:
            b.value = x * y; b.grad = {y, x, 0};
            b.hess(0, 1) = b.hess(1, 0) = 1.0;
            break;
        case 4:
            b.value = y * z; b.grad = {0, z, y};
            b.hess(1, 2) = b.hess(2, 1) = 1.0;
            break;
        case 5:
            b.value = z * x; b.grad = {z, 0, x};
            b.hess(0, 2) = b.hess(2, 0) = 1.0;
            break;
        case 6:
            b.value = x * x - y * y; b.grad = {2 * x, -2 * y, 0};
            b.hess(0, 0) = 2.0; b.hess(1, 1) = -2.0;
            break;
        case 7:
            b.value = 3 * z * z - 1.0; b.grad = {0, 0, 6 * z};
            b.hess(2, 2) = 6.0;
            break;
        default: b.value = 0.0; break;
    }
    return b;
}

void derived_connection(MetricJet& jet) {
    const int n = jet.dim();
    jet.christoffel.init(n);
    jet.riemann.init(n);

    // Gamma^k_ij = (1/2) g^{km} (d_i g_mj + d_j g_mi - d_m g_ij)
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int m = 0; m < n; ++m)
                    s += jet.g_inv(k, m) *
                         (jet.dg(i, m, j) + jet.dg(j, m, i) - jet.dg(m, i, j));
                jet.christoffel(k, i, j) = 0.5 * s;
            }

    // d_l Gamma^k_ij, from dg and d2g
    Tensor4 dgamma;
    dgamma.init(n);
    for (int l = 0; l < n; ++l) {
        const Eigen::MatrixXd dginv = jet.dg_inv(l);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m) {
                        s += dginv(k, m) *
                             (jet.dg(i, m, j) + jet.dg(j, m, i) - jet.dg(m, i, j));
                        s += jet.g_inv(k, m) *
                             (jet.d2g(l, i, m, j) + jet.d2g(l, j, m, i) - jet.d2g(l, m, i, j));
                    }
                    dgamma(l, k, i, j) = 0.5 * s;
                }
    }

    // R^l_ijk = d_j Gamma^l_ik - d_k Gamma^l_ij
    //           + Gamma^l_jm Gamma^m_ik - Gamma^l_km Gamma^m_ij
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = dgamma(j, l, i, k) - dgamma(k, l, i, j);
                    for (int m = 0; m < n; ++m)
                        s += jet.christoffel(l, j, m) * jet.christoffel(m, i, k) -
                             jet.christoffel(l, k, m) * jet.christoffel(m, i, j);
                    jet.riemann(l, i, j, k) = s;
                }
}

} // namespace

ManifoldSpec ManifoldSpec::circle(double period) {
    ManifoldSpec m;
    m.kind = ManifoldKind::Circle;
    m.dim = 1;
    m.periods = {period};
    return m;
}

ManifoldSpec ManifoldSpec::flat_torus(int dim, double period) {
    ManifoldSpec m;
    m.kind = ManifoldKind::FlatTorus;
    m.dim = dim;
    m.periods.assign(static_cast<std::size_t>(dim), period);
    return m;
}

ManifoldSpec ManifoldSpec::sphere(double chart_switch) {
    ManifoldSpec m;
    m.kind = ManifoldKind::Sphere;
    m.dim = 2;
    m.sphere_chart_switch = chart_switch;
    return m;
}

void ManifoldSpec::validate() const {
    switch (kind) {
        case ManifoldKind::Circle:
            if (dim != 1) throw std::invalid_argument("circle requires dim = 1");
            break;
        case ManifoldKind::FlatTorus:
            if (dim != 1 && dim != 2) throw std::invalid_argument("flat torus requires dim 1 or 2");
            break;
        case ManifoldKind::Sphere:
            if (dim != 2) throw std::invalid_argument("sphere requires dim = 2");
            if (!(sphere_chart_switch > 0.0) || sphere_chart_switch >= kPi / 4.0)
                throw std::invalid_argument("sphere_chart_switch must lie in (0, pi/4)");
            break;
    }
    if (flat()) {
        if (static_cast<int>(periods.size()) != dim)
            throw std::invalid_argument("periods must have one entry per coordinate");
        for (double p : periods)
            if (!(p > 0.0)) throw std::invalid_argument("periods must be positive");
    }
}

PotentialSpec PotentialSpec::pendulum() {
    PotentialSpec p;
    PotentialSpec::TrigTerm t;
    t.freq = Eigen::VectorXi::Constant(1, 1);
    t.amplitude = 1.0;
    p.trig_terms.push_back(t);
    return p;
}

PotentialSpec PotentialSpec::torus_cosines(int dim, double amplitude) {
    PotentialSpec p;
    for (int i = 0; i < dim; ++i) {
        PotentialSpec::TrigTerm t;
        t.freq = Eigen::VectorXi::Zero(dim);
        t.freq(i) = 1;
        t.amplitude = amplitude;
        p.trig_terms.push_back(t);
    }
    return p;
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::sphere_basis(const std::vector<double>& coeffs) {
    PotentialSpec p;
    for (std::size_t i = 0; i < coeffs.size() && i < kSphereBasisSize; ++i)
        p.sphere_coeffs[i] = coeffs[i];
    return p;
}

Eigen::MatrixXd MetricJet::dg_inv(int k) const {
    const int n = dim();
    Eigen::MatrixXd dgk(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dgk(i, j) = dg(k, i, j);
    return -g_inv * dgk * g_inv;
}

Eigen::MatrixXd MetricJet::d2g_inv(int l, int k) const {
    const int n = dim();
    Eigen::MatrixXd dgk(n, n), d2glk(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            dgk(i, j) = dg(k, i, j);
            d2glk(i, j) = d2g(l, k, i, j);
        }
    const Eigen::MatrixXd dginv_l = dg_inv(l);
    return -(dginv_l * dgk * g_inv + g_inv * d2glk * g_inv + g_inv * dgk * dginv_l);
}

Eigen::MatrixXd MetricJet::christoffel_contraction(const Eigen::VectorXd& xi) const {
    const int n = dim();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) c(i, j) += christoffel(k, i, j) * xi(k);
    return c;
}

MetricJet metric_jet(const ManifoldSpec& manifold, const ChartPoint& q) {
    const int n = manifold.dim;
    MetricJet jet;
    jet.dg.init(n);
    jet.d2g.init(n);

    if (manifold.flat()) {
        jet.g = Eigen::MatrixXd::Identity(n, n);
        jet.g_inv = jet.g;
        derived_connection(jet);
        return jet;
    }

    const double phi = q.q(0);
    const double pole_dist = sphere_pole_distance(q);
    if (pole_dist < manifold.sphere_chart_switch)
        throw ChartDomainError("sphere point too close to a chart pole");

    const double sp = std::sin(phi), cp = std::cos(phi);
    jet.g = Eigen::MatrixXd::Identity(2, 2);
    jet.g(1, 1) = sp * sp;
    jet.g_inv = Eigen::MatrixXd::Identity(2, 2);
    jet.g_inv(1, 1) = 1.0 / (sp * sp);
    jet.dg(0, 1, 1) = 2.0 * sp * cp;          // d_phi g_tt = sin(2 phi)
    jet.d2g(0, 0, 1, 1) = 2.0 * (cp * cp - sp * sp); // 2 cos(2 phi)
    derived_connection(jet);
    return jet;
}

ScalarJet potential_jet(const ManifoldSpec& manifold, const PotentialSpec& pot, const ChartPoint& q) {
    const int n = manifold.dim;
    ScalarJet jet;
    jet.gradient = Eigen::VectorXd::Zero(n);
    jet.hessian_coord = Eigen::MatrixXd::Zero(n, n);

    if (manifold.flat()) {
        for (const auto& t : pot.trig_terms) {
            const double phase = t.freq.cast<double>().dot(q.q);
            const double c = std::cos(phase), s = std::sin(phase);
            const Eigen::VectorXd k = t.freq.cast<double>();
            if (t.is_sin) {
                jet.value += t.amplitude * s;
                jet.gradient += t.amplitude * c * k;
                jet.hessian_coord -= t.amplitude * s * (k * k.transpose());
            } else {
                jet.value += t.amplitude * c;
                jet.gradient -= t.amplitude * s * k;
                jet.hessian_coord -= t.amplitude * c * (k * k.transpose());
            }
        }
        jet.hessian = jet.hessian_coord;
        return jet;
    }

    // Sphere: chain rule through the chart embedding.
    Eigen::Vector3d e;
    Eigen::Matrix<double, 3, 2> de;
    std::array<Eigen::Vector3d, 3> d2e;
    sphere_embedding_jets(q.q(0), q.q(1), e, de, d2e);
    if (q.chart == 1) {
        const Eigen::Matrix3d p = chart1_permutation();
        e = p * e;
        de = p * de;
        for (auto& v : d2e) v = p * v;
    }

    Eigen::Vector3d grad3 = Eigen::Vector3d::Zero();
    Eigen::Matrix3d hess3 = Eigen::Matrix3d::Zero();
    for (int i = 0; i < PotentialSpec::kSphereBasisSize; ++i) {
        const double c = pot.sphere_coeffs[i];
        if (c == 0.0) continue;
        const SphereBasisJet b = sphere_basis_jet(i, e);
        jet.value += c * b.value;
        grad3 += c * b.grad;
        hess3 += c * b.hess;
    }
    jet.gradient = de.transpose() * grad3;
    jet.hessian_coord = de.transpose() * hess3 * de;
    jet.hessian_coord(0, 0) += grad3.dot(d2e[0]);
    jet.hessian_coord(0, 1) += grad3.dot(d2e[1]);
    jet.hessian_coord(1, 0) += grad3.dot(d2e[1]);
    jet.hessian_coord(1, 1) += grad3.dot(d2e[2]);

    const MetricJet m = metric_jet(manifold, q);
    jet.hessian = jet.hessian_coord;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                jet.hessian(i, j) -= m.christoffel(k, i, j) * jet.gradient(k);
    return jet;
}

ChartPoint normalize_point(const ManifoldSpec& manifold, const ChartPoint& q) {
    if (manifold.flat()) {
        ChartPoint out = q;
        for (int i = 0; i < manifold.dim; ++i) out.q(i) = wrap_into(q.q(i), manifold.periods[i]);
        out.chart = 0;
        return out;
    }

    const Eigen::Vector3d p = sphere_embed(q);
    const ChartPoint c0 = sphere_from_embedded(p, 0);
    const ChartPoint c1 = sphere_from_embedded(p, 1);
    const double d0 = sphere_pole_distance(c0);
    const double d1 = sphere_pole_distance(c1);
    const double thr = manifold.sphere_chart_switch;

    if (d0 < thr && d1 < thr)
        throw ChartDomainError("sphere point inside the polar caps of both charts");

    // Keep the incoming chart while it is clear of its poles.
    if (q.chart == 0 && d0 >= thr) return c0;
    if (q.chart == 1 && d1 >= thr) return c1;
    return d0 >= d1 ? c0 : c1;
}

Eigen::VectorXd raise_index(const MetricJet& jet, const Eigen::VectorXd& xi) {
    return jet.g_inv * xi;
}

Eigen::VectorXd lower_index(const MetricJet& jet, const Eigen::VectorXd& v) {
    return jet.g * v;
}

double co_norm(const MetricJet& jet, const Eigen::VectorXd& xi) {
    return std::sqrt(xi.dot(jet.g_inv * xi));
}

Eigen::Vector3d sphere_embed(const ChartPoint& q) {
    const double phi = q.q(0), theta = q.q(1);
    const double sp = std::sin(phi), cp = std::cos(phi);
    Eigen::Vector3d e(sp * std::cos(theta), sp * std::sin(theta), cp);
    if (q.chart == 1) e = chart1_permutation() * e;
    return e;
}

ChartPoint sphere_from_embedded(const Eigen::Vector3d& p, int chart) {
    const Eigen::Vector3d u = p.normalized();
    ChartPoint out;
    out.chart = chart;
    out.q.resize(2);
    if (chart == 0) {
        out.q(0) = std::acos(std::clamp(u.z(), -1.0, 1.0));
        out.q(1) = wrap_into(std::atan2(u.y(), u.x()), 2.0 * kPi);
    } else {
        out.q(0) = std::acos(std::clamp(u.x(), -1.0, 1.0));
        out.q(1) = wrap_into(std::atan2(u.z(), u.y()), 2.0 * kPi);
    }
    return out;
}

double sphere_pole_distance(const ChartPoint& q) {
    const double phi = q.q(0);
    return std::min(std::abs(phi), std::abs(kPi - phi));
}

void sphere_transition(const ManifoldSpec& manifold, ChartPoint& q, Eigen::VectorXd& xi, int target_chart) {
    if (q.chart == target_chart) return;
    const Eigen::Vector3d p = sphere_embed(q);
    const ChartPoint qt = sphere_from_embedded(p, target_chart);

    Eigen::Vector3d e;
    Eigen::Matrix<double, 3, 2> t_cur, t_new;
    std::array<Eigen::Vector3d, 3> d2e;
    sphere_embedding_jets(q.q(0), q.q(1), e, t_cur, d2e);
    if (q.chart == 1) t_cur = chart1_permutation() * t_cur;
    sphere_embedding_jets(qt.q(0), qt.q(1), e, t_new, d2e);
    if (target_chart == 1) t_new = chart1_permutation() * t_new;

    // J = d(q_cur)/d(q_new); covectors pull back with J^T.
    const Eigen::Matrix2d g_cur = t_cur.transpose() * t_cur;
    const Eigen::Matrix2d j = g_cur.inverse() * (t_cur.transpose() * t_new);
    xi = j.transpose() * xi;
    q = qt;
    (void)manifold;
}

Eigen::VectorXd wrap_difference(const ManifoldSpec& manifold, const Eigen::VectorXd& d) {
    if (!manifold.flat()) return d;
    Eigen::VectorXd out = d;
    for (int i = 0; i < manifold.dim; ++i) {
        const double p = manifold.periods[i];
        out(i) = d(i) - p * std::round(d(i) / p);
    }
    return out;
}

} // namespace synthesol
