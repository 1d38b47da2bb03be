#include "synthesol/curvature.hpp"

#include <cmath>

#include "synthesol/util.hpp"

namespace synthesol {

namespace {

constexpr double kPi = EIGEN_PI;

Eigen::VectorXd symmetric_eigenvalues_metric(const Eigen::MatrixXd& op, const MetricJet& g) {
    // op is self-adjoint for <a,b> = a^T g^{-1} b, so g^{-1} op is symmetric;
    // solve the generalized symmetric problem (g^{-1} op) v = lambda g^{-1} v.
    const Eigen::MatrixXd lhs = 0.5 * (g.g_inv * op + (g.g_inv * op).transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(lhs, g.g_inv);
    return es.eigenvalues();
}

std::vector<ChartPoint> base_grid(const ManifoldSpec& m, int density) {
    std::vector<ChartPoint> pts;
    if (m.flat()) {
        if (m.dim == 1) {
            for (int i = 0; i < density; ++i)
                pts.push_back({Eigen::VectorXd::Constant(1, m.periods[0] * i / density), 0});
        } else {
            for (int i = 0; i < density; ++i)
                for (int j = 0; j < density; ++j) {
                    Eigen::VectorXd q(2);
                    q << m.periods[0] * i / density, m.periods[1] * j / density;
                    pts.push_back({q, 0});
                }
        }
        return pts;
    }
    // Sphere: cover with both charts' comfortable bands.
    const int nphi = std::max(4, density / 2), ntheta = density;
    for (int chart = 0; chart < 2; ++chart)
        for (int i = 1; i < nphi; ++i)
            for (int j = 0; j < ntheta; ++j) {
                Eigen::VectorXd q(2);
                q << kPi * i / nphi, 2.0 * kPi * j / ntheta;
                ChartPoint p{q, chart};
                if (sphere_pole_distance(p) > kPi / 5.0) pts.push_back(p);
            }
    return pts;
}

std::vector<Eigen::VectorXd> unit_codirections(const MetricJet& g, int count) {
    // Directions of metric co-norm 1: push Euclidean unit vectors through g^{1/2}.
    const int n = g.dim();
    std::vector<Eigen::VectorXd> dirs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.g);
    const Eigen::MatrixXd sqrt_g = es.operatorSqrt();
    if (n == 1) {
        dirs.push_back(sqrt_g * Eigen::VectorXd::Constant(1, 1.0));
        dirs.push_back(sqrt_g * Eigen::VectorXd::Constant(1, -1.0));
        return dirs;
    }
    for (int k = 0; k < count; ++k) {
        const double a = 2.0 * kPi * k / count;
        Eigen::VectorXd u(2);
        u << std::cos(a), std::sin(a);
        dirs.push_back(sqrt_g * u);
    }
    return dirs;
}

} // namespace

CurvatureOperator curvature_operator(const ManifoldSpec& m, const PotentialSpec& pot,
                                     const CotangentState& z) {
    const int n = m.dim;
    const MetricJet g = metric_jet(m, z.point());
    const ScalarJet u = potential_jet(m, pot, z.point());

    // Matrix acting on covector components c:
    //   (R c)_a = g_{al} R^l_{ijk} zv^i (g^{-1} c)^j zv^k + Hcov_{aj} (g^{-1} c)^j
    const Eigen::VectorXd zv = g.g_inv * z.xi;
    Eigen::MatrixXd riem_vec = Eigen::MatrixXd::Zero(n, n); // column j: Riemann term of e_j input vector
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) s += g.riemann(l, i, j, k) * zv(i) * zv(k);
            riem_vec(l, j) = s;
        }

    CurvatureOperator out;
    out.matrix = g.g * riem_vec * g.g_inv + u.hessian * g.g_inv;
    out.eigenvalues = symmetric_eigenvalues_metric(out.matrix, g);
    return out;
}

std::vector<CotangentState> sample_B_H(const ManifoldSpec& m, const PotentialSpec& pot,
                                       int density) {
    const PotentialRange range = potential_range(m, pot);
    const int n_dirs = m.dim == 1 ? 2 : 16;
    const int n_radii = 8;

    std::vector<CotangentState> samples;
    for (const auto& p : base_grid(m, density)) {
        const MetricJet g = metric_jet(m, p);
        const double head = range.max_value - potential_jet(m, pot, p).value;
        const double xi_max = std::sqrt(2.0 * std::max(0.0, head));
        samples.emplace_back(p.q, Eigen::VectorXd::Zero(m.dim), p.chart); // zero section
        if (xi_max <= 0.0) continue;
        for (const auto& dir : unit_codirections(g, n_dirs))
            for (int r = 1; r <= n_radii; ++r)
                samples.emplace_back(p.q, (xi_max * r / n_radii) * dir, p.chart);
    }
    return samples;
}

ConditionReport check_condition(const ManifoldSpec& m, const PotentialSpec& pot, double alpha,
                                int density, double safety_margin) {
    ConditionReport report;
    report.alpha = alpha;
    report.safety_margin = safety_margin;

    const auto samples = sample_B_H(m, pot, density);
    report.samples_used = static_cast<int>(samples.size());

    std::vector<double> tops(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        tops[i] = curvature_operator(m, pot, samples[i]).eigenvalues.maxCoeff();
    });

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (tops[i] > best) {
            best = tops[i];
            best_i = i;
        }
    CotangentState argmax = samples[best_i];

    // Local polish: coordinate-wise parabolic refinement of q with the
    // covector held on the same shell direction.
    const PotentialRange range = potential_range(m, pot);
    const double radius_frac = [&] {
        const MetricJet g = metric_jet(m, argmax.point());
        const double head = range.max_value - potential_jet(m, pot, argmax.point()).value;
        const double xi_max = std::sqrt(2.0 * std::max(0.0, head));
        return xi_max > 0.0 ? co_norm(g, argmax.xi) / xi_max : 0.0;
    }();
    auto eval_at = [&](const Eigen::VectorXd& q) {
        CotangentState z = argmax;
        z.q = q;
        const ChartPoint p{q, argmax.chart};
        const double head = range.max_value - potential_jet(m, pot, p).value;
        const double xi_max = std::sqrt(2.0 * std::max(0.0, head));
        if (argmax.xi.norm() > 0.0) {
            const MetricJet g = metric_jet(m, p);
            z.xi = argmax.xi * (radius_frac * xi_max / std::max(1e-300, co_norm(g, argmax.xi)));
        }
        return curvature_operator(m, pot, z).eigenvalues.maxCoeff();
    };
    double h0 = m.flat() ? m.periods[0] / density : kPi / density;
    Eigen::VectorXd q = argmax.q;
    double fbest = best;
    for (int round = 0; round < 3; ++round) {
        for (int d = 0; d < m.dim; ++d) {
            Eigen::VectorXd qp = q, qm = q;
            qp(d) += h0;
            qm(d) -= h0;
            double fp, fm;
            try {
                fp = eval_at(qp);
                fm = eval_at(qm);
            } catch (const ChartDomainError&) {
                continue;
            }
            const double denom = fp - 2.0 * fbest + fm;
            if (denom < 0.0) {
                const double shift = 0.5 * h0 * (fm - fp) / denom;
                Eigen::VectorXd qn = q;
                qn(d) += std::clamp(shift, -h0, h0);
                try {
                    const double fn = eval_at(qn);
                    if (fn > fbest) {
                        fbest = fn;
                        q = qn;
                    }
                } catch (const ChartDomainError&) {
                }
            } else if (fp > fbest || fm > fbest) {
                q = fp > fm ? qp : qm;
                fbest = std::max(fp, fm);
            }
        }
        h0 *= 0.25;
    }
    argmax.q = q;
    best = fbest;

    report.lambda_max = best;
    report.argmax_state = argmax;
    report.alpha_critical = 2.0 * std::sqrt(std::max(0.0, best));
    report.margin = 0.25 * alpha * alpha - best;
    report.pass = report.margin > safety_margin;
    return report;
}

CorollaryBound corollary_bound(const ManifoldSpec& m, const PotentialSpec& pot, double alpha,
                               double safety_margin) {
    const double r = m.flat() ? 0.0 : 1.0;
    const PotentialRange range = potential_range(m, pot);

    CorollaryBound out;
    out.rhs = 0.25 * alpha * alpha - 2.0 * r * (range.max_value - range.min_value);

    double top = -std::numeric_limits<double>::infinity();
    for (const auto& p : base_grid(m, 64)) {
        const MetricJet g = metric_jet(m, p);
        const ScalarJet u = potential_jet(m, pot, p);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(u.hessian, g.g);
        top = std::max(top, es.eigenvalues().maxCoeff());
    }
    out.max_hessian_eigenvalue = top;
    out.pass = top + safety_margin < out.rhs;
    return out;
}

} // namespace synthesol
