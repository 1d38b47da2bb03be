#include "synthesol/flow.hpp"

#include <algorithm>
#include <cmath>

#include "flow_internal.hpp"

namespace synthesol {

namespace {

constexpr double kPi = EIGEN_PI;

Eigen::VectorXd pack(const CotangentState& z, const Eigen::VectorXd& extra, double work) {
    const int n = static_cast<int>(z.q.size());
    Eigen::VectorXd y(2 * n + extra.size() + 1);
    y.head(n) = z.q;
    y.segment(n, n) = z.xi;
    y.segment(2 * n, extra.size()) = extra;
    y(y.size() - 1) = work;
    return y;
}

void unpack(const Eigen::VectorXd& y, int n, int chart, CotangentState& z,
            Eigen::VectorXd& extra, double& work) {
    z.q = y.head(n);
    z.xi = y.segment(n, n);
    z.chart = chart;
    extra = y.segment(2 * n, y.size() - 2 * n - 1);
    work = y(y.size() - 1);
}

} // namespace

double hamiltonian(const ManifoldSpec& m, const PotentialSpec& pot, const CotangentState& z) {
    const MetricJet g = metric_jet(m, z.point());
    const ScalarJet u = potential_jet(m, pot, z.point());
    return 0.5 * z.xi.dot(g.g_inv * z.xi) + u.value;
}

void vector_field_h_alpha(const ManifoldSpec& m, const PotentialSpec& pot,
                          const CotangentState& z, double alpha,
                          Eigen::VectorXd& dq, Eigen::VectorXd& dxi) {
    const int n = m.dim;
    const MetricJet g = metric_jet(m, z.point());
    const ScalarJet u = potential_jet(m, pot, z.point());
    dq = g.g_inv * z.xi;
    dxi.resize(n);
    for (int i = 0; i < n; ++i) {
        dxi(i) = -u.gradient(i) - 0.5 * z.xi.dot(g.dg_inv(i) * z.xi) + alpha * z.xi(i);
    }
}

namespace detail {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,         500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784,  11.0 / 84,   0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

} // namespace

AugmentedResult integrate_augmented(const ManifoldSpec& m, const PotentialSpec& pot,
                                    const CotangentState& z0, double alpha, double t0, double t1,
                                    const StepControl& ctl, const Eigen::VectorXd& extra0,
                                    const ExtraRhs& extra_rhs, const ExtraChartSwitch& extra_switch,
                                    const StepObserver& observer) {
    const int n = m.dim;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    int chart = z0.chart;
    Eigen::VectorXd y = pack(z0, extra0, 0.0);
    const int dim = static_cast<int>(y.size());

    auto rhs = [&](double t, const Eigen::VectorXd& yv, Eigen::VectorXd& dy) {
        CotangentState z;
        Eigen::VectorXd extra;
        double work;
        unpack(yv, n, chart, z, extra, work);
        Eigen::VectorXd dq, dxi;
        const MetricJet g = metric_jet(m, z.point());
        const ScalarJet u = potential_jet(m, pot, z.point());
        dq = g.g_inv * z.xi;
        dxi.resize(n);
        for (int i = 0; i < n; ++i)
            dxi(i) = -u.gradient(i) - 0.5 * z.xi.dot(g.dg_inv(i) * z.xi) + alpha * z.xi(i);
        dy.resize(dim);
        dy.head(n) = dq;
        dy.segment(n, n) = dxi;
        if (extra_rhs && extra.size() > 0) {
            Eigen::VectorXd dextra;
            extra_rhs(t, z, extra, dextra);
            dy.segment(2 * n, extra.size()) = dextra;
        } else if (extra.size() > 0) {
            dy.segment(2 * n, extra.size()).setZero();
        }
        dy(dim - 1) = alpha * z.xi.dot(g.g_inv * z.xi);
    };

    const bool fixed = ctl.fixed_step > 0.0;
    double h = fixed ? std::min(ctl.fixed_step, span) : std::min(ctl.max_step, span);
    double t = t0;
    double covered = 0.0;
    int recorded_since = 0;

    if (observer) {
        CotangentState z;
        Eigen::VectorXd extra;
        double work;
        unpack(y, n, chart, z, extra, work);
        observer(t, z, extra, work);
    }

    std::array<Eigen::VectorXd, 7> k;
    Eigen::VectorXd ytmp(dim), ynew(dim), yerr(dim);

    while (covered < span - 1e-15 * (1.0 + span)) {
        h = std::min(h, span - covered);
        const double h_taken = h;
        const double hs = dir * h_taken;

        rhs(t, y, k[0]);
        bool stage_ok = true;
        for (int s = 1; s < 7 && stage_ok; ++s) {
            ytmp = y;
            for (int j = 0; j < s; ++j)
                if (kA[s][j] != 0.0) ytmp += hs * kA[s][j] * k[j];
            if (!ytmp.allFinite()) { stage_ok = false; break; }
            rhs(t + hs * kC[s], ytmp, k[s]);
        }

        if (stage_ok) {
            ynew = y;
            yerr.setZero();
            for (int s = 0; s < 7; ++s) {
                if (kB5[s] != 0.0) ynew += hs * kB5[s] * k[s];
                yerr += hs * (kB5[s] - kB4[s]) * k[s];
            }
            stage_ok = ynew.allFinite();
        }

        bool accept = stage_ok;
        if (!fixed) {
            if (stage_ok) {
                double err = 0.0;
                for (int i = 0; i < dim; ++i) {
                    const double sc = ctl.abs_tol +
                                      ctl.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
                    const double e = yerr(i) / sc;
                    err += e * e;
                }
                err = std::sqrt(err / dim);
                accept = err <= 1.0;
                const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h = std::min(ctl.max_step, h * std::clamp(factor, 0.2, 5.0));
            } else {
                h *= 0.25;
            }
            if (h < ctl.min_step) {
                if (!stage_ok)
                    throw BlowupError("integration step underflow on non-finite state", t);
                throw StepTooSmallError("integration step size underflow");
            }
            if (!accept) continue;
        } else if (!stage_ok) {
            throw BlowupError("non-finite state in fixed-step integration", t);
        }

        t += dir * h_taken;
        covered += h_taken;
        y = ynew;

        CotangentState z;
        Eigen::VectorXd extra;
        double work;
        unpack(y, n, chart, z, extra, work);

        // Escape guard.
        {
            const MetricJet g = metric_jet(m, z.point());
            if (co_norm(g, z.xi) > ctl.blowup_xi_bound)
                throw BlowupError("trajectory escaped the configured momentum bound", t);
        }

        // Sphere chart switching.
        if (!m.flat() && sphere_pole_distance(z.point()) < 2.0 * m.sphere_chart_switch) {
            const CotangentState before = z;
            ChartPoint p = z.point();
            Eigen::VectorXd xi = z.xi;
            const int other = 1 - z.chart;
            ChartPoint p_other = sphere_from_embedded(sphere_embed(p), other);
            if (sphere_pole_distance(p_other) > sphere_pole_distance(p)) {
                sphere_transition(m, p, xi, other);
                z.q = p.q;
                z.xi = xi;
                z.chart = other;
                chart = other;
                if (extra_switch && extra.size() > 0) extra_switch(before, z, extra);
                y = pack(z, extra, work);
            }
        }

        if (observer) {
            ++recorded_since;
            const bool last = covered >= span - 1e-15 * (1.0 + span);
            if (recorded_since >= std::max(1, ctl.record_stride) || last) {
                observer(t, z, extra, work);
                recorded_since = 0;
            }
        }
    }

    AugmentedResult out;
    Eigen::VectorXd extra;
    unpack(y, n, chart, out.state, extra, out.work);
    out.extra = extra;
    return out;
}

} // namespace detail

Trajectory integrate(const ManifoldSpec& m, const PotentialSpec& pot, const CotangentState& z0,
                     double alpha, double t0, double t1, const StepControl& ctl) {
    Trajectory traj;
    detail::integrate_augmented(
        m, pot, z0, alpha, t0, t1, ctl, Eigen::VectorXd(), nullptr, nullptr,
        [&](double t, const CotangentState& z, const Eigen::VectorXd&, double work) {
            traj.times.push_back(t);
            traj.states.push_back(z);
            traj.energies.push_back(hamiltonian(m, pot, z));
            traj.discount_work.push_back(work);
        });
    return traj;
}

double energy_law_residual(const Trajectory& traj, double alpha) {
    (void)alpha;
    if (traj.size() == 0) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        worst = std::max(worst, std::abs(traj.energies[k] - traj.energies[0] -
                                         (traj.discount_work[k] - traj.discount_work[0])));
    }
    return worst;
}

BoundednessResult classify_boundedness(const ManifoldSpec& m, const PotentialSpec& pot,
                                       const CotangentState& z0, double alpha, double t_max,
                                       const BoundednessOptions& opts) {
    const PotentialRange range = potential_range(m, pot);
    const auto equilibria = find_equilibria(m, pot);

    BoundednessResult result;
    StepControl ctl = default_step_control(m, pot);
    ctl.rel_tol = 1e-9;
    ctl.record_stride = 4;

    bool done = false;
    auto inspect = [&](double t, const CotangentState& z, const Eigen::VectorXd&, double) {
        if (done) return;
        const double h = hamiltonian(m, pot, z);
        if (h > range.max_value + 1e-9 * std::max(1.0, std::abs(range.max_value))) {
            result.kind = Boundedness::Escaped;
            result.decision_time = t;
            done = true;
            return;
        }
        for (const auto& eq : equilibria) {
            if (eq.q_star.chart != z.chart && !m.flat()) continue;
            const Eigen::VectorXd dq = wrap_difference(m, z.q - eq.q_star.q);
            const double dist = dq.norm() + z.xi.norm();
            if (dist < opts.near_ball &&
                h <= eq.potential_value + opts.energy_tol * std::max(1.0, std::abs(eq.potential_value))) {
                result.kind = Boundedness::BoundedTo;
                result.limit = eq.q_star;
                result.decision_time = t;
                done = true;
                return;
            }
        }
    };

    try {
        detail::integrate_augmented(m, pot, z0, alpha, 0.0, t_max, ctl, Eigen::VectorXd(),
                                    nullptr, nullptr,
                                    [&](double t, const CotangentState& z, const Eigen::VectorXd& e,
                                        double w) { inspect(t, z, e, w); });
    } catch (const BlowupError& e) {
        if (!done) {
            result.kind = Boundedness::Escaped;
            result.decision_time = e.time;
            done = true;
        }
    }
    return result;
}

namespace {

std::vector<ChartPoint> equilibrium_seeds(const ManifoldSpec& m) {
    std::vector<ChartPoint> seeds;
    if (m.flat()) {
        const int per_dim = 48;
        if (m.dim == 1) {
            for (int i = 0; i < per_dim; ++i)
                seeds.push_back({Eigen::VectorXd::Constant(1, m.periods[0] * i / per_dim), 0});
        } else {
            for (int i = 0; i < per_dim; ++i)
                for (int j = 0; j < per_dim; ++j) {
                    Eigen::VectorXd q(2);
                    q << m.periods[0] * i / per_dim, m.periods[1] * j / per_dim;
                    seeds.push_back({q, 0});
                }
        }
        return seeds;
    }
    for (int chart = 0; chart < 2; ++chart) {
        const int nphi = 16, ntheta = 24;
        for (int i = 1; i < nphi; ++i)
            for (int j = 0; j < ntheta; ++j) {
                Eigen::VectorXd q(2);
                q << kPi * i / nphi, 2.0 * kPi * j / ntheta;
                ChartPoint p{q, chart};
                if (sphere_pole_distance(p) > kPi / 5.0) seeds.push_back(p);
            }
    }
    return seeds;
}

} // namespace

std::vector<EquilibriumInfo> find_equilibria(const ManifoldSpec& m, const PotentialSpec& pot) {
    std::vector<EquilibriumInfo> found;
    const double grad_tol = 1e-12;

    for (const auto& seed : equilibrium_seeds(m)) {
        ChartPoint p = seed;
        bool converged = false;
        for (int iter = 0; iter < 60; ++iter) {
            const ScalarJet u = potential_jet(m, pot, p);
            if (u.gradient.norm() < grad_tol) {
                converged = true;
                break;
            }
            const Eigen::FullPivLU<Eigen::MatrixXd> lu(u.hessian_coord);
            if (!lu.isInvertible()) break;
            Eigen::VectorXd step = lu.solve(-u.gradient);
            const double max_move = 0.5;
            if (step.norm() > max_move) step *= max_move / step.norm();
            ChartPoint next{p.q + step, p.chart};
            Eigen::VectorXd dummy = Eigen::VectorXd::Zero(m.dim);
            try {
                next = normalize_point(m, next);
            } catch (const ChartDomainError&) {
                break;
            }
            (void)dummy;
            p = next;
        }
        if (!converged) continue;

        bool duplicate = false;
        for (const auto& e : found) {
            if (m.flat()) {
                if (wrap_difference(m, e.q_star.q - p.q).norm() < 1e-6) duplicate = true;
            } else {
                if ((sphere_embed(e.q_star) - sphere_embed(p)).norm() < 1e-6) duplicate = true;
            }
            if (duplicate) break;
        }
        if (duplicate) continue;

        EquilibriumInfo info;
        info.q_star = p;
        const ScalarJet u = potential_jet(m, pot, p);
        const MetricJet g = metric_jet(m, p);
        info.potential_value = u.value;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(u.hessian, g.g);
        info.hessian_eigenvalues = es.eigenvalues();
        const double scale = std::max(1.0, info.hessian_eigenvalues.cwiseAbs().maxCoeff());
        info.degenerate = info.hessian_eigenvalues.cwiseAbs().minCoeff() < 1e-8 * scale;
        found.push_back(std::move(info));
    }
    return found;
}

EquilibriumInfo classify_equilibrium(const ManifoldSpec& m, const PotentialSpec& pot,
                                     const ChartPoint& q_star, double alpha) {
    EquilibriumInfo info;
    info.q_star = q_star;
    const ScalarJet u = potential_jet(m, pot, q_star);
    const MetricJet g = metric_jet(m, q_star);
    info.potential_value = u.value;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(u.hessian, g.g);
    info.hessian_eigenvalues = es.eigenvalues();
    const double scale = std::max(1.0, info.hessian_eigenvalues.cwiseAbs().maxCoeff());
    if (info.hessian_eigenvalues.cwiseAbs().minCoeff() < 1e-10 * scale)
        throw DegenerateError("equilibrium Hessian has a (near) zero eigenvalue");

    bool any_saddle = false, any_focus = false;
    for (int i = 0; i < info.hessian_eigenvalues.size(); ++i) {
        const double h = info.hessian_eigenvalues(i);
        const double disc = alpha * alpha - 4.0 * h;
        EquilibriumType block;
        if (h < 0.0) {
            block = EquilibriumType::Saddle;
            any_saddle = true;
        } else if (disc > 0.0) {
            block = EquilibriumType::UnstableNode;
        } else {
            block = EquilibriumType::UnstableFocus;
            any_focus = true;
        }
        info.block_types.push_back(block);
        if (disc >= 0.0) {
            info.eigenvalues.emplace_back(0.5 * (alpha + std::sqrt(disc)), 0.0);
            info.eigenvalues.emplace_back(0.5 * (alpha - std::sqrt(disc)), 0.0);
        } else {
            const double im = 0.5 * std::sqrt(-disc);
            info.eigenvalues.emplace_back(0.5 * alpha, im);
            info.eigenvalues.emplace_back(0.5 * alpha, -im);
        }
    }
    info.type = any_saddle ? EquilibriumType::Saddle
                           : (any_focus ? EquilibriumType::UnstableFocus : EquilibriumType::UnstableNode);
    return info;
}

CotangentState dissipative_conjugate(const CotangentState& z) {
    CotangentState out = z;
    out.xi = -z.xi;
    return out;
}

PotentialRange potential_range(const ManifoldSpec& m, const PotentialSpec& pot) {
    PotentialRange range{-std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity(),
                         {}};

    auto consider = [&](const ChartPoint& p) {
        const double v = potential_jet(m, pot, p).value;
        if (v > range.max_value) {
            range.max_value = v;
            range.argmax = p;
        }
        range.min_value = std::min(range.min_value, v);
    };

    if (m.flat()) {
        const int per_dim = 128;
        if (m.dim == 1) {
            for (int i = 0; i < per_dim; ++i)
                consider({Eigen::VectorXd::Constant(1, m.periods[0] * i / per_dim), 0});
        } else {
            for (int i = 0; i < per_dim; ++i)
                for (int j = 0; j < per_dim; ++j) {
                    Eigen::VectorXd q(2);
                    q << m.periods[0] * i / per_dim, m.periods[1] * j / per_dim;
                    consider({q, 0});
                }
        }
    } else {
        const int nphi = 48, ntheta = 96;
        for (int chart = 0; chart < 2; ++chart)
            for (int i = 1; i < nphi; ++i)
                for (int j = 0; j < ntheta; ++j) {
                    Eigen::VectorXd q(2);
                    q << kPi * i / nphi, 2.0 * kPi * j / ntheta;
                    ChartPoint p{q, chart};
                    if (sphere_pole_distance(p) > kPi / 5.0) consider(p);
                }
    }

    // Critical points carry the exact extrema; the grid alone may miss them.
    for (const auto& eq : find_equilibria(m, pot)) {
        consider(eq.q_star);
    }
    return range;
}

StepControl default_step_control(const ManifoldSpec& m, const PotentialSpec& pot) {
    StepControl ctl;
    const PotentialRange range = potential_range(m, pot);
    ctl.blowup_xi_bound = 10.0 * std::sqrt(2.0 * std::max(0.0, range.max_value - range.min_value)) + 10.0;
    return ctl;
}

const char* to_string(EquilibriumType t) {
    switch (t) {
        case EquilibriumType::Saddle: return "saddle";
        case EquilibriumType::UnstableNode: return "unstable_node";
        case EquilibriumType::UnstableFocus: return "unstable_focus";
        case EquilibriumType::Degenerate: return "degenerate";
    }
    return "unknown";
}

} // namespace synthesol
