#pragma once

// Internal augmented integration driver shared by the flow, grassmann and
// synthesis translation units. Not installed.

#include <Eigen/Dense>
#include <functional>

#include "synthesol/flow.hpp"

namespace synthesol::detail {

/// RHS of extra components co-integrated with the base state.
using ExtraRhs = std::function<void(double t, const CotangentState& z,
                                    const Eigen::VectorXd& extra, Eigen::VectorXd& dextra)>;

/// Applied when a sphere trajectory is re-chartered mid-integration; receives
/// the state before and after the chart change.
using ExtraChartSwitch = std::function<void(const CotangentState& before,
                                            const CotangentState& after, Eigen::VectorXd& extra)>;

/// Called once per accepted (recorded) step.
using StepObserver = std::function<void(double t, const CotangentState& z,
                                        const Eigen::VectorXd& extra, double work)>;

struct AugmentedResult {
    CotangentState state;
    Eigen::VectorXd extra;
    double work = 0.0; // integral of alpha |xi|^2
};

/// Dormand-Prince 5(4) integration of the characteristic flow plus optional
/// extra components over [t0, t1] (either direction). The work quadrature
/// for the energy law is always co-integrated.
AugmentedResult integrate_augmented(const ManifoldSpec& m, const PotentialSpec& pot,
                                    const CotangentState& z0, double alpha, double t0, double t1,
                                    const StepControl& ctl, const Eigen::VectorXd& extra0,
                                    const ExtraRhs& extra_rhs = nullptr,
                                    const ExtraChartSwitch& extra_switch = nullptr,
                                    const StepObserver& observer = nullptr);

} // namespace synthesol::detail
