#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace synthesol {

/// Worker cap taken from SYNTHESOL_THREADS (0 or 1 disables parallelism).
int worker_count();

/// Index-parallel loop. Each index writes its own output slot, so results
/// are deterministic regardless of the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Shortest round-trip decimal formatting (locale independent, 17 significant
/// digits), used for every floating-point value written to CSV/JSON.
std::string format_double(double x);

/// Largest principal angle between the column spans of two full-rank matrices.
double principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Angle between a vector and the column span of a full-rank matrix.
double angle_to_subspace(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis);

/// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace synthesol
