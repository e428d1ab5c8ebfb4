#pragma once

#include <Eigen/Dense>

#include <vector>

namespace lgo {

/// f(t) = 1/2 t'Ht + g't + c with H negative semidefinite.
struct QuadraticObjective {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  double c = 0.0;

  double operator()(const Eigen::VectorXd& t) const { return 0.5 * t.dot(H * t) + g.dot(t) + c; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& t) const { return H * t + g; }
};

struct QPSolution {
  std::vector<Eigen::VectorXd> maximizers;
  double value = 0.0;
  /// Number of faces examined (face enumeration only).
  std::size_t faces = 0;
};

/// Vertices of { t : A t <= b }, deduplicated. The region must be bounded.
std::vector<Eigen::VectorXd> enumerate_vertices(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                double tol = 1e-9);

/// Concave maximization over a bounded polytope by enumerating faces: on each
/// face with a negative definite reduced Hessian the stationary point is a
/// candidate; the best feasible candidates are returned. Every extreme point
/// of the maximizer set is found, which makes this exact for small dimension.
QPSolution maximize_concave_qp(const QuadraticObjective& f, const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& b, double tie_tol = 1e-9);

/// Concave maximization over the ball |t - center| <= radius.
QPSolution maximize_concave_qp_ball(const QuadraticObjective& f, const Eigen::VectorXd& center,
                                    double radius);

/// Feasibility of { t : A t <= b } (bounded regions only).
bool polytope_nonempty(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol = 1e-9);
/// Whether { t : A t <= 0 } is just the origin.
bool recession_cone_trivial(const Eigen::MatrixXd& A, double tol = 1e-9);

}  // namespace lgo
