#include "lgo/local_solver.hpp"

#include "lgo/errors.hpp"
#include "lgo/kernels.hpp"
#include "lgo/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace lgo {

LocalProblem::LocalProblem(std::string id, FeasibleSet feasible, QPoly utility)
    : id_(std::move(id)), feasible_(std::move(feasible)), utility_(std::move(utility)) {
  if (utility_.nvars() != feasible_.carrier().ambient_dim())
    throw ValidationError("problem '" + id_ + "': utility arity must equal the ambient dimension");
}

void LocalProblem::set_solutions(std::vector<Vector> solutions, Certificate certificate) {
  const double tol = certificate.numerical ? 1e-6 : 1e-9;
  for (const auto& x : solutions) {
    if (!feasible_.contains(x, kFeasibilityTol))
      throw ValidationError("problem '" + id_ + "': solution outside the feasible set");
    const double v = value_at(x);
    if (std::abs(v - certificate.value) > tol * std::max(1.0, std::abs(certificate.value)))
      throw ValidationError("problem '" + id_ + "': solution does not attain the certified value");
  }
  solutions_ = std::move(solutions);
  certificate_ = std::move(certificate);
}

double LocalProblem::value_at(const Vector& x) const { return eval(utility_, x); }

nlohmann::json to_json(const Certificate& c) {
  return {{"method", c.method}, {"value", c.value}, {"residual", c.residual},
          {"grid_step", c.grid_step}, {"numerical", c.numerical}, {"degenerate", c.degenerate}};
}

QuadraticParts quadratic_parts(const RPoly& p) {
  if (p.degree() > 2) throw ValidationError("quadratic_parts: degree > 2");
  const auto d = static_cast<Eigen::Index>(p.nvars());
  QuadraticParts q{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d), 0.0};
  for (const auto& [m, c] : p.terms()) {
    std::vector<Eigen::Index> vars;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (int e = 0; e < m[i]; ++e) vars.push_back(static_cast<Eigen::Index>(i));
    if (vars.empty()) {
      q.c += c;
    } else if (vars.size() == 1) {
      q.g(vars[0]) += c;
    } else if (vars[0] == vars[1]) {
      q.H(vars[0], vars[0]) += 2 * c;
    } else {
      q.H(vars[0], vars[1]) += c;
      q.H(vars[1], vars[0]) += c;
    }
  }
  return q;
}

namespace {

double projected_gradient_residual(const std::vector<RPoly>& grad, const FeasibleSet& set, const Vector& t) {
  Vector g(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) g(i) = eval(grad[static_cast<std::size_t>(i)], t);
  return (set.nearest_local(t + g) - t).norm();
}

void finish_certificate(const RPoly& f, const FeasibleSet& set, LocalSolution& sol) {
  const auto grad = gradient(f);
  sol.certificate.residual = 0.0;
  for (const auto& t : sol.points)
    sol.certificate.residual = std::max(sol.certificate.residual, projected_gradient_residual(grad, set, t));
}

Vector polish(const FlatPoly& f, const std::vector<FlatPoly>& grad, const FeasibleSet& set, Vector t,
              double tol) {
  double fv = f(t);
  double alpha = 0.1;
  Vector g(t.size());
  for (int it = 0; it < 20000; ++it) {
    for (Eigen::Index i = 0; i < t.size(); ++i) g(i) = grad[static_cast<std::size_t>(i)](t);
    bool moved = false;
    double step = 0.0;
    while (alpha > 1e-20) {
      const Vector cand = set.nearest_local(t + alpha * g);
      const double fc = f(cand);
      const double predicted = g.dot(cand - t);
      if (fc >= fv + 1e-4 * predicted && (cand - t).norm() > 0.0 && fc >= fv) {
        step = (cand - t).norm();
        t = cand;
        fv = fc;
        moved = true;
        alpha = std::min(alpha * 2.0, 1e3);
        break;
      }
      alpha *= 0.5;
    }
    if (!moved || step < tol) break;
  }
  return t;
}

LocalSolution grid_polish(const RPoly& f, const FeasibleSet& set, const SolverOptions& opts) {
  const auto d = static_cast<Eigen::Index>(set.dim());
  const auto [lo, hi] = set.bounds_local();
  double h = opts.grid_step;
  Lattice grid;
  grid.lower = lo;
  grid.step = Vector::Zero(d);
  grid.counts.assign(static_cast<std::size_t>(d), 1);
  for (int attempt = 0; attempt < 64; ++attempt) {
    double total = 1.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double width = hi(k) - lo(k);
      const auto c = width <= 0 ? std::size_t{1} : static_cast<std::size_t>(std::floor(width / h + 1e-9)) + 1;
      grid.counts[static_cast<std::size_t>(k)] = std::max<std::size_t>(c, width > 0 ? 2 : 1);
      grid.step(k) = grid.counts[static_cast<std::size_t>(k)] > 1 ? width / static_cast<double>(grid.counts[static_cast<std::size_t>(k)] - 1) : 0.0;
      total *= static_cast<double>(grid.counts[static_cast<std::size_t>(k)]);
    }
    if (total <= static_cast<double>(opts.max_grid_points)) break;
    h *= std::pow(total / static_cast<double>(opts.max_grid_points), 1.0 / static_cast<double>(d)) * 1.01;
  }
  if (static_cast<double>(grid.size()) > static_cast<double>(opts.max_grid_points))
    throw ResourceCapError("grid search: lattice too large");

  const FlatPoly flat(f);
  PointPredicate inside;
  if (!set.is_box()) inside = [&set](const Vector& t) { return set.contains_local(t, 1e-12); };
  const auto values = opts.parallel ? evaluate_lattice(flat, grid, inside) : evaluate_lattice_serial(flat, grid, inside);

  // Lattice local maxima seed the polish.
  std::vector<std::pair<double, std::size_t>> seeds;
  std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
  for (std::size_t k = 1; k < stride.size(); ++k) stride[k] = stride[k - 1] * grid.counts[k - 1];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    bool is_max = true;
    std::size_t rem = i;
    for (std::size_t k = 0; k < stride.size() && is_max; ++k) {
      const std::size_t coord = rem % grid.counts[k];
      rem /= grid.counts[k];
      if (coord > 0 && values[i - stride[k]] > values[i]) is_max = false;
      if (coord + 1 < grid.counts[k] && values[i + stride[k]] > values[i]) is_max = false;
    }
    if (is_max) seeds.emplace_back(values[i], i);
  }
  std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (seeds.size() > opts.max_polish_starts) seeds.resize(opts.max_polish_starts);

  std::vector<Vector> starts;
  for (const auto& s : seeds) starts.push_back(grid.point(s.second));
  if (starts.empty()) starts.push_back(set.to_local(set.representative()));

  const auto grad_polys = gradient(f);
  std::vector<FlatPoly> grad;
  for (const auto& g : grad_polys) grad.emplace_back(g);

  std::vector<std::pair<double, Vector>> polished;
  for (const auto& s : starts) {
    Vector t = polish(flat, grad, set, s, opts.polish_tol);
    polished.emplace_back(flat(t), t);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : polished) best = std::max(best, p.first);
  std::sort(polished.begin(), polished.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  LocalSolution sol;
  for (const auto& [v, t] : polished) {
    if (v < best - opts.tie_value) continue;
    bool distinct = true;
    for (const auto& q : sol.points)
      if ((q - t).norm() <= opts.cluster_distance) distinct = false;
    if (distinct) sol.points.push_back(t);
  }
  std::sort(sol.points.begin(), sol.points.end(), [](const Vector& a, const Vector& b) { return lex_less(a, b); });
  sol.certificate.method = "grid_polish";
  sol.certificate.value = best;
  sol.certificate.grid_step = h;
  sol.certificate.numerical = true;
  return sol;
}

}  // namespace

LocalSolution maximize_on(const RPoly& f, const FeasibleSet& set, const SolverOptions& opts) {
  if (f.nvars() != set.dim()) throw ValidationError("maximize_on: polynomial arity must equal the set dimension");
  LocalSolution sol;
  const int deg = f.degree();
  if (set.dim() == 0) {
    sol.points.emplace_back(0);
    sol.certificate.method = "point";
    sol.certificate.value = eval(f, Vector(0));
    return sol;
  }
  if (deg <= 0) {
    sol.points.push_back(set.to_local(set.representative()));
    sol.certificate.method = "degenerate";
    sol.certificate.degenerate = true;
    sol.certificate.value = deg == 0 ? f.terms().begin()->second : 0.0;
    return sol;
  }
  if (deg <= 2) {
    const auto q = quadratic_parts(f);
    const double scale = std::max(1.0, q.H.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.H);
    const double top = eig.eigenvalues().maxCoeff();
    if (top <= 1e-12 * scale) {
      const QuadraticObjective obj{q.H, q.g, q.c};
      QPSolution qp;
      if (const auto* ball = std::get_if<Ball>(&set.shape())) {
        qp = maximize_concave_qp_ball(obj, ball->center, ball->radius);
        sol.certificate.method = "ball_qp";
      } else {
        const Polytope p = set.as_polytope();
        qp = maximize_concave_qp(obj, p.A, p.b);
        const bool strict = top < -1e-12 * scale;
        const bool linear = q.H.cwiseAbs().maxCoeff() == 0.0;
        sol.certificate.method = strict ? "exact_qp" : (linear ? "exact_lp" : "exact_concave");
      }
      if (qp.maximizers.empty()) throw ValidationError("concave QP found no feasible point");
      sol.points = qp.maximizers;
      sol.certificate.value = qp.value;
      finish_certificate(f, set, sol);
      return sol;
    }
  }
  sol = grid_polish(f, set, opts);
  finish_certificate(f, set, sol);
  return sol;
}

LocalSolution solve_local(const LocalProblem& problem, const SolverOptions& opts) {
  const FeasibleSet& set = problem.feasible();
  const RPoly f = restrict(to_float(problem.utility()), set.carrier());
  LocalSolution sol = maximize_on(f, set, opts);
  for (auto& t : sol.points) t = set.to_ambient(t);
  std::sort(sol.points.begin(), sol.points.end(), [](const Vector& a, const Vector& b) { return lex_less(a, b); });
  return sol;
}

LocalProblem solved(LocalProblem problem, const SolverOptions& opts) {
  LocalSolution sol = solve_local(problem, opts);
  problem.set_solutions(std::move(sol.points), std::move(sol.certificate));
  return problem;
}

namespace {

Rational determinant(QMatrix m) {
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(m(piv, col)) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (sgn(m(r, col)) == 0) continue;
      const Rational f = m(r, col) / m(col, col);
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
    }
  }
  return det;
}

}  // namespace

ConcavityVerdict is_strictly_concave(const QPoly& p, const Subspace& s, unsigned seed) {
  const QPoly q = restrict(p, s);
  const std::size_t d = s.dim();
  if (d == 0) return {true, false};
  const int deg = q.degree();
  if (deg <= 1) return {false, false};
  if (deg == 2) {
    QMatrix h(d, d);
    for (const auto& [m, c] : q.terms()) {
      std::vector<std::size_t> vars;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (int e = 0; e < m[i]; ++e) vars.push_back(i);
      if (vars.size() != 2) continue;
      if (vars[0] == vars[1])
        h(vars[0], vars[0]) += 2 * c;
      else {
        h(vars[0], vars[1]) += c;
        h(vars[1], vars[0]) += c;
      }
    }
    // Negative definite iff the k-th leading minor has sign (-1)^k.
    for (std::size_t k = 1; k <= d; ++k) {
      QMatrix lead(k, k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) lead(r, c) = h(r, c);
      const int sign = sgn(determinant(lead));
      if (sign != (k % 2 == 1 ? -1 : 1)) return {false, false};
    }
    return {true, false};
  }
  // Higher degree: sampled Hessians in [-1, 1]^d.
  const RPoly qf = to_float(q);
  const auto grad = gradient(qf);
  std::vector<std::vector<RPoly>> hess;
  for (const auto& g : grad) hess.push_back(gradient(g));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Vector t(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = u(rng);
    Eigen::MatrixXd H(t.size(), t.size());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = eval(hess[i][j], t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    if (eig.eigenvalues().maxCoeff() >= 0.0) return {false, true};
  }
  return {true, true};
}

}  // namespace lgo
