#include "lgo/qp.hpp"

#include "lgo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lgo {

namespace {

constexpr std::size_t kMaxFaces = 400000;

// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order;
// stops early when fn returns false.
template <class Fn>
bool for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!fn(idx)) return false;
    if (k == 0) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

bool feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& t, double tol) {
  if (A.rows() == 0) return true;
  const Eigen::VectorXd slack = A * t - b;
  for (Eigen::Index i = 0; i < slack.size(); ++i)
    if (slack(i) > tol * std::max(1.0, std::abs(b(i)))) return false;
  return true;
}

void push_unique(std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& p, double tol) {
  for (const auto& q : pts)
    if ((q - p).norm() <= tol) return;
  pts.push_back(p);
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& A, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(idx.size(), A.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = A.row(idx[i]);
  return out;
}

Eigen::VectorXd entries_of(const Eigen::VectorXd& b, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = b(idx[i]);
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> enumerate_vertices(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                double tol) {
  const auto d = static_cast<std::size_t>(A.cols());
  const auto m = static_cast<std::size_t>(A.rows());
  std::vector<Eigen::VectorXd> out;
  if (d == 0) {
    if (feasible(A, b, Eigen::VectorXd(0), tol)) out.emplace_back(0);
    return out;
  }
  if (binomial(m, d) > static_cast<double>(kMaxFaces))
    throw ResourceCapError("vertex enumeration: too many constraint subsets");
  for_each_subset(m, d, [&](const std::vector<std::size_t>& idx) {
    const Eigen::MatrixXd Aw = rows_of(A, idx);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Aw);
    if (lu.rank() < static_cast<Eigen::Index>(d)) return true;
    const Eigen::VectorXd t = lu.solve(entries_of(b, idx));
    if (feasible(A, b, t, tol)) push_unique(out, t, tol);
    return true;
  });
  std::sort(out.begin(), out.end(), [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  });
  return out;
}

QPSolution maximize_concave_qp(const QuadraticObjective& f, const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& b, double tie_tol) {
  const auto d = static_cast<std::size_t>(A.cols());
  const auto m = static_cast<std::size_t>(A.rows());
  QPSolution sol;
  sol.value = -std::numeric_limits<double>::infinity();

  double total = 0.0;
  for (std::size_t k = 0; k <= std::min(d, m); ++k) total += binomial(m, k);
  if (total > static_cast<double>(kMaxFaces))
    throw ResourceCapError("concave QP: face enumeration exceeds cap");

  const double hscale = std::max(1.0, f.H.cwiseAbs().maxCoeff());
  std::vector<std::pair<double, Eigen::VectorXd>> candidates;

  for (std::size_t k = 0; k <= std::min(d, m); ++k) {
    for_each_subset(m, k, [&](const std::vector<std::size_t>& idx) {
      ++sol.faces;
      Eigen::VectorXd t0 = Eigen::VectorXd::Zero(d);
      Eigen::MatrixXd Z;
      if (k == 0) {
        Z = Eigen::MatrixXd::Identity(d, d);
      } else {
        const Eigen::MatrixXd Aw = rows_of(A, idx);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Aw);
        if (lu.rank() < static_cast<Eigen::Index>(k)) return true;
        const Eigen::VectorXd bw = entries_of(b, idx);
        t0 = Aw.transpose() * (Aw * Aw.transpose()).ldlt().solve(bw);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aw, Eigen::ComputeFullV);
        Z = svd.matrixV().rightCols(static_cast<Eigen::Index>(d - k));
      }
      Eigen::VectorXd t = t0;
      if (Z.cols() > 0) {
        const Eigen::MatrixXd R = Z.transpose() * f.H * Z;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
        if (eig.eigenvalues().maxCoeff() >= -1e-12 * hscale) return true;
        const Eigen::VectorXd rhs = Z.transpose() * f.gradient(t0);
        t = t0 - Z * R.ldlt().solve(rhs);
      }
      if (!feasible(A, b, t, 1e-9)) return true;
      candidates.emplace_back(f(t), t);
      return true;
    });
  }
  if (candidates.empty()) return sol;
  for (const auto& [v, t] : candidates) sol.value = std::max(sol.value, v);
  const double tie = tie_tol * std::max(1.0, std::abs(sol.value));
  for (const auto& [v, t] : candidates)
    if (v >= sol.value - tie) push_unique(sol.maximizers, t, 1e-9);
  std::sort(sol.maximizers.begin(), sol.maximizers.end(), [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
  });
  return sol;
}

QPSolution maximize_concave_qp_ball(const QuadraticObjective& f, const Eigen::VectorXd& center,
                                    double radius) {
  const auto d = center.size();
  QPSolution sol;
  if (d == 0) {
    sol.maximizers.emplace_back(0);
    sol.value = f.c;
    return sol;
  }
  // u = t - center; maximize 1/2 u'Hu + g'u over |u| <= radius.
  const Eigen::VectorXd g = f.H * center + f.g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.H);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const Eigen::MatrixXd Q = eig.eigenvectors();
  const Eigen::VectorXd gq = Q.transpose() * g;
  const double gnorm = g.norm();
  const double scale = std::max(1.0, f.H.cwiseAbs().maxCoeff());

  auto step = [&](double mu) {
    Eigen::VectorXd y(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double den = lam(i) - mu;
      y(i) = std::abs(den) < 1e-300 ? 0.0 : -gq(i) / den;
    }
    return Eigen::VectorXd(Q * y);
  };

  Eigen::VectorXd u;
  if (gnorm <= 1e-15 * scale) {
    u = Eigen::VectorXd::Zero(d);
  } else {
    const bool definite = lam.maxCoeff() < -1e-12 * scale;
    bool interior = false;
    if (definite) {
      u = step(0.0);
      interior = u.norm() <= radius;
    }
    if (!interior) {
      // |u(mu)| decreases in mu; bracket and bisect |u(mu)| = radius.
      double lo = 0.0;
      double hi = gnorm / std::max(radius, 1e-300) + 1.0;
      while (step(hi).norm() > radius) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (step(mid).norm() > radius)
          lo = mid;
        else
          hi = mid;
      }
      u = step(hi);
      if (u.norm() > 0) u *= radius / u.norm();
    }
  }
  const Eigen::VectorXd t = center + u;
  sol.maximizers.push_back(t);
  sol.value = f(t);
  return sol;
}

bool polytope_nonempty(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol) {
  return !enumerate_vertices(A, b, tol).empty();
}

bool recession_cone_trivial(const Eigen::MatrixXd& A, double tol) {
  const auto d = A.cols();
  if (d == 0) return true;
  Eigen::MatrixXd Ab(A.rows() + 2 * d, d);
  Eigen::VectorXd bb = Eigen::VectorXd::Zero(A.rows() + 2 * d);
  Ab.topRows(A.rows()) = A;
  Ab.block(A.rows(), 0, d, d) = Eigen::MatrixXd::Identity(d, d);
  Ab.block(A.rows() + d, 0, d, d) = -Eigen::MatrixXd::Identity(d, d);
  bb.tail(2 * d).setOnes();
  for (const auto& v : enumerate_vertices(Ab, bb, tol))
    if (v.norm() > 1e-7) return false;
  return true;
}

}  // namespace lgo
