#include "lgo/space.hpp"

#include "lgo/errors.hpp"
#include "lgo/qp.hpp"

#include <algorithm>
#include <cmath>

namespace lgo {

namespace {

Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& gens) {
  Eigen::MatrixXd q(gens.rows(), gens.cols());
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < gens.cols(); ++c) {
    Eigen::VectorXd v = gens.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < k; ++j) v -= q.col(j).dot(v) * q.col(j);
    const double nv = v.norm();
    if (nv <= 1e-14 * std::max(1.0, gens.col(c).norm())) continue;
    q.col(k++) = v / nv;
  }
  return q.leftCols(k);
}

void check_finite(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i))) throw ValidationError(std::string(what) + ": non-finite coordinate");
}

std::vector<Rational> to_rationals(const Vector& v) {
  std::vector<Rational> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = Rational(v(i));
  return out;
}

// Solves a square nonsingular rational system.
std::vector<Rational> solve_exact(const QMatrix& a, const std::vector<Rational>& rhs) {
  QMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug(r, c) = a(r, c);
    aug(r, a.cols()) = rhs[r];
  }
  const EchelonForm ef = rref(aug);
  std::vector<Rational> x(a.cols());
  for (std::size_t r = 0; r < ef.pivots.size(); ++r)
    if (ef.pivots[r] < a.cols()) x[ef.pivots[r]] = ef.reduced(r, a.cols());
  return x;
}

Shape shape_in(const Shape& shape, const Eigen::MatrixXd& m, bool& empty) {
  // Re-expresses a shape under t = m s, where m has orthonormal columns.
  empty = false;
  if (const auto* box = std::get_if<Box>(&shape)) {
    Polytope p;
    p.A.resize(2 * m.rows(), m.cols());
    p.A << m, -m;
    p.b.resize(2 * m.rows());
    p.b << box->upper, -box->lower;
    empty = !polytope_nonempty(p.A, p.b);
    return p;
  }
  if (const auto* poly = std::get_if<Polytope>(&shape)) {
    Polytope p{poly->A * m, poly->b};
    empty = !polytope_nonempty(p.A, p.b);
    return p;
  }
  const auto& ball = std::get<Ball>(shape);
  const Vector c = m.transpose() * ball.center;
  const double off = (ball.center - m * c).squaredNorm();
  const double r2 = ball.radius * ball.radius - off;
  if (r2 < -kFeasibilityTol) {
    empty = true;
    return Ball{c, 0.0};
  }
  return Ball{c, std::sqrt(std::max(0.0, r2))};
}

}  // namespace

bool lex_less(const Vector& a, const Vector& b, double tol) {
  const auto n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i) < b(i) - tol) return true;
    if (a(i) > b(i) + tol) return false;
  }
  return a.size() < b.size();
}

Subspace Subspace::from_generators(const QMatrix& gens) {
  Subspace s;
  s.ambient_dim_ = gens.rows();
  if (s.ambient_dim_ == 0) throw ValidationError("subspace: ambient dimension must be >= 1");
  s.generators_ = gens.cols() == 0 ? QMatrix(gens.rows(), 0) : column_basis(gens);
  s.basis_ = gram_schmidt(s.generators_.to_double());
  if (static_cast<std::size_t>(s.basis_.cols()) != s.generators_.cols())
    throw ValidationError("subspace: generators numerically dependent");
  return s;
}

Subspace Subspace::from_vectors(std::size_t ambient_dim, const std::vector<Vector>& spanning) {
  QMatrix g(ambient_dim, spanning.size());
  for (std::size_t c = 0; c < spanning.size(); ++c) {
    if (static_cast<std::size_t>(spanning[c].size()) != ambient_dim)
      throw ValidationError("subspace: basis vector has wrong dimension");
    check_finite(spanning[c], "subspace basis");
    for (std::size_t r = 0; r < ambient_dim; ++r) g(r, c) = Rational(spanning[c](static_cast<Eigen::Index>(r)));
  }
  return from_generators(g);
}

Subspace Subspace::full(std::size_t n) { return from_generators(QMatrix::identity(n)); }

Subspace Subspace::zero(std::size_t n) { return from_generators(QMatrix(n, 0)); }

Subspace Subspace::axis(std::size_t n, std::size_t index) { return coordinate(n, {index}); }

Subspace Subspace::coordinate(std::size_t n, const std::vector<std::size_t>& indices) {
  QMatrix g(n, indices.size());
  for (std::size_t c = 0; c < indices.size(); ++c) {
    if (indices[c] >= n) throw ValidationError("subspace: axis index out of range");
    g(indices[c], c) = 1;
  }
  return from_generators(g);
}

QMatrix Subspace::constraint_rows() const { return nullspace(generators_.transpose()).transpose(); }

Subspace Subspace::complement() const { return from_generators(nullspace(generators_.transpose())); }

Vector Subspace::project(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != ambient_dim_) throw ValidationError("project: dimension mismatch");
  if (dim() == 0) return Vector::Zero(x.size());
  return basis_ * (basis_.transpose() * x);
}

bool Subspace::contains(const Vector& x, double tol) const {
  return (x - project(x)).norm() <= tol * std::max(1.0, x.norm());
}

bool Subspace::contains(const Subspace& other, double tol) const {
  if (other.ambient_dim_ != ambient_dim_) return false;
  if (other.dim() > dim()) return false;
  for (Eigen::Index c = 0; c < other.basis_.cols(); ++c)
    if (!contains(Vector(other.basis_.col(c)), tol)) return false;
  return true;
}

bool Subspace::same_as(const Subspace& other, double tol) const {
  if (other.ambient_dim_ != ambient_dim_ || other.dim() != dim()) return false;
  if (dim() == 0) return true;
  // Largest principal angle: sine equals the spectral norm of the residual.
  const Eigen::MatrixXd resid = other.basis_ - basis_ * (basis_.transpose() * other.basis_);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  return svd.singularValues()(0) <= tol;
}

Vector project(const Vector& x, const Subspace& s) { return s.project(x); }

Subspace intersect_subspaces(const std::vector<Subspace>& subspaces) {
  if (subspaces.empty()) throw ValidationError("intersect_subspaces: empty list");
  const std::size_t n = subspaces.front().ambient_dim();
  QMatrix rows(0, n);
  for (const auto& s : subspaces) {
    if (s.ambient_dim() != n) throw ValidationError("intersect_subspaces: dimension mismatch");
    rows = rows.vcat(s.constraint_rows());
  }
  if (rows.rows() == 0) return Subspace::full(n);
  return Subspace::from_generators(nullspace(rows));
}

Subspace sum_subspaces(const std::vector<Subspace>& subspaces) {
  if (subspaces.empty()) throw ValidationError("sum_subspaces: empty list");
  const std::size_t n = subspaces.front().ambient_dim();
  QMatrix g(n, 0);
  for (const auto& s : subspaces) g = g.hcat(s.generators());
  return Subspace::from_generators(g);
}

bool AffineSet::contains(const Vector& x, double tol) const { return directions.contains(x - point, tol); }

AffineIntersection intersect_affine(const std::vector<AffineSet>& sets) {
  if (sets.empty()) throw ValidationError("intersect_affine: empty list");
  const std::size_t n = sets.front().directions.ambient_dim();
  QMatrix rows(0, n);
  std::vector<Rational> rhs;
  for (const auto& a : sets) {
    if (a.directions.ambient_dim() != n || static_cast<std::size_t>(a.point.size()) != n)
      throw ValidationError("intersect_affine: dimension mismatch");
    const QMatrix r = a.directions.constraint_rows();
    const auto p = to_rationals(a.point);
    for (std::size_t i = 0; i < r.rows(); ++i) {
      Rational h = 0;
      for (std::size_t j = 0; j < n; ++j) h += r(i, j) * p[j];
      rhs.push_back(h);
    }
    rows = rows.vcat(r);
  }

  // Minimum-norm least squares: x = B' y with B a basis of the row space.
  std::vector<Rational> x(n);
  if (rows.rows() > 0) {
    const QMatrix bt = column_basis(rows.transpose());  // n x k
    const QMatrix m = rows * bt;                        // rows x k
    const QMatrix mt = m.transpose();
    const QMatrix normal = mt * m;
    std::vector<Rational> mh(mt.rows());
    for (std::size_t i = 0; i < mt.rows(); ++i)
      for (std::size_t j = 0; j < mt.cols(); ++j) mh[i] += mt(i, j) * rhs[j];
    const auto y = solve_exact(normal, mh);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < y.size(); ++j) x[i] += bt(i, j) * y[j];
  }

  Rational sq = 0;
  double rhs_scale = 1.0;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    Rational ri = -rhs[i];
    for (std::size_t j = 0; j < n; ++j) ri += rows(i, j) * x[j];
    sq += ri * ri;
    rhs_scale = std::max(rhs_scale, std::abs(rhs[i].get_d()));
  }

  AffineIntersection out;
  out.residual = std::sqrt(sq.get_d());
  out.set.point = Vector(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out.set.point(static_cast<Eigen::Index>(i)) = x[i].get_d();
  out.set.directions = rows.rows() == 0 ? Subspace::full(n) : Subspace::from_generators(nullspace(rows));
  if (out.residual > 1e-9 * rhs_scale)
    out.status = AffineStatus::empty;
  else
    out.status = out.set.directions.dim() == 0 ? AffineStatus::point : AffineStatus::affine;
  return out;
}

FeasibleSet::FeasibleSet(Subspace carrier, Shape shape) : carrier_(std::move(carrier)), shape_(std::move(shape)) {
  const auto d = static_cast<Eigen::Index>(carrier_.dim());
  if (const auto* box = std::get_if<Box>(&shape_)) {
    if (box->lower.size() != d || box->upper.size() != d) throw ValidationError("box: bounds do not match carrier dimension");
    check_finite(box->lower, "box");
    check_finite(box->upper, "box");
    for (Eigen::Index i = 0; i < d; ++i)
      if (box->lower(i) > box->upper(i) + kFeasibilityTol) throw ValidationError("box: empty (lower > upper)");
  } else if (const auto* poly = std::get_if<Polytope>(&shape_)) {
    if (poly->A.cols() != d || poly->A.rows() != poly->b.size())
      throw ValidationError("polytope: shape does not match carrier dimension");
    for (Eigen::Index i = 0; i < poly->A.size(); ++i)
      if (!std::isfinite(poly->A.data()[i])) throw ValidationError("polytope: non-finite entry");
    check_finite(poly->b, "polytope");
    if (!recession_cone_trivial(poly->A)) throw ValidationError("polytope: unbounded");
    if (!polytope_nonempty(poly->A, poly->b)) throw ValidationError("polytope: empty");
  } else {
    const auto& ball = std::get<Ball>(shape_);
    if (ball.center.size() != d) throw ValidationError("ball: center does not match carrier dimension");
    check_finite(ball.center, "ball");
    if (!std::isfinite(ball.radius) || ball.radius < 0) throw ValidationError("ball: radius must be finite and >= 0");
  }
}

bool FeasibleSet::contains_local(const Vector& t, double tol) const {
  if (const auto* box = std::get_if<Box>(&shape_)) {
    for (Eigen::Index i = 0; i < t.size(); ++i)
      if (t(i) < box->lower(i) - tol || t(i) > box->upper(i) + tol) return false;
    return true;
  }
  if (const auto* poly = std::get_if<Polytope>(&shape_)) {
    if (poly->A.rows() == 0) return true;
    const Vector slack = poly->A * t - poly->b;
    return slack.size() == 0 || slack.maxCoeff() <= tol;
  }
  const auto& ball = std::get<Ball>(shape_);
  return (t - ball.center).norm() <= ball.radius + tol;
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  return carrier_.contains(x, tol) && contains_local(to_local(x), tol);
}

Polytope FeasibleSet::as_polytope() const {
  if (const auto* poly = std::get_if<Polytope>(&shape_)) return *poly;
  if (const auto* box = std::get_if<Box>(&shape_)) {
    const auto d = box->lower.size();
    Polytope p;
    p.A.resize(2 * d, d);
    p.A << Eigen::MatrixXd::Identity(d, d), -Eigen::MatrixXd::Identity(d, d);
    p.b.resize(2 * d);
    p.b << box->upper, -box->lower;
    return p;
  }
  throw ValidationError("ball has no halfspace representation");
}

std::vector<Vector> FeasibleSet::vertices_local() const {
  if (const auto* box = std::get_if<Box>(&shape_)) {
    const auto d = box->lower.size();
    if (d > 20) throw ResourceCapError("box vertices: dimension too large");
    std::vector<Vector> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      Vector v(d);
      for (Eigen::Index i = 0; i < d; ++i) v(i) = (mask >> i) & 1 ? box->upper(i) : box->lower(i);
      out.push_back(v);
    }
    return out;
  }
  const Polytope p = as_polytope();
  return enumerate_vertices(p.A, p.b);
}

std::pair<Vector, Vector> FeasibleSet::bounds_local() const {
  if (const auto* box = std::get_if<Box>(&shape_)) return {box->lower, box->upper};
  if (const auto* ball = std::get_if<Ball>(&shape_)) {
    const Vector r = Vector::Constant(ball->center.size(), ball->radius);
    return {ball->center - r, ball->center + r};
  }
  const auto verts = vertices_local();
  Vector lo = verts.front();
  Vector hi = verts.front();
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

double FeasibleSet::support(const Vector& dir) const {
  const Vector w = to_local(dir);
  if (const auto* box = std::get_if<Box>(&shape_)) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) s += std::max(w(i) * box->lower(i), w(i) * box->upper(i));
    return s;
  }
  if (const auto* ball = std::get_if<Ball>(&shape_)) return w.dot(ball->center) + ball->radius * w.norm();
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_local()) s = std::max(s, w.dot(v));
  return s;
}

Vector FeasibleSet::nearest_local(const Vector& t) const {
  if (const auto* box = std::get_if<Box>(&shape_)) return t.cwiseMax(box->lower).cwiseMin(box->upper);
  if (const auto* ball = std::get_if<Ball>(&shape_)) {
    const Vector off = t - ball->center;
    const double r = off.norm();
    return r <= ball->radius ? t : Vector(ball->center + off * (ball->radius / r));
  }
  const auto& poly = std::get<Polytope>(shape_);
  if (contains_local(t, 0.0)) return t;
  QuadraticObjective f;
  const auto d = t.size();
  f.H = -Eigen::MatrixXd::Identity(d, d);
  f.g = t;
  f.c = -0.5 * t.squaredNorm();
  const auto sol = maximize_concave_qp(f, poly.A, poly.b, 1e-12);
  if (sol.maximizers.empty()) throw ValidationError("polytope projection failed");
  return sol.maximizers.front();
}

Vector FeasibleSet::representative() const {
  if (const auto* box = std::get_if<Box>(&shape_)) return to_ambient(0.5 * (box->lower + box->upper));
  if (const auto* ball = std::get_if<Ball>(&shape_)) return to_ambient(ball->center);
  const auto verts = vertices_local();
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (const auto& v : verts) mean += v;
  return to_ambient(mean / static_cast<double>(verts.size()));
}

std::optional<FeasibleSet> FeasibleSet::section(const Subspace& s) const {
  if (s.contains(carrier_) && carrier_.contains(s)) return *this;
  const Subspace sub = carrier_.contains(s) ? s : intersect_subspaces({carrier_, s});
  const Eigen::MatrixXd m = carrier_.basis().transpose() * sub.basis();
  bool empty = false;
  Shape shape = shape_in(shape_, m, empty);
  if (empty) return std::nullopt;
  return FeasibleSet(sub, std::move(shape));
}

std::optional<FeasibleSet> intersect_feasible(const FeasibleSet& a, const FeasibleSet& b) {
  const Subspace common = intersect_subspaces({a.carrier(), b.carrier()});
  auto sa = a.section(common);
  auto sb = b.section(common);
  if (!sa || !sb) return std::nullopt;
  // Put both sections in the coordinates of `common`.
  auto in_common = [&](const FeasibleSet& f) -> std::optional<FeasibleSet> {
    const Eigen::MatrixXd m = f.carrier().basis().transpose() * common.basis();
    bool empty = false;
    Shape shape = f.carrier().basis().cols() == common.basis().cols() &&
                          (f.carrier().basis() - common.basis()).norm() == 0.0
                      ? f.shape()
                      : shape_in(f.shape(), m, empty);
    if (empty) return std::nullopt;
    return FeasibleSet(common, std::move(shape));
  };
  sa = in_common(*sa);
  sb = in_common(*sb);
  if (!sa || !sb) return std::nullopt;
  if (!sa->is_ball() && !sb->is_ball()) {
    const Polytope pa = sa->as_polytope();
    const Polytope pb = sb->as_polytope();
    Polytope p;
    p.A.resize(pa.A.rows() + pb.A.rows(), pa.A.cols());
    p.A << pa.A, pb.A;
    p.b.resize(pa.b.size() + pb.b.size());
    p.b << pa.b, pb.b;
    if (!polytope_nonempty(p.A, p.b)) return std::nullopt;
    return FeasibleSet(common, std::move(p));
  }
  if (feasible_contains(*sa, *sb)) return sb;
  if (feasible_contains(*sb, *sa)) return sa;
  // Disjointness is decidable from nearest points.
  const FeasibleSet& ball = sa->is_ball() ? *sa : *sb;
  const FeasibleSet& other = sa->is_ball() ? *sb : *sa;
  const auto& bl = std::get<Ball>(ball.shape());
  const Vector near = other.nearest_local(bl.center);
  if ((near - bl.center).norm() > bl.radius + kFeasibilityTol) return std::nullopt;
  throw ValidationError("intersection of a ball with a non-nested set is not representable");
}

bool feasible_contains(const FeasibleSet& outer, const FeasibleSet& inner, double tol) {
  if (!outer.carrier().contains(inner.carrier(), tol)) return false;
  if (!inner.is_ball()) {
    for (const auto& v : inner.vertices_local())
      if (!outer.contains(inner.to_ambient(v), tol)) return false;
    return true;
  }
  const auto& ib = std::get<Ball>(inner.shape());
  const Vector ci = inner.to_ambient(ib.center);
  if (!outer.is_ball()) {
    const Polytope p = outer.as_polytope();
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
      const Vector dir = outer.carrier().basis() * p.A.row(i).transpose();
      if (inner.support(dir) > p.b(i) + tol) return false;
    }
    return true;
  }
  const auto& ob = std::get<Ball>(outer.shape());
  const Vector w = ci - outer.to_ambient(ob.center);
  const double pw = inner.carrier().project(w).norm();
  const double far = std::sqrt(w.squaredNorm() + 2 * ib.radius * pw + ib.radius * ib.radius);
  return far <= ob.radius + tol;
}

std::vector<Vector> gamma(const Vector& x, const FeasibleSet& f) {
  if (static_cast<std::size_t>(x.size()) != f.carrier().ambient_dim()) throw ValidationError("gamma: dimension mismatch");
  return {f.to_ambient(f.nearest_local(f.to_local(x)))};
}

}  // namespace lgo
