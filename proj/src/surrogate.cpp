#include "lgo/surrogate.hpp"

#include "lgo/errors.hpp"
#include "lgo/glue.hpp"
#include "lgo/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace lgo {

namespace {

constexpr double kClusterDistance = 1e-4;
constexpr double kTieValue = 1e-6;
constexpr double kPointWeight = 1e3;
constexpr double kChildWeight = 1e6;

double monomial_value(const Monomial& m, const Vector& t) {
  double v = 1.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] > 0) v *= std::pow(t(static_cast<Eigen::Index>(i)), m[i]);
  return v;
}

double monomial_partial(const Monomial& m, const Vector& t, std::size_t k) {
  if (m[k] == 0) return 0.0;
  Monomial d = m;
  --d[k];
  return m[k] * monomial_value(d, t);
}

RPoly monomial_poly(std::size_t nvars, const Monomial& m) {
  RPoly p(nvars);
  p.add_term(m, 1.0);
  return p;
}

Eigen::VectorXd min_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() == 0 || a.cols() == 0) return Eigen::VectorXd::Zero(a.cols());
  return a.completeOrthogonalDecomposition().solve(b);
}

Eigen::MatrixXd vstack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  Eigen::MatrixXd out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Eigen::VectorXd vstack(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

struct Solve {
  Eigen::VectorXd x;
  bool feasible = true;
};

// min |S x - y| subject to E x = e, by the nullspace method.
Solve constrained_ls(const Eigen::MatrixXd& s, const Eigen::VectorXd& y, const Eigen::MatrixXd& e,
                     const Eigen::VectorXd& rhs) {
  if (e.rows() == 0) return {min_norm(s, y), true};
  Solve out;
  const Eigen::VectorXd x0 = min_norm(e, rhs);
  out.feasible = (e * x0 - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm());
  const Eigen::MatrixXd z = float_nullspace(e, 1e-10);
  if (z.cols() == 0 || s.rows() == 0) {
    out.x = x0;
    return out;
  }
  out.x = x0 + z * min_norm(s * z, y - s * x0);
  return out;
}

struct PointTarget {
  Vector x;  // ambient
  double value = 0.0;
};

using TargetFn = std::function<double(const Vector&)>;  // ambient point of the flat

// Fits a piece for class `cls` in its carrier coordinates.
PieceFit fit_in_flat(std::size_t cls, const Partition& p, const IncidenceMatrix& t, const std::vector<RPoly>& pieces,
                     int degree, const std::vector<Vector>& samples, const TargetFn& target,
                     const std::vector<PointTarget>& points) {
  const Subspace& carrier = p.classes[cls].carrier;
  const Eigen::MatrixXd& b = carrier.basis();
  const std::size_t d = carrier.dim();
  const auto monos = monomials_up_to(d, degree);
  const auto cols = static_cast<Eigen::Index>(monos.size());

  Eigen::MatrixXd s(static_cast<Eigen::Index>(samples.size()), cols);
  Eigen::VectorXd y(s.rows());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vector tt = b.transpose() * samples[i];
    for (Eigen::Index k = 0; k < cols; ++k) s(static_cast<Eigen::Index>(i), k) = monomial_value(monos[static_cast<std::size_t>(k)], tt);
    y(static_cast<Eigen::Index>(i)) = target(b * tt);
  }

  Eigen::MatrixXd ec(0, cols);
  Eigen::VectorXd rc(0);
  const auto kids = children(t, cls);
  for (std::size_t child : kids) {
    const Subspace& lower = p.classes[child].carrier;
    const Eigen::MatrixXd g = b.transpose() * lower.basis();
    const auto lower_monos = monomials_up_to(lower.dim(), degree);
    Eigen::MatrixXd block(static_cast<Eigen::Index>(lower_monos.size()), cols);
    for (Eigen::Index k = 0; k < cols; ++k)
      block.col(k) = coefficients(substitute(monomial_poly(d, monos[static_cast<std::size_t>(k)]), g), lower_monos);
    ec = vstack(ec, block);
    rc = vstack(rc, coefficients(restrict(pieces[child], lower), lower_monos));
  }

  Eigen::MatrixXd ep(0, cols);
  Eigen::VectorXd rp(0);
  for (const auto& pt : points) {
    const Vector tt = b.transpose() * pt.x;
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(d) + 1, cols);
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& m = monos[static_cast<std::size_t>(k)];
      rows(0, k) = monomial_value(m, tt);
      for (std::size_t v = 0; v < d; ++v) rows(static_cast<Eigen::Index>(v) + 1, k) = monomial_partial(m, tt, v);
    }
    Eigen::VectorXd r = Eigen::VectorXd::Zero(rows.rows());
    r(0) = pt.value;
    ep = vstack(ep, rows);
    rp = vstack(rp, r);
  }

  PieceFit fit;
  Solve sol = constrained_ls(s, y, vstack(ec, ep), vstack(rc, rp));
  if (!sol.feasible) {
    fit.conflict = true;
    sol = constrained_ls(vstack(s, Eigen::MatrixXd(kPointWeight * ep)), vstack(y, Eigen::VectorXd(kPointWeight * rp)), ec, rc);
  }
  if (!sol.feasible)
    sol = constrained_ls(vstack(vstack(s, Eigen::MatrixXd(kPointWeight * ep)), Eigen::MatrixXd(kChildWeight * ec)),
                         vstack(vstack(y, Eigen::VectorXd(kPointWeight * rp)), Eigen::VectorXd(kChildWeight * rc)),
                         Eigen::MatrixXd(0, cols), Eigen::VectorXd(0));

  const RPoly q = from_coefficients(d, monos, sol.x);
  fit.piece = substitute(q, Eigen::MatrixXd(b.transpose()));
  fit.piece.prune(1e-13 * std::max(1.0, fit.piece.max_abs_coeff()));
  if (s.rows() > 0) fit.fit_residual = (s * sol.x - y).norm() / std::sqrt(static_cast<double>(s.rows()));
  for (std::size_t child : kids) {
    const RPoly diff = restrict(fit.piece - pieces[child], p.classes[child].carrier);
    fit.constraint_residual = std::max(fit.constraint_residual, diff.max_abs_coeff());
  }
  return fit;
}

// Inclusion-exclusion weights of the flats strictly below cls: 1 on the
// flats right below, and 1 minus the weights of the flats in between otherwise.
std::vector<std::pair<std::size_t, double>> extension_weights(std::size_t cls, const Partition& p) {
  std::vector<std::size_t> below;
  for (std::size_t c = 0; c < p.size(); ++c)
    if (strictly_below(p, c, cls)) below.push_back(c);
  std::stable_sort(below.begin(), below.end(), [&p](std::size_t a, std::size_t b) {
    return p.classes[a].carrier.dim() > p.classes[b].carrier.dim();
  });
  std::map<std::size_t, double> w;
  for (std::size_t c : below) {
    double sum = 0.0;
    for (const auto& [e, we] : w)
      if (strictly_below(p, c, e)) sum += we;
    w[c] = 1.0 - sum;
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t c : below)
    if (w[c] != 0.0) out.emplace_back(c, w[c]);
  return out;
}

TargetFn extension_target(std::size_t cls, const Partition& p, const std::vector<RPoly>& pieces) {
  auto weights = extension_weights(cls, p);
  return [weights, &pieces](const Vector& x) {
    double v = 0.0;
    for (const auto& [c, w] : weights) v += w * eval(pieces[c], x);
    return v;
  };
}

std::vector<std::vector<HostedMaximum>> maxima_by_class(const std::vector<LocalProblem>& problems, const Partition& p) {
  std::vector<std::vector<HostedMaximum>> out(p.size());
  for (auto& h : hosted_maxima(problems, p)) out[h.cls].push_back(std::move(h));
  return out;
}

int degree_for_count(std::size_t c) { return c == 0 ? 0 : (c == 1 ? 2 : static_cast<int>(2 * c)); }

void require_compatible(const std::vector<LocalProblem>& problems) {
  for (std::size_t a = 0; a < problems.size(); ++a)
    for (std::size_t b = a + 1; b < problems.size(); ++b)
      if (may_overlap(problems[a], problems[b]) && !utilities_agree(problems[a], problems[b]))
        throw IncompatibilityError("utilities of '" + problems[a].id() + "' and '" + problems[b].id() +
                                       "' disagree on their overlap",
                                   problems[a].id(), problems[b].id());
}

double box_scale(const SampleBox& box) {
  return std::max({1.0, box.lower.cwiseAbs().maxCoeff(), box.upper.cwiseAbs().maxCoeff()});
}

}  // namespace

double evaluate(const PiecewiseFn& f, const Partition& p, const Vector& x) {
  return eval(f.pieces.at(class_of(x, p)), x);
}

std::vector<HostedMaximum> hosted_maxima(const std::vector<LocalProblem>& problems, const Partition& p) {
  std::vector<HostedMaximum> out;
  for (std::size_t k = 0; k < problems.size(); ++k) {
    const auto& prob = problems[k];
    if (!prob.solved()) throw ValidationError("problem '" + prob.id() + "' has not been solved");
    for (const auto& x : prob.solutions()) {
      bool fresh = true;
      for (const auto& h : out)
        if ((h.x - x).norm() <= kClusterDistance) fresh = false;
      if (fresh) out.push_back({x, prob.value_at(x), k, class_of(x, p)});
    }
  }
  return out;
}

int choose_degree(const std::vector<LocalProblem>& problems, const Partition& p) {
  std::size_t most = 0;
  for (const auto& hosted : maxima_by_class(problems, p)) most = std::max(most, hosted.size());
  if (most == 0) return 0;
  return most == 1 ? 2 : static_cast<int>(most);
}

int required_degree(const std::vector<LocalProblem>& problems, const Partition& p) {
  int r = 0;
  for (const auto& hosted : maxima_by_class(problems, p)) r = std::max(r, degree_for_count(hosted.size()));
  return r;
}

ContinuitySystem continuity_system(const Partition& p, const IncidenceMatrix& t, int degree) {
  if (degree < 0 || degree > kMaxSurrogateDegree)
    throw ResourceCapError("surrogate degree " + std::to_string(degree) + " is outside [0, " +
                           std::to_string(kMaxSurrogateDegree) + "]");
  ContinuitySystem sys;
  sys.classes = p.size();
  sys.nvars = p.ambient_dim;
  sys.degree = degree;
  sys.monomials = monomials_up_to(sys.nvars, degree);
  const std::size_t per = sys.per_class();

  std::vector<std::vector<Rational>> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const auto lower_monos = monomials_up_to(row.boundary.dim(), degree);
    std::vector<std::vector<Rational>> restricted;  // per monomial, coefficients over lower_monos
    for (const auto& m : sys.monomials) {
      QPoly mono(sys.nvars);
      mono.add_term(m, 1);
      restricted.push_back(coefficients(restrict(mono, row.boundary), lower_monos));
    }
    for (std::size_t beta = 0; beta < lower_monos.size(); ++beta) {
      std::vector<Rational> eq(sys.unknowns());
      bool nonzero = false;
      for (std::size_t k = 0; k < per; ++k) {
        const Rational& c = restricted[k][beta];
        if (sgn(c) == 0) continue;
        eq[row.hi * per + k] += c;
        eq[row.lo * per + k] -= c;
        nonzero = true;
      }
      if (!nonzero) continue;
      rows.push_back(std::move(eq));
      sys.row_owner.push_back(i);
    }
  }
  sys.matrix = QMatrix(rows.size(), sys.unknowns());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) sys.matrix(r, c) = rows[r][c];
  return sys;
}

QMatrix kernel_basis(const ContinuitySystem& sys) {
  if (sys.matrix.rows() == 0) return QMatrix::identity(sys.unknowns());
  return nullspace(sys.matrix);
}

ModuleElement column_element(const QMatrix& coeffs, std::size_t j, const ContinuitySystem& sys) {
  ModuleElement e(sys.classes, sys.nvars);
  const std::size_t per = sys.per_class();
  for (std::size_t c = 0; c < sys.classes; ++c)
    for (std::size_t k = 0; k < per; ++k) e[c].add_term(sys.monomials[k], coeffs(c * per + k, j));
  return e;
}

PiecewiseFn piecewise_from(const Eigen::VectorXd& coeffs, const ContinuitySystem& sys) {
  PiecewiseFn f;
  f.degree = sys.degree;
  const auto per = static_cast<Eigen::Index>(sys.per_class());
  for (std::size_t c = 0; c < sys.classes; ++c)
    f.pieces.push_back(from_coefficients(sys.nvars, sys.monomials, coeffs.segment(static_cast<Eigen::Index>(c) * per, per)));
  return f;
}

Eigen::VectorXd coefficients(const PiecewiseFn& f, const ContinuitySystem& sys) {
  if (f.pieces.size() != sys.classes) throw ValidationError("piecewise function has the wrong number of pieces");
  const auto per = static_cast<Eigen::Index>(sys.per_class());
  Eigen::VectorXd out(static_cast<Eigen::Index>(sys.unknowns()));
  for (std::size_t c = 0; c < sys.classes; ++c)
    out.segment(static_cast<Eigen::Index>(c) * per, per) = coefficients(f.pieces[c], sys.monomials);
  return out;
}

PieceFit fit_alpha(const Partition& p, const IncidenceMatrix& t, const std::vector<RPoly>& pieces, int degree,
                   const std::vector<Vector>& samples) {
  std::size_t alpha = p.size();
  for (std::size_t c = 0; c < p.size(); ++c)
    if (p.classes[c].kind == ClassKind::complement) alpha = c;
  if (alpha == p.size()) throw ValidationError("fit_alpha: the partition has no complement class");
  return fit_in_flat(alpha, p, t, pieces, degree, samples, extension_target(alpha, p, pieces), {});
}

CanonicalPieces canonical_pieces(const std::vector<LocalProblem>& problems, const Partition& p,
                                 const IncidenceMatrix& t, int degree, const std::vector<Vector>& samples) {
  const auto hosted = maxima_by_class(problems, p);
  CanonicalPieces out;
  out.f.degree = degree;
  out.f.pieces.assign(p.size(), RPoly(p.ambient_dim));
  out.fits.resize(p.size());

  std::vector<std::size_t> order(p.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&p](std::size_t a, std::size_t b) {
    return p.classes[a].carrier.dim() < p.classes[b].carrier.dim();
  });

  for (std::size_t c : order) {
    const auto& here = hosted[c];
    if (degree_for_count(here.size()) > degree)
      throw ValidationError("degree " + std::to_string(degree) + " cannot carry the " + std::to_string(here.size()) +
                            " maxima of class " + std::to_string(c) + "; try degree " + std::to_string(degree + 1));
    const Subspace& carrier = p.classes[c].carrier;
    std::vector<PointTarget> points;
    TargetFn target;
    if (p.classes[c].kind == ClassKind::complement) {
      out.fits[c] = fit_alpha(p, t, out.f.pieces, degree, samples);
      out.f.pieces[c] = out.fits[c].piece;
      if (out.fits[c].conflict) {
        out.conflict = true;
        out.notes.push_back("class " + std::to_string(c) + ": continuity constraints relaxed");
      }
      continue;
    }
    if (!here.empty()) {
      double v = -std::numeric_limits<double>::infinity();
      std::vector<Vector> centers;
      for (const auto& h : here) {
        v = std::max(v, h.value);
        centers.push_back(h.x);
      }
      for (const auto& h : here) points.push_back({h.x, v});
      target = [v, centers](const Vector& x) {
        double prod = 1.0;
        for (const auto& ctr : centers) prod *= (x - ctr).squaredNorm();
        return v - prod;
      };
    } else if (!children(t, c).empty()) {
      target = extension_target(c, p, out.f.pieces);
    } else {
      // Minimal flat without maxima: the best utility level seen at the
      // projections of the local solutions of the problems through it.
      double level = -std::numeric_limits<double>::infinity();
      for (std::size_t k : p.classes[c].label)
        for (const auto& x : problems[k].solutions()) level = std::max(level, problems[k].value_at(carrier.project(x)));
      if (!std::isfinite(level)) level = 0.0;
      target = [level](const Vector&) { return level; };
    }
    out.fits[c] = fit_in_flat(c, p, t, out.f.pieces, degree, samples, target, points);
    out.f.pieces[c] = out.fits[c].piece;
    if (out.fits[c].conflict) {
      out.conflict = true;
      out.notes.push_back("class " + std::to_string(c) + ": prescribed maxima conflict with lower pieces");
    }
  }
  return out;
}

double continuity_residual(const PiecewiseFn& f, const Partition&, const IncidenceMatrix& t, std::size_t per_row,
                           double scale, std::uint64_t seed, bool parallel) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Vector> pts;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Eigen::MatrixXd& b = t.rows[i].boundary.basis();
    for (std::size_t s = 0; s < per_row; ++s) {
      Vector c(b.cols());
      for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = u(rng);
      pts.push_back(b * c);
      owner.push_back(i);
    }
  }
  std::vector<FlatPoly> flat;
  for (const auto& piece : f.pieces) flat.emplace_back(piece);
  std::vector<Vector> indexed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    indexed[i] = Vector(pts[i].size() + 1);
    indexed[i] << pts[i], static_cast<double>(owner[i]);
  }
  const SampleFn fn = [&](const Vector& v) {
    const auto& row = t.rows[static_cast<std::size_t>(v(v.size() - 1))];
    const Vector x = v.head(v.size() - 1);
    return std::abs(flat[row.hi](x) - flat[row.lo](x));
  };
  const auto diffs = parallel ? map_samples(indexed, fn) : map_samples_serial(indexed, fn);
  double worst = 0.0;
  for (double d : diffs) worst = std::max(worst, d);
  return worst;
}

VMaximum maximize_V(const PiecewiseFn& f, const Partition& p, const FeasibleSet& region, const SolverOptions& opts) {
  if (region.carrier().dim() != p.ambient_dim) throw ValidationError("maximize_V: region must be full-dimensional");
  struct Winner {
    Vector x;
    double value;
    std::size_t cls;
  };
  std::vector<Winner> winners;
  VMaximum out;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const Subspace& carrier = p.classes[c].carrier;
    if (carrier.dim() == 0) {
      const Vector origin = Vector::Zero(static_cast<Eigen::Index>(p.ambient_dim));
      if (region.contains(origin)) winners.push_back({origin, eval(f.pieces[c], origin), c});
      continue;
    }
    const auto sec = region.section(carrier);
    if (!sec) continue;
    const LocalSolution sol = maximize_on(restrict(f.pieces[c], sec->carrier()), *sec, opts);
    out.degenerate = out.degenerate || sol.certificate.degenerate;
    winners.push_back({sec->to_ambient(sol.points.front()), sol.certificate.value, c});
  }
  if (winners.empty()) throw ValidationError("maximize_V: the region meets no class");
  out.value = -std::numeric_limits<double>::infinity();
  for (const auto& w : winners) out.value = std::max(out.value, w.value);
  for (const auto& w : winners) {
    if (w.value < out.value - kTieValue) continue;
    bool fresh = true;
    for (const auto& q : out.points)
      if ((q - w.x).norm() <= kTieValue) fresh = false;
    if (!fresh) continue;
    out.points.push_back(w.x);
    out.classes.push_back(w.cls);
  }
  // Sort points (and their classes) lexicographically.
  std::vector<std::size_t> idx(out.points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lex_less(out.points[a], out.points[b]); });
  VMaximum sorted = out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sorted.points[i] = out.points[idx[i]];
    sorted.classes[i] = out.classes[idx[i]];
  }
  return sorted;
}

SurrogateState build_surrogate(std::vector<LocalProblem> problems, const SurrogateOptions& opts) {
  if (problems.empty()) throw ValidationError("surrogate: no problems");
  const std::size_t n = problems.front().ambient_dim();
  for (auto& prob : problems) {
    if (prob.ambient_dim() != n) throw ValidationError("surrogate: problems live in different ambient spaces");
    if (!prob.solved()) prob = solved(std::move(prob), opts.solver);
  }
  require_compatible(problems);

  SurrogateState st;
  st.options = opts;
  st.problems = std::move(problems);
  std::vector<Subspace> carriers;
  for (const auto& prob : st.problems) carriers.push_back(prob.carrier());
  st.partition = build_partition(carriers);
  st.incidence = build_incidence(st.partition);
  st.degree_law = choose_degree(st.problems, st.partition);
  const int needed = required_degree(st.problems, st.partition);
  if (opts.degree) {
    if (*opts.degree < needed)
      throw ValidationError("degree " + std::to_string(*opts.degree) + " is infeasible: the prescribed maxima need " +
                            std::to_string(needed) + "; try --degree " + std::to_string(*opts.degree + 1));
    st.degree = *opts.degree;
  } else {
    st.degree = std::max(st.degree_law, needed);
  }
  if (st.degree > kMaxSurrogateDegree)
    throw ResourceCapError("surrogate degree " + std::to_string(st.degree) + " exceeds the cap of " +
                           std::to_string(kMaxSurrogateDegree));

  st.box = opts.box ? *opts.box : bounding_box(st.problems, 0.5);
  st.region = opts.region ? *opts.region : bounding_box(st.problems, 0.0);
  const auto samples = uniform_samples(st.box, opts.samples, opts.seed);
  st.canonical = canonical_pieces(st.problems, st.partition, st.incidence, st.degree, samples);
  st.notes = st.canonical.notes;
  for (const auto& w : st.partition.warnings) st.notes.push_back(w);

  st.system = continuity_system(st.partition, st.incidence, st.degree);
  st.kernel = kernel_basis(st.system);
  if (st.kernel.cols() == 0) {
    st.empty_kernel = true;
    st.notes.push_back("empty kernel: V is the zero function");
    st.V = piecewise_from(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(st.system.unknowns())), st.system);
  } else {
    const Eigen::MatrixXd k = st.kernel.to_double();
    const Eigen::VectorXd w = k.completeOrthogonalDecomposition().solve(coefficients(st.canonical.f, st.system));
    st.weights.assign(w.data(), w.data() + w.size());
    st.V = piecewise_from(k * w, st.system);
  }
  const FeasibleSet region(Subspace::full(n), Box{st.region.lower, st.region.upper});
  st.maxima = maximize_V(st.V, st.partition, region, opts.solver);
  if (st.maxima.degenerate) st.notes.push_back("V is constant on part of the region; representatives reported");
  return st;
}

EvolveResult evolve(const SurrogateState& state, LocalProblem next, std::size_t stability_samples) {
  if (state.problems.empty()) throw ValidationError("evolve: empty state");
  const std::size_t n = state.partition.ambient_dim;
  if (next.ambient_dim() != n) throw ValidationError("evolve: new problem lives in a different ambient space");
  if (!next.solved()) next = solved(std::move(next), state.options.solver);

  EvolveResult out;
  out.r_old = state.degree_law;
  for (const auto& prob : state.problems) {
    const bool same = prob.carrier().same_as(next.carrier()) && feasible_contains(prob.feasible(), next.feasible()) &&
                      feasible_contains(next.feasible(), prob.feasible()) && utilities_agree(prob, next);
    if (same) {
      out.state = state;
      out.duplicate = true;
      out.r_new = out.r_old;
      return out;
    }
  }

  std::vector<LocalProblem> problems = state.problems;
  problems.push_back(std::move(next));
  out.state = build_surrogate(std::move(problems), state.options);
  out.r_new = out.state.degree_law;
  out.degree_step_ok = out.r_new == out.r_old || out.r_new == out.r_old + 1;

  // Transport the old pieces: a new flat takes the piece of the smallest old
  // flat containing it.
  const Partition& oldp = state.partition;
  const Partition& newp = out.state.partition;
  PiecewiseFn moved;
  moved.degree = std::max(state.degree, out.state.degree);
  for (const auto& cls : newp.classes) {
    std::size_t best = oldp.size();
    for (std::size_t e = 0; e < oldp.size(); ++e) {
      if (!oldp.classes[e].carrier.contains(cls.carrier)) continue;
      if (best == oldp.size() || oldp.classes[e].carrier.dim() < oldp.classes[best].carrier.dim()) best = e;
    }
    moved.pieces.push_back(state.V.pieces[best]);
  }
  const ContinuitySystem sys = continuity_system(newp, out.state.incidence, moved.degree);
  const Eigen::VectorXd coeffs = coefficients(moved, sys);
  out.stability.membership_residual =
      sys.matrix.rows() == 0 ? 0.0 : (sys.matrix.to_double() * coeffs).cwiseAbs().maxCoeff();

  // Sample old carriers away from the new one.
  const Subspace& fresh = out.state.problems.back().carrier();
  out.stability.seed = state.options.seed + 17;
  std::mt19937_64 rng(out.stability.seed);
  const double scale = box_scale(state.box);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<const Subspace*> usable;
  for (const auto& prob : state.problems)
    if (!fresh.contains(prob.carrier())) usable.push_back(&prob.carrier());
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < stability_samples && !usable.empty(); ++i) {
    const Subspace& s = *usable[i % usable.size()];
    for (int attempt = 0; attempt < 32; ++attempt) {
      Vector c(s.basis().cols());
      for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = u(rng);
      Vector x = s.basis() * c;
      if ((x - fresh.project(x)).norm() > 1e-6) {
        pts.push_back(std::move(x));
        break;
      }
    }
  }
  const SampleFn fn = [&](const Vector& x) {
    return std::abs(evaluate(moved, newp, x) - evaluate(state.V, oldp, x));
  };
  const auto diffs = state.options.parallel ? map_samples(pts, fn) : map_samples_serial(pts, fn);
  for (double d : diffs) out.stability.agreement = std::max(out.stability.agreement, d);
  out.stability.samples = pts.size();
  out.stability.pass = out.stability.membership_residual <= 1e-9 && out.stability.agreement <= 1e-9;
  return out;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "m,distance,covered,r,lambda,tau,mu,m_hat\n";
  for (const auto& r : rows)
    out << r.m << ',' << r.distance << ',' << (r.covered ? 1 : 0) << ',' << r.r << ',' << r.lambda << ',' << r.tau
        << ',' << r.mu << ',' << (m_hat ? std::to_string(*m_hat) : std::string()) << '\n';
  return out.str();
}

ConvergenceReport convergence_run(const QPoly& u, const std::vector<LocalProblem>& sequence, const SampleBox& region,
                                  const SurrogateOptions& opts, std::size_t budget) {
  if (sequence.empty()) throw ValidationError("convergence_run: empty problem sequence");
  const std::size_t n = u.nvars();
  const Subspace full = Subspace::full(n);
  if (!is_strictly_concave(u, full).strictly_concave)
    throw ValidationError("convergence_run: the true utility must be strictly concave");
  if (!restrictions_of(u, sequence))
    throw ValidationError("convergence_run: every local utility must be the restriction of the true utility");

  ConvergenceReport rep;
  const FeasibleSet box(full, Box{region.lower, region.upper});
  const LocalSolution best = maximize_on(to_float(u), box, opts.solver);
  rep.x_true = box.to_ambient(best.points.front());
  rep.true_value = best.certificate.value;

  SurrogateOptions o = opts;
  o.region = region;
  const std::size_t steps = budget == 0 ? sequence.size() : std::min(budget, sequence.size());
  SurrogateState state;
  for (std::size_t m = 0; m < steps; ++m) {
    state = m == 0 ? build_surrogate({sequence[0]}, o) : evolve(state, sequence[m]).state;
    ConvergenceRow row;
    row.m = m + 1;
    row.distance = std::numeric_limits<double>::infinity();
    for (const auto& x : state.maxima.points) row.distance = std::min(row.distance, (x - rep.x_true).norm());
    for (const auto& prob : state.problems) row.covered = row.covered || prob.feasible().contains(rep.x_true);
    row.r = state.degree_law;
    row.lambda = state.partition.size();
    row.tau = state.incidence.size();
    row.mu = state.maxima.points.size();
    if (row.covered && !rep.m_hat) rep.m_hat = m + 1;
    rep.rows.push_back(row);
  }
  if (rep.m_hat) {
    rep.converged = true;
    for (std::size_t m = *rep.m_hat - 1; m < rep.rows.size(); ++m)
      rep.converged = rep.converged && rep.rows[m].distance <= 1e-6;
  } else {
    rep.budget_exhausted = true;
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows) closest = std::min(closest, r.distance);
    rep.plateau = closest > 1e-6;
  }
  return rep;
}

}  // namespace lgo
