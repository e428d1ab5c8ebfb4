#include "lgo/pr_category.hpp"

#include "lgo/errors.hpp"
#include "lgo/kernels.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace lgo {

namespace {

constexpr double kMembershipTol = 1e-9;

void require_same_ambient(const LocalProblem& a, const LocalProblem& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw ValidationError("problems '" + a.id() + "' and '" + b.id() + "' live in different ambient spaces");
}

void require_solved(const LocalProblem& s) {
  if (!s.solved()) throw ValidationError("problem '" + s.id() + "' has not been solved");
}

bool hits(const std::vector<Vector>& candidates, const std::vector<Vector>& solutions) {
  for (const auto& c : candidates)
    for (const auto& s : solutions)
      if ((c - s).norm() <= kMembershipTol) return true;
  return false;
}

nlohmann::json point_json(const Vector& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

// Solutions, plus vertices or centre of every nonempty pairwise meet.
std::vector<Vector> targeted_points(const std::vector<LocalProblem>& problems) {
  std::vector<Vector> pts;
  for (const auto& p : problems)
    for (const auto& s : p.solutions()) pts.push_back(s);
  for (std::size_t a = 0; a < problems.size(); ++a)
    for (std::size_t b = a + 1; b < problems.size(); ++b) {
      std::optional<FeasibleSet> m;
      try {
        m = intersect_feasible(problems[a].feasible(), problems[b].feasible());
      } catch (const ValidationError&) {
        continue;
      }
      if (!m) continue;
      if (m->is_ball()) {
        pts.push_back(m->representative());
      } else {
        for (const auto& v : m->vertices_local()) pts.push_back(m->to_ambient(v));
      }
    }
  return pts;
}

CheckReport run_check(std::string name, const std::vector<Vector>& targeted, const CheckOptions& opts,
                      const SampleBox& box, const std::function<int(const Vector&)>& violation,
                      const std::function<std::string(int)>& reason) {
  std::vector<Vector> pts = targeted;
  auto draws = uniform_samples(box, opts.samples, opts.seed);
  pts.insert(pts.end(), draws.begin(), draws.end());
  const SampleFn fn = [&violation](const Vector& x) { return static_cast<double>(violation(x)); };
  const auto codes = opts.parallel ? map_samples(pts, fn) : map_samples_serial(pts, fn);

  CheckReport r;
  r.check = std::move(name);
  r.seed = opts.seed;
  r.samples = opts.samples;
  r.targeted = targeted.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (codes[i] == 0.0) continue;
    ++r.violations;
    if (r.counterexamples.size() < opts.max_counterexamples)
      r.counterexamples.push_back({{"x", point_json(pts[i])},
                                   {"code", static_cast<int>(codes[i])},
                                   {"reason", reason(static_cast<int>(codes[i]))},
                                   {"targeted", i < targeted.size()}});
  }
  r.verdict = r.violations == 0;
  return r;
}

}  // namespace

std::vector<Vector> uniform_samples(const SampleBox& box, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector x(box.lower.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = box.lower(k) + u(rng) * (box.upper(k) - box.lower(k));
    out.push_back(std::move(x));
  }
  return out;
}

bool utilities_agree(const LocalProblem& a, const LocalProblem& b) {
  require_same_ambient(a, b);
  const Subspace common = intersect_subspaces({a.carrier(), b.carrier()});
  return poly_equal(restrict(a.utility(), common), restrict(b.utility(), common));
}

bool may_overlap(const LocalProblem& a, const LocalProblem& b) {
  require_same_ambient(a, b);
  try {
    return intersect_feasible(a.feasible(), b.feasible()).has_value();
  } catch (const ValidationError&) {
    return true;
  }
}

MorphismWitness check_morphism(const LocalProblem& s_k, const LocalProblem& s_j) {
  require_same_ambient(s_k, s_j);
  MorphismWitness w;
  w.source = s_k.id();
  w.target = s_j.id();
  w.containment = feasible_contains(s_j.feasible(), s_k.feasible());
  w.restriction_equal =
      poly_equal(restrict(s_j.utility(), s_k.carrier()), restrict(s_k.utility(), s_k.carrier()));
  w.dim_leq = s_k.carrier().dim() <= s_j.carrier().dim();
  return w;
}

LocalProblem meet(const LocalProblem& s_k, const LocalProblem& s_j) {
  require_same_ambient(s_k, s_j);
  auto region = intersect_feasible(s_k.feasible(), s_j.feasible());
  if (!region) throw ValidationError("meet: '" + s_k.id() + "' and '" + s_j.id() + "' do not intersect");
  if (!utilities_agree(s_k, s_j))
    throw IncompatibilityError("utilities of '" + s_k.id() + "' and '" + s_j.id() + "' disagree on their intersection",
                               s_k.id(), s_j.id());
  return LocalProblem(s_k.id() + "^" + s_j.id(), std::move(*region), s_k.utility());
}

StarProblem build_star(const std::vector<LocalProblem>& problems) {
  if (problems.empty()) throw ValidationError("build_star: empty family");
  for (const auto& p : problems) require_solved(p);
  for (std::size_t a = 0; a < problems.size(); ++a)
    for (std::size_t b = a + 1; b < problems.size(); ++b)
      if (may_overlap(problems[a], problems[b]) && !utilities_agree(problems[a], problems[b]))
        throw IncompatibilityError("utilities of '" + problems[a].id() + "' and '" + problems[b].id() +
                                       "' disagree on their overlap",
                                   problems[a].id(), problems[b].id());

  StarProblem star;
  for (std::size_t a = 0; a < problems.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < problems.size() && !dominated; ++b) {
      if (a == b || !check_morphism(problems[a], problems[b]).exists()) continue;
      // Mutual morphisms: keep the first of the two.
      dominated = !check_morphism(problems[b], problems[a]).exists() || b < a;
    }
    if (!dominated) star.members.push_back(problems[a]);
  }

  std::vector<Subspace> carriers;
  for (const auto& m : star.members) carriers.push_back(m.carrier());
  star.carrier = sum_subspaces(carriers);

  star.value = -std::numeric_limits<double>::infinity();
  for (const auto& m : star.members) star.value = std::max(star.value, m.certificate()->value);
  const double tol = 1e-9 * std::max(1.0, std::abs(star.value));
  for (const auto& m : star.members) {
    if (m.certificate()->value < star.value - tol) continue;
    for (const auto& s : m.solutions()) {
      bool fresh = true;
      for (const auto& t : star.solutions)
        if ((t - s).norm() <= kMembershipTol) fresh = false;
      if (fresh) star.solutions.push_back(s);
    }
  }
  std::sort(star.solutions.begin(), star.solutions.end(), [](const Vector& a, const Vector& b) { return lex_less(a, b); });
  return star;
}

bool in_F(const Vector& x, const LocalProblem& s) {
  require_solved(s);
  return hits(gamma(x, s.feasible()), s.solutions());
}

std::vector<Vector> gamma_star(const Vector& x, const StarProblem& s) {
  const Vector p = s.carrier.project(x);
  std::vector<std::pair<double, Vector>> near;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : s.members) {
    Vector y = gamma(p, m.feasible()).front();
    const double d = (y - p).norm();
    best = std::min(best, d);
    near.emplace_back(d, std::move(y));
  }
  std::vector<Vector> out;
  for (auto& [d, y] : near)
    if (d <= best + kMembershipTol) out.push_back(std::move(y));
  std::sort(out.begin(), out.end(), [](const Vector& a, const Vector& b) { return lex_less(a, b); });
  return out;
}

bool in_F(const Vector& x, const StarProblem& s) {
  if (s.single()) return in_F(x, s.members.front());
  return hits(gamma_star(x, s), s.solutions);
}

SampleBox bounding_box(const std::vector<LocalProblem>& problems, double inflate) {
  if (problems.empty()) throw ValidationError("bounding_box: empty family");
  const auto n = static_cast<Eigen::Index>(problems.front().ambient_dim());
  SampleBox box{Vector::Constant(n, std::numeric_limits<double>::infinity()),
                Vector::Constant(n, -std::numeric_limits<double>::infinity())};
  for (const auto& p : problems)
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector e = Vector::Unit(n, i);
      box.upper(i) = std::max(box.upper(i), p.feasible().support(e));
      box.lower(i) = std::min(box.lower(i), -p.feasible().support(-e));
    }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pad = std::max(box.upper(i) - box.lower(i), 1.0) * inflate / 2;
    box.lower(i) -= pad;
    box.upper(i) += pad;
  }
  return box;
}

nlohmann::json to_json(const CheckReport& r) {
  return {{"check", r.check},
          {"verdict", r.verdict ? "pass" : "fail"},
          {"violations", r.violations},
          {"counterexamples", r.counterexamples},
          {"seed", r.seed},
          {"samples", r.samples},
          {"targeted", r.targeted}};
}

CheckReport check_presheaf(const LocalProblem& s_k, const LocalProblem& s_j, const CheckOptions& opts) {
  require_solved(s_k);
  require_solved(s_j);
  if (!check_morphism(s_k, s_j).exists())
    throw ValidationError("check_presheaf: no morphism from '" + s_k.id() + "' to '" + s_j.id() + "'");
  const SampleBox box = opts.box ? *opts.box : bounding_box({s_k, s_j}, 0.5);
  return run_check(
      "presheaf", targeted_points({s_k, s_j}), opts, box,
      [&](const Vector& x) { return in_F(x, s_j) && !in_F(x, s_k) ? 1 : 0; },
      [&](int) { return "in F(" + s_j.id() + ") but not in F(" + s_k.id() + ")"; });
}

CheckReport check_gluing(const std::vector<LocalProblem>& problems, const CheckOptions& opts) {
  const StarProblem star = build_star(problems);
  const SampleBox box = opts.box ? *opts.box : bounding_box(problems, 0.5);

  // Pairs whose regions meet, with their common carrier.
  std::vector<std::tuple<std::size_t, std::size_t, Subspace>> meets;
  for (std::size_t a = 0; a < problems.size(); ++a)
    for (std::size_t b = a + 1; b < problems.size(); ++b)
      if (may_overlap(problems[a], problems[b]))
        meets.emplace_back(a, b, intersect_subspaces({problems[a].carrier(), problems[b].carrier()}));

  auto violation = [&](const Vector& x) {
    bool in_all = true;
    for (const auto& p : problems) in_all = in_all && in_F(x, p);
    const bool in_star = in_F(x, star);
    if (in_star && !in_all) return 1;
    if (!in_all || in_star) return 0;
    for (const auto& [a, b, common] : meets) {
      const Vector ga = gamma(x, problems[a].feasible()).front();
      const Vector gb = gamma(x, problems[b].feasible()).front();
      if ((common.project(ga) - common.project(gb)).norm() > kMembershipTol) return 0;
    }
    return 2;
  };
  return run_check("gluing", targeted_points(problems), opts, box, violation, [](int code) {
    return code == 1 ? std::string("in F(s*) but outside the intersection of the F(s^k)")
                     : std::string("in every F(s^k) with agreeing meets but not in F(s*)");
  });
}

}  // namespace lgo
