#pragma once

#include "lgo/arrangement.hpp"
#include "lgo/groebner.hpp"
#include "lgo/local_solver.hpp"
#include "lgo/pr_category.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lgo {

inline constexpr int kMaxSurrogateDegree = 8;

/// One polynomial per partition class, all in ambient variables.
struct PiecewiseFn {
  std::vector<RPoly> pieces;
  int degree = 0;
};

/// Value of the piece owning x.
double evaluate(const PiecewiseFn& f, const Partition& p, const Vector& x);

/// A local maximum and the class hosting it.
struct HostedMaximum {
  Vector x;
  double value = 0.0;
  std::size_t problem = 0;
  std::size_t cls = 0;
};

/// Distinct local solutions (closer than 1e-4 counts as one), with classes.
std::vector<HostedMaximum> hosted_maxima(const std::vector<LocalProblem>& problems, const Partition& p);

/// Degree from the largest number c of maxima hosted by one class: 0 when no
/// class hosts one, 2 when c = 1, c otherwise.
int choose_degree(const std::vector<LocalProblem>& problems, const Partition& p);

/// restrict(p_hi - p_lo, boundary) = 0 for every incidence row, as linear
/// equations in the piece coefficients. Unknowns are class-major over
/// monomials_up_to(n, degree).
struct ContinuitySystem {
  QMatrix matrix;
  std::size_t classes = 0;
  std::size_t nvars = 0;
  int degree = 0;
  std::vector<Monomial> monomials;
  std::vector<std::size_t> row_owner;  // incidence row behind each equation

  std::size_t per_class() const { return monomials.size(); }
  std::size_t unknowns() const { return classes * monomials.size(); }
};

ContinuitySystem continuity_system(const Partition& p, const IncidenceMatrix& t, int degree);

/// Exact nullspace of the system, one column per basis element (reduced
/// echelon normal form).
QMatrix kernel_basis(const ContinuitySystem& sys);

/// Column j of a coefficient matrix as a module element / float piecewise function.
ModuleElement column_element(const QMatrix& coeffs, std::size_t j, const ContinuitySystem& sys);
PiecewiseFn piecewise_from(const Eigen::VectorXd& coeffs, const ContinuitySystem& sys);
Eigen::VectorXd coefficients(const PiecewiseFn& f, const ContinuitySystem& sys);

/// Outcome of fitting one piece in the coordinates of its class carrier.
struct PieceFit {
  RPoly piece;                       // ambient variables
  double fit_residual = 0.0;         // rms misfit on the samples
  double constraint_residual = 0.0;  // worst continuity mismatch with lower pieces
  bool conflict = false;             // some constraints had to be relaxed
};

/// Least-squares fit of the complement piece, exactly continuous with the
/// pieces of every class below it. The target is the inclusion-exclusion
/// extension of the lower pieces.
PieceFit fit_alpha(const Partition& p, const IncidenceMatrix& t, const std::vector<RPoly>& pieces, int degree,
                   const std::vector<Vector>& samples);

struct CanonicalPieces {
  PiecewiseFn f;
  std::vector<PieceFit> fits;
  bool conflict = false;
  std::vector<std::string> notes;
};

/// Pieces built from the smallest flats upward: peaked quadratics at hosted
/// maxima, constants on minimal flats without maxima, inclusion-exclusion
/// extensions elsewhere; each exactly continuous with the flats below.
CanonicalPieces canonical_pieces(const std::vector<LocalProblem>& problems, const Partition& p,
                                 const IncidenceMatrix& t, int degree, const std::vector<Vector>& samples);

/// Smallest working degree the canonical construction needs.
int required_degree(const std::vector<LocalProblem>& problems, const Partition& p);

/// Max over incidence rows and `per_row` sampled boundary points of |p_hi - p_lo|.
double continuity_residual(const PiecewiseFn& f, const Partition& p, const IncidenceMatrix& t, std::size_t per_row,
                           double scale, std::uint64_t seed, bool parallel = true);

struct VMaximum {
  std::vector<Vector> points;
  std::vector<std::size_t> classes;
  double value = 0.0;
  bool degenerate = false;
};

/// Per-class maximization of f over class-carrier sections of `region`;
/// one winner per class, kept when within 1e-6 of the best.
VMaximum maximize_V(const PiecewiseFn& f, const Partition& p, const FeasibleSet& region,
                    const SolverOptions& opts = {});

struct SurrogateOptions {
  std::optional<int> degree;  // forced working degree
  std::size_t samples = 400;
  std::uint64_t seed = 1;
  std::optional<SampleBox> box;     // fitting samples; default: bounding box inflated by 50%
  std::optional<SampleBox> region;  // maximization region; default: bounding box
  SolverOptions solver;
  bool parallel = true;
};

struct SurrogateState {
  SurrogateOptions options;
  std::vector<LocalProblem> problems;
  Partition partition;
  IncidenceMatrix incidence;
  int degree_law = 0;  // choose_degree
  int degree = 0;      // working degree of the family
  ContinuitySystem system;
  QMatrix kernel;
  CanonicalPieces canonical;
  std::vector<double> weights;  // V = sum of weights[j] * kernel element j
  PiecewiseFn V;
  VMaximum maxima;
  SampleBox box;
  SampleBox region;
  bool empty_kernel = false;
  std::vector<std::string> notes;
};

/// Solves unsolved problems, checks compatibility, and runs the pipeline.
SurrogateState build_surrogate(std::vector<LocalProblem> problems, const SurrogateOptions& opts = {});

struct StabilityReport {
  double membership_residual = 0.0;  // |T f'| for the transported old pieces
  double agreement = 0.0;            // max |f'(x) - V_old(x)| on sampled points
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool pass = true;
};

struct EvolveResult {
  SurrogateState state;
  bool duplicate = false;
  int r_old = 0;
  int r_new = 0;
  bool degree_step_ok = true;  // r_new in {r_old, r_old + 1}
  StabilityReport stability;
};

/// Adds a problem. Old pieces are transported to the refined partition and
/// checked for membership in the new family and agreement off the new carrier.
EvolveResult evolve(const SurrogateState& state, LocalProblem next, std::size_t stability_samples = 1000);

struct ConvergenceRow {
  std::size_t m = 0;  // problems seen so far (1-based)
  double distance = 0.0;
  bool covered = false;
  int r = 0;
  std::size_t lambda = 0;
  std::size_t tau = 0;
  std::size_t mu = 0;
};

struct ConvergenceReport {
  Vector x_true;
  double true_value = 0.0;
  std::vector<ConvergenceRow> rows;
  std::optional<std::size_t> m_hat;
  bool converged = false;  // distance <= 1e-6 from the covering index on
  bool plateau = false;    // never covered
  bool budget_exhausted = false;

  std::string to_csv() const;
};

/// Feeds the sequence through evolve and tracks the distance from the best
/// maximal element to the maximizer of U over the region.
ConvergenceReport convergence_run(const QPoly& u, const std::vector<LocalProblem>& sequence, const SampleBox& region,
                                  const SurrogateOptions& opts = {}, std::size_t budget = 0);

}  // namespace lgo
