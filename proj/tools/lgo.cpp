// Command-line front end: solve, glue, surrogate, evolve, converge, groebner.

#include "lgo/glue.hpp"
#include "lgo/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace lgo;
using nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError(path + ": cannot write");
  out << text;
}

std::vector<LocalProblem> solve_all(std::vector<LocalProblem> problems) {
  for (auto& p : problems)
    if (!p.solved()) p = solved(std::move(p));
  return problems;
}

int cmd_solve(const std::string& file, const std::string& out) {
  ProblemFile f = parse_problem_file(read_json_file(file));
  json list = json::array();
  for (const auto& p : solve_all(std::move(f.problems))) list.push_back(to_json(p));
  emit(canonical_dump({{"ambient_dim", f.ambient_dim}, {"problems", list}}), out);
  return 0;
}

int cmd_glue(const std::string& file, const std::string& out) {
  ProblemFile f = parse_problem_file(read_json_file(file));
  if (f.problems.empty()) throw ValidationError("glue: no problems");
  auto problems = solve_all(std::move(f.problems));
  json concave = json::array();
  for (const auto& p : problems) {
    const auto v = is_strictly_concave(p.utility(), p.carrier());
    concave.push_back({{"id", p.id()}, {"strictly_concave", v.strictly_concave}, {"numerical", v.numerical}});
    if (!v.strictly_concave) std::cerr << "warning: utility of " << p.id() << " is not strictly concave on its carrier\n";
  }
  json report = to_json(glue(problems));
  report["concavity"] = concave;
  emit(canonical_dump(report), out);
  return 0;
}

int cmd_surrogate(const std::string& file, const SurrogateOptions& opts, const std::string& out,
                  const std::string& grid_path, std::size_t grid_points, const std::string& incidence_path) {
  ProblemFile f = parse_problem_file(read_json_file(file));
  if (f.problems.empty()) throw ValidationError("surrogate: no problems");
  const SurrogateState s = build_surrogate(std::move(f.problems), opts);
  emit(canonical_dump(snapshot(s)), out);
  if (!grid_path.empty()) emit(grid_csv(s.V, s.partition, s.region, grid_points), grid_path);
  if (!incidence_path.empty()) emit(s.incidence.to_csv(), incidence_path);
  for (const auto& n : s.notes) std::cerr << "note: " << n << '\n';
  return 0;
}

int cmd_evolve(const std::string& state_file, const std::string& problem_file, std::size_t samples,
               const std::string& out, const std::string& report_path) {
  SurrogateState state = load_snapshot(read_json_file(state_file));
  ProblemFile f = parse_problem_file(read_json_file(problem_file));
  if (f.ambient_dim != state.partition.ambient_dim)
    throw ValidationError("evolve: ambient_dim " + std::to_string(f.ambient_dim) + " does not match the snapshot (" +
                          std::to_string(state.partition.ambient_dim) + ")");
  json steps = json::array();
  bool pass = true;
  for (auto& p : f.problems) {
    const std::string id = p.id();
    EvolveResult r = evolve(state, std::move(p), samples);
    const bool ok = r.stability.pass && r.degree_step_ok;
    pass = pass && ok;
    steps.push_back({{"problem", id},
                     {"duplicate", r.duplicate},
                     {"r_old", r.r_old},
                     {"r_new", r.r_new},
                     {"degree_step_ok", r.degree_step_ok},
                     {"membership_residual", r.stability.membership_residual},
                     {"agreement", r.stability.agreement},
                     {"samples", r.stability.samples},
                     {"seed", r.stability.seed},
                     {"verdict", ok ? "PASS" : "FAIL"}});
    state = std::move(r.state);
  }
  emit(canonical_dump(snapshot(state)), out);
  const std::string report = canonical_dump({{"steps", steps}, {"verdict", pass ? "PASS" : "FAIL"}});
  if (report_path.empty())
    std::cerr << report;
  else
    emit(report, report_path);
  return 0;
}

int cmd_converge(const std::string& file, const SurrogateOptions& opts, std::size_t budget, const std::string& out) {
  Scenario sc = parse_scenario(read_json_file(file));
  const SampleBox region = sc.region ? *sc.region : bounding_box(sc.sequence, 0.0);
  const ConvergenceReport r = convergence_run(sc.true_utility, sc.sequence, region, opts, budget);
  emit(r.to_csv(), out);
  std::cerr << "x_true:";
  for (Eigen::Index i = 0; i < r.x_true.size(); ++i) std::cerr << ' ' << r.x_true(i);
  std::cerr << "\nm_hat: " << (r.m_hat ? std::to_string(*r.m_hat) : "none") << "\nconverged: " << std::boolalpha
            << r.converged << "\nplateau: " << r.plateau << "\nbudget_exhausted: " << r.budget_exhausted << '\n';
  return 0;
}

ModuleOrder parse_order(const json& j) {
  ModuleOrder ord;
  if (j.contains("order")) {
    const std::string o = j["order"].get<std::string>();
    if (o == "pot")
      ord.rule = PositionRule::pot;
    else if (o == "top")
      ord.rule = PositionRule::top;
    else
      throw ValidationError("order: expected \"pot\" or \"top\"");
  }
  return ord;
}

int cmd_groebner(const std::string& file, const std::string& out) {
  const json j = read_json_file(file);
  json report;
  if (j.contains("generators")) {
    if (!j.contains("nvars") || !j.contains("rank") || !j["nvars"].is_number_unsigned() ||
        !j["rank"].is_number_unsigned())
      throw ValidationError("groebner: \"nvars\" and \"rank\" must be non-negative integers");
    const auto nvars = j["nvars"].get<std::size_t>();
    const auto rank = j["rank"].get<std::size_t>();
    std::vector<ModuleElement> gens;
    for (std::size_t i = 0; i < j["generators"].size(); ++i) {
      try {
        gens.push_back(module_element_from_json(j["generators"][i], rank, nvars));
      } catch (const ValidationError& e) {
        throw ValidationError("generators[" + std::to_string(i) + "]: " + e.what());
      }
    }
    json basis = json::array();
    for (const auto& g : buchberger(gens, parse_order(j))) basis.push_back(to_json(g));
    report = {{"nvars", nvars}, {"rank", rank}, {"basis", basis}};
  } else {
    ProblemFile f = parse_problem_file(j);
    if (f.problems.empty()) throw ValidationError("groebner: no problems");
    std::vector<Subspace> carriers;
    for (const auto& p : f.problems) carriers.push_back(p.carrier());
    const Partition part = build_partition(carriers);
    const IncidenceMatrix t = build_incidence(part);
    const auto rows = t_rows(t);
    json gens = json::array();
    bool verified = true;
    for (const auto& g : kernel_generators(part.size(), f.ambient_dim, rows)) {
      for (const auto& img : apply_T(g, rows)) verified = verified && img.is_zero();
      gens.push_back(to_json(g));
    }
    report = {{"nvars", f.ambient_dim},
              {"rank", part.size()},
              {"partition", to_json(part)},
              {"incidence", to_json(t)},
              {"kernel_generators", gens},
              {"T_f_zero", verified}};
  }
  emit(canonical_dump(report), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local problems, gluing and piecewise polynomial surrogates"};
  app.require_subcommand(1);

  std::string file, second, out, report, grid, incidence;
  SurrogateOptions opts;
  int degree = -1;
  std::size_t samples = 1000, grid_points = 41, budget = 0;

  auto* solve = app.add_subcommand("solve", "Solve every local problem in a problem file");
  solve->add_option("file", file, "Problem file")->required();
  solve->add_option("--out", out, "Output path (default stdout)");

  auto* gl = app.add_subcommand("glue", "Glue local solutions into a global point");
  gl->add_option("file", file, "Problem file")->required();
  gl->add_option("--out", out, "Output path (default stdout)");

  auto* sur = app.add_subcommand("surrogate", "Build the piecewise polynomial surrogate and write a snapshot");
  sur->add_option("file", file, "Problem file")->required();
  sur->add_option("--degree", degree, "Force the working degree");
  sur->add_option("--samples", opts.samples, "Fitting samples");
  sur->add_option("--seed", opts.seed, "Random seed");
  sur->add_option("--out", out, "Snapshot path (default stdout)");
  sur->add_option("--grid-csv", grid, "Write V on a grid of the region");
  sur->add_option("--grid-points", grid_points, "Grid points per axis");
  sur->add_option("--incidence-csv", incidence, "Write the incidence matrix");

  auto* ev = app.add_subcommand("evolve", "Add problems to a snapshot and check stability");
  ev->add_option("state", file, "Snapshot file")->required();
  ev->add_option("problems", second, "Problem file with the new problems")->required();
  ev->add_option("--samples", samples, "Stability samples");
  ev->add_option("--out", out, "Snapshot path (default stdout)");
  ev->add_option("--report", report, "Verdict path (default stderr)");

  auto* conv = app.add_subcommand("converge", "Run a scenario and tabulate the distance to the true maximizer");
  conv->add_option("scenario", file, "Scenario file")->required();
  conv->add_option("--samples", opts.samples, "Fitting samples");
  conv->add_option("--seed", opts.seed, "Random seed");
  conv->add_option("--budget", budget, "Maximum number of problems to use (0: all)");
  conv->add_option("--out", out, "CSV path (default stdout)");

  auto* gb = app.add_subcommand("groebner", "Groebner basis of generators, or kernel generators of a problem file");
  gb->add_option("file", file, "Generators or problem file")->required();
  gb->add_option("--out", out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (degree >= 0) opts.degree = degree;

  try {
    if (*solve) return cmd_solve(file, out);
    if (*gl) return cmd_glue(file, out);
    if (*sur) return cmd_surrogate(file, opts, out, grid, grid_points, incidence);
    if (*ev) return cmd_evolve(file, second, samples, out, report);
    if (*conv) return cmd_converge(file, opts, budget, out);
    if (*gb) return cmd_groebner(file, out);
  } catch (const IncompatibilityError& e) {
    std::cerr << "incompatible: " << e.what() << " (" << e.first() << ", " << e.second() << ")\n";
    return 3;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
