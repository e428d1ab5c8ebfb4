#include "lgo/io.hpp"

#include "lgo/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lgo {

namespace {

constexpr const char* kSnapshotFormat = "lgo-surrogate-1";

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + ": missing field \"" + key + "\"");
  return *it;
}

double parse_scalar(const nlohmann::json& j, const std::string& where) {
  try {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError(where + ": expected a number or \"num/den\"");
}

Rational parse_exact(const nlohmann::json& j, const std::string& where) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long>(), 1);
    if (j.is_number()) return from_double(j.get<double>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
  throw ValidationError(where + ": expected a number or \"num/den\"");
}

std::size_t parse_count(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw ValidationError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

Eigen::MatrixXd parse_matrix(const nlohmann::json& j, std::size_t cols, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected a list of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r)
    m.row(static_cast<Eigen::Index>(r)) = parse_vector(j[r], cols, where + "[" + std::to_string(r) + "]").transpose();
  return m;
}

Subspace parse_basis(const nlohmann::json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected a list of basis vectors");
  QMatrix gens(n, j.size());
  for (std::size_t c = 0; c < j.size(); ++c) {
    const std::string w = where + "[" + std::to_string(c) + "]";
    if (!j[c].is_array() || j[c].size() != n)
      throw ValidationError(w + ": expected a vector of length " + std::to_string(n));
    for (std::size_t r = 0; r < n; ++r) gens(r, c) = parse_exact(j[c][r], w + "[" + std::to_string(r) + "]");
  }
  Subspace s = Subspace::from_generators(gens);
  if (s.dim() != j.size()) throw ValidationError(where + ": basis vectors are linearly dependent");
  return s;
}

Shape parse_shape(const nlohmann::json& j, std::size_t d, const std::string& where) {
  const auto& type = field(j, "type", where);
  if (!type.is_string()) throw ValidationError(where + ".type: expected a string");
  const std::string t = type.get<std::string>();
  if (t == "box")
    return Box{parse_vector(field(j, "lower", where), d, where + ".lower"),
               parse_vector(field(j, "upper", where), d, where + ".upper")};
  if (t == "polytope") {
    Polytope p{parse_matrix(field(j, "A", where), d, where + ".A"), Vector()};
    p.b = parse_vector(field(j, "b", where), static_cast<std::size_t>(p.A.rows()), where + ".b");
    return p;
  }
  if (t == "ball")
    return Ball{parse_vector(field(j, "center", where), d, where + ".center"),
                parse_scalar(field(j, "radius", where), where + ".radius")};
  throw ValidationError(where + ".type: unknown shape \"" + t + "\" (box, polytope or ball)");
}

nlohmann::json shape_json(const Shape& s) {
  if (const auto* b = std::get_if<Box>(&s))
    return {{"type", "box"}, {"lower", vector_json(b->lower)}, {"upper", vector_json(b->upper)}};
  if (const auto* p = std::get_if<Polytope>(&s)) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < p->A.rows(); ++r) rows.push_back(vector_json(p->A.row(r).transpose()));
    return {{"type", "polytope"}, {"A", rows}, {"b", vector_json(p->b)}};
  }
  const auto& b = std::get<Ball>(s);
  return {{"type", "ball"}, {"center", vector_json(b.center)}, {"radius", b.radius}};
}

nlohmann::json box_json(const std::optional<SampleBox>& b) {
  if (!b) return nullptr;
  return {{"lower", vector_json(b->lower)}, {"upper", vector_json(b->upper)}};
}

std::optional<SampleBox> parse_box(const nlohmann::json& j, std::size_t n, const std::string& where) {
  if (j.is_null()) return std::nullopt;
  SampleBox b{parse_vector(field(j, "lower", where), n, where + ".lower"),
              parse_vector(field(j, "upper", where), n, where + ".upper")};
  for (std::size_t i = 0; i < n; ++i)
    if (b.lower(static_cast<Eigen::Index>(i)) > b.upper(static_cast<Eigen::Index>(i)))
      throw ValidationError(where + ": lower exceeds upper");
  return b;
}

void write_canonical(const nlohmann::json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(k).dump() + ": ";
        write_canonical(v, out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_canonical(j[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      if (v == 0.0) v = 0.0;  // no negative zero
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default: out += j.dump();
  }
}

}  // namespace

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string canonical_dump(const nlohmann::json& j) {
  std::string out;
  write_canonical(j, out, 0);
  out += '\n';
  return out;
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector parse_vector(const nlohmann::json& j, std::size_t size, const std::string& where) {
  if (!j.is_array() || j.size() != size)
    throw ValidationError(where + ": expected a list of " + std::to_string(size) + " numbers");
  Vector v(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i)
    v(static_cast<Eigen::Index>(i)) = parse_scalar(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

LocalProblem parse_problem(const nlohmann::json& j, std::size_t n, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  std::string id = where;
  if (auto it = j.find("id"); it != j.end()) {
    if (!it->is_string()) throw ValidationError(where + ".id: expected a string");
    id = it->get<std::string>();
  }
  Subspace carrier = parse_basis(field(j, "basis", where), n, where + ".basis");
  Shape shape = parse_shape(field(j, "feasible", where), carrier.dim(), where + ".feasible");
  FeasibleSet feasible = [&] {
    try {
      return FeasibleSet(carrier, std::move(shape));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ".feasible: " + e.what());
    }
  }();
  QPoly utility = [&] {
    try {
      return qpoly_from_json(field(j, "utility", where), n);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ".utility: " + e.what());
    }
  }();
  return LocalProblem(std::move(id), std::move(feasible), std::move(utility));
}

ProblemFile parse_problem_file(const nlohmann::json& j) {
  ProblemFile f;
  f.ambient_dim = parse_count(field(j, "ambient_dim", "file"), "ambient_dim");
  if (f.ambient_dim < 1 || f.ambient_dim > 16) throw ValidationError("ambient_dim: must be between 1 and 16");
  const auto& list = field(j, "problems", "file");
  if (!list.is_array()) throw ValidationError("problems: expected a list");
  for (std::size_t i = 0; i < list.size(); ++i)
    f.problems.push_back(parse_problem(list[i], f.ambient_dim, "problems[" + std::to_string(i) + "]"));
  return f;
}

nlohmann::json to_json(const LocalProblem& p) {
  nlohmann::json basis = nlohmann::json::array();
  const QMatrix& g = p.carrier().generators();
  for (std::size_t c = 0; c < g.cols(); ++c) {
    nlohmann::json col = nlohmann::json::array();
    for (std::size_t r = 0; r < g.rows(); ++r) col.push_back(to_string(g(r, c)));
    basis.push_back(std::move(col));
  }
  nlohmann::json out = {{"id", p.id()},
                        {"basis", basis},
                        {"feasible", shape_json(p.feasible().shape())},
                        {"utility", to_json(p.utility())}};
  if (p.solved()) {
    nlohmann::json sols = nlohmann::json::array();
    for (const auto& x : p.solutions()) sols.push_back(vector_json(x));
    out["solutions"] = sols;
    out["certificate"] = to_json(*p.certificate());
  }
  return out;
}

Scenario parse_scenario(const nlohmann::json& j) {
  Scenario s;
  s.ambient_dim = parse_count(field(j, "ambient_dim", "file"), "ambient_dim");
  if (s.ambient_dim < 1 || s.ambient_dim > 16) throw ValidationError("ambient_dim: must be between 1 and 16");
  try {
    s.true_utility = qpoly_from_json(field(j, "true_utility", "file"), s.ambient_dim);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("true_utility: ") + e.what());
  }
  const auto& list = field(j, "sequence", "file");
  if (!list.is_array() || list.empty()) throw ValidationError("sequence: expected a nonempty list");
  for (std::size_t i = 0; i < list.size(); ++i)
    s.sequence.push_back(parse_problem(list[i], s.ambient_dim, "sequence[" + std::to_string(i) + "]"));
  if (auto it = j.find("region"); it != j.end()) s.region = parse_box(*it, s.ambient_dim, "region");
  return s;
}

nlohmann::json snapshot(const SurrogateState& s) {
  nlohmann::json problems = nlohmann::json::array();
  for (const auto& p : s.problems) problems.push_back(to_json(p));
  nlohmann::json kernel = nlohmann::json::array();
  for (std::size_t j = 0; j < s.kernel.cols(); ++j) kernel.push_back(to_json(column_element(s.kernel, j, s.system)));
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : s.V.pieces) pieces.push_back(to_json(p));
  nlohmann::json maxima = nlohmann::json::array();
  for (const auto& x : s.maxima.points) maxima.push_back(vector_json(x));
  nlohmann::json options = {{"degree", s.options.degree ? nlohmann::json(*s.options.degree) : nlohmann::json(nullptr)},
                            {"samples", s.options.samples},
                            {"seed", s.options.seed},
                            {"box", box_json(s.options.box)},
                            {"region", box_json(s.options.region)}};
  return {{"format", kSnapshotFormat},
          {"ambient_dim", s.partition.ambient_dim},
          {"options", options},
          {"problems", problems},
          {"partition", to_json(s.partition)},
          {"incidence", to_json(s.incidence)},
          {"degree", s.degree},
          {"degree_law", s.degree_law},
          {"unknowns", s.system.unknowns()},
          {"constraints", s.system.matrix.rows()},
          {"kernel_basis", kernel},
          {"weights", s.weights},
          {"V", pieces},
          {"maximal_elements", maxima},
          {"maximal_classes", s.maxima.classes},
          {"max_value", s.maxima.value},
          {"degenerate", s.maxima.degenerate},
          {"conflict", s.canonical.conflict},
          {"empty_kernel", s.empty_kernel},
          {"notes", s.notes}};
}

SurrogateState load_snapshot(const nlohmann::json& j) {
  const auto& format = field(j, "format", "snapshot");
  if (!format.is_string() || format.get<std::string>() != kSnapshotFormat)
    throw ValidationError("snapshot.format: expected \"" + std::string(kSnapshotFormat) + "\"");
  for (const char* key : {"partition", "incidence", "degree", "degree_law", "kernel_basis", "V", "maximal_elements"})
    field(j, key, "snapshot");
  const std::size_t n = parse_count(field(j, "ambient_dim", "snapshot"), "snapshot.ambient_dim");
  if (n < 1 || n > 16) throw ValidationError("snapshot.ambient_dim: must be between 1 and 16");

  const auto& o = field(j, "options", "snapshot");
  SurrogateOptions opts;
  const auto& degree = field(o, "degree", "snapshot.options");
  if (!degree.is_null()) {
    if (!degree.is_number_integer()) throw ValidationError("snapshot.options.degree: expected an integer or null");
    opts.degree = degree.get<int>();
  }
  opts.samples = parse_count(field(o, "samples", "snapshot.options"), "snapshot.options.samples");
  opts.seed = parse_count(field(o, "seed", "snapshot.options"), "snapshot.options.seed");
  opts.box = parse_box(field(o, "box", "snapshot.options"), n, "snapshot.options.box");
  opts.region = parse_box(field(o, "region", "snapshot.options"), n, "snapshot.options.region");

  const auto& list = field(j, "problems", "snapshot");
  if (!list.is_array() || list.empty()) throw ValidationError("snapshot.problems: expected a nonempty list");
  std::vector<LocalProblem> problems;
  for (std::size_t i = 0; i < list.size(); ++i)
    problems.push_back(parse_problem(list[i], n, "snapshot.problems[" + std::to_string(i) + "]"));

  SurrogateState s = build_surrogate(std::move(problems), opts);
  if (canonical_dump(snapshot(s)) != canonical_dump(j))
    throw ValidationError("snapshot: stored content does not match the state rebuilt from its problems");
  return s;
}

std::string grid_csv(const PiecewiseFn& f, const Partition& p, const SampleBox& region, std::size_t per_axis) {
  const auto n = region.lower.size();
  const Vector mid = (region.lower + region.upper) / 2;
  const Eigen::Index axes = std::min<Eigen::Index>(n, 2);
  const std::size_t steps = std::max<std::size_t>(per_axis, 2);
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index a = 0; a < axes; ++a) out << 'x' << a + 1 << ',';
  out << "V\n";
  const std::size_t total = axes == 1 ? steps : steps * steps;
  for (std::size_t i = 0; i < total; ++i) {
    Vector x = mid;
    std::size_t rem = i;
    for (Eigen::Index a = 0; a < axes; ++a) {
      const double t = static_cast<double>(rem % steps) / static_cast<double>(steps - 1);
      rem /= steps;
      x(a) = region.lower(a) + t * (region.upper(a) - region.lower(a));
    }
    for (Eigen::Index a = 0; a < axes; ++a) out << x(a) << ',';
    out << evaluate(f, p, x) << '\n';
  }
  return out.str();
}

}  // namespace lgo
