#include "malab/io.hpp"

#include "malab/analytic.hpp"
#include "malab/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace malab {

namespace {

constexpr char kMagic[4] = {'M', 'A', 'F', '1'};

double json_real(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::usage, std::string("key '") + key + "' must be a number");
  }
  if (!v.is_number()) throw Error(ErrorKind::usage, std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

Vec json_vec(const Json& j, const char* key, const Vec& fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() > 3) throw Error(ErrorKind::usage, std::string("key '") + key + "' must be an array");
  Vec out = Vec::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i].get<double>();
  return out;
}

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorKind::usage, "truncated binary field");
  return v;
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::usage, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorKind::usage, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::usage, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
  const int dim = field.dimension();
  const Grid& g = field.grid();
  out << (dim == 2 ? "i,j,x1,x2,value\n" : "i,j,k,x1,x2,x3,value\n");
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (field.kind(k) == NodeKind::exterior) continue;
    const Index3 m = g.multi(k);
    const Vec x = g.point(m);
    for (int a = 0; a < dim; ++a) out << m[a] << ',';
    for (int a = 0; a < dim; ++a) out << fmt17(x[a]) << ',';
    out << fmt17(field.value(k)) << '\n';
  }
}

std::string field_csv(const ScalarField& field) {
  std::ostringstream ss;
  write_field_csv(ss, field);
  return ss.str();
}

ScalarField read_field_csv(std::istream& in, const ConvexDomain& domain, const Grid& grid, const PointFunction& trace) {
  const int dim = grid.dimension();
  std::vector<double> values(grid.size(), 0.0);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::usage, "empty field CSV");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (static_cast<int>(cols.size()) != 2 * dim + 1)
      throw Error(ErrorKind::usage, "field CSV line " + std::to_string(lineno) + ": wrong column count");
    Index3 m = Index3::Zero();
    try {
      for (int a = 0; a < dim; ++a) m[a] = std::stoi(cols[static_cast<std::size_t>(a)]);
      if (!grid.in_range(m)) throw Error(ErrorKind::usage, "node index outside the grid");
      values[grid.linear(m)] = std::stod(cols.back());
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::usage, "field CSV line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return ScalarField(domain, grid, trace, std::move(values));
}

void write_field_binary(std::ostream& out, const ScalarField& field) {
  const Grid& g = field.grid();
  out.write(kMagic, 4);
  put<std::int32_t>(out, g.dimension());
  put<double>(out, g.spacing());
  for (int a = 0; a < 3; ++a) put<std::int32_t>(out, g.lo()[a]);
  for (int a = 0; a < 3; ++a) put<std::int32_t>(out, g.hi()[a]);
  for (double v : field.values()) put<double>(out, v);
}

ScalarField read_field_binary(std::istream& in, const ConvexDomain& domain, const PointFunction& trace) {
  char magic[4];
  in.read(magic, 4);
  if (!in || !std::equal(magic, magic + 4, kMagic)) throw Error(ErrorKind::usage, "not a field binary");
  const int dim = get<std::int32_t>(in);
  const double h = get<double>(in);
  Index3 lo, hi;
  for (int a = 0; a < 3; ++a) lo[a] = get<std::int32_t>(in);
  for (int a = 0; a < 3; ++a) hi[a] = get<std::int32_t>(in);
  Grid grid(dim, h, lo, hi);
  std::vector<double> values(grid.size());
  for (auto& v : values) {
    v = get<double>(in);
    if (std::isnan(v)) v = 0.0;
  }
  return ScalarField(domain, grid, trace, std::move(values));
}

ConvexDomain domain_from_json(const Json& j) {
  try {
    const int dim = j.value("dimension", 2);
    const std::string shape = j.value("shape", std::string("half_ball"));
    const Json params = j.value("params", Json::object());
    const Vec en = unit(dim - 1);
    ConvexDomain domain = [&] {
      if (shape == "box") {
        return ConvexDomain::box(dim, json_vec(params, "lower", -Vec::Ones()), json_vec(params, "upper", Vec::Ones()));
      }
      switch (shape_from_string(shape)) {
        case ShapeKind::slab:
          return ConvexDomain::slab(dim, json_real(params, "half_width", std::numeric_limits<double>::infinity()),
                                    json_real(params, "height", std::numeric_limits<double>::infinity()));
        case ShapeKind::ball: {
          const double r = json_real(params, "radius", 1.0);
          return ConvexDomain::ball(dim, r, json_vec(params, "center", r * en));
        }
        case ShapeKind::half_ball: return ConvexDomain::half_ball(dim, json_real(params, "radius", 1.0));
        case ShapeKind::superellipse: {
          const Vec axes = json_vec(params, "semi_axes", Vec::Ones());
          return ConvexDomain::superellipse(dim, axes, json_real(params, "exponent", 2.0),
                                            json_vec(params, "center", axes[dim - 1] * en));
        }
        case ShapeKind::polytope: {
          std::vector<Vec> verts;
          for (const auto& v : params.at("vertices")) {
            Vec p = Vec::Zero();
            for (std::size_t i = 0; i < v.size() && i < 3; ++i) p[static_cast<int>(i)] = v[i].get<double>();
            verts.push_back(p);
          }
          return ConvexDomain::polytope(dim, std::move(verts));
        }
      }
      throw Error(ErrorKind::usage, "unknown shape");
    }();
    if (j.contains("marked_point"))
      domain.set_marked_point(json_vec(j, "marked_point", Vec::Zero()), json_real(j, "rho", domain.tangent_ball_radius()));
    else if (j.contains("rho"))
      domain.set_marked_point(domain.marked_point(), json_real(j, "rho", domain.tangent_ball_radius()));
    return domain;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::usage, std::string("domain config: ") + e.what());
  }
}

Grid grid_from_json(const Json& j, const ConvexDomain& domain) {
  try {
    const double spacing = j.at("spacing").get<double>();
    if (!j.contains("bounds")) return Grid::covering(domain, spacing);
    const Json& b = j.at("bounds");
    Box box;
    box.lower = json_vec(b, "lower", Vec::Zero());
    box.upper = json_vec(b, "upper", Vec::Zero());
    return Grid::covering(domain.dimension(), spacing, box);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::usage, std::string("grid config: ") + e.what());
  }
}

SolverConfig solver_config_from_json(const Json& j) {
  SolverConfig c;
  if (!j.is_object()) throw Error(ErrorKind::usage, "solver config must be an object");
  try {
    c.stencil_width = j.value("stencil_width", c.stencil_width);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.tol_residual = j.value("tol_residual", c.tol_residual);
    c.damping = j.value("damping", c.damping);
    const std::string order = j.value("sweep_order", to_string(c.sweep_order));
    if (order == "lexicographic") c.sweep_order = SweepOrder::lexicographic;
    else if (order == "red-black" || order == "red_black") c.sweep_order = SweepOrder::red_black;
    else throw Error(ErrorKind::usage, "solver.sweep_order: unknown order '" + order + "'");
    const std::string method = j.value("method", to_string(c.method));
    if (method == "newton") c.method = SolveMethod::newton;
    else if (method == "gauss_seidel" || method == "gauss-seidel") c.method = SolveMethod::gauss_seidel;
    else throw Error(ErrorKind::usage, "solver.method: unknown method '" + method + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::usage, std::string("solver config: ") + e.what());
  }
  if (c.stencil_width < 1 || c.stencil_width > 3) throw Error(ErrorKind::usage, "solver.stencil_width must be 1, 2 or 3");
  if (!(c.tol_residual > 0)) throw Error(ErrorKind::usage, "solver.tol_residual must be positive");
  if (!(c.damping > 0 && c.damping <= 1)) throw Error(ErrorKind::usage, "solver.damping must lie in (0, 1]");
  return c;
}

PointFunction polynomial_from_json(const Json& terms) {
  if (!terms.is_array() || terms.empty()) throw Error(ErrorKind::usage, "polynomial: expected a non-empty array of terms");
  std::vector<std::pair<double, Vec>> parsed;
  try {
    for (const auto& t : terms) {
      Vec p = Vec::Zero();
      const Json& pw = t.at("p");
      if (!pw.is_array() || pw.size() > 3) throw Error(ErrorKind::usage, "polynomial: 'p' must hold at most 3 exponents");
      for (std::size_t i = 0; i < pw.size(); ++i) p[static_cast<int>(i)] = pw[i].get<double>();
      parsed.emplace_back(t.at("c").get<double>(), p);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::usage, std::string("polynomial: ") + e.what());
  }
  return [parsed](const Vec& x) {
    double v = 0.0;
    for (const auto& [c, p] : parsed) {
      double m = c;
      for (int a = 0; a < 3; ++a)
        if (p[a] != 0.0) m *= std::pow(x[a], p[a]);
      v += m;
    }
    return v;
  };
}

RhsSpec rhs_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::usage, "rhs config must be an object");
  try {
    const std::string mode = j.value("mode", std::string("degenerate"));
    const double alpha = j.value("alpha", 0.0);
    if (mode == "degenerate" || mode == "degenerate-distance") {
      PointFunction g;
      if (j.contains("g")) {
        const Json& gj = j.at("g");
        if (gj.is_number()) {
          const double c = gj.get<double>();
          g = [c](const Vec&) { return c; };
        } else {
          g = polynomial_from_json(gj);
        }
      }
      return RhsSpec::degenerate(alpha, g);
    }
    if (mode == "explicit") {
      RhsSpec r = RhsSpec::explicit_rhs(polynomial_from_json(j.at("f")));
      r.alpha = alpha;
      return r;
    }
    if (mode == "zero") return RhsSpec::explicit_rhs([](const Vec&) { return 0.0; });
    throw Error(ErrorKind::usage, "rhs.mode: unknown mode '" + mode + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::usage, std::string("rhs config: ") + e.what());
  }
}

PointFunction boundary_from_json(const Json& j, int dimension) {
  if (!j.is_object()) throw Error(ErrorKind::usage, "boundary config must be an object");
  try {
    const std::string kind = j.value("kind", std::string("quadratic"));
    if (kind == "quadratic") return [](const Vec& x) { return 0.5 * x.squaredNorm(); };
    if (kind == "zero") return [](const Vec&) { return 0.0; };
    if (kind == "u0_trace") {
      const double alpha = j.value("alpha", 1.0);
      return [alpha, dimension](const Vec& x) {
        Vec y = x;
        y[dimension - 1] = std::max(y[dimension - 1], 0.0);
        return u0_value(y, dimension, alpha);
      };
    }
    if (kind == "expression") return polynomial_from_json(j.at("terms"));
    throw Error(ErrorKind::usage, "boundary.kind: unknown kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::usage, std::string("boundary config: ") + e.what());
  }
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::usage, origin + ": " + e.what());
  }
}

}  // namespace malab
