#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "relforms/fem2d.hpp"

namespace relforms::fem {
namespace {

Edge sorted(Index a, Index b) { return a < b ? Edge{a, b} : Edge{b, a}; }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

[[noreturn]] void parse_fail(long line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what, line);
}

}  // namespace

double triangle_area(const Mesh& mesh, Index t) {
  const Triangle& tri = mesh.triangles[static_cast<std::size_t>(t)];
  return signed_area(mesh.vertices[static_cast<std::size_t>(tri[0])],
                     mesh.vertices[static_cast<std::size_t>(tri[1])],
                     mesh.vertices[static_cast<std::size_t>(tri[2])]);
}

void Mesh::validate() const {
  const Index nv = num_vertices();
  auto in_range = [nv](Index i) { return i >= 0 && i < nv; };

  // Directed edge -> owning triangle count.
  std::map<Edge, int> directed;
  std::map<Edge, int> undirected;
  for (Index t = 0; t < num_triangles(); ++t) {
    const Triangle& tri = triangles[static_cast<std::size_t>(t)];
    for (Index v : tri) {
      if (!in_range(v)) throw Error(ErrorKind::InvalidInput, "triangle vertex out of range", t);
    }
    const double area = triangle_area(*this, t);
    if (!(area > 0.0)) {
      throw Error(ErrorKind::DegenerateElement,
                  "triangle " + std::to_string(t) + " has non-positive area", t);
    }
    for (int e = 0; e < 3; ++e) {
      const Index a = tri[static_cast<std::size_t>(e)];
      const Index b = tri[static_cast<std::size_t>((e + 1) % 3)];
      ++directed[{a, b}];
      if (++undirected[sorted(a, b)] > 2) {
        throw Error(ErrorKind::InvalidInput, "edge shared by more than two triangles");
      }
    }
  }

  std::set<Edge> boundary_set;
  std::map<Index, int> out_degree, in_degree;
  for (const Edge& e : boundary_edges) {
    if (!in_range(e[0]) || !in_range(e[1])) {
      throw Error(ErrorKind::InvalidInput, "boundary edge vertex out of range");
    }
    if (!boundary_set.insert(sorted(e[0], e[1])).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate boundary edge");
    }
    const auto it = undirected.find(sorted(e[0], e[1]));
    if (it == undirected.end() || it->second != 1 || directed.count(e) == 0) {
      throw Error(ErrorKind::InvalidInput,
                  "boundary edge must belong to exactly one triangle with matching orientation");
    }
    ++out_degree[e[0]];
    ++in_degree[e[1]];
  }
  for (const auto& [edge, count] : undirected) {
    if (count == 1 && boundary_set.count(edge) == 0) {
      throw Error(ErrorKind::InvalidInput, "non-conforming mesh: unmatched interior edge");
    }
  }
  for (const auto& [v, d] : out_degree) {
    if (d != 1 || in_degree[v] != 1) {
      throw Error(ErrorKind::InvalidInput, "boundary edges do not form closed loops");
    }
  }
  if (in_degree.size() != out_degree.size()) {
    throw Error(ErrorKind::InvalidInput, "boundary edges do not form closed loops");
  }
}

double Mesh::area() const {
  double sum = 0.0;
  for (Index t = 0; t < num_triangles(); ++t) sum += triangle_area(*this, t);
  return sum;
}

double Mesh::perimeter() const {
  double sum = 0.0;
  for (const Edge& e : boundary_edges) {
    sum += (vertices[static_cast<std::size_t>(e[1])] - vertices[static_cast<std::size_t>(e[0])])
               .norm();
  }
  return sum;
}

Mesh mesh_unit_square(Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "unit square needs n >= 1");
  Mesh mesh;
  const auto id = [n](Index i, Index j) { return j * (n + 1) + i; };
  for (Index j = 0; j <= n; ++j) {
    for (Index i = 0; i <= n; ++i) {
      mesh.vertices.emplace_back(static_cast<double>(i) / static_cast<double>(n),
                                 static_cast<double>(j) / static_cast<double>(n));
    }
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (Index i = 0; i < n; ++i) mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0)});
  for (Index j = 0; j < n; ++j) mesh.boundary_edges.push_back({id(n, j), id(n, j + 1)});
  for (Index i = n; i > 0; --i) mesh.boundary_edges.push_back({id(i, n), id(i - 1, n)});
  for (Index j = n; j > 0; --j) mesh.boundary_edges.push_back({id(0, j), id(0, j - 1)});
  return mesh;
}

Mesh mesh_disk(Index level) {
  if (level < 0) throw Error(ErrorKind::InvalidInput, "disk level must be >= 0");
  Mesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0);
  for (int k = 0; k < 6; ++k) {
    const double phi = std::numbers::pi * k / 3.0;
    mesh.vertices.emplace_back(std::cos(phi), std::sin(phi));
  }
  for (Index k = 1; k <= 6; ++k) {
    const Index next = k % 6 + 1;
    mesh.triangles.push_back({0, k, next});
    mesh.boundary_edges.push_back({k, next});
  }
  const BoundaryProjection to_circle = [](const Point& p) -> Point { return p / p.norm(); };
  for (Index l = 0; l < level; ++l) mesh = mesh_refine(mesh, to_circle);
  return mesh;
}

Mesh mesh_refine(const Mesh& mesh, const BoundaryProjection& project) {
  Mesh out;
  out.vertices = mesh.vertices;
  std::set<Edge> boundary;
  for (const Edge& e : mesh.boundary_edges) boundary.insert(sorted(e[0], e[1]));

  std::map<Edge, Index> midpoints;
  auto midpoint = [&](Index a, Index b) {
    const Edge key = sorted(a, b);
    const auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    Point p = 0.5 * (mesh.vertices[static_cast<std::size_t>(a)] +
                     mesh.vertices[static_cast<std::size_t>(b)]);
    if (project && boundary.count(key) != 0) p = project(p);
    const Index id = static_cast<Index>(out.vertices.size());
    out.vertices.push_back(p);
    midpoints.emplace(key, id);
    return id;
  };

  for (const Triangle& t : mesh.triangles) {
    const Index ab = midpoint(t[0], t[1]);
    const Index bc = midpoint(t[1], t[2]);
    const Index ca = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }
  for (const Edge& e : mesh.boundary_edges) {
    const Index m = midpoint(e[0], e[1]);
    out.boundary_edges.push_back({e[0], m});
    out.boundary_edges.push_back({m, e[1]});
  }
  return out;
}

Mesh mesh_read(std::string_view text) {
  Mesh mesh;
  std::istringstream in{std::string(text)};
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    if (tag == "v") {
      double x = 0.0, y = 0.0;
      if (!(fields >> x >> y)) parse_fail(line_no, "expected 'v <x> <y>'");
      mesh.vertices.emplace_back(x, y);
    } else if (tag == "t") {
      Triangle t{};
      if (!(fields >> t[0] >> t[1] >> t[2])) parse_fail(line_no, "expected 't <i> <j> <k>'");
      mesh.triangles.push_back(t);
    } else if (tag == "b") {
      Edge e{};
      if (!(fields >> e[0] >> e[1])) parse_fail(line_no, "expected 'b <i> <j>'");
      mesh.boundary_edges.push_back(e);
    } else {
      parse_fail(line_no, "unknown record '" + tag + "'");
    }
    std::string extra;
    if (fields >> extra) parse_fail(line_no, "trailing content '" + extra + "'");
  }
  const Index nv = mesh.num_vertices();
  for (const Triangle& t : mesh.triangles) {
    for (Index v : t) {
      if (v < 0 || v >= nv) throw Error(ErrorKind::ParseError, "vertex index out of range");
    }
  }
  for (const Edge& e : mesh.boundary_edges) {
    for (Index v : e) {
      if (v < 0 || v >= nv) throw Error(ErrorKind::ParseError, "vertex index out of range");
    }
  }
  return mesh;
}

std::string mesh_write(const Mesh& mesh) {
  std::string out;
  char buf[96];
  for (const Point& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", p.x(), p.y());
    out += buf;
  }
  for (const Triangle& t : mesh.triangles) {
    out += "t " + std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' +
           std::to_string(t[2]) + '\n';
  }
  for (const Edge& e : mesh.boundary_edges) {
    out += "b " + std::to_string(e[0]) + ' ' + std::to_string(e[1]) + '\n';
  }
  return out;
}

}  // namespace relforms::fem
