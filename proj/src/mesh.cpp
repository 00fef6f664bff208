#include "kplate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace kplate {

namespace {

std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

}  // namespace

char boundary_kind_letter(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Clamped:
      return 'C';
    case BoundaryKind::SimplySupported:
      return 'S';
    case BoundaryKind::Free:
      return 'F';
  }
  return '?';
}

BoundaryKind boundary_kind_from_letter(char c) {
  switch (c) {
    case 'C':
      return BoundaryKind::Clamped;
    case 'S':
      return BoundaryKind::SimplySupported;
    case 'F':
      return BoundaryKind::Free;
    default:
      throw std::invalid_argument(std::string("unknown boundary tag '") + c + "'");
  }
}

BoundaryKind BoundarySpec::classify(const Vec2& a, const Vec2& b) const {
  constexpr double tol = 1e-12;
  for (const auto& rule : rules) {
    if (std::abs(a[rule.axis] - rule.value) < tol && std::abs(b[rule.axis] - rule.value) < tol)
      return rule.kind;
  }
  return default_kind;
}

bool BoundarySpec::all_clamped() const {
  if (default_kind != BoundaryKind::Clamped) return false;
  return std::all_of(rules.begin(), rules.end(),
                     [](const Rule& r) { return r.kind == BoundaryKind::Clamped; });
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           const std::map<std::pair<int, int>, BoundaryKind>& boundary_tags)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  build();
  kinds_.assign(edges_.size(), BoundaryKind::Clamped);
  for (const auto& [pair, kind] : boundary_tags) {
    const int e = find_edge(pair.first, pair.second);
    if (e < 0) throw std::invalid_argument("boundary tag on a pair that is not a mesh edge");
    if (!edges_[e].boundary()) throw std::invalid_argument("boundary tag on an interior edge");
    kinds_[e] = kind;
  }
}

void Mesh::build() {
  const int nv = num_vertices();
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      if (tri[i] < 0 || tri[i] >= nv) throw std::invalid_argument("triangle references a missing vertex");
    }
    if (signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]) <= 0.0)
      throw std::invalid_argument("triangle " + std::to_string(t) + " is not counterclockwise");
  }

  // Sorted pair -> (left triangle, right triangle) w.r.t. min -> max.
  std::map<std::pair<int, int>, std::array<int, 2>> sides;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      auto [it, inserted] = sides.try_emplace(key(a, b), std::array<int, 2>{-1, -1});
      const int slot = a < b ? 0 : 1;
      if (it->second[slot] >= 0)
        throw std::invalid_argument("non-conforming mesh: edge shared inconsistently");
      it->second[slot] = t;
    }
  }

  edges_.clear();
  edges_.reserve(sides.size());
  edge_index_.clear();
  for (const auto& [pair, tris] : sides) {
    Edge e;
    if (tris[0] >= 0) {
      e.v = {pair.first, pair.second};
      e.t = {tris[0], tris[1]};
    } else {
      // Boundary edge whose triangle lies right of min -> max: orient it so
      // the single triangle is on the left.
      e.v = {pair.second, pair.first};
      e.t = {tris[1], -1};
    }
    edge_index_[pair] = static_cast<int>(edges_.size());
    edges_.push_back(e);
  }

  tri_edges_.assign(triangles_.size(), {-1, -1, -1});
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) tri_edges_[t][i] = edge_index_.at(key(tri[(i + 1) % 3], tri[(i + 2) % 3]));
  }

  vertex_edges_.assign(nv, {});
  for (int e = 0; e < num_edges(); ++e) {
    vertex_edges_[edges_[e].v[0]].push_back(e);
    vertex_edges_[edges_[e].v[1]].push_back(e);
  }

  // Hanging nodes show up as boundary vertices with more than two boundary edges.
  for (int v = 0; v < nv; ++v) {
    int nb = 0;
    for (int e : vertex_edges_[v]) nb += edges_[e].boundary() ? 1 : 0;
    if (nb != 0 && nb != 2)
      throw std::invalid_argument("non-conforming mesh: vertex " + std::to_string(v) + " has " +
                                  std::to_string(nb) + " boundary edges");
  }
}

BoundaryKind Mesh::boundary_kind(int e) const {
  if (!edges_[e].boundary()) throw std::invalid_argument("boundary_kind of an interior edge");
  return kinds_[e];
}

int Mesh::find_edge(int a, int b) const {
  auto it = edge_index_.find(key(a, b));
  return it == edge_index_.end() ? -1 : it->second;
}

Vec2 Mesh::edge_normal(int e) const {
  const Vec2 d = vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]];
  return Vec2(d.y(), -d.x()).normalized();
}

Vec2 Mesh::edge_tangent(int e) const {
  const Vec2 n = edge_normal(e);
  return Vec2(-n.y(), n.x());
}

double Mesh::edge_length(int e) const {
  return (vertices_[edges_[e].v[1]] - vertices_[edges_[e].v[0]]).norm();
}

Vec2 Mesh::edge_point(int e, double s) const {
  return (1.0 - s) * vertices_[edges_[e].v[0]] + s * vertices_[edges_[e].v[1]];
}

double Mesh::area(int t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::diameter(int t) const {
  const auto& tri = triangles_[t];
  double h = 0.0;
  for (int i = 0; i < 3; ++i) h = std::max(h, (vertices_[tri[i]] - vertices_[tri[(i + 1) % 3]]).norm());
  return h;
}

Vec2 Mesh::centroid(int t) const {
  const auto& tri = triangles_[t];
  return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int t = 0; t < num_triangles(); ++t) h = std::max(h, diameter(t));
  return h;
}

bool Mesh::vertex_touches(int v, BoundaryKind kind) const {
  for (int e : vertex_edges_[v]) {
    if (edges_[e].boundary() && kinds_[e] == kind) return true;
  }
  return false;
}

Mesh Mesh::with_reversed_edge(int e) const {
  if (edges_[e].boundary()) throw std::invalid_argument("only interior edges can be reversed");
  Mesh copy = *this;
  std::swap(copy.edges_[e].v[0], copy.edges_[e].v[1]);
  std::swap(copy.edges_[e].t[0], copy.edges_[e].t[1]);
  return copy;
}

std::map<std::pair<int, int>, BoundaryKind> Mesh::boundary_tags() const {
  std::map<std::pair<int, int>, BoundaryKind> tags;
  for (int e = 0; e < num_edges(); ++e) {
    if (edges_[e].boundary()) tags[key(edges_[e].v[0], edges_[e].v[1])] = kinds_[e];
  }
  return tags;
}

int Mesh::num_boundary_edges() const {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.boundary(); }));
}

namespace {

// Structured grid on [x0, x0 + nx*h] x [y0, y0 + ny*h]; cells for which
// keep(i, j) is false are skipped. Each cell is split along its (i,j)-(i+1,j+1)
// diagonal with the hypotenuse as refinement edge.
template <class Keep>
Mesh make_grid(int nx, int ny, double x0, double y0, double h, Keep keep, const BoundarySpec& spec) {
  std::vector<int> id((nx + 1) * (ny + 1), -1);
  auto node = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 4>> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!keep(i, j)) continue;
      cells.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
    }
  }
  std::vector<char> used(id.size(), 0);
  for (const auto& c : cells) {
    for (int g : c) used[g] = 1;
  }
  std::vector<Vec2> vertices;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int g = node(i, j);
      if (!used[g]) continue;
      id[g] = static_cast<int>(vertices.size());
      vertices.emplace_back(x0 + i * h, y0 + j * h);
    }
  }
  // Union-jack pattern: diagonals alternate in a checkerboard, which is what
  // uniform bisection of a single square produces. Parallel diagonals lock
  // the C1-like limit of the penalized P2 space. The right-angle vertex comes
  // first so the hypotenuse is the refinement edge.
  std::vector<std::array<int, 3>> triangles;
  for (const auto& c : cells) {
    const int a = id[c[0]], b = id[c[1]], cc = id[c[2]], d = id[c[3]];
    const int i = c[0] % (nx + 1), j = c[0] / (nx + 1);
    if ((i + j) % 2 == 0) {
      triangles.push_back({b, cc, a});
      triangles.push_back({d, a, cc});
    } else {
      triangles.push_back({a, b, d});
      triangles.push_back({cc, d, b});
    }
  }
  Mesh bare(vertices, triangles);
  std::map<std::pair<int, int>, BoundaryKind> tags;
  for (int e = 0; e < bare.num_edges(); ++e) {
    const Edge& ed = bare.edge(e);
    if (!ed.boundary()) continue;
    tags[key(ed.v[0], ed.v[1])] = spec.classify(bare.vertex(ed.v[0]), bare.vertex(ed.v[1]));
  }
  return Mesh(std::move(vertices), std::move(triangles), tags);
}

}  // namespace

Mesh make_square_mesh(int n, const BoundarySpec& spec) {
  if (n < 1) throw std::invalid_argument("make_square_mesh: n must be >= 1");
  return make_grid(n, n, 0.0, 0.0, 1.0 / n, [](int, int) { return true; }, spec);
}

Mesh make_lshape_mesh(int n, const BoundarySpec& spec) {
  if (n < 1) throw std::invalid_argument("make_lshape_mesh: n must be >= 1");
  // (-1,1)^2 without the quadrant x > 0, y < 0.
  return make_grid(2 * n, 2 * n, -1.0, -1.0, 1.0 / n,
                   [n](int i, int j) { return !(i >= n && j < n); }, spec);
}

RefinementResult refine(const Mesh& mesh, std::span<const int> marked) {
  const int nt = mesh.num_triangles();
  std::vector<char> edge_marked(mesh.num_edges(), 0);
  std::vector<int> stack;
  auto mark_edge = [&](int e) {
    if (edge_marked[e]) return;
    edge_marked[e] = 1;
    for (int t : mesh.edge(e).t) {
      if (t >= 0) stack.push_back(t);
    }
  };
  for (int t : marked) {
    if (t < 0 || t >= nt) throw std::out_of_range("refine: marked element out of range");
    mark_edge(mesh.triangle_edges(t)[0]);
  }
  // Closure: any element with a marked edge must bisect its refinement edge.
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    mark_edge(mesh.triangle_edges(t)[0]);
  }

  std::vector<Vec2> vertices = mesh.vertices();
  std::vector<int> midpoint(mesh.num_edges(), -1);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!edge_marked[e]) continue;
    midpoint[e] = static_cast<int>(vertices.size());
    vertices.push_back(0.5 * (mesh.vertex(mesh.edge(e).v[0]) + mesh.vertex(mesh.edge(e).v[1])));
  }
  auto marked_mid = [&](int a, int b) {
    const int e = mesh.find_edge(a, b);
    return e >= 0 && edge_marked[e] ? midpoint[e] : -1;
  };

  RefinementResult result{Mesh({}, {}), {}, std::vector<std::vector<int>>(nt)};
  std::vector<std::array<int, 3>> triangles;
  auto emit = [&](int parent, const std::array<int, 3>& tri) {
    result.children[parent].push_back(static_cast<int>(triangles.size()));
    result.parent.push_back(parent);
    triangles.push_back(tri);
  };
  for (int t = 0; t < nt; ++t) {
    const auto [v0, v1, v2] = mesh.triangle(t);
    const int m = marked_mid(v1, v2);
    if (m < 0) {
      emit(t, mesh.triangle(t));
      continue;
    }
    // Children (m, v0, v1) and (m, v2, v0); each may be bisected once more
    // along its own refinement edge, which is an edge of the parent.
    const std::array<std::array<int, 3>, 2> halves{{{m, v0, v1}, {m, v2, v0}}};
    for (const auto& c : halves) {
      const int mm = marked_mid(c[1], c[2]);
      if (mm < 0) {
        emit(t, c);
      } else {
        emit(t, {mm, c[0], c[1]});
        emit(t, {mm, c[2], c[0]});
      }
    }
  }

  std::map<std::pair<int, int>, BoundaryKind> tags;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (!ed.boundary()) continue;
    const BoundaryKind kind = mesh.boundary_kind(e);
    if (edge_marked[e]) {
      tags[key(ed.v[0], midpoint[e])] = kind;
      tags[key(midpoint[e], ed.v[1])] = kind;
    } else {
      tags[key(ed.v[0], ed.v[1])] = kind;
    }
  }
  result.mesh = Mesh(std::move(vertices), std::move(triangles), tags);
  return result;
}

RefinementResult refine_uniform(const Mesh& mesh) {
  // Two bisection sweeps: every element is split into four and h halves.
  auto sweep = [](const Mesh& m) {
    std::vector<int> all(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t) all[t] = t;
    return refine(m, all);
  };
  RefinementResult first = sweep(mesh);
  RefinementResult out = sweep(first.mesh);
  out.children.assign(mesh.num_triangles(), {});
  for (std::size_t t = 0; t < out.parent.size(); ++t) {
    out.parent[t] = first.parent[out.parent[t]];
    out.children[out.parent[t]].push_back(static_cast<int>(t));
  }
  return out;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "# kplate mesh\n";
  os << "VERTICES " << mesh.num_vertices() << '\n';
  os << std::setprecision(17);
  for (const auto& p : mesh.vertices()) os << p.x() << ' ' << p.y() << '\n';
  os << "TRIANGLES " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "BOUNDARY " << mesh.num_boundary_edges() << '\n';
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& ed = mesh.edge(e);
    if (!ed.boundary()) continue;
    os << ed.v[0] << ' ' << ed.v[1] << ' ' << boundary_kind_letter(mesh.boundary_kind(e)) << '\n';
  }
}

Mesh read_mesh(std::istream& is) {
  std::stringstream clean;
  std::string line;
  while (std::getline(is, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    clean << line << '\n';
  }
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::map<std::pair<int, int>, BoundaryKind> tags;
  std::string section;
  while (clean >> section) {
    long count = 0;
    if (!(clean >> count) || count < 0) throw std::runtime_error("mesh file: bad count after " + section);
    if (section == "VERTICES") {
      vertices.resize(count);
      for (auto& p : vertices) {
        if (!(clean >> p.x() >> p.y())) throw std::runtime_error("mesh file: truncated VERTICES");
      }
    } else if (section == "TRIANGLES") {
      triangles.resize(count);
      for (auto& t : triangles) {
        if (!(clean >> t[0] >> t[1] >> t[2])) throw std::runtime_error("mesh file: truncated TRIANGLES");
      }
    } else if (section == "BOUNDARY") {
      for (long i = 0; i < count; ++i) {
        int a = 0, b = 0;
        std::string tag;
        if (!(clean >> a >> b >> tag) || tag.size() != 1)
          throw std::runtime_error("mesh file: truncated BOUNDARY");
        tags[key(a, b)] = boundary_kind_from_letter(tag[0]);
      }
    } else {
      throw std::runtime_error("mesh file: unknown section " + section);
    }
  }
  return Mesh(std::move(vertices), std::move(triangles), tags);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path);
  return read_mesh(in);
}

}  // namespace kplate
