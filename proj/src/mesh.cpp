#include "ifem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include <fmt/format.h>

#include "ifem/errors.hpp"

namespace ifem {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) { return 0.5 * cross(b - a, c - a); }

// Grid coordinate index of t on [lo, hi] split into n cells; -1 if off-grid.
int grid_index(double t, double lo, double hi, int n) {
  const double s = (t - lo) / (hi - lo) * n;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s))) {
    return -1;
  }
  return static_cast<int>(r);
}

}  // namespace

int SubdomainLayout::subdomain_count() const {
  int count = default_subdomain + 1;
  for (const auto& b : boxes) {
    count = std::max(count, b.subdomain + 1);
  }
  return count;
}

int SubdomainLayout::subdomain_at(const Point& p) const {
  int id = default_subdomain;
  for (const auto& b : boxes) {
    if (b.box.contains(p)) {
      id = b.subdomain;
    }
  }
  return id;
}

Mesh Mesh::from_triangles(std::vector<Point> vertices, std::span<const TriangleInput> triangles,
                          int subdomain_count, Rectangle domain) {
  Mesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.subdomain_count_ = subdomain_count;
  mesh.domain_ = domain;
  mesh.triangles_.reserve(triangles.size());

  for (const auto& in : triangles) {
    Triangle t;
    t.vertices = in.vertices;
    t.subdomain = in.subdomain;
    if (in.subdomain < 0 || in.subdomain >= subdomain_count) {
      throw std::invalid_argument(fmt::format("subdomain id {} out of range", in.subdomain));
    }
    const auto& v = mesh.vertices_;
    double a = signed_area(v[t.vertices[0]], v[t.vertices[1]], v[t.vertices[2]]);
    if (a < 0.0) {
      std::swap(t.vertices[1], t.vertices[2]);
      a = -a;
    }
    if (!(a > 0.0)) {
      throw std::invalid_argument("degenerate triangle");
    }
    t.area = a;
    double h = 0.0;
    for (int i = 0; i < 3; ++i) {
      h = std::max(h, (v[t.vertices[(i + 1) % 3]] - v[t.vertices[(i + 2) % 3]]).norm());
    }
    t.diameter = h;
    mesh.triangles_.push_back(t);
  }

  // (min vertex, max vertex, element, local face); sorting orders faces
  // lexicographically by vertex pair and puts the smaller element id first.
  struct Entry {
    int a, b, k, local;
  };
  std::vector<Entry> entries;
  entries.reserve(3 * mesh.triangles_.size());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& tv = mesh.triangles_[k].vertices;
    for (int i = 0; i < 3; ++i) {
      const int p = tv[(i + 1) % 3];
      const int q = tv[(i + 2) % 3];
      entries.push_back({std::min(p, q), std::max(p, q), k, i});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& l, const Entry& r) {
    return std::tie(l.a, l.b, l.k) < std::tie(r.a, r.b, r.k);
  });

  mesh.element_faces_.assign(mesh.triangles_.size(), {-1, -1, -1});
  for (std::size_t e = 0; e < entries.size();) {
    std::size_t last = e + 1;
    while (last < entries.size() && entries[last].a == entries[e].a && entries[last].b == entries[e].b) {
      ++last;
    }
    if (last - e > 2) {
      throw std::invalid_argument("non-manifold edge shared by more than two triangles");
    }
    Face f;
    const Entry& minus = entries[e];
    f.vertices = {minus.a, minus.b};
    f.k_minus = minus.k;
    const auto& tv = mesh.triangles_[minus.k].vertices;
    const Point d = mesh.vertices_[tv[(minus.local + 2) % 3]] - mesh.vertices_[tv[(minus.local + 1) % 3]];
    f.length = d.norm();
    f.normal = Point(d.y(), -d.x()) / f.length;
    const int id = mesh.num_faces();
    mesh.element_faces_[minus.k][minus.local] = id;
    if (last - e == 2) {
      const Entry& plus = entries[e + 1];
      f.k_plus = plus.k;
      f.kind = FaceKind::interior;
      mesh.element_faces_[plus.k][plus.local] = id;
    }
    mesh.faces_.push_back(f);
    e = last;
  }
  return mesh;
}

int Mesh::neighbor(int k, int local_face) const {
  const Face& f = faces_[element_faces_[k][local_face]];
  if (f.is_boundary()) {
    return kNoElement;
  }
  return f.k_minus == k ? f.k_plus : f.k_minus;
}

Point Mesh::centroid(int k) const {
  const auto& t = triangles_[k].vertices;
  return (vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (const auto& t : triangles_) {
    h = std::max(h, t.diameter);
  }
  return h;
}

double Mesh::min_angle() const {
  double angle = std::numbers::pi;
  for (const auto& t : triangles_) {
    for (int i = 0; i < 3; ++i) {
      const Point& p = vertices_[t.vertices[i]];
      const Point a = vertices_[t.vertices[(i + 1) % 3]] - p;
      const Point b = vertices_[t.vertices[(i + 2) % 3]] - p;
      angle = std::min(angle, std::atan2(std::abs(cross(a, b)), a.dot(b)));
    }
  }
  return angle;
}

Mesh build_structured_square(int n, const SubdomainLayout& layout) {
  if (n < 1) {
    throw std::invalid_argument("structured mesh needs n >= 1");
  }
  const Rectangle& d = layout.domain;
  for (const auto& b : layout.boxes) {
    const bool aligned = grid_index(b.box.x0, d.x0, d.x1, n) >= 0 && grid_index(b.box.x1, d.x0, d.x1, n) >= 0 &&
                         grid_index(b.box.y0, d.y0, d.y1, n) >= 0 && grid_index(b.box.y1, d.y0, d.y1, n) >= 0;
    if (!aligned) {
      throw AlignmentError(fmt::format("subdomain box [{}, {}] x [{}, {}] is not aligned with the {}x{} grid",
                                       b.box.x0, b.box.x1, b.box.y0, b.box.y1, n, n));
    }
  }

  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.emplace_back(d.x0 + d.width() * i / n, d.y0 + d.height() * j / n);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };

  std::vector<Mesh::TriangleInput> triangles;
  triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point center(d.x0 + d.width() * (i + 0.5) / n, d.y0 + d.height() * (j + 0.5) / n);
      const int sub = layout.subdomain_at(center);
      triangles.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, sub});
      triangles.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, sub});
    }
  }
  return Mesh::from_triangles(std::move(vertices), triangles, layout.subdomain_count(), d);
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  const int nv = mesh.num_vertices();
  for (const auto& f : mesh.faces()) {
    vertices.push_back(0.5 * (mesh.vertex(f.vertices[0]) + mesh.vertex(f.vertices[1])));
  }

  std::vector<Mesh::TriangleInput> children;
  children.reserve(4 * mesh.triangles().size());
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const auto& t = mesh.triangle(k);
    const auto& ef = mesh.element_faces(k);
    const int a = t.vertices[0], b = t.vertices[1], c = t.vertices[2];
    // midpoint of the face opposite each vertex
    const int ma = nv + ef[0], mb = nv + ef[1], mc = nv + ef[2];
    children.push_back({{a, mc, mb}, t.subdomain});
    children.push_back({{mc, b, ma}, t.subdomain});
    children.push_back({{mb, ma, c}, t.subdomain});
    children.push_back({{ma, mb, mc}, t.subdomain});
  }
  Mesh fine = Mesh::from_triangles(std::move(vertices), children, mesh.subdomain_count(), mesh.domain());
  fine.parents_.resize(children.size());
  for (std::size_t c = 0; c < children.size(); ++c) {
    fine.parents_[c] = static_cast<int>(c / 4);
  }
  return fine;
}

std::vector<int> face_patch(const Mesh& mesh, int k) {
  std::vector<int> patch{k};
  for (int i = 0; i < 3; ++i) {
    const int nb = mesh.neighbor(k, i);
    if (nb != kNoElement) {
      patch.push_back(nb);
    }
  }
  std::sort(patch.begin(), patch.end());
  return patch;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "# vertices " << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices()) {
    out << fmt::format("v {:.17g} {:.17g}\n", v.x(), v.y());
  }
  out << "# triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) {
    out << fmt::format("t {} {} {} {}\n", t.vertices[0], t.vertices[1], t.vertices[2], t.subdomain);
  }
  out << "# faces " << mesh.num_faces() << '\n';
  for (const auto& f : mesh.faces()) {
    out << fmt::format("f {} {} {} {}\n", f.vertices[0], f.vertices[1], f.k_minus, f.k_plus);
  }
}

Mesh read_mesh(std::istream& in) {
  std::vector<Point> vertices;
  std::vector<Mesh::TriangleInput> triangles;
  std::string line;
  int max_sub = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    char tag = 0;
    if (!(ls >> tag) || tag == '#') {
      continue;
    }
    if (tag == 'v') {
      double x = 0, y = 0;
      ls >> x >> y;
      vertices.emplace_back(x, y);
    } else if (tag == 't') {
      Mesh::TriangleInput t{};
      ls >> t.vertices[0] >> t.vertices[1] >> t.vertices[2] >> t.subdomain;
      max_sub = std::max(max_sub, t.subdomain);
      triangles.push_back(t);
    } else if (tag != 'f') {
      throw std::invalid_argument(fmt::format("unknown mesh record '{}'", tag));
    }
    if (!ls && !ls.eof()) {
      throw std::invalid_argument("malformed mesh record: " + line);
    }
  }
  if (vertices.empty()) {
    throw std::invalid_argument("mesh file has no vertices");
  }
  Rectangle box{vertices[0].x(), vertices[0].x(), vertices[0].y(), vertices[0].y()};
  for (const auto& v : vertices) {
    box.x0 = std::min(box.x0, v.x());
    box.x1 = std::max(box.x1, v.x());
    box.y0 = std::min(box.y0, v.y());
    box.y1 = std::max(box.y1, v.y());
  }
  return Mesh::from_triangles(std::move(vertices), triangles, max_sub + 1, box);
}

}  // namespace ifem
