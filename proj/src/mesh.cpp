#include "goafem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace goafem {

namespace {

std::uint64_t edge_key(int a, int b)
{
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// local edge i is opposite local vertex i
constexpr std::array<std::array<int, 2>, 3> local_edge_vertices{{{1, 2}, {2, 0}, {0, 1}}};

} // namespace

Triangulation::Triangulation(std::vector<Point> vertices,
                             std::vector<std::array<int, 3>> triangles,
                             std::vector<BoundaryEdge> boundary,
                             std::vector<int> generation,
                             std::vector<int> parent)
  : vertices_(std::move(vertices)),
    triangles_(std::move(triangles)),
    boundary_(std::move(boundary)),
    generation_(std::move(generation)),
    parent_(std::move(parent))
{
  const int nv = static_cast<int>(vertices_.size());
  for (const auto& t : triangles_)
    for (int v : t)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("Triangulation: vertex index out of range");
  for (const auto& b : boundary_)
    for (int v : b.vertices)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("Triangulation: boundary vertex index out of range");

  if (generation_.empty())
    generation_.assign(triangles_.size(), 0);
  if (parent_.empty()) {
    parent_.resize(triangles_.size());
    for (std::size_t t = 0; t < parent_.size(); ++t)
      parent_[t] = static_cast<int>(t);
  }
  if (generation_.size() != triangles_.size() || parent_.size() != triangles_.size())
    throw std::invalid_argument("Triangulation: generation/parent size mismatch");

  areas_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    areas_[t] = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (!(areas_[t] > 0.0))
      throw std::invalid_argument("Triangulation: triangle " + std::to_string(t) +
                                  " is not positively oriented");
  }
  build_topology();
}

void Triangulation::build_topology()
{
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(3 * triangles_.size());
  element_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int a = triangles_[t][local_edge_vertices[i][0]];
      const int b = triangles_[t][local_edge_vertices[i][1]];
      auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back({std::min(a, b), std::max(a, b)});
        edge_elements_.push_back({static_cast<int>(t), no_element});
      } else {
        auto& adj = edge_elements_[it->second];
        if (adj[1] != no_element)
          nonmanifold_ = true;
        else
          adj[1] = static_cast<int>(t);
      }
      element_edges_[t][i] = it->second;
    }
  }
  edge_label_.assign(edges_.size(), -1);
  for (const auto& b : boundary_) {
    auto it = index.find(edge_key(b.vertices[0], b.vertices[1]));
    if (it != index.end())
      edge_label_[it->second] = static_cast<int>(b.label);
  }
}

Point Triangulation::centroid(int t) const
{
  const auto& tri = triangles_[t];
  return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

std::optional<BoundaryLabel> Triangulation::edge_label(int e) const
{
  if (edge_label_[e] < 0)
    return std::nullopt;
  return static_cast<BoundaryLabel>(edge_label_[e]);
}

std::vector<bool> Triangulation::dirichlet_vertices() const
{
  std::vector<bool> out(vertices_.size(), false);
  for (const auto& b : boundary_)
    if (b.label == BoundaryLabel::Dirichlet)
      out[b.vertices[0]] = out[b.vertices[1]] = true;
  return out;
}

std::vector<std::vector<int>> Triangulation::vertex_neighbors() const
{
  std::vector<std::vector<int>> out(vertices_.size());
  for (const auto& e : edges_) {
    out[e[0]].push_back(e[1]);
    out[e[1]].push_back(e[0]);
  }
  for (auto& n : out)
    std::sort(n.begin(), n.end());
  return out;
}

namespace {

Triangulation with_labelled_boundary(std::vector<Point> vertices,
                                     std::vector<std::array<int, 3>> triangles,
                                     const std::function<bool(const Point&, const Point&)>& is_dirichlet)
{
  // drop unused vertices, keeping the original order
  std::vector<char> used(vertices.size(), 0);
  for (const auto& t : triangles)
    for (int v : t)
      used[v] = 1;
  std::vector<int> renumber(vertices.size(), -1);
  std::vector<Point> kept;
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (used[v]) {
      renumber[v] = static_cast<int>(kept.size());
      kept.push_back(vertices[v]);
    }
  for (auto& t : triangles)
    for (int& v : t)
      v = renumber[v];

  Triangulation bare(kept, triangles, {});
  std::vector<BoundaryEdge> boundary;
  for (std::size_t t = 0; t < bare.num_elements(); ++t)
    for (int i = 0; i < 3; ++i) {
      const int e = bare.element_edge(static_cast<int>(t), i);
      if (!bare.is_boundary_edge(e))
        continue;
      const int a = triangles[t][local_edge_vertices[i][0]];
      const int b = triangles[t][local_edge_vertices[i][1]];
      const auto label = is_dirichlet(kept[a], kept[b]) ? BoundaryLabel::Dirichlet
                                                        : BoundaryLabel::Neumann;
      boundary.push_back({{a, b}, label});
    }
  return Triangulation(std::move(kept), std::move(triangles), std::move(boundary));
}

} // namespace

Triangulation initial_mesh(Domain domain)
{
  if (domain == Domain::UnitSquare) {
    std::vector<Point> v{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    std::vector<std::array<int, 3>> t{{1, 3, 0}, {3, 1, 2}};
    std::vector<BoundaryEdge> b{{{0, 1}, BoundaryLabel::Dirichlet},
                                {{1, 2}, BoundaryLabel::Dirichlet},
                                {{2, 3}, BoundaryLabel::Dirichlet},
                                {{3, 0}, BoundaryLabel::Dirichlet}};
    return Triangulation(std::move(v), std::move(t), std::move(b));
  }

  std::vector<Point> v;
  for (int j = 0; j <= 4; ++j)
    for (int i = 0; i <= 4; ++i)
      v.emplace_back(-1.0 + 0.5 * i, -1.0 + 0.5 * j);
  auto id = [](int i, int j) { return i + 5 * j; };
  std::vector<std::array<int, 3>> t;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const int ll = id(i, j), lr = id(i + 1, j), ur = id(i + 1, j + 1), ul = id(i, j + 1);
      // (i,j) = (0,1) lies in the removed triangle; (0,0) and (1,1) are cut by its diagonal
      if (i == 0 && j == 1)
        continue;
      // hypotenuse along the square diagonal, right-angle vertex newest
      t.push_back({ur, ll, lr});
      if ((i == 0 && j == 0) || (i == 1 && j == 1))
        continue;
      t.push_back({ll, ur, ul});
    }
  auto on_dirichlet = [](const Point& a, const Point& b) {
    constexpr double tol = 1e-12;
    auto on_top = [&](const Point& p) { return std::abs(p.y()) < tol && p.x() <= tol; };
    auto on_diag = [&](const Point& p) { return std::abs(p.y() - p.x()) < tol && p.x() <= tol; };
    return (on_top(a) && on_top(b)) || (on_diag(a) && on_diag(b));
  };
  return with_labelled_boundary(std::move(v), std::move(t), on_dirichlet);
}

Triangulation refine(const Triangulation& mesh, std::span<const int> marked)
{
  const int nt = static_cast<int>(mesh.num_elements());
  for (int t : marked)
    if (t < 0 || t >= nt)
      throw std::invalid_argument("refine: invalid element id " + std::to_string(t));

  // closure by edge marking: an element with any marked edge needs its
  // refinement edge marked as well
  std::vector<char> edge_marked(mesh.num_edges(), 0);
  std::vector<int> work;
  auto mark_edge = [&](int e) {
    if (edge_marked[e])
      return;
    edge_marked[e] = 1;
    for (int t : mesh.edge_elements(e))
      if (t != Triangulation::no_element)
        work.push_back(t);
  };
  for (int t : marked)
    mark_edge(mesh.element_edge(t, 2));
  while (!work.empty()) {
    const int t = work.back();
    work.pop_back();
    const bool any = edge_marked[mesh.element_edge(t, 0)] || edge_marked[mesh.element_edge(t, 1)];
    if (any)
      mark_edge(mesh.element_edge(t, 2));
  }

  std::vector<Point> vertices = mesh.vertices();
  std::vector<int> midpoint(mesh.num_edges(), -1);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    if (edge_marked[e]) {
      const auto& ed = mesh.edge(static_cast<int>(e));
      midpoint[e] = static_cast<int>(vertices.size());
      vertices.push_back(0.5 * (vertices[ed[0]] + vertices[ed[1]]));
    }

  std::vector<std::array<int, 3>> triangles;
  std::vector<int> generation, parent;
  triangles.reserve(mesh.num_elements() + 2 * std::count(edge_marked.begin(), edge_marked.end(), 1));
  auto emit = [&](const std::array<int, 3>& tri, int gen, int par) {
    triangles.push_back(tri);
    generation.push_back(gen);
    parent.push_back(par);
  };
  for (int t = 0; t < nt; ++t) {
    const auto [a, b, c] = mesh.triangles()[t];
    const int gen = mesh.generation()[t];
    const int m = midpoint[mesh.element_edge(t, 2)];
    if (m < 0) {
      emit({a, b, c}, gen, t);
      continue;
    }
    const int m1 = midpoint[mesh.element_edge(t, 1)]; // on (c, a)
    const int m0 = midpoint[mesh.element_edge(t, 0)]; // on (b, c)
    if (m1 < 0) {
      emit({c, a, m}, gen + 1, t);
    } else {
      emit({m, c, m1}, gen + 2, t);
      emit({a, m, m1}, gen + 2, t);
    }
    if (m0 < 0) {
      emit({b, c, m}, gen + 1, t);
    } else {
      emit({m, b, m0}, gen + 2, t);
      emit({c, m, m0}, gen + 2, t);
    }
  }

  std::vector<BoundaryEdge> boundary;
  std::unordered_map<std::uint64_t, int> mid_by_key;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    if (midpoint[e] >= 0)
      mid_by_key.emplace(edge_key(mesh.edge(static_cast<int>(e))[0], mesh.edge(static_cast<int>(e))[1]),
                         midpoint[e]);
  for (const auto& be : mesh.boundary()) {
    auto it = mid_by_key.find(edge_key(be.vertices[0], be.vertices[1]));
    if (it == mid_by_key.end()) {
      boundary.push_back(be);
    } else {
      boundary.push_back({{be.vertices[0], it->second}, be.label});
      boundary.push_back({{it->second, be.vertices[1]}, be.label});
    }
  }
  return Triangulation(std::move(vertices), std::move(triangles), std::move(boundary),
                       std::move(generation), std::move(parent));
}

Triangulation refine_uniform(const Triangulation& mesh, int times)
{
  Triangulation out = mesh;
  for (int i = 0; i < times; ++i) {
    std::vector<int> all(out.num_elements());
    for (std::size_t t = 0; t < all.size(); ++t)
      all[t] = static_cast<int>(t);
    out = refine(out, all);
  }
  return out;
}

bool is_conforming(const Triangulation& mesh)
{
  if (mesh.nonmanifold_)
    return false;
  for (std::size_t t = 0; t < mesh.num_elements(); ++t)
    if (!(mesh.area(static_cast<int>(t)) > 0.0))
      return false;
  std::size_t boundary_edges = 0;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const bool labelled = mesh.edge_label(static_cast<int>(e)).has_value();
    if (mesh.is_boundary_edge(static_cast<int>(e))) {
      if (!labelled)
        return false;
      ++boundary_edges;
    } else if (labelled) {
      return false;
    }
  }
  return boundary_edges == mesh.boundary().size();
}

double min_angle(const Triangulation& mesh)
{
  double out = std::numbers::pi;
  for (const auto& tri : mesh.triangles())
    for (int i = 0; i < 3; ++i) {
      const Point& p = mesh.vertices()[tri[i]];
      const Vec2 u = mesh.vertices()[tri[(i + 1) % 3]] - p;
      const Vec2 w = mesh.vertices()[tri[(i + 2) % 3]] - p;
      const double cross = u.x() * w.y() - u.y() * w.x();
      out = std::min(out, std::atan2(std::abs(cross), u.dot(w)));
    }
  return out;
}

std::string_view to_string(BoundaryLabel label)
{
  return label == BoundaryLabel::Dirichlet ? "D" : "N";
}

void write_mesh(std::ostream& os, const Triangulation& mesh)
{
  const auto precision = os.precision(17);
  os << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices())
    os << v.x() << ' ' << v.y() << '\n';
  os << "triangles " << mesh.num_elements() << '\n';
  for (const auto& t : mesh.triangles())
    os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "boundary " << mesh.boundary().size() << '\n';
  for (const auto& b : mesh.boundary())
    os << b.vertices[0] << ' ' << b.vertices[1] << ' ' << to_string(b.label) << '\n';
  os.precision(precision);
}

Triangulation read_mesh(std::istream& is)
{
  auto expect = [&](const std::string& keyword) {
    std::string word;
    std::size_t n = 0;
    if (!(is >> word >> n) || word != keyword)
      throw std::runtime_error("read_mesh: expected '" + keyword + "' header");
    return n;
  };
  std::vector<Point> vertices(expect("vertices"));
  for (auto& v : vertices)
    is >> v.x() >> v.y();
  std::vector<std::array<int, 3>> triangles(expect("triangles"));
  for (auto& t : triangles)
    is >> t[0] >> t[1] >> t[2];
  std::vector<BoundaryEdge> boundary(expect("boundary"));
  for (auto& b : boundary) {
    std::string label;
    is >> b.vertices[0] >> b.vertices[1] >> label;
    if (label != "D" && label != "N")
      throw std::runtime_error("read_mesh: invalid boundary label '" + label + "'");
    b.label = label == "D" ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann;
  }
  if (!is)
    throw std::runtime_error("read_mesh: truncated input");
  return Triangulation(std::move(vertices), std::move(triangles), std::move(boundary));
}

MeshHierarchy::MeshHierarchy(std::shared_ptr<const Triangulation> coarse)
{
  std::vector<int> all(coarse->num_vertices());
  for (std::size_t v = 0; v < all.size(); ++v)
    all[v] = static_cast<int>(v);
  levels_.push_back(std::move(coarse));
  new_vertices_.push_back(std::move(all));
}

void MeshHierarchy::push(std::shared_ptr<const Triangulation> refined)
{
  const auto& prev = *levels_.back();
  if (refined->num_vertices() < prev.num_vertices())
    throw std::invalid_argument("MeshHierarchy: level is not a refinement of the finest mesh");
  for (int p : refined->parent())
    if (p < 0 || p >= static_cast<int>(prev.num_elements()))
      throw std::invalid_argument("MeshHierarchy: parent links do not refer to the finest mesh");
  std::vector<int> created;
  for (std::size_t v = prev.num_vertices(); v < refined->num_vertices(); ++v)
    created.push_back(static_cast<int>(v));
  levels_.push_back(std::move(refined));
  new_vertices_.push_back(std::move(created));
}

} // namespace goafem
