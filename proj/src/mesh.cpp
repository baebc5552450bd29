#include "thermofrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermofrac {

std::vector<double> FieldTransfer::apply(std::span<const double> old_values) const {
  if (static_cast<int>(old_values.size()) != n_old_) {
    throw std::invalid_argument("FieldTransfer::apply: size mismatch");
  }
  std::vector<double> out(old_values.begin(), old_values.end());
  out.reserve(n_new());
  for (const auto& s : added_) {
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += s.weights[k] * old_values[s.vertices[k]];
    out.push_back(v);
  }
  return out;
}

namespace {

std::uint64_t pack(std::int64_t ix, std::int64_t iy) {
  return (static_cast<std::uint64_t>(ix) << 32) | static_cast<std::uint64_t>(iy);
}

}  // namespace

QuadMesh::QuadMesh(double domain_size) : domain_size_(domain_size) {
  if (!(domain_size > 0.0)) throw DomainError("QuadMesh: domain size must be positive");
  Cell root;
  const std::int64_t n = unit_index(0);
  root.vertices = {vertex_at(0, 0), vertex_at(n, 0), vertex_at(n, n), vertex_at(0, n)};
  cells_.push_back(root);
  finalize();
}

QuadMesh QuadMesh::uniform(double domain_size, int level) {
  if (level < 0 || level > kMaxLevel) throw DomainError("QuadMesh::uniform: invalid level");
  QuadMesh mesh(domain_size);
  for (int l = 0; l < level; ++l) {
    const auto current = mesh.leaves_;
    for (int id : current) mesh.split(id);
    mesh.finalize();
  }
  return mesh;
}

QuadMesh generate_uniform(double a, int level) { return QuadMesh::uniform(2.0 * a, level); }

Vec2 QuadMesh::cell_origin(int id) const {
  const double h = cell_size(id);
  return {cells_[id].i * h, cells_[id].j * h};
}

int QuadMesh::vertex_at(std::int64_t ix, std::int64_t iy) {
  const auto key = pack(ix, iy);
  auto it = vertex_lookup_.find(key);
  if (it != vertex_lookup_.end()) return it->second;
  const double unit = domain_size_ / static_cast<double>(std::int64_t{1} << kMaxLevel);
  const int id = static_cast<int>(vertices_.size());
  vertices_.push_back({static_cast<double>(ix) * unit, static_cast<double>(iy) * unit});
  vertex_index_.push_back({ix, iy});
  vertex_lookup_.emplace(key, id);
  return id;
}

void QuadMesh::split(int id) {
  if (!cells_[id].is_leaf()) return;
  const Cell parent = cells_[id];
  if (parent.level >= kMaxLevel) throw DomainError("QuadMesh: maximum depth exceeded");
  const int level = parent.level + 1;
  const std::int64_t s = unit_index(level);
  const int first = static_cast<int>(cells_.size());
  for (int c = 0; c < 4; ++c) {
    Cell child;
    child.level = level;
    child.i = 2 * parent.i + (c & 1);
    child.j = 2 * parent.j + (c >> 1);
    child.parent = id;
    const std::int64_t x0 = child.i * s;
    const std::int64_t y0 = child.j * s;
    child.vertices = {vertex_at(x0, y0), vertex_at(x0 + s, y0), vertex_at(x0 + s, y0 + s),
                      vertex_at(x0, y0 + s)};
    cells_.push_back(child);
  }
  cells_[id].first_child = first;
}

void QuadMesh::finalize() {
  leaves_.clear();
  for (int id = 0; id < static_cast<int>(cells_.size()); ++id) {
    if (cells_[id].is_leaf()) leaves_.push_back(id);
  }
  hanging_.clear();
  hanging_index_.assign(vertices_.size(), -1);
  for (int id : leaves_) {
    const auto& v = cells_[id].vertices;
    for (int e = 0; e < 4; ++e) {
      const int a = v[e];
      const int b = v[(e + 1) % 4];
      const auto& ia = vertex_index_[a];
      const auto& ib = vertex_index_[b];
      if (((ia[0] + ib[0]) | (ia[1] + ib[1])) & 1) continue;
      auto it = vertex_lookup_.find(pack((ia[0] + ib[0]) / 2, (ia[1] + ib[1]) / 2));
      if (it == vertex_lookup_.end()) continue;
      const int m = it->second;
      if (hanging_index_[m] >= 0) continue;
      hanging_index_[m] = static_cast<int>(hanging_.size());
      hanging_.push_back({m, a, b});
    }
  }
}

int QuadMesh::locate(Vec2 p) const {
  const double x = std::clamp(p.x, 0.0, domain_size_);
  const double y = std::clamp(p.y, 0.0, domain_size_);
  int id = 0;
  while (!cells_[id].is_leaf()) {
    const Vec2 o = cell_origin(id);
    const double half = 0.5 * cell_size(id);
    const int cx = x >= o.x + half ? 1 : 0;
    const int cy = y >= o.y + half ? 1 : 0;
    id = cells_[id].first_child + cx + 2 * cy;
  }
  return id;
}

double QuadMesh::h_min() const { return domain_size_ / static_cast<double>(1 << max_leaf_level()); }

int QuadMesh::max_leaf_level() const {
  int lmax = 0;
  for (int id : leaves_) lmax = std::max(lmax, cells_[id].level);
  return lmax;
}

std::vector<double> QuadMesh::vertex_h() const {
  std::vector<double> h(vertices_.size(), std::numeric_limits<double>::infinity());
  for (int id : leaves_) {
    const double s = cell_size(id);
    for (int v : cells_[id].vertices) h[v] = std::min(h[v], s);
  }
  return h;
}

namespace {

// Sample points just across each edge of a leaf, inside the same-level neighbour.
std::array<Vec2, 4> neighbour_probes(Vec2 origin, double h) {
  const Vec2 c{origin.x + 0.5 * h, origin.y + 0.5 * h};
  return {Vec2{c.x - 0.75 * h, c.y}, Vec2{c.x + 0.75 * h, c.y}, Vec2{c.x, c.y - 0.75 * h},
          Vec2{c.x, c.y + 0.75 * h}};
}

}  // namespace

bool QuadMesh::is_one_irregular() const {
  for (int id : leaves_) {
    const int level = cells_[id].level;
    for (const Vec2& p : neighbour_probes(cell_origin(id), cell_size(id))) {
      if (p.x < 0.0 || p.y < 0.0 || p.x > domain_size_ || p.y > domain_size_) continue;
      if (cells_[locate(p)].level < level - 1) return false;
    }
  }
  return true;
}

std::pair<QuadMesh, FieldTransfer> QuadMesh::refine(std::span<const int> flagged_leaves) const {
  QuadMesh out = *this;
  const int n_old_vertices = n_vertices();
  std::vector<int> work;
  for (int id : flagged_leaves) {
    if (id < 0 || id >= static_cast<int>(cells_.size()) || !cells_[id].is_leaf()) {
      throw std::invalid_argument("QuadMesh::refine: flag does not reference a leaf");
    }
    if (!out.cells_[id].is_leaf()) continue;
    out.split(id);
    for (int c = 0; c < 4; ++c) work.push_back(out.cells_[id].first_child + c);
  }
  // Closure: any leaf two or more levels coarser than an edge neighbour is split.
  while (!work.empty()) {
    const int id = work.back();
    work.pop_back();
    if (!out.cells_[id].is_leaf()) continue;
    const int level = out.cells_[id].level;
    for (const Vec2& p : neighbour_probes(out.cell_origin(id), out.cell_size(id))) {
      if (p.x < 0.0 || p.y < 0.0 || p.x > domain_size_ || p.y > domain_size_) continue;
      const int nb = out.locate(p);
      if (out.cells_[nb].level < level - 1) {
        out.split(nb);
        for (int c = 0; c < 4; ++c) work.push_back(out.cells_[nb].first_child + c);
        work.push_back(id);
      }
    }
  }
  out.finalize();

  std::vector<FieldTransfer::Stencil> added;
  added.reserve(out.n_vertices() - n_old_vertices);
  for (int v = n_old_vertices; v < out.n_vertices(); ++v) {
    const Vec2 p = out.vertex(v);
    const int old_leaf = locate(p);
    const Vec2 o = cell_origin(old_leaf);
    const double h = cell_size(old_leaf);
    const double s = (p.x - o.x) / h;
    const double t = (p.y - o.y) / h;
    FieldTransfer::Stencil st;
    st.vertices = cells_[old_leaf].vertices;
    st.weights = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
    added.push_back(st);
  }
  return {std::move(out), FieldTransfer(n_old_vertices, std::move(added))};
}

std::vector<int> flag_cells(const QuadMesh& mesh, std::span<const double> phi_vertex,
                            double tol_phi, int max_level) {
  if (static_cast<int>(phi_vertex.size()) != mesh.n_vertices()) {
    throw std::invalid_argument("flag_cells: field size mismatch");
  }
  std::vector<int> flagged;
  for (int id : mesh.leaves()) {
    const auto& c = mesh.cell(id);
    if (c.level >= max_level) continue;
    for (int v : c.vertices) {
      if (phi_vertex[v] < tol_phi) {
        flagged.push_back(id);
        break;
      }
    }
  }
  return flagged;
}

std::vector<double> seed_crack(const QuadMesh& mesh, const Geometry& geometry) {
  const double xl = geometry.a - geometry.l0;
  const double xr = geometry.a + geometry.l0;
  const double yc = geometry.a;
  const double L = mesh.domain_size();
  if (xl < 0.0 || xr > L || yc < 0.0 || yc > L) {
    throw DomainError("seed_crack: crack segment outside the domain");
  }
  const auto h = mesh.vertex_h();
  std::vector<double> phi(mesh.n_vertices(), 1.0);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const Vec2 p = mesh.vertex(v);
    const double tol = 1e-9 * h[v];
    if (p.x >= xl - tol && p.x <= xr + tol && std::abs(p.y - yc) <= h[v] + tol) phi[v] = 0.0;
  }
  return phi;
}

double interpolate(const QuadMesh& mesh, std::span<const double> vertex_values, Vec2 p) {
  const int leaf = mesh.locate(p);
  const Vec2 o = mesh.cell_origin(leaf);
  const double h = mesh.cell_size(leaf);
  const double s = std::clamp((p.x - o.x) / h, 0.0, 1.0);
  const double t = std::clamp((p.y - o.y) / h, 0.0, 1.0);
  const auto& v = mesh.cell(leaf).vertices;
  return (1 - s) * (1 - t) * vertex_values[v[0]] + s * (1 - t) * vertex_values[v[1]] +
         s * t * vertex_values[v[2]] + (1 - s) * t * vertex_values[v[3]];
}

}  // namespace thermofrac
