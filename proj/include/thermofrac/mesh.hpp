#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "thermofrac/params.hpp"
#include "thermofrac/physics.hpp"

namespace thermofrac {

/// A vertex sitting at the midpoint of a coarser leaf's edge.
struct HangingVertex {
  int vertex = -1;
  int parent_a = -1;
  int parent_b = -1;
};

/// Maps nodal values of an old mesh onto a refined mesh. Vertices that
/// already existed keep their value; new ones are interpolated bilinearly
/// inside the old leaf that contains them.
class FieldTransfer {
 public:
  struct Stencil {
    std::array<int, 4> vertices{};
    std::array<double, 4> weights{};
  };

  FieldTransfer() = default;
  FieldTransfer(int n_old, std::vector<Stencil> added)
      : n_old_(n_old), added_(std::move(added)) {}

  static FieldTransfer identity(int n_vertices) { return FieldTransfer(n_vertices, {}); }

  int n_old() const { return n_old_; }
  int n_new() const { return n_old_ + static_cast<int>(added_.size()); }
  bool is_identity() const { return added_.empty(); }

  std::vector<double> apply(std::span<const double> old_values) const;

 private:
  int n_old_ = 0;
  std::vector<Stencil> added_;
};

/// Quadtree mesh of the square (0, L)^2 with axis-aligned square cells.
/// Cells are never removed; leaves are the active elements. Vertex ids are
/// stable under refinement.
class QuadMesh {
 public:
  struct Cell {
    int level = 0;
    int i = 0;
    int j = 0;
    int parent = -1;
    int first_child = -1;  // children are first_child .. first_child + 3
    std::array<int, 4> vertices{};  // counter-clockwise from the lower-left corner

    bool is_leaf() const { return first_child < 0; }
  };

  static constexpr int kMaxLevel = 20;

  explicit QuadMesh(double domain_size = 1.0);

  /// (2^level)^2 congruent cells covering (0, L)^2.
  static QuadMesh uniform(double domain_size, int level);

  double domain_size() const { return domain_size_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(int id) const { return cells_[id]; }
  const std::vector<int>& leaves() const { return leaves_; }
  int n_leaves() const { return static_cast<int>(leaves_.size()); }

  double cell_size(int id) const { return domain_size_ / static_cast<double>(1 << cells_[id].level); }
  Vec2 cell_origin(int id) const;

  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  Vec2 vertex(int v) const { return vertices_[v]; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  const std::vector<HangingVertex>& hanging() const { return hanging_; }
  /// Index into hanging() or -1.
  int hanging_index(int v) const { return hanging_index_[v]; }
  bool is_hanging(int v) const { return hanging_index_[v] >= 0; }

  /// Leaf cell containing p (points on shared edges go to the upper/right cell).
  int locate(Vec2 p) const;

  double h_min() const;
  int max_leaf_level() const;

  /// Smallest incident leaf size per vertex.
  std::vector<double> vertex_h() const;

  /// Adjacent leaves (sharing an edge) differ by at most one level.
  bool is_one_irregular() const;

  /// Splits the flagged leaves and every leaf needed to restore
  /// 1-irregularity.
  std::pair<QuadMesh, FieldTransfer> refine(std::span<const int> flagged_leaves) const;

 private:
  void split(int id);
  int vertex_at(std::int64_t ix, std::int64_t iy);
  void finalize();
  std::int64_t unit_index(int level) const { return std::int64_t{1} << (kMaxLevel - level); }

  double domain_size_;
  std::vector<Cell> cells_;
  std::vector<int> leaves_;
  std::vector<Vec2> vertices_;
  std::vector<std::array<std::int64_t, 2>> vertex_index_;
  std::unordered_map<std::uint64_t, int> vertex_lookup_;
  std::vector<HangingVertex> hanging_;
  std::vector<int> hanging_index_;
};

/// Uniform mesh of (0, 2a)^2.
QuadMesh generate_uniform(double a, int level);

/// Leaves below max_level with at least one corner value phi < tol_phi.
std::vector<int> flag_cells(const QuadMesh& mesh, std::span<const double> phi_vertex,
                            double tol_phi, int max_level);

/// Initial phase field: 0 at vertices above the crack segment whose distance
/// to it is at most their local cell size, 1 elsewhere.
std::vector<double> seed_crack(const QuadMesh& mesh, const Geometry& geometry);

/// Bilinear interpolation of a vertex field at p.
double interpolate(const QuadMesh& mesh, std::span<const double> vertex_values, Vec2 p);

}  // namespace thermofrac
