#pragma once

#include <span>
#include <vector>

#include "thermofrac/mesh.hpp"

namespace thermofrac {

/// Degrees of freedom on a quadtree mesh. Every non-hanging vertex is a node
/// carrying (u_x, u_y, phi); hanging vertices are eliminated and expressed as
/// weighted sums of nodes. The global layout is [u_x0 u_y0 u_x1 u_y1 ... | phi].
class DofMap {
 public:
  struct Term {
    int node = -1;
    double weight = 0.0;
  };

  explicit DofMap(const QuadMesh& mesh);

  int n_vertices() const { return static_cast<int>(node_of_vertex_.size()); }
  int n_nodes() const { return static_cast<int>(vertex_of_node_.size()); }
  int n_u() const { return 2 * n_nodes(); }
  int n_phi() const { return n_nodes(); }
  int n_total() const { return 3 * n_nodes(); }

  int node_of_vertex(int v) const { return node_of_vertex_[v]; }
  int vertex_of_node(int n) const { return vertex_of_node_[n]; }
  int u_dof(int node, int comp) const { return 2 * node + comp; }
  int phi_dof(int node) const { return n_u() + node; }

  /// Nodes and weights reproducing the value at vertex v.
  std::span<const Term> expansion(int v) const {
    return {terms_.data() + offsets_[v], terms_.data() + offsets_[v + 1]};
  }

  /// Scalar node values to a consistent full-vertex array.
  std::vector<double> to_vertex(std::span<const double> node_values) const;
  /// Restriction of a full-vertex array to the nodes.
  std::vector<double> to_node(std::span<const double> vertex_values) const;

 private:
  std::vector<int> node_of_vertex_;
  std::vector<int> vertex_of_node_;
  std::vector<int> offsets_;
  std::vector<Term> terms_;
};

}  // namespace thermofrac
