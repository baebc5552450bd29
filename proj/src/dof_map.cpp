#include "thermofrac/dof_map.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace thermofrac {

DofMap::DofMap(const QuadMesh& mesh) {
  const int nv = mesh.n_vertices();
  node_of_vertex_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!mesh.is_hanging(v)) vertex_of_node_.push_back(v);
  }
  // Row-by-row numbering keeps the bandwidth small for incomplete factorisations.
  std::sort(vertex_of_node_.begin(), vertex_of_node_.end(), [&](int a, int b) {
    const Vec2 pa = mesh.vertex(a);
    const Vec2 pb = mesh.vertex(b);
    return pa.y != pb.y ? pa.y < pb.y : pa.x < pb.x;
  });
  for (int n = 0; n < static_cast<int>(vertex_of_node_.size()); ++n) {
    node_of_vertex_[vertex_of_node_[n]] = n;
  }

  std::vector<std::vector<Term>> cache(nv);
  std::vector<char> state(nv, 0);
  std::function<const std::vector<Term>&(int)> expand = [&](int v) -> const std::vector<Term>& {
    if (state[v] == 2) return cache[v];
    if (state[v] == 1) throw std::logic_error("DofMap: cyclic hanging-vertex constraint");
    state[v] = 1;
    if (node_of_vertex_[v] >= 0) {
      cache[v] = {Term{node_of_vertex_[v], 1.0}};
    } else {
      const auto& hv = mesh.hanging()[mesh.hanging_index(v)];
      std::map<int, double> acc;
      for (int parent : {hv.parent_a, hv.parent_b}) {
        for (const Term& t : expand(parent)) acc[t.node] += 0.5 * t.weight;
      }
      for (const auto& [node, w] : acc) cache[v].push_back(Term{node, w});
    }
    state[v] = 2;
    return cache[v];
  };

  offsets_.assign(nv + 1, 0);
  for (int v = 0; v < nv; ++v) {
    const auto& e = expand(v);
    terms_.insert(terms_.end(), e.begin(), e.end());
    offsets_[v + 1] = static_cast<int>(terms_.size());
  }
}

std::vector<double> DofMap::to_vertex(std::span<const double> node_values) const {
  if (static_cast<int>(node_values.size()) != n_nodes()) {
    throw std::invalid_argument("DofMap::to_vertex: size mismatch");
  }
  std::vector<double> out(n_vertices(), 0.0);
  for (int v = 0; v < n_vertices(); ++v) {
    double s = 0.0;
    for (const Term& t : expansion(v)) s += t.weight * node_values[t.node];
    out[v] = s;
  }
  return out;
}

std::vector<double> DofMap::to_node(std::span<const double> vertex_values) const {
  if (static_cast<int>(vertex_values.size()) != n_vertices()) {
    throw std::invalid_argument("DofMap::to_node: size mismatch");
  }
  std::vector<double> out(n_nodes());
  for (int n = 0; n < n_nodes(); ++n) out[n] = vertex_values[vertex_of_node_[n]];
  return out;
}

}  // namespace thermofrac
