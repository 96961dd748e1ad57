#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "liftmc/common.hpp"
#include "liftmc/model.hpp"

namespace liftmc {

// Vertex-colored undirected graph encoding of a clause-form model, whose
// color- and edge-preserving vertex bijections correspond to model
// symmetries. Layout: vertices 2v / 2v+1 are the positive / negative
// literal of variable v, vertex 2n+k is clause k.
struct ColorGraph {
  enum class VertexKind { pos_literal, neg_literal, clause };
  struct Provenance {
    VertexKind kind;
    int index;  // variable id or clause id
  };

  int num_vertices = 0;
  int num_model_variables = 0;
  int num_model_clauses = 0;
  std::vector<int> color;                     // contiguous 0..c-1
  std::vector<std::pair<int, int>> edges;     // u < v, sorted, unique
  std::vector<Provenance> provenance;
  std::vector<std::vector<int>> adjacency;

  int num_colors = 0;

  static int pos_vertex(int var) { return 2 * var; }
  static int neg_vertex(int var) { return 2 * var + 1; }
  int clause_vertex(int k) const { return 2 * num_model_variables + k; }
};

// Niepert-style construction: one +node and one -node per variable joined
// by an edge, one node per clause joined to the literal nodes it contains.
// All +nodes share a color, all -nodes share another, and clause nodes are
// colored by their exact weight (clauses colored alike iff weights are
// bit-identical; approximate grouping is deliberately not done).
inline ColorGraph build_color_graph(const Model& reduced) {
  ColorGraph g;
  int n = reduced.num_variables();
  int m = reduced.num_clauses();
  g.num_model_variables = n;
  g.num_model_clauses = m;
  g.num_vertices = 2 * n + m;
  g.color.resize(g.num_vertices);
  g.provenance.resize(g.num_vertices);

  for (int v = 0; v < n; ++v) {
    g.color[ColorGraph::pos_vertex(v)] = 0;
    g.color[ColorGraph::neg_vertex(v)] = 1;
    g.provenance[ColorGraph::pos_vertex(v)] = {ColorGraph::VertexKind::pos_literal, v};
    g.provenance[ColorGraph::neg_vertex(v)] = {ColorGraph::VertexKind::neg_literal, v};
    g.edges.emplace_back(ColorGraph::pos_vertex(v), ColorGraph::neg_vertex(v));
  }

  // Weight colors in order of first occurrence; key is the exact double.
  std::map<double, int> weight_color;
  std::vector<int> clause_color(m);
  for (int k = 0; k < m; ++k) {
    double w = reduced.clause(k).weight;
    auto it = weight_color.find(w);
    if (it == weight_color.end())
      it = weight_color.emplace(w, 2 + static_cast<int>(weight_color.size())).first;
    clause_color[k] = it->second;
  }

  for (int k = 0; k < m; ++k) {
    int cv = 2 * n + k;
    g.color[cv] = clause_color[k];
    g.provenance[cv] = {ColorGraph::VertexKind::clause, k};
    for (const Literal& l : reduced.clause(k).literals) {
      int lv = l.positive ? ColorGraph::pos_vertex(l.var)
                          : ColorGraph::neg_vertex(l.var);
      g.edges.emplace_back(std::min(lv, cv), std::max(lv, cv));
    }
  }

  // Compress colors to a contiguous range (n == 0 leaves 0/1 unused).
  {
    std::vector<int> used;
    for (int c : g.color) used.push_back(c);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<int> remap(used.empty() ? 0 : used.back() + 1, -1);
    for (size_t i = 0; i < used.size(); ++i) remap[used[i]] = static_cast<int>(i);
    for (int& c : g.color) c = remap[c];
    g.num_colors = static_cast<int>(used.size());
  }

  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

  g.adjacency.resize(g.num_vertices);
  for (auto [u, v] : g.edges) {
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  return g;
}

// DIMACS-like debug export, 1-based vertices.
inline std::string color_graph_to_dimacs(const ColorGraph& g) {
  std::string out = "p edge " + std::to_string(g.num_vertices) + " " +
                    std::to_string(g.edges.size()) + "\n";
  for (int v = 0; v < g.num_vertices; ++v)
    out += "n " + std::to_string(v + 1) + " " + std::to_string(g.color[v]) + "\n";
  for (auto [u, v] : g.edges)
    out += "e " + std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  return out;
}

}  // namespace liftmc
