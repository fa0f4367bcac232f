#pragma once

#include <array>
#include <string>
#include <vector>

namespace scami {

// Invariant core as a multigraph over points 1..num_points: shape edges are
// unordered point pairs (one shape primitive per edge, with multiplicity),
// color triples are unordered point triples (one color primitive each).
struct CoreGraph {
  int num_points = 0;
  std::vector<std::array<int, 2>> shape_edges;    // stored with i < j, sorted
  std::vector<std::array<int, 3>> color_triples;  // stored ascending, sorted

  static CoreGraph shape_only(int num_points,
                              std::vector<std::array<int, 2>> edges);
  // V(1,2,3)^power over three points.
  static CoreGraph color_v123(int power);

  void add_edge(int i, int j, int multiplicity = 1);
  void add_triple(int i, int j, int k, int multiplicity = 1);
  void normalize();  // sort endpoints and multisets

  // Throws std::domain_error on out-of-range or repeated indices.
  void validate() const;

  int shape_weight() const { return int(shape_edges.size()); }   // m1 / W
  int color_weight() const { return int(color_triples.size()); } // m2 / M

  std::vector<int> shape_degrees() const;        // d_i, index 0 = point 1
  std::vector<int> color_multiplicities() const; // t_i

  // Points touched by at least one edge / triple.
  int shape_point_count() const;
  int color_point_count() const;

  bool shape_connected() const;  // over the points touched by shape edges

  // Core DSL text: "shape: (1,2)^2 (1,3); color: V(1,2,3)^2"
  std::string dsl() const;
};

// Relabels points: perm[i-1] is the new index of old point i.
CoreGraph relabel(const CoreGraph& g, const std::vector<int>& perm);

// Equal strings iff the cores are isomorphic (brute force over all point
// relabelings; fine for the <= 4-point cores used here).
std::string canonical_form(const CoreGraph& g);

// All shape-core multigraphs up to isomorphism with 2..max_points points,
// no isolated points, and every point degree <= max_degree. The rule that
// reproduces the published 50-core census additionally requires the graph
// to be connected; pass require_connected = false to drop that.
std::vector<CoreGraph> enumerate_shape_cores(int max_points, int max_degree,
                                             bool require_connected = true);

// Which points carry the color primitive when a shape core is paired with
// V(1,2,3): the color triple always sits on points 1..3, so the labeling
// decides which point (slot 4 on four-point cores) is left color-free.
enum class LabelPolicy {
  kCanonical,         // the enumeration's canonical representative
  kProtectLowDegree,  // degree-1 points moved into slots 1..3
  kExposeLowDegree,   // a minimum-degree point moved to the last slot
};

CoreGraph labeled_for_color(const CoreGraph& g, LabelPolicy policy);

}  // namespace scami
