#include "scami/core_graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace scami {

CoreGraph CoreGraph::shape_only(int num_points,
                                std::vector<std::array<int, 2>> edges) {
  CoreGraph g;
  g.num_points = num_points;
  g.shape_edges = std::move(edges);
  g.normalize();
  g.validate();
  return g;
}

CoreGraph CoreGraph::color_v123(int power) {
  CoreGraph g;
  g.num_points = 3;
  for (int i = 0; i < power; ++i) g.color_triples.push_back({1, 2, 3});
  g.validate();
  return g;
}

void CoreGraph::add_edge(int i, int j, int multiplicity) {
  for (int n = 0; n < multiplicity; ++n)
    shape_edges.push_back({std::min(i, j), std::max(i, j)});
  normalize();
}

void CoreGraph::add_triple(int i, int j, int k, int multiplicity) {
  std::array<int, 3> t{i, j, k};
  std::sort(t.begin(), t.end());
  for (int n = 0; n < multiplicity; ++n) color_triples.push_back(t);
  normalize();
}

void CoreGraph::normalize() {
  for (auto& e : shape_edges)
    if (e[0] > e[1]) std::swap(e[0], e[1]);
  for (auto& t : color_triples) std::sort(t.begin(), t.end());
  std::sort(shape_edges.begin(), shape_edges.end());
  std::sort(color_triples.begin(), color_triples.end());
}

void CoreGraph::validate() const {
  if (num_points < 1) throw std::domain_error("core has no points");
  for (const auto& e : shape_edges) {
    if (e[0] < 1 || e[1] > num_points)
      throw std::domain_error("edge index out of range");
    if (e[0] == e[1]) throw std::domain_error("shape primitive needs i != j");
  }
  for (const auto& t : color_triples) {
    if (t[0] < 1 || t[2] > num_points)
      throw std::domain_error("triple index out of range");
    if (t[0] == t[1] || t[1] == t[2])
      throw std::domain_error("color primitive needs distinct points");
  }
}

std::vector<int> CoreGraph::shape_degrees() const {
  std::vector<int> d(std::size_t(num_points), 0);
  for (const auto& e : shape_edges) {
    ++d[std::size_t(e[0]) - 1];
    ++d[std::size_t(e[1]) - 1];
  }
  return d;
}

std::vector<int> CoreGraph::color_multiplicities() const {
  std::vector<int> t(std::size_t(num_points), 0);
  for (const auto& triple : color_triples)
    for (int i : triple) ++t[std::size_t(i) - 1];
  return t;
}

int CoreGraph::shape_point_count() const {
  std::set<int> pts;
  for (const auto& e : shape_edges) {
    pts.insert(e[0]);
    pts.insert(e[1]);
  }
  return int(pts.size());
}

int CoreGraph::color_point_count() const {
  std::set<int> pts;
  for (const auto& t : color_triples) pts.insert(t.begin(), t.end());
  return int(pts.size());
}

bool CoreGraph::shape_connected() const {
  if (shape_edges.empty()) return true;
  std::set<int> pts;
  for (const auto& e : shape_edges) {
    pts.insert(e[0]);
    pts.insert(e[1]);
  }
  std::set<int> seen{*pts.begin()};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : shape_edges) {
      const bool a = seen.count(e[0]), b = seen.count(e[1]);
      if (a != b) {
        seen.insert(a ? e[1] : e[0]);
        grew = true;
      }
    }
  }
  return seen.size() == pts.size();
}

std::string CoreGraph::dsl() const {
  auto run_length = [](auto items) {
    std::vector<std::pair<typename decltype(items)::value_type, int>> runs;
    for (const auto& item : items) {
      if (!runs.empty() && runs.back().first == item) {
        ++runs.back().second;
      } else {
        runs.push_back({item, 1});
      }
    }
    return runs;
  };
  std::string s;
  if (!shape_edges.empty()) {
    s += "shape:";
    for (const auto& [edge, mult] : run_length(shape_edges)) {
      s += " (" + std::to_string(edge[0]) + "," + std::to_string(edge[1]) + ")";
      if (mult > 1) s += "^" + std::to_string(mult);
    }
  }
  if (!color_triples.empty()) {
    if (!s.empty()) s += "; ";
    s += "color:";
    for (const auto& [t, mult] : run_length(color_triples)) {
      s += " V(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
           std::to_string(t[2]) + ")";
      if (mult > 1) s += "^" + std::to_string(mult);
    }
  }
  return s;
}

CoreGraph relabel(const CoreGraph& g, const std::vector<int>& perm) {
  if (int(perm.size()) != g.num_points)
    throw std::domain_error("relabeling size mismatch");
  CoreGraph out;
  out.num_points = g.num_points;
  out.shape_edges = g.shape_edges;
  out.color_triples = g.color_triples;
  for (auto& e : out.shape_edges)
    e = {perm[std::size_t(e[0]) - 1], perm[std::size_t(e[1]) - 1]};
  for (auto& t : out.color_triples)
    t = {perm[std::size_t(t[0]) - 1], perm[std::size_t(t[1]) - 1],
         perm[std::size_t(t[2]) - 1]};
  out.normalize();
  return out;
}

namespace {

std::string encode(const CoreGraph& g) {
  std::string s;
  s += char('0' + g.num_points);
  s += 'S';
  for (const auto& e : g.shape_edges) {
    s += char('0' + e[0]);
    s += char('0' + e[1]);
  }
  s += 'C';
  for (const auto& t : g.color_triples) {
    s += char('0' + t[0]);
    s += char('0' + t[1]);
    s += char('0' + t[2]);
  }
  return s;
}

}  // namespace

std::string canonical_form(const CoreGraph& g) {
  std::vector<int> perm(std::size_t(g.num_points));
  std::iota(perm.begin(), perm.end(), 1);
  std::string best;
  do {
    std::string s = encode(relabel(g, perm));
    if (best.empty() || s < best) best = s;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<CoreGraph> enumerate_shape_cores(int max_points, int max_degree,
                                             bool require_connected) {
  if (max_points < 2) throw std::domain_error("need at least 2 points");
  if (max_degree < 1) throw std::domain_error("need degree bound >= 1");

  std::map<std::string, CoreGraph> found;
  for (int k = 2; k <= max_points; ++k) {
    // All point pairs of a k-point core.
    std::vector<std::array<int, 2>> pairs;
    for (int i = 1; i <= k; ++i)
      for (int j = i + 1; j <= k; ++j) pairs.push_back({i, j});

    std::vector<int> mult(pairs.size(), 0);
    std::vector<int> degree(std::size_t(k) + 1, 0);

    auto emit = [&]() {
      for (int p = 1; p <= k; ++p)
        if (degree[std::size_t(p)] == 0) return;  // isolated point
      CoreGraph g;
      g.num_points = k;
      for (std::size_t e = 0; e < pairs.size(); ++e)
        for (int n = 0; n < mult[e]; ++n) g.shape_edges.push_back(pairs[e]);
      g.normalize();
      if (require_connected && !g.shape_connected()) return;
      std::string canon = canonical_form(g);
      if (!found.count(canon)) found.emplace(std::move(canon), std::move(g));
    };

    auto rec = [&](auto&& self, std::size_t e) -> void {
      if (e == pairs.size()) {
        emit();
        return;
      }
      const auto [i, j] = std::pair(pairs[e][0], pairs[e][1]);
      const int room = std::min(max_degree - degree[std::size_t(i)],
                                max_degree - degree[std::size_t(j)]);
      for (int m = 0; m <= room; ++m) {
        mult[e] = m;
        degree[std::size_t(i)] += m;
        degree[std::size_t(j)] += m;
        self(self, e + 1);
        degree[std::size_t(i)] -= m;
        degree[std::size_t(j)] -= m;
      }
      mult[e] = 0;
    };
    rec(rec, 0);
  }

  std::vector<CoreGraph> cores;
  cores.reserve(found.size());
  for (auto& [canon, g] : found) cores.push_back(std::move(g));
  // Deterministic order: by point count, then total weight, then canon form.
  std::stable_sort(cores.begin(), cores.end(),
                   [](const CoreGraph& a, const CoreGraph& b) {
                     if (a.num_points != b.num_points)
                       return a.num_points < b.num_points;
                     if (a.shape_weight() != b.shape_weight())
                       return a.shape_weight() < b.shape_weight();
                     return canonical_form(a) < canonical_form(b);
                   });
  return cores;
}

CoreGraph labeled_for_color(const CoreGraph& g, LabelPolicy policy) {
  if (policy == LabelPolicy::kCanonical) return g;
  const auto degrees = g.shape_degrees();
  std::vector<int> order(std::size_t(g.num_points));
  std::iota(order.begin(), order.end(), 1);
  // Sort points by degree; stable so the canonical labels break ties.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return degrees[std::size_t(a) - 1] < degrees[std::size_t(b) - 1];
  });
  if (policy == LabelPolicy::kExposeLowDegree) std::reverse(order.begin(), order.end());
  // order[slot-1] = old point landing in that slot; invert into a relabel map.
  std::vector<int> perm(std::size_t(g.num_points));
  for (int slot = 1; slot <= g.num_points; ++slot)
    perm[std::size_t(order[std::size_t(slot) - 1]) - 1] = slot;
  return relabel(g, perm);
}

}  // namespace scami
