#include "scami/reference.hpp"

#include <cmath>
#include <vector>

#include "scami/errors.hpp"

namespace scami {

namespace {

// Local compensated accumulator; the reference path deliberately shares no
// code with the moment engine.
struct Acc {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct CenteredPixels {
  std::vector<std::array<double, 5>> pts;  // (dx, dy, dR, dG, dB)
  double area = 0.0;
};

CenteredPixels center(const Raster& r) {
  CenteredPixels out;
  Acc sx, sy, sr, sg, sb;
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const auto& px = r.at(x, y);
      sx.add(x + 0.5);
      sy.add(y + 0.5);
      sr.add(px[0]);
      sg.add(px[1]);
      sb.add(px[2]);
    }
  }
  const double n = double(r.width) * double(r.height);
  const double cx = sx.value() / n, cy = sy.value() / n;
  const double cr = sr.value() / n, cg = sg.value() / n, cb = sb.value() / n;
  out.pts.reserve(std::size_t(n));
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) {
      const auto& px = r.at(x, y);
      out.pts.push_back({(x + 0.5) - cx, (y + 0.5) - cy, px[0] - cr,
                         px[1] - cg, px[2] - cb});
    }
  out.area = n;
  return out;
}

double pow_small(double v, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= v;
  return out;
}

}  // namespace

double reference_kernel_sum(const PointPolynomial& kernel, int num_points,
                            const Raster& r, double* abs_scale) {
  if (kernel.num_points() > num_points)
    throw ContractError("kernel references more points than requested");
  const CenteredPixels cp = center(r);
  const std::size_t n = cp.pts.size();

  struct FlatTerm {
    double coeff;
    std::vector<PointExp> exps;
  };
  std::vector<FlatTerm> terms;
  terms.reserve(kernel.term_count());
  for (const auto& [key, c] : kernel.terms()) terms.push_back({to_double(c), key});

  std::vector<std::size_t> tuple(std::size_t(num_points), 0);
  Acc acc, abs_acc;
  while (true) {
    double tuple_sum = 0.0;
    for (const auto& term : terms) {
      double v = term.coeff;
      for (std::size_t i = 0; i < term.exps.size(); ++i) {
        const auto& e = term.exps[i];
        const auto& pt = cp.pts[tuple[i]];
        for (int k = 0; k < 5; ++k)
          v *= pow_small(pt[std::size_t(k)], e[std::size_t(k)]);
      }
      tuple_sum += v;
    }
    acc.add(tuple_sum);
    if (abs_scale) abs_acc.add(std::abs(tuple_sum));

    std::size_t d = 0;
    while (d < tuple.size() && ++tuple[d] == n) tuple[d++] = 0;
    if (d == tuple.size()) break;
  }
  if (abs_scale) *abs_scale = abs_acc.value();
  return acc.value();
}

double reference_core_sum(const CoreGraph& core, const Raster& r) {
  core.validate();
  const CenteredPixels cp = center(r);
  const int n_px = int(cp.pts.size());
  const int n = core.num_points;

  // Pairwise shape primitive values C[i][j] = x_i y_j - x_j y_i.
  std::vector<double> cross(std::size_t(n_px) * std::size_t(n_px));
  for (int i = 0; i < n_px; ++i)
    for (int j = 0; j < n_px; ++j)
      cross[std::size_t(i) * std::size_t(n_px) + std::size_t(j)] =
          cp.pts[std::size_t(i)][0] * cp.pts[std::size_t(j)][1] -
          cp.pts[std::size_t(j)][0] * cp.pts[std::size_t(i)][1];

  // Distinct edges and triples with multiplicities.
  std::vector<std::array<int, 3>> edges;  // i, j, multiplicity
  for (const auto& e : core.shape_edges) {
    if (!edges.empty() && edges.back()[0] == e[0] && edges.back()[1] == e[1])
      ++edges.back()[2];
    else
      edges.push_back({e[0], e[1], 1});
  }
  std::vector<std::array<int, 4>> triples;  // i, j, k, multiplicity
  for (const auto& t : core.color_triples) {
    if (!triples.empty() && triples.back()[0] == t[0] &&
        triples.back()[1] == t[1] && triples.back()[2] == t[2])
      ++triples.back()[3];
    else
      triples.push_back({t[0], t[1], t[2], 1});
  }

  auto volume = [&](std::size_t a, std::size_t b, std::size_t c) {
    const auto& p = cp.pts[a];
    const auto& q = cp.pts[b];
    const auto& s = cp.pts[c];
    return p[2] * (q[3] * s[4] - q[4] * s[3]) -
           q[2] * (p[3] * s[4] - p[4] * s[3]) +
           s[2] * (p[3] * q[4] - p[4] * q[3]);
  };

  std::vector<std::size_t> tuple(std::size_t(n), 0);
  Acc acc;
  while (true) {
    double v = 1.0;
    for (const auto& e : edges)
      v *= pow_small(cross[tuple[std::size_t(e[0]) - 1] * std::size_t(n_px) +
                           tuple[std::size_t(e[1]) - 1]],
                     e[2]);
    if (v != 0.0)
      for (const auto& t : triples)
        v *= pow_small(volume(tuple[std::size_t(t[0]) - 1],
                              tuple[std::size_t(t[1]) - 1],
                              tuple[std::size_t(t[2]) - 1]),
                       t[3]);
    acc.add(v);

    std::size_t d = 0;
    while (d < tuple.size() && ++tuple[d] == std::size_t(n_px)) tuple[d++] = 0;
    if (d == tuple.size()) break;
  }
  return acc.value();
}

double reference_invariant_value(const InvariantDef& def, const Raster& r) {
  CoreGraph combined;
  combined.num_points = def.num_points;
  combined.shape_edges = def.shape_core.shape_edges;
  combined.color_triples = def.color_core.color_triples;
  combined.normalize();

  const double numerator = reference_core_sum(combined, r);
  const double area = double(r.width) * double(r.height);
  double colornorm_part = 1.0;
  if (def.colornorm_exponent != 0) {
    const double q = reference_core_sum(CoreGraph::color_v123(2), r);
    if (!(q > 0.0))
      throw ColorDegenerateError("color normalization is not positive");
    colornorm_part = std::pow(q, to_double(def.colornorm_exponent));
  }
  return numerator /
         (std::pow(area, to_double(def.area_exponent)) * colornorm_part);
}

}  // namespace scami
