#include "scami/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scami/errors.hpp"
#include "scami/rng.hpp"

namespace scami {

ShapeAffine ShapeAffine::rotation(double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return {{c, -s, s, c}, {0.0, 0.0}};
}

bool ShapeAffine::is_identity() const {
  return m == std::array<double, 4>{1, 0, 0, 1} &&
         t == std::array<double, 2>{0, 0};
}

std::array<double, 2> ShapeAffine::apply(double x, double y) const {
  return {m[0] * x + m[1] * y + t[0], m[2] * x + m[3] * y + t[1]};
}

ShapeAffine ShapeAffine::inverse() const {
  const double d = det();
  if (d == 0.0) throw std::domain_error("singular shape transform");
  const std::array<double, 4> inv{m[3] / d, -m[1] / d, -m[2] / d, m[0] / d};
  return {inv,
          {-(inv[0] * t[0] + inv[1] * t[1]), -(inv[2] * t[0] + inv[3] * t[1])}};
}

ShapeAffine compose(const ShapeAffine& second, const ShapeAffine& first) {
  ShapeAffine out;
  out.m = {second.m[0] * first.m[0] + second.m[1] * first.m[2],
           second.m[0] * first.m[1] + second.m[1] * first.m[3],
           second.m[2] * first.m[0] + second.m[3] * first.m[2],
           second.m[2] * first.m[1] + second.m[3] * first.m[3]};
  const auto t = second.apply(first.t[0], first.t[1]);
  out.t = t;
  return out;
}

ColorAffine ColorAffine::diagonal(double r, double g, double b,
                                  std::array<double, 3> offset) {
  ColorAffine c;
  c.m = {r, 0, 0, 0, g, 0, 0, 0, b};
  c.o = offset;
  return c;
}

double ColorAffine::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

bool ColorAffine::is_identity() const {
  return m == std::array<double, 9>{1, 0, 0, 0, 1, 0, 0, 0, 1} &&
         o == std::array<double, 3>{0, 0, 0};
}

std::array<double, 3> ColorAffine::apply(const std::array<double, 3>& c) const {
  return {m[0] * c[0] + m[1] * c[1] + m[2] * c[2] + o[0],
          m[3] * c[0] + m[4] * c[1] + m[5] * c[2] + o[1],
          m[6] * c[0] + m[7] * c[1] + m[8] * c[2] + o[2]};
}

ColorAffine compose(const ColorAffine& second, const ColorAffine& first) {
  ColorAffine out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) sum += second.m[3 * r + k] * first.m[3 * k + c];
      out.m[3 * r + c] = sum;
    }
  }
  out.o = second.apply(first.o);
  return out;
}

Raster warp(const Raster& r, const ShapeAffine& s, int out_width,
            int out_height, std::array<double, 3> fill) {
  if (out_width < 1 || out_height < 1)
    throw std::domain_error("warp canvas must be >= 1x1");
  const ShapeAffine inv = s.inverse();  // throws when singular

  Raster out(out_width, out_height, fill);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const auto src = inv.apply(x + 0.5, y + 0.5);
      // Bilinear sample at pixel-center coordinates.
      const double u = src[0] - 0.5, v = src[1] - 0.5;
      const int x0 = int(std::floor(u)), y0 = int(std::floor(v));
      const double fx = u - x0, fy = v - y0;
      std::array<double, 3> acc{0, 0, 0};
      const double w00 = (1 - fx) * (1 - fy), w10 = fx * (1 - fy);
      const double w01 = (1 - fx) * fy, w11 = fx * fy;
      const double weights[4] = {w00, w10, w01, w11};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int k = 0; k < 4; ++k) {
        if (weights[k] == 0.0) continue;
        const std::array<double, 3>& px = r.in_bounds(xs[k], ys[k])
                                              ? r.at(xs[k], ys[k])
                                              : fill;
        for (int c = 0; c < 3; ++c) acc[c] += weights[k] * px[c];
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

CanvasFit fit_to_canvas(const Raster& r, const ShapeAffine& s) {
  const double w = r.width, h = r.height;
  const std::array<std::array<double, 2>, 4> corners{
      s.apply(0, 0), s.apply(w, 0), s.apply(0, h), s.apply(w, h)};
  double min_x = corners[0][0], max_x = corners[0][0];
  double min_y = corners[0][1], max_y = corners[0][1];
  for (const auto& c : corners) {
    min_x = std::min(min_x, c[0]);
    max_x = std::max(max_x, c[0]);
    min_y = std::min(min_y, c[1]);
    max_y = std::max(max_y, c[1]);
  }
  CanvasFit fit;
  fit.transform = s;
  fit.transform.t[0] = s.t[0] - min_x;
  fit.transform.t[1] = s.t[1] - min_y;
  fit.width = std::max(1, int(std::ceil(max_x - min_x)));
  fit.height = std::max(1, int(std::ceil(max_y - min_y)));
  return fit;
}

Raster recolor(const Raster& r, const ColorAffine& c) {
  if (c.det() == 0.0) throw std::domain_error("singular color transform");
  Raster out = r;
  for (auto& px : out.pixels) {
    auto mapped = c.apply(px);
    for (int k = 0; k < 3; ++k)
      px[std::size_t(k)] = std::min(1.0, std::max(0.0, mapped[std::size_t(k)]));
  }
  return out;
}

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Coefficients of (m0*x + m1*y)^p (m2*x + m3*y)^q over x^i y^(p+q-i).
std::vector<double> shape_expansion(const std::array<double, 4>& m, int p,
                                    int q) {
  std::vector<double> first(std::size_t(p) + 1);
  for (int u = 0; u <= p; ++u)
    first[std::size_t(u)] = double(binomial(p, u)) * std::pow(m[0], u) *
                            std::pow(m[1], p - u);
  std::vector<double> second(std::size_t(q) + 1);
  for (int v = 0; v <= q; ++v)
    second[std::size_t(v)] = double(binomial(q, v)) * std::pow(m[2], v) *
                             std::pow(m[3], q - v);
  std::vector<double> out(std::size_t(p + q) + 1, 0.0);
  for (int u = 0; u <= p; ++u)
    for (int v = 0; v <= q; ++v)
      out[std::size_t(u + v)] += first[std::size_t(u)] * second[std::size_t(v)];
  return out;
}

// Coefficients over R^i G^j B^k of one row power (c0 R + c1 G + c2 B)^n.
std::map<std::array<int, 3>, double> row_power(const double* c, int n) {
  std::map<std::array<int, 3>, double> out;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const int k = n - i - j;
      const double multinomial =
          double(binomial(n, i)) * double(binomial(n - i, j));
      out[{i, j, k}] = multinomial * std::pow(c[0], i) * std::pow(c[1], j) *
                       std::pow(c[2], k);
    }
  }
  return out;
}

}  // namespace

MomentTable transform_moments(const MomentTable& table, const ShapeAffine& s,
                              const ColorAffine& c) {
  if (!table.complete(table.max_shape_order, table.max_color_order))
    throw ContractError("moment table is incomplete for its stated orders");
  if (s.det() == 0.0) throw std::domain_error("singular shape transform");
  if (c.det() == 0.0) throw std::domain_error("singular color transform");

  const double jacobian = std::abs(s.det());

  MomentTable out;
  out.max_shape_order = table.max_shape_order;
  out.max_color_order = table.max_color_order;
  out.area = jacobian * table.area;
  const auto centroid = s.apply(table.centroid_x, table.centroid_y);
  out.centroid_x = centroid[0];
  out.centroid_y = centroid[1];
  out.color_means = c.apply(table.color_means);

  for (const auto& [key, unused] : table.entries) {
    (void)unused;
    // (m00 dx + m01 dy)^p (m10 dx + m11 dy)^q expands over dx^i dy^(p+q-i).
    const auto shape_coeff = shape_expansion(s.m, key.p(), key.q());
    const auto r_part = row_power(c.m.data(), key.a());
    const auto g_part = row_power(c.m.data() + 3, key.b());
    const auto b_part = row_power(c.m.data() + 6, key.g());

    double sum = 0.0;
    const int shape_order = key.shape_order();
    for (int i = 0; i <= shape_order; ++i) {
      const double sc = shape_coeff[std::size_t(i)];
      if (sc == 0.0) continue;
      for (const auto& [re, rc] : r_part) {
        for (const auto& [ge, gc] : g_part) {
          for (const auto& [be, bc] : b_part) {
            const MomentKey source(i, shape_order - i, re[0] + ge[0] + be[0],
                                   re[1] + ge[1] + be[1], re[2] + ge[2] + be[2]);
            sum += sc * rc * gc * bc * table.at(source);
          }
        }
      }
    }
    out.entries[key] = jacobian * sum;
  }
  return out;
}

std::string kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::kRotation:
      return "rotation";
    case TransformKind::kScale:
      return "scale";
    case TransformKind::kShear:
      return "shear";
    case TransformKind::kGeneralShape:
      return "general-shape";
    case TransformKind::kColorDiagonal:
      return "color-diagonal";
    case TransformKind::kColorAffine:
      return "color-affine";
    case TransformKind::kComposite:
      return "composite";
  }
  return "?";
}

TransformKind parse_kind(const std::string& name) {
  for (TransformKind kind :
       {TransformKind::kRotation, TransformKind::kScale, TransformKind::kShear,
        TransformKind::kGeneralShape, TransformKind::kColorDiagonal,
        TransformKind::kColorAffine, TransformKind::kComposite}) {
    if (kind_name(kind) == name) return kind;
  }
  throw FormatError("unknown transform kind '" + name + "'");
}

namespace {

ShapeAffine sample_general_shape(Rng& rng) {
  // Identity plus uniform perturbation, redrawn until det sits in [0.3, 3].
  while (true) {
    ShapeAffine s;
    s.m = {1.0 + rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7),
           rng.uniform(-0.7, 0.7), 1.0 + rng.uniform(-0.7, 0.7)};
    const double d = s.det();
    if (d >= 0.3 && d <= 3.0) return s;
  }
}

ColorAffine sample_color_affine(Rng& rng) {
  while (true) {
    ColorAffine c;
    for (int i = 0; i < 9; ++i)
      c.m[std::size_t(i)] = (i % 4 == 0 ? 1.0 : 0.0) + rng.uniform(-0.3, 0.3);
    for (int i = 0; i < 3; ++i) c.o[std::size_t(i)] = rng.uniform(-0.1, 0.1);
    if (c.det() >= 0.2) return c;
  }
}

ColorAffine sample_color_diagonal(Rng& rng) {
  ColorAffine c = ColorAffine::diagonal(
      rng.uniform(0.6, 1.4), rng.uniform(0.6, 1.4), rng.uniform(0.6, 1.4));
  for (int i = 0; i < 3; ++i) c.o[std::size_t(i)] = rng.uniform(-0.1, 0.1);
  return c;
}

}  // namespace

std::vector<std::pair<ShapeAffine, ColorAffine>> sample_transforms(
    TransformKind kind, int count, std::uint64_t seed) {
  if (count < 1) throw std::domain_error("count must be >= 1");
  Rng rng(seed);
  std::vector<std::pair<ShapeAffine, ColorAffine>> out;
  out.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) {
    ShapeAffine s;
    ColorAffine c;
    switch (kind) {
      case TransformKind::kRotation:
        s = ShapeAffine::rotation(rng.uniform(0.0, 2.0 * std::numbers::pi));
        break;
      case TransformKind::kScale:
        s = ShapeAffine::scaling(rng.uniform(0.5, 2.0));
        break;
      case TransformKind::kShear:
        s.m = {1.0, rng.uniform(-0.5, 0.5), 0.0, 1.0};
        break;
      case TransformKind::kGeneralShape:
        s = sample_general_shape(rng);
        break;
      case TransformKind::kColorDiagonal:
        c = sample_color_diagonal(rng);
        break;
      case TransformKind::kColorAffine:
        c = sample_color_affine(rng);
        break;
      case TransformKind::kComposite:
        s = sample_general_shape(rng);
        c = sample_color_affine(rng);
        break;
    }
    out.emplace_back(s, c);
  }
  return out;
}

}  // namespace scami
