#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scami/moments.hpp"
#include "scami/raster.hpp"

namespace scami {

// x' = m * x + t, in pixel units; m is row-major 2x2.
struct ShapeAffine {
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};
  std::array<double, 2> t{0.0, 0.0};

  static ShapeAffine identity() { return {}; }
  static ShapeAffine rotation(double radians);
  static ShapeAffine scaling(double s) { return {{s, 0.0, 0.0, s}, {0.0, 0.0}}; }

  double det() const { return m[0] * m[3] - m[1] * m[2]; }
  bool is_identity() const;
  bool operator==(const ShapeAffine&) const = default;
  std::array<double, 2> apply(double x, double y) const;
  ShapeAffine inverse() const;  // std::domain_error when singular

  friend ShapeAffine compose(const ShapeAffine& second,
                             const ShapeAffine& first);  // second after first
};

// c' = m * c + o in channel units; m is row-major 3x3.
struct ColorAffine {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 3> o{0.0, 0.0, 0.0};

  static ColorAffine identity() { return {}; }
  static ColorAffine diagonal(double r, double g, double b,
                              std::array<double, 3> offset = {0, 0, 0});

  double det() const;
  bool is_identity() const;
  bool operator==(const ColorAffine&) const = default;
  std::array<double, 3> apply(const std::array<double, 3>& c) const;

  friend ColorAffine compose(const ColorAffine& second,
                             const ColorAffine& first);
};

// Inverse-mapped warp with bilinear interpolation; samples falling outside
// the source take the fill color. Throws std::domain_error when the matrix
// is singular.
Raster warp(const Raster& r, const ShapeAffine& s, int out_width,
            int out_height, std::array<double, 3> fill = {0.0, 0.0, 0.0});

// Shifts the translation so the transformed source corners land in a tight
// non-negative bounding box, and reports the canvas size holding it.
struct CanvasFit {
  ShapeAffine transform;
  int width = 0;
  int height = 0;
};
CanvasFit fit_to_canvas(const Raster& r, const ShapeAffine& s);

// Per-pixel c' = clamp_[0,1](m * c + o). Throws std::domain_error when the
// matrix is singular.
Raster recolor(const Raster& r, const ColorAffine& c);

// Exact moment-domain action of the dual affine transform: the multinomial
// contraction of the centered coordinate and channel maps, times the
// |det m| area element. Translations and offsets drop out by centering.
// Throws ContractError when the table is not complete up to its orders.
MomentTable transform_moments(const MomentTable& table, const ShapeAffine& s,
                              const ColorAffine& c);

enum class TransformKind {
  kRotation,
  kScale,
  kShear,
  kGeneralShape,
  kColorDiagonal,
  kColorAffine,
  kComposite,
};

std::string kind_name(TransformKind kind);
TransformKind parse_kind(const std::string& name);  // throws FormatError

// Deterministic transform sampler. Ranges: rotation angle in [0,2pi); scale
// in [0.5,2]; shear in [-0.5,0.5]; general shape entries around the
// identity with det kept in [0.3,3]; diagonal gains in [0.6,1.4] with
// offsets in [-0.1,0.1]; full color affine entries identity +- 0.3 with det
// kept away from 0. Shape-only kinds carry an identity color transform and
// vice versa; composite draws both.
std::vector<std::pair<ShapeAffine, ColorAffine>> sample_transforms(
    TransformKind kind, int count, std::uint64_t seed);

}  // namespace scami
