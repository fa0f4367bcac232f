#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include "scami/raster.hpp"

namespace scami {

// Exponent tuple (p,q,a,b,g) of a shape-color moment: x^p y^q R^a G^b B^g.
// The total order is lexicographic on (p,q,a,b,g); canonical forms of
// moment polynomials depend on it, so keep it stable.
struct MomentKey {
  std::array<std::uint8_t, 5> e{};  // p, q, a, b, g

  constexpr MomentKey() = default;
  constexpr MomentKey(int p, int q, int a, int b, int g)
      : e{std::uint8_t(p), std::uint8_t(q), std::uint8_t(a), std::uint8_t(b),
          std::uint8_t(g)} {}

  int p() const { return e[0]; }
  int q() const { return e[1]; }
  int a() const { return e[2]; }
  int b() const { return e[3]; }
  int g() const { return e[4]; }

  int shape_order() const { return e[0] + e[1]; }
  int color_order() const { return e[2] + e[3] + e[4]; }
  int total_order() const { return shape_order() + color_order(); }

  // Central moments of total order one vanish identically (centering).
  bool is_first_order() const { return total_order() == 1; }

  auto operator<=>(const MomentKey&) const = default;

  std::string str() const;    // "p,q,a,b,g"
  std::string label() const;  // "scU20110" when all exponents are one digit

  static MomentKey parse(const std::string& text);  // throws FormatError
};

// Central shape-color moments of one raster, computed about the centroid
// and the per-channel means. Immutable after construction.
struct MomentTable {
  std::map<MomentKey, double> entries;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  std::array<double, 3> color_means{};
  double area = 0.0;  // == entries at (0,0,0,0,0)
  int max_shape_order = 0;
  int max_color_order = 0;

  // Throws ContractError when the key was not computed.
  double at(const MomentKey& key) const;

  bool contains(const MomentKey& key) const { return entries.count(key) != 0; }

  // True when every key with p+q <= shape_order and a+b+g <= color_order
  // is present.
  bool complete(int shape_order, int color_order) const;

  std::string to_json() const;
  static MomentTable from_json(const std::string& text);
};

enum class MaskPolicy {
  kFullFrame,     // integrate over every pixel
  kExcludeBlack,  // skip exact-(0,0,0) pixels (ALOI-style black background)
};

// Discrete central moments: unit pixel area, pixel centers at (x+0.5, y+0.5).
// Accumulation is compensated (Kahan), so results are stable to ~1e-9 * area
// against reordering. Throws std::domain_error when no pixel is included.
MomentTable central_moments(const Raster& r, int max_shape_order,
                            int max_color_order,
                            MaskPolicy mask = MaskPolicy::kFullFrame);

// Number of keys with p+q <= shape_order and a+b+g <= color_order.
int moment_key_count(int shape_order, int color_order);

}  // namespace scami
