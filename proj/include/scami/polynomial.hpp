#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scami/core_graph.hpp"
#include "scami/moments.hpp"
#include "scami/rational.hpp"

namespace scami {

// Exponents of one point's variables (x_i, y_i, R_i, G_i, B_i).
using PointExp = std::array<std::uint8_t, 5>;

inline bool all_zero(const PointExp& e) {
  return e[0] == 0 && e[1] == 0 && e[2] == 0 && e[3] == 0 && e[4] == 0;
}

// Polynomial in the per-point variables of points 1..num_points with exact
// rational coefficients. Terms are kept in a canonical map keyed by the
// exponent vectors, zero coefficients are never stored.
class PointPolynomial {
 public:
  using TermKey = std::vector<PointExp>;  // length == num_points
  using TermMap = std::map<TermKey, Rational>;

  PointPolynomial() = default;
  explicit PointPolynomial(int num_points) : num_points_(num_points) {}

  static PointPolynomial constant(int num_points, const Rational& c);
  static PointPolynomial monomial(int num_points, const TermKey& exps,
                                  const Rational& c);

  int num_points() const { return num_points_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add_term(const TermKey& exps, const Rational& c);

  PointPolynomial& operator+=(const PointPolynomial& other);
  PointPolynomial& operator-=(const PointPolynomial& other);
  PointPolynomial operator*(const PointPolynomial& other) const;
  PointPolynomial operator-() const;

  friend PointPolynomial operator+(PointPolynomial a, const PointPolynomial& b) {
    a += b;
    return a;
  }
  friend PointPolynomial operator-(PointPolynomial a, const PointPolynomial& b) {
    a -= b;
    return a;
  }

  bool operator==(const PointPolynomial&) const = default;

  // Returns a copy over a larger point set (extra points untouched).
  PointPolynomial lifted(int num_points) const;

  // Applies a point relabeling: perm[i-1] is the new index of old point i.
  PointPolynomial relabeled(const std::vector<int>& perm) const;

  // Numeric evaluation; points[i] holds (x,y,R,G,B) of point i+1.
  double eval(const std::vector<std::array<double, 5>>& points) const;
  Rational eval_exact(
      const std::vector<std::array<Rational, 5>>& points) const;

 private:
  int num_points_ = 0;
  TermMap terms_;
};

// x_i * y_j - x_j * y_i, twice the signed triangle area with the origin.
// Throws std::domain_error when i == j.
PointPolynomial shape_primitive(int i, int j, int num_points = 0);

// The 3x3 determinant of the RGB columns at points i, j, k (parallelepiped
// volume with the origin). Throws std::domain_error on repeated indices.
PointPolynomial color_primitive(int i, int j, int k, int num_points = 0);

// Expanded product of every shape edge's primitive and every color triple's
// primitive of the core, canonicalized.
PointPolynomial build_kernel(const CoreGraph& core);

// Canonical sum over sorted multisets of moment keys with exact rational
// coefficients: the expanded result of the multiple integration.
class MomentPolynomial {
 public:
  using TermKey = std::vector<MomentKey>;  // sorted multiset
  using TermMap = std::map<TermKey, Rational>;

  MomentPolynomial() = default;

  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add_term(TermKey keys, const Rational& c);  // sorts, merges, prunes

  MomentPolynomial& operator+=(const MomentPolynomial& other);
  MomentPolynomial& operator-=(const MomentPolynomial& other);
  MomentPolynomial operator*(const MomentPolynomial& other) const;
  MomentPolynomial scaled(const Rational& c) const;

  bool operator==(const MomentPolynomial&) const = default;

  // Copy without the terms that contain a first-order key; such terms
  // vanish on every central moment table.
  MomentPolynomial without_first_order_terms() const;

  // True when some term contains a first-order key.
  bool has_first_order_terms() const;

  std::set<MomentKey> variables() const;

  // d/d(var), counting multiplicities in the key multisets.
  MomentPolynomial derivative(const MomentKey& var) const;

  double eval(const MomentTable& table) const;  // ContractError on missing key
  double eval(const std::map<MomentKey, double>& assignment) const;
  Rational eval_exact(const std::map<MomentKey, Rational>& assignment) const;

  std::string to_json() const;  // [{"coeff":"n/d","keys":["p,q,a,b,g",...]},...]
  static MomentPolynomial from_json(const std::string& text);

 private:
  TermMap terms_;
};

// The n-fold integral of a kernel: every kernel term maps to the product of
// one moment key per point (all-zero exponents give the area key 00000).
MomentPolynomial integrate(const PointPolynomial& kernel, int num_points);

// Parses the core DSL, e.g. "shape: (1,2)^2 (1,3)^2; color: V(1,2,3)^2".
// Either section may be omitted. Throws ParseError with a byte position.
CoreGraph parse_core_spec(const std::string& text);

}  // namespace scami
