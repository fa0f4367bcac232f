#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scami/core_graph.hpp"
#include "scami/polynomial.hpp"

namespace scami {

// One shape-color affine moment invariant: an integrated core product over
// a normalization that cancels both transform determinants,
//
//   numerator / (area^area_exponent * colornorm^colornorm_exponent)
//
// with area_exponent = max(N1,N2) + m1 - 3*m2/2 and colornorm_exponent =
// m2/2, where m1/m2 count shape/color primitives and N1/N2 their points.
struct InvariantDef {
  MomentPolynomial numerator;
  int num_points = 0;  // N = max(N1, N2)
  Rational area_exponent;
  Rational colornorm_exponent;
  CoreGraph shape_core;  // provenance
  CoreGraph color_core;
  int shape_weight = 0;  // m1
  int color_weight = 0;  // m2

  // det(M_s) and det(M_c) powers picked up by the numerator; the
  // normalization must match them exactly.
  int shape_det_power() const { return shape_weight + num_points; }
  int color_det_power() const { return color_weight; }

  // True when the denominator exponents balance the numerator's powers.
  bool scaling_balanced() const;

  std::string to_json() const;
};

// I(V(1,2,3)^2): the color normalization polynomial of the denominator.
// It is a sum of squares over point triples, hence >= 0 on every moment
// table measured from a real raster.
const MomentPolynomial& colornorm_polynomial();

// Builds the invariant for a shape core paired with a color core sharing
// the same point indices.
InvariantDef build_invariant(const CoreGraph& shape_core,
                             const CoreGraph& color_core);

// The published 24-entry catalog, in table order: rows 1-11 pair their
// shape cores with V(1,2,3)^2, rows 12-24 with V(1,2,3).
const std::vector<InvariantDef>& scami24_catalog();

struct EvalOptions {
  // Color-degenerate guard: reject when colornorm^colornorm_exponent drops
  // below this fraction of the area part of the denominator.
  double denominator_guard = 1e-12;
};

// Numeric value of the invariant on a moment table. Throws
// ColorDegenerateError when the color normalization is too small (e.g.
// grayscale input) and ContractError when keys are missing.
double evaluate(const InvariantDef& def, const MomentTable& table,
                const EvalOptions& options = {});

// Fixed-length invariant vector with per-entry validity flags.
struct Descriptor {
  std::vector<double> values;
  std::vector<bool> valid;

  std::size_t size() const { return values.size(); }
};

// Evaluates a whole invariant set; color-degenerate entries come back as
// value 0 with valid = false instead of throwing.
Descriptor evaluate_all(const std::vector<InvariantDef>& defs,
                        const MomentTable& table,
                        const EvalOptions& options = {});

enum class ZeroClass {
  kNonZero,
  kIdenticallyZero,  // the expansion cancels symbolically
  kFirstOrderZero,   // nonzero expansion, but every term carries a
                     // first-order central moment
};

ZeroClass classify_zero(const InvariantDef& def);
bool detect_zero(const InvariantDef& def);

// One exact linear relation among numerators: sum_i coeffs[i] *
// numerator[members[i]] == 0 with identical denominator exponents.
struct LinearDependency {
  std::vector<std::size_t> members;  // indices into the input list
  std::vector<Rational> coefficients;
};

// Exact nullspace of the coefficient matrix over the union monomial basis,
// computed per group of identical denominator exponents in rational
// arithmetic. Returns one entry per independent relation.
std::vector<LinearDependency> linear_dependencies(
    const std::vector<InvariantDef>& defs);

struct JacobianOptions {
  int samples = 5;               // rank = stable plateau across these
  double sv_threshold = 1e-8;    // relative to the largest singular value
  int max_resamples = 100;       // retries when a denominator vanishes
};

// Numeric rank of the matrix of first partial derivatives of the invariant
// ratios with respect to the moment variables, evaluated at random generic
// assignments. Derivatives are formed symbolically (quotient rule); the
// positive overall factor area^-a * colornorm^-b of each row is dropped
// since row scaling cannot change rank.
int jacobian_rank(const std::vector<InvariantDef>& defs, std::uint64_t seed,
                  const JacobianOptions& options = {});

// Full reproduction of the independence analysis: enumerate shape cores,
// pair each with V(1,2,3)^2 and V(1,2,3), classify zeros, find linear
// dependencies among the survivors, and certify the rest by Jacobian rank.
struct IndependenceReport {
  int shape_core_count = 0;
  int candidate_count = 0;
  int identically_zero = 0;
  int first_order_zero = 0;
  int zero_total = 0;
  int nonzero = 0;
  int linear_dependency_count = 0;
  int linearly_independent = 0;
  int jacobian_rank = 0;
  int moment_variables_in_bounds = 0;  // all keys within the order bounds
  int moment_variables_used = 0;       // keys appearing in surviving defs
  std::vector<std::string> candidate_dsl;       // per candidate
  std::vector<ZeroClass> candidate_class;       // per candidate
  std::vector<LinearDependency> dependencies;   // indices into survivors
  std::vector<std::size_t> survivor_candidates; // candidate index per survivor

  std::string to_json() const;
};

struct IndependenceOptions {
  int max_points = 4;
  int max_degree = 4;
  bool require_connected = true;
  LabelPolicy label_policy = LabelPolicy::kExposeLowDegree;
  std::uint64_t seed = 1;
  JacobianOptions jacobian;
};

IndependenceReport independence_pipeline(const IndependenceOptions& options);

// Catalog export per the external interface: numerators, exponents, and
// core DSL provenance for all 24 entries.
std::string catalog_to_json();

}  // namespace scami
