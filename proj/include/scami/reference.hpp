#pragma once

#include "scami/invariant.hpp"
#include "scami/polynomial.hpp"
#include "scami/raster.hpp"

namespace scami {

// Reference evaluations by direct summation over pixel tuples, independent
// of the symbolic expansion path. Cost grows as (W*H)^n; meant for small
// rasters and verification only.

// Sum of the kernel over all n-tuples of pixels, with coordinates centered
// on the centroid and channels centered on their means (the discrete
// multiple integral). abs_scale, when given, receives the sum of absolute
// tuple values: the natural magnitude against which a cancelling total
// should be judged.
double reference_kernel_sum(const PointPolynomial& kernel, int num_points,
                            const Raster& r, double* abs_scale = nullptr);

// Same sum evaluated from the primitive products of the core instead of an
// expanded polynomial (fast enough for 4-point cores on 6x6 rasters).
double reference_core_sum(const CoreGraph& core, const Raster& r);

// Full invariant ratio from reference sums: reference_core_sum over
// area^area_exponent * (reference I(V^2))^colornorm_exponent.
double reference_invariant_value(const InvariantDef& def, const Raster& r);

}  // namespace scami
