#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scami/invariant.hpp"
#include "scami/transforms.hpp"

namespace scami {

struct DatasetItem {
  Descriptor descriptor;
  int label = 0;      // class label (source index)
  int source_id = 0;
  ShapeAffine shape;  // transform record
  ColorAffine color;
};

struct LabeledDataset {
  std::vector<DatasetItem> items;
  TransformKind kind = TransformKind::kComposite;
  std::uint64_t seed = 0;
  int per_source = 0;
  int excluded = 0;  // color-degenerate items dropped during generation

  std::string to_json() const;
  static LabeledDataset from_json(const std::string& text);
};

struct MreReport {
  std::vector<double> mre;       // one entry per invariant index
  std::vector<int> excluded;     // invalid comparisons skipped per index
  int variant_count = 0;

  double median() const;

  std::string to_csv() const;   // index,mre,excluded
  std::string to_json() const;
};

// Mean relative error per invariant: mean over variants of
// |v_k - r_k| / (|r_k| + 1e-12). Entries where either side is invalid are
// excluded and counted. Throws std::domain_error on an empty variant list.
MreReport mre(const Descriptor& reference,
              const std::vector<Descriptor>& variants);

// sum_k (a_k - b_k)^2 / (|a_k| + |b_k| + 1e-12); assumes standardized
// entries. Throws ContractError on length mismatch.
double chi_square(const std::vector<double>& a, const std::vector<double>& b);

// Per-dimension robust scaling by the median absolute value of a fit set;
// invariant magnitudes span orders of magnitude, so raw chi-square would be
// dominated by one coordinate. log_compress additionally maps each scaled
// entry through sign(x) * log(1 + |x|); off by default, kept as a deviation
// knob.
struct Standardizer {
  std::vector<double> scale;
  bool log_compress = false;

  static Standardizer fit(const LabeledDataset& data,
                          bool log_compress = false);
  std::vector<double> apply(const Descriptor& d) const;
};

struct ClassifyReport {
  double accuracy = 0.0;
  std::vector<std::pair<int, std::pair<int, int>>> per_class;  // label -> (correct, total)

  std::string to_csv() const;  // class,correct,total,accuracy + overall row
  std::string to_json() const;
};

// Chi-square nearest neighbor over descriptors standardized on the train
// split; ties break toward the lowest train index.
ClassifyReport nn_classify(const LabeledDataset& train,
                           const LabeledDataset& test,
                           bool log_compress = false);

// Stratified split: round(train_frac * per-class count), at least one item
// per class, selected by seeded shuffle.
std::pair<LabeledDataset, LabeledDataset> split_dataset(
    const LabeledDataset& data, double train_frac, std::uint64_t seed);

struct PrCurve {
  std::vector<std::pair<double, double>> points;  // (recall, precision)
  bool degenerate = false;  // no relevant item in the database

  std::string to_csv() const;  // recall,precision
};

// Ranks the database by chi-square distance to the query and sweeps every
// cutoff; relevant = items carrying query_label.
PrCurve precision_recall(const Descriptor& query, const LabeledDataset& db,
                         int query_label, bool log_compress = false);

// Smooth synthetic color image: per-channel random low-frequency fields
// rescaled into [channel_lo, channel_hi], shaded by a radial window that
// fades to exact black before the frame edge. Keep the channel range
// moderate when the image will face clamping color transforms.
Raster make_synthetic_source(int size, std::uint64_t seed,
                             double channel_lo = 0.2, double channel_hi = 0.95);

// Applies per_source sampled transforms to every source (recolor first,
// then warp onto a fitted canvas), computes SCAMI24 descriptors with the
// exclude-black mask, and labels items by source index. Color-degenerate
// items are dropped and counted.
LabeledDataset gen_dataset(const std::vector<Raster>& sources,
                           TransformKind kind, int per_source,
                           std::uint64_t seed);

// Descriptor of one raster under the dataset pipeline's conventions.
Descriptor describe_raster(const Raster& r,
                           MaskPolicy mask = MaskPolicy::kFullFrame);

// Invariance harness: reference descriptor of the image against descriptors
// of transformed variants. moment_domain = true applies the transforms to
// the moment table instead of the pixels (the exact path).
MreReport invariance_mre(const Raster& image, TransformKind kind, int count,
                         std::uint64_t seed, bool moment_domain = false);

}  // namespace scami
