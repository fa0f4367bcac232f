#include "scami/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "scami/errors.hpp"
#include "scami/json_io.hpp"
#include "scami/rng.hpp"

namespace scami {

namespace {

constexpr double kRelEps = 1e-12;

Json affine_to_json(const ShapeAffine& s, const ColorAffine& c) {
  Json j;
  j["shape"] = {{"m", {s.m[0], s.m[1], s.m[2], s.m[3]}},
                {"t", {s.t[0], s.t[1]}}};
  j["color"] = {{"m", {c.m[0], c.m[1], c.m[2], c.m[3], c.m[4], c.m[5], c.m[6],
                       c.m[7], c.m[8]}},
                {"o", {c.o[0], c.o[1], c.o[2]}}};
  return j;
}

void affine_from_json(const Json& j, ShapeAffine& s, ColorAffine& c) {
  for (int i = 0; i < 4; ++i) s.m[std::size_t(i)] = j.at("shape").at("m").at(i);
  for (int i = 0; i < 2; ++i) s.t[std::size_t(i)] = j.at("shape").at("t").at(i);
  for (int i = 0; i < 9; ++i) c.m[std::size_t(i)] = j.at("color").at("m").at(i);
  for (int i = 0; i < 3; ++i) c.o[std::size_t(i)] = j.at("color").at("o").at(i);
}

}  // namespace

std::string LabeledDataset::to_json() const {
  Json j;
  j["format"] = "scami-dataset-v1";
  j["kind"] = kind_name(kind);
  j["seed"] = seed;
  j["per_source"] = per_source;
  j["excluded"] = excluded;
  Json arr = Json::array();
  for (const auto& item : items) {
    Json rec;
    rec["label"] = item.label;
    rec["source_id"] = item.source_id;
    rec["descriptor"] = item.descriptor.values;
    Json valid = Json::array();
    for (bool v : item.descriptor.valid) valid.push_back(v);
    rec["valid"] = std::move(valid);
    rec["transform"] = affine_to_json(item.shape, item.color);
    arr.push_back(std::move(rec));
  }
  j["items"] = std::move(arr);
  return dump_json(j, 1);
}

LabeledDataset LabeledDataset::from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad dataset JSON: ") + e.what());
  }
  if (j.contains("format") && j.at("format") != "scami-dataset-v1")
    throw FormatError("unsupported dataset format");
  LabeledDataset d;
  d.kind = parse_kind(j.at("kind").get<std::string>());
  d.seed = j.at("seed").get<std::uint64_t>();
  d.per_source = j.at("per_source").get<int>();
  d.excluded = j.at("excluded").get<int>();
  for (const auto& rec : j.at("items")) {
    DatasetItem item;
    item.label = rec.at("label").get<int>();
    item.source_id = rec.at("source_id").get<int>();
    item.descriptor.values = rec.at("descriptor").get<std::vector<double>>();
    for (const auto& v : rec.at("valid"))
      item.descriptor.valid.push_back(v.get<bool>());
    affine_from_json(rec.at("transform"), item.shape, item.color);
    d.items.push_back(std::move(item));
  }
  return d;
}

double MreReport::median() const {
  std::vector<double> vals;
  for (double v : mre)
    if (std::isfinite(v)) vals.push_back(v);
  if (vals.empty()) return std::nan("");
  std::sort(vals.begin(), vals.end());
  const std::size_t n = vals.size();
  return n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

std::string MreReport::to_csv() const {
  std::string out = "index,mre,excluded\n";
  for (std::size_t i = 0; i < mre.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_double(mre[i]) + "," +
           std::to_string(excluded[i]) + "\n";
  }
  return out;
}

std::string MreReport::to_json() const {
  Json j;
  j["variant_count"] = variant_count;
  j["mre"] = mre;
  j["excluded"] = excluded;
  j["median"] = median();
  return dump_json(j, 1);
}

MreReport mre(const Descriptor& reference,
              const std::vector<Descriptor>& variants) {
  if (variants.empty()) throw std::domain_error("no variants to compare");
  const std::size_t n = reference.size();
  MreReport report;
  report.variant_count = int(variants.size());
  report.mre.assign(n, 0.0);
  report.excluded.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    int used = 0;
    for (const auto& v : variants) {
      if (v.size() != n) throw ContractError("descriptor length mismatch");
      if (!reference.valid[k] || !v.valid[k]) {
        ++report.excluded[std::size_t(k)];
        continue;
      }
      sum += std::abs(v.values[k] - reference.values[k]) /
             (std::abs(reference.values[k]) + kRelEps);
      ++used;
    }
    report.mre[k] = used > 0 ? sum / used : std::nan("");
  }
  return report;
}

double chi_square(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ContractError("descriptor length mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff / (std::abs(a[k]) + std::abs(b[k]) + kRelEps);
  }
  return sum;
}

Standardizer Standardizer::fit(const LabeledDataset& data, bool log_compress) {
  if (data.items.empty()) throw std::domain_error("empty dataset");
  const std::size_t n = data.items.front().descriptor.size();
  Standardizer s;
  s.log_compress = log_compress;
  s.scale.assign(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> mags;
    for (const auto& item : data.items) {
      if (item.descriptor.valid[k]) mags.push_back(std::abs(item.descriptor.values[k]));
    }
    if (mags.empty()) continue;
    std::sort(mags.begin(), mags.end());
    const std::size_t m = mags.size();
    const double med = m % 2 ? mags[m / 2] : 0.5 * (mags[m / 2 - 1] + mags[m / 2]);
    s.scale[k] = med + kRelEps;
  }
  return s;
}

std::vector<double> Standardizer::apply(const Descriptor& d) const {
  if (d.size() != scale.size()) throw ContractError("descriptor length mismatch");
  std::vector<double> out(d.values);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] /= scale[k];
    if (log_compress)
      out[k] = std::copysign(std::log1p(std::abs(out[k])), out[k]);
  }
  return out;
}

std::string ClassifyReport::to_csv() const {
  std::string out = "class,correct,total,accuracy\n";
  int correct = 0, total = 0;
  for (const auto& [label, counts] : per_class) {
    out += std::to_string(label) + "," + std::to_string(counts.first) + "," +
           std::to_string(counts.second) + "," +
           format_double(counts.second ? double(counts.first) / counts.second
                                       : 0.0) +
           "\n";
    correct += counts.first;
    total += counts.second;
  }
  out += "overall," + std::to_string(correct) + "," + std::to_string(total) +
         "," + format_double(accuracy) + "\n";
  return out;
}

std::string ClassifyReport::to_json() const {
  Json j;
  j["accuracy"] = accuracy;
  Json per = Json::array();
  for (const auto& [label, counts] : per_class)
    per.push_back({{"class", label},
                   {"correct", counts.first},
                   {"total", counts.second}});
  j["per_class"] = std::move(per);
  return dump_json(j, 1);
}

ClassifyReport nn_classify(const LabeledDataset& train,
                           const LabeledDataset& test, bool log_compress) {
  if (train.items.empty()) throw std::domain_error("empty training set");
  const Standardizer standardizer = Standardizer::fit(train, log_compress);

  std::vector<std::vector<double>> train_vecs;
  train_vecs.reserve(train.items.size());
  for (const auto& item : train.items)
    train_vecs.push_back(standardizer.apply(item.descriptor));

  std::map<int, std::pair<int, int>> per_class;
  int correct = 0;
  for (const auto& item : test.items) {
    const auto vec = standardizer.apply(item.descriptor);
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < train_vecs.size(); ++i) {
      const double d = chi_square(vec, train_vecs[i]);
      if (d < best_distance) {  // ties keep the lowest train index
        best_distance = d;
        best = i;
      }
    }
    const int predicted = train.items[best].label;
    auto& counts = per_class[item.label];
    ++counts.second;
    if (predicted == item.label) {
      ++counts.first;
      ++correct;
    }
  }
  ClassifyReport report;
  report.accuracy = test.items.empty() ? 0.0 : double(correct) / double(test.items.size());
  report.per_class.assign(per_class.begin(), per_class.end());
  return report;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(
    const LabeledDataset& data, double train_frac, std::uint64_t seed) {
  if (train_frac <= 0.0 || train_frac >= 1.0)
    throw std::domain_error("train fraction must be in (0,1)");
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < data.items.size(); ++i)
    by_label[data.items[i].label].push_back(i);

  Rng rng(seed);
  std::vector<bool> in_train(data.items.size(), false);
  for (auto& [label, indices] : by_label) {
    for (std::size_t i = indices.size(); i > 1; --i)
      std::swap(indices[i - 1],
                indices[std::size_t(rng.gen() % std::uint64_t(i))]);
    const std::size_t take = std::max<std::size_t>(
        1, std::size_t(std::llround(train_frac * double(indices.size()))));
    for (std::size_t i = 0; i < take && i < indices.size(); ++i)
      in_train[indices[i]] = true;
  }
  LabeledDataset train = data, test = data;
  train.items.clear();
  test.items.clear();
  for (std::size_t i = 0; i < data.items.size(); ++i)
    (in_train[i] ? train : test).items.push_back(data.items[i]);
  return {std::move(train), std::move(test)};
}

std::string PrCurve::to_csv() const {
  std::string out = "recall,precision\n";
  for (const auto& [recall, precision] : points)
    out += format_double(recall) + "," + format_double(precision) + "\n";
  return out;
}

PrCurve precision_recall(const Descriptor& query, const LabeledDataset& db,
                         int query_label, bool log_compress) {
  if (db.items.empty()) throw std::domain_error("empty database");
  PrCurve curve;
  std::size_t relevant_total = 0;
  for (const auto& item : db.items)
    if (item.label == query_label) ++relevant_total;
  if (relevant_total == 0) {
    curve.degenerate = true;
    return curve;
  }
  const Standardizer standardizer = Standardizer::fit(db, log_compress);
  const auto qv = standardizer.apply(query);
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(db.items.size());
  for (std::size_t i = 0; i < db.items.size(); ++i)
    ranked.emplace_back(chi_square(qv, standardizer.apply(db.items[i].descriptor)), i);
  std::sort(ranked.begin(), ranked.end());

  std::size_t relevant_seen = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (db.items[ranked[k].second].label == query_label) ++relevant_seen;
    curve.points.emplace_back(double(relevant_seen) / double(relevant_total),
                              double(relevant_seen) / double(k + 1));
  }
  return curve;
}

Raster make_synthetic_source(int size, std::uint64_t seed, double channel_lo,
                             double channel_hi) {
  Rng rng(seed);
  Raster r(size, size);
  for (int channel = 0; channel < 3; ++channel) {
    struct Wave {
      double wx, wy, phase, amp;
    };
    std::array<Wave, 4> waves;
    for (auto& w : waves) {
      w.wx = rng.uniform(0.4, 2.2);
      w.wy = rng.uniform(0.4, 2.2);
      w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      w.amp = rng.uniform(0.5, 1.0);
    }
    double lo = 0.0, hi = 0.0;
    std::vector<double> field(std::size_t(size) * std::size_t(size));
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const double u = (x + 0.5) / size, v = (y + 0.5) / size;
        double f = 0.0;
        for (const auto& w : waves)
          f += w.amp * std::sin(2.0 * std::numbers::pi * (w.wx * u + w.wy * v) +
                                w.phase);
        field[std::size_t(y) * std::size_t(size) + std::size_t(x)] = f;
        if (y == 0 && x == 0) lo = hi = f;
        lo = std::min(lo, f);
        hi = std::max(hi, f);
      }
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        r.at(x, y)[std::size_t(channel)] =
            channel_lo +
            (channel_hi - channel_lo) *
                (field[std::size_t(y) * std::size_t(size) + std::size_t(x)] - lo) /
                span;
  }
  // Radial window fading to exact black before the frame edge: the object
  // boundary then carries near-zero values, so warp resampling against the
  // black fill stays benign and the mask recovers the support cleanly.
  const double half = size / 2.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = (x + 0.5 - half) / half, dy = (y + 0.5 - half) / half;
      const double rad = std::sqrt(dx * dx + dy * dy);
      double w = 0.0;
      if (rad <= 0.86)
        w = 1.0;
      else if (rad < 0.98)
        w = 0.5 * (1.0 + std::cos(std::numbers::pi * (rad - 0.86) / 0.12));
      for (int c = 0; c < 3; ++c) r.at(x, y)[std::size_t(c)] *= w;
    }
  }
  return r;
}

Descriptor describe_raster(const Raster& r, MaskPolicy mask) {
  return evaluate_all(scami24_catalog(), central_moments(r, 4, 2, mask));
}

namespace {

Raster apply_pixel_transform(const Raster& source, const ShapeAffine& s,
                             const ColorAffine& c) {
  // Recolor before warping so the fill stays exact black for the mask, and
  // keep the support fixed: offsets would otherwise recolor the black
  // background into the masked domain.
  Raster colored = c.is_identity() ? source : recolor(source, c);
  if (!c.is_identity()) {
    for (std::size_t i = 0; i < source.pixels.size(); ++i) {
      const auto& px = source.pixels[i];
      if (px[0] == 0.0 && px[1] == 0.0 && px[2] == 0.0)
        colored.pixels[i] = {0.0, 0.0, 0.0};
    }
  }
  if (s.is_identity()) return colored;
  const CanvasFit fit = fit_to_canvas(colored, s);
  return warp(colored, fit.transform, fit.width, fit.height);
}

}  // namespace

LabeledDataset gen_dataset(const std::vector<Raster>& sources,
                           TransformKind kind, int per_source,
                           std::uint64_t seed) {
  if (per_source < 1) throw std::domain_error("per_source must be >= 1");
  LabeledDataset data;
  data.kind = kind;
  data.seed = seed;
  data.per_source = per_source;
  for (std::size_t src = 0; src < sources.size(); ++src) {
    const auto transforms =
        sample_transforms(kind, per_source, mix_seed(seed, src));
    for (const auto& [s, c] : transforms) {
      const Raster transformed = apply_pixel_transform(sources[src], s, c);
      const Descriptor desc = describe_raster(transformed, MaskPolicy::kExcludeBlack);
      const bool valid =
          std::all_of(desc.valid.begin(), desc.valid.end(), [](bool v) { return v; });
      if (!valid) {
        ++data.excluded;
        std::cerr << "warning: color-degenerate item excluded (source "
                  << src << ")\n";
        continue;
      }
      DatasetItem item;
      item.descriptor = desc;
      item.label = int(src);
      item.source_id = int(src);
      item.shape = s;
      item.color = c;
      data.items.push_back(std::move(item));
    }
  }
  return data;
}

MreReport invariance_mre(const Raster& image, TransformKind kind, int count,
                         std::uint64_t seed, bool moment_domain) {
  const MomentTable table = central_moments(image, 4, 2, MaskPolicy::kExcludeBlack);
  const Descriptor reference = evaluate_all(scami24_catalog(), table);
  const auto transforms = sample_transforms(kind, count, seed);
  std::vector<Descriptor> variants;
  variants.reserve(transforms.size());
  for (const auto& [s, c] : transforms) {
    if (moment_domain) {
      variants.push_back(
          evaluate_all(scami24_catalog(), transform_moments(table, s, c)));
    } else {
      const Raster transformed = apply_pixel_transform(image, s, c);
      variants.push_back(
          describe_raster(transformed, MaskPolicy::kExcludeBlack));
    }
  }
  return mre(reference, variants);
}

}  // namespace scami
