#include "scami/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scami/errors.hpp"
#include "scami/json_io.hpp"

namespace scami {

std::string MomentKey::str() const {
  std::string s;
  for (int i = 0; i < 5; ++i) {
    if (i) s += ',';
    s += std::to_string(int(e[i]));
  }
  return s;
}

std::string MomentKey::label() const {
  bool compact = true;
  for (int i = 0; i < 5; ++i) compact = compact && e[i] <= 9;
  if (!compact) return "scU(" + str() + ")";
  std::string s = "scU";
  for (int i = 0; i < 5; ++i) s += char('0' + e[i]);
  return s;
}

MomentKey MomentKey::parse(const std::string& text) {
  MomentKey key;
  std::size_t pos = 0;
  for (int i = 0; i < 5; ++i) {
    std::size_t next = 0;
    int v = 0;
    try {
      v = std::stoi(text.substr(pos), &next);
    } catch (const std::exception&) {
      throw FormatError("bad moment key '" + text + "'");
    }
    if (v < 0 || v > 255) throw FormatError("bad moment key '" + text + "'");
    key.e[i] = std::uint8_t(v);
    pos += next;
    if (i < 4) {
      if (pos >= text.size() || text[pos] != ',')
        throw FormatError("bad moment key '" + text + "'");
      ++pos;
    }
  }
  if (pos != text.size()) throw FormatError("bad moment key '" + text + "'");
  return key;
}

double MomentTable::at(const MomentKey& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    throw ContractError("moment " + key.label() + " not in table");
  return it->second;
}

bool MomentTable::complete(int shape_order, int color_order) const {
  for (int p = 0; p <= shape_order; ++p)
    for (int q = 0; p + q <= shape_order; ++q)
      for (int a = 0; a <= color_order; ++a)
        for (int b = 0; a + b <= color_order; ++b)
          for (int g = 0; a + b + g <= color_order; ++g)
            if (!contains(MomentKey(p, q, a, b, g))) return false;
  return true;
}

std::string MomentTable::to_json() const {
  Json j;
  j["area"] = area;
  j["centroid"] = {centroid_x, centroid_y};
  j["color_means"] = {color_means[0], color_means[1], color_means[2]};
  j["max_shape_order"] = max_shape_order;
  j["max_color_order"] = max_color_order;
  Json records = Json::array();
  for (const auto& [key, value] : entries) {
    records.push_back({{"key", key.str()}, {"value", value}});
  }
  j["entries"] = std::move(records);
  return dump_json(j, 1);
}

MomentTable MomentTable::from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad moment table JSON: ") + e.what());
  }
  MomentTable t;
  t.area = j.at("area").get<double>();
  t.centroid_x = j.at("centroid").at(0).get<double>();
  t.centroid_y = j.at("centroid").at(1).get<double>();
  for (int i = 0; i < 3; ++i)
    t.color_means[i] = j.at("color_means").at(i).get<double>();
  t.max_shape_order = j.at("max_shape_order").get<int>();
  t.max_color_order = j.at("max_color_order").get<int>();
  for (const auto& rec : j.at("entries")) {
    t.entries[MomentKey::parse(rec.at("key").get<std::string>())] =
        rec.at("value").get<double>();
  }
  return t;
}

int moment_key_count(int shape_order, int color_order) {
  int shape = 0;
  for (int o = 0; o <= shape_order; ++o) shape += o + 1;
  int color = 0;
  for (int o = 0; o <= color_order; ++o) color += (o + 1) * (o + 2) / 2;
  return shape * color;
}

namespace {

// Compensated accumulator (Kahan-Neumaier).
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

MomentTable central_moments(const Raster& r, int max_shape_order,
                            int max_color_order, MaskPolicy mask) {
  if (max_shape_order < 0 || max_color_order < 0)
    throw std::domain_error("moment orders must be >= 0");
  if (r.width < 1 || r.height < 1 || r.pixels.empty())
    throw std::domain_error("empty raster");

  const bool use_mask = mask == MaskPolicy::kExcludeBlack;

  // First pass: area, centroid, channel means.
  Accumulator count, sx, sy, sr, sg, sb;
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      if (use_mask && r.is_black(x, y)) continue;
      const auto& px = r.at(x, y);
      count.add(1.0);
      sx.add(x + 0.5);
      sy.add(y + 0.5);
      sr.add(px[0]);
      sg.add(px[1]);
      sb.add(px[2]);
    }
  }
  const double area = count.value();
  if (area <= 0.0)
    throw std::domain_error("no pixels included by the mask policy");

  MomentTable table;
  table.area = area;
  table.centroid_x = sx.value() / area;
  table.centroid_y = sy.value() / area;
  table.color_means = {sr.value() / area, sg.value() / area,
                       sb.value() / area};
  table.max_shape_order = max_shape_order;
  table.max_color_order = max_color_order;

  // Key list in canonical order plus one accumulator each.
  std::vector<MomentKey> keys;
  for (int p = 0; p <= max_shape_order; ++p)
    for (int q = 0; p + q <= max_shape_order; ++q)
      for (int a = 0; a <= max_color_order; ++a)
        for (int b = 0; a + b <= max_color_order; ++b)
          for (int g = 0; a + b + g <= max_color_order; ++g)
            keys.emplace_back(p, q, a, b, g);
  std::vector<Accumulator> acc(keys.size());

  // Second pass: incremental power tables per pixel, one touch per key.
  const int ns = max_shape_order + 1;
  const int nc = max_color_order + 1;
  std::vector<double> px_pow(ns), py_pow(ns), pr_pow(nc), pg_pow(nc),
      pb_pow(nc);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      if (use_mask && r.is_black(x, y)) continue;
      const auto& px = r.at(x, y);
      const double dx = (x + 0.5) - table.centroid_x;
      const double dy = (y + 0.5) - table.centroid_y;
      const double dr = px[0] - table.color_means[0];
      const double dg = px[1] - table.color_means[1];
      const double db = px[2] - table.color_means[2];
      px_pow[0] = py_pow[0] = 1.0;
      for (int i = 1; i < ns; ++i) {
        px_pow[i] = px_pow[i - 1] * dx;
        py_pow[i] = py_pow[i - 1] * dy;
      }
      pr_pow[0] = pg_pow[0] = pb_pow[0] = 1.0;
      for (int i = 1; i < nc; ++i) {
        pr_pow[i] = pr_pow[i - 1] * dr;
        pg_pow[i] = pg_pow[i - 1] * dg;
        pb_pow[i] = pb_pow[i - 1] * db;
      }
      for (std::size_t k = 0; k < keys.size(); ++k) {
        const auto& e = keys[k].e;
        acc[k].add(px_pow[e[0]] * py_pow[e[1]] * pr_pow[e[2]] * pg_pow[e[3]] *
                   pb_pow[e[4]]);
      }
    }
  }
  for (std::size_t k = 0; k < keys.size(); ++k)
    table.entries[keys[k]] = acc[k].value();
  return table;
}

}  // namespace scami
