// Command-line front end: expand cores symbolically, describe images,
// reproduce the invariance / independence / classification experiments.
// stdout carries machine-readable results only; diagnostics go to stderr.
// Exit codes: 0 success, 1 analysis-negative, 2 usage or input error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "scami/errors.hpp"
#include "scami/eval.hpp"
#include "scami/invariant.hpp"
#include "scami/json_io.hpp"
#include "scami/moments.hpp"
#include "scami/polynomial.hpp"
#include "scami/raster.hpp"
#include "scami/reference.hpp"
#include "scami/rng.hpp"
#include "scami/transforms.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Paths are validated up front so a bad --out cannot waste a long run.
void ensure_writable(const std::string& out_path) {
  if (out_path.empty()) return;
  std::ofstream probe(out_path, std::ios::binary | std::ios::app);
  if (!probe) throw scami::IoError("cannot write '" + out_path + "'");
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw scami::IoError("cannot write '" + out_path + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw scami::IoError("cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

scami::Json meta_block(const std::string& command, const scami::Json& config) {
  scami::Json meta;
  meta["tool"] = "scami";
  meta["version"] = kVersion;
  meta["command"] = command;
  meta["config"] = config;
  return meta;
}

std::string csv_meta_line(const std::string& command, const std::string& echo) {
  return "# scami " + std::string(kVersion) + " " + command +
         (echo.empty() ? "" : " " + echo) + "\n";
}

std::vector<scami::Raster> collect_sources(const std::vector<std::string>& paths,
                                           int synthetic, int size,
                                           std::uint64_t seed) {
  std::vector<scami::Raster> sources;
  for (const auto& path : paths) sources.push_back(scami::load_raster(path));
  for (int i = 0; i < synthetic; ++i)
    sources.push_back(scami::make_synthetic_source(
        size, scami::mix_seed(seed, 0x5000 + std::uint64_t(i))));
  if (sources.empty())
    throw scami::FormatError("no sources: pass image paths or --synthetic N");
  return sources;
}

int cmd_expand(const std::string& spec, int oracle_size, std::uint64_t seed,
               const std::string& out_path) {
  scami::CoreGraph core;
  try {
    core = scami::parse_core_spec(spec);
  } catch (const scami::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n  " << spec << "\n  "
              << std::string(std::min(e.position, spec.size()), ' ') << "^\n";
    return 2;
  }
  if (core.shape_weight() + core.color_weight() > 16) {
    std::cerr << "error: core has " << core.shape_weight() + core.color_weight()
              << " primitives; expansion above 16 is refused (term count "
                 "grows exponentially)\n";
    return 2;
  }
  const auto kernel = scami::build_kernel(core);
  const auto poly = scami::integrate(kernel, core.num_points);
  scami::Json j;
  j["meta"] = meta_block("expand", {{"spec", spec},
                                    {"seed", seed},
                                    {"check_oracle", oracle_size}});
  j["num_points"] = core.num_points;
  j["terms"] = scami::Json::parse(poly.to_json());
  write_output(scami::dump_json(j, 1), out_path);

  if (oracle_size > 0) {
    scami::Rng rng(seed);
    scami::Raster r(oracle_size, oracle_size);
    for (auto& px : r.pixels)
      px = {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95),
            rng.uniform(0.05, 0.95)};
    const auto degrees = core.shape_degrees();
    const auto mults = core.color_multiplicities();
    const int shape_order =
        degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
    const int color_order =
        mults.empty() ? 0 : *std::max_element(mults.begin(), mults.end());
    double abs_scale = 0.0;
    const double direct =
        scami::reference_kernel_sum(kernel, core.num_points, r, &abs_scale);
    const double via_moments =
        poly.eval(scami::central_moments(r, shape_order, color_order));
    // Cancelling kernels sum to ~0 on both routes; judge the difference
    // against the tuple magnitude, not the vanishing totals.
    const double scale = std::max(
        {std::abs(direct), std::abs(via_moments), 1e-3 * abs_scale, 1e-300});
    const double rel = std::abs(direct - via_moments) / scale;
    std::cerr << "oracle: tuple-sum " << scami::format_double(direct)
              << " vs moments " << scami::format_double(via_moments) << " rel "
              << scami::format_double(rel) << "\n";
    if (!(rel < 1e-9)) {
      std::cerr << "oracle mismatch\n";
      return 1;
    }
  }
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"shape-color affine moment invariants toolkit"};
  app.require_subcommand(1);

  std::string expand_spec;
  int oracle_size = 0;
  std::uint64_t expand_seed = 1;
  std::string expand_out;
  auto* expand = app.add_subcommand(
      "expand", "expand a core spec into a canonical moment polynomial");
  expand
      ->add_option("spec", expand_spec,
                   "core DSL, e.g. \"shape: (1,2)^2; color: V(1,2,3)^2\"")
      ->required();
  expand->add_option("--check-oracle", oracle_size,
                     "verify against the tuple-sum oracle on a random raster "
                     "of this size (keep small: cost is (size^2)^points)");
  expand->add_option("--seed", expand_seed, "oracle raster seed");
  expand->add_option("--out", expand_out, "write JSON here instead of stdout");

  std::string describe_image;
  std::vector<int> describe_orders{4, 2};
  bool describe_mask = false;
  std::string describe_out, moments_out;
  auto* describe = app.add_subcommand(
      "describe", "compute the SCAMI24 descriptor of an image");
  describe->add_option("image", describe_image, "PNG or PPM path")->required();
  describe
      ->add_option("--orders", describe_orders,
                   "max shape and color moment orders (default 4 2)")
      ->expected(2);
  describe->add_flag("--mask-black", describe_mask,
                     "exclude exact-black pixels from the moments");
  describe->add_option("--out", describe_out, "write JSON here instead of stdout");
  describe->add_option("--moments-out", moments_out,
                       "also write the central moment table JSON");

  std::string catalog_out;
  auto* catalog =
      app.add_subcommand("catalog", "export the 24-entry invariant catalog");
  catalog->add_option("--out", catalog_out, "write JSON here instead of stdout");

  std::string inv_image, inv_kind = "composite", inv_out, inv_format = "csv";
  int inv_synthetic = 0, inv_count = 12;
  std::uint64_t inv_seed = 1;
  bool inv_moment_domain = false;
  auto* invariance = app.add_subcommand(
      "invariance", "mean relative error of SCAMI24 under sampled transforms");
  invariance->add_option("--image", inv_image, "reference image path");
  invariance->add_option("--synthetic", inv_synthetic,
                         "use a synthetic reference image of this size");
  invariance->add_option("--kind", inv_kind, "transform kind");
  invariance->add_option("--count", inv_count, "number of sampled transforms");
  invariance->add_option("--seed", inv_seed, "sampler seed");
  invariance->add_flag("--moment-domain", inv_moment_domain,
                       "apply transforms to the moment table (exact path)");
  invariance->add_option("--out", inv_out, "output path");
  invariance->add_option("--format", inv_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  int ind_max_points = 4, ind_max_degree = 4;
  bool ind_disconnected = false;
  std::string ind_policy = "expose", ind_out;
  std::uint64_t ind_seed = 1;
  auto* independence = app.add_subcommand(
      "independence", "zero / linear / rank analysis of the enumerated cores");
  independence->add_option("--max-points", ind_max_points, "point bound");
  independence->add_option("--max-degree", ind_max_degree,
                           "per-point degree bound");
  independence->add_flag("--allow-disconnected", ind_disconnected,
                         "include disconnected shape cores");
  independence
      ->add_option("--label-policy", ind_policy,
                   "color attachment labeling: expose, protect, canonical")
      ->check(CLI::IsMember({"expose", "protect", "canonical"}));
  independence->add_option("--seed", ind_seed, "Jacobian sample seed");
  independence->add_option("--out", ind_out, "output path");

  std::vector<std::string> gen_paths;
  int gen_synthetic = 0, gen_size = 96, gen_per_source = 20;
  std::string gen_kind = "composite", gen_out;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen-dataset",
                                 "generate a labeled transformed dataset");
  gen->add_option("sources", gen_paths, "source image paths");
  gen->add_option("--synthetic", gen_synthetic, "add N synthetic sources");
  gen->add_option("--size", gen_size, "synthetic source size");
  gen->add_option("--kind", gen_kind, "transform kind");
  gen->add_option("--per-source", gen_per_source, "variants per source");
  gen->add_option("--seed", gen_seed, "sampler seed");
  gen->add_option("--out", gen_out, "output path");

  std::string cls_dataset, cls_out, cls_format = "csv", cls_kind = "composite";
  std::vector<std::string> cls_paths;
  int cls_synthetic = 0, cls_size = 96, cls_per_source = 20, cls_splits = 1;
  double cls_train_frac = 0.1;
  std::uint64_t cls_seed = 1;
  auto* classify = app.add_subcommand(
      "classify", "chi-square nearest-neighbor classification experiment");
  classify->add_option("--dataset", cls_dataset,
                       "dataset JSON (from gen-dataset)");
  classify->add_option("sources", cls_paths, "source image paths");
  classify->add_option("--synthetic", cls_synthetic, "add N synthetic sources");
  classify->add_option("--size", cls_size, "synthetic source size");
  classify->add_option("--kind", cls_kind, "transform kind");
  classify->add_option("--per-source", cls_per_source, "variants per source");
  classify->add_option("--train-frac", cls_train_frac, "training fraction");
  bool cls_log_compress = false;
  classify->add_flag("--log-compress", cls_log_compress,
                     "signed log compression after standardization");
  classify->add_option("--splits", cls_splits,
                       "number of split seeds to average");
  classify->add_option("--seed", cls_seed, "base seed");
  classify->add_option("--out", cls_out, "output path");
  classify->add_option("--format", cls_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string ret_dataset, ret_out;
  int ret_query = 0;
  auto* retrieve = app.add_subcommand(
      "retrieve", "precision-recall curve for one query against a dataset");
  retrieve->add_option("--dataset", ret_dataset, "dataset JSON")->required();
  retrieve->add_option("--query", ret_query, "query item index")->required();
  bool ret_log_compress = false;
  retrieve->add_flag("--log-compress", ret_log_compress,
                     "signed log compression after standardization");
  retrieve->add_option("--out", ret_out, "output path");

  CLI11_PARSE(app, argc, argv);

  for (const std::string& path :
       {expand_out, describe_out, moments_out, catalog_out, inv_out, ind_out,
        gen_out, cls_out, ret_out})
    ensure_writable(path);

  if (expand->parsed())
    return cmd_expand(expand_spec, oracle_size, expand_seed, expand_out);

  if (describe->parsed()) {
    if (describe_orders[0] < 4 || describe_orders[1] < 2)
      throw scami::FormatError("SCAMI24 needs orders of at least 4 2");
    const scami::Raster raster = scami::load_raster(describe_image);
    const auto table = scami::central_moments(
        raster, describe_orders[0], describe_orders[1],
        describe_mask ? scami::MaskPolicy::kExcludeBlack
                      : scami::MaskPolicy::kFullFrame);
    const auto desc = scami::evaluate_all(scami::scami24_catalog(), table);
    if (std::none_of(desc.valid.begin(), desc.valid.end(),
                     [](bool v) { return v; }))
      std::cerr
          << "warning: color-degenerate image; descriptor flags are false\n";
    scami::Json j;
    j["meta"] = meta_block("describe", {{"image", describe_image},
                                        {"orders", describe_orders},
                                        {"mask_black", describe_mask}});
    j["values"] = desc.values;
    scami::Json valid = scami::Json::array();
    for (bool v : desc.valid) valid.push_back(v);
    j["valid"] = std::move(valid);
    write_output(scami::dump_json(j, 1), describe_out);
    if (!moments_out.empty()) write_output(table.to_json(), moments_out);
    return 0;
  }

  if (catalog->parsed()) {
    write_output(scami::catalog_to_json(), catalog_out);
    return 0;
  }

  if (invariance->parsed()) {
    scami::Raster image;
    std::string image_desc;
    if (!inv_image.empty()) {
      image = scami::load_raster(inv_image);
      image_desc = inv_image;
    } else if (inv_synthetic > 0) {
      image = scami::make_synthetic_source(
          inv_synthetic, scami::mix_seed(inv_seed, 0x1111), 0.2, 0.7);
      image_desc = "synthetic:" + std::to_string(inv_synthetic);
    } else {
      throw scami::FormatError("pass --image PATH or --synthetic SIZE");
    }
    const auto report = scami::invariance_mre(
        image, scami::parse_kind(inv_kind), inv_count, inv_seed,
        inv_moment_domain);
    if (inv_format == "json") {
      scami::Json j;
      j["meta"] =
          meta_block("invariance", {{"image", image_desc},
                                    {"kind", inv_kind},
                                    {"count", inv_count},
                                    {"seed", inv_seed},
                                    {"moment_domain", inv_moment_domain}});
      j["report"] = scami::Json::parse(report.to_json());
      write_output(scami::dump_json(j, 1), inv_out);
    } else {
      write_output(
          csv_meta_line("invariance",
                        "image=" + image_desc + " kind=" + inv_kind +
                            " count=" + std::to_string(inv_count) + " seed=" +
                            std::to_string(inv_seed) + " moment_domain=" +
                            (inv_moment_domain ? "1" : "0") + " median=" +
                            scami::format_double(report.median())) +
              report.to_csv(),
          inv_out);
    }
    return 0;
  }

  if (independence->parsed()) {
    scami::IndependenceOptions opts;
    opts.max_points = ind_max_points;
    opts.max_degree = ind_max_degree;
    opts.require_connected = !ind_disconnected;
    opts.seed = ind_seed;
    opts.label_policy = ind_policy == "protect"
                            ? scami::LabelPolicy::kProtectLowDegree
                        : ind_policy == "canonical"
                            ? scami::LabelPolicy::kCanonical
                            : scami::LabelPolicy::kExposeLowDegree;
    const auto report = scami::independence_pipeline(opts);
    scami::Json j;
    j["meta"] = meta_block("independence",
                           {{"max_points", ind_max_points},
                            {"max_degree", ind_max_degree},
                            {"require_connected", !ind_disconnected},
                            {"label_policy", ind_policy},
                            {"seed", ind_seed}});
    j["report"] = scami::Json::parse(report.to_json());
    write_output(scami::dump_json(j, 1), ind_out);
    return 0;
  }

  if (gen->parsed()) {
    const auto sources =
        collect_sources(gen_paths, gen_synthetic, gen_size, gen_seed);
    const auto data = scami::gen_dataset(sources, scami::parse_kind(gen_kind),
                                         gen_per_source, gen_seed);
    write_output(data.to_json(), gen_out);
    return 0;
  }

  if (classify->parsed()) {
    scami::LabeledDataset data;
    if (!cls_dataset.empty()) {
      data = scami::LabeledDataset::from_json(read_file(cls_dataset));
    } else {
      const auto sources =
          collect_sources(cls_paths, cls_synthetic, cls_size, cls_seed);
      data = scami::gen_dataset(sources, scami::parse_kind(cls_kind),
                                cls_per_source, cls_seed);
    }
    std::vector<scami::ClassifyReport> reports;
    double mean_acc = 0.0;
    for (int split = 0; split < cls_splits; ++split) {
      const auto [train, test] = scami::split_dataset(
          data, cls_train_frac,
          scami::mix_seed(cls_seed, 0x200 + std::uint64_t(split)));
      reports.push_back(scami::nn_classify(train, test, cls_log_compress));
      mean_acc += reports.back().accuracy / cls_splits;
    }
    if (cls_format == "json") {
      scami::Json j;
      j["meta"] = meta_block("classify", {{"dataset", cls_dataset},
                                          {"train_frac", cls_train_frac},
                                          {"splits", cls_splits},
                                          {"seed", cls_seed}});
      scami::Json per = scami::Json::array();
      for (const auto& r : reports)
        per.push_back(scami::Json::parse(r.to_json()));
      j["splits"] = std::move(per);
      j["mean_accuracy"] = mean_acc;
      write_output(scami::dump_json(j, 1), cls_out);
    } else {
      std::string csv = csv_meta_line(
          "classify",
          "train_frac=" + scami::format_double(cls_train_frac) +
              " splits=" + std::to_string(cls_splits) + " seed=" +
              std::to_string(cls_seed) + " mean_accuracy=" +
              scami::format_double(mean_acc));
      for (const auto& r : reports) csv += r.to_csv();
      write_output(csv, cls_out);
    }
    return 0;
  }

  if (retrieve->parsed()) {
    const auto data = scami::LabeledDataset::from_json(read_file(ret_dataset));
    if (ret_query < 0 || std::size_t(ret_query) >= data.items.size())
      throw scami::FormatError("query index out of range");
    const auto& item = data.items[std::size_t(ret_query)];
    const auto curve = scami::precision_recall(item.descriptor, data,
                                               item.label, ret_log_compress);
    if (curve.degenerate)
      std::cerr << "warning: no relevant items for the query label\n";
    write_output(
        csv_meta_line("retrieve", "dataset=" + ret_dataset + " query=" +
                                      std::to_string(ret_query)) +
            curve.to_csv(),
        ret_out);
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const scami::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
