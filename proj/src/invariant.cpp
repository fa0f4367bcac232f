#include "scami/invariant.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "scami/errors.hpp"
#include "scami/json_io.hpp"
#include "scami/rng.hpp"

namespace scami {

bool InvariantDef::scaling_balanced() const {
  const Rational shape_power = area_exponent + 3 * colornorm_exponent;
  const Rational color_power = 2 * colornorm_exponent;
  return shape_power == shape_det_power() && color_power == color_det_power();
}

const MomentPolynomial& colornorm_polynomial() {
  static const MomentPolynomial poly =
      integrate(build_kernel(CoreGraph::color_v123(2)), 3);
  return poly;
}

InvariantDef build_invariant(const CoreGraph& shape_core,
                             const CoreGraph& color_core) {
  shape_core.validate();
  color_core.validate();

  const int n1 = shape_core.num_points;
  const int n2 = color_core.num_points;
  const int n = std::max(n1, n2);

  CoreGraph combined;
  combined.num_points = n;
  combined.shape_edges = shape_core.shape_edges;
  combined.color_triples = color_core.color_triples;
  combined.normalize();
  combined.validate();

  InvariantDef def;
  def.shape_core = shape_core;
  def.color_core = color_core;
  def.num_points = n;
  def.shape_weight = combined.shape_weight();
  def.color_weight = combined.color_weight();
  def.area_exponent =
      Rational(n + def.shape_weight) - Rational(3 * def.color_weight, 2);
  def.colornorm_exponent = Rational(def.color_weight, 2);
  def.numerator = integrate(build_kernel(combined), n);
  return def;
}

std::string InvariantDef::to_json() const {
  Json j;
  j["shape_core"] = shape_core.dsl();
  j["color_core"] = color_core.dsl();
  j["num_points"] = num_points;
  j["shape_weight"] = shape_weight;
  j["color_weight"] = color_weight;
  j["area_exponent"] = fraction_string(area_exponent);
  j["colornorm_exponent"] = fraction_string(colornorm_exponent);
  j["numerator"] = Json::parse(numerator.to_json());
  return dump_json(j, 1);
}

const std::vector<InvariantDef>& scami24_catalog() {
  static const std::vector<InvariantDef> catalog = [] {
    struct Row {
      int color_power;
      int num_points;
      std::vector<std::array<int, 3>> edges;  // (i, j, multiplicity)
    };
    // Table order; rows 1-11 carry V(1,2,3)^2, rows 12-24 carry V(1,2,3).
    const std::vector<Row> rows = {
        {2, 2, {{1, 2, 2}}},
        {2, 2, {{1, 2, 4}}},
        {2, 3, {{1, 2, 1}, {1, 3, 1}}},
        {2, 3, {{1, 2, 1}, {1, 3, 3}}},
        {2, 3, {{1, 2, 2}, {1, 3, 2}}},
        {2, 3, {{1, 2, 2}, {1, 3, 2}, {2, 3, 2}}},
        {2, 4, {{1, 2, 2}, {2, 3, 2}, {3, 4, 2}}},
        {2, 4, {{1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {1, 4, 1}}},
        {2, 4, {{1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {1, 4, 3}}},
        {2, 4, {{1, 2, 1}, {2, 3, 3}, {3, 4, 1}, {1, 4, 3}}},
        {2, 4, {{1, 2, 2}, {2, 3, 2}, {3, 4, 2}, {1, 4, 2}}},
        {1, 3, {{1, 2, 1}, {1, 3, 2}}},
        {1, 3, {{1, 2, 1}, {1, 3, 1}, {2, 3, 1}}},
        {1, 3, {{1, 2, 1}, {1, 3, 1}, {2, 3, 3}}},
        {1, 3, {{1, 2, 2}, {1, 3, 2}, {2, 3, 1}}},
        {1, 4, {{1, 2, 2}, {2, 3, 1}, {3, 4, 2}}},
        {1, 4, {{1, 2, 1}, {2, 3, 2}, {3, 4, 2}}},
        {1, 4, {{1, 2, 1}, {2, 3, 2}, {3, 4, 1}, {1, 4, 3}}},
        {1, 4, {{1, 2, 1}, {2, 3, 2}, {3, 4, 2}, {1, 4, 2}}},
        {1, 4, {{1, 2, 1}, {1, 3, 1}, {1, 4, 2}, {2, 3, 1}}},
        {1, 4, {{1, 2, 1}, {1, 3, 1}, {1, 4, 2}, {2, 3, 3}}},
        {1, 4, {{1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {1, 4, 1}, {1, 3, 1}}},
        {1, 4, {{1, 2, 2}, {2, 3, 2}, {3, 4, 1}, {1, 4, 1}, {1, 3, 1}}},
        {1, 4,
         {{1, 2, 1}, {2, 3, 1}, {3, 4, 2}, {1, 4, 1}, {1, 3, 1}, {2, 4, 1}}},
    };
    std::vector<InvariantDef> defs;
    defs.reserve(rows.size());
    for (const auto& row : rows) {
      CoreGraph shape;
      shape.num_points = row.num_points;
      for (const auto& [i, j, mult] : row.edges) shape.add_edge(i, j, mult);
      defs.push_back(build_invariant(shape, CoreGraph::color_v123(row.color_power)));
    }
    return defs;
  }();
  return catalog;
}

double evaluate(const InvariantDef& def, const MomentTable& table,
                const EvalOptions& options) {
  const double area = table.at(MomentKey(0, 0, 0, 0, 0));
  if (!(area > 0.0)) throw ContractError("moment table has non-positive area");

  double colornorm_part = 1.0;
  if (def.colornorm_exponent != 0) {
    const double q = colornorm_polynomial().eval(table);
    if (q > 0.0)
      colornorm_part = std::pow(q, to_double(def.colornorm_exponent));
    else
      colornorm_part = 0.0;
    if (!(colornorm_part > options.denominator_guard))
      throw ColorDegenerateError(
          "color normalization too small: " + format_double(q));
  }
  const double numerator = def.numerator.eval(table);
  return numerator / (std::pow(area, to_double(def.area_exponent)) *
                      colornorm_part);
}

Descriptor evaluate_all(const std::vector<InvariantDef>& defs,
                        const MomentTable& table, const EvalOptions& options) {
  Descriptor d;
  d.values.reserve(defs.size());
  d.valid.reserve(defs.size());
  for (const auto& def : defs) {
    try {
      d.values.push_back(evaluate(def, table, options));
      d.valid.push_back(true);
    } catch (const ColorDegenerateError&) {
      d.values.push_back(0.0);
      d.valid.push_back(false);
    }
  }
  return d;
}

ZeroClass classify_zero(const InvariantDef& def) {
  if (def.numerator.empty()) return ZeroClass::kIdenticallyZero;
  if (def.numerator.without_first_order_terms().empty())
    return ZeroClass::kFirstOrderZero;
  return ZeroClass::kNonZero;
}

bool detect_zero(const InvariantDef& def) {
  return classify_zero(def) != ZeroClass::kNonZero;
}

std::vector<LinearDependency> linear_dependencies(
    const std::vector<InvariantDef>& defs) {
  for (const auto& def : defs)
    if (def.numerator.empty())
      throw ContractError("linear_dependencies expects non-zero defs");

  // Only invariants sharing both denominator exponents are comparable.
  std::map<std::pair<Rational, Rational>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < defs.size(); ++i)
    groups[{defs[i].area_exponent, defs[i].colornorm_exponent}].push_back(i);

  std::vector<LinearDependency> out;
  for (const auto& [exponents, members] : groups) {
    if (members.size() < 2) continue;

    // Union monomial basis of the group.
    std::map<MomentPolynomial::TermKey, std::size_t> columns;
    for (std::size_t i : members)
      for (const auto& [key, c] : defs[i].numerator.terms())
        columns.emplace(key, columns.size());

    const std::size_t n = members.size();
    const std::size_t m = columns.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(m, 0));
    std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(n, 0));
    for (std::size_t r = 0; r < n; ++r) {
      for (const auto& [key, c] : defs[members[r]].numerator.terms())
        a[r][columns.at(key)] = c;
      aug[r][r] = 1;
    }

    // Row elimination on [A | I]: rows whose A-part cancels carry the
    // dependency coefficients in their I-part.
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < m && pivot_row < n; ++col) {
      std::size_t sel = pivot_row;
      while (sel < n && a[sel][col] == 0) ++sel;
      if (sel == n) continue;
      std::swap(a[sel], a[pivot_row]);
      std::swap(aug[sel], aug[pivot_row]);
      for (std::size_t r = pivot_row + 1; r < n; ++r) {
        if (a[r][col] == 0) continue;
        const Rational f = a[r][col] / a[pivot_row][col];
        for (std::size_t cidx = col; cidx < m; ++cidx)
          a[r][cidx] -= f * a[pivot_row][cidx];
        for (std::size_t cidx = 0; cidx < n; ++cidx)
          aug[r][cidx] -= f * aug[pivot_row][cidx];
      }
      ++pivot_row;
    }

    for (std::size_t r = pivot_row; r < n; ++r) {
      LinearDependency dep;
      // Clear denominators and divide by the gcd for readable coefficients.
      BigInt lcm = 1;
      for (std::size_t c = 0; c < n; ++c)
        if (aug[r][c] != 0)
          lcm = boost::multiprecision::lcm(lcm, denominator(aug[r][c]));
      BigInt gcd = 0;
      for (std::size_t c = 0; c < n; ++c)
        if (aug[r][c] != 0)
          gcd = boost::multiprecision::gcd(
              gcd, BigInt(numerator(aug[r][c]) * (lcm / denominator(aug[r][c]))));
      for (std::size_t c = 0; c < n; ++c) {
        if (aug[r][c] == 0) continue;
        dep.members.push_back(members[c]);
        dep.coefficients.push_back(aug[r][c] * Rational(lcm, gcd));
      }
      out.push_back(std::move(dep));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LinearDependency& x, const LinearDependency& y) {
              return x.members < y.members;
            });
  return out;
}

int jacobian_rank(const std::vector<InvariantDef>& defs, std::uint64_t seed,
                  const JacobianOptions& options) {
  if (defs.empty()) return 0;
  const MomentKey area_key(0, 0, 0, 0, 0);

  std::set<MomentKey> var_set{area_key};
  for (const auto& def : defs) {
    const auto vars = def.numerator.variables();
    var_set.insert(vars.begin(), vars.end());
  }
  {
    const auto vars = colornorm_polynomial().variables();
    var_set.insert(vars.begin(), vars.end());
  }
  const std::vector<MomentKey> vars(var_set.begin(), var_set.end());

  // Symbolic partials, cached across samples.
  std::vector<std::map<MomentKey, MomentPolynomial>> numerator_partials(
      defs.size());
  std::map<MomentKey, MomentPolynomial> colornorm_partials;
  for (const auto& var : vars) {
    colornorm_partials.emplace(var, colornorm_polynomial().derivative(var));
    for (std::size_t i = 0; i < defs.size(); ++i)
      numerator_partials[i].emplace(var, defs[i].numerator.derivative(var));
  }

  Rng rng(seed);
  std::map<int, int> rank_votes;
  for (int sample = 0; sample < options.samples; ++sample) {
    std::map<MomentKey, double> assignment;
    double q = 0.0;
    int retries = 0;
    do {
      if (++retries > options.max_resamples)
        throw std::runtime_error("could not find a nonsingular sample point");
      assignment.clear();
      for (const auto& var : vars) assignment[var] = rng.uniform(-1.0, 1.0);
      assignment[area_key] = rng.uniform(0.5, 1.5);
      q = colornorm_polynomial().eval(assignment);
    } while (!(q > 1e-6));  // fractional powers need a positive colornorm

    const double area = assignment.at(area_key);
    Eigen::MatrixXd jac(Eigen::Index(defs.size()), Eigen::Index(vars.size()));
    for (std::size_t i = 0; i < defs.size(); ++i) {
      const double value = defs[i].numerator.eval(assignment);
      const double alpha = to_double(defs[i].area_exponent);
      const double beta = to_double(defs[i].colornorm_exponent);
      for (std::size_t j = 0; j < vars.size(); ++j) {
        // Quotient rule with the positive row factor area^-a * q^-b dropped.
        double entry = numerator_partials[i].at(vars[j]).eval(assignment) -
                       value * beta * colornorm_partials.at(vars[j]).eval(assignment) / q;
        if (vars[j] == area_key) entry -= value * alpha / area;
        jac(Eigen::Index(i), Eigen::Index(j)) = entry;
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    int rank = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
      for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > options.sv_threshold * sv(0)) ++rank;
    }
    ++rank_votes[rank];
  }
  // The stable plateau: the most frequent rank, largest on ties.
  int best_rank = 0, best_votes = 0;
  for (const auto& [rank, votes] : rank_votes) {
    if (votes >= best_votes) {
      best_votes = votes;
      best_rank = rank;
    }
  }
  return best_rank;
}

IndependenceReport independence_pipeline(const IndependenceOptions& options) {
  IndependenceReport report;
  const auto cores = enumerate_shape_cores(
      options.max_points, options.max_degree, options.require_connected);
  report.shape_core_count = int(cores.size());

  std::vector<InvariantDef> candidates;
  for (const auto& core : cores) {
    const CoreGraph labeled = labeled_for_color(core, options.label_policy);
    for (int power : {2, 1}) {
      InvariantDef def = build_invariant(labeled, CoreGraph::color_v123(power));
      const ZeroClass zclass = classify_zero(def);
      report.candidate_dsl.push_back(def.shape_core.dsl() + "; " +
                                     def.color_core.dsl());
      report.candidate_class.push_back(zclass);
      candidates.push_back(std::move(def));
    }
  }
  report.candidate_count = int(candidates.size());

  std::vector<InvariantDef> survivors;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    switch (report.candidate_class[i]) {
      case ZeroClass::kIdenticallyZero:
        ++report.identically_zero;
        break;
      case ZeroClass::kFirstOrderZero:
        ++report.first_order_zero;
        break;
      case ZeroClass::kNonZero:
        report.survivor_candidates.push_back(i);
        survivors.push_back(candidates[i]);
        break;
    }
  }
  report.zero_total = report.identically_zero + report.first_order_zero;
  report.nonzero = int(survivors.size());

  report.dependencies = linear_dependencies(survivors);
  report.linear_dependency_count = int(report.dependencies.size());

  // Drop the last participant of each relation; the rest are independent.
  std::set<std::size_t> dropped;
  for (const auto& dep : report.dependencies)
    dropped.insert(*std::max_element(dep.members.begin(), dep.members.end()));
  std::vector<InvariantDef> independent;
  for (std::size_t i = 0; i < survivors.size(); ++i)
    if (!dropped.count(i)) independent.push_back(survivors[i]);
  report.linearly_independent = int(independent.size());

  report.jacobian_rank =
      jacobian_rank(independent, options.seed, options.jacobian);

  report.moment_variables_in_bounds =
      moment_key_count(options.max_degree, 2);
  std::set<MomentKey> used{MomentKey(0, 0, 0, 0, 0)};
  for (const auto& def : independent) {
    const auto vars = def.numerator.variables();
    used.insert(vars.begin(), vars.end());
  }
  {
    const auto vars = colornorm_polynomial().variables();
    used.insert(vars.begin(), vars.end());
  }
  report.moment_variables_used = int(used.size());
  return report;
}

namespace {

const char* zero_class_name(ZeroClass z) {
  switch (z) {
    case ZeroClass::kNonZero:
      return "nonzero";
    case ZeroClass::kIdenticallyZero:
      return "identically_zero";
    case ZeroClass::kFirstOrderZero:
      return "first_order_zero";
  }
  return "?";
}

}  // namespace

std::string IndependenceReport::to_json() const {
  Json j;
  j["shape_cores"] = shape_core_count;
  j["candidates"] = candidate_count;
  j["identically_zero"] = identically_zero;
  j["first_order_zero"] = first_order_zero;
  j["zero_total"] = zero_total;
  j["nonzero"] = nonzero;
  j["linear_dependencies"] = linear_dependency_count;
  j["linearly_independent"] = linearly_independent;
  j["jacobian_rank"] = jacobian_rank;
  j["moment_variables_in_bounds"] = moment_variables_in_bounds;
  j["moment_variables_used"] = moment_variables_used;
  Json cands = Json::array();
  for (std::size_t i = 0; i < candidate_dsl.size(); ++i) {
    cands.push_back({{"core", candidate_dsl[i]},
                     {"class", zero_class_name(candidate_class[i])}});
  }
  j["candidate_classes"] = std::move(cands);
  Json deps = Json::array();
  for (const auto& dep : dependencies) {
    Json members = Json::array();
    for (std::size_t k = 0; k < dep.members.size(); ++k) {
      members.push_back(
          {{"survivor", dep.members[k]},
           {"candidate", survivor_candidates[dep.members[k]]},
           {"coefficient", fraction_string(dep.coefficients[k])}});
    }
    deps.push_back(std::move(members));
  }
  j["dependency_groups"] = std::move(deps);
  return dump_json(j, 1);
}

std::string catalog_to_json() {
  const auto& catalog = scami24_catalog();
  Json arr = Json::array();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    Json entry = Json::parse(catalog[i].to_json());
    Json with_index;
    with_index["index"] = i + 1;
    for (auto it = entry.begin(); it != entry.end(); ++it)
      with_index[it.key()] = it.value();
    arr.push_back(std::move(with_index));
  }
  return dump_json(arr, 1);
}

}  // namespace scami
