#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <string>

#include "golden_expansion.hpp"
#include "scami/errors.hpp"
#include "scami/polynomial.hpp"
#include "scami/reference.hpp"
#include "test_support.hpp"

using namespace scami;
using namespace scami::testsupport;

namespace {

std::vector<std::array<double, 5>> points2(std::array<double, 2> a,
                                           std::array<double, 2> b) {
  return {{a[0], a[1], 0, 0, 0}, {b[0], b[1], 0, 0, 0}};
}

}  // namespace

TEST_CASE("shape primitive is the signed parallelogram area") {
  const auto c12 = shape_primitive(1, 2);
  CHECK(c12.eval(points2({1, 0}, {0, 1})) == doctest::Approx(1.0));
  CHECK(c12.eval(points2({2, 3}, {4, 6})) == doctest::Approx(0.0));
  const auto c21 = shape_primitive(2, 1);
  CHECK((c12 + c21).empty());  // swap negates
  CHECK_THROWS_AS(shape_primitive(2, 2), std::domain_error);
}

TEST_CASE("color primitive is the RGB determinant") {
  const auto v = color_primitive(1, 2, 3);
  CHECK(v.term_count() == 6);
  std::vector<std::array<double, 5>> basis = {
      {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}};
  CHECK(v.eval(basis) == doctest::Approx(1.0));
  std::vector<std::array<double, 5>> repeated = {
      {0, 0, 0.3, 0.4, 0.5}, {0, 0, 0.3, 0.4, 0.5}, {0, 0, 0.9, 0.2, 0.7}};
  CHECK(v.eval(repeated) == doctest::Approx(0.0));
  const auto v_odd = color_primitive(2, 1, 3);  // odd permutation
  CHECK((v + v_odd).empty());
  const auto v_even = color_primitive(2, 3, 1);  // even permutation
  CHECK(v == v_even);
  CHECK_THROWS_AS(color_primitive(1, 1, 2), std::domain_error);
}

TEST_CASE("build_kernel expands primitive products") {
  CoreGraph single;
  single.num_points = 2;
  single.add_edge(1, 2);
  CHECK(build_kernel(single) == shape_primitive(1, 2));

  CoreGraph doubled;
  doubled.num_points = 2;
  doubled.add_edge(1, 2, 2);
  const auto k = build_kernel(doubled);
  CHECK(k.term_count() == 3);  // x1^2 y2^2 - 2 x1 x2 y1 y2 + x2^2 y1^2
  PointPolynomial expected(2);
  expected.add_term({{2, 0, 0, 0, 0}, {0, 2, 0, 0, 0}}, 1);
  expected.add_term({{1, 1, 0, 0, 0}, {1, 1, 0, 0, 0}}, -2);
  expected.add_term({{0, 2, 0, 0, 0}, {2, 0, 0, 0, 0}}, 1);
  CHECK(k == expected);
}

TEST_CASE("kernel term count agrees with a naive independent expansion") {
  // Naive expansion over string-encoded monomials, sharing no code with
  // PointPolynomial.
  using Naive = std::map<std::string, long long>;
  auto encode = [](const std::vector<int>& exps) {
    std::string s;
    for (int e : exps) s += char('0' + e);
    return s;
  };
  auto mul = [&](const Naive& a, const Naive& b) {
    Naive out;
    for (const auto& [ka, ca] : a)
      for (const auto& [kb, cb] : b) {
        std::string k = ka;
        for (std::size_t i = 0; i < k.size(); ++i)
          k[i] = char(k[i] + kb[i] - '0');
        out[k] += ca * cb;
        if (out[k] == 0) out.erase(k);
      }
    return out;
  };
  // Variables per point: x y R G B, three points -> 15 slots.
  auto edge = [&](int i, int j) {
    Naive p;
    std::vector<int> e1(15, 0), e2(15, 0);
    e1[std::size_t(5 * (i - 1))] = 1;      // x_i
    e1[std::size_t(5 * (j - 1) + 1)] = 1;  // y_j
    e2[std::size_t(5 * (j - 1))] = 1;
    e2[std::size_t(5 * (i - 1) + 1)] = 1;
    p[encode(e1)] = 1;
    p[encode(e2)] = -1;
    return p;
  };
  auto volume = [&]() {
    Naive p;
    const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                             {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
    for (int t = 0; t < 6; ++t) {
      std::vector<int> e(15, 0);
      e[std::size_t(5 * perms[t][0] + 2)] = 1;  // R
      e[std::size_t(5 * perms[t][1] + 3)] = 1;  // G
      e[std::size_t(5 * perms[t][2] + 4)] = 1;  // B
      p[encode(e)] += t < 3 ? 1 : -1;
    }
    return p;
  };

  const Naive naive = mul(mul(edge(1, 2), edge(1, 3)), volume());

  CoreGraph core;
  core.num_points = 3;
  core.add_edge(1, 2);
  core.add_edge(1, 3);
  core.add_triple(1, 2, 3);
  CHECK(build_kernel(core).term_count() == naive.size());
}

TEST_CASE("integrate kills antisymmetric kernels and squares pair up") {
  CHECK(integrate(shape_primitive(1, 2), 2).empty());
  CHECK(integrate(shape_primitive(1, 2), 3).empty());

  CoreGraph doubled;
  doubled.num_points = 2;
  doubled.add_edge(1, 2, 2);
  const auto poly = integrate(build_kernel(doubled), 2);
  MomentPolynomial expected;
  expected.add_term({MomentKey(2, 0, 0, 0, 0), MomentKey(0, 2, 0, 0, 0)}, 2);
  expected.add_term({MomentKey(1, 1, 0, 0, 0), MomentKey(1, 1, 0, 0, 0)}, -2);
  CHECK(poly == expected);
}

TEST_CASE("integrating the squared color primitive gives the published bracket") {
  const auto poly = integrate(build_kernel(CoreGraph::color_v123(2)), 3);
  CHECK(poly == testdata::golden_colornorm());
}

TEST_CASE("untouched points contribute the area key") {
  const auto poly = integrate(build_kernel([] {
                                CoreGraph g;
                                g.num_points = 2;
                                g.add_edge(1, 2, 2);
                                return g;
                              }()),
                              3);
  for (const auto& [key, c] : poly.terms()) {
    CHECK(key.size() == 3);
    CHECK(std::count(key.begin(), key.end(), MomentKey(0, 0, 0, 0, 0)) == 1);
  }
}

TEST_CASE("integrate-evaluate commutation against the tuple-sum oracle") {
  struct Case {
    const char* spec;
    int raster;
  };
  const Case cases[] = {
      {"shape: (1,2)^2", 8},
      {"shape: (1,2) (1,3); color: V(1,2,3)", 8},
      {"color: V(1,2,3)^2", 8},
      {"shape: (1,2) (1,3) (2,3); color: V(1,2,3)", 6},
      {"shape: (1,2) (2,3) (3,4) (1,4); color: V(1,2,3)^2", 4},
  };
  for (const auto& c : cases) {
    CAPTURE(c.spec);
    const CoreGraph core = parse_core_spec(c.spec);
    const auto kernel = build_kernel(core);
    const Raster r = random_raster(c.raster, c.raster, 77);
    double abs_scale = 0.0;
    const double direct =
        reference_kernel_sum(kernel, core.num_points, r, &abs_scale);
    const auto degrees = core.shape_degrees();
    const auto mults = core.color_multiplicities();
    const int so = degrees.empty()
                       ? 0
                       : *std::max_element(degrees.begin(), degrees.end());
    const int co =
        mults.empty() ? 0 : *std::max_element(mults.begin(), mults.end());
    const double via_moments =
        integrate(kernel, core.num_points)
            .eval(central_moments(r, so, co));
    // Antisymmetric kernels cancel to ~0 on both routes; measure against
    // the tuple magnitude in that case.
    CHECK(std::abs(direct - via_moments) <=
          1e-9 * std::max(std::abs(direct), std::abs(via_moments)) +
              1e-12 * abs_scale);
  }
}

TEST_CASE("kernels are relative invariants of both transform groups") {
  // Pointwise and exact: transforming the points multiplies the kernel by
  // det(Ms)^W * det(Mc)^M.
  const CoreGraph core =
      parse_core_spec("shape: (1,2)^2 (1,3); color: V(1,2,3)");
  const auto kernel = build_kernel(core);

  using R = Rational;
  const R ms[4] = {R(3, 2), R(-1, 3), R(2, 5), R(7, 4)};
  const R mc[9] = {R(1), R(1, 2), R(0),  R(-1, 3), R(5, 4),
                   R(1, 6), R(0), R(2, 7), R(9, 8)};
  const R det_s = ms[0] * ms[3] - ms[1] * ms[2];
  const R det_c = mc[0] * (mc[4] * mc[8] - mc[5] * mc[7]) -
                  mc[1] * (mc[3] * mc[8] - mc[5] * mc[6]) +
                  mc[2] * (mc[3] * mc[7] - mc[4] * mc[6]);

  std::vector<std::array<R, 5>> pts = {
      {R(2), R(-1), R(1, 2), R(1, 3), R(1, 5)},
      {R(-3), R(4), R(2, 3), R(1, 7), R(3, 4)},
      {R(1, 2), R(5, 3), R(4, 5), R(1), R(1, 9)}};
  std::vector<std::array<R, 5>> mapped;
  for (const auto& p : pts) {
    std::array<R, 5> q;
    q[0] = ms[0] * p[0] + ms[1] * p[1];
    q[1] = ms[2] * p[0] + ms[3] * p[1];
    for (int row = 0; row < 3; ++row)
      q[std::size_t(2 + row)] = mc[std::size_t(3 * row)] * p[2] +
                                mc[std::size_t(3 * row + 1)] * p[3] +
                                mc[std::size_t(3 * row + 2)] * p[4];
    mapped.push_back(q);
  }
  const R before = kernel.eval_exact(pts);
  const R after = kernel.eval_exact(mapped);
  R factor = 1;
  for (int i = 0; i < core.shape_weight(); ++i) factor *= det_s;
  for (int i = 0; i < core.color_weight(); ++i) factor *= det_c;
  CHECK(after == factor * before);
}

TEST_CASE("kernel construction commutes with point relabeling") {
  const CoreGraph core = parse_core_spec("shape: (1,2)^2 (2,3); color: V(1,2,3)");
  const std::vector<int> perm{3, 1, 2};
  CHECK(build_kernel(relabel(core, perm)) ==
        build_kernel(core).relabeled(perm));
}

TEST_CASE("canonical forms are independent of construction order") {
  CoreGraph a;
  a.num_points = 3;
  a.add_edge(1, 3, 2);
  a.add_edge(1, 2);
  a.add_triple(1, 2, 3);
  CoreGraph b;
  b.num_points = 3;
  b.add_triple(1, 2, 3);
  b.add_edge(1, 2);
  b.add_edge(1, 3);
  b.add_edge(3, 1);
  CHECK(build_kernel(a) == build_kernel(b));
  CHECK(integrate(build_kernel(a), 3) == integrate(build_kernel(b), 3));
}

TEST_CASE("core DSL: parse, print, errors") {
  const CoreGraph g = parse_core_spec("shape: (1,2)^2 (1,3)^2; color: V(1,2,3)^2");
  CHECK(g.num_points == 3);
  CHECK(g.shape_weight() == 4);
  CHECK(g.color_weight() == 2);
  CHECK(g.dsl() == "shape: (1,2)^2 (1,3)^2; color: V(1,2,3)^2");
  CHECK(parse_core_spec(g.dsl()).shape_edges == g.shape_edges);

  CHECK(parse_core_spec("color:V(1,2,3)").num_points == 3);
  CHECK(parse_core_spec("shape:(1,2)").num_points == 2);

  CHECK_THROWS_AS(parse_core_spec(""), ParseError);
  CHECK_THROWS_AS(parse_core_spec("shape:"), ParseError);
  CHECK_THROWS_AS(parse_core_spec("shape:(1,1)"), ParseError);
  CHECK_THROWS_AS(parse_core_spec("color:V(1,2)"), ParseError);
  CHECK_THROWS_AS(parse_core_spec("noise"), ParseError);
  try {
    parse_core_spec("shape: (1,2)^2 oops");
  } catch (const ParseError& e) {
    CHECK(e.position >= 14);
  }
}

TEST_CASE("moment polynomial derivative counts multiset multiplicity") {
  // p = 3 * u^2 * v where u = scU20000, v = scU02000.
  const MomentKey u(2, 0, 0, 0, 0), v(0, 2, 0, 0, 0);
  MomentPolynomial p;
  p.add_term({u, u, v}, 3);
  const auto dp_du = p.derivative(u);
  MomentPolynomial expected;
  expected.add_term({u, v}, 6);
  CHECK(dp_du == expected);
  const auto dp_dv = p.derivative(v);
  MomentPolynomial expected_v;
  expected_v.add_term({u, u}, 3);
  CHECK(dp_dv == expected_v);
  CHECK(p.derivative(MomentKey(4, 0, 0, 0, 0)).empty());
}

TEST_CASE("moment polynomial json round trip") {
  const auto poly = integrate(build_kernel(CoreGraph::color_v123(2)), 3);
  const auto restored = MomentPolynomial::from_json(poly.to_json());
  CHECK(restored == poly);
}

TEST_CASE("first-order term filtering") {
  MomentPolynomial p;
  p.add_term({MomentKey(1, 0, 0, 0, 0), MomentKey(2, 0, 0, 0, 0)}, 1);
  p.add_term({MomentKey(2, 0, 0, 0, 0), MomentKey(0, 2, 0, 0, 0)}, 2);
  CHECK(p.has_first_order_terms());
  const auto filtered = p.without_first_order_terms();
  CHECK(filtered.term_count() == 1);
  CHECK(!filtered.has_first_order_terms());
}
