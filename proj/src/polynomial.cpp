#include "scami/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "scami/errors.hpp"
#include "scami/json_io.hpp"

namespace scami {

PointPolynomial PointPolynomial::constant(int num_points, const Rational& c) {
  PointPolynomial p(num_points);
  p.add_term(TermKey(std::size_t(num_points), PointExp{}), c);
  return p;
}

PointPolynomial PointPolynomial::monomial(int num_points, const TermKey& exps,
                                          const Rational& c) {
  PointPolynomial p(num_points);
  p.add_term(exps, c);
  return p;
}

void PointPolynomial::add_term(const TermKey& exps, const Rational& c) {
  if (int(exps.size()) != num_points_)
    throw ContractError("term length does not match point count");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(exps, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

PointPolynomial& PointPolynomial::operator+=(const PointPolynomial& other) {
  if (other.num_points_ > num_points_) *this = lifted(other.num_points_);
  const PointPolynomial rhs = other.num_points_ < num_points_
                                  ? other.lifted(num_points_)
                                  : other;
  for (const auto& [key, c] : rhs.terms_) add_term(key, c);
  return *this;
}

PointPolynomial& PointPolynomial::operator-=(const PointPolynomial& other) {
  return *this += -other;
}

PointPolynomial PointPolynomial::operator-() const {
  PointPolynomial out(num_points_);
  for (const auto& [key, c] : terms_) out.terms_.emplace(key, -c);
  return out;
}

PointPolynomial PointPolynomial::operator*(const PointPolynomial& other) const {
  const int n = std::max(num_points_, other.num_points_);
  const PointPolynomial a = lifted(n);
  const PointPolynomial b = other.lifted(n);
  PointPolynomial out(n);
  auto key = TermKey(std::size_t(n));
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      for (int i = 0; i < n; ++i)
        for (int v = 0; v < 5; ++v)
          key[std::size_t(i)][std::size_t(v)] =
              std::uint8_t(ka[std::size_t(i)][std::size_t(v)] +
                           kb[std::size_t(i)][std::size_t(v)]);
      out.add_term(key, ca * cb);
    }
  }
  return out;
}

PointPolynomial PointPolynomial::lifted(int num_points) const {
  if (num_points == num_points_) return *this;
  if (num_points < num_points_)
    throw ContractError("cannot shrink a point polynomial");
  PointPolynomial out(num_points);
  for (const auto& [key, c] : terms_) {
    TermKey k = key;
    k.resize(std::size_t(num_points));
    out.terms_.emplace(std::move(k), c);
  }
  return out;
}

PointPolynomial PointPolynomial::relabeled(const std::vector<int>& perm) const {
  if (int(perm.size()) != num_points_)
    throw ContractError("relabeling size mismatch");
  PointPolynomial out(num_points_);
  for (const auto& [key, c] : terms_) {
    auto k = TermKey(std::size_t(num_points_));
    for (int i = 0; i < num_points_; ++i)
      k[std::size_t(perm[std::size_t(i)]) - 1] = key[std::size_t(i)];
    out.add_term(k, c);
  }
  return out;
}

namespace {

double pow_int(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

Rational pow_int(const Rational& base, int exp) {
  Rational out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

double PointPolynomial::eval(
    const std::vector<std::array<double, 5>>& points) const {
  if (int(points.size()) < num_points_)
    throw ContractError("not enough point values");
  double sum = 0.0;
  for (const auto& [key, c] : terms_) {
    double term = to_double(c);
    for (int i = 0; i < num_points_; ++i)
      for (int v = 0; v < 5; ++v)
        term *= pow_int(points[std::size_t(i)][std::size_t(v)],
                        key[std::size_t(i)][std::size_t(v)]);
    sum += term;
  }
  return sum;
}

Rational PointPolynomial::eval_exact(
    const std::vector<std::array<Rational, 5>>& points) const {
  if (int(points.size()) < num_points_)
    throw ContractError("not enough point values");
  Rational sum = 0;
  for (const auto& [key, c] : terms_) {
    Rational term = c;
    for (int i = 0; i < num_points_; ++i)
      for (int v = 0; v < 5; ++v)
        term *= pow_int(points[std::size_t(i)][std::size_t(v)],
                        key[std::size_t(i)][std::size_t(v)]);
    sum += term;
  }
  return sum;
}

PointPolynomial shape_primitive(int i, int j, int num_points) {
  if (i == j) throw std::domain_error("shape primitive needs i != j");
  if (i < 1 || j < 1) throw std::domain_error("point indices start at 1");
  const int n = std::max(num_points, std::max(i, j));
  PointPolynomial p(n);
  auto key = PointPolynomial::TermKey(std::size_t(n));
  key[std::size_t(i) - 1][0] = 1;  // x_i
  key[std::size_t(j) - 1][1] = 1;  // y_j
  p.add_term(key, 1);
  key = PointPolynomial::TermKey(std::size_t(n));
  key[std::size_t(j) - 1][0] = 1;  // x_j
  key[std::size_t(i) - 1][1] = 1;  // y_i
  p.add_term(key, -1);
  return p;
}

PointPolynomial color_primitive(int i, int j, int k, int num_points) {
  if (i == j || j == k || i == k)
    throw std::domain_error("color primitive needs distinct points");
  if (i < 1 || j < 1 || k < 1)
    throw std::domain_error("point indices start at 1");
  const int n = std::max(num_points, std::max({i, j, k}));
  PointPolynomial p(n);
  // Signed expansion of det[[R_i,R_j,R_k],[G_i,G_j,G_k],[B_i,B_j,B_k]].
  const int idx[3] = {i, j, k};
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                           {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  for (int t = 0; t < 6; ++t) {
    auto key = PointPolynomial::TermKey(std::size_t(n));
    key[std::size_t(idx[perms[t][0]]) - 1][2] = 1;  // R
    key[std::size_t(idx[perms[t][1]]) - 1][3] = 1;  // G
    key[std::size_t(idx[perms[t][2]]) - 1][4] = 1;  // B
    p.add_term(key, t < 3 ? 1 : -1);
  }
  return p;
}

PointPolynomial build_kernel(const CoreGraph& core) {
  core.validate();
  PointPolynomial kernel = PointPolynomial::constant(core.num_points, 1);
  for (const auto& e : core.shape_edges)
    kernel = kernel * shape_primitive(e[0], e[1], core.num_points);
  for (const auto& t : core.color_triples)
    kernel = kernel * color_primitive(t[0], t[1], t[2], core.num_points);
  return kernel;
}

void MomentPolynomial::add_term(TermKey keys, const Rational& c) {
  if (c == 0) return;
  std::sort(keys.begin(), keys.end());
  auto [it, inserted] = terms_.emplace(std::move(keys), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

MomentPolynomial& MomentPolynomial::operator+=(const MomentPolynomial& other) {
  for (const auto& [key, c] : other.terms_) add_term(key, c);
  return *this;
}

MomentPolynomial& MomentPolynomial::operator-=(const MomentPolynomial& other) {
  for (const auto& [key, c] : other.terms_) add_term(key, -c);
  return *this;
}

MomentPolynomial MomentPolynomial::operator*(
    const MomentPolynomial& other) const {
  MomentPolynomial out;
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : other.terms_) {
      TermKey key = ka;
      key.insert(key.end(), kb.begin(), kb.end());
      out.add_term(std::move(key), ca * cb);
    }
  }
  return out;
}

MomentPolynomial MomentPolynomial::scaled(const Rational& c) const {
  MomentPolynomial out;
  if (c == 0) return out;
  for (const auto& [key, coeff] : terms_) out.terms_.emplace(key, coeff * c);
  return out;
}

MomentPolynomial MomentPolynomial::without_first_order_terms() const {
  MomentPolynomial out;
  for (const auto& [key, c] : terms_) {
    const bool first_order =
        std::any_of(key.begin(), key.end(),
                    [](const MomentKey& k) { return k.is_first_order(); });
    if (!first_order) out.terms_.emplace(key, c);
  }
  return out;
}

bool MomentPolynomial::has_first_order_terms() const {
  for (const auto& [key, c] : terms_)
    for (const auto& k : key)
      if (k.is_first_order()) return true;
  return false;
}

std::set<MomentKey> MomentPolynomial::variables() const {
  std::set<MomentKey> vars;
  for (const auto& [key, c] : terms_) vars.insert(key.begin(), key.end());
  return vars;
}

MomentPolynomial MomentPolynomial::derivative(const MomentKey& var) const {
  MomentPolynomial out;
  for (const auto& [key, c] : terms_) {
    const auto count = std::count(key.begin(), key.end(), var);
    if (count == 0) continue;
    TermKey reduced;
    reduced.reserve(key.size() - 1);
    bool removed = false;
    for (const auto& k : key) {
      if (!removed && k == var) {
        removed = true;
        continue;
      }
      reduced.push_back(k);
    }
    out.add_term(std::move(reduced), c * int(count));
  }
  return out;
}

double MomentPolynomial::eval(const MomentTable& table) const {
  double sum = 0.0, comp = 0.0;
  for (const auto& [key, c] : terms_) {
    double term = to_double(c);
    for (const auto& k : key) term *= table.at(k);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double MomentPolynomial::eval(
    const std::map<MomentKey, double>& assignment) const {
  double sum = 0.0;
  for (const auto& [key, c] : terms_) {
    double term = to_double(c);
    for (const auto& k : key) {
      auto it = assignment.find(k);
      if (it == assignment.end())
        throw ContractError("moment " + k.label() + " not assigned");
      term *= it->second;
    }
    sum += term;
  }
  return sum;
}

Rational MomentPolynomial::eval_exact(
    const std::map<MomentKey, Rational>& assignment) const {
  Rational sum = 0;
  for (const auto& [key, c] : terms_) {
    Rational term = c;
    for (const auto& k : key) {
      auto it = assignment.find(k);
      if (it == assignment.end())
        throw ContractError("moment " + k.label() + " not assigned");
      term *= it->second;
    }
    sum += term;
  }
  return sum;
}

std::string MomentPolynomial::to_json() const {
  Json arr = Json::array();
  for (const auto& [key, c] : terms_) {
    Json keys = Json::array();
    for (const auto& k : key) keys.push_back(k.str());
    arr.push_back({{"coeff", fraction_string(c)}, {"keys", std::move(keys)}});
  }
  return dump_json(arr, 1);
}

MomentPolynomial MomentPolynomial::from_json(const std::string& text) {
  Json arr;
  try {
    arr = Json::parse(text);
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad polynomial JSON: ") + e.what());
  }
  MomentPolynomial out;
  for (const auto& rec : arr) {
    TermKey keys;
    for (const auto& k : rec.at("keys"))
      keys.push_back(MomentKey::parse(k.get<std::string>()));
    out.add_term(std::move(keys),
                 parse_fraction(rec.at("coeff").get<std::string>()));
  }
  return out;
}

MomentPolynomial integrate(const PointPolynomial& kernel, int num_points) {
  if (kernel.num_points() > num_points)
    throw ContractError("kernel references points beyond num_points");
  const PointPolynomial lifted = kernel.lifted(num_points);
  MomentPolynomial out;
  for (const auto& [key, c] : lifted.terms()) {
    MomentPolynomial::TermKey keys;
    keys.reserve(std::size_t(num_points));
    for (int i = 0; i < num_points; ++i) {
      const PointExp& e = key[std::size_t(i)];
      keys.emplace_back(e[0], e[1], e[2], e[3], e[4]);
    }
    out.add_term(std::move(keys), c);
  }
  return out;
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  int integer() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) throw ParseError("expected an integer", pos);
    return std::stoi(text.substr(start, pos - start));
  }
  bool accept_word(const std::string& w) {
    skip_ws();
    if (text.compare(pos, w.size(), w) == 0) {
      pos += w.size();
      return true;
    }
    return false;
  }
};

}  // namespace

CoreGraph parse_core_spec(const std::string& text) {
  Parser p(text);
  CoreGraph g;
  bool saw_shape = false, saw_color = false;

  while (!p.at_end()) {
    if (p.accept_word("shape")) {
      if (saw_shape) throw ParseError("duplicate shape section", p.pos);
      saw_shape = true;
      p.expect(':');
      bool any = false;
      while (p.peek() == '(') {
        p.expect('(');
        const int i = p.integer();
        p.expect(',');
        const int j = p.integer();
        p.expect(')');
        int mult = 1;
        if (p.accept('^')) mult = p.integer();
        if (i == j) throw ParseError("shape primitive needs i != j", p.pos);
        if (mult < 1) throw ParseError("multiplicity must be >= 1", p.pos);
        for (int n = 0; n < mult; ++n)
          g.shape_edges.push_back({std::min(i, j), std::max(i, j)});
        any = true;
      }
      if (!any) throw ParseError("shape section lists no primitives", p.pos);
    } else if (p.accept_word("color")) {
      if (saw_color) throw ParseError("duplicate color section", p.pos);
      saw_color = true;
      p.expect(':');
      bool any = false;
      while (p.peek() == 'V') {
        p.expect('V');
        p.expect('(');
        const int i = p.integer();
        p.expect(',');
        const int j = p.integer();
        p.expect(',');
        const int k = p.integer();
        p.expect(')');
        int mult = 1;
        if (p.accept('^')) mult = p.integer();
        if (i == j || j == k || i == k)
          throw ParseError("color primitive needs distinct points", p.pos);
        if (mult < 1) throw ParseError("multiplicity must be >= 1", p.pos);
        std::array<int, 3> t{i, j, k};
        std::sort(t.begin(), t.end());
        for (int n = 0; n < mult; ++n) g.color_triples.push_back(t);
        any = true;
      }
      if (!any) throw ParseError("color section lists no primitives", p.pos);
    } else {
      throw ParseError("expected 'shape:' or 'color:'", p.pos);
    }
    if (!p.at_end()) p.expect(';');
  }
  if (!saw_shape && !saw_color)
    throw ParseError("empty core spec", 0);

  int max_point = 0;
  for (const auto& e : g.shape_edges) max_point = std::max(max_point, e[1]);
  for (const auto& t : g.color_triples) max_point = std::max(max_point, t[2]);
  g.num_points = max_point;
  g.normalize();
  g.validate();
  return g;
}

}  // namespace scami
