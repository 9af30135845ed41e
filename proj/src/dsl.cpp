#include "archipelago/dsl.hpp"

#include <algorithm>
#include <charconv>

#include "archipelago/errors.hpp"

namespace archipelago {

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.letter != b.letter || a.exponent != b.exponent || a.param != b.param ||
      a.nest != b.nest || a.eps != b.eps || a.children.size() != b.children.size())
    return false;
  for (std::size_t k = 0; k < a.children.size(); ++k)
    if (!(*a.children[k] == *b.children[k])) return false;
  return true;
}

namespace {

constexpr std::string_view kDot = "\xC2\xB7";  // "·"

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr node(Expr::Kind kind, std::vector<ExprPtr> children = {}) {
  Expr e;
  e.kind = kind;
  e.children = std::move(children);
  return make(std::move(e));
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

class Parser {
 public:
  Parser(std::string_view text, const FamilySpec& spec) : s_(text), spec_(spec) {}

  ExprPtr run() {
    auto e = expr();
    skip_separators();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw ParseError(what, at); }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  bool at_dot() const { return s_.substr(pos_, kDot.size()) == kDot; }

  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
  }
  void skip_separators() {
    for (;;) {
      skip_ws();
      if (!at_dot()) return;
      pos_ += kDot.size();
    }
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool delimiter_here() const {
    if (at_end() || at_dot()) return true;
    switch (s_[pos_]) {
      case ' ': case '\t': case '\n': case '\r': case '(': case ')': case '^': case ',': case '|': case ']':
        return true;
      default:
        return false;
    }
  }

  std::int64_t integer() {
    skip_ws();
    const auto start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string digits(s_.substr(start, pos_ - start));
    if (!digits.empty() && digits[0] == '+') digits.erase(0, 1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size())
      fail_at(ec == std::errc::result_out_of_range ? "integer out of range" : "expected an integer", start);
    return v;
  }

  Index natural(const char* what) {
    const auto start = pos_;
    auto v = integer();
    if (v < 0) fail_at(std::string(what) + " must be nonnegative", start);
    return static_cast<Index>(v);
  }

  // Element literal: up to the next delimiter outside braces.
  std::string literal() {
    const auto start = pos_;
    int depth = 0;
    while (!at_end()) {
      char c = s_[pos_];
      if (c == '{') ++depth;
      else if (c == '}') --depth;
      else if (depth == 0 && delimiter_here()) break;
      ++pos_;
    }
    if (pos_ == start) fail("expected an element literal");
    return std::string(s_.substr(start, pos_ - start));
  }

  const FactorDescriptor& descriptor_at(Index i, std::size_t at) const {
    if (!spec_.contains(i)) fail_at("index " + std::to_string(i) + " is outside the family", at);
    return spec_.at(i);
  }

  GroupElement element(const FactorDescriptor& d, std::string_view text, std::size_t at) const {
    try {
      return parse_element(d, text);
    } catch (const ParseError& e) {
      fail_at(e.what(), at);
    } catch (const ContractError& e) {
      fail_at(e.what(), at);
    }
  }

  ExprPtr expr() {
    std::vector<ExprPtr> terms;
    for (;;) {
      skip_separators();
      if (at_end() || peek() == ')') break;
      terms.push_back(term());
    }
    if (terms.empty()) fail("expected a word");
    if (terms.size() == 1) return terms.front();
    return node(Expr::Kind::Product, std::move(terms));
  }

  ExprPtr term() {
    auto a = atom();
    skip_ws();
    if (peek() != '^') return a;
    ++pos_;
    Expr e;
    e.kind = Expr::Kind::Power;
    e.exponent = integer();
    e.children = {std::move(a)};
    return make(std::move(e));
  }

  ExprPtr atom() {
    skip_ws();
    const auto start = pos_;
    const char c = peek();
    if (c == '(') {
      ++pos_;
      auto e = expr();
      expect(')');
      return e;
    }
    if (c == '1') {
      ++pos_;
      if (!delimiter_here()) fail_at("expected \"1\" or a letter", start);
      return node(Expr::Kind::Identity);
    }
    if (c == 'g' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      const auto at = pos_;
      const Index i = natural("index");
      if (peek() != ':') fail("expected ':' after the letter index");
      ++pos_;
      const auto lit_at = pos_;
      const auto& d = descriptor_at(i, at);
      Expr e;
      e.kind = Expr::Kind::Letter;
      e.letter = Letter{i, element(d, literal(), lit_at)};
      return make(std::move(e));
    }
    std::string name;
    while (!at_end() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) name += s_[pos_++];
    if (name == "inv") {
      expect('(');
      auto inner = expr();
      expect(')');
      return node(Expr::Kind::Inverse, {std::move(inner)});
    }
    if (name == "tau" || name == "p") {
      expect('[');
      Expr e;
      e.kind = name == "tau" ? Expr::Kind::Tau : Expr::Kind::Project;
      e.param = natural(name == "tau" ? "level" : "depth");
      expect(']');
      expect('(');
      e.children = {expr()};
      expect(')');
      return make(std::move(e));
    }
    if (name == "nest") return nest();
    if (name == "eps") return eps();
    fail_at(name.empty() ? "expected a term" : "unknown function '" + name + "'", start);
  }

  // Raw "key=value" items of an argument list, split at top-level commas.
  struct Item {
    std::string text;
    std::size_t at;
  };
  std::vector<Item> items(char stop_a, char stop_b) {
    std::vector<Item> out;
    int depth = 0;
    std::size_t start = pos_;
    while (!at_end()) {
      char c = s_[pos_];
      if (c == '{' || c == '(') ++depth;
      else if ((c == '}' || c == ')') && depth > 0) --depth;
      else if (depth == 0 && (c == ',' || c == stop_a || c == stop_b)) {
        out.push_back({trim(s_.substr(start, pos_ - start)), start});
        if (c != ',') return out;
        start = pos_ + 1;
      }
      ++pos_;
    }
    fail("unterminated argument list");
  }

  static void linear_form(const std::string& raw, std::int64_t& mul, std::int64_t& add, std::size_t at) {
    std::string t;
    for (char c : raw)
      if (c != ' ') t += c;
    auto number = [&](const std::string& s) {
      std::int64_t v = 0;
      std::string d = !s.empty() && s[0] == '+' ? s.substr(1) : s;
      auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), v);
      if (d.empty() || ec != std::errc() || p != d.data() + d.size())
        throw ParseError("bad exponent '" + raw + "'", at);
      return v;
    };
    const auto k = t.find('k');
    if (k == std::string::npos) {
      mul = 0;
      add = number(t);
      return;
    }
    const std::string before = t.substr(0, k), after = t.substr(k + 1);
    if (before.empty()) mul = 1;
    else if (before == "-") mul = -1;
    else if (before.back() == '*') mul = number(before.substr(0, before.size() - 1));
    else throw ParseError("bad exponent '" + raw + "'", at);
    if (after.empty()) add = 0;
    else if (after[0] == '+' || after[0] == '-') add = number(after);
    else throw ParseError("bad exponent '" + raw + "'", at);
  }

  ExprPtr nest() {
    expect('(');
    skip_ws();
    std::vector<Item> args;
    if (peek() != ')') args = items(')', ')');
    ++pos_;
    NestRule rule{1, 0, GroupElement::identity(FactorDescriptor::integers()), 1, 1};
    std::optional<std::pair<std::string, std::size_t>> base;
    std::vector<std::string> seen;
    for (const auto& a : args) {
      const auto eq = a.text.find('=');
      if (eq == std::string::npos) fail_at("expected key=value", a.at);
      const std::string key = trim(a.text.substr(0, eq)), value = trim(a.text.substr(eq + 1));
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) fail_at("duplicate key '" + key + "'", a.at);
      seen.push_back(key);
      if (key == "k") {
        std::string v = value;
        if (v.size() >= 2 && v.ends_with("..")) v.resize(v.size() - 2);
        std::int64_t s = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
        if (v.empty() || ec != std::errc() || p != v.data() + v.size() || s < 1)
          fail_at("k expects a start level like 1..", a.at);
        rule.start_level = static_cast<Index>(s);
      } else if (key == "base") {
        // g{k}:x or g{k+c}:x / g{k-c}:x
        const auto colon = value.find(':');
        if (!value.starts_with("g{k") || colon == std::string::npos || colon < 4 || value[colon - 1] != '}')
          fail_at("base expects g{k+c}:element", a.at);
        const std::string off = value.substr(3, colon - 4);
        if (!off.empty()) {
          std::int64_t c = 0;
          const std::string d = off[0] == '+' ? off.substr(1) : off;
          auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), c);
          if ((off[0] != '+' && off[0] != '-') || d.empty() || ec != std::errc() || p != d.data() + d.size())
            fail_at("base expects g{k+c}:element", a.at);
          rule.index_offset = c;
        }
        base = {value.substr(colon + 1), a.at};
      } else if (key == "exp") {
        linear_form(value, rule.exp_mul, rule.exp_add, a.at);
      } else {
        fail_at("unknown nest key '" + key + "'", a.at);
      }
    }
    const auto first = static_cast<std::int64_t>(rule.start_level) + rule.index_offset;
    if (first < 1) fail_at("nest letters start below index 1", pos_);
    const auto& d = descriptor_at(static_cast<Index>(first), pos_);
    rule.element = base ? element(d, base->first, base->second) : GroupElement::from_integer(d, 1);
    Expr e;
    e.kind = Expr::Kind::Nest;
    e.nest = std::move(rule);
    return make(std::move(e));
  }

  ExprPtr eps() {
    Index start = 1;
    skip_ws();
    if (peek() == '[') {
      ++pos_;
      const auto at = pos_;
      start = natural("start index");
      if (start < 1) fail_at("eps starts at index >= 1", at);
      expect(']');
    }
    expect('(');
    const auto& d = descriptor_at(start, pos_);
    auto parse_list = [&](const std::vector<Item>& list, bool allow_dots) {
      std::vector<GroupElement> out;
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (allow_dots && k + 1 == list.size() && list[k].text == "...") break;
        out.push_back(element(d, list[k].text, list[k].at));
      }
      return out;
    };
    auto first = items('|', ')');
    const bool has_period = peek() == '|';
    ++pos_;
    if (first.size() == 1 && first[0].text.empty()) first.clear();
    Expr e;
    e.kind = Expr::Kind::Eps;
    if (has_period) {
      auto second = items(')', ')');
      ++pos_;
      if (second.size() == 1 && second[0].text.empty()) fail("eps period is empty");
      e.eps = EpsRule{start, CoordinateRule(parse_list(first, false), parse_list(second, false))};
    } else {
      auto coords = parse_list(first, true);
      if (coords.empty()) fail("eps needs at least one coordinate");
      e.eps = EpsRule{start, CoordinateRule::repeat_last(std::move(coords))};
    }
    return make(std::move(e));
  }

  std::string_view s_;
  const FamilySpec& spec_;
  std::size_t pos_ = 0;
};

std::string linear_text(std::int64_t mul, std::int64_t add) {
  std::string out;
  if (mul == 0) return std::to_string(add);
  if (mul == 1) out = "k";
  else if (mul == -1) out = "-k";
  else out = std::to_string(mul) + "*k";
  if (add > 0) out += "+" + std::to_string(add);
  if (add < 0) out += std::to_string(add);
  return out;
}

std::string join(const std::vector<GroupElement>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? "," : "") + format_element(xs[k]);
  return out;
}

bool is_atom(const Expr& e) { return e.kind != Expr::Kind::Product && e.kind != Expr::Kind::Power; }

}  // namespace

ExprPtr parse_expression(std::string_view text, const FamilySpec& spec) { return Parser(text, spec).run(); }

std::string format_expression(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Identity:
      return "1";
    case Expr::Kind::Letter:
      return "g" + std::to_string(e.letter->index) + ":" + format_element(e.letter->element);
    case Expr::Kind::Product: {
      std::string out;
      for (std::size_t k = 0; k < e.children.size(); ++k) {
        const auto& c = *e.children[k];
        if (k) out += ' ';
        out += c.kind == Expr::Kind::Product ? "(" + format_expression(c) + ")" : format_expression(c);
      }
      return out;
    }
    case Expr::Kind::Power: {
      const auto& c = *e.children[0];
      const auto base = is_atom(c) ? format_expression(c) : "(" + format_expression(c) + ")";
      return base + "^" + std::to_string(e.exponent);
    }
    case Expr::Kind::Inverse:
      return "inv(" + format_expression(*e.children[0]) + ")";
    case Expr::Kind::Tau:
      return "tau[" + std::to_string(e.param) + "](" + format_expression(*e.children[0]) + ")";
    case Expr::Kind::Project:
      return "p[" + std::to_string(e.param) + "](" + format_expression(*e.children[0]) + ")";
    case Expr::Kind::Nest: {
      const auto& r = *e.nest;
      std::string off;
      if (r.index_offset > 0) off = "+" + std::to_string(r.index_offset);
      if (r.index_offset < 0) off = std::to_string(r.index_offset);
      return "nest(k=" + std::to_string(r.start_level) + "..,base=g{k" + off + "}:" + format_element(r.element) +
             ",exp=" + linear_text(r.exp_mul, r.exp_add) + ")";
    }
    case Expr::Kind::Eps: {
      const auto& r = *e.eps;
      std::string out = "eps";
      if (r.start_index != 1) out += "[" + std::to_string(r.start_index) + "]";
      return out + "(" + join(r.coords.prefix()) + "|" + join(r.coords.period()) + ")";
    }
  }
  return {};
}

bool is_finite_expression(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Nest:
    case Expr::Kind::Eps:
      return false;
    case Expr::Kind::Project:
      return true;
    default:
      return std::all_of(e.children.begin(), e.children.end(),
                         [](const ExprPtr& c) { return is_finite_expression(*c); });
  }
}

ProjectiveWord evaluate(const Expr& e, const FamilySpec& spec) {
  switch (e.kind) {
    case Expr::Kind::Identity:
      return ProjectiveWord::identity(spec);
    case Expr::Kind::Letter: {
      const Letter raw[] = {*e.letter};
      return ProjectiveWord::finite(spec, reduce(raw, spec));
    }
    case Expr::Kind::Product: {
      std::vector<ProjectiveWord> parts;
      Index base = 0;
      for (const auto& c : e.children) {
        parts.push_back(evaluate(*c, spec));
        base = base ? std::min(base, parts.back().base_index()) : parts.back().base_index();
      }
      for (auto& p : parts)
        if (p.base_index() != base) p = with_base(p, base);
      return product(parts);
    }
    case Expr::Kind::Power:
      return power(evaluate(*e.children[0], spec), e.exponent);
    case Expr::Kind::Inverse:
      return inverse(evaluate(*e.children[0], spec));
    case Expr::Kind::Tau:
      return tau(e.param, evaluate(*e.children[0], spec));
    case Expr::Kind::Project: {
      const auto w = evaluate(*e.children[0], spec);
      return ProjectiveWord::finite(spec, w.projection(e.param), w.base_index());
    }
    case Expr::Kind::Nest:
      return ProjectiveWord::nest(spec, *e.nest);
    case Expr::Kind::Eps:
      return ProjectiveWord::epsilon(spec, *e.eps);
  }
  throw ContractError("unknown expression kind");
}

}  // namespace archipelago
