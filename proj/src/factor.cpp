#include "archipelago/factor.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>

namespace archipelago {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ResourceError("integer overflow in Z");
  return r;
}

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw ResourceError("rational overflow in Q");
  return static_cast<std::int64_t>(v);
}

Rational make_rational(__int128 num, __int128 den) {
  if (den == 0) throw ContractError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  if (num == 0) den = 1;
  return {narrow(num), narrow(den)};
}

void validate_table(const MultiplicationTable& t) {
  const std::size_t k = t.size();
  if (k == 0) throw ContractError("table group must have at least one element");
  for (const auto& row : t)
    if (row.size() != k) throw ContractError("table group rows must form a square");
  for (std::size_t i = 0; i < k; ++i) {
    if (t[0][i] != i || t[i][0] != i)
      throw ContractError("table group: row and column 0 must be the identity");
    std::vector<bool> row_seen(k, false), col_seen(k, false);
    for (std::size_t j = 0; j < k; ++j) {
      if (t[i][j] >= k || t[j][i] >= k) throw ContractError("table group: entry out of range");
      if (row_seen[t[i][j]] || col_seen[t[j][i]])
        throw ContractError("table group: not a Latin square");
      row_seen[t[i][j]] = true;
      col_seen[t[j][i]] = true;
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    bool has_inverse = false;
    for (std::size_t b = 0; b < k; ++b)
      if (t[a][b] == 0 && t[b][a] == 0) has_inverse = true;
    if (!has_inverse) throw ContractError("table group: element without two-sided inverse");
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t c = 0; c < k; ++c)
        if (t[t[a][b]][c] != t[a][t[b][c]])
          throw ContractError("table group: multiplication is not associative");
}

// Stack-based reduction shared by the generator-word kinds.
GeneratorWord reduce_free(const GeneratorWord& w) {
  GeneratorWord out;
  out.reserve(w.size());
  for (auto g : w) {
    if (!out.empty() && out.back() == -g)
      out.pop_back();
    else
      out.push_back(g);
  }
  return out;
}

GeneratorWord reduce_involutive(const GeneratorWord& w) {
  GeneratorWord out;
  out.reserve(w.size());
  for (auto g : w) {
    if (!out.empty() && out.back() == g)
      out.pop_back();
    else
      out.push_back(g);
  }
  return out;
}

void push_block_letter(BlockWord& out, BlockLetter letter) {
  if (letter.element.is_identity()) return;
  if (!out.empty() && out.back().local == letter.local) {
    GroupElement merged = group_op(out.back().element, letter.element);
    out.pop_back();
    if (!merged.is_identity()) out.push_back({letter.local, std::move(merged)});
  } else {
    out.push_back(std::move(letter));
  }
}

bool payload_equal(const GroupElement::Payload& a, const GroupElement::Payload& b) {
  if (a.index() != b.index()) return false;
  if (const auto* pa = std::get_if<std::shared_ptr<const BlockWord>>(&a)) {
    const auto& pb = std::get<std::shared_ptr<const BlockWord>>(b);
    return *pa == pb || **pa == *pb;
  }
  return a == b;
}

}  // namespace

// ---------------------------------------------------------------------------
// FactorDescriptor

FactorDescriptor FactorDescriptor::integers() { return {FactorKind::Integers, 0}; }

FactorDescriptor FactorDescriptor::cyclic(std::int64_t k) {
  if (k < 2) throw ContractError("Cyclic(k) requires k >= 2, got " + std::to_string(k));
  return {FactorKind::Cyclic, k};
}

FactorDescriptor FactorDescriptor::rationals() { return {FactorKind::Rationals, 0}; }

FactorDescriptor FactorDescriptor::free_group(std::uint32_t rank) {
  return {FactorKind::FreeGroup, rank};
}

FactorDescriptor FactorDescriptor::free_involutions(std::uint32_t rank) {
  return {FactorKind::FreeInvolutions, rank};
}

FactorDescriptor FactorDescriptor::table(MultiplicationTable rows) {
  validate_table(rows);
  FactorDescriptor d{FactorKind::Table, static_cast<std::int64_t>(rows.size())};
  d.table_ = std::make_shared<const MultiplicationTable>(std::move(rows));
  return d;
}

FactorDescriptor FactorDescriptor::free_product(std::vector<FactorDescriptor> factors) {
  if (factors.empty()) throw ContractError("free product needs at least one factor");
  FactorDescriptor d{FactorKind::FreeProduct, static_cast<std::int64_t>(factors.size())};
  d.factors_ = std::make_shared<const std::vector<FactorDescriptor>>(std::move(factors));
  return d;
}

std::int64_t FactorDescriptor::modulus() const {
  if (kind_ != FactorKind::Cyclic) throw ContractError("modulus() on non-cyclic factor " + name());
  return param_;
}

std::uint32_t FactorDescriptor::rank() const {
  if (kind_ != FactorKind::FreeGroup && kind_ != FactorKind::FreeInvolutions)
    throw ContractError("rank() on factor " + name());
  return static_cast<std::uint32_t>(param_);
}

const MultiplicationTable& FactorDescriptor::table() const {
  if (kind_ != FactorKind::Table) throw ContractError("table() on factor " + name());
  return *table_;
}

std::span<const FactorDescriptor> FactorDescriptor::factors() const {
  if (kind_ != FactorKind::FreeProduct) throw ContractError("factors() on factor " + name());
  return *factors_;
}

std::optional<std::uint64_t> FactorDescriptor::order() const {
  switch (kind_) {
    case FactorKind::Integers:
    case FactorKind::Rationals:
    case FactorKind::FreeGroup:
      return std::nullopt;
    case FactorKind::Cyclic:
    case FactorKind::Table:
      return static_cast<std::uint64_t>(param_);
    case FactorKind::FreeInvolutions:
      if (param_ == 1) return 2;
      return std::nullopt;
    case FactorKind::FreeProduct: {
      const FactorDescriptor* single = nullptr;
      int nontrivial = 0;
      for (const auto& f : *factors_)
        if (!f.is_trivial()) {
          ++nontrivial;
          single = &f;
        }
      if (nontrivial == 0) return 1;
      if (nontrivial == 1) return single->order();
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool FactorDescriptor::is_trivial() const {
  auto o = order();
  return o && *o == 1;
}

bool FactorDescriptor::has_involution() const {
  switch (kind_) {
    case FactorKind::Integers:
    case FactorKind::Rationals:
    case FactorKind::FreeGroup:
      return false;
    case FactorKind::Cyclic:
      return param_ % 2 == 0;
    case FactorKind::FreeInvolutions:
      return true;
    case FactorKind::Table:
      for (std::size_t a = 1; a < table_->size(); ++a)
        if ((*table_)[a][a] == 0) return true;
      return false;
    case FactorKind::FreeProduct:
      return std::any_of(factors_->begin(), factors_->end(),
                         [](const FactorDescriptor& f) { return f.has_involution(); });
  }
  return false;
}

std::string FactorDescriptor::name() const {
  switch (kind_) {
    case FactorKind::Integers:
      return "Z";
    case FactorKind::Rationals:
      return "Q";
    case FactorKind::Cyclic:
      return "C" + std::to_string(param_);
    case FactorKind::FreeGroup:
      return param_ == kCountable ? "F*" : "F" + std::to_string(param_);
    case FactorKind::FreeInvolutions:
      return param_ == kCountable ? "W*" : "W" + std::to_string(param_);
    case FactorKind::Table:
      return "T" + std::to_string(param_);
    case FactorKind::FreeProduct: {
      std::string s = "(";
      for (std::size_t i = 0; i < factors_->size(); ++i) {
        if (i) s += "*";
        s += (*factors_)[i].name();
      }
      return s + ")";
    }
  }
  return "?";
}

bool operator==(const FactorDescriptor& a, const FactorDescriptor& b) {
  if (a.kind_ != b.kind_ || a.param_ != b.param_) return false;
  if (a.kind_ == FactorKind::Table)
    return a.table_ == b.table_ || *a.table_ == *b.table_;
  if (a.kind_ == FactorKind::FreeProduct)
    return a.factors_ == b.factors_ || *a.factors_ == *b.factors_;
  return true;
}

// ---------------------------------------------------------------------------
// GroupElement

GroupElement GroupElement::identity(const FactorDescriptor& d) {
  switch (d.kind()) {
    case FactorKind::Integers:
    case FactorKind::Cyclic:
    case FactorKind::Table:
      return {d, std::int64_t{0}};
    case FactorKind::Rationals:
      return {d, Rational{}};
    case FactorKind::FreeGroup:
    case FactorKind::FreeInvolutions:
      return {d, GeneratorWord{}};
    case FactorKind::FreeProduct:
      return {d, std::make_shared<const BlockWord>()};
  }
  throw ContractError("unknown factor kind");
}

GroupElement GroupElement::from_integer(const FactorDescriptor& d, std::int64_t v) {
  switch (d.kind()) {
    case FactorKind::Integers:
      return {d, v};
    case FactorKind::Cyclic:
    case FactorKind::Table: {
      const std::int64_t k = d.kind() == FactorKind::Cyclic ? d.modulus()
                                                            : static_cast<std::int64_t>(d.table().size());
      if (v < 0 || v >= k)
        throw ContractError("value " + std::to_string(v) + " is not an element of " + d.name());
      return {d, v};
    }
    default:
      throw ContractError("integer payload for factor " + d.name());
  }
}

GroupElement GroupElement::from_rational(const FactorDescriptor& d, std::int64_t num,
                                         std::int64_t den) {
  if (d.kind() != FactorKind::Rationals) throw ContractError("rational payload for factor " + d.name());
  return {d, make_rational(num, den)};
}

GroupElement GroupElement::from_generators(const FactorDescriptor& d, GeneratorWord w) {
  const bool free = d.kind() == FactorKind::FreeGroup;
  if (!free && d.kind() != FactorKind::FreeInvolutions)
    throw ContractError("generator payload for factor " + d.name());
  const std::uint32_t rank = d.rank();
  for (auto& g : w) {
    if (g == 0) throw ContractError("generator index 0 in " + d.name());
    if (!free) g = g < 0 ? -g : g;
    const auto a = static_cast<std::uint32_t>(g < 0 ? -g : g);
    if (rank != FactorDescriptor::kCountable && a > rank)
      throw ContractError("generator " + std::to_string(a) + " exceeds rank of " + d.name());
  }
  return {d, free ? reduce_free(w) : reduce_involutive(w)};
}

GroupElement GroupElement::from_block(const FactorDescriptor& d, BlockWord w) {
  if (d.kind() != FactorKind::FreeProduct) throw ContractError("block payload for factor " + d.name());
  const auto factors = d.factors();
  BlockWord out;
  out.reserve(w.size());
  for (auto& letter : w) {
    if (letter.local < 1 || letter.local > factors.size())
      throw ContractError("block letter index " + std::to_string(letter.local) + " outside " + d.name());
    if (!(letter.element.descriptor() == factors[letter.local - 1]))
      throw ContractError("block letter descriptor mismatch in " + d.name());
    push_block_letter(out, std::move(letter));
  }
  return {d, std::make_shared<const BlockWord>(std::move(out))};
}

bool GroupElement::is_identity() const {
  return std::visit(
      [](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::int64_t>)
          return p == 0;
        else if constexpr (std::is_same_v<T, Rational>)
          return p.num == 0;
        else if constexpr (std::is_same_v<T, GeneratorWord>)
          return p.empty();
        else
          return p->empty();
      },
      payload_);
}

std::int64_t GroupElement::as_integer() const {
  if (auto* p = std::get_if<std::int64_t>(&payload_)) return *p;
  throw ContractError("element of " + desc_.name() + " has no integer payload");
}

const Rational& GroupElement::as_rational() const {
  if (auto* p = std::get_if<Rational>(&payload_)) return *p;
  throw ContractError("element of " + desc_.name() + " has no rational payload");
}

const GeneratorWord& GroupElement::as_generators() const {
  if (auto* p = std::get_if<GeneratorWord>(&payload_)) return *p;
  throw ContractError("element of " + desc_.name() + " has no generator payload");
}

const BlockWord& GroupElement::as_block() const {
  if (auto* p = std::get_if<std::shared_ptr<const BlockWord>>(&payload_)) return **p;
  throw ContractError("element of " + desc_.name() + " has no block payload");
}

bool operator==(const GroupElement& a, const GroupElement& b) {
  return payload_equal(a.payload_, b.payload_) && a.desc_ == b.desc_;
}

// ---------------------------------------------------------------------------
// Group operations

GroupElement group_op(const GroupElement& a, const GroupElement& b) {
  const FactorDescriptor& d = a.descriptor();
  if (!(d == b.descriptor()))
    throw ContractError("group_op: descriptor mismatch " + d.name() + " vs " + b.descriptor().name());
  switch (d.kind()) {
    case FactorKind::Integers:
      return GroupElement::from_integer(d, checked_add(a.as_integer(), b.as_integer()));
    case FactorKind::Cyclic:
      return GroupElement::from_integer(d, (a.as_integer() + b.as_integer()) % d.modulus());
    case FactorKind::Table:
      return GroupElement::from_integer(
          d, d.table()[static_cast<std::size_t>(a.as_integer())][static_cast<std::size_t>(b.as_integer())]);
    case FactorKind::Rationals: {
      const Rational& x = a.as_rational();
      const Rational& y = b.as_rational();
      const Rational r = make_rational(static_cast<__int128>(x.num) * y.den + static_cast<__int128>(y.num) * x.den,
                                       static_cast<__int128>(x.den) * y.den);
      return GroupElement::from_rational(d, r.num, r.den);
    }
    case FactorKind::FreeGroup:
    case FactorKind::FreeInvolutions: {
      GeneratorWord w = a.as_generators();
      const auto& v = b.as_generators();
      w.insert(w.end(), v.begin(), v.end());
      return GroupElement::from_generators(d, std::move(w));
    }
    case FactorKind::FreeProduct: {
      BlockWord out = a.as_block();
      for (const auto& letter : b.as_block()) push_block_letter(out, letter);
      return GroupElement::from_block(d, std::move(out));
    }
  }
  throw ContractError("unknown factor kind");
}

GroupElement group_inverse(const GroupElement& a) {
  const FactorDescriptor& d = a.descriptor();
  switch (d.kind()) {
    case FactorKind::Integers:
      if (a.as_integer() == std::numeric_limits<std::int64_t>::min())
        throw ResourceError("integer overflow in Z");
      return GroupElement::from_integer(d, -a.as_integer());
    case FactorKind::Cyclic:
      return GroupElement::from_integer(d, (d.modulus() - a.as_integer()) % d.modulus());
    case FactorKind::Table: {
      const auto& t = d.table();
      const auto x = static_cast<std::size_t>(a.as_integer());
      for (std::size_t y = 0; y < t.size(); ++y)
        if (t[x][y] == 0) return GroupElement::from_integer(d, static_cast<std::int64_t>(y));
      throw ContractError("table element without inverse");
    }
    case FactorKind::Rationals: {
      const Rational& r = a.as_rational();
      return GroupElement::from_rational(d, -r.num, r.den);
    }
    case FactorKind::FreeGroup: {
      GeneratorWord w(a.as_generators().rbegin(), a.as_generators().rend());
      for (auto& g : w) g = -g;
      return GroupElement::from_generators(d, std::move(w));
    }
    case FactorKind::FreeInvolutions:
      return GroupElement::from_generators(
          d, GeneratorWord(a.as_generators().rbegin(), a.as_generators().rend()));
    case FactorKind::FreeProduct: {
      BlockWord w;
      const auto& src = a.as_block();
      w.reserve(src.size());
      for (auto it = src.rbegin(); it != src.rend(); ++it)
        w.push_back({it->local, group_inverse(it->element)});
      return GroupElement::from_block(d, std::move(w));
    }
  }
  throw ContractError("unknown factor kind");
}

GroupElement group_power(const GroupElement& a, std::int64_t m) {
  GroupElement base = m < 0 ? group_inverse(a) : a;
  std::uint64_t e = m < 0 ? static_cast<std::uint64_t>(-(m + 1)) + 1 : static_cast<std::uint64_t>(m);
  GroupElement result = GroupElement::identity(a.descriptor());
  while (e) {
    if (e & 1) result = group_op(result, base);
    e >>= 1;
    if (e) base = group_op(base, base);
  }
  return result;
}

std::optional<std::uint64_t> element_order(const GroupElement& a) {
  if (a.is_identity()) return 1;
  const FactorDescriptor& d = a.descriptor();
  switch (d.kind()) {
    case FactorKind::Integers:
    case FactorKind::Rationals:
    case FactorKind::FreeGroup:
      return std::nullopt;
    case FactorKind::Cyclic: {
      const auto k = static_cast<std::uint64_t>(d.modulus());
      return k / std::gcd(k, static_cast<std::uint64_t>(a.as_integer()));
    }
    case FactorKind::Table: {
      const auto& t = d.table();
      const auto g = static_cast<std::size_t>(a.as_integer());
      std::size_t x = g;
      std::uint64_t n = 1;
      while (x != 0) {
        x = t[x][g];
        ++n;
      }
      return n;
    }
    case FactorKind::FreeInvolutions: {
      const auto& w = a.as_generators();
      if (std::equal(w.begin(), w.end(), w.rbegin())) return 2;
      return std::nullopt;
    }
    case FactorKind::FreeProduct: {
      // Cyclically reduce, then only a single-letter core can have finite order.
      BlockWord core = a.as_block();
      while (core.size() >= 2 && core.front().local == core.back().local) {
        GroupElement merged = group_op(core.back().element, core.front().element);
        const auto local = core.front().local;
        BlockWord next(core.begin() + 1, core.end() - 1);
        if (!merged.is_identity()) next.push_back({local, std::move(merged)});
        core = std::move(next);
      }
      if (core.empty()) return 1;
      if (core.size() == 1) return element_order(core.front().element);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool is_involution(const GroupElement& a) {
  if (a.is_identity()) return false;
  return group_op(a, a).is_identity();
}

// ---------------------------------------------------------------------------
// Literals

namespace {

[[noreturn]] void bad_literal(const FactorDescriptor& d, std::string_view text, const std::string& why) {
  throw ParseError("element literal '" + std::string(text) + "' is not valid for " + d.name() + ": " + why);
}

std::int64_t parse_int(const FactorDescriptor& d, std::string_view full, std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) bad_literal(d, full, "expected an integer");
  return v;
}

GeneratorWord parse_generators(const FactorDescriptor& d, std::string_view text, char letter) {
  GeneratorWord w;
  if (text == "e") return w;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != letter) bad_literal(d, text, std::string("expected '") + letter + "<n>'");
    ++i;
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) bad_literal(d, text, "missing generator number");
    const auto g = parse_int(d, text, text.substr(i, j - i));
    if (g < 1 || g > std::numeric_limits<std::int32_t>::max()) bad_literal(d, text, "generator number out of range");
    i = j;
    bool inverse = false;
    if (i < text.size() && text[i] == '\'') {
      if (letter != 'x') bad_literal(d, text, "inverse marks are only used in free groups");
      inverse = true;
      ++i;
    }
    w.push_back(inverse ? -static_cast<std::int32_t>(g) : static_cast<std::int32_t>(g));
  }
  return w;
}

std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    if (s[i] == '}') --depth;
    if (s[i] == ',' && depth == 0) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

}  // namespace

GroupElement parse_element(const FactorDescriptor& d, std::string_view text) {
  try {
    switch (d.kind()) {
      case FactorKind::Integers:
        return GroupElement::from_integer(d, parse_int(d, text, text));
      case FactorKind::Cyclic:
      case FactorKind::Table:
        return GroupElement::from_integer(d, parse_int(d, text, text));
      case FactorKind::Rationals: {
        const auto slash = text.find('/');
        if (slash == std::string_view::npos) return GroupElement::from_rational(d, parse_int(d, text, text), 1);
        const auto num = parse_int(d, text, text.substr(0, slash));
        const auto den = parse_int(d, text, text.substr(slash + 1));
        if (den <= 0) bad_literal(d, text, "denominator must be positive");
        return GroupElement::from_rational(d, num, den);
      }
      case FactorKind::FreeGroup:
        return GroupElement::from_generators(d, parse_generators(d, text, 'x'));
      case FactorKind::FreeInvolutions:
        return GroupElement::from_generators(d, parse_generators(d, text, 'y'));
      case FactorKind::FreeProduct: {
        if (text.size() < 2 || text.front() != '{' || text.back() != '}')
          bad_literal(d, text, "expected {local:literal,...}");
        const auto body = text.substr(1, text.size() - 2);
        BlockWord w;
        if (!body.empty()) {
          for (auto part : split_top_level(body)) {
            const auto colon = part.find(':');
            if (colon == std::string_view::npos) bad_literal(d, text, "expected local:literal");
            const auto local = parse_int(d, text, part.substr(0, colon));
            if (local < 1 || static_cast<std::size_t>(local) > d.factors().size())
              bad_literal(d, text, "local index out of range");
            w.push_back({static_cast<std::uint32_t>(local),
                         parse_element(d.factors()[static_cast<std::size_t>(local) - 1], part.substr(colon + 1))});
          }
        }
        return GroupElement::from_block(d, std::move(w));
      }
    }
  } catch (const ContractError& e) {
    bad_literal(d, text, e.what());
  }
  bad_literal(d, text, "unknown factor kind");
}

std::string format_element(const GroupElement& a) {
  const FactorDescriptor& d = a.descriptor();
  switch (d.kind()) {
    case FactorKind::Integers:
    case FactorKind::Cyclic:
    case FactorKind::Table:
      return std::to_string(a.as_integer());
    case FactorKind::Rationals: {
      const auto& r = a.as_rational();
      if (r.den == 1) return std::to_string(r.num);
      return std::to_string(r.num) + "/" + std::to_string(r.den);
    }
    case FactorKind::FreeGroup:
    case FactorKind::FreeInvolutions: {
      const auto& w = a.as_generators();
      if (w.empty()) return "e";
      const char letter = d.kind() == FactorKind::FreeGroup ? 'x' : 'y';
      std::string s;
      for (auto g : w) {
        s += letter;
        s += std::to_string(g < 0 ? -g : g);
        if (g < 0) s += '\'';
      }
      return s;
    }
    case FactorKind::FreeProduct: {
      std::string s = "{";
      bool first = true;
      for (const auto& letter : a.as_block()) {
        if (!first) s += ",";
        first = false;
        s += std::to_string(letter.local) + ":" + format_element(letter.element);
      }
      return s + "}";
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Enumeration

class ElementEnumerator::Impl {
 public:
  virtual ~Impl() = default;
  virtual std::optional<GroupElement> next() = 0;
};

namespace {

class CountingEnumerator final : public ElementEnumerator::Impl {
 public:
  explicit CountingEnumerator(FactorDescriptor d) : d_(std::move(d)), size_(static_cast<std::int64_t>(*d_.order())) {}
  std::optional<GroupElement> next() override {
    if (i_ >= size_) return std::nullopt;
    return GroupElement::from_integer(d_, i_++);
  }

 private:
  FactorDescriptor d_;
  std::int64_t size_;
  std::int64_t i_ = 0;
};

// 0, 1, -1, 2, -2, ...
class IntegerEnumerator final : public ElementEnumerator::Impl {
 public:
  explicit IntegerEnumerator(FactorDescriptor d) : d_(std::move(d)) {}
  std::optional<GroupElement> next() override {
    const std::uint64_t k = n_++;
    const auto mag = static_cast<std::int64_t>((k + 1) / 2);
    return GroupElement::from_integer(d_, k % 2 == 1 ? mag : -mag);
  }

 private:
  FactorDescriptor d_;
  std::uint64_t n_ = 0;
};

// 0, then by height max(|p|, q); within a height by q, then |p|, sign + before -.
class RationalEnumerator final : public ElementEnumerator::Impl {
 public:
  explicit RationalEnumerator(FactorDescriptor d) : d_(std::move(d)) {}
  std::optional<GroupElement> next() override {
    if (!started_) {
      started_ = true;
      return GroupElement::identity(d_);
    }
    while (pos_ >= batch_.size()) fill_next_height();
    return batch_[pos_++];
  }

 private:
  void fill_next_height() {
    ++height_;
    batch_.clear();
    pos_ = 0;
    const std::int64_t h = height_;
    for (std::int64_t q = 1; q <= h; ++q) {
      auto emit = [&](std::int64_t p) {
        if (std::gcd(p, q) != 1) return;
        batch_.push_back(GroupElement::from_rational(d_, p, q));
        batch_.push_back(GroupElement::from_rational(d_, -p, q));
      };
      if (q < h) {
        emit(h);
      } else {
        for (std::int64_t p = 1; p <= h; ++p) emit(p);
      }
    }
  }

  FactorDescriptor d_;
  bool started_ = false;
  std::int64_t height_ = 0;
  std::vector<GroupElement> batch_;
  std::size_t pos_ = 0;
};

// Length-lexicographic reduced words. Finite rank: breadth-first by length.
// Countable rank: stage s lists the reduced words of length <= s over the
// first s generators that were not listed in an earlier stage.
class GeneratorWordEnumerator final : public ElementEnumerator::Impl {
 public:
  explicit GeneratorWordEnumerator(FactorDescriptor d)
      : d_(std::move(d)), free_(d_.kind() == FactorKind::FreeGroup), rank_(d_.rank()) {}

  std::optional<GroupElement> next() override {
    if (!started_) {
      started_ = true;
      return GroupElement::identity(d_);
    }
    while (pos_ >= batch_.size()) {
      if (!advance()) return std::nullopt;
    }
    return GroupElement::from_generators(d_, batch_[pos_++]);
  }

 private:
  std::vector<std::int32_t> alphabet(std::uint32_t gens) const {
    std::vector<std::int32_t> a;
    for (std::uint32_t g = 1; g <= gens; ++g) {
      a.push_back(static_cast<std::int32_t>(g));
      if (free_) a.push_back(-static_cast<std::int32_t>(g));
    }
    return a;
  }

  bool allowed(const GeneratorWord& w, std::int32_t g) const {
    if (w.empty()) return true;
    return free_ ? w.back() != -g : w.back() != g;
  }

  std::vector<GeneratorWord> extend(const std::vector<GeneratorWord>& level,
                                    const std::vector<std::int32_t>& alpha) const {
    std::vector<GeneratorWord> out;
    for (const auto& w : level)
      for (auto g : alpha)
        if (allowed(w, g)) {
          auto v = w;
          v.push_back(g);
          out.push_back(std::move(v));
        }
    return out;
  }

  bool advance() {
    batch_.clear();
    pos_ = 0;
    if (rank_ != FactorDescriptor::kCountable) {
      if (level_.empty() && length_ > 0) return false;
      level_ = extend(length_ == 0 ? std::vector<GeneratorWord>{GeneratorWord{}} : level_, alphabet(rank_));
      ++length_;
      batch_ = level_;
      return !batch_.empty();
    }
    ++stage_;
    const auto s = static_cast<std::int32_t>(stage_);
    const auto alpha = alphabet(stage_);
    std::vector<GeneratorWord> level{GeneratorWord{}};
    for (std::int32_t len = 1; len <= s; ++len) {
      level = extend(level, alpha);
      for (const auto& w : level) {
        const bool uses_new = std::any_of(w.begin(), w.end(), [&](std::int32_t g) { return std::abs(g) == s; });
        if (len == s || uses_new) batch_.push_back(w);
      }
    }
    return true;
  }

  FactorDescriptor d_;
  bool free_;
  std::uint32_t rank_;
  bool started_ = false;
  std::vector<GeneratorWord> level_;
  std::size_t length_ = 0;
  std::uint32_t stage_ = 0;
  std::vector<GeneratorWord> batch_;
  std::size_t pos_ = 0;
};

// Stage s lists block words of at most s syllables whose letters are among
// the first s non-identity elements of their factor, skipping those listed
// at an earlier stage.
class FreeProductEnumerator final : public ElementEnumerator::Impl {
 public:
  explicit FreeProductEnumerator(FactorDescriptor d) : d_(std::move(d)) {
    const auto factors = d_.factors();
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (!factors[i].is_trivial()) nontrivial_.push_back(static_cast<std::uint32_t>(i + 1));
      subs_.emplace_back(factors[i]);
      elements_.emplace_back();
      exhausted_.push_back(false);
      subs_.back().next();  // skip identity
    }
  }

  std::optional<GroupElement> next() override {
    if (!started_) {
      started_ = true;
      return GroupElement::identity(d_);
    }
    if (nontrivial_.size() < 2) {
      // At most one non-trivial factor: the block group is that factor.
      if (nontrivial_.empty()) return std::nullopt;
      const auto local = nontrivial_.front();
      auto e = subs_[local - 1].next();
      if (!e) return std::nullopt;
      return GroupElement::from_block(d_, {{local, std::move(*e)}});
    }
    while (pos_ >= batch_.size()) advance();
    return GroupElement::from_block(d_, batch_[pos_++]);
  }

 private:
  const std::vector<GroupElement>& first(std::uint32_t local, std::size_t count) {
    auto& cache = elements_[local - 1];
    while (cache.size() < count && !exhausted_[local - 1]) {
      auto e = subs_[local - 1].next();
      if (!e) {
        exhausted_[local - 1] = true;
        break;
      }
      cache.push_back(std::move(*e));
    }
    return cache;
  }

  void advance() {
    ++stage_;
    batch_.clear();
    pos_ = 0;
    const std::size_t s = stage_;
    bool fresh = false;  // some factor contributes its s-th element at this stage
    for (auto local : nontrivial_) fresh = first(local, s).size() >= s || fresh;
    BlockWord current;
    for (std::size_t len = fresh ? 1 : s; len <= s; ++len) build(current, len, s, false);
  }

  void build(BlockWord& current, std::size_t len, std::size_t s, bool used_new) {
    if (current.size() == len) {
      if (len == s || used_new) batch_.push_back(current);
      return;
    }
    for (auto local : nontrivial_) {
      if (!current.empty() && current.back().local == local) continue;
      const auto& cache = elements_[local - 1];
      const std::size_t avail = std::min(cache.size(), s);
      for (std::size_t r = 0; r < avail; ++r) {
        current.push_back({local, cache[r]});
        build(current, len, s, used_new || r + 1 == s);
        current.pop_back();
      }
    }
  }

  FactorDescriptor d_;
  std::vector<std::uint32_t> nontrivial_;
  std::vector<ElementEnumerator> subs_;
  std::vector<std::vector<GroupElement>> elements_;
  std::vector<bool> exhausted_;
  bool started_ = false;
  std::size_t stage_ = 0;
  std::vector<BlockWord> batch_;
  std::size_t pos_ = 0;
};

}  // namespace

ElementEnumerator::ElementEnumerator(FactorDescriptor d) {
  switch (d.kind()) {
    case FactorKind::Cyclic:
    case FactorKind::Table:
      impl_ = std::make_unique<CountingEnumerator>(std::move(d));
      break;
    case FactorKind::Integers:
      impl_ = std::make_unique<IntegerEnumerator>(std::move(d));
      break;
    case FactorKind::Rationals:
      impl_ = std::make_unique<RationalEnumerator>(std::move(d));
      break;
    case FactorKind::FreeGroup:
    case FactorKind::FreeInvolutions:
      impl_ = std::make_unique<GeneratorWordEnumerator>(std::move(d));
      break;
    case FactorKind::FreeProduct:
      impl_ = std::make_unique<FreeProductEnumerator>(std::move(d));
      break;
  }
}

ElementEnumerator::~ElementEnumerator() = default;
ElementEnumerator::ElementEnumerator(ElementEnumerator&&) noexcept = default;
ElementEnumerator& ElementEnumerator::operator=(ElementEnumerator&&) noexcept = default;

std::optional<GroupElement> ElementEnumerator::next() { return impl_->next(); }

std::vector<GroupElement> enumerate(const FactorDescriptor& d, std::size_t limit) {
  if (limit < 1) throw ContractError("enumerate: limit must be >= 1");
  std::vector<GroupElement> out;
  ElementEnumerator it(d);
  while (out.size() < limit) {
    auto e = it.next();
    if (!e) break;
    out.push_back(std::move(*e));
  }
  return out;
}

}  // namespace archipelago
