#include "archipelago/word.hpp"

namespace archipelago {

namespace {

bool cancels(const Letter& a, const Letter& b) {
  return a.index == b.index && group_op(a.element, b.element).is_identity();
}

}  // namespace

FiniteWord FiniteWord::from_reduced(std::vector<Letter> letters) {
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (letters[i].index < 1) throw ContractError("letter index must be >= 1");
    if (letters[i].element.is_identity())
      throw ContractError("reduced word contains an identity letter at position " + std::to_string(i));
    if (i > 0 && letters[i - 1].index == letters[i].index)
      throw ContractError("reduced word has two consecutive letters from G_" + std::to_string(letters[i].index));
  }
  return FiniteWord(Trusted{}, std::move(letters));
}

Index FiniteWord::max_index() const {
  Index m = 0;
  for (const auto& l : letters_) m = std::max(m, l.index);
  return m;
}

Index FiniteWord::min_index() const {
  if (letters_.empty()) return 0;
  Index m = letters_.front().index;
  for (const auto& l : letters_) m = std::min(m, l.index);
  return m;
}

// ---------------------------------------------------------------------------

void WordBuilder::push(Letter&& letter) {
  if (letter.index < 1) throw ContractError("letter index must be >= 1");
  if (letter.element.is_identity()) return;
  if (!letters_.empty() && letters_.back().index == letter.index) {
    GroupElement merged = group_op(letters_.back().element, letter.element);
    if (merged.is_identity())
      letters_.pop_back();
    else
      letters_.back().element = std::move(merged);
    return;
  }
  letters_.push_back(std::move(letter));
}

void WordBuilder::push(const Letter& letter) { push(Letter(letter)); }

void WordBuilder::append(const FiniteWord& w) {
  for (const auto& l : w.letters()) push(l);
}

FiniteWord WordBuilder::finish() && { return FiniteWord(FiniteWord::Trusted{}, std::move(letters_)); }

// ---------------------------------------------------------------------------

FiniteWord reduce(std::span<const Letter> raw) {
  WordBuilder b;
  b.reserve(raw.size());
  for (const auto& l : raw) b.push(l);
  return std::move(b).finish();
}

FiniteWord reduce(std::span<const Letter> raw, const FamilySpec& spec) {
  for (const auto& l : raw) {
    if (!(l.element.descriptor() == spec.at(l.index)))
      throw ContractError("letter at index " + std::to_string(l.index) + " carries " +
                          l.element.descriptor().name() + " but the family has " + spec.at(l.index).name());
  }
  return reduce(raw);
}

FiniteWord concat(const FiniteWord& u, const FiniteWord& v) {
  const auto a = u.letters();
  const auto b = v.letters();
  // x = maximal terminal subword of u whose inverse starts v.
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && cancels(a[a.size() - 1 - k], b[k])) ++k;

  std::vector<Letter> out(a.begin(), a.end() - static_cast<std::ptrdiff_t>(k));
  std::size_t next = k;
  // Boundary letters g1, g2 from the same factor merge; an identity merge
  // exposes the next pair.
  while (!out.empty() && next < b.size() && out.back().index == b[next].index) {
    GroupElement merged = group_op(out.back().element, b[next].element);
    ++next;
    if (merged.is_identity()) {
      out.pop_back();
      continue;
    }
    out.back().element = std::move(merged);
    break;
  }
  out.reserve(out.size() + b.size() - next);
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(next), b.end());
  WordBuilder builder;
  builder.reserve(out.size());
  for (auto& l : out) builder.push(std::move(l));
  return std::move(builder).finish();
}

FiniteWord invert(const FiniteWord& u) {
  std::vector<Letter> out;
  out.reserve(u.size());
  for (auto it = u.letters().rbegin(); it != u.letters().rend(); ++it)
    out.push_back({it->index, group_inverse(it->element)});
  return FiniteWord::from_reduced(std::move(out));
}

FiniteWord power(const FiniteWord& u, std::int64_t m) {
  if (m == 0 || u.empty()) return {};
  FiniteWord base = m < 0 ? invert(u) : u;
  std::uint64_t e = m < 0 ? static_cast<std::uint64_t>(-(m + 1)) + 1 : static_cast<std::uint64_t>(m);
  FiniteWord result;
  while (e) {
    if (e & 1) result = concat(result, base);
    e >>= 1;
    if (e) base = concat(base, base);
  }
  return result;
}

FiniteWord project_keep(const FiniteWord& u, const IndexPredicate& keep) {
  WordBuilder b;
  for (const auto& l : u.letters())
    if (keep(l.index)) b.push(l);
  return std::move(b).finish();
}

FiniteWord project_upto(const FiniteWord& u, Index n) {
  WordBuilder b;
  for (const auto& l : u.letters())
    if (l.index <= n) b.push(l);
  return std::move(b).finish();
}

FiniteWord project_above(const FiniteWord& u, Index j) {
  WordBuilder b;
  for (const auto& l : u.letters())
    if (l.index > j) b.push(l);
  return std::move(b).finish();
}

CyclicReduction cyclic_reduce(const FiniteWord& u) {
  std::vector<Letter> core(u.letters().begin(), u.letters().end());
  WordBuilder conjugator;
  // core = f·m·l with f, l in one factor  ==>  core ~ m·(l f) conjugated by f.
  while (core.size() >= 2 && core.front().index == core.back().index) {
    const Letter f = core.front();
    GroupElement merged = group_op(core.back().element, f.element);
    std::vector<Letter> next(core.begin() + 1, core.end() - 1);
    if (!merged.is_identity()) next.push_back({f.index, std::move(merged)});
    core = std::move(next);
    conjugator.push(f);
  }
  return {FiniteWord::from_reduced(std::move(core)), std::move(conjugator).finish()};
}

std::optional<TorsionWitness> torsion_witness(const FiniteWord& u) {
  auto cr = cyclic_reduce(u);
  if (cr.core.size() != 1) return std::nullopt;
  const auto order = element_order(cr.core.front().element);
  if (!order || *order <= 1) return std::nullopt;
  return TorsionWitness{std::move(cr.conjugator), cr.core.front(), *order};
}

bool is_involution(const FiniteWord& u) { return !u.empty() && concat(u, u).empty(); }

std::string format_word(const FiniteWord& u) {
  if (u.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) s += "·";
    s += "g" + std::to_string(u[i].index) + ":" + format_element(u[i].element);
  }
  return s;
}

}  // namespace archipelago
