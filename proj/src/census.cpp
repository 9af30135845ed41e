#include "archipelago/census.hpp"

#include <set>

namespace archipelago {

WordEnumerator::WordEnumerator(const FamilySpec& spec, Index max_index, std::size_t max_syllables,
                               std::optional<std::size_t> per_factor_limit)
    : max_syllables_(max_syllables) {
  if (max_syllables == 0) return;
  for (Index i = 1; i <= max_index; ++i) {
    const auto& d = spec.at(i);
    std::size_t take;
    if (per_factor_limit) {
      take = *per_factor_limit;
    } else {
      const auto order = d.order();
      if (!order)
        throw UnsupportedError("exhaustive word enumeration over infinite factor " + d.name() + " at index " +
                               std::to_string(i));
      take = static_cast<std::size_t>(*order) - 1;
    }
    if (take == 0) continue;
    const auto elements = enumerate(d, take + 1);
    for (std::size_t r = 1; r < elements.size(); ++r) choices_.push_back({i, elements[r]});
  }
}

bool WordEnumerator::fill_from(std::size_t position) {
  for (std::size_t p = position; p < length_; ++p) {
    bool found = false;
    for (std::size_t c = 0; c < choices_.size(); ++c) {
      if (p > 0 && choices_[c].index == choices_[cursor_[p - 1]].index) continue;
      cursor_[p] = c;
      found = true;
      break;
    }
    if (!found) return false;
  }
  return true;
}

bool WordEnumerator::advance() {
  for (std::size_t p = length_; p-- > 0;) {
    for (std::size_t c = cursor_[p] + 1; c < choices_.size(); ++c) {
      if (p > 0 && choices_[c].index == choices_[cursor_[p - 1]].index) continue;
      cursor_[p] = c;
      if (fill_from(p + 1)) return true;
    }
  }
  if (length_ >= max_syllables_) return false;
  ++length_;
  cursor_.assign(length_, 0);
  return fill_from(0);
}

FiniteWord WordEnumerator::current_word() const {
  std::vector<Letter> letters;
  letters.reserve(length_);
  for (std::size_t p = 0; p < length_; ++p)
    letters.push_back({choices_[cursor_[p]].index, choices_[cursor_[p]].element});
  return FiniteWord::from_reduced(std::move(letters));
}

std::optional<FiniteWord> WordEnumerator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    return FiniteWord{};
  }
  if (choices_.empty() || !advance()) {
    done_ = true;
    return std::nullopt;
  }
  return current_word();
}

std::vector<FiniteWord> enumerate_words(const FamilySpec& spec, Index max_index, std::size_t max_syllables,
                                        std::optional<std::size_t> per_factor_limit) {
  WordEnumerator it(spec, max_index, max_syllables, per_factor_limit);
  std::vector<FiniteWord> out;
  while (auto w = it.next()) out.push_back(std::move(*w));
  return out;
}

namespace {

bool pairwise_distinct(const std::vector<FiniteWord>& words) {
  std::set<std::string> seen;
  for (const auto& w : words)
    if (!seen.insert(format_word(w)).second) return false;
  return true;
}

}  // namespace

FamilyCheck involution_families(const Letter& g, const Letter& h, const Letter& a, std::size_t count) {
  if (g.element.is_identity() || h.element.is_identity())
    throw ContractError("involution families need non-identity g and h");
  if (g.index == h.index) throw ContractError("involution families need g and h from distinct factors");
  if (!is_involution(a.element)) throw ContractError("involution families need an involution a");

  FamilyCheck check;
  check.count = count;
  const std::vector<Letter> raw{g, h};
  const FiniteWord gh = reduce(raw);
  const FiniteWord a_word = reduce(std::span<const Letter>(&a, 1));

  FiniteWord p;  // (gh)^n, built incrementally
  for (std::size_t n = 0; n < count; ++n) {
    check.conjugates.push_back(concat(concat(p, a_word), invert(p)));
    p = concat(p, gh);
    check.powers.push_back(p);
  }
  check.powers_distinct = pairwise_distinct(check.powers);
  check.conjugates_distinct = pairwise_distinct(check.conjugates);
  check.powers_non_involutions = true;
  for (const auto& w : check.powers)
    if (concat(w, w).empty()) check.powers_non_involutions = false;
  check.conjugates_involutions = true;
  for (const auto& w : check.conjugates)
    if (!is_involution(w)) check.conjugates_involutions = false;
  return check;
}

InvolutionCensus involution_census(const FamilySpec& spec, std::size_t max_syllables,
                                   std::optional<Index> max_index, const std::optional<FamilyParams>& families) {
  InvolutionCensus census;
  census.max_syllables = max_syllables;
  if (max_index) {
    census.max_index = *max_index;
  } else {
    if (!spec.is_finite())
      throw ContractError("involution census over an infinite family needs an explicit max index");
    census.max_index = static_cast<Index>(spec.size());
  }
  for (Index i = 1; i <= census.max_index; ++i)
    if (!spec.at(i).order())
      throw UnsupportedError("involution census needs finite factors; G_" + std::to_string(i) + " is " +
                             spec.at(i).name());

  WordEnumerator it(spec, census.max_index, max_syllables);
  while (auto w = it.next()) {
    ++census.words;
    if (w->empty()) continue;
    if (is_involution(*w)) {
      ++census.involutions;
      census.involution_words.push_back(std::move(*w));
    } else {
      ++census.non_involutions;
    }
  }
  if (families) census.families = involution_families(families->g, families->h, families->a, families->count);
  return census;
}

}  // namespace archipelago
