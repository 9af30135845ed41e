#pragma once

// Test-only oracles and generators. Nothing here calls the word reduction,
// projection or schema code it is used to check.

#include <algorithm>
#include <array>
#include <ostream>
#include <random>
#include <vector>

#include "archipelago/family.hpp"
#include "archipelago/word.hpp"

namespace archipelago {

inline void PrintTo(const FiniteWord& w, std::ostream* os) { *os << format_word(w); }

}  // namespace archipelago

namespace archipelago::testing {

/// S3 as a multiplication table built by composing permutations of {0,1,2}.
/// Element order: e, (01), (02), (12), (012), (021).
inline MultiplicationTable s3_table() {
  const std::array<std::array<int, 3>, 6> perms{{
      {0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1},
  }};
  MultiplicationTable t(6, std::vector<std::uint32_t>(6));
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int x = 0; x < 3; ++x) c[x] = perms[a][perms[b][x]];
      for (std::size_t k = 0; k < 6; ++k)
        if (perms[k] == c) t[a][b] = static_cast<std::uint32_t>(k);
    }
  return t;
}

inline FactorDescriptor s3() { return FactorDescriptor::table(s3_table()); }

/// Rewrite to a fixpoint: repeatedly delete the leftmost identity letter or
/// merge the leftmost same-factor pair.
inline std::vector<Letter> naive_reduce(std::vector<Letter> w) {
  for (;;) {
    bool changed = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i].element.is_identity()) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
      if (i + 1 < w.size() && w[i].index == w[i + 1].index) {
        w[i].element = group_op(w[i].element, w[i + 1].element);
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        changed = true;
        break;
      }
    }
    if (!changed) return w;
  }
}

/// Single left-to-right pass with a stack; for raw words too long for the
/// quadratic rewrite oracle.
inline std::vector<Letter> stack_reduce(const std::vector<Letter>& raw) {
  std::vector<Letter> st;
  for (const auto& l : raw) {
    if (l.element.is_identity()) continue;
    if (!st.empty() && st.back().index == l.index) {
      GroupElement g = group_op(st.back().element, l.element);
      if (g.is_identity())
        st.pop_back();
      else
        st.back().element = g;
    } else {
      st.push_back(l);
    }
  }
  return st;
}

inline bool same_letters(const FiniteWord& u, const std::vector<Letter>& v) {
  return std::equal(u.letters().begin(), u.letters().end(), v.begin(), v.end());
}

inline std::vector<Letter> letters_of(const FiniteWord& u) { return {u.letters().begin(), u.letters().end()}; }

/// Mixed family used by the random reduction checks.
inline FamilySpec mixed_family() {
  return FamilySpec({FactorDescriptor::integers(), FactorDescriptor::cyclic(2), FactorDescriptor::cyclic(3),
                     FactorDescriptor::cyclic(5), s3(), FactorDescriptor::rationals()});
}

inline GroupElement random_element(const FactorDescriptor& d, std::mt19937_64& rng, bool allow_identity) {
  for (;;) {
    GroupElement e = GroupElement::identity(d);
    switch (d.kind()) {
      case FactorKind::Integers:
        e = GroupElement::from_integer(d, std::uniform_int_distribution<int>(-3, 3)(rng));
        break;
      case FactorKind::Cyclic:
        e = GroupElement::from_integer(d, std::uniform_int_distribution<std::int64_t>(0, d.modulus() - 1)(rng));
        break;
      case FactorKind::Table:
        e = GroupElement::from_integer(
            d, std::uniform_int_distribution<std::int64_t>(0, static_cast<std::int64_t>(d.table().size()) - 1)(rng));
        break;
      case FactorKind::Rationals:
        e = GroupElement::from_rational(d, std::uniform_int_distribution<int>(-3, 3)(rng),
                                        std::uniform_int_distribution<int>(1, 3)(rng));
        break;
      case FactorKind::FreeGroup: {
        GeneratorWord w;
        const int len = std::uniform_int_distribution<int>(0, 3)(rng);
        const int rank = d.rank() == FactorDescriptor::kCountable ? 3 : static_cast<int>(d.rank());
        for (int i = 0; i < len; ++i) {
          int g = std::uniform_int_distribution<int>(1, rank)(rng);
          w.push_back(std::bernoulli_distribution(0.5)(rng) ? g : -g);
        }
        e = GroupElement::from_generators(d, w);
        break;
      }
      default:
        e = GroupElement::identity(d);
        break;
    }
    if (allow_identity || !e.is_identity()) return e;
  }
}

/// Raw words of up to max_len letters over indices 1..max_index, identities allowed.
inline std::vector<Letter> random_raw(const FamilySpec& spec, Index max_index, std::size_t max_len,
                                      std::mt19937_64& rng) {
  const auto len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  std::vector<Letter> w;
  for (std::size_t i = 0; i < len; ++i) {
    const Index idx = std::uniform_int_distribution<Index>(1, max_index)(rng);
    w.push_back({idx, random_element(spec.at(idx), rng, true)});
  }
  return w;
}

inline FiniteWord random_word(const FamilySpec& spec, Index max_index, std::size_t max_len, std::mt19937_64& rng) {
  return reduce(random_raw(spec, max_index, max_len, rng));
}

inline Letter letter(const FamilySpec& spec, Index i, std::int64_t v) {
  return {i, GroupElement::from_integer(spec.at(i), v)};
}

}  // namespace archipelago::testing
