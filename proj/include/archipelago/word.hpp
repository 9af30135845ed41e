#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "archipelago/family.hpp"

namespace archipelago {

/// One syllable: a non-identity element of G_index. Raw input to reduce()
/// may carry identity elements.
struct Letter {
  Index index = 0;
  GroupElement element;

  friend bool operator==(const Letter&, const Letter&) = default;
};

/// Reduced word in a finite free product: no identity letters and no two
/// neighbours from the same factor. Construct through reduce() or
/// from_reduced().
class FiniteWord {
 public:
  FiniteWord() = default;

  /// Wraps letters that are already reduced; throws ContractError otherwise.
  static FiniteWord from_reduced(std::vector<Letter> letters);

  std::span<const Letter> letters() const noexcept { return letters_; }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }
  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  const Letter& front() const { return letters_.front(); }
  const Letter& back() const { return letters_.back(); }

  Index max_index() const;  // 0 for the empty word
  Index min_index() const;  // 0 for the empty word

  friend bool operator==(const FiniteWord&, const FiniteWord&) = default;

 private:
  struct Trusted {};
  FiniteWord(Trusted, std::vector<Letter> letters) : letters_(std::move(letters)) {}
  friend class WordBuilder;

  std::vector<Letter> letters_;
};

/// Append-with-reduction. Pushing letters one at a time keeps the buffer
/// reduced: identities vanish, same-factor neighbours merge.
class WordBuilder {
 public:
  WordBuilder() = default;
  explicit WordBuilder(FiniteWord start) : letters_(std::move(start.letters_)) {}

  void push(const Letter& letter);
  void push(Letter&& letter);
  void append(const FiniteWord& w);
  void reserve(std::size_t n) { letters_.reserve(n); }
  std::size_t size() const noexcept { return letters_.size(); }

  FiniteWord finish() &&;

 private:
  std::vector<Letter> letters_;
};

using IndexPredicate = std::function<bool(Index)>;

/// Normal form of a raw letter sequence. With a spec, every element must
/// carry the descriptor of its index.
FiniteWord reduce(std::span<const Letter> raw);
FiniteWord reduce(std::span<const Letter> raw, const FamilySpec& spec);

/// R(u·v) by cancelling the maximal terminal/initial inverse pair and
/// merging the boundary letters.
FiniteWord concat(const FiniteWord& u, const FiniteWord& v);
FiniteWord invert(const FiniteWord& u);
FiniteWord power(const FiniteWord& u, std::int64_t m);

FiniteWord project_keep(const FiniteWord& u, const IndexPredicate& keep);
/// project_keep with {i <= n}.
FiniteWord project_upto(const FiniteWord& u, Index n);
/// project_keep with {i > j}.
FiniteWord project_above(const FiniteWord& u, Index j);

struct CyclicReduction {
  FiniteWord core;
  FiniteWord conjugator;  // u = conjugator · core · conjugator^-1
};
CyclicReduction cyclic_reduce(const FiniteWord& u);

struct TorsionWitness {
  FiniteWord conjugator;
  Letter core;
  std::uint64_t order = 0;
};
/// A witness iff u has finite order > 1.
std::optional<TorsionWitness> torsion_witness(const FiniteWord& u);

/// u ≠ 1 and u² = 1.
bool is_involution(const FiniteWord& u);

/// Text form "g1:1·g2:3"; the empty word prints as "1".
std::string format_word(const FiniteWord& u);

}  // namespace archipelago
