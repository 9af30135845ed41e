#pragma once

#include <optional>
#include <vector>

#include "archipelago/word.hpp"

namespace archipelago {

/// Lazily lists every reduced word with at most max_syllables letters over
/// indices 1..max_index. Each factor contributes its first per_factor_limit
/// non-identity elements (all of them when unset; the factor must then be
/// finite). Order: by length, then letter by letter with index-major,
/// enumeration-order-minor comparison.
class WordEnumerator {
 public:
  WordEnumerator(const FamilySpec& spec, Index max_index, std::size_t max_syllables,
                 std::optional<std::size_t> per_factor_limit = std::nullopt);

  std::optional<FiniteWord> next();

 private:
  bool advance();
  bool fill_from(std::size_t position);
  FiniteWord current_word() const;

  struct Choice {
    Index index;
    GroupElement element;
  };
  std::vector<Choice> choices_;  // index-major
  std::size_t max_syllables_;
  std::size_t length_ = 0;
  std::vector<std::size_t> cursor_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<FiniteWord> enumerate_words(const FamilySpec& spec, Index max_index, std::size_t max_syllables,
                                        std::optional<std::size_t> per_factor_limit = std::nullopt);

/// The two families from the counting argument for involutions in G * H:
/// (gh)^n are pairwise distinct non-involutions; a^{(gh)^n} are pairwise
/// distinct involutions when a is one.
struct FamilyCheck {
  std::size_t count = 0;
  std::vector<FiniteWord> powers;      // (gh)^n, n = 1..count
  std::vector<FiniteWord> conjugates;  // (gh)^n a (gh)^-n, n = 0..count-1
  bool powers_distinct = false;
  bool powers_non_involutions = false;
  bool conjugates_distinct = false;
  bool conjugates_involutions = false;

  bool ok() const {
    return powers_distinct && powers_non_involutions && conjugates_distinct && conjugates_involutions;
  }
};

/// g and h must be non-identity letters from distinct factors; a must be an
/// involution letter (ContractError otherwise).
FamilyCheck involution_families(const Letter& g, const Letter& h, const Letter& a, std::size_t count);

struct FamilyParams {
  Letter g, h, a;
  std::size_t count = 50;
};

struct InvolutionCensus {
  std::size_t max_syllables = 0;
  Index max_index = 0;
  std::size_t words = 0;  // including the identity
  std::size_t involutions = 0;
  std::size_t non_involutions = 0;
  std::vector<FiniteWord> involution_words;
  std::optional<FamilyCheck> families;
};

/// Exhaustive count over words with at most max_syllables letters. Every
/// factor up to max_index must be finite (UnsupportedError otherwise);
/// max_index defaults to the size of a finite family.
InvolutionCensus involution_census(const FamilySpec& spec, std::size_t max_syllables,
                                   std::optional<Index> max_index = std::nullopt,
                                   const std::optional<FamilyParams>& families = std::nullopt);

}  // namespace archipelago
