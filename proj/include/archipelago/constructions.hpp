#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "archipelago/batch.hpp"
#include "archipelago/census.hpp"
#include "archipelago/morphisms.hpp"

namespace archipelago {

struct Certificate {
  std::string statement;
  std::optional<Index> level;
  std::optional<Index> depth;
  std::string outcome;
  bool ok = false;
  nlohmann::ordered_json details;  // construction-specific extras
};

/// Result of a packaged construction. Deterministic given its parameters.
struct WitnessReport {
  std::string name;
  nlohmann::ordered_json parameters;
  std::vector<Certificate> certificates;
  nlohmann::ordered_json resources;
  std::string summary;

  bool ok() const;
  nlohmann::ordered_json to_json() const;
  std::string text() const;
};

/// The nested word w_1 = a_1 (w_2)^2, w_k = a_k (w_{k+1})^{k+1} over all Z,
/// and the chain w ~ w_n^{n!} for 2 <= n <= n_max.
ProjectiveWord divisible_word(Index level = 1);
WitnessReport divisible_witness(Index n_max = 4, Index check_depth = 8);

enum class EpsTail { RepeatLast, Identity };

/// All 0/1 sequences of the given length, in binary counting order.
std::vector<std::vector<std::int64_t>> binary_sequences(std::size_t length);

ProjectiveWord epsilon_word(const FactorDescriptor& d, const std::vector<GroupElement>& coords, EpsTail tail);

/// Separates the epsilon words of every pair of sequences at each level
/// j <= max_level within depth max_depth. Identical sequences are expected
/// to stay inseparable.
WitnessReport epsilon_distinctness(const FactorDescriptor& d, const std::vector<std::vector<GroupElement>>& sequences,
                                   Index max_level, Index max_depth, EpsTail tail = EpsTail::RepeatLast,
                                   Execution exec = Execution::Parallel);

/// (gh)^n and a^{(gh)^n} for 1 <= n <= count (conjugates from n = 0), with
/// the involution census over the factors involved at census_syllables.
WitnessReport conjugate_families_witness(const FamilySpec& spec, const Letter& g, const Letter& h,
                                         const Letter& a, std::size_t count, std::size_t census_syllables = 3);

struct ClaimCase {
  std::string name;
  LetterMap map;
  ProjectiveWord u, v;
};

/// Curated schema pairs for the homomorphism claim, several of them with a
/// merge or cancellation at the u|v boundary.
std::vector<ClaimCase> claim_suite();
WitnessReport claim_witness(Index max_level = 6, Index max_depth = 8);

}  // namespace archipelago
