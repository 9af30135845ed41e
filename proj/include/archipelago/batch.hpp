#pragma once

#include <optional>
#include <vector>

#include "archipelago/projective.hpp"

namespace archipelago {

/// Batch kernels run their independent items either in a plain loop or
/// under OpenMP. Both paths produce identical results in identical order.
enum class Execution { Serial, Parallel };

std::vector<FiniteWord> reduce_all(const std::vector<std::vector<Letter>>& raws, Execution exec = Execution::Parallel);

std::vector<std::optional<TorsionWitness>> torsion_all(const std::vector<FiniteWord>& words,
                                                       Execution exec = Execution::Parallel);

struct PairSeparation {
  std::size_t first = 0, second = 0;
  /// Entry k is the first depth n <= max_depth at which
  /// tau(j, first) and tau(j, second) project differently, j = base - 1 + k.
  std::vector<std::optional<Index>> depth;

  bool separated_everywhere() const;
};

/// Every pair first < second of the words (one family, one base index),
/// compared after deleting indices <= j for each level up to max_level.
std::vector<PairSeparation> separate_pairs(const std::vector<ProjectiveWord>& words, Index max_level, Index max_depth,
                                           Execution exec = Execution::Parallel);

}  // namespace archipelago
