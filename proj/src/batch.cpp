#include "archipelago/batch.hpp"

#include <exception>

#include <omp.h>

namespace archipelago {

namespace {

/// Runs body(k) for k in [0, n); the first exception is rethrown after the
/// loop.
template <typename Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::Serial) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical(archipelago_batch_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<FiniteWord> reduce_all(const std::vector<std::vector<Letter>>& raws, Execution exec) {
  std::vector<FiniteWord> out(raws.size());
  for_each_index(raws.size(), exec, [&](std::size_t k) { out[k] = reduce(raws[k]); });
  return out;
}

std::vector<std::optional<TorsionWitness>> torsion_all(const std::vector<FiniteWord>& words, Execution exec) {
  std::vector<std::optional<TorsionWitness>> out(words.size());
  for_each_index(words.size(), exec, [&](std::size_t k) { out[k] = torsion_witness(words[k]); });
  return out;
}

bool PairSeparation::separated_everywhere() const {
  for (const auto& d : depth)
    if (!d) return false;
  return !depth.empty();
}

std::vector<PairSeparation> separate_pairs(const std::vector<ProjectiveWord>& words, Index max_level, Index max_depth,
                                           Execution exec) {
  if (words.empty()) return {};
  const Index base = words.front().base_index();
  for (const auto& w : words)
    if (w.base_index() != base) throw ContractError("separate_pairs needs words with one base index");
  // Projections are computed once, up front; the pair loop only reads them.
  std::vector<std::vector<FiniteWord>> proj(words.size());
  for_each_index(words.size(), exec, [&](std::size_t k) {
    for (Index n = base; n <= max_depth; ++n) proj[k].push_back(words[k].projection(n));
  });
  std::vector<PairSeparation> out;
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) out.push_back({a, b, {}});
  const Index levels = max_level + 2 > base ? max_level + 2 - base : 0;
  for_each_index(out.size(), exec, [&](std::size_t k) {
    auto& s = out[k];
    const auto& pa = proj[s.first];
    const auto& pb = proj[s.second];
    s.depth.assign(levels, std::nullopt);
    for (Index l = 0; l < levels; ++l) {
      const Index j = base - 1 + l;
      for (std::size_t d = 0; d < pa.size(); ++d) {
        if (project_above(pa[d], j) != project_above(pb[d], j)) {
          s.depth[l] = base + static_cast<Index>(d);
          break;
        }
      }
    }
  });
  return out;
}

}  // namespace archipelago
