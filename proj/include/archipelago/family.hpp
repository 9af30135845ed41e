#pragma once

#include <optional>
#include <string>
#include <vector>

#include "archipelago/factor.hpp"

namespace archipelago {

/// The sequence (G_n)_{n>=1}: explicit prefix entries, then the tail
/// pattern repeated cyclically. Without a tail the family is finite.
class FamilySpec {
 public:
  FamilySpec() = default;
  FamilySpec(std::vector<FactorDescriptor> prefix, std::vector<FactorDescriptor> tail = {});

  static FamilySpec uniform(const FactorDescriptor& d) { return FamilySpec({}, {d}); }

  const std::vector<FactorDescriptor>& prefix() const noexcept { return prefix_; }
  const std::vector<FactorDescriptor>& tail() const noexcept { return tail_; }

  bool is_finite() const noexcept { return tail_.empty(); }
  /// Number of indices of a finite family.
  std::size_t size() const;
  bool contains(Index n) const noexcept { return n >= 1 && (!is_finite() || n <= prefix_.size()); }

  /// Descriptor of G_n; throws ContractError for n outside the family.
  const FactorDescriptor& at(Index n) const;

  /// True when every G_n with n >= from is the same descriptor.
  bool is_uniform_from(Index from) const;

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;

 private:
  std::vector<FactorDescriptor> prefix_;
  std::vector<FactorDescriptor> tail_;
};

/// Smallest prefix length P and period T such that both periodic layouts
/// (prefix length, tail length) are determined by (index <= P, (index - P - 1) mod T).
struct PeriodicLayout {
  std::size_t prefix = 0;
  std::size_t period = 0;  // 0 when both are finite
};
PeriodicLayout common_layout(std::size_t prefix_a, std::size_t tail_a, std::size_t prefix_b,
                             std::size_t tail_b);

}  // namespace archipelago
