#include "archipelago/family.hpp"

#include <numeric>

namespace archipelago {

FamilySpec::FamilySpec(std::vector<FactorDescriptor> prefix, std::vector<FactorDescriptor> tail)
    : prefix_(std::move(prefix)), tail_(std::move(tail)) {}

std::size_t FamilySpec::size() const {
  if (!is_finite()) throw ContractError("size() of an infinite family");
  return prefix_.size();
}

const FactorDescriptor& FamilySpec::at(Index n) const {
  if (n < 1) throw ContractError("factor index must be >= 1");
  if (n <= prefix_.size()) return prefix_[n - 1];
  if (tail_.empty())
    throw ContractError("factor index " + std::to_string(n) + " outside finite family of size " +
                        std::to_string(prefix_.size()));
  return tail_[(n - prefix_.size() - 1) % tail_.size()];
}

bool FamilySpec::is_uniform_from(Index from) const {
  if (from < 1) from = 1;
  const FactorDescriptor* first = nullptr;
  auto check = [&](const FactorDescriptor& d) {
    if (!first) first = &d;
    return *first == d;
  };
  for (std::size_t i = from; i <= prefix_.size(); ++i)
    if (!check(prefix_[i - 1])) return false;
  for (const auto& d : tail_)
    if (!check(d)) return false;
  return true;
}

PeriodicLayout common_layout(std::size_t prefix_a, std::size_t tail_a, std::size_t prefix_b,
                             std::size_t tail_b) {
  PeriodicLayout layout;
  layout.prefix = std::max(prefix_a, prefix_b);
  if (tail_a == 0 && tail_b == 0) return layout;
  if (tail_a == 0) layout.period = tail_b;
  else if (tail_b == 0) layout.period = tail_a;
  else layout.period = std::lcm(tail_a, tail_b);
  return layout;
}

}  // namespace archipelago
