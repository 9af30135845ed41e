#pragma once

#include <string>

#include "json.hpp"

#include "archipelago/family.hpp"

namespace archipelago {

/// Descriptor keywords: "Z", "Q", {"cyclic": k}, {"free": r | "countable"},
/// {"table": rows}, plus {"involutions": r | "countable"} and
/// {"product": [descriptor, ...]} for block groups.
FactorDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::ordered_json descriptor_to_json(const FactorDescriptor& d);

/// {"prefix": [...], "tail": [...]}; either key may be omitted.
FamilySpec family_from_json(const nlohmann::json& j);
nlohmann::ordered_json family_to_json(const FamilySpec& spec);

FamilySpec load_family(const std::string& path);
FamilySpec parse_family(const std::string& text);

}  // namespace archipelago
