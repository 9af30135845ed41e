#include "archipelago/config.hpp"

#include <fstream>
#include <sstream>

namespace archipelago {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::uint32_t parse_rank(const json& j, const char* key) {
  if (j.is_string()) {
    if (j.get<std::string>() == "countable") return FactorDescriptor::kCountable;
    throw ParseError(std::string("\"") + key + "\" expects a positive integer or \"countable\"");
  }
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1)
    throw ParseError(std::string("\"") + key + "\" expects a positive integer or \"countable\"");
  return static_cast<std::uint32_t>(j.get<std::int64_t>());
}

ordered_json rank_json(std::uint32_t r) {
  if (r == FactorDescriptor::kCountable) return "countable";
  return r;
}

std::vector<FactorDescriptor> descriptor_list(const json& j, const char* key) {
  if (!j.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
  std::vector<FactorDescriptor> out;
  for (const auto& e : j) out.push_back(descriptor_from_json(e));
  return out;
}

}  // namespace

FactorDescriptor descriptor_from_json(const json& j) {
  try {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "Z") return FactorDescriptor::integers();
      if (s == "Q") return FactorDescriptor::rationals();
      throw ParseError("unknown descriptor keyword \"" + s + "\"");
    }
    if (!j.is_object() || j.size() != 1) throw ParseError("descriptor must be a keyword or a one-key object");
    const std::string key = j.begin().key();
    const json& value = j.begin().value();
    if (key == "cyclic") {
      if (!value.is_number_integer()) throw ParseError("\"cyclic\" expects an integer");
      return FactorDescriptor::cyclic(value.get<std::int64_t>());
    }
    if (key == "free") return FactorDescriptor::free_group(parse_rank(value, "free"));
    if (key == "involutions") return FactorDescriptor::free_involutions(parse_rank(value, "involutions"));
    if (key == "table") {
      if (!value.is_array()) throw ParseError("\"table\" expects an array of rows");
      MultiplicationTable rows;
      for (const auto& row : value) {
        if (!row.is_array()) throw ParseError("table rows must be arrays");
        std::vector<std::uint32_t> r;
        for (const auto& x : row) {
          if (!x.is_number_integer() || x.get<std::int64_t>() < 0) throw ParseError("table entries must be non-negative integers");
          r.push_back(static_cast<std::uint32_t>(x.get<std::int64_t>()));
        }
        rows.push_back(std::move(r));
      }
      return FactorDescriptor::table(std::move(rows));
    }
    if (key == "product") return FactorDescriptor::free_product(descriptor_list(value, "product"));
    throw ParseError("unknown descriptor key \"" + key + "\"");
  } catch (const ContractError& e) {
    throw ParseError(std::string("invalid descriptor: ") + e.what());
  }
}

ordered_json descriptor_to_json(const FactorDescriptor& d) {
  switch (d.kind()) {
    case FactorKind::Integers:
      return "Z";
    case FactorKind::Rationals:
      return "Q";
    case FactorKind::Cyclic:
      return ordered_json{{"cyclic", d.modulus()}};
    case FactorKind::FreeGroup:
      return ordered_json{{"free", rank_json(d.rank())}};
    case FactorKind::FreeInvolutions:
      return ordered_json{{"involutions", rank_json(d.rank())}};
    case FactorKind::Table:
      return ordered_json{{"table", d.table()}};
    case FactorKind::FreeProduct: {
      ordered_json list = ordered_json::array();
      for (const auto& f : d.factors()) list.push_back(descriptor_to_json(f));
      return ordered_json{{"product", list}};
    }
  }
  return nullptr;
}

FamilySpec family_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("family config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "prefix" && key != "tail") throw ParseError("unknown family config key \"" + key + "\"");
  std::vector<FactorDescriptor> prefix, tail;
  if (j.contains("prefix")) prefix = descriptor_list(j.at("prefix"), "prefix");
  if (j.contains("tail")) tail = descriptor_list(j.at("tail"), "tail");
  if (prefix.empty() && tail.empty()) throw ParseError("family config names no factor groups");
  return FamilySpec(std::move(prefix), std::move(tail));
}

ordered_json family_to_json(const FamilySpec& spec) {
  ordered_json out;
  ordered_json prefix = ordered_json::array(), tail = ordered_json::array();
  for (const auto& d : spec.prefix()) prefix.push_back(descriptor_to_json(d));
  for (const auto& d : spec.tail()) tail.push_back(descriptor_to_json(d));
  out["prefix"] = prefix;
  out["tail"] = tail;
  return out;
}

FamilySpec parse_family(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("family config is not valid JSON: ") + e.what());
  }
  return family_from_json(j);
}

FamilySpec load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open family config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_family(ss.str());
}

}  // namespace archipelago
