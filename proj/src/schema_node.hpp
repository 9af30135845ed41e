#pragma once

#include <map>
#include <mutex>

#include "archipelago/projective.hpp"

namespace archipelago {

enum class NodeKind { Finite, Nest, Eps, Product, Inverse, Power, Tau, Permute, Regroup };

struct NfItem;
using NormalForm = std::vector<NfItem>;

struct NfItem {
  enum class Kind { Word, Nest, Eps, Pow, Opaque };
  Kind kind = Kind::Word;
  FiniteWord word;
  std::optional<NestRule> nest;
  Index level = 0;  // Nest: current start level
  std::optional<EpsRule> eps;
  Index cut = 0;  // Eps / Opaque: letters at indices <= cut are deleted
  std::shared_ptr<const NormalForm> inner;  // Pow
  std::string key;                          // Opaque
  std::int64_t exp = 1;
};

struct SchemaNode {
  NodeKind kind = NodeKind::Finite;
  FiniteWord word;
  std::optional<NestRule> nest;
  std::optional<EpsRule> eps;
  std::vector<std::shared_ptr<const SchemaNode>> children;
  std::int64_t exponent = 0;
  Index level = 0;
  IndexPermutation perm;
  IndexPartition partition;
  std::shared_ptr<const FamilySpec> spec;  // Permute / Regroup: the resulting family

  mutable std::mutex mutex;
  mutable std::map<Index, FiniteWord> projections;
  mutable std::shared_ptr<const NormalForm> normal_form;
};

FiniteWord project_node(const SchemaNode& node, Index n, std::size_t budget);
std::shared_ptr<const NormalForm> normal_form_of(const SchemaNode& node);
std::string format_normal_form(const NormalForm& nf);

FiniteWord permute_word(const IndexPermutation& f, const FiniteWord& w);
FiniteWord regroup_word(const IndexPartition& partition, const FamilySpec& target, const FiniteWord& w,
                        std::optional<Index> max_block);

std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace archipelago
