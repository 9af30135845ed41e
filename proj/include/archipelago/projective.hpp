#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "archipelago/word.hpp"

namespace archipelago {

inline constexpr std::size_t kDefaultWordBudget = 1'000'000;

/// w_l = a_l · (w_{l+1})^{e_l} for every level l >= start_level, where a_l is
/// `element` at index l + index_offset and e_l = exp_mul·l + exp_add.
struct NestRule {
  Index start_level = 1;
  std::int64_t index_offset = 0;
  GroupElement element;
  std::int64_t exp_mul = 1;
  std::int64_t exp_add = 1;

  Index index_at(Index level) const;
  std::int64_t exponent_at(Index level) const;
  /// Level whose letter sits at index i (may be below start_level).
  std::int64_t level_of(Index i) const { return static_cast<std::int64_t>(i) - index_offset; }

  friend bool operator==(const NestRule&, const NestRule&) = default;
};

/// Eventually periodic coordinate sequence g_1, g_2, ...; the period is never
/// empty. Constructors put it in canonical (shortest) form.
class CoordinateRule {
 public:
  CoordinateRule() = default;
  CoordinateRule(std::vector<GroupElement> prefix, std::vector<GroupElement> period);

  /// g_m = last listed coordinate for m past the list.
  static CoordinateRule repeat_last(std::vector<GroupElement> coords);
  static CoordinateRule constant(std::vector<GroupElement> coords, GroupElement fill);
  static CoordinateRule cycle(std::vector<GroupElement> coords, std::vector<GroupElement> period);

  const GroupElement& at(std::size_t m) const;  // 1-based
  const std::vector<GroupElement>& prefix() const noexcept { return prefix_; }
  const std::vector<GroupElement>& period() const noexcept { return period_; }
  bool all_identity() const;

  friend bool operator==(const CoordinateRule&, const CoordinateRule&) = default;

 private:
  std::vector<GroupElement> prefix_;
  std::vector<GroupElement> period_;
};

/// Triangular pattern g_1 g_1 g_2 g_1 g_2 g_3 ...: position p of block t
/// (t(t-1)/2 < p <= t(t+1)/2) carries coordinate p - t(t-1)/2 at index
/// start_index + p - 1.
struct EpsRule {
  Index start_index = 1;
  CoordinateRule coords;

  static std::size_t coordinate_at(std::size_t position);
  const GroupElement& element_at_index(Index i) const;  // i >= start_index

  friend bool operator==(const EpsRule&, const EpsRule&) = default;
};

/// Bijection of the positive integers: an explicit permutation of 1..K
/// followed by a permutation of 1..P applied to every later block of P
/// indices. Both parts are validated.
class IndexPermutation {
 public:
  IndexPermutation() = default;
  IndexPermutation(std::vector<Index> head, std::vector<Index> block = {});

  static IndexPermutation swap(Index a, Index b);

  Index apply(Index i) const;
  Index inverse(Index i) const;
  const std::vector<Index>& head() const noexcept { return head_; }
  const std::vector<Index>& block() const noexcept { return block_; }

  friend bool operator==(const IndexPermutation&, const IndexPermutation&) = default;

 private:
  std::vector<Index> head_, block_;
  std::vector<Index> head_inv_, block_inv_;
};

/// Partition of the positive integers minus a finite excluded set into
/// ordered finite blocks: the explicit blocks first, then consecutive chunks
/// of `chunk` indices covering everything above the explicit part. With
/// chunk = 0 only the explicit blocks exist (finite families).
class IndexPartition {
 public:
  IndexPartition() = default;
  IndexPartition(std::vector<Index> excluded, std::vector<std::vector<Index>> blocks, std::size_t chunk);

  static IndexPartition chunks(std::size_t size) { return IndexPartition({}, {}, size); }

  struct Slot {
    Index block;
    Index local;  // 1-based position inside the block
  };
  std::optional<Slot> slot_of(Index i) const;  // nullopt for excluded indices
  std::vector<Index> block(Index m) const;
  /// Largest old index belonging to blocks 1..m.
  Index max_index_upto(Index m) const;
  const std::vector<Index>& excluded() const noexcept { return excluded_; }
  const std::vector<std::vector<Index>>& explicit_blocks() const noexcept { return blocks_; }
  std::size_t chunk() const noexcept { return chunk_; }
  Index covered() const noexcept { return covered_; }

  friend bool operator==(const IndexPartition& a, const IndexPartition& b) {
    return a.excluded_ == b.excluded_ && a.blocks_ == b.blocks_ && a.chunk_ == b.chunk_;
  }

 private:
  std::vector<Index> excluded_;
  std::vector<std::vector<Index>> blocks_;
  std::size_t chunk_ = 0;
  Index covered_ = 0;  // explicit part is exactly 1..covered_
  std::vector<std::optional<Slot>> slots_;  // for indices 1..covered_
};

struct SchemaNode;

/// An element of the topologist's product over indices >= base_index, held
/// as a schema whose depth-n projections are computable.
class ProjectiveWord {
 public:
  static ProjectiveWord finite(const FamilySpec& spec, const FiniteWord& word, Index base = 1);
  static ProjectiveWord identity(const FamilySpec& spec, Index base = 1);
  /// Requires an infinite family that is uniformly element.descriptor() from
  /// the first letter index on.
  static ProjectiveWord nest(const FamilySpec& spec, const NestRule& rule, Index base = 1);
  static ProjectiveWord epsilon(const FamilySpec& spec, const EpsRule& rule, Index base = 1);

  const FamilySpec& spec() const { return *spec_; }
  Index base_index() const noexcept { return base_; }

  /// p_n(w). n < base_index is a contract violation; words longer than the
  /// budget raise ResourceError naming the depth.
  FiniteWord projection(Index n, std::size_t budget = kDefaultWordBudget) const;

  /// Canonical text of the schema normal form; equal strings certify equality.
  std::string normal_form() const;

  const std::shared_ptr<const SchemaNode>& node() const noexcept { return node_; }

  friend ProjectiveWord product(const ProjectiveWord& u, const ProjectiveWord& v);
  friend ProjectiveWord product(const std::vector<ProjectiveWord>& factors);
  friend ProjectiveWord inverse(const ProjectiveWord& u);
  friend ProjectiveWord power(const ProjectiveWord& u, std::int64_t m);
  friend ProjectiveWord tau(Index j, const ProjectiveWord& w);
  friend ProjectiveWord with_base(const ProjectiveWord& w, Index base);
  friend ProjectiveWord permute_indices(const IndexPermutation& f, const ProjectiveWord& w);
  friend ProjectiveWord regroup(const IndexPartition& partition, const ProjectiveWord& w);

 private:
  ProjectiveWord(std::shared_ptr<const FamilySpec> spec, Index base, std::shared_ptr<const SchemaNode> node)
      : spec_(std::move(spec)), base_(base), node_(std::move(node)) {}

  std::shared_ptr<const FamilySpec> spec_;
  Index base_ = 1;
  std::shared_ptr<const SchemaNode> node_;
};

ProjectiveWord product(const ProjectiveWord& u, const ProjectiveWord& v);
ProjectiveWord product(const std::vector<ProjectiveWord>& factors);
ProjectiveWord inverse(const ProjectiveWord& u);
ProjectiveWord power(const ProjectiveWord& u, std::int64_t m);
/// Image in the tail product over indices > j; needs j >= base_index - 1.
ProjectiveWord tau(Index j, const ProjectiveWord& w);
/// The same word viewed in the product over indices >= base; the base can
/// only be lowered.
ProjectiveWord with_base(const ProjectiveWord& w, Index base);
/// Relabels index i as f(i). Needs base_index 1.
ProjectiveWord permute_indices(const IndexPermutation& f, const ProjectiveWord& w);
/// Block m becomes the free product of the factors in block m; excluded
/// indices are deleted. Needs base_index 1.
ProjectiveWord regroup(const IndexPartition& partition, const ProjectiveWord& w);

FamilySpec permuted_family(const IndexPermutation& f, const FamilySpec& spec);
FamilySpec regrouped_family(const IndexPartition& partition, const FamilySpec& spec);

/// A per-depth family of finite words with no compatibility guarantee.
struct DepthFamily {
  Index base_index = 1;
  std::function<FiniteWord(Index)> at;
};

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictStatus { EqualCertified, DistinctWitness, UnknownUpTo };
enum class ProofKind { Structural, DepthChecked };

struct LevelOutcome {
  Index level = 0;
  VerdictStatus status = VerdictStatus::UnknownUpTo;
  std::optional<Index> depth;  // witness depth, or depth reached
};

struct Verdict {
  VerdictStatus status = VerdictStatus::UnknownUpTo;
  std::optional<Index> level;  // certificate level j
  std::optional<ProofKind> proof;
  std::optional<Index> depth;      // DistinctWitness depth, or depth checked
  std::optional<Index> max_level;  // J for archipelago searches
  Index max_depth = 0;             // N
  std::vector<LevelOutcome> levels;
  bool distinct_at_every_level = false;
  std::optional<Index> budget_stop;  // depth at which the word budget ran out

  std::string text() const;
  nlohmann::ordered_json to_json() const;
};

const char* to_string(VerdictStatus s);
const char* to_string(ProofKind p);

/// Equality in the topologist's product: structural normal-form identity
/// certifies; the first differing projection up to max_depth is a witness;
/// anything else is UnknownUpTo.
Verdict eq_in_product(const ProjectiveWord& u, const ProjectiveWord& v, Index max_depth);

/// Equality in the archipelago quotient: searches tau levels
/// j = base_index-1 .. max_level for structural equality.
Verdict eq_in_archipelago(const ProjectiveWord& u, const ProjectiveWord& v, Index max_level, Index max_depth);

/// Shape check for the nested word with e_k = k+1 and a_k at index k.
bool is_divisible_shape(const ProjectiveWord& w);
/// w_n: the same nesting started at level n.
ProjectiveWord nest_from(const ProjectiveWord& w, Index level);

struct ChainStep {
  Index n = 0;
  std::string statement;
  std::uint64_t exponent = 0;  // n!
  bool step = false;           // tau(n-1, w_{n-1}) = w_n^n
  bool composed = false;       // tau(n-1, w_{n-1}^{(n-1)!}) = w_n^{n!}
  bool structural = false;     // tau(n-1, w) = w_n^{n!} in normal form
  bool projections = false;    // agreement of direct expansions at every checked depth
  Index checked_depth = 0;

  bool ok() const { return step && composed && structural && projections; }
};

/// Certificates w ~ w_n^{n!} at level n-1 for 2 <= n <= n_max, each
/// cross-checked against direct expansion up to check_depth.
std::vector<ChainStep> divisible_chain(const ProjectiveWord& w, Index n_max, Index check_depth = 8);

}  // namespace archipelago
