#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "archipelago/projective.hpp"

namespace archipelago {

inline constexpr std::size_t kDefaultValidationLimit = 1000;
inline constexpr std::size_t kDefaultSearchLimit = 1'000'000;

/// Lazy inverse-preserving bijection between two enumerable groups. Source
/// elements are consumed in enumeration order; each new non-involution pair
/// (x, x^-1) takes the next unused target pair and each involution the next
/// unused target involution. Queries are serialized by an internal lock.
class PairingBijection {
 public:
  /// Throws ClassificationError when the source has involutions and the
  /// target has none.
  PairingBijection(FactorDescriptor source, FactorDescriptor target, std::size_t search_limit = kDefaultSearchLimit);

  const FactorDescriptor& source() const noexcept { return source_; }
  const FactorDescriptor& target() const noexcept { return target_; }

  /// MappingError when x is not reached within the search limit or the
  /// target runs out of elements of the needed kind.
  GroupElement forward(const GroupElement& x);
  GroupElement backward(const GroupElement& y);

  /// Number of assigned source elements.
  std::size_t size() const;
  /// Assigned pairs in assignment order.
  std::vector<std::pair<GroupElement, GroupElement>> entries() const;

 private:
  void step();  // assigns the next fresh source element
  GroupElement take_target(bool involution);

  FactorDescriptor source_, target_;
  std::size_t search_limit_;
  mutable std::mutex mutex_;
  ElementEnumerator source_enum_, target_enum_;
  std::size_t source_seen_ = 0;
  bool source_done_ = false, target_done_ = false;
  std::vector<GroupElement> spare_involutions_, spare_pairs_;
  std::unordered_map<std::string, GroupElement> fwd_, bwd_;
  std::unordered_map<std::string, bool> target_used_;
  std::vector<std::pair<GroupElement, GroupElement>> order_;
};

enum class TargetKind { ZFree, Z2Free };

/// Target F_infinity for ZFree and the free product of countably many Z/2
/// for Z2Free, so the k-th pair of source elements goes to the k-th
/// generator pair (a_k, a_k^-1) or involution b_k in enumeration order.
std::shared_ptr<PairingBijection> build_pairing(const FactorDescriptor& source, TargetKind kind);

/// phi_i for one index: identity, a pairing bijection (possibly used
/// backwards), or an explicit finite table.
class ElementMap {
 public:
  enum class Kind { Identity, Pairing, Table };

  static ElementMap identity(const FactorDescriptor& d);
  static ElementMap pairing(std::shared_ptr<PairingBijection> p);
  /// Identity maps to identity and x^-1 to the inverse image of x
  /// automatically; conflicting entries are a ContractError.
  static ElementMap table(const FactorDescriptor& source, const FactorDescriptor& target,
                          const std::vector<std::pair<GroupElement, GroupElement>>& entries);

  Kind kind() const noexcept { return kind_; }
  const FactorDescriptor& source() const noexcept { return source_; }
  const FactorDescriptor& target() const noexcept { return target_; }

  GroupElement apply(const GroupElement& x) const;
  /// Two-sided inverse; a Table must be injective.
  ElementMap inverse() const;
  /// Elements on which a Table is defined (empty for other kinds).
  std::vector<GroupElement> domain() const;
  std::string describe() const;

 private:
  ElementMap() = default;

  Kind kind_ = Kind::Identity;
  FactorDescriptor source_ = FactorDescriptor::integers();
  FactorDescriptor target_ = FactorDescriptor::integers();
  std::shared_ptr<PairingBijection> pairing_;
  bool backward_ = false;
  std::shared_ptr<const std::vector<std::pair<GroupElement, GroupElement>>> table_;
};

struct MapValidation {
  std::string slot;
  std::size_t checked = 0;
  bool identity = true;
  bool inverse = true;
  bool involutions = true;  // involution status preserved both ways
  bool injective = true;
  bool backward = true;     // inverse map undoes the map (pairings only)
  std::optional<std::string> failure;

  bool ok() const { return identity && inverse && involutions && injective && backward; }
  nlohmann::ordered_json to_json() const;
};

/// Checks an element map on the first `limit` enumerated source elements
/// (or the table domain).
MapValidation validate(const ElementMap& m, std::size_t limit = kDefaultValidationLimit);

/// A family of element maps, laid out like a FamilySpec: explicit prefix
/// slots, then tail slots repeated with the source family's period.
class LetterMap {
 public:
  LetterMap(FamilySpec source, std::vector<ElementMap> prefix, std::vector<ElementMap> tail);

  /// Applies one rule to every index.
  static LetterMap uniform_identity(const FamilySpec& source);
  static LetterMap uniform_pairing(const FamilySpec& source, TargetKind kind);

  /// {"prefix": [entry...], "tail": [entry...]} or a single entry for every
  /// index. Entries: "identity", "pairing:Z", "pairing:Z2",
  /// {"pairing": descriptor}, {"table": [[src, tgt], ...], "target": descriptor}.
  static LetterMap from_json(const FamilySpec& source, const nlohmann::json& j);
  static LetterMap load(const FamilySpec& source, const std::string& path);

  const FamilySpec& source() const noexcept { return source_; }
  const FamilySpec& target() const noexcept { return target_; }
  const ElementMap& at(Index i) const;
  const std::vector<ElementMap>& prefix() const noexcept { return prefix_; }
  const std::vector<ElementMap>& tail() const noexcept { return tail_; }

  LetterMap inverse() const;
  std::vector<MapValidation> validate(std::size_t limit = kDefaultValidationLimit) const;

 private:
  FamilySpec source_, target_;
  std::vector<ElementMap> prefix_, tail_;
};

/// Letterwise image followed by reduction.
FiniteWord apply_letter_map(const LetterMap& m, const FiniteWord& u);

/// family(n) = apply_letter_map(m, p_n(w)); not projection-compatible in
/// general.
DepthFamily lift_phi(const LetterMap& m, const ProjectiveWord& w);

/// First n in [base, max_depth) with project_upto(family(n+1), n) != family(n).
std::optional<Index> compatibility_defect(const DepthFamily& f, Index max_depth);

/// Compares lift_phi(m, uv) with the depthwise product of lift_phi(m, u) and
/// lift_phi(m, v) after deleting indices <= j, for j up to max_level and
/// every depth up to max_depth.
Verdict claim_certify(const LetterMap& m, const ProjectiveWord& u, const ProjectiveWord& v, Index max_level,
                      Index max_depth);

// ---------------------------------------------------------------------------
// Classification

struct Cardinality {
  enum class Kind { Finite, Countable, Uncountable };
  Kind kind = Kind::Finite;
  std::uint64_t count = 0;

  static Cardinality finite(std::uint64_t n) { return {Kind::Finite, n}; }
  static Cardinality countable() { return {Kind::Countable, 0}; }
  static Cardinality uncountable() { return {Kind::Uncountable, 0}; }

  bool is_zero() const { return kind == Kind::Finite && count == 0; }
  nlohmann::ordered_json to_json() const;
  friend bool operator==(const Cardinality&, const Cardinality&) = default;
};

/// kappa = |G_n \ {1}| and involution presence per index, laid out as
/// prefix entries followed by a repeating tail (empty for finite families).
struct ClassificationProfile {
  struct Entry {
    Cardinality kappa;
    bool involution = false;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> prefix, tail;

  static ClassificationProfile from_family(const FamilySpec& spec);
  /// Number of indices whose factor has an involution.
  Cardinality lambda() const;
};

enum class Prototype { Trivial, AZ, AZ2, Unsupported };
const char* to_string(Prototype p);

Prototype classify(const ClassificationProfile& profile);

/// Cross-checks the involution flags against enumeration of the first
/// `limit` elements of each factor (exhaustive for small finite ones).
bool profile_consistent(const ClassificationProfile& profile, const FamilySpec& spec,
                        std::size_t limit = kDefaultValidationLimit);

struct BlockWitness {
  Index block = 0;              // representative block number
  std::vector<Index> indices;   // its old indices
  std::shared_ptr<PairingBijection> pairing;
  MapValidation validation;
};

struct ClassificationReport {
  Prototype prototype = Prototype::Trivial;
  ClassificationProfile profile;
  std::optional<IndexPartition> partition;
  std::optional<FamilySpec> blocks;
  std::vector<BlockWitness> witness_maps;

  bool witnesses_ok() const;
  nlohmann::ordered_json to_json() const;
};

/// Classifies the family and, when asked, builds the regrouping into finite
/// blocks together with a pairing bijection from each block group onto a
/// free product of copies of Z (or Z/2), validated on `limit` elements.
ClassificationReport classification_report(const FamilySpec& spec, bool with_witness = true,
                                           std::size_t limit = kDefaultValidationLimit);

}  // namespace archipelago
