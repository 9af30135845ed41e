#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "archipelago/errors.hpp"

namespace archipelago {

using Index = std::uint32_t;

enum class FactorKind {
  Integers,
  Cyclic,
  Rationals,
  FreeGroup,
  FreeInvolutions,  // free product of copies of Z/2
  Table,
  FreeProduct,      // finite free product of other factors (block groups)
};

class GroupElement;

/// Multiplication table of a finite group; row/column 0 is the identity.
using MultiplicationTable = std::vector<std::vector<std::uint32_t>>;

/// Names one factor group G_i. Cheap to copy; tables and block factor lists
/// are shared.
class FactorDescriptor {
 public:
  static constexpr std::uint32_t kCountable = 0;

  static FactorDescriptor integers();
  static FactorDescriptor cyclic(std::int64_t k);
  static FactorDescriptor rationals();
  /// rank == kCountable denotes the free group on countably many generators.
  static FactorDescriptor free_group(std::uint32_t rank);
  static FactorDescriptor free_involutions(std::uint32_t rank);
  static FactorDescriptor table(MultiplicationTable rows);
  static FactorDescriptor free_product(std::vector<FactorDescriptor> factors);

  FactorKind kind() const noexcept { return kind_; }
  std::int64_t modulus() const;                 // Cyclic
  std::uint32_t rank() const;                   // FreeGroup / FreeInvolutions
  const MultiplicationTable& table() const;     // Table
  std::span<const FactorDescriptor> factors() const;  // FreeProduct

  /// Group order; nullopt when countably infinite.
  std::optional<std::uint64_t> order() const;
  bool is_trivial() const;
  bool has_involution() const;

  /// Short human name such as "Z", "C5", "F2", "W*", "T6", "(Z*C2)".
  std::string name() const;

  friend bool operator==(const FactorDescriptor& a, const FactorDescriptor& b);

 private:
  FactorDescriptor(FactorKind kind, std::int64_t param) : kind_(kind), param_(param) {}

  FactorKind kind_;
  std::int64_t param_ = 0;
  std::shared_ptr<const MultiplicationTable> table_;
  std::shared_ptr<const std::vector<FactorDescriptor>> factors_;
};

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Signed generator indices, +g for x_g and -g for its inverse. Freely
/// reduced for FreeGroup; for FreeInvolutions only positive entries occur
/// and no two neighbours coincide.
using GeneratorWord = std::vector<std::int32_t>;

struct BlockLetter;
using BlockWord = std::vector<BlockLetter>;

/// An element of a factor group with canonical payload, so that equality
/// is structural.
class GroupElement {
 public:
  using Payload = std::variant<std::int64_t, Rational, GeneratorWord,
                               std::shared_ptr<const BlockWord>>;

  static GroupElement identity(const FactorDescriptor& d);
  /// Integers, Cyclic (value must lie in [0, k)) and Table (row index).
  static GroupElement from_integer(const FactorDescriptor& d, std::int64_t v);
  /// Rationals; normalised to lowest terms with positive denominator.
  static GroupElement from_rational(const FactorDescriptor& d, std::int64_t num,
                                    std::int64_t den);
  /// FreeGroup / FreeInvolutions; the word is reduced first.
  static GroupElement from_generators(const FactorDescriptor& d, GeneratorWord w);
  /// FreeProduct; letters are (local index, element) and get reduced.
  static GroupElement from_block(const FactorDescriptor& d, BlockWord w);

  const FactorDescriptor& descriptor() const noexcept { return desc_; }
  const Payload& payload() const noexcept { return payload_; }
  bool is_identity() const;

  std::int64_t as_integer() const;
  const Rational& as_rational() const;
  const GeneratorWord& as_generators() const;
  const BlockWord& as_block() const;

  friend bool operator==(const GroupElement& a, const GroupElement& b);

 private:
  GroupElement(FactorDescriptor d, Payload p) : desc_(std::move(d)), payload_(std::move(p)) {}

  FactorDescriptor desc_;
  Payload payload_;
};

struct BlockLetter {
  std::uint32_t local;  // 1-based position inside the block
  GroupElement element;

  friend bool operator==(const BlockLetter&, const BlockLetter&) = default;
};

GroupElement group_op(const GroupElement& a, const GroupElement& b);
GroupElement group_inverse(const GroupElement& a);
GroupElement group_power(const GroupElement& a, std::int64_t m);

/// Order of the element; nullopt when infinite.
std::optional<std::uint64_t> element_order(const GroupElement& a);
bool is_involution(const GroupElement& a);

/// Element literal syntax, see README. Parse errors name the descriptor.
GroupElement parse_element(const FactorDescriptor& d, std::string_view text);
std::string format_element(const GroupElement& a);

/// Lazy, deterministic enumeration starting at the identity, without
/// repetition.
class ElementEnumerator {
 public:
  explicit ElementEnumerator(FactorDescriptor d);
  ~ElementEnumerator();
  ElementEnumerator(ElementEnumerator&&) noexcept;
  ElementEnumerator& operator=(ElementEnumerator&&) noexcept;

  /// nullopt once a finite group is exhausted.
  std::optional<GroupElement> next();

  class Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

std::vector<GroupElement> enumerate(const FactorDescriptor& d, std::size_t limit);

}  // namespace archipelago
