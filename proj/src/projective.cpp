#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "schema_node.hpp"

namespace archipelago {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw ResourceError("exponent " + std::to_string(a) + " * " + std::to_string(b) + " overflows 64 bits");
  return r;
}

// ---------------------------------------------------------------------------
// Rules

Index NestRule::index_at(Index level) const {
  const std::int64_t i = static_cast<std::int64_t>(level) + index_offset;
  if (i < 1) throw ContractError("nest level " + std::to_string(level) + " has no positive index");
  return static_cast<Index>(i);
}

std::int64_t NestRule::exponent_at(Index level) const {
  return checked_mul(exp_mul, static_cast<std::int64_t>(level)) + exp_add;
}

namespace {

void check_same_group(const std::vector<GroupElement>& xs, const FactorDescriptor*& d) {
  for (const auto& x : xs) {
    if (!d) d = &x.descriptor();
    if (!(x.descriptor() == *d)) throw ContractError("coordinates must come from one factor group");
  }
}

}  // namespace

CoordinateRule::CoordinateRule(std::vector<GroupElement> prefix, std::vector<GroupElement> period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty()) throw ContractError("coordinate rule needs a non-empty period");
  const FactorDescriptor* d = nullptr;
  check_same_group(prefix_, d);
  check_same_group(period_, d);
  // Shortest period, then absorb the prefix into it from the right.
  const std::size_t p = period_.size();
  for (std::size_t q = 1; q < p; ++q) {
    if (p % q) continue;
    bool periodic = true;
    for (std::size_t i = q; i < p && periodic; ++i) periodic = period_[i] == period_[i - q];
    if (periodic) {
      period_.erase(period_.begin() + static_cast<std::ptrdiff_t>(q), period_.end());
      break;
    }
  }
  while (!prefix_.empty() && prefix_.back() == period_.back()) {
    prefix_.pop_back();
    std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
  }
}

CoordinateRule CoordinateRule::repeat_last(std::vector<GroupElement> coords) {
  if (coords.empty()) throw ContractError("coordinate list is empty");
  GroupElement last = coords.back();
  coords.pop_back();
  return CoordinateRule(std::move(coords), {std::move(last)});
}

CoordinateRule CoordinateRule::constant(std::vector<GroupElement> coords, GroupElement fill) {
  return CoordinateRule(std::move(coords), {std::move(fill)});
}

CoordinateRule CoordinateRule::cycle(std::vector<GroupElement> coords, std::vector<GroupElement> period) {
  return CoordinateRule(std::move(coords), std::move(period));
}

const GroupElement& CoordinateRule::at(std::size_t m) const {
  if (m < 1) throw ContractError("coordinates are numbered from 1");
  if (m <= prefix_.size()) return prefix_[m - 1];
  return period_[(m - prefix_.size() - 1) % period_.size()];
}

bool CoordinateRule::all_identity() const {
  auto id = [](const GroupElement& g) { return g.is_identity(); };
  return std::all_of(prefix_.begin(), prefix_.end(), id) && std::all_of(period_.begin(), period_.end(), id);
}

std::size_t EpsRule::coordinate_at(std::size_t position) {
  if (position < 1) throw ContractError("positions are numbered from 1");
  auto t = static_cast<std::size_t>((std::sqrt(8.0 * static_cast<double>(position) + 1.0) - 1.0) / 2.0);
  while (t * (t + 1) / 2 < position) ++t;
  while (t > 0 && (t - 1) * t / 2 >= position) --t;
  return position - (t - 1) * t / 2;
}

const GroupElement& EpsRule::element_at_index(Index i) const {
  if (i < start_index) throw ContractError("index below the start of the pattern");
  return coords.at(coordinate_at(i - start_index + 1));
}

// ---------------------------------------------------------------------------
// Index permutations and partitions

namespace {

std::vector<Index> invert_permutation(const std::vector<Index>& p, const char* what) {
  std::vector<Index> inv(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 1 || p[i] > p.size() || inv[p[i] - 1] != 0)
      throw ContractError(std::string(what) + " is not a permutation of 1.." + std::to_string(p.size()));
    inv[p[i] - 1] = static_cast<Index>(i + 1);
  }
  return inv;
}

}  // namespace

IndexPermutation::IndexPermutation(std::vector<Index> head, std::vector<Index> block)
    : head_(std::move(head)), block_(std::move(block)) {
  head_inv_ = invert_permutation(head_, "permutation head");
  block_inv_ = invert_permutation(block_, "permutation block");
}

IndexPermutation IndexPermutation::swap(Index a, Index b) {
  if (a < 1 || b < 1) throw ContractError("indices start at 1");
  std::vector<Index> head(std::max(a, b));
  std::iota(head.begin(), head.end(), Index{1});
  std::swap(head[a - 1], head[b - 1]);
  return IndexPermutation(std::move(head));
}

namespace {

Index apply_with(const std::vector<Index>& head, const std::vector<Index>& block, Index i) {
  if (i < 1) throw ContractError("indices start at 1");
  if (i <= head.size()) return head[i - 1];
  if (block.empty()) return i;
  const std::size_t k = i - head.size() - 1;
  const std::size_t p = block.size();
  return static_cast<Index>(head.size() + (k / p) * p + block[k % p]);
}

}  // namespace

Index IndexPermutation::apply(Index i) const { return apply_with(head_, block_, i); }
Index IndexPermutation::inverse(Index i) const { return apply_with(head_inv_, block_inv_, i); }

IndexPartition::IndexPartition(std::vector<Index> excluded, std::vector<std::vector<Index>> blocks,
                               std::size_t chunk)
    : excluded_(std::move(excluded)), blocks_(std::move(blocks)), chunk_(chunk) {
  std::sort(excluded_.begin(), excluded_.end());
  std::set<Index> seen;
  auto claim = [&](Index i) {
    if (i < 1) throw ContractError("partition indices start at 1");
    if (!seen.insert(i).second) throw ContractError("index " + std::to_string(i) + " appears twice in the partition");
  };
  for (Index i : excluded_) claim(i);
  for (const auto& b : blocks_) {
    if (b.empty()) throw ContractError("partition blocks must be non-empty");
    for (Index i : b) claim(i);
  }
  covered_ = seen.empty() ? 0 : *seen.rbegin();
  if (seen.size() != covered_)
    throw ContractError("explicit blocks and excluded indices must cover 1.." + std::to_string(covered_));
  slots_.assign(covered_, std::nullopt);
  for (std::size_t m = 0; m < blocks_.size(); ++m)
    for (std::size_t l = 0; l < blocks_[m].size(); ++l)
      slots_[blocks_[m][l] - 1] = Slot{static_cast<Index>(m + 1), static_cast<Index>(l + 1)};
}

std::optional<IndexPartition::Slot> IndexPartition::slot_of(Index i) const {
  if (i < 1) throw ContractError("indices start at 1");
  if (i <= covered_) return slots_[i - 1];
  if (chunk_ == 0) throw ContractError("index " + std::to_string(i) + " lies outside the partition");
  const std::size_t k = i - covered_ - 1;
  return Slot{static_cast<Index>(blocks_.size() + k / chunk_ + 1), static_cast<Index>(k % chunk_ + 1)};
}

std::vector<Index> IndexPartition::block(Index m) const {
  if (m < 1) throw ContractError("blocks are numbered from 1");
  if (m <= blocks_.size()) return blocks_[m - 1];
  if (chunk_ == 0) throw ContractError("block " + std::to_string(m) + " does not exist");
  const std::size_t q = m - blocks_.size() - 1;
  std::vector<Index> out(chunk_);
  std::iota(out.begin(), out.end(), static_cast<Index>(covered_ + q * chunk_ + 1));
  return out;
}

Index IndexPartition::max_index_upto(Index m) const {
  Index best = 0;
  for (std::size_t b = 0; b < blocks_.size() && b < m; ++b)
    for (Index i : blocks_[b]) best = std::max(best, i);
  if (m > blocks_.size() && chunk_ > 0) best = static_cast<Index>(covered_ + (m - blocks_.size()) * chunk_);
  return best;
}

FamilySpec permuted_family(const IndexPermutation& f, const FamilySpec& spec) {
  if (spec.is_finite()) {
    const std::size_t s = spec.size();
    std::vector<FactorDescriptor> prefix;
    for (Index i = 1; i <= s; ++i) {
      const Index from = f.inverse(i);
      if (from > s) throw ContractError("permutation does not map the finite family 1.." + std::to_string(s) + " onto itself");
      prefix.push_back(spec.at(from));
    }
    return FamilySpec(std::move(prefix));
  }
  const std::size_t k = f.head().size();
  const std::size_t p = std::max<std::size_t>(f.block().size(), 1);
  std::size_t pfx = std::max(k, spec.prefix().size());
  pfx += (p - (pfx - k) % p) % p;
  const std::size_t period = std::lcm(p, spec.tail().size());
  std::vector<FactorDescriptor> prefix, tail;
  for (std::size_t i = 1; i <= pfx; ++i) prefix.push_back(spec.at(f.inverse(static_cast<Index>(i))));
  for (std::size_t i = pfx + 1; i <= pfx + period; ++i) tail.push_back(spec.at(f.inverse(static_cast<Index>(i))));
  return FamilySpec(std::move(prefix), std::move(tail));
}

namespace {

FactorDescriptor block_descriptor(const FamilySpec& spec, const std::vector<Index>& block) {
  std::vector<FactorDescriptor> factors;
  for (Index i : block) factors.push_back(spec.at(i));
  return FactorDescriptor::free_product(std::move(factors));
}

}  // namespace

FamilySpec regrouped_family(const IndexPartition& partition, const FamilySpec& spec) {
  std::vector<FactorDescriptor> prefix, tail;
  const auto& blocks = partition.explicit_blocks();
  if (spec.is_finite()) {
    const std::size_t s = spec.size();
    for (const auto& b : blocks) {
      for (Index i : b)
        if (i > s) throw ContractError("partition block names index " + std::to_string(i) + " outside the family");
      prefix.push_back(block_descriptor(spec, b));
    }
    if (partition.covered() < s) {
      const std::size_t c = partition.chunk();
      if (c == 0) throw ContractError("partition leaves indices of the family uncovered");
      for (std::size_t start = partition.covered() + 1; start <= s; start += c) {
        std::vector<Index> b;
        for (std::size_t i = start; i < start + c && i <= s; ++i) b.push_back(static_cast<Index>(i));
        prefix.push_back(block_descriptor(spec, b));
      }
    }
    return FamilySpec(std::move(prefix));
  }
  const std::size_t c = partition.chunk();
  if (c == 0) throw ContractError("a partition of an infinite family needs a chunk size");
  for (const auto& b : blocks) prefix.push_back(block_descriptor(spec, b));
  const std::size_t covered = partition.covered();
  const std::size_t pre = spec.prefix().size();
  const std::size_t head_chunks = pre <= covered ? 0 : (pre - covered + c - 1) / c;
  const std::size_t period = std::lcm(c, spec.tail().size()) / c;
  const auto first = static_cast<Index>(blocks.size() + 1);
  for (std::size_t q = 0; q < head_chunks; ++q)
    prefix.push_back(block_descriptor(spec, partition.block(static_cast<Index>(first + q))));
  for (std::size_t q = head_chunks; q < head_chunks + period; ++q)
    tail.push_back(block_descriptor(spec, partition.block(static_cast<Index>(first + q))));
  return FamilySpec(std::move(prefix), std::move(tail));
}

FiniteWord permute_word(const IndexPermutation& f, const FiniteWord& w) {
  WordBuilder b;
  for (const auto& l : w.letters()) b.push(Letter{f.apply(l.index), l.element});
  return std::move(b).finish();
}

FiniteWord regroup_word(const IndexPartition& partition, const FamilySpec& target, const FiniteWord& w,
                        std::optional<Index> max_block) {
  WordBuilder b;
  for (const auto& l : w.letters()) {
    const auto slot = partition.slot_of(l.index);
    if (!slot || (max_block && slot->block > *max_block)) continue;
    b.push(Letter{slot->block, GroupElement::from_block(target.at(slot->block), {BlockLetter{slot->local, l.element}})});
  }
  return std::move(b).finish();
}

// ---------------------------------------------------------------------------
// Projections

namespace {

[[noreturn]] void over_budget(Index n, std::size_t needed, std::size_t budget) {
  throw ResourceError("projection at depth " + std::to_string(n) + " needs about " + std::to_string(needed) +
                      " letters, over the word budget of " + std::to_string(budget));
}

std::size_t predicted_power_size(const FiniteWord& w, std::int64_t m) {
  if (w.empty() || m == 0) return 0;
  const auto cr = cyclic_reduce(w);
  const auto am = static_cast<unsigned __int128>(m < 0 ? -static_cast<__int128>(m) : m);
  const unsigned __int128 core = cr.core.size() == 1 ? 1 : am * cr.core.size();
  const unsigned __int128 total = core + 2 * cr.conjugator.size();
  return total > std::numeric_limits<std::size_t>::max() ? std::numeric_limits<std::size_t>::max()
                                                         : static_cast<std::size_t>(total);
}

FiniteWord power_within(const FiniteWord& w, std::int64_t m, Index n, std::size_t budget) {
  const std::size_t need = predicted_power_size(w, m);
  if (need > budget) over_budget(n, need, budget);
  return power(w, m);
}

FiniteWord compute(const SchemaNode& node, Index n, std::size_t budget) {
  switch (node.kind) {
    case NodeKind::Finite:
      return project_upto(node.word, n);
    case NodeKind::Nest: {
      const auto& r = *node.nest;
      const std::int64_t top = r.level_of(n);
      if (top < static_cast<std::int64_t>(r.start_level)) return {};
      FiniteWord w = FiniteWord::from_reduced({Letter{r.index_at(static_cast<Index>(top)), r.element}});
      for (auto level = static_cast<Index>(top); level-- > r.start_level;) {
        const Letter a{r.index_at(level), r.element};
        FiniteWord inner = power_within(w, r.exponent_at(level), n, budget);
        WordBuilder b;
        b.push(a);
        b.append(inner);
        w = std::move(b).finish();
      }
      return w;
    }
    case NodeKind::Eps: {
      const auto& r = *node.eps;
      WordBuilder b;
      for (Index i = r.start_index; i <= n; ++i) b.push(Letter{i, r.element_at_index(i)});
      return std::move(b).finish();
    }
    case NodeKind::Product: {
      FiniteWord acc;
      for (const auto& c : node.children) {
        acc = concat(acc, project_node(*c, n, budget));
        if (acc.size() > budget) over_budget(n, acc.size(), budget);
      }
      return acc;
    }
    case NodeKind::Inverse:
      return invert(project_node(*node.children[0], n, budget));
    case NodeKind::Power:
      return power_within(project_node(*node.children[0], n, budget), node.exponent, n, budget);
    case NodeKind::Tau:
      if (n <= node.level) return {};
      return project_above(project_node(*node.children[0], n, budget), node.level);
    case NodeKind::Permute: {
      Index depth = 0;
      for (Index i = 1; i <= n; ++i) depth = std::max(depth, node.perm.inverse(i));
      const FiniteWord child = project_node(*node.children[0], depth, budget);
      WordBuilder b;
      for (const auto& l : child.letters()) {
        const Index to = node.perm.apply(l.index);
        if (to <= n) b.push(Letter{to, l.element});
      }
      return std::move(b).finish();
    }
    case NodeKind::Regroup: {
      const Index depth = node.partition.max_index_upto(n);
      if (depth == 0) return {};
      return regroup_word(node.partition, *node.spec, project_node(*node.children[0], depth, budget), n);
    }
  }
  return {};
}

}  // namespace

FiniteWord project_node(const SchemaNode& node, Index n, std::size_t budget) {
  {
    std::lock_guard lock(node.mutex);
    auto it = node.projections.find(n);
    if (it != node.projections.end()) {
      if (it->second.size() > budget) over_budget(n, it->second.size(), budget);
      return it->second;
    }
  }
  FiniteWord w = compute(node, n, budget);
  if (w.size() > budget) over_budget(n, w.size(), budget);
  std::lock_guard lock(node.mutex);
  node.projections.emplace(n, w);
  return w;
}

// ---------------------------------------------------------------------------
// Constructors and group operations

namespace {

std::shared_ptr<SchemaNode> make_node(NodeKind kind) {
  auto n = std::make_shared<SchemaNode>();
  n->kind = kind;
  return n;
}

void check_compatible(const ProjectiveWord& u, const ProjectiveWord& v, const char* op) {
  if (&u.spec() != &v.spec() && !(u.spec() == v.spec()))
    throw ContractError(std::string(op) + " of words over different families");
  if (u.base_index() != v.base_index())
    throw ContractError(std::string(op) + " of words with base index " + std::to_string(u.base_index()) + " and " +
                        std::to_string(v.base_index()));
}

}  // namespace

ProjectiveWord ProjectiveWord::finite(const FamilySpec& spec, const FiniteWord& word, Index base) {
  if (base < 1) throw ContractError("base index must be >= 1");
  for (const auto& l : word.letters()) {
    if (l.index < base)
      throw ContractError("letter at index " + std::to_string(l.index) + " below base index " + std::to_string(base));
    if (!spec.contains(l.index)) throw ContractError("letter index " + std::to_string(l.index) + " outside the family");
    if (!(l.element.descriptor() == spec.at(l.index)))
      throw ContractError("letter at index " + std::to_string(l.index) + " carries " + l.element.descriptor().name() +
                          " but the family has " + spec.at(l.index).name());
  }
  auto node = make_node(NodeKind::Finite);
  node->word = word;
  return ProjectiveWord(std::make_shared<const FamilySpec>(spec), base, std::move(node));
}

ProjectiveWord ProjectiveWord::identity(const FamilySpec& spec, Index base) { return finite(spec, {}, base); }

ProjectiveWord ProjectiveWord::nest(const FamilySpec& spec, const NestRule& rule, Index base) {
  if (base < 1) throw ContractError("base index must be >= 1");
  if (spec.is_finite()) throw ContractError("a nested word needs an infinite family");
  if (rule.start_level < 1) throw ContractError("nest levels start at 1");
  if (rule.element.is_identity()) throw ContractError("nest letter must not be the identity");
  const Index first = rule.index_at(rule.start_level);
  if (first < base) throw ContractError("nest starts at index " + std::to_string(first) + " below base " + std::to_string(base));
  if (rule.exp_mul < 0 || rule.exponent_at(rule.start_level) < 1)
    throw ContractError("nest exponents must be >= 1 at every level");
  if (!spec.is_uniform_from(first) || !(spec.at(first) == rule.element.descriptor()))
    throw ContractError("nest letter " + rule.element.descriptor().name() + " must match every factor from index " +
                        std::to_string(first) + " on");
  auto node = make_node(NodeKind::Nest);
  node->nest = rule;
  return ProjectiveWord(std::make_shared<const FamilySpec>(spec), base, std::move(node));
}

ProjectiveWord ProjectiveWord::epsilon(const FamilySpec& spec, const EpsRule& rule, Index base) {
  if (base < 1) throw ContractError("base index must be >= 1");
  if (spec.is_finite()) throw ContractError("the triangular pattern needs an infinite family");
  if (rule.start_index < base) throw ContractError("pattern starts below the base index");
  const auto& d = rule.coords.at(1).descriptor();
  if (!spec.is_uniform_from(rule.start_index) || !(spec.at(rule.start_index) == d))
    throw ContractError("coordinates in " + d.name() + " must match every factor from index " +
                        std::to_string(rule.start_index) + " on");
  auto node = make_node(NodeKind::Eps);
  node->eps = rule;
  return ProjectiveWord(std::make_shared<const FamilySpec>(spec), base, std::move(node));
}

FiniteWord ProjectiveWord::projection(Index n, std::size_t budget) const {
  if (n < base_) throw ContractError("projection depth " + std::to_string(n) + " below base index " + std::to_string(base_));
  return project_node(*node_, n, budget);
}

std::string ProjectiveWord::normal_form() const { return format_normal_form(*normal_form_of(*node_)); }

ProjectiveWord product(const ProjectiveWord& u, const ProjectiveWord& v) { return product(std::vector{u, v}); }

ProjectiveWord product(const std::vector<ProjectiveWord>& factors) {
  if (factors.empty()) throw ContractError("product of no words");
  for (const auto& f : factors) check_compatible(factors.front(), f, "product");
  if (factors.size() == 1) return factors.front();
  auto node = make_node(NodeKind::Product);
  for (const auto& f : factors) node->children.push_back(f.node_);
  return ProjectiveWord(factors.front().spec_, factors.front().base_, std::move(node));
}

ProjectiveWord inverse(const ProjectiveWord& u) {
  auto node = make_node(NodeKind::Inverse);
  node->children.push_back(u.node_);
  return ProjectiveWord(u.spec_, u.base_, std::move(node));
}

ProjectiveWord power(const ProjectiveWord& u, std::int64_t m) {
  auto node = make_node(NodeKind::Power);
  node->children.push_back(u.node_);
  node->exponent = m;
  return ProjectiveWord(u.spec_, u.base_, std::move(node));
}

ProjectiveWord tau(Index j, const ProjectiveWord& w) {
  if (static_cast<std::uint64_t>(j) + 1 < w.base_)
    throw ContractError("tau level " + std::to_string(j) + " below base index " + std::to_string(w.base_) + " - 1");
  if (j + 1 == w.base_) return w;
  auto node = make_node(NodeKind::Tau);
  node->children.push_back(w.node_);
  node->level = j;
  return ProjectiveWord(w.spec_, j + 1, std::move(node));
}

ProjectiveWord with_base(const ProjectiveWord& w, Index base) {
  if (base < 1 || base > w.base_) throw ContractError("with_base can only lower the base index");
  return ProjectiveWord(w.spec_, base, w.node_);
}

ProjectiveWord permute_indices(const IndexPermutation& f, const ProjectiveWord& w) {
  if (w.base_ != 1) throw ContractError("index permutations act on words with base index 1");
  auto spec = std::make_shared<const FamilySpec>(permuted_family(f, *w.spec_));
  auto node = make_node(NodeKind::Permute);
  node->children.push_back(w.node_);
  node->perm = f;
  node->spec = spec;
  return ProjectiveWord(std::move(spec), 1, std::move(node));
}

ProjectiveWord regroup(const IndexPartition& partition, const ProjectiveWord& w) {
  if (w.base_ != 1) throw ContractError("regrouping acts on words with base index 1");
  auto spec = std::make_shared<const FamilySpec>(regrouped_family(partition, *w.spec_));
  auto node = make_node(NodeKind::Regroup);
  node->children.push_back(w.node_);
  node->partition = partition;
  node->spec = spec;
  return ProjectiveWord(std::move(spec), 1, std::move(node));
}

}  // namespace archipelago
