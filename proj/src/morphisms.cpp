#include "archipelago/morphisms.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "archipelago/config.hpp"

namespace archipelago {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string key_of(const GroupElement& g) { return format_element(g); }

void require_descriptor(const GroupElement& x, const FactorDescriptor& d, const char* what) {
  if (!(x.descriptor() == d))
    throw ContractError(std::string(what) + " element " + format_element(x) + " of " + x.descriptor().name() +
                        " given to a map on " + d.name());
}

}  // namespace

// ---------------------------------------------------------------------------
// PairingBijection

PairingBijection::PairingBijection(FactorDescriptor source, FactorDescriptor target, std::size_t search_limit)
    : source_(std::move(source)),
      target_(std::move(target)),
      search_limit_(search_limit),
      source_enum_(source_),
      target_enum_(target_) {
  if (source_.has_involution() && !target_.has_involution())
    throw ClassificationError(source_.name() + " has involutions but the target " + target_.name() + " has none");
}

GroupElement PairingBijection::take_target(bool involution) {
  auto& spare = involution ? spare_involutions_ : spare_pairs_;
  while (spare.empty()) {
    if (target_done_) break;
    auto t = target_enum_.next();
    if (!t) {
      target_done_ = true;
      break;
    }
    if (t->is_identity()) continue;
    const std::string k = key_of(*t);
    if (target_used_.count(k)) continue;
    target_used_[k] = true;
    if (is_involution(*t)) {
      spare_involutions_.push_back(*t);
    } else {
      target_used_[key_of(group_inverse(*t))] = true;
      spare_pairs_.push_back(*t);
    }
  }
  if (spare.empty())
    throw MappingError("target " + target_.name() + " has no unused " +
                       (involution ? "involution" : "pair of non-involutions") + " left");
  GroupElement t = spare.front();
  spare.erase(spare.begin());
  return t;
}

void PairingBijection::step() {
  auto s = source_enum_.next();
  if (!s) {
    source_done_ = true;
    return;
  }
  ++source_seen_;
  if (fwd_.count(key_of(*s))) return;
  auto assign = [&](const GroupElement& x, const GroupElement& y) {
    fwd_.emplace(key_of(x), y);
    bwd_.emplace(key_of(y), x);
    order_.emplace_back(x, y);
  };
  if (s->is_identity()) {
    assign(*s, GroupElement::identity(target_));
  } else if (is_involution(*s)) {
    if (!target_.has_involution())
      throw ClassificationError("involution " + format_element(*s) + " cannot map into " + target_.name());
    assign(*s, take_target(true));
  } else {
    const GroupElement t = take_target(false);
    assign(*s, t);
    assign(group_inverse(*s), group_inverse(t));
  }
}

GroupElement PairingBijection::forward(const GroupElement& x) {
  require_descriptor(x, source_, "source");
  const std::string k = key_of(x);
  std::lock_guard lock(mutex_);
  for (;;) {
    if (auto it = fwd_.find(k); it != fwd_.end()) return it->second;
    if (source_done_ || source_seen_ >= search_limit_)
      throw MappingError("element " + k + " of " + source_.name() + " not reached within " +
                         std::to_string(source_seen_) + " enumerated elements");
    step();
  }
}

GroupElement PairingBijection::backward(const GroupElement& y) {
  require_descriptor(y, target_, "target");
  const std::string k = key_of(y);
  std::lock_guard lock(mutex_);
  for (;;) {
    if (auto it = bwd_.find(k); it != bwd_.end()) return it->second;
    if (source_done_ || source_seen_ >= search_limit_)
      throw MappingError("no preimage of " + k + " in " + target_.name() + " after " + std::to_string(source_seen_) +
                         " enumerated source elements");
    step();
  }
}

std::size_t PairingBijection::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::vector<std::pair<GroupElement, GroupElement>> PairingBijection::entries() const {
  std::lock_guard lock(mutex_);
  return order_;
}

std::shared_ptr<PairingBijection> build_pairing(const FactorDescriptor& source, TargetKind kind) {
  const auto target = kind == TargetKind::ZFree ? FactorDescriptor::free_group(FactorDescriptor::kCountable)
                                                : FactorDescriptor::free_involutions(FactorDescriptor::kCountable);
  return std::make_shared<PairingBijection>(source, target);
}

// ---------------------------------------------------------------------------
// ElementMap

ElementMap ElementMap::identity(const FactorDescriptor& d) {
  ElementMap m;
  m.kind_ = Kind::Identity;
  m.source_ = d;
  m.target_ = d;
  return m;
}

ElementMap ElementMap::pairing(std::shared_ptr<PairingBijection> p) {
  if (!p) throw ContractError("null pairing");
  ElementMap m;
  m.kind_ = Kind::Pairing;
  m.source_ = p->source();
  m.target_ = p->target();
  m.pairing_ = std::move(p);
  return m;
}

ElementMap ElementMap::table(const FactorDescriptor& source, const FactorDescriptor& target,
                             const std::vector<std::pair<GroupElement, GroupElement>>& entries) {
  std::vector<std::pair<GroupElement, GroupElement>> rows;
  auto add = [&](const GroupElement& x, const GroupElement& y) {
    for (const auto& [a, b] : rows) {
      if (a == x) {
        if (!(b == y))
          throw ContractError("table sends " + format_element(x) + " to both " + format_element(b) + " and " +
                              format_element(y));
        return;
      }
    }
    rows.emplace_back(x, y);
  };
  for (const auto& [x, y] : entries) {
    require_descriptor(x, source, "source");
    require_descriptor(y, target, "target");
    if (x.is_identity() && !y.is_identity())
      throw ContractError("table sends the identity to " + format_element(y));
    add(x, y);
    add(group_inverse(x), group_inverse(y));
  }
  ElementMap m;
  m.kind_ = Kind::Table;
  m.source_ = source;
  m.target_ = target;
  m.table_ = std::make_shared<const std::vector<std::pair<GroupElement, GroupElement>>>(std::move(rows));
  return m;
}

GroupElement ElementMap::apply(const GroupElement& x) const {
  require_descriptor(x, source_, "source");
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Pairing:
      return backward_ ? pairing_->backward(x) : pairing_->forward(x);
    case Kind::Table:
      if (x.is_identity()) return GroupElement::identity(target_);
      for (const auto& [a, b] : *table_)
        if (a == x) return b;
      throw MappingError("table on " + source_.name() + " has no image for " + format_element(x));
  }
  return x;
}

ElementMap ElementMap::inverse() const {
  ElementMap m = *this;
  std::swap(m.source_, m.target_);
  switch (kind_) {
    case Kind::Identity:
      break;
    case Kind::Pairing:
      m.backward_ = !backward_;
      break;
    case Kind::Table: {
      std::vector<std::pair<GroupElement, GroupElement>> rows;
      for (const auto& [a, b] : *table_) {
        if (b.is_identity() && !a.is_identity())
          throw ContractError("table sends " + format_element(a) + " to the identity and has no inverse");
        for (const auto& [c, d] : rows)
          if (c == b) throw ContractError("table is not injective at " + format_element(b));
        rows.emplace_back(b, a);
      }
      m.table_ = std::make_shared<const std::vector<std::pair<GroupElement, GroupElement>>>(std::move(rows));
      break;
    }
  }
  return m;
}

std::vector<GroupElement> ElementMap::domain() const {
  std::vector<GroupElement> out;
  if (kind_ == Kind::Table)
    for (const auto& row : *table_) out.push_back(row.first);
  return out;
}

std::string ElementMap::describe() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity on " + source_.name();
    case Kind::Pairing:
      return std::string(backward_ ? "inverse pairing " : "pairing ") + source_.name() + " -> " + target_.name();
    case Kind::Table:
      return "table " + source_.name() + " -> " + target_.name();
  }
  return {};
}

ordered_json MapValidation::to_json() const {
  ordered_json j;
  j["slot"] = slot;
  j["checked"] = checked;
  j["identity"] = identity;
  j["inverse"] = inverse;
  j["involutions"] = involutions;
  j["injective"] = injective;
  j["backward"] = backward;
  if (failure) j["failure"] = *failure;
  return j;
}

MapValidation validate(const ElementMap& m, std::size_t limit) {
  MapValidation r;
  const bool table = m.kind() == ElementMap::Kind::Table;
  const auto xs = table ? m.domain() : enumerate(m.source(), limit);
  const std::optional<ElementMap> inv = table ? std::nullopt : std::optional<ElementMap>(m.inverse());
  std::unordered_set<std::string> images;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    if (!r.failure) r.failure = why;
  };
  for (const auto& x : xs) {
    const GroupElement y = m.apply(x);
    ++r.checked;
    const std::string xs_ = format_element(x), ys = format_element(y);
    if (x.is_identity() != y.is_identity()) {
      if (x.is_identity() || !table) fail(r.identity, "identity status differs at " + xs_ + " -> " + ys);
    }
    if (!(m.apply(group_inverse(x)) == group_inverse(y))) fail(r.inverse, "inverse not preserved at " + xs_);
    if (!table) {
      if (is_involution(x) != is_involution(y)) fail(r.involutions, "involution status differs at " + xs_ + " -> " + ys);
      if (!images.insert(ys).second) fail(r.injective, "image " + ys + " repeats");
      if (!(inv->apply(y) == x)) fail(r.backward, "inverse map does not return " + xs_);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// LetterMap

namespace {

ElementMap entry_map(const FactorDescriptor& source, const json& e) {
  if (e.is_string()) {
    const auto s = e.get<std::string>();
    if (s == "identity") return ElementMap::identity(source);
    if (s == "pairing:Z") return ElementMap::pairing(std::make_shared<PairingBijection>(source, FactorDescriptor::integers()));
    if (s == "pairing:Z2")
      return ElementMap::pairing(
          std::make_shared<PairingBijection>(source, FactorDescriptor::free_involutions(FactorDescriptor::kCountable)));
    throw ParseError("unknown letter map entry \"" + s + "\"");
  }
  if (!e.is_object()) throw ParseError("letter map entries must be strings or objects");
  if (e.contains("pairing")) {
    if (e.size() != 1) throw ParseError("a pairing entry takes only the target descriptor");
    return ElementMap::pairing(std::make_shared<PairingBijection>(source, descriptor_from_json(e.at("pairing"))));
  }
  if (e.contains("table")) {
    for (const auto& [k, v] : e.items())
      if (k != "table" && k != "target") throw ParseError("unknown table entry key \"" + k + "\"");
    const FactorDescriptor target = e.contains("target") ? descriptor_from_json(e.at("target")) : source;
    const auto& rows = e.at("table");
    if (!rows.is_array()) throw ParseError("\"table\" expects an array of [source, target] pairs");
    auto literal = [](const json& x) {
      if (x.is_string()) return x.get<std::string>();
      if (x.is_number_integer()) return std::to_string(x.get<std::int64_t>());
      throw ParseError("table elements must be strings or integers");
    };
    std::vector<std::pair<GroupElement, GroupElement>> pairs;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 2) throw ParseError("table rows must be [source, target] pairs");
      pairs.emplace_back(parse_element(source, literal(row[0])), parse_element(target, literal(row[1])));
    }
    try {
      return ElementMap::table(source, target, pairs);
    } catch (const ContractError& err) {
      throw ParseError(std::string("invalid table: ") + err.what());
    }
  }
  throw ParseError("letter map entry must name \"pairing\" or \"table\"");
}

std::size_t checked_span(const FamilySpec& spec, std::size_t prefix, std::size_t tail) {
  if (spec.is_finite()) return spec.size();
  return std::max(prefix, spec.prefix().size()) + std::max<std::size_t>(1, tail) * spec.tail().size();
}

}  // namespace

LetterMap::LetterMap(FamilySpec source, std::vector<ElementMap> prefix, std::vector<ElementMap> tail)
    : source_(std::move(source)), prefix_(std::move(prefix)), tail_(std::move(tail)) {
  const std::size_t span = checked_span(source_, prefix_.size(), tail_.size());
  if (!source_.is_finite() && tail_.empty()) throw ContractError("a letter map over an infinite family needs tail rules");
  if (source_.is_finite() && prefix_.size() < source_.size() && tail_.empty())
    throw ContractError("letter map covers only " + std::to_string(prefix_.size()) + " of " +
                        std::to_string(source_.size()) + " indices");
  for (Index i = 1; i <= span; ++i)
    if (!(at(i).source() == source_.at(i)))
      throw ContractError("letter map rule at index " + std::to_string(i) + " is for " + at(i).source().name() +
                          " but the family has " + source_.at(i).name());
  std::vector<FactorDescriptor> tp, tt;
  if (source_.is_finite()) {
    for (Index i = 1; i <= source_.size(); ++i) tp.push_back(at(i).target());
  } else {
    for (const auto& m : prefix_) tp.push_back(m.target());
    for (const auto& m : tail_) tt.push_back(m.target());
  }
  target_ = FamilySpec(std::move(tp), std::move(tt));
}

const ElementMap& LetterMap::at(Index i) const {
  if (i < 1) throw ContractError("indices start at 1");
  if (i <= prefix_.size()) return prefix_[i - 1];
  if (tail_.empty()) throw ContractError("letter map has no rule for index " + std::to_string(i));
  return tail_[(i - prefix_.size() - 1) % tail_.size()];
}

LetterMap LetterMap::uniform_identity(const FamilySpec& source) {
  std::vector<ElementMap> p, t;
  for (const auto& d : source.prefix()) p.push_back(ElementMap::identity(d));
  for (const auto& d : source.tail()) t.push_back(ElementMap::identity(d));
  return LetterMap(source, std::move(p), std::move(t));
}

LetterMap LetterMap::uniform_pairing(const FamilySpec& source, TargetKind kind) {
  std::vector<ElementMap> p, t;
  for (const auto& d : source.prefix()) p.push_back(ElementMap::pairing(build_pairing(d, kind)));
  for (const auto& d : source.tail()) t.push_back(ElementMap::pairing(build_pairing(d, kind)));
  return LetterMap(source, std::move(p), std::move(t));
}

LetterMap LetterMap::from_json(const FamilySpec& source, const json& j) {
  json prefix = json::array(), tail = json::array();
  if (j.is_object() && (j.contains("prefix") || j.contains("tail"))) {
    for (const auto& [k, v] : j.items())
      if (k != "prefix" && k != "tail") throw ParseError("unknown letter map key \"" + k + "\"");
    if (j.contains("prefix")) prefix = j.at("prefix");
    if (j.contains("tail")) tail = j.at("tail");
    if (!prefix.is_array() || !tail.is_array()) throw ParseError("letter map \"prefix\" and \"tail\" must be arrays");
  } else {
    tail.push_back(j);
  }
  if (source.is_finite() && tail.size() > 0) {
    const std::size_t listed = prefix.size();
    while (prefix.size() < source.size()) prefix.push_back(tail[(prefix.size() - listed) % tail.size()]);
    tail = json::array();
  }
  const auto layout = common_layout(source.prefix().size(), source.tail().size(), prefix.size(), tail.size());
  auto entry_at = [&](Index i) -> const json& {
    if (i <= prefix.size()) return prefix[i - 1];
    if (tail.empty()) throw ParseError("letter map has no rule for index " + std::to_string(i));
    return tail[(i - prefix.size() - 1) % tail.size()];
  };
  std::vector<ElementMap> p, t;
  const std::size_t pre = source.is_finite() ? source.size() : layout.prefix;
  if (source.is_finite() && prefix.size() < pre)
    throw ParseError("letter map covers only " + std::to_string(prefix.size()) + " of " + std::to_string(pre) + " indices");
  for (Index i = 1; i <= pre; ++i) p.push_back(entry_map(source.at(i), entry_at(i)));
  if (!source.is_finite())
    for (Index i = pre + 1; i <= pre + layout.period; ++i) t.push_back(entry_map(source.at(i), entry_at(i)));
  return LetterMap(source, std::move(p), std::move(t));
}

LetterMap LetterMap::load(const FamilySpec& source, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open letter map " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ParseError(std::string("letter map is not valid JSON: ") + e.what());
  }
  return from_json(source, j);
}

LetterMap LetterMap::inverse() const {
  std::vector<ElementMap> p, t;
  for (const auto& m : prefix_) p.push_back(m.inverse());
  for (const auto& m : tail_) t.push_back(m.inverse());
  return LetterMap(target_, std::move(p), std::move(t));
}

std::vector<MapValidation> LetterMap::validate(std::size_t limit) const {
  std::vector<MapValidation> out;
  for (std::size_t k = 0; k < prefix_.size(); ++k) {
    out.push_back(archipelago::validate(prefix_[k], limit));
    out.back().slot = "index " + std::to_string(k + 1);
  }
  for (std::size_t k = 0; k < tail_.size(); ++k) {
    out.push_back(archipelago::validate(tail_[k], limit));
    out.back().slot = "tail slot " + std::to_string(k + 1);
  }
  return out;
}

FiniteWord apply_letter_map(const LetterMap& m, const FiniteWord& u) {
  WordBuilder b;
  b.reserve(u.size());
  for (const auto& l : u.letters()) {
    const ElementMap& e = m.at(l.index);
    b.push(Letter{l.index, e.apply(l.element)});
  }
  return std::move(b).finish();
}

DepthFamily lift_phi(const LetterMap& m, const ProjectiveWord& w) {
  return DepthFamily{w.base_index(), [m, w](Index n) { return apply_letter_map(m, w.projection(n)); }};
}

std::optional<Index> compatibility_defect(const DepthFamily& f, Index max_depth) {
  if (max_depth <= f.base_index) return std::nullopt;
  FiniteWord prev = f.at(f.base_index);
  for (Index n = f.base_index; n < max_depth; ++n) {
    FiniteWord next = f.at(n + 1);
    if (project_upto(next, n) != prev) return n;
    prev = std::move(next);
  }
  return std::nullopt;
}

Verdict claim_certify(const LetterMap& m, const ProjectiveWord& u, const ProjectiveWord& v, Index max_level,
                      Index max_depth) {
  if (u.base_index() != v.base_index()) throw ContractError("claim_certify needs words with one base index");
  const Index base = u.base_index();
  const ProjectiveWord uv = product(u, v);
  Verdict out;
  out.max_level = max_level;
  out.max_depth = max_depth;
  out.proof = ProofKind::DepthChecked;
  std::vector<std::pair<FiniteWord, FiniteWord>> sides;  // depth base + k
  for (Index n = base; n <= max_depth; ++n) {
    try {
      FiniteWord lhs = apply_letter_map(m, uv.projection(n));
      FiniteWord rhs = concat(apply_letter_map(m, u.projection(n)), apply_letter_map(m, v.projection(n)));
      sides.emplace_back(std::move(lhs), std::move(rhs));
    } catch (const ResourceError&) {
      out.budget_stop = n;
      break;
    }
  }
  const Index reached = base + static_cast<Index>(sides.size()) - 1;
  bool all_distinct = true;
  for (Index j = base - 1; j <= max_level; ++j) {
    std::optional<Index> differ;
    for (std::size_t k = 0; k < sides.size() && !differ; ++k)
      if (project_above(sides[k].first, j) != project_above(sides[k].second, j)) differ = base + static_cast<Index>(k);
    if (differ) {
      out.levels.push_back({j, VerdictStatus::DistinctWitness, differ});
      continue;
    }
    all_distinct = false;
    out.levels.push_back({j, out.budget_stop ? VerdictStatus::UnknownUpTo : VerdictStatus::EqualCertified, reached});
    if (!out.budget_stop) {
      out.status = VerdictStatus::EqualCertified;
      out.level = j;
      out.depth = reached;
      return out;
    }
  }
  out.status = VerdictStatus::UnknownUpTo;
  out.proof.reset();
  out.depth = reached;
  out.distinct_at_every_level = all_distinct && !out.levels.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Classification

ordered_json Cardinality::to_json() const {
  switch (kind) {
    case Kind::Finite:
      return count;
    case Kind::Countable:
      return "countable";
    case Kind::Uncountable:
      return "uncountable";
  }
  return nullptr;
}

ClassificationProfile ClassificationProfile::from_family(const FamilySpec& spec) {
  auto entry = [](const FactorDescriptor& d) {
    Entry e;
    const auto order = d.order();
    e.kappa = order ? Cardinality::finite(*order - 1) : Cardinality::countable();
    e.involution = d.has_involution();
    return e;
  };
  ClassificationProfile p;
  for (const auto& d : spec.prefix()) p.prefix.push_back(entry(d));
  for (const auto& d : spec.tail()) p.tail.push_back(entry(d));
  return p;
}

Cardinality ClassificationProfile::lambda() const {
  for (const auto& e : tail)
    if (e.involution) return Cardinality::countable();
  std::uint64_t n = 0;
  for (const auto& e : prefix) n += e.involution;
  return Cardinality::finite(n);
}

const char* to_string(Prototype p) {
  switch (p) {
    case Prototype::Trivial:
      return "Trivial";
    case Prototype::AZ:
      return "A_Z";
    case Prototype::AZ2:
      return "A_Z2";
    case Prototype::Unsupported:
      return "Unsupported";
  }
  return "?";
}

Prototype classify(const ClassificationProfile& profile) {
  for (const auto* list : {&profile.prefix, &profile.tail})
    for (const auto& e : *list)
      if (e.kappa.kind == Cardinality::Kind::Uncountable) return Prototype::Unsupported;
  // Finitely many nontrivial factors leave a trivial quotient.
  if (std::all_of(profile.tail.begin(), profile.tail.end(), [](const auto& e) { return e.kappa.is_zero(); }))
    return Prototype::Trivial;
  return profile.lambda().kind == Cardinality::Kind::Finite ? Prototype::AZ : Prototype::AZ2;
}

bool profile_consistent(const ClassificationProfile& profile, const FamilySpec& spec, std::size_t limit) {
  auto check = [&](const ClassificationProfile::Entry& e, const FactorDescriptor& d) {
    const auto xs = enumerate(d, limit);
    const bool found = std::any_of(xs.begin(), xs.end(), [](const GroupElement& g) { return is_involution(g); });
    const bool exhaustive = d.order() && *d.order() <= limit;
    if (found && !e.involution) return false;
    if (exhaustive && found != e.involution) return false;
    if (exhaustive && !(e.kappa == Cardinality::finite(*d.order() - 1))) return false;
    return true;
  };
  if (profile.prefix.size() != spec.prefix().size() || profile.tail.size() != spec.tail().size()) return false;
  for (std::size_t k = 0; k < spec.prefix().size(); ++k)
    if (!check(profile.prefix[k], spec.prefix()[k])) return false;
  for (std::size_t k = 0; k < spec.tail().size(); ++k)
    if (!check(profile.tail[k], spec.tail()[k])) return false;
  return true;
}

bool ClassificationReport::witnesses_ok() const {
  return std::all_of(witness_maps.begin(), witness_maps.end(), [](const auto& w) { return w.validation.ok(); });
}

ordered_json ClassificationReport::to_json() const {
  ordered_json j;
  j["prototype"] = to_string(prototype);
  j["lambda"] = profile.lambda().to_json();
  ordered_json kp = ordered_json::array(), kt = ordered_json::array();
  for (const auto& e : profile.prefix) kp.push_back(e.kappa.to_json());
  for (const auto& e : profile.tail) kt.push_back(e.kappa.to_json());
  j["kappa"] = {{"prefix", kp}, {"tail", kt}};
  if (partition) {
    ordered_json blocks = ordered_json::array();
    for (const auto& b : partition->explicit_blocks()) blocks.push_back(b);
    j["partition"] = {{"excluded", partition->excluded()}, {"blocks", blocks}, {"chunk", partition->chunk()}};
  }
  ordered_json maps = ordered_json::array();
  for (const auto& w : witness_maps) {
    ordered_json m;
    m["block"] = w.block;
    m["indices"] = w.indices;
    m["source"] = descriptor_to_json(w.pairing->source());
    m["target"] = descriptor_to_json(w.pairing->target());
    ordered_json sample = ordered_json::array();
    for (const auto& [x, y] : w.pairing->entries()) {
      if (sample.size() == 6) break;
      sample.push_back({format_element(x), format_element(y)});
    }
    m["sample"] = sample;
    m["validation"] = w.validation.to_json();
    maps.push_back(std::move(m));
  }
  j["witness_maps"] = maps;
  return j;
}

namespace {

/// Regrouping in which every block holds at least two nontrivial factors
/// and, in the involution case, one factor with an involution; in the other
/// case the finitely many involution indices are excluded.
IndexPartition witness_partition(const FamilySpec& spec, bool involution_case) {
  const std::size_t pre = spec.prefix().size(), period = spec.tail().size();
  const auto nontrivial = std::count_if(spec.tail().begin(), spec.tail().end(),
                                        [](const FactorDescriptor& d) { return !d.is_trivial(); });
  const std::size_t chunk = nontrivial >= 2 ? period : 2 * period;
  std::vector<Index> excluded, first;
  for (Index i = 1; i <= pre; ++i) {
    if (!involution_case && spec.at(i).has_involution())
      excluded.push_back(i);
    else
      first.push_back(i);
  }
  std::vector<std::vector<Index>> blocks;
  if (!first.empty()) {
    for (std::size_t k = 1; k <= chunk; ++k) first.push_back(static_cast<Index>(pre + k));
    blocks.push_back(std::move(first));
  }
  return IndexPartition(std::move(excluded), std::move(blocks), chunk);
}

FactorDescriptor block_target(const FamilySpec& spec, const std::vector<Index>& indices, bool involution_case) {
  std::uint64_t rank = 0;
  bool infinite = false;
  for (Index i : indices) {
    const auto order = spec.at(i).order();
    if (!order) infinite = true;
    else rank += *order - 1;
  }
  const std::uint32_t r = infinite || rank > UINT32_MAX ? FactorDescriptor::kCountable : static_cast<std::uint32_t>(rank);
  return involution_case ? FactorDescriptor::free_involutions(r) : FactorDescriptor::free_group(r);
}

}  // namespace

ClassificationReport classification_report(const FamilySpec& spec, bool with_witness, std::size_t limit) {
  ClassificationReport r;
  r.profile = ClassificationProfile::from_family(spec);
  r.prototype = classify(r.profile);
  if (!with_witness || (r.prototype != Prototype::AZ && r.prototype != Prototype::AZ2)) return r;
  const bool inv = r.prototype == Prototype::AZ2;
  r.partition = witness_partition(spec, inv);
  r.blocks = regrouped_family(*r.partition, spec);
  const std::size_t slots = r.blocks->prefix().size() + r.blocks->tail().size();
  for (Index m = 1; m <= slots; ++m) {
    BlockWitness w;
    w.block = m;
    w.indices = r.partition->block(m);
    w.pairing = std::make_shared<PairingBijection>(r.blocks->at(m), block_target(spec, w.indices, inv));
    w.validation = validate(ElementMap::pairing(w.pairing), limit);
    w.validation.slot = "block " + std::to_string(m);
    r.witness_maps.push_back(std::move(w));
  }
  return r;
}

}  // namespace archipelago
