#include "schema_node.hpp"

namespace archipelago {

const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::EqualCertified:
      return "EqualCertified";
    case VerdictStatus::DistinctWitness:
      return "DistinctWitness";
    case VerdictStatus::UnknownUpTo:
      return "UnknownUpTo";
  }
  return "?";
}

const char* to_string(ProofKind p) { return p == ProofKind::Structural ? "structural" : "depth-checked"; }

std::string Verdict::text() const {
  std::string s = to_string(status);
  switch (status) {
    case VerdictStatus::EqualCertified:
      if (proof == ProofKind::DepthChecked) {
        s += "(";
        if (level) s += "j=" + std::to_string(*level) + ", ";
        s += "depth-checked N=" + std::to_string(max_depth) + ")";
      } else if (level) {
        s += "(j=" + std::to_string(*level) + ")";
      }
      break;
    case VerdictStatus::DistinctWitness:
      s += "(n=" + std::to_string(depth.value_or(0)) + ")";
      break;
    case VerdictStatus::UnknownUpTo:
      s += "(";
      if (max_level) s += "J=" + std::to_string(*max_level) + ", ";
      s += "N=" + std::to_string(max_depth);
      if (distinct_at_every_level) s += "; distinct at every level";
      if (budget_stop) s += "; budget reached at depth " + std::to_string(*budget_stop);
      s += ")";
      break;
  }
  return s;
}

nlohmann::ordered_json Verdict::to_json() const {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(status);
  j["text"] = text();
  if (level) j["level"] = *level;
  if (proof) j["proof"] = to_string(*proof);
  if (depth) j["depth"] = *depth;
  if (max_level) j["max_level"] = *max_level;
  j["max_depth"] = max_depth;
  if (max_level) j["distinct_at_every_level"] = distinct_at_every_level;
  if (budget_stop) j["budget_stop"] = *budget_stop;
  if (!levels.empty()) {
    auto& arr = j["levels"] = nlohmann::ordered_json::array();
    for (const auto& l : levels) {
      nlohmann::ordered_json e;
      e["level"] = l.level;
      e["outcome"] = to_string(l.status);
      if (l.depth) e["depth"] = *l.depth;
      arr.push_back(std::move(e));
    }
  }
  return j;
}

namespace {

void check_comparable(const ProjectiveWord& u, const ProjectiveWord& v) {
  if (&u.spec() != &v.spec() && !(u.spec() == v.spec())) throw ContractError("comparing words over different families");
  if (u.base_index() != v.base_index())
    throw ContractError("comparing words with base index " + std::to_string(u.base_index()) + " and " +
                        std::to_string(v.base_index()));
}

std::optional<std::string> try_normal_form(const ProjectiveWord& w) {
  try {
    return w.normal_form();
  } catch (const ResourceError&) {
    return std::nullopt;
  }
}

}  // namespace

Verdict eq_in_product(const ProjectiveWord& u, const ProjectiveWord& v, Index max_depth) {
  check_comparable(u, v);
  Verdict out;
  out.max_depth = max_depth;
  const auto nu = try_normal_form(u);
  if (nu && nu == try_normal_form(v)) {
    out.status = VerdictStatus::EqualCertified;
    out.proof = ProofKind::Structural;
    return out;
  }
  for (Index n = u.base_index(); n <= max_depth; ++n) {
    try {
      if (u.projection(n) != v.projection(n)) {
        out.status = VerdictStatus::DistinctWitness;
        out.depth = n;
        return out;
      }
    } catch (const ResourceError&) {
      out.budget_stop = n;
      break;
    }
    out.depth = n;
  }
  out.status = VerdictStatus::UnknownUpTo;
  return out;
}

Verdict eq_in_archipelago(const ProjectiveWord& u, const ProjectiveWord& v, Index max_level, Index max_depth) {
  check_comparable(u, v);
  Verdict out;
  out.max_level = max_level;
  out.max_depth = max_depth;
  bool all_distinct = true;
  for (Index j = u.base_index() - 1; j <= max_level; ++j) {
    const Verdict r = eq_in_product(tau(j, u), tau(j, v), max_depth);
    out.levels.push_back({j, r.status, r.depth});
    if (r.budget_stop && !out.budget_stop) out.budget_stop = r.budget_stop;
    if (r.status == VerdictStatus::EqualCertified) {
      out.status = VerdictStatus::EqualCertified;
      out.level = j;
      out.proof = ProofKind::Structural;
      return out;
    }
    if (r.status != VerdictStatus::DistinctWitness) all_distinct = false;
  }
  out.status = VerdictStatus::UnknownUpTo;
  out.distinct_at_every_level = all_distinct && !out.levels.empty();
  return out;
}

bool is_divisible_shape(const ProjectiveWord& w) {
  const auto& n = *w.node();
  if (n.kind != NodeKind::Nest) return false;
  const auto& r = *n.nest;
  return r.start_level == 1 && r.index_offset == 0 && r.exp_mul == 1 && r.exp_add == 1;
}

ProjectiveWord nest_from(const ProjectiveWord& w, Index level) {
  const auto& n = *w.node();
  if (n.kind != NodeKind::Nest) throw UnsupportedError("not a nested word");
  NestRule r = *n.nest;
  if (level < r.start_level) throw ContractError("nest_from below the start level");
  r.start_level = level;
  return ProjectiveWord::nest(w.spec(), r, w.base_index());
}

std::vector<ChainStep> divisible_chain(const ProjectiveWord& w, Index n_max, Index check_depth) {
  if (!is_divisible_shape(w))
    throw UnsupportedError("divisible chain needs the nesting a_1(a_2(a_3(...)^4)^3)^2 with e_k = k+1, a_k at index k");
  std::vector<ChainStep> steps;
  std::int64_t fact = 1;  // (n-1)!
  for (Index n = 2; n <= n_max; ++n) {
    const ProjectiveWord prev = nest_from(w, n - 1);
    const ProjectiveWord wn = nest_from(w, n);
    const std::int64_t prev_fact = fact;
    fact = checked_mul(fact, n);
    ChainStep s;
    s.n = n;
    s.exponent = static_cast<std::uint64_t>(fact);
    s.statement = "w ~ w_" + std::to_string(n) + "^" + std::to_string(fact);
    const ProjectiveWord lhs = tau(n - 1, w);
    const ProjectiveWord rhs = power(wn, fact);
    s.step = tau(n - 1, prev).normal_form() == power(wn, n).normal_form();
    s.composed = tau(n - 1, power(prev, prev_fact)).normal_form() == rhs.normal_form();
    s.structural = lhs.normal_form() == rhs.normal_form();
    s.projections = true;
    for (Index d = n; d <= check_depth; ++d) {
      if (lhs.projection(d) != rhs.projection(d)) s.projections = false;
      s.checked_depth = d;
    }
    steps.push_back(std::move(s));
  }
  return steps;
}

}  // namespace archipelago
