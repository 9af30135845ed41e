#include "archipelago/constructions.hpp"

#include <algorithm>

namespace archipelago {

using nlohmann::ordered_json;

bool WitnessReport::ok() const {
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.ok; });
}

ordered_json WitnessReport::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["parameters"] = parameters;
  ordered_json certs = ordered_json::array();
  for (const auto& c : certificates) {
    ordered_json e;
    e["statement"] = c.statement;
    if (c.level) e["level"] = *c.level;
    if (c.depth) e["depth"] = *c.depth;
    e["outcome"] = c.outcome;
    e["ok"] = c.ok;
    if (!c.details.is_null()) e["details"] = c.details;
    certs.push_back(std::move(e));
  }
  j["certificates"] = certs;
  j["resources"] = resources.is_null() ? ordered_json::object() : resources;
  j["summary"] = summary;
  j["ok"] = ok();
  return j;
}

std::string WitnessReport::text() const {
  constexpr std::size_t kShown = 12;
  std::string s = name + ": " + summary + "\n";
  for (std::size_t k = 0; k < certificates.size() && k < kShown; ++k) {
    const auto& c = certificates[k];
    s += std::string("  [") + (c.ok ? "ok" : "FAIL") + "] " + c.statement + "  " + c.outcome + "\n";
  }
  if (certificates.size() > kShown)
    s += "  ... " + std::to_string(certificates.size() - kShown) + " more (use --format json)\n";
  return s;
}

// ---------------------------------------------------------------------------

namespace {

const FamilySpec& all_integers() {
  static const FamilySpec spec = FamilySpec::uniform(FactorDescriptor::integers());
  return spec;
}

}  // namespace

ProjectiveWord divisible_word(Index level) {
  const auto& spec = all_integers();
  return ProjectiveWord::nest(spec, NestRule{level, 0, GroupElement::from_integer(spec.at(1), 1), 1, 1});
}

WitnessReport divisible_witness(Index n_max, Index check_depth) {
  WitnessReport r;
  r.name = "divisible";
  r.parameters = {{"n_max", n_max}, {"check_depth", check_depth}};
  const ProjectiveWord w = divisible_word();

  // eps(1) = w and eps(1/2) = w_2, so w ~ eps(1/2)^2 through the generic
  // archipelago search, independently of the chain below.
  {
    const ProjectiveWord half_squared = power(nest_from(w, 2), 2);
    const Verdict v = eq_in_archipelago(w, half_squared, 1, check_depth);
    bool projections = true;
    const ProjectiveWord lhs = tau(1, w), rhs = tau(1, half_squared);
    for (Index d = 2; d <= check_depth; ++d)
      if (lhs.projection(d) != rhs.projection(d)) projections = false;
    Certificate c;
    c.statement = "w ~ eps(1/2)^2";
    c.level = v.level;
    c.depth = check_depth;
    c.outcome = v.text();
    c.ok = v.status == VerdictStatus::EqualCertified && projections;
    c.details = {{"projections", projections}};
    r.certificates.push_back(std::move(c));
  }

  for (const auto& s : divisible_chain(w, n_max, check_depth)) {
    Certificate c;
    c.statement = s.statement;
    c.level = s.n - 1;
    c.depth = s.checked_depth;
    c.ok = s.ok();
    c.outcome = c.ok ? "EqualCertified(j=" + std::to_string(s.n - 1) + ")" : "not certified";
    c.details = {{"exponent", s.exponent},
                 {"step", s.step},
                 {"composed", s.composed},
                 {"structural", s.structural},
                 {"projections", s.projections}};
    r.certificates.push_back(std::move(c));
  }
  r.resources = {{"letters_at_check_depth", w.projection(check_depth).size()}, {"word_budget", kDefaultWordBudget}};
  r.summary = std::to_string(r.certificates.size() - 1) + " chain certificates" +
              (r.ok() ? ", all structural and cross-checked to depth " + std::to_string(check_depth)
                      : ", some NOT certified");
  return r;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::int64_t>> binary_sequences(std::size_t length) {
  if (length >= 63) throw ResourceError("binary sequences of length " + std::to_string(length));
  std::vector<std::vector<std::int64_t>> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << length); ++bits) {
    std::vector<std::int64_t> s(length);
    for (std::size_t k = 0; k < length; ++k) s[k] = (bits >> (length - 1 - k)) & 1;
    out.push_back(std::move(s));
  }
  return out;
}

ProjectiveWord epsilon_word(const FactorDescriptor& d, const std::vector<GroupElement>& coords, EpsTail tail) {
  if (coords.empty()) throw ContractError("an epsilon word needs at least one coordinate");
  CoordinateRule rule = tail == EpsTail::RepeatLast ? CoordinateRule::repeat_last(coords)
                                                    : CoordinateRule::constant(coords, GroupElement::identity(d));
  return ProjectiveWord::epsilon(FamilySpec::uniform(d), EpsRule{1, std::move(rule)});
}

namespace {

std::string sequence_text(const std::vector<GroupElement>& xs) {
  std::string s = "(";
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + format_element(xs[k]);
  return s + ")";
}

}  // namespace

WitnessReport epsilon_distinctness(const FactorDescriptor& d, const std::vector<std::vector<GroupElement>>& sequences,
                                   Index max_level, Index max_depth, EpsTail tail, Execution exec) {
  WitnessReport r;
  r.name = "epsilon";
  r.parameters = {{"factor", d.name()},
                  {"sequences", sequences.size()},
                  {"max_level", max_level},
                  {"max_depth", max_depth},
                  {"tail", tail == EpsTail::RepeatLast ? "repeat-last" : "identity"}};
  std::vector<ProjectiveWord> words;
  std::vector<std::string> forms;
  for (const auto& s : sequences) {
    words.push_back(epsilon_word(d, s, tail));
    forms.push_back(words.back().normal_form());
  }
  std::size_t distinct = 0, separated = 0, identical = 0, identical_separated = 0;
  Index deepest = 0;
  for (const auto& p : separate_pairs(words, max_level, max_depth, exec)) {
    const bool same = forms[p.first] == forms[p.second];
    Certificate c;
    c.statement = "eps" + sequence_text(sequences[p.first]) + " vs eps" + sequence_text(sequences[p.second]);
    c.level = max_level;
    ordered_json depths = ordered_json::array();
    bool any = false;
    for (const auto& x : p.depth) {
      depths.push_back(x ? ordered_json(*x) : ordered_json(nullptr));
      if (x) {
        any = true;
        deepest = std::max(deepest, *x);
      }
    }
    c.details = {{"depths", depths}};
    if (same) {
      ++identical;
      identical_separated += any;
      c.ok = !any;
      c.outcome = any ? "identical sequences separated" : "expected equal";
    } else {
      ++distinct;
      const bool all = p.separated_everywhere();
      separated += all;
      c.ok = all;
      c.outcome = all ? "DistinctWitness at every level" : "not separated at some level";
      if (all) c.depth = *std::max_element(p.depth.begin(), p.depth.end());
    }
    r.certificates.push_back(std::move(c));
  }
  r.resources = {{"deepest_separation", deepest}};
  r.summary = std::to_string(separated) + " of " + std::to_string(distinct) +
              " distinct pairs separated at every level j <= " + std::to_string(max_level) + " within depth " +
              std::to_string(max_depth) + "; " + std::to_string(identical) + " identical pairs, " +
              std::to_string(identical_separated) + " separated";
  return r;
}

// ---------------------------------------------------------------------------

WitnessReport conjugate_families_witness(const FamilySpec& spec, const Letter& g, const Letter& h,
                                         const Letter& a, std::size_t count, std::size_t census_syllables) {
  for (const auto* l : {&g, &h, &a})
    if (!(l->element.descriptor() == spec.at(l->index)))
      throw ContractError("letter at index " + std::to_string(l->index) + " is not from " + spec.at(l->index).name());
  WitnessReport r;
  r.name = "lemma20";
  r.parameters = {{"g", format_word(reduce(std::vector<Letter>{g}))},
                  {"h", format_word(reduce(std::vector<Letter>{h}))},
                  {"a", format_word(reduce(std::vector<Letter>{a}))},
                  {"count", count},
                  {"census_syllables", census_syllables}};
  const FamilyCheck f = involution_families(g, h, a, count);
  auto cert = [&](std::string statement, bool ok) {
    Certificate c;
    c.statement = std::move(statement);
    c.ok = ok;
    c.outcome = ok ? "verified" : "violated";
    r.certificates.push_back(std::move(c));
  };
  const std::string n = std::to_string(count);
  cert("(gh)^n pairwise distinct, n = 1.." + n, f.powers_distinct);
  cert("(gh)^n non-involutions, n = 1.." + n, f.powers_non_involutions);
  cert("a^((gh)^n) pairwise distinct, n = 0.." + std::to_string(count - 1), f.conjugates_distinct);
  cert("(a^((gh)^n))^2 = 1, n = 0.." + std::to_string(count - 1), f.conjugates_involutions);

  const Index top = std::max({g.index, h.index, a.index});
  bool finite = true;
  for (Index i = 1; i <= top; ++i) finite = finite && spec.at(i).order().has_value();
  ordered_json census_words = ordered_json::array();
  if (finite) {
    const InvolutionCensus census = involution_census(spec, census_syllables, top);
    for (const auto& w : census.involution_words) census_words.push_back(format_word(w));
    bool inside = true;
    for (const auto& w : f.conjugates)
      if (w.size() <= census_syllables &&
          std::find(census.involution_words.begin(), census.involution_words.end(), w) == census.involution_words.end())
        inside = false;
    cert("short conjugates appear in the involution census", inside);
    Certificate c;
    c.statement = "involution census up to " + std::to_string(census_syllables) + " syllables";
    c.outcome = std::to_string(census.involutions) + " involutions among " + std::to_string(census.words) + " words";
    c.ok = true;
    c.details = {{"involutions", census_words}};
    r.certificates.push_back(std::move(c));
  }
  ordered_json lengths = ordered_json::array();
  for (std::size_t k = 0; k < f.powers.size() && k < 5; ++k) lengths.push_back(f.powers[k].size());
  r.resources = {{"power_syllables", lengths},
                 {"longest_conjugate", f.conjugates.empty() ? 0 : f.conjugates.back().size()}};
  r.summary = r.ok() ? "both families of " + n + " elements verified" : "family check FAILED";
  return r;
}

// ---------------------------------------------------------------------------

std::vector<ClaimCase> claim_suite() {
  using nlohmann::json;
  const auto Z = FactorDescriptor::integers();
  const auto C2 = FactorDescriptor::cyclic(2);
  const auto C3 = FactorDescriptor::cyclic(3);
  const FamilySpec& zs = all_integers();
  const FamilySpec cs = FamilySpec::uniform(C3);
  const FamilySpec mixed({C2, C3}, {Z});

  const LetterMap to_w = LetterMap::from_json(zs, json("pairing:Z2"));
  const LetterMap to_z = LetterMap::from_json(cs, json("pairing:Z"));
  const LetterMap mixed_map =
      LetterMap::from_json(mixed, json::parse(R"({"prefix": ["pairing:Z2", "pairing:Z"], "tail": ["pairing:Z2"]})"));

  auto zl = [&](std::vector<std::pair<Index, std::int64_t>> xs, const FamilySpec& spec = all_integers()) {
    std::vector<Letter> raw;
    for (auto [i, v] : xs) raw.push_back({i, GroupElement::from_integer(spec.at(i), v)});
    return ProjectiveWord::finite(spec, reduce(raw));
  };
  const ProjectiveWord w = divisible_word(1), w2 = divisible_word(2), w3 = divisible_word(3);
  const ProjectiveWord e = ProjectiveWord::epsilon(
      zs, EpsRule{2, CoordinateRule::repeat_last({GroupElement::from_integer(Z, 1), GroupElement::from_integer(Z, -2)})});
  const ProjectiveWord e1 = epsilon_word(Z, {GroupElement::from_integer(Z, 2), GroupElement::from_integer(Z, 1)},
                                         EpsTail::RepeatLast);
  const ProjectiveWord wc = ProjectiveWord::nest(cs, NestRule{1, 0, GroupElement::from_integer(C3, 1), 1, 1});
  const ProjectiveWord wc2 = ProjectiveWord::nest(cs, NestRule{2, 0, GroupElement::from_integer(C3, 2), 0, 2});
  const ProjectiveWord em = ProjectiveWord::epsilon(
      mixed, EpsRule{3, CoordinateRule::repeat_last({GroupElement::from_integer(Z, 3), GroupElement::from_integer(Z, 0)})});

  std::vector<ClaimCase> cases;
  auto add = [&](std::string name, const LetterMap& m, ProjectiveWord u, ProjectiveWord v) {
    cases.push_back({std::move(name), m, std::move(u), std::move(v)});
  };
  add("merge a1 | a1^2", to_w, zl({{1, 1}}), zl({{1, 2}}));
  add("cancel a3 a2 then merge a1", to_w, zl({{1, 1}, {2, 1}, {3, 1}}), zl({{3, -1}, {2, -1}, {1, 2}}));
  add("w | w", to_w, w, w);
  add("w | w^-1", to_w, w, inverse(w));
  add("w | w_2^-1", to_w, w, inverse(w2));
  add("w_2^-1 | w", to_w, inverse(w2), w);
  add("merge a1^2 | w", to_w, zl({{1, 2}}), w);
  add("cancel w_2 then merge a1", to_w, product(zl({{1, 2}}), w2), product(inverse(w2), zl({{1, 1}})));
  add("cancel eps then merge a1", to_w, product(zl({{1, -1}}), e), product(inverse(e), zl({{1, 3}})));
  add("eps | eps", to_w, e1, e);
  add("tau_2(w) | tau_2(w)^-1", to_w, tau(2, w), inverse(tau(2, w)));
  add("w^2 | w^-1", to_w, power(w, 2), inverse(w));
  add("w_3 | w_3", to_w, w3, w3);
  add("eps | a1", to_w, e1, zl({{1, 1}}));
  add("cancel w a1 entirely", to_w, product(w, zl({{1, 1}})), product(zl({{1, -1}}), inverse(w)));
  add("cancel w_3 then merge a2", to_w, product(zl({{2, 1}}), w3), product(inverse(w3), zl({{2, -3}})));
  add("merge x1 | x1 over C3", to_z, zl({{1, 1}}, cs), zl({{1, 1}}, cs));
  add("nest | nest over C3", to_z, wc, wc);
  add("cancel nest then merge x1 over C3", to_z, product(zl({{1, 1}}, cs), wc2), product(inverse(wc2), zl({{1, 1}}, cs)));
  add("nest | nest^-1 over C3", to_z, wc, inverse(wc));
  add("merge g2 in the mixed family", mixed_map, zl({{1, 1}, {2, 1}}, mixed), zl({{2, 1}, {3, 2}}, mixed));
  add("cancel eps then merge g2 in the mixed family", mixed_map, product(zl({{2, 2}}, mixed), em),
      product(inverse(em), zl({{2, 2}}, mixed)));
  add("involution cancels in the mixed family", mixed_map, zl({{1, 1}}, mixed), zl({{1, 1}}, mixed));
  return cases;
}

WitnessReport claim_witness(Index max_level, Index max_depth) {
  WitnessReport r;
  r.name = "claim";
  r.parameters = {{"max_level", max_level}, {"max_depth", max_depth}};
  Index highest = 0;
  for (const auto& c : claim_suite()) {
    const Verdict v = claim_certify(c.map, c.u, c.v, max_level, max_depth);
    Certificate cert;
    cert.statement = c.name;
    cert.level = v.level;
    cert.depth = v.depth;
    cert.outcome = v.text();
    cert.ok = v.status == VerdictStatus::EqualCertified;
    if (v.level) highest = std::max(highest, *v.level);
    r.certificates.push_back(std::move(cert));
  }
  r.resources = {{"highest_level", highest}};
  const auto certified =
      std::count_if(r.certificates.begin(), r.certificates.end(), [](const Certificate& c) { return c.ok; });
  r.summary = std::to_string(certified) + " of " + std::to_string(r.certificates.size()) + " pairs certified";
  return r;
}

}  // namespace archipelago
