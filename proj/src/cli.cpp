#include "archipelago/cli.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "archipelago/config.hpp"
#include "archipelago/constructions.hpp"
#include "archipelago/dsl.hpp"
#include "archipelago/errors.hpp"

namespace archipelago {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string family_path, family_inline, format = "text";

  std::string expr, expr2, map_path;
  Index depth = 8, level = 6, n = 0, j = 0;
  std::size_t limit = kDefaultValidationLimit;
  bool no_witness = false;

  std::size_t syllables = 3;
  Index max_index = 0;

  Index nmax = 4, check_depth = 8;
  std::size_t length = 6;
  Index eps_levels = 4, eps_depth = 40;
  std::string tail = "last";
  bool serial = false;
  std::string g = "g1:1", h = "g2:1", a = "g2:1";
  std::size_t count = 50;
  Index claim_levels = 6, claim_depth = 8;
};

ordered_json word_json(const FiniteWord& w) {
  ordered_json arr = ordered_json::array();
  for (const auto& l : w.letters()) arr.push_back(ordered_json::array({l.index, format_element(l.element)}));
  return arr;
}

Index max_letter_index(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Letter:
      return e.letter->index;
    case Expr::Kind::Project:
      return e.param;
    default: {
      Index m = 0;
      for (const auto& c : e.children) m = std::max(m, max_letter_index(*c));
      return m;
    }
  }
}

struct Parsed {
  ExprPtr expr;
  ProjectiveWord word;
};

Parsed parse_word(const std::string& text, const FamilySpec& spec) {
  auto e = parse_expression(text, spec);
  return {e, evaluate(*e, spec)};
}

// Exact reduced word of a finite expression.
FiniteWord finite_word(const Parsed& p) {
  if (!is_finite_expression(*p.expr)) throw ContractError("expression is not a finite word");
  return p.word.projection(std::max(max_letter_index(*p.expr), p.word.base_index()));
}

Letter parse_letter(const std::string& text, const FamilySpec& spec) {
  auto e = parse_expression(text, spec);
  if (e->kind != Expr::Kind::Letter) throw ParseError("expected a single letter, got '" + text + "'");
  return *e->letter;
}

class Runner {
 public:
  Runner(const Options& o, bool family_given, std::ostream& out) : o_(o), out_(out) {
    if (!o.family_path.empty()) spec_ = load_family(o.family_path);
    else if (!o.family_inline.empty()) spec_ = parse_family(o.family_inline);
    else spec_ = FamilySpec::uniform(FactorDescriptor::integers());
    family_given_ = family_given;
  }

  bool json() const { return o_.format == "json"; }

  void emit(const ordered_json& j, const std::string& text) {
    if (json()) out_ << j.dump(2) << "\n";
    else out_ << text;
  }

  void reduce() {
    const auto p = parse_word(o_.expr, spec_);
    ordered_json j{{"input", o_.expr}};
    std::string text;
    if (is_finite_expression(*p.expr)) {
      const auto w = finite_word(p);
      j["result"] = format_word(w);
      j["finite"] = true;
      j["syllables"] = w.size();
      j["word"] = word_json(w);
      text = format_word(w) + "\n";
    } else {
      j["result"] = p.word.normal_form();
      j["finite"] = false;
      j["base_index"] = p.word.base_index();
      text = p.word.normal_form() + "\n";
    }
    emit(j, text);
  }

  void project() {
    const auto p = parse_word(o_.expr, spec_);
    const auto w = p.word.projection(o_.n);
    emit({{"input", o_.expr}, {"depth", o_.n}, {"result", format_word(w)}, {"syllables", w.size()},
          {"word", word_json(w)}},
         format_word(w) + "\n");
  }

  void tau() {
    const auto p = parse_word(o_.expr, spec_);
    const auto t = archipelago::tau(o_.j, p.word);
    emit({{"input", o_.expr}, {"level", o_.j}, {"base_index", t.base_index()}, {"result", t.normal_form()}},
         t.normal_form() + "\n");
  }

  void eq(bool archipelago) {
    const auto u = parse_word(o_.expr, spec_), v = parse_word(o_.expr2, spec_);
    const auto verdict = archipelago ? eq_in_archipelago(u.word, v.word, o_.level, o_.depth)
                                     : eq_in_product(u.word, v.word, o_.depth);
    emit(verdict.to_json(), verdict.text() + "\n");
  }

  void phi() {
    const auto map = LetterMap::load(spec_, o_.map_path);
    const auto p = parse_word(o_.expr, spec_);
    const auto family = lift_phi(map, p.word);
    const Index top = o_.n ? o_.n : 8;
    ordered_json depths = ordered_json::array();
    std::string text;
    for (Index n = family.base_index; n <= top; ++n) {
      const auto w = family.at(n);
      depths.push_back({{"n", n}, {"result", format_word(w)}});
      text += "n=" + std::to_string(n) + ": " + format_word(w) + "\n";
    }
    const auto defect = compatibility_defect(family, top);
    ordered_json j{{"input", o_.expr}, {"depths", depths}};
    j["compatibility_defect"] = defect ? ordered_json(*defect) : ordered_json(nullptr);
    if (defect) text += "not projection-compatible at n=" + std::to_string(*defect) + "\n";
    emit(j, text);
  }

  void classify() {
    const auto r = classification_report(spec_, !o_.no_witness, o_.limit);
    std::ostringstream text;
    text << "prototype: " << to_string(r.prototype) << "\n";
    const auto j = r.to_json();
    text << "lambda: " << j["lambda"].dump() << "\n";
    if (!o_.no_witness && !r.witness_maps.empty()) {
      text << "witness blocks: " << r.witness_maps.size() << (r.witnesses_ok() ? ", all validated" : ", FAILED")
           << "\n";
      for (const auto& b : r.witness_maps)
        text << "  block " << b.block << ": " << b.validation.checked << " elements checked"
             << (b.validation.failure ? " (" + *b.validation.failure + ")" : "") << "\n";
    }
    emit(j, text.str());
  }

  void torsion() {
    const auto p = parse_word(o_.expr, spec_);
    const auto w = finite_word(p);
    const auto t = torsion_witness(w);
    ordered_json j{{"input", o_.expr}, {"word", format_word(w)}, {"torsion", t.has_value()}};
    std::string text;
    if (t) {
      j["order"] = t->order;
      j["core"] = format_word(FiniteWord::from_reduced({t->core}));
      j["conjugator"] = format_word(t->conjugator);
      text = "order " + std::to_string(t->order) + ": " + format_word(t->conjugator) + " . " +
             j["core"].get<std::string>() + " . inverse\n";
    } else {
      text = "torsion-free\n";
    }
    emit(j, text);
  }

  void census() {
    const auto c = involution_census(spec_, o_.syllables,
                                     o_.max_index ? std::optional<Index>(o_.max_index) : std::nullopt);
    ordered_json words = ordered_json::array();
    std::string text = std::to_string(c.involutions) + " involutions among " + std::to_string(c.words) +
                       " words (" + std::to_string(c.max_syllables) + " syllables, indices 1.." +
                       std::to_string(c.max_index) + ")\n";
    for (const auto& w : c.involution_words) {
      words.push_back(format_word(w));
      text += "  " + format_word(w) + "\n";
    }
    emit({{"max_syllables", c.max_syllables},
          {"max_index", c.max_index},
          {"words", c.words},
          {"involutions", c.involutions},
          {"non_involutions", c.non_involutions},
          {"involution_words", words}},
         text);
  }

  void report(const WitnessReport& r) { emit(r.to_json(), r.text()); }

  void divisible() { report(divisible_witness(o_.nmax, o_.check_depth)); }

  void epsilon() {
    const auto& d = spec_.at(1);
    std::vector<std::vector<GroupElement>> seqs;
    for (const auto& s : binary_sequences(o_.length)) {
      std::vector<GroupElement> coords;
      for (auto x : s) coords.push_back(GroupElement::from_integer(d, x));
      seqs.push_back(std::move(coords));
    }
    if (o_.tail != "last" && o_.tail != "identity") throw ParseError("--tail expects last or identity");
    const auto tail = o_.tail == "last" ? EpsTail::RepeatLast : EpsTail::Identity;
    report(epsilon_distinctness(d, seqs, o_.eps_levels, o_.eps_depth, tail,
                                o_.serial ? Execution::Serial : Execution::Parallel));
  }

  void families() {
    const FamilySpec spec =
        family_given_ ? spec_ : FamilySpec({FactorDescriptor::cyclic(3), FactorDescriptor::cyclic(2)});
    report(conjugate_families_witness(spec, parse_letter(o_.g, spec), parse_letter(o_.h, spec),
                                      parse_letter(o_.a, spec), o_.count, o_.syllables));
  }

  void claim() { report(claim_witness(o_.claim_levels, o_.claim_depth)); }

 private:
  const Options& o_;
  std::ostream& out_;
  FamilySpec spec_;
  bool family_given_ = false;
};

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Calculus for free products, the topologist's product and archipelago groups", "archipelago"};
  app.fallthrough();
  app.require_subcommand(1);
  auto* fam = app.add_option("--family", o.family_path, "FamilySpec JSON file");
  auto* fam_inline = app.add_option("--family-inline", o.family_inline, "FamilySpec as inline JSON");
  fam->excludes(fam_inline);
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* reduce = app.add_subcommand("reduce", "Normal form of a word");
  reduce->add_option("expr", o.expr)->required();

  auto* project = app.add_subcommand("project", "Projection p_n");
  project->add_option("-n", o.n, "Depth")->required();
  project->add_option("expr", o.expr)->required();

  auto* tau = app.add_subcommand("tau", "Image in the tail product over indices > j");
  tau->add_option("-j", o.j, "Level")->required();
  tau->add_option("expr", o.expr)->required();

  auto* eq = app.add_subcommand("eq", "Equality in the topologist's product");
  eq->add_option("e1", o.expr)->required();
  eq->add_option("e2", o.expr2)->required();
  eq->add_option("-N", o.depth, "Maximum depth");

  auto* eqa = app.add_subcommand("eqa", "Equality in the archipelago quotient");
  eqa->add_option("e1", o.expr)->required();
  eqa->add_option("e2", o.expr2)->required();
  eqa->add_option("-J", o.level, "Maximum level");
  eqa->add_option("-N", o.depth, "Maximum depth");

  auto* phi = app.add_subcommand("phi", "Depthwise image under a letter map");
  phi->add_option("--map", o.map_path, "LetterMap JSON file")->required();
  phi->add_option("expr", o.expr)->required();
  phi->add_option("-n", o.n, "Maximum depth (default 8)");

  auto* classify = app.add_subcommand("classify", "Classify the archipelago group of the family");
  classify->add_option("--limit", o.limit, "Elements validated per witness block");
  classify->add_flag("--no-witness", o.no_witness, "Skip the witness pairings");

  auto* torsion = app.add_subcommand("torsion", "Torsion witness of a finite word");
  torsion->add_option("expr", o.expr)->required();

  auto* census = app.add_subcommand("census", "Exhaustive involution census");
  census->add_option("-L", o.syllables, "Maximum syllables")->required();
  census->add_option("--max-index", o.max_index, "Largest factor index (default: the whole finite family)");

  auto* witness = app.add_subcommand("witness", "Packaged constructions");
  witness->require_subcommand(1);
  auto* divisible = witness->add_subcommand("divisible", "w ~ w_n^{n!} chain");
  divisible->add_option("--nmax", o.nmax);
  divisible->add_option("--depth", o.check_depth, "Cross-check depth");
  auto* epsilon = witness->add_subcommand("epsilon", "Separation of epsilon words");
  epsilon->add_option("--length", o.length, "Length of the binary sequences");
  epsilon->add_option("-J", o.eps_levels, "Maximum level");
  epsilon->add_option("-N", o.eps_depth, "Maximum depth");
  epsilon->add_option("--tail", o.tail, "last or identity");
  epsilon->add_flag("--serial", o.serial, "Use the serial reference loop");
  auto* families = witness->add_subcommand("lemma20", "(gh)^n and a^{(gh)^n} families");
  families->alias("families");
  families->add_option("--letter-g", o.g, "The letter g");
  families->add_option("--letter-h", o.h, "The letter h");
  families->add_option("--letter-a", o.a, "The involution letter a");
  families->add_option("--count", o.count);
  families->add_option("-L", o.syllables, "Census syllables");
  auto* claim = witness->add_subcommand("claim", "Homomorphism claim on the curated suite");
  claim->add_option("-J", o.claim_levels);
  claim->add_option("-N", o.claim_depth);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  Runner r(o, fam->count() + fam_inline->count() > 0, out);
  const std::vector<std::pair<CLI::App*, std::function<void()>>> commands{
      {reduce, [&] { r.reduce(); }},     {project, [&] { r.project(); }},     {tau, [&] { r.tau(); }},
      {eq, [&] { r.eq(false); }},        {eqa, [&] { r.eq(true); }},          {phi, [&] { r.phi(); }},
      {classify, [&] { r.classify(); }}, {torsion, [&] { r.torsion(); }},     {census, [&] { r.census(); }},
      {divisible, [&] { r.divisible(); }}, {epsilon, [&] { r.epsilon(); }}, {families, [&] { r.families(); }},
      {claim, [&] { r.claim(); }},
  };
  for (const auto& [sub, run] : commands)
    if (sub->parsed()) {
      run();
      return kExitOk;
    }
  err << "error: no command\n";
  return kExitParse;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kExitResource;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace archipelago
