#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "archipelago/cli.hpp"
#include "archipelago/dsl.hpp"
#include "archipelago/errors.hpp"
#include "expr_gen.hpp"
#include "json.hpp"

using namespace archipelago;
using namespace archipelago::testing;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const FamilySpec kZZ({FactorDescriptor::integers(), FactorDescriptor::integers()});

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Parse, Examples) {
  const auto a = parse_expression("g1:1·g2:3", kZZ);
  ASSERT_EQ(a->kind, Expr::Kind::Product);
  ASSERT_EQ(a->children.size(), 2u);
  EXPECT_EQ(a->children[1]->letter->index, Index{2});
  EXPECT_EQ(format_element(a->children[1]->letter->element), "3");

  const auto b = parse_expression("(g1:1 g2:1)^2", kZZ);
  ASSERT_EQ(b->kind, Expr::Kind::Power);
  EXPECT_EQ(b->exponent, 2);
  EXPECT_EQ(b->children[0]->kind, Expr::Kind::Product);

  const auto z = FamilySpec::uniform(FactorDescriptor::integers());
  const auto c = parse_expression("tau[1](nest(exp=k+1))", z);
  ASSERT_EQ(c->kind, Expr::Kind::Tau);
  EXPECT_EQ(c->param, Index{1});
  ASSERT_EQ(c->children[0]->kind, Expr::Kind::Nest);
  EXPECT_EQ(*c->children[0]->nest, (NestRule{1, 0, GroupElement::from_integer(z.at(1), 1), 1, 1}));
  EXPECT_EQ(*parse_expression("nest(k=1.., base=g{k}:1, exp=k+1)", z), *c->children[0]);
}

TEST(Parse, PowerBindsTighterThanJuxtaposition) {
  const auto e = parse_expression("g1:1 g2:1^3", kZZ);
  ASSERT_EQ(e->kind, Expr::Kind::Product);
  EXPECT_EQ(e->children[0]->kind, Expr::Kind::Letter);
  EXPECT_EQ(e->children[1]->kind, Expr::Kind::Power);
}

TEST(Parse, EpsForms) {
  const auto z = FamilySpec::uniform(FactorDescriptor::integers());
  EXPECT_EQ(*parse_expression("eps(1,1,2,...)", z), *parse_expression("eps(1,1,2)", z));
  EXPECT_EQ(*parse_expression("eps(1,1,2)", z), *parse_expression("eps(1,1|2)", z));
  EXPECT_EQ(format_expression(*parse_expression("eps[3](0, 1)", z)), "eps[3](0|1)");
}

TEST(Parse, ErrorsCarryPositions) {
  auto position = [](const std::string& text, const FamilySpec& spec) -> std::size_t {
    try {
      parse_expression(text, spec);
    } catch (const ParseError& e) {
      return e.position();
    }
    return std::string::npos;
  };
  EXPECT_EQ(position("g1:1 )", kZZ), 5u);
  EXPECT_EQ(position("g3:1", kZZ), 1u);
  EXPECT_EQ(position("g1:1 g2:x", kZZ), 8u);
  EXPECT_EQ(position("(g1:1", kZZ), 5u);
  EXPECT_EQ(position("tau[-1](g1:1)", kZZ), 4u);
  EXPECT_EQ(position("foo(g1:1)", kZZ), 0u);
  EXPECT_EQ(position("", kZZ), 0u);
  EXPECT_EQ(position("12", kZZ), 0u);
}

TEST(Parse, RoundTripCorpus) {
  const auto spec = expression_family();
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const auto e = random_expression(spec, 4, rng);
    const auto text = format_expression(*e);
    const auto back = parse_expression(text, spec);
    ASSERT_EQ(*back, *e) << text;
    ASSERT_EQ(format_expression(*back), text);
  }
}

TEST(Evaluate, AgreesWithWordOperations) {
  const auto spec = FamilySpec({FactorDescriptor::cyclic(3), FactorDescriptor::cyclic(2)});
  const auto w = evaluate(*parse_expression("(g1:1 g2:1)^2 inv(g2:1)", spec), spec);
  EXPECT_EQ(format_word(w.projection(2)), "g1:1·g2:1·g1:1");
  const auto z = FamilySpec::uniform(FactorDescriptor::integers());
  const auto t = evaluate(*parse_expression("tau[2](nest())", z), z);
  EXPECT_EQ(t.base_index(), Index{3});
  // p_3 of the nested word: g1 (g2 g3^3)^2
  EXPECT_EQ(format_word(evaluate(*parse_expression("p[3](nest())", z), z).projection(3)),
            "g1:1·g2:1·g3:3·g2:1·g3:3");
  const auto mixed = evaluate(*parse_expression("g1:1 tau[2](nest())", z), z);
  EXPECT_EQ(mixed.base_index(), Index{1});
}

TEST(Cli, GoldenExamples) {
  const std::filesystem::path dir = GOLDEN_DIR;
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
      {{"--format", "json", "reduce", "g1:2 g1:-2 g2:5"}, "reduce.json"},
      {{"--format", "json", "eqa", "g1:1", "1", "-J", "3", "-N", "5"}, "eqa.json"},
      {{"--format", "json", "witness", "divisible", "--nmax", "3"}, "witness_divisible.json"},
  };
  for (const auto& [args, file] : cases) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp(dir / file)) << file;
    EXPECT_EQ(run(args).out, r.out);
  }
  using nlohmann::json;
  EXPECT_EQ(json::parse(run(cases[0].first).out)["result"], "g2:5");
  EXPECT_EQ(json::parse(run(cases[1].first).out)["text"], "EqualCertified(j=1)");
  const auto certs = json::parse(run(cases[2].first).out)["certificates"];
  std::vector<std::string> statements;
  for (const auto& c : certs) statements.push_back(c["statement"]);
  EXPECT_NE(std::find(statements.begin(), statements.end(), "w ~ w_2^2"), statements.end());
  EXPECT_NE(std::find(statements.begin(), statements.end(), "w ~ w_3^6"), statements.end());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"reduce", "g1:1 g1:-1"}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"reduce", "g1:"}).code, 2);
  EXPECT_EQ(run({"--family-inline", "{\"prefix\": [{\"cyclic\": 1}]}", "reduce", "1"}).code, 2);
  EXPECT_EQ(run({"--family-inline", "{not json", "reduce", "1"}).code, 2);
  EXPECT_EQ(run({"--family", "/nonexistent/family.json", "reduce", "1"}).code, 2);
  EXPECT_EQ(run({"--format", "yaml", "reduce", "1"}).code, 2);
  EXPECT_EQ(run({"tau", "-j", "0", "tau[3](g1:1)"}).code, 3);
  EXPECT_EQ(run({"torsion", "nest()"}).code, 3);
  EXPECT_EQ(run({"--family-inline", "{\"tail\": [\"Z\"]}", "census", "-L", "2", "--max-index", "1"}).code, 3);
  EXPECT_EQ(run({"project", "-n", "30", "nest()"}).code, 4);
  // Verdicts are data.
  EXPECT_EQ(run({"eq", "g1:1", "g1:2"}).code, 0);
}

TEST(Cli, Commands) {
  const std::string c3c2 = R"({"prefix": [{"cyclic": 3}, {"cyclic": 2}]})";
  auto t = run({"--family-inline", c3c2, "--format", "json", "torsion", "g1:2 g2:1 g1:1"});
  ASSERT_EQ(t.code, 0) << t.err;
  auto j = nlohmann::json::parse(t.out);
  EXPECT_EQ(j["order"], 2);
  EXPECT_EQ(j["core"], "g2:1");
  EXPECT_EQ(j["conjugator"], "g1:2");

  const std::string c2c3 = R"({"prefix": [{"cyclic": 2}, {"cyclic": 3}]})";
  j = nlohmann::json::parse(run({"--family-inline", c2c3, "--format", "json", "census", "-L", "3"}).out);
  EXPECT_EQ(j["involutions"], 3);

  j = nlohmann::json::parse(run({"--format", "json", "classify", "--family-inline", R"({"tail": [{"cyclic": 2}]})"}).out);
  EXPECT_EQ(j["prototype"], "A_Z2");

  // Coordinates at indices 1, 2, 3 are c1, c1, c2.
  j = nlohmann::json::parse(run({"--format", "json", "project", "-n", "3", "eps(0,1)"}).out);
  EXPECT_EQ(j["result"], "g3:1");

  j = nlohmann::json::parse(run({"--format", "json", "reduce", "tau[1](nest())"}).out);
  EXPECT_EQ(j["finite"], false);
  EXPECT_EQ(j["base_index"], 2);
}

TEST(Cli, PhiReportsCompatibilityDefect) {
  const auto map = temp_file("archipelago_cli_map.json", R"("pairing:Z")");
  const std::string c3 = R"({"tail": [{"cyclic": 3}]})";
  const auto r = run({"--family-inline", c3, "--format", "json", "phi", "--map", map.string(), "g1:1 g2:1 g1:1",
                      "-n", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["depths"].size(), 3u);
  EXPECT_EQ(j["compatibility_defect"], 1);
  std::filesystem::remove(map);
}

TEST(Cli, WitnessCommandsRun) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"witness", "epsilon", "--length", "3", "-J", "2", "-N", "20"},
        std::vector<std::string>{"witness", "lemma20", "--count", "10"},
        std::vector<std::string>{"witness", "claim", "-J", "3", "-N", "6"}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  }
}
