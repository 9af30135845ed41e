#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "archipelago/config.hpp"
#include "archipelago/morphisms.hpp"
#include "support.hpp"

using namespace archipelago;
using namespace archipelago::testing;

namespace {

const FactorDescriptor kZ = FactorDescriptor::integers();
const FactorDescriptor kC2 = FactorDescriptor::cyclic(2);
const FactorDescriptor kC3 = FactorDescriptor::cyclic(3);
const FactorDescriptor kFree = FactorDescriptor::free_group(FactorDescriptor::kCountable);
const FactorDescriptor kInv = FactorDescriptor::free_involutions(FactorDescriptor::kCountable);
const FactorDescriptor kTrivial = FactorDescriptor::table({{0}});

GroupElement el(const FactorDescriptor& d, std::int64_t v) { return GroupElement::from_integer(d, v); }

LetterMap map_from(const FamilySpec& spec, const char* text) {
  return LetterMap::from_json(spec, nlohmann::json::parse(text));
}

FamilySpec drop_first(const FamilySpec& spec, Index k) {
  const std::size_t pre = spec.prefix().size(), t = spec.tail().size();
  std::vector<FactorDescriptor> prefix, tail;
  const std::size_t end = std::max<std::size_t>(pre, k);
  for (Index i = k + 1; i <= end; ++i) prefix.push_back(spec.at(i));
  for (std::size_t s = 0; s < t; ++s) tail.push_back(spec.at(static_cast<Index>(end + 1 + s)));
  return FamilySpec(prefix, tail);
}

}  // namespace

TEST(Pairing, Examples) {
  auto p = build_pairing(kC3, TargetKind::ZFree);
  EXPECT_EQ(p->forward(el(kC3, 1)), GroupElement::from_generators(kFree, {1}));
  EXPECT_EQ(p->forward(el(kC3, 2)), GroupElement::from_generators(kFree, {-1}));
  EXPECT_EQ(p->forward(el(kC3, 0)), GroupElement::identity(kFree));

  auto q = build_pairing(kC2, TargetKind::Z2Free);
  EXPECT_EQ(q->forward(el(kC2, 1)), GroupElement::from_generators(kInv, {1}));

  EXPECT_THROW(build_pairing(kC2, TargetKind::ZFree), ClassificationError);
  EXPECT_THROW(p->forward(el(kC2, 1)), ContractError);
}

TEST(Pairing, FiniteTargetRunsOut) {
  PairingBijection p(FactorDescriptor::cyclic(5), kC3);
  EXPECT_NO_THROW(p.forward(el(FactorDescriptor::cyclic(5), 1)));
  EXPECT_THROW(p.forward(el(FactorDescriptor::cyclic(5), 2)), MappingError);
  PairingBijection q(kC3, kZ, 50);
  EXPECT_THROW(q.backward(el(kZ, 7)), MappingError);
}

TEST(Pairing, StaysBijectiveUnderInterleavedQueries) {
  const auto block = FactorDescriptor::free_product({kZ, kC2});
  PairingBijection p(block, kInv);
  const auto xs = enumerate(block, 500);
  const auto ys = enumerate(kInv, 500);
  for (std::size_t k = 0; k < 500; ++k) {
    const GroupElement fx = p.forward(xs[k]);
    EXPECT_EQ(p.backward(fx), xs[k]);
    const GroupElement by = p.backward(ys[k]);
    EXPECT_EQ(p.forward(by), ys[k]);
  }
  std::set<std::string> sources, targets;
  for (const auto& [x, y] : p.entries()) {
    EXPECT_TRUE(sources.insert(format_element(x)).second);
    EXPECT_TRUE(targets.insert(format_element(y)).second);
    EXPECT_EQ(x.is_identity(), y.is_identity());
    EXPECT_EQ(is_involution(x), is_involution(y)) << format_element(x) << " -> " << format_element(y);
    EXPECT_EQ(p.forward(group_inverse(x)), group_inverse(y));
  }
  EXPECT_GE(p.size(), 1000u);
}

TEST(ElementMaps, TablesAreClosedUnderInverses) {
  const auto m = ElementMap::table(kC3, kZ, {{el(kC3, 1), el(kZ, 5)}});
  EXPECT_EQ(m.apply(el(kC3, 2)), el(kZ, -5));
  EXPECT_EQ(m.apply(el(kC3, 0)), el(kZ, 0));
  EXPECT_THROW(ElementMap::table(kC3, kZ, {{el(kC3, 0), el(kZ, 1)}}), ContractError);
  EXPECT_THROW(ElementMap::table(kC3, kZ, {{el(kC3, 1), el(kZ, 1)}, {el(kC3, 2), el(kZ, 2)}}), ContractError);
  EXPECT_THROW(ElementMap::table(kZ, kZ, {{el(kZ, 1), el(kZ, 1)}}).apply(el(kZ, 2)), MappingError);
  EXPECT_TRUE(validate(m).ok());
}

TEST(LetterMaps, JsonEntries) {
  const FamilySpec spec({kC2, kZ}, {kC3});
  const auto m = map_from(spec, R"({"prefix": ["pairing:Z2", {"table": [[1, 2], [2, 4]]}], "tail": ["pairing:Z"]})");
  EXPECT_EQ(m.target().at(1), kInv);
  EXPECT_EQ(m.target().at(2), kZ);
  EXPECT_EQ(m.target().at(7), kZ);
  EXPECT_EQ(m.at(2).apply(el(kZ, -2)), el(kZ, -4));
  EXPECT_EQ(&m.at(3), &m.at(9));

  EXPECT_THROW(map_from(spec, R"("pairing:Q")"), ParseError);
  EXPECT_THROW(map_from(spec, R"({"prefix": [{"oops": 1}], "tail": ["identity"]})"), ParseError);
  EXPECT_THROW(map_from(spec, R"("pairing:Z")"), ClassificationError);

  const auto u = map_from(FamilySpec::uniform(kZ), R"("identity")");
  EXPECT_EQ(u.at(40).kind(), ElementMap::Kind::Identity);
  for (const auto& v : m.validate()) EXPECT_TRUE(v.ok()) << v.slot << ": " << v.failure.value_or("");
}

TEST(LetterMaps, ApplyExamples) {
  const auto spec = FamilySpec::uniform(kC3);
  const auto m = map_from(spec, R"("pairing:Z")");
  const FiniteWord u = reduce(std::vector<Letter>{{1, el(kC3, 1)}, {2, el(kC3, 2)}});
  EXPECT_EQ(apply_letter_map(m, u), reduce(std::vector<Letter>{{1, el(kZ, 1)}, {2, el(kZ, -1)}}));
  EXPECT_TRUE(apply_letter_map(m, FiniteWord{}).empty());
  const FiniteWord merged = reduce(std::vector<Letter>{{1, el(kC3, 1)}, {1, el(kC3, 1)}});
  EXPECT_EQ(apply_letter_map(m, merged), reduce(std::vector<Letter>{{1, el(kZ, -1)}}));
}

TEST(LetterMaps, InversionAndTwoSidedInverse) {
  const FamilySpec spec = mixed_family();
  const auto m = LetterMap::uniform_pairing(spec, TargetKind::Z2Free);
  const auto back = m.inverse();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const FiniteWord u = random_word(spec, 6, 10, rng);
    const FiniteWord image = apply_letter_map(m, u);
    EXPECT_EQ(apply_letter_map(m, invert(u)), invert(image));
    EXPECT_EQ(apply_letter_map(back, image), u);
  }
}

TEST(LetterMaps, LiftExamples) {
  const FamilySpec all_z = FamilySpec::uniform(kZ);
  const auto id = LetterMap::uniform_identity(all_z);
  const auto w = ProjectiveWord::nest(all_z, NestRule{1, 0, el(kZ, 1), 1, 1});
  const auto fam = lift_phi(id, w);
  for (Index n = 1; n <= 6; ++n) EXPECT_EQ(fam.at(n), w.projection(n));

  const auto m = map_from(all_z, R"("pairing:Z2")");
  const FiniteWord u = reduce(std::vector<Letter>{{1, el(kZ, 2)}, {3, el(kZ, -1)}});
  const auto leaf = ProjectiveWord::finite(all_z, u);
  for (Index n = 3; n <= 6; ++n) EXPECT_EQ(lift_phi(m, leaf).at(n), apply_letter_map(m, u));

  const auto a1 = ProjectiveWord::finite(all_z, reduce(std::vector<Letter>{{1, el(kZ, 1)}}));
  const auto cancel = lift_phi(m, product(a1, inverse(a1)));
  for (Index n = 1; n <= 4; ++n) EXPECT_TRUE(cancel.at(n).empty());
}

// Letter replacement does not commute with merging, so the lifted family is
// only compatible up to finitely many letters.
TEST(LetterMaps, LiftIsNotProjectionCompatible) {
  const auto spec = FamilySpec::uniform(kC3);
  const auto m = map_from(spec, R"("pairing:Z")");
  const auto w = ProjectiveWord::finite(
      spec, reduce(std::vector<Letter>{{1, el(kC3, 1)}, {2, el(kC3, 1)}, {1, el(kC3, 1)}}));
  const auto fam = lift_phi(m, w);
  EXPECT_EQ(fam.at(1), reduce(std::vector<Letter>{{1, el(kZ, -1)}}));
  EXPECT_EQ(project_upto(fam.at(2), 1), reduce(std::vector<Letter>{{1, el(kZ, 2)}}));
  EXPECT_EQ(compatibility_defect(fam, 4), Index{1});

  const FamilySpec all_z = FamilySpec::uniform(kZ);
  const auto nest = ProjectiveWord::nest(all_z, NestRule{1, 0, el(kZ, 1), 1, 1});
  EXPECT_FALSE(compatibility_defect(lift_phi(LetterMap::uniform_identity(all_z), nest), 7));
}

TEST(Claim, FiniteWordsCertifyAtTheirLargestIndex) {
  const auto spec = FamilySpec::uniform(kC3);
  const auto m = map_from(spec, R"("pairing:Z")");
  const auto u = ProjectiveWord::finite(spec, reduce(std::vector<Letter>{{2, el(kC3, 2)}, {1, el(kC3, 1)}}));
  const auto v = ProjectiveWord::finite(spec, reduce(std::vector<Letter>{{1, el(kC3, 1)}, {3, el(kC3, 1)}}));
  const Verdict r = claim_certify(m, u, v, 6, 8);
  ASSERT_EQ(r.status, VerdictStatus::EqualCertified) << r.text();
  EXPECT_EQ(r.level, Index{1});
  EXPECT_EQ(r.proof, ProofKind::DepthChecked);
  EXPECT_EQ(r.levels.front().status, VerdictStatus::DistinctWitness);
  EXPECT_EQ(r.text(), "EqualCertified(j=1, depth-checked N=8)");
}

TEST(Claim, InversePairCertifiesImmediately) {
  const FamilySpec all_z = FamilySpec::uniform(kZ);
  const auto m = map_from(all_z, R"("pairing:Z2")");
  const auto w2 = ProjectiveWord::nest(all_z, NestRule{2, 0, el(kZ, 1), 1, 1});
  const Verdict r = claim_certify(m, w2, inverse(w2), 6, 8);
  ASSERT_EQ(r.status, VerdictStatus::EqualCertified);
  EXPECT_EQ(r.level, Index{0});
}

TEST(Claim, ReportsUnknownWhenTheLevelBoundIsTooLow) {
  const auto spec = FamilySpec::uniform(kC3);
  const auto m = map_from(spec, R"("pairing:Z")");
  const auto u = ProjectiveWord::finite(spec, reduce(std::vector<Letter>{{4, el(kC3, 1)}}));
  const Verdict r = claim_certify(m, u, u, 2, 6);
  EXPECT_EQ(r.status, VerdictStatus::UnknownUpTo);
  EXPECT_TRUE(r.distinct_at_every_level);
  EXPECT_EQ(r.levels.size(), 3u);
}

TEST(Classify, Examples) {
  auto proto = [](const FamilySpec& s) { return classify(ClassificationProfile::from_family(s)); };
  EXPECT_EQ(proto(FamilySpec::uniform(FactorDescriptor::rationals())), Prototype::AZ);
  EXPECT_EQ(proto(FamilySpec::uniform(kZ)), Prototype::AZ);
  EXPECT_EQ(proto(FamilySpec::uniform(kC3)), Prototype::AZ);
  EXPECT_EQ(proto(FamilySpec::uniform(kC2)), Prototype::AZ2);
  EXPECT_EQ(proto(FamilySpec({kC2, kC2, kC2, kC2, kC2}, {kZ})), Prototype::AZ);
  EXPECT_EQ(proto(FamilySpec({}, {kZ, kC2})), Prototype::AZ2);
  EXPECT_EQ(proto(FamilySpec({kZ, kC2}, {kTrivial})), Prototype::Trivial);
  EXPECT_EQ(proto(FamilySpec({kZ, kC2})), Prototype::Trivial);

  ClassificationProfile big = ClassificationProfile::from_family(FamilySpec::uniform(kZ));
  big.prefix.push_back({Cardinality::uncountable(), false});
  EXPECT_EQ(classify(big), Prototype::Unsupported);

  const auto p = ClassificationProfile::from_family(FamilySpec({kC2, kC2, kC2, kC2, kC2}, {kZ}));
  EXPECT_EQ(p.lambda(), Cardinality::finite(5));
  EXPECT_EQ(p.prefix[0].kappa, Cardinality::finite(1));
  EXPECT_EQ(p.tail[0].kappa, Cardinality::countable());
}

TEST(Classify, ProfilesMatchEnumeration) {
  const std::vector<FamilySpec> specs{
      mixed_family(),
      FamilySpec({s3(), kC3}, {kZ, kInv, FactorDescriptor::free_group(2)}),
      FamilySpec({FactorDescriptor::free_product({kC3, kC2})}, {FactorDescriptor::cyclic(4)}),
  };
  for (const auto& s : specs) EXPECT_TRUE(profile_consistent(ClassificationProfile::from_family(s), s));
  auto wrong = ClassificationProfile::from_family(specs[0]);
  wrong.prefix[3].involution = true;
  EXPECT_FALSE(profile_consistent(wrong, specs[0]));
}

TEST(Classify, InvariantUnderReorderingAndDropping) {
  const std::vector<FamilySpec> specs{
      FamilySpec({kC2, kC2, kC2}, {kZ, kC3}),
      FamilySpec({kZ, s3()}, {kC3, kZ, kC2}),
      FamilySpec({kC2}, {FactorDescriptor::rationals()}),
      FamilySpec({}, {kC2, kTrivial}),
      FamilySpec({kZ, kC2}, {kTrivial}),
  };
  std::mt19937_64 rng(5);
  for (const auto& s : specs) {
    const Prototype want = classify(ClassificationProfile::from_family(s));
    for (Index k = 0; k <= 7; ++k) {
      const FamilySpec d = drop_first(s, k);
      for (Index i = 1; i <= 30; ++i) ASSERT_EQ(d.at(i), s.at(i + k));
      EXPECT_EQ(classify(ClassificationProfile::from_family(d)), want);
    }
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Index> head(6);
      std::iota(head.begin(), head.end(), 1);
      std::shuffle(head.begin(), head.end(), rng);
      std::vector<Index> block(std::max<std::size_t>(1, s.tail().size()) * 2);
      std::iota(block.begin(), block.end(), 1);
      std::shuffle(block.begin(), block.end(), rng);
      const FamilySpec p = permuted_family(IndexPermutation(head, block), s);
      EXPECT_EQ(classify(ClassificationProfile::from_family(p)), want);
    }
  }
}

TEST(Classify, WitnessPairingsValidate) {
  const std::vector<std::pair<FamilySpec, Prototype>> cases{
      {FamilySpec::uniform(kZ), Prototype::AZ},
      {FamilySpec::uniform(FactorDescriptor::rationals()), Prototype::AZ},
      {FamilySpec::uniform(kC3), Prototype::AZ},
      {FamilySpec({kC2, kC2, kC2, kC2, kC2}, {kZ}), Prototype::AZ},
      {FamilySpec::uniform(kC2), Prototype::AZ2},
      {FamilySpec({}, {kZ, kC2}), Prototype::AZ2},
      {FamilySpec({kC3, kC2, kZ}, {kTrivial, kC3}), Prototype::AZ},
  };
  for (const auto& [spec, want] : cases) {
    const auto r = classification_report(spec);
    ASSERT_EQ(r.prototype, want);
    ASSERT_TRUE(r.partition);
    ASSERT_FALSE(r.witness_maps.empty());
    for (const auto& w : r.witness_maps) {
      EXPECT_TRUE(w.validation.ok()) << w.validation.slot << ": " << w.validation.failure.value_or("");
      EXPECT_EQ(w.validation.checked, kDefaultValidationLimit);
      std::size_t nontrivial = 0;
      bool involution = false;
      for (Index i : w.indices) {
        nontrivial += !spec.at(i).is_trivial();
        involution = involution || spec.at(i).has_involution();
      }
      EXPECT_GE(nontrivial, 2u);
      EXPECT_EQ(involution, want == Prototype::AZ2);
    }
    for (Index i : r.partition->excluded()) EXPECT_TRUE(spec.at(i).has_involution());
    for (Index i = 1; i <= 40; ++i) {
      const auto slot = r.partition->slot_of(i);
      EXPECT_EQ(!slot, std::count(r.partition->excluded().begin(), r.partition->excluded().end(), i) == 1);
    }
  }
}

TEST(Classify, ReportJson) {
  const auto r = classification_report(FamilySpec({kC2, kC2, kC2, kC2, kC2}, {kZ}));
  const auto j = r.to_json();
  EXPECT_EQ(j["prototype"], "A_Z");
  EXPECT_EQ(j["lambda"], 5);
  EXPECT_EQ(j["kappa"]["tail"][0], "countable");
  EXPECT_EQ(j["partition"]["excluded"].size(), 5u);
  EXPECT_EQ(j["witness_maps"][0]["sample"][0][1], "e");
  const auto t = classification_report(FamilySpec({kZ}, {kTrivial})).to_json();
  EXPECT_EQ(t["prototype"], "Trivial");
  EXPECT_TRUE(t["witness_maps"].empty());
}
