#include <random>

#include <gtest/gtest.h>

#include "archipelago/projective.hpp"
#include "support.hpp"

using namespace archipelago;
using namespace archipelago::testing;

namespace {

const FactorDescriptor kZ = FactorDescriptor::integers();
const FamilySpec kAllZ = FamilySpec::uniform(kZ);

GroupElement z(std::int64_t v) { return GroupElement::from_integer(kZ, v); }

Letter a(Index i, std::int64_t v = 1) { return {i, z(v)}; }

FiniteWord word(std::vector<Letter> raw) { return reduce(raw); }

NestRule divisible_rule(Index start = 1) {
  return NestRule{start, 0, z(1), 1, 1};
}

ProjectiveWord divisible(Index start = 1) { return ProjectiveWord::nest(kAllZ, divisible_rule(start)); }

// Raw expansion of a_s (a_{s+1}(...)^{e_{s+1}})^{e_s} truncated at level n,
// reduced by the rewrite oracle.
void expand_raw(Index level, Index n, std::vector<Letter>& out) {
  if (level > n) return;
  out.push_back(a(level));
  std::vector<Letter> inner;
  expand_raw(level + 1, n, inner);
  for (Index k = 0; k < level + 1; ++k) out.insert(out.end(), inner.begin(), inner.end());
}

FiniteWord nest_oracle(Index start, Index n) {
  std::vector<Letter> raw;
  expand_raw(start, n, raw);
  return FiniteWord::from_reduced(raw.size() < 2000 ? naive_reduce(raw) : stack_reduce(raw));
}

// Triangular pattern written out block by block.
FiniteWord eps_oracle(const std::vector<std::int64_t>& coords, Index n) {
  std::vector<Letter> raw;
  Index p = 0;
  for (Index t = 1; p < n; ++t)
    for (Index c = 1; c <= t && p < n; ++c) {
      ++p;
      const auto g = c <= coords.size() ? coords[c - 1] : coords.back();
      raw.push_back(a(p, g));
    }
  return FiniteWord::from_reduced(naive_reduce(raw));
}

ProjectiveWord eps(const std::vector<std::int64_t>& coords) {
  std::vector<GroupElement> xs;
  for (auto c : coords) xs.push_back(z(c));
  return ProjectiveWord::epsilon(kAllZ, EpsRule{1, CoordinateRule::repeat_last(xs)});
}

ProjectiveWord leaf(std::vector<Letter> raw) { return ProjectiveWord::finite(kAllZ, word(std::move(raw))); }

// Random schema word built from leaves, nests, eps words and the group operations.
ProjectiveWord random_schema(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 2);
  switch (pick(rng)) {
    case 0: {
      std::vector<Letter> raw;
      const int len = std::uniform_int_distribution<int>(0, 5)(rng);
      for (int i = 0; i < len; ++i)
        raw.push_back(a(std::uniform_int_distribution<Index>(1, 6)(rng), std::uniform_int_distribution<int>(-2, 2)(rng)));
      return leaf(raw);
    }
    case 1: {
      const Index start = std::uniform_int_distribution<Index>(2, 5)(rng);
      return ProjectiveWord::nest(kAllZ, NestRule{start, 0, z(std::uniform_int_distribution<int>(1, 2)(rng)), 0, 2});
    }
    case 2: {
      std::vector<std::int64_t> c;
      const int len = std::uniform_int_distribution<int>(1, 4)(rng);
      for (int i = 0; i < len; ++i) c.push_back(std::uniform_int_distribution<int>(-1, 2)(rng));
      return eps(c);
    }
    case 3:
      return product(random_schema(rng, depth - 1), random_schema(rng, depth - 1));
    case 4:
      return inverse(random_schema(rng, depth - 1));
    case 5:
      return power(random_schema(rng, depth - 1), std::uniform_int_distribution<int>(-2, 2)(rng));
    default:
      return product({random_schema(rng, depth - 1), random_schema(rng, depth - 1), random_schema(rng, depth - 1)});
  }
}

}  // namespace

TEST(SchemaProjection, NestedWordExample) {
  const auto w = divisible();
  EXPECT_EQ(format_word(w.projection(3)), "g1:1·g2:1·g3:3·g2:1·g3:3");
  for (Index n = 1; n <= 7; ++n) EXPECT_EQ(w.projection(n), nest_oracle(1, n)) << n;
}

TEST(SchemaProjection, FiniteLeafExample) {
  const auto u = word({a(1, 2), a(3, -1), a(2, 4)});
  const auto w = ProjectiveWord::finite(kAllZ, u);
  for (Index n = 3; n <= 6; ++n) EXPECT_EQ(w.projection(n), u);
  EXPECT_EQ(w.projection(2), word({a(1, 2), a(2, 4)}));
}

TEST(SchemaProjection, EpsilonExample) {
  const auto w = eps({1, 2, 3});
  // coordinates g1=1, g2=2, g3=3: (1,g1)(2,g1)(3,g2)(4,g1)(5,g2)(6,g3)
  EXPECT_EQ(w.projection(6), word({a(1, 1), a(2, 1), a(3, 2), a(4, 1), a(5, 2), a(6, 3)}));
  EXPECT_EQ(EpsRule::coordinate_at(1), 1u);
  EXPECT_EQ(EpsRule::coordinate_at(6), 3u);
  EXPECT_EQ(EpsRule::coordinate_at(7), 1u);
  EXPECT_EQ(EpsRule::coordinate_at(21), 6u);
  for (Index n = 1; n <= 40; ++n) ASSERT_EQ(w.projection(n), eps_oracle({1, 2, 3}, n));
}

TEST(SchemaProjection, BudgetAndBase) {
  const auto w = divisible();
  EXPECT_THROW(w.projection(10, 1000), ResourceError);
  try {
    w.projection(12);
    FAIL();
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("depth 12"), std::string::npos);
  }
  EXPECT_THROW(tau(3, w).projection(2), ContractError);
}

TEST(SchemaProjection, CompatibilityOfSchemaWords) {
  const auto w = divisible();
  for (Index n = 1; n < 8; ++n) ASSERT_EQ(project_upto(w.projection(n + 1), n), w.projection(n));
  const auto e = eps({1, 0, -1, 2});
  for (Index n = 1; n < 40; ++n) ASSERT_EQ(project_upto(e.projection(n + 1), n), e.projection(n));
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto r = random_schema(rng, 3);
    for (Index n = 1; n < 12; ++n) ASSERT_EQ(project_upto(r.projection(n + 1), n), r.projection(n));
  }
}

TEST(GroupOps, Examples) {
  const auto u = divisible();
  const auto id = product(u, inverse(u));
  for (Index n = 1; n <= 6; ++n) EXPECT_TRUE(id.projection(n).empty());
  const auto ab = product(leaf({a(1)}), leaf({a(2)}));
  EXPECT_EQ(ab.projection(2), word({a(1), a(2)}));
  EXPECT_EQ(ab.projection(5), word({a(1), a(2)}));
  const auto w2 = divisible(2);
  const auto sq = power(w2, 2).projection(3);
  const auto w2_3 = word({a(2), a(3, 3)});
  EXPECT_EQ(sq, concat(w2_3, w2_3));
}

TEST(GroupOps, ProjectionIsHomomorphism) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 60; ++k) {
    const auto u = random_schema(rng, 2);
    const auto v = random_schema(rng, 2);
    const int m = std::uniform_int_distribution<int>(-3, 3)(rng);
    for (Index n = 1; n <= 10; ++n) {
      ASSERT_EQ(product(u, v).projection(n), concat(u.projection(n), v.projection(n)));
      ASSERT_EQ(inverse(u).projection(n), invert(u.projection(n)));
      ASSERT_EQ(power(u, m).projection(n), power(u.projection(n), m));
      for (Index j = 0; j < n; ++j) {
        ASSERT_EQ(tau(j, product(u, v)).projection(n), concat(tau(j, u).projection(n), tau(j, v).projection(n)));
        ASSERT_EQ(tau(j, u).projection(n), project_above(u.projection(n), j));
      }
    }
  }
}

TEST(GroupOps, BaseMismatch) {
  const auto u = divisible();
  EXPECT_THROW(product(u, tau(2, u)), ContractError);
  EXPECT_THROW(product(u, ProjectiveWord::identity(FamilySpec::uniform(FactorDescriptor::rationals()))), ContractError);
  EXPECT_THROW(tau(0, tau(3, u)), ContractError);
}

TEST(Tau, Examples) {
  const auto w = divisible();
  EXPECT_EQ(tau(1, w).projection(3), power(word({a(2), a(3, 3)}), 2));
  const auto f = leaf({a(1), a(2), a(1)});
  for (Index n = 3; n <= 6; ++n) EXPECT_TRUE(tau(2, f).projection(n).empty());
  EXPECT_EQ(tau(0, w).normal_form(), w.normal_form());
  EXPECT_EQ(tau(0, w).base_index(), 1u);
}

TEST(Tau, LevelComposition) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 30; ++k) {
    const auto w = random_schema(rng, 2);
    for (Index i = 0; i <= 3; ++i)
      for (Index j = i; j <= 4; ++j)
        for (Index n = j + 1; n <= 9; ++n) ASSERT_EQ(tau(j, tau(i, w)).projection(n), tau(j, w).projection(n));
  }
}

TEST(Equality, ProductExamples) {
  const auto w = divisible();
  const auto one = ProjectiveWord::identity(kAllZ);
  const auto r1 = eq_in_product(w, one, 8);
  EXPECT_EQ(r1.status, VerdictStatus::DistinctWitness);
  EXPECT_EQ(r1.depth, 1u);
  const auto r2 = eq_in_product(w, divisible(), 8);
  EXPECT_EQ(r2.status, VerdictStatus::EqualCertified);
  EXPECT_EQ(r2.proof, ProofKind::Structural);
  const auto r3 = eq_in_product(eps({1, 1, 1}), eps({1, 1, 2}), 40);
  EXPECT_EQ(r3.status, VerdictStatus::DistinctWitness);
  EXPECT_EQ(r3.depth, 6u);
  const auto r4 = eq_in_product(eps({1}), product(leaf({a(1)}), with_base(tau(1, eps({1})), 1)), 10);
  EXPECT_EQ(r4.status, VerdictStatus::EqualCertified);
  const auto r5 = eq_in_product(power(tau(1, eps({1})), 2), product(tau(1, eps({1})), tau(1, eps({1}))), 10);
  EXPECT_EQ(r5.status, VerdictStatus::EqualCertified);
  // Equal projections without a structural match stay unknown.
  const auto x = leaf({a(1)});
  const auto w2 = divisible(2);
  const auto r6 = eq_in_product(product({x, w2, inverse(x)}), product({x, w2, inverse(x), w2, inverse(w2)}), 6);
  EXPECT_EQ(r6.status, VerdictStatus::EqualCertified);
  const auto r7 = eq_in_product(product(w2, x), product(x, w2), 6);
  EXPECT_EQ(r7.status, VerdictStatus::DistinctWitness);
  const auto ab = power(product(leaf({a(1)}), w2), 2);
  const auto ba = product({leaf({a(1)}), w2, leaf({a(1)}), w2});
  const auto r8 = eq_in_product(ab, ba, 6);
  EXPECT_EQ(r8.status, VerdictStatus::UnknownUpTo);
  EXPECT_EQ(r8.depth, 6u);
}

TEST(Equality, ArchipelagoExamples) {
  const auto one = ProjectiveWord::identity(kAllZ);
  const auto f = leaf({a(1), a(3, 2), a(2)});
  const auto r = eq_in_archipelago(f, one, 6, 8);
  EXPECT_EQ(r.status, VerdictStatus::EqualCertified);
  EXPECT_EQ(r.level, 3u);
  const auto w = divisible();
  const auto r2 = eq_in_archipelago(w, power(divisible(2), 2), 4, 8);
  EXPECT_EQ(r2.status, VerdictStatus::EqualCertified);
  EXPECT_EQ(r2.level, 1u);
  EXPECT_EQ(r2.text(), "EqualCertified(j=1)");
  const auto r3 = eq_in_archipelago(eps({1, 0}), eps({0, 1}), 4, 40);
  EXPECT_EQ(r3.status, VerdictStatus::UnknownUpTo);
  EXPECT_TRUE(r3.distinct_at_every_level);
  EXPECT_EQ(r3.levels.size(), 5u);
  EXPECT_EQ(eq_in_archipelago(leaf({a(1)}), one, 3, 5).text(), "EqualCertified(j=1)");
}

TEST(Equality, StructuralNeverContradictsProjections) {
  std::mt19937_64 rng(41);
  int structural = 0;
  for (int k = 0; k < 300; ++k) {
    const auto u = random_schema(rng, 2);
    // Rebuild a second word that is often, but not always, the same element.
    const auto v = std::bernoulli_distribution(0.5)(rng) ? product(u, product(inverse(u), u)) : random_schema(rng, 2);
    const auto r = eq_in_product(u, v, 10);
    if (r.status == VerdictStatus::EqualCertified) {
      ++structural;
      for (Index n = 1; n <= 10; ++n) ASSERT_EQ(u.projection(n), v.projection(n));
    }
    if (r.status == VerdictStatus::DistinctWitness) ASSERT_NE(u.projection(*r.depth), v.projection(*r.depth));
  }
  EXPECT_GT(structural, 50);
}

TEST(Divisible, Chain) {
  const auto steps = divisible_chain(divisible(), 4);
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(steps[0].statement, "w ~ w_2^2");
  EXPECT_EQ(steps[1].statement, "w ~ w_3^6");
  EXPECT_EQ(steps[2].statement, "w ~ w_4^24");
  for (const auto& s : steps) {
    EXPECT_TRUE(s.ok()) << s.statement;
    EXPECT_EQ(s.checked_depth, 8u);
  }
  // Direct expansion: tau(n-1, w) at depth 8 against (w_n expanded)^{n!}.
  std::int64_t fact = 1;
  for (Index n = 2; n <= 4; ++n) {
    fact *= n;
    EXPECT_EQ(project_above(nest_oracle(1, 8), n - 1), power(nest_oracle(n, 8), fact));
  }
  EXPECT_THROW(divisible_chain(divisible(2), 3), UnsupportedError);
  EXPECT_THROW(divisible_chain(leaf({a(1)}), 3), UnsupportedError);
}

TEST(Reindexing, PermuteExamples) {
  const FamilySpec zq({kZ, FactorDescriptor::rationals()}, {kZ});
  const auto u = ProjectiveWord::finite(zq, word({a(1), {2, GroupElement::from_rational(zq.at(2), 1, 2)}}));
  const auto p = permute_indices(IndexPermutation::swap(1, 2), u);
  EXPECT_EQ(p.spec().at(1), FactorDescriptor::rationals());
  EXPECT_EQ(p.spec().at(2), kZ);
  EXPECT_EQ(format_word(p.projection(2)), "g2:1·g1:1/2");
  EXPECT_EQ(format_word(p.projection(1)), "g1:1/2");
  EXPECT_THROW(IndexPermutation({1, 1}), ContractError);
}

TEST(Reindexing, RegroupExamples) {
  const auto u = leaf({a(1), a(2), a(3)});
  const auto r = regroup(IndexPartition::chunks(2), u);
  EXPECT_EQ(r.spec().at(1).kind(), FactorKind::FreeProduct);
  EXPECT_EQ(format_word(r.projection(2)), "g1:{1:1,2:1}·g2:{1:1}");
  EXPECT_THROW(IndexPartition({1}, {{1, 2}}, 2), ContractError);
  EXPECT_THROW(IndexPartition({}, {{1, 3}}, 2), ContractError);
}

TEST(Reindexing, RegroupCommutesWithProjection) {
  std::mt19937_64 rng(8);
  const IndexPartition part({2}, {{3, 1}}, 2);
  for (int k = 0; k < 40; ++k) {
    const auto w = random_schema(rng, 2);
    const auto r = regroup(part, w);
    for (Index m = 1; m <= 5; ++m) {
      const Index old_depth = part.max_index_upto(m);
      // Oracle: delete excluded / later-block letters, then merge same-block runs.
      std::vector<Letter> raw;
      const FiniteWord old = w.projection(old_depth);
      for (const auto& l : old.letters()) {
        const auto s = part.slot_of(l.index);
        if (!s || s->block > m) continue;
        raw.push_back({s->block, GroupElement::from_block(r.spec().at(s->block), {BlockLetter{s->local, l.element}})});
      }
      ASSERT_EQ(r.projection(m), FiniteWord::from_reduced(naive_reduce(raw)));
    }
  }
  // Homomorphism on products.
  for (int k = 0; k < 20; ++k) {
    const auto u = random_schema(rng, 2), v = random_schema(rng, 2);
    for (Index m = 1; m <= 4; ++m)
      ASSERT_EQ(regroup(part, product(u, v)).projection(m),
                concat(regroup(part, u).projection(m), regroup(part, v).projection(m)));
  }
}

TEST(Reindexing, PermuteIsHomomorphismAndInvertible) {
  std::mt19937_64 rng(9);
  const IndexPermutation f({3, 1, 2}, {2, 1});
  std::vector<Index> inv_head(3), inv_block(2);
  for (Index i = 1; i <= 3; ++i) inv_head[f.apply(i) - 1] = i;
  for (Index i = 1; i <= 2; ++i) inv_block[f.apply(3 + i) - 3 - 1] = i;
  const IndexPermutation g(inv_head, inv_block);
  for (Index i = 1; i < 30; ++i) ASSERT_EQ(g.apply(f.apply(i)), i);
  for (int k = 0; k < 30; ++k) {
    const auto u = random_schema(rng, 2), v = random_schema(rng, 2);
    for (Index n = 1; n <= 9; ++n) {
      ASSERT_EQ(permute_indices(f, product(u, v)).projection(n),
                concat(permute_indices(f, u).projection(n), permute_indices(f, v).projection(n)));
      ASSERT_EQ(permute_indices(g, permute_indices(f, u)).projection(n), u.projection(n));
    }
  }
}
