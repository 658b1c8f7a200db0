#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "qae/error.hpp"
#include "qae/optimizer.hpp"

namespace qae {
namespace {

DecisionRecord rec(std::vector<AVPair> pairs, bool grant, std::uint64_t seq) {
  std::sort(pairs.begin(), pairs.end());
  return {std::move(pairs), grant ? Outcome::grant : Outcome::deny, seq};
}

AAHPool pool_of(const std::vector<std::pair<std::string, bool>>& roles) {
  AAHPool pool;
  std::uint64_t seq = 0;
  for (const auto& [role, g] : roles) pool.record(rec({{"role", role}}, g, ++seq));
  return pool;
}

TEST(PoolTest, FifoEvictionKeepsOrder) {
  AAHPool pool(2);
  pool.record(rec({{"role", "dev"}}, true, 1));
  pool.record(rec({{"role", "qa"}}, false, 2));
  pool.record(rec({{"role", "dev"}}, false, 3));
  ASSERT_EQ(pool.size(), 2u);
  EXPECT_EQ(pool.records()[0].seq, 2u);
  EXPECT_EQ(pool.records()[1].seq, 3u);
  EXPECT_EQ(pool.grants(), 0u);
  EXPECT_THROW(pool.record(rec({}, true, 3)), Error);
}

TEST(DecisionEntropyTest, Values) {
  EXPECT_EQ(decision_entropy(pool_of({{"dev", true}, {"qa", true}})), 0.0);
  EXPECT_NEAR(decision_entropy(pool_of({{"a", true}, {"a", true}, {"a", false}, {"a", false}})),
              1.0, 1e-12);
  const auto three_one = pool_of({{"a", true}, {"a", true}, {"a", true}, {"a", false}});
  EXPECT_NEAR(decision_entropy(three_one), 0.8112781, 1e-6);
  EXPECT_EQ(decision_entropy(AAHPool{}), 0.0);
}

TEST(InformationGainTest, Examples) {
  const auto perfect = pool_of({{"dev", true}, {"dev", true}, {"qa", false}, {"qa", false}});
  EXPECT_NEAR(information_gain(perfect, "role"), 1.0, 1e-12);
  const auto constant = pool_of({{"dev", true}, {"dev", false}, {"dev", true}});
  EXPECT_NEAR(information_gain(constant, "role"), 0.0, 1e-12);
  const auto independent = pool_of({{"dev", true}, {"dev", false}, {"qa", true}, {"qa", false}});
  EXPECT_NEAR(information_gain(independent, "role"), 0.0, 1e-12);
}

TEST(InformationGainTest, AbsentValueIsItsOwnPartition) {
  AAHPool pool;
  pool.record(rec({{"role", "dev"}}, true, 1));
  pool.record(rec({}, false, 2));
  pool.record(rec({}, false, 3));
  EXPECT_NEAR(information_gain(pool, "role"), decision_entropy(pool), 1e-12);
}

TEST(InformationGainTest, MatchesOracleOnRandomPools) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    AAHPool pool;
    std::vector<std::pair<std::string, bool>> obs;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      const bool grant = rng() % 3 == 0;
      const auto roll = rng() % 4;
      std::vector<AVPair> pairs;
      std::string value;
      if (roll != 3) {
        value = "v" + std::to_string(roll);
        pairs.push_back({"x", value});
      }
      pairs.push_back({"y", "k"});
      pool.record(rec(pairs, grant, static_cast<std::uint64_t>(i + 1)));
      obs.emplace_back(value, grant);
    }
    EXPECT_NEAR(information_gain(pool, "x"), oracle::information_gain(obs), 1e-9);
  }
}

Registry role_registry(const std::vector<std::string>& roles) {
  AttributeSpace space;
  space.add({"role", AttrClass::subject, 1.0, {"dev", "qa", "ops"}});
  space.add({"team", AttrClass::subject, 1.0, {"x"}});
  Registry reg(std::move(space));
  std::uint8_t tag = 1;
  for (const auto& r : roles) reg.register_subject({{"role", r}, {"team", "x"}}, testing::key_for(tag++).pk);
  return reg;
}

TEST(AttributeAnonymityTest, Examples) {
  EXPECT_NEAR(attribute_anonymity(role_registry({"dev", "dev", "dev"}), "team"), 1.0, 1e-12);
  EXPECT_NEAR(attribute_anonymity(role_registry({"dev", "dev", "qa"}), "role"), 0.0, 1e-12);
  EXPECT_NEAR(attribute_anonymity(role_registry({"dev", "dev", "qa", "qa"}), "role"), 0.5, 1e-12);
  EXPECT_THROW(attribute_anonymity(role_registry({"dev"}), "nope"), Error);
  EXPECT_THROW(attribute_anonymity(role_registry({}), "role"), Error);
}

TEST(WeightsTest, EmptyPoolOrdersByAnonymity) {
  const auto reg = role_registry({"dev", "dev", "qa"});
  const auto w = compute_weights(reg.space(), AAHPool{}, reg);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w.entries()[0].attr, "team");
  EXPECT_EQ(w.entries()[1].attr, "role");
}

TEST(WeightsTest, PredictorRankedFirstAndTiesByName) {
  AttributeSpace space;
  space.add({"b_pred", AttrClass::subject, 1.0, {"p", "q"}});
  space.add({"a_noise", AttrClass::subject, 1.0, {"p", "q"}});
  space.add({"c_const", AttrClass::object, 1.0, {"k"}});
  space.add({"d_const", AttrClass::object, 1.0, {"k"}});
  Registry reg(space);
  std::uint8_t tag = 1;
  for (const char* pred : {"p", "q"}) {
    for (const char* noise : {"p", "q"}) {
      reg.register_subject({{"b_pred", pred}, {"a_noise", noise}}, testing::key_for(tag++).pk);
    }
  }
  AAHPool pool;
  std::uint64_t seq = 0;
  for (const char* pred : {"p", "q"}) {
    for (const char* noise : {"p", "q"}) {
      pool.record(rec({{"b_pred", pred}, {"a_noise", noise}, {"c_const", "k"}, {"d_const", "k"}},
                      std::string(pred) == "p", ++seq));
    }
  }
  const auto w = compute_weights(reg.space(), pool, reg);
  EXPECT_EQ(w.rank_of("b_pred"), 0u);
  EXPECT_LT(*w.rank_of("c_const"), *w.rank_of("d_const"));
  EXPECT_GT(w.entries()[0].weight, w.entries()[1].weight);
  EXPECT_EQ(compute_weights(reg.space(), pool, reg).entries(), w.entries());

  const auto raw = compute_weights(reg.space(), pool, reg, AnonymityTerm::raw_global_r);
  EXPECT_EQ(raw.rank_of("b_pred"), 0u);
  EXPECT_NEAR(raw.entries().back().anonymity, 1.0, 1e-12);
}

TEST(WeightsTest, TieBreakIsAscendingName) {
  const WeightList w({{"zeta", 0, 0, 1.0}, {"alpha", 0, 0, 1.0}, {"mid", 0, 0, 2.0}}, 3);
  EXPECT_EQ(w.entries()[0].attr, "mid");
  EXPECT_EQ(w.entries()[1].attr, "alpha");
  EXPECT_EQ(w.entries()[2].attr, "zeta");
  EXPECT_EQ(w.version(), 3u);
  EXPECT_EQ(weights_csv(w).substr(0, 37), "attr,info_gain,anonymity_term,weight,");
}

}  // namespace
}  // namespace qae
