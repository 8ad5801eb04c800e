#include <gtest/gtest.h>

#include <set>

#include "mstyle/benchmark/score.hpp"
#include "mstyle/benchmark/soc.hpp"
#include "support/expect.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace mstyle;
using namespace mstyle::benchmark;
using mstyle::testing::code_of;
using mstyle::testing::make_aligned;
using mstyle::testing::make_pairs;

TEST(MultilingualSoc, KnownSizes) {
  EXPECT_EQ(build_multilingual_soc(make_pairs("de", "humor", 100)).size(), 4950u);
  EXPECT_EQ(build_multilingual_soc(make_pairs("de", "humor", 2)).size(), 1u);
  const auto five = build_multilingual_soc(make_pairs("de", "humor", 5));
  ASSERT_EQ(five.size(), 10u);
  std::set<std::set<std::string>> seen;
  for (const auto& s : five) seen.insert({s.anchor_pair_id, s.target_pair_id});
  EXPECT_EQ(seen.size(), 10u);
}

TEST(MultilingualSoc, SizeIsChooseTwoForAllN) {
  for (std::size_t n = 2; n <= 200; ++n)
    ASSERT_EQ(build_multilingual_soc(make_pairs("el", "sarcasm", n)).size(), oracle::choose2(n)) << n;
}

TEST(MultilingualSoc, InstancesFollowTheConstruction) {
  auto pairs = make_pairs("de", "humor", 12);
  Rng rng(4);
  rng.shuffle(pairs);
  for (auto pol : {Polarity::pos, Polarity::neg}) {
    const auto out = build_multilingual_soc(pairs, pol);
    for (const auto& s : out) {
      EXPECT_NO_THROW(check_instance(s));
      EXPECT_LT(s.anchor_pair_id, s.target_pair_id);
      const char want = pol == Polarity::pos ? 'P' : 'N';
      EXPECT_EQ(s.anchor_text[0], want);
      EXPECT_EQ(s.pos_text[0], want);
      EXPECT_NE(s.neg_text[0], want);
      EXPECT_EQ(s.pos_text.substr(1), s.neg_text.substr(1));
    }
  }
  EXPECT_EQ(build_multilingual_soc(pairs), build_multilingual_soc(make_pairs("de", "humor", 12)));
}

TEST(MultilingualSoc, Errors) {
  auto mixed = make_pairs("de", "humor", 3);
  mixed.push_back(make_pairs("el", "humor", 1)[0]);
  EXPECT_EQ(code_of([&] { build_multilingual_soc(mixed); }), Errc::validation);
  auto dup = make_pairs("de", "humor", 3);
  dup.push_back(dup[0]);
  EXPECT_EQ(code_of([&] { build_multilingual_soc(dup); }), Errc::validation);
  EXPECT_EQ(code_of([] { build_multilingual_soc(make_pairs("de", "humor", 1)); }), Errc::precondition);
}

TEST(CrosslingualSoc, KnownSizes) {
  EXPECT_EQ(build_crosslingual_soc(make_aligned({"fr", "it", "pt"}, "formal_tone", 100), LanguageCode("fr")).size(),
            19800u);
  EXPECT_EQ(build_crosslingual_soc(make_aligned({"de", "el"}, "humor", 2), LanguageCode("de")).size(), 2u);
  EXPECT_EQ(build_crosslingual_soc(make_aligned({"de", "el", "fr"}, "humor", 3), LanguageCode("el")).size(), 12u);
}

TEST(CrosslingualSoc, SizeForAllNAndK) {
  const std::vector<std::string> all{"de", "el", "fr", "it"};
  for (std::size_t k = 2; k <= 4; ++k) {
    const std::vector<std::string> langs(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t n = 2; n <= 30; ++n) {
      const auto out = build_crosslingual_soc(make_aligned(langs, "humor", n), LanguageCode("de"));
      ASSERT_EQ(out.size(), n * (n - 1) * (k - 1)) << n << " " << k;
      for (const auto& s : out) {
        ASSERT_NO_THROW(check_instance(s));
        ASSERT_EQ(s.anchor_language.str(), "de");
      }
    }
  }
}

TEST(CrosslingualSoc, Errors) {
  auto corpora = make_aligned({"de", "el"}, "humor", 4);
  corpora[LanguageCode("el")].pop_back();
  EXPECT_EQ(code_of([&] { build_crosslingual_soc(corpora, LanguageCode("de")); }), Errc::alignment);
  EXPECT_EQ(code_of([] { build_crosslingual_soc(make_aligned({"de"}, "humor", 4), LanguageCode("de")); }),
            Errc::validation);
  EXPECT_EQ(code_of([] { build_crosslingual_soc(make_aligned({"de", "el"}, "humor", 4), LanguageCode("fr")); }),
            Errc::validation);
}

TEST(SocFile, RoundTrip) {
  const auto out = build_crosslingual_soc(make_aligned({"de", "el"}, "humor", 4), LanguageCode("el"));
  const auto path = std::filesystem::temp_directory_path() / ("mstyle-soc-" + std::to_string(::getpid()));
  write_benchmark(path, out);
  EXPECT_EQ(read_benchmark(path), out);
  std::filesystem::remove(path);
}

namespace {

std::vector<SocInstance> big_benchmark() { return build_multilingual_soc(make_pairs("de", "humor", 150)); }

}  // namespace

TEST(Score, OracleIsPerfect) {
  auto p = mstyle::testing::oracle_provider();
  const auto r = score_soc(big_benchmark(), *p);
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.ties, 0u);
  ASSERT_EQ(r.breakdown.size(), 1u);
  EXPECT_EQ(r.breakdown[0].feature, "humor");
}

TEST(Score, ConstantProviderTiesEverything) {
  auto p = mstyle::testing::constant_provider();
  const auto inst = build_multilingual_soc(make_pairs("de", "humor", 30));
  const auto strict = score_soc(inst, *p, TiePolicy::strict_fail);
  EXPECT_EQ(strict.accuracy, 0.0);
  EXPECT_EQ(strict.ties, strict.total);
  EXPECT_EQ(score_soc(inst, *p, TiePolicy::half_credit).accuracy, 0.5);
}

TEST(Score, RandomVectorsScoreNearChance) {
  auto p = mstyle::testing::random_provider(2024);
  const auto inst = big_benchmark();
  ASSERT_GE(inst.size(), 10000u);
  EXPECT_NEAR(score_soc(inst, *p).accuracy, 0.5, 0.02);
}

TEST(Score, InvariantUnderShuffleScalingNegationAndThreads) {
  auto base = mstyle::testing::random_provider(5);
  auto inst = build_multilingual_soc(make_pairs("de", "humor", 40));
  const auto ref = score_soc(inst, *base);
  auto shuffled = inst;
  Rng rng(8);
  rng.shuffle(shuffled);
  EXPECT_EQ(score_soc(shuffled, *base).correct, ref.correct);
  auto scaled = mstyle::testing::mapped_provider(base, [](std::vector<double>& v) {
    for (auto& x : v) x *= 4.0;
  });
  EXPECT_EQ(score_soc(inst, *scaled).correct, ref.correct);
  auto negated = mstyle::testing::mapped_provider(base, [](std::vector<double>& v) {
    for (auto& x : v) x = -x;
  });
  EXPECT_EQ(score_soc(inst, *negated).correct, ref.correct);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(to_json(score_soc(inst, *base, TiePolicy::strict_fail, t)), to_json(ref));
}

TEST(Score, BreakdownPerLanguageAndFeature) {
  auto inst = build_multilingual_soc(make_pairs("de", "humor", 5));
  const auto more = build_multilingual_soc(make_pairs("el", "sarcasm", 4));
  inst.insert(inst.end(), more.begin(), more.end());
  auto p = mstyle::testing::oracle_provider();
  const auto r = score_soc(inst, *p);
  ASSERT_EQ(r.breakdown.size(), 2u);
  EXPECT_EQ(r.breakdown[0].language.str(), "de");
  EXPECT_EQ(r.breakdown[0].counts.total, 10u);
  EXPECT_EQ(r.breakdown[1].counts.total, 6u);
}

TEST(Score, ProviderFailureNamesInstance) {
  VectorFileProvider p;
  p.add("P de humor item 0000", {1, 0});
  const auto inst = build_multilingual_soc(make_pairs("de", "humor", 2));
  try {
    score_soc(inst, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_key);
    EXPECT_NE(std::string(e.what()).find("instance 0"), std::string::npos);
  }
  EXPECT_EQ(code_of([&] { score_soc({}, p); }), Errc::precondition);
}
