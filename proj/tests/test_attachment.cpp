#include <gtest/gtest.h>

#include "mignet/attachment.hpp"
#include "oracles/entropy.hpp"
#include "test_util.hpp"

using namespace mignet;
using mignet::testing::make_tweet;

namespace {

CountryCode cc(const char* s) { return *CountryCode::parse(s); }

NativeUsage usage_of(const std::string& tag, std::initializer_list<std::pair<const char*, std::size_t>> counts) {
  NativeUsage u;
  for (const auto& [c, n] : counts) u[tag][cc(c)] = n;
  return u;
}

UserLabel label(const std::string& id, const char* nat, const char* res) {
  UserLabel l;
  l.user_id = id;
  l.nationality = cc(nat);
  l.residence = cc(res);
  l.status = classify(l);
  return l;
}

HashtagCountryTable fixed_table() {
  HashtagCountryTable t;
  t.entries["it1"] = {cc("IT"), 0.0, 10};
  t.entries["de1"] = {cc("DE"), 0.0, 10};
  t.entries["misc"] = {std::nullopt, 0.9, 10};
  return t;
}

}  // namespace

TEST(HashtagTable, SkewedDistributionLabeled) {
  auto t = build_hashtag_table(usage_of("x", {{"US", 9}, {"GB", 1}}));
  const auto& e = t.entries.at("x");
  EXPECT_NEAR(e.entropy, oracle::entropy_base_m({9, 1}), 1e-12);
  EXPECT_NEAR(e.entropy, 0.469, 5e-4);
  EXPECT_EQ(e.support, 10u);
  EXPECT_EQ(e.country, cc("US"));
}

TEST(HashtagTable, UniformDistributionUnlabeled) {
  auto t = build_hashtag_table(usage_of("x", {{"US", 5}, {"GB", 5}}));
  EXPECT_DOUBLE_EQ(t.entries.at("x").entropy, 1.0);
  EXPECT_FALSE(t.entries.at("x").country);
}

TEST(HashtagTable, BelowSupport) {
  auto t = build_hashtag_table(usage_of("x", {{"US", 3}}), {0.5, 5});
  EXPECT_DOUBLE_EQ(t.entries.at("x").entropy, 0.0);
  EXPECT_FALSE(t.entries.at("x").country);
}

TEST(HashtagTable, EmptyInput) { EXPECT_TRUE(build_hashtag_table({}).entries.empty()); }

TEST(HashtagTable, EntropyMatchesOracleOnManyDistributions) {
  const char* cs[] = {"IT", "DE", "FR", "GB", "ES", "US"};
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = 0; b < 8; ++b)
      for (std::size_t c = 0; c < 5; ++c) {
        std::map<CountryCode, std::size_t> counts;
        std::vector<double> raw;
        std::size_t v[] = {a, b, c, a * b, 1, c * c};
        for (int k = 0; k < 6; ++k) {
          counts[cc(cs[k])] = v[k];
          raw.push_back(static_cast<double>(v[k]));
        }
        EXPECT_NEAR(normalized_entropy(counts), oracle::entropy_base_m(raw), 1e-12);
      }
}

TEST(HashtagTable, SingleCountryHashtagsAllLabeled) {
  NativeUsage u;
  u["a"][cc("IT")] = 5;
  u["b"][cc("DE")] = 7;
  u["c"][cc("FR")] = 4;
  auto t = build_hashtag_table(u, {0.5, 5});
  EXPECT_EQ(t.country_of("a"), cc("IT"));
  EXPECT_EQ(t.country_of("b"), cc("DE"));
  EXPECT_FALSE(t.country_of("c"));
  EXPECT_FALSE(t.country_of("unknown"));
}

TEST(HashtagTable, RejectsThresholdOutsideUnitInterval) {
  EXPECT_THROW(build_hashtag_table({}, {1.5, 5}), ValidationError);
}

TEST(NativeUsages, CountsDistinctNativesOnly) {
  std::vector<Tweet> t;
  // A prolific native uses #pizza many times; it counts once.
  for (int i = 0; i < 20; ++i) t.push_back(make_tweet("a" + std::to_string(i), "a", "2018-02-01", "IT", nullptr, {"pizza"}));
  t.push_back(make_tweet("b0", "b", "2018-02-01", "IT", nullptr, {"pizza", "calcio"}));
  t.push_back(make_tweet("m0", "m", "2018-02-01", "DE", nullptr, {"pizza"}));  // migrant, ignored
  Corpus c;
  c.tweets = TweetStore::from_tweets(t);
  std::vector<UserLabel> labels = {label("a", "IT", "IT"), label("b", "IT", "IT"), label("m", "IT", "DE")};
  auto u = native_usages(labels, c);
  EXPECT_EQ(u.at("pizza").at(cc("IT")), 2u);
  EXPECT_EQ(u.at("pizza").count(cc("DE")), 0u);
  EXPECT_EQ(u.at("calcio").at(cc("IT")), 1u);
}

TEST(AttachmentScores, MigrantProportions) {
  HashtagCounts usage = {{"it1", 2}, {"de1", 3}, {"misc", 5}};
  auto s = attachment_scores(label("m", "IT", "DE"), usage, fixed_table());
  EXPECT_EQ(s.labeled_occurrences, 5u);
  EXPECT_DOUBLE_EQ(*s.ha, 0.4);
  EXPECT_DOUBLE_EQ(*s.da, 0.6);
}

TEST(AttachmentScores, NativeIndicesCoincide) {
  HashtagCounts usage = {{"it1", 4}, {"de1", 4}};
  auto s = attachment_scores(label("n", "IT", "IT"), usage, fixed_table());
  EXPECT_DOUBLE_EQ(*s.ha, 0.5);
  EXPECT_EQ(*s.ha, *s.da);
}

TEST(AttachmentScores, OnlyUnlabeledHashtags) {
  HashtagCounts usage = {{"misc", 7}, {"unseen", 1}};
  auto s = attachment_scores(label("m", "IT", "DE"), usage, fixed_table());
  EXPECT_EQ(s.labeled_occurrences, 0u);
  EXPECT_FALSE(s.ha);
  EXPECT_FALSE(s.da);
}

TEST(AttachmentScores, UnknownStatusRejected) {
  UserLabel l;
  l.user_id = "x";
  EXPECT_THROW(attachment_scores(l, {}, fixed_table()), ValidationError);
}

TEST(AttachmentScores, BatchSkipsUnknownAndKeepsBounds) {
  std::vector<Tweet> t;
  t.push_back(make_tweet("1", "m", "2018-02-01", "DE", nullptr, {"it1", "de1", "misc"}));
  t.push_back(make_tweet("2", "n", "2018-02-01", "IT", nullptr, {"it1", "it1"}));
  t.push_back(make_tweet("3", "x", "2018-02-01", "IT", nullptr, {"it1"}));
  Corpus c;
  c.tweets = TweetStore::from_tweets(t);
  UserLabel unknown;
  unknown.user_id = "x";
  std::vector<UserLabel> labels = {label("m", "IT", "DE"), label("n", "IT", "IT"), unknown};
  auto batch = score_users(labels, c, fixed_table());
  EXPECT_EQ(batch.skipped_unknown, 1u);
  ASSERT_EQ(batch.scores.size(), 2u);
  EXPECT_DOUBLE_EQ(*batch.scores[0].ha, 0.5);
  EXPECT_DOUBLE_EQ(*batch.scores[0].da, 0.5);
  EXPECT_DOUBLE_EQ(*batch.scores[1].ha, 1.0);
  for (const auto& s : batch.scores) {
    EXPECT_LE(*s.ha + *s.da, s.status == Status::Native ? 2.0 : 1.0);
    EXPECT_GE(*s.ha, 0.0);
    EXPECT_LE(*s.da, 1.0);
  }
}

TEST(AttachmentScores, RelabelingNeverShrinksDenominator) {
  HashtagCounts usage = {{"it1", 2}, {"misc", 5}};
  auto before = attachment_scores(label("m", "IT", "DE"), usage, fixed_table());
  auto table = fixed_table();
  table.entries["misc"].country = cc("FR");
  auto after = attachment_scores(label("m", "IT", "DE"), usage, table);
  EXPECT_GE(after.labeled_occurrences, before.labeled_occurrences);
  EXPECT_EQ(after.labeled_occurrences, 7u);
}

namespace {

AttachmentScore score(Status st, std::optional<double> ha, std::optional<double> da) {
  AttachmentScore s;
  s.status = st;
  s.ha = ha;
  s.da = da;
  return s;
}

}  // namespace

TEST(AttachmentHistograms, SingleValueSingleBin) {
  std::vector<AttachmentScore> v(6, score(Status::Native, 0.447, 0.447));
  auto h = attachment_histograms(v, Status::Native, 10);
  EXPECT_EQ(h.count, 6u);
  EXPECT_NEAR(*h.mean_ha, 0.447, 1e-12);
  std::size_t occupied = 0;
  for (auto c : h.ha.counts) occupied += c > 0;
  EXPECT_EQ(occupied, 1u);
  EXPECT_EQ(h.ha.counts[4], 6u);
}

TEST(AttachmentHistograms, EmptyGroup) {
  std::vector<AttachmentScore> v = {score(Status::Native, 0.5, 0.5)};
  auto h = attachment_histograms(v, Status::Migrant, 4);
  EXPECT_EQ(h.count, 0u);
  EXPECT_EQ(h.ha.total(), 0u);
  EXPECT_FALSE(h.mean_ha);
  EXPECT_FALSE(h.mean_da);
}

TEST(AttachmentHistograms, TwoBinsExtremes) {
  std::vector<AttachmentScore> v = {score(Status::Migrant, 0.0, 1.0), score(Status::Migrant, 1.0, 0.0),
                                    score(Status::Migrant, std::nullopt, std::nullopt)};
  auto h = attachment_histograms(v, Status::Migrant, 2);
  EXPECT_EQ(h.count, 2u);
  EXPECT_EQ(h.ha.counts, (std::vector<std::size_t>{1, 1}));
  EXPECT_DOUBLE_EQ(*h.mean_ha, 0.5);
  EXPECT_DOUBLE_EQ(*h.mean_da, 0.5);
}

TEST(TopHashtags, MaxScaling) {
  HashtagCounts c = {{"love", 100}, {"art", 50}};
  auto top = top_hashtags(c, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0], (std::pair<std::string, double>{"love", 1.0}));
  EXPECT_EQ(top[1], (std::pair<std::string, double>{"art", 0.5}));
}

TEST(TopHashtags, KLargerThanVocabulary) {
  HashtagCounts c = {{"a", 1}, {"b", 3}};
  EXPECT_EQ(top_hashtags(c, 10).size(), 2u);
  EXPECT_THROW(top_hashtags(c, 0), ValidationError);
}

TEST(TopHashtags, TiesLexicographic) {
  HashtagCounts c = {{"zeta", 4}, {"alpha", 4}, {"mid", 4}, {"top", 9}};
  auto top = top_hashtags(c, 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].first, "top");
  EXPECT_EQ(top[1].first, "alpha");
  EXPECT_EQ(top[2].first, "mid");
}

TEST(TopHashtags, GroupCountsPoolOccurrences) {
  std::vector<Tweet> t;
  t.push_back(make_tweet("1", "m", "2018-02-01", "DE", nullptr, {"a", "b"}));
  t.push_back(make_tweet("2", "m", "2018-02-02", "DE", nullptr, {"a"}));
  t.push_back(make_tweet("3", "n", "2018-02-02", "IT", nullptr, {"c"}));
  Corpus c;
  c.tweets = TweetStore::from_tweets(t);
  std::vector<UserLabel> labels = {label("m", "IT", "DE"), label("n", "IT", "IT")};
  auto counts = group_hashtag_counts(labels, c, Status::Migrant);
  EXPECT_EQ(counts, (HashtagCounts{{"a", 2}, {"b", 1}}));
}
