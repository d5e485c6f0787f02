#include <gtest/gtest.h>

#include <chrono>

#include "mignet/labeling.hpp"
#include "mignet/rng.hpp"
#include "test_util.hpp"

using namespace mignet;
using mignet::testing::make_tweet;

namespace {

CountryCode cc(const char* s) { return *CountryCode::parse(s); }

/// `days` distinct days in 2018 in `country`, `per_day` tweets each.
void add_days(std::vector<Tweet>& out, const std::string& user, const char* country, int first_day, int days,
              int per_day = 1) {
  const Date start = *parse_date("2018-01-01");
  for (int d = 0; d < days; ++d) {
    for (int k = 0; k < per_day; ++k) {
      auto date = format_date(start + std::chrono::days(first_day + d));
      out.push_back(make_tweet(user + country + std::to_string(out.size()), user, date, country, nullptr, {}, k));
    }
  }
}

}  // namespace

TEST(InferResidence, ArgmaxOverDays) {
  std::vector<Tweet> t;
  add_days(t, "u", "IT", 0, 40);
  add_days(t, "u", "DE", 100, 5);
  EXPECT_EQ(infer_residence(t, LabelingConfig{}).country, cc("IT"));
}

TEST(InferResidence, BelowDayThreshold) {
  std::vector<Tweet> t;
  add_days(t, "u", "IT", 0, 3, 10);
  LabelingConfig cfg;
  cfg.min_residence_days = 10;
  auto r = infer_residence(t, cfg);
  EXPECT_FALSE(r.country);
  EXPECT_EQ(r.evidence.geo_days, 3u);
}

TEST(InferResidence, TieBrokenByTweetCount) {
  std::vector<Tweet> t;
  add_days(t, "u", "IT", 0, 20);       // 20 days, 20 tweets
  add_days(t, "u", "DE", 100, 20);     // 20 days, 20 tweets ...
  add_days(t, "u", "IT", 0, 5);        // IT now 25 tweets on the same 20 days
  add_days(t, "u", "DE", 100, 10);     // DE now 30 tweets on the same 20 days
  auto r = infer_residence(t, LabelingConfig{});
  ASSERT_EQ(r.evidence.activity.at(cc("IT")).days, 20u);
  ASSERT_EQ(r.evidence.activity.at(cc("IT")).tweets, 25u);
  ASSERT_EQ(r.evidence.activity.at(cc("DE")).tweets, 30u);
  EXPECT_EQ(r.country, cc("DE"));
}

TEST(InferResidence, FullTieBrokenLexicographically) {
  std::vector<Tweet> t;
  add_days(t, "u", "IT", 0, 12);
  add_days(t, "u", "DE", 100, 12);
  EXPECT_EQ(infer_residence(t, LabelingConfig{}).country, cc("DE"));
}

TEST(InferResidence, OtherYearsIgnored) {
  std::vector<Tweet> t;
  add_days(t, "u", "IT", 0, 12);
  for (int i = 0; i < 50; ++i) t.push_back(make_tweet("old" + std::to_string(i), "u", "2017-03-01", "DE"));
  EXPECT_EQ(infer_residence(t, LabelingConfig{}).country, cc("IT"));
}

TEST(InferResidence, InvariantUnderWithinDayDuplication) {
  // Day counts decide; duplicating tweets inside a day only matters through the tie-break.
  Rng rng(3);
  const char* countries[] = {"IT", "DE", "FR"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Tweet> base;
    for (int c = 0; c < 3; ++c) add_days(base, "u", countries[c], 120 * c, 5 + static_cast<int>(rng.below(20)));
    auto before = infer_residence(base, LabelingConfig{});
    // Duplicate some tweet of the winning country only; the winner can't change.
    std::vector<Tweet> dup = base;
    for (const auto& tw : base)
      if (before.country && tw.country == before.country && rng.bernoulli(0.5)) {
        Tweet copy = tw;
        copy.tweet_id += "dup";
        dup.push_back(copy);
      }
    auto after = infer_residence(dup, LabelingConfig{});
    EXPECT_EQ(before.country, after.country);
    for (const auto& [c, act] : before.evidence.activity) EXPECT_EQ(after.evidence.activity.at(c).days, act.days);
  }
}

TEST(InferNationality, ConvexMixOfUserAndFriends) {
  std::vector<Tweet> t;
  add_days(t, "u", "IT", 0, 10);
  std::vector<CountryCode> friends = {cc("IT"), cc("IT"), cc("IT"), cc("FR"), cc("FR")};
  auto r = infer_nationality(t, friends, LabelingConfig{});
  // Oracle: 0.5 * 1.0 + 0.5 * 0.6 = 0.8 and 0.5 * 0 + 0.5 * 0.4 = 0.2.
  EXPECT_DOUBLE_EQ(r.evidence.score.at(cc("IT")), 0.8);
  EXPECT_DOUBLE_EQ(r.evidence.score.at(cc("FR")), 0.2);
  EXPECT_EQ(r.country, cc("IT"));
}

TEST(InferNationality, BetaOneIgnoresFriends) {
  std::vector<Tweet> t;
  add_days(t, "u", "JP", 0, 6);
  std::vector<CountryCode> friends(20, cc("US"));
  LabelingConfig cfg;
  cfg.beta = 1.0;
  EXPECT_EQ(infer_nationality(t, friends, cfg).country, cc("JP"));
}

TEST(InferNationality, InsufficientEvidence) {
  std::vector<Tweet> none;
  EXPECT_FALSE(infer_nationality(none, {}, LabelingConfig{}).country);
  std::vector<Tweet> t;
  add_days(t, "u", "IT", 0, 2);
  std::vector<CountryCode> friends = {cc("IT"), cc("IT")};
  EXPECT_FALSE(infer_nationality(t, friends, LabelingConfig{}).country);  // 2 + 2 < 5
}

TEST(InferNationality, UsesFullHistory) {
  std::vector<Tweet> t;
  for (int i = 0; i < 8; ++i) t.push_back(make_tweet("h" + std::to_string(i), "u", "2014-05-01", "PT"));
  EXPECT_EQ(infer_nationality(t, {}, LabelingConfig{}).country, cc("PT"));
}

TEST(Classify, Statuses) {
  EXPECT_EQ(classify(cc("IT"), cc("DE")), Status::Migrant);
  EXPECT_EQ(classify(cc("IT"), cc("IT")), Status::Native);
  EXPECT_EQ(classify(cc("IT"), std::nullopt), Status::Unknown);
  EXPECT_EQ(classify(std::nullopt, cc("IT")), Status::Unknown);
}

TEST(LabelingConfig, Validation) {
  LabelingConfig cfg;
  cfg.beta = 1.5;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.min_residence_days = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

namespace {

std::vector<UserLabel> flows(std::initializer_list<std::tuple<int, const char*, const char*>> rows) {
  std::vector<UserLabel> out;
  int id = 0;
  for (const auto& [count, from, to] : rows) {
    for (int i = 0; i < count; ++i) {
      UserLabel l;
      l.user_id = "u" + std::to_string(id++);
      l.nationality = cc(from);
      l.residence = cc(to);
      l.status = classify(l);
      out.push_back(l);
    }
  }
  return out;
}

}  // namespace

TEST(MigrationMatrix, ThresholdFilter) {
  auto labels = flows({{12, "IT", "DE"}, {9, "FR", "DE"}});
  auto m = migration_matrix(labels, 10);
  EXPECT_EQ(m.full.total(), 21u);
  ASSERT_EQ(m.filtered.cells.size(), 1u);
  EXPECT_EQ(m.filtered.at(cc("IT"), cc("DE")), 12u);
  EXPECT_EQ(to_csv(m.filtered), "nationality,DE\nIT,12\n");
}

TEST(MigrationMatrix, NoMigrants) {
  auto labels = flows({{5, "IT", "IT"}});
  auto m = migration_matrix(labels, 10);
  EXPECT_TRUE(m.full.empty());
  EXPECT_TRUE(m.filtered.empty());
}

TEST(MigrationMatrix, Symmetric) {
  auto labels = flows({{25, "IT", "DE"}, {25, "DE", "IT"}});
  auto m = migration_matrix(labels, 10);
  EXPECT_EQ(to_csv(m.filtered), "nationality,DE,IT\nDE,0,25\nIT,25,0\n");
}

TEST(MigrationMatrix, SumEqualsMigrantCount) {
  auto labels = flows({{3, "IT", "DE"}, {4, "ES", "ES"}, {7, "FR", "GB"}, {1, "IT", "FR"}});
  UserLabel unknown;
  unknown.user_id = "x";
  unknown.nationality = cc("IT");
  labels.push_back(unknown);
  std::size_t migrants = 0;
  for (const auto& l : labels) migrants += l.status == Status::Migrant;
  EXPECT_EQ(migration_matrix(labels, 1).full.total(), migrants);
}

TEST(LabelUsers, TwoPassEndToEnd) {
  std::vector<Tweet> t;
  // Five IT natives who are friends of the migrant.
  for (int u = 0; u < 5; ++u) add_days(t, "n" + std::to_string(u), "IT", 0, 15);
  // Migrant: lives in DE, a few home days, friends in IT.
  add_days(t, "m", "DE", 0, 30);
  add_days(t, "m", "IT", 200, 4);
  Corpus c;
  c.tweets = TweetStore::from_tweets(t);
  std::vector<FollowEdge> edges;
  for (int u = 0; u < 5; ++u) edges.push_back({"m", "n" + std::to_string(u)});
  c.edges = EdgeList::from_edges(edges);
  auto labels = label_users(c, LabelingConfig{});
  ASSERT_EQ(labels.size(), 6u);
  EXPECT_EQ(labels[0].user_id, "m");
  EXPECT_EQ(labels[0].status, Status::Migrant);
  EXPECT_EQ(labels[0].residence, cc("DE"));
  EXPECT_EQ(labels[0].nationality, cc("IT"));
  for (std::size_t i = 1; i < 6; ++i) EXPECT_EQ(labels[i].status, Status::Native);
  for (const auto& l : labels) {
    if (l.status != Status::Unknown) {
      EXPECT_TRUE(l.residence && l.nationality);
    }
  }

  // Deterministic serialization.
  std::string a, b;
  for (const auto& l : labels) a += to_jsonl(l) + "\n";
  for (const auto& l : label_users(c, LabelingConfig{})) b += to_jsonl(l) + "\n";
  EXPECT_EQ(a, b);
}

TEST(LabelsFile, RoundTripAndStatusCheck) {
  mignet::testing::TempDir dir;
  auto labels = flows({{2, "IT", "DE"}, {1, "FR", "FR"}});
  std::string text;
  for (const auto& l : labels) text += to_jsonl(l) + "\n";
  auto back = read_labels(dir.write("labels.jsonl", text));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[2].status, Status::Native);
  auto bad = dir.write("bad.jsonl", R"({"user_id":"a","residence":"IT","nationality":"DE","status":"native"})");
  EXPECT_THROW(read_labels(bad), ValidationError);
}
