#include <gtest/gtest.h>

#include <chrono>

#include "mignet/corpus.hpp"
#include "mignet/rng.hpp"
#include "test_util.hpp"

using namespace mignet;
using mignet::testing::make_tweet;
using mignet::testing::make_user;
using mignet::testing::TempDir;

namespace {

std::string user_line(const std::string& id, int followers = 10) {
  return R"({"user_id":")" + id + R"(","created_at":"2016-03-01","followers_count":)" + std::to_string(followers) +
         R"(,"friends_count":5,"statuses_count":100,"verified":false})";
}

Corpus corpus_of(std::vector<Tweet> tweets, std::vector<FollowEdge> edges = {}, std::vector<std::string> users = {}) {
  Corpus c;
  for (const auto& u : users) c.users.upsert(make_user(u));
  c.tweets = TweetStore::from_tweets(std::move(tweets));
  c.edges = EdgeList::from_edges(std::move(edges));
  return c;
}

}  // namespace

TEST(IngestUsers, ThreeValidLines) {
  TempDir dir;
  auto path = dir.write("users.jsonl", user_line("a") + "\n" + user_line("b") + "\n" + user_line("c") + "\n");
  auto got = ingest_users(path);
  EXPECT_EQ(got.store.size(), 3u);
  EXPECT_EQ(got.diagnostics.skipped, 0u);
}

TEST(IngestUsers, MalformedLineSkippedAndCounted) {
  TempDir dir;
  auto path = dir.write("users.jsonl", user_line("a") + "\n{not json\n" + user_line("b") + "\n");
  auto got = ingest_users(path);
  EXPECT_EQ(got.store.size(), 2u);
  EXPECT_EQ(got.diagnostics.skipped, 1u);
  ASSERT_EQ(got.diagnostics.examples.size(), 1u);
  EXPECT_NE(got.diagnostics.examples[0].find("line 2"), std::string::npos);
}

TEST(IngestUsers, NegativeCountIsMalformed) {
  TempDir dir;
  auto path = dir.write("users.jsonl", user_line("a") + "\n" + user_line("b", -3) + "\n");
  auto got = ingest_users(path);
  EXPECT_EQ(got.store.size(), 1u);
  EXPECT_EQ(got.diagnostics.skipped, 1u);
}

TEST(IngestUsers, DuplicateIdLastWins) {
  TempDir dir;
  auto path = dir.write("users.jsonl", user_line("a", 1) + "\n" + user_line("a", 99) + "\n");
  auto got = ingest_users(path);
  ASSERT_EQ(got.store.size(), 1u);
  EXPECT_EQ(got.store.find("a")->followers_count, 99u);
  EXPECT_EQ(got.diagnostics.duplicates, 1u);
}

TEST(IngestUsers, EmptyFileIsEmptyStoreError) {
  TempDir dir;
  auto path = dir.write("users.jsonl", "");
  EXPECT_THROW(ingest_users(path), EmptyInputError);
}

TEST(IngestUsers, UnreadablePathIsIoError) {
  EXPECT_THROW(ingest_users("/nonexistent/users.jsonl"), IoError);
}

TEST(IngestUsers, GzipVariant) {
  TempDir dir;
  auto path = dir.write_gz("users.jsonl.gz", user_line("a") + "\n" + user_line("b") + "\n");
  EXPECT_EQ(ingest_users(path).store.size(), 2u);
}

TEST(IngestUsers, Idempotent) {
  TempDir dir;
  auto path = dir.write("users.jsonl", user_line("b") + "\n" + user_line("a") + "\nbad\n" + user_line("b", 4) + "\n");
  EXPECT_TRUE(ingest_users(path).store == ingest_users(path).store);
}

TEST(IngestEdges, SelfLoopsAndDuplicatesDropped) {
  TempDir dir;
  auto path = dir.write("edges.jsonl", R"({"src":"A","dst":"B"})"
                                       "\n"
                                       R"({"src":"B","dst":"A"})"
                                       "\n"
                                       R"({"src":"A","dst":"A"})"
                                       "\n"
                                       R"({"src":"A","dst":"B"})"
                                       "\n");
  auto got = ingest_edges(path);
  ASSERT_EQ(got.store.size(), 2u);
  EXPECT_EQ(got.store[0], (FollowEdge{"A", "B"}));
  EXPECT_EQ(got.store[1], (FollowEdge{"B", "A"}));
  EXPECT_EQ(got.diagnostics.self_loops, 1u);
  EXPECT_EQ(got.diagnostics.duplicates, 1u);
}

TEST(IngestEdges, CsvWithHeaderAndGzip) {
  TempDir dir;
  auto path = dir.write_gz("edges.csv.gz", "src,dst\nA,B\nB,C\nC,C\n");
  auto got = ingest_edges(path);
  EXPECT_EQ(got.store.size(), 2u);
  EXPECT_EQ(got.diagnostics.self_loops, 1u);
}

TEST(IngestEdges, CsvWithoutHeaderRejected) {
  TempDir dir;
  auto path = dir.write("edges.csv", "A,B\n");
  EXPECT_THROW(ingest_edges(path), ValidationError);
}

TEST(IngestEdges, EmptyFile) {
  TempDir dir;
  EXPECT_THROW(ingest_edges(dir.write("edges.jsonl", "\n")), EmptyInputError);
}

TEST(IngestTweets, HashtagsNormalized) {
  TempDir dir;
  auto path = dir.write("tweets.jsonl",
                        R"({"tweet_id":"1","user_id":"u","timestamp":"2018-01-01T10:00:00Z","country":"it",)"
                        R"("language":"it","hashtags":["#Love","ART"]})"
                        "\n");
  auto got = ingest_tweets(path);
  Corpus c;
  c.tweets = std::move(got.store);
  auto usage = hashtag_usage("u", c);
  EXPECT_EQ(usage, (HashtagCounts{{"art", 1}, {"love", 1}}));
  auto tweets = c.tweets.tweets_of("u");
  ASSERT_EQ(tweets.size(), 1u);
  EXPECT_EQ(tweets[0].country->str(), "IT");
}

TEST(IngestTweets, UnicodeHashtagLowercased) {
  auto t = parse_tweet(R"({"tweet_id":"1","user_id":"u","timestamp":0,"hashtags":["#ÉTÉ","Москва"]})");
  ASSERT_TRUE(t);
  EXPECT_EQ(t->hashtags, (std::vector<std::string>{"été", "москва"}));
}

TEST(IngestTweets, SchemaViolationsSkipped) {
  TempDir dir;
  auto path = dir.write(
      "tweets.jsonl",
      R"({"tweet_id":"1","user_id":"u","timestamp":"2018-01-01T10:00:00Z","country":"XX"})"
      "\n"
      R"({"tweet_id":"2","user_id":"u","timestamp":"2018-01-01T10:00:00Z","hashtags":["two words"]})"
      "\n"
      R"({"tweet_id":"3","user_id":"u","timestamp":"yesterday"})"
      "\n"
      R"({"tweet_id":"4","user_id":"u","timestamp":"2018-01-01T10:00:00Z","country":null,"language":null})"
      "\n");
  auto got = ingest_tweets(path);
  EXPECT_EQ(got.store.size(), 1u);
  EXPECT_EQ(got.diagnostics.skipped, 3u);
}

TEST(IngestTweets, EmptyFile) {
  TempDir dir;
  EXPECT_THROW(ingest_tweets(dir.write("tweets.jsonl", "")), EmptyInputError);
}

TEST(RecentTweetFeatures, DistinctCounts) {
  auto c = corpus_of({make_tweet("1", "u", "2018-01-01", "IT", "it"), make_tweet("2", "u", "2018-01-02", "IT", "fr"),
                      make_tweet("3", "u", "2018-01-03", "FR", "fr")});
  EXPECT_EQ(recent_tweet_features("u", c), (LocationLanguageCounts{2, 2, false}));
}

TEST(RecentTweetFeatures, UserWithoutTweets) {
  auto c = corpus_of({make_tweet("1", "v", "2018-01-01", "IT", "it")}, {}, {"u"});
  EXPECT_EQ(recent_tweet_features("u", c), (LocationLanguageCounts{0, 0, false}));
}

TEST(RecentTweetFeatures, UnknownUserNotFound) {
  auto c = corpus_of({make_tweet("1", "v", "2018-01-01", "IT", "it")});
  EXPECT_THROW(recent_tweet_features("nobody", c), NotFoundError);
}

TEST(RecentTweetFeatures, RecencyWindow) {
  std::vector<Tweet> tweets;
  const Date base = *parse_date("2017-01-01");
  for (int i = 0; i < 300; ++i) {
    Date d = base + std::chrono::days(i);
    const char* country = i < 100 ? "DE" : "IT";
    tweets.push_back(make_tweet("t" + std::to_string(1000 + i), "u", format_date(d), country, "it"));
  }
  auto c = corpus_of(std::move(tweets));
  EXPECT_EQ(recent_tweet_features("u", c, 200).n_countries, 1u);
  EXPECT_EQ(recent_tweet_features("u", c, 201).n_countries, 2u);
}

TEST(RecentTweetFeatures, TiesBrokenByTweetId) {
  // Same timestamp: "a" sorts before "b", so k=1 sees the DE tweet.
  auto c = corpus_of({make_tweet("b", "u", "2018-01-01", "IT"), make_tweet("a", "u", "2018-01-01", "DE")});
  auto tweets = c.tweets.tweets_of("u");
  EXPECT_EQ(tweets[0].tweet_id, "a");
  EXPECT_EQ(recent_tweet_features("u", c, 1).n_countries, 1u);
}

TEST(RecentTweetFeatures, DateRangeFilter) {
  auto c = corpus_of({make_tweet("1", "u", "2017-05-01", "DE"), make_tweet("2", "u", "2018-05-01", "IT")});
  DateRange only2017{parse_date("2017-01-01"), parse_date("2017-12-31")};
  auto got = recent_tweet_features("u", c, 200, only2017);
  EXPECT_EQ(got.n_countries, 1u);
  EXPECT_EQ(got.n_languages, 0u);
}

TEST(RecentTweetFeatures, RejectsZeroWindow) {
  auto c = corpus_of({make_tweet("1", "u", "2018-01-01", "IT")});
  EXPECT_THROW(recent_tweet_features("u", c, 0), ValidationError);
}

TEST(RecentTweetFeatures, MonotoneInWindow) {
  Rng rng(5);
  const char* countries[] = {"IT", "DE", "FR", "ES"};
  const char* langs[] = {"it", "de", "fr", "es", "en"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Tweet> tweets;
    const int n = 1 + static_cast<int>(rng.below(60));
    for (int i = 0; i < n; ++i) {
      Date d = *parse_date("2018-01-01") + std::chrono::days(rng.below(365));
      const char* c = rng.bernoulli(0.3) ? nullptr : countries[rng.below(4)];
      const char* l = rng.bernoulli(0.3) ? nullptr : langs[rng.below(5)];
      tweets.push_back(make_tweet("t" + std::to_string(i), "u", format_date(d), c, l));
    }
    auto corpus = corpus_of(std::move(tweets));
    LocationLanguageCounts prev{0, 0, false};
    for (std::size_t k = 1; k <= 70; ++k) {
      auto cur = recent_tweet_features("u", corpus, k);
      EXPECT_GE(cur.n_countries, prev.n_countries);
      EXPECT_GE(cur.n_languages, prev.n_languages);
      prev = cur;
    }
  }
}

TEST(FriendFeatures, SetUnionOverFriends) {
  auto c = corpus_of({make_tweet("1", "f1", "2018-01-01", "IT", "it"), make_tweet("2", "f2", "2018-01-01", "IT", "it"),
                      make_tweet("3", "f2", "2018-01-02", "FR", "fr")},
                     {{"u", "f1"}, {"u", "f2"}}, {"u"});
  auto got = friend_features("u", c);
  EXPECT_EQ(got.n_countries, 2u);
  EXPECT_EQ(got.n_languages, 2u);
  EXPECT_FALSE(got.no_friends);
}

TEST(FriendFeatures, NoFriends) {
  auto c = corpus_of({make_tweet("1", "f1", "2018-01-01", "IT", "it")}, {{"f1", "u"}}, {"u"});
  auto got = friend_features("u", c);
  EXPECT_EQ(got, (LocationLanguageCounts{0, 0, true}));
}

TEST(FriendFeatures, NonGeoFriendContributesNothing) {
  auto base = corpus_of({make_tweet("1", "f1", "2018-01-01", "IT", "it"), make_tweet("2", "f2", "2018-01-01")},
                        {{"u", "f1"}}, {"u"});
  auto with = corpus_of({make_tweet("1", "f1", "2018-01-01", "IT", "it"), make_tweet("2", "f2", "2018-01-01")},
                        {{"u", "f1"}, {"u", "f2"}}, {"u"});
  EXPECT_EQ(friend_features("u", base), friend_features("u", with));
}

TEST(AccountAge, CalendarArithmetic) {
  EXPECT_EQ(account_age_days(make_user("a", "2017-01-01"), *parse_date("2018-01-01")), 365);
  EXPECT_EQ(account_age_days(make_user("a", "2018-01-01"), *parse_date("2018-01-01")), 0);
  // Oracle: 2016 is a leap year, so 366 + 365.
  EXPECT_EQ(account_age_days(make_user("a", "2016-01-01"), *parse_date("2018-01-01")), 366 + 365);
  EXPECT_EQ(account_age_days(make_user("a", "2018-12-30")), 1);
}

TEST(AccountAge, CreatedAfterReference) {
  EXPECT_THROW(account_age_days(make_user("a", "2019-01-01"), *parse_date("2018-01-01")), ValidationError);
}

TEST(HashtagUsage, Multiset) {
  auto c = corpus_of({make_tweet("1", "u", "2018-01-01", nullptr, nullptr, {"love"}),
                      make_tweet("2", "u", "2018-01-02", nullptr, nullptr, {"love", "art"})});
  EXPECT_EQ(hashtag_usage("u", c), (HashtagCounts{{"art", 1}, {"love", 2}}));
}

TEST(HashtagUsage, NoHashtags) {
  auto c = corpus_of({make_tweet("1", "u", "2018-01-01")});
  EXPECT_TRUE(hashtag_usage("u", c).empty());
}

TEST(HashtagUsage, CaseFolding) {
  auto a = parse_tweet(R"({"tweet_id":"1","user_id":"u","timestamp":0,"hashtags":["#TBT"]})");
  auto b = parse_tweet(R"({"tweet_id":"2","user_id":"u","timestamp":1,"hashtags":["#tbt"]})");
  auto c = corpus_of({*a, *b});
  EXPECT_EQ(hashtag_usage("u", c), (HashtagCounts{{"tbt", 2}}));
}

TEST(HashtagUsage, TotalMultiplicityMatchesTweetLists) {
  Rng rng(11);
  std::vector<Tweet> tweets;
  std::size_t expected = 0;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> tags;
    auto k = rng.below(4);
    for (std::uint64_t j = 0; j < k; ++j) tags.push_back("h" + std::to_string(rng.below(5)));
    expected += tags.size();
    tweets.push_back(make_tweet("t" + std::to_string(i), "u", "2018-02-01", nullptr, nullptr, tags));
  }
  auto c = corpus_of(std::move(tweets));
  std::size_t total = 0;
  for (const auto& [tag, n] : hashtag_usage("u", c)) total += n;
  EXPECT_EQ(total, expected);
}

TEST(TweetStore, DuplicateTweetIdLastWins) {
  std::size_t dups = 0;
  auto store = TweetStore::from_tweets(
      {make_tweet("1", "u", "2018-01-01", "IT"), make_tweet("1", "u", "2018-01-01", "DE")}, &dups);
  EXPECT_EQ(dups, 1u);
  ASSERT_EQ(store.size(), 1u);
  EXPECT_EQ(store.tweets_of("u")[0].country->str(), "DE");
}

TEST(Timestamps, ParseAndFormat) {
  auto t = parse_timestamp("2018-03-04T05:06:07Z");
  ASSERT_TRUE(t);
  EXPECT_EQ(format_timestamp(*t), "2018-03-04T05:06:07Z");
  EXPECT_EQ(parse_timestamp("1520139967"), t);
  EXPECT_FALSE(parse_timestamp("2018-02-30T00:00:00Z"));
  EXPECT_EQ(year_of(*t), 2018);
}
