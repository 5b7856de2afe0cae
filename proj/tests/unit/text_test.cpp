#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include <topicprobe/error.hpp>
#include <topicprobe/random.hpp>
#include <topicprobe/text.hpp>

namespace {

using namespace topicprobe;

TEST(Tokenize, SplitsOnNonLetters) {
  EXPECT_EQ(tokenize("The little girl made a funny face."),
            (TokenList{"the", "little", "girl", "made", "a", "funny", "face"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("Model-based, 2nd try"), (TokenList{"model", "based", "nd", "try"}));
  EXPECT_TRUE(tokenize("123 -- 4.5").empty());
}

TEST(Lemmatizer, TableExamples) {
  const auto& lem = Lemmatizer::english();
  EXPECT_EQ(lem("blowing"), "blow");
  EXPECT_EQ(lem("trumpet"), "trumpet");
  EXPECT_EQ(lem("made"), "make");
  EXPECT_EQ(lem("went"), "go");
  EXPECT_EQ(lem("children"), "child");
}

TEST(Lemmatizer, SuffixRules) {
  const auto& lem = Lemmatizer::english();
  EXPECT_EQ(lem("stories"), "story");
  EXPECT_EQ(lem("boxes"), "box");
  EXPECT_EQ(lem("churches"), "church");
  EXPECT_EQ(lem("classes"), "class");
  EXPECT_EQ(lem("cats"), "cat");
  EXPECT_EQ(lem("glass"), "glass");
  EXPECT_EQ(lem("kicked"), "kick");
  EXPECT_EQ(lem("stopped"), "stop");
  EXPECT_EQ(lem("running"), "run");
  EXPECT_EQ(lem("hoping"), "hope");
  EXPECT_EQ(lem("bus"), "bus");
  EXPECT_EQ(lem("is"), "be");
}

TEST(Lemmatizer, IdempotentOnFuzzSet) {
  const auto& lem = Lemmatizer::english();
  Rng rng(2024);
  const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  const char* suffixes[] = {"", "s", "es", "ies", "ed", "ing", "ss", "sses", "ied", "led", "ting", "us", "is"};
  for (int i = 0; i < 10000; ++i) {
    std::string t;
    const auto len = 1 + rng.below(9);
    for (std::uint64_t k = 0; k < len; ++k) t += letters[rng.below(26)];
    t += suffixes[rng.below(std::size(suffixes))];
    const std::string once = lem(t);
    ASSERT_EQ(lem(once), once) << "token " << t;
  }
}

TEST(Lemmatizer, TableValidation) {
  EXPECT_NO_THROW(Lemmatizer::from_tsv("# comment\nwent\tgo\n"));
  EXPECT_THROW(Lemmatizer::from_tsv("a\tb\nb\tc\n"), ValidationError);  // lemma not a fixed point
  EXPECT_THROW(Lemmatizer::from_tsv("onlyone\n"), ValidationError);
  EXPECT_GT(Lemmatizer::english().table_size(), 100u);
}

TEST(Bigrams, ScoreFormula) {
  EXPECT_NEAR(bigram_score(50, 55, 55, 1000), (50.0 - 5.0) * 1000.0 / (55.0 * 55.0), 1e-12);
  EXPECT_NEAR(bigram_score(50, 55, 55, 1000), 14.876, 1e-3);
  EXPECT_LT(bigram_score(4, 4, 4, 1000), 0.0);
}

TEST(Bigrams, MergesStrongPairInCorpus) {
  // "new york" together 50 times, each word 55 times, 1000 distinct words.
  Corpus corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back({"new", "york"});
  for (int i = 0; i < 5; ++i) corpus.push_back({"new", "x" + std::to_string(i)});
  for (int i = 0; i < 5; ++i) corpus.push_back({"y" + std::to_string(i), "york"});
  for (int i = 0; i < 988; ++i) corpus.push_back({"filler" + std::to_string(i)});
  const Corpus out = detect_bigrams(corpus);
  EXPECT_EQ(out[0], (TokenList{"new_york"}));
  EXPECT_EQ(out[50], (TokenList{"new", "x0"}));
  EXPECT_EQ(out[60], (TokenList{"filler0"}));
}

TEST(Bigrams, RarePairsAndSingletonDocsUntouched) {
  Corpus corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back({"rare", "pair"});
  EXPECT_EQ(detect_bigrams(corpus), corpus);
  Corpus singles{{"a"}, {"b"}, {"a"}};
  EXPECT_EQ(detect_bigrams(singles), singles);
}

TEST(Bigrams, GreedyLeftToRight) {
  // a b c with both (a,b) and (b,c) strong: the left pair wins.
  Corpus corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back({"a", "b", "c"});
  for (int i = 0; i < 800; ++i) corpus.push_back({"w" + std::to_string(i)});
  const Corpus out = detect_bigrams(corpus);
  EXPECT_EQ(out[0], (TokenList{"a_b", "c"}));
}

TEST(Dictionary, DocumentFrequencies) {
  const auto d = Dictionary::build({{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.num_docs(), 2u);
  EXPECT_EQ(d.doc_freq("a"), 1u);
  EXPECT_EQ(d.doc_freq("b"), 2u);
  EXPECT_EQ(d.doc_freq("c"), 1u);
  EXPECT_EQ(d.id_of("a"), 0);
  EXPECT_EQ(d.id_of("zzz"), -1);
  EXPECT_EQ(Dictionary::build({}).size(), 0u);
  EXPECT_EQ(Dictionary::build({{"a", "a", "a"}}).doc_freq("a"), 1u);
}

TEST(Tfidf, HandComputedExamples) {
  const auto d = Dictionary::build({{"a", "b"}, {"b", "c"}});
  const auto v = tfidf_transform({"a", "b"}, d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].term, static_cast<std::size_t>(d.id_of("a")));
  EXPECT_DOUBLE_EQ(v[0].weight, 1.0);
  const auto aa = tfidf_transform({"a", "a"}, d);
  ASSERT_EQ(aa.size(), 1u);
  EXPECT_DOUBLE_EQ(aa[0].weight, 1.0);
  EXPECT_TRUE(tfidf_transform({"b"}, d).empty());
  EXPECT_TRUE(tfidf_transform({"unknown"}, d).empty());
}

TEST(Tfidf, UnitNormAndSortedOnRandomCorpus) {
  Rng rng(5);
  Corpus corpus;
  for (int i = 0; i < 300; ++i) {
    TokenList doc;
    const auto len = rng.below(12);
    for (std::uint64_t k = 0; k < len; ++k) doc.push_back("w" + std::to_string(rng.below(60)));
    corpus.push_back(doc);
  }
  const auto dict = Dictionary::build(corpus);
  for (const auto& doc : corpus) {
    const auto v = tfidf_transform(doc, dict);
    double ss = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_GT(v[i].weight, 0.0);
      if (i > 0) {
        EXPECT_LT(v[i - 1].term, v[i].term);
      }
      ss += v[i].weight * v[i].weight;
    }
    if (!v.empty()) {
      EXPECT_NEAR(std::sqrt(ss), 1.0, 1e-12);
    }
  }
}

TEST(PrepareCorpus, DeterministicPipeline) {
  std::vector<std::string> texts;
  for (int i = 0; i < 60; ++i) {
    texts.push_back("He kicked the bucket while blowing the trumpet " + std::string(i % 2 ? "loudly" : "softly"));
  }
  const auto a = prepare_corpus(texts);
  const auto b = prepare_corpus(texts);
  ASSERT_EQ(a.dictionary.size(), b.dictionary.size());
  for (std::size_t i = 0; i < a.dictionary.size(); ++i) EXPECT_EQ(a.dictionary.term(i), b.dictionary.term(i));
  ASSERT_EQ(a.tfidf.size(), texts.size());
  for (std::size_t i = 0; i < a.tfidf.size(); ++i) {
    ASSERT_EQ(a.tfidf[i].size(), b.tfidf[i].size());
    for (std::size_t k = 0; k < a.tfidf[i].size(); ++k) EXPECT_EQ(a.tfidf[i][k].weight, b.tfidf[i][k].weight);
  }
  // Surface forms are lemmatized away before the dictionary is built.
  EXPECT_EQ(a.dictionary.id_of("kicked"), -1);
  EXPECT_EQ(a.dictionary.id_of("blowing"), -1);
}

}  // namespace
