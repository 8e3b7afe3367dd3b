#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "depsrl/conll.hpp"
#include "depsrl/embeddings.hpp"
#include "depsrl/vocab.hpp"
#include "support/corpus_gen.hpp"

using namespace depsrl;
using testutil::conll_text;
using testutil::RowSpec;

TEST(ConllRead, EmptyStreamGivesEmptyList) {
  std::istringstream in("");
  EXPECT_TRUE(read_conll2009(in).empty());
}

TEST(ConllRead, SingleSentenceWithOnePredicate) {
  auto text = conll_text({{
      {"Sequa", "sequa", "NNP", 0, "", {"A0"}},
      {"makes", "make", "VBZ", 1, "make.01", {""}},
      {"and", "and", "CC", 2, "", {""}},
      {"repairs", "repair", "NNS", 2, "", {""}},
      {"jet", "jet", "NN", 6, "", {""}},
      {"engines", "engine", "NNS", 4, "", {""}},
  }});
  auto sents = testutil::parse(text);
  ASSERT_EQ(sents.size(), 1u);
  const auto& s = sents[0];
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s.predicate_positions, (std::vector<std::size_t>{1}));
  EXPECT_EQ(s.tokens[1].pred_sense.value(), "make.01");
  EXPECT_EQ(s.tokens[1].pred_lemma(), "make");
  EXPECT_EQ(s.tokens[0].form, "Sequa");

  auto insts = extract_instances(s);
  ASSERT_EQ(insts.size(), 1u);
  EXPECT_EQ(insts[0].predicate_index, 1u);
  EXPECT_EQ(insts[0].gold_roles,
            (std::vector<std::string>{"A0", "_", "_", "_", "_", "_"}));
}

TEST(ConllRead, RoundTripIsByteIdentical) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    auto text = conll_text(testutil::random_corpus(rng));
    auto sents = testutil::parse(text);
    std::ostringstream out;
    write_conll2009(sents, out);
    EXPECT_EQ(out.str(), text);
  }
}

TEST(ConllRead, NormalizesTrailingWhitespace) {
  std::string text =
      "1\ta\t_\ta\t_\tNN\t_\t_\t0\t_\t_\t_\t_\t_\r\n"
      "\n";
  auto sents = testutil::parse(text);
  ASSERT_EQ(sents.size(), 1u);
  std::ostringstream out;
  write_conll2009(sents, out);
  EXPECT_EQ(out.str(), "1\ta\t_\ta\t_\tNN\t_\t_\t0\t_\t_\t_\t_\t_\n\n");
}

TEST(ConllRead, RaggedRowsReportLineNumber) {
  auto good = conll_text({{{"a", "a", "NN", 0, "p.01", {""}}}});
  // drop the APRED cell from a second row
  std::string text = good;
  text.insert(text.find("\n\n") + 1, "2\tb\t_\tb\t_\tNN\t_\t_\t1\t_\t_\t_\t_\t_\n");
  // splice the extra row INTO the sentence instead
  std::string broken =
      "1\ta\t_\ta\t_\tNN\t_\t_\t0\t_\t_\t_\tY\tp.01\t_\n"
      "2\tb\t_\tb\t_\tNN\t_\t_\t1\t_\t_\t_\t_\t_\n"
      "\n";
  std::istringstream in(broken);
  try {
    read_conll2009(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(ConllRead, FillpredPredInconsistencyRejected) {
  std::string text =
      "1\ta\t_\ta\t_\tNN\t_\t_\t0\t_\t_\t_\tY\t_\n"
      "\n";
  std::istringstream in(text);
  EXPECT_THROW(read_conll2009(in), DataError);

  std::string text2 =
      "1\ta\t_\ta\t_\tNN\t_\t_\t0\t_\t_\t_\t_\tp.01\n"
      "\n";
  std::istringstream in2(text2);
  EXPECT_THROW(read_conll2009(in2), DataError);
}

TEST(ConllRead, ApredColumnCountMustMatchPredicateCount) {
  // one predicate but two APRED columns
  std::string text =
      "1\ta\t_\ta\t_\tNN\t_\t_\t0\t_\t_\t_\tY\tp.01\t_\t_\n"
      "\n";
  std::istringstream in(text);
  EXPECT_THROW(read_conll2009(in), DataError);
}

TEST(ConllWrite, ZeroPredicatesEndsAtPredColumn) {
  auto sents = testutil::parse(conll_text({{{"a", "a", "NN", 0, "", {}}}}));
  std::ostringstream out;
  write_conll2009(sents, out);
  std::string line = out.str().substr(0, out.str().find('\n'));
  EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 13);  // 14 columns
}

TEST(ConllWrite, AllNullPredictionsEmitUnderscores) {
  auto sents = testutil::parse(conll_text({{
      {"a", "a", "NN", 0, "p.01", {""}},
      {"b", "b", "NN", 1, "", {""}},
  }}));
  std::ostringstream out;
  write_conll2009(sents, out);
  auto text = out.str();
  // every APRED cell is "_": final column of both rows
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    EXPECT_EQ(line.substr(line.rfind('\t') + 1), "_");
  }
}

TEST(ConllWrite, MissingPredictionCellRejected) {
  auto sents = testutil::parse(conll_text({{{"a", "a", "NN", 0, "p.01", {""}}}}));
  sents[0].tokens[0].apreds.clear();
  std::ostringstream out;
  EXPECT_THROW(write_conll2009(sents, out), DataError);
}

TEST(ExtractInstances, ZeroPredicatesGivesEmptyList) {
  auto sents = testutil::parse(conll_text({{{"a", "a", "NN", 0, "", {}}}}));
  EXPECT_TRUE(extract_instances(sents[0]).empty());
}

TEST(ExtractInstances, TwoPredicatesShareTokens) {
  auto sents = testutil::parse(conll_text({{
      {"a", "a", "NN", 0, "a.01", {"", "A1"}},
      {"b", "b", "VB", 1, "b.01", {"A0", ""}},
  }}));
  auto insts = extract_instances(sents[0]);
  ASSERT_EQ(insts.size(), 2u);
  EXPECT_EQ(insts[0].sentence, insts[1].sentence);
  EXPECT_EQ(insts[0].predicate_index, 0u);
  EXPECT_EQ(insts[1].predicate_index, 1u);
  EXPECT_EQ(insts[0].gold_roles, (std::vector<std::string>{"_", "A0"}));
  EXPECT_EQ(insts[1].gold_roles, (std::vector<std::string>{"A1", "_"}));
}

TEST(ExtractInstances, CorpusCountMatchesFillpredColumn) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    auto text = conll_text(testutil::random_corpus(rng));
    // oracle: count "Y" cells in column 13 of the raw text
    std::size_t fillpred_count = 0;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      std::size_t col = 12, pos = 0;
      for (std::size_t c = 0; c < col; ++c) pos = line.find('\t', pos) + 1;
      if (line.substr(pos, line.find('\t', pos) - pos) == "Y") ++fillpred_count;
    }
    auto sents = testutil::parse(text);
    EXPECT_EQ(extract_instances(sents).size(), fillpred_count);
  }
}

TEST(ExtractInstances, RoleCellsNeitherLostNorInvented) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    auto sents = testutil::parse(conll_text(testutil::random_corpus(rng)));
    std::multiset<std::string> from_cells, from_instances;
    for (std::size_t si = 0; si < sents.size(); ++si) {
      for (std::size_t j = 0; j < sents[si].predicate_positions.size(); ++j)
        for (std::size_t i = 0; i < sents[si].size(); ++i)
          if (sents[si].tokens[i].apreds[j])
            from_cells.insert(std::to_string(si) + "#" + std::to_string(j) + "#" +
                              std::to_string(i) + "#" + *sents[si].tokens[i].apreds[j]);
      auto insts = extract_instances(sents[si]);
      for (std::size_t j = 0; j < insts.size(); ++j)
        for (std::size_t i = 0; i < insts[j].gold_roles.size(); ++i)
          if (insts[j].gold_roles[i] != kNullRole)
            from_instances.insert(std::to_string(si) + "#" + std::to_string(j) + "#" +
                                  std::to_string(i) + "#" + insts[j].gold_roles[i]);
    }
    EXPECT_EQ(from_cells, from_instances);
  }
}

TEST(ExtractInstances, PredicateCanAlsoBeArgumentOfAnother) {
  auto sents = testutil::parse(conll_text({{
      {"buy", "buy", "VB", 0, "buy.01", {"", "A0"}},
      {"sell", "sell", "VB", 1, "sell.01", {"A1", ""}},
  }}));
  auto insts = extract_instances(sents[0]);
  EXPECT_EQ(insts[0].gold_roles[1], "A1");
  EXPECT_EQ(insts[1].gold_roles[0], "A0");
}

// --- Vocabulary ---

TEST(Vocab, SmallestRoleInventory) {
  auto sents = testutil::parse(conll_text({{
      {"Sequa", "sequa", "NNP", 0, "", {"A0"}},
      {"makes", "make", "VBZ", 1, "make.01", {""}},
  }}));
  auto v = build_vocab(sents, 1);
  EXPECT_EQ(v.roles.size(), 2u);  // NULL + A0
  EXPECT_EQ(v.role_id(kNullRole), 0);
  EXPECT_EQ(v.role_id("A0"), 1);
}

TEST(Vocab, WordFrequencyCounts) {
  auto sents = testutil::parse(conll_text({{
      {"the", "the", "DT", 0, "", {}},
      {"the", "the", "DT", 1, "", {}},
      {"the", "the", "DT", 2, "", {}},
      {"cat", "cat", "NN", 3, "", {}},
  }}));
  auto v = build_vocab(sents, 1);
  EXPECT_EQ(v.word_frequency(v.word_id("the")), 3u);
  EXPECT_EQ(v.word_frequency(v.word_id("cat")), 1u);
}

TEST(Vocab, RoleInventoryMatchesDistinctLabels) {
  std::mt19937_64 rng(404);
  auto corpus = testutil::random_corpus(rng, 10, 3, 6);
  auto text = conll_text(corpus);
  std::set<std::string> distinct;
  for (const auto& rows : corpus)
    for (const auto& r : rows)
      for (const auto& a : r.apreds)
        if (!a.empty()) distinct.insert(a);
  auto v = build_vocab(testutil::parse(text), 1);
  EXPECT_EQ(v.roles.size(), distinct.size() + 1);
}

TEST(Vocab, EmptyCorpusRejected) {
  EXPECT_THROW(build_vocab({}, 1), DataError);
}

TEST(Vocab, InfrequentLemmasFoldToUnk) {
  auto sents = testutil::parse(conll_text({
      {{"runs", "run", "VBZ", 0, "run.01", {""}}},
      {{"runs", "run", "VBZ", 0, "run.01", {""}}},
      {{"flies", "fly", "VBZ", 0, "fly.01", {""}}},
  }));
  auto v = build_vocab(sents, 2);
  EXPECT_NE(v.lemmas.find("run"), -1);
  EXPECT_EQ(v.lemmas.find("fly"), -1);
  EXPECT_EQ(v.lemma_id("fly"), Vocabulary::kUnkId);
}

TEST(Vocab, SerializationRoundTripsExactly) {
  std::mt19937_64 rng(505);
  auto v = build_vocab(testutil::parse(conll_text(testutil::random_corpus(rng, 8))), 2);
  std::stringstream buf;
  v.save(buf);
  auto v2 = Vocabulary::load(buf);
  EXPECT_EQ(v, v2);
  EXPECT_EQ(v2.word_id("w3"), v.word_id("w3"));
}

// --- Pretrained embeddings ---

TEST(Pretrained, UnkRowIsMeanOfAllVectors) {
  std::istringstream in("alpha 1 0\nbeta 0 1\n");
  auto t = load_pretrained<double>(in, 2);
  auto unk = t.unk_row();
  EXPECT_DOUBLE_EQ(t.table->at(unk, 0), 0.5);
  EXPECT_DOUBLE_EQ(t.table->at(unk, 1), 0.5);
}

TEST(Pretrained, ListedWordReturnsFileVector) {
  std::istringstream in("alpha 1 0\nbeta 0 1\n");
  auto t = load_pretrained<double>(in, 2);
  auto r = t.row_for("beta");
  EXPECT_DOUBLE_EQ(t.table->at(r, 0), 0.0);
  EXPECT_DOUBLE_EQ(t.table->at(r, 1), 1.0);
}

TEST(Pretrained, UnlistedWordFallsBackToUnkThenLowercase) {
  std::istringstream in("alpha 1 0\nbeta 0 1\n");
  auto t = load_pretrained<double>(in, 2);
  EXPECT_EQ(t.row_for("gamma"), t.unk_row());
  EXPECT_EQ(t.row_for("Alpha"), t.row_for("alpha"));
}

TEST(Pretrained, DimensionMismatchNamesLine) {
  std::istringstream in("alpha 1 0\nbeta 0 1 7\n");
  try {
    load_pretrained<double>(in, 2);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Pretrained, CountHeaderDetectedAndSkipped) {
  std::istringstream in("2 3\nalpha 1 0 0\nbeta 0 1 0\n");
  auto t = load_pretrained<double>(in, 0);
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.row_of.size(), 2u);
  EXPECT_EQ(t.row_of.count("2"), 0u);
}

TEST(Pretrained, TableIsFrozen) {
  std::istringstream in("alpha 1 0\n");
  auto t = load_pretrained<double>(in, 2);
  EXPECT_FALSE(t.table->requires_grad);
}

// --- word dropout ---

TEST(WordDropout, AlphaZeroIsIdentity) {
  auto sents = testutil::parse(conll_text({{{"a", "a", "NN", 0, "", {}}}}));
  auto v = build_vocab(sents, 1);
  std::mt19937_64 rng(1);
  std::vector<std::uint32_t> ids(100, v.word_id("a"));
  EXPECT_EQ(word_dropout(ids, v, 0.0, rng), ids);
}

TEST(WordDropout, EmpiricalRateMatchesFormula) {
  // fr("the") = 3 within one sentence
  auto sents = testutil::parse(conll_text({{
      {"the", "the", "DT", 0, "", {}},
      {"the", "the", "DT", 1, "", {}},
      {"the", "the", "DT", 2, "", {}},
  }}));
  auto v = build_vocab(sents, 1);
  std::mt19937_64 rng(99);
  const std::size_t n = 100000;
  std::vector<std::uint32_t> ids(n, v.word_id("the"));
  auto dropped = word_dropout(ids, v, 0.25, rng);
  std::size_t replaced = 0;
  for (auto id : dropped) replaced += id == Vocabulary::kUnkId;
  const double p = 0.25 / (3 + 0.25);  // 0.0769...
  const double sigma = std::sqrt(p * (1 - p) / n);
  EXPECT_NEAR(static_cast<double>(replaced) / n, p, 3 * sigma);
}
