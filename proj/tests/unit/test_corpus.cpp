#include <gtest/gtest.h>

#include <random>

#include "gecforge/corpus.hpp"
#include "gecforge/errors.hpp"
#include "test_util.hpp"

using namespace gecforge;
using namespace gecforge::corpus;
using align::Edit;
using align::EditSet;
using align::Granularity;

TEST(ParallelTsv, SingleLine) {
  const auto c = parse_corpus("s1\t他今天去了学校\t他今天去学校\n", CorpusFormat::ParallelTSV);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].id, "s1");
  EXPECT_EQ(c[0].source, "他今天去了学校");
  EXPECT_EQ(c[0].references, std::vector<std::string>{"他今天去学校"});
  EXPECT_FALSE(c[0].gold_edits.has_value());
}

TEST(ParallelTsv, EmptyFileAndBlankLines) {
  EXPECT_TRUE(parse_corpus("", CorpusFormat::ParallelTSV).empty());
  EXPECT_TRUE(parse_corpus("", CorpusFormat::M2).empty());
  EXPECT_TRUE(parse_corpus("", CorpusFormat::JsonLines).empty());
  EXPECT_EQ(parse_corpus("a\tb\n\n\nc\td\n", CorpusFormat::ParallelTSV).size(), 2u);
}

TEST(ParallelTsv, SequentialIdsAndNormalization) {
  const auto c = parse_corpus("\t  x  y \tz\n\tsrc\n", CorpusFormat::ParallelTSV);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id, "s1");
  EXPECT_EQ(c[0].source, "x y");
  EXPECT_EQ(c[1].id, "s2");
  EXPECT_TRUE(c[1].references.empty());
}

TEST(ParallelTsv, Errors) {
  try {
    parse_corpus("ok\tfine\nonlyone\n", CorpusFormat::ParallelTSV);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.text(), "onlyone");
  }
  EXPECT_THROW(parse_corpus("a\tx\na\ty\n", CorpusFormat::ParallelTSV), DuplicateIdError);
  EXPECT_THROW(parse_corpus("a\t \n", CorpusFormat::ParallelTSV), ParseError);
  EXPECT_THROW(parse_corpus(std::string("a\t\xff\n"), CorpusFormat::ParallelTSV), ParseError);
}

TEST(ParallelTsv, WriterRejectsDelimiterInField) {
  CorrectionSample s{"s1", "a\tb", {"c"}, std::nullopt};
  EXPECT_THROW(format_corpus({s}, CorpusFormat::ParallelTSV), FormatError);
}

TEST(ParallelTsv, OneSampleIsOneLine) {
  CorrectionSample s{"s1", "他去了", {"他去"}, std::nullopt};
  EXPECT_EQ(format_corpus({s}, CorpusFormat::ParallelTSV), "s1\t他去了\t他去\n");
}

TEST(M2, SingleEditBlock) {
  const auto c = parse_corpus("S a b c\nA 1 2|||word|||x|||REQUIRED|||-NONE-|||0\n\n", CorpusFormat::M2);
  ASSERT_EQ(c.size(), 1u);
  ASSERT_TRUE(c[0].gold_edits);
  ASSERT_EQ(c[0].gold_edits->size(), 1u);
  const EditSet& g = (*c[0].gold_edits)[0];
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.edits[0], (Edit{1, 2, {"x"}}));
  EXPECT_EQ(g.granularity, Granularity::word());
  // Cross-check: applying the parsed edit reproduces the reconstructed reference.
  const auto target = align::apply_edits(align::tokenize(c[0].source, g.granularity), g);
  EXPECT_EQ(align::detokenize(target, g.granularity), c[0].references[0]);
  EXPECT_EQ(c[0].references[0], "a x c");
}

TEST(M2, NoopAndMissingAnnotator) {
  const std::string m2 =
      "# granularity=char\n"
      "S 他 去 了\n"
      "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
      "A 2 3|||Delete|||-NONE-|||REQUIRED|||-NONE-|||1\n\n";
  const auto c = parse_corpus(m2, CorpusFormat::M2);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].source, "他去了");
  EXPECT_EQ(c[0].references, (std::vector<std::string>{"他去了", "他去"}));
}

TEST(M2, CharacterEscapes) {
  CorrectionSample s{"x", "a b\\c", {"ab\\c"}, std::nullopt};
  const std::string text = format_corpus({s}, CorpusFormat::M2, {Granularity::character()});
  EXPECT_NE(text.find("S a \\s b \\\\ c"), std::string::npos);
  const auto back = parse_corpus(text, CorpusFormat::M2);
  EXPECT_EQ(back[0].source, s.source);
  EXPECT_EQ(back[0].references, s.references);
}

TEST(M2, Errors) {
  EXPECT_THROW(parse_corpus("S a b\nA 1 5|||x|||y|||REQUIRED|||-NONE-|||0\n", CorpusFormat::M2), ParseError);
  EXPECT_THROW(parse_corpus("S a b\r\n", CorpusFormat::M2), ParseError);
  EXPECT_THROW(parse_corpus("A 0 1|||x|||y|||REQUIRED|||-NONE-|||0\n", CorpusFormat::M2), ParseError);
  EXPECT_THROW(parse_corpus("S a b\nA 0 1|||x\n", CorpusFormat::M2), ParseError);
  EXPECT_THROW(parse_corpus("garbage\n", CorpusFormat::M2), ParseError);
}

TEST(M2, TwoReferencesUseAnnotatorIds) {
  CorrectionSample s{"s1", "他去了学校", {"他去学校", "他去了学校。"}, std::nullopt};
  const std::string text = format_corpus({s}, CorpusFormat::M2, {Granularity::character()});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);  // header, id, S, two A lines, blank
  EXPECT_NE(text.find("|||0\n"), std::string::npos);
  EXPECT_NE(text.find("|||1\n"), std::string::npos);
  const auto back = parse_corpus(text, CorpusFormat::M2);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].id, "s1");
  EXPECT_EQ(back[0].references, s.references);
}

TEST(JsonLines, FieldsAndErrors) {
  const auto c = parse_corpus(R"({"id":"a","source":"x  y","references":["xy"]})"
                              "\n"
                              R"({"source":"q","references":[]})"
                              "\n",
                              CorpusFormat::JsonLines);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].source, "x y");
  EXPECT_EQ(c[1].id, "s2");
  EXPECT_THROW(parse_corpus(R"({"id":"a","references":[]})", CorpusFormat::JsonLines), ParseError);
  EXPECT_THROW(parse_corpus("{not json", CorpusFormat::JsonLines), ParseError);
  EXPECT_THROW(parse_corpus(R"({"id":"a","source":"x","references":["y"],"gold_edits":[]})", CorpusFormat::JsonLines),
               ParseError);
}

namespace {

std::vector<CorrectionSample> random_corpus(std::mt19937& rng, bool with_gold, const Granularity& g) {
  const std::vector<std::string> chars = {"他", "去", "了", "学", "校", "a", "b", "。", "的"};
  std::uniform_int_distribution<int> len(1, 8), nref(0, 3), pick(0, static_cast<int>(chars.size()) - 1);
  auto sentence = [&] {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      if (!g.is_character() && i > 0) s += ' ';
      s += chars[pick(rng)];
    }
    return s;
  };
  std::vector<CorrectionSample> out;
  for (int i = 0; i < 40; ++i) {
    CorrectionSample s{"id" + std::to_string(i), sentence(), {}, std::nullopt};
    const int k = nref(rng);
    for (int r = 0; r < k; ++r) s.references.push_back(sentence());
    if (with_gold) s.gold_edits = gold_edit_sets(s, g);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST(RoundTrip, AllFormats) {
  std::mt19937 rng(3);
  testutil::TempDir dir;
  for (const auto& g : {Granularity::character(), Granularity::word()}) {
    const auto plain = random_corpus(rng, false, g);
    write_corpus(plain, dir / "c.tsv", CorpusFormat::ParallelTSV);
    EXPECT_EQ(load_corpus(dir / "c.tsv", CorpusFormat::ParallelTSV), plain);

    const auto gold = random_corpus(rng, true, g);
    write_corpus(gold, dir / "c.jsonl", CorpusFormat::JsonLines);
    EXPECT_EQ(load_corpus(dir / "c.jsonl", CorpusFormat::JsonLines), gold);
    write_corpus(gold, dir / "c.m2", CorpusFormat::M2, {g});
    EXPECT_EQ(load_corpus(dir / "c.m2", CorpusFormat::M2), gold);
  }
}

TEST(Io, UnwritablePathIsIoError) {
  EXPECT_THROW(write_corpus({}, "/proc/definitely/not/here.tsv", CorpusFormat::ParallelTSV), IoError);
  EXPECT_THROW(load_corpus("/nonexistent/file.tsv", CorpusFormat::ParallelTSV), IoError);
}

TEST(Formats, ByExtension) {
  EXPECT_EQ(format_from_path("x.tsv"), CorpusFormat::ParallelTSV);
  EXPECT_EQ(format_from_path("x.m2"), CorpusFormat::M2);
  EXPECT_EQ(format_from_path("x.jsonl"), CorpusFormat::JsonLines);
  EXPECT_THROW(format_from_path("x.txt"), ConfigError);
  EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(Predictions, Layouts) {
  const std::vector<CorrectionSample> corpus = {{"a", "x", {"y"}, std::nullopt}, {"b", "p", {"q"}, std::nullopt}};
  const auto lines = parse_predictions("y\nq\n", "lines", corpus);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1], (Prediction{"b", "q"}));
  EXPECT_THROW(parse_predictions("y\n", "lines", corpus), ParseError);
  EXPECT_THROW(parse_predictions("", "lines", corpus), ParseError);
  EXPECT_EQ(parse_predictions("b\tq\n", "tsv", corpus), (std::vector<Prediction>{{"b", "q"}}));
  EXPECT_EQ(parse_predictions(R"({"id":"a","hypothesis":"y"})", "jsonl", corpus),
            (std::vector<Prediction>{{"a", "y"}}));
}

TEST(GoldEdits, StoredSetsWinWhenGranularityMatches) {
  CorrectionSample s{"a", "ab", {"ac"}, std::nullopt};
  const auto derived = gold_edit_sets(s, Granularity::character());
  ASSERT_EQ(derived.size(), 1u);
  EXPECT_EQ(derived[0].edits[0], (Edit{1, 2, {"c"}}));
  s.gold_edits = std::vector<EditSet>{{{}, 1, Granularity::word()}};
  EXPECT_EQ(gold_edit_sets(s, Granularity::word())[0].size(), 0u);
  EXPECT_EQ(gold_edit_sets(s, Granularity::character())[0].size(), 1u);  // re-aligned
}

TEST(Validate, Invariants) {
  EXPECT_THROW(validate_sample({"", "x", {}, std::nullopt}), InvariantError);
  EXPECT_THROW(validate_sample({"a", "", {}, std::nullopt}), InvariantError);
  EXPECT_THROW(validate_sample({"a", "x", {"y"}, std::vector<EditSet>{}}), InvariantError);
}
