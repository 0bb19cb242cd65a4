#include <gtest/gtest.h>

#include <algorithm>

#include "nora/nlu.hpp"
#include "support.hpp"

using namespace nora;
using namespace nora::nlu;

namespace {

const std::vector<IntentRule>& shipped(Language lang) {
  static const auto en = load_ruleset_file(fixtures::source_dir() / "rules/en.rules");
  static const auto zh = load_ruleset_file(fixtures::source_dir() / "rules/zh.rules");
  return lang == Language::EN ? en : zh;
}

IntentRule rule_of(const std::string& intent, std::vector<std::string> patterns, int priority = 0,
                   Language lang = Language::EN) {
  IntentRule r;
  r.id = intent;
  r.intent = intent;
  r.language = lang;
  r.priority = priority;
  for (const auto& p : patterns) r.patterns.push_back(compile_pattern(p));
  return r;
}

Utterance en(std::string s) { return Utterance{std::move(s), Language::EN, Source::Typed}; }
Utterance zh(std::string s) { return Utterance{std::move(s), Language::ZH, Source::Typed}; }

// Brute force over every assignment of token ranges to the pattern's
// elements: literals consume one equal token, slots one or more tokens.
// Keeps the assignment with the leftmost start, then the longest first
// slot, then the longest second slot, and so on.
struct Assignment {
  std::size_t start = 0;
  std::vector<std::pair<std::size_t, std::size_t>> slots;  // token ranges in pattern order
};

void enumerate(const Pattern& p, const std::vector<text::Token>& toks, std::size_t ei, std::size_t ti,
               Assignment& cur, std::vector<Assignment>& out) {
  if (ei == p.elements.size()) {
    out.push_back(cur);
    return;
  }
  const auto& el = p.elements[ei];
  if (el.kind == PatternElement::Kind::Literal) {
    if (ti < toks.size() && toks[ti].text == el.text) enumerate(p, toks, ei + 1, ti + 1, cur, out);
    return;
  }
  for (std::size_t e = ti + 1; e <= toks.size(); ++e) {
    cur.slots.emplace_back(ti, e);
    enumerate(p, toks, ei + 1, e, cur, out);
    cur.slots.pop_back();
  }
}

std::optional<Assignment> oracle_match(const Pattern& p, const std::vector<text::Token>& toks) {
  std::vector<Assignment> all;
  for (std::size_t s = 0; s < toks.size(); ++s) {
    Assignment a;
    a.start = s;
    enumerate(p, toks, 0, s, a, all);
  }
  if (all.empty()) return std::nullopt;
  return *std::min_element(all.begin(), all.end(), [](const Assignment& a, const Assignment& b) {
    if (a.start != b.start) return a.start < b.start;
    for (std::size_t i = 0; i < a.slots.size(); ++i) {
      const auto la = a.slots[i].second - a.slots[i].first;
      const auto lb = b.slots[i].second - b.slots[i].first;
      if (la != lb) return la > lb;
    }
    return false;
  });
}

// Mandarin numerals for 0..100, written out the conventional way.
std::string mandarin(int n) {
  static const char* digits[] = {"零", "一", "二", "三", "四", "五", "六", "七", "八", "九"};
  if (n == 100) return "一百";
  if (n < 10) return digits[n];
  std::string s = n / 10 == 1 ? "十" : std::string(digits[n / 10]) + "十";
  if (n % 10) s += digits[n % 10];
  return s;
}

}  // namespace

TEST(Classify, GratefulFamilyFromPaperSentence) {
  const auto f = classify(en("I am very grateful because of my parents"), shipped(Language::EN));
  EXPECT_EQ(f.intent, "grateful_family");
  ASSERT_EQ(f.slots.count("object"), 1u);
  EXPECT_EQ(f.slots.at("object"), "parents");
  EXPECT_DOUBLE_EQ(f.confidence, kTemplateConfidence);
}

TEST(Classify, LiteralYesIsAffirm) {
  const auto f = classify(en("yes"), shipped(Language::EN));
  EXPECT_EQ(f.intent, "affirm");
  EXPECT_TRUE(f.slots.empty());
  EXPECT_DOUBLE_EQ(f.confidence, 1.0);
  ASSERT_TRUE(f.matched_rule);
}

TEST(Classify, NoMatchIsFallback) {
  for (auto lang : {Language::EN, Language::ZH}) {
    const auto f = classify({"qwertyuiop", lang, Source::Typed}, shipped(lang));
    EXPECT_EQ(f.intent, "fallback");
    EXPECT_DOUBLE_EQ(f.confidence, 0.0);
    EXPECT_FALSE(f.matched_rule);
    EXPECT_TRUE(f.slots.empty());
  }
}

TEST(Classify, EmptyUtteranceRejected) {
  EXPECT_THROW(classify(en(""), shipped(Language::EN)), Error);
  EXPECT_THROW(classify(en(" \t\n"), shipped(Language::EN)), Error);
  try {
    classify(en("   "), shipped(Language::EN));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
  EXPECT_THROW(Utterance::make("  ", Language::EN), Error);
}

TEST(Classify, RuleForOtherLanguageRejected) {
  EXPECT_THROW(classify(zh("好的"), shipped(Language::EN)), Error);
}

TEST(Classify, MandarinCharacterMatching) {
  const auto& rules = shipped(Language::ZH);
  EXPECT_EQ(classify(zh("好的"), rules).intent, "affirm");
  EXPECT_EQ(classify(zh("不要"), rules).intent, "deny");
  EXPECT_EQ(classify(zh("今天有点不开心"), rules).intent, "mood_negative");
  const auto f = classify(zh("我很感谢我的父母"), rules);
  EXPECT_EQ(f.intent, "grateful_family");
  EXPECT_EQ(f.slots.at("object"), "父母");
}

TEST(Classify, SlotConstraintsRouteGratitude) {
  const auto& rules = shipped(Language::EN);
  EXPECT_EQ(classify(en("I'm thankful for my friends"), rules).intent, "grateful_friends");
  EXPECT_EQ(classify(en("grateful for my health"), rules).intent, "grateful_health");
  const auto g = classify(en("grateful for the sunshine"), rules);
  EXPECT_EQ(g.intent, "grateful_general");
  EXPECT_EQ(g.slots.at("object"), "sunshine");
}

TEST(Classify, TieGoesToEarlierRule) {
  const std::vector<IntentRule> rules = {rule_of("first", {"hello"}, 5), rule_of("second", {"hello"}, 5)};
  EXPECT_EQ(classify(en("hello there"), rules).intent, "first");
  const std::vector<IntentRule> swapped = {rules[1], rules[0]};
  EXPECT_EQ(classify(en("hello there"), swapped).intent, "second");
}

TEST(Classify, HigherPriorityWinsRegardlessOfOrder) {
  const std::vector<IntentRule> rules = {rule_of("low", {"hello"}, 1), rule_of("high", {"hello {x}"}, 9)};
  const auto f = classify(en("hello world"), rules);
  EXPECT_EQ(f.intent, "high");
  EXPECT_EQ(f.slots.at("x"), "world");
}

TEST(ExtractSlots, TemplateBindsRawPhraseAndNormalizesHead) {
  const auto r = rule_of("grateful_family", {"grateful because of {object}"});
  const auto u = en("I am very grateful because of my parents");
  const auto slots = extract_slots(u, r);
  ASSERT_EQ(slots.size(), 1u);
  const auto& b = slots.at("object");
  EXPECT_EQ(b.raw, "my parents");
  EXPECT_EQ(b.value, "parents");
  EXPECT_EQ(u.text.substr(b.begin, b.end - b.begin), b.raw);
}

TEST(ExtractSlots, ZeroPlaceholdersGiveEmptyMap) {
  EXPECT_TRUE(extract_slots(en("well yes indeed"), rule_of("affirm", {"yes"})).empty());
}

TEST(ExtractSlots, NoMatchIsAnError) {
  try {
    extract_slots(en("nothing here"), rule_of("affirm", {"yes"}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unprocessable);
  }
}

TEST(ExtractSlots, TwoPlaceholdersAgreeWithBruteForce) {
  const std::vector<std::string> vocab = {"go", "to", "and", "then", "eat", "with", "my", "rome", "pizza", "friends"};
  const std::vector<std::string> templates = {"go to {place} and eat {food}", "{who} to {place}",
                                              "eat {food} with {who}", "{a} and {b}", "to {a} then {b} with"};
  std::mt19937 rng(11);
  int matched = 0;
  for (int iter = 0; iter < 3000; ++iter) {
    const auto len = 1 + rng() % 9;
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += (i ? " " : "") + vocab[rng() % vocab.size()];
    const auto u = en(s);
    const auto toks = text::word_tokens(u.text);
    for (const auto& t : templates) {
      const auto rule = rule_of("t", {t});
      const auto want = oracle_match(rule.patterns[0], toks);
      if (!want) {
        EXPECT_THROW(extract_slots(u, rule), Error) << s << " / " << t;
        continue;
      }
      ++matched;
      const auto got = extract_slots(u, rule);
      std::vector<std::string> names;
      for (const auto& e : rule.patterns[0].elements) {
        if (e.kind == PatternElement::Kind::Slot) names.push_back(e.text);
      }
      ASSERT_EQ(got.size(), names.size());
      std::vector<std::pair<std::size_t, std::size_t>> spans;
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto [b, e] = want->slots[i];
        const auto raw = s.substr(toks[b].begin, toks[e - 1].end - toks[b].begin);
        EXPECT_EQ(got.at(names[i]).raw, raw) << s << " / " << t;
        spans.emplace_back(got.at(names[i]).begin, got.at(names[i]).end);
      }
      std::sort(spans.begin(), spans.end());
      for (std::size_t i = 1; i < spans.size(); ++i) EXPECT_LE(spans[i - 1].second, spans[i].first);
    }
  }
  EXPECT_GT(matched, 100);
}

TEST(ParseNumber, Examples) {
  EXPECT_DOUBLE_EQ(*parse_number(en("36.8 degrees")), 36.8);
  EXPECT_FALSE(parse_number(en("no idea")));
  EXPECT_DOUBLE_EQ(*parse_number(zh("三十七")), 37.0);
  EXPECT_DOUBLE_EQ(*parse_number(zh("三十六点五度")), 36.5);
  EXPECT_DOUBLE_EQ(*parse_number(zh("体温是37.5")), 37.5);
  EXPECT_DOUBLE_EQ(*parse_number(en("first 38 then 39")), 38.0);
  EXPECT_FALSE(parse_number(en("三十七")));  // Mandarin numerals are read for ZH only
}

TEST(ParseNumber, MandarinZeroToHundredOracle) {
  for (int n = 0; n <= 100; ++n) {
    const auto v = parse_number(zh(mandarin(n)));
    ASSERT_TRUE(v) << n;
    EXPECT_DOUBLE_EQ(*v, n) << mandarin(n);
  }
}

TEST(ParseCount, CountingAloud) {
  EXPECT_DOUBLE_EQ(*parse_count(en("one two three four five")), 5);
  EXPECT_DOUBLE_EQ(*parse_count(en("I got to twenty one")), 21);
  EXPECT_DOUBLE_EQ(*parse_count(en("1 2 3 4 5 6")), 6);
  EXPECT_DOUBLE_EQ(*parse_count(zh("一二三四五六七八九十")), 10);
  EXPECT_DOUBLE_EQ(*parse_count(zh("数到了二十五")), 25);
  EXPECT_FALSE(parse_count(en("I could not")));
}

TEST(LoadRuleset, ShippedEnglishCoversDialogueIntents) {
  std::set<std::string> intents;
  for (const auto& r : shipped(Language::EN)) intents.insert(r.intent);
  for (const char* need : {"affirm", "deny", "continue", "grateful_family", "grateful_general", "mood_positive",
                           "mood_negative", "feedback_positive", "feedback_negative", "introduce"}) {
    EXPECT_TRUE(intents.count(need)) << need;
  }
  std::set<std::string> zh_intents;
  for (const auto& r : shipped(Language::ZH)) zh_intents.insert(r.intent);
  for (const char* need : {"affirm", "deny", "continue", "grateful_family"}) EXPECT_TRUE(zh_intents.count(need));
}

TEST(LoadRuleset, SortedByPriorityDescending) {
  for (auto lang : {Language::EN, Language::ZH}) {
    const auto& rules = shipped(lang);
    EXPECT_TRUE(std::is_sorted(rules.begin(), rules.end(),
                               [](const IntentRule& a, const IntentRule& b) { return a.priority > b.priority; }));
    for (const auto& r : rules) EXPECT_EQ(r.language, lang);
  }
}

TEST(LoadRuleset, EmptyDocumentIsValid) {
  EXPECT_TRUE(load_ruleset("").empty());
  EXPECT_TRUE(load_ruleset("# only a comment\n\n").empty());
}

TEST(LoadRuleset, DuplicatePlaceholderRejected) {
  try {
    load_ruleset(R"({"intent":"x","lang":"en","priority":1,"patterns":["{a} and {a}"]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(LoadRuleset, DuplicateIntentPatternRejected) {
  const std::string doc =
      "{\"intent\":\"x\",\"lang\":\"en\",\"priority\":1,\"patterns\":[\"hi\"]}\n"
      "{\"intent\":\"x\",\"lang\":\"en\",\"priority\":2,\"patterns\":[\"hi\"]}\n";
  try {
    load_ruleset(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadRuleset, MalformedRecordReportsLine) {
  const std::string doc = "# header\n{\"intent\":\"x\",\"lang\":\"en\",\"priority\":1,\"patterns\":[\"hi\"]}\n{oops\n";
  try {
    load_ruleset(doc);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_ruleset(R"({"intent":"x","lang":"en","patterns":["hi"]})"), ParseError);
  EXPECT_THROW(load_ruleset(R"({"intent":"x","lang":"fr","priority":1,"patterns":["hi"]})"), ParseError);
  EXPECT_THROW(load_ruleset(R"({"intent":"x","lang":"en","priority":-1,"patterns":["hi"]})"), Error);
}

TEST(LoadRuleset, SlotValuesMustNameAPlaceholder) {
  EXPECT_THROW(
      load_ruleset(R"({"intent":"x","lang":"en","priority":1,"patterns":["for {a}"],"slot_values":{"b":["c"]}})"),
      Error);
}

// Properties over random utterances built from the shipped vocabulary.
class ClassifyProperties : public ::testing::TestWithParam<Language> {};

TEST_P(ClassifyProperties, DeterminismDominanceTotalitySoundness) {
  const auto lang = GetParam();
  const auto& rules = shipped(lang);
  std::vector<std::string> vocab;
  for (const auto& r : rules) {
    for (const auto& p : r.patterns) {
      for (const auto& e : p.elements) {
        if (e.kind == PatternElement::Kind::Literal) vocab.push_back(e.text);
      }
    }
  }
  for (const char* noise : {"zebra", "42", "!!", "très", "猫", "🙂", "my", "parents"}) vocab.push_back(noise);
  std::mt19937 rng(lang == Language::EN ? 1 : 2);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string s;
    const auto len = 1 + rng() % 7;
    for (std::size_t i = 0; i < len; ++i) s += (i && lang == Language::EN ? " " : "") + vocab[rng() % vocab.size()];
    const Utterance u{s, lang, Source::Typed};
    const auto f = classify(u, rules);
    EXPECT_EQ(f, classify(u, rules));
    EXPECT_GE(f.confidence, 0.0);
    EXPECT_LE(f.confidence, 1.0);

    int best = -1;
    for (const auto& r : rules) {
      try {
        extract_slots(u, r);
        best = std::max(best, r.priority);
      } catch (const Error&) {
      }
    }
    if (best < 0) {
      EXPECT_TRUE(f.is_fallback()) << s;
      continue;
    }
    const auto winner = std::find_if(rules.begin(), rules.end(), [&](const auto& r) { return r.id == *f.matched_rule; });
    ASSERT_NE(winner, rules.end());
    EXPECT_EQ(winner->priority, best) << s;
    for (const auto& [name, b] : extract_slots(u, *winner)) {
      EXPECT_EQ(u.text.substr(b.begin, b.end - b.begin), b.raw);
      EXPECT_NE(b.raw.find(b.value), std::string::npos);
      EXPECT_EQ(f.slots.at(name), b.value);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(BothLanguages, ClassifyProperties, ::testing::Values(Language::EN, Language::ZH));
