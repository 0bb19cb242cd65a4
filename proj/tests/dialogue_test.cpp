#include <gtest/gtest.h>

#include "nora/dialogue.hpp"
#include "support.hpp"
#include "traversal.hpp"

using namespace nora;
using namespace nora::dialogue;

namespace {

const DialogueManager& manager() {
  static const auto m = fixtures::load_manager();
  return m;
}

nlu::IntentFrame frame(const std::string& intent) { return nlu::IntentFrame::synthetic(intent); }

empathy::EmpathyScores scores(empathy::Polarity label, double confidence, double stress) {
  return {{label, confidence},
          empathy::EmotionDistribution::uniform({"happy", "sad", "angry", "neutral"}),
          {stress}};
}

// Drives a session through a sequence of (text, intent) pairs.
std::pair<SessionState, std::vector<BotResponse>> run(int day, const std::vector<fixtures::Input>& inputs,
                                                      Language lang = Language::EN) {
  auto [s, opening] = manager().start_session("u", day, lang);
  std::vector<BotResponse> out{opening};
  for (const auto& in : inputs) {
    auto [next, r] = manager().advance(std::move(s), in.text, frame(in.intent), std::nullopt);
    s = std::move(next);
    out.push_back(std::move(r));
  }
  return {std::move(s), std::move(out)};
}

const std::string kFb(nlu::kFallbackIntent);

bool has_empathetic(const BotResponse& r) {
  for (const auto& id : r.template_ids) {
    if (id.find(".empathetic#") != std::string::npos) return true;
  }
  return false;
}

// Counts writes per collection.
class CountingStore final : public store::DocumentStore {
 public:
  CountingStore() : inner_(store::platform_collections()) {}
  std::uint64_t put(const std::string& c, const std::string& k, json body) override {
    ++writes[c];
    return inner_.put(c, k, std::move(body));
  }
  std::optional<store::Document> get(const std::string& c, const std::string& k) const override {
    return inner_.get(c, k);
  }
  std::vector<store::Document> query(const std::string& c, const store::Query& q) const override {
    return inner_.query(c, q);
  }
  std::optional<std::uint64_t> compare_and_put(const std::string& c, const std::string& k, std::uint64_t expected,
                                               json body) override {
    ++writes[c];
    return inner_.compare_and_put(c, k, expected, std::move(body));
  }
  std::vector<store::Document> scan(const std::string& c) const override { return inner_.scan(c); }
  std::vector<store::CollectionSpec> collections() const override { return inner_.collections(); }

  std::map<std::string, int> writes;

 private:
  store::MemoryStore inner_;
};

}  // namespace

TEST(Start, OpeningDependsOnDay) {
  EXPECT_EQ(manager().start_session("u", 1, Language::EN).first.phase, Phase::Intro);
  EXPECT_EQ(manager().start_session("u", 2, Language::EN).first.phase, Phase::FuturePlans);
  EXPECT_EQ(manager().start_session("u", 9, Language::ZH).first.phase, Phase::FuturePlans);
  EXPECT_THROW(manager().start_session("u", 0, Language::EN), Error);
}

TEST(Start, OpeningsRotateAcrossDays) {
  for (auto lang : {Language::EN, Language::ZH}) {
    std::string prev;
    for (int day = 2; day <= 14; ++day) {
      const auto r = manager().start_session("u", day, lang).second;
      EXPECT_NE(r.text, prev) << day;
      const auto n = manager().templates(lang).rotation_size("future_plans", Variant::Neutral);
      EXPECT_EQ(r.template_ids.at(0), "future_plans.neutral#" + std::to_string((day - 1) % n));
      prev = r.text;
    }
  }
}

TEST(Service, SecondStartConflicts) {
  store::MemoryStore db(store::platform_collections());
  SessionService svc(db, manager());
  svc.start("u", 2, Language::EN, {}, 14);
  for (int day : {2, 3}) {
    try {
      svc.start("u", day, Language::EN, {}, 14);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Conflict);
    }
  }
  EXPECT_NO_THROW(svc.start("other", 2, Language::EN, {}, 14));
  EXPECT_THROW(svc.start("x", 15, Language::EN, {}, 14), Error);
}

TEST(Advance, InvalidTemperatureReasks) {
  auto [s, rs] = run(1, {{"hi", "greet"}, {"fine", "mood_positive"}, {"45 degrees", kFb}});
  EXPECT_EQ(s.phase, Phase::Temperature);
  EXPECT_EQ(rs.back().directive.kind, DirectiveKind::RequestNumber);
  EXPECT_EQ(rs.back().template_ids.at(0).rfind("temperature_retry.", 0), 0u);
  EXPECT_EQ(s.retry_count, 1);
}

TEST(Advance, TemperatureGivesUpAfterRetryLimit) {
  auto [s, rs] = run(1, {{"hi", "greet"}, {"fine", "mood_positive"}, {"45", kFb}, {"hmm", kFb}, {"99", kFb}});
  EXPECT_EQ(s.phase, Phase::Breath);
  EXPECT_EQ(rs.back().directive.kind, DirectiveKind::RequestCount);
  EXPECT_TRUE(s.facts["temperature"]["celsius"].is_null());
  EXPECT_TRUE(s.facts["temperature"]["flagged"].get<bool>());
}

TEST(Advance, ShortnessOfBreathShowsHotline) {
  auto [s, rs] = run(1, {{"hi", "greet"},
                         {"fine", "mood_positive"},
                         {"36.6", kFb},
                         {"one two three", kFb},
                         {"yes", "affirm"}});
  EXPECT_EQ(s.phase, Phase::Gratitude);
  EXPECT_EQ(rs.back().directive.kind, DirectiveKind::ShowHotline);
  EXPECT_EQ(rs.back().directive.hotline, std::optional<std::string>("1833 111"));
  EXPECT_NE(rs.back().text.find("1833 111"), std::string::npos);
  EXPECT_TRUE(s.hotline_shown);
}

TEST(Advance, FeverShowsHotline) {
  auto [s, rs] = run(2, {{"hi", "greet"},
                         {"fine", "mood_positive"},
                         {"38.5", kFb},
                         {"one two three", kFb},
                         {"no", "deny"}});
  EXPECT_EQ(rs.back().directive.kind, DirectiveKind::ShowHotline);
  EXPECT_EQ(s.facts["breath"]["max_count"], 3);
}

TEST(Advance, NoHotlineWhenWell) {
  auto [s, rs] = run(1, {{"hi", "greet"},
                         {"fine", "mood_positive"},
                         {"36.6", kFb},
                         {"one two three", kFb},
                         {"no", "deny"}});
  EXPECT_EQ(s.phase, Phase::Gratitude);
  EXPECT_NE(rs.back().directive.kind, DirectiveKind::ShowHotline);
}

TEST(Advance, DeclinedActivityGoesToFeedback) {
  auto [s, rs] = run(1, {{"hi", "greet"},
                         {"fine", "mood_positive"},
                         {"36.6", kFb},
                         {"no", "deny"},
                         {"my family", kFb},
                         {"no", "deny"}});
  EXPECT_EQ(s.phase, Phase::Feedback);
  EXPECT_NE(rs.back().directive.kind, DirectiveKind::ShowActivity);
  EXPECT_FALSE(rs.back().directive.activity);
  EXPECT_TRUE(s.facts["breath"]["declined"].get<bool>());
}

TEST(Advance, AcceptedActivityRunsUntilContinue) {
  auto [s, rs] = run(3, {{"hi", "greet"},
                         {"fine", "mood_positive"},
                         {"36.6", kFb},
                         {"no", "deny"},
                         {"my family", kFb},
                         {"yes", "affirm"}});
  EXPECT_EQ(s.phase, Phase::ActivityRunning);
  ASSERT_EQ(rs.back().directive.kind, DirectiveKind::ShowActivity);
  EXPECT_EQ(rs.back().directive.activity->kind, ActivityKind::Meditation);
  auto [s2, r2] = manager().advance(s, "continue", frame("continue"), std::nullopt);
  EXPECT_EQ(s2.phase, Phase::Feedback);
  auto [s3, r3] = manager().advance(s2, "great", frame("feedback_positive"), std::nullopt);
  EXPECT_EQ(s3.phase, Phase::End);
  EXPECT_EQ(r3.directive.kind, DirectiveKind::EndSession);
  try {
    manager().advance(s3, "more", frame("greet"), std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
  }
}

TEST(Advance, GratitudeObjectFromSlot) {
  auto [s, rs] = run(1, {{"hi", "greet"}, {"fine", "mood_positive"}, {"36.6", kFb}, {"no", "deny"}});
  auto f = frame("grateful_family");
  f.slots["object"] = "parents";
  auto [next, r] = manager().advance(s, "I'm grateful for my parents", f, std::nullopt);
  EXPECT_EQ(next.facts["gratitude_object"], "parents");
}

TEST(Variant, MoodExample) {
  auto [s, opening] = manager().start_session("u", 1, Language::EN);
  auto [s1, r1] = manager().advance(s, "hi", frame("greet"), std::nullopt);
  auto [s2, r2] = manager().advance(s1, "awful", frame("mood_negative"),
                                    scores(empathy::Polarity::Negative, 0.9, 0.9));
  EXPECT_EQ(r2.variant, Variant::Empathetic);
  EXPECT_TRUE(has_empathetic(r2));
}

// Oracle: empathetic iff negative or stress strictly above the threshold.
TEST(Variant, SelectionOracle) {
  const std::vector<double> stress = {0.0, 0.25, 0.5, std::nextafter(0.5, 1.0), 0.75, 1.0};
  auto [s, opening] = manager().start_session("u", 1, Language::EN);
  auto [mood, r] = manager().advance(s, "hi", frame("greet"), std::nullopt);
  for (auto label : {empathy::Polarity::Positive, empathy::Polarity::Negative}) {
    for (double conf : {0.5, 0.8, 1.0}) {
      for (double st : stress) {
        const bool want = label == empathy::Polarity::Negative || st > 0.5;
        const auto sc = scores(label, conf, st);
        EXPECT_EQ(select_variant(sc, 0.5) == Variant::Empathetic, want);
        const auto resp = manager().advance(mood, "x", frame(kFb), sc).second;
        EXPECT_EQ(has_empathetic(resp), want) << st;
        EXPECT_EQ(resp.template_ids.at(0), std::string("temperature.") + (want ? "empathetic" : "neutral") + "#0");
      }
    }
  }
  EXPECT_EQ(select_variant(std::nullopt, 0.5), Variant::Neutral);
}

TEST(Activity, Recommendations) {
  ActivityPreferences p;
  p.by_day[3] = {ActivityKind::Yoga, "video-Y"};
  const auto r = recommend_activity(p, 3);
  EXPECT_EQ(r.kind, ActivityKind::Yoga);
  EXPECT_EQ(r.video, "video-Y");
  const std::vector<ActivityKind> want = {ActivityKind::Exercise, ActivityKind::Yoga, ActivityKind::Meditation};
  for (int day = 1; day <= 9; ++day) EXPECT_EQ(recommend_activity({}, day).kind, want[(day - 1) % 3]);
  ActivityPreferences single;
  single.kinds = {ActivityKind::Meditation};
  for (int day = 1; day <= 5; ++day) EXPECT_EQ(recommend_activity(single, day).kind, ActivityKind::Meditation);
  EXPECT_THROW(recommend_activity({}, 0), Error);
  EXPECT_EQ(json(p).get<ActivityPreferences>(), p);
}

TEST(Close, MeansAndAbsence) {
  SessionState s;
  s.phase = Phase::End;
  s.turns.push_back({Speaker::User, "a", std::nullopt, scores(empathy::Polarity::Positive, 1.0, 0.2)});
  s.turns.push_back({Speaker::Bot, "q?", std::nullopt, std::nullopt});
  s.turns.push_back({Speaker::User, "b", std::nullopt, scores(empathy::Polarity::Negative, 0.8, 0.4)});
  s.turns.push_back({Speaker::User, "c", std::nullopt, std::nullopt});
  const auto summary = close_session(s);
  ASSERT_TRUE(summary.aggregates);
  EXPECT_EQ(summary.aggregates->scored_turns, 2u);
  EXPECT_NEAR(summary.aggregates->stress, 0.3, 1e-12);
  EXPECT_NEAR(summary.aggregates->sentiment_positive, 0.6, 1e-12);

  SessionState empty;
  empty.phase = Phase::End;
  EXPECT_FALSE(close_session(empty).aggregates);

  SessionState open;
  open.phase = Phase::Feedback;
  try {
    close_session(open);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
  }
}

TEST(Service, CompletedSessionWritesOneHealthRecord) {
  CountingStore db;
  SessionService svc(db, manager());
  svc.start("u", 1, Language::EN, {}, 14);
  const std::vector<fixtures::Input> inputs = {{"hi", "greet"},   {"fine", "mood_positive"},
                                               {"37", kFb},       {"one two three", kFb},
                                               {"no", "deny"},    {"my friends", kFb},
                                               {"no", "deny"},    {"good", "feedback_positive"}};
  std::optional<SessionSummary> summary;
  for (const auto& in : inputs) {
    EXPECT_FALSE(summary);
    auto r = svc.turn("u", in.text, frame(in.intent), scores(empathy::Polarity::Positive, 0.9, 0.1), 14);
    summary = r.summary;
  }
  ASSERT_TRUE(summary);
  EXPECT_EQ(db.writes["health"], 1);
  EXPECT_EQ(db.writes["summaries"], 1);
  EXPECT_EQ(screening::history(db, "u").size(), 1u);
  EXPECT_EQ(summary->health.temperature, std::optional<double>(37.0));
  EXPECT_EQ(svc.summaries("u").size(), 1u);
  EXPECT_FALSE(svc.open_session("u"));
  EXPECT_EQ(svc.load("u", 1)->phase, Phase::End);
  try {
    svc.turn("u", "again", frame("greet"), std::nullopt, 14);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
  }
  EXPECT_NO_THROW(svc.start("u", 2, Language::EN, {}, 14));
}

TEST(Serialize, StateRoundTrip) {
  auto [s, rs] = run(3, {{"hi", "greet"}, {"fine", "mood_positive"}, {"38", kFb}, {"one two", kFb}});
  const SessionState back = json(s).get<SessionState>();
  EXPECT_EQ(json(back), json(s));
  EXPECT_EQ(back.phase, Phase::Breath);
}

TEST(Templates, CompleteInBothLanguages) {
  const auto en = manager().templates(Language::EN).names();
  const auto zh = manager().templates(Language::ZH).names();
  EXPECT_EQ(en, zh);
  for (const auto& name : en) {
    EXPECT_GT(manager().templates(Language::EN).rotation_size(name, Variant::Neutral), 0u) << name;
    EXPECT_GT(manager().templates(Language::ZH).rotation_size(name, Variant::Neutral), 0u) << name;
  }
}

TEST(Templates, ParseErrors) {
  EXPECT_NO_THROW(TemplateBook::parse("[a.neutral]\n0 = \"x \\\"y\\\" \\u4F60\"\n"));
  EXPECT_THROW(TemplateBook::parse("[a.neutral]\n0 = \"unterminated\n"), Error);
  EXPECT_THROW(TemplateBook::parse("0 = \"no section\"\n"), Error);
  EXPECT_THROW(TemplateBook::parse("[a.neutral]\nzero = \"x\"\n"), Error);
}

class Traversal : public ::testing::TestWithParam<std::tuple<int, Language>> {};

TEST_P(Traversal, EveryPathEndsAndEscalates) {
  const auto [day, lang] = GetParam();
  const auto rep = fixtures::traverse(manager(), day, lang);
  for (const auto& v : rep.violations) ADD_FAILURE() << v;
  EXPECT_GT(rep.paths, 100u);
  EXPECT_LE(rep.max_user_turns, 25u);
  for (auto p : kAllPhases) {
    if (p == (day == 1 ? Phase::FuturePlans : Phase::Intro)) {
      EXPECT_FALSE(rep.visited.count(p));
    } else {
      EXPECT_TRUE(rep.visited.count(p)) << to_string(p);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(DaysAndLanguages, Traversal,
                         ::testing::Combine(::testing::Values(1, 2, 14),
                                            ::testing::Values(Language::EN, Language::ZH)));
