#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "nora/screening.hpp"

using namespace nora;
using namespace nora::screening;

namespace {

HealthRecord record(TemperatureClass c, std::optional<bool> short_breath) {
  HealthRecord r;
  r.temperature = c == TemperatureClass::High ? 39.0 : 36.5;
  r.temp_class = c;
  if (short_breath) r.breath = BreathTestResult{10, *short_breath};
  return r;
}

}  // namespace

TEST(Temperature, Examples) {
  EXPECT_EQ(classify_temperature(36.6), TemperatureClass::Normal);
  EXPECT_EQ(classify_temperature(39.5), TemperatureClass::High);
  EXPECT_EQ(classify_temperature(45.0), TemperatureClass::Invalid);
  EXPECT_EQ(classify_temperature(38.0), TemperatureClass::High);
  EXPECT_EQ(classify_temperature(32.0), TemperatureClass::Normal);
  EXPECT_EQ(classify_temperature(43.0), TemperatureClass::High);
  EXPECT_EQ(classify_temperature(std::nextafter(32.0, 0.0)), TemperatureClass::Invalid);
  EXPECT_EQ(classify_temperature(std::nextafter(43.0, 50.0)), TemperatureClass::Invalid);
}

TEST(Temperature, NonFiniteRejected) {
  for (double t : {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()}) {
    try {
      classify_temperature(t);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
  }
}

// Tenths of a degree as integers, so the oracle compares exactly.
TEST(Temperature, SweepMatchesIntegerOracle) {
  for (int k = -500; k <= 1000; ++k) {
    const auto want = k >= 320 && k < 380    ? TemperatureClass::Normal
                      : k >= 380 && k <= 430 ? TemperatureClass::High
                                             : TemperatureClass::Invalid;
    EXPECT_EQ(classify_temperature(k / 10.0), want) << k;
  }
}

TEST(Breath, Examples) {
  const auto a = evaluate_breath(nlu::Utterance::make("one two three four five", Language::EN), "deny");
  EXPECT_EQ(a.result, (BreathTestResult{5, false}));
  EXPECT_FALSE(a.reask);
  const auto b = evaluate_breath(nlu::Utterance::make("1 2 3 4 5 6 7 8 9 10 11 12", Language::EN), "affirm");
  EXPECT_EQ(b.result, (BreathTestResult{12, true}));
  const auto c = evaluate_breath(nlu::Utterance::make("hmm", Language::EN), "affirm");
  EXPECT_EQ(c.result, (BreathTestResult{0, true}));
  const auto d = evaluate_breath(nlu::Utterance::make("一二三四五六七八九十", Language::ZH), "deny");
  EXPECT_EQ(d.result.max_count, 10);
}

TEST(Breath, FallbackReadsAsDenyAndReasks) {
  const auto r = evaluate_breath(nlu::Utterance::make("one two", Language::EN), nlu::kFallbackIntent);
  EXPECT_FALSE(r.result.self_report_short);
  EXPECT_TRUE(r.reask);
  EXPECT_THROW(evaluate_breath(nlu::Utterance::make("one", Language::EN), "greet"), Error);
}

TEST(Escalation, Examples) {
  HealthRecord high;
  high.temperature = 39.0;
  high.temp_class = TemperatureClass::High;
  EXPECT_TRUE(needs_escalation(high));
  EXPECT_TRUE(needs_escalation(record(TemperatureClass::Normal, true)));
  EXPECT_FALSE(needs_escalation(record(TemperatureClass::Normal, false)));
  try {
    needs_escalation(HealthRecord{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(Escalation, Monotonic) {
  const std::vector<TemperatureClass> classes = {TemperatureClass::Normal, TemperatureClass::High,
                                                 TemperatureClass::Invalid};
  for (auto c : classes) {
    for (std::optional<bool> b : {std::optional<bool>{}, std::optional<bool>{false}, std::optional<bool>{true}}) {
      const auto base = record(c, b);
      const bool before = needs_escalation(base);
      auto hotter = base;
      if (hotter.temp_class == TemperatureClass::Normal) hotter.temp_class = TemperatureClass::High;
      auto shorter = base;
      if (shorter.breath) shorter.breath->self_report_short = true;
      if (before) {
        EXPECT_TRUE(needs_escalation(hotter));
        EXPECT_TRUE(needs_escalation(shorter));
      }
      // The count never matters.
      auto counted = base;
      if (counted.breath) counted.breath->max_count = 99;
      EXPECT_EQ(needs_escalation(counted), before);
    }
  }
}

TEST(History, OrderedUpsertAndEmpty) {
  store::MemoryStore db(store::platform_collections());
  EXPECT_TRUE(history(db, "u1").empty());

  auto d3 = record(TemperatureClass::High, std::nullopt);
  d3.day = 3;
  auto d1 = record(TemperatureClass::Normal, false);
  d1.day = 1;
  const auto stored = record_day(db, "u1", d3, 14);
  EXPECT_TRUE(stored.escalated);
  record_day(db, "u1", d1, 14);
  auto h = history(db, "u1");
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].day, 1);
  EXPECT_EQ(h[1].day, 3);
  EXPECT_FALSE(h[0].escalated);

  auto d1b = record(TemperatureClass::Normal, true);
  d1b.day = 1;
  record_day(db, "u1", d1b, 14);
  h = history(db, "u1");
  ASSERT_EQ(h.size(), 2u);
  EXPECT_TRUE(h[0].breath->self_report_short);
  EXPECT_TRUE(h[0].escalated);
  EXPECT_TRUE(history(db, "u2").empty());
}

TEST(History, DayOutOfRange) {
  store::MemoryStore db(store::platform_collections());
  for (int day : {0, -1, 15}) {
    auto r = record(TemperatureClass::Normal, false);
    r.day = day;
    try {
      record_day(db, "u", r, 14);
      FAIL() << day;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
  }
}

TEST(History, EscalatedIsRecomputed) {
  store::MemoryStore db(store::platform_collections());
  auto r = record(TemperatureClass::Normal, false);
  r.escalated = true;
  EXPECT_FALSE(record_day(db, "u", r, 14).escalated);
  HealthRecord flagged;  // no readings: given up, stored without escalation
  flagged.day = 2;
  flagged.flagged = true;
  EXPECT_FALSE(record_day(db, "u", flagged, 14).escalated);
}

TEST(HealthRecord, JsonRoundTrip) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    HealthRecord r;
    r.day = 1 + static_cast<int>(rng() % 14);
    if (rng() % 2) r.temperature = 30.0 + (rng() % 150) / 10.0;
    r.temp_class = static_cast<TemperatureClass>(rng() % 3);
    if (rng() % 2) r.breath = BreathTestResult{static_cast<int>(rng() % 40), rng() % 2 == 0};
    r.escalated = rng() % 2;
    r.flagged = rng() % 2;
    EXPECT_EQ(json(r).get<HealthRecord>(), r);
  }
}
