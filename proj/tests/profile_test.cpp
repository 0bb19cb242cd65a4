#include <gtest/gtest.h>

#include "nora/profile.hpp"

using namespace nora;

namespace {

UserProfile user(const std::string& id, const std::string& alias) {
  UserProfile p;
  p.id = id;
  p.alias = alias;
  return p;
}

}  // namespace

TEST(Handle, Validity) {
  EXPECT_TRUE(valid_handle("amy_01.x-y"));
  EXPECT_TRUE(valid_handle(std::string(64, 'a')));
  EXPECT_FALSE(valid_handle(""));
  EXPECT_FALSE(valid_handle(std::string(65, 'a')));
  EXPECT_FALSE(valid_handle("a b"));
  EXPECT_FALSE(valid_handle("a|b"));
  EXPECT_FALSE(valid_handle("用户"));
}

TEST(Profile, CreateAndFind) {
  store::MemoryStore db(store::platform_collections());
  create_user(db, user("u1", "amy"));
  EXPECT_EQ(find_user(db, "u1")->alias, "amy");
  EXPECT_EQ(find_by_alias(db, "amy")->id, "u1");
  EXPECT_FALSE(find_user(db, "u2"));
  EXPECT_FALSE(find_by_alias(db, "bob"));
  try {
    require_user(db, "u2");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFound);
  }
}

TEST(Profile, DuplicatesConflict) {
  store::MemoryStore db(store::platform_collections());
  create_user(db, user("u1", "amy"));
  for (const auto& p : {user("u2", "amy"), user("u1", "bob")}) {
    try {
      create_user(db, p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Conflict);
    }
  }
}

TEST(Profile, ValidationRejects) {
  store::MemoryStore db(store::platform_collections());
  auto bad = user("u1", "amy");
  bad.program.length_days = 0;
  EXPECT_THROW(create_user(db, bad), Error);
  EXPECT_THROW(create_user(db, user("", "amy")), Error);
  EXPECT_THROW(create_user(db, user("u1", "a b")), Error);
  EXPECT_TRUE(db.scan("users").empty());
}

TEST(Profile, UpdateRoundTripAndAbort) {
  store::MemoryStore db(store::platform_collections());
  create_user(db, user("u1", "amy"));
  const auto p = update_user(db, "u1", [](UserProfile& u) {
    u.language = Language::ZH;
    u.interests = {"music", "movies"};
    u.activities.kinds = {dialogue::ActivityKind::Yoga};
    u.activities.by_day[2] = {dialogue::ActivityKind::Meditation, "v"};
  });
  const auto back = require_user(db, "u1");
  EXPECT_EQ(back.language, Language::ZH);
  EXPECT_EQ(back.interests, p.interests);
  EXPECT_EQ(back.activities, p.activities);

  EXPECT_THROW(update_user(db, "u1", [](UserProfile& u) { u.program.length_days = -1; }), Error);
  EXPECT_EQ(require_user(db, "u1").program.length_days, 14);
  EXPECT_THROW(update_user(db, "nobody", [](UserProfile&) {}), Error);
}
