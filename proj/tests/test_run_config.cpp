#include <gtest/gtest.h>

#include <functional>

#include "fkrc/run_config.hpp"

using namespace fkrc;

namespace {

std::string key_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST(RunConfig, ParsesFlatFile) {
  const auto cfg = RunConfig::parse("# demo\nq = 2\n p=0.3  # comment\n\nx = (4, 0)\nns = 4..16:4\nbc = wired\n");
  EXPECT_EQ(cfg.real("q"), 2.0);
  EXPECT_EQ(cfg.real("p", 0, 1), 0.3);
  EXPECT_EQ(cfg.site("x"), (Site{4, 0}));
  EXPECT_EQ(cfg.int_list("ns"), (std::vector<int>{4, 8, 12, 16}));
  EXPECT_EQ(cfg.choice("bc", {"free", "wired"}), "wired");
  EXPECT_EQ(cfg.echo(), "bc = wired\nns = 4..16:4\np = 0.3\nq = 2\nx = (4, 0)\n");
}

TEST(RunConfig, ErrorsNameTheKey) {
  const auto cfg = RunConfig::parse("p = 1.5\nq = two\nbc = periodic\nsteps = (1,0);(2,x)\n");
  EXPECT_EQ(key_of([&] { cfg.real("p", 0, 1); }), "p");
  EXPECT_EQ(key_of([&] { cfg.real("q"); }), "q");
  EXPECT_EQ(key_of([&] { cfg.choice("bc", {"free", "wired"}); }), "bc");
  EXPECT_EQ(key_of([&] { cfg.site_list("steps"); }), "steps");
  EXPECT_EQ(key_of([&] { cfg.integer("N"); }), "N");
  EXPECT_EQ(key_of([] { RunConfig::parse("a = 1\na = 2\n"); }), "a");
}

TEST(RunConfig, OverridesAndUnusedKeys) {
  auto cfg = RunConfig::parse("seed = 3\nsweps = 10\n");
  cfg.set("seed", "9");
  EXPECT_EQ(cfg.u64("seed"), 9u);
  EXPECT_EQ(key_of([&] { cfg.reject_unused(); }), "sweps");
  EXPECT_EQ(cfg.integer("absent", 7, 0, 10), 7);
}
