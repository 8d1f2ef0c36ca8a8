#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "tacsim/errors.hpp"
#include "tacsim/experiment_config.hpp"
#include "tacsim/kv_config.hpp"

using namespace tacsim;
using namespace tacsim::config;

TEST(Kv, SectionsFlattenToDottedKeys) {
  const KeyValues kv = parse_kv("# comment\n[grasp]\nobject = tweezers\n; other\n[run]\nseed=4\n");
  EXPECT_EQ(kv.at("grasp.object"), "tweezers");
  EXPECT_EQ(kv.at("run.seed"), "4");
  EXPECT_EQ(kv.size(), 2U);
  EXPECT_THROW(parse_kv("[grasp\nobject = x\n"), ConfigError);
}

TEST(Kv, Overrides) {
  EXPECT_EQ(parse_override("grasp.t_g=650"), (std::pair<std::string, std::string>{"grasp.t_g", "650"}));
  EXPECT_EQ(parse_override(" grasp.a = 0.5 ").second, "0.5");
  EXPECT_THROW(parse_override("novalue"), ConfigError);
  EXPECT_THROW(parse_override("=3"), ConfigError);
}

TEST(Kv, NumberLists) {
  EXPECT_EQ(parse_number_list("2, 4,6.5", "k"), (std::vector<double>{2, 4, 6.5}));
  EXPECT_THROW(parse_number_list("2,x", "k"), ConfigError);
  EXPECT_EQ(format_number_list({0.1, 2}), "0.1,2");
}

TEST(Kv, HashIsOrderFreeAndSensitive) {
  const KeyValues a{{"x.a", "1"}, {"x.b", "2"}};
  KeyValues b;
  b["x.b"] = "2";
  b["x.a"] = "1";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b["x.b"] = "3";
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(hash_hex(0x1f).size(), 16U);
  // FNV-1a 64 offset basis for empty input.
  EXPECT_EQ(config_hash({}), 0xcbf29ce484222325ULL);
}

TEST(Experiment, DefaultsAndOverrides) {
  const ExperimentConfig d = make_config({});
  EXPECT_EQ(d.seed, 1U);
  EXPECT_EQ(d.stream.rate_hz, 250);
  EXPECT_EQ(d.stream.ma_window, 6);
  EXPECT_EQ(d.grasp.object, grasp::ObjectKind::Egg);

  const ExperimentConfig o = load_config({}, {"grasp.object=tweezers", "stream.ma_window=4"}, 9);
  EXPECT_EQ(o.seed, 9U);
  EXPECT_EQ(o.grasp.object, grasp::ObjectKind::Tweezers);
  EXPECT_EQ(o.stream.ma_window, 4);
  EXPECT_NE(o.hash(), d.hash());
  EXPECT_EQ(o.header("grasp").rfind("tacsim grasp config_hash=", 0), 0U);
  EXPECT_NE(o.header("grasp").find(" seed=9"), std::string::npos);
}

TEST(Experiment, FileThenOverrides) {
  const auto path = std::filesystem::temp_directory_path() / "tacsim_config_test.ini";
  {
    std::ofstream f(path);
    f << "[grasp]\nt_g = 650\n[run]\nseed = 3\n";
  }
  const ExperimentConfig c = load_config(path, {"grasp.t_g=640"}, std::nullopt);
  EXPECT_EQ(c.seed, 3U);
  EXPECT_EQ(c.grasp.t_g, 640.0);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config("/nonexistent/tacsim.ini", {}, std::nullopt), ConfigError);
}

TEST(Experiment, RejectsBadInput) {
  EXPECT_THROW(make_config({{"grasp.bogus", "1"}}), ConfigError);
  EXPECT_THROW(make_config({{"stream.ma_window", "0"}}), ConfigError);
  EXPECT_THROW(make_config({{"stream.ma_window", "2.5"}}), ConfigError);
  EXPECT_THROW(make_config({{"grasp.object", "banana"}}), ConfigError);
  EXPECT_THROW(make_config({{"grasp.t_low", "1000"}}), ConfigError);
  EXPECT_THROW(make_config({{"noise.fa1_sigma_counts", "-1"}}), ConfigError);
  EXPECT_THROW(make_config({{"run.seed", "abc"}}), ConfigError);
}

TEST(Experiment, GraspScenarioDefaults) {
  const grasp::GraspScenario egg = grasp_scenario(make_config({}));
  EXPECT_EQ(egg.geometry.opening_mm, 60.0);
  EXPECT_TRUE(std::holds_alternative<grasp::SingleThreshold>(egg.policy.mode));
  const grasp::GraspScenario tw = grasp_scenario(make_config({{"grasp.object", "tweezers"}}));
  EXPECT_EQ(tw.geometry.opening_mm, 20.0);
  EXPECT_TRUE(std::holds_alternative<grasp::Hysteresis>(tw.policy.mode));
}
