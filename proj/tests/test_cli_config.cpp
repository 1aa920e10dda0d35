// Tests for configuration text handling: power-grid and precoder-triple
// parsing, the key=value file reader, and single-entry application onto a
// simulation config.
#include <gtest/gtest.h>

#include <xmimo/sim.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace {

using namespace xmimo;

TEST(ParsePdb, RangeListAndErrors) {
  const std::vector<double> r = parse_pdb("6:3:18");
  ASSERT_EQ(r.size(), 5u);
  EXPECT_DOUBLE_EQ(r[0], 6.0);
  EXPECT_DOUBLE_EQ(r[1], 9.0);
  EXPECT_DOUBLE_EQ(r[2], 12.0);
  EXPECT_DOUBLE_EQ(r[3], 15.0);
  EXPECT_DOUBLE_EQ(r[4], 18.0);

  // The stop value is inclusive even with accumulated rounding.
  const std::vector<double> f = parse_pdb("0:2.5:10");
  ASSERT_EQ(f.size(), 5u);
  EXPECT_DOUBLE_EQ(f.back(), 10.0);

  const std::vector<double> one = parse_pdb("12");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0], 12.0);

  const std::vector<double> list = parse_pdb("6,9,12.5");
  ASSERT_EQ(list.size(), 3u);
  EXPECT_DOUBLE_EQ(list[2], 12.5);

  // A degenerate range still yields its start point.
  const std::vector<double> point = parse_pdb("7:1:7");
  ASSERT_EQ(point.size(), 1u);
  EXPECT_DOUBLE_EQ(point[0], 7.0);

  EXPECT_THROW(parse_pdb("6:0:18"), ConfigError);   // zero step
  EXPECT_THROW(parse_pdb("6:-3:18"), ConfigError);  // negative step
  EXPECT_THROW(parse_pdb("18:3:6"), ConfigError);   // stop before start
  EXPECT_THROW(parse_pdb("6:3"), ConfigError);      // incomplete range
  EXPECT_THROW(parse_pdb(""), ConfigError);         // empty spec
  EXPECT_THROW(parse_pdb(",,"), ConfigError);       // no values
}

TEST(ParseSrp, TriplesAndErrors) {
  const SrpParams one = parse_srp("1:0.5:0.25");
  ASSERT_EQ(one.blocks.size(), 1u);
  EXPECT_DOUBLE_EQ(one.blocks[0][0], 1.0);
  EXPECT_DOUBLE_EQ(one.blocks[0][1], 0.5);
  EXPECT_DOUBLE_EQ(one.blocks[0][2], 0.25);

  const SrpParams two = parse_srp("1:0.5:0.25,2:0.1:0.6");
  ASSERT_EQ(two.blocks.size(), 2u);
  EXPECT_DOUBLE_EQ(two.blocks[1][0], 2.0);
  EXPECT_DOUBLE_EQ(two.blocks[1][1], 0.1);
  EXPECT_DOUBLE_EQ(two.blocks[1][2], 0.6);

  EXPECT_TRUE(parse_srp("").blocks.empty());

  EXPECT_THROW(parse_srp("1:0.5"), ConfigError);
  EXPECT_THROW(parse_srp("abc"), ConfigError);
  EXPECT_THROW(parse_srp("1:0.5:0.25,oops"), ConfigError);
}

TEST(KeyValueFile, ParsesCommentsBlanksAndSpacing) {
  const std::string path = ::testing::TempDir() + "config_ok.txt";
  {
    std::ofstream out(path);
    out << "# leading comment\n"
        << "\n"
        << "scheme = msr\n"
        << "  trials=  77  \n"
        << "\t# indented comment\n"
        << "out=some dir\n"
        << "pdb=6:3:12\n";
  }
  const auto kv = parse_key_value_file(path);
  ASSERT_EQ(kv.size(), 4u);
  EXPECT_EQ(kv.at("scheme"), "msr");
  EXPECT_EQ(kv.at("trials"), "77");
  EXPECT_EQ(kv.at("out"), "some dir");
  EXPECT_EQ(kv.at("pdb"), "6:3:12");
}

TEST(KeyValueFile, ReportsLineNumberOnMalformedEntry) {
  const std::string path = ::testing::TempDir() + "config_bad.txt";
  {
    std::ofstream out(path);
    out << "scheme=msr\n"
        << "# fine\n"
        << "this line has no equals sign\n";
  }
  try {
    parse_key_value_file(path);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(path), std::string::npos);
    EXPECT_NE(what.find(":3"), std::string::npos);
  }
}

TEST(KeyValueFile, MissingFileIsAnError) {
  EXPECT_THROW(parse_key_value_file(::testing::TempDir() + "no_such_file.txt"),
               ConfigError);
}

TEST(ApplyEntry, SchemeKeySetsDefaultAntennaCount) {
  SimConfig cfg;
  apply_config_entry(cfg, "scheme", "ljj");
  EXPECT_EQ(cfg.scheme.scheme, Scheme::ljj);
  EXPECT_EQ(cfg.scheme.m, 2);

  apply_config_entry(cfg, "scheme", "msr");
  EXPECT_EQ(cfg.scheme.scheme, Scheme::msr);
  EXPECT_EQ(cfg.scheme.m, 4);

  apply_config_entry(cfg, "scheme", "tdma");
  EXPECT_EQ(cfg.scheme.scheme, Scheme::tdma_srp);
  EXPECT_EQ(cfg.scheme.m, 4);
  // An explicit antenna count applied afterwards survives.
  apply_config_entry(cfg, "m", "2");
  EXPECT_EQ(cfg.scheme.m, 2);
  EXPECT_NO_THROW(cfg.scheme.validate());
}

TEST(ApplyEntry, CoversEveryKey) {
  SimConfig cfg;
  apply_config_entry(cfg, "scheme", "js");
  apply_config_entry(cfg, "const", "qam16");
  apply_config_entry(cfg, "phi", "0.25");
  apply_config_entry(cfg, "theta", "0.5");
  apply_config_entry(cfg, "pdb", "6:3:12");
  apply_config_entry(cfg, "trials", "123");
  apply_config_entry(cfg, "seed", "42");
  apply_config_entry(cfg, "workers", "3");
  apply_config_entry(cfg, "out", "results");
  apply_config_entry(cfg, "max-errors", "7");
  apply_config_entry(cfg, "no-noise", "1");
  apply_config_entry(cfg, "wep-scope", "per_rx");
  apply_config_entry(cfg, "decode", "exhaustive");
  apply_config_entry(cfg, "dist", "uniform");
  apply_config_entry(cfg, "dist-a", "-2");
  apply_config_entry(cfg, "dist-b", "2");
  apply_config_entry(cfg, "srp", "1:0.2:0.3,0.5:0.1:0.4");

  EXPECT_EQ(cfg.scheme.scheme, Scheme::js);
  EXPECT_EQ(cfg.scheme.m, 4);
  EXPECT_EQ(cfg.scheme.constellation, ConstKind::qam16);
  EXPECT_DOUBLE_EQ(cfg.scheme.phi, 0.25);
  EXPECT_DOUBLE_EQ(cfg.scheme.theta, 0.5);
  ASSERT_EQ(cfg.p_db.size(), 3u);
  EXPECT_DOUBLE_EQ(cfg.p_db[2], 12.0);
  EXPECT_EQ(cfg.trials, 123);
  EXPECT_EQ(cfg.master_seed, 42u);
  EXPECT_EQ(cfg.workers, 3);
  EXPECT_EQ(cfg.out_dir, "results");
  EXPECT_EQ(cfg.max_word_errors, 7);
  EXPECT_FALSE(cfg.noise_on);
  EXPECT_EQ(cfg.scope, WepScope::per_rx);
  EXPECT_EQ(cfg.decode, DecodeMode::exhaustive);
  EXPECT_EQ(cfg.dist.kind, ChannelDist::uniform_box);
  EXPECT_DOUBLE_EQ(cfg.dist.a, -2.0);
  EXPECT_DOUBLE_EQ(cfg.dist.b, 2.0);
  ASSERT_EQ(cfg.srp.blocks.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.srp.blocks[1][2], 0.4);
}

TEST(ApplyEntry, NoiseToggleSemantics) {
  // The key is a negation: "0"/"false" keep the noise on, anything else
  // switches it off.
  SimConfig cfg;
  apply_config_entry(cfg, "no-noise", "1");
  EXPECT_FALSE(cfg.noise_on);
  apply_config_entry(cfg, "no-noise", "0");
  EXPECT_TRUE(cfg.noise_on);
  apply_config_entry(cfg, "no-noise", "true");
  EXPECT_FALSE(cfg.noise_on);
  apply_config_entry(cfg, "no-noise", "false");
  EXPECT_TRUE(cfg.noise_on);
}

TEST(ApplyEntry, RejectsUnknownKeysAndBadValues) {
  SimConfig cfg;
  EXPECT_THROW(apply_config_entry(cfg, "speed", "11"), ConfigError);
  EXPECT_THROW(apply_config_entry(cfg, "scheme", "alamouti"), ConfigError);
  EXPECT_THROW(apply_config_entry(cfg, "const", "qam32"), ConfigError);
  EXPECT_THROW(apply_config_entry(cfg, "pdb", "6:0:12"), ConfigError);
  EXPECT_THROW(apply_config_entry(cfg, "wep-scope", "global"), ConfigError);
  EXPECT_THROW(apply_config_entry(cfg, "decode", "viterbi"), ConfigError);
  EXPECT_THROW(apply_config_entry(cfg, "dist", "cauchy"), ConfigError);
  EXPECT_THROW(apply_config_entry(cfg, "srp", "1:2"), ConfigError);
}

TEST(EnumNames, ParseAndNameAgree) {
  EXPECT_EQ(parse_wep_scope("network"), WepScope::network);
  EXPECT_EQ(parse_wep_scope("per-rx"), WepScope::per_rx);
  EXPECT_EQ(parse_wep_scope("per_rx"), WepScope::per_rx);
  EXPECT_STREQ(wep_scope_name(WepScope::network), "network");
  EXPECT_STREQ(wep_scope_name(WepScope::per_rx), "per-rx");
  EXPECT_THROW(parse_wep_scope("both"), ConfigError);

  EXPECT_EQ(parse_decode_mode("sphere"), DecodeMode::sphere);
  EXPECT_EQ(parse_decode_mode("exhaustive"), DecodeMode::exhaustive);
  EXPECT_STREQ(decode_mode_name(DecodeMode::sphere), "sphere");
  EXPECT_STREQ(decode_mode_name(DecodeMode::exhaustive), "exhaustive");
  EXPECT_THROW(parse_decode_mode("ml"), ConfigError);

  EXPECT_EQ(parse_channel_dist("gaussian"), ChannelDist::gaussian_unit);
  EXPECT_EQ(parse_channel_dist("uniform"), ChannelDist::uniform_box);
  EXPECT_STREQ(channel_dist_name(ChannelDist::gaussian_unit), "gaussian");
  EXPECT_STREQ(channel_dist_name(ChannelDist::uniform_box), "uniform");
  EXPECT_THROW(parse_channel_dist("rician"), ConfigError);
}

TEST(ConfigFile, DrivesAValidatedSweepConfig) {
  const std::string path = ::testing::TempDir() + "config_full.txt";
  {
    std::ofstream out(path);
    out << "scheme=ljj\n"
        << "const=qam4\n"
        << "pdb=6,10\n"
        << "trials=10\n"
        << "seed=5\n"
        << "max-errors=0\n"
        << "decode=sphere\n";
  }
  SimConfig cfg;
  const auto kv = parse_key_value_file(path);
  // Apply "scheme" first so its default antenna count cannot clobber an
  // explicit "m"; remaining keys are order-independent.
  if (const auto it = kv.find("scheme"); it != kv.end())
    apply_config_entry(cfg, it->first, it->second);
  for (const auto& [k, v] : kv)
    if (k != "scheme") apply_config_entry(cfg, k, v);

  EXPECT_NO_THROW(cfg.validate());
  const SimResult res = run_wep_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 2u);
  EXPECT_EQ(res.rows[0].trials, 10);
}

}  // namespace
