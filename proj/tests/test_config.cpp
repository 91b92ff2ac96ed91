#include <wnfdi/config.hpp>
#include <wnfdi/errors.hpp>
#include <wnfdi/random.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <string>

using namespace wnfdi;

namespace {

const char* kSample = R"(# top comment
root_key = 1

[netgen]
junctions = 100   # trailing comment
pipes = 127
seed = 18446744073709551615

[scenario]
beta = 0.05
mode = absolute
magnitudes = 0.15 0.3 0.45
window = 0 1 2 3
shuffle = true
label =   spaced   value
)";

}  // namespace

TEST(Config, SectionsAndLookup) {
  ConfigFile cfg = ConfigFile::parse_text(kSample, "sample.cfg");
  // Unnamed top-level section plus the two named ones.
  ASSERT_EQ(cfg.sections().size(), 3u);
  EXPECT_EQ(cfg.sections()[0].name, "");
  EXPECT_EQ(cfg.sections()[1].name, "netgen");
  EXPECT_EQ(cfg.sections()[2].name, "scenario");
  EXPECT_TRUE(cfg.has("netgen", "junctions"));
  EXPECT_FALSE(cfg.has("netgen", "beta"));
  EXPECT_FALSE(cfg.has("missing", "junctions"));
  EXPECT_EQ(cfg.get_int_or("", "root_key", 0), 1);
  EXPECT_EQ(cfg.origin(), "sample.cfg");
}

TEST(Config, TypedGetters) {
  ConfigFile cfg = ConfigFile::parse_text(kSample);
  EXPECT_EQ(cfg.get_int_or("netgen", "junctions", 0), 100);
  EXPECT_EQ(cfg.get_int_or("netgen", "absent", 42), 42);
  EXPECT_EQ(cfg.get_u64_or("netgen", "seed", 0), 18446744073709551615ull);
  EXPECT_DOUBLE_EQ(cfg.get_double_or("scenario", "beta", 0.0), 0.05);
  EXPECT_EQ(cfg.get_string("scenario", "mode"), "absolute");
  EXPECT_EQ(cfg.get_string_or("scenario", "nope", "dflt"), "dflt");
  EXPECT_TRUE(cfg.get_bool_or("scenario", "shuffle", false));
  EXPECT_FALSE(cfg.get_bool_or("scenario", "absent", false));
  // Comments are stripped, internal whitespace survives.
  EXPECT_EQ(cfg.get_string("scenario", "label"), "spaced   value");

  std::vector<double> mags = cfg.get_doubles("scenario", "magnitudes");
  ASSERT_EQ(mags.size(), 3u);
  EXPECT_DOUBLE_EQ(mags[1], 0.3);
  std::vector<int> window = cfg.get_ints("scenario", "window");
  ASSERT_EQ(window.size(), 4u);
  EXPECT_EQ(window[3], 3);
  // Absent list keys give empty vectors, not errors.
  EXPECT_TRUE(cfg.get_doubles("scenario", "absent").empty());
}

TEST(Config, MalformedValuesNameTheKeyAndOrigin) {
  ConfigFile cfg = ConfigFile::parse_text(
      "[a]\nx = notanumber\nb = maybe\n", "bad.cfg");
  try {
    cfg.get_double_or("a", "x", 0.0);
    FAIL() << "expected validation_error";
  } catch (const validation_error& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("bad.cfg"), std::string::npos);
    EXPECT_NE(msg.find("x"), std::string::npos);
  }
  EXPECT_THROW(cfg.get_int_or("a", "x", 0), validation_error);
  EXPECT_THROW(cfg.get_bool_or("a", "b", true), validation_error);
  EXPECT_THROW(cfg.get_string("a", "missing"), validation_error);
}

TEST(Config, ParseErrorsCarryLineNumbers) {
  try {
    ConfigFile::parse_text("[ok]\nkey_without_value\n", "broken.cfg");
    FAIL() << "expected validation_error";
  } catch (const validation_error& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("broken.cfg:2"), std::string::npos);
  }
  EXPECT_THROW(ConfigFile::parse_text("[unterminated\n"), validation_error);
  EXPECT_THROW(ConfigFile::parse_text("= value\n"), validation_error);
}

TEST(Config, DuplicateKeysFirstOneWins) {
  ConfigFile cfg = ConfigFile::parse_text("[s]\nk = 1\nk = 2\n");
  EXPECT_EQ(cfg.get_int_or("s", "k", 0), 1);
}

TEST(Config, HashMatchesRawBytes) {
  std::string text = kSample;
  ConfigFile cfg = ConfigFile::parse_text(text);
  EXPECT_EQ(cfg.hash(), fnv1a64(text.data(), text.size()));
  // Any byte change moves the hash, even inside a comment.
  std::string other = text;
  other[2] = 'T';
  EXPECT_NE(ConfigFile::parse_text(other).hash(), cfg.hash());
}

TEST(Config, FileParseMatchesTextParse) {
  std::string path = testing::TempDir() + "cfg_roundtrip.cfg";
  {
    std::ofstream out(path, std::ios::binary);
    out << kSample;
  }
  ConfigFile from_file = ConfigFile::parse(path);
  ConfigFile from_text = ConfigFile::parse_text(kSample);
  EXPECT_EQ(from_file.hash(), from_text.hash());
  EXPECT_EQ(from_file.origin(), path);
  EXPECT_EQ(file_fnv(path), from_text.hash());
  EXPECT_EQ(from_file.get_int_or("netgen", "pipes", 0), 127);
  EXPECT_THROW(ConfigFile::parse(testing::TempDir() + "no_such.cfg"),
               io_error);
}
