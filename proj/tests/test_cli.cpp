#include <wnfdi/placement.hpp>
#include <wnfdi/residuals.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

// Exercises the installed command-line binary end to end through a
// subprocess; WNFDI_CLI_PATH is injected by the build.

using namespace wnfdi;

namespace {

int run_cli(const std::string& args, std::string* output = nullptr) {
  std::string cmd = std::string(WNFDI_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return -1;
  std::string acc;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) acc.append(buf, n);
  int status = pclose(pipe);
  if (output != nullptr) *output = acc;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

const char* kTinyConfig = R"([network]
source = generate

[netgen]
junctions = 8
pipes = 10
seed = 4

[profiles]
count = 2
beta = 0.02

[scenario]
seed = 11
beta = 0.02
mode = absolute
magnitudes = 0.02 0.04
window = 12 13

[dataset]
pretrain = per_class 2 profiles=nominal magnitudes=all
train = per_class 1 profiles=random magnitudes=all
test = total 16 profiles=random shuffle=true
)";

// One shared workspace for the whole file; generated once.
struct CliWorkspace {
  std::string dir, cfg;
  CliWorkspace() {
    dir = testing::TempDir() + "cli_ws/";
    cfg = dir + "tiny.cfg";
    std::string out;
    write_file_once();
    int rc = run_cli("generate " + cfg + " -o " + dir + "run_a", &out);
    if (rc != 0) ADD_FAILURE() << "generate failed:\n" << out;
  }
  void write_file_once() {
    std::filesystem::create_directories(dir);
    write_file(cfg, kTinyConfig);
  }
};

CliWorkspace& workspace() {
  static CliWorkspace ws;
  return ws;
}

}  // namespace

TEST(Cli, GenerateWritesNetworkAndDataset) {
  CliWorkspace& ws = workspace();
  std::string out;
  ASSERT_EQ(run_cli("generate " + ws.cfg + " -o " + ws.dir + "run_echo", &out),
            0);
  EXPECT_NE(out.find("network: 8 junctions"), std::string::npos);
  EXPECT_NE(out.find("dataset hash: "), std::string::npos);
  // 8*2*2 pretrain + 8 train + 16 test
  EXPECT_NE(out.find("48 columns (32 pretrain / 8 train / 16 test)"),
            std::string::npos)
      << out;

  ResidualMatrix rm = load_dataset(ws.dir + "run_a/dataset.wds");
  EXPECT_EQ(rm.rows(), 8);
  EXPECT_EQ(rm.cols(), 48);
}

TEST(Cli, RerunsAreByteIdentical) {
  CliWorkspace& ws = workspace();
  ASSERT_EQ(run_cli("generate " + ws.cfg + " -o " + ws.dir + "run_b"), 0);
  EXPECT_EQ(read_file(ws.dir + "run_a/dataset.wds"),
            read_file(ws.dir + "run_b/dataset.wds"));
  EXPECT_EQ(read_file(ws.dir + "run_a/network.net"),
            read_file(ws.dir + "run_b/network.net"));
  // Thread count must not change the bytes either.
  ASSERT_EQ(run_cli("--threads 4 generate " + ws.cfg + " -o " + ws.dir +
                    "run_c"),
            0);
  EXPECT_EQ(read_file(ws.dir + "run_a/dataset.wds"),
            read_file(ws.dir + "run_c/dataset.wds"));
}

TEST(Cli, SeedOverrideChangesTheData) {
  CliWorkspace& ws = workspace();
  std::string out;
  ASSERT_EQ(run_cli("--seed 99 generate " + ws.cfg + " -o " + ws.dir +
                    "run_seed", &out),
            0);
  EXPECT_NE(read_file(ws.dir + "run_a/dataset.wds"),
            read_file(ws.dir + "run_seed/dataset.wds"));
}

TEST(Cli, TextFormatHoldsTheSameData) {
  CliWorkspace& ws = workspace();
  ASSERT_EQ(run_cli("--format text generate " + ws.cfg + " -o " + ws.dir +
                    "run_text"),
            0);
  ResidualMatrix bin = load_dataset(ws.dir + "run_a/dataset.wds");
  ResidualMatrix txt = load_dataset(ws.dir + "run_text/dataset.wds");
  EXPECT_TRUE(bin.R == txt.R);  // shortest-round-trip text is lossless
  EXPECT_EQ(bin.labels, txt.labels);
  EXPECT_EQ(bin.split, txt.split);
}

TEST(Cli, PlaceTrainEvalReportFlow) {
  CliWorkspace& ws = workspace();
  std::string data = " --dataset " + ws.dir + "run_a/dataset.wds" +
                     " --network " + ws.dir + "run_a/network.net";
  std::string out;
  ASSERT_EQ(run_cli("place" + data +
                        " --method graph-gs -s 3 --lambda 10 -o " + ws.dir +
                        "gs3.sel",
                    &out),
            0)
      << out;
  SensorSelection sel = load_selection(ws.dir + "gs3.sel");
  EXPECT_EQ(sel.indices.size(), 3u);
  EXPECT_EQ(sel.method, PlacementMethod::graph_gs);

  ASSERT_EQ(run_cli("place" + data + " --method msc -s 3 --tau 0.001 -o " +
                        ws.dir + "msc3.sel",
                    &out),
            0)
      << out;

  ASSERT_EQ(run_cli("train-eval" + data + " --selection " + ws.dir +
                        "gs3.sel --atoms-per-class 1 --shared-atoms 0" +
                        " --iters-class 2 --iters-full 3 --sparsity 2" +
                        " --model-out " + ws.dir + "gs3.wdm --report-out " +
                        ws.dir + "gs3.wrp",
                    &out),
            0)
      << out;
  EXPECT_NE(out.find("exact "), std::string::npos);
  EXPECT_TRUE(std::ifstream(ws.dir + "gs3.wdm").good());

  ASSERT_EQ(run_cli("report " + ws.dir + "gs3.wrp --table " + ws.dir +
                        "table.txt",
                    &out),
            0)
      << out;
  std::string table = read_file(ws.dir + "table.txt");
  EXPECT_NE(table.find("graph-gs"), std::string::npos);
  EXPECT_NE(table.find("s1"), std::string::npos);
}

TEST(Cli, ValidationErrorsExitWithTwo) {
  CliWorkspace& ws = workspace();
  // magnitudes are required for generated networks
  std::string cfg = ws.dir + "nomags.cfg";
  write_file(cfg, "[network]\nsource = generate\n[netgen]\njunctions = 8\n"
                  "pipes = 10\n[dataset]\ntrain = grid repeats=1\n");
  std::string out;
  EXPECT_EQ(run_cli("generate " + cfg + " -o " + ws.dir + "bad", &out), 2);
  EXPECT_NE(out.find("error: "), std::string::npos);
  EXPECT_NE(out.find("magnitudes"), std::string::npos);
}

TEST(Cli, NumericalErrorsExitWithThree) {
  CliWorkspace& ws = workspace();
  // One Newton iteration cannot converge the nominal solve.
  std::string cfg = ws.dir + "stall.cfg";
  std::string text = kTinyConfig;
  text += "\n[solver]\nmax_iter = 1\n";
  write_file(cfg, text);
  std::string out;
  EXPECT_EQ(run_cli("generate " + cfg + " -o " + ws.dir + "stall", &out), 3);
  EXPECT_NE(out.find("error: "), std::string::npos);
}

TEST(Cli, IoErrorsExitWithFour) {
  CliWorkspace& ws = workspace();
  std::string out;
  EXPECT_EQ(run_cli("generate " + ws.dir + "no_such.cfg -o " + ws.dir, &out),
            4);
  EXPECT_EQ(run_cli("place --dataset " + ws.dir +
                        "nope.wds --network " + ws.dir +
                        "run_a/network.net -s 2 -o " + ws.dir + "x.sel",
                    &out),
            4);
}

TEST(Cli, UsageErrorsAreNotOurExitCodes) {
  std::string out;
  int rc = run_cli("definitely-not-a-subcommand", &out);
  EXPECT_NE(rc, 0);
  EXPECT_NE(rc, 2);
  EXPECT_NE(rc, 3);
  EXPECT_NE(rc, 4);
}
