#include <wnfdi/errors.hpp>
#include <wnfdi/netgen.hpp>
#include <wnfdi/residuals.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

using namespace wnfdi;

namespace {

Network small_net() {
  GenSpec spec;
  spec.n_junctions = 8;
  spec.n_pipes = 10;
  spec.seed = 4;
  return generate_network(spec);
}

DatasetSpec base_spec() {
  DatasetSpec spec;
  spec.magnitudes = {0.02, 0.04, 0.06};
  spec.window = default_window();
  spec.beta = 0.02;
  spec.seed = 11;
  return spec;
}

SplitPlan plan(Split split, SplitPlan::Kind kind, int count,
               SplitPlan::ProfilePick prof = SplitPlan::ProfilePick::all,
               SplitPlan::MagnitudePick mag = SplitPlan::MagnitudePick::all,
               bool shuffle = false) {
  SplitPlan p;
  p.split = split;
  p.kind = kind;
  p.count = count;
  p.profiles = prof;
  p.magnitudes = mag;
  p.shuffle = shuffle;
  return p;
}

std::string temp_path(const char* stem) {
  return testing::TempDir() + stem;
}

}  // namespace

TEST(Residuals, ResidualModes) {
  Eigen::Vector3d nominal(10.0, -4.0, 2.0);
  Eigen::Vector3d measured(9.0, -4.5, 2.5);
  Eigen::VectorXd abs = residual(nominal, measured, ResidualMode::absolute);
  EXPECT_DOUBLE_EQ(abs[0], -1.0);
  EXPECT_DOUBLE_EQ(abs[1], -0.5);
  EXPECT_DOUBLE_EQ(abs[2], 0.5);
  Eigen::VectorXd rel = residual(nominal, measured, ResidualMode::relative);
  EXPECT_DOUBLE_EQ(rel[0], -0.1);
  EXPECT_DOUBLE_EQ(rel[1], 0.125);
  EXPECT_DOUBLE_EQ(rel[2], 0.25);
  // Relative mode rejects near-zero baselines.
  Eigen::Vector3d tiny(10.0, 1e-12, 2.0);
  EXPECT_THROW(residual(tiny, measured, ResidualMode::relative),
               validation_error);
  EXPECT_NO_THROW(residual(tiny, measured, ResidualMode::absolute));
  // Length mismatch.
  Eigen::Vector2d shorter(1.0, 2.0);
  EXPECT_THROW(residual(nominal, shorter, ResidualMode::absolute),
               validation_error);
}

TEST(Residuals, NoiselessColumnsMatchScenarioOracle) {
  // With beta = 0 and the nominal profile each column is exactly the head
  // deviation of one (node, magnitude) fault, reproducible via the public
  // scenario API.
  Network net = small_net();
  ProfileBank bank = generate_profiles(4, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.beta = 0.0;
  spec.plans = {plan(Split::train, SplitPlan::Kind::grid, 1,
                     SplitPlan::ProfilePick::nominal)};
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  ASSERT_EQ(rm.cols(), net.n_junctions() * 3);
  ASSERT_TRUE(rm.dropped.empty());

  DemandSpec clean;
  ScenarioResult baseline =
      simulate_scenario(net, bank, 1, spec.window, clean);
  ASSERT_TRUE(baseline.valid);
  for (int j : {0, 5, rm.cols() - 1}) {
    DemandSpec ds;
    ds.fault = FaultSpec{rm.labels[static_cast<std::size_t>(j)],
                         spec.magnitudes[static_cast<std::size_t>(
                             rm.magnitude_index[static_cast<std::size_t>(j)] - 1)]};
    ScenarioResult sr = simulate_scenario(net, bank, 1, spec.window, ds);
    ASSERT_TRUE(sr.valid);
    Eigen::VectorXd want = sr.mean_heads - baseline.mean_heads;
    EXPECT_LE((rm.R.col(j) - want).cwiseAbs().maxCoeff(), 1e-12) << "col " << j;
  }
}

TEST(Residuals, GridEnumerationOrder) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(2, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.plans = {plan(Split::pretrain, SplitPlan::Kind::grid, 2)};
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  // 8 nodes x 2 reps x 2 profiles x 3 magnitudes.
  ASSERT_EQ(rm.cols(), 8 * 2 * 2 * 3);
  int col = 0;
  for (int node = 1; node <= 8; ++node)
    for (int rep = 0; rep < 2; ++rep)
      for (int prof = 1; prof <= 2; ++prof)
        for (int mi = 1; mi <= 3; ++mi, ++col) {
          EXPECT_EQ(rm.labels[static_cast<std::size_t>(col)], node);
          EXPECT_EQ(rm.profile_index[static_cast<std::size_t>(col)], prof);
          EXPECT_EQ(rm.magnitude_index[static_cast<std::size_t>(col)], mi);
          EXPECT_EQ(rm.split[static_cast<std::size_t>(col)], Split::pretrain);
        }
  // Grid plans refuse the random profile pick.
  spec.plans[0].profiles = SplitPlan::ProfilePick::random;
  EXPECT_THROW(build_residual_matrix(net, bank, spec), validation_error);
}

TEST(Residuals, PerClassCyclesMagnitudesThenProfiles) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(2, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.plans = {plan(Split::train, SplitPlan::Kind::per_class, 6)};
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  ASSERT_EQ(rm.cols(), 8 * 6);
  // Within a class the magnitude index cycles fastest and the profile
  // advances once per full magnitude cycle, so 6 columns cover every
  // (magnitude, profile) pair exactly once.
  for (int node = 0; node < 8; ++node) {
    std::set<std::pair<int, int>> seen;
    for (int k = 0; k < 6; ++k) {
      std::size_t col = static_cast<std::size_t>(node * 6 + k);
      EXPECT_EQ(rm.labels[col], node + 1);
      EXPECT_EQ(rm.magnitude_index[col], 1 + k % 3);
      seen.insert({rm.magnitude_index[col], rm.profile_index[col]});
    }
    EXPECT_EQ(seen.size(), 6u);
  }
}

TEST(Residuals, MagnitudeParityPicks) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(2, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.magnitudes = {0.01, 0.02, 0.03, 0.04};
  spec.plans = {plan(Split::pretrain, SplitPlan::Kind::per_class, 4,
                     SplitPlan::ProfilePick::nominal,
                     SplitPlan::MagnitudePick::odd),
                plan(Split::train, SplitPlan::Kind::per_class, 4,
                     SplitPlan::ProfilePick::nominal,
                     SplitPlan::MagnitudePick::even)};
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  for (int j = 0; j < rm.cols(); ++j) {
    int mi = rm.magnitude_index[static_cast<std::size_t>(j)];
    if (rm.split[static_cast<std::size_t>(j)] == Split::pretrain)
      EXPECT_TRUE(mi == 1 || mi == 3) << "col " << j;
    else
      EXPECT_TRUE(mi == 2 || mi == 4) << "col " << j;
  }
  // A pick that selects nothing is rejected.
  spec.magnitudes = {0.01};
  spec.plans = {plan(Split::train, SplitPlan::Kind::per_class, 2,
                     SplitPlan::ProfilePick::nominal,
                     SplitPlan::MagnitudePick::even)};
  EXPECT_THROW(build_residual_matrix(net, bank, spec), validation_error);
}

TEST(Residuals, TotalPlanDrawsEverything) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(5, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.plans = {plan(Split::test, SplitPlan::Kind::total, 300,
                     SplitPlan::ProfilePick::random)};
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  ASSERT_EQ(rm.cols() + static_cast<int>(rm.dropped.size()), 300);
  // With 300 draws over 8 nodes, 3 magnitudes and 5 profiles every value
  // should appear.
  std::set<int> nodes, mags, profs;
  for (int j = 0; j < rm.cols(); ++j) {
    nodes.insert(rm.labels[static_cast<std::size_t>(j)]);
    mags.insert(rm.magnitude_index[static_cast<std::size_t>(j)]);
    profs.insert(rm.profile_index[static_cast<std::size_t>(j)]);
  }
  EXPECT_EQ(nodes.size(), 8u);
  EXPECT_EQ(mags.size(), 3u);
  EXPECT_EQ(profs.size(), 5u);
}

TEST(Residuals, ThreadCountDoesNotChangeData) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(3, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.plans = {plan(Split::pretrain, SplitPlan::Kind::per_class, 5),
                plan(Split::test, SplitPlan::Kind::total, 40,
                     SplitPlan::ProfilePick::random,
                     SplitPlan::MagnitudePick::all, true)};
  ResidualMatrix one = build_residual_matrix(net, bank, spec, 1);
  ResidualMatrix four = build_residual_matrix(net, bank, spec, 4);
  ASSERT_EQ(one.cols(), four.cols());
  EXPECT_EQ(one.labels, four.labels);
  EXPECT_EQ(one.profile_index, four.profile_index);
  EXPECT_TRUE(one.R == four.R);  // bitwise equal, not just close
}

TEST(Residuals, ShuffleReordersWithoutChangingContent) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(3, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.plans = {plan(Split::test, SplitPlan::Kind::per_class, 6)};
  ResidualMatrix plain = build_residual_matrix(net, bank, spec);
  spec.plans[0].shuffle = true;
  ResidualMatrix mixed = build_residual_matrix(net, bank, spec);
  ASSERT_EQ(plain.cols(), mixed.cols());
  EXPECT_NE(plain.labels, mixed.labels);  // order actually changed

  // Same multiset of (label, magnitude, profile, first residual entry).
  using Key = std::tuple<int, int, int, double>;
  std::multiset<Key> a, b;
  for (int j = 0; j < plain.cols(); ++j) {
    a.insert({plain.labels[static_cast<std::size_t>(j)],
              plain.magnitude_index[static_cast<std::size_t>(j)],
              plain.profile_index[static_cast<std::size_t>(j)], plain.R(0, j)});
    b.insert({mixed.labels[static_cast<std::size_t>(j)],
              mixed.magnitude_index[static_cast<std::size_t>(j)],
              mixed.profile_index[static_cast<std::size_t>(j)], mixed.R(0, j)});
  }
  EXPECT_EQ(a, b);

  // And the shuffle itself is seed-stable.
  ResidualMatrix again = build_residual_matrix(net, bank, spec);
  EXPECT_EQ(again.labels, mixed.labels);
  EXPECT_TRUE(again.R == mixed.R);
}

TEST(Residuals, NoiseIsSeededPerScenario) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(3, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.plans = {plan(Split::train, SplitPlan::Kind::per_class, 6,
                     SplitPlan::ProfilePick::nominal)};
  ResidualMatrix a = build_residual_matrix(net, bank, spec);
  ResidualMatrix b = build_residual_matrix(net, bank, spec);
  EXPECT_TRUE(a.R == b.R);
  spec.seed = 12;
  ResidualMatrix c = build_residual_matrix(net, bank, spec);
  EXPECT_FALSE(a.R == c.R);
  // Columns 0 and 3 repeat the same (node, magnitude, profile) triple with
  // different scenario ordinals, so only the noise draw separates them.
  ASSERT_EQ(a.labels[0], a.labels[3]);
  ASSERT_EQ(a.magnitude_index[0], a.magnitude_index[3]);
  ASSERT_EQ(a.profile_index[0], a.profile_index[3]);
  EXPECT_FALSE(a.R.col(0) == a.R.col(3));
}

TEST(Residuals, DropsAreRecordedNotSilent) {
  // A solver iteration cap that the fault-free baseline meets but the
  // hardest faulted scenarios miss: those columns must land in `dropped`.
  GenSpec gs;
  gs.n_junctions = 25;
  gs.n_pipes = 32;
  gs.seed = 2;
  Network net = generate_network(gs);
  ProfileBank bank = generate_profiles(2, 0.1, 7);
  DatasetSpec spec;
  spec.plans = {plan(Split::train, SplitPlan::Kind::grid, 1,
                     SplitPlan::ProfilePick::nominal)};
  spec.magnitudes = {0.05, 0.5, 5.0};
  spec.window = {12};
  spec.beta = 0.0;
  spec.seed = 1;
  spec.solver.max_iter = 25;
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  EXPECT_EQ(rm.cols() + static_cast<int>(rm.dropped.size()), 25 * 3);
  ASSERT_FALSE(rm.dropped.empty());
  for (const DroppedScenario& d : rm.dropped) {
    EXPECT_GE(d.label, 1);
    EXPECT_LE(d.label, 25);
    EXPECT_GE(d.magnitude_index, 1);
    EXPECT_LE(d.magnitude_index, 3);
    EXPECT_EQ(d.profile_index, 1);
    EXPECT_EQ(d.split, Split::train);
  }
  // The same cap applied to everything kills the baseline -> hard error.
  spec.solver.max_iter = 5;
  EXPECT_THROW(build_residual_matrix(net, bank, spec), numerical_error);
}

TEST(Residuals, BinarizePolicies) {
  // Hand-built residuals: 3 junctions, 2 classes, 2 columns per class.
  ResidualMatrix rm;
  rm.R.resize(3, 4);
  // class 1 columns: sensor 1 fires twice, sensor 2 fires once, sensor 3 never
  // class 2 columns: sensor 2 fires twice, sensor 3 fires once (negative side)
  rm.R << 5.0, -6.0, 1.0, 2.0,
          3.1, 2.0, 4.0, -9.0,
          0.5, 2.9, 1.0, -3.3;
  rm.labels = {1, 1, 2, 2};
  rm.magnitude_index = {1, 1, 1, 1};
  rm.profile_index = {1, 1, 1, 1};
  rm.split = {Split::train, Split::train, Split::train, Split::train};
  rm.magnitudes = {0.1};
  rm.n_profiles = 1;
  rm.window = {0};

  SignatureMatrix any = binarize(rm, 3.0, BinarizePolicy::any);
  ASSERT_EQ(any.M.rows(), 3);
  ASSERT_EQ(any.M.cols(), 3);
  Eigen::MatrixXi want_any(3, 3);
  want_any << 1, 0, 0,
              1, 1, 0,
              0, 1, 0;
  EXPECT_TRUE(any.M == want_any);

  SignatureMatrix all = binarize(rm, 3.0, BinarizePolicy::all);
  Eigen::MatrixXi want_all(3, 3);
  want_all << 1, 0, 0,
              0, 1, 0,
              0, 0, 0;
  EXPECT_TRUE(all.M == want_all);

  // Majority needs strictly more than half: with two columns that means both.
  SignatureMatrix maj = binarize(rm, 3.0, BinarizePolicy::majority);
  EXPECT_TRUE(maj.M == want_all);

  EXPECT_THROW(binarize(rm, -1.0, BinarizePolicy::any), validation_error);
}

TEST(Residuals, SaveLoadRoundTrip) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(3, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.config_hash = 0xabcdef01;
  spec.network_hash = 0x12345678;
  spec.plans = {plan(Split::pretrain, SplitPlan::Kind::per_class, 3),
                plan(Split::test, SplitPlan::Kind::total, 20,
                     SplitPlan::ProfilePick::random,
                     SplitPlan::MagnitudePick::all, true)};
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  rm.dropped.push_back({3, 2, 1, Split::test});  // exercise drop records too

  for (PayloadFormat fmt : {PayloadFormat::binary, PayloadFormat::text}) {
    std::string path = temp_path(fmt == PayloadFormat::binary ? "ds.bin.wds"
                                                              : "ds.txt.wds");
    std::uint64_t saved_hash = save_dataset(rm, path, fmt);
    std::uint64_t loaded_hash = 0;
    ResidualMatrix got = load_dataset(path, &loaded_hash);
    EXPECT_EQ(saved_hash, loaded_hash);
    EXPECT_TRUE(got.R == rm.R) << "payload not exact";
    EXPECT_EQ(got.labels, rm.labels);
    EXPECT_EQ(got.magnitude_index, rm.magnitude_index);
    EXPECT_EQ(got.profile_index, rm.profile_index);
    EXPECT_EQ(got.split, rm.split);
    EXPECT_EQ(got.mode, rm.mode);
    EXPECT_EQ(got.magnitudes, rm.magnitudes);
    EXPECT_EQ(got.seed, rm.seed);
    EXPECT_EQ(got.config_hash, rm.config_hash);
    EXPECT_EQ(got.network_hash, rm.network_hash);
    EXPECT_EQ(got.beta, rm.beta);
    EXPECT_EQ(got.n_profiles, rm.n_profiles);
    EXPECT_EQ(got.window, rm.window);
    ASSERT_EQ(got.dropped.size(), rm.dropped.size());
    EXPECT_EQ(got.dropped.back().label, 3);
    EXPECT_EQ(got.dropped.back().split, Split::test);

    // Saving the loaded copy reproduces the same bytes (and hash).
    std::string path2 = temp_path("ds2.wds");
    EXPECT_EQ(save_dataset(got, path2, fmt), saved_hash);
  }
}

TEST(Residuals, LoadRejectsCorruptFiles) {
  Network net = small_net();
  ProfileBank bank = generate_profiles(2, 0.1, 21);
  DatasetSpec spec = base_spec();
  spec.plans = {plan(Split::train, SplitPlan::Kind::per_class, 2)};
  ResidualMatrix rm = build_residual_matrix(net, bank, spec);
  std::string path = temp_path("corrupt.wds");
  save_dataset(rm, path, PayloadFormat::binary);

  // Truncate the payload.
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 16));
  out.close();
  EXPECT_THROW(load_dataset(path), io_error);

  EXPECT_THROW(load_dataset(temp_path("does_not_exist.wds")), io_error);
}
