#include "wnfdi/residuals.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <thread>

#include "wnfdi/errors.hpp"
#include "wnfdi/random.hpp"
#include "textio.hpp"

namespace wnfdi {

namespace tio = textio;

Eigen::VectorXd residual(const Eigen::VectorXd& nominal,
                         const Eigen::VectorXd& measured, ResidualMode mode,
                         double guard) {
  if (nominal.size() != measured.size())
    throw validation_error("residual: vector length mismatch");
  Eigen::VectorXd r = measured - nominal;
  if (mode == ResidualMode::relative) {
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (std::abs(nominal(i)) <= guard)
        throw validation_error(
            "relative residual undefined: nominal head at node " +
            tio::fmt(static_cast<int>(i + 1)) + " is within " +
            tio::fmt(guard) + " of zero");
      r(i) /= nominal(i);
    }
  }
  return r;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::pretrain: return "pretrain";
    case Split::train: return "train";
    case Split::test: return "test";
  }
  return "?";
}

namespace {

// Seed stream layout: plans and their shuffles use low stream ids, scenario
// noise streams start at kScenarioStream + column ordinal.
constexpr std::uint64_t kPlanStream = 0x100;
constexpr std::uint64_t kShuffleStream = 0x200;
constexpr std::uint64_t kScenarioStream = 1ull << 20;

struct Planned {
  int label = 0;
  int mag_index = 0;
  int prof_index = 0;
  Split split = Split::train;
  std::uint64_t stream = 0;
};

std::vector<int> magnitude_pick(SplitPlan::MagnitudePick pick, int m) {
  std::vector<int> out;
  for (int i = 1; i <= m; ++i) {
    bool take = pick == SplitPlan::MagnitudePick::all ||
                (pick == SplitPlan::MagnitudePick::even && i % 2 == 0) ||
                (pick == SplitPlan::MagnitudePick::odd && i % 2 == 1);
    if (take) out.push_back(i);
  }
  return out;
}

std::vector<Planned> enumerate_scenarios(const Network& net,
                                         const ProfileBank& bank,
                                         const DatasetSpec& spec) {
  const int n = net.n_junctions();
  const int n_mag = static_cast<int>(spec.magnitudes.size());
  const int n_prof = bank.n_profiles();
  if (n_mag < 1) throw validation_error("dataset spec has no magnitudes");
  if (spec.plans.empty()) throw validation_error("dataset spec has no plans");

  std::vector<Planned> out;
  std::uint64_t ordinal = 0;
  for (std::size_t pi = 0; pi < spec.plans.size(); ++pi) {
    const SplitPlan& plan = spec.plans[pi];
    if (plan.count < 1)
      throw validation_error("plan count must be positive");
    std::vector<int> mags = magnitude_pick(plan.magnitudes, n_mag);
    if (mags.empty())
      throw validation_error("magnitude pick selects no magnitudes");
    SplitMix64 plan_rng(derive_seed(spec.seed, kPlanStream + pi));
    std::size_t plan_begin = out.size();

    auto push = [&](int label, int mi, int prof) {
      out.push_back({label, mi, prof, plan.split, ordinal++});
    };
    auto pick_profile = [&](int k) {
      switch (plan.profiles) {
        case SplitPlan::ProfilePick::nominal: return 1;
        case SplitPlan::ProfilePick::random:
          return 1 + static_cast<int>(plan_rng.below(
                         static_cast<std::uint64_t>(n_prof)));
        case SplitPlan::ProfilePick::all: return 1 + (k % n_prof);
      }
      return 1;
    };

    switch (plan.kind) {
      case SplitPlan::Kind::grid: {
        if (plan.profiles == SplitPlan::ProfilePick::random)
          throw validation_error(
              "grid plans enumerate profiles; use pick nominal or all");
        std::vector<int> profs;
        if (plan.profiles == SplitPlan::ProfilePick::nominal)
          profs = {1};
        else
          for (int p = 1; p <= n_prof; ++p) profs.push_back(p);
        for (int node = 1; node <= n; ++node)
          for (int rep = 0; rep < plan.count; ++rep)
            for (int prof : profs)
              for (int mi : mags) push(node, mi, prof);
        break;
      }
      case SplitPlan::Kind::per_class:
        for (int node = 1; node <= n; ++node)
          for (int k = 0; k < plan.count; ++k)
            // The profile cycle advances once per full magnitude cycle so
            // `all` covers every (magnitude, profile) pair.
            push(node, mags[static_cast<std::size_t>(k) % mags.size()],
                 pick_profile(k / static_cast<int>(mags.size())));
        break;
      case SplitPlan::Kind::total:
        for (int k = 0; k < plan.count; ++k) {
          int node =
              1 + static_cast<int>(plan_rng.below(static_cast<std::uint64_t>(n)));
          int mi = mags[static_cast<std::size_t>(
              plan_rng.below(mags.size()))];
          push(node, mi, pick_profile(k));
        }
        break;
    }

    if (plan.shuffle) {
      SplitMix64 rng(derive_seed(spec.seed, kShuffleStream + pi));
      // Fisher-Yates over this plan's slice only.
      for (std::size_t i = out.size() - plan_begin; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(out[plan_begin + i - 1], out[plan_begin + j]);
      }
    }
  }
  return out;
}

}  // namespace

ResidualMatrix build_residual_matrix(const Network& net,
                                     const ProfileBank& bank,
                                     const DatasetSpec& spec, int threads) {
  const int n = net.n_junctions();
  if (spec.window.empty())
    throw validation_error("dataset spec has an empty window");
  if (!(spec.beta >= 0) || spec.beta >= 1)
    throw validation_error("demand uncertainty level must be in [0, 1)");

  std::vector<Planned> scenarios = enumerate_scenarios(net, bank, spec);

  // Fault-free baseline: nominal profile, no noise. This must converge.
  DemandSpec base_spec;
  base_spec.total_inflow_m3s = spec.total_inflow_m3s;
  ScenarioResult baseline = simulate_scenario(net, bank, 1, spec.window,
                                              base_spec, spec.solver);
  if (!baseline.valid)
    throw numerical_error(
        "fault-free baseline scenario did not converge; check the network "
        "and solver options");

  const std::size_t count = scenarios.size();
  std::vector<Eigen::VectorXd> heads(count);
  std::vector<char> ok(count, 0);

  auto solve_range = [&](std::size_t begin, std::size_t end,
                         std::exception_ptr& err) {
    try {
      for (std::size_t k = begin; k < end; ++k) {
        const Planned& sc = scenarios[k];
        DemandSpec ds;
        ds.total_inflow_m3s = spec.total_inflow_m3s;
        if (spec.beta > 0) {
          SplitMix64 rng(derive_seed(spec.seed, kScenarioStream + sc.stream));
          ds.noise.resize(n);
          for (int i = 0; i < n; ++i)
            ds.noise(i) =
                net.junctions[static_cast<std::size_t>(i)].base_demand_m3s *
                rng.uniform(-spec.beta, spec.beta);
        }
        FaultSpec fault;
        fault.node = sc.label;
        fault.magnitude_m3s =
            spec.magnitudes[static_cast<std::size_t>(sc.mag_index - 1)];
        ds.fault = fault;
        ScenarioResult res = simulate_scenario(net, bank, sc.prof_index,
                                               spec.window, ds, spec.solver);
        heads[k] = res.mean_heads;
        ok[k] = res.valid ? 1 : 0;
      }
    } catch (...) {
      err = std::current_exception();
    }
  };

  int n_threads = std::max(1, threads);
  n_threads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(n_threads), count ? count : 1));
  if (n_threads <= 1) {
    std::exception_ptr err;
    solve_range(0, count, err);
    if (err) std::rethrow_exception(err);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n_threads));
    std::size_t chunk = (count + static_cast<std::size_t>(n_threads) - 1) /
                        static_cast<std::size_t>(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      std::size_t begin = static_cast<std::size_t>(t) * chunk;
      std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(solve_range, begin, end,
                        std::ref(errs[static_cast<std::size_t>(t)]));
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  ResidualMatrix rm;
  rm.mode = spec.mode;
  rm.magnitudes = spec.magnitudes;
  rm.seed = spec.seed;
  rm.config_hash = spec.config_hash;
  rm.network_hash = spec.network_hash;
  rm.beta = spec.beta;
  rm.n_profiles = bank.n_profiles();
  rm.window = spec.window;

  std::size_t kept = 0;
  for (std::size_t k = 0; k < count; ++k) kept += ok[k] ? 1u : 0u;
  rm.R.resize(n, static_cast<Eigen::Index>(kept));
  rm.labels.reserve(kept);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const Planned& sc = scenarios[k];
    if (!ok[k]) {
      rm.dropped.push_back({sc.label, sc.mag_index, sc.prof_index, sc.split});
      continue;
    }
    rm.R.col(col++) = residual(baseline.mean_heads, heads[k], spec.mode);
    rm.labels.push_back(sc.label);
    rm.magnitude_index.push_back(sc.mag_index);
    rm.profile_index.push_back(sc.prof_index);
    rm.split.push_back(sc.split);
  }
  return rm;
}

SignatureMatrix binarize(const ResidualMatrix& rm, double tau,
                         BinarizePolicy policy) {
  if (!(tau >= 0)) throw validation_error("binarize threshold must be >= 0");
  const int n = rm.rows();
  SignatureMatrix sig;
  sig.tau = tau;
  sig.policy = policy;
  sig.M = Eigen::MatrixXi::Zero(n, n);

  Eigen::MatrixXi hits = Eigen::MatrixXi::Zero(n, n);  // (node, class)
  Eigen::VectorXi class_cols = Eigen::VectorXi::Zero(n);
  for (int j = 0; j < rm.cols(); ++j) {
    int cls = rm.labels[static_cast<std::size_t>(j)];
    if (cls < 1 || cls > n)
      throw validation_error("fault label out of range: " + tio::fmt(cls));
    class_cols(cls - 1) += 1;
    for (int i = 0; i < n; ++i)
      if (std::abs(rm.R(i, j)) >= tau) hits(i, cls - 1) += 1;
  }
  for (int c = 0; c < n; ++c) {
    int total = class_cols(c);
    if (total == 0) continue;  // class absent: all-zero signature column
    for (int i = 0; i < n; ++i) {
      int h = hits(i, c);
      bool on = false;
      switch (policy) {
        case BinarizePolicy::any: on = h > 0; break;
        case BinarizePolicy::all: on = h == total; break;
        case BinarizePolicy::majority: on = 2 * h > total; break;
      }
      sig.M(i, c) = on ? 1 : 0;
    }
  }
  return sig;
}

namespace {

const char* mode_name(ResidualMode m) {
  return m == ResidualMode::absolute ? "absolute" : "relative";
}

void append_le(std::string& buf, const void* p, std::size_t size) {
  static_assert(std::endian::native == std::endian::little,
                "binary dataset payload assumes a little-endian host");
  buf.append(static_cast<const char*>(p), size);
}

[[noreturn]] void corrupt(const std::string& path, const std::string& what) {
  throw io_error("corrupt dataset file " + path + ": " + what);
}

}  // namespace

std::uint64_t save_dataset(const ResidualMatrix& rm, const std::string& path,
                           PayloadFormat format) {
  std::string out;
  out += "wnfdi-dataset v1\n";
  out += "rows = " + tio::fmt(rm.rows()) + "\n";
  out += "cols = " + tio::fmt(rm.cols()) + "\n";
  out += std::string("mode = ") + mode_name(rm.mode) + "\n";
  out += std::string("payload = ") +
         (format == PayloadFormat::binary ? "binary" : "text") + "\n";
  out += "seed = " + tio::fmt(rm.seed) + "\n";
  out += "config_hash = " + tio::hex64(rm.config_hash) + "\n";
  out += "network_hash = " + tio::hex64(rm.network_hash) + "\n";
  out += "beta = " + tio::fmt(rm.beta) + "\n";
  out += "n_profiles = " + tio::fmt(rm.n_profiles) + "\n";
  out += "window =";
  for (int t : rm.window) out += " " + tio::fmt(t);
  out += "\nmagnitudes =";
  for (double m : rm.magnitudes) out += " " + tio::fmt(m);
  out += "\ndropped = " + tio::fmt(static_cast<int>(rm.dropped.size())) + "\n";
  for (const DroppedScenario& d : rm.dropped)
    out += "drop = " + tio::fmt(d.label) + " " + tio::fmt(d.magnitude_index) +
           " " + tio::fmt(d.profile_index) + " " + split_name(d.split) + "\n";
  out += "columns:\n";

  if (format == PayloadFormat::text) {
    for (int j = 0; j < rm.cols(); ++j) {
      out += tio::fmt(rm.labels[static_cast<std::size_t>(j)]) + " " +
             tio::fmt(rm.magnitude_index[static_cast<std::size_t>(j)]) + " " +
             tio::fmt(rm.profile_index[static_cast<std::size_t>(j)]) + " " +
             split_name(rm.split[static_cast<std::size_t>(j)]);
      for (int i = 0; i < rm.rows(); ++i)
        out += " " + tio::fmt(rm.R(i, j));
      out += "\n";
    }
  } else {
    for (int j = 0; j < rm.cols(); ++j) {
      std::int32_t label = rm.labels[static_cast<std::size_t>(j)];
      std::int32_t mi = rm.magnitude_index[static_cast<std::size_t>(j)];
      std::int32_t pi = rm.profile_index[static_cast<std::size_t>(j)];
      std::uint8_t sp =
          static_cast<std::uint8_t>(rm.split[static_cast<std::size_t>(j)]);
      append_le(out, &label, 4);
      append_le(out, &mi, 4);
      append_le(out, &pi, 4);
      append_le(out, &sp, 1);
      for (int i = 0; i < rm.rows(); ++i) {
        double v = rm.R(i, j);
        append_le(out, &v, 8);
      }
    }
  }
  tio::write_file(path, out);
  return fnv1a64(out.data(), out.size());
}

ResidualMatrix load_dataset(const std::string& path,
                            std::uint64_t* file_hash) {
  std::string data = tio::read_file(path);
  if (file_hash != nullptr) *file_hash = fnv1a64(data.data(), data.size());

  // Scan header lines manually so the binary payload offset is exact.
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= data.size()) corrupt(path, "unexpected end of file");
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) nl = data.size();
    std::string_view line(data.data() + pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  if (next_line() != "wnfdi-dataset v1") corrupt(path, "bad signature line");

  ResidualMatrix rm;
  int rows = -1, cols = -1, n_dropped = 0;
  PayloadFormat format = PayloadFormat::text;
  bool have_payload = false;
  while (true) {
    std::string_view line = next_line();
    if (line == "columns:") break;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) corrupt(path, "malformed header line");
    std::string key(tio::trim(line.substr(0, eq)));
    std::string_view val = tio::trim(line.substr(eq + 1));
    auto fields = tio::split_ws(val);
    if (key == "rows") {
      if (!tio::parse_int(val, rows) || rows < 1) corrupt(path, "bad rows");
    } else if (key == "cols") {
      if (!tio::parse_int(val, cols) || cols < 0) corrupt(path, "bad cols");
    } else if (key == "mode") {
      if (val == "absolute") rm.mode = ResidualMode::absolute;
      else if (val == "relative") rm.mode = ResidualMode::relative;
      else corrupt(path, "unknown residual mode");
    } else if (key == "payload") {
      have_payload = true;
      if (val == "text") format = PayloadFormat::text;
      else if (val == "binary") format = PayloadFormat::binary;
      else corrupt(path, "unknown payload format");
    } else if (key == "seed") {
      if (!tio::parse_u64(val, rm.seed)) corrupt(path, "bad seed");
    } else if (key == "config_hash") {
      if (!tio::parse_hex64(val, rm.config_hash)) corrupt(path, "bad hash");
    } else if (key == "network_hash") {
      if (!tio::parse_hex64(val, rm.network_hash)) corrupt(path, "bad hash");
    } else if (key == "beta") {
      if (!tio::parse_double(val, rm.beta)) corrupt(path, "bad beta");
    } else if (key == "n_profiles") {
      if (!tio::parse_int(val, rm.n_profiles)) corrupt(path, "bad n_profiles");
    } else if (key == "window") {
      for (auto f : fields) {
        int t;
        if (!tio::parse_int(f, t)) corrupt(path, "bad window index");
        rm.window.push_back(t);
      }
    } else if (key == "magnitudes") {
      for (auto f : fields) {
        double m;
        if (!tio::parse_double(f, m)) corrupt(path, "bad magnitude");
        rm.magnitudes.push_back(m);
      }
    } else if (key == "dropped") {
      if (!tio::parse_int(val, n_dropped) || n_dropped < 0)
        corrupt(path, "bad dropped count");
    } else if (key == "drop") {
      DroppedScenario d;
      if (fields.size() != 4 || !tio::parse_int(fields[0], d.label) ||
          !tio::parse_int(fields[1], d.magnitude_index) ||
          !tio::parse_int(fields[2], d.profile_index))
        corrupt(path, "bad drop record");
      if (fields[3] == "pretrain") d.split = Split::pretrain;
      else if (fields[3] == "train") d.split = Split::train;
      else if (fields[3] == "test") d.split = Split::test;
      else corrupt(path, "bad drop split");
      rm.dropped.push_back(d);
    } else {
      corrupt(path, "unknown header key '" + key + "'");
    }
  }
  if (rows < 1 || cols < 0 || !have_payload)
    corrupt(path, "incomplete header");
  if (static_cast<int>(rm.dropped.size()) != n_dropped)
    corrupt(path, "dropped count does not match drop records");

  rm.R.resize(rows, cols);
  rm.labels.reserve(static_cast<std::size_t>(cols));

  auto push_split = [&](Split s) { rm.split.push_back(s); };

  if (format == PayloadFormat::text) {
    for (int j = 0; j < cols; ++j) {
      std::string_view line = next_line();
      auto fields = tio::split_ws(line);
      if (static_cast<int>(fields.size()) != 4 + rows)
        corrupt(path, "column line has wrong field count");
      int label, mi, pi;
      if (!tio::parse_int(fields[0], label) ||
          !tio::parse_int(fields[1], mi) || !tio::parse_int(fields[2], pi))
        corrupt(path, "bad column metadata");
      rm.labels.push_back(label);
      rm.magnitude_index.push_back(mi);
      rm.profile_index.push_back(pi);
      if (fields[3] == "pretrain") push_split(Split::pretrain);
      else if (fields[3] == "train") push_split(Split::train);
      else if (fields[3] == "test") push_split(Split::test);
      else corrupt(path, "bad column split");
      for (int i = 0; i < rows; ++i) {
        double v;
        if (!tio::parse_double(fields[static_cast<std::size_t>(4 + i)], v))
          corrupt(path, "bad column value");
        rm.R(i, j) = v;
      }
    }
  } else {
    const std::size_t rec = 13 + 8 * static_cast<std::size_t>(rows);
    if (data.size() - pos < rec * static_cast<std::size_t>(cols))
      corrupt(path, "binary payload truncated");
    const char* p = data.data() + pos;
    for (int j = 0; j < cols; ++j) {
      std::int32_t label, mi, pi;
      std::uint8_t sp;
      std::memcpy(&label, p, 4);
      std::memcpy(&mi, p + 4, 4);
      std::memcpy(&pi, p + 8, 4);
      std::memcpy(&sp, p + 12, 1);
      p += 13;
      if (sp > 2) corrupt(path, "bad column split byte");
      rm.labels.push_back(label);
      rm.magnitude_index.push_back(mi);
      rm.profile_index.push_back(pi);
      push_split(static_cast<Split>(sp));
      for (int i = 0; i < rows; ++i) {
        double v;
        std::memcpy(&v, p, 8);
        p += 8;
        rm.R(i, j) = v;
      }
    }
  }
  return rm;
}

}  // namespace wnfdi
