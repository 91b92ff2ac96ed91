#include "wnfdi/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "wnfdi/errors.hpp"
#include "wnfdi/netgen.hpp"
#include "wnfdi/random.hpp"
#include "textio.hpp"

namespace wnfdi {

namespace {

// Demand profiles get their own seed stream so dataset scenario streams
// cannot collide with the per-profile draws.
constexpr std::uint64_t kProfileStream = 0x40;

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

NetworkFormat parse_format(const std::string& s, const std::string& what) {
  if (s == "native") return NetworkFormat::native;
  if (s == "inp") return NetworkFormat::inp_subset;
  throw validation_error(what + " must be 'native' or 'inp' (got '" + s + "')");
}

Network load_configured_network(const ConfigFile& cfg, std::uint64_t seed) {
  const std::string source = cfg.get_string_or("network", "source", "hanoi");
  if (source == "hanoi") return hanoi_like_network();
  if (source == "file") {
    const std::string path = cfg.get_string("network", "path");
    const NetworkFormat format = parse_format(
        cfg.get_string_or("network", "format", "native"), "[network] format");
    return parse_network(path, format);
  }
  if (source == "generate") {
    GenSpec g;
    g.n_junctions = cfg.get_int_or("netgen", "junctions", g.n_junctions);
    g.n_pipes = cfg.get_int_or("netgen", "pipes", g.n_pipes);
    g.seed = cfg.get_u64_or("netgen", "seed", seed);
    g.tank_head_m = cfg.get_double_or("netgen", "tank_head", g.tank_head_m);
    g.length_min_m = cfg.get_double_or("netgen", "length_min", g.length_min_m);
    g.length_max_m = cfg.get_double_or("netgen", "length_max", g.length_max_m);
    if (cfg.has("netgen", "diameters"))
      g.diameter_set_m = cfg.get_doubles("netgen", "diameters");
    g.roughness_min = cfg.get_double_or("netgen", "roughness_min",
                                        g.roughness_min);
    g.roughness_max = cfg.get_double_or("netgen", "roughness_max",
                                        g.roughness_max);
    g.demand_min_m3s = cfg.get_double_or("netgen", "demand_min",
                                         g.demand_min_m3s);
    g.demand_max_m3s = cfg.get_double_or("netgen", "demand_max",
                                         g.demand_max_m3s);
    return generate_network(g);
  }
  throw validation_error(
      "[network] source must be 'hanoi', 'generate' or 'file' (got '" +
      source + "')");
}

SplitPlan parse_plan(Split split, const std::string& line,
                     const std::string& key) {
  SplitPlan plan;
  plan.split = split;
  const std::vector<std::string_view> tok = textio::split_ws(line);
  if (tok.empty())
    throw validation_error("[dataset] " + key + ": empty plan");

  std::size_t next = 1;
  if (tok[0] == "grid") {
    plan.kind = SplitPlan::Kind::grid;
    plan.count = 1;
  } else if (tok[0] == "per_class" || tok[0] == "total") {
    plan.kind = tok[0] == "per_class" ? SplitPlan::Kind::per_class
                                      : SplitPlan::Kind::total;
    if (tok.size() < 2 || !textio::parse_int(tok[1], plan.count))
      throw validation_error("[dataset] " + key + ": '" +
                             std::string(tok[0]) + "' needs an integer count");
    next = 2;
  } else {
    throw validation_error("[dataset] " + key +
                           ": plan must start with grid, per_class or total "
                           "(got '" + std::string(tok[0]) + "')");
  }
  if (plan.count < 1)
    throw validation_error("[dataset] " + key + ": count must be positive");

  for (std::size_t i = next; i < tok.size(); ++i) {
    const std::string_view t = tok[i];
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos)
      throw validation_error("[dataset] " + key + ": expected option=value, "
                             "got '" + std::string(t) + "'");
    const std::string_view opt = t.substr(0, eq);
    const std::string_view val = t.substr(eq + 1);
    if (opt == "repeats") {
      if (plan.kind != SplitPlan::Kind::grid)
        throw validation_error("[dataset] " + key +
                               ": repeats= only applies to grid plans");
      if (!textio::parse_int(val, plan.count) || plan.count < 1)
        throw validation_error("[dataset] " + key +
                               ": repeats must be a positive integer");
    } else if (opt == "profiles") {
      if (val == "nominal") plan.profiles = SplitPlan::ProfilePick::nominal;
      else if (val == "random") plan.profiles = SplitPlan::ProfilePick::random;
      else if (val == "all") plan.profiles = SplitPlan::ProfilePick::all;
      else
        throw validation_error("[dataset] " + key +
                               ": profiles= must be nominal, random or all");
    } else if (opt == "magnitudes") {
      if (val == "all") plan.magnitudes = SplitPlan::MagnitudePick::all;
      else if (val == "even") plan.magnitudes = SplitPlan::MagnitudePick::even;
      else if (val == "odd") plan.magnitudes = SplitPlan::MagnitudePick::odd;
      else
        throw validation_error("[dataset] " + key +
                               ": magnitudes= must be all, even or odd");
    } else if (opt == "shuffle") {
      if (val == "true" || val == "1") plan.shuffle = true;
      else if (val == "false" || val == "0") plan.shuffle = false;
      else
        throw validation_error("[dataset] " + key +
                               ": shuffle= must be true or false");
    } else {
      throw validation_error("[dataset] " + key + ": unknown option '" +
                             std::string(opt) + "'");
    }
  }
  return plan;
}

ResidualMode parse_mode(const std::string& s) {
  if (s == "absolute") return ResidualMode::absolute;
  if (s == "relative") return ResidualMode::relative;
  throw validation_error(
      "[scenario] mode must be 'absolute' or 'relative' (got '" + s + "')");
}

// Keeps only the columns tagged with `split`; metadata travels along.
ResidualMatrix filter_split(const ResidualMatrix& rm, Split split) {
  ResidualMatrix out = rm;
  std::vector<int> keep;
  for (int j = 0; j < rm.cols(); ++j)
    if (rm.split[static_cast<std::size_t>(j)] == split) keep.push_back(j);
  out.R.resize(rm.R.rows(), static_cast<Eigen::Index>(keep.size()));
  out.labels.clear();
  out.magnitude_index.clear();
  out.profile_index.clear();
  out.split.clear();
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const int j = keep[k];
    out.R.col(static_cast<Eigen::Index>(k)) = rm.R.col(j);
    out.labels.push_back(rm.labels[static_cast<std::size_t>(j)]);
    out.magnitude_index.push_back(
        rm.magnitude_index[static_cast<std::size_t>(j)]);
    out.profile_index.push_back(rm.profile_index[static_cast<std::size_t>(j)]);
    out.split.push_back(split);
  }
  return out;
}

void check_junction_rows(const ResidualMatrix& rm, const Network& net,
                         const std::string& what) {
  if (rm.rows() != static_cast<int>(net.junctions.size()))
    throw validation_error(what + " has " + textio::fmt(rm.rows()) +
                           " rows but the network has " +
                           textio::fmt(static_cast<int>(net.junctions.size())) +
                           " junctions");
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += textio::fmt(v[i]);
  }
  return out;
}

}  // namespace

GenerateResult cmd_generate(const ConfigFile& cfg, const CommonOptions& common,
                            const std::string& out_dir, std::ostream& log) {
  const std::uint64_t seed =
      common.seed ? *common.seed : cfg.get_u64_or("scenario", "seed", 1);

  Network net = load_configured_network(cfg, seed);
  const bool hanoi =
      cfg.get_string_or("network", "source", "hanoi") == "hanoi";

  const int n_profiles = cfg.get_int_or("profiles", "count", 10);
  const double profile_beta = cfg.get_double_or("profiles", "beta", 0.025);
  std::vector<double> curve = cfg.has("profiles", "curve")
                                  ? cfg.get_doubles("profiles", "curve")
                                  : default_daily_curve();
  const ProfileBank bank = generate_profiles(
      n_profiles, profile_beta, derive_seed(seed, kProfileStream), curve);

  DatasetSpec spec;
  spec.seed = seed;
  spec.mode = parse_mode(cfg.get_string_or("scenario", "mode", "absolute"));
  spec.beta = cfg.get_double_or("scenario", "beta", 0.025);
  spec.total_inflow_m3s = cfg.get_double_or("scenario", "inflow", -1.0);
  spec.window = cfg.has("scenario", "window")
                    ? cfg.get_ints("scenario", "window")
                    : default_window();
  if (cfg.has("scenario", "magnitudes"))
    spec.magnitudes = cfg.get_doubles("scenario", "magnitudes");
  else if (hanoi)
    spec.magnitudes = hanoi_like_magnitudes();
  else
    throw validation_error(
        "[scenario] magnitudes is required unless the network source is "
        "'hanoi'");

  spec.solver.epsilon_m =
      cfg.get_double_or("solver", "epsilon", spec.solver.epsilon_m);
  spec.solver.tol_rel = cfg.get_double_or("solver", "tol", spec.solver.tol_rel);
  spec.solver.max_iter =
      cfg.get_int_or("solver", "max_iter", spec.solver.max_iter);
  spec.solver.max_backtrack =
      cfg.get_int_or("solver", "max_backtrack", spec.solver.max_backtrack);

  const Split order[] = {Split::pretrain, Split::train, Split::test};
  for (Split s : order) {
    const std::string key = split_name(s);
    if (!cfg.has("dataset", key)) continue;
    spec.plans.push_back(parse_plan(s, cfg.get_string("dataset", key), key));
  }
  if (spec.plans.empty())
    throw validation_error(
        "[dataset] must define at least one of pretrain, train, test");

  spec.config_hash = cfg.hash();

  std::filesystem::create_directories(out_dir);
  GenerateResult res;
  res.network_path = (std::filesystem::path(out_dir) / "network.net").string();
  res.dataset_path = (std::filesystem::path(out_dir) / "dataset.wds").string();

  const std::string net_text = write_network_text(
      net, {"wnfdi network", "config " + textio::hex64(cfg.hash())});
  spec.network_hash = fnv1a64(net_text.data(), net_text.size());
  textio::write_file(res.network_path, net_text);

  ResidualMatrix rm = build_residual_matrix(net, bank, spec, common.threads);
  res.dataset_hash = save_dataset(rm, res.dataset_path, common.format);
  res.columns = rm.cols();
  res.dropped = static_cast<int>(rm.dropped.size());

  int per_split[3] = {0, 0, 0};
  for (Split s : rm.split) ++per_split[static_cast<int>(s)];

  log << "network: " << net.junctions.size() << " junctions, "
      << net.pipes.size() << " pipes, " << net.tanks.size() << " tank(s) -> "
      << res.network_path << "\n";
  log << "profiles: " << bank.n_profiles() << " (spread "
      << fixed(100.0 * profile_beta, 1) << "%), window "
      << join_ints(spec.window) << "\n";
  log << "dataset: " << res.columns << " columns ("
      << per_split[0] << " pretrain / " << per_split[1] << " train / "
      << per_split[2] << " test), " << res.dropped << " dropped -> "
      << res.dataset_path << "\n";
  log << "dataset hash: " << textio::hex64(res.dataset_hash) << "\n";
  return res;
}

SensorSelection cmd_place(const PlaceArgs& args, std::ostream& log) {
  std::uint64_t dataset_hash = 0;
  const ResidualMatrix rm = load_dataset(args.dataset_path, &dataset_hash);
  const Network net = parse_network(args.network_path, NetworkFormat::native);
  check_junction_rows(rm, net, "dataset");

  const ResidualMatrix source =
      args.source_split ? filter_split(rm, *args.source_split) : rm;
  if (source.cols() == 0)
    throw validation_error(
        args.source_split
            ? std::string("dataset has no ") + split_name(*args.source_split) +
                  " columns to drive placement"
            : std::string("dataset has no columns"));

  SensorSelection sel;
  CoverageReport cov;
  bool have_cov = false;
  switch (args.method) {
    case PlacementMethod::msc: {
      const SignatureMatrix sig = binarize(source, args.tau, args.policy);
      sel = greedy_cover(sig.M, args.s, &cov);
      have_cov = true;
      break;
    }
    case PlacementMethod::mtc: {
      const SignatureMatrix sig = binarize(source, args.tau, args.policy);
      sel = greedy_cover(mtc_matrix(sig.M, args.mtc), args.s, &cov);
      have_cov = true;
      break;
    }
    case PlacementMethod::graph_gs: {
      const Eigen::MatrixXd dist =
          shortest_paths(net, EdgeWeight::pipe_length);
      sel = graph_gs_place(source.R, dist, args.s, args.lambda);
      break;
    }
  }
  sel.method = args.method;
  sel.params.s = args.s;
  sel.params.lambda = args.lambda;
  sel.params.tau = args.tau;
  sel.params.policy = args.policy;
  sel.dataset_hash = dataset_hash;
  save_selection(sel, args.out_path, have_cov ? &cov : nullptr);

  log << "sensors (" << method_name(sel.method) << ", s=" << args.s
      << "): " << join_ints(sel.indices) << "\n";
  if (have_cov)
    log << "coverage: " << cov.covered << "/" << cov.total << " targets\n";
  log << "selection -> " << args.out_path << "\n";
  return sel;
}

FDIReport cmd_train_eval(const TrainEvalArgs& args, std::ostream& log) {
  std::uint64_t dataset_hash = 0;
  const ResidualMatrix rm = load_dataset(args.dataset_path, &dataset_hash);
  const SensorSelection sel = load_selection(args.selection_path);
  if (sel.dataset_hash != 0 && sel.dataset_hash != dataset_hash)
    std::cerr << "warning: selection was made on dataset "
              << textio::hex64(sel.dataset_hash) << " but this dataset is "
              << textio::hex64(dataset_hash) << "\n";

  const Network net = parse_network(args.network_path, NetworkFormat::native);
  check_junction_rows(rm, net, "dataset");

  CommunityMap communities;
  const CommunityMap* cptr = nullptr;
  if (!args.communities_path.empty()) {
    communities = parse_communities(args.communities_path, net);
    cptr = &communities;
  }

  SplitSpec split;  // dataset tags
  FdiResult result =
      run_fdi(rm, sel, split, args.hyper, net, cptr, dataset_hash);

  if (!args.model_out.empty()) save_model(result.model, args.model_out);
  if (!args.report_out.empty()) save_report(result.report, args.report_out);

  const FDIReport& r = result.report;
  log << "pre-train: " << r.n_pretrain << " signals in "
      << fixed(r.t_pretrain, 2) << " s\n";
  log << "online train: " << r.n_train << " signals in " << fixed(r.t_train, 2)
      << " s\n";
  log << "test: " << r.n_test << " signals in " << fixed(r.t_test, 2)
      << " s\n";
  log << "exact " << fixed(r.scores.s1, 2) << "%, 1-hop "
      << fixed(r.scores.s2, 2) << "%, 2-hop " << fixed(r.scores.s3, 2) << "%";
  if (r.scores.has_s4) log << ", community " << fixed(r.scores.s4, 2) << "%";
  log << "\n";
  if (!args.model_out.empty()) log << "model -> " << args.model_out << "\n";
  if (!args.report_out.empty()) log << "report -> " << args.report_out << "\n";
  return result.report;
}

void cmd_report(const ReportArgs& args, std::ostream& log) {
  if (args.inputs.empty()) throw validation_error("no report files given");

  std::vector<FDIReport> reports;
  for (const std::string& path : args.inputs)
    reports.push_back(load_report(path));

  for (std::size_t i = 1; i < reports.size(); ++i)
    if (reports[i].dataset_hash != reports[0].dataset_hash) {
      std::cerr << "warning: " << args.inputs[i]
                << " was evaluated on a different dataset than "
                << args.inputs[0] << "\n";
      break;
    }

  std::vector<std::size_t> idx(reports.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) {
                     const FDIReport& ra = reports[a];
                     const FDIReport& rb = reports[b];
                     if (ra.method != rb.method) return ra.method < rb.method;
                     if (ra.s != rb.s) return ra.s < rb.s;
                     return ra.lambda < rb.lambda;
                   });

  std::string table;
  table += "method    s  lambda    exact    1-hop    2-hop  community   test\n";
  for (std::size_t i : idx) {
    const FDIReport& r = reports[i];
    char line[160];
    std::snprintf(line, sizeof(line),
                  "%-8s %2d %7.6g %7.2f%% %7.2f%% %7.2f%% %10s %6d\n",
                  method_name(r.method), r.s, r.lambda, r.scores.s1,
                  r.scores.s2, r.scores.s3,
                  r.scores.has_s4 ? (fixed(r.scores.s4, 2) + "%").c_str() : "-",
                  r.n_test);
    table += line;
  }
  log << table;
  if (!args.table_out.empty()) textio::write_file(args.table_out, table);

  if (!args.series_dir.empty()) {
    std::filesystem::create_directories(args.series_dir);
    std::map<std::string, std::string> csv;
    for (std::size_t i : idx) {
      const FDIReport& r = reports[i];
      std::string& body = csv[method_name(r.method)];
      if (body.empty()) body = "s,lambda,exact,one_hop,two_hop,community\n";
      body += textio::fmt(r.s);
      body += ',';
      body += textio::fmt(r.lambda);
      body += ',';
      body += fixed(r.scores.s1, 4);
      body += ',';
      body += fixed(r.scores.s2, 4);
      body += ',';
      body += fixed(r.scores.s3, 4);
      body += ',';
      if (r.scores.has_s4) body += fixed(r.scores.s4, 4);
      body += '\n';
    }
    for (const auto& [method, body] : csv) {
      const std::string path =
          (std::filesystem::path(args.series_dir) / ("series_" + method + ".csv"))
              .string();
      textio::write_file(path, body);
      log << "series -> " << path << "\n";
    }
  }
}

}  // namespace wnfdi
