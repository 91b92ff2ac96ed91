#include "wnfdi/fdi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "wnfdi/errors.hpp"
#include "wnfdi/random.hpp"
#include "textio.hpp"

namespace wnfdi {

namespace tio = textio;

namespace {

// Unit-weight hop distances from one junction to all junctions; pipes count
// one hop each and tanks are traversable.
std::vector<int> hop_distances(const Network& net, int source) {
  const int n = net.n_junctions();
  const int total = n + net.n_tanks();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(total));
  for (const Pipe& p : net.pipes) {
    int u = is_junction(p.from) ? junction_index(p.from) - 1
                                : n + tank_index(p.from) - 1;
    int v = is_junction(p.to) ? junction_index(p.to) - 1
                              : n + tank_index(p.to) - 1;
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<int> d(static_cast<std::size_t>(total), -1);
  std::queue<int> q;
  d[static_cast<std::size_t>(source - 1)] = 0;
  q.push(source - 1);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (d[static_cast<std::size_t>(v)] < 0) {
        d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
  }
  d.resize(static_cast<std::size_t>(n));
  return d;
}

}  // namespace

ScoreResult score(const std::vector<int>& predicted,
                  const std::vector<int>& truth, const Network& net,
                  const CommunityMap* communities) {
  if (predicted.size() != truth.size())
    throw validation_error("score: prediction/truth length mismatch");
  if (predicted.empty())
    throw validation_error("score: no test signals");
  const int n = net.n_junctions();
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] < 1 || truth[k] > n)
      throw validation_error("score: truth label out of range: " +
                             tio::fmt(truth[k]));
    if (predicted[k] < 1 || predicted[k] > n)
      throw validation_error("score: predicted label out of range: " +
                             tio::fmt(predicted[k]));
  }
  if (communities != nullptr &&
      static_cast<int>(communities->community.size()) != n)
    throw validation_error("score: community map does not cover the network");

  // Hop distances from each distinct truth node, computed once.
  std::vector<std::vector<int>> cache(static_cast<std::size_t>(n));
  auto hops_from = [&](int node) -> const std::vector<int>& {
    auto& entry = cache[static_cast<std::size_t>(node - 1)];
    if (entry.empty()) entry = hop_distances(net, node);
    return entry;
  };

  ScoreResult res;
  res.hops.resize(truth.size());
  std::size_t hit1 = 0, hit2 = 0, hit3 = 0, hit4 = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    int h = hops_from(truth[k])[static_cast<std::size_t>(predicted[k] - 1)];
    res.hops[k] = h;
    if (h == 0) ++hit1;
    if (h >= 0 && h <= 1) ++hit2;
    if (h >= 0 && h <= 2) ++hit3;
    if (communities != nullptr &&
        communities->community[static_cast<std::size_t>(truth[k] - 1)] ==
            communities->community[static_cast<std::size_t>(predicted[k] - 1)])
      ++hit4;
  }
  const double total = static_cast<double>(truth.size());
  res.s1 = 100.0 * static_cast<double>(hit1) / total;
  res.s2 = 100.0 * static_cast<double>(hit2) / total;
  res.s3 = 100.0 * static_cast<double>(hit3) / total;
  if (communities != nullptr) {
    res.has_s4 = true;
    res.s4 = 100.0 * static_cast<double>(hit4) / total;
  }
  return res;
}

namespace {

struct SplitIndices {
  std::vector<int> pretrain, train, test;
};

SplitIndices resolve_split(const ResidualMatrix& rm, const SplitSpec& spec) {
  const int cols = rm.cols();
  SplitIndices out;
  switch (spec.kind) {
    case SplitSpec::Kind::from_tags:
      for (int j = 0; j < cols; ++j) {
        switch (rm.split[static_cast<std::size_t>(j)]) {
          case Split::pretrain: out.pretrain.push_back(j); break;
          case Split::train: out.train.push_back(j); break;
          case Split::test: out.test.push_back(j); break;
        }
      }
      break;
    case SplitSpec::Kind::explicit_indices: {
      std::vector<char> used(static_cast<std::size_t>(cols), 0);
      auto take = [&](const std::vector<int>& src, const char* name,
                      std::vector<int>& dst) {
        for (int j : src) {
          if (j < 0 || j >= cols)
            throw validation_error(std::string("split: ") + name +
                                   " column out of range: " + tio::fmt(j));
          if (used[static_cast<std::size_t>(j)])
            throw validation_error(
                "split: column " + tio::fmt(j) +
                " assigned to more than one phase; splits must be disjoint");
          used[static_cast<std::size_t>(j)] = 1;
          dst.push_back(j);
        }
      };
      take(spec.pretrain, "pretrain", out.pretrain);
      take(spec.train, "train", out.train);
      take(spec.test, "test", out.test);
      break;
    }
    case SplitSpec::Kind::stratified: {
      if (!(spec.ratio_pretrain > 0) || spec.ratio_train < 0 ||
          spec.ratio_pretrain + spec.ratio_train > 1.0)
        throw validation_error("split: stratified ratios are invalid");
      const int n = rm.rows();
      std::vector<std::vector<int>> per_class(static_cast<std::size_t>(n));
      for (int j = 0; j < cols; ++j) {
        int cls = rm.labels[static_cast<std::size_t>(j)];
        if (cls < 1 || cls > n)
          throw validation_error("split: label out of range: " +
                                 tio::fmt(cls));
        per_class[static_cast<std::size_t>(cls - 1)].push_back(j);
      }
      for (int cls = 1; cls <= n; ++cls) {
        auto& members = per_class[static_cast<std::size_t>(cls - 1)];
        if (members.empty()) continue;
        SplitMix64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(cls)));
        rng.shuffle(members);
        std::size_t n_pt = std::max<std::size_t>(
            1, static_cast<std::size_t>(spec.ratio_pretrain *
                                        static_cast<double>(members.size())));
        std::size_t n_tr = static_cast<std::size_t>(
            spec.ratio_train * static_cast<double>(members.size()));
        n_pt = std::min(n_pt, members.size());
        n_tr = std::min(n_tr, members.size() - n_pt);
        for (std::size_t k = 0; k < members.size(); ++k) {
          if (k < n_pt)
            out.pretrain.push_back(members[k]);
          else if (k < n_pt + n_tr)
            out.train.push_back(members[k]);
          else
            out.test.push_back(members[k]);
        }
      }
      std::sort(out.pretrain.begin(), out.pretrain.end());
      std::sort(out.train.begin(), out.train.end());
      std::sort(out.test.begin(), out.test.end());
      break;
    }
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

FdiResult run_fdi(const ResidualMatrix& rm, const SensorSelection& sel,
                  const SplitSpec& split, const DLHyper& hyper,
                  const Network& net, const CommunityMap* communities,
                  std::uint64_t dataset_hash) {
  const int n = rm.rows();
  if (net.n_junctions() != n)
    throw validation_error("run: dataset row count does not match network");
  if (sel.indices.empty())
    throw validation_error("run: sensor selection is empty");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int idx : sel.indices) {
    if (idx < 1 || idx > n)
      throw validation_error("run: sensor index out of range: " +
                             tio::fmt(idx));
    if (seen[static_cast<std::size_t>(idx - 1)]++)
      throw validation_error("run: duplicate sensor index: " + tio::fmt(idx));
  }

  SplitIndices idx = resolve_split(rm, split);
  if (idx.pretrain.empty())
    throw validation_error("run: pre-train split is empty");
  if (idx.test.empty()) throw validation_error("run: test split is empty");

  // Every junction class must be pre-trainable; fail before any work.
  std::vector<char> in_pt(static_cast<std::size_t>(n), 0);
  for (int j : idx.pretrain) {
    int cls = rm.labels[static_cast<std::size_t>(j)];
    if (cls < 1 || cls > n)
      throw validation_error("run: label out of range: " + tio::fmt(cls));
    in_pt[static_cast<std::size_t>(cls - 1)] = 1;
  }
  std::string missing;
  for (int cls = 1; cls <= n; ++cls)
    if (!in_pt[static_cast<std::size_t>(cls - 1)])
      missing += (missing.empty() ? "" : ", ") + tio::fmt(cls);
  if (!missing.empty())
    throw validation_error(
        "run: no pre-train scenarios for fault classes " + missing);

  // Sensor rows only: the model sees s-dimensional measurements.
  const int s = static_cast<int>(sel.indices.size());
  Eigen::MatrixXd Ysel(s, rm.cols());
  for (int i = 0; i < s; ++i)
    Ysel.row(i) = rm.R.row(sel.indices[static_cast<std::size_t>(i)] - 1);

  FdiResult out;
  out.report.dataset_hash = dataset_hash;
  out.report.network_hash = rm.network_hash;
  out.report.method = sel.method;
  out.report.s = static_cast<int>(sel.indices.size());
  out.report.lambda = sel.params.lambda;
  out.report.sensors = sel.indices;
  out.report.hyper = hyper;
  out.report.n_pretrain = static_cast<int>(idx.pretrain.size());
  out.report.n_train = static_cast<int>(idx.train.size());
  out.report.n_test = static_cast<int>(idx.test.size());

  // Batch pre-training.
  auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd Ypt(s, static_cast<int>(idx.pretrain.size()));
  std::vector<int> labels_pt;
  labels_pt.reserve(idx.pretrain.size());
  for (std::size_t k = 0; k < idx.pretrain.size(); ++k) {
    Ypt.col(static_cast<Eigen::Index>(k)) = Ysel.col(idx.pretrain[k]);
    labels_pt.push_back(rm.labels[static_cast<std::size_t>(idx.pretrain[k])]);
  }
  LabelMatrices lm = build_label_matrices(labels_pt, n, hyper.atoms_per_class,
                                          hyper.shared_atoms);
  out.model = lcksvd_pretrain(Ypt, lm.H, lm.Q, n, hyper);
  out.model.dataset_hash = dataset_hash;
  out.report.t_pretrain = seconds_since(t0);

  // Labeled online updates.
  t0 = std::chrono::steady_clock::now();
  for (int j : idx.train)
    toddler_update(out.model, Ysel.col(j),
                   rm.labels[static_cast<std::size_t>(j)]);
  out.report.t_train = seconds_since(t0);

  // Test: self-supervised update first, then classify against the updated
  // model.
  t0 = std::chrono::steady_clock::now();
  std::vector<int> predicted, truth;
  predicted.reserve(idx.test.size());
  for (int j : idx.test) {
    toddler_update(out.model, Ysel.col(j), std::nullopt);
    Classification cl = classify(out.model, Ysel.col(j));
    predicted.push_back(cl.cls);
    truth.push_back(rm.labels[static_cast<std::size_t>(j)]);

    SignalRecord rec;
    rec.column = j + 1;
    rec.truth = truth.back();
    rec.predicted = cl.cls;
    rec.top_score = cl.scores(cl.cls - 1);
    double runner = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cl.scores.size(); ++c)
      if (c != cl.cls - 1 && cl.scores(c) > runner) runner = cl.scores(c);
    rec.runner_up = cl.scores.size() > 1 ? runner : 0.0;
    out.report.records.push_back(rec);
  }
  out.report.t_test = seconds_since(t0);

  out.report.scores = score(predicted, truth, net, communities);
  for (std::size_t k = 0; k < out.report.records.size(); ++k)
    out.report.records[k].hops = out.report.scores.hops[k];
  return out;
}

void save_report(const FDIReport& report, const std::string& path) {
  std::string out;
  out += "wnfdi-report v1\n";
  out += "dataset_hash = " + tio::hex64(report.dataset_hash) + "\n";
  out += "network_hash = " + tio::hex64(report.network_hash) + "\n";
  out += std::string("method = ") + method_name(report.method) + "\n";
  out += "s = " + tio::fmt(report.s) + "\n";
  out += "lambda = " + tio::fmt(report.lambda) + "\n";
  out += "sensors =";
  for (int i : report.sensors) out += " " + tio::fmt(i);
  out += "\n";
  out += "alpha = " + tio::fmt(report.hyper.alpha) + "\n";
  out += "beta = " + tio::fmt(report.hyper.beta) + "\n";
  out += "lambda_init = " + tio::fmt(report.hyper.lambda_init) + "\n";
  out += "sparsity = " + tio::fmt(report.hyper.sparsity) + "\n";
  out += "atoms_per_class = " + tio::fmt(report.hyper.atoms_per_class) + "\n";
  out += "shared_atoms = " + tio::fmt(report.hyper.shared_atoms) + "\n";
  out += "iters_class = " + tio::fmt(report.hyper.iters_class) + "\n";
  out += "iters_full = " + tio::fmt(report.hyper.iters_full) + "\n";
  out += "renorm_every = " + tio::fmt(report.hyper.renorm_every) + "\n";
  out += "n_pretrain = " + tio::fmt(report.n_pretrain) + "\n";
  out += "n_train = " + tio::fmt(report.n_train) + "\n";
  out += "n_test = " + tio::fmt(report.n_test) + "\n";
  out += "s1 = " + tio::fmt(report.scores.s1) + "\n";
  out += "s2 = " + tio::fmt(report.scores.s2) + "\n";
  out += "s3 = " + tio::fmt(report.scores.s3) + "\n";
  out += "s4 = " + (report.scores.has_s4 ? tio::fmt(report.scores.s4)
                                         : std::string("-")) + "\n";
  out += "records:\n";
  for (const SignalRecord& r : report.records)
    out += tio::fmt(r.column) + " " + tio::fmt(r.truth) + " " +
           tio::fmt(r.predicted) + " " + tio::fmt(r.top_score) + " " +
           tio::fmt(r.runner_up) + " " + tio::fmt(r.hops) + "\n";
  tio::write_file(path, out);
}

FDIReport load_report(const std::string& path) {
  std::string data = tio::read_file(path);
  auto lines = tio::split_lines(data);
  if (lines.empty() || lines[0] != "wnfdi-report v1")
    throw io_error("corrupt report file " + path + ": bad signature line");

  FDIReport rep;
  std::size_t k = 1;
  auto bad = [&](const std::string& what) -> io_error {
    return io_error("corrupt report file " + path + ": " + what);
  };
  for (; k < lines.size(); ++k) {
    std::string_view line = tio::trim(lines[k]);
    if (line.empty()) continue;
    if (line == "records:") {
      ++k;
      break;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw bad("malformed header line");
    std::string key(tio::trim(line.substr(0, eq)));
    std::string_view val = tio::trim(line.substr(eq + 1));
    bool ok = true;
    if (key == "dataset_hash") ok = tio::parse_hex64(val, rep.dataset_hash);
    else if (key == "network_hash") ok = tio::parse_hex64(val, rep.network_hash);
    else if (key == "method") {
      if (val == "msc") rep.method = PlacementMethod::msc;
      else if (val == "mtc") rep.method = PlacementMethod::mtc;
      else if (val == "graph-gs") rep.method = PlacementMethod::graph_gs;
      else ok = false;
    } else if (key == "s") ok = tio::parse_int(val, rep.s);
    else if (key == "lambda") ok = tio::parse_double(val, rep.lambda);
    else if (key == "sensors") {
      for (auto f : tio::split_ws(val)) {
        int v;
        if (!tio::parse_int(f, v)) throw bad("bad sensor index");
        rep.sensors.push_back(v);
      }
    } else if (key == "alpha") ok = tio::parse_double(val, rep.hyper.alpha);
    else if (key == "beta") ok = tio::parse_double(val, rep.hyper.beta);
    else if (key == "lambda_init")
      ok = tio::parse_double(val, rep.hyper.lambda_init);
    else if (key == "sparsity") ok = tio::parse_int(val, rep.hyper.sparsity);
    else if (key == "atoms_per_class")
      ok = tio::parse_int(val, rep.hyper.atoms_per_class);
    else if (key == "shared_atoms")
      ok = tio::parse_int(val, rep.hyper.shared_atoms);
    else if (key == "iters_class")
      ok = tio::parse_int(val, rep.hyper.iters_class);
    else if (key == "iters_full")
      ok = tio::parse_int(val, rep.hyper.iters_full);
    else if (key == "renorm_every")
      ok = tio::parse_int(val, rep.hyper.renorm_every);
    else if (key == "n_pretrain") ok = tio::parse_int(val, rep.n_pretrain);
    else if (key == "n_train") ok = tio::parse_int(val, rep.n_train);
    else if (key == "n_test") ok = tio::parse_int(val, rep.n_test);
    else if (key == "s1") ok = tio::parse_double(val, rep.scores.s1);
    else if (key == "s2") ok = tio::parse_double(val, rep.scores.s2);
    else if (key == "s3") ok = tio::parse_double(val, rep.scores.s3);
    else if (key == "s4") {
      if (val == "-") rep.scores.has_s4 = false;
      else {
        rep.scores.has_s4 = true;
        ok = tio::parse_double(val, rep.scores.s4);
      }
    } else throw bad("unknown header key '" + key + "'");
    if (!ok) throw bad("bad value for '" + key + "'");
  }
  for (; k < lines.size(); ++k) {
    std::string_view line = tio::trim(lines[k]);
    if (line.empty()) continue;
    auto f = tio::split_ws(line);
    if (f.size() != 6) throw bad("malformed record line");
    SignalRecord r;
    if (!tio::parse_int(f[0], r.column) || !tio::parse_int(f[1], r.truth) ||
        !tio::parse_int(f[2], r.predicted) ||
        !tio::parse_double(f[3], r.top_score) ||
        !tio::parse_double(f[4], r.runner_up) || !tio::parse_int(f[5], r.hops))
      throw bad("malformed record line");
    rep.records.push_back(r);
    rep.scores.hops.push_back(r.hops);
  }
  return rep;
}

}  // namespace wnfdi
