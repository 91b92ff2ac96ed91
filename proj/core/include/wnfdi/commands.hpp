#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wnfdi/config.hpp"
#include "wnfdi/fdi.hpp"
#include "wnfdi/placement.hpp"
#include "wnfdi/residuals.hpp"

namespace wnfdi {

// Implementation of the CLI subcommands, callable as a library (the binary
// in tools/ is a thin argument-parsing wrapper). Each command reads/writes
// files and prints a short human summary to `log`.

struct CommonOptions {
  std::optional<std::uint64_t> seed;  // overrides the configured seed
  int threads = 1;
  PayloadFormat format = PayloadFormat::binary;
};

// generate: build (or load) a network, simulate the configured scenario
// plans and write network + dataset files into `out_dir`.
//
// Config sections:
//   [network]  source = hanoi | generate | file ; path, format for `file`
//   [netgen]   junctions, pipes, seed, tank_head, length_min, length_max,
//              diameters (list), roughness_min/max, demand_min/max
//   [profiles] count, beta, curve (optional, 96 values)
//   [scenario] seed, window (list), magnitudes (list), mode, inflow
//   [dataset]  pretrain / train / test plan lines, e.g.
//              pretrain = per_class 80 profiles=random magnitudes=all
//              train    = grid repeats=1
//              test     = total 3200 profiles=random shuffle=true
struct GenerateResult {
  std::string network_path;
  std::string dataset_path;
  std::uint64_t dataset_hash = 0;
  int columns = 0;
  int dropped = 0;
};

GenerateResult cmd_generate(const ConfigFile& cfg, const CommonOptions& common,
                            const std::string& out_dir, std::ostream& log);

// place: pick sensor locations from a dataset.
struct PlaceArgs {
  std::string dataset_path;
  std::string network_path;
  std::string out_path;
  PlacementMethod method = PlacementMethod::graph_gs;
  int s = 5;
  double lambda = 0.0;
  double tau = 3.0;
  BinarizePolicy policy = BinarizePolicy::any;
  MtcSemantics mtc = MtcSemantics::exclusive;
  // Which dataset columns drive placement: a single split or all of them.
  std::optional<Split> source_split = Split::pretrain;
};

SensorSelection cmd_place(const PlaceArgs& args, std::ostream& log);

// train-eval: run the full pipeline on a dataset + selection, write the
// model and the evaluation report.
struct TrainEvalArgs {
  std::string dataset_path;
  std::string selection_path;
  std::string network_path;
  std::string communities_path;  // optional, enables the community score
  std::string model_out;
  std::string report_out;
  DLHyper hyper;
};

FDIReport cmd_train_eval(const TrainEvalArgs& args, std::ostream& log);

// report: merge evaluation reports into a comparison table and per-method
// sweep series (CSV, one file per method, sorted by sensor count).
struct ReportArgs {
  std::vector<std::string> inputs;
  std::string table_out;   // optional
  std::string series_dir;  // optional
};

void cmd_report(const ReportArgs& args, std::ostream& log);

}  // namespace wnfdi
