// Command line front end. All the work happens in wnfdi::cmd_*; this file
// only parses arguments and maps exceptions to exit codes:
//   2 invalid input, 3 numerical failure, 4 file I/O.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wnfdi/commands.hpp"
#include "wnfdi/errors.hpp"

namespace {

wnfdi::Split parse_split(const std::string& s) {
  if (s == "pretrain") return wnfdi::Split::pretrain;
  if (s == "train") return wnfdi::Split::train;
  return wnfdi::Split::test;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"water network fault detection and isolation"};
  app.require_subcommand(1);

  wnfdi::CommonOptions common;
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "override the configured seed");
  app.add_option("--threads", common.threads, "simulation worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  std::string format = "binary";
  app.add_option("--format", format, "dataset payload format")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();
  std::string config_path;
  app.add_option("--config", config_path, "scenario config file");

  // generate
  CLI::App* gen = app.add_subcommand(
      "generate", "simulate fault scenarios into a residual dataset");
  std::string out_dir = ".";
  gen->add_option("config", config_path, "scenario config file");
  gen->add_option("-o,--out", out_dir, "output directory")
      ->capture_default_str();

  // place
  CLI::App* place =
      app.add_subcommand("place", "choose sensor locations from a dataset");
  wnfdi::PlaceArgs pargs;
  std::string method = "graph-gs";
  std::string policy = "any";
  std::string mtc = "exclusive";
  std::string source = "pretrain";
  place->add_option("--dataset", pargs.dataset_path, "residual dataset")
      ->required();
  place->add_option("--network", pargs.network_path, "network file")
      ->required();
  place->add_option("-o,--out", pargs.out_path, "selection output file")
      ->required();
  place->add_option("--method", method, "placement method")
      ->check(CLI::IsMember({"msc", "mtc", "graph-gs"}))
      ->capture_default_str();
  place->add_option("-s,--sensors", pargs.s, "number of sensors")
      ->capture_default_str();
  place->add_option("--lambda", pargs.lambda, "distance penalty (graph-gs)")
      ->capture_default_str();
  place->add_option("--tau", pargs.tau, "signature threshold (msc/mtc)")
      ->capture_default_str();
  place->add_option("--policy", policy, "signature vote policy (msc/mtc)")
      ->check(CLI::IsMember({"any", "all", "majority"}))
      ->capture_default_str();
  place->add_option("--pairs", mtc, "pair discrimination semantics (mtc)")
      ->check(CLI::IsMember({"exclusive", "product"}))
      ->capture_default_str();
  place->add_option("--split", source, "dataset columns that drive placement")
      ->check(CLI::IsMember({"pretrain", "train", "test", "all"}))
      ->capture_default_str();

  // train-eval
  CLI::App* te = app.add_subcommand(
      "train-eval", "train the fault classifier and score the test signals");
  wnfdi::TrainEvalArgs targs;
  te->add_option("--dataset", targs.dataset_path, "residual dataset")
      ->required();
  te->add_option("--selection", targs.selection_path, "sensor selection file")
      ->required();
  te->add_option("--network", targs.network_path, "network file")->required();
  te->add_option("--communities", targs.communities_path,
                 "community map (enables the community score)");
  te->add_option("--model-out", targs.model_out, "write the trained model");
  te->add_option("--report-out", targs.report_out,
                 "write the evaluation report");
  te->add_option("--alpha", targs.hyper.alpha, "classifier term weight")
      ->capture_default_str();
  te->add_option("--beta", targs.hyper.beta, "label-consistency term weight")
      ->capture_default_str();
  te->add_option("--lambda0", targs.hyper.lambda_init,
                 "first online update tempering")
      ->capture_default_str();
  te->add_option("--sparsity", targs.hyper.sparsity, "coding sparsity")
      ->capture_default_str();
  te->add_option("--atoms-per-class", targs.hyper.atoms_per_class)
      ->capture_default_str();
  te->add_option("--shared-atoms", targs.hyper.shared_atoms)
      ->capture_default_str();
  te->add_option("--iters-class", targs.hyper.iters_class,
                 "per-class block iterations")
      ->capture_default_str();
  te->add_option("--iters-full", targs.hyper.iters_full,
                 "full stacked iterations")
      ->capture_default_str();
  te->add_option("--renorm-every", targs.hyper.renorm_every,
                 "online updates between renormalizations")
      ->capture_default_str();

  // report
  CLI::App* rep =
      app.add_subcommand("report", "merge evaluation reports into a table");
  wnfdi::ReportArgs rargs;
  rep->add_option("reports", rargs.inputs, "report files")->required();
  rep->add_option("--table", rargs.table_out, "write the table to a file");
  rep->add_option("--series-dir", rargs.series_dir,
                  "write per-method sweep CSVs into this directory");

  CLI11_PARSE(app, argc, argv);

  if (seed_opt->count() > 0) common.seed = seed_value;
  common.format = format == "text" ? wnfdi::PayloadFormat::text
                                   : wnfdi::PayloadFormat::binary;

  try {
    if (gen->parsed()) {
      if (config_path.empty())
        throw wnfdi::validation_error("generate needs a config file");
      const wnfdi::ConfigFile cfg = wnfdi::ConfigFile::parse(config_path);
      wnfdi::cmd_generate(cfg, common, out_dir, std::cout);
    } else if (place->parsed()) {
      if (method == "msc") pargs.method = wnfdi::PlacementMethod::msc;
      else if (method == "mtc") pargs.method = wnfdi::PlacementMethod::mtc;
      else pargs.method = wnfdi::PlacementMethod::graph_gs;
      if (policy == "all") pargs.policy = wnfdi::BinarizePolicy::all;
      else if (policy == "majority")
        pargs.policy = wnfdi::BinarizePolicy::majority;
      else pargs.policy = wnfdi::BinarizePolicy::any;
      pargs.mtc = mtc == "product" ? wnfdi::MtcSemantics::product
                                   : wnfdi::MtcSemantics::exclusive;
      if (source == "all") pargs.source_split.reset();
      else pargs.source_split = parse_split(source);
      wnfdi::cmd_place(pargs, std::cout);
    } else if (te->parsed()) {
      wnfdi::cmd_train_eval(targs, std::cout);
    } else if (rep->parsed()) {
      wnfdi::cmd_report(rargs, std::cout);
    }
  } catch (const wnfdi::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const wnfdi::numerical_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const wnfdi::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
