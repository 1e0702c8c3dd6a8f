// catsim - context-aware transmission of buffered vehicular sensor data.
//
// Subcommands: generate, train, evaluate, build-map, simulate, compare.
// Exit codes: 0 success, 1 validation/usage error, 2 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catsim/config.hpp"
#include "catsim/dataset.hpp"
#include "catsim/error.hpp"
#include "catsim/predictor.hpp"
#include "catsim/sim.hpp"
#include "catsim/synth.hpp"
#include "catsim/text.hpp"

namespace {

using namespace catsim;

struct TraceInput {
  std::string path;
  std::string column_map_path;
  bool lenient = false;

  Trace load() const {
    const ColumnMap columns =
        column_map_path.empty() ? ColumnMap{} : load_column_map_file(column_map_path);
    return load_trace_file(path, columns, lenient);
  }
};

void add_trace_flags(CLI::App* cmd, TraceInput& input) {
  cmd->add_option("--trace", input.path, "Input trace CSV")->required();
  cmd->add_option("--column-map", input.column_map_path,
                  "JSON file mapping canonical column names to source header names");
  cmd->add_flag("--lenient", input.lenient,
                "Clamp out-of-range indicator values instead of rejecting the row");
}

struct DatasetFlags {
  std::string tx_log_path;
  std::uint64_t payload_bytes = 1000000;
  std::string geomap_path;
  double geomap_fallback = 0.0;

  TrainingSet build(const Trace& trace, std::optional<GridMap>& map_storage) const {
    DatasetOptions options;
    options.constant_payload_bytes = payload_bytes;
    options.geomap_fallback_mbps = geomap_fallback;
    if (!geomap_path.empty()) {
      map_storage = load_gridmap(geomap_path);
      options.geomap = &*map_storage;
    }
    if (!tx_log_path.empty()) {
      const auto log = parse_tx_log_csv(read_text_file(tx_log_path));
      return dataset_from_tx_log(trace, log, options);
    }
    return dataset_from_trace(trace, options);
  }
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags) {
  cmd->add_option("--tx-log", flags.tx_log_path,
                  "Transmissions log CSV; one training row per transmission");
  cmd->add_option("--payload-bytes", flags.payload_bytes,
                  "Synthetic payload column when no tx log is given");
  cmd->add_option("--geomap", flags.geomap_path,
                  "Connectivity map JSON; adds the map mean-rate feature");
  cmd->add_option("--geomap-fallback", flags.geomap_fallback,
                  "Map feature value for positions without observations");
}

void add_tree_flags(CLI::App* cmd, TreeParams& params) {
  cmd->add_option("--min-leaf", params.min_leaf, "Minimum rows per leaf");
  cmd->add_option("--max-depth", params.max_depth, "Maximum tree depth");
  cmd->add_option("--min-sdr-gain", params.min_sdr_gain,
                  "Minimum SDR as a fraction of the node sd");
  cmd->add_flag("--no-linear-leaves", [&params](std::int64_t) { params.linear_leaves = false; },
                "Constant leaf models only");
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"catsim - context-aware transmission of buffered vehicular sensor data"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a synthetic trace from a scenario");
  std::string gen_scenario, gen_out;
  std::optional<std::uint64_t> gen_seed;
  bool gen_json = false;
  generate->add_option("--scenario", gen_scenario, "Scenario JSON file")->required();
  generate->add_option("--out", gen_out, "Output trace CSV")->required();
  generate->add_option("--seed", gen_seed, "Override the scenario seed");
  generate->add_flag("--json", gen_json, "Machine-readable summary on stdout");
  generate->callback([&] {
    Scenario scenario = load_scenario_file(gen_scenario);
    if (gen_seed) scenario.seed = *gen_seed;
    const Trace trace = generate_trace(scenario);
    save_trace_file(trace, gen_out);
    if (gen_json) {
      nlohmann::json doc;
      doc["snapshots"] = trace.size();
      doc["duration_s"] = trace.duration_s();
      doc["seed"] = scenario.seed;
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout << "wrote " << trace.size() << " snapshots (" << format_double(trace.duration_s())
                << " s) to " << gen_out << "\n";
    }
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the data-rate prediction tree");
  TraceInput train_trace;
  DatasetFlags train_data;
  TreeParams train_params;
  std::string train_out;
  std::uint64_t train_seed = 0;
  bool train_json = false;
  add_trace_flags(train_cmd, train_trace);
  add_dataset_flags(train_cmd, train_data);
  add_tree_flags(train_cmd, train_params);
  train_cmd->add_option("--out", train_out, "Output model JSON")->required();
  train_cmd->add_option("--seed", train_seed, "Master seed");
  train_cmd->add_flag("--json", train_json, "Machine-readable summary on stdout");
  train_cmd->callback([&] {
    const Trace trace = train_trace.load();
    std::optional<GridMap> map_storage;
    const TrainingSet data = train_data.build(trace, map_storage);
    RegressionTree tree = train(data, train_params, train_seed);
    tree.geomap_fallback_mbps = train_data.geomap_fallback;
    save_tree(tree, train_out);
    if (train_json) {
      nlohmann::json doc;
      doc["rows"] = data.size();
      doc["features"] = tree.feature_names;
      doc["nodes"] = tree.nodes.size();
      doc["leaves"] = tree.leaf_count();
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout << "trained on " << data.size() << " rows: " << tree.nodes.size() << " nodes, "
                << tree.leaf_count() << " leaves -> " << train_out << "\n";
    }
  });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validation of the predictor");
  TraceInput eval_trace;
  DatasetFlags eval_data;
  TreeParams eval_params;
  int eval_k = 10;
  std::uint64_t eval_seed = 0;
  std::string eval_out;
  add_trace_flags(evaluate, eval_trace);
  add_dataset_flags(evaluate, eval_data);
  add_tree_flags(evaluate, eval_params);
  evaluate->add_option("--k", eval_k, "Number of folds");
  evaluate->add_option("--seed", eval_seed, "Master seed (fold shuffle)");
  evaluate->add_option("--out", eval_out, "Write the report JSON here instead of stdout");
  evaluate->callback([&] {
    const Trace trace = eval_trace.load();
    std::optional<GridMap> map_storage;
    const TrainingSet data = eval_data.build(trace, map_storage);
    const CvReport report = cross_validate(data, eval_params, eval_k, eval_seed);
    nlohmann::json doc;
    if (report.r) {
      doc["r"] = *report.r;
    } else {
      doc["r"] = nullptr;  // undefined (zero variance), deliberately not 0
    }
    doc["mae_mbps"] = report.mae;
    doc["rmse_mbps"] = report.rmse;
    doc["k"] = report.k;
    doc["n"] = report.n;
    emit(doc.dump(2) + "\n", eval_out);
  });

  // build-map
  auto* build_map_cmd = app.add_subcommand("build-map", "Aggregate traces into a connectivity map");
  std::vector<std::string> map_traces;
  std::string map_column_map;
  bool map_lenient = false;
  bool map_json = false;
  double map_cell = 100.0;
  std::string map_out, map_out_json;
  build_map_cmd->add_option("--trace", map_traces, "Input trace CSV (repeatable)")->required();
  build_map_cmd->add_option("--column-map", map_column_map, "Column-map JSON for all inputs");
  build_map_cmd->add_flag("--lenient", map_lenient, "Clamp out-of-range indicator values");
  build_map_cmd->add_option("--cell", map_cell, "Grid cell size in meters");
  build_map_cmd->add_option("--out", map_out, "Output map CSV (plot-ready)")->required();
  build_map_cmd->add_option("--out-json", map_out_json,
                            "Also write the reloadable map JSON (for --geomap)");
  build_map_cmd->add_flag("--json", map_json, "Machine-readable summary on stdout");
  build_map_cmd->callback([&] {
    const ColumnMap columns =
        map_column_map.empty() ? ColumnMap{} : load_column_map_file(map_column_map);
    std::vector<Trace> traces;
    traces.reserve(map_traces.size());
    for (const std::string& path : map_traces) {
      traces.push_back(load_trace_file(path, columns, map_lenient));
    }
    const GridMap map = build_map(traces, map_cell);
    std::ostringstream csv;
    write_gridmap_csv(map, csv);
    write_text_file(map_out, csv.str());
    if (!map_out_json.empty()) save_gridmap(map, map_out_json);
    if (map_json) {
      nlohmann::json doc;
      doc["cells"] = map.cells.size();
      doc["cell_size_m"] = map_cell;
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout << "aggregated " << map.cells.size() << " cells -> " << map_out << "\n";
    }
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Replay a trace under a transmission policy");
  TraceInput sim_trace;
  std::string sim_config_path, sim_out, sim_tx_log, sim_baseline_out;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_tick;
  std::optional<std::uint64_t> sim_sensor_rate;
  bool sim_json = false;
  add_trace_flags(simulate, sim_trace);
  simulate->add_option("--config", sim_config_path, "Run config JSON")->required();
  simulate->add_option("--out", sim_out, "Output report JSON")->required();
  simulate->add_option("--tx-log", sim_tx_log, "Also write the per-transmission CSV here");
  simulate->add_option("--seed", sim_seed, "Override the config seed");
  simulate->add_option("--tick", sim_tick, "Override the config tick_s");
  simulate->add_option("--sensor-rate", sim_sensor_rate, "Override sensor_rate_Bps");
  simulate->add_option(
      "--paired-baseline-out", sim_baseline_out,
      "CAT only: also run the paired periodic baseline (interval = realized mean gap)");
  simulate->add_flag("--json", sim_json, "Machine-readable summary on stdout");
  simulate->callback([&] {
    const Trace trace = sim_trace.load();
    RunSpec spec = load_run_spec_file(sim_config_path);
    if (sim_seed) spec.sim.seed = *sim_seed;
    if (sim_tick) spec.sim.tick_s = *sim_tick;
    if (sim_sensor_rate) spec.sim.sensor_rate_Bps = *sim_sensor_rate;

    std::optional<RegressionTree> model;
    if (spec.model_path) {
      model = load_tree(*spec.model_path);
      spec.sim.predictor = &*model;
    }
    std::optional<GridMap> map;
    if (spec.geomap_path) {
      map = load_gridmap(*spec.geomap_path);
      spec.sim.geomap = &*map;
    }

    const SimReport report = run(trace, spec.sim);
    write_text_file(sim_out, report_to_json(report));
    if (!sim_tx_log.empty()) {
      std::ostringstream csv;
      write_tx_log_csv(report, csv);
      write_text_file(sim_tx_log, csv.str());
    }

    if (!sim_baseline_out.empty()) {
      if (!std::holds_alternative<CatPolicy>(spec.sim.policy)) {
        throw ValidationError("--paired-baseline-out requires a cat policy");
      }
      if (report.tx_count == 0) {
        throw ValidationError("paired baseline: the CAT run produced no transmissions");
      }
      SimConfig baseline_config = spec.sim;
      baseline_config.policy = PeriodicPolicy{report.mean_inter_tx_gap_s};
      const SimReport baseline = run(trace, baseline_config);
      write_text_file(sim_baseline_out, report_to_json(baseline));
    }

    if (sim_json) {
      nlohmann::json doc;
      doc["tx_count"] = report.tx_count;
      doc["mean_tx_rate_mbps"] = report.mean_tx_rate_mbps;
      doc["mean_buffer_age_s"] = report.mean_buffer_age_s;
      doc["mean_inter_tx_gap_s"] = report.mean_inter_tx_gap_s;
      std::cout << doc.dump(2) << "\n";
    } else {
      std::cout << report.policy_descriptor << ": " << report.tx_count << " transmissions, mean "
                << format_double(report.mean_tx_rate_mbps) << " Mbit/s, mean age "
                << format_double(report.mean_buffer_age_s) << " s -> " << sim_out << "\n";
    }
  });

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Gain of a candidate report over a baseline");
  std::string cmp_baseline, cmp_candidate, cmp_out;
  compare_cmd->add_option("--baseline", cmp_baseline, "Baseline report JSON")->required();
  compare_cmd->add_option("--candidate", cmp_candidate, "Candidate report JSON")->required();
  compare_cmd->add_option("--out", cmp_out, "Write the gain JSON here instead of stdout");
  compare_cmd->callback([&] {
    const SimReport baseline = report_from_json(read_text_file(cmp_baseline));
    const SimReport candidate = report_from_json(read_text_file(cmp_candidate));
    emit(gain_to_json(compare(baseline, candidate)), cmp_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
