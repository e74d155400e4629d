#include "entdyn/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "entdyn/io.hpp"
#include "entdyn/montecarlo.hpp"
#include "entdyn/optimizer.hpp"
#include "entdyn/rng.hpp"
#include "entdyn/version.hpp"

namespace entdyn {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(item);
  return parts;
}

MeasureSet parse_measures(const std::string& text) {
  MeasureSet set;
  set.negativity = false;
  bool any = false;
  for (const std::string& token : split(text, ',')) {
    if (token == "negativity") set.negativity = true;
    else if (token == "e_mb") set.e_mb = true;
    else if (token == "linear_entropy") set.linear_entropy = true;
    else if (token == "purity") set.purity = true;
    else if (token == "all") set = MeasureSet{true, true, true, true};
    else {
      throw std::invalid_argument(
          "unknown measure '" + token +
          "'; expected negativity, e_mb, linear_entropy, purity or all");
    }
    any = true;
  }
  if (!any) throw std::invalid_argument("the measure list is empty");
  return set;
}

std::vector<std::string> measure_tokens(const MeasureSet& set) {
  std::vector<std::string> tokens;
  if (set.negativity) tokens.push_back("negativity");
  if (set.e_mb) tokens.push_back("e_mb");
  if (set.linear_entropy) tokens.push_back("linear_entropy");
  if (set.purity) tokens.push_back("purity");
  return tokens;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  for (const std::string& token : split(text, ',')) {
    try {
      sizes.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse ensemble size '" + token + "'");
    }
  }
  return sizes;
}

std::vector<double> parse_x_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw std::invalid_argument("x grid must be lo:hi:count or a comma list");
    }
    double lo = 0.0, hi = 0.0;
    int count = 0;
    try {
      lo = std::stod(parts[0]);
      hi = std::stod(parts[1]);
      count = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse x grid '" + text + "'");
    }
    if (count < 2 || !(hi > lo)) {
      throw std::invalid_argument("x grid needs hi > lo and at least 2 points");
    }
    for (int i = 0; i < count; ++i) {
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  } else {
    for (const std::string& token : split(text, ',')) {
      try {
        grid.push_back(std::stod(token));
      } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse x value '" + token + "'");
      }
    }
  }
  return grid;
}

int find_channel(const EnsembleStats& stats, const std::string& name) {
  const auto& names = stats.channels();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

// Options shared by the ensemble-driving subcommands. Option handles allow
// telling defaults from explicit flags, which is what lets explicit flags
// override preset fields.
struct CommonArgs {
  int n = 0;
  std::string state = "haar";
  double x = 1.0;
  double lambda_ratio = 0.01;
  double t_max = 100.0;
  int points = 500;
  int samples = 500;
  std::uint64_t seed = 0;
  std::string measures = "all";
  std::string preset;
  std::string out;
  std::string format = "csv";
  std::string states_dir = "states";
  bool serial = false;

  CLI::Option* n_opt = nullptr;
  CLI::Option* state_opt = nullptr;
  CLI::Option* x_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* t_max_opt = nullptr;
  CLI::Option* points_opt = nullptr;
  CLI::Option* samples_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* measures_opt = nullptr;
  CLI::Option* preset_opt = nullptr;

  Execution execution() const { return serial ? Execution::serial : Execution::parallel; }
};

void add_common(CLI::App* sub, CommonArgs& a, bool with_preset) {
  a.n_opt = sub->add_option("--n", a.n, "Number of qubits (2 to 8)");
  a.state_opt = sub->add_option(
      "--state", a.state,
      "Initial state: ghz | w | hs | basis:BITS | haar | file:PATH | optimized:TAG");
  a.lambda_opt = sub->add_option("--lambda-ratio", a.lambda_ratio,
                                 "Reservoir width over decay rate, lambda/gamma0");
  a.t_max_opt = sub->add_option("--tmax", a.t_max, "Largest gamma0*t on the grid");
  a.points_opt = sub->add_option("--points", a.points, "Number of grid points");
  a.samples_opt = sub->add_option("--samples", a.samples, "Ensemble size");
  a.seed_opt = sub->add_option("--seed", a.seed, "Master seed");
  a.measures_opt = sub->add_option(
      "--measures", a.measures,
      "Comma list: negativity, e_mb, linear_entropy, purity, or all");
  if (with_preset) {
    a.preset_opt = sub->add_option("--preset", a.preset,
                                   "Canned study; explicit flags override its fields");
  }
  sub->add_option("--out", a.out, "Output data file (manifest written alongside)");
  sub->add_option("--format", a.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--states-dir", a.states_dir,
                  "Directory that optimized:TAG states are read from");
  sub->add_flag("--serial", a.serial, "Run on the serial engine (same results)");
}

void require_out(const CommonArgs& a) {
  if (a.out.empty()) throw std::invalid_argument("--out is required");
}

const Preset& preset_or_throw(const std::string& name, Preset::Kind kind) {
  const Preset* preset = find_preset(name);
  if (!preset) {
    std::string known;
    for (const Preset& p : figure_recipes()) {
      if (!known.empty()) known += ", ";
      known += p.name;
    }
    throw std::invalid_argument("unknown preset '" + name + "'; available: " + known);
  }
  if (preset->kind != kind) {
    throw std::invalid_argument(
        "preset '" + name + "' is a " +
        (preset->kind == Preset::Kind::convergence ? std::string("convergence study; run it with the converge subcommand")
                                                   : std::string("time series study; run it with the simulate subcommand")));
  }
  return *preset;
}

void write_table(const Table& table, const CommonArgs& a) {
  const std::string payload = a.format == "json" ? format_table_json(table) : format_csv(table);
  atomic_write_file(a.out, payload);
}

// ---- simulate ----------------------------------------------------------

int exec_simulate(CommonArgs& a) {
  MeasureSet measures = parse_measures(a.measures);
  double t_max = a.t_max;
  int points = a.points;
  std::vector<PresetSeries> series;

  if (!a.preset.empty()) {
    const Preset& preset = preset_or_throw(a.preset, Preset::Kind::timeseries);
    series = preset.series;
    if (a.measures_opt->count() == 0) measures = preset.measures;
    if (a.t_max_opt->count() == 0) t_max = preset.t_max;
    if (a.points_opt->count() == 0) points = preset.points;
    for (PresetSeries& s : series) {
      if (a.n_opt->count()) s.n_qubits = a.n;
      if (a.state_opt->count()) s.state = a.state;
      if (a.samples_opt->count()) s.samples = a.samples;
    }
  } else {
    if (a.n_opt->count() == 0) {
      throw std::invalid_argument("--n is required unless --preset is given");
    }
    series.push_back(PresetSeries{a.state, a.n, a.state, a.samples});
  }
  require_out(a);

  const TimeGrid grid = TimeGrid::uniform(t_max, points);
  std::vector<EnsembleStats> runs;
  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const PresetSeries& s = series[i];
    RunConfig config;
    config.n_qubits = s.n_qubits;
    config.state = parse_state_spec(s.state, s.n_qubits);
    if (a.x_opt && a.x_opt->count()) config.x = a.x;
    config.lambda_ratio = a.lambda_ratio;
    config.grid = grid;
    config.samples = s.samples;
    config.seed = mix_seed(a.seed, i);
    config.measures = measures;
    config.states_dir = a.states_dir;
    try {
      runs.push_back(run_ensemble(config, a.execution()));
    } catch (const std::runtime_error& e) {
      if (config.state.kind == StateSpec::Kind::optimized) {
        throw std::runtime_error(std::string(e.what()) + " (run 'entdyn optimize --n " +
                                 std::to_string(s.n_qubits) + " --tag " +
                                 config.state.detail + "' first)");
      }
      throw;
    }
    configs.push_back(std::move(config));
  }

  // Union of measure columns across series, canonical order.
  int max_families = 0;
  bool any_neg = false, any_emb = false, any_sl = false, any_purity = false;
  for (const EnsembleStats& stats : runs) {
    for (const std::string& name : stats.channels()) {
      if (name == "N_global") any_neg = true;
      else if (name == "E_MB") any_emb = true;
      else if (name == "S_L") any_sl = true;
      else if (name == "purity") any_purity = true;
      else if (name.rfind("N_m", 0) == 0) {
        max_families = std::max(max_families, std::stoi(name.substr(3)));
      }
    }
  }

  const bool multi = series.size() > 1;
  Table table;
  if (multi) table.columns.push_back("series");
  table.columns.push_back("gamma0_t");
  if (any_neg) {
    table.columns.push_back("N_mean");
    table.columns.push_back("N_disp");
    for (int m = 1; m <= max_families; ++m) {
      table.columns.push_back("N_m" + std::to_string(m) + "_mean");
    }
  }
  if (any_emb) table.columns.push_back("EMB_mean");
  if (any_sl) table.columns.push_back("SL_mean");
  if (any_purity) table.columns.push_back("purity_mean");
  table.columns.push_back("n_samples");

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const EnsembleStats& stats = runs[r];
    const int c_neg = find_channel(stats, "N_global");
    const int c_emb = find_channel(stats, "E_MB");
    const int c_sl = find_channel(stats, "S_L");
    const int c_purity = find_channel(stats, "purity");
    std::vector<int> c_family(static_cast<std::size_t>(max_families), -1);
    for (int m = 1; m <= max_families; ++m) {
      c_family[static_cast<std::size_t>(m - 1)] =
          find_channel(stats, "N_m" + std::to_string(m));
    }
    for (std::size_t ti = 0; ti < stats.times().size(); ++ti) {
      std::vector<Cell> row;
      if (multi) row.emplace_back(series[r].label);
      row.emplace_back(stats.times()[ti]);
      auto push_channel = [&](int ci) {
        if (ci < 0) row.emplace_back(std::monostate{});
        else row.emplace_back(stats.mean(ti, static_cast<std::size_t>(ci)));
      };
      if (any_neg) {
        push_channel(c_neg);
        if (c_neg < 0) row.emplace_back(std::monostate{});
        else row.emplace_back(stats.dispersion(ti, static_cast<std::size_t>(c_neg)));
        for (int m = 1; m <= max_families; ++m) {
          push_channel(c_family[static_cast<std::size_t>(m - 1)]);
        }
      }
      if (any_emb) push_channel(c_emb);
      if (any_sl) push_channel(c_sl);
      if (any_purity) push_channel(c_purity);
      row.emplace_back(static_cast<double>(stats.count(ti, 0)));
      table.rows.push_back(std::move(row));
    }
  }

  write_table(table, a);

  nlohmann::json echo;
  echo["preset"] = a.preset.empty() ? nlohmann::json() : nlohmann::json(a.preset);
  nlohmann::json jseries = nlohmann::json::array();
  for (std::size_t i = 0; i < series.size(); ++i) {
    jseries.push_back({{"label", series[i].label},
                       {"n", series[i].n_qubits},
                       {"state", series[i].state},
                       {"samples", series[i].samples},
                       {"seed", configs[i].seed}});
  }
  echo["series"] = std::move(jseries);
  echo["x"] = (a.x_opt && a.x_opt->count()) ? nlohmann::json(a.x) : nlohmann::json();
  echo["lambda_ratio"] = a.lambda_ratio;
  echo["t_max"] = t_max;
  echo["points"] = points;
  echo["measures"] = measure_tokens(measures);
  echo["format"] = a.format;
  echo["out"] = a.out;
  echo["states_dir"] = a.states_dir;
  write_manifest(a.out, run_manifest("simulate", echo, a.seed));

  std::cout << "wrote " << a.out << " (" << table.rows.size() << " rows) and "
            << manifest_path_for(a.out).string() << "\n";
  return 0;
}

// ---- converge ----------------------------------------------------------

int exec_converge(CommonArgs& a, double& probe_time, CLI::Option* probe_opt,
                  std::string& sizes_text, CLI::Option* sizes_opt) {
  int n = a.n;
  std::string state = a.state;
  std::vector<int> sizes = parse_sizes(sizes_text);
  double probe = probe_time;

  if (!a.preset.empty()) {
    const Preset& preset = preset_or_throw(a.preset, Preset::Kind::convergence);
    if (a.n_opt->count() == 0) n = preset.n_qubits;
    if (a.state_opt->count() == 0) state = preset.state;
    if (probe_opt->count() == 0) probe = preset.probe_time;
    if (sizes_opt->count() == 0) sizes = preset.sizes;
  } else if (a.n_opt->count() == 0) {
    throw std::invalid_argument("--n is required unless --preset is given");
  }
  require_out(a);

  RunConfig config;
  config.n_qubits = n;
  config.state = parse_state_spec(state, n);
  config.lambda_ratio = a.lambda_ratio;
  config.samples = sizes.empty() ? 1 : sizes.back();
  config.seed = a.seed;
  config.states_dir = a.states_dir;

  const auto rows = convergence_study(config, sizes, probe, a.execution());

  Table table;
  table.columns = {"n_samples", "N_mean", "N_stderr"};
  for (const ConvergenceRow& row : rows) {
    table.rows.push_back(
        {static_cast<double>(row.samples), row.mean, row.std_error});
  }
  write_table(table, a);

  nlohmann::json echo;
  echo["preset"] = a.preset.empty() ? nlohmann::json() : nlohmann::json(a.preset);
  echo["n"] = n;
  echo["state"] = state;
  echo["probe_time"] = probe;
  echo["sizes"] = sizes;
  echo["lambda_ratio"] = a.lambda_ratio;
  echo["format"] = a.format;
  echo["out"] = a.out;
  echo["states_dir"] = a.states_dir;
  write_manifest(a.out, run_manifest("converge", echo, a.seed));

  std::cout << "wrote " << a.out << " (" << table.rows.size() << " rows) and "
            << manifest_path_for(a.out).string() << "\n";
  return 0;
}

// ---- sweep -------------------------------------------------------------

int exec_sweep(CommonArgs& a, const std::string& x_grid_text) {
  if (a.n_opt->count() == 0) throw std::invalid_argument("--n is required");
  require_out(a);
  const std::vector<double> x_grid = parse_x_grid(x_grid_text);

  RunConfig config;
  config.n_qubits = a.n;
  config.state = parse_state_spec(a.state, a.n);
  config.lambda_ratio = a.lambda_ratio;
  config.grid = TimeGrid::uniform(a.t_max, a.points);
  config.samples = a.samples;
  config.seed = a.seed;
  config.states_dir = a.states_dir;

  const SweepSurface surface = mixed_sweep(config, x_grid, a.execution());

  Table table;
  table.columns = {"x", "gamma0_t", "N_mean", "N_disp", "n_samples"};
  for (std::size_t xi = 0; xi < surface.x_values().size(); ++xi) {
    for (std::size_t ti = 0; ti < surface.times().size(); ++ti) {
      table.rows.push_back({surface.x_values()[xi], surface.times()[ti],
                            surface.mean(xi, ti), surface.dispersion(xi, ti),
                            static_cast<double>(surface.count(xi, ti))});
    }
  }
  write_table(table, a);

  nlohmann::json echo;
  echo["n"] = a.n;
  echo["state"] = a.state;
  echo["x_grid"] = x_grid;
  echo["lambda_ratio"] = a.lambda_ratio;
  echo["t_max"] = a.t_max;
  echo["points"] = a.points;
  echo["samples"] = a.samples;
  echo["format"] = a.format;
  echo["out"] = a.out;
  echo["states_dir"] = a.states_dir;
  write_manifest(a.out, run_manifest("sweep", echo, a.seed));

  std::cout << "wrote " << a.out << " (" << table.rows.size() << " rows) and "
            << manifest_path_for(a.out).string() << "\n";
  return 0;
}

// ---- optimize ----------------------------------------------------------

struct OptimizeArgs {
  std::string tag;
  OptimizerConfig config;
  std::string states_dir = "states";
  std::string out;
  bool serial = false;
  CLI::Option* n_opt = nullptr;
};

int exec_optimize(OptimizeArgs& a) {
  if (a.n_opt->count() == 0) throw std::invalid_argument("--n is required");

  const OptimizationResult result = maximize_global_entanglement(
      a.config, a.serial ? Execution::serial : Execution::parallel);

  const std::filesystem::path state_path = optimized_state_path(a.states_dir, a.tag);
  save_state(result.best_state, state_path);

  nlohmann::json echo;
  echo["tag"] = a.tag;
  echo["n"] = a.config.n_qubits;
  echo["restarts"] = a.config.restarts;
  echo["max_iterations"] = a.config.max_iterations;
  echo["initial_step"] = a.config.initial_step;
  echo["step_shrink"] = a.config.step_shrink;
  echo["improvement_tol"] = a.config.improvement_tol;
  echo["stall_window"] = a.config.stall_window;
  echo["min_step"] = a.config.min_step;
  echo["states_dir"] = a.states_dir;
  write_manifest(state_path, run_manifest("optimize", echo, a.config.seed));

  nlohmann::json report;
  report["tag"] = a.tag;
  report["n"] = a.config.n_qubits;
  report["best_value"] = result.best_value;
  report["best_restart"] = result.best_restart;
  report["state_file"] = state_path.string();
  nlohmann::json jrestarts = nlohmann::json::array();
  for (const RestartSummary& r : result.restarts) {
    jrestarts.push_back({{"restart", r.restart_index},
                         {"seed", r.seed},
                         {"best_value", r.best_value},
                         {"iterations", r.iterations}});
  }
  report["restarts"] = std::move(jrestarts);
  const std::filesystem::path report_path =
      a.out.empty() ? std::filesystem::path(a.states_dir) / (a.tag + ".report.json")
                    : std::filesystem::path(a.out);
  atomic_write_file(report_path, report.dump(2) + "\n");
  write_manifest(report_path, run_manifest("optimize", echo, a.config.seed));

  std::cout << "best global entanglement " << format_number(result.best_value)
            << " (restart " << result.best_restart << ") -> " << state_path.string()
            << "\n";
  return 0;
}

// ---- state-info --------------------------------------------------------

struct StateInfoArgs {
  int n = 0;
  std::string state = "haar";
  std::uint64_t seed = 0;
  std::string states_dir = "states";
  std::string out;
  CLI::Option* n_opt = nullptr;
};

int exec_state_info(StateInfoArgs& a) {
  if (a.n_opt->count() == 0) throw std::invalid_argument("--n is required");
  const StateSpec spec = parse_state_spec(a.state, a.n);
  const PureState psi = realize_state(spec, a.seed, a.states_dir);
  if (psi.n_qubits() != a.n) {
    throw std::invalid_argument("loaded state qubit count differs from --n");
  }
  const BipartitionFamilies families = enumerate_bipartitions(a.n);
  const DensityOperator rho = psi.projector();
  const MeasureSet all{true, true, true, true};
  const auto names = measure_names(a.n, all);
  const MeasureVector values = evaluate_measures(rho, families, all);

  nlohmann::json doc;
  doc["n"] = a.n;
  doc["state"] = spec.text();
  if (spec.is_random()) doc["seed"] = a.seed;
  nlohmann::json measures;
  for (std::size_t i = 0; i < names.size(); ++i) measures[names[i]] = values.values[i];
  doc["measures"] = std::move(measures);
  nlohmann::json family_sizes = nlohmann::json::array();
  for (const auto& family : families.families) family_sizes.push_back(family.size());
  doc["cuts_per_family"] = std::move(family_sizes);

  const std::string payload = doc.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << payload;
  } else {
    atomic_write_file(a.out, payload);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

}  // namespace

const std::vector<Preset>& figure_recipes() {
  static const std::vector<Preset> presets = [] {
    std::vector<Preset> v;
    const MeasureSet neg{};  // negativity only
    MeasureSet neg_emb{};
    neg_emb.e_mb = true;
    MeasureSet neg_sl{};
    neg_sl.linear_entropy = true;

    auto timeseries = [](std::string name, std::string description, MeasureSet measures,
                         std::vector<PresetSeries> series) {
      Preset p;
      p.name = std::move(name);
      p.description = std::move(description);
      p.kind = Preset::Kind::timeseries;
      p.measures = measures;
      p.series = std::move(series);
      return p;
    };

    v.push_back(timeseries("fig1a", "3 qubits: haar ensemble mean vs ghz", neg,
                           {{"haar_n3", 3, "haar", 500}, {"ghz_n3", 3, "ghz", 1}}));
    v.push_back(timeseries("fig1b", "4 qubits: haar ensemble mean vs ghz and hs", neg,
                           {{"haar_n4", 4, "haar", 500},
                            {"ghz_n4", 4, "ghz", 1},
                            {"hs_n4", 4, "hs", 1}}));
    v.push_back(timeseries("fig1c", "5 qubits: haar ensemble mean vs ghz and optimized me5",
                           neg,
                           {{"haar_n5", 5, "haar", 500},
                            {"ghz_n5", 5, "ghz", 1},
                            {"opt_n5", 5, "optimized:me5", 1}}));
    v.push_back(timeseries("fig1d", "6 qubits: haar ensemble mean vs ghz and optimized me6",
                           neg,
                           {{"haar_n6", 6, "haar", 500},
                            {"ghz_n6", 6, "ghz", 1},
                            {"opt_n6", 6, "optimized:me6", 1}}));
    v.push_back(timeseries("fig2a", "ghz revival structure, 3 vs 6 qubits", neg,
                           {{"ghz_n3", 3, "ghz", 1}, {"ghz_n6", 6, "ghz", 1}}));
    v.push_back(timeseries("fig2b", "haar revival structure, 3 vs 6 qubits", neg,
                           {{"haar_n3", 3, "haar", 500}, {"haar_n6", 6, "haar", 500}}));
    v.push_back(timeseries("fig3", "haar ensemble means, 3 to 6 qubits", neg,
                           {{"haar_n3", 3, "haar", 500},
                            {"haar_n4", 4, "haar", 500},
                            {"haar_n5", 5, "haar", 500},
                            {"haar_n6", 6, "haar", 500}}));
    v.push_back(timeseries("fig4", "per-family negativity breakdown, 4 and 5 qubits", neg,
                           {{"haar_n4", 4, "haar", 500}, {"haar_n5", 5, "haar", 500}}));
    v.push_back(timeseries("fig5a", "negativity vs purity-based measure, 4 qubits", neg_emb,
                           {{"haar_n4", 4, "haar", 500}}));
    v.push_back(timeseries("fig5b", "negativity vs purity-based measure, 5 qubits", neg_emb,
                           {{"haar_n5", 5, "haar", 500}}));
    v.push_back(timeseries("fig6", "negativity vs mixedness, 6 qubits", neg_sl,
                           {{"haar_n6", 6, "haar", 500}}));

    Preset fig8;
    fig8.name = "fig8";
    fig8.description = "ensemble-size convergence ladder, 4 qubits at gamma0*t = 40";
    fig8.kind = Preset::Kind::convergence;
    fig8.n_qubits = 4;
    fig8.state = "haar";
    fig8.probe_time = 40.0;
    fig8.sizes = {100, 1000, 10000};
    v.push_back(std::move(fig8));

    return v;
  }();
  return presets;
}

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : figure_recipes()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Ensemble dynamics of multiqubit entanglement under independent "
               "non-Markovian amplitude damping"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Read options from an INI/TOML file (flags win)");
  app.require_subcommand(1);

  CLI::App* sim = app.add_subcommand(
      "simulate", "Evolve an ensemble and tabulate measures over a time grid");
  CommonArgs sim_args;
  add_common(sim, sim_args, /*with_preset=*/true);
  sim_args.x_opt = sim->add_option(
      "--x", sim_args.x, "Mix the initial state with white noise at this weight");

  CLI::App* conv = app.add_subcommand(
      "converge", "Mean global negativity at one probe time for nested ensemble sizes");
  CommonArgs conv_args;
  add_common(conv, conv_args, /*with_preset=*/true);
  double probe_time = 40.0;
  std::string sizes_text = "100,1000,10000";
  CLI::Option* probe_opt =
      conv->add_option("--probe-time", probe_time, "gamma0*t at which to probe");
  CLI::Option* sizes_opt =
      conv->add_option("--sizes", sizes_text, "Comma list of ensemble sizes, ascending");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Global negativity across mixing weights for a noisy initial family");
  CommonArgs sweep_args;
  add_common(sweep, sweep_args, /*with_preset=*/false);
  std::string x_grid_text = "0:1:11";
  sweep->add_option("--x-grid", x_grid_text, "Mixing weights, lo:hi:count or comma list");

  CLI::App* opt = app.add_subcommand(
      "optimize", "Search for a state maximizing global entanglement and store it");
  OptimizeArgs opt_args;
  opt_args.n_opt = opt->add_option("--n", opt_args.config.n_qubits, "Number of qubits");
  opt->add_option("--tag", opt_args.tag, "Name the stored state (optimized:TAG)")
      ->required();
  opt->add_option("--restarts", opt_args.config.restarts, "Independent climbs");
  opt->add_option("--iters", opt_args.config.max_iterations, "Iteration budget per climb");
  opt->add_option("--step", opt_args.config.initial_step, "Initial perturbation scale");
  opt->add_option("--shrink", opt_args.config.step_shrink, "Step shrink factor");
  opt->add_option("--tol", opt_args.config.improvement_tol,
                  "Smallest improvement that resets the stall window");
  opt->add_option("--stall", opt_args.config.stall_window,
                  "Non-improving proposals before the step shrinks");
  opt->add_option("--min-step", opt_args.config.min_step, "Stop once the step is smaller");
  opt->add_option("--seed", opt_args.config.seed, "Master seed");
  opt->add_option("--states-dir", opt_args.states_dir, "Where to store the state");
  opt->add_option("--out", opt_args.out, "Report path (default states-dir/TAG.report.json)");
  opt->add_flag("--serial", opt_args.serial, "Run restarts serially (same results)");

  CLI::App* info = app.add_subcommand(
      "state-info", "Evaluate every measure on one initial state and print JSON");
  StateInfoArgs info_args;
  info_args.n_opt = info->add_option("--n", info_args.n, "Number of qubits");
  info->add_option("--state", info_args.state,
                   "ghz | w | hs | basis:BITS | haar | file:PATH | optimized:TAG");
  info->add_option("--seed", info_args.seed, "Seed for haar realizations");
  info->add_option("--states-dir", info_args.states_dir,
                   "Directory that optimized:TAG states are read from");
  info->add_option("--out", info_args.out, "Write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "Run 'entdyn --help' or 'entdyn SUBCOMMAND --help' for usage.\n";
    return 2;
  }

  try {
    if (sim->parsed()) return exec_simulate(sim_args);
    if (conv->parsed()) return exec_converge(conv_args, probe_time, probe_opt, sizes_text,
                                             sizes_opt);
    if (sweep->parsed()) return exec_sweep(sweep_args, x_grid_text);
    if (opt->parsed()) return exec_optimize(opt_args);
    if (info->parsed()) return exec_state_info(info_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "Run 'entdyn SUBCOMMAND --help' for usage.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace entdyn
