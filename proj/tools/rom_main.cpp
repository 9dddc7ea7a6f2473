#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rom/dataset.hpp"
#include "rom/errors.hpp"
#include "rom/kinematics.hpp"
#include "rom/metrics.hpp"
#include "rom/ocsvm.hpp"
#include "rom/tuning.hpp"
#include "rom/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNoFeasible = 2;
constexpr int kExitNoConvergence = 3;

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rom::SchemaError("cannot open input for hashing: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << h;
  return os.str();
}

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every artifact-producing command records what went in and what came out.
void write_manifest(const std::string& command, const nlohmann::json& config,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                    const std::string& path) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = rom::kVersion;
  j["timestamp"] = iso_utc_now();
  j["config"] = config;
  nlohmann::json ins = nlohmann::json::array();
  for (const auto& p : inputs) ins.push_back({{"path", p}, {"fnv1a64", hash_hex(fnv1a64_file(p))}});
  j["inputs"] = std::move(ins);
  j["outputs"] = outputs;
  std::ofstream out(path);
  if (!out) throw rom::SchemaError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

double parse_number(const std::string& field) {
  double v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw rom::SchemaError("cannot parse number '" + field + "'");
  }
  return v;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(parse_number(field));
  return out;
}

Eigen::MatrixXd load_angle_matrix(const std::vector<std::string>& paths,
                                  const std::vector<int>& columns) {
  Eigen::MatrixXd all;
  for (const auto& path : paths) {
    Eigen::MatrixXd block = rom::load_angles_csv(path).angles;
    if (!columns.empty()) {
      Eigen::MatrixXd sel(block.rows(), static_cast<Eigen::Index>(columns.size()));
      for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] < 0 || columns[c] >= block.cols()) {
          throw rom::SchemaError(path + ": column index " + std::to_string(columns[c]) +
                                 " out of range (file has " + std::to_string(block.cols()) +
                                 " angle columns)");
        }
        sel.col(static_cast<Eigen::Index>(c)) = block.col(columns[c]);
      }
      block = std::move(sel);
    }
    if (all.rows() == 0) {
      all = std::move(block);
    } else {
      if (block.cols() != all.cols()) {
        throw rom::SchemaError(path + ": expected " + std::to_string(all.cols()) +
                               " angle columns, got " + std::to_string(block.cols()));
      }
      const Eigen::Index old_rows = all.rows();
      all.conservativeResize(old_rows + block.rows(), Eigen::NoChange);
      all.bottomRows(block.rows()) = block;
    }
  }
  if (all.rows() == 0) throw rom::SchemaError("no samples loaded");
  return all;
}

struct ExtractOptions {
  std::string input, output, chain_config;
  std::string side = "right";
};

int run_extract(const ExtractOptions& opt) {
  rom::KinematicChain chain;
  if (!opt.chain_config.empty()) {
    chain = rom::KinematicChain::from_json_file(opt.chain_config);
  } else if (opt.side == "right" || opt.side == "left") {
    chain = rom::KinematicChain::upper_body(opt.side == "right" ? rom::Side::right : rom::Side::left);
  } else {
    throw rom::SchemaError("side must be 'right' or 'left'");
  }
  const auto frames = rom::load_frames_csv(opt.input, {chain.chest, chain.upper_arm, chain.forearm, chain.hand});
  if (frames.empty()) throw rom::SchemaError(opt.input + ": no frames");
  const rom::AngleTrack track = rom::extract_angle_track(frames, chain);
  rom::save_angles_csv(opt.output, track);

  int flagged = 0;
  for (const bool g : track.gimbal) flagged += g ? 1 : 0;
  nlohmann::json config = {{"side", opt.side}, {"chain_config", opt.chain_config}};
  std::vector<std::string> inputs = {opt.input};
  if (!opt.chain_config.empty()) inputs.push_back(opt.chain_config);
  write_manifest("extract", config, inputs, {opt.output}, opt.output + ".manifest.json");
  std::cout << "extracted " << frames.size() << " frames, " << flagged
            << " flagged near gimbal lock -> " << opt.output << '\n';
  return kExitOk;
}

struct TrainOptions {
  std::vector<std::string> train_files;
  std::string output = "model.json";
  std::string dofs;
  std::vector<int> columns;
  double nu = 0.05;
  double sigma = 40.0;
  double tolerance = 1e-6;
  std::uint64_t max_iterations = 10'000'000;
  int subsample = 0;
  std::string subsample_method = "farthest";
};

rom::SubsampleMethod subsample_method_of(const std::string& name) {
  if (name == "stride") return rom::SubsampleMethod::stride;
  if (name == "farthest") return rom::SubsampleMethod::farthest_point;
  throw rom::SchemaError("subsample method must be 'stride' or 'farthest'");
}

std::vector<std::string> parse_dof_names(const std::string& text, Eigen::Index dims) {
  std::vector<std::string> names;
  if (text.empty()) return names;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) names.push_back(field);
  if (static_cast<Eigen::Index>(names.size()) != dims) {
    throw rom::SchemaError("got " + std::to_string(names.size()) + " dof names for " +
                           std::to_string(dims) + " columns");
  }
  return names;
}

int run_train(const TrainOptions& opt) {
  Eigen::MatrixXd train = load_angle_matrix(opt.train_files, opt.columns);
  if (opt.subsample > 0) {
    train = rom::subsample(train, opt.subsample, subsample_method_of(opt.subsample_method));
  }
  rom::TrainConfig cfg;
  cfg.nu = opt.nu;
  cfg.sigma = opt.sigma;
  cfg.tolerance = opt.tolerance;
  cfg.max_iterations = opt.max_iterations;
  rom::TrainResult result = rom::train_ocsvm(train, cfg);
  result.model.dofs = parse_dof_names(opt.dofs, train.cols());
  result.model.save(opt.output);

  nlohmann::json config = {{"nu", opt.nu},
                           {"sigma", opt.sigma},
                           {"tolerance", opt.tolerance},
                           {"max_iterations", opt.max_iterations},
                           {"subsample", opt.subsample},
                           {"subsample_method", opt.subsample_method},
                           {"columns", opt.columns},
                           {"dofs", opt.dofs}};
  write_manifest("train", config, opt.train_files, {opt.output}, opt.output + ".manifest.json");
  std::cout << "trained on " << train.rows() << " samples: " << result.model.sv_count()
            << " support vectors (fraction " << result.model.sv_fraction << "), "
            << result.diagnostics.iterations << " iterations -> " << opt.output << '\n';
  return kExitOk;
}

struct TuneOptions {
  std::vector<std::string> train_files, test_files;
  std::string report = "tuning_report.json";
  std::string cells, model, dofs;
  std::vector<int> columns;
  rom::GridConfig grid;
  rom::MEsvConfig mesv;
  double tolerance = 1e-6;
  std::uint64_t max_iterations = 10'000'000;
  int subsample = 0;
  std::string subsample_method = "farthest";
};

int run_tune(const TuneOptions& opt) {
  Eigen::MatrixXd train = load_angle_matrix(opt.train_files, opt.columns);
  const Eigen::MatrixXd test = load_angle_matrix(opt.test_files, opt.columns);
  if (opt.subsample > 0) {
    train = rom::subsample(train, opt.subsample, subsample_method_of(opt.subsample_method));
  }
  rom::TrainConfig base;
  base.tolerance = opt.tolerance;
  base.max_iterations = opt.max_iterations;

  const rom::TuneResult result = rom::grid_search(train, test, opt.grid, opt.mesv, base);

  std::ofstream report_out(opt.report);
  if (!report_out) throw rom::SchemaError("cannot open for writing: " + opt.report);
  report_out << result.report.to_json() << '\n';
  report_out.close();

  std::vector<std::string> outputs = {opt.report};
  if (!opt.cells.empty()) {
    result.report.write_cells_csv(opt.cells);
    outputs.push_back(opt.cells);
  }
  if (result.report.feasible && !opt.model.empty()) {
    rom::OcsvmModel model = *result.model;
    model.dofs = parse_dof_names(opt.dofs, train.cols());
    model.save(opt.model);
    outputs.push_back(opt.model);
  }

  nlohmann::json config = {{"nu_range", {opt.grid.nu_lo, opt.grid.nu_hi}},
                           {"sigma_range", {opt.grid.sigma_lo, opt.grid.sigma_hi}},
                           {"nu_count", opt.grid.nu_count},
                           {"sigma_count", opt.grid.sigma_count},
                           {"refine_rounds", opt.grid.refine_rounds},
                           {"boundary_change_threshold", opt.grid.boundary_change_threshold},
                           {"eval_points_per_dim", opt.grid.eval_points_per_dim},
                           {"eval_padding", opt.grid.eval_padding},
                           {"negative_offset", opt.grid.negative_offset},
                           {"mesv_radius", opt.mesv.radius},
                           {"mesv_min_neighbors", opt.mesv.min_neighbors},
                           {"mesv_max_misclassified", opt.mesv.max_misclassified},
                           {"mesv_max_interior", opt.mesv.max_interior},
                           {"mesv_interior_fraction", opt.mesv.max_interior_fraction},
                           {"tolerance", opt.tolerance},
                           {"max_iterations", opt.max_iterations},
                           {"subsample", opt.subsample},
                           {"columns", opt.columns}};
  std::vector<std::string> inputs = opt.train_files;
  inputs.insert(inputs.end(), opt.test_files.begin(), opt.test_files.end());
  write_manifest("tune", config, inputs, outputs, opt.report + ".manifest.json");

  if (!result.report.feasible) {
    std::cerr << "no (nu, sigma) cell satisfied all three constraints; see " << opt.report << '\n';
    for (const auto& [constraint, count] : result.report.failure_counts) {
      std::cerr << "  failed " << constraint << ": " << count << " cells\n";
    }
    return kExitNoFeasible;
  }
  std::cout << "selected nu=" << result.report.best_nu << " sigma=" << result.report.best_sigma
            << " (enclosed volume " << result.report.best_volume << ") -> " << opt.report << '\n';
  return kExitOk;
}

struct EvalOptions {
  std::string model, input, output;
  std::vector<std::string> points;
  bool gradient = false;
  double band = 0.0;
};

int run_eval(const EvalOptions& opt) {
  const rom::OcsvmModel model = rom::OcsvmModel::load(opt.model);
  Eigen::MatrixXd pts;
  if (!opt.input.empty()) {
    pts = rom::load_angles_csv(opt.input, model.dimension()).angles;
  }
  for (const auto& text : opt.points) {
    const std::vector<double> v = parse_number_list(text);
    if (static_cast<int>(v.size()) != model.dimension()) {
      throw rom::SchemaError("point '" + text + "' has " + std::to_string(v.size()) +
                             " coordinates, model expects " + std::to_string(model.dimension()));
    }
    pts.conservativeResize(pts.rows() + 1, model.dimension());
    for (int d = 0; d < model.dimension(); ++d) pts(pts.rows() - 1, d) = v[static_cast<std::size_t>(d)];
  }
  if (pts.rows() == 0) throw rom::SchemaError("nothing to evaluate: give --input or --point");

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!opt.output.empty()) {
    file.open(opt.output);
    if (!file) throw rom::SchemaError("cannot open for writing: " + opt.output);
    out = &file;
  }
  for (int d = 0; d < model.dimension(); ++d) *out << 'q' << (d + 1) << ',';
  *out << "gamma,region";
  if (opt.gradient) {
    for (int d = 0; d < model.dimension(); ++d) *out << ",dgamma_dq" << (d + 1);
  }
  *out << '\n';
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const Eigen::VectorXd q = pts.row(i).transpose();
    const double g = model.gamma(q);
    for (int d = 0; d < model.dimension(); ++d) *out << q[d] << ',';
    *out << g << ',' << rom::region_name(model.classify(q, opt.band));
    if (opt.gradient) {
      const Eigen::VectorXd dg = model.gamma_gradient(q);
      for (int d = 0; d < model.dimension(); ++d) *out << ',' << dg[d];
    }
    *out << '\n';
  }
  if (!opt.output.empty()) {
    std::vector<std::string> inputs = {opt.model};
    if (!opt.input.empty()) inputs.push_back(opt.input);
    write_manifest("eval", {{"gradient", opt.gradient}, {"band", opt.band}}, inputs, {opt.output},
                   opt.output + ".manifest.json");
  }
  return kExitOk;
}

struct MetricsOptions {
  std::vector<std::string> impaired, healthy;
  std::string weights, output = "metrics.json";
  int resolution = 256;
  double padding = 30.0;
};

std::pair<int, int> pair_identity(const rom::OcsvmModel& model, bool single) {
  if (model.dofs.empty() && single) return {0, 1};
  return rom::dof_pair_of(model);
}

int run_metrics(const MetricsOptions& opt) {
  if (opt.impaired.empty() || opt.healthy.empty()) {
    throw rom::SchemaError("metrics needs at least one --impaired and one --healthy model");
  }
  auto measure = [&](const std::vector<std::string>& paths) {
    std::vector<rom::PairArea> areas;
    for (const auto& path : paths) {
      const rom::OcsvmModel model = rom::OcsvmModel::load(path);
      rom::PairArea a = rom::pair_area(model, opt.resolution, opt.padding);
      std::tie(a.i, a.j) = pair_identity(model, paths.size() == 1);
      areas.push_back(a);
    }
    return areas;
  };
  const std::vector<rom::PairArea> impaired = measure(opt.impaired);
  const std::vector<rom::PairArea> healthy = measure(opt.healthy);

  auto key_set = [](const std::vector<rom::PairArea>& areas) {
    std::map<std::pair<int, int>, const rom::PairArea*> keys;
    for (const auto& a : areas) {
      if (!keys.emplace(std::minmax(a.i, a.j), &a).second) {
        throw rom::SchemaError("two models cover the same DoF pair (" + std::to_string(a.i) + ", " +
                               std::to_string(a.j) + ")");
      }
    }
    return keys;
  };
  const auto imp_keys = key_set(impaired);
  const auto hea_keys = key_set(healthy);
  for (const auto& [key, area] : imp_keys) {
    if (hea_keys.count(key) == 0) {
      throw rom::SchemaError("impaired pair (" + std::to_string(key.first) + ", " +
                             std::to_string(key.second) + ") has no healthy counterpart");
    }
  }
  for (const auto& [key, area] : hea_keys) {
    if (imp_keys.count(key) == 0) {
      throw rom::SchemaError("healthy pair (" + std::to_string(key.first) + ", " +
                             std::to_string(key.second) + ") has no impaired counterpart");
    }
  }

  rom::WeightMatrix weights;
  if (!opt.weights.empty()) {
    weights = rom::WeightMatrix::load(opt.weights);
  } else {
    for (const auto& [key, area] : imp_keys) weights.set(key.first, key.second, 1.0);
  }

  const double v_imp = rom::weighted_volume(impaired, weights);
  const double v_hea = rom::weighted_volume(healthy, weights);
  const double index = rom::impairment_index(v_imp, v_hea);

  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [key, imp] : imp_keys) {
    const rom::PairArea* hea = hea_keys.at(key);
    pairs.push_back({{"i", key.first},
                     {"j", key.second},
                     {"weight", weights.at(key.first, key.second)},
                     {"impaired_area", imp->area},
                     {"impaired_uncertainty", imp->uncertainty},
                     {"healthy_area", hea->area},
                     {"healthy_uncertainty", hea->uncertainty}});
  }
  nlohmann::json j;
  j["pairs"] = std::move(pairs);
  j["V_impaired"] = v_imp;
  j["V_healthy"] = v_hea;
  j["II"] = index;
  std::ofstream out(opt.output);
  if (!out) throw rom::SchemaError("cannot open for writing: " + opt.output);
  out << j.dump(2) << '\n';
  out.close();

  nlohmann::json config = {{"resolution", opt.resolution}, {"padding", opt.padding}};
  std::vector<std::string> inputs = opt.impaired;
  inputs.insert(inputs.end(), opt.healthy.begin(), opt.healthy.end());
  if (!opt.weights.empty()) inputs.push_back(opt.weights);
  write_manifest("metrics", config, inputs, {opt.output}, opt.output + ".manifest.json");
  std::cout << "impairment index " << index << " (impaired " << v_imp << ", healthy " << v_hea
            << ") -> " << opt.output << '\n';
  return kExitOk;
}

struct IsolinesOptions {
  std::string model, output = "isolines.csv";
  int resolution = 256;
  double padding = 30.0;
};

int run_isolines(const IsolinesOptions& opt) {
  const rom::OcsvmModel model = rom::OcsvmModel::load(opt.model);
  const rom::IsolineLattice lattice = rom::isoline_lattice(model, opt.resolution, opt.padding);
  std::ofstream out(opt.output);
  if (!out) throw rom::SchemaError("cannot open for writing: " + opt.output);
  out << "x,y,gamma\n";
  for (Eigen::Index r = 0; r < lattice.ys.size(); ++r) {
    for (Eigen::Index c = 0; c < lattice.xs.size(); ++c) {
      out << lattice.xs[c] << ',' << lattice.ys[r] << ',' << lattice.values(r, c) << '\n';
    }
  }
  out.close();
  write_manifest("isolines", {{"resolution", opt.resolution}, {"padding", opt.padding}},
                 {opt.model}, {opt.output}, opt.output + ".manifest.json");
  std::cout << "wrote " << lattice.xs.size() << "x" << lattice.ys.size() << " lattice -> "
            << opt.output << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range-of-motion boundary learning from joint-angle recordings"};
  app.set_version_flag("--version", rom::kVersion);
  app.require_subcommand(1);

  ExtractOptions ex;
  CLI::App* extract = app.add_subcommand("extract", "Convert a motion-capture frames CSV to joint angles");
  extract->add_option("--input", ex.input, "frames CSV")->required();
  extract->add_option("--output", ex.output, "angles CSV to write")->required();
  extract->add_option("--side", ex.side, "arm to extract: right or left");
  extract->add_option("--chain", ex.chain_config, "kinematic chain JSON (overrides --side)");

  TrainOptions tr;
  CLI::App* train = app.add_subcommand("train", "Fit a boundary model on angle CSVs");
  train->add_option("--train", tr.train_files, "training angle CSV (repeatable)")->required();
  train->add_option("--output", tr.output, "model JSON to write");
  train->add_option("--nu", tr.nu, "outlier fraction bound in (0, 1]");
  train->add_option("--sigma", tr.sigma, "kernel width in degrees");
  train->add_option("--tolerance", tr.tolerance, "solver stopping tolerance");
  train->add_option("--max-iterations", tr.max_iterations, "solver iteration cap");
  train->add_option("--subsample", tr.subsample, "keep at most this many training samples");
  train->add_option("--subsample-method", tr.subsample_method, "stride or farthest");
  train->add_option("--columns", tr.columns, "0-based angle columns to keep");
  train->add_option("--dofs", tr.dofs, "comma-separated DoF names to record in the model");

  TuneOptions tu;
  CLI::App* tune = app.add_subcommand("tune", "Constraint-filtered grid search over (nu, sigma)");
  tune->add_option("--train", tu.train_files, "training angle CSV (repeatable)")->required();
  tune->add_option("--test", tu.test_files, "reserved test angle CSV (repeatable)")->required();
  tune->add_option("--report", tu.report, "tuning report JSON to write");
  tune->add_option("--cells", tu.cells, "optional per-cell CSV to write");
  tune->add_option("--model", tu.model, "write the selected model here when feasible");
  tune->add_option("--nu-min", tu.grid.nu_lo, "smallest nu");
  tune->add_option("--nu-max", tu.grid.nu_hi, "largest nu");
  tune->add_option("--nu-count", tu.grid.nu_count, "nu grid points");
  tune->add_option("--sigma-min", tu.grid.sigma_lo, "smallest sigma (degrees)");
  tune->add_option("--sigma-max", tu.grid.sigma_hi, "largest sigma (degrees)");
  tune->add_option("--sigma-count", tu.grid.sigma_count, "sigma grid points");
  tune->add_option("--refine-rounds", tu.grid.refine_rounds, "refinement rounds after the sweep");
  tune->add_option("--boundary-change-threshold", tu.grid.boundary_change_threshold,
                   "stop refining when the winner moves less than this fraction");
  tune->add_option("--eval-points", tu.grid.eval_points_per_dim, "evaluation lattice points per dimension");
  tune->add_option("--eval-padding", tu.grid.eval_padding, "evaluation window padding (degrees)");
  tune->add_option("--negative-offset", tu.grid.negative_offset, "outside-point offset (degrees)");
  tune->add_option("--threads", tu.grid.threads, "worker threads (0: all cores)");
  tune->add_option("--mesv-radius", tu.mesv.radius, "neighbor ball radius (<=0: auto)");
  tune->add_option("--mesv-min-neighbors", tu.mesv.min_neighbors, "neighbors needed for a confident verdict");
  tune->add_option("--mesv-max-misclassified", tu.mesv.max_misclassified, "per-SV outlier budget");
  tune->add_option("--mesv-max-interior", tu.mesv.max_interior, "interior SVs tolerated (<0: auto)");
  tune->add_option("--mesv-interior-fraction", tu.mesv.max_interior_fraction,
                   "auto interior allowance as a fraction of the SV count")
      ->check(CLI::Range(0.0, 1.0));
  tune->add_option("--tolerance", tu.tolerance, "solver stopping tolerance");
  tune->add_option("--max-iterations", tu.max_iterations, "solver iteration cap");
  tune->add_option("--subsample", tu.subsample, "keep at most this many training samples");
  tune->add_option("--subsample-method", tu.subsample_method, "stride or farthest");
  tune->add_option("--columns", tu.columns, "0-based angle columns to keep");
  tune->add_option("--dofs", tu.dofs, "comma-separated DoF names recorded in the selected model");

  EvalOptions ev;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on angle samples");
  eval->add_option("--model", ev.model, "model JSON")->required();
  eval->add_option("--input", ev.input, "angles CSV to evaluate");
  eval->add_option("--point", ev.points, "comma-separated angles (repeatable)");
  eval->add_option("--output", ev.output, "CSV to write (default: stdout)");
  eval->add_flag("--gradient", ev.gradient, "include the gamma gradient columns");
  eval->add_option("--band", ev.band, "half-width of the boundary band around gamma = 0")
      ->check(CLI::NonNegativeNumber);

  MetricsOptions me;
  CLI::App* metrics = app.add_subcommand("metrics", "Areas, weighted volumes and the impairment index");
  metrics->add_option("--impaired", me.impaired, "impaired-arm pair model JSON (repeatable)")->required();
  metrics->add_option("--healthy", me.healthy, "healthy-arm pair model JSON (repeatable)")->required();
  metrics->add_option("--weights", me.weights, "pair weight JSON (default: weight 1 per pair)");
  metrics->add_option("--output", me.output, "metrics JSON to write");
  metrics->add_option("--resolution", me.resolution, "area lattice resolution");
  metrics->add_option("--padding", me.padding, "area window padding (degrees)");

  IsolinesOptions is;
  CLI::App* isolines = app.add_subcommand("isolines", "Sample gamma on a 2-D lattice for plotting");
  isolines->add_option("--model", is.model, "model JSON")->required();
  isolines->add_option("--output", is.output, "lattice CSV to write");
  isolines->add_option("--resolution", is.resolution, "lattice resolution");
  isolines->add_option("--padding", is.padding, "window padding (degrees)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(extract)) return run_extract(ex);
    if (app.got_subcommand(train)) return run_train(tr);
    if (app.got_subcommand(tune)) return run_tune(tu);
    if (app.got_subcommand(eval)) return run_eval(ev);
    if (app.got_subcommand(metrics)) return run_metrics(me);
    if (app.got_subcommand(isolines)) return run_isolines(is);
  } catch (const rom::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
