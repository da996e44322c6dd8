#include "tvgm/io.hpp"
#include "tvgm/random.hpp"
#include "tvgm/studies.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using namespace tvgm;

namespace {

struct Common {
  std::uint64_t seed = 1;
  int grid = 50;
  double h = 0.0;
  double h_const = 1.2;
  double lambda = 0.0;
  double lambda_const = 0.9;
  bool cv = false;
  int cv_folds = 5;
  double alpha = 0.05;
  int bootstrap = 500;
  int jobs = 1;
  std::string out = ".";
};

void add_core(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--jobs", c.jobs, "Worker threads");
  cmd->add_option("--out", c.out, "Output directory");
}

void add_estimation(CLI::App* cmd, Common& c) {
  cmd->add_option("--grid", c.grid, "Number of evaluation time points");
  cmd->add_option("--h", c.h, "Bandwidth (default h-const * n^(-1/5))");
  cmd->add_option("--h-const", c.h_const, "Bandwidth constant");
  auto* lambda = cmd->add_option("--lambda", c.lambda, "CLIME tuning parameter");
  cmd->add_option("--lambda-const", c.lambda_const,
                  "Constant in front of the lambda rate when --lambda is absent");
  auto* cv = cmd->add_flag("--cv", c.cv, "Choose lambda by cross-validation");
  lambda->excludes(cv);
  cmd->add_option("--cv-folds", c.cv_folds, "Cross-validation folds");
}

void add_inference(CLI::App* cmd, Common& c) {
  cmd->add_option("--alpha", c.alpha, "Significance level");
  cmd->add_option("--bootstrap", c.bootstrap, "Bootstrap draws B");
}

TestConfig test_config(const Common& c) {
  TestConfig cfg;
  cfg.alpha = c.alpha;
  cfg.B = c.bootstrap;
  cfg.grid_size = c.grid;
  cfg.h = c.h;
  cfg.h_const = c.h_const;
  cfg.lambda = c.lambda;
  cfg.lambda_const = c.lambda_const;
  cfg.cross_validate = c.cv;
  cfg.cv_folds = c.cv_folds;
  cfg.seed = c.seed;
  cfg.jobs = c.jobs;
  if (c.h < 0.0) throw UsageError("--h must be positive");
  if (c.lambda < 0.0) throw UsageError("--lambda must be positive");
  cfg.validate();
  return cfg;
}

fs::path output_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out))
    throw UsageError("cannot create output directory '" + out + "'");
  return fs::path(out);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path.string() + "'");
  return f;
}

void require_readable(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read '" + path + "'");
}

std::string numbered(const std::string& stem, std::size_t g, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%03zu", g + 1);
  return stem + buf + ext;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

PairedDataset load_input(const std::string& path, bool standardize_columns) {
  PairedDataset ds = load_paired_file(path);
  return standardize_columns ? standardize(ds) : ds;
}

// simulate

struct SimulateArgs {
  int d = 20;
  int n = 400;
  int k = 3;
  bool alternative = false;
  double nuisance_scale = 0.1;
};

int run_simulate(const Common& c, const SimulateArgs& a) {
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (c.grid < 2) throw UsageError("--grid must be at least 2");
  if (!(a.nuisance_scale >= 0.0)) throw UsageError("--nuisance-scale must be nonnegative");
  Scenario scenario{a.d, a.k, a.n, a.nuisance_scale, a.alternative};
  SimulatedData sim;
  try {
    sim = simulate(scenario, c.seed);
  } catch (const ConstructionError& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = output_dir(c.out);
  auto data = open_output(dir / "dataset.csv");
  write_dataset(data, sim.data);

  const Vector grid = evaluation_grid(sim.data.z, c.grid);
  std::vector<EdgeSet> truth;
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const Eigen::MatrixXi support = true_support(sim.path, grid(g));
    EdgeSet es(a.d);
    for (int u = 0; u < a.d; ++u)
      for (int v = u + 1; v < a.d; ++v)
        if (support(u, v)) es.insert({u, v});
    truth.push_back(std::move(es));
  }
  auto truth_file = open_output(dir / "truth.txt");
  write_edge_lists(truth_file, to_std(grid), truth);
  return 0;
}

// estimate

struct EstimateArgs {
  std::string data;
  bool within = false;
  bool standardize = false;
};

int run_estimate(const Common& c, const EstimateArgs& a) {
  TestConfig cfg = test_config(c);
  require_readable(a.data);
  const fs::path dir = output_dir(c.out);
  const PairedDataset ds = load_input(a.data, a.standardize);
  ds.validate();
  const int n = static_cast<int>(ds.n());
  const int d = static_cast<int>(ds.d());
  KernelSpec kernel;
  kernel.bandwidth = cfg.h > 0.0 ? cfg.h : choose_bandwidth(n, cfg.h_const);
  ClimeConfig clime;
  const double rate = lambda_rate(n, d, kernel.bandwidth);
  clime.lambda = cfg.lambda > 0.0 ? cfg.lambda : cfg.lambda_const * rate;
  if (c.cv) {
    std::vector<double> grid;
    for (double k : cfg.cv_constants) grid.push_back(k * rate);
    const CvResult cvr = cross_validate_lambda(ds, kernel, grid, cfg.cv_folds,
                                               derive_seed(cfg.seed, "cv"), clime, cfg.jobs);
    clime.lambda = cvr.lambda_star;
    auto table = open_output(dir / "cv.csv");
    table << "lambda,cv,sd,selected\n";
    for (std::size_t i = 0; i < cvr.table.size(); ++i)
      table << format_double(cvr.table[i].lambda) << ',' << format_double(cvr.table[i].cv) << ','
            << format_double(cvr.table[i].sd) << ',' << (i == cvr.index ? 1 : 0) << '\n';
  }
  const FieldEstimate est = estimate_field(ds, kernel, evaluation_grid(ds.z, cfg.grid_size),
                                           clime, cfg.jobs, a.within);
  auto manifest = open_output(dir / "manifest.csv");
  manifest << "index,z,theta,debiased,kernel_mass,support_fraction,h,lambda\n";
  for (std::size_t g = 0; g < est.theta.size(); ++g) {
    const std::string theta_name = numbered("theta", g, ".csv");
    const std::string de_name = numbered("debiased", g, ".csv");
    auto tf = open_output(dir / theta_name);
    write_matrix(tf, est.theta[g].matrix);
    auto df = open_output(dir / de_name);
    write_matrix(df, est.field.theta_de[g]);
    manifest << g + 1 << ',' << format_double(est.field.grid(static_cast<Eigen::Index>(g)))
             << ',' << theta_name << ',' << de_name << ','
             << format_double(est.sigma[g].kernel_mass) << ','
             << format_double(est.sigma[g].support_fraction) << ','
             << format_double(kernel.bandwidth) << ',' << format_double(clime.lambda) << '\n';
  }
  return 0;
}

// test

struct TestArgs {
  std::string data;
  std::string property;
  bool stepdown = false;
  bool conservative = false;
  std::string aggregation = "per-time";
  bool standardize = false;
};

int run_test(const Common& c, const TestArgs& a) {
  TestConfig cfg = test_config(c);
  const GraphProperty property = GraphProperty::parse(a.property);
  if (a.aggregation == "union") cfg.aggregation = DegreeAggregation::union_all;
  require_readable(a.data);
  const fs::path dir = output_dir(c.out);
  const PairedDataset ds = load_input(a.data, a.standardize);
  const FieldEstimate est = prepare_field(ds, cfg);

  const bool algorithm1 = property.kind == GraphProperty::Kind::max_degree_greater && !a.stepdown;
  const TestOutcome outcome =
      algorithm1 ? test_max_degree(ds, est, property.k, cfg)
                 : stepdown_test(ds, est, property, cfg,
                                 a.conservative ? CriticalSets::all_pairs : CriticalSets::exact);

  nlohmann::json report;
  report["property"] = property.to_string();
  report["method"] = algorithm1 ? "max-degree" : "step-down";
  report["reject"] = outcome.reject;
  report["decision"] = outcome.reject ? "reject" : "accept";
  report["d_rej"] = outcome.d_rej;
  report["iterations"] = outcome.iterations;
  report["alpha"] = cfg.alpha;
  report["bootstrap"] = cfg.B;
  report["seed"] = cfg.seed;
  report["n"] = ds.n();
  report["d"] = ds.d();
  report["h"] = outcome.h;
  report["lambda"] = outcome.lambda;
  report["quantiles"] = nlohmann::json::array();
  for (const QuantileStep& q : outcome.quantile_trace)
    report["quantiles"].push_back({{"iteration", q.iteration}, {"edges", q.edge_count}, {"c", q.c}});
  report["grid"] = nlohmann::json::array();
  for (std::size_t g = 0; g < outcome.rejected_edges.size(); ++g) {
    const std::string name = numbered("rejected", g, ".txt");
    auto f = open_output(dir / name);
    f << "# z=" << format_double(outcome.grid(static_cast<Eigen::Index>(g))) << '\n';
    write_edge_list(f, outcome.rejected_edges[g]);
    report["grid"].push_back({{"z", outcome.grid(static_cast<Eigen::Index>(g))},
                              {"edges", outcome.rejected_edges[g].size()},
                              {"file", name}});
  }
  auto jf = open_output(dir / "report.json");
  jf << report.dump(2) << '\n';

  auto tf = open_output(dir / "report.txt");
  tf << "property     " << property.to_string() << '\n'
     << "method       " << (algorithm1 ? "max-degree" : "step-down") << '\n'
     << "decision     " << (outcome.reject ? "reject" : "accept") << '\n'
     << "psi          " << (outcome.reject ? 1 : 0) << '\n'
     << "d_rej        " << outcome.d_rej << '\n'
     << "iterations   " << outcome.iterations << '\n'
     << "alpha        " << format_double(cfg.alpha) << '\n'
     << "bootstrap    " << cfg.B << '\n'
     << "h            " << format_double(outcome.h) << '\n'
     << "lambda       " << format_double(outcome.lambda) << '\n';
  for (const QuantileStep& q : outcome.quantile_trace)
    tf << "c[" << q.iteration << "]         " << format_double(q.c) << "  (" << q.edge_count
       << " edges)\n";
  std::cout << (outcome.reject ? "reject" : "accept") << '\n';
  return 0;
}

// study

struct StudyArgs {
  std::string study = "calibration";
  int d = 20;
  int k = 3;
  std::vector<int> n_list = {400, 1000, 1500};
  int reps = 200;
  bool resume = false;
  double nuisance_scale = -1.0;
  std::vector<double> lambda_grid;
};

int run_study(const Common& c, const StudyArgs& a) {
  if (a.study != "calibration" && a.study != "roc")
    throw UsageError("--study must be 'calibration' or 'roc'");
  if (a.reps < 1) throw UsageError("--reps must be at least 1");
  if (a.n_list.empty()) throw UsageError("--n needs at least one sample size");
  for (int n : a.n_list)
    if (n < 2) throw UsageError("every --n entry must be at least 2");
  for (double l : a.lambda_grid)
    if (!(l >= 0.0)) throw UsageError("--lambda-grid values must be nonnegative");
  const TestConfig cfg = test_config(c);
  const fs::path dir = output_dir(c.out);
  if (a.study == "calibration") {
    CalibrationOptions options;
    options.nuisance_scale = a.nuisance_scale >= 0.0 ? a.nuisance_scale : 0.1;
    options.checkpoint = (dir / "calibration.checkpoint").string();
    options.resume = a.resume;
    options.progress = &std::cerr;
    const auto rows = calibration_study(a.d, a.k, a.n_list, a.reps, cfg, options);
    auto f = open_output(dir / "calibration.csv");
    write_calibration_table(f, rows);
    write_calibration_table(std::cout, rows);
    return 0;
  }
  {
    std::vector<double> grid = a.lambda_grid;
    if (grid.empty())
      for (int i = 0; i < 20; ++i) grid.push_back(0.02 * std::pow(50.0, i / 19.0));
    Scenario scenario{a.d, a.k, a.n_list.front(),
                      a.nuisance_scale >= 0.0 ? a.nuisance_scale : 1.0, true};
    const auto rows =
        roc_study(scenario, grid, a.reps, c.seed, {0.25, 0.5, 0.75}, c.h_const, c.jobs, &std::cerr);
    auto f = open_output(dir / "roc.csv");
    write_roc_table(f, rows);
    for (double z : {0.25, 0.5, 0.75})
      std::cout << "z=" << z << " auc inter=" << roc_auc(rows, "inter", z)
                << " within=" << roc_auc(rows, "within", z) << '\n';
    return 0;
  }
}

// Unqualified keys in the config file belong to the invoked subcommand.
class ScopedConfig : public CLI::ConfigBase {
 public:
  std::string scope;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigBase::from_config(input);
    if (!scope.empty())
      for (CLI::ConfigItem& item : items)
        if (item.parents.empty() && item.name != "++" && item.name != "--")
          item.parents = {scope};
    return items;
  }
};

int exit_code(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stimulus-locked time-varying graphical models"};
  app.set_config("--config", "", "key=value configuration file; flags win");
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_help_flag("--help", "Print this help message and exit");

  Common common;
  SimulateArgs sim;
  EstimateArgs est;
  TestArgs test;
  StudyArgs study;

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset and its truth");
  add_core(simulate_cmd, common);
  simulate_cmd->add_option("--grid", common.grid, "Number of truth time points");
  simulate_cmd->add_option("--d", sim.d, "Dimension");
  simulate_cmd->add_option("--n", sim.n, "Number of time points");
  simulate_cmd->add_option("--k", sim.k, "Hub degree threshold");
  simulate_cmd->add_flag("--alternative", sim.alternative, "Plant hubs of degree k + 1");
  simulate_cmd->add_option("--nuisance-scale", sim.nuisance_scale, "Subject noise scale");

  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate the precision field on a grid");
  add_core(estimate_cmd, common);
  add_estimation(estimate_cmd, common);
  estimate_cmd->add_option("--data", est.data, "Dataset file")->required();
  estimate_cmd->add_flag("--within", est.within, "Within-subject covariance baseline");
  estimate_cmd->add_flag("--standardize", est.standardize, "Standardize columns first");

  auto* test_cmd = app.add_subcommand("test", "Test a monotone graph property");
  add_core(test_cmd, common);
  add_estimation(test_cmd, common);
  add_inference(test_cmd, common);
  test_cmd->add_option("--data", test.data, "Dataset file")->required();
  test_cmd->add_option("--property", test.property,
                       "connected | components<=K | max-degree>K | isolated<=K | clique>K")
      ->required();
  test_cmd->add_flag("--stepdown", test.stepdown, "Use the step-down test for max-degree too");
  test_cmd->add_flag("--conservative", test.conservative,
                     "Step-down over all pairs instead of critical edges");
  test_cmd->add_option("--aggregation", test.aggregation, "Degree aggregation")
      ->check(CLI::IsMember({"per-time", "union"}));
  test_cmd->add_flag("--standardize", test.standardize, "Standardize columns first");

  auto* study_cmd = app.add_subcommand("study", "Monte-Carlo studies");
  add_core(study_cmd, common);
  add_estimation(study_cmd, common);
  add_inference(study_cmd, common);
  study_cmd->add_option("--study", study.study, "calibration | roc");
  study_cmd->add_option("--d", study.d, "Dimension");
  study_cmd->add_option("--k", study.k, "Hub degree threshold");
  study_cmd->add_option("--n", study.n_list, "Sample sizes")->delimiter(',');
  study_cmd->add_option("--reps", study.reps, "Replications");
  study_cmd->add_flag("--resume", study.resume, "Continue from the checkpoint in --out");
  study_cmd->add_option("--nuisance-scale", study.nuisance_scale, "Subject noise scale");
  study_cmd->add_option("--lambda-grid", study.lambda_grid, "ROC lambda values")->delimiter(',');

  auto config = std::make_shared<ScopedConfig>();
  for (int i = 1; i < argc && config->scope.empty(); ++i)
    for (const char* name : {"simulate", "estimate", "test", "study"})
      if (std::string(argv[i]) == name) config->scope = name;
  app.config_formatter(config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd) return run_simulate(common, sim);
    if (*estimate_cmd) return run_estimate(common, est);
    if (*test_cmd) return run_test(common, test);
    if (*study_cmd) return run_study(common, study);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
