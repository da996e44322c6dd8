#include "tvgm/studies.hpp"

#include "tvgm/io.hpp"
#include "tvgm/parallel.hpp"
#include "tvgm/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace tvgm {

SimulatedData simulate(const Scenario& scenario, std::uint64_t seed) {
  SimulatedData sim;
  sim.path = generate_precision_path(scenario.d, scenario.k, scenario.alternative,
                                     derive_seed(seed, "path"));
  sim.lx = generate_nuisance(scenario.d, derive_seed(seed, "lx"));
  sim.ly = generate_nuisance(scenario.d, derive_seed(seed, "ly"));
  sim.data = sample_dataset(sim.path, sim.lx, sim.ly, scenario.n, scenario.nuisance_scale,
                            derive_seed(seed, "sample"));
  return sim;
}

namespace {

std::string fingerprint(int d, int k, int reps, const TestConfig& cfg,
                        const CalibrationOptions& options) {
  std::ostringstream out;
  out << "# tvgm calibration d=" << d << " k=" << k << " reps=" << reps
      << " seed=" << cfg.seed << " alpha=" << format_double(cfg.alpha) << " B=" << cfg.B
      << " grid=" << cfg.grid_size << " nuisance=" << format_double(options.nuisance_scale);
  return out.str();
}

struct Checkpoint {
  std::map<int, double> lambda;
  std::map<std::tuple<int, int, int>, bool> done;  // (n, alternative, rep)
};

Checkpoint read_checkpoint(const std::string& path, const std::string& expected) {
  Checkpoint cp;
  std::ifstream in(path);
  if (!in) return cp;
  std::string line;
  if (!std::getline(in, line)) return cp;
  if (line != expected)
    throw UsageError("checkpoint '" + path + "' was written for a different study:\n  " + line);
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string kind;
    std::getline(fields, kind, ',');
    char comma = 0;
    if (kind == "lambda") {
      int n = 0;
      double value = 0;
      if (fields >> n >> comma >> value) cp.lambda[n] = value;
    } else if (kind == "rep") {
      int n = 0, alt = 0, rep = 0, reject = 0;
      char c2 = 0, c3 = 0;
      if (fields >> n >> comma >> alt >> c2 >> rep >> c3 >> reject)
        cp.done[{n, alt, rep}] = reject != 0;
    }
  }
  return cp;
}

}  // namespace

std::vector<CalibrationRow> calibration_study(int d, int k, const std::vector<int>& n_list,
                                              int reps, const TestConfig& cfg,
                                              const CalibrationOptions& options) {
  cfg.validate();
  if (reps < 1) throw UsageError("calibration study needs reps >= 1");
  if (n_list.empty()) throw UsageError("calibration study needs at least one n");

  const std::string header = fingerprint(d, k, reps, cfg, options);
  Checkpoint cp;
  std::ofstream log;
  std::mutex log_mutex;
  if (!options.checkpoint.empty()) {
    if (options.resume) cp = read_checkpoint(options.checkpoint, header);
    const bool fresh = !options.resume || (cp.done.empty() && cp.lambda.empty());
    log.open(options.checkpoint, fresh ? std::ios::trunc : std::ios::app);
    if (!log) throw UsageError("cannot write checkpoint '" + options.checkpoint + "'");
    if (fresh) log << header << '\n' << std::flush;
  }

  std::vector<CalibrationRow> rows;
  for (int n : n_list) {
    const double h = cfg.h > 0.0 ? cfg.h : choose_bandwidth(n, cfg.h_const);
    double lambda = cfg.lambda;
    if (lambda <= 0.0 && !cfg.cross_validate) lambda = cfg.lambda_const * lambda_rate(n, d, h);
    if (lambda <= 0.0) {
      if (auto it = cp.lambda.find(n); it != cp.lambda.end()) {
        lambda = it->second;
      } else {
        Scenario pilot{d, k, n, options.nuisance_scale, false};
        const SimulatedData sim = simulate(pilot, derive_seed(cfg.seed, "pilot", n));
        std::vector<double> grid;
        const double rate = lambda_rate(n, d, h);
        for (double c : cfg.cv_constants) grid.push_back(c * rate);
        ClimeConfig clime;
        clime.symmetrize_input = cfg.symmetrize_input;
        clime.symmetrize_output = cfg.symmetrize_output;
        KernelSpec kernel;
        kernel.bandwidth = h;
        lambda = cross_validate_lambda(sim.data, kernel, grid, cfg.cv_folds,
                                       derive_seed(cfg.seed, "pilot_cv", n), clime, cfg.jobs)
                     .lambda_star;
        if (options.progress)
          *options.progress << "n=" << n << ": pilot cross-validation selected lambda = "
                            << lambda << " (" << lambda / rate << " x rate)\n";
      }
      if (log.is_open()) {
        std::lock_guard lock(log_mutex);
        log << "lambda," << n << ',' << format_double(lambda) << '\n' << std::flush;
      }
    }

    struct Task {
      int alternative;
      int rep;
    };
    std::vector<Task> tasks;
    for (int alt = 0; alt < 2; ++alt) {
      if (alt == 0 && !options.run_null) continue;
      if (alt == 1 && !options.run_alternative) continue;
      for (int r = 0; r < reps; ++r)
        if (!cp.done.count({n, alt, r})) tasks.push_back({alt, r});
    }

    std::vector<char> outcome(tasks.size(), 0);
    std::size_t finished = 0;
    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t t) {
      const Task task = tasks[t];
      const std::uint64_t rep_seed = derive_seed(
          derive_seed(cfg.seed, task.alternative ? "alternative" : "null",
                      static_cast<std::uint64_t>(n)),
          "rep", static_cast<std::uint64_t>(task.rep));
      Scenario scenario{d, k, n, options.nuisance_scale, task.alternative == 1};
      const SimulatedData sim = simulate(scenario, rep_seed);
      TestConfig rep_cfg = cfg;
      rep_cfg.lambda = lambda;
      rep_cfg.h = h;
      rep_cfg.cross_validate = false;
      rep_cfg.jobs = 1;
      rep_cfg.seed = derive_seed(rep_seed, "test");
      outcome[t] = test_max_degree(sim.data, k, rep_cfg).reject;
      std::lock_guard lock(log_mutex);
      if (log.is_open())
        log << "rep," << n << ',' << task.alternative << ',' << task.rep << ','
            << int(outcome[t]) << '\n'
            << std::flush;
      ++finished;
      if (options.progress && (finished % 10 == 0 || finished == tasks.size()))
        *options.progress << "n=" << n << ": " << finished << "/" << tasks.size()
                          << " replications\n";
    });
    for (std::size_t t = 0; t < tasks.size(); ++t)
      cp.done[{n, tasks[t].alternative, tasks[t].rep}] = outcome[t] != 0;

    CalibrationRow row;
    row.n = n;
    row.lambda = lambda;
    row.reps = reps;
    int null_rejects = 0, alt_rejects = 0;
    for (int r = 0; r < reps; ++r) {
      if (options.run_null) null_rejects += cp.done.at({n, 0, r});
      if (options.run_alternative) alt_rejects += cp.done.at({n, 1, r});
    }
    row.type_I = options.run_null ? static_cast<double>(null_rejects) / reps : std::nan("");
    row.power = options.run_alternative ? static_cast<double>(alt_rejects) / reps : std::nan("");
    rows.push_back(row);
  }
  return rows;
}

SupportScore score_support(const Matrix& estimate, const Eigen::MatrixXi& truth) {
  const auto d = estimate.rows();
  double tp = 0, fp = 0, pos = 0, neg = 0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      if (j == k) continue;
      const bool est = std::abs(estimate(j, k)) > 1e-8;
      if (truth(j, k)) {
        ++pos;
        tp += est;
      } else {
        ++neg;
        fp += est;
      }
    }
  return {pos > 0 ? tp / pos : 0.0, neg > 0 ? fp / neg : 0.0};
}

std::vector<RocRow> roc_study(const Scenario& scenario, const std::vector<double>& lambda_grid,
                              int reps, std::uint64_t seed, const std::vector<double>& z_points,
                              double h_const, int jobs, std::ostream* progress) {
  if (reps < 1) throw UsageError("ROC study needs reps >= 1");
  if (lambda_grid.empty()) throw UsageError("ROC study needs a lambda grid");
  const std::size_t Z = z_points.size();
  const std::size_t L = lambda_grid.size();
  // [rep][method][z][lambda]
  std::vector<std::vector<SupportScore>> scores(static_cast<std::size_t>(reps),
                                                std::vector<SupportScore>(2 * Z * L));
  std::mutex progress_mutex;
  std::size_t finished = 0;
  parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t r) {
    const SimulatedData sim = simulate(scenario, derive_seed(seed, "roc", r));
    KernelSpec kernel;
    kernel.bandwidth = choose_bandwidth(scenario.n, h_const);
    for (std::size_t zi = 0; zi < Z; ++zi) {
      const double z = z_points[zi];
      const Eigen::MatrixXi truth = true_support(sim.path, z);
      const Matrix inter = smoothed_cov_inter(sim.data, z, kernel).matrix;
      const Matrix within = smoothed_cov_within(sim.data.x, sim.data.z, z, kernel).matrix;
      for (std::size_t a = 0; a < L; ++a) {
        ClimeConfig cfg;
        cfg.lambda = lambda_grid[a];
        scores[r][(0 * Z + zi) * L + a] = score_support(clime_full(inter, cfg).matrix, truth);
        scores[r][(1 * Z + zi) * L + a] = score_support(clime_full(within, cfg).matrix, truth);
      }
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      *progress << "roc: " << ++finished << "/" << reps << " replications\n";
    }
  });

  std::vector<RocRow> rows;
  const char* methods[2] = {"inter", "within"};
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t zi = 0; zi < Z; ++zi)
      for (std::size_t a = 0; a < L; ++a) {
        RocRow row{methods[m], z_points[zi], lambda_grid[a], 0.0, 0.0};
        for (int r = 0; r < reps; ++r) {
          row.tpr += scores[r][(m * Z + zi) * L + a].tpr;
          row.fpr += scores[r][(m * Z + zi) * L + a].fpr;
        }
        row.tpr /= reps;
        row.fpr /= reps;
        rows.push_back(row);
      }
  return rows;
}

double roc_auc(const std::vector<RocRow>& rows, const std::string& method, double z) {
  std::vector<std::pair<double, double>> points = {{0.0, 0.0}, {1.0, 1.0}};
  for (const RocRow& r : rows)
    if (r.method == method && std::abs(r.z - z) < 1e-12) points.emplace_back(r.fpr, r.tpr);
  std::sort(points.begin(), points.end());
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].first - points[i - 1].first) *
            (points[i].second + points[i - 1].second) / 2.0;
  return area;
}

double estimation_error_study(const Scenario& scenario, int reps, std::uint64_t seed,
                              int grid_size, double h_const) {
  if (reps < 1) throw UsageError("estimation study needs reps >= 1");
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    const SimulatedData sim = simulate(scenario, derive_seed(seed, "rate", r));
    KernelSpec kernel;
    kernel.bandwidth = choose_bandwidth(scenario.n, h_const);
    const Vector grid = evaluation_grid(sim.data.z, grid_size);
    double worst = 0.0;
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
      const Matrix est = smoothed_cov_inter(sim.data, grid(g), kernel).matrix;
      const Matrix truth = eval_precision(sim.path, grid(g)).inverse();
      worst = std::max(worst, (est - truth).cwiseAbs().maxCoeff());
    }
    total += worst;
  }
  return total / reps;
}

void write_calibration_table(std::ostream& out, const std::vector<CalibrationRow>& rows) {
  out << "n,type_I,power,lambda,reps\n";
  for (const auto& r : rows)
    out << r.n << ',' << format_double(r.type_I) << ',' << format_double(r.power) << ','
        << format_double(r.lambda) << ',' << r.reps << '\n';
}

void write_roc_table(std::ostream& out, const std::vector<RocRow>& rows) {
  out << "method,z,lambda,tpr,fpr\n";
  for (const auto& r : rows)
    out << r.method << ',' << format_double(r.z) << ',' << format_double(r.lambda) << ','
        << format_double(r.tpr) << ',' << format_double(r.fpr) << '\n';
}

}  // namespace tvgm
