#include "tvgm/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace tvgm;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tvgm_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const fs::path& dir, const std::string& args) {
  const fs::path out = dir / "stdout.log";
  const fs::path err = dir / "stderr.log";
  const std::string cmd = std::string(TVGM_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream o(out), e(err);
  std::stringstream so, se;
  so << o.rdbuf();
  se << e.rdbuf();
  r.out = so.str();
  r.err = se.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int count_lines(const fs::path& p) {
  std::ifstream f(p);
  int lines = 0;
  for (std::string line; std::getline(f, line);) ++lines;
  return lines;
}

int count_prefixed(const fs::path& dir, const std::string& prefix) {
  int c = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    c += entry.path().filename().string().rfind(prefix, 0) == 0;
  return c;
}

// A small simulated dataset shared by the estimate and test cases.
fs::path small_dataset() {
  static const fs::path dir = [] {
    const fs::path d = scratch("data");
    const Run r = run(d, "simulate --d 10 --n 300 --k 2 --alternative --seed 4 --out " +
                             (d / "sim").string());
    REQUIRE(r.code == 0);
    return d / "sim" / "dataset.csv";
  }();
  return dir;
}

}  // namespace

TEST_CASE("simulate") {
  const fs::path dir = scratch("simulate");
  const Run a = run(dir, "simulate --d 20 --n 400 --k 3 --seed 1 --out " + (dir / "a").string());
  REQUIRE(a.code == 0);
  CHECK(count_lines(dir / "a" / "dataset.csv") == 401);
  CHECK(fs::exists(dir / "a" / "truth.txt"));

  std::ifstream data(dir / "a" / "dataset.csv");
  const AnyDataset loaded = load_dataset(data);
  REQUIRE(std::holds_alternative<PairedDataset>(loaded));
  CHECK(std::get<PairedDataset>(loaded).n() == 400);
  CHECK(std::get<PairedDataset>(loaded).d() == 20);
  std::ifstream truth(dir / "a" / "truth.txt");
  CHECK(read_edge_lists(truth, 20).size() == 50);

  const Run b = run(dir, "simulate --d 20 --n 400 --k 3 --seed 1 --out " + (dir / "b").string());
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "dataset.csv") == slurp(dir / "b" / "dataset.csv"));
  CHECK(slurp(dir / "a" / "truth.txt") == slurp(dir / "b" / "truth.txt"));

  const Run bad = run(dir, "simulate --d 5 --k 3 --alternative --out " + (dir / "c").string());
  CHECK(bad.code == 2);
  CHECK(bad.err.find("d >= 8") != std::string::npos);
  CHECK(run(dir, "simulate --n 1 --out " + (dir / "c").string()).code == 2);
  CHECK(run(dir, "simulate --no-such-flag").code == 2);
}

TEST_CASE("estimate") {
  const fs::path data = small_dataset();
  const fs::path dir = scratch("estimate");
  const Run r = run(dir, "estimate --data " + data.string() + " --grid 10 --out " +
                             (dir / "e").string());
  REQUIRE(r.code == 0);
  CHECK(count_prefixed(dir / "e", "theta_") == 10);
  CHECK(count_prefixed(dir / "e", "debiased_") == 10);
  CHECK(count_lines(dir / "e" / "manifest.csv") == 11);
  std::ifstream m(dir / "e" / "theta_001.csv");
  const Matrix theta = read_matrix(m);
  CHECK(theta.rows() == 10);
  CHECK((theta - theta.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const Run def = run(dir, "estimate --data " + data.string() + " --out " + (dir / "d").string());
  REQUIRE(def.code == 0);
  CHECK(count_prefixed(dir / "d", "theta_") == 50);

  const Run within = run(dir, "estimate --within --grid 5 --data " + data.string() + " --out " +
                                  (dir / "w").string());
  REQUIRE(within.code == 0);
  CHECK(count_prefixed(dir / "w", "theta_") == 5);
  CHECK(slurp(dir / "w" / "theta_003.csv") != slurp(dir / "e" / "theta_003.csv"));

  const Run cv = run(dir, "estimate --cv --cv-folds 3 --grid 5 --data " + data.string() +
                              " --out " + (dir / "cv").string());
  REQUIRE(cv.code == 0);
  CHECK(count_lines(dir / "cv" / "cv.csv") == 8);

  CHECK(run(dir, "estimate --cv --lambda 0.1 --data " + data.string()).code == 2);
  CHECK(run(dir, "estimate --data " + (dir / "missing.csv").string()).code == 2);

  std::ofstream broken(dir / "broken.csv");
  broken << "z,x1,x2,y1,y2\n0.1,1,2,3\n";
  broken.close();
  CHECK(run(dir, "estimate --data " + (dir / "broken.csv").string() + " --out " +
                     (dir / "b").string())
            .code == 3);
}

TEST_CASE("test") {
  const fs::path data = small_dataset();
  const fs::path dir = scratch("test");
  const Run r = run(dir, "test --data " + data.string() +
                             " --property 'max-degree>2' --grid 8 --bootstrap 200 --out " +
                             (dir / "t").string());
  REQUIRE(r.code == 0);
  CHECK((r.out == "reject\n" || r.out == "accept\n"));
  std::ifstream jf(dir / "t" / "report.json");
  const nlohmann::json report = nlohmann::json::parse(jf);
  CHECK(report["property"] == "max-degree>2");
  CHECK(report["method"] == "max-degree");
  CHECK(report["decision"] == (report["reject"].get<bool>() ? "reject" : "accept"));
  CHECK(report["bootstrap"] == 200);
  CHECK(report["grid"].size() == 8);
  CHECK(report["quantiles"].size() == 1);
  CHECK(fs::exists(dir / "t" / "report.txt"));
  CHECK(count_prefixed(dir / "t", "rejected_") == 8);

  std::ifstream rf(dir / "t" / "rejected_001.txt");
  const auto lists = read_edge_lists(rf, 10);
  REQUIRE(lists.size() == 1);
  CHECK(lists[0].second.size() == report["grid"][0]["edges"].get<std::size_t>());

  const Run again = run(dir, "test --data " + data.string() +
                                 " --property 'max-degree>2' --grid 8 --bootstrap 200 --out " +
                                 (dir / "t2").string());
  CHECK(slurp(dir / "t" / "report.json") == slurp(dir / "t2" / "report.json"));

  const Run sd = run(dir, "test --data " + data.string() +
                              " --property connected --grid 6 --bootstrap 100 --out " +
                              (dir / "s").string());
  REQUIRE(sd.code == 0);
  std::ifstream sf(dir / "s" / "report.json");
  CHECK(nlohmann::json::parse(sf)["method"] == "step-down");

  const Run bad = run(dir, "test --data " + data.string() + " --property 'max-degree=3'");
  CHECK(bad.code == 2);
  for (const char* g : {"connected", "components<=K", "max-degree>K", "isolated<=K", "clique>K"})
    CHECK(bad.err.find(g) != std::string::npos);

  // arguments are checked before the data file is opened
  CHECK(run(dir, "test --data " + (dir / "missing.csv").string() +
                     " --property connected --alpha 1.5")
            .code == 2);
  CHECK(run(dir, "test --data " + (dir / "missing.csv").string() + " --property nonsense")
            .code == 2);
  CHECK_FALSE(fs::exists(dir / "missing.csv"));
}

TEST_CASE("config file") {
  const fs::path dir = scratch("config");
  std::ofstream cfg(dir / "run.cfg");
  cfg << "d=10\nn=150\nk=2\nseed=3\n";
  cfg.close();
  const Run r = run(dir, "--config " + (dir / "run.cfg").string() + " simulate --n 120 --out " +
                             (dir / "a").string());
  REQUIRE(r.code == 0);
  CHECK(count_lines(dir / "a" / "dataset.csv") == 121);
  std::ifstream data(dir / "a" / "dataset.csv");
  CHECK(std::get<PairedDataset>(load_dataset(data)).d() == 10);

  std::ofstream bogus(dir / "bogus.cfg");
  bogus << "no_such_key=1\n";
  bogus.close();
  CHECK(run(dir, "--config " + (dir / "bogus.cfg").string() + " simulate --out " +
                     (dir / "b").string())
            .code == 2);
}

TEST_CASE("study") {
  const fs::path dir = scratch("study");
  const std::string common = "study --study calibration --d 10 --k 2 --n 200,300 --reps 3 "
                             "--bootstrap 100 --grid 6 --seed 9 --out ";
  const Run r = run(dir, common + (dir / "c").string());
  REQUIRE(r.code == 0);
  CHECK(count_lines(dir / "c" / "calibration.csv") == 3);
  std::ifstream table(dir / "c" / "calibration.csv");
  std::string header;
  std::getline(table, header);
  CHECK(header == "n,type_I,power,lambda,reps");

  SUBCASE("resume after interruption") {
    const fs::path cp = dir / "c" / "calibration.checkpoint";
    std::ifstream in(cp);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    in.close();
    REQUIRE(lines.size() > 4);
    std::ofstream trunc(cp);
    for (std::size_t i = 0; i < lines.size() / 2; ++i) trunc << lines[i] << '\n';
    trunc << lines[lines.size() / 2].substr(0, 3);  // torn last line
    trunc.close();
    const std::string before = slurp(dir / "c" / "calibration.csv");
    fs::remove(dir / "c" / "calibration.csv");
    const Run resumed = run(dir, common + (dir / "c").string() + " --resume");
    REQUIRE(resumed.code == 0);
    CHECK(slurp(dir / "c" / "calibration.csv") == before);

    const Run other = run(dir, "study --study calibration --d 10 --k 2 --n 200,300 --reps 3 "
                               "--bootstrap 100 --grid 6 --seed 10 --resume --out " +
                                   (dir / "c").string());
    CHECK(other.code == 2);
  }
  SUBCASE("roc") {
    const Run roc = run(dir, "study --study roc --d 10 --k 2 --n 200 --reps 2 "
                             "--lambda-grid 0.05,0.2,1 --out " +
                                 (dir / "r").string());
    REQUIRE(roc.code == 0);
    std::ifstream f(dir / "r" / "roc.csv");
    std::string line;
    std::getline(f, line);
    CHECK(line == "method,z,lambda,tpr,fpr");
    int rows = 0;
    while (std::getline(f, line)) {
      ++rows;
      std::stringstream ss(line);
      std::string method, z, lambda, tpr, fpr;
      std::getline(ss, method, ',');
      std::getline(ss, z, ',');
      std::getline(ss, lambda, ',');
      std::getline(ss, tpr, ',');
      std::getline(ss, fpr, ',');
      for (const std::string& v : {tpr, fpr}) {
        CHECK(std::stod(v) >= 0.0);
        CHECK(std::stod(v) <= 1.0);
      }
    }
    CHECK(rows == 2 * 3 * 3);
  }
  CHECK(run(dir, "study --study nonsense").code == 2);
  CHECK(run(dir, "study --reps 0").code == 2);
}
