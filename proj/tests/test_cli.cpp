#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("clockback_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the tool with stdout captured to a file; returns the exit status.
int run(const std::string& args, std::string* stdout_text = nullptr,
        const std::string& env = "") {
  const fs::path capture = scratch() / "stdout.txt";
  const std::string cmd = env + " \"" CLOCKBACK_CLI "\" " + args + " > \"" + capture.string() +
                          "\" 2> /dev/null";
  const int raw = std::system(cmd.c_str());
  if (stdout_text) {
    std::ifstream in(capture, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    *stdout_text = ss.str();
  }
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("figure3 writes normalized, byte-stable curves") {
  const fs::path a = scratch() / "f3a";
  const fs::path b = scratch() / "f3b";
  REQUIRE(run("figure3 --out \"" + a.string() + "\"") == 0);
  REQUIRE(run("--out \"" + b.string() + "\" figure3") == 0);
  for (const char* name : {"figure3_alpha_2.csv", "figure3_alpha_10.csv", "figure3_summary.json"}) {
    CHECK(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  std::string header;
  const auto rows = read_csv(a / "figure3_alpha_2.csv", &header);
  CHECK(header == "P,re_chi,im_chi,abs2");
  REQUIRE(rows.size() == 4096);
  double norm = 0.0, mean = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double h = rows[i][0] - rows[i - 1][0];
    norm += 0.5 * h * (rows[i][3] + rows[i - 1][3]);
    mean += 0.5 * h * (rows[i][0] * rows[i][3] + rows[i - 1][0] * rows[i - 1][3]);
  }
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(mean - 2.0) / 2.0 <= 0.05);
}

TEST_CASE("csv number format") {
  const fs::path a = scratch() / "fmt";
  REQUIRE(run("figure4 --figure4.alphas=20 --pointer.points=64 --out \"" + a.string() + "\"") == 0);
  const std::string text = slurp(a / "figure4_alpha_20.csv");
  CHECK(text.find('\r') == std::string::npos);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const std::string first = line.substr(0, line.find(','));
  // d.dddddddddddddddde[+-]xx: 17 significant digits.
  CHECK(first.find('e') == 18 + (first[0] == '-'));
  CHECK(first[1 + (first[0] == '-')] == '.');
}

TEST_CASE("transmission sweep: Q = 0 is transparent, flux conserved") {
  const fs::path a = scratch() / "sweep";
  REQUIRE(run("transmission-sweep --sweep.k_points=5 --out \"" + a.string() + "\"") == 0);
  std::string header;
  const auto rows = read_csv(a / "transmission_sweep.csv", &header);
  CHECK(header == "k,V,X0,re_T,im_T,abs2_T,abs2_R,unitarity_defect");
  CHECK(rows.size() == 5 * 5 * 3);
  int transparent = 0;
  for (const auto& r : rows) {
    CHECK(r[7] <= 1e-12);
    if (r[1] == 0.0) {
      CHECK(r[5] == doctest::Approx(1.0).epsilon(1e-15));
      ++transparent;
    }
  }
  CHECK(transparent == 25);
}

TEST_CASE("purity json") {
  std::string out;
  REQUIRE(run("purity", &out) == 0);
  const auto j = nlohmann::json::parse(out);
  for (const char* key : {"eigenvalues", "amplitudes", "P0", "gram", "rho", "purity",
                          "branch_probability"})
    CHECK(j.contains(key));
  CHECK(j["purity"].get<double>() == doctest::Approx(0.99991002253107293).epsilon(1e-10));
}

TEST_CASE("regime-classify reports rather than fails") {
  std::string out;
  CHECK(run("regime-classify --clock.mean_momentum=0.5 --barrier.width=10", &out) == 0);
  CHECK(nlohmann::json::parse(out)["regime"] == "WEAK");
  CHECK(run("regime-classify --clock.mean_momentum=0.5 --barrier.width=10 --barrier.lambda=15 "
            "--pointer.resolution=5",
            &out) == 0);
  CHECK(nlohmann::json::parse(out)["regime"] == "STRONG_BACKREACTION");
  CHECK(run("regime-classify --barrier.width=0", &out) == 0);
  CHECK(nlohmann::json::parse(out)["regime"] == "IMPULSIVE");
}

TEST_CASE("clock-quality json") {
  std::string out;
  REQUIRE(run("clock-quality --clock.mass=2 --clock.position_spread=3", &out) == 0);
  const auto j = nlohmann::json::parse(out);
  CHECK(j.contains("good_clock"));
}

TEST_CASE("config file and exit codes") {
  const fs::path cfg = scratch() / "ok.cfg";
  std::ofstream(cfg) << "[clock]\nmass = 2\n";
  CHECK(run("clock-quality --config \"" + cfg.string() + "\"") == 0);

  const fs::path bad = scratch() / "bad.cfg";
  std::ofstream(bad) << "[clock]\nmasss = 2\n";
  CHECK(run("clock-quality --config \"" + bad.string() + "\"") == 2);
  CHECK(run("clock-quality --config \"" + (scratch() / "missing.cfg").string() + "\"") == 2);
  CHECK(run("clock-quality --clock.nope=1") == 2);
  CHECK(run("clock-quality --clock.mass=abc") == 2);
  CHECK(run("clock-quality --clock.mass=-1") == 2);
  CHECK(run("nosuchcommand") == 2);
  CHECK(run("clock-quality", nullptr, "CLOCKBACK_THREADS=zero") == 2);
  CHECK(run("clock-quality", nullptr, "CLOCKBACK_THREADS=2") == 0);

  // Output path below a regular file.
  const fs::path file = scratch() / "plain";
  std::ofstream(file) << "x";
  CHECK(run("figure3 --out \"" + (file / "sub").string() + "\"") == 3);

  // Grid too small for the packet: a failed run, not a config error.
  CHECK(run("propagate --propagate.half_width=30 --propagate.grid_points=4096 "
            "--propagate.dt=5e-4 --out \"" + (scratch() / "leak").string() + "\"") == 1);
}

TEST_CASE("validate without the propagator passes") {
  std::string out;
  CHECK(run("validate --validate.include_propagator=false", &out) == 0);
  CHECK(nlohmann::json::parse(out)["passed"] == true);
}

TEST_CASE("propagate writes snapshots") {
  const fs::path a = scratch() / "prop";
  REQUIRE(run("propagate --propagate.total_time=0.5 --propagate.dt=1e-3 --snapshots 0,0.25 "
              "--out \"" + a.string() + "\"") == 0);
  CHECK(fs::exists(a / "propagate_summary.json"));
  std::size_t snaps = 0;
  for (const auto& e : fs::directory_iterator(a))
    snaps += e.path().filename().string().rfind("snapshot_t_", 0) == 0;
  CHECK(snaps == 2);
}
