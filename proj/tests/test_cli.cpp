// End-to-end checks of the command-line tool: figure emitters, sweeps,
// config handling, determinism, and exit codes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = QTHERM_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  fs::path out_file = fs::temp_directory_path() / "qtherm_cli_out.txt";
  std::string cmd = kCli + " " + args + " > " + out_file.string() + " 2>&1";
  int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_file);
  std::stringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "qtherm_cli_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("figure fig2: header, rows, endpoints") {
  TempDir tmp;
  auto csv = (tmp.path / "fig2.csv").string();
  auto r = run("figure fig2 -o " + csv + " --steps 21");
  REQUIRE(r.exit_code == 0);
  auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 22);
  CHECK(lines[0] == "s,qfi[1/T^2]");
  CHECK(lines[1].substr(0, 2) == "0,");
  CHECK(lines[21].substr(0, 2) == "1,");
  // monotone decrease down the sweep
  double prev = 1e300;
  for (size_t i = 1; i < lines.size(); ++i) {
    double qfi = std::stod(lines[i].substr(lines[i].find(',') + 1));
    CHECK(qfi < prev);
    prev = qfi;
  }
  // metadata sidecar records parameters and conventions
  json meta = json::parse(slurp(csv + ".meta.json"));
  CHECK(meta["parameters"]["omega"] == 1.0);
  CHECK(meta["parameters"]["eta"] == 0.5);
  CHECK(meta["conventions"]["mu_convention"] == "resource");
  CHECK(meta["artifact_defaults"].size() > 0);
}

TEST_CASE("figure reruns are byte-identical") {
  TempDir tmp;
  auto csv = (tmp.path / "a.csv").string();
  REQUIRE(run("figure fig5 -o " + csv + " --steps 9").exit_code == 0);
  std::string first_csv = slurp(csv);
  std::string first_meta = slurp(csv + ".meta.json");
  REQUIRE(run("figure fig5 -o " + csv + " --steps 9").exit_code == 0);
  CHECK(first_csv == slurp(csv));
  CHECK(first_meta == slurp(csv + ".meta.json"));
  auto lines = lines_of(first_csv);
  CHECK(lines[0] ==
        "s,inv_mu_eta0.1,inv_mu_eta0.5,inv_mu_eta0.9,"
        "inv_mu_paper_eta0.1,inv_mu_paper_eta0.5,inv_mu_paper_eta0.9");
  // the paper-literal convention halves 1/mu
  std::stringstream row(lines[1]);
  std::vector<double> cells;
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
  REQUIRE(cells.size() == 7);
  CHECK(cells[4] == doctest::Approx(0.5 * cells[1]).epsilon(1e-12));
}

TEST_CASE("figure fig7 ratio column approaches one") {
  TempDir tmp;
  auto csv = (tmp.path / "fig7.csv").string();
  REQUIRE(run("figure fig7 -o " + csv + " --steps 11").exit_code == 0);
  auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 12);
  // last row: s = 1, all ratios = 1
  std::stringstream last(lines.back());
  std::string cell;
  std::getline(last, cell, ',');
  CHECK(cell == "1");
  while (std::getline(last, cell, ','))
    CHECK(std::stod(cell) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("figure fig8 ends at zero information") {
  TempDir tmp;
  auto csv = (tmp.path / "fig8.csv").string();
  REQUIRE(run("figure fig8 -o " + csv + " --steps 6").exit_code == 0);
  auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 7);
  std::stringstream last(lines.back());
  std::string cell;
  std::getline(last, cell, ',');
  CHECK(cell == "1");
  while (std::getline(last, cell, ',')) CHECK(std::stod(cell) < 1e-8);
}

TEST_CASE("sweep quantity with config file and explicit override") {
  TempDir tmp;
  auto cfg = tmp.path / "params.cfg";
  {
    std::ofstream out(cfg);
    out << "# fig5 parameters\n";
    out << "t1 = 8\n";
    out << "t2 = 10\n";
    out << "omega = 10\n";
    out << "eta = 0.9\n";
  }
  auto csv = (tmp.path / "mu.csv").string();
  auto r = run("sweep --quantity mu --axis s --from 0 --to 0.9 --steps 4 --config " +
               cfg.string() + " --eta 0.5 -o " + csv);
  REQUIRE(r.exit_code == 0);
  json meta = json::parse(slurp(csv + ".meta.json"));
  CHECK(meta["parameters"]["t1"] == 8.0);
  CHECK(meta["parameters"]["omega"] == 10.0);
  CHECK(meta["parameters"]["eta"] == 0.5);  // flag wins over config
  auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "s,mu,inv_mu,sim_bound[T^2],ind_bound[T^2]");
}

TEST_CASE("sweep fully described by a config file") {
  TempDir tmp;
  auto cfg = tmp.path / "sweep.cfg";
  auto csv = (tmp.path / "cfg_sweep.csv").string();
  {
    std::ofstream out(cfg);
    out << "quantity = prior-gain\n";
    out << "axis = s\n";
    out << "from = 0\n";
    out << "to = 1\n";
    out << "steps = 5\n";
    out << "output = " << csv << "\n";
    out << "t1 = 1\n";
    out << "omega = 1\n";
    out << "eta = 0.5\n";
  }
  auto r = run("sweep --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  auto lines = lines_of(slurp(csv));
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "s,f_prior[1/T^2],two_h11[1/T^2],gain");
  // gain endpoints 1 and 2
  CHECK(std::stod(lines[1].substr(lines[1].rfind(',') + 1)) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::stod(lines[5].substr(lines[5].rfind(',') + 1)) ==
        doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("eval emits machine-readable JSON") {
  auto r = run("eval --t1 0.8 --t2 1.2 --omega 1 --eta 0.5 --s 0.5");
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.output);
  CHECK(out["derived"]["gamma"].get<double>() > 0.0);  // colder source 1
  CHECK(out["qfi_matrix"]["h11"].get<double>() > 0.0);
  CHECK(std::fabs(out["weak_commutation"].get<double>()) < 1e-9);
  CHECK(out["bounds"]["mu"].get<double>() < 1.0);
  CHECK(out["counting_fi"]["f11"].get<double>() > 0.0);
  CHECK(out["parameters"]["s"] == 0.5);
}

TEST_CASE("eval accepts separation geometry and paper conventions") {
  auto r = run("eval --t1 1 --t2 1 --d 2 --varpi 1 --mu-convention paper "
               "--f21-series paper");
  REQUIRE(r.exit_code == 0);
  json out = json::parse(r.output);
  CHECK(out["geometry"]["s"].get<double>() ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
  CHECK(out["conventions"]["mu_convention"] == "paper");
  CHECK(out["conventions"]["f21_series"] == "paper");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("sweep --axis s --from 0 --to 1").exit_code == 2);   // no quantity
  CHECK(run("figure fig99").exit_code == 2);                     // bad figure
  CHECK(run("sweep --quantity mu --from 0 --to 1 --steps 1").exit_code == 2);
  CHECK(run("nonsense").exit_code == 2);
  // s and (d, varpi) disagreeing is a usage error
  CHECK(run("eval --t1 1 --t2 1 --s 0.9 --d 2 --varpi 1").exit_code == 2);
  // but consistent values are accepted
  CHECK(run("eval --t1 1 --t2 1 --s 0.135335283237 --d 2 --varpi 1").exit_code == 0);
}

TEST_CASE("numerical failures exit with code 1 naming the point") {
  auto r = run("sweep --quantity qfi-equal --axis t1 --from -1 --to 1 --steps 3");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("t1 = -1") != std::string::npos);
}

TEST_CASE("selftest passes") {
  auto r = run("selftest -q");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("all checks passed") != std::string::npos);
}

}  // TEST_SUITE
