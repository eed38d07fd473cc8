#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string err;
  std::string out;
};

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("dfsim_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

CliResult dfsim(const std::string& args) {
  const fs::path err = workdir() / "stderr.txt", out = workdir() / "stdout.txt";
  const std::string cmd = std::string(DFSIM_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err), slurp(out)};
}

const char* kReference =
    "# reference parameters\n"
    "gamma = 3.0e-3\nmu_eta = 1.4e-2\neta = 0.13\neta_G = 0.09\ndark_G = 1.5e-6\ns0 = 0.94\n";

std::string first_lines(const std::string& s, int n) {
  std::istringstream in(s);
  std::string line, out;
  for (int i = 0; i < n && std::getline(in, line); ++i) out += line + "\n";
  return out;
}

}  // namespace

TEST(Cli, SweepWritesCsvAndJson) {
  const auto cfg = write_config("sweep.conf", std::string(kReference) + "T_values = 0.1, 0.01\n");
  const auto out = workdir() / "sweep.csv";
  const CliResult r = dfsim("sweep --config " + cfg.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(out);
  EXPECT_EQ(first_lines(csv, 2),
            "# dfsim sweep schema 1\nT,V_Z,V_X,F_low,rate_per_pulse,rate_per_second,chsh_flag,truncated_weight\n");
  const auto j = nlohmann::json::parse(slurp(workdir() / "sweep.json"));
  EXPECT_EQ(j["rows"].size(), 2u);

  // Same config, same bytes.
  const auto again = workdir() / "sweep2.csv";
  ASSERT_EQ(dfsim("sweep --config " + cfg.string() + " --out " + again.string()).code, 0);
  EXPECT_EQ(slurp(again), csv);
  EXPECT_EQ(slurp(workdir() / "sweep2.json"), slurp(workdir() / "sweep.json"));
}

TEST(Cli, Calibrate) {
  const auto cfg = write_config("cal.conf", "gamma = 3.0e-3\nmu_eta = 1.4e-2\neta = 0.13\neta_G = 0.09\n"
                                            "anchor_T = 0.1\ntarget_VX = 0.82\nfwhm_um = 180\n");
  const auto out = workdir() / "cal.csv";
  const CliResult r = dfsim("calibrate --config " + cfg.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "anchor_T,target_V_X,s0,V_X,V_sp,max_V_X,fwhm_um,sigma_um");
  std::getline(in, line);
  std::istringstream cells(line);
  std::vector<double> v;
  for (std::string c; std::getline(cells, c, ',');) v.push_back(std::stod(c));
  ASSERT_EQ(v.size(), 8u);
  EXPECT_NEAR(v[3], 0.82, 1e-4);
  EXPECT_GT(v[2], 0.0);
  EXPECT_LT(v[2], 1.0);
}

TEST(Cli, DelayScanTomographyQubit) {
  const auto delay = write_config("delay.conf", std::string(kReference) + "delays_um = -100, 0, 100\n");
  const auto out = workdir() / "delay.csv";
  CliResult r = dfsim("delay-scan --config " + delay.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_lines(slurp(out), 2), "# dfsim delay-scan schema 1\ndelay_um,p_R,p_L,visibility\n");

  const auto tomo = write_config("tomo.conf", "eta = 1\neta_G = 1\ndark_G = 0\ngamma = 1e-3\n");
  r = dfsim("tomography --config " + tomo.string() + " --out " + (workdir() / "tomo.csv").string());
  ASSERT_EQ(r.code, 0) << r.err;

  const auto qubit = write_config("qubit.conf", "variant = single_photon_ancilla\nsource = pair\nmu = 0\n"
                                                "T = 1\neta = 1\neta_G = 1\ndark_G = 0\n"
                                                "alpha_re = 0.894427190999916\nbeta_re = 0.447213595499958\n");
  r = dfsim("qubit --config " + qubit.string() + " --out " + (workdir() / "qubit.csv").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(workdir() / "qubit.csv").find("alpha_re,alpha_im,beta_re,beta_im,fidelity,V_Z,V_X"),
            std::string::npos);
}

TEST(Cli, SampleIsSeeded) {
  const auto cfg = write_config("sample.conf", std::string(kReference) + "n_pulses = 20000\nT = 1\n");
  const auto a = workdir() / "a.csv", b = workdir() / "b.csv", c = workdir() / "c.csv";
  CliResult r = dfsim("sample --config " + cfg.string() + " --out " + a.string() + " --seed 5");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(r.out);
  EXPECT_EQ(summary["n_pulses"], 20000);
  ASSERT_EQ(dfsim("sample --config " + cfg.string() + " --out " + b.string() + " --seed 5").code, 0);
  ASSERT_EQ(dfsim("sample --config " + cfg.string() + " --out " + c.string() + " --seed 6").code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
}

TEST(Cli, OracleCheck) {
  const auto cfg = write_config("oracle.conf", "cutoff = 3\nphases = 0\nrandom_configs = 1\n");
  const CliResult r = dfsim("oracle-check --config " + cfg.string() + " --out " + (workdir() / "o.csv").string());
  ASSERT_EQ(r.code, 0) << r.err;
}

TEST(Cli, FailuresAreMachineReadable) {
  const auto typo = write_config("typo.conf", "gama = 3e-3\n");
  CliResult r = dfsim("sweep --config " + typo.string() + " --out " + (workdir() / "x.csv").string());
  EXPECT_EQ(r.code, 2);
  auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "config");
  EXPECT_NE(j["message"].get<std::string>().find("gama"), std::string::npos);

  r = dfsim("sweep --config /nonexistent.conf --out " + (workdir() / "x.csv").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "config");

  const auto fine = write_config("fine.conf", "T = 0.1\n");
  r = dfsim("sweep --config " + fine.string() + " --out " + (workdir() / "x.csv").string() + " --seed 3");
  EXPECT_EQ(r.code, 64);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "usage");

  r = dfsim("calibrate --out " + (workdir() / "x.csv").string());
  EXPECT_EQ(r.code, 64);

  const auto high = write_config("high.conf", "target_VX = 0.999\n");
  r = dfsim("calibrate --config " + high.string() + " --out " + (workdir() / "x.csv").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "validation");

  r = dfsim("sweep --config " + fine.string() + " --out /nonexistent/dir/x.csv");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "io");
}
