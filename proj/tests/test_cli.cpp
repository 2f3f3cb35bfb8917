#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mllab/cli.hpp"

using namespace mllab;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  int code = -1;
  try {
    code = cli::run(std::move(args));
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  return CliResult{code, captured.str()};
}

std::string write_tmp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/mllab_cli_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("norm command prints closed-form values") {
  const std::string chi_q2 = write_tmp(
      "chi_q2.json", R"({"dim":1,"level":-1,"cells":[{"index":[0],"value":1.0}]})");
  const CliResult r = run_cli({"norm", "--space", "morrey-lorentz", "--p", "4", "--q", "2",
                               "--r", "2", "--input", chi_q2});
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 14) == "1.189207115002");
  CHECK(std::fabs(std::stod(r.out) - std::pow(2.0, 0.25)) <= 1e-12);

  const std::string two_step = write_tmp(
      "two_step.json",
      R"({"dim":1,"level":0,"cells":[{"index":[0],"value":2.0},{"index":[1],"value":1.0}]})");
  const CliResult l2 =
      run_cli({"norm", "--space", "lorentz", "--p", "2", "--q", "2", "--input", two_step});
  CHECK(l2.code == 0);
  CHECK(l2.out == "2.23606797749979\n");

  const CliResult weak =
      run_cli({"norm", "--space", "weak-morrey", "--p", "2", "--q", "1", "--input", two_step});
  CHECK(weak.code == 0);
  CHECK(std::stod(weak.out) > 0.0);
}

TEST_CASE("exit codes") {
  const std::string broken = write_tmp("broken.json", "{not json at all");
  CHECK(run_cli({"norm", "--space", "lorentz", "--p", "2", "--q", "2", "--input", broken}).code ==
        cli::kParseError);

  const std::string ok = write_tmp(
      "ok.json", R"({"dim":1,"level":0,"cells":[{"index":[0],"value":1.0}]})");
  CHECK(run_cli({"norm", "--space", "lorentz", "--p", "-2", "--q", "2", "--input", ok}).code ==
        cli::kBadParams);
  CHECK(run_cli({"norm", "--space", "weird", "--p", "2", "--q", "2", "--input", ok}).code ==
        cli::kBadParams);
  CHECK(run_cli({"norm", "--space", "lorentz", "--p", "2", "--input", ok}).code ==
        cli::kBadParams);  // missing --q names the flag
  CHECK(run_cli({"verify", "--suite", "no-such"}).code == cli::kBadParams);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"verify", "--help"}).code == 0);
}

TEST_CASE("decompose and synthesize round trip through files") {
  const std::string haar = write_tmp(
      "haar.json",
      R"({"dim":1,"level":1,"cells":[{"index":[0],"value":1.0},{"index":[1],"value":-1.0}]})");
  const std::string atoms = "/tmp/mllab_cli_atoms.json";
  const std::string report = "/tmp/mllab_cli_report.json";
  const CliResult dec = run_cli({"decompose", "--K", "0", "--input", haar, "--output", atoms,
                                 "--report", report});
  CHECK(dec.code == 0);

  const json rep = load_json_file(report);
  CHECK(rep.at("guarantees").at("reconstruction_error").get<double>() <= 1e-10);
  CHECK(rep.at("guarantees").at("max_atom_excess").get<double>() <= 1e-12);
  CHECK(rep.at("guarantees").at("max_moment_residual").get<double>() <= 1e-10);
  CHECK(rep.at("guarantees").contains("pointwise_bound_constant"));

  const std::string back = "/tmp/mllab_cli_back.json";
  CHECK(run_cli({"synthesize", "--input", atoms, "--output", back}).code == 0);

  // synthesized atoms + residual reconstruct the input
  const StepFunction f = step_function_from_json(load_json_file(haar));
  const StepFunction parts = step_function_from_json(load_json_file(back));
  const StepFunction residual = step_function_from_json(rep.at("residual"));
  const StepFunction err = combine(add(parts, residual), f, std::minus<double>());
  CHECK(err.sup_norm() <= 1e-10);

  const std::string zero = write_tmp("zero.json", R"({"dim":1,"level":0,"cells":[]})");
  CHECK(run_cli({"decompose", "--K", "0", "--input", zero, "--output", atoms}).code ==
        cli::kBadParams);
}

TEST_CASE("operator commands write step-function JSON") {
  const std::string chi = write_tmp(
      "opchi.json", R"({"dim":1,"level":0,"cells":[{"index":[0],"value":1.0}]})");
  const std::string mout = "/tmp/mllab_cli_max.json";
  CHECK(run_cli({"maximal", "--eta", "1", "--theta", "1", "--eval-level", "3", "--input", chi,
                 "--output", mout}).code == 0);
  const StepFunction mf = step_function_from_json(load_json_file(mout));
  CHECK(mf.level == 3);
  CHECK(mf.value_at({0.5, 0.0}) == 1.0);

  const std::string fout = "/tmp/mllab_cli_frac.json";
  CHECK(run_cli({"fracint", "--alpha", "0.5", "--eval-level", "4", "--input", chi, "--output",
                 fout}).code == 0);
  CHECK(step_function_from_json(load_json_file(fout)).value_at({0.5, 0.0}) > 0.0);

  const std::string hout = "/tmp/mllab_cli_heat.json";
  CHECK(run_cli({"heat", "--t", "0.25", "--eval-level", "3", "--input", chi, "--output", hout})
            .code == 0);
  CHECK(step_function_from_json(load_json_file(hout)).value_at({0.5, 0.0}) > 0.0);

  const CliResult hnorm = run_cli({"heat", "--input", chi, "--p", "2", "--q", "1.5", "--r", "1"});
  CHECK(hnorm.code == 0);
  CHECK(std::stod(hnorm.out) > 0.0);
}

TEST_CASE("verify runs, reports deterministically, and rejects bad modes") {
  const std::string csv1 = "/tmp/mllab_cli_verify1.csv";
  const std::string csv2 = "/tmp/mllab_cli_verify2.csv";
  const CliResult a = run_cli({"verify", "--suite", "indicator", "--trials", "10", "--seed", "7",
                               "--mode", "assert", "--report", csv1});
  CHECK(a.code == 0);
  CHECK(a.out.find("PASS") != std::string::npos);
  const CliResult b = run_cli({"verify", "--suite", "indicator", "--trials", "10", "--seed", "7",
                               "--mode", "assert", "--report", csv2});
  CHECK(b.code == 0);
  CHECK(slurp(csv1) == slurp(csv2));
  CHECK(slurp(csv1).substr(0, 58) ==
        "suite,trial,seed,dim,params,lhs,rhs,ratio,eval_level,notes");

  CHECK(run_cli({"verify", "--suite", "indicator", "--mode", "banana"}).code == cli::kBadParams);
}

TEST_CASE("estimate prints a one-shot ratio") {
  const std::string chi = write_tmp(
      "estchi.json", R"({"dim":1,"level":0,"cells":[{"index":[0],"value":1.0}]})");
  const CliResult hls = run_cli({"estimate", "--check", "hls", "--alpha", "0.5", "--p", "1.5",
                                 "--input", chi});
  CHECK(hls.code == 0);
  CHECK(hls.out.find("ratio=") != std::string::npos);

  const CliResult holder = run_cli({"estimate", "--check", "holder", "--input", chi, "--input2",
                                    chi});
  CHECK(holder.code == 0);
  CHECK(holder.out.find("ratio=1") != std::string::npos);

  CHECK(run_cli({"estimate", "--check", "holder", "--input", chi}).code == cli::kBadParams);
  CHECK(run_cli({"estimate", "--check", "nonsense", "--input", chi}).code == cli::kBadParams);
}
