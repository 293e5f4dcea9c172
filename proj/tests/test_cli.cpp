#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sjlt/cli.hpp"
#include "sjlt/matrix_io.hpp"

using namespace sjlt;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"sjlt"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &a : storage) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out  = out.str();
  r.err  = err.str();
  return r;
}

std::string tmp(const std::string &name) {
  return (std::filesystem::temp_directory_path() / ("sjlt_cli_" + name)).string();
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("plan reports the minimal dimension") {
  const auto r = run({"plan", "--eps", "0.05", "--delta", "0.01", "--p", "0.0333333333333333333"});
  REQUIRE(r.code == cli::kOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["m_min"] == 57842);
  CHECK(j["s_implied"] == 1928);
  CHECK(j["eps"] == 0.05);

  const auto viasm = run({"plan", "--eps", "0.05", "--delta", "0.01", "--s", "2", "--m", "60"});
  REQUIRE(viasm.code == cli::kOk);
  CHECK(nlohmann::json::parse(viasm.out)["m_min"] == 57842);

  const auto csv = run({"plan", "--eps", "0.08", "--delta", "0.5", "--s", "1", "--m", "30",
                        "--format", "csv"});
  REQUIRE(csv.code == cli::kOk);
  CHECK(csv.out.rfind("m_min,", 0) == 0);
  CHECK(csv.out.find("\n8176,") != std::string::npos);
}

TEST_CASE("plan rejects requests outside the certified region") {
  const auto sparse = run({"plan", "--eps", "0.05", "--delta", "0.01", "--p", "0.05"});
  CHECK(sparse.code == cli::kValidationError);
  CHECK(sparse.err.find("--p") != std::string::npos);
  CHECK(sparse.err.find("p ⩽ 1/30") != std::string::npos);

  const auto eps = run({"plan", "--eps", "0.095", "--delta", "0.01", "--s", "1", "--m", "30"});
  CHECK(eps.code == cli::kValidationError);
  CHECK(eps.err.find("--eps") != std::string::npos);
  CHECK(eps.err.find("ε ⩽ p log(1/2p)") != std::string::npos);

  CHECK(run({"plan", "--eps", "1.5", "--delta", "0.01", "--p", "0.01"}).code ==
        cli::kValidationError);
  CHECK(run({"plan", "--eps", "0.01", "--delta", "0.01"}).code == cli::kValidationError);
  CHECK(run({"plan", "--delta", "0.01", "--p", "0.01"}).code == cli::kValidationError);
}

TEST_CASE("build then transform maps basis vectors to scaled columns") {
  const auto mat = tmp("m.bin");
  const auto in  = tmp("in.csv");
  const auto out = tmp("out.csv");
  const auto b   = run({"build", "--n", "4", "--m", "16", "--s", "4", "--seed", "12345", "--out", mat});
  REQUIRE(b.code == cli::kOk);
  CHECK(nlohmann::json::parse(b.out)["seed"] == 12345);

  {
    std::ofstream f(in);
    f << "1,0,0,0\n0,0,1,0\n";
  }
  REQUIRE(run({"transform", "--matrix", mat, "--in", in, "--out", out}).code == cli::kOk);
  std::ifstream f(out);
  const auto ys = io::read_vectors(f);
  REQUIRE(ys.size() == 2);
  const auto a = io::load_matrix(mat);
  for (int k = 0; k < 2; ++k) {
    const std::uint64_t col = k == 0 ? 0 : 2;
    std::vector<double> expect(16, 0.0);
    for (std::uint32_t j = 0; j < 4; ++j) {
      expect[a.column_rows(col)[j]] = 0.5 * a.column_signs(col)[j];
    }
    CHECK(ys[k] == expect);
  }

  const auto mat_json = tmp("m.json");
  const auto out_json = tmp("out_json.csv");
  REQUIRE(run({"build", "--n", "4", "--m", "16", "--s", "4", "--seed", "12345", "--out", mat_json,
               "--format", "json"})
              .code == cli::kOk);
  REQUIRE(run({"transform", "--matrix", mat_json, "--in", in, "--out", out_json}).code ==
          cli::kOk);
  CHECK(slurp(out) == slurp(out_json));

  {
    std::ofstream bad(in);
    bad << "1,0,0\n";
  }
  const auto mismatch = run({"transform", "--matrix", mat, "--in", in, "--out", out});
  CHECK(mismatch.code == cli::kRuntimeError);
  CHECK(mismatch.err.find("dimension mismatch") != std::string::npos);

  for (const auto &p : {mat, in, out, mat_json, out_json}) {
    std::filesystem::remove(p);
  }
}

TEST_CASE("identical build arguments give byte-identical files") {
  const auto a = tmp("a.bin");
  const auto b = tmp("b.bin");
  REQUIRE(run({"build", "--n", "1000", "--m", "64", "--s", "4", "--seed", "9", "--out", a}).code == 0);
  REQUIRE(run({"build", "--n", "1000", "--m", "64", "--s", "4", "--seed", "9", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).size() == 28 + 1000 * (4 + 4 * 5));
  std::filesystem::remove(a);
  std::filesystem::remove(b);

  const auto bad = run({"build", "--n", "3", "--m", "4", "--s", "5", "--out", a});
  CHECK(bad.code == cli::kValidationError);
  CHECK(bad.err.find("invalid sparsity") != std::string::npos);
}

TEST_CASE("verify is reproducible") {
  const auto one = run({"verify", "--n", "32", "--m", "16", "--s", "2", "--eps", "0.3",
                        "--trials", "500", "--seed", "5", "--threads", "1"});
  const auto many = run({"verify", "--n", "32", "--m", "16", "--s", "2", "--eps", "0.3",
                         "--trials", "500", "--seed", "5", "--threads", "4"});
  REQUIRE(one.code == cli::kOk);
  CHECK(one.out == many.out);
  const auto j = nlohmann::json::parse(one.out);
  CHECK(j["trials"] == 500);
  CHECK(j["seed"] == 5);
  CHECK(j["ci_low"].get<double>() <= j["p_hat"].get<double>());
  CHECK(j["ci_high"].get<double>() >= j["p_hat"].get<double>());

  const auto csv = run({"verify", "--n", "8", "--m", "8", "--s", "1", "--eps", "0.5", "--trials",
                        "10", "--format", "csv"});
  REQUIRE(csv.code == cli::kOk);
  CHECK(csv.out.rfind("n,m,s,eps,trials,failures,p_hat,ci_low,ci_high,confidence,seed\n", 0) == 0);
}

TEST_CASE("bounds table output") {
  const auto csv = run({"bounds", "--eps", "0.05", "--delta", "0.01", "--p", "0.0333333333333333333",
                        "--format", "csv"});
  REQUIRE(csv.code == cli::kOk);
  CHECK(csv.out.rfind("source,formula_value,constant,valid\n", 0) == 0);
  CHECK(csv.out.find("this_work,57842,1,true") != std::string::npos);

  const auto json = run({"bounds", "--eps", "0.05", "--delta", "0.01", "--p", "0.01",
                         "--constant", "kane2012sparser=2"});
  REQUIRE(json.code == cli::kOk);
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j["rows"].size() == 9);
  bool seen = false;
  for (const auto &row : j["rows"]) {
    if (row["source"] == "kane2012sparser") {
      seen = true;
      CHECK(row["constant"] == 2.0);
    }
  }
  CHECK(seen);
  CHECK(run({"bounds", "--eps", "0.05", "--delta", "0.01", "--p", "0.01", "--constant", "oops"})
            .code == cli::kValidationError);
}

TEST_CASE("check passes with the default envelope and fails with a weak one") {
  const auto ok = run({"check", "--qmax", "8", "--grid", "2000", "--vectors", "2"});
  CHECK(ok.code == cli::kOk);
  CHECK(nlohmann::json::parse(ok.out)["passed"] == true);

  const auto weak = run({"check", "--qmax", "8", "--grid", "2000", "--vectors", "2", "--K", "4",
                         "--format", "csv"});
  CHECK(weak.code == cli::kRuntimeError);
  CHECK(weak.out.find("psi_envelope_p30,false") != std::string::npos);
  CHECK(weak.out.find("multinomial,true") != std::string::npos);
}

TEST_CASE("argument errors") {
  CHECK(run({"plan", "--eps", "0.05", "--delta", "0.01", "--p", "0.01", "--bogus", "1"}).code ==
        cli::kValidationError);
  CHECK(run({}).code == cli::kValidationError);
  CHECK(run({"frobnicate"}).code == cli::kValidationError);
  CHECK(run({"plan", "--eps", "abc", "--delta", "0.01", "--p", "0.01"}).code ==
        cli::kValidationError);
  CHECK(run({"--help"}).code == cli::kOk);
  CHECK(run({"transform", "--matrix", tmp("does_not_exist"), "--in", "x", "--out", "y"}).code ==
        cli::kRuntimeError);
}
