#include "sjlt/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sjlt/errors.hpp"
#include "sjlt/matrix_io.hpp"
#include "sjlt/oracle.hpp"
#include "sjlt/planner.hpp"
#include "sjlt/reports.hpp"
#include "sjlt/transform.hpp"

namespace sjlt::cli {

namespace {

/// Parameter problem attributable to one flag.
class FlagError : public Error {
 public:
  FlagError(const std::string &flag, const std::string &what) : Error(flag + ": " + what) {}
};

void require_open_unit(double v, const char *flag) {
  if (!(v > 0.0 && v < 1.0)) {
    throw FlagError(flag, "must lie in (0, 1)");
  }
}

void require_positive(double v, const char *flag) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw FlagError(flag, "must be positive");
  }
}

std::uint32_t to_u32(std::uint64_t v, const char *flag) {
  if (v > 0xffffffffULL) {
    throw FlagError(flag, "must fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void emit(std::ostream &out, const nlohmann::json &j) { out << j.dump(2) << '\n'; }

// --- plan ------------------------------------------------------------------

struct PlanArgs {
  double eps = 0.0, delta = 0.0, p = 0.0, K = concentration::kDefaultEnvelopeScale;
  std::uint64_t s = 0, m = 0;
  std::string format = "json";
};

planner::PlanRequest plan_request(const PlanArgs &a, bool have_p) {
  require_open_unit(a.eps, "--eps");
  require_open_unit(a.delta, "--delta");
  require_positive(a.K, "--K");
  planner::PlanRequest req;
  if (have_p) {
    require_positive(a.p, "--p");
    req = {a.eps, a.delta, a.p, a.K};
  } else {
    if (a.s == 0 || a.m == 0 || a.s > a.m) {
      throw FlagError("--s/--m", "require 1 <= s <= m (or pass --p)");
    }
    req   = planner::PlanRequest::from_sparsity(a.eps, a.delta, a.s, a.m);
    req.K = a.K;
  }
  try {
    req.validate();
  } catch (const ConstraintViolation &e) {
    const bool sparsity = req.p > concentration::kMaxSparsity;
    throw FlagError(sparsity ? (have_p ? "--p" : "--s/--m") : "--eps", e.what());
  }
  return req;
}

// --- check -----------------------------------------------------------------

struct CheckArgs {
  int qmax = 12;
  std::size_t grid = 10'000;
  double K = concentration::kDefaultEnvelopeScale;
  std::uint64_t seed = kDefaultSeed;
  int vectors = 5;
  std::string format = "json";
};

int run_check(const CheckArgs &a, std::ostream &out) {
  if (a.qmax < 2 || a.qmax > oracle::kMaxMultinomialOrder) {
    throw FlagError("--qmax", "must lie in [2, 20]");
  }
  if (a.grid == 0) {
    throw FlagError("--grid", "must be positive");
  }
  require_positive(a.K, "--K");
  if (a.vectors < 1) {
    throw FlagError("--vectors", "must be at least 1");
  }
  const auto multinomial = oracle::check_multinomial_inequality(a.qmax, false);
  const auto psi_100     = oracle::check_psi_envelope(1.0 / 100.0, a.K, a.grid);
  const auto psi_30      = oracle::check_psi_envelope(1.0 / 30.0, a.K, a.grid);
  const auto chernoff    = oracle::check_chernoff_grid();
  const double rates[]   = {1.0 / 30.0, 0.1};
  const auto moments     = oracle::moment_bound_sweep(2, 6, std::min(a.qmax, 6), rates,
                                                      a.vectors, a.seed);
  const bool passed = multinomial.passed() && psi_100.passed() && psi_30.passed() &&
                      chernoff.passed() && moments.violations == 0;

  if (a.format == "csv") {
    out << "check,passed\n";
    out << "multinomial," << (multinomial.passed() ? "true" : "false") << '\n';
    out << "psi_envelope_p100," << (psi_100.passed() ? "true" : "false") << '\n';
    out << "psi_envelope_p30," << (psi_30.passed() ? "true" : "false") << '\n';
    out << "chernoff_identity," << (chernoff.passed() ? "true" : "false") << '\n';
    out << "moment_bound," << (moments.violations == 0 ? "true" : "false") << '\n';
  } else {
    emit(out, {
                  {"seed", a.seed},
                  {"multinomial", reports::to_json(multinomial)},
                  {"psi_envelope", {reports::to_json(psi_100), reports::to_json(psi_30)}},
                  {"chernoff_identity", reports::to_json(chernoff)},
                  {"moment_bound", reports::to_json(moments)},
                  {"passed", passed},
              });
  }
  return passed ? kOk : kRuntimeError;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Sparse Johnson-Lindenstrauss toolkit", "sjlt"};
  app.require_subcommand(1);
  const auto formats = CLI::IsMember({"json", "csv"});

  PlanArgs plan;
  auto *plan_cmd = app.add_subcommand("plan", "Minimal certified embedding dimension");
  plan_cmd->add_option("--eps", plan.eps, "Distortion in (0,1)")->required();
  plan_cmd->add_option("--delta", plan.delta, "Failure probability in (0,1)")->required();
  auto *plan_p = plan_cmd->add_option("--p", plan.p, "Sparsity fraction s/m, at most 1/30");
  auto *plan_s = plan_cmd->add_option("--s", plan.s, "Nonzeros per column (with --m)");
  auto *plan_m = plan_cmd->add_option("--m", plan.m, "Embedding dimension (with --s)");
  plan_p->excludes(plan_s)->excludes(plan_m);
  plan_s->needs(plan_m);
  plan_m->needs(plan_s);
  plan_cmd->add_option("--K", plan.K, "Envelope scale")->capture_default_str();
  plan_cmd->add_option("--format", plan.format, "json or csv")->check(formats);

  std::uint64_t build_n = 0, build_m = 0, build_s = 0, build_seed = kDefaultSeed;
  std::string build_out, build_format = "binary";
  auto *build_cmd = app.add_subcommand("build", "Draw a sparse JL matrix and write it to a file");
  build_cmd->add_option("--n", build_n, "Data dimension")->required();
  build_cmd->add_option("--m", build_m, "Embedding dimension")->required();
  build_cmd->add_option("--s", build_s, "Nonzeros per column")->required();
  build_cmd->add_option("--seed", build_seed, "64-bit seed")->capture_default_str();
  build_cmd->add_option("--out", build_out, "Output path")->required();
  build_cmd->add_option("--format", build_format, "binary or json")
      ->check(CLI::IsMember({"binary", "json"}));

  std::string tf_matrix, tf_in, tf_out;
  auto *tf_cmd = app.add_subcommand("transform", "Apply a stored matrix to a vector file");
  tf_cmd->add_option("--matrix", tf_matrix, "Matrix file (binary or JSON)")->required();
  tf_cmd->add_option("--in", tf_in, "Input vectors, one CSV line each")->required();
  tf_cmd->add_option("--out", tf_out, "Output vectors")->required();

  std::uint64_t vf_n = 0, vf_m = 0, vf_s = 0, vf_trials = 0, vf_seed = kDefaultSeed;
  double vf_eps = 0.0;
  unsigned vf_threads = 0;
  std::string vf_vector, vf_format = "json";
  auto *vf_cmd = app.add_subcommand("verify", "Monte Carlo failure probability");
  vf_cmd->add_option("--n", vf_n, "Data dimension")->required();
  vf_cmd->add_option("--m", vf_m, "Embedding dimension")->required();
  vf_cmd->add_option("--s", vf_s, "Nonzeros per column")->required();
  vf_cmd->add_option("--eps", vf_eps, "Distortion")->required();
  vf_cmd->add_option("--trials", vf_trials, "Number of independent matrices")->required();
  vf_cmd->add_option("--seed", vf_seed, "64-bit seed")->capture_default_str();
  vf_cmd->add_option("--vector", vf_vector,
                     "CSV file whose first line is x (normalized); default is the flat vector");
  vf_cmd->add_option("--threads", vf_threads, "Worker threads, 0 = all cores");
  vf_cmd->add_option("--format", vf_format, "json or csv")->check(formats);

  double bd_eps = 0.0, bd_delta = 0.0, bd_p = 0.0, bd_B = 4.0;
  std::vector<std::string> bd_constants;
  std::string bd_format = "json";
  auto *bd_cmd = app.add_subcommand("bounds", "Tabulate sparse JL dimension bounds");
  bd_cmd->add_option("--eps", bd_eps, "Distortion in (0,1)")->required();
  bd_cmd->add_option("--delta", bd_delta, "Failure probability in (0,1)")->required();
  bd_cmd->add_option("--p", bd_p, "Sparsity fraction")->required();
  bd_cmd->add_option("--B", bd_B, "Tradeoff factor B > 2")->capture_default_str();
  bd_cmd->add_option("--constant", bd_constants, "Leading constant override source=value");
  bd_cmd->add_option("--format", bd_format, "json or csv")->check(formats);

  CheckArgs check;
  auto *ck_cmd = app.add_subcommand("check", "Run the oracle suite");
  ck_cmd->add_option("--qmax", check.qmax, "Largest q for the multinomial check")
      ->capture_default_str();
  ck_cmd->add_option("--grid", check.grid, "psi envelope grid points")->capture_default_str();
  ck_cmd->add_option("--K", check.K, "Envelope scale")->capture_default_str();
  ck_cmd->add_option("--seed", check.seed, "Seed for the moment sweep")->capture_default_str();
  ck_cmd->add_option("--vectors", check.vectors, "Random unit vectors per n in the sweep")
      ->capture_default_str();
  ck_cmd->add_option("--format", check.format, "json or csv")->check(formats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*plan_cmd) {
      const auto req = plan_request(plan, plan_p->count() > 0);
      const auto res = planner::min_dimension(req);
      if (plan.format == "csv") {
        out << reports::to_csv(res);
      } else {
        auto j = reports::to_json(res);
        j["eps"]   = req.eps;
        j["delta"] = req.delta;
        j["p"]     = req.p;
        j["K"]     = req.K;
        emit(out, j);
      }
      if (res.s_below_one) {
        err << "warning: p * m_min < 1; s_implied was rounded up to 1\n";
      }
      return kOk;
    }

    if (*build_cmd) {
      const auto m = to_u32(build_m, "--m");
      const auto s = to_u32(build_s, "--s");
      if (build_n == 0 || m == 0 || s == 0) {
        throw FlagError("--n/--m/--s", "must be positive");
      }
      if (s > m) {
        throw FlagError("--s", "invalid sparsity: s must not exceed m");
      }
      const auto a = SparseJLMatrix::build(build_n, m, s, build_seed, 0);
      io::save_matrix(build_out, a,
                      build_format == "json" ? io::MatrixFormat::json : io::MatrixFormat::binary);
      emit(out, {{"n", a.n()},
                 {"m", a.m()},
                 {"s", a.s()},
                 {"seed", a.seed()},
                 {"format", build_format},
                 {"out", build_out}});
      return kOk;
    }

    if (*tf_cmd) {
      const auto a = io::load_matrix(tf_matrix);
      std::ifstream in(tf_in);
      if (!in) {
        throw Error("cannot open " + tf_in);
      }
      const auto xs = io::read_vectors(in);
      const auto ys = a.apply_batch(xs);
      std::ofstream o(tf_out, std::ios::trunc);
      if (!o) {
        throw Error("cannot open " + tf_out + " for writing");
      }
      io::write_vectors(o, ys);
      return kOk;
    }

    if (*vf_cmd) {
      const auto m = to_u32(vf_m, "--m");
      const auto s = to_u32(vf_s, "--s");
      if (vf_n == 0 || m == 0 || s == 0) {
        throw FlagError("--n/--m/--s", "must be positive");
      }
      if (s > m) {
        throw FlagError("--s", "invalid sparsity: s must not exceed m");
      }
      require_positive(vf_eps, "--eps");
      if (vf_trials == 0) {
        throw FlagError("--trials", "must be at least 1");
      }
      std::vector<double> x;
      if (!vf_vector.empty()) {
        std::ifstream in(vf_vector);
        if (!in) {
          throw Error("cannot open " + vf_vector);
        }
        auto vs = io::read_vectors(in);
        if (vs.empty() || vs.front().size() != vf_n) {
          throw FlagError("--vector", "first line must hold a vector of length n");
        }
        x = std::move(vs.front());
      } else {
        x.assign(vf_n, 1.0);
      }
      double norm = 0.0;
      for (double v : x) {
        norm += v * v;
      }
      if (!(norm > 0.0)) {
        throw FlagError("--vector", "must be nonzero");
      }
      for (auto &v : x) {
        v /= std::sqrt(norm);
      }
      const auto report =
          oracle::estimate_failure_prob(vf_n, m, s, x, vf_eps, vf_trials, vf_seed, vf_threads);
      if (vf_format == "csv") {
        out << reports::to_csv(report);
      } else {
        emit(out, reports::to_json(report));
      }
      return kOk;
    }

    if (*bd_cmd) {
      planner::BoundsOptions opts;
      opts.B = bd_B;
      for (const auto &c : bd_constants) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) {
          throw FlagError("--constant", "expected source=value, got \"" + c + "\"");
        }
        double v = 0.0;
        try {
          std::size_t used = 0;
          v = std::stod(c.substr(eq + 1), &used);
          if (used != c.size() - eq - 1) {
            throw std::invalid_argument(c);
          }
        } catch (const std::exception &) {
          throw FlagError("--constant", "cannot parse value in \"" + c + "\"");
        }
        require_positive(v, "--constant");
        opts.constants[c.substr(0, eq)] = v;
      }
      const auto rows = planner::bounds_table(bd_eps, bd_delta, bd_p, opts);
      if (bd_format == "csv") {
        out << planner::bounds_table_csv(rows);
      } else {
        emit(out, {{"eps", bd_eps},
                   {"delta", bd_delta},
                   {"p", bd_p},
                   {"B", bd_B},
                   {"rows", reports::to_json(rows)}});
      }
      return kOk;
    }

    if (*ck_cmd) {
      return run_check(check, out);
    }
  } catch (const FlagError &e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const DomainError &e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ConstraintViolation &e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}

}  // namespace sjlt::cli
