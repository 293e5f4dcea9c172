#include "sjlt/reports.hpp"

#include <sstream>

#include "sjlt/matrix_io.hpp"

namespace sjlt::reports {

using nlohmann::json;

json to_json(const planner::PlanResult &r) {
  return {
      {"m_min", r.m_min},
      {"m_bound", r.m_bound},
      {"h_value", r.h_value},
      {"gaussian_reference", r.gaussian_reference},
      {"slack", r.slack},
      {"s_implied", r.s_implied},
      {"s_below_one", r.s_below_one},
  };
}

json to_json(const std::vector<planner::BoundsRow> &rows) {
  json out = json::array();
  for (const auto &row : rows) {
    out.push_back({
        {"source", row.source},
        {"analysis", row.analysis},
        {"formula_value", row.formula_value},
        {"constant", row.constant},
        {"valid", row.valid},
        {"note", row.note},
    });
  }
  return out;
}

json to_json(const oracle::TrialReport &r) {
  return {
      {"n", r.n},
      {"m", r.m},
      {"s", r.s},
      {"eps", r.eps},
      {"trials", r.trials},
      {"failures", r.failures},
      {"p_hat", r.p_hat},
      {"ci_low", r.ci_low},
      {"ci_high", r.ci_high},
      {"confidence", r.confidence},
      {"seed", r.seed},
  };
}

json to_json(const oracle::MultinomialReport &r) {
  json violations = json::array();
  for (const auto &v : r.violations) {
    violations.push_back({{"q", v.q}, {"parts", v.parts}, {"lhs", v.lhs}, {"rhs", v.rhs}});
  }
  return {
      {"q_max", r.q_max},
      {"compositions_checked", r.compositions_checked},
      {"violations", violations},
      {"central_binomial_checked", r.central_binomial_checked},
      {"central_binomial_violations", r.central_binomial_violations},
      {"passed", r.passed()},
  };
}

json to_json(const oracle::PsiEnvelopeReport &r) {
  return {
      {"p", r.p},
      {"K", r.K},
      {"grid_points", r.grid_points},
      {"t_max", r.t_max},
      {"max_violation", r.max_violation},
      {"t_at_max", r.t_at_max},
      {"violations", r.violations},
      {"passed", r.passed()},
  };
}

json to_json(const oracle::ChernoffGridReport &r) {
  return {
      {"points", r.points.size()},
      {"max_residual", r.max_residual},
      {"tolerance", r.tolerance},
      {"passed", r.passed()},
  };
}

json to_json(const oracle::MomentSweepReport &r) {
  return {
      {"cases", r.cases},
      {"violations", r.violations},
      {"worst_ratio", r.worst_ratio},
      {"passed", r.violations == 0},
  };
}

std::string to_csv(const planner::PlanResult &r) {
  std::ostringstream out;
  out << "m_min,m_bound,h_value,gaussian_reference,slack,s_implied,s_below_one\n"
      << r.m_min << ',' << io::format_double(r.m_bound) << ',' << io::format_double(r.h_value)
      << ',' << io::format_double(r.gaussian_reference) << ',' << io::format_double(r.slack)
      << ',' << r.s_implied << ',' << (r.s_below_one ? "true" : "false") << '\n';
  return out.str();
}

std::string to_csv(const oracle::TrialReport &r) {
  std::ostringstream out;
  out << "n,m,s,eps,trials,failures,p_hat,ci_low,ci_high,confidence,seed\n"
      << r.n << ',' << r.m << ',' << r.s << ',' << io::format_double(r.eps) << ',' << r.trials
      << ',' << r.failures << ',' << io::format_double(r.p_hat) << ','
      << io::format_double(r.ci_low) << ',' << io::format_double(r.ci_high) << ','
      << io::format_double(r.confidence) << ',' << r.seed << '\n';
  return out.str();
}

}  // namespace sjlt::reports
