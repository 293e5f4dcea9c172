#include "sjlt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sjlt/errors.hpp"

namespace sjlt::planner {

namespace {

void require_open_unit(double v, const char *name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw DomainError(std::string(name) + " must lie in (0, 1)");
  }
}

std::uint64_t ceil_dimension(double bound) {
  if (!std::isfinite(bound) || bound <= 0.0) {
    throw DomainError("dimension bound is not a positive finite number");
  }
  if (bound >= 9.2e18) {
    throw DomainError("dimension bound exceeds the 64-bit range");
  }
  return static_cast<std::uint64_t>(std::ceil(bound));
}

double gaussian_reference(double eps, double delta) {
  return 4.0 * std::log(2.0 / delta) / (eps * eps);
}

}  // namespace

PlanRequest PlanRequest::from_sparsity(double eps, double delta, std::uint64_t s,
                                       std::uint64_t m) {
  if (s == 0 || m == 0 || s > m) {
    throw DomainError("sparsity requires 1 <= s <= m");
  }
  PlanRequest req;
  req.eps   = eps;
  req.delta = delta;
  req.p     = static_cast<double>(s) / static_cast<double>(m);
  return req;
}

double max_certified_eps(double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw DomainError("p must lie in (0, 1/2)");
  }
  return p * std::log(1.0 / (2.0 * p));
}

void PlanRequest::validate() const {
  require_open_unit(eps, "eps");
  require_open_unit(delta, "delta");
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("p must be positive");
  }
  if (!(K > 0.0) || !std::isfinite(K)) {
    throw DomainError("K must be positive");
  }
  if (p > concentration::kMaxSparsity) {
    throw ConstraintViolation("sparsity precondition violated: p ⩽ 1/30 (got p = " +
                              std::to_string(p) + ")");
  }
  if (eps > max_certified_eps(p)) {
    throw ConstraintViolation("distortion precondition violated: ε ⩽ p log(1/2p) (got eps = " +
                              std::to_string(eps) + ", limit " +
                              std::to_string(max_certified_eps(p)) + ")");
  }
}

PlanResult min_dimension(const PlanRequest &req) {
  req.validate();
  PlanResult res;
  res.gaussian_reference = gaussian_reference(req.eps, req.delta);
  res.h_value            = concentration::bennet_h(req.K * req.eps / (2.0 * req.p));
  res.m_bound            = res.gaussian_reference / res.h_value;
  res.m_min              = ceil_dimension(res.m_bound);
  res.slack              = max_certified_eps(req.p) - req.eps;
  const double s_real    = req.p * static_cast<double>(res.m_min);
  res.s_below_one        = s_real < 1.0;
  res.s_implied          = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(s_real)));
  return res;
}

Tradeoff sparsity_tradeoff(double eps, double delta, double B, double s_constant) {
  require_open_unit(eps, "eps");
  require_open_unit(delta, "delta");
  if (!(B > 2.0) || !std::isfinite(B)) {
    throw DomainError("B must be finite and greater than 2");
  }
  if (!(s_constant > 0.0) || !std::isfinite(s_constant)) {
    throw DomainError("s_constant must be positive");
  }
  const double log_b = std::log(B);
  Tradeoff out;
  out.m = ceil_dimension(4.0 * B * std::log(2.0 / delta) / (eps * eps * log_b));
  out.s = ceil_dimension(s_constant / (eps * log_b));
  return out;
}

std::vector<BoundsRow> bounds_table(double eps, double delta, double p,
                                    const BoundsOptions &opts) {
  const bool inputs_ok = eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0 && p > 0.0 &&
                         p <= 1.0 && std::isfinite(opts.B);

  std::vector<BoundsRow> rows;
  auto add = [&](const char *source, const char *analysis, auto &&formula, double default_constant,
                 auto &&precondition) {
    BoundsRow row;
    row.source   = source;
    row.analysis = analysis;
    auto it      = opts.constants.find(row.source);
    row.constant = it != opts.constants.end() ? it->second : default_constant;
    if (!inputs_ok) {
      row.valid = false;
      row.note  = "eps, delta must lie in (0,1) and p in (0,1]";
    } else if (std::string why = precondition(); !why.empty()) {
      row.valid = false;
      row.note  = why;
    } else {
      const double v = row.constant * formula();
      if (std::isfinite(v) && v > 0.0 && v < 9.2e18) {
        row.formula_value = std::ceil(v);
      } else {
        row.valid = false;
        row.note  = "formula is not a positive finite dimension";
      }
    }
    rows.push_back(std::move(row));
  };
  auto none = [] { return std::string(); };

  const double L2  = std::log(2.0 / delta);
  const double L1  = std::log(1.0 / delta);
  const double pe  = p * eps;
  const double ee  = eps * eps;
  const double ref = 4.0 * L2 / ee;

  // Both lower-bound rows collapse onto the optimal dense reference line.
  add("kane2011almost", "lower bound (reference line)", [&] { return ref; }, 1.0, none);
  add("burr2018optimal", "lower bound (reference line)", [&] { return ref; }, 1.0, none);
  add("kane2010_chaos", "Rademacher chaos bounds",
      [&] { return std::max(L2 / ee, L2 * L2 / pe); }, 1.0, none);
  add("kane2010_graphs", "moment bounds by graph enumeration",
      [&] {
        const double ll = std::log(L2);
        return std::max(L2 / ee, L1 * L1 * (std::log(ll) / ll) / pe);
      },
      1.0,
      [&] {
        return std::log(L2) > 1.0 ? std::string() : std::string("requires log log(2/delta) > 1");
      });
  add("kane2012sparser", "moment bounds by graph enumeration",
      [&] { return std::max(L2 / ee, L2 / pe); }, 1.0, none);
  add("cohen2016nearly", "matrix Chernoff + majorization",
      [&] { return std::max(opts.B * L2 / ee, (L2 / std::log(opts.B)) / pe); }, 1.0,
      [&] { return opts.B > 2.0 ? std::string() : std::string("requires B > 2"); });
  add("cohen2018simple", "Hanson-Wright + random matrix bounds",
      [&] { return std::max(L2 / ee, L2 / pe); }, 1.0, none);
  add(kCohen2018ExplicitSource, "decoupling + MGF bound",
      [&] { return std::max(128.0 * L1 / ee, 8.0 * std::sqrt(2.0) * L2 / pe); }, 1.0, none);
  add(kThisWorkSource, "Bennet technique",
      [&] {
        PlanRequest req{eps, delta, p, opts.K};
        return static_cast<double>(min_dimension(req).m_min);
      },
      1.0,
      [&] {
        try {
          PlanRequest{eps, delta, p, opts.K}.validate();
        } catch (const Error &e) {
          return std::string(e.what());
        }
        return std::string();
      });
  return rows;
}

std::string bounds_table_csv(const std::vector<BoundsRow> &rows) {
  std::ostringstream out;
  out << "source,formula_value,constant,valid\n";
  char buf[64];
  for (const auto &row : rows) {
    out << row.source << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.formula_value);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.constant);
    out << buf << ',' << (row.valid ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace sjlt::planner
