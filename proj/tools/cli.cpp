// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "concbound/closed_forms.hpp"
#include "concbound/core.hpp"
#include "concbound/extremal.hpp"
#include "concbound/oracles.hpp"
#include "concbound/sos_bounds.hpp"
#include "concbound/variational.hpp"
#include "parallel.hpp"

namespace concbound::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

const std::vector<std::string> kMethods = {"hoeffding", "exact1",     "chernoff",
                                           "chernoff-general", "variational", "linear",
                                           "bernstein", "bennett",    "sos",
                                           "sos-mu2-grid"};

struct Common {
  std::string method;
  std::size_t n = 0;  // 0: derived from the mean list
  std::vector<double> mu;
  std::vector<double> mu2;
  double t = 0.0;
  std::string support = "0,1";
  int degree = 2;
  int level = 2;
  std::string objective = "exact";
  double truncation = 10.0;
  std::size_t grid_size = 41;
  unsigned threads = 0;
};

double parse_number(std::string s) {
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  double v = 0.0;
  const char* b = s.data();
  if (!s.empty() && s[0] == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

SupportInterval parse_support(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidArgument("--support expects lo,hi");
  SupportInterval sup{parse_number(s.substr(0, comma)), parse_number(s.substr(comma + 1))};
  sup.check();
  return sup;
}

void add_common(CLI::App* app, Common& c, bool with_method) {
  if (with_method)
    app->add_option("--method", c.method, "Bound method")
        ->check(CLI::IsMember(kMethods));
  app->add_option("--n", c.n, "Number of variables (default: length of --mu, else 1)");
  app->add_option("--mu", c.mu, "Means, comma separated (one value is replicated)")
      ->delimiter(',');
  app->add_option("--mu2", c.mu2, "Second moments, comma separated")->delimiter(',');
  app->add_option("--t", c.t, "Deviation t in P(sum X >= n t + sum mu)");
  app->add_option("--support", c.support, "Support lo,hi (use --support=-inf,1)");
  app->add_option("--sos-degree", c.degree, "SoS polynomial degree");
  app->add_option("--level", c.level, "SoS hierarchy level r");
  app->add_option("--objective", c.objective, "SoS objective mode")
      ->check(CLI::IsMember({"exact", "rank1"}));
  app->add_option("--truncation", c.truncation, "Truncation radius R for unbounded supports");
  app->add_option("--grid-size", c.grid_size, "mu2 grid size for sos-mu2-grid");
  app->add_option("--threads", c.threads, "Worker threads (0: hardware)");
}

std::size_t resolve_n(const Common& c) {
  std::size_t n = c.n;
  if (n == 0) n = std::max<std::size_t>({c.mu.size(), c.mu2.size(), 1});
  auto ok = [&](const std::vector<double>& v) { return v.empty() || v.size() == 1 || v.size() == n; };
  if (!ok(c.mu) || !ok(c.mu2)) throw InvalidArgument("moment lists must have 1 or n entries");
  return n;
}

std::vector<double> expand(const std::vector<double>& v, std::size_t n) {
  if (v.size() == 1) return std::vector<double>(n, v[0]);
  return v;
}

MomentSpec build_spec(const Common& c) {
  const std::size_t n = resolve_n(c);
  if (c.mu.empty()) throw InvalidArgument("--mu is required for this method");
  const auto mu = expand(c.mu, n);
  const auto mu2 = expand(c.mu2, n);
  MomentSpec s;
  s.support = parse_support(c.support);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> m{mu[i]};
    if (!mu2.empty()) m.push_back(mu2[i]);
    s.moments.push_back(std::move(m));
  }
  s.check_structure();
  return s;
}

// Order-1 methods run on [0,1]; other bounded supports are mapped affinely.
struct UnitProblem {
  std::vector<double> mu;
  double t;
};

UnitProblem to_unit(const Common& c) {
  const MomentSpec s = build_spec(c);
  if (!s.support.bounded()) throw UnboundedSupport("method needs a bounded support");
  const double w = s.support.width();
  UnitProblem u{{}, c.t / w};
  for (double m : s.means()) u.mu.push_back((m - s.support.lower) / w);
  return u;
}

bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

BoundResult compute(const Common& c) {
  const std::string& m = c.method;
  if (m.empty()) throw InvalidArgument("--method is required");
  if (m == "hoeffding") {
    const std::size_t n = resolve_n(c);
    const SupportInterval sup = parse_support(c.support);
    if (!sup.bounded()) throw UnboundedSupport("hoeffding needs a bounded support");
    const std::vector<double> w(n, sup.width());
    return closed_form::hoeffding(n, c.t, w);
  }
  if (m == "exact1") {
    const UnitProblem u = to_unit(c);
    if (u.mu.size() != 1) throw InvalidArgument("exact1 is univariate (n = 1)");
    return closed_form::exact_univariate(u.mu[0], u.t);
  }
  if (m == "chernoff" || m == "chernoff-general") {
    const UnitProblem u = to_unit(c);
    if (m == "chernoff" && all_equal(u.mu)) {
      if (u.mu.size() == 1) return closed_form::chernoff_univariate(u.mu[0], u.t).first;
      return closed_form::chernoff_iid(u.mu.size(), u.mu[0], u.t);
    }
    return closed_form::chernoff_general(u.mu, u.t);
  }
  if (m == "variational") {
    const UnitProblem u = to_unit(c);
    return variational::solve_variational(MomentSpec::from_means(u.mu), u.t).first;
  }
  if (m == "linear") {
    const UnitProblem u = to_unit(c);
    double avg = 0.0;
    for (double x : u.mu) avg += x / double(u.mu.size());
    return closed_form::linear_bound(avg, u.t);
  }
  if (m == "bernstein" || m == "bennett") {
    const MomentSpec s = build_spec(c);
    if (s.order() < 2) throw InvalidArgument(m + " needs --mu2");
    validate_moments_or_throw(s);
    double v = 0.0, var = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
      v += s.moment(i, 2);
      var += s.moment(i, 2) - s.mean(i) * s.mean(i);
    }
    if (m == "bernstein") {
      if (!s.support.bounded()) throw UnboundedSupport("bernstein needs a bounded support");
      const double cc = std::max(std::abs(s.support.lower), std::abs(s.support.upper));
      return closed_form::bernstein(s.n(), c.t, v, cc);
    }
    if (!(s.support.upper < kInf)) throw UnboundedSupport("bennett needs a finite upper end");
    return closed_form::bennett(s.n(), c.t, var, s.support.upper);
  }
  if (m == "sos") {
    sos::SosBoundRequest req;
    req.spec = build_spec(c);
    req.t = c.t;
    req.degree = c.degree;
    req.level = c.level;
    req.mode = sos::parse_objective_mode(c.objective);
    req.truncation_radius = c.truncation;
    try {
      return sos::sos_bound(req).first;
    } catch (const EmptyTail&) {
      BoundResult r = BoundResult::make("sos", 0.0);
      r.diagnostics.status = "empty_tail";
      return r;
    }
  }
  if (m == "sos-mu2-grid") {
    const std::size_t n = resolve_n(c);
    if (n != 2) throw InvalidArgument("sos-mu2-grid is defined for n = 2");
    if (c.mu.empty()) throw InvalidArgument("--mu is required for this method");
    if (!all_equal(expand(c.mu, n))) throw InvalidArgument("sos-mu2-grid needs equal means");
    const SupportInterval sup = parse_support(c.support);
    if (sup.lower != 0.0 || sup.upper != 1.0)
      throw InvalidArgument("sos-mu2-grid expects the support [0,1]");
    return sos::hoeffding_mu2_grid(c.mu[0], c.t, c.level, c.grid_size, sos::GridAggregate::min,
                                   sos::parse_objective_mode(c.objective), c.threads)
        .result;
  }
  throw InvalidArgument("unknown method: " + m);
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

void write_manifest(std::ostream& os, const std::string& command,
                    const std::vector<std::string>& args) {
  os << "# concbound " << kVersion << '\n';
  os << "# command: " << command << '\n';
  os << "# args: " << join_args(args) << '\n';
  os << "# eigen: " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
     << EIGEN_MINOR_VERSION << '\n';
}

// Maps exceptions to exit codes with a one-line stderr diagnostic.
template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const SolverFailure& e) {
    err << "error: solver failure (" << e.status() << "): " << e.what() << '\n';
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

std::string status_of(const std::exception& e) {
  if (auto* s = dynamic_cast<const SolverFailure*>(&e)) return "solver_failure_" + s->status();
  return "invalid_input";
}

std::vector<double> parse_grid(const std::string& g) {
  std::vector<std::string> parts;
  std::stringstream ss(g);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw InvalidArgument("--t-grid expects start:stop:step");
  const double a = parse_number(parts[0]), b = parse_number(parts[1]), h = parse_number(parts[2]);
  if (!(h > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidArgument("--t-grid needs finite ends and a positive step");
  std::vector<double> out;
  if (b < a) return out;
  const auto k = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9));
  for (std::size_t i = 0; i <= k; ++i) out.push_back(a + h * double(i));
  return out;
}

// Elapsed time goes to stderr so stdout stays byte-identical across runs.
struct WallClock {
  std::ostream& err;
  bool enabled;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  ~WallClock() {
    if (enabled)
      err << "# wall_seconds: "
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
          << '\n';
  }
};

json parse_json(const std::string& s) { return json::parse(s); }

json bound_json(const BoundResult& r) {
  return {{"method", r.method},
          {"value", r.value},
          {"clamped", r.clamped()},
          {"status", r.diagnostics.status}};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concentration bounds for sums of independent bounded variables"};
  app.require_subcommand(1);
  app.fallthrough();
  bool no_manifest = false;
  app.add_flag("--no-manifest", no_manifest, "Suppress '#' manifest lines and timing");

  Common bc;
  auto* bound = app.add_subcommand("bound", "Compute one bound; prints method,value,clamped,status");
  add_common(bound, bc, true);

  Common cc;
  std::vector<std::string> methods;
  std::string tgrid, out_path;
  auto* compare = app.add_subcommand("compare", "Sweep methods over a t grid; writes CSV");
  add_common(compare, cc, false);
  compare->add_option("--methods", methods, "Methods, comma separated")
      ->delimiter(',')
      ->required()
      ->check(CLI::IsMember(kMethods));
  compare->add_option("--t-grid", tgrid, "start:stop:step")->required();
  compare->add_option("--out", out_path, "Output CSV path (default stdout)");

  Common ec;
  ec.method = "exact1";
  auto* extremal = app.add_subcommand("extremal", "Extremal distribution and attainment JSON");
  add_common(extremal, ec, false);
  extremal->add_option("--method", ec.method, "exact1, chernoff or variational")
      ->check(CLI::IsMember({"exact1", "chernoff", "variational"}));

  Common vc;
  vc.method = "exact1";
  vc.mu = {0.3};
  vc.t = 0.3;
  std::string oracle_name = "lp";
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::size_t lp_grid = 2001;
  std::size_t restarts = 8;
  auto* verify = app.add_subcommand(
      "verify", "Compare a bound with an oracle (defaults: exact1, mu 0.3, t 0.3)");
  add_common(verify, vc, true);
  verify->add_option("--oracle", oracle_name, "lp, product or mc")
      ->check(CLI::IsMember({"lp", "product", "mc"}));
  verify->add_option("--samples", samples, "Monte Carlo samples");
  verify->add_option("--seed", seed, "Seed for the product search and Monte Carlo");
  verify->add_option("--lp-grid", lp_grid, "Grid points for the LP oracle");
  verify->add_option("--restarts", restarts, "Product search restarts");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (bound->parsed()) {
    return guarded(err, [&] {
      const BoundResult r = compute(bc);
      out << r.method << ',' << format_double(r.value) << ',' << format_double(r.clamped())
          << ',' << r.diagnostics.status << '\n';
      for (const auto& w : r.diagnostics.warnings) err << "warning: " << w << '\n';
      return kExitOk;
    });
  }

  if (compare->parsed()) {
    WallClock clock{err, !no_manifest};
    return guarded(err, [&] {
      const auto grid = parse_grid(tgrid);
      std::ofstream file;
      std::ostream* os = &out;
      if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw InvalidArgument("cannot open " + out_path);
        os = &file;
      }
      *os << "t,method,value,status\n";
      if (grid.empty()) {
        err << "error: empty t grid\n";
        return kExitInvalid;
      }
      const std::size_t M = methods.size();
      std::vector<std::string> rows(grid.size() * M);
      std::vector<char> ok(grid.size() * M, 0);
      // Threads go to the t axis; inner solvers run single-threaded.
      detail::parallel_for(
          grid.size(),
          [&](std::size_t i) {
            for (std::size_t k = 0; k < M; ++k) {
              Common c = cc;
              c.method = methods[k];
              c.t = grid[i];
              c.threads = 1;
              std::string value = "nan", status;
              try {
                const BoundResult r = compute(c);
                value = format_double(r.value);
                status = r.diagnostics.status;
                ok[i * M + k] = 1;
              } catch (const std::exception& e) {
                status = status_of(e);
              }
              rows[i * M + k] = format_double(grid[i]) + ',' + methods[k] + ',' + value + ',' +
                                status + '\n';
            }
          },
          cc.threads);
      for (const auto& r : rows) *os << r;
      if (!no_manifest) write_manifest(*os, "compare", args);
      os->flush();
      bool any_full = false;
      for (std::size_t k = 0; k < M && !any_full; ++k) {
        bool all = true;
        for (std::size_t i = 0; i < grid.size(); ++i) all = all && ok[i * M + k];
        any_full = all;
      }
      return any_full ? kExitOk : kExitSolver;
    });
  }

  if (extremal->parsed()) {
    return guarded(err, [&] {
      const UnitProblem u = to_unit(ec);
      const auto kind = extremal::parse_bound_kind(ec.method);
      extremal::AttainmentParams p{u.mu, u.t, std::nullopt};
      ProductDistribution dist;
      json j;
      j["method"] = ec.method;
      if (kind == extremal::BoundKind::exact1) {
        if (u.mu.size() != 1) throw InvalidArgument("exact1 is univariate (n = 1)");
        const auto d = extremal::extremal_exact_univariate(u.mu[0], u.t);
        dist.factors.push_back(d);
        j["atoms"] = parse_json(extremal::to_json(d))["atoms"];
      } else {
        dist = extremal::extremal_product(MomentSpec::from_means(u.mu));
        j["distribution"] = parse_json(extremal::to_json(dist));
      }
      j["attainment"] = parse_json(extremal::attainment_report(dist, kind, p).to_json());
      out << j.dump() << '\n';
      return kExitOk;
    });
  }

  if (verify->parsed()) {
    return guarded(err, [&] {
      json j;
      const BoundResult b = compute(vc);
      j["bound"] = bound_json(b);
      j["oracle"] = oracle_name;
      if (oracle_name == "lp") {
        const MomentSpec s = build_spec(vc);
        if (s.n() != 1) throw InvalidArgument("the LP oracle is univariate (n = 1)");
        const BoundResult o = oracle::lp_tail_oracle(s, vc.t, lp_grid);
        j["oracle_value"] = o.value;
        j["grid_points"] = lp_grid;
        j["gap"] = b.value - o.value;
        j["consistent"] = o.value <= b.value + 2.0 / double(lp_grid - 1) + 1e-9;
      } else if (oracle_name == "product") {
        const MomentSpec s = build_spec(vc);
        oracle::ProductSearchOptions opt;
        opt.seed = seed;
        opt.restarts = restarts;
        opt.threads = vc.threads;
        const auto o = oracle::product_search_oracle(s, vc.t, opt);
        j["oracle_value"] = o.result.value;
        j["seed"] = seed;
        j["gap"] = b.value - o.result.value;
        j["consistent"] = o.result.value <= b.value + 1e-6;
        j["witness"] = parse_json(extremal::to_json(o.witness));
      } else {
        // Monte Carlo of the relaxed objective under the extremal distribution.
        const UnitProblem u = to_unit(vc);
        const auto kind = extremal::parse_bound_kind(vc.method);
        ProductDistribution dist;
        oracle::Functional f;
        double thr = double(u.mu.size()) * u.t;
        for (double m : u.mu) thr += m;
        if (kind == extremal::BoundKind::exact1) {
          if (u.mu.size() != 1) throw InvalidArgument("exact1 is univariate (n = 1)");
          dist.factors.push_back(extremal::extremal_exact_univariate(u.mu[0], u.t));
          f = oracle::IndicatorTail{thr};
        } else if (kind == extremal::BoundKind::variational) {
          dist = extremal::extremal_product(MomentSpec::from_means(u.mu));
          const auto w =
              variational::solve_variational(MomentSpec::from_means(u.mu), u.t).second;
          f = oracle::ProductAffine{w.alpha, w.beta};
        } else {
          dist = extremal::extremal_product(MomentSpec::from_means(u.mu));
          const BoundResult cg = closed_form::chernoff_general(u.mu, u.t);
          const double lam = cg.diagnostics.get("lambda_star").value_or(kInf);
          if (!std::isfinite(lam)) throw DomainError("chernoff optimum is at lambda = inf");
          f = oracle::Mgf{lam, thr};
        }
        const auto mc = oracle::monte_carlo_expectation(dist, f, samples, seed, vc.threads);
        const double exact = oracle::exact_expectation(dist, f);
        j["oracle_value"] = mc.estimate;
        j["std_error"] = mc.std_error;
        j["samples"] = mc.samples;
        j["seed"] = seed;
        j["exact_expectation"] = exact;
        j["gap"] = b.value - mc.estimate;
        j["consistent"] = std::abs(mc.estimate - b.value) <= 4.0 * mc.std_error + 1e-12;
      }
      out << j.dump() << '\n';
      return kExitOk;
    });
  }
  return kExitInvalid;
}

}  // namespace concbound::cli
