#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crdist/ensemble_io.hpp"
#include "crdist/error.hpp"
#include "crdist/info.hpp"
#include "crdist/measurement.hpp"
#include "crdist/tradeoff.hpp"
#include "crdist/typicality.hpp"

namespace crdist::cli {

namespace {

using json = nlohmann::json;

struct RunConfig {
  std::uint64_t seed = 42;
  int starts = 32;
  std::string grid = "0:1:33";
  double tol = 1e-9;
  int threads = 1;
  std::string out;
  std::string witness_out;
  std::string plot;
};

SolverConfig solver_config(const RunConfig& rc) {
  SolverConfig c;
  c.seed = rc.seed;
  c.starts = rc.starts;
  c.rel_tol = rc.tol;
  c.threads = rc.threads;
  return c;
}

MeasureConfig measure_config(const RunConfig& rc) {
  MeasureConfig c;
  c.seed = rc.seed;
  c.threads = rc.threads;
  return c;
}

RGrid parse_grid(const std::string& s) {
  RGrid g;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.min, &g.max, &g.count, &tail) != 3)
    throw Error(ErrorCode::BadParam, "grid must be min:max:count, got '" + s + "'");
  if (g.count < 1 || !(g.max >= g.min) || g.min < 0.0) throw Error(ErrorCode::BadParam, "invalid grid '" + s + "'");
  return g;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadParam, "not a number list: '" + s + "'");
    }
  }
  return v;
}

// A file path, or a named ensemble with optional parameters: bb84:0.3927.
CQEnsemble load_ensemble(const std::string& arg, std::ostream& err) {
  if (std::filesystem::exists(arg)) return read_ensemble(arg);
  const auto colon = arg.find(':');
  const std::string name = arg.substr(0, colon);
  const std::vector<double> params = colon == std::string::npos ? std::vector<double>{} : parse_list(arg.substr(colon + 1));
  std::vector<std::string> warnings;
  CQEnsemble e = named_ensemble(name, params, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  return e;
}

// A file path, bell, product, psi:theta, or a named ensemble (classical
// label on Alice's side).
BipartiteFile load_state(const std::string& arg, std::ostream& err) {
  if (std::filesystem::exists(arg)) return read_state_or_ensemble(arg);
  CVector k = CVector::Zero(4);
  if (arg == "bell") {
    k[0] = k[3] = 1.0 / std::sqrt(2.0);
    return {BipartiteState::from_ket(2, 2, k), std::nullopt};
  }
  if (arg == "product") {
    k[0] = 1.0;
    return {BipartiteState::from_ket(2, 2, k), std::nullopt};
  }
  if (arg.rfind("psi:", 0) == 0) {
    const auto t = parse_list(arg.substr(4));
    if (t.size() != 1) throw Error(ErrorCode::BadParam, "psi takes one angle");
    k[0] = std::cos(t[0]);
    k[3] = std::sin(t[0]);
    return {BipartiteState::from_ket(2, 2, k), std::nullopt};
  }
  return {ehs_bipartite(load_ensemble(arg, err)), std::nullopt};
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

// Rows are printed with nine decimals. C is formed from the printed R and
// D so that every row satisfies C = R + D to within parsing round-off.
std::string csv_row(double r, double d) {
  const std::string rs = num(r), ds = num(d);
  return rs + "," + num(std::stod(rs) + std::stod(ds)) + "," + ds + "\n";
}

std::string csv_header(const std::string& what, const RunConfig& rc) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# crdist %s seed=%llu starts=%d grid=%s tol=%g\n", what.c_str(),
                static_cast<unsigned long long>(rc.seed), rc.starts, rc.grid.c_str(), rc.tol);
  return std::string(buf) + "R,C,D\n";
}

std::string curve_csv(const std::string& what, const RunConfig& rc, const TradeoffCurve& c) {
  std::string s = csv_header(what, rc);
  for (const auto& p : c.points) s += csv_row(p.comm_rate, p.distilled);
  s += "# flags: ";
  if (c.flags.empty()) s += "none";
  for (std::size_t i = 0; i < c.flags.size(); ++i) s += (i ? ";" : "") + c.flags[i];
  s += "\n";
  return s;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
  f << text;
}

std::string plot_script(const std::string& csv_path, const std::string& title) {
  return "set datafile separator ','\n"
         "set key off\n"
         "set xlabel 'R (bits)'\n"
         "set ylabel 'D (bits)'\n"
         "set title '" + title + "'\n"
         "plot '" + csv_path + "' using 1:3 every ::1 with linespoints\n";
}

int report(const json& j, bool passed, std::ostream& out) {
  out << j.dump(2) << "\n";
  return passed ? kOk : kCheckFailed;
}

int cmd_info(const std::string& arg, std::ostream& out, std::ostream& err) {
  const CQEnsemble e = load_ensemble(arg, err);
  const SwPoint sw = sw_point(e);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "ensemble   %s\nsymbols    %zu\ndim        %d\nH(X)       %.6f\nH(Q)       %.6f\nchi        %.6f\n"
                "H(X|Q)     %.6f\nSW point   C=%.6f R=%.6f D=%.6f\n",
                e.label().empty() ? arg.c_str() : e.label().c_str(), e.size(), e.dim(), shannon_entropy(e.probs()),
                vn_entropy_of(e.average_state()), holevo_chi(e), cond_entropy_x_given_q(e), sw.cr_rate, sw.comm_rate,
                sw.distilled);
  out << buf;
  return kOk;
}

int cmd_curve(const std::string& arg, const std::string& closed_form, const RunConfig& rc, std::ostream& out,
              std::ostream& err) {
  if (!closed_form.empty()) {
    if (closed_form != "uniform") throw Error(ErrorCode::UnknownName, "closed form '" + closed_form + "'");
    // The grid is read as a lambda range, spaced geometrically.
    RGrid g = parse_grid(rc.grid == "0:1:33" ? "0.05:40:33" : rc.grid);
    if (!(g.min > 0.0)) throw Error(ErrorCode::DomainError, "lambda must be positive");
    std::vector<double> lams;
    for (int i = 0; i < g.count; ++i)
      lams.push_back(g.count == 1 ? g.min : g.min * std::pow(g.max / g.min, static_cast<double>(i) / (g.count - 1)));
    std::string s = csv_header("curve closed-form=uniform", rc);
    for (const auto& p : uniform_curve_closed_form(lams)) s += csv_row(p.rate, p.gain);
    s += "# flags: none\n";
    write_text(rc.out, s, out);
    return kOk;
  }
  if (arg.empty()) throw Error(ErrorCode::BadParam, "curve needs an ensemble or --closed-form");
  const CQEnsemble e = load_ensemble(arg, err);
  const TradeoffCurve c = trace_curve(e, parse_grid(rc.grid), solver_config(rc));
  write_text(rc.out, curve_csv("curve ensemble=" + arg, rc, c), out);
  for (const auto& f : c.flags) err << "warning: " << f << "\n";
  if (!rc.witness_out.empty()) {
    std::vector<double> rates;
    std::vector<AuxChannel> channels;
    for (const auto& p : c.points) {
      rates.push_back(p.comm_rate);
      channels.push_back(p.channel);
    }
    write_text(rc.witness_out, format_channels(rates, channels), out);
  }
  if (!rc.plot.empty()) {
    if (rc.out.empty()) throw Error(ErrorCode::BadParam, "--plot needs --out for the CSV it plots");
    write_text(rc.plot, plot_script(rc.out, "D(R) " + arg), out);
  }
  return kOk;
}

int cmd_check(const std::string& kind, const std::vector<std::string>& args, const RunConfig& rc, double threshold,
              double rate, const std::string& xs, int dim, int trials, const std::string& ns, double delta,
              const std::string& channel, std::ostream& out, std::ostream& err) {
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw Error(ErrorCode::BadParam, "check " + kind + " takes " + std::to_string(n) + " input(s)");
  };
  const SolverConfig scfg = solver_config(rc);
  json j;
  j["check"] = kind;
  if (kind == "duality") {
    need(1);
    const CQEnsemble e = load_ensemble(args[0], err);
    std::vector<double> x = xs.empty() ? std::vector<double>{} : parse_list(xs);
    if (x.empty()) {
      const double top = cond_entropy_x_given_q(e);
      for (int k = 0; k < 5; ++k) x.push_back(top * k / 5.0);
    }
    const DualityReport r = check_duality(e, x, scfg);
    const double tol = threshold > 0 ? threshold : 1e-3;
    j["h_q"] = r.h_q;
    j["x"] = r.xs;
    j["dstar"] = r.dstar;
    j["qstar"] = r.qstar;
    j["residual"] = r.residual;
    j["max_residual"] = r.max_residual;
    j["threshold"] = tol;
    j["passed"] = r.max_residual <= tol;
    return report(j, r.max_residual <= tol, out);
  }
  if (kind == "additivity") {
    need(2);
    const AdditivityReport r = check_additivity(load_ensemble(args[0], err), load_ensemble(args[1], err), rate, scfg);
    const double tol = threshold > 0 ? threshold : 5e-3;
    const bool ok = std::abs(r.gap) <= tol;
    j.update({{"rate", r.rate}, {"joint", r.joint}, {"split", r.split}, {"best_r1", r.best_r1}, {"gap", r.gap},
              {"threshold", tol}, {"passed", ok}});
    return report(j, ok, out);
  }
  if (kind == "separable" || kind == "pure") {
    need(2);
    const BipartiteFile rho = load_state(args[0], err);
    const BipartiteState sigma = load_state(args[1], err).state;
    const MeasureConfig mcfg = measure_config(rc);
    AdditivityCheck r;
    if (kind == "separable") {
      if (!rho.separable)
        throw Error(ErrorCode::BadParam, "separable check needs a file with a \"separable\" decomposition");
      r = check_separable_additivity(*rho.separable, sigma, mcfg);
    } else {
      r = check_pure_additivity(rho.state, sigma, mcfg);
    }
    const double tol = threshold > 0 ? threshold : 5e-3;
    bool ok = std::abs(r.gap) <= tol;
    j.update({{"first", r.first}, {"second", r.second}, {"joint", r.joint}, {"product_witness", r.product_witness},
              {"gap", r.gap}, {"threshold", tol}});
    if (kind == "pure") {
      j["entanglement"] = r.entanglement;
      ok = ok && std::abs(r.first - r.entanglement) <= tol;
    }
    j["passed"] = ok;
    return report(j, ok, out);
  }
  if (kind == "lemma3") {
    need(0);
    std::mt19937_64 rng(rc.seed);
    const EntropyBoundReport r = entropy_bound_check(dim, trials, rng);
    j.update({{"dim", dim}, {"trials", r.trials}, {"violations", r.violations}, {"max_violation", r.max_violation},
              {"passed", r.violations == 0}});
    return report(j, r.violations == 0, out);
  }
  if (kind == "typicality") {
    need(1);
    const CQEnsemble e = load_ensemble(args[0], err);
    const AuxChannel w = channel.empty() ? AuxChannel::identity(static_cast<int>(e.size())) : parse_channel(slurp(channel));
    std::vector<int> n_list;
    for (double v : parse_list(ns)) n_list.push_back(static_cast<int>(v));
    std::mt19937_64 rng(rc.seed);
    const TraceBoundReport r = verify_trace_bounds(e, w, n_list, delta, trials, rng);
    if (!rc.out.empty()) write_text(rc.out, r.csv(), out);
    const bool ok = r.mass_nondecreasing && r.c_fit <= r.c_bound;
    j.update({{"c_fit", r.c_fit}, {"c_fit_cond", r.c_fit_cond}, {"c_bound", r.c_bound},
              {"mass_nondecreasing", r.mass_nondecreasing}, {"passed", ok}});
    json rows = json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"n", row.n}, {"delta", row.delta}, {"quantity", row.quantity}, {"value", row.value},
                      {"ci_low", row.ci_low}, {"ci_high", row.ci_high}});
    j["rows"] = rows;
    return report(j, ok, out);
  }
  throw Error(ErrorCode::UnknownName, "check kind '" + kind + "'");
}

int cmd_measure(const std::string& kind, const std::string& arg, const RunConfig& rc, std::ostream& out,
                std::ostream& err) {
  const MeasureConfig mcfg = measure_config(rc);
  json j;
  j["measure"] = kind;
  if (kind == "accinfo" || kind == "d1inf") {
    MeasurementReport r;
    if (kind == "accinfo") {
      const CQEnsemble e = load_ensemble(arg, err);
      r = accessible_info(e, mcfg);
      j["chi"] = holevo_chi(e);
    } else {
      r = d1_infty(load_state(arg, err).state, mcfg);
    }
    j.update({{"value", r.value}, {"n_outcomes", r.n_outcomes}, {"converged", r.converged}});
    if (!rc.witness_out.empty()) write_text(rc.witness_out, format_povm(r.povm), out);
    out << j.dump(2) << "\n";
    if (!r.converged) err << "warning: optimizer did not converge\n";
    return kOk;
  }
  if (kind == "c1curve") {
    const BipartiteState rho = load_state(arg, err).state;
    const C1Report r = c1_curve(rho, parse_grid(rc.grid), mcfg, solver_config(rc));
    std::string s = curve_csv("c1curve state=" + arg, rc, r.hull);
    s += "# raw:";
    for (const auto& p : r.raw.points) s += " " + num(p.distilled);
    s += "\n";
    write_text(rc.out, s, out);
    if (!rc.witness_out.empty()) {
      std::string w;
      for (const auto& m : r.measurements) w += format_povm(m);
      write_text(rc.witness_out, w, out);
    }
    return kOk;
  }
  throw Error(ErrorCode::UnknownName, "measure kind '" + kind + "'");
}

int exit_for(ErrorCode c) {
  return c == ErrorCode::EnvelopeExceeded ? kEnvelope : kInputError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distillable common randomness of classical-quantum resources"};
  app.require_subcommand(1);
  RunConfig rc;
  app.add_option("--seed", rc.seed, "RNG seed")->capture_default_str();
  app.add_option("--starts", rc.starts, "random starts per optimization")->capture_default_str();
  app.add_option("--grid", rc.grid, "rate grid min:max:count")->capture_default_str();
  app.add_option("--tol", rc.tol, "relative stopping tolerance")->capture_default_str();
  app.add_option("--threads", rc.threads, "worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  app.add_option("--out", rc.out, "output file (default stdout)");
  app.add_option("--witness-out", rc.witness_out, "file for witness channels or POVMs");

  std::string target, closed_form;
  auto* info = app.add_subcommand("info", "scalar invariants of an ensemble")->fallthrough();
  info->add_option("ensemble", target, "ensemble file or name")->required();

  auto* curve = app.add_subcommand("curve", "trace D(R) and write R,C,D rows")->fallthrough();
  curve->add_option("ensemble", target, "ensemble file or name");
  curve->add_option("--closed-form", closed_form, "emit an exact curve instead (uniform)");
  curve->add_option("--plot", rc.plot, "write a gnuplot script for the CSV");

  std::string kind;
  std::vector<std::string> inputs;
  double threshold = 0.0, rate = 0.0, delta = 0.15;
  std::string xs, ns = "8,12,16", channel;
  int dim = 8, trials = 1000;
  auto* check = app.add_subcommand("check", "numerical checks; exit 1 when one fails")->fallthrough();
  check->add_option("kind", kind, "duality | additivity | separable | pure | lemma3 | typicality")
      ->required()
      ->check(CLI::IsMember({"duality", "additivity", "separable", "pure", "lemma3", "typicality"}));
  check->add_option("inputs", inputs, "ensembles or states");
  check->add_option("--threshold", threshold, "pass threshold (default per check)");
  check->add_option("--rate", rate, "communication rate for additivity")->capture_default_str();
  check->add_option("--x", xs, "comma-separated x points for duality");
  check->add_option("--dim", dim, "dimension for lemma3")->capture_default_str();
  check->add_option("--trials", trials, "random trials")->capture_default_str();
  check->add_option("--n", ns, "blocklengths for typicality")->capture_default_str();
  check->add_option("--delta", delta, "typicality delta")->capture_default_str();
  check->add_option("--channel", channel, "channel file for typicality (default identity)");

  auto* measure = app.add_subcommand("measure", "optimize measurements")->fallthrough();
  measure->add_option("kind", kind, "accinfo | d1inf | c1curve")
      ->required()
      ->check(CLI::IsMember({"accinfo", "d1inf", "c1curve"}));
  measure->add_option("state", target, "state or ensemble file, or name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (info->parsed()) return cmd_info(target, out, err);
    if (curve->parsed()) return cmd_curve(target, closed_form, rc, out, err);
    if (check->parsed())
      return cmd_check(kind, inputs, rc, threshold, rate, xs, dim, trials, ns, delta, channel, out, err);
    if (measure->parsed()) return cmd_measure(kind, target, rc, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace crdist::cli
