// Command-line front end: reads channels / joints / Gaussian specs from JSON,
// dispatches to the library, and emits JSON or CSV. All numeric output is in
// nats unless --units bits is given; every run is deterministic in the seed.
//
// Exit codes: 0 success, 2 parse error, 3 solver did not reach the requested
// gap (partial sandwich still written), 4 infinite result where a finite one
// was requested ("inf" written).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "umlaut/exponents.hpp"
#include "umlaut/gaussian.hpp"
#include "umlaut/io.hpp"
#include "umlaut/ns_coding.hpp"
#include "umlaut/stein.hpp"
#include "umlaut/umlaut_channel.hpp"
#include "umlaut/umlaut_dist.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitInfinite = 4;

struct Options {
  std::string input;
  std::string output;
  double tol = 1e-8;
  std::string units = "nats";
  std::uint64_t seed = umlaut::kDefaultSeed;
  int m = 2;
  int list_size = 1;
  double alpha = 0.5;
  double alpha_lo = 0.999;
  double alpha_hi = 1.001;
  int n_max = 4;
  double eps = 0.2;
  double r = 0.0;
  double q = 0.1;
};

double to_units(double nats, const Options& opt) {
  return opt.units == "bits" ? nats / std::log(2.0) : nats;
}

void emit(const Options& opt, const std::string& payload) {
  if (opt.output.empty()) {
    std::cout << payload << "\n";
  } else {
    std::ofstream out(opt.output, std::ios::binary);
    out << payload << "\n";
  }
}

nlohmann::json load_input(const Options& opt) {
  if (opt.input.empty()) throw umlaut::ProbError("missing --input");
  std::ifstream in(opt.input);
  if (!in) throw umlaut::ProbError("cannot open input file: " + opt.input);
  return nlohmann::json::parse(in);
}

std::string certified_json(const umlaut::CertifiedValue& r, const Options& opt) {
  using umlaut::io::fmt17;
  std::string s = "{";
  s += "\"value\":" + fmt17(to_units(r.value, opt));
  s += ",\"lower\":" + fmt17(to_units(r.lower, opt));
  s += ",\"upper\":" + fmt17(to_units(r.upper, opt));
  s += ",\"gap\":" + fmt17(to_units(r.gap, opt));
  s += ",\"argmax_p\":" + umlaut::io::json_array(r.argmax_p.weights());
  s += ",\"argmin_q\":" + umlaut::io::json_array(r.argmin_q.weights());
  s += ",\"units\":\"" + opt.units + "\"";
  s += ",\"status\":\"";
  switch (r.status) {
    case umlaut::SolveStatus::kOptimal: s += "optimal"; break;
    case umlaut::SolveStatus::kInfinite: s += "infinite"; break;
    case umlaut::SolveStatus::kNoConvergence: s += "no-convergence"; break;
  }
  s += "\"}";
  return s;
}

int finish_certified(const umlaut::CertifiedValue& r, const Options& opt) {
  emit(opt, certified_json(r, opt));
  if (r.status == umlaut::SolveStatus::kInfinite) return kExitInfinite;
  if (r.status == umlaut::SolveStatus::kNoConvergence) return kExitNoConvergence;
  return 0;
}

int run_dist_umlaut(const Options& opt) {
  umlaut::JointDist j = umlaut::io::parse_joint(load_input(opt));
  umlaut::UmlautResult u = umlaut::umlaut_info(j);
  auto [lautum, mutual] = umlaut::lautum_mutual(j);
  using umlaut::io::fmt17;
  std::string s = "{";
  s += "\"value\":" + fmt17(to_units(u.value.as_double(), opt));
  s += ",\"marginal\":" + umlaut::io::json_array(u.marginal.weights());
  s += ",\"normalizer\":" + fmt17(u.normalizer);
  s += ",\"lautum\":" + fmt17(to_units(lautum.as_double(), opt));
  s += ",\"mutual\":" + fmt17(to_units(mutual, opt));
  s += ",\"units\":\"" + opt.units + "\"}";
  emit(opt, s);
  return u.value.is_infinite() ? kExitInfinite : 0;
}

int run_renyi(const Options& opt) {
  nlohmann::json in = load_input(opt);
  using umlaut::io::fmt17;
  if (in.contains("matrix")) {
    umlaut::Channel w = umlaut::io::parse_channel(in);
    return finish_certified(umlaut::channel_renyi_umlaut(opt.alpha, w, opt.tol, opt.seed),
                            opt);
  }
  umlaut::JointDist j = umlaut::io::parse_joint(in);
  umlaut::RenyiUmlautResult r = umlaut::renyi_umlaut_info(opt.alpha, j);
  std::string s = "{";
  s += "\"alpha\":" + fmt17(opt.alpha);
  s += ",\"value\":" + fmt17(to_units(r.value.as_double(), opt));
  s += ",\"marginal\":" + umlaut::io::json_array(r.marginal.weights());
  s += ",\"ystar\":[";
  for (std::size_t y = 0; y < r.ystar.size(); ++y) {
    if (y) s += ",";
    s += r.ystar[y] ? "true" : "false";
  }
  s += "],\"units\":\"" + opt.units + "\"}";
  emit(opt, s);
  return r.value.is_infinite() ? kExitInfinite : 0;
}

int run_sphere_packing(const Options& opt) {
  umlaut::Channel w = umlaut::io::parse_channel(load_input(opt));
  double e = umlaut::sphere_packing(opt.r, w, opt.tol, opt.seed);
  using umlaut::io::fmt17;
  emit(opt, "{\"r\":" + fmt17(opt.r) + ",\"value\":" + fmt17(to_units(e, opt)) +
               ",\"units\":\"" + opt.units + "\"}");
  return std::isinf(e) ? kExitInfinite : 0;
}

int run_ns_error(const Options& opt) {
  umlaut::Channel w = umlaut::io::parse_channel(load_input(opt));
  umlaut::NsLpResult r = umlaut::ns_error_lp(opt.m, w);
  using umlaut::io::fmt17;
  std::string s = "{";
  s += "\"M\":" + std::to_string(opt.m);
  s += ",\"eps_ns\":" + fmt17(r.eps_ns);
  s += ",\"exponent\":" + fmt17(to_units(-std::log(r.eps_ns), opt));
  s += ",\"p\":" + umlaut::io::json_array(r.p.weights());
  s += ",\"R\":" + umlaut::io::json_matrix(r.r);
  s += ",\"lp_status\":\"" + std::string(r.optimal ? "optimal" : "infeasible-guard") + "\"";
  s += ",\"units\":\"" + opt.units + "\"}";
  emit(opt, s);
  return 0;
}

int run_ns_sandwich(const Options& opt) {
  umlaut::Channel w = umlaut::io::parse_channel(load_input(opt));
  auto [lo, hi] =
      umlaut::ns_sandwich(opt.m, opt.n_max, w, opt.alpha_lo, opt.alpha_hi, opt.tol, opt.seed);
  using umlaut::io::fmt17;
  emit(opt, "{\"M\":" + std::to_string(opt.m) + ",\"n\":" + std::to_string(opt.n_max) +
               ",\"lower\":" + fmt17(to_units(lo, opt)) +
               ",\"upper\":" + fmt17(to_units(hi, opt)) + ",\"units\":\"" + opt.units +
               "\"}");
  return std::isinf(hi) ? kExitInfinite : 0;
}

int run_gaussian(const Options& opt) {
  nlohmann::json in = load_input(opt);
  using umlaut::io::fmt17;
  if (in.contains("H")) {
    umlaut::GaussianChannelSpec spec = umlaut::io::parse_gaussian_channel(in);
    double v = umlaut::gaussian_channel_umlaut(spec);
    emit(opt, "{\"value\":" + fmt17(to_units(v, opt)) + ",\"units\":\"" + opt.units + "\"}");
    return 0;
  }
  umlaut::GaussianJoint j = umlaut::io::parse_gaussian_joint(in);
  umlaut::GaussianUmlautResult r = umlaut::gaussian_umlaut(j);
  std::vector<double> mean(r.mean_y.data(), r.mean_y.data() + r.mean_y.size());
  std::vector<std::vector<double>> cov(r.cov_y.rows(), std::vector<double>(r.cov_y.cols()));
  for (int i = 0; i < r.cov_y.rows(); ++i)
    for (int k = 0; k < r.cov_y.cols(); ++k) cov[i][k] = r.cov_y(i, k);
  std::string s = "{";
  s += "\"value\":" + fmt17(to_units(r.value, opt));
  s += ",\"mean_y\":" + umlaut::io::json_array(mean);
  s += ",\"cov_y\":" + umlaut::io::json_matrix(cov);
  s += ",\"units\":\"" + opt.units + "\"}";
  emit(opt, s);
  return 0;
}

int run_stein(const Options& opt) {
  umlaut::JointDist j = umlaut::io::parse_joint(load_input(opt));
  umlaut::SteinReport rep = umlaut::stein_sandwich(j, opt.n_max, opt.eps, opt.alpha);
  std::ostringstream csv;
  csv << "n,lower,upper,target\n";
  for (int n = 1; n <= rep.n_max; ++n) {
    csv << n << "," << umlaut::io::fmt17(to_units(rep.lower[n - 1], opt)) << ","
        << umlaut::io::fmt17(to_units(rep.upper[n - 1], opt)) << ","
        << umlaut::io::fmt17(to_units(rep.target, opt)) << "\n";
  }
  std::string s = csv.str();
  s.pop_back();  // emit() appends the trailing newline
  emit(opt, s);
  return 0;
}

int run_figure_lu_sweep(const Options& opt) {
  // q, U(W_q), L(W_q), Linf(W_q) for the crossover grid 0.05 .. 0.45;
  // U is solved numerically, the lautum columns are the closed forms.
  std::ostringstream csv;
  csv << "q,umlaut,lautum,lautum_regularized\n";
  for (int k = 1; k <= 9; ++k) {
    double q = 0.05 * k;
    umlaut::CertifiedValue u = umlaut::channel_umlaut(umlaut::make_bsc(q), opt.tol, opt.seed);
    double lautum = 0.5 * std::log(1.0 / (4.0 * q * (1.0 - q)));
    double linf = (0.5 - q) * std::log((1.0 - q) / q);
    csv << umlaut::io::fmt17(q) << "," << umlaut::io::fmt17(to_units(u.value, opt)) << ","
        << umlaut::io::fmt17(to_units(lautum, opt)) << ","
        << umlaut::io::fmt17(to_units(linf, opt)) << "\n";
  }
  std::string s = csv.str();
  s.pop_back();
  emit(opt, s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"umlaut information toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--input", opt.input, "input JSON file");
    cmd->add_option("--output", opt.output, "output file (stdout when omitted)");
    cmd->add_option("--tol", opt.tol, "solver tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--units", opt.units, "nats|bits")
        ->check(CLI::IsMember({"nats", "bits"}));
    cmd->add_option("--seed", opt.seed, "solver seed");
    return cmd;
  };

  auto* dist_cmd = add_common(app.add_subcommand("dist-umlaut", "umlaut information of a joint"));
  auto* chan_cmd = add_common(app.add_subcommand("channel-umlaut", "channel umlaut information"));
  auto* renyi_cmd = add_common(app.add_subcommand("renyi", "Renyi umlaut information"));
  renyi_cmd->add_option("--alpha", opt.alpha, "Renyi order");
  auto* sp_cmd = add_common(app.add_subcommand("sphere-packing", "sphere-packing exponent"));
  sp_cmd->add_option("--r", opt.r, "rate")->check(CLI::NonNegativeNumber);
  auto* un_cmd =
      add_common(app.add_subcommand("exponent-unassisted", "unassisted zero-rate exponent"));
  auto* list_cmd =
      add_common(app.add_subcommand("exponent-list", "list-decoding zero-rate exponent"));
  list_cmd->add_option("--L", opt.list_size, "list size")->check(CLI::PositiveNumber);
  auto* ns_cmd = add_common(app.add_subcommand("ns-error", "non-signalling one-shot error"));
  ns_cmd->add_option("--M", opt.m, "message count")->check(CLI::PositiveNumber);
  auto* nssw_cmd =
      add_common(app.add_subcommand("ns-sandwich", "single-letter bounds on the NS exponent"));
  nssw_cmd->add_option("--M", opt.m, "message count");
  nssw_cmd->add_option("--n-max", opt.n_max, "blocklength");
  nssw_cmd->add_option("--alpha-lo", opt.alpha_lo, "Renyi order below 1");
  nssw_cmd->add_option("--alpha-hi", opt.alpha_hi, "Renyi order above 1");
  auto* dnn_cmd = add_common(app.add_subcommand("dnn-bound", "doubly-nonnegative bound"));
  auto* gauss_cmd = add_common(app.add_subcommand("gaussian", "Gaussian closed forms"));
  auto* stein_cmd = add_common(app.add_subcommand("stein-sim", "finite-n Stein sandwich"));
  stein_cmd->add_option("--n-max", opt.n_max, "largest blocklength");
  stein_cmd->add_option("--eps", opt.eps, "type-I error budget");
  stein_cmd->add_option("--alpha", opt.alpha, "Renyi order for the lower bound");
  auto* sweep_cmd =
      add_common(app.add_subcommand("figure-lu-sweep", "BSC umlaut/lautum comparison CSV"));

  CLI11_PARSE(app, argc, argv);

  try {
    if (dist_cmd->parsed()) return run_dist_umlaut(opt);
    if (chan_cmd->parsed()) {
      umlaut::Channel w = umlaut::io::parse_channel(load_input(opt));
      return finish_certified(umlaut::channel_umlaut(w, opt.tol, opt.seed), opt);
    }
    if (renyi_cmd->parsed()) return run_renyi(opt);
    if (sp_cmd->parsed()) return run_sphere_packing(opt);
    if (un_cmd->parsed()) {
      umlaut::Channel w = umlaut::io::parse_channel(load_input(opt));
      return finish_certified(umlaut::unassisted_zero_rate(w, opt.tol, opt.seed), opt);
    }
    if (list_cmd->parsed()) {
      umlaut::Channel w = umlaut::io::parse_channel(load_input(opt));
      return finish_certified(umlaut::list_zero_rate(opt.list_size, w, opt.tol, opt.seed),
                              opt);
    }
    if (ns_cmd->parsed()) return run_ns_error(opt);
    if (nssw_cmd->parsed()) return run_ns_sandwich(opt);
    if (dnn_cmd->parsed()) {
      umlaut::Channel w = umlaut::io::parse_channel(load_input(opt));
      double v = umlaut::dnn_bound(w, opt.tol);
      emit(opt, "{\"value\":" + umlaut::io::fmt17(to_units(v, opt)) + ",\"units\":\"" +
                    opt.units + "\"}");
      return std::isinf(v) ? kExitInfinite : 0;
    }
    if (gauss_cmd->parsed()) return run_gaussian(opt);
    if (stein_cmd->parsed()) return run_stein(opt);
    if (sweep_cmd->parsed()) return run_figure_lu_sweep(opt);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const umlaut::NoConvergence& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const umlaut::ProbError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitParse;
  }
  return 0;
}
