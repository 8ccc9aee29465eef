#pragma once

// Command-line front end. Exit codes: 0 success or pass, 1 check failure or
// numerical error, 2 usage, parse or validation error.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fidkit/channels.hpp"
#include "fidkit/corollary.hpp"
#include "fidkit/error.hpp"
#include "fidkit/fidelity.hpp"
#include "fidkit/io.hpp"
#include "fidkit/states.hpp"
#include "fidkit/suite.hpp"

namespace fidkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct Globals {
  bool json = false;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  bool no_timing = false;

  double check_tol() const { return tol.value_or(1e-8); }
};

namespace detail {

using ojson = nlohmann::ordered_json;
using io::format_residual;
using io::format_value;

struct Output {
  const Globals& g;
  std::ostream& out;

  void emit(const ojson& j, const std::string& text) const {
    if (g.json) {
      out << j.dump(2) << "\n";
    } else {
      out << text;
    }
  }
};

inline std::string line(const std::string& key, const std::string& value) {
  return key + ": " + value + "\n";
}

inline std::string verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

inline int fidelity_cmd(const Output& o, const std::string& rho_path, const std::string& sigma_path) {
  const auto rho = io::as_density(io::parse_state_file(rho_path));
  const auto sigma = io::as_density(io::parse_state_file(sigma_path));
  const double f = fidelity(rho, sigma);
  o.emit({{"command", "fidelity"}, {"dim", rho.dim()}, {"fidelity", f}},
         line("fidelity", format_value(f)));
  return kExitOk;
}

struct PurifyArgs {
  std::string rho, sigma, out_psi, out_phi;
  std::size_t dim_env = 0;
  bool variational = false;
};

inline int purify_cmd(const Output& o, const PurifyArgs& a) {
  const auto rho = io::as_density(io::parse_state_file(a.rho));
  const auto sigma = io::as_density(io::parse_state_file(a.sigma));
  const std::size_t dim_e = a.dim_env == 0 ? rho.dim() : a.dim_env;
  const auto r = uhlmann_optimal_purifications(rho, sigma, dim_e);
  const double overlap = std::abs(inner(r.psi0.vector().amplitudes(), r.phi0.vector().amplitudes()));
  const double overlap_res = std::abs(overlap - r.fidelity);
  const double psi_res = (reduce(r.psi0).matrix() - rho.matrix()).frobenius_norm();
  const double phi_res = (reduce(r.phi0).matrix() - sigma.matrix()).frobenius_norm();
  const double tol = o.g.check_tol();
  const bool pass = overlap_res <= tol && psi_res <= tol && phi_res <= tol;
  if (!a.out_psi.empty()) io::serialize_state(io::StateValue{r.psi0.vector()}, a.out_psi);
  if (!a.out_phi.empty()) io::serialize_state(io::StateValue{r.phi0.vector()}, a.out_phi);

  ojson j{{"command", "purify"},
          {"dim_q", rho.dim()},
          {"dim_e", dim_e},
          {"fidelity", r.fidelity},
          {"overlap", overlap},
          {"residuals", {{"overlap", overlap_res}, {"psi_reduction", psi_res}, {"phi_reduction", phi_res}}}};
  std::string text = line("fidelity", format_value(r.fidelity)) + line("overlap", format_value(overlap)) +
                     line("dim_e", std::to_string(dim_e)) +
                     line("residuals", "overlap " + format_residual(overlap_res) + ", psi " +
                                           format_residual(psi_res) + ", phi " +
                                           format_residual(phi_res));
  if (a.variational) {
    const auto t = uhlmann_variational(rho, sigma, dim_e, VariationalOptions{}, o.g.seed);
    j["variational"] = {{"best_overlap", t.final},
                        {"iterations", t.iterations},
                        {"gap", r.fidelity - t.final}};
    text += line("variational", format_value(t.final) + " after " + std::to_string(t.iterations) +
                                    " iterations, gap " + format_residual(r.fidelity - t.final));
  }
  j["pass"] = pass;
  text += line("result", verdict(pass));
  o.emit(j, text);
  return pass ? kExitOk : kExitFail;
}

struct WitnessArgs {
  std::string rho, sigma, out_channel, out_psi, out_phi;
};

inline int witness_cmd(const Output& o, const WitnessArgs& a) {
  const auto rho = io::as_density(io::parse_state_file(a.rho));
  const auto sigma = io::as_density(io::parse_state_file(a.sigma));
  const auto w = construct_witness(rho, sigma);
  const auto rep = verify_witness(w, rho, sigma, o.g.check_tol());
  if (!a.out_channel.empty()) io::serialize_channel(w.channel, a.out_channel);
  if (!a.out_psi.empty()) io::serialize_state(io::StateValue{w.psi}, a.out_psi);
  if (!a.out_phi.empty()) io::serialize_state(io::StateValue{w.phi}, a.out_phi);

  const ojson j{{"command", "witness"},
                {"dim", rho.dim()},
                {"fidelity", w.fidelity_target},
                {"overlap", w.overlap},
                {"kraus_count", w.channel.size()},
                {"psi", io::pairs_json(w.psi.amplitudes())},
                {"phi", io::pairs_json(w.phi.amplitudes())},
                {"residuals",
                 {{"psi", rep.psi_residual}, {"phi", rep.phi_residual}, {"overlap", rep.overlap_residual}}},
                {"pass", rep.pass}};
  const std::string text =
      line("fidelity", format_value(w.fidelity_target)) + line("overlap", format_value(w.overlap)) +
      line("kraus operators", std::to_string(w.channel.size())) +
      line("residuals", "psi " + format_residual(rep.psi_residual) + ", phi " +
                            format_residual(rep.phi_residual) + ", overlap " +
                            format_residual(rep.overlap_residual)) +
      line("result", verdict(rep.pass));
  o.emit(j, text);
  return rep.pass ? kExitOk : kExitFail;
}

inline int dilate_cmd(const Output& o, const std::string& channel_path) {
  const auto ch = io::parse_channel_file(channel_path);
  const auto d = stinespring_dilate(ch);
  const double unitarity = unitarity_residual(d.unitary);
  const double roundtrip = (dilation_choi(d) - choi(ch)).frobenius_norm();
  const bool pass = unitarity <= std::min(o.g.check_tol(), 1e-9) && roundtrip <= o.g.check_tol();
  const ojson j{{"command", "dilate"},
                {"dim_q", d.dim_q},
                {"dim_e", d.dim_e},
                {"env_init_index", d.env_init_index},
                {"unitary", io::pairs_json(d.unitary.data())},
                {"residuals", {{"unitarity", unitarity}, {"choi_roundtrip", roundtrip}}},
                {"pass", pass}};
  const std::string text = line("dim_q", std::to_string(d.dim_q)) + line("dim_e", std::to_string(d.dim_e)) +
                           line("residuals", "unitarity " + format_residual(unitarity) +
                                                 ", choi roundtrip " + format_residual(roundtrip)) +
                           line("result", verdict(pass));
  o.emit(j, text);
  return pass ? kExitOk : kExitFail;
}

inline int check_bound_cmd(const Output& o, const std::string& channel_path,
                           const std::string& psi_path, const std::string& phi_path) {
  const auto ch = io::parse_channel_file(channel_path);
  const auto psi = io::as_pure(io::parse_state_file(psi_path), "--psi");
  const auto phi = io::as_pure(io::parse_state_file(phi_path), "--phi");
  const double residual = overlap_upper_bound_check(ch, psi, phi);
  const bool pass = residual >= -o.g.check_tol();
  const ojson j{{"command", "check-bound"},
                {"overlap", pure_overlap(psi, phi)},
                {"output_fidelity", fidelity(apply(ch, psi), apply(ch, phi))},
                {"residual", residual},
                {"pass", pass}};
  o.emit(j, line("residual", format_residual(residual)) + line("result", verdict(pass)));
  return pass ? kExitOk : kExitFail;
}

inline int check_monotonicity_cmd(const Output& o, const std::string& channel_path,
                                  const std::string& rho_path, const std::string& sigma_path) {
  const auto g = io::parse_channel_file(channel_path);
  const auto rho = io::as_density(io::parse_state_file(rho_path));
  const auto sigma = io::as_density(io::parse_state_file(sigma_path));
  const double tol = o.g.check_tol();
  const double direct = monotonicity_check(g, rho, sigma);
  const auto via = monotonicity_via_witness(g, rho, sigma, tol);
  const bool pass = direct >= -tol && via.pass;
  const ojson j{{"command", "check-monotonicity"},
                {"fidelity", fidelity(rho, sigma)},
                {"output_fidelity", fidelity(apply(g, rho), apply(g, sigma))},
                {"direct_residual", direct},
                {"via_witness",
                 {{"witness_pass", via.witness.pass},
                  {"composed_psi_residual", via.composed_psi_residual},
                  {"composed_phi_residual", via.composed_phi_residual},
                  {"bound_residual", via.bound_residual},
                  {"pass", via.pass}}},
                {"pass", pass}};
  const std::string text =
      line("direct residual", format_residual(direct)) +
      line("via witness", "composed psi " + format_residual(via.composed_psi_residual) +
                              ", composed phi " + format_residual(via.composed_phi_residual) +
                              ", bound " + format_residual(via.bound_residual) + ", " +
                              verdict(via.pass)) +
      line("result", verdict(pass));
  o.emit(j, text);
  return pass ? kExitOk : kExitFail;
}

inline int suite_cmd(const Output& o, suite::SuiteConfig config) {
  config.seed = o.g.seed;
  const auto report = suite::run_suites(config);
  const bool timing = !o.g.no_timing;
  o.emit(suite::to_json(report, timing), suite::to_text(report, timing));
  return report.pass() ? kExitOk : kExitFail;
}

inline void write_or_print(const Output& o, const std::string& text, const std::string& path) {
  if (path.empty()) {
    o.out << text;
  } else {
    io::detail::write_file(path, text);
  }
}

inline int random_state_cmd(const Output& o, std::size_t dim, std::size_t rank, bool pure,
                            const std::string& path) {
  if (pure) {
    write_or_print(o, io::serialize_state(random_pure(dim, o.g.seed)), path);
  } else {
    write_or_print(o, io::serialize_state(random_density(dim, rank == 0 ? dim : rank, o.g.seed)),
                   path);
  }
  return kExitOk;
}

inline int random_channel_cmd(const Output& o, std::size_t dim, std::size_t rank,
                              const std::string& path) {
  write_or_print(o, io::serialize_channel(random_channel(dim, rank == 0 ? dim * dim : rank, o.g.seed)),
                 path);
  return kExitOk;
}

// Input-shaped failures exit 2; everything else raised by the numerics exits 1.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::EnvTooSmall:
    case ErrorKind::BadRank:
    case ErrorKind::TooManyKraus:
      return kExitUsage;
    default:
      return kExitFail;
  }
}

}  // namespace detail

// args excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Globals g;
  CLI::App app{"Fidelity, purification and witness toolkit", "fidkit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", g.json, "Machine-readable JSON output");
  app.add_option("--seed", g.seed, "Seed for random draws and suites");
  app.add_option("--tol", g.tol, "Pass threshold for single checks (default 1e-8)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--no-timing", g.no_timing, "Omit wall-clock times from reports");

  std::string rho, sigma, channel, psi, phi;

  auto* fid = app.add_subcommand("fidelity", "Fidelity of two state files");
  fid->add_option("--rho", rho, "State file")->required();
  fid->add_option("--sigma", sigma, "State file")->required();

  detail::PurifyArgs pa;
  auto* pur = app.add_subcommand("purify", "Uhlmann-optimal purifications");
  pur->add_option("--rho", pa.rho, "State file")->required();
  pur->add_option("--sigma", pa.sigma, "State file")->required();
  pur->add_option("--dim-env", pa.dim_env, "Environment dimension (default dim)");
  pur->add_option("--out-psi", pa.out_psi, "Write the purification of rho");
  pur->add_option("--out-phi", pa.out_phi, "Write the purification of sigma");
  pur->add_flag("--variational", pa.variational, "Also run the seeded variational ascent");

  detail::WitnessArgs wa;
  auto* wit = app.add_subcommand("witness", "Pure states and a channel taking them to rho and sigma");
  wit->add_option("--rho", wa.rho, "State file")->required();
  wit->add_option("--sigma", wa.sigma, "State file")->required();
  wit->add_option("--out-channel", wa.out_channel, "Write the witness channel");
  wit->add_option("--out-psi", wa.out_psi, "Write psi");
  wit->add_option("--out-phi", wa.out_phi, "Write phi");

  auto* dil = app.add_subcommand("dilate", "Stinespring dilation of a channel");
  dil->add_option("--channel", channel, "Channel file")->required();

  auto* bnd = app.add_subcommand("check-bound", "Check F(E(psi), E(phi)) >= |<psi|phi>|");
  bnd->add_option("--channel", channel, "Channel file")->required();
  bnd->add_option("--psi", psi, "Pure state file")->required();
  bnd->add_option("--phi", phi, "Pure state file")->required();

  auto* mon = app.add_subcommand("check-monotonicity", "Check F(G(rho), G(sigma)) >= F(rho, sigma)");
  mon->add_option("--channel", channel, "Channel file")->required();
  mon->add_option("--rho", rho, "State file")->required();
  mon->add_option("--sigma", sigma, "State file")->required();

  suite::SuiteConfig sc;
  auto* sui = app.add_subcommand("suite", "Seeded randomized property suites");
  sui->add_option("--trials", sc.trials, "Trials per suite")->check(CLI::PositiveNumber);
  sui->add_option("--dims", sc.dims, "Dimensions to cycle through")->delimiter(',');
  sui->add_option("--suites", sc.suites, "Subset of suites to run")
      ->delimiter(',')
      ->check(CLI::IsMember(suite::all_suites()));

  std::size_t dim = 0, rank = 0;
  bool pure = false;
  std::string out_path;
  auto* rs = app.add_subcommand("random-state", "Seeded random state file");
  rs->add_option("--dim", dim, "Dimension")->required()->check(CLI::PositiveNumber);
  rs->add_option("--rank", rank, "Rank (default dim)");
  rs->add_flag("--pure", pure, "Draw a Haar-random pure state");
  rs->add_option("--out", out_path, "Output path (default stdout)");

  auto* rc = app.add_subcommand("random-channel", "Seeded random channel file");
  rc->add_option("--dim", dim, "Dimension")->required()->check(CLI::PositiveNumber);
  rc->add_option("--rank", rank, "Kraus rank (default dim^2)");
  rc->add_option("--out", out_path, "Output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) return kExitOk;
    const auto active = app.get_subcommands();
    err << (active.empty() ? app.help() : active.front()->help());
    return kExitUsage;
  }

  const detail::Output o{g, out};
  try {
    if (fid->parsed()) return detail::fidelity_cmd(o, rho, sigma);
    if (pur->parsed()) return detail::purify_cmd(o, pa);
    if (wit->parsed()) return detail::witness_cmd(o, wa);
    if (dil->parsed()) return detail::dilate_cmd(o, channel);
    if (bnd->parsed()) return detail::check_bound_cmd(o, channel, psi, phi);
    if (mon->parsed()) return detail::check_monotonicity_cmd(o, channel, rho, sigma);
    if (sui->parsed()) return detail::suite_cmd(o, sc);
    if (rs->parsed()) return detail::random_state_cmd(o, dim, rank, pure, out_path);
    if (rc->parsed()) return detail::random_channel_cmd(o, dim, rank, out_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return detail::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
  err << app.help();
  return kExitUsage;
}

inline int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_command(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace fidkit::cli
