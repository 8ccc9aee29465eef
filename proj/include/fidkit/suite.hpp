#pragma once

// Seeded randomized property suites and their report.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fidkit/channels.hpp"
#include "fidkit/corollary.hpp"
#include "fidkit/error.hpp"
#include "fidkit/fidelity.hpp"
#include "fidkit/io.hpp"
#include "fidkit/random.hpp"
#include "fidkit/states.hpp"

namespace fidkit::suite {

inline const std::vector<std::string>& all_suites() {
  static const std::vector<std::string> names{"fidelity", "uhlmann",      "dilation",
                                              "witness",  "bound",        "monotonicity"};
  return names;
}

// Pass thresholds per named metric. Each is compared against the worst
// (largest) residual magnitude seen over the trials.
inline std::map<std::string, double> default_tolerances() {
  return {
      {"fidelity.cross_form", 1e-9},       {"fidelity.symmetry", 1e-10},
      {"fidelity.self", 1e-10},            {"fidelity.pure_reduction", 1e-9},
      {"uhlmann.optimal", 1e-8},           {"uhlmann.sweep_excess", 1e-9},
      {"uhlmann.variational", 1e-5},       {"dilation.choi_roundtrip", 1e-8},
      {"dilation.unitarity", 1e-9},        {"dilation.env_dim_error", 0.5},
      {"witness.residual", 1e-8},          {"bound.violation", 1e-8},
      {"monotonicity.violation", 1e-8},    {"monotonicity.via_witness", 1e-8},
  };
}

struct SuiteConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::vector<std::size_t> dims{2, 3, 4};
  std::map<std::string, double> tolerances = default_tolerances();
  std::vector<std::string> suites = all_suites();
  std::size_t sweep_samples = 50;
};

inline void validate_config(const SuiteConfig& c) {
  if (c.trials < 1) throw Error(ErrorKind::ValidationError, "trials must be at least 1");
  if (c.dims.empty()) throw Error(ErrorKind::ValidationError, "dims must be nonempty");
  for (auto d : c.dims)
    if (d < 2 || d > 16)
      throw Error(ErrorKind::ValidationError, "dimension " + std::to_string(d) + " outside [2, 16]");
  for (const auto& [name, tol] : c.tolerances)
    if (!(tol > 0.0))
      throw Error(ErrorKind::ValidationError, "tolerance " + name + " must be positive");
  for (const auto& s : c.suites)
    if (std::find(all_suites().begin(), all_suites().end(), s) == all_suites().end())
      throw Error(ErrorKind::ValidationError, "unknown suite " + s);
}

struct MetricSummary {
  double worst = 0.0;
  double tolerance = 0.0;
};

struct SuiteReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::size_t errors = 0;
  std::vector<std::pair<std::string, MetricSummary>> metrics;
  std::vector<std::uint64_t> failing_seeds;
  double seconds = 0.0;

  bool pass() const {
    if (errors != 0 || passed != trials) return false;
    return std::all_of(metrics.begin(), metrics.end(),
                       [](const auto& m) { return m.second.worst <= m.second.tolerance; });
  }
};

struct Report {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<std::size_t> dims;
  std::vector<SuiteReport> suites;
  double seconds = 0.0;

  bool pass() const {
    return std::all_of(suites.begin(), suites.end(), [](const auto& s) { return s.pass(); });
  }
};

namespace detail {

using Residuals = std::vector<std::pair<std::string, double>>;

struct Trial {
  std::uint64_t seed;
  std::size_t dim;
  std::size_t index;
};

inline std::size_t draw_rank(Rng& rng, std::size_t max_rank) {
  return 1 + std::min(max_rank - 1, static_cast<std::size_t>(rng.uniform() * max_rank));
}

inline double neg_part(double x) { return std::max(0.0, -x); }

// Two states with orthogonal supports: rho on the first half of the basis,
// sigma on the rest.
inline std::pair<DensityMatrix, DensityMatrix> orthogonal_pair(std::size_t d, std::uint64_t seed) {
  const std::size_t split = d / 2;
  const auto a = random_density(split, split, derive_seed(seed, 10));
  const auto b = random_density(d - split, 1, derive_seed(seed, 11));
  ComplexMatrix ra(d, d), rb(d, d);
  for (std::size_t i = 0; i < split; ++i)
    for (std::size_t j = 0; j < split; ++j) ra(i, j) = a.matrix()(i, j);
  for (std::size_t i = 0; i < d - split; ++i)
    for (std::size_t j = 0; j < d - split; ++j) rb(split + i, split + j) = b.matrix()(i, j);
  return {validate_density(ra), validate_density(rb)};
}

inline std::pair<DensityMatrix, DensityMatrix> random_pair(const Trial& t) {
  Rng rng(derive_seed(t.seed, 0));
  const auto r1 = draw_rank(rng, t.dim), r2 = draw_rank(rng, t.dim);
  return {random_density(t.dim, r1, derive_seed(t.seed, 1)),
          random_density(t.dim, r2, derive_seed(t.seed, 2))};
}

inline Residuals fidelity_trial(const Trial& t) {
  const auto [rho, sigma] = random_pair(t);
  const double f = fidelity(rho, sigma);
  const double cross = trace_norm(psd_sqrt(sigma.matrix()) * psd_sqrt(rho.matrix()));
  const auto psi = random_pure(t.dim, derive_seed(t.seed, 3));
  const auto phi = random_pure(t.dim, derive_seed(t.seed, 4));
  return {
      {"cross_form", std::abs(f - cross)},
      {"symmetry", std::abs(f - fidelity(sigma, rho))},
      {"self", 1.0 - fidelity(rho, rho)},
      {"pure_reduction", std::abs(fidelity(projector(psi), projector(phi)) - pure_overlap(psi, phi))},
  };
}

inline Residuals uhlmann_trial(const Trial& t, std::size_t sweep_samples) {
  const auto [rho, sigma] = random_pair(t);
  const auto r = uhlmann_optimal_purifications(rho, sigma, t.dim);
  const double f = r.fidelity;
  const cplx ov = inner(r.psi0.vector().amplitudes(), r.phi0.vector().amplitudes());
  const double optimal = std::max(
      {std::abs(std::abs(ov) - f), (reduce(r.psi0).matrix() - rho.matrix()).frobenius_norm(),
       (reduce(r.phi0).matrix() - sigma.matrix()).frobenius_norm()});
  double sweep_excess = 0.0;
  try {
    sweep_excess = std::max(0.0, random_purification_sweep(rho, sigma, t.dim, sweep_samples,
                                                           derive_seed(t.seed, 5)) - f);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Numerics) throw;
    sweep_excess = std::numeric_limits<double>::infinity();
  }
  const auto trace = uhlmann_variational(rho, sigma, t.dim, VariationalOptions{}, derive_seed(t.seed, 6));
  return {{"optimal", optimal},
          {"sweep_excess", sweep_excess},
          {"variational", std::abs(trace.final - f)}};
}

inline Residuals dilation_trial(const Trial& t) {
  const std::size_t rank = 1 + t.index % (t.dim * t.dim);
  const auto ch = random_channel(t.dim, rank, derive_seed(t.seed, 0));
  const auto dil = stinespring_dilate(ch);
  const auto reference = choi(ch);
  const double roundtrip = std::max((dilation_choi(dil) - reference).frobenius_norm(),
                                    (choi(kraus_from_dilation(dil)) - reference).frobenius_norm());
  return {{"choi_roundtrip", roundtrip},
          {"unitarity", unitarity_residual(dil.unitary)},
          {"env_dim_error", std::abs(static_cast<double>(dil.dim_e) -
                                     static_cast<double>(t.dim * t.dim))}};
}

inline Residuals witness_trial(const Trial& t) {
  auto [rho, sigma] = random_pair(t);
  if (t.index % 10 == 0) {
    sigma = rho;
  } else if (t.index % 10 == 5) {
    std::tie(rho, sigma) = orthogonal_pair(t.dim, t.seed);
  }
  const auto w = construct_witness(rho, sigma);
  const auto rep = verify_witness(w, rho, sigma);
  return {{"residual", std::max({rep.psi_residual, rep.phi_residual, rep.overlap_residual})}};
}

inline Residuals bound_trial(const Trial& t) {
  Rng rng(derive_seed(t.seed, 0));
  const auto ch = random_channel(t.dim, draw_rank(rng, t.dim * t.dim), derive_seed(t.seed, 1));
  const auto psi = random_pure(t.dim, derive_seed(t.seed, 2));
  const auto phi = random_pure(t.dim, derive_seed(t.seed, 3));
  return {{"violation", neg_part(overlap_upper_bound_check(ch, psi, phi))}};
}

inline Residuals monotonicity_trial(const Trial& t) {
  const auto [rho, sigma] = random_pair(t);
  Rng rng(derive_seed(t.seed, 7));
  const auto g = random_channel(t.dim, draw_rank(rng, t.dim * t.dim), derive_seed(t.seed, 8));
  const auto rep = monotonicity_via_witness(g, rho, sigma);
  const double via = std::max({rep.witness.psi_residual, rep.witness.phi_residual,
                               rep.witness.overlap_residual, rep.composed_psi_residual,
                               rep.composed_phi_residual, neg_part(rep.bound_residual)});
  return {{"violation", neg_part(monotonicity_check(g, rho, sigma))}, {"via_witness", via}};
}

inline std::function<Residuals(const Trial&)> trial_fn(const std::string& name,
                                                        const SuiteConfig& c) {
  if (name == "fidelity") return fidelity_trial;
  if (name == "uhlmann")
    return [n = c.sweep_samples](const Trial& t) { return uhlmann_trial(t, n); };
  if (name == "dilation") return dilation_trial;
  if (name == "witness") return witness_trial;
  if (name == "bound") return bound_trial;
  return monotonicity_trial;
}

inline std::uint64_t suite_stream(const std::string& name) {
  const auto& names = all_suites();
  return static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

}  // namespace detail

inline SuiteReport run_one(const std::string& name, const SuiteConfig& c) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto fn = detail::trial_fn(name, c);
  const std::uint64_t base = derive_seed(c.seed, detail::suite_stream(name));

  SuiteReport rep;
  rep.name = name;
  rep.trials = c.trials;
  std::map<std::string, double> worst;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < c.trials; ++i) {
    const detail::Trial t{derive_seed(base, i), c.dims[i % c.dims.size()], i};
    bool ok = true;
    try {
      for (const auto& [metric, value] : fn(t)) {
        const std::string key = name + "." + metric;
        if (!worst.count(metric)) {
          order.push_back(metric);
          worst[metric] = 0.0;
        }
        worst[metric] = std::max(worst[metric], value);
        const auto tol = c.tolerances.find(key);
        if (tol != c.tolerances.end() && !(value <= tol->second)) ok = false;
      }
    } catch (const Error&) {
      ++rep.errors;
      ok = false;
    }
    if (ok) {
      ++rep.passed;
    } else {
      rep.failing_seeds.push_back(t.seed);
    }
  }
  for (const auto& metric : order) {
    const auto tol = c.tolerances.find(name + "." + metric);
    rep.metrics.push_back(
        {metric, {worst[metric], tol == c.tolerances.end() ? 0.0 : tol->second}});
  }
  rep.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return rep;
}

inline Report run_suites(const SuiteConfig& c) {
  validate_config(c);
  const auto start = std::chrono::steady_clock::now();
  Report r{c.seed, c.trials, c.dims, {}, 0.0};
  for (const auto& name : all_suites())
    if (std::find(c.suites.begin(), c.suites.end(), name) != c.suites.end())
      r.suites.push_back(run_one(name, c));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline nlohmann::ordered_json to_json(const Report& r, bool timing) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["dims"] = r.dims;
  auto suites = nlohmann::ordered_json::array();
  for (const auto& s : r.suites) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["trials"] = s.trials;
    js["passed"] = s.passed;
    js["errors"] = s.errors;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [name, m] : s.metrics) {
      metrics[name] = {{"worst", std::isfinite(m.worst) ? nlohmann::ordered_json(m.worst)
                                                        : nlohmann::ordered_json("inf")},
                       {"tolerance", m.tolerance}};
    }
    js["metrics"] = std::move(metrics);
    js["failing_seeds"] = s.failing_seeds;
    js["pass"] = s.pass();
    if (timing) js["seconds"] = s.seconds;
    suites.push_back(std::move(js));
  }
  j["suites"] = std::move(suites);
  j["pass"] = r.pass();
  if (timing) j["seconds"] = r.seconds;
  return j;
}

inline std::string to_text(const Report& r, bool timing) {
  std::ostringstream os;
  os << "seed " << r.seed << ", " << r.trials << " trials per suite\n";
  for (const auto& s : r.suites) {
    os << (s.pass() ? "PASS " : "FAIL ") << s.name << "  " << s.passed << "/" << s.trials;
    for (const auto& [name, m] : s.metrics)
      os << "  " << name << "=" << io::format_residual(m.worst) << " (tol "
         << io::format_residual(m.tolerance) << ")";
    if (s.errors) os << "  errors=" << s.errors;
    if (timing) os << "  " << io::format_residual(s.seconds) << "s";
    os << "\n";
  }
  os << (r.pass() ? "overall: PASS" : "overall: FAIL") << "\n";
  return os.str();
}

}  // namespace fidkit::suite
