#include "mkv/harness.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mkv/acceptance.hpp"
#include "mkv/error.hpp"
#include "mkv/girsanov.hpp"
#include "mkv/io.hpp"
#include "mkv/metrics.hpp"
#include "mkv/mkv_solver.hpp"
#include "mkv/rate_analysis.hpp"
#include "mkv/simulate.hpp"

namespace mkv {
namespace {

using nlohmann::json;

template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const NotConverged&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), name + ": " + e.detail());
  }
}

struct Solved {
  ParticleCloud cloud;
  PicardTrace trace;
};

SolverOptions solver_options(const ExperimentConfig& c) {
  return {c.solver.M, c.solver.tol, c.solver.max_iter, c.solver.lp_subsample};
}

Solved solve(const ModelSpec& model, const ExperimentConfig& c, const RngStream& seed) {
  return stage("solve-mkv", [&]() -> Solved {
    try {
      auto s = solve_mkv(model, build_grid(c), solver_options(c), seed);
      return {std::move(s.cloud), std::move(s.trace)};
    } catch (const NotConverged& e) {
      return {e.solution().cloud, e.solution().trace};
    }
  });
}

std::string trace_distances_csv(const PicardTrace& trace) {
  std::ostringstream out;
  out << "iter,coupling_dist,lp_dist_subsample\n";
  for (const auto& r : trace.iterates) {
    out << r.iteration << ',' << format_double(r.coupling_dist) << ',' << format_double(r.lp_dist_subsample) << '\n';
  }
  return out.str();
}

void write_solution(ArtifactWriter& w, const Solved& s, json& summary) {
  std::ostringstream trace;
  write_trace_csv(trace, s.trace);
  // The full trace carries wall-clock seconds, so it is excluded from hashing.
  w.write_text("trace.csv", trace.str(), true);
  w.write_text("trace_distances.csv", trace_distances_csv(s.trace));
  w.write_cloud("nu_star", s.cloud);
  summary["solver"] = {{"converged", s.trace.converged},
                       {"iterations", s.trace.iterates.size()},
                       {"final_residual", s.trace.final_residual}};
}

json terminal_moments(const ParticleCloud& cloud) {
  const std::size_t k = cloud.grid().last_index();
  double mean = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) mean += cloud.path(i)[k];
  mean /= static_cast<double>(cloud.size());
  double var = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) var += std::pow(cloud.path(i)[k] - mean, 2);
  var /= cloud.size() > 1 ? static_cast<double>(cloud.size() - 1) : 1.0;
  return {{"particles", cloud.size()}, {"terminal_mean", mean}, {"terminal_variance", var}};
}

bool run_simulate(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
                  json& summary) {
  const auto grid = build_grid(c);
  const std::size_t n = c.analysis.simulate_n;
  const ParticleCloud cloud = stage("simulate", [&] {
    if (c.analysis.simulate_mode == "reference") return simulate_reference(model, n, grid, seed);
    if (c.analysis.simulate_mode == "decoupled") {
      const ParticleCloud frozen = simulate_reference(model, c.analysis.pilot_size, grid, seed.fork(1));
      return simulate_decoupled(model, frozen, n, seed);
    }
    return simulate_coupled(model, n, grid, seed);
  });
  w.write_cloud("cloud", cloud);
  summary["simulate"] = terminal_moments(cloud);
  summary["simulate"]["mode"] = c.analysis.simulate_mode;
  return true;
}

bool run_solve(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
               json& summary) {
  const Solved s = solve(model, c, seed);
  write_solution(w, s, summary);
  return s.trace.converged;
}

bool run_residual(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
                  json& summary) {
  const Solved s = solve(model, c, seed);
  write_solution(w, s, summary);
  const ResidualReport r = stage("residual", [&] {
    return fixed_point_residual(model, s.cloud, seed, {c.analysis.residual_subsample, c.analysis.residual_repeats});
  });
  std::ostringstream out;
  out << "quantity,value,stderr\n"
      << "residual," << format_double(r.residual) << ',' << format_double(r.residual_stderr) << '\n'
      << "baseline," << format_double(r.baseline) << ',' << format_double(r.baseline_stderr) << '\n';
  w.write_text("residual.csv", out.str());
  const bool pass = r.residual <= c.solver.tol + r.baseline;
  summary["residual"] = {{"residual", r.residual}, {"baseline", r.baseline}, {"subsample", r.subsample},
                         {"pass", pass}};
  return pass && s.trace.converged;
}

bool run_rate(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
              json& summary) {
  const Solved s = solve(model, c, seed);
  write_solution(w, s, summary);
  RateComparison cmp;
  if (!c.analysis.compare_model.empty()) {
    cmp.model = stage("rate", [&] { return build_named_model(c.analysis.compare_model, c); });
  }
  const RateReport r = stage("rate", [&] { return rate_H(model, s.cloud, c.analysis.samples, seed.fork(2), cmp); });
  std::ostringstream out;
  out << "quantity,value,stderr,samples\n";
  auto row = [&](const char* name, const Estimate& e) {
    out << name << ',' << format_double(e.value) << ',' << format_double(e.stderr_) << ',' << e.samples << '\n';
  };
  row("gamma_nu_mu", r.gamma_nu_mu);
  row("entropy_vs_P", r.entropy_vs_P);
  row("h_nu_mu", r.h_nu_mu);
  row("h_mu_mu", r.h_mu_mu);
  out << "kappa," << format_double(r.kappa) << ",0,0\n";
  w.write_text("rate.csv", out.str());
  const double sig = c.analysis.sigma;
  const bool gibbs = r.h_nu_mu.value >= -sig * r.h_nu_mu.stderr_;
  const bool certificate = r.h_mu_mu.value <= sig * r.h_mu_mu.stderr_ + r.kappa * c.solver.tol;
  summary["rate"] = {{"h_mu_mu", r.h_mu_mu.value}, {"h_nu_mu", r.h_nu_mu.value}, {"kappa", r.kappa},
                     {"gibbs_pass", gibbs}, {"certificate_pass", certificate}};
  return gibbs && certificate;
}

bool run_lln(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
             json& summary) {
  const Solved s = solve(model, c, seed);
  write_solution(w, s, summary);
  const LlnReport r = stage("lln", [&] {
    return lln_report(model, s.cloud, c.analysis.N_list, c.analysis.tests, c.analysis.replicates, seed.fork(3));
  });
  std::ostringstream out;
  write_lln_csv(out, r, c.analysis.tests);
  w.write_text("lln.csv", out.str());
  summary["lln"] = {{"slopes", r.slopes}};
  return true;
}

bool run_pde(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
             json& summary) {
  const Solved s = solve(model, c, seed);
  write_solution(w, s, summary);
  auto omegas = media_atoms(model.media_law);
  PdeOptions opt{c.analysis.pde_bandwidth};
  if (omegas.empty()) {
    // Continuous media: slice around the first atom with kernel weights.
    omegas.push_back(std::vector<double>(s.cloud.media(0).begin(), s.cloud.media(0).end()));
    if (!opt.bandwidth) opt.bandwidth = 0.1;
  }
  std::ostringstream out;
  out << "phi,omega_1,t,lhs,rhs,residual,stderr,slice_size,approximate,pass\n";
  bool all = true;
  for (const auto& phi : c.analysis.pde_phis) {
    for (const auto& w_coords : omegas) {
      for (double t : c.analysis.pde_times) {
        const PdeReport r = stage("pde-check", [&] {
          return pde_residual(model, s.cloud, phi, MediaSample(w_coords), t, opt);
        });
        const bool pass = r.residual <= c.analysis.sigma * r.stderr_ + 1e-12;
        all = all && pass;
        out << phi.kind_name() << ',' << format_double(w_coords[0]) << ',' << format_double(r.t) << ','
            << format_double(r.lhs) << ',' << format_double(r.rhs) << ',' << format_double(r.residual) << ','
            << format_double(r.stderr_) << ',' << format_double(r.slice_size) << ',' << (r.approximate ? 1 : 0)
            << ',' << (pass ? 1 : 0) << '\n';
      }
    }
  }
  w.write_text("pde.csv", out.str());
  summary["pde"] = {{"all_pass", all}};
  return all;
}

bool run_bl(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
            json& summary) {
  const auto grid = build_grid(c);
  const std::size_t n = c.analysis.bl_size;
  const ParticleCloud a = simulate_reference(model, n, grid, seed.fork(4));
  const ParticleCloud b = stage("bl-dist", [&] { return simulate_coupled(model, n, grid, seed.fork(5)); });
  const double t = model.T;
  const auto exact = stage("bl-dist", [&] {
    return bl_distance(a, b, t, model.metric_kind, {}, c.analysis.dictionary_size, seed.fork(6));
  });
  const auto dict = bl_distance_dictionary(a, b, t, model.metric_kind, c.analysis.dictionary_size, seed.fork(6));
  const double coupling = coupling_upper_bound(a, b, t, model.metric_kind);
  std::ostringstream out;
  out << "quantity,value\n"
      << "bl," << format_double(exact.value) << '\n'
      << "bl_mode," << (exact.mode == BlMode::ExactLP ? "exact_lp" : "dictionary_lower_bound") << '\n'
      << "bl_upper," << format_double(exact.upper_bound) << '\n'
      << "dictionary," << format_double(dict.value) << '\n'
      << "coupling," << format_double(coupling) << '\n';
  w.write_text("bl.csv", out.str());
  if (c.analysis.lp_dump) {
    std::ostringstream lp;
    write_lp_table(lp, a, b, t, model.metric_kind);
    w.write_text("lp_table.txt", lp.str());
  }
  const bool sandwich = dict.value <= exact.value + 1e-9 && exact.value <= coupling + 1e-9;
  summary["bl"] = {{"value", exact.value}, {"dictionary", dict.value}, {"coupling", coupling},
                   {"sandwich_pass", sandwich}};
  return sandwich;
}

bool run_girsanov(const ExperimentConfig& c, const ModelSpec& model, const RngStream& seed, ArtifactWriter& w,
                  json& summary) {
  const auto grid = build_grid(c);
  const ParticleCloud pilot =
      stage("girsanov-check", [&] { return simulate_coupled(model, c.analysis.pilot_size, grid, seed.fork(7)); });
  const auto mart = stage("girsanov-check", [&] {
    return mc_martingale_sweep(model, pilot, c.analysis.alphas, c.analysis.checkpoints, c.analysis.samples,
                               seed.fork(8));
  });
  const auto moments = stage("girsanov-check", [&] {
    return moment_bound_sweep(model, pilot, c.analysis.alphas, c.analysis.samples, seed.fork(8));
  });
  std::ostringstream a, b;
  write_stats_csv(a, mart);
  write_stats_csv(b, moments);
  w.write_text("martingale.csv", a.str());
  w.write_text("moment_bound.csv", b.str());
  std::size_t mart_pass = 0, moment_pass = 0;
  for (const auto& s : mart) mart_pass += s.pass;
  for (const auto& s : moments) moment_pass += s.pass;
  summary["girsanov"] = {{"martingale_cells", mart.size()}, {"martingale_pass", mart_pass},
                         {"moment_cells", moments.size()}, {"moment_pass", moment_pass}};
  return moment_pass == moments.size();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate", "solve-mkv",      "residual", "rate",  "lln",
                                              "pde-check", "bl-dist", "girsanov-check", "accept"};
  return names;
}

RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& config) {
  RunResult result;
  result.dir = config.output_dir;
  ArtifactWriter w(result.dir);
  const auto start = std::chrono::steady_clock::now();
  json summary{{"subcommand", subcommand}, {"seed", config.seed}};

  if (subcommand == "accept") {
    AcceptanceOptions opt;
    opt.seed = config.seed;
    opt.out_dir = result.dir;
    const AcceptanceReport rep = run_acceptance(opt, w);
    summary["criteria"] = acceptance_json(rep);
    result.ok = rep.all_pass();
  } else {
    const ModelSpec model = stage("model", [&] { return build_model(config); });
    const RngStream seed{config.seed};
    bool ok = false;
    if (subcommand == "simulate") {
      ok = run_simulate(config, model, seed, w, summary);
    } else if (subcommand == "solve-mkv") {
      ok = run_solve(config, model, seed, w, summary);
    } else if (subcommand == "residual") {
      ok = run_residual(config, model, seed, w, summary);
    } else if (subcommand == "rate") {
      ok = run_rate(config, model, seed, w, summary);
    } else if (subcommand == "lln") {
      ok = run_lln(config, model, seed, w, summary);
    } else if (subcommand == "pde-check") {
      ok = run_pde(config, model, seed, w, summary);
    } else if (subcommand == "bl-dist") {
      ok = run_bl(config, model, seed, w, summary);
    } else if (subcommand == "girsanov-check") {
      ok = run_girsanov(config, model, seed, w, summary);
    } else {
      throw Error(ErrorCode::SchemaError, "subcommand: unknown '" + subcommand + "'");
    }
    result.ok = ok;
  }
  summary["ok"] = result.ok;
  w.write_json("resolved_config.json", serialize_config(config));
  w.write_json("summary.json", summary);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  w.write_json("timings.json", {{"seconds", seconds}}, true);
  result.summary = summary;
  result.manifest = w.write_manifest();
  return result;
}

}  // namespace mkv
