#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "trapcc/explore.hpp"
#include "trapcc/serialize.hpp"
#include "trapcc/verify.hpp"

namespace {

// Fixed default seed so every subcommand is reproducible without flags.
constexpr std::uint64_t kDefaultSeed = 1729;

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream f(path);
  if (!f) {
    std::cerr << "error: cannot open output file " << path << "\n";
    return false;
  }
  f << text;
  return true;
}

trapcc::MassVector masses_of(const std::vector<double>& v) {
  return trapcc::MassVector(v[0], v[1], v[2], v[3]);
}

int run_solve(const std::vector<double>& masses, int starts,
              std::uint64_t seed, int threads,
              const trapcc::SolverConfig& cfg, const std::string& output) {
  const trapcc::MassVector m = masses_of(masses);
  const trapcc::UniquenessReport rep =
      trapcc::probe_uniqueness(m, starts, seed, cfg, threads);
  if (rep.distinct_realizable_clusters == 1) {
    const trapcc::Solution& sol = rep.clusters.front().representative;
    if (!write_output(output, trapcc::to_json(sol, m) + "\n")) return 1;
    if (!sol.certificate.passed()) {
      std::cerr << "error: solution found but its minimum certificate failed\n";
      return 4;
    }
    return 0;
  }
  if (!write_output(output, trapcc::to_json(rep) + "\n")) return 1;
  if (rep.distinct_realizable_clusters == 0) {
    std::cerr << "no realizable trapezoidal solution for these masses ("
              << rep.n_converged << "/" << rep.n_starts
              << " starts converged, " << rep.n_realizable << " realizable)\n";
    return 2;
  }
  std::cerr << "anomaly: " << rep.distinct_realizable_clusters
            << " distinct realizable clusters (uniqueness predicts at most "
               "one)\n";
  return 3;
}

int run_probe(const std::vector<double>& masses, int starts,
              std::uint64_t seed, int threads,
              const trapcc::SolverConfig& cfg, const std::string& output) {
  const trapcc::MassVector m = masses_of(masses);
  const trapcc::UniquenessReport rep =
      trapcc::probe_uniqueness(m, starts, seed, cfg, threads);
  if (!write_output(output, trapcc::to_json(rep) + "\n")) return 1;
  if (rep.distinct_realizable_clusters > 1) {
    std::cerr << "anomaly: " << rep.distinct_realizable_clusters
              << " distinct realizable clusters\n";
    return 3;
  }
  return 0;
}

int run_certify(const std::string& input, const std::string& output) {
  std::ifstream f(input);
  if (!f) {
    std::cerr << "error: cannot open input file " << input << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  const trapcc::ParsedSolution parsed =
      trapcc::solution_from_json(buf.str());
  trapcc::CertificateReport rep;
  try {
    rep = trapcc::certify_minimum(parsed.solution, parsed.masses);
  } catch (const trapcc::NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  std::string text = "{\n  \"certificate\": " + trapcc::to_json(rep, "  ") +
                     ",\n  \"passed\": " + (rep.passed() ? "true" : "false") +
                     "\n}\n";
  if (!write_output(output, text)) return 1;
  if (!rep.passed()) {
    std::cerr << "certificate failed\n";
    return 4;
  }
  return 0;
}

int run_sweep(int grid, double lo, double hi, double margin, int starts,
              std::uint64_t seed, int threads,
              const trapcc::SolverConfig& cfg, const std::string& output) {
  trapcc::MassGridSpec spec;
  spec.nodes_per_axis = grid;
  spec.lo = lo;
  spec.hi = hi;
  spec.margin = margin;
  const auto rows = trapcc::mass_sweep(spec, starts, seed, cfg, threads);
  if (!write_output(output, trapcc::sweep_csv(rows))) return 1;
  int anomalies = 0;
  for (const auto& row : rows) {
    if (row.report.distinct_realizable_clusters > 1) ++anomalies;
  }
  if (anomalies > 0) {
    std::cerr << "anomaly: " << anomalies
              << " grid nodes with more than one realizable cluster\n";
    return 3;
  }
  return 0;
}

int run_verify(int samples, std::uint64_t seed, bool inject,
               const std::string& output) {
  const auto checks = trapcc::run_identity_checks(samples, seed, inject);
  std::string text;
  bool all_pass = true;
  for (const auto& c : checks) {
    char line[160];
    std::snprintf(line, sizeof line,
                  "%-22s max defect %.3e  tolerance %.0e  samples %-6d %s\n",
                  c.name.c_str(), c.max_defect, c.tolerance, c.samples,
                  c.pass ? "PASS" : "FAIL");
    text += line;
    if (!c.pass) {
      all_pass = false;
      std::cerr << "identity violation in " << c.name << ": max defect "
                << trapcc::format_double(c.max_defect) << " at witness "
                << c.witness << "\n";
    }
  }
  if (!write_output(output, text)) return 1;
  return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "trapcc: solver and certifier for trapezoidal central configurations "
      "of the four-body problem in mutual-distance coordinates"};
  app.require_subcommand(1);

  std::vector<double> masses;
  std::uint64_t seed = kDefaultSeed;
  int starts = 64;
  int sweep_starts = 50;
  int threads = 1;
  std::string output;
  std::string input;
  trapcc::SolverConfig cfg;
  int grid = 5;
  double lo = 0.2, hi = 1.0, margin = 0.05;
  int samples = 10000;
  bool inject = false;

  auto add_solver_opts = [&](CLI::App* cmd) {
    cmd->add_option("--max-iters", cfg.max_iters, "Newton iteration cap");
    cmd->add_option("--tol-residual", cfg.tol_residual,
                    "convergence tolerance on the residual 2-norm");
    cmd->add_option("--tol-step", cfg.tol_step,
                    "convergence tolerance on the step norm");
  };
  auto add_mass_opt = [&](CLI::App* cmd) {
    cmd->add_option("--masses", masses,
                    "four positive masses m1,m2,m3,m4")
        ->required()
        ->delimiter(',')
        ->expected(4)
        ->check(CLI::PositiveNumber);
  };
  auto add_run_opts = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (default 1729)");
    cmd->add_option("--starts", starts, "number of sampled starts (default 64)");
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_option("--output", output, "output path (default stdout)");
    add_solver_opts(cmd);
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "find and certify the trapezoidal central configuration");
  add_mass_opt(solve);
  add_run_opts(solve);

  CLI::App* probe = app.add_subcommand(
      "probe", "multi-start uniqueness probe, full JSON report");
  add_mass_opt(probe);
  add_run_opts(probe);

  CLI::App* certify = app.add_subcommand(
      "certify", "re-certify a stored solution JSON");
  certify->add_option("--input", input, "solution JSON path")->required();
  certify->add_option("--output", output, "output path (default stdout)");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "uniqueness sweep over the mass simplex, CSV output");
  sweep->add_option("--grid", grid, "nodes per axis (default 5)");
  sweep->add_option("--lo", lo, "smallest mass value on each axis");
  sweep->add_option("--hi", hi, "largest mass value on each axis");
  sweep->add_option("--margin", margin, "minimum distance from the simplex boundary");
  sweep->add_option("--starts", sweep_starts, "starts per grid node (default 50)");
  sweep->add_option("--seed", seed, "RNG seed (default 1729)");
  sweep->add_option("--threads", threads, "worker threads");
  sweep->add_option("--output", output, "output path (default stdout)");
  add_solver_opts(sweep);

  CLI::App* verify = app.add_subcommand(
      "verify-identities",
      "property suites for the polynomial identities and derivatives");
  verify->add_option("--samples", samples, "sample count (default 10000)");
  verify->add_option("--seed", seed, "RNG seed (default 1729)");
  verify->add_flag("--inject-k-sign-error", inject,
                   "test hook: break one term of K to force a failure");
  verify->add_option("--output", output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      return run_solve(masses, starts, seed, threads, cfg, output);
    }
    if (probe->parsed()) {
      return run_probe(masses, starts, seed, threads, cfg, output);
    }
    if (certify->parsed()) {
      return run_certify(input, output);
    }
    if (sweep->parsed()) {
      return run_sweep(grid, lo, hi, margin, sweep_starts, seed, threads, cfg,
                       output);
    }
    if (verify->parsed()) {
      return run_verify(samples, seed, inject, output);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
