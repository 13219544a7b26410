// Command-line front end: solve / generate / certify / benchmark.

#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sesync/io.hpp"
#include "sesync/sesync.hpp"

namespace {

using namespace sesync;

constexpr int kExitCertified = 0;
constexpr int kExitError = 1;
constexpr int kExitUncertified = 2;

struct SolveFlags {
  std::string input;
  std::string output;
  std::string init = "chordal";
  std::string trace_file;
  std::string trajectory_file;
  std::string dump_dir;
  int r0 = 0;
  int r_max = 0;
  double grad_tol = 0;
  double eig_tol = 1e-5;
  double gap_tol = 1e-6;
  unsigned long seed = 0;
  bool precondition = false;
  bool verbose = false;
};

SolveOptions make_options(const SolveFlags& flags) {
  SolveOptions opts;
  opts.init = flags.init == "random" ? Initialization::random : Initialization::chordal;
  opts.seed = flags.seed;
  opts.rtr.grad_tol = flags.grad_tol;
  opts.rtr.use_preconditioner = flags.precondition;
  opts.rtr.verbose = flags.verbose;
  opts.staircase.r0 = flags.r0;
  opts.staircase.r_max = flags.r_max;
  opts.staircase.eig_tol_factor = flags.eig_tol;
  opts.staircase.gap_tol = flags.gap_tol;
  opts.staircase.verbose = flags.verbose;
  return opts;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text << '\n';
}

int run_solve(const SolveFlags& flags) {
  const MeasurementGraph graph = parse_g2o_file(flags.input);
  const DataMatrixSet mats(graph);
  if (!flags.dump_dir.empty()) dump_data_matrices(flags.dump_dir, mats);

  const SolveResult result = solve(graph, mats, make_options(flags));
  write_text(flags.output, result_to_json(result, flags.input));

  if (!flags.trace_file.empty()) {
    std::ofstream out(flags.trace_file);
    if (!out) throw std::runtime_error("cannot open trace file: " + flags.trace_file);
    for (const auto& trace : result.traces) trace.write_csv(out);
  }
  if (!flags.trajectory_file.empty())
    write_trajectory_file(flags.trajectory_file, graph, result.estimate);

  return result.certificate.certified ? kExitCertified : kExitUncertified;
}

int run_generate(const CubeConfig& cfg, const std::string& prefix) {
  const CubeInstance inst = generate_cube(cfg);
  write_g2o_file(prefix + ".g2o", inst.graph, &inst.ground_truth);
  write_tum_file(prefix + "_gt.tum", inst.ground_truth);
  std::cout << "wrote " << prefix << ".g2o (" << inst.graph.n << " poses, "
            << inst.graph.num_measurements() << " measurements) and " << prefix
            << "_gt.tum\n";
  return kExitCertified;
}

int run_certify(const std::string& input, const std::string& candidate,
                const std::string& output, const SolveFlags& flags) {
  const MeasurementGraph graph = parse_g2o_file(input);
  const DataMatrixSet mats(graph);
  const PoseEstimate est = read_trajectory_file(candidate, graph.d);
  if (est.size() != graph.n)
    throw std::runtime_error("candidate has " + std::to_string(est.size()) +
                             " poses; instance has " + std::to_string(graph.n));
  const ExternalCertificate cert = certify_estimate(mats, est, make_options(flags));
  write_text(output, certificate_to_json(cert, input));
  return cert.certified ? kExitCertified : kExitUncertified;
}

struct BenchmarkFlags {
  std::string param = "sigma-r";
  std::vector<double> values;
  int trials = 30;
  int jobs = 1;
  unsigned long seed = 0;
  std::string output;
  std::string init = "random";
  CubeConfig base;
};

struct TrialRow {
  double value = 0;
  int trial = 0;
  unsigned long seed = 0;
  int n = 0, m = 0;
  double objective = 0, sdp_value = 0, rel_gap = 0, lambda_min = 0;
  bool certified = false;
  int levels = 0;
  double time_s = 0;
};

int run_benchmark(const BenchmarkFlags& flags) {
  if (flags.values.empty()) throw std::runtime_error("benchmark: no sweep values given");

  struct Trial {
    CubeConfig cfg;
    double value;
    int trial;
  };
  std::vector<Trial> trials;
  for (double value : flags.values)
    for (int t = 0; t < flags.trials; ++t) {
      CubeConfig cfg = flags.base;
      if (flags.param == "sigma-r") cfg.sigma_r = value;
      else if (flags.param == "sigma-t") cfg.sigma_t = value;
      else if (flags.param == "plc") cfg.p_lc = value;
      else if (flags.param == "s") cfg.s = static_cast<int>(value);
      else throw std::runtime_error("benchmark: unknown parameter " + flags.param);
      cfg.seed = flags.seed + static_cast<unsigned long>(t);
      trials.push_back({cfg, value, t});
    }

  std::vector<TrialRow> rows(trials.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= trials.size()) break;
      const Trial& trial = trials[k];
      const CubeInstance inst = generate_cube(trial.cfg);

      SolveOptions opts;
      opts.init =
          flags.init == "chordal" ? Initialization::chordal : Initialization::random;
      opts.seed = trial.cfg.seed;
      const SolveResult result = solve(inst.graph, opts);

      TrialRow row;
      row.value = trial.value;
      row.trial = trial.trial;
      row.seed = trial.cfg.seed;
      row.n = result.n;
      row.m = result.m;
      row.objective = result.certificate.rounded_value;
      row.sdp_value = result.certificate.sdp_value;
      row.rel_gap = result.certificate.rel_gap;
      row.lambda_min = result.certificate.lambda_min;
      row.certified = result.certificate.certified;
      row.levels = static_cast<int>(result.levels.size());
      row.time_s = result.timings.total_s;
      rows[k] = row;
    }
  };

  const int jobs = std::max(1, flags.jobs);
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "param,value,trial,seed,n,m,objective,sdp_value,rel_gap,lambda_min,"
         "certified,levels,time_s\n";
  csv.precision(12);
  for (const auto& row : rows)
    csv << flags.param << ',' << row.value << ',' << row.trial << ',' << row.seed << ','
        << row.n << ',' << row.m << ',' << row.objective << ',' << row.sdp_value << ','
        << row.rel_gap << ',' << row.lambda_min << ',' << (row.certified ? 1 : 0) << ','
        << row.levels << ',' << row.time_s << '\n';
  write_text(flags.output, csv.str());

  // Aggregate summary per sweep value.
  std::size_t k = 0;
  for (double value : flags.values) {
    int certified = 0;
    double mean_obj = 0, mean_time = 0;
    for (int t = 0; t < flags.trials; ++t, ++k) {
      certified += rows[k].certified ? 1 : 0;
      mean_obj += rows[k].objective;
      mean_time += rows[k].time_s;
    }
    std::cerr << flags.param << " = " << value << ": certified " << certified << "/"
              << flags.trials << ", mean objective " << mean_obj / flags.trials
              << ", mean time " << mean_time / flags.trials << " s\n";
  }
  return kExitCertified;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certifiably correct pose-graph synchronization over SE(d)"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  CLI::App* cmd_solve = app.add_subcommand("solve", "Solve a g2o instance");
  cmd_solve->add_option("--input,-i", solve_flags.input, "g2o input file")->required();
  cmd_solve->add_option("--output,-o", solve_flags.output, "result JSON ('-' = stdout)");
  cmd_solve->add_option("--init", solve_flags.init, "initialization")
      ->check(CLI::IsMember({"random", "chordal"}));
  cmd_solve->add_option("--r0", solve_flags.r0, "initial staircase rank (0 = d+2)");
  cmd_solve->add_option("--rmax", solve_flags.r_max, "maximum staircase rank (0 = d+6)");
  cmd_solve->add_option("--grad-tol", solve_flags.grad_tol,
                        "gradient norm tolerance (0 = 1e-6*sqrt(dn))");
  cmd_solve->add_option("--eig-tol", solve_flags.eig_tol,
                        "certificate eigenvalue tolerance factor");
  cmd_solve->add_option("--gap-tol", solve_flags.gap_tol, "relative duality gap tolerance");
  cmd_solve->add_option("--seed", solve_flags.seed, "random initialization seed");
  cmd_solve->add_option("--trace", solve_flags.trace_file, "write RTR trace CSV");
  cmd_solve->add_option("--trajectory", solve_flags.trajectory_file,
                        "write the estimate (.g2o or TUM by extension)");
  cmd_solve->add_option("--dump-matrices", solve_flags.dump_dir,
                        "dump data matrices (Matrix Market) to directory");
  cmd_solve->add_flag("--precondition", solve_flags.precondition,
                      "enable the block-Jacobi tCG preconditioner");
  cmd_solve->add_flag("--verbose,-v", solve_flags.verbose, "per-iteration output");

  CubeConfig gen_cfg;
  std::string gen_prefix = "cube";
  CLI::App* cmd_generate = app.add_subcommand("generate", "Generate a grid-world instance");
  cmd_generate->add_option("--s", gen_cfg.s, "poses per lattice edge");
  cmd_generate->add_option("--dim", gen_cfg.dim, "dimension (2 or 3)");
  cmd_generate->add_option("--plc", gen_cfg.p_lc, "loop-closure probability");
  cmd_generate->add_option("--sigma-r", gen_cfg.sigma_r, "rotational noise std (rad)");
  cmd_generate->add_option("--sigma-t", gen_cfg.sigma_t, "translational noise std (m)");
  cmd_generate->add_option("--seed", gen_cfg.seed, "generator seed");
  cmd_generate->add_option("--output,-o", gen_prefix, "output prefix");

  std::string certify_input, certify_candidate, certify_output;
  SolveFlags certify_flags;
  CLI::App* cmd_certify = app.add_subcommand("certify", "Certify an external estimate");
  cmd_certify->add_option("--input,-i", certify_input, "g2o input file")->required();
  cmd_certify->add_option("--candidate,-c", certify_candidate, "candidate trajectory")
      ->required();
  cmd_certify->add_option("--output,-o", certify_output, "certificate JSON");
  cmd_certify->add_option("--eig-tol", certify_flags.eig_tol,
                          "certificate eigenvalue tolerance factor");
  cmd_certify->add_option("--grad-tol", certify_flags.grad_tol, "criticality tolerance");

  BenchmarkFlags bench;
  CLI::App* cmd_benchmark = app.add_subcommand("benchmark", "Sweep a generator parameter");
  cmd_benchmark->add_option("--param", bench.param, "swept parameter")
      ->check(CLI::IsMember({"sigma-r", "sigma-t", "plc", "s"}));
  cmd_benchmark->add_option("--values", bench.values, "sweep values")->required();
  cmd_benchmark->add_option("--trials", bench.trials, "trials per value");
  cmd_benchmark->add_option("--jobs", bench.jobs, "worker threads");
  cmd_benchmark->add_option("--seed", bench.seed, "base seed");
  cmd_benchmark->add_option("--output,-o", bench.output, "CSV output ('-' = stdout)");
  cmd_benchmark->add_option("--init", bench.init, "initialization")
      ->check(CLI::IsMember({"random", "chordal"}));
  cmd_benchmark->add_option("--s", bench.base.s, "poses per lattice edge");
  cmd_benchmark->add_option("--dim", bench.base.dim, "dimension (2 or 3)");
  cmd_benchmark->add_option("--plc", bench.base.p_lc, "loop-closure probability");
  cmd_benchmark->add_option("--sigma-r", bench.base.sigma_r, "rotational noise std");
  cmd_benchmark->add_option("--sigma-t", bench.base.sigma_t, "translational noise std");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_solve->parsed()) return run_solve(solve_flags);
    if (cmd_generate->parsed()) return run_generate(gen_cfg, gen_prefix);
    if (cmd_certify->parsed())
      return run_certify(certify_input, certify_candidate, certify_output, certify_flags);
    if (cmd_benchmark->parsed()) return run_benchmark(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
