// picket-cli: design sweeps, matrix checks, recovery runs, baseline runs and
// program export. Exit status: 0 success, 1 infeasible or budget exhausted,
// 2 usage or input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "picket/baseline.hpp"
#include "picket/design.hpp"
#include "picket/experiment.hpp"
#include "picket/fourier.hpp"
#include "picket/io.hpp"
#include "picket/matrix.hpp"
#include "picket/recovery.hpp"

using namespace picket;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;

struct DesignArgs {
  std::uint64_t n = 0;
  unsigned k = 0;
  double eps = kDefaultEpsilon;
  double d = 0;  // overrides k and eps when set
  std::string variant = "relprime";
  unsigned alpha = 0;  // 0: sweep
  std::uint64_t budget = 100'000'000;
  unsigned threads = 1;
};

void add_design_flags(CLI::App* cmd, DesignArgs& a, bool need_alpha) {
  cmd->add_option("--n", a.n, "Bandwidth N")->required();
  cmd->add_option("--k", a.k, "Sparsity k (D = (k - 1) / eps)");
  cmd->add_option("--eps", a.eps, "RIP constant epsilon");
  cmd->add_option("--d", a.d, "Use D directly instead of --k/--eps");
  cmd->add_option("--variant", a.variant, "relprime, prime_powers or primes");
  auto* al = cmd->add_option("--alpha", a.alpha, "Fix alpha instead of sweeping");
  if (need_alpha) al->required();
}

DesignProblem make_problem(const DesignArgs& a) {
  DesignProblem p;
  if (a.d > 0) {
    p = {a.n, a.d, parse_variant(a.variant), std::nullopt};
  } else {
    if (a.k == 0) throw ArgumentError("give either --k (with optional --eps) or --d");
    p = DesignProblem::from_sparsity(a.n, a.k, a.eps, parse_variant(a.variant));
  }
  if (a.alpha > 0) p.alpha = a.alpha;
  p.validate();
  return p;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ArgumentError("cannot open '" + path + "' for writing");
  return f;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ArgumentError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CoherentMatrix matrix_from(const std::string& moduli, std::uint64_t n) {
  return build_matrix(ModulusSet(parse_u64_list(moduli), n));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Picket-fence coherent matrices: design, verification and sparse recovery"};
  app.require_subcommand(1);

  // design
  DesignArgs da;
  bool design_json = false;
  std::string design_out;
  auto* design = app.add_subcommand("design", "Minimize Fourier samples over modulus sets");
  add_design_flags(design, da, false);
  design->add_option("--budget", da.budget, "Node budget per alpha");
  design->add_option("--threads", da.threads, "Worker threads for the alpha sweep");
  design->add_flag("--json", design_json, "Print JSON instead of a summary");
  design->add_option("--out", design_out, "Also write JSON to this file");

  // experiment
  std::string config_path, exp_outdir;
  auto* experiment = app.add_subcommand("experiment", "Run a sweep described by a JSON config");
  experiment->add_option("--config", config_path, "Config file")->required();
  experiment->add_option("--output-dir", exp_outdir, "Override the config's output directory");

  // recover
  std::string rec_moduli, rec_signal, rec_mode = "direct";
  std::uint64_t rec_n = 0;
  std::size_t rec_k = 1;
  double rec_eps = 1.0, rec_drop = -1;
  auto* recover = app.add_subcommand("recover", "Measure a signal and run the sublinear decoder");
  recover->add_option("--moduli", rec_moduli, "Comma-separated moduli s_1,...,s_K")->required();
  recover->add_option("--n", rec_n, "Bandwidth N")->required();
  recover->add_option("--signal", rec_signal, "CSV file with rows index,re,im")->required();
  recover->add_option("--k", rec_k, "Sparsity k")->required();
  recover->add_option("--eps", rec_eps, "Accuracy parameter epsilon in (0, 1]");
  recover->add_option("--mode", rec_mode, "direct: signal is x; fourier: signal is a spectrum sampled in time")
      ->check(CLI::IsMember({"direct", "fourier"}));
  recover->add_option("--drop-below", rec_drop, "Omit entries with magnitude <= this (default 0, fourier 1e-9)");

  // matrix
  std::string mat_moduli, mat_format = "dense", mat_out;
  std::uint64_t mat_n = 0, mat_cols = 0;
  unsigned mat_k = 2;
  auto* matrix = app.add_subcommand("matrix", "Build, verify or export a picket-fence matrix");
  matrix->add_option("--moduli", mat_moduli, "Comma-separated moduli")->required();
  matrix->add_option("--n", mat_n, "Bandwidth N")->required();
  matrix->require_subcommand(1);
  auto* mbuild = matrix->add_subcommand("build", "Print shape and design quantities");
  auto* mverify = matrix->add_subcommand("verify", "Run the coherence, disjunct, expander, RIP and Fourier checks");
  mverify->add_option("--k", mat_k, "Sparsity for the RIP and expander checks");
  auto* mexport = matrix->add_subcommand("export", "Write the matrix or its Fourier image as CSV");
  mexport->add_option("--format", mat_format, "dense or fourier")->check(CLI::IsMember({"dense", "fourier"}));
  mexport->add_option("--columns", mat_cols, "Columns for dense export (default N)");
  mexport->add_option("--out", mat_out, "Output file (default stdout)");

  // baseline
  std::uint64_t bl_n = 0, bl_seed = 1;
  unsigned bl_k = 2, bl_trials = 100, bl_threads = 1;
  double bl_eps = kDefaultEpsilon;
  std::string bl_csv;
  auto* baseline = app.add_subcommand("baseline", "Random inverse-DFT rows until coherence certifies RIP");
  baseline->add_option("--n", bl_n, "Bandwidth N (power of two)")->required();
  baseline->add_option("--k", bl_k, "Sparsity k >= 2")->required();
  baseline->add_option("--eps", bl_eps, "RIP constant epsilon");
  baseline->add_option("--trials", bl_trials, "Number of trials");
  baseline->add_option("--seed", bl_seed, "Base seed");
  baseline->add_option("--threads", bl_threads, "Worker threads");
  baseline->add_option("--csv", bl_csv, "Per-trial CSV output");

  // export-ilp
  DesignArgs ia;
  std::string ilp_out, ilp_manifest;
  auto* ilp = app.add_subcommand("export-ilp", "Write the integer program for a fixed alpha in LP format");
  add_design_flags(ilp, ia, true);
  ilp->add_option("--out", ilp_out, "LP file (default stdout)");
  ilp->add_option("--manifest", ilp_manifest, "JSON manifest with variable and row counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*design) {
      auto prob = make_problem(da);
      PrimeTable primes(1 << 12);
      SearchOptions opts;
      opts.node_budget = da.budget;
      opts.threads = da.threads;
      auto sol = optimize(prob, primes, opts);
      Json j = to_json(sol);
      if (sol.status != DesignStatus::infeasible) j["asymptotic_scale"] = asymptotic_scale(static_cast<double>(prob.N), prob.D);
      if (!design_out.empty()) open_out(design_out) << j.dump(2) << '\n';
      if (design_json) {
        std::cout << j.dump(2) << '\n';
      } else if (sol.status == DesignStatus::infeasible) {
        std::cout << "infeasible\n";
      } else {
        std::cout << "alpha=" << sol.alpha << " K=" << sol.K << " s={";
        for (std::size_t i = 0; i < sol.s.size(); ++i) std::cout << (i ? "," : "") << sol.s[i];
        std::cout << "} m=" << sol.m << " fourier_samples=" << sol.fourier_samples << " status=" << to_string(sol.status)
                  << '\n';
      }
      return sol.status == DesignStatus::optimal ? 0 : kExitInfeasible;
    }

    if (*experiment) {
      auto cfg = parse_experiment_config(slurp(config_path));
      if (!exp_outdir.empty()) cfg.output_dir = exp_outdir;
      fs::create_directories(cfg.output_dir);
      auto res = run_experiment(cfg);
      const fs::path dir(cfg.output_dir);
      {
        auto f = open_out((dir / "sweep.csv").string());
        write_sweep_csv(res.rows, f);
      }
      {
        auto f = open_out((dir / "timings.csv").string());
        write_timings_csv(res.rows, f);
      }
      if (cfg.baseline) {
        auto f = open_out((dir / "baseline_trials.csv").string());
        write_baseline_csv(res.baseline_trials, f);
      }
      for (auto N : cfg.N) {
        auto f = open_out((dir / ("plot_N" + std::to_string(N) + ".dat")).string());
        write_plot_data(res.rows, N, f);
        if (cfg.svg) {
          auto g = open_out((dir / ("plot_N" + std::to_string(N) + ".svg")).string());
          write_svg(res.rows, N, g);
        }
      }
      bool exhausted = false;
      for (const auto& r : res.rows) exhausted |= r.status == "budget_exhausted";
      std::cout << "wrote " << res.rows.size() << " rows to " << (dir / "sweep.csv").string() << '\n';
      return exhausted ? kExitInfeasible : 0;
    }

    if (*recover) {
      auto M = matrix_from(rec_moduli, rec_n);
      std::ifstream sf(rec_signal);
      if (!sf) throw ArgumentError("cannot open '" + rec_signal + "'");
      const CVector x = read_signal_csv(sf, rec_n);
      Json j;
      RecoveryResult r;
      if (rec_mode == "fourier") {
        auto rep = sft_demo(M, x, rec_k, rec_eps);
        r = rep.recovery;
        j["report"] = {{"time_samples", rep.base_samples},
                       {"predicted_samples", rep.predicted_samples},
                       {"base_channel_deviation", rep.base_channel_deviation}};
        if (rec_drop < 0) rec_drop = 1e-9;
      } else {
        const double alpha = std::max(1u, binary_coherence(M, M.N()));
        r = approximate(M, measure(M, x), rec_k, Guarantee{alpha, rec_eps, 1.0});
        if (rec_drop < 0) rec_drop = 0;
      }
      std::erase_if(r.approx.entries, [&](const SparseEntry& e) { return std::abs(e.value) <= rec_drop; });
      Json body = to_json(r);
      for (auto& [key, v] : body.items()) j[key] = v;
      const CVector z = r.approx.dense(rec_n);
      const double best_k = optimal_k_term_error(x, rec_k, 2);
      const double tail = optimal_k_term_error(x, static_cast<std::size_t>(static_cast<double>(rec_k) / rec_eps), 1);
      const double bound = best_k + 22.0 * rec_eps * tail / std::sqrt(static_cast<double>(rec_k));
      j["error"] = {{"l2", l2_distance(x, z)}, {"best_k_l2", best_k}, {"tail_l1", tail}, {"bound", bound}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*matrix) {
      auto M = matrix_from(mat_moduli, mat_n);
      if (*mbuild) {
        std::ostringstream nt;
        nt << M.moduli().N_tilde();
        Json j = {{"N", M.N()},
                  {"K", M.K()},
                  {"m", M.rows()},
                  {"alpha", M.moduli().alpha()},
                  {"N_tilde", nt.str()},
                  {"fourier_samples", M.rows() - M.K() + 1},
                  {"s", std::vector<std::uint64_t>(M.moduli().s().begin(), M.moduli().s().end())}};
        std::cout << j.dump(2) << '\n';
        return 0;
      }
      if (*mverify) {
        Json j;
        const unsigned a = binary_coherence(M, M.N());
        j["alpha_actual"] = a;
        j["alpha_bound"] = alpha_log_bound(M.modulus(0), M.N());
        const unsigned d = a ? static_cast<unsigned>((M.K() - 1) / a) : 0;
        if (M.N() <= kSubsetGuardColumns && d + 1 <= kSubsetGuardSize)
          j["disjunct"] = {{"d", d}, {"holds", disjunct_check(M, d, M.N())}};
        else
          j["disjunct"] = {{"d", d}, {"status", "skipped"}};
        if (M.N() <= kSubsetGuardColumns && mat_k <= kSubsetGuardSize)
          j["expander"] = to_string(expander_check(M, mat_k, M.N()));
        else
          j["expander"] = "skipped";
        if (M.N() <= kRipGuardColumns && static_cast<double>(mat_k - 1) * a < static_cast<double>(M.K())) {
          auto rip = gershgorin_rip_verify(M, mat_k, M.N());
          j["rip"] = {{"holds", rip.holds}, {"delta", rip.delta}, {"min_singular", rip.min_singular},
                      {"max_singular", rip.max_singular}, {"subsets", rip.subsets}};
        } else {
          j["rip"] = {{"status", "skipped"}};
        }
        auto fs_ = fourier_column_sparsity(M);
        j["fourier_samples"] = {{"predicted", fs_.predicted}};
        if (fs_.verified) j["fourier_samples"]["verified"] = *fs_.verified;
        else j["fourier_samples"]["status"] = "skipped";
        std::cout << j.dump(2) << '\n';
        return 0;
      }
      std::ofstream file;
      std::ostream* os = &std::cout;
      if (!mat_out.empty()) {
        file = open_out(mat_out);
        os = &file;
      }
      if (mat_format == "dense") export_dense_csv(M, mat_cols ? mat_cols : M.N(), *os);
      else export_fourier_csv(M, *os);
      return 0;
    }

    if (*baseline) {
      auto res = run_baseline(bl_n, bl_k, bl_eps, bl_trials, bl_seed, bl_threads);
      if (!bl_csv.empty()) {
        std::vector<BaselineRow> rows;
        for (const auto& t : res.trials) rows.push_back({bl_n, bl_k, bl_eps, t.seed, t.m_stop});
        auto f = open_out(bl_csv);
        write_baseline_csv(rows, f);
      }
      std::vector<std::uint64_t> ms;
      for (const auto& t : res.trials) ms.push_back(t.m_stop);
      Json j = {{"N", bl_n},           {"k", bl_k},
                {"epsilon", bl_eps},   {"trials", bl_trials},
                {"base_seed", bl_seed}, {"min_m_stop", res.min_m_stop},
                {"median_m_stop", res.median_m_stop}, {"welch_floor", welch_row_floor(bl_n, bl_k, bl_eps)},
                {"m_stop", ms}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*ilp) {
      auto prob = make_problem(ia);
      PrimeTable primes(1 << 12);
      std::ofstream file;
      std::ostream* os = &std::cout;
      if (!ilp_out.empty()) {
        file = open_out(ilp_out);
        os = &file;
      }
      auto man = export_ilp(prob, ia.alpha, primes, *os);
      if (!ilp_manifest.empty()) {
        Json j = {{"N", man.N},
                  {"K", man.K},
                  {"alpha", man.alpha},
                  {"B", man.B},
                  {"B_source", man.B_source},
                  {"binaries", man.binaries},
                  {"rows",
                   {{"one_value_per_position", man.rows_one_hot},
                    {"increasing", man.rows_order},
                    {"product_window", man.rows_window},
                    {"prime_lower_bound", man.rows_lower},
                    {"coprime", man.rows_coprime}}}};
        open_out(ilp_manifest) << j.dump(2) << '\n';
      }
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  }
  return 0;
}
