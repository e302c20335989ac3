#pragma once

// Batch sweep over (N, k, variant): optimal Fourier sample counts per cell,
// an optional random-row baseline, and plot-ready outputs.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "picket/baseline.hpp"
#include "picket/design.hpp"
#include "picket/io.hpp"

namespace picket {

struct ExperimentConfig {
  std::vector<std::uint64_t> N{1024};
  unsigned k_min = 2, k_max = 11;
  double epsilon = kDefaultEpsilon;
  std::vector<Variant> variants{Variant::relprime, Variant::prime_powers, Variant::primes};
  unsigned trials = 100;
  std::uint64_t seed = 1;
  std::uint64_t node_budget = 100'000'000;
  std::string output_dir = ".";
  bool baseline = false;
  bool svg = false;
  unsigned threads = 1;
};

/// Parses a JSON object; unknown keys and wrong types are rejected.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  ExperimentConfig c;
  auto want_uint = [](const Json& v, const std::string& key) {
    if (!v.is_number_unsigned()) throw ParseError("config: '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  };
  auto want_bool = [](const Json& v, const std::string& key) {
    if (!v.is_boolean()) throw ParseError("config: '" + key + "' must be true or false");
    return v.get<bool>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "N") {
      c.N.clear();
      if (v.is_array())
        for (const auto& x : v) c.N.push_back(want_uint(x, key));
      else
        c.N.push_back(want_uint(v, key));
    } else if (key == "k_min") {
      c.k_min = static_cast<unsigned>(want_uint(v, key));
    } else if (key == "k_max") {
      c.k_max = static_cast<unsigned>(want_uint(v, key));
    } else if (key == "epsilon") {
      if (!v.is_number()) throw ParseError("config: 'epsilon' must be a number");
      c.epsilon = v.get<double>();
    } else if (key == "variants") {
      if (!v.is_array()) throw ParseError("config: 'variants' must be an array");
      c.variants.clear();
      for (const auto& x : v) {
        if (!x.is_string()) throw ParseError("config: variant names must be strings");
        try {
          c.variants.push_back(parse_variant(x.get<std::string>()));
        } catch (const ArgumentError& e) {
          throw ParseError(std::string("config: ") + e.what());
        }
      }
    } else if (key == "trials") {
      c.trials = static_cast<unsigned>(want_uint(v, key));
    } else if (key == "seed") {
      c.seed = want_uint(v, key);
    } else if (key == "node_budget") {
      c.node_budget = want_uint(v, key);
    } else if (key == "output_dir") {
      if (!v.is_string()) throw ParseError("config: 'output_dir' must be a string");
      c.output_dir = v.get<std::string>();
    } else if (key == "baseline") {
      c.baseline = want_bool(v, key);
    } else if (key == "svg") {
      c.svg = want_bool(v, key);
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(want_uint(v, key));
    } else {
      throw ParseError("config: unknown key '" + key + "'");
    }
  }
  if (!(c.epsilon > 0 && c.epsilon < 1)) throw ParseError("config: epsilon must lie in (0, 1)");
  for (auto n : c.N)
    if (n < 4) throw ParseError("config: every N must be >= 4");
  if (c.baseline && c.trials < 1) throw ParseError("config: baseline needs trials >= 1");
  if (c.baseline)
    for (auto n : c.N)
      if (!std::has_single_bit(n)) throw ParseError("config: the baseline needs every N to be a power of two");
  return c;
}

struct SweepRow {
  std::uint64_t N = 0;
  unsigned k = 0;
  double epsilon = 0;
  std::string variant;           // design variant or "random"
  std::optional<unsigned> alpha; // none for the baseline
  std::uint64_t m = 0;
  std::uint64_t fourier_samples = 0;
  std::string status;
  std::uint64_t nodes = 0;
  double wall_ms = 0;            // kept out of the data CSV
};

struct BaselineRow {
  std::uint64_t N = 0;
  unsigned k = 0;
  double epsilon = 0;
  std::uint64_t trial_seed = 0;
  std::uint64_t m_stop = 0;
};

struct ExperimentResult {
  std::vector<SweepRow> rows;
  std::vector<BaselineRow> baseline_trials;
};

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  ExperimentResult res;
  PrimeTable primes(1 << 12);
  SearchOptions opts;
  opts.node_budget = c.node_budget;
  opts.threads = c.threads;
  for (auto N : c.N)
    for (unsigned k = std::max(2u, c.k_min); k <= c.k_max; ++k) {
      for (auto var : c.variants) {
        auto prob = DesignProblem::from_sparsity(N, k, c.epsilon, var);
        auto sol = optimize(prob, primes, opts);
        SweepRow r{N, k, c.epsilon, to_string(var), std::nullopt, sol.m, sol.fourier_samples,
                   to_string(sol.status), sol.nodes_explored, sol.wall_ms};
        if (sol.status != DesignStatus::infeasible) r.alpha = sol.alpha;
        res.rows.push_back(r);
      }
      if (c.baseline) {
        const auto t0 = std::chrono::steady_clock::now();
        auto b = run_baseline(N, k, c.epsilon, c.trials, c.seed, c.threads);
        for (const auto& t : b.trials) res.baseline_trials.push_back({N, k, c.epsilon, t.seed, t.m_stop});
        res.rows.push_back({N, k, c.epsilon, "random", std::nullopt, b.min_m_stop, b.min_m_stop, "min_over_trials", 0,
                            detail::elapsed_ms(t0)});
      }
    }
  return res;
}

namespace detail {
inline std::string fmt_real(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}
}  // namespace detail

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "N,k,epsilon,variant,alpha,m,fourier_samples,status,nodes_explored\n";
  for (const auto& r : rows)
    os << r.N << ',' << r.k << ',' << detail::fmt_real(r.epsilon) << ',' << r.variant << ','
       << (r.alpha ? std::to_string(*r.alpha) : "") << ',' << r.m << ',' << r.fourier_samples << ',' << r.status << ','
       << r.nodes << '\n';
}

inline void write_timings_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "N,k,variant,wall_ms\n";
  for (const auto& r : rows) os << r.N << ',' << r.k << ',' << r.variant << ',' << detail::fmt_real(r.wall_ms) << '\n';
}

inline void write_baseline_csv(const std::vector<BaselineRow>& rows, std::ostream& os) {
  os << "N,k,epsilon,trial_seed,m_stop\n";
  for (const auto& r : rows)
    os << r.N << ',' << r.k << ',' << detail::fmt_real(r.epsilon) << ',' << r.trial_seed << ',' << r.m_stop << '\n';
}

/// Columns k then one sample count per series; NaN marks a missing cell.
inline std::vector<std::string> plot_series(const std::vector<SweepRow>& rows, std::uint64_t N) {
  std::vector<std::string> names;
  for (const auto& r : rows)
    if (r.N == N && std::find(names.begin(), names.end(), r.variant) == names.end()) names.push_back(r.variant);
  return names;
}

inline void write_plot_data(const std::vector<SweepRow>& rows, std::uint64_t N, std::ostream& os) {
  const auto names = plot_series(rows, N);
  std::map<unsigned, std::map<std::string, std::uint64_t>> grid;
  for (const auto& r : rows)
    if (r.N == N && r.status != "infeasible") grid[r.k][r.variant] = r.fourier_samples;
  os << "# N=" << N << " Fourier samples m - K + 1 versus k\n# k";
  for (const auto& n : names) os << ' ' << n;
  os << '\n';
  for (const auto& [k, cells] : grid) {
    os << k;
    for (const auto& n : names) {
      auto it = cells.find(n);
      os << ' ';
      if (it == cells.end()) os << "NaN";
      else os << it->second;
    }
    os << '\n';
  }
}

/// Minimal scatter-and-line chart, log-scaled sample axis.
inline void write_svg(const std::vector<SweepRow>& rows, std::uint64_t N, std::ostream& os) {
  const auto names = plot_series(rows, N);
  const double W = 640, H = 420, L = 70, R = 150, T = 30, Bm = 50;
  unsigned kmin = std::numeric_limits<unsigned>::max(), kmax = 0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = 0;
  for (const auto& r : rows)
    if (r.N == N && r.status != "infeasible" && r.fourier_samples > 0) {
      kmin = std::min(kmin, r.k);
      kmax = std::max(kmax, r.k);
      ymin = std::min(ymin, static_cast<double>(r.fourier_samples));
      ymax = std::max(ymax, static_cast<double>(r.fourier_samples));
    }
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"20\" font-size=\"14\">N = " << N << ": Fourier samples versus k</text>\n";
  if (kmax == 0) {
    os << "</svg>\n";
    return;
  }
  const double ly0 = std::log10(ymin) - 0.05, ly1 = std::log10(ymax) + 0.05;
  auto px = [&](unsigned k) { return L + (kmax == kmin ? 0.5 : double(k - kmin) / (kmax - kmin)) * (W - L - R); };
  auto py = [&](double y) { return H - Bm - (std::log10(y) - ly0) / (ly1 - ly0) * (H - T - Bm); };
  os << "<line x1=\"" << L << "\" y1=\"" << H - Bm << "\" x2=\"" << W - R << "\" y2=\"" << H - Bm << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - Bm << "\" stroke=\"black\"/>\n";
  for (unsigned k = kmin; k <= kmax; ++k)
    os << "<text x=\"" << px(k) - 4 << "\" y=\"" << H - Bm + 18 << "\" font-size=\"11\">" << k << "</text>\n";
  for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e)
    os << "<text x=\"" << L - 45 << "\" y=\"" << py(std::pow(10.0, e)) + 4 << "\" font-size=\"11\">1e" << e << "</text>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\">k</text>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    const char* col = colors[i % 5];
    std::ostringstream pts;
    for (const auto& r : rows)
      if (r.N == N && r.variant == names[i] && r.status != "infeasible" && r.fourier_samples > 0) {
        pts << px(r.k) << ',' << py(static_cast<double>(r.fourier_samples)) << ' ';
        os << "<circle cx=\"" << px(r.k) << "\" cy=\"" << py(static_cast<double>(r.fourier_samples))
           << "\" r=\"3\" fill=\"" << col << "\"/>\n";
      }
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"" << pts.str() << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 20 + 18 * i << "\" font-size=\"12\" fill=\"" << col << "\">"
       << names[i] << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace picket
