#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "picket/experiment.hpp"
#include "picket/io.hpp"

using namespace picket;

namespace {

std::string sweep_csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_sweep_csv(r.rows, os);
  return os.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Io, IntegerLists) {
  EXPECT_EQ(parse_u64_list("5,6, 7"), (std::vector<std::uint64_t>{5, 6, 7}));
  EXPECT_THROW(parse_u64_list("5,,7"), ParseError);
  EXPECT_THROW(parse_u64_list("5,-6"), ParseError);
  EXPECT_THROW(parse_u64_list("5x"), ParseError);
}

TEST(Io, SignalCsv) {
  std::istringstream ok("index,re,im\n# planted\n3, 1.5, -2\n\n0,0,1e-3\n");
  auto x = read_signal_csv(ok, 8);
  ASSERT_EQ(x.size(), 8u);
  EXPECT_EQ(x[3], Complex(1.5, -2));
  EXPECT_EQ(x[0], Complex(0, 1e-3));
  EXPECT_EQ(x[1], Complex(0, 0));

  std::istringstream empty("");
  for (auto v : read_signal_csv(empty, 4)) EXPECT_EQ(v, Complex(0, 0));

  for (const char* bad : {"1,2\n", "1,2,3,4\n", "9,1,1\n", "1,1,1\n1,2,2\n", "1,nan,0\n", "1,1e999,0\n", "a,1,1\n",
                          "1,1.0.0,1\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_signal_csv(in, 8), ParseError) << bad;
  }
}

TEST(Io, ConfigParsing) {
  auto c = parse_experiment_config(R"({"N": [1024, 4096], "k_min": 2, "k_max": 4, "variants": ["primes"],
                                       "baseline": true, "trials": 3, "seed": 9, "output_dir": "out"})");
  EXPECT_EQ(c.N, (std::vector<std::uint64_t>{1024, 4096}));
  EXPECT_EQ(c.k_max, 4u);
  EXPECT_EQ(c.variants, std::vector<Variant>{Variant::primes});
  EXPECT_TRUE(c.baseline);
  EXPECT_DOUBLE_EQ(c.epsilon, kDefaultEpsilon);
  EXPECT_EQ(parse_experiment_config(R"({"N": 64})").N, std::vector<std::uint64_t>{64});

  for (const char* bad : {R"({"N": [1024], "colour": 1})", R"({"N": "big"})", R"({"epsilon": 1.5})", R"([1, 2])",
                          R"({"variants": ["odd"]})", R"({"baseline": "yes"})", R"({"N": [1000], "baseline": true})",
                          R"({"N": [2]})", "{not json"}) {
    EXPECT_THROW(parse_experiment_config(bad), ParseError) << bad;
  }
}

TEST(Experiment, SweepShapeAndOrdering) {
  ExperimentConfig c;
  c.N = {1024};
  c.k_min = 2;
  c.k_max = 5;
  auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 12u);
  for (std::size_t i = 0; i < r.rows.size(); i += 3) {
    EXPECT_EQ(r.rows[i].variant, "relprime");
    EXPECT_EQ(r.rows[i + 2].variant, "primes");
    EXPECT_LE(r.rows[i].fourier_samples, r.rows[i + 1].fourier_samples);
    EXPECT_LE(r.rows[i + 1].fourier_samples, r.rows[i + 2].fourier_samples);
    for (std::size_t j = i; j < i + 3; ++j) EXPECT_EQ(r.rows[j].status, "optimal");
  }
  const auto csv = sweep_csv(r);
  EXPECT_EQ(lines(csv), 13u);
  EXPECT_EQ(csv, sweep_csv(run_experiment(c)));  // byte-identical rerun
  EXPECT_EQ(csv.find("wall_ms"), std::string::npos);

  std::ostringstream plot;
  write_plot_data(r.rows, 1024, plot);
  EXPECT_NE(plot.str().find("# k relprime prime_powers primes"), std::string::npos);
  EXPECT_EQ(lines(plot.str()), 6u);
  std::ostringstream svg;
  write_svg(r.rows, 1024, svg);
  EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}

TEST(Experiment, EmptyRangeAndBaselineRows) {
  ExperimentConfig c;
  c.N = {256};
  c.k_min = 5;
  c.k_max = 4;
  EXPECT_EQ(sweep_csv(run_experiment(c)), "N,k,epsilon,variant,alpha,m,fourier_samples,status,nodes_explored\n");

  c.k_min = 2;
  c.k_max = 3;
  c.variants = {Variant::relprime};
  c.baseline = true;
  c.trials = 4;
  c.seed = 5;
  auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[1].variant, "random");
  EXPECT_FALSE(r.rows[1].alpha);
  EXPECT_EQ(r.baseline_trials.size(), 8u);
  std::uint64_t mn = UINT64_MAX;
  for (std::size_t i = 0; i < 4; ++i) mn = std::min(mn, r.baseline_trials[i].m_stop);
  EXPECT_EQ(r.rows[1].m, mn);
  const auto csv = sweep_csv(r);
  EXPECT_NE(csv.find(",random,,"), std::string::npos);
  EXPECT_EQ(csv, sweep_csv(run_experiment(c)));
}

TEST(Io, DesignJsonFields) {
  PrimeTable pt(100);
  auto sol = optimize({30, 2.0, Variant::relprime, std::nullopt}, pt);
  auto j = to_json(sol);
  EXPECT_EQ(j["alpha"], 1);
  EXPECT_EQ(j["s"], Json::array({5, 6}));
  EXPECT_EQ(j["m"], 11);
  EXPECT_EQ(j["fourier_samples"], 10);
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_TRUE(j["bounds"].contains("lemma9"));
  EXPECT_TRUE(j.contains("nodes_explored"));
}
