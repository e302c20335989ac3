#pragma once

// Text formats shared by the command-line tool and the tests: signal CSV,
// modulus lists and JSON views of results.

#include <charconv>
#include <complex>
#include <cstdint>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "picket/design.hpp"
#include "picket/errors.hpp"
#include "picket/fft.hpp"
#include "picket/recovery.hpp"

namespace picket {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t pos = 0;;) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) return out;
    pos = next + 1;
  }
}

inline std::uint64_t parse_u64(std::string_view s, const std::string& where) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw ParseError(where + ": expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

inline double parse_f64(std::string_view s, const std::string& where) {
  // from_chars for double is unavailable in libstdc++ 11; stod with a full-consumption check.
  std::string tmp(s);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (tmp.empty() || used != tmp.size() || !std::isfinite(v))
    throw ParseError(where + ": expected a finite number, got '" + tmp + "'");
  return v;
}

}  // namespace detail

/// "5,6,7" -> {5, 6, 7}.
inline std::vector<std::uint64_t> parse_u64_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto part : detail::split(text, ',')) out.push_back(detail::parse_u64(part, "integer list"));
  return out;
}

/// Rows "index,re,im"; blank lines and '#' comments are skipped, and an
/// optional header starting with "index" is allowed. Unlisted entries are 0.
inline CVector read_signal_csv(std::istream& is, std::uint64_t N) {
  CVector x(N, Complex{0.0});
  std::set<std::uint64_t> seen;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(is, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (first && t.starts_with("index")) {
      first = false;
      continue;
    }
    first = false;
    const std::string where = "signal line " + std::to_string(lineno);
    auto f = detail::split(t, ',');
    if (f.size() != 3) throw ParseError(where + ": expected 3 fields index,re,im");
    const auto n = detail::parse_u64(f[0], where);
    if (n >= N) throw ParseError(where + ": index " + std::to_string(n) + " is outside [0, N)");
    if (!seen.insert(n).second) throw ParseError(where + ": duplicate index " + std::to_string(n));
    x[n] = {detail::parse_f64(f[1], where), detail::parse_f64(f[2], where)};
  }
  return x;
}

inline Json to_json(const DesignSolution& s) {
  Json b = {{"lemma9", s.bounds.lemma9},
            {"corollary3", s.bounds.corollary3},
            {"admissible", s.bounds.admissible},
            {"warm_start_m", s.bounds.warm_m},
            {"B", s.bounds.B},
            {"B_source", s.bounds.B_source},
            {"t", s.bounds.t}};
  return {{"alpha", s.alpha},           {"K", s.K},
          {"s", s.s},                   {"m", s.m},
          {"fourier_samples", s.fourier_samples}, {"bounds", b},
          {"status", to_string(s.status)}, {"nodes_explored", s.nodes_explored},
          {"alphas_skipped", s.alphas_skipped}};
}

inline Json to_json(const RecoveryResult& r) {
  Json entries = Json::array();
  for (const auto& e : r.approx.entries) entries.push_back({{"index", e.index}, {"re", e.value.real()}, {"im", e.value.imag()}});
  return {{"entries", entries},
          {"candidates", r.candidates},
          {"out_of_range", r.out_of_range},
          {"estimated", r.estimated},
          {"precondition_warning", r.precondition_warning}};
}

}  // namespace picket
