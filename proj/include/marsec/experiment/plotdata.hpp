// Plot-ready tables derived from metrics, traces and sweep results.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "marsec/common.hpp"
#include "marsec/experiment/io.hpp"

namespace marsec::experiment {

enum class PlotKind { convergence, objectives, trajectory, secrecy_compare };

inline PlotKind parse_plot_kind(const std::string& s) {
  if (s == "convergence") return PlotKind::convergence;
  if (s == "objectives") return PlotKind::objectives;
  if (s == "trajectory") return PlotKind::trajectory;
  if (s == "secrecy-compare") return PlotKind::secrecy_compare;
  throw ConfigError("unknown plot kind '" + s + "' (expected convergence, objectives, trajectory or secrecy-compare)");
}

/// Trailing moving average over `window` points.
inline std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += v[i];
    if (i >= window) sum -= v[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

/// One row per metrics record: the raw evaluation return and its moving average.
inline Table convergence_table(const std::vector<nlohmann::ordered_json>& records, std::size_t window = 10) {
  static const std::vector<std::string> keys{"iteration", "eval_return", "total_secrecy", "total_energy", "objective"};
  std::vector<std::vector<double>> cols(keys.size());
  for (std::size_t r = 0; r < records.size(); ++r)
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (!records[r].contains(keys[k]) || !records[r][keys[k]].is_number())
        throw MissingColumnError("metrics record " + std::to_string(r) + " has no numeric '" + keys[k] + "'");
      cols[k].push_back(records[r][keys[k]].get<double>());
    }
  const auto smooth = moving_average(cols[1], window);
  Table t{{"iteration", "eval_return", "eval_return_smoothed", "total_secrecy", "total_energy", "objective"}, {}};
  for (std::size_t r = 0; r < records.size(); ++r)
    t.rows.push_back({fmt(cols[0][r]), fmt(cols[1][r]), fmt(smooth[r]), fmt(cols[2][r]), fmt(cols[3][r]), fmt(cols[4][r])});
  return t;
}

/// Slot index and the xyz positions of MU, Alice, Bob and Eve of one pair.
inline Table trajectory_table(const Table& trace, int pair = 1) {
  const std::string p = std::to_string(pair);
  std::vector<std::string> names{"slot"};
  for (const std::string& e : std::vector<std::string>{"mu", "alice", "bob" + p, "eve" + p})
    for (const char* ax : {"_x", "_y", "_z"}) names.push_back(e + ax);
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(trace.index(n, "trace"));
  Table t{names, {}};
  for (const auto& row : trace.rows) {
    std::vector<std::string> r;
    for (std::size_t i : idx) r.push_back(row[i]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

namespace detail {

struct Stat {
  double sum = 0.0, sq = 0.0;
  int n = 0;
  void add(double v) { sum += v, sq += v * v, ++n; }
  double mean() const { return sum / n; }
  double std() const { return n > 1 ? std::sqrt(std::max(0.0, (sq - sum * sum / n) / (n - 1))) : 0.0; }
};

// Groups sweep rows by (baseline, pattern) in order of first appearance.
inline std::vector<std::pair<std::pair<std::string, std::string>, std::vector<Stat>>> group_sweep(
    const Table& sweep, const std::vector<std::string>& metrics) {
  const std::size_t ib = sweep.index("baseline", "sweep table"), ip = sweep.index("pattern", "sweep table");
  std::vector<std::size_t> im;
  for (const auto& m : metrics) im.push_back(sweep.index(m, "sweep table"));
  std::vector<std::pair<std::pair<std::string, std::string>, std::vector<Stat>>> groups;
  for (std::size_t r = 0; r < sweep.rows.size(); ++r) {
    const auto key = std::make_pair(sweep.rows[r][ib], sweep.rows[r][ip]);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, std::vector<Stat>(metrics.size())});
      it = groups.end() - 1;
    }
    for (std::size_t m = 0; m < im.size(); ++m) it->second[m].add(sweep.number(r, im[m]));
  }
  return groups;
}

}  // namespace detail

/// Mean and std of secrecy, energy and objective per approach and pattern.
inline Table objectives_table(const Table& sweep) {
  const std::vector<std::string> metrics{"total_secrecy", "total_energy", "objective"};
  Table t{{"baseline", "pattern", "runs"}, {}};
  for (const auto& m : metrics) {
    t.columns.push_back(m + "_mean");
    t.columns.push_back(m + "_std");
  }
  for (const auto& [key, stats] : detail::group_sweep(sweep, metrics)) {
    std::vector<std::string> row{key.first, key.second, std::to_string(stats[0].n)};
    for (const auto& s : stats) {
      row.push_back(fmt(s.mean()));
      row.push_back(fmt(s.std()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// One row per approach per movement pattern with mean secrecy totals.
inline Table secrecy_compare_table(const Table& sweep) {
  const std::vector<std::string> metrics{"total_secrecy", "total_secrecy_signed", "min_pair_secrecy",
                                         "min_pair_secrecy_signed"};
  Table t{{"baseline", "pattern", "runs", "total_secrecy", "total_secrecy_signed", "min_pair_secrecy",
           "min_pair_secrecy_signed"},
          {}};
  for (const auto& [key, stats] : detail::group_sweep(sweep, metrics)) {
    std::vector<std::string> row{key.first, key.second, std::to_string(stats[0].n)};
    for (const auto& s : stats) row.push_back(fmt(s.mean()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Reads `input` and writes the table for `kind` to `output`.
///   convergence:      metrics.jsonl
///   trajectory:       one trace CSV
///   objectives, secrecy-compare: sweep.csv
inline Table emit_plot_data(PlotKind kind, const std::filesystem::path& input, const std::filesystem::path& output) {
  Table t;
  switch (kind) {
    case PlotKind::convergence: t = convergence_table(read_jsonl(input)); break;
    case PlotKind::trajectory: t = trajectory_table(read_table(input)); break;
    case PlotKind::objectives: t = objectives_table(read_table(input)); break;
    case PlotKind::secrecy_compare: t = secrecy_compare_table(read_table(input)); break;
  }
  write_table(output, t);
  return t;
}

}  // namespace marsec::experiment
