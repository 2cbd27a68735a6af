// Copyright 2025 The Orca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "orca/metric_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

#include "orca/errors.hpp"

namespace orca {

namespace {

constexpr double kMadToSigma = 1.4826;
// sqrt(2) * Phi^-1(3/4): scales the median absolute successive difference of
// independent normal noise to its standard deviation.
const double kDiffToSigma = std::sqrt(2.0) * 0.6744897501960817;

std::string format_detail(const char* fmt, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

double median_sorted(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  size_t k = v.size();
  if (k % 2 == 1) return v[k / 2];
  return 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// Robust sigma from successive differences; zero on constant series.
double diff_sigma(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  std::vector<double> diffs;
  diffs.reserve(x.size() - 1);
  for (size_t i = 0; i + 1 < x.size(); ++i) diffs.push_back(std::fabs(x[i + 1] - x[i]));
  return median_sorted(diffs) / kDiffToSigma;
}

double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

double threshold_for(const std::map<std::string, double>& overrides,
                     const std::string& metric, double fallback) {
  auto it = overrides.find(metric);
  return it == overrides.end() ? fallback : it->second;
}

std::vector<double> series_values(const ComponentSeries& s) {
  std::vector<double> v;
  v.reserve(s.points.size());
  for (const auto& p : s.points) v.push_back(p.second);
  return v;
}

}  // namespace

void DetectorConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be positive");
  };
  positive(z_threshold, "z_threshold");
  positive(trend_slope_threshold, "trend_slope_threshold");
  positive(mismatch_ratio_threshold, "mismatch_ratio_threshold");
  positive(pelt_penalty_multiplier, "pelt_penalty_multiplier");
  if (min_segment_length < 1)
    throw Error(ErrorCode::InvalidConfig, "min_segment_length must be >= 1");
  for (const auto& [name, v] : z_threshold_by_metric) positive(v, name.c_str());
  for (const auto& [name, v] : trend_threshold_by_metric) positive(v, name.c_str());
}

std::string_view anomaly_kind_name(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::Threshold: return "threshold";
    case AnomalyKind::Trend: return "trend";
    case AnomalyKind::ChangePoint: return "change_point";
    case AnomalyKind::Mismatch: return "mismatch";
  }
  return "unknown";
}

std::vector<MetricAnomaly> detect_threshold_anomalies(const ComponentSeries& series,
                                                      const DetectorConfig& cfg) {
  std::vector<MetricAnomaly> out;
  if (series.points.size() < 4) return out;
  const double z_thr =
      threshold_for(cfg.z_threshold_by_metric, series.metric_name, cfg.z_threshold);

  std::vector<double> vals = series_values(series);
  std::vector<double> tmp = vals;
  const double med = median_sorted(tmp);
  for (double& d : tmp) d = 0.0;
  tmp.clear();
  for (double v : vals) tmp.push_back(std::fabs(v - med));
  const double mad = median_sorted(tmp);
  const double scale = kMadToSigma * mad;

  for (size_t i = 0; i < vals.size(); ++i) {
    const double dev = std::fabs(vals[i] - med);
    double severity = 0.0;
    bool flag = false;
    if (scale > 0.0) {
      const double z = dev / scale;
      if (z > z_thr) {
        flag = true;
        severity = z;
      }
    } else if (dev > 0.0) {
      flag = true;
      severity = dev;
    }
    if (!flag) continue;
    MetricAnomaly a;
    a.component = series.component;
    a.metric_name = series.metric_name;
    a.kind = AnomalyKind::Threshold;
    a.timestamp_us = series.points[i].first;
    a.severity = severity;
    a.detail = format_detail("value %.6g deviates from median %.6g (score %.6g)",
                             vals[i], med, severity);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<MetricAnomaly> detect_trend_anomalies(const ComponentSeries& series,
                                                  const DetectorConfig& cfg) {
  std::vector<MetricAnomaly> out;
  const size_t n = series.points.size();
  if (n < 5) return out;
  const double thr = threshold_for(cfg.trend_threshold_by_metric, series.metric_name,
                                   cfg.trend_slope_threshold);

  const double t0 = static_cast<double>(series.points.front().first);
  double mean_t = 0.0, mean_x = 0.0;
  for (const auto& p : series.points) {
    mean_t += (static_cast<double>(p.first) - t0) / static_cast<double>(kMicrosPerMinute);
    mean_x += p.second;
  }
  mean_t /= static_cast<double>(n);
  mean_x /= static_cast<double>(n);

  double stx = 0.0, stt = 0.0;
  for (const auto& p : series.points) {
    const double dt =
        (static_cast<double>(p.first) - t0) / static_cast<double>(kMicrosPerMinute) - mean_t;
    stx += dt * (p.second - mean_x);
    stt += dt * dt;
  }
  if (stt <= 0.0) return out;
  const double slope = stx / stt;
  if (std::fabs(slope) <= thr) return out;

  MetricAnomaly a;
  a.component = series.component;
  a.metric_name = series.metric_name;
  a.kind = AnomalyKind::Trend;
  a.timestamp_us = series.points.back().first;
  a.severity = std::fabs(slope) / thr;
  a.detail = format_detail("slope %.6g per minute over %.6g points exceeds %.6g", slope,
                           static_cast<double>(n), thr);
  out.push_back(std::move(a));
  return out;
}

std::vector<MetricAnomaly> detect_mismatch(const ComponentSeries& requests,
                                           const ComponentSeries& responses,
                                           const DetectorConfig& cfg) {
  if (!(requests.component == responses.component))
    throw Error(ErrorCode::MisalignedSeries,
                "request/response series belong to different components");
  if (!(requests.bucket == responses.bucket))
    throw Error(ErrorCode::MisalignedSeries,
                "request/response series cover different buckets");

  std::vector<MetricAnomaly> out;
  size_t i = 0, j = 0;
  while (i < requests.points.size() && j < responses.points.size()) {
    const int64_t ti = requests.points[i].first;
    const int64_t tj = responses.points[j].first;
    if (ti < tj) {
      ++i;
      continue;
    }
    if (tj < ti) {
      ++j;
      continue;
    }
    const double req = requests.points[i].second;
    const double resp = responses.points[j].second;
    const double ratio = std::fabs(req - resp) / std::max(req, 1.0);
    if (ratio > cfg.mismatch_ratio_threshold) {
      MetricAnomaly a;
      a.component = requests.component;
      a.metric_name = "request_response";
      a.kind = AnomalyKind::Mismatch;
      a.timestamp_us = ti;
      a.severity = ratio;
      a.detail = format_detail("request %.6g vs response %.6g (ratio %.6g)", req, resp, ratio);
      out.push_back(std::move(a));
    }
    ++i;
    ++j;
  }
  return out;
}

double pelt_penalty(const std::vector<double>& values, const DetectorConfig& cfg) {
  const double sigma = diff_sigma(values);
  const double floor = 1e-12 * std::max(1.0, max_abs(values) * max_abs(values));
  const double sigma2 = std::max(sigma * sigma, floor);
  return cfg.pelt_penalty_multiplier * sigma2 *
         std::log(static_cast<double>(values.size()));
}

std::vector<int> pelt_change_points(const std::vector<double>& values,
                                    const DetectorConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(values.size());
  const int m = cfg.min_segment_length;
  if (n < 2 * m)
    throw Error(ErrorCode::SeriesTooShort,
                "change-point detection needs at least " + std::to_string(2 * m) +
                    " points, got " + std::to_string(n));
  for (double v : values)
    if (!std::isfinite(v))
      throw Error(ErrorCode::SchemaMismatch, "non-finite value in series");

  std::vector<double> ps1(n + 1, 0.0), ps2(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    ps1[i + 1] = ps1[i] + values[i];
    ps2[i + 1] = ps2[i] + values[i] * values[i];
  }
  auto cost = [&](int s, int t) {
    const double s1 = ps1[t] - ps1[s];
    const double s2 = ps2[t] - ps2[s];
    return s2 - s1 * s1 / static_cast<double>(t - s);
  };

  const double beta = pelt_penalty(values, cfg);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> f(n + 1, inf);
  std::vector<int> arg(n + 1, -1);
  f[0] = -beta;

  // Candidates survive m - 1 steps past their pruning point: a candidate
  // strictly worse than the optimum at t is provably suboptimal only for
  // u >= t + m, so earlier removal could lose an optimum for u in (t, t+m).
  struct Cand {
    int s;
    int drop_at;
  };
  std::vector<Cand> cands;
  cands.push_back({0, std::numeric_limits<int>::max()});

  for (int t = m; t <= n; ++t) {
    if (t - m >= m) cands.push_back({t - m, std::numeric_limits<int>::max()});
    double best = inf;
    int best_s = -1;
    for (const Cand& c : cands) {
      if (t >= c.drop_at || t - c.s < m) continue;
      const double v = f[c.s] + cost(c.s, t) + beta;
      if (v < best) {
        best = v;
        best_s = c.s;
      }
    }
    f[t] = best;
    arg[t] = best_s;
    for (Cand& c : cands) {
      if (c.drop_at == std::numeric_limits<int>::max() && t - c.s >= m &&
          f[c.s] + cost(c.s, t) > f[t])
        c.drop_at = t + m;
    }
    cands.erase(std::remove_if(cands.begin(), cands.end(),
                               [&](const Cand& c) { return c.drop_at <= t + 1; }),
                cands.end());
  }

  std::vector<int> cps;
  for (int cur = n; cur > 0;) {
    const int s = arg[cur];
    if (s <= 0) break;
    cps.push_back(s);
    cur = s;
  }
  std::reverse(cps.begin(), cps.end());
  return cps;
}

std::vector<MetricAnomaly> detect_change_point_anomalies(const ComponentSeries& series,
                                                         const DetectorConfig& cfg) {
  std::vector<MetricAnomaly> out;
  const int n = static_cast<int>(series.points.size());
  if (n < 2 * cfg.min_segment_length) return out;

  std::vector<double> vals = series_values(series);
  const std::vector<int> cps = pelt_change_points(vals, cfg);
  if (cps.empty()) return out;

  // Shift size in robust sigma units. Piecewise-constant series have no
  // successive-difference spread, so fall back to the series MAD and, when
  // that is zero too, report the raw shift magnitude.
  double scale = diff_sigma(vals);
  if (scale <= 0.0) {
    std::vector<double> tmp = vals;
    const double med = median_sorted(tmp);
    tmp.clear();
    for (double v : vals) tmp.push_back(std::fabs(v - med));
    scale = kMadToSigma * median_sorted(tmp);
  }
  std::vector<int> bounds;
  bounds.push_back(0);
  bounds.insert(bounds.end(), cps.begin(), cps.end());
  bounds.push_back(n);
  for (size_t k = 1; k + 1 <= bounds.size() - 1; ++k) {
    const int a = bounds[k - 1], b = bounds[k], c = bounds[k + 1];
    double prev = 0.0, next = 0.0;
    for (int i = a; i < b; ++i) prev += vals[i];
    for (int i = b; i < c; ++i) next += vals[i];
    prev /= static_cast<double>(b - a);
    next /= static_cast<double>(c - b);

    MetricAnomaly an;
    an.component = series.component;
    an.metric_name = series.metric_name;
    an.kind = AnomalyKind::ChangePoint;
    an.timestamp_us = series.points[b].first;
    an.severity = scale > 0.0 ? std::fabs(next - prev) / scale : std::fabs(next - prev);
    an.detail = format_detail("level shift %.6g -> %.6g (index %.6g)", prev, next,
                              static_cast<double>(b));
    out.push_back(std::move(an));
  }
  return out;
}

MetricAnomalyReport analyze_metrics(const PreprocessedDataset& pre,
                                    const DetectorConfig& cfg) {
  cfg.validate();
  MetricAnomalyReport rep;

  auto run_series = [&](const ComponentSeries& s) {
    auto absorb = [&](std::vector<MetricAnomaly>&& v) {
      for (auto& a : v) rep.anomalies.push_back(std::move(a));
    };
    absorb(detect_threshold_anomalies(s, cfg));
    absorb(detect_trend_anomalies(s, cfg));
    absorb(detect_change_point_anomalies(s, cfg));
  };

  // Key: (component, bucket start) so request/response and error counters of
  // the same hour can be paired.
  struct Group {
    const ComponentSeries* request = nullptr;
    const ComponentSeries* response = nullptr;
    const ComponentSeries* error_ratio = nullptr;
    const ComponentSeries* client_error = nullptr;
    const ComponentSeries* server_error = nullptr;
  };
  std::map<std::tuple<std::string, ComponentLevel, int64_t>, Group> groups;

  for (const auto& s : pre.metric_series) {
    run_series(s);
    Group& g = groups[{s.component.name, s.component.level, s.bucket.start_s}];
    if (s.metric_name == "request") g.request = &s;
    else if (s.metric_name == "response") g.response = &s;
    else if (s.metric_name == "error_ratio") g.error_ratio = &s;
    else if (s.metric_name == "client_error") g.client_error = &s;
    else if (s.metric_name == "server_error") g.server_error = &s;
  }

  for (const auto& [key, g] : groups) {
    if (g.request && g.response) {
      try {
        auto v = detect_mismatch(*g.request, *g.response, cfg);
        for (auto& a : v) rep.anomalies.push_back(std::move(a));
      } catch (const Error& e) {
        rep.warnings.push_back(std::string("mismatch detector skipped: ") + e.what());
      }
    }
    if (!g.error_ratio && g.request && (g.client_error || g.server_error)) {
      std::map<int64_t, double> errs;
      for (const ComponentSeries* es : {g.client_error, g.server_error}) {
        if (!es) continue;
        for (const auto& p : es->points) errs[p.first] += p.second;
      }
      ComponentSeries ratio;
      ratio.component = g.request->component;
      ratio.metric_name = "error_ratio";
      ratio.bucket = g.request->bucket;
      ratio.derived = true;
      for (const auto& p : g.request->points) {
        auto it = errs.find(p.first);
        const double e = it == errs.end() ? 0.0 : it->second;
        ratio.points.emplace_back(p.first, e / std::max(p.second, 1.0));
      }
      run_series(ratio);
    }
  }

  for (const auto& a : rep.anomalies) rep.per_component_score[a.component] += a.severity;
  return rep;
}

}  // namespace orca
