#include "socnav/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace socnav {

void EvalConfig::validate() const {
  if (!(comfort_threshold > 0.0 && comfort_threshold < 1.0))
    throw ValidationError("eval config: comfort_threshold must lie in (0, 1)");
  if (!(sii_sigma > 0.0)) throw ValidationError("eval config: sii_sigma must be > 0");
  if (transient_grace < 0.0)
    throw ValidationError("eval config: transient_grace must be >= 0");
}

double compute_sii(const Pose2D& robot_pose, const SceneState& scene, const EvalConfig& cfg) {
  double best = 0.0;
  const double denom = 2.0 * cfg.sii_sigma * cfg.sii_sigma;
  for (const auto& p : scene.persons) {
    const double d2 = (robot_pose.position() - p.pose.position()).norm_sq();
    best = std::max(best, std::exp(-d2 / denom));
  }
  return best;
}

double compute_sgi(const Pose2D& robot_pose, const SceneState& scene, const EvalConfig& cfg) {
  (void)cfg;
  double best = 0.0;
  for (const auto& g : scene.groups) {
    if (g.radius <= 0.0) continue;
    const double d2 = (robot_pose.position() - g.center).norm_sq();
    best = std::max(best, std::exp(-d2 / (2.0 * g.radius * g.radius)));
  }
  return best;
}

double compute_sdi(const Pose2D& robot_pose, const Pose2D& target_pose) {
  const double head_on = wrap_angle(target_pose.theta + kPi);
  return (1.0 + std::cos(wrap_angle(robot_pose.theta - head_on))) / 2.0;
}

namespace {

bool robot_behind_nearest(const Pose2D& robot, const SceneState& scene) {
  const PersonState* nearest = nullptr;
  double best = 0.0;
  for (const auto& p : scene.persons) {
    const double d = distance(robot.position(), p.pose.position());
    if (!nearest || d < best) {
      nearest = &p;
      best = d;
    }
  }
  if (!nearest) return false;
  const Vec2 rel = robot.position() - nearest->pose.position();
  return rel.dot(nearest->pose.heading()) < 0.0;
}

}  // namespace

TraceEvalSummary evaluate_trace(const std::vector<HsciTracePoint>& points,
                                const std::vector<SceneState>& scenes, const EvalConfig& cfg) {
  TraceEvalSummary summary;
  if (points.empty()) return summary;

  for (const auto& pt : points) {
    summary.max_sii = std::max(summary.max_sii, pt.hsci.sii);
    summary.max_sgi = std::max(summary.max_sgi, pt.hsci.sgi);
  }
  summary.final_sii = points.back().hsci.sii;
  summary.final_sgi = points.back().hsci.sgi;
  summary.final_sdi = points.back().hsci.sdi;

  for (const char* index : {"sii", "sgi"}) {
    const bool is_sii = std::string(index) == "sii";
    std::size_t k = 0;
    while (k < points.size()) {
      const double value = is_sii ? points[k].hsci.sii : points[k].hsci.sgi;
      if (value <= cfg.comfort_threshold) {
        ++k;
        continue;
      }
      BreachInterval interval;
      interval.index = index;
      interval.t_begin = points[k].t;
      interval.behind = true;
      std::size_t end = k;
      while (end < points.size()) {
        const double v = is_sii ? points[end].hsci.sii : points[end].hsci.sgi;
        if (v <= cfg.comfort_threshold) break;
        if (end < scenes.size() && !robot_behind_nearest(points[end].robot, scenes[end]))
          interval.behind = false;
        ++end;
      }
      interval.t_end = points[end - 1].t;
      interval.transient = (interval.t_end - interval.t_begin) < cfg.transient_grace;
      summary.breaches.push_back(interval);
      k = end;
    }
  }
  std::sort(summary.breaches.begin(), summary.breaches.end(),
            [](const BreachInterval& a, const BreachInterval& b) {
              return a.t_begin < b.t_begin || (a.t_begin == b.t_begin && a.index < b.index);
            });
  return summary;
}

namespace {

GridSpec situation_grid(const SceneState& scene, double margin, double resolution) {
  double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
  for (const auto& p : scene.persons) {
    min_x = std::min(min_x, p.pose.x);
    max_x = std::max(max_x, p.pose.x);
    min_y = std::min(min_y, p.pose.y);
    max_y = std::max(max_y, p.pose.y);
  }
  if (scene.persons.empty()) {
    min_x = min_y = 0.0;
    max_x = max_y = 1.0;
  }
  GridSpec spec;
  spec.resolution = resolution;
  spec.origin = {min_x - margin, min_y - margin};
  spec.width = static_cast<int>(std::ceil((max_x - min_x + 2.0 * margin) / resolution));
  spec.height = static_cast<int>(std::ceil((max_y - min_y + 2.0 * margin) / resolution));
  return spec;
}

bool params_changed(const SceneState& a, const SceneState& b) {
  for (std::size_t i = 0; i < a.persons.size(); ++i)
    if (!(a.persons[i].params == b.persons[i].params)) return true;
  return false;
}

}  // namespace

PerimeterReport compare_perimeters(const std::vector<Situation>& dataset,
                                   const PerimeterStudyConfig& study) {
  PerimeterReport report;

  struct Job {
    std::size_t situation_index;
    double s_r;
    double s_h;
  };
  std::vector<Job> jobs;
  for (double s_r : study.s_r_values)
    for (double s_h : study.s_h_values)
      for (std::size_t i = 0; i < dataset.size(); ++i) jobs.push_back({i, s_r, s_h});

  std::vector<std::vector<PerimeterRow>> rows_per_job(jobs.size());

  auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    const Situation& situation = dataset[job.situation_index];

    AdaptationConfig cfg = study.adaptation;
    cfg.s_r = job.s_r;
    cfg.s_h = job.s_h;

    SceneState baseline = situation.scene;
    refresh_all_groups(baseline, study.group_model);

    SceneState adapted = baseline;
    for (const auto& g : baseline.groups) adapted = adapt_group(adapted, g.id, cfg);

    const GridSpec spec = situation_grid(baseline, study.grid_margin, study.resolution);
    const Costmap base_map = apply_adaptive_layer(Costmap(spec, 0), baseline);
    const Costmap adapted_map = apply_adaptive_layer(Costmap(spec, 0), adapted);

    for (const auto& g : baseline.groups) {
      PerimeterRow row;
      row.situation = situation.id;
      row.group_id = g.id;
      row.group_size = static_cast<int>(g.members.size());
      row.s_r = job.s_r;
      row.s_h = job.s_h;
      row.baseline = approach_perimeter(base_map, baseline, g.id, study.approach);
      row.adapted = approach_perimeter(adapted_map, adapted, g.id, study.approach);
      row.changed = params_changed(baseline, adapted);
      rows_per_job[j].push_back(row);
    }
  };

  const int workers = std::max(1, study.workers);
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (std::size_t j = static_cast<std::size_t>(w); j < jobs.size(); j += workers)
          run_job(j);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (auto& rows : rows_per_job)
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());

  for (double s_r : study.s_r_values) {
    for (double s_h : study.s_h_values) {
      PerimeterAggregate agg;
      agg.s_r = s_r;
      agg.s_h = s_h;
      std::size_t max_size = 0;
      for (const auto& row : report.rows)
        if (row.s_r == s_r && row.s_h == s_h)
          max_size = std::max(max_size, static_cast<std::size_t>(row.group_size));
      agg.baseline_by_size.assign(max_size + 1, 0.0);
      agg.adapted_by_size.assign(max_size + 1, 0.0);
      for (const auto& row : report.rows) {
        if (row.s_r != s_r || row.s_h != s_h) continue;
        agg.baseline_total += row.baseline;
        agg.adapted_total += row.adapted;
        agg.baseline_by_size[row.group_size] += row.baseline;
        agg.adapted_by_size[row.group_size] += row.adapted;
      }
      agg.pct_increase = agg.baseline_total > 0.0
                             ? 100.0 * (agg.adapted_total - agg.baseline_total) / agg.baseline_total
                             : (agg.adapted_total > 0.0 ? std::numeric_limits<double>::infinity()
                                                        : 0.0);
      agg.pct_by_size.assign(max_size + 1, -1.0);
      for (std::size_t s = 0; s <= max_size; ++s) {
        if (agg.baseline_by_size[s] > 0.0)
          agg.pct_by_size[s] =
              100.0 * (agg.adapted_by_size[s] - agg.baseline_by_size[s]) / agg.baseline_by_size[s];
        else if (agg.adapted_by_size[s] > 0.0)
          agg.pct_by_size[s] = std::numeric_limits<double>::infinity();
        else if (s >= 2)
          agg.pct_by_size[s] = 0.0;
      }
      report.aggregates.push_back(std::move(agg));
    }
  }
  return report;
}

void write_perimeter_csv(const PerimeterReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "situation,group_id,group_size,s_r,s_h,baseline_m,adapted_m,changed\n";
  for (const auto& r : report.rows) {
    out << r.situation << ',' << r.group_id << ',' << r.group_size << ',' << r.s_r << ','
        << r.s_h << ',' << r.baseline << ',' << r.adapted << ',' << (r.changed ? 1 : 0) << '\n';
  }
}

void write_perimeter_summary_json(const PerimeterReport& report, const std::string& path) {
  nlohmann::json doc;
  doc["aggregates"] = nlohmann::json::array();
  for (const auto& a : report.aggregates) {
    nlohmann::json entry;
    entry["s_r"] = a.s_r;
    entry["s_h"] = a.s_h;
    entry["baseline_total_m"] = a.baseline_total;
    entry["adapted_total_m"] = a.adapted_total;
    entry["pct_increase"] = std::isfinite(a.pct_increase) ? a.pct_increase : -1.0;
    entry["pct_by_size"] = a.pct_by_size;
    doc["aggregates"].push_back(entry);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace socnav
