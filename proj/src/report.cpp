#include "cutsel/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "cutsel/errors.hpp"

namespace cutsel {

namespace {

std::string fmt17(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

struct Welford {
  long n = 0;
  double sum = 0.0, sumsq = 0.0;
  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double stdev() const {  // sample standard deviation
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::sqrt(std::max(0.0, var));
  }
};

std::string status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::OptimalProven:
      return "optimal";
    case SolveStatus::TimeLimit:
      return "timelimit";
    case SolveStatus::NodeLimit:
      return "nodelimit";
  }
  return "unknown";
}

}  // namespace

std::vector<MethodRow> aggregate_records(const std::vector<EvalRecord>& records) {
  std::vector<std::string> method_order;
  std::map<std::string, std::array<Welford, 4>> acc;  // time, nodes, gap, pdi
  for (const EvalRecord& r : records) {
    if (acc.find(r.method) == acc.end()) method_order.push_back(r.method);
    auto& w = acc[r.method];
    w[0].add(r.time);
    w[1].add(r.nodes);
    w[2].add(r.pd_gap);
    w[3].add(r.pd_integral);
  }
  std::vector<MethodRow> rows;
  const bool has_nocuts = acc.find("nocuts") != acc.end();
  const double nocuts_time = has_nocuts ? acc["nocuts"][0].mean() : 0.0;
  const double nocuts_pdi = has_nocuts ? acc["nocuts"][3].mean() : 0.0;
  for (const std::string& method : method_order) {
    const auto& w = acc[method];
    MethodRow row;
    row.method = method;
    row.time_mean = w[0].mean();
    row.time_sd = w[0].stdev();
    row.nodes_mean = w[1].mean();
    row.nodes_sd = w[1].stdev();
    row.gap_mean = w[2].mean();
    row.gap_sd = w[2].stdev();
    row.pdi_mean = w[3].mean();
    row.pdi_sd = w[3].stdev();
    if (has_nocuts && method != "nocuts") {
      row.has_improvement = true;
      row.improvement_time =
          nocuts_time != 0.0 ? improvement(nocuts_time, row.time_mean) : 0.0;
      row.improvement_pdi =
          nocuts_pdi != 0.0 ? improvement(nocuts_pdi, row.pdi_mean) : 0.0;
    }
    rows.push_back(row);
  }
  return rows;
}

EvalReport evaluate(const std::vector<NamedSelector>& selectors,
                    const std::vector<MilpInstance>& pool, const EvalOptions& options) {
  struct Job {
    std::size_t selector, instance, seed;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < selectors.size(); ++s)
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t k = 0; k < options.seeds.size(); ++k) jobs.push_back({s, i, k});

  EvalReport report;
  report.records.resize(jobs.size());

  auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    const std::uint64_t seed = options.seeds[job.seed];
    SolveConfig cfg = options.solve;
    // The evaluation seed and the instance identity derive the solve seed so
    // stochastic selectors draw independent streams per (instance, seed).
    cfg.seed = Rng(seed).child(0xeba1, job.instance, job.selector).next_u64();
    const SolveStats stats =
        branch_and_cut(pool[job.instance], *selectors[job.selector].selector, cfg);
    EvalRecord rec;
    rec.method = selectors[job.selector].name;
    rec.instance = pool[job.instance].name;
    rec.seed = seed;
    rec.time = cfg.time_mode == TimeMode::WallClock ? stats.solve_time : stats.work_units;
    rec.wall = stats.solve_time;
    rec.nodes = static_cast<double>(stats.nodes);
    rec.pd_gap = stats.pd_gap;
    rec.pd_integral = stats.pd_integral;
    rec.status = status_name(stats.status);
    report.records[j] = std::move(rec);
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        while (true) {
          const std::size_t j = next.fetch_add(1);
          if (j >= jobs.size()) return;
          run_job(j);
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }

  report.rows = aggregate_records(report.records);
  return report;
}

std::string report_records_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "method,instance,seed,time,nodes,pd_gap,pd_integral,status\n";
  for (const EvalRecord& r : report.records) {
    out << r.method << "," << r.instance << "," << r.seed << "," << fmt17(r.time) << ","
        << fmt17(r.nodes) << "," << fmt17(r.pd_gap) << "," << fmt17(r.pd_integral) << ","
        << r.status << "\n";
  }
  return out.str();
}

std::string report_timings_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "method,instance,seed,wall_seconds\n";
  for (const EvalRecord& r : report.records)
    out << r.method << "," << r.instance << "," << r.seed << "," << fmt17(r.wall) << "\n";
  return out.str();
}

std::string report_summary_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "method,time_mean,time_sd,nodes_mean,nodes_sd,pd_gap_mean,pd_gap_sd,"
         "pd_integral_mean,pd_integral_sd,improvement_time,improvement_pd_integral\n";
  for (const MethodRow& row : report.rows) {
    out << row.method << "," << fmt17(row.time_mean) << "," << fmt17(row.time_sd) << ","
        << fmt17(row.nodes_mean) << "," << fmt17(row.nodes_sd) << ","
        << fmt17(row.gap_mean) << "," << fmt17(row.gap_sd) << "," << fmt17(row.pdi_mean)
        << "," << fmt17(row.pdi_sd) << ",";
    if (row.has_improvement)
      out << fmt17(row.improvement_time) << "," << fmt17(row.improvement_pdi);
    else
      out << "NA,NA";
    out << "\n";
  }
  return out.str();
}

std::string report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "method            time            imp(time,%)  nodes        pd_gap   "
         "pd_integral       imp(pdi,%)\n";
  for (const MethodRow& row : report.rows) {
    char line[256];
    const std::string time_s =
        fmt_fixed(row.time_mean, 2) + " (" + fmt_fixed(row.time_sd, 2) + ")";
    const std::string pdi_s =
        fmt_fixed(row.pdi_mean, 2) + " (" + fmt_fixed(row.pdi_sd, 2) + ")";
    const std::string imp_t =
        row.has_improvement ? fmt_fixed(100.0 * row.improvement_time, 1) : "NA";
    const std::string imp_p =
        row.has_improvement ? fmt_fixed(100.0 * row.improvement_pdi, 1) : "NA";
    std::snprintf(line, sizeof(line), "%-17s %-15s %-12s %-12.1f %-8.4f %-17s %s\n",
                  row.method.c_str(), time_s.c_str(), imp_t.c_str(), row.nodes_mean,
                  row.gap_mean, pdi_s.c_str(), imp_p.c_str());
    out << line;
  }
  return out.str();
}

std::vector<EvalRecord> records_from_csv(const std::string& text) {
  std::vector<EvalRecord> records;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    EvalRecord r;
    std::getline(ls, r.method, ',');
    std::getline(ls, r.instance, ',');
    std::getline(ls, field, ',');
    r.seed = std::stoull(field);
    std::getline(ls, field, ',');
    r.time = std::stod(field);
    std::getline(ls, field, ',');
    r.nodes = std::stod(field);
    std::getline(ls, field, ',');
    r.pd_gap = std::stod(field);
    std::getline(ls, field, ',');
    r.pd_integral = std::stod(field);
    std::getline(ls, r.status, ',');
    records.push_back(std::move(r));
  }
  return records;
}

OrderStudyResult order_study(const std::vector<MilpInstance>& pool,
                             const CutSelector& rule, int n_orders,
                             const SolveConfig& solve, std::uint64_t seed) {
  OrderStudyResult result;
  int nonzero = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    Welford w;
    long pool_size = 0;
    for (int order = 0; order < n_orders; ++order) {
      SolveConfig cfg = solve;
      cfg.seed = Rng(seed).child(0x0bde, i, static_cast<std::uint64_t>(order)).next_u64();
      const SolveStats stats = branch_and_cut(pool[i], rule, cfg);
      w.add(stats.pd_integral);
      pool_size = std::max(pool_size, stats.root_pool_size);
    }
    OrderStudyInstance osi;
    osi.instance = pool[i].name;
    osi.pool_size = pool_size;
    osi.mean_pdi = w.mean();
    osi.stdev_pdi = w.stdev();
    if (pool_size >= 5) {
      ++result.eligible;
      if (osi.stdev_pdi > 0.0) ++nonzero;
    }
    result.instances.push_back(std::move(osi));
  }
  result.fraction_nonzero_spread =
      result.eligible > 0 ? static_cast<double>(nonzero) / result.eligible : 0.0;
  return result;
}

std::string order_study_csv(const OrderStudyResult& result) {
  std::ostringstream out;
  out << "instance,pool_size,pd_integral_mean,pd_integral_stdev\n";
  for (const OrderStudyInstance& osi : result.instances)
    out << osi.instance << "," << osi.pool_size << "," << fmt17(osi.mean_pdi) << ","
        << fmt17(osi.stdev_pdi) << "\n";
  return out.str();
}

void symmetric_eigen(std::vector<double>& a, int dim, std::vector<double>* eigenvalues,
                     std::vector<double>* vectors_out) {
  // Cyclic Jacobi rotations.
  std::vector<double> v(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i) * dim + i] = 1.0;
  auto at = [&](std::vector<double>& m, int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * dim + c];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < dim; ++p)
      for (int q = p + 1; q < dim; ++q) off += at(a, p, q) * at(a, p, q);
    if (off < 1e-24) break;
    for (int p = 0; p < dim; ++p) {
      for (int q = p + 1; q < dim; ++q) {
        const double apq = at(a, p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < dim; ++k) {
          const double akp = at(a, k, p), akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < dim; ++k) {
          const double apk = at(a, p, k), aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < dim; ++k) {
          const double vkp = at(v, k, p), vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> order(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return at(a, x, x) > at(a, y, y);
  });
  if (eigenvalues != nullptr) {
    eigenvalues->resize(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
      (*eigenvalues)[static_cast<std::size_t>(i)] = at(a, order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
  }
  if (vectors_out != nullptr) {
    vectors_out->assign(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < dim; ++r)
        (*vectors_out)[static_cast<std::size_t>(r) * dim + c] =
            at(v, r, order[static_cast<std::size_t>(c)]);
  }
}

PcaResult pca_project(const std::vector<std::array<double, kFeatureDim>>& rows) {
  PcaResult result;
  const int d = kFeatureDim;
  const std::size_t n = rows.size();
  if (n < 2) throw ConfigError("PCA needs at least two cuts");
  std::array<double, kFeatureDim> mean{};
  for (const auto& row : rows)
    for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
  for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] /= static_cast<double>(n);

  std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
  for (const auto& row : rows) {
    for (int p = 0; p < d; ++p) {
      const double xp = row[static_cast<std::size_t>(p)] - mean[static_cast<std::size_t>(p)];
      for (int q = p; q < d; ++q) {
        const double xq = row[static_cast<std::size_t>(q)] - mean[static_cast<std::size_t>(q)];
        cov[static_cast<std::size_t>(p) * d + q] += xp * xq;
      }
    }
  }
  for (int p = 0; p < d; ++p)
    for (int q = p; q < d; ++q) {
      cov[static_cast<std::size_t>(p) * d + q] /= static_cast<double>(n - 1);
      cov[static_cast<std::size_t>(q) * d + p] = cov[static_cast<std::size_t>(p) * d + q];
    }

  std::vector<double> eigvals, eigvecs;
  symmetric_eigen(cov, d, &eigvals, &eigvecs);
  result.eigenvalues = eigvals;
  if (eigvals[0] < 1e-12) {
    result.degenerate = true;
    result.coords.assign(n, {0.0, 0.0});
    return result;
  }
  // Deterministic sign: the largest-magnitude entry of each component is
  // positive.
  for (int c = 0; c < 2; ++c) {
    int arg = 0;
    double best = 0.0;
    for (int r = 0; r < d; ++r) {
      const double x = std::abs(eigvecs[static_cast<std::size_t>(r) * d + c]);
      if (x > best) {
        best = x;
        arg = r;
      }
    }
    if (eigvecs[static_cast<std::size_t>(arg) * d + c] < 0.0)
      for (int r = 0; r < d; ++r) eigvecs[static_cast<std::size_t>(r) * d + c] *= -1.0;
  }
  result.coords.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 2; ++c) {
      double acc = 0.0;
      for (int r = 0; r < d; ++r)
        acc += (rows[i][static_cast<std::size_t>(r)] - mean[static_cast<std::size_t>(r)]) *
               eigvecs[static_cast<std::size_t>(r) * d + c];
      result.coords[i][static_cast<std::size_t>(c)] = acc;
    }
  }
  auto argmin = [&](int axis, bool max) {
    int arg = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const double a = result.coords[i][static_cast<std::size_t>(axis)];
      const double b = result.coords[static_cast<std::size_t>(arg)][static_cast<std::size_t>(axis)];
      if (max ? a > b : a < b) arg = static_cast<int>(i);
    }
    return arg;
  };
  result.extremes = {argmin(0, false), argmin(0, true), argmin(1, false), argmin(1, true)};
  return result;
}

std::string pca_csv(const PcaResult& result) {
  std::ostringstream out;
  out << "x,y,extreme\n";
  for (std::size_t i = 0; i < result.coords.size(); ++i) {
    const bool extreme =
        std::find(result.extremes.begin(), result.extremes.end(), static_cast<int>(i)) !=
        result.extremes.end();
    out << fmt17(result.coords[i][0]) << "," << fmt17(result.coords[i][1]) << ","
        << (result.degenerate ? "degenerate" : (extreme ? "1" : "0")) << "\n";
  }
  return out.str();
}

}  // namespace cutsel
