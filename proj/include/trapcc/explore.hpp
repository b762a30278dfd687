#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "trapcc/errors.hpp"
#include "trapcc/kkt.hpp"

namespace trapcc {

inline constexpr double kClusterRadius = 1e-6;
inline constexpr double kDistanceFloor = 1e-9;

// Chart coordinates (v, w) on S^2 x S^2 for the equal-mass constraint
// manifold:
//   v1 = (r12 + r34) / (2 sqrt 2), v2 = r14 / 2, v3 = r23 / 2,
//   w1 = (r12 - r34) / (2 sqrt 2), w2 = r13 / 2, w3 = r24 / 2.
// Admissible points have v2, v3, w2, w3 >= 0 and v1 >= |w1|.
struct SphereChart {
  Eigen::Vector3d v;
  Eigen::Vector3d w;

  bool admissible() const {
    return v[1] >= 0.0 && v[2] >= 0.0 && w[1] >= 0.0 && w[2] >= 0.0 &&
           v[0] >= std::abs(w[0]);
  }
};

inline DistanceVector r_from_chart(const SphereChart& c) {
  if (std::abs(c.v.norm() - 1.0) > 1e-9 || std::abs(c.w.norm() - 1.0) > 1e-9) {
    throw InadmissibleChartPoint("r_from_chart: v and w must be unit vectors");
  }
  if (!c.admissible()) {
    throw InadmissibleChartPoint("r_from_chart: chart point not admissible");
  }
  const double sqrt2 = std::sqrt(2.0);
  const double r12 = sqrt2 * (c.v[0] + c.w[0]);
  const double r34 = sqrt2 * (c.v[0] - c.w[0]);
  const double r14 = 2.0 * c.v[1];
  const double r23 = 2.0 * c.v[2];
  const double r13 = 2.0 * c.w[1];
  const double r24 = 2.0 * c.w[2];
  for (double d : {r12, r13, r14, r23, r24, r34}) {
    if (d <= kDistanceFloor) {
      throw DegenerateDistance(
          "r_from_chart: output distance at or below the positivity floor");
    }
  }
  return DistanceVector(r12, r13, r14, r23, r24, r34);
}

inline SphereChart chart_from_r(const DistanceVector& r) {
  const double sqrt2 = std::sqrt(2.0);
  SphereChart c;
  c.v = {(r.r12() + r.r34()) / (2.0 * sqrt2), r.r14() / 2.0, r.r23() / 2.0};
  c.w = {(r.r12() - r.r34()) / (2.0 * sqrt2), r.r13() / 2.0, r.r24() / 2.0};
  return c;
}

// Draw n points on M+ for the given masses: uniform admissible chart points
// (normalized Gaussian triples with rejection), mapped to distances and
// radially projected onto {I(r, m) = 1}. F = 0 is preserved by the
// projection because F is homogeneous. Deterministic per seed.
inline std::vector<DistanceVector> sample_mplus(std::uint64_t seed, int n,
                                                const MassVector& m) {
  if (n < 1) throw std::invalid_argument("sample_mplus: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto unit = [&]() {
    while (true) {
      Eigen::Vector3d u(gauss(rng), gauss(rng), gauss(rng));
      const double nrm = u.norm();
      if (nrm > 1e-12) return Eigen::Vector3d(u / nrm);
    }
  };

  // The admissible region covers about 1/64 of S^2 x S^2; 5000 consecutive
  // rejections would put the acceptance rate far below the 1/1000 floor.
  constexpr int kMaxAttemptsPerPoint = 5000;
  std::vector<DistanceVector> out;
  out.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(out.size()) < n) {
    bool found = false;
    for (int attempt = 0; attempt < kMaxAttemptsPerPoint; ++attempt) {
      SphereChart c{unit(), unit()};
      if (!c.admissible()) continue;
      const double sqrt2 = std::sqrt(2.0);
      const double lo = std::min({sqrt2 * (c.v[0] + c.w[0]),
                                  sqrt2 * (c.v[0] - c.w[0]), 2.0 * c.v[1],
                                  2.0 * c.v[2], 2.0 * c.w[1], 2.0 * c.w[2]});
      if (lo <= kDistanceFloor) continue;
      out.push_back(normalize_inertia(r_from_chart(c), m));
      found = true;
      break;
    }
    if (!found) {
      throw SamplerExhausted(
          "sample_mplus: admissibility acceptance rate below 1/1000");
    }
  }
  return out;
}

struct ClusterSummary {
  Solution representative;
  int member_count;
  double max_intra_cluster_distance;
};

struct UniquenessReport {
  MassVector masses;
  int n_starts = 0;
  int n_converged = 0;
  int n_realizable = 0;
  std::vector<ClusterSummary> clusters;
  int distinct_realizable_clusters = 0;
  // Diagnostics, not part of the serialized report: all-root clustering for
  // anomaly detection and the best converged root for sweep rows.
  int distinct_converged_clusters = 0;
  std::optional<Solution> best_converged;
};

namespace detail {

inline double r_distance(const Solution& a, const Solution& b) {
  return (a.r.vec() - b.r.vec()).norm();
}

// Greedy clustering in start order: a solution joins the first cluster whose
// representative (founding member) lies within the radius.
inline std::vector<ClusterSummary> cluster_solutions(
    const std::vector<const Solution*>& sols, double radius) {
  std::vector<ClusterSummary> clusters;
  std::vector<std::vector<const Solution*>> members;
  for (const Solution* s : sols) {
    bool placed = false;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (r_distance(*s, clusters[c].representative) <= radius) {
        clusters[c].member_count += 1;
        members[c].push_back(s);
        placed = true;
        break;
      }
    }
    if (!placed) {
      clusters.push_back(ClusterSummary{*s, 1, 0.0});
      members.push_back({s});
    }
  }
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    double maxd = 0.0;
    for (std::size_t i = 0; i < members[c].size(); ++i) {
      for (std::size_t j = i + 1; j < members[c].size(); ++j) {
        maxd = std::max(maxd, r_distance(*members[c][i], *members[c][j]));
      }
    }
    clusters[c].max_intra_cluster_distance = maxd;
  }
  return clusters;
}

inline void parallel_for(int n, int threads,
                         const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Multi-start uniqueness probe: solve from n_starts sampled points, keep the
// converged runs, and cluster the realizable convex-sequential ones. Results
// are aggregated in start order, so the report does not depend on the thread
// count.
inline UniquenessReport probe_uniqueness(const MassVector& m, int n_starts,
                                         std::uint64_t seed,
                                         const SolverConfig& cfg = SolverConfig{},
                                         int threads = 1) {
  if (n_starts < 2) {
    throw std::invalid_argument("probe_uniqueness: n_starts must be >= 2");
  }
  const auto starts = sample_mplus(seed, n_starts, m);
  std::vector<std::optional<Solution>> sols(
      static_cast<std::size_t>(n_starts));
  detail::parallel_for(n_starts, threads, [&](int i) {
    sols[static_cast<std::size_t>(i)] =
        newton_solve(starts[static_cast<std::size_t>(i)], m, cfg);
  });

  UniquenessReport rep{m};
  rep.n_starts = n_starts;
  std::vector<const Solution*> converged;
  std::vector<const Solution*> realizable;
  for (const auto& s : sols) {
    if (!s->converged()) continue;
    rep.n_converged += 1;
    converged.push_back(&*s);
    if (s->realizable) {
      rep.n_realizable += 1;
      if (s->convex_sequential) realizable.push_back(&*s);
    }
  }
  rep.clusters = detail::cluster_solutions(realizable, kClusterRadius);
  rep.distinct_realizable_clusters = static_cast<int>(rep.clusters.size());
  rep.distinct_converged_clusters = static_cast<int>(
      detail::cluster_solutions(converged, kClusterRadius).size());
  for (const Solution* s : converged) {
    if (!rep.best_converged || s->residual_norm < rep.best_converged->residual_norm) {
      rep.best_converged = *s;
    }
  }
  return rep;
}

// Interior grid on the mass simplex m1 + m2 + m3 + m4 = 4: the first three
// masses run over nodes_per_axis equispaced values in [lo, hi], the fourth is
// the simplex complement, and nodes with any mass below the boundary margin
// are dropped.
struct MassGridSpec {
  int nodes_per_axis = 5;
  double lo = 0.2;
  double hi = 1.0;
  double margin = 0.05;
};

struct SweepRow {
  MassVector masses;
  UniquenessReport report;
  // Realizable representative if one exists, otherwise the best converged
  // root; empty when no start converged.
  std::optional<Solution> entry;
};

inline std::vector<MassVector> simplex_grid(const MassGridSpec& spec) {
  std::vector<double> axis;
  for (int k = 0; k < spec.nodes_per_axis; ++k) {
    axis.push_back(spec.nodes_per_axis == 1
                       ? spec.lo
                       : spec.lo + (spec.hi - spec.lo) * k /
                                       (spec.nodes_per_axis - 1));
  }
  std::vector<MassVector> nodes;
  for (double m1 : axis) {
    for (double m2 : axis) {
      for (double m3 : axis) {
        const double m4 = 4.0 - m1 - m2 - m3;
        if (m1 < spec.margin || m2 < spec.margin || m3 < spec.margin ||
            m4 < spec.margin) {
          continue;
        }
        nodes.emplace_back(m1, m2, m3, m4);
      }
    }
  }
  return nodes;
}

inline std::vector<SweepRow> mass_sweep(const MassGridSpec& spec, int n_starts,
                                        std::uint64_t seed,
                                        const SolverConfig& cfg = SolverConfig{},
                                        int threads = 1) {
  std::vector<SweepRow> rows;
  for (const MassVector& m : simplex_grid(spec)) {
    UniquenessReport rep = probe_uniqueness(m, n_starts, seed, cfg, threads);
    SweepRow row{m, rep, std::nullopt};
    if (!rep.clusters.empty()) {
      row.entry = rep.clusters.front().representative;
    } else if (rep.best_converged) {
      row.entry = rep.best_converged;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace trapcc
