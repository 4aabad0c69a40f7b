#include "smcalc/integration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "smcalc/compensated.hpp"

namespace smcalc {

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2)
    throw std::domain_error("partition: need at least 2 points");
  if (points_.front() != 0.0)
    throw std::domain_error("partition: must start at 0");
  for (std::size_t k = 1; k < points_.size(); ++k)
    if (!(points_[k] > points_[k - 1]))
      throw std::domain_error("partition: points must be strictly increasing");
}

Partition Partition::uniform(double T, std::uint64_t j) {
  if (!(T > 0.0)) throw std::domain_error("partition: T must be positive");
  if (j < 1) throw std::domain_error("partition: need at least one interval");
  std::vector<double> pts(static_cast<std::size_t>(j) + 1);
  for (std::uint64_t k = 0; k <= j; ++k)
    pts[static_cast<std::size_t>(k)] =
        (k == j) ? T : T * (static_cast<double>(k) / static_cast<double>(j));
  return Partition(std::move(pts));
}

Partition Partition::dyadic(double T, unsigned level) {
  if (level > 30)
    throw std::length_error("partition: dyadic level too large to materialize");
  return uniform(T, std::uint64_t{1} << level);
}

double Partition::mesh() const {
  double m = 0.0;
  for (std::size_t k = 1; k < points_.size(); ++k)
    m = std::max(m, points_[k] - points_[k - 1]);
  return m;
}

// ---------------------------------------------------------------------------
// Symmetric and Stieltjes sums

namespace {

// One evaluation per partition point, so adjacent terms reuse identical
// values and telescoping identities hold to rounding.
std::vector<double> values_at(const SampledPath& path, const Partition& p) {
  const auto& ts = p.points();
  std::vector<double> v(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) v[k] = path.at(ts[k]);
  return v;
}

}  // namespace

double symmetric_sum(const SampledPath& xi, const SampledPath& eta,
                     const Partition& p) {
  const auto xs = values_at(xi, p);
  const auto es = values_at(eta, p);
  KahanAccumulator acc;
  for (std::size_t k = 1; k < xs.size(); ++k)
    acc.add(0.5 * (xs[k - 1] + xs[k]) * (es[k] - es[k - 1]));
  return acc.value();
}

ConvergenceReport symmetric_integral(const SampledPath& xi,
                                     const SampledPath& eta,
                                     std::span<const Partition> refinement,
                                     double tol) {
  if (refinement.size() < static_cast<std::size_t>(kConvergenceWindow))
    throw std::domain_error("symmetric_integral: need at least 3 partitions");
  if (!(tol > 0.0))
    throw std::domain_error("symmetric_integral: tolerance must be positive");

  ConvergenceReport report;
  report.tol = tol;
  double prev_mesh = std::numeric_limits<double>::infinity();
  for (const Partition& p : refinement) {
    const double mesh = p.mesh();
    if (!(mesh < prev_mesh))
      throw std::domain_error("symmetric_integral: meshes must strictly decrease");
    prev_mesh = mesh;
    report.estimates.emplace_back(mesh, symmetric_sum(xi, eta, p));
  }
  report.extrapolated_value = report.estimates.back().second;

  const std::size_t n = report.estimates.size();
  double spread = 0.0;
  for (std::size_t a = n - kConvergenceWindow; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      spread = std::max(spread, std::fabs(report.estimates[a].second -
                                          report.estimates[b].second));
  report.spread = spread;
  report.converged = spread < tol;
  return report;
}

double stieltjes_integral(const SampledPath& f_values, const SampledPath& V,
                          const Partition& p) {
  return symmetric_sum(f_values, V, p);
}

double stieltjes_integral(const std::function<double(double)>& integrand,
                          const SampledPath& V, const Partition& p) {
  const auto& ts = p.points();
  const auto vs = values_at(V, p);
  std::vector<double> dV(ts.size());
  for (std::size_t k = 1; k < ts.size(); ++k) dV[k] = vs[k] - vs[k - 1];

  // Integrand values are only needed next to nonzero V increments.
  std::vector<double> g(ts.size(), 0.0);
  std::vector<char> have(ts.size(), 0);
  auto value_at = [&](std::size_t k) {
    if (!have[k]) {
      g[k] = integrand(ts[k]);
      have[k] = 1;
    }
    return g[k];
  };
  KahanAccumulator acc;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    if (dV[k] == 0.0) continue;
    acc.add(0.5 * (value_at(k - 1) + value_at(k)) * dV[k]);
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Variation functionals

double strong_variation_estimate(const SampledPath& path, int n, double eps,
                                 double T1) {
  if (n < 2) throw std::domain_error("strong_variation: order must be >= 2");
  if (!(eps > 0.0)) throw std::domain_error("strong_variation: eps must be positive");
  if (!(T1 > 0.0)) throw std::domain_error("strong_variation: T1 must be positive");
  if (!(eps < path.t_end() - T1))
    throw std::domain_error("strong_variation: need eps < T - T1");
  if (path.t0() > 0.0)
    throw std::domain_error("strong_variation: path must cover [0, T1 + eps]");

  KahanAccumulator acc;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double s = path.t(k);
    if (s < 0.0) continue;
    if (s >= T1) break;
    const double width = std::min(path.dt(), T1 - s);
    const double inc = path.at(s + eps) - path[k];
    acc.add(std::pow(std::fabs(inc), static_cast<double>(n)) * width);
  }
  return acc.value() / eps;
}

double sum_squared_increments(const FourierSM& sm, const Partition& p) {
  if (p.back() > sm.horizon() * (1.0 + 1e-12))
    throw std::domain_error("sum_squared_increments: partition exceeds horizon");
  const auto& ts = p.points();
  KahanAccumulator acc;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double v = sm.measure_of_interval(ts[k - 1], ts[k]).value;
    acc.add(v * v);
  }
  return acc.value();
}

double boundedness_quantile(const std::function<double(std::uint64_t)>& experiment,
                            int seeds, double q, unsigned threads) {
  if (seeds < 10) throw std::domain_error("boundedness_quantile: need >= 10 seeds");
  if (!(q > 0.0) || !(q < 1.0))
    throw std::domain_error("boundedness_quantile: q must be in (0, 1)");

  std::vector<double> values(static_cast<std::size_t>(seeds));
  if (threads <= 1) {
    for (int s = 0; s < seeds; ++s)
      values[static_cast<std::size_t>(s)] =
          experiment(static_cast<std::uint64_t>(s) + 1);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int s; (s = next.fetch_add(1)) < seeds;)
        values[static_cast<std::size_t>(s)] =
            experiment(static_cast<std::uint64_t>(s) + 1);
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(threads, 32);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(seeds))) ;
  return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

std::vector<Partition> uniform_refinement(double T,
                                          std::span<const std::uint64_t> js) {
  std::vector<Partition> parts;
  parts.reserve(js.size());
  for (std::uint64_t j : js) parts.push_back(Partition::uniform(T, j));
  return parts;
}

}  // namespace smcalc
