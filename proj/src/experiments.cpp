#include "ietsurf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "ietsurf/rng.hpp"
#include "ietsurf/surface.hpp"

namespace ietsurf {

const char* recurrence_class_name(RecurrenceClass c) {
  switch (c) {
    case RecurrenceClass::RecurrentProxy: return "RecurrentProxy";
    case RecurrenceClass::BoundedProxy: return "BoundedProxy";
    case RecurrenceClass::NonRecurrentProxy: return "NonRecurrentProxy";
    case RecurrenceClass::Degenerate: return "Degenerate";
  }
  return "?";
}

std::vector<long> default_schedule(long cap) {
  if (cap < 1) throw NonpositiveParameter("schedule cap must be >= 1");
  std::vector<long> out;
  for (long n = 16; n < cap; n *= 2) out.push_back(n);
  if (out.empty() || out.back() != cap) out.push_back(cap);
  return out;
}

namespace {

RecurrenceClass classify(const std::vector<TracePoint>& tr, double zeta_lo) {
  if (tr.empty()) return RecurrenceClass::NonRecurrentProxy;
  double min_all = std::numeric_limits<double>::infinity();
  for (const TracePoint& pt : tr) {
    if (pt.eps_n == 0.0) return RecurrenceClass::Degenerate;
    min_all = std::min(min_all, pt.n_eps_n);
  }
  if (min_all >= zeta_lo) return RecurrenceClass::BoundedProxy;
  double max_top = -std::numeric_limits<double>::infinity();
  for (size_t k = tr.size() / 2; k < tr.size(); ++k) max_top = std::max(max_top, tr[k].n_eps_n);
  if (max_top >= zeta_lo) return RecurrenceClass::RecurrentProxy;
  return RecurrenceClass::NonRecurrentProxy;
}

void check_schedule(const std::vector<long>& schedule) {
  if (schedule.empty()) throw NonpositiveParameter("schedule must be nonempty");
  for (size_t k = 0; k < schedule.size(); ++k) {
    if (schedule[k] < 0 || (k > 0 && schedule[k] <= schedule[k - 1]))
      throw NonpositiveParameter("schedule must be strictly increasing and nonnegative");
  }
}

}  // namespace

DiagnosticsRecord recurrence_diagnostic(const Permutation& p, const std::vector<double>& a,
                                        const std::vector<long>& schedule, double zeta_scale) {
  check_schedule(schedule);
  const Iet<double> iet(p, a);
  DiagnosticsRecord rec;
  rec.a_s = a;
  rec.zeta_lo = zeta_scale * iet.total();
  rec.schedule_cap = schedule.back();
  for (const auto& [n, eps] : iet.epsilon_trace(schedule))
    rec.eps_trace.push_back({n, eps, static_cast<double>(n) * eps});
  rec.classification = classify(rec.eps_trace, rec.zeta_lo);
  return rec;
}

std::vector<double> cantor_sampler(int depth, int count, uint64_t rng_seed) {
  if (depth < 1) throw NonpositiveParameter("cantor depth must be >= 1");
  if (count < 0) throw NonpositiveParameter("sample count must be >= 0");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const CounterRng rng(rng_seed, static_cast<uint64_t>(i));
    double x = 0.0, w = 1.0;
    for (int k = 1; k <= depth; ++k) {
      w /= 3.0;
      if (rng.bits(static_cast<uint64_t>(k)) & 1) x += 2.0 * w;
    }
    out[i] = x;
  }
  return out;
}

std::vector<double> MeasureSampler::draw(int count) const {
  if (count < 0) throw NonpositiveParameter("sample count must be >= 0");
  std::vector<double> out(count);
  switch (kind) {
    case Kind::Lebesgue: {
      const CounterRng rng(seed, 0);
      for (int i = 0; i < count; ++i) out[i] = rng.uniform(static_cast<uint64_t>(i), lo, hi);
      break;
    }
    case Kind::CantorCoinToss: {
      out = cantor_sampler(depth, count, seed);
      for (double& x : out) x = lo + (hi - lo) * x;
      break;
    }
    case Kind::Grid: {
      for (int i = 0; i < count; ++i)
        out[i] = count == 1 ? 0.5 * (lo + hi)
                            : lo + (hi - lo) * (static_cast<double>(i) / (count - 1));
      break;
    }
  }
  return out;
}

namespace detail {

void parallel_for_indexed(long count, int threads, const std::function<void(long)>& body) {
  if (count <= 0) return;
  long workers = threads > 0 ? threads : static_cast<long>(std::thread::hardware_concurrency());
  workers = std::max(1L, std::min(workers, count));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errs(count);
  const auto work = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (long w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errs)
    if (e) std::rethrow_exception(e);
}

ScanResult summarize_scan(std::vector<DiagnosticsRecord> records) {
  ScanResult res;
  for (const DiagnosticsRecord& r : records) {
    switch (r.classification) {
      case RecurrenceClass::RecurrentProxy: ++res.n_recurrent; break;
      case RecurrenceClass::BoundedProxy: ++res.n_bounded; break;
      case RecurrenceClass::NonRecurrentProxy: ++res.n_nonrecurrent; break;
      case RecurrenceClass::Degenerate: ++res.n_degenerate; break;
    }
    if (r.classification == RecurrenceClass::NonRecurrentProxy ||
        r.classification == RecurrenceClass::Degenerate)
      res.exceptional.push_back(r.s);
  }
  if (!records.empty())
    res.recurrent_fraction =
        static_cast<double>(res.n_recurrent + res.n_bounded) / static_cast<double>(records.size());
  res.records = std::move(records);
  return res;
}

}  // namespace detail

template <class K>
ScanResult line_scan(const Permutation& p, const std::vector<K>& a, const std::vector<K>& b,
                     const MeasureSampler& sampler, int count, const ScanConfig& cfg) {
  const PositivityVerdict pv = is_positive_pair(p, a, b);
  if (pv.status != Positivity::Positive)
    throw NotPositivePair(
        fmt::format("line base pair is {}; a scan needs Positive", positivity_name(pv.status)));

  const std::vector<long> schedule =
      cfg.schedule.empty() ? default_schedule(1L << 20) : cfg.schedule;
  const std::vector<double> samples = sampler.draw(count);
  const int d = p.d();
  std::vector<double> ad(d), bd(d);
  for (int i = 0; i < d; ++i) {
    ad[i] = to_dbl(a[i]);
    bd[i] = to_dbl(b[i]);
  }

  std::vector<DiagnosticsRecord> recs(samples.size());
  detail::parallel_for_indexed(
      static_cast<long>(samples.size()), cfg.threads, [&](long idx) {
        const double s = samples[idx];
        std::vector<double> as(d);
        for (int i = 0; i < d; ++i) {
          as[i] = ad[i] + s * bd[i];
          if (!(as[i] > 0.0))
            throw InvalidLengths(fmt::format(
                "sample s = {} leaves the length window: a_{} + s*b_{} = {}", s, i + 1, i + 1,
                as[i]));
        }
        DiagnosticsRecord rec = recurrence_diagnostic(p, as, schedule, cfg.zeta_scale);
        rec.s = s;
        rec.verdict = positivity_name(pv.status);
        recs[idx] = std::move(rec);
      });

  ScanResult res = detail::summarize_scan(std::move(recs));
  res.base_verdict = positivity_name(pv.status);
  return res;
}

template ScanResult line_scan<Rat>(const Permutation&, const std::vector<Rat>&,
                                   const std::vector<Rat>&, const MeasureSampler&, int,
                                   const ScanConfig&);
template ScanResult line_scan<Q5>(const Permutation&, const std::vector<Q5>&,
                                  const std::vector<Q5>&, const MeasureSampler&, int,
                                  const ScanConfig&);
template ScanResult line_scan<double>(const Permutation&, const std::vector<double>&,
                                      const std::vector<double>&, const MeasureSampler&, int,
                                      const ScanConfig&);

ScanResult mahler_scan(int d, const MeasureSampler& sampler, int count, const ScanConfig& cfg) {
  if (d < 2) throw DimensionMismatch("power curve needs d >= 2");
  const Permutation rev = Permutation::reversal(d);
  const std::vector<long> schedule =
      cfg.schedule.empty() ? default_schedule(1L << 20) : cfg.schedule;
  const std::vector<double> samples = sampler.draw(count);

  std::vector<DiagnosticsRecord> recs(samples.size());
  std::vector<char> in_cone(samples.size(), 0);
  detail::parallel_for_indexed(
      static_cast<long>(samples.size()), cfg.threads, [&](long idx) {
        const double s = samples[idx];
        const CurvePoint<double> pt = mahler_curve(d, s);
        std::vector<double> neg(d);
        for (int i = 0; i < d; ++i) neg[i] = -pt.beta_prime[i];
        in_cone[idx] = cone_contains(rev, neg) ? 1 : 0;
        DiagnosticsRecord rec = recurrence_diagnostic(rev, pt.beta, schedule, cfg.zeta_scale);
        rec.s = s;
        rec.verdict = in_cone[idx] ? "InCone" : "NotInCone";
        recs[idx] = std::move(rec);
      });

  ScanResult res = detail::summarize_scan(std::move(recs));
  for (const char c : in_cone)
    if (!c) ++res.cone_failures;
  return res;
}

CompactnessTrace geodesic_compactness_trace(const Permutation& p, const std::vector<double>& a,
                                            const std::vector<double>& b,
                                            const std::vector<double>& t_grid,
                                            double zeta_scale) {
  const TranslationSurface<double> q = suspend(p, a, b);
  const HeightData<double> h = heights(p, b);
  double c1 = h.L[0], c2 = h.L[0];
  for (const double v : h.L) {
    c1 = std::min(c1, v);
    c2 = std::max(c2, v);
  }
  if (!(c1 > 0.0))
    throw SuspensionInvalid(fmt::format("rectangle heights must be positive (min L = {})", c1));

  CompactnessTrace out;
  out.c1 = c1;
  out.c2 = c2;
  out.kappa1 = std::sqrt(2.0 * c2);
  out.kappa2 = 1.0 + (1.0 + 2.0 * c2) / c1;

  const Iet<double> iet(p, a);
  std::vector<long> ns(t_grid.size());
  for (size_t k = 0; k < t_grid.size(); ++k)
    ns[k] = static_cast<long>(std::floor(out.kappa2 * std::exp(0.5 * t_grid[k])));
  std::vector<long> uniq(ns);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::map<long, double> eps_at;
  for (const auto& [n, eps] : iet.epsilon_trace(uniq)) eps_at[n] = eps;

  DiagnosticsRecord rec;
  rec.a_s = a;
  rec.zeta_lo = zeta_scale * iet.total();
  rec.schedule_cap = uniq.empty() ? 0 : uniq.back();

  for (size_t k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    const long n = ns[k];
    const double eps = eps_at.at(n);
    const double lhs = static_cast<double>(n) * eps;
    const double ph = phi(apply_matrix(q, geodesic_matrix(t)));
    rec.eps_trace.push_back({n, eps, lhs});
    rec.phi_trace.push_back({t, ph});

    const double rhs = out.kappa2 * ph;
    if (!(lhs <= rhs * (1.0 + 1e-12) + 1e-12))
      throw InternalError(fmt::format(
          "compactness bound violated at t = {}: n = {}, n*eps_n = {} > kappa2*phi = {}", t, n,
          lhs, rhs));

    if (lhs > 0.0) {
      CompactnessTrace::FirstOnePoint fo;
      fo.n = n;
      fo.zeta = lhs;
      fo.t = 2.0 * std::log(static_cast<double>(n) * std::sqrt(2.0 * c2 / fo.zeta));
      fo.bound = out.kappa1 * std::sqrt(fo.zeta);
      // only the ball of radius `bound` matters, so search that instead of
      // a full shortest-connection pass on the heavily sheared surface
      const TranslationSurface<double> qt = apply_matrix(q, geodesic_matrix(fo.t));
      const double radius = fo.bound * (1.0 + 1e-9);
      fo.phi = std::numeric_limits<double>::infinity();
      for (const SaddleConnection<double>& sc : saddle_connections_up_to(qt, radius))
        fo.phi = std::min(fo.phi, sc.len());
      out.first_one.push_back(fo);
    }
  }
  rec.classification = classify(rec.eps_trace, rec.zeta_lo);
  out.record = std::move(rec);
  return out;
}

}  // namespace ietsurf
