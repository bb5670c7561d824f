#pragma once

// Desk-scale statistical experiments: recurrence diagnostics on n*eps_n
// traces, parameter scans along lines a + s*b, the power curve
// (s, s^2, ..., s^d)/||.||_1 with its closed-form derivative, geodesic
// compactness traces, and the measure samplers driving the scans.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ietsurf/errors.hpp"
#include "ietsurf/iet.hpp"
#include "ietsurf/pairing.hpp"
#include "ietsurf/perm.hpp"
#include "ietsurf/scalars.hpp"

namespace ietsurf {

// "Recurrence type" (limsup n*eps_n > 0) and "bounded type" (liminf > 0)
// are tail statements no finite run can decide; these labels are explicit
// finite-schedule proxies against a threshold zeta_lo.  Bounded-type
// behavior implies recurrence-type behavior, so summaries that count
// recurrent samples include BoundedProxy ones.
enum class RecurrenceClass { RecurrentProxy, BoundedProxy, NonRecurrentProxy, Degenerate };

const char* recurrence_class_name(RecurrenceClass c);

struct TracePoint {
  long n = 0;
  double eps_n = 0.0;
  double n_eps_n = 0.0;
};

struct PhiPoint {
  double t = 0.0;
  double phi = 0.0;
};

struct DiagnosticsRecord {
  double s = 0.0;                     // parameter along the scanned family
  std::vector<double> a_s;            // lengths at that parameter
  std::string verdict;                // scan-level verdict ("" when none applies)
  std::vector<TracePoint> eps_trace;  // (n, eps_n, n*eps_n) at schedule points
  std::vector<PhiPoint> phi_trace;    // (t, phi(g_t q)), trace runs only
  RecurrenceClass classification = RecurrenceClass::NonRecurrentProxy;
  double zeta_lo = 0.0;               // threshold the classification used
  long schedule_cap = 0;              // largest n in the schedule
};

// Geometric schedule 2^4, 2^5, ..., capped at (and always including) cap.
std::vector<long> default_schedule(long cap);

// Classification rules, applied to the trace in this order:
//   Degenerate        eps_n == 0 at some schedule point (an orbit of a
//                     discontinuity hits another one: connection);
//   BoundedProxy      min n*eps_n over the whole schedule >= zeta_lo;
//   RecurrentProxy    max n*eps_n over the top half of the schedule
//                     (points with index >= size/2) >= zeta_lo;
//   NonRecurrentProxy otherwise.
// zeta_lo = zeta_scale * sum(a); both are recorded.
DiagnosticsRecord recurrence_diagnostic(const Permutation& p, const std::vector<double>& a,
                                        const std::vector<long>& schedule,
                                        double zeta_scale = 0.05);

struct MeasureSampler {
  enum class Kind { Lebesgue, CantorCoinToss, Grid };
  Kind kind = Kind::Lebesgue;
  double lo = 0.0, hi = 1.0;  // window the samples are mapped into
  int depth = 20;             // CantorCoinToss truncation depth
  uint64_t seed = 1;

  // count points in [lo, hi], deterministic in (kind, window, depth, seed).
  // Lebesgue: i.i.d. uniform.  CantorCoinToss: sum d_k 3^-k, d_k in {0,2}
  // fair bits to `depth`, affinely mapped onto the window.  Grid: evenly
  // spaced including endpoints (midpoint when count == 1), no randomness.
  std::vector<double> draw(int count) const;
};

// count i.i.d. truncated coin-tossing points in [0,1].
std::vector<double> cantor_sampler(int depth, int count, uint64_t rng_seed);

struct ScanConfig {
  std::vector<long> schedule;  // empty => default_schedule(1 << 20)
  double zeta_scale = 0.05;
  int threads = 0;  // <= 0 => hardware concurrency
};

struct ScanResult {
  std::vector<DiagnosticsRecord> records;  // in sample order
  long n_recurrent = 0;
  long n_bounded = 0;
  long n_nonrecurrent = 0;
  long n_degenerate = 0;
  // (RecurrentProxy + BoundedProxy) / N; see the enum note above.
  double recurrent_fraction = 0.0;
  std::vector<double> exceptional;  // s of NonRecurrentProxy/Degenerate samples
  std::string base_verdict;         // line scans: positivity verdict of (a, b)
  long cone_failures = 0;           // power-curve scans: #samples outside the cone
};

namespace detail {

// Run body(i) for i in [0, count) on up to `threads` workers.  Results must
// be written into index-addressed slots by the body; the lowest-index
// exception (if any) is rethrown after all workers finish.
void parallel_for_indexed(long count, int threads, const std::function<void(long)>& body);

ScanResult summarize_scan(std::vector<DiagnosticsRecord> records);

}  // namespace detail

// Diagnostics of a(s) = a + s*b at each sampled s.  The pair (a, b) must be
// Positive (checked once, on the calling backend; NotPositivePair otherwise),
// and every sampled s must keep a + s*b strictly positive (InvalidLengths
// names the offending sample).  Every record carries the pair's verdict.
template <class K>
ScanResult line_scan(const Permutation& p, const std::vector<K>& a, const std::vector<K>& b,
                     const MeasureSampler& sampler, int count, const ScanConfig& cfg = {});

// gamma_i(s) = sum_{l=i}^{i+d-1} (2i - l - 1) s^l; sums to 0 over i.
template <class K>
std::vector<K> mahler_gamma(int d, const K& s) {
  std::vector<K> pw(2 * d, K(1));
  for (int l = 1; l <= 2 * d - 1; ++l) pw[l] = pw[l - 1] * s;
  std::vector<K> g(d, K(0));
  for (int i = 1; i <= d; ++i)
    for (int l = i; l <= i + d - 1; ++l) g[i - 1] += K(2 * i - l - 1) * pw[l];
  return g;
}

template <class K>
struct CurvePoint {
  std::vector<K> beta;        // (s, s^2, ..., s^d) / R,  R = sum_j s^j
  std::vector<K> beta_prime;  // gamma(s) / R^2 (exact derivative of beta)
};

template <class K>
CurvePoint<K> mahler_curve(int d, const K& s) {
  if (d < 2) throw DimensionMismatch("power curve needs d >= 2");
  if (!(sign_of(s) > 0)) throw NonpositiveParameter("curve parameter must be positive");
  std::vector<K> pw(d + 1, K(1));
  for (int i = 1; i <= d; ++i) pw[i] = pw[i - 1] * s;
  K r(0);
  for (int i = 1; i <= d; ++i) r += pw[i];
  CurvePoint<K> out;
  out.beta.reserve(d);
  for (int i = 1; i <= d; ++i) out.beta.push_back(pw[i] / r);
  const K r2 = r * r;
  for (K& g : mahler_gamma(d, s)) out.beta_prime.push_back(g / r2);
  return out;
}

// For each sampled s > 0: check that -beta'(s) lies in the positive cone of
// the reversal permutation (the curve's tangent points into the good
// directions), then run the recurrence diagnostic on beta(s).  Per-record
// verdict is "InCone"/"NotInCone"; cone failures are tallied in the summary.
ScanResult mahler_scan(int d, const MeasureSampler& sampler, int count,
                       const ScanConfig& cfg = {});

struct CompactnessTrace {
  DiagnosticsRecord record;  // eps trace (one point per t) + phi trace
  double c1 = 0.0;           // min_i L_i over the suspension's rectangle heights
  double c2 = 0.0;           // max_i L_i
  double kappa1 = 0.0;       // sqrt(2 c2)
  double kappa2 = 0.0;       // 1 + (1 + 2 c2) / c1

  // Converse direction, evaluated at each grid n with zeta = n*eps_n > 0:
  // flowing to t = 2 log(n sqrt(2 c2 / zeta)) should compress the witness
  // to phi(g_t q) <= kappa1 * sqrt(zeta).  Recorded, not asserted (the
  // guarantee needs n large; callers decide which n to hold it to).
  struct FirstOnePoint {
    long n = 0;
    double zeta = 0.0;
    double t = 0.0;
    double phi = 0.0;
    double bound = 0.0;  // kappa1 * sqrt(zeta)
  };
  std::vector<FirstOnePoint> first_one;
};

// For each t in the grid: phi(g_t q(a,b)) by saddle-connection enumeration
// against n(t) = floor(kappa2 * e^{t/2}) steps of the base interval exchange.
// The bound n(t)*eps_{n(t)} <= kappa2 * phi(g_t q) is asserted at every grid
// point (InternalError on violation: it is a theorem for these constants,
// so a failure is a bug in one of the two sides).
CompactnessTrace geodesic_compactness_trace(const Permutation& p, const std::vector<double>& a,
                                            const std::vector<double>& b,
                                            const std::vector<double>& t_grid,
                                            double zeta_scale = 0.05);

}  // namespace ietsurf
