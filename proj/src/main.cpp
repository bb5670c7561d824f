#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ietsurf/errors.hpp"
#include "ietsurf/runner.hpp"

namespace {

using ietsurf::RunConfig;

void add_sigma(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--sigma", cfg.sigma, "permutation image, e.g. 4,3,2,1")->required();
}

void add_exact(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_flag("--exact", cfg.exact, "reject float literals (exact backends only)");
}

void add_ab(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--a", cfg.a, "lengths: rationals, ints, phi, or decimals")->required();
  cmd->add_option("--b", cfg.b, "heights; token b0 = canonical direction")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interval exchange transformations, suspended translation surfaces,\n"
               "and recurrence experiments"};
  app.set_version_flag("--version", "ietsurf 0.3.0");
  app.require_subcommand(1);

  RunConfig cfg;
  const auto name = [&cfg](CLI::App* cmd, const char* dotted) {
    cmd->callback([&cfg, dotted] { cfg.command = dotted; });
  };

  // ---- perm ----
  auto* perm = app.add_subcommand("perm", "permutation combinatorics");
  perm->require_subcommand(1);
  auto* perm_info = perm->add_subcommand("info", "irreducibility and stratum data");
  add_sigma(perm_info, cfg);
  name(perm_info, "perm.info");

  // ---- iet ----
  auto* iet = app.add_subcommand("iet", "interval exchange dynamics");
  iet->require_subcommand(1);
  auto* iet_eval = iet->add_subcommand("eval", "apply the map to a point");
  auto* iet_orbit = iet->add_subcommand("orbit", "forward orbit of a point");
  auto* iet_eps = iet->add_subcommand("eps", "eps_n trace on a geometric schedule");
  auto* iet_conn = iet->add_subcommand("connections", "orbit hits among discontinuities");
  for (CLI::App* sub : {iet_eval, iet_orbit, iet_eps, iet_conn}) {
    add_sigma(sub, cfg);
    sub->add_option("--lengths", cfg.a, "lengths: rationals, ints, phi, or decimals")
        ->required();
    add_exact(sub, cfg);
  }
  iet_eval->add_option("--x", cfg.x, "point in [0, sum a)")->required();
  iet_orbit->add_option("--x", cfg.x, "point in [0, sum a)")->required();
  iet_orbit->add_option("--n", cfg.n, "number of steps")->required();
  iet_eps->add_option("--n", cfg.n, "schedule horizon (default 65536)");
  iet_conn->add_option("--mmax", cfg.mmax, "iterate horizon (default 10000)");
  name(iet_eval, "iet.eval");
  name(iet_orbit, "iet.orbit");
  name(iet_eps, "iet.eps");
  name(iet_conn, "iet.connections");

  // ---- pair ----
  auto* pair = app.add_subcommand("pair", "the antisymmetric pairing and positivity");
  pair->require_subcommand(1);
  auto* pair_q = pair->add_subcommand("q", "pairing matrix, rank and nullity");
  add_sigma(pair_q, cfg);
  name(pair_q, "pair.q");
  auto* pair_cone = pair->add_subcommand("cone", "membership in the positive cone");
  add_sigma(pair_cone, cfg);
  pair_cone->add_option("--b", cfg.b, "direction; token b0 = canonical direction")->required();
  add_exact(pair_cone, cfg);
  name(pair_cone, "pair.cone");
  auto* pair_null = pair->add_subcommand("null", "integer basis of the null space");
  add_sigma(pair_null, cfg);
  name(pair_null, "pair.null");
  auto* pair_pos = pair->add_subcommand("positive", "positive-pair semi-decision");
  add_sigma(pair_pos, cfg);
  add_ab(pair_pos, cfg);
  pair_pos->add_option("--seeds", cfg.seeds, "measure-sampling seeds (default 32)");
  pair_pos->add_option("--orbit", cfg.orbit, "Birkhoff orbit length (default 10^6)");
  pair_pos->add_option("--mmax", cfg.mmax, "connection horizon (default 10^4)");
  pair_pos->add_option("--seed", cfg.seed, "rng seed (default 1)");
  pair_pos->add_flag("--require-positive", cfg.require_positive,
                     "exit 2 when the verdict is NotPositive");
  add_exact(pair_pos, cfg);
  name(pair_pos, "pair.positive");

  // ---- surface ----
  auto* surf = app.add_subcommand("surface", "suspensions and flat geometry");
  surf->require_subcommand(1);
  auto* s_susp = surf->add_subcommand("suspend", "build the suspension polygon");
  auto* s_flow = surf->add_subcommand("flow", "apply a geodesic/horocycle/rotation matrix");
  auto* s_phi = surf->add_subcommand("phi", "shortest saddle connection");
  auto* s_horiz = surf->add_subcommand("horiz", "horizontal saddle connections");
  auto* s_rel = surf->add_subcommand("rel", "slide singularities along a null direction");
  for (CLI::App* sub : {s_susp, s_flow, s_phi, s_horiz, s_rel}) {
    add_sigma(sub, cfg);
    add_ab(sub, cfg);
  }
  for (CLI::App* sub : {s_susp, s_phi, s_horiz, s_rel}) add_exact(sub, cfg);
  s_susp->add_option("--svg", cfg.svg, "write a polygon figure");
  // the horocycle flag is spelled --h; keep help reachable via --help only
  s_flow->set_help_flag("--help", "print help");
  s_flow->add_option("--g", cfg.g, "geodesic time t");
  s_flow->add_option("--h", cfg.h, "horocycle shear s");
  s_flow->add_option("--r", cfg.r, "rotation angle theta");
  s_flow->add_option("--svg", cfg.svg, "write a polygon figure");
  s_phi->add_option("--rho", cfg.rho, "also list all connections up to this length");
  s_rel->add_option("--rel-dir", cfg.rel_dir, "null-space direction")->required();
  s_rel->add_option("--t", cfg.t, "deformation time")->required();
  s_rel->add_option("--svg", cfg.svg, "write a polygon figure");
  name(s_susp, "surface.suspend");
  name(s_flow, "surface.flow");
  name(s_phi, "surface.phi");
  name(s_horiz, "surface.horiz");
  name(s_rel, "surface.rel");

  // ---- exp ----
  auto* exp = app.add_subcommand("exp", "statistical experiments and scans");
  exp->require_subcommand(1);
  auto* e_line = exp->add_subcommand("line-scan", "diagnostics along a + s*b");
  auto* e_mahler = exp->add_subcommand("mahler", "power-curve cone check and diagnostics");
  auto* e_trace = exp->add_subcommand("trace", "geodesic compactness trace");
  auto* e_diag = exp->add_subcommand("diagnose", "recurrence diagnostics of one IET");

  add_sigma(e_line, cfg);
  add_ab(e_line, cfg);
  add_exact(e_line, cfg);
  e_line->add_option("--window", cfg.window, "parameter window LO,HI")->required();
  e_mahler->add_option("--d", cfg.d, "number of intervals")->required();
  e_mahler->add_option("--window", cfg.window, "parameter window LO,HI")->required();
  for (CLI::App* sub : {e_line, e_mahler}) {
    sub->add_option("--samples", cfg.samples, "number of samples")->required();
    sub->add_option("--sampler", cfg.sampler, "lebesgue|cantor|grid (default lebesgue)");
    sub->add_option("--seed", cfg.seed, "rng seed (default 1)");
    sub->add_option("--depth", cfg.depth, "cantor truncation depth (default 20)");
    sub->add_option("--cap", cfg.cap, "schedule cap (default 2^20)");
    sub->add_option("--zeta", cfg.zeta, "threshold scale (default 0.05)");
    sub->add_option("--threads", cfg.threads, "scan workers (default: all cores)");
    sub->add_option("--out", cfg.out, "CSV path; summary JSON lands next to it");
    sub->add_option("--svg", cfg.svg, "write an overview plot");
  }

  add_sigma(e_trace, cfg);
  add_ab(e_trace, cfg);
  e_trace->add_option("--window", cfg.window, "time window LO,HI (default 0,8)");
  e_trace->add_option("--samples", cfg.samples, "grid points (default 17)");
  e_trace->add_option("--zeta", cfg.zeta, "threshold scale (default 0.05)");
  e_trace->add_option("--out", cfg.out, "CSV path");
  e_trace->add_option("--svg", cfg.svg, "write trace plots");

  add_sigma(e_diag, cfg);
  e_diag->add_option("--a", cfg.a, "lengths")->required();
  e_diag->add_option("--cap", cfg.cap, "schedule cap (default 2^20)");
  e_diag->add_option("--zeta", cfg.zeta, "threshold scale (default 0.05)");
  e_diag->add_option("--out", cfg.out, "CSV path");
  e_diag->add_option("--svg", cfg.svg, "write a trace plot");

  name(e_line, "exp.line-scan");
  name(e_mahler, "exp.mahler");
  name(e_trace, "exp.trace");
  name(e_diag, "exp.diagnose");

  CLI11_PARSE(app, argc, argv);

  try {
    return ietsurf::run(cfg, std::cout);
  } catch (const ietsurf::Error& e) {
    nlohmann::ordered_json err;
    err["error"] = e.code();
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = "InternalError";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
