#include "ietsurf/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

#include "ietsurf/errors.hpp"
#include "ietsurf/experiments.hpp"
#include "ietsurf/iet.hpp"
#include "ietsurf/pairing.hpp"
#include "ietsurf/perm.hpp"
#include "ietsurf/scalars.hpp"
#include "ietsurf/surface.hpp"

namespace ietsurf {

using ojson = nlohmann::ordered_json;

// ------------------------------------------------------------- RunConfig ----

std::string RunConfig::to_json() const {
  ojson j;
  j["command"] = command;
  j["sigma"] = sigma;
  j["a"] = a;
  j["b"] = b;
  j["rel_dir"] = rel_dir;
  j["x"] = x;
  j["g"] = g;
  j["h"] = h;
  j["r"] = r;
  j["rho"] = rho;
  j["t"] = t;
  j["n"] = n;
  j["mmax"] = mmax;
  j["seeds"] = seeds;
  j["orbit"] = orbit;
  j["d"] = d;
  j["samples"] = samples;
  j["sampler"] = sampler;
  j["window"] = window;
  j["seed"] = seed;
  j["depth"] = depth;
  j["cap"] = cap;
  j["zeta"] = zeta;
  j["threads"] = threads;
  j["out"] = out;
  j["svg"] = svg;
  j["exact"] = exact;
  j["require_positive"] = require_positive;
  return j.dump();
}

RunConfig RunConfig::from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad config JSON: ") + e.what());
  }
  RunConfig c;
  try {
    c.command = j.value("command", "");
    c.sigma = j.value("sigma", "");
    // the iet subcommands spell the length vector --lengths; accept both keys
    c.a = j.value("a", j.value("lengths", ""));
    c.b = j.value("b", "");
    c.rel_dir = j.value("rel_dir", "");
    c.x = j.value("x", "");
    c.g = j.value("g", "");
    c.h = j.value("h", "");
    c.r = j.value("r", "");
    c.rho = j.value("rho", "");
    c.t = j.value("t", "");
    c.n = j.value("n", "");
    c.mmax = j.value("mmax", "");
    c.seeds = j.value("seeds", "");
    c.orbit = j.value("orbit", "");
    c.d = j.value("d", "");
    c.samples = j.value("samples", "");
    c.sampler = j.value("sampler", "");
    c.window = j.value("window", "");
    c.seed = j.value("seed", "");
    c.depth = j.value("depth", "");
    c.cap = j.value("cap", "");
    c.zeta = j.value("zeta", "");
    c.threads = j.value("threads", "");
    c.out = j.value("out", "");
    c.svg = j.value("svg", "");
    c.exact = j.value("exact", false);
    c.require_positive = j.value("require_positive", false);
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad config JSON: ") + e.what());
  }
  return c;
}

// ------------------------------------------------------ literal plumbing ----

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : text) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  for (const std::string& tok : out)
    if (tok.empty()) throw ParseError("empty entry in list '" + text + "'");
  return out;
}

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw ParseError(std::string("missing ") + flag);
  return value;
}

long parse_long(const std::string& tok, const char* what) {
  try {
    size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("{}: not an integer: '{}'", what, tok));
  }
}

uint64_t parse_u64(const std::string& tok, const char* what) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("{}: not an unsigned integer: '{}'", what, tok));
  }
}

bool parses_as_rational(const std::string& tok) {
  try {
    parse_rational(tok);
    return true;
  } catch (const Error&) {
    return false;
  }
}

bool parses_as_double(const std::string& tok) {
  try {
    size_t pos = 0;
    (void)std::stod(tok, &pos);
    return pos == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

double parse_double_token(const std::string& tok, const char* what) {
  if (tok == "phi") return 0.5 * (1.0 + std::sqrt(5.0));
  if (parses_as_rational(tok)) return to_dbl(parse_rational(tok));
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("{}: not a numeric literal: '{}'", what, tok));
  }
}

enum class Backend { Rational, Golden, Float };

// rationals stay exact; `phi` lifts to the golden field; any decimal/exponent
// literal drags the whole run onto the float backend (rejected under --exact).
Backend literal_backend(const std::vector<std::vector<std::string>>& token_groups,
                        bool exact_only) {
  Backend bk = Backend::Rational;
  for (const auto& group : token_groups)
    for (const std::string& tok : group) {
      if (tok == "phi") {
        if (bk == Backend::Rational) bk = Backend::Golden;
      } else if (parses_as_rational(tok)) {
        // fine on every backend
      } else if (parses_as_double(tok)) {
        if (exact_only)
          throw ParseError("float literal '" + tok + "' rejected under --exact");
        bk = Backend::Float;
      } else {
        throw ParseError("not a numeric literal: '" + tok + "'");
      }
    }
  if (bk == Backend::Float)
    std::cerr << "warning: float literal present; computing on the float backend\n";
  return bk;
}

template <class K>
K token_to(const std::string& tok, const char* what);

template <>
Rat token_to<Rat>(const std::string& tok, const char* what) {
  if (tok == "phi")
    throw ParseError(fmt::format("{}: 'phi' needs the golden-field backend", what));
  return parse_rational(tok);
}

template <>
Q5 token_to<Q5>(const std::string& tok, const char* what) {
  if (tok == "phi") return Q5::golden();
  (void)what;
  return Q5(parse_rational(tok));
}

template <>
double token_to<double>(const std::string& tok, const char* what) {
  return parse_double_token(tok, what);
}

template <class K>
std::vector<K> parse_vec(const std::string& text, const char* what) {
  std::vector<K> out;
  for (const std::string& tok : split_commas(need(text, what)))
    out.push_back(token_to<K>(tok, what));
  return out;
}

// --b accepts the token "b0" for the canonical heights sigma(i) - i.
std::string expand_b0(const std::string& text, const Permutation& p) {
  if (text != "b0") return text;
  std::string out;
  for (const long long v : universal_direction(p)) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto toks = split_commas(need(text, "--window"));
  if (toks.size() != 2) throw ParseError("--window wants LO,HI");
  const double lo = parse_double_token(toks[0], "--window");
  const double hi = parse_double_token(toks[1], "--window");
  if (!(lo <= hi)) throw ParseError("--window wants LO <= HI");
  return {lo, hi};
}

template <class F>
int dispatch_backend(Backend bk, F&& f) {
  switch (bk) {
    case Backend::Rational: return f(Rat(0));
    case Backend::Golden: return f(Q5(0));
    case Backend::Float: return f(double(0));
  }
  throw InternalError("unhandled backend");
}

// ------------------------------------------------------------ JSON bits ----

template <class K>
double dbl(const K& v) {
  return to_dbl(v);
}

template <class K>
std::vector<double> doubles_of(const std::vector<K>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const K& e : v) out.push_back(to_dbl(e));
  return out;
}

template <class K>
std::vector<std::string> strings_of(const std::vector<K>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const K& e : v) out.push_back(to_string(e));
  return out;
}

template <class K>
ojson connection_json(const SaddleConnection<K>& sc) {
  ojson j;
  j["x"] = to_dbl(sc.hol.x);
  j["y"] = to_dbl(sc.hol.y);
  j["len"] = to_dbl(sc.len());
  j["from"] = sc.from;
  j["to"] = sc.to;
  return j;
}

template <class K>
ojson surface_json(const TranslationSurface<K>& q) {
  ojson j;
  j["sigma"] = q.perm.image();
  j["d"] = q.d();
  j["a"] = doubles_of(q.a);
  j["b"] = doubles_of(q.b);
  j["area"] = to_dbl(q.area());
  ojson verts;
  ojson tops = ojson::array(), bots = ojson::array();
  for (const auto& pnt : q.top) tops.push_back({to_dbl(pnt.x), to_dbl(pnt.y)});
  for (const auto& pnt : q.bot) bots.push_back({to_dbl(pnt.x), to_dbl(pnt.y)});
  verts["top"] = std::move(tops);
  verts["bottom"] = std::move(bots);
  j["vertices"] = std::move(verts);
  ojson pairing = ojson::array();
  for (int i = 1; i <= q.d(); ++i) pairing.push_back({i, q.perm(i)});
  j["edge_pairing"] = std::move(pairing);  // top edge i glues to bottom edge sigma(i)
  ojson top_lab = ojson::array(), bot_lab = ojson::array();
  for (int i = 0; i <= q.d(); ++i) top_lab.push_back(q.strat.class_of_upper(i));
  for (int jj = 0; jj <= q.d(); ++jj) bot_lab.push_back(q.strat.class_of_lower(q.d(), jj));
  j["top_labels"] = std::move(top_lab);
  j["bottom_labels"] = std::move(bot_lab);
  ojson st;
  st["k"] = q.strat.k;
  st["orders"] = q.strat.orders;
  st["genus"] = q.strat.genus;
  j["stratum"] = std::move(st);
  return j;
}

void emit(std::ostream& os, const ojson& j) { os << j.dump(2) << "\n"; }

// ------------------------------------------------------------------ SVG ----

const char* const kPalette[] = {"#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400",
                                "#16a085", "#7f8c8d", "#f39c12", "#2c3e50", "#e84393"};
constexpr int kPaletteSize = 10;

struct SvgMap {
  double minx, miny, scale, height, margin;
  double x(double v) const { return margin + (v - minx) * scale; }
  double y(double v) const { return height - (margin + (v - miny) * scale); }
};

void write_polygon_svg(const std::string& path, const TranslationSurface<double>& q) {
  const int d = q.d();
  // boundary cycle P_0, P'_1..P'_{d-1}, P_d, P_{d-1}..P_1
  std::vector<std::array<double, 2>> cyc;
  std::vector<int> slot;  // vertex slot id per cycle position
  cyc.push_back({q.top[0].x, q.top[0].y});
  slot.push_back(slot_upper(0));
  for (int j = 1; j < d; ++j) {
    cyc.push_back({q.bot[j].x, q.bot[j].y});
    slot.push_back(slot_lower(d, j));
  }
  cyc.push_back({q.top[d].x, q.top[d].y});
  slot.push_back(slot_upper(d));
  for (int i = d - 1; i >= 1; --i) {
    cyc.push_back({q.top[i].x, q.top[i].y});
    slot.push_back(slot_upper(i));
  }

  double minx = cyc[0][0], maxx = minx, miny = cyc[0][1], maxy = miny;
  for (const auto& pnt : cyc) {
    minx = std::min(minx, pnt[0]);
    maxx = std::max(maxx, pnt[0]);
    miny = std::min(miny, pnt[1]);
    maxy = std::max(maxy, pnt[1]);
  }
  const double spanx = std::max(maxx - minx, 1e-9), spany = std::max(maxy - miny, 1e-9);
  const double margin = 36.0, width = 760.0;
  const double scale = (width - 2 * margin) / spanx;
  const double height = spany * scale + 2 * margin;
  const SvgMap m{minx, miny, scale, height, margin};

  std::ofstream f(path);
  if (!f) throw ParseError("cannot write SVG file '" + path + "'");
  f << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      width, height, width, height);
  f << "<polygon points=\"";
  for (const auto& pnt : cyc) f << fmt::format("{:.3f},{:.3f} ", m.x(pnt[0]), m.y(pnt[1]));
  f << "\" fill=\"#f7f6f2\" stroke=\"none\"/>\n";

  const int n = 2 * d;
  for (int e = 0; e < n; ++e) {
    const auto& pa = cyc[e];
    const auto& pb = cyc[(e + 1) % n];
    // cycle edge e is bottom edge e+1 for e < d, top edge 2d-e otherwise;
    // gluing partners (top i, bottom sigma(i)) share a color
    const int color_idx =
        e < d ? q.perm.inverse_of(e + 1) : n - e;
    const bool is_top = e >= d;
    f << fmt::format(
        "<line x1=\"{:.3f}\" y1=\"{:.3f}\" x2=\"{:.3f}\" y2=\"{:.3f}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        m.x(pa[0]), m.y(pa[1]), m.x(pb[0]), m.y(pb[1]),
        kPalette[(color_idx - 1) % kPaletteSize]);
    const double mx = 0.5 * (m.x(pa[0]) + m.x(pb[0]));
    const double my = 0.5 * (m.y(pa[1]) + m.y(pb[1]));
    const std::string label =
        is_top ? std::to_string(n - e) : (std::to_string(e + 1) + "'");
    f << fmt::format(
        "<text x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"12\" fill=\"#444\" "
        "text-anchor=\"middle\">{}</text>\n",
        mx, my + (is_top ? -5.0 : 13.0), label);
  }
  for (int c = 0; c < n; ++c) {
    const int cls = q.strat.slot_class[slot[c]];
    f << fmt::format(
        "<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"4\" fill=\"{}\" stroke=\"#222\"/>\n",
        m.x(cyc[c][0]), m.y(cyc[c][1]), kPalette[cls % kPaletteSize]);
  }
  f << "</svg>\n";
}

// one frame + polyline per series, stacked
void write_trace_svg(const std::string& path,
                     const std::vector<std::pair<std::string, std::vector<std::array<double, 2>>>>&
                         series) {
  const double width = 720.0, panel = 220.0, margin = 42.0;
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write SVG file '" + path + "'");
  const double height = panel * static_cast<double>(series.size());
  f << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      width, height, width, height);
  double top = 0.0;
  for (const auto& [name, pts] : series) {
    double minx = 0, maxx = 1, miny = 0, maxy = 1;
    if (!pts.empty()) {
      minx = maxx = pts[0][0];
      miny = maxy = pts[0][1];
      for (const auto& pnt : pts) {
        minx = std::min(minx, pnt[0]);
        maxx = std::max(maxx, pnt[0]);
        miny = std::min(miny, pnt[1]);
        maxy = std::max(maxy, pnt[1]);
      }
    }
    if (maxx - minx < 1e-12) maxx = minx + 1;
    if (maxy - miny < 1e-12) maxy = miny + 1;
    const double sx = (width - 2 * margin) / (maxx - minx);
    const double sy = (panel - 2 * margin) / (maxy - miny);
    f << fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
        "stroke=\"#999\"/>\n",
        margin, top + margin, width - 2 * margin, panel - 2 * margin);
    f << "<polyline fill=\"none\" stroke=\"#2980b9\" stroke-width=\"1.5\" points=\"";
    for (const auto& pnt : pts)
      f << fmt::format("{:.2f},{:.2f} ", margin + (pnt[0] - minx) * sx,
                       top + panel - margin - (pnt[1] - miny) * sy);
    f << "\"/>\n";
    f << fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" fill=\"#333\">{} "
        "[{:.4g},{:.4g}] x [{:.4g},{:.4g}]</text>\n",
        margin, top + margin - 8, name, minx, maxx, miny, maxy);
    top += panel;
  }
  f << "</svg>\n";
}

// ------------------------------------------------------------- CSV + co ----

std::string summary_path(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() >= ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
    return out.substr(0, out.size() - ext.size()) + ".summary.json";
  return out + ".summary.json";
}

std::string csv_header(int d) {
  std::string h = "s";
  for (int i = 1; i <= d; ++i) h += fmt::format(",a_{}", i);
  h += ",verdict,n,eps_n,n_eps_n,t,phi,classification";
  return h;
}

struct CsvSink {
  std::ofstream file;
  explicit CsvSink(const std::string& path, int d) {
    file.open(path, std::ios::binary);  // keep \n endings stable everywhere
    if (!file) throw ParseError("cannot write CSV file '" + path + "'");
    file << csv_header(d) << "\n";
  }
};

// one row per (record, eps point); trace rows additionally carry (t, phi)
void append_record_rows(CsvSink& sink, const DiagnosticsRecord& rec, bool with_s,
                        bool with_t_phi) {
  const std::string s_txt = with_s ? fmt::format("{}", rec.s) : std::string();
  std::string a_txt;
  for (const double v : rec.a_s) a_txt += fmt::format(",{}", v);
  const char* cls = recurrence_class_name(rec.classification);
  for (size_t k = 0; k < rec.eps_trace.size(); ++k) {
    const TracePoint& pt = rec.eps_trace[k];
    std::string t_txt, phi_txt;
    if (with_t_phi && k < rec.phi_trace.size()) {
      t_txt = fmt::format("{}", rec.phi_trace[k].t);
      phi_txt = fmt::format("{}", rec.phi_trace[k].phi);
    }
    sink.file << s_txt << a_txt << ',' << rec.verdict << ',' << pt.n << ','
              << fmt::format("{}", pt.eps_n) << ',' << fmt::format("{}", pt.n_eps_n) << ','
              << t_txt << ',' << phi_txt << ',' << cls << "\n";
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write file '" + path + "'");
  f << text;
}

ojson scan_summary_json(const RunConfig& cfg, const ScanResult& res) {
  ojson j;
  j["config"] = ojson::parse(cfg.to_json());
  j["samples"] = res.records.size();
  j["counts"] = {{"RecurrentProxy", res.n_recurrent},
                 {"BoundedProxy", res.n_bounded},
                 {"NonRecurrentProxy", res.n_nonrecurrent},
                 {"Degenerate", res.n_degenerate}};
  // bounded-type samples are recurrence evidence too, so they count here
  j["recurrent_fraction"] = res.recurrent_fraction;
  j["exceptional_s"] = res.exceptional;
  if (!res.base_verdict.empty()) j["base_verdict"] = res.base_verdict;
  if (cfg.command == "exp.mahler") j["cone_failures"] = res.cone_failures;
  return j;
}

// ------------------------------------------------------------- commands ----

Permutation perm_of(const RunConfig& cfg) {
  return Permutation::parse(need(cfg.sigma, "--sigma"));
}

int cmd_perm_info(const RunConfig& cfg, std::ostream& os) {
  const Permutation p = perm_of(cfg);
  ojson j;
  j["sigma"] = p.image();
  j["d"] = p.d();
  const bool irr = is_irreducible(p);
  j["irreducible"] = irr;
  if (irr) {
    const StratumData st = singularity_data(p);
    j["admissible"] = is_admissible(p);
    j["k"] = st.k;
    j["orders"] = st.orders;
    j["genus"] = st.genus;
  }
  emit(os, j);
  return 0;
}

int cmd_iet(const RunConfig& cfg, std::ostream& os) {
  const Permutation p = perm_of(cfg);
  std::vector<std::vector<std::string>> groups = {split_commas(need(cfg.a, "--lengths"))};
  if (!cfg.x.empty()) groups.push_back({cfg.x});
  const Backend bk = literal_backend(groups, cfg.exact);

  return dispatch_backend(bk, [&](auto zero) {
    using K = decltype(zero);
    const Iet<K> iet(p, parse_vec<K>(cfg.a, "--lengths"));
    ojson j;
    j["sigma"] = p.image();
    j["total"] = to_dbl(iet.total());

    if (cfg.command == "iet.eval") {
      const K xv = token_to<K>(need(cfg.x, "--x"), "--x");
      const K out = iet.evaluate(xv);
      j["x"] = to_dbl(xv);
      j["value"] = to_dbl(out);
      if constexpr (is_exact_v<K>) {
        j["x_exact"] = to_string(xv);
        j["value_exact"] = to_string(out);
      }
    } else if (cfg.command == "iet.orbit") {
      const K xv = token_to<K>(need(cfg.x, "--x"), "--x");
      const long steps = parse_long(need(cfg.n, "--n"), "--n");
      if (steps < 0) throw ParseError("--n must be >= 0");
      const std::vector<K> pts = iet.orbit(xv, steps);
      j["points"] = doubles_of(pts);
      if constexpr (is_exact_v<K>) j["points_exact"] = strings_of(pts);
    } else if (cfg.command == "iet.eps") {
      const long horizon = cfg.n.empty() ? 65536 : parse_long(cfg.n, "--n");
      const std::vector<long> schedule = default_schedule(horizon);
      ojson trace = ojson::array();
      for (const auto& [nn, eps] : iet.epsilon_trace(schedule)) {
        ojson row;
        row["n"] = nn;
        row["eps_n"] = to_dbl(eps);
        row["n_eps_n"] = static_cast<double>(nn) * to_dbl(eps);
        if constexpr (is_exact_v<K>) row["eps_n_exact"] = to_string(eps);
        trace.push_back(std::move(row));
      }
      j["trace"] = std::move(trace);
    } else {  // iet.connections
      const long horizon = cfg.mmax.empty() ? 10000 : parse_long(cfg.mmax, "--mmax");
      ojson conns = ojson::array();
      for (const Connection& c : iet.detect_connections(horizon))
        conns.push_back({{"i", c.i}, {"j", c.j}, {"m", c.m}, {"tolerance_match", c.tolerance_match}});
      j["count"] = conns.size();
      j["connections"] = std::move(conns);
    }
    emit(os, j);
    return 0;
  });
}

int cmd_pair(const RunConfig& cfg, std::ostream& os) {
  const Permutation p = perm_of(cfg);
  ojson j;
  j["sigma"] = p.image();

  if (cfg.command == "pair.q") {
    const QForm qf = q_matrix(p);
    j["matrix"] = qf.m;
    const auto null_basis = null_space(p);
    j["nullity"] = null_basis.size();
    j["rank"] = p.d() - static_cast<int>(null_basis.size());
    emit(os, j);
    return 0;
  }
  if (cfg.command == "pair.null") {
    const auto basis = null_space(p);
    j["dimension"] = basis.size();
    j["basis"] = basis;
    emit(os, j);
    return 0;
  }

  const std::string b_text = expand_b0(need(cfg.b, "--b"), p);
  if (cfg.command == "pair.cone") {
    const Backend bk = literal_backend({split_commas(b_text)}, cfg.exact);
    return dispatch_backend(bk, [&](auto zero) {
      using K = decltype(zero);
      const std::vector<K> b = parse_vec<K>(b_text, "--b");
      const HeightData<K> hd = heights(p, b);
      j["in_cone"] = cone_contains(p, b);
      j["L"] = doubles_of(hd.L);
      emit(os, j);
      return 0;
    });
  }

  // pair.positive
  const Backend bk =
      literal_backend({split_commas(need(cfg.a, "--a")), split_commas(b_text)}, cfg.exact);
  return dispatch_backend(bk, [&](auto zero) {
    using K = decltype(zero);
    PositivityConfig pc;
    if (!cfg.seeds.empty()) pc.seeds = static_cast<int>(parse_long(cfg.seeds, "--seeds"));
    if (!cfg.orbit.empty()) pc.orbit_len = parse_long(cfg.orbit, "--orbit");
    if (!cfg.mmax.empty()) pc.m_max = parse_long(cfg.mmax, "--mmax");
    if (!cfg.seed.empty()) pc.rng_seed = parse_u64(cfg.seed, "--seed");
    const PositivityVerdict v =
        is_positive_pair(p, parse_vec<K>(cfg.a, "--a"), parse_vec<K>(b_text, "--b"), pc);
    j["verdict"] = positivity_name(v.status);
    j["margin"] = v.margin;
    j["witness_value"] = v.witness_value;
    if (v.connection_witness) {
      const Connection& c = *v.connection_witness;
      j["connection_witness"] = {{"i", c.i}, {"j", c.j}, {"m", c.m}};
    } else {
      j["connection_witness"] = nullptr;
    }
    if (v.frequency_witness)
      j["frequency_witness"] = *v.frequency_witness;
    else
      j["frequency_witness"] = nullptr;
    j["note"] = v.note;
    j["params"] = {{"seeds", v.cfg.seeds},
                   {"orbit_len", v.cfg.orbit_len},
                   {"m_max", v.cfg.m_max},
                   {"rng_seed", v.cfg.rng_seed}};
    emit(os, j);
    return (cfg.require_positive && v.status == Positivity::NotPositive) ? 2 : 0;
  });
}

int cmd_surface(const RunConfig& cfg, std::ostream& os) {
  const Permutation p = perm_of(cfg);
  const std::string b_text = expand_b0(need(cfg.b, "--b"), p);
  std::vector<std::vector<std::string>> groups = {split_commas(need(cfg.a, "--a")),
                                                  split_commas(b_text)};
  if (!cfg.rel_dir.empty()) groups.push_back(split_commas(cfg.rel_dir));
  if (!cfg.t.empty()) groups.push_back({cfg.t});
  if (!cfg.rho.empty()) groups.push_back({cfg.rho});
  const Backend bk = literal_backend(groups, cfg.exact);

  return dispatch_backend(bk, [&](auto zero) {
    using K = decltype(zero);
    const TranslationSurface<K> q =
        suspend(p, parse_vec<K>(cfg.a, "--a"), parse_vec<K>(b_text, "--b"));

    if (cfg.command == "surface.suspend") {
      ojson j = surface_json(q);
      if (!cfg.svg.empty()) write_polygon_svg(cfg.svg, to_double(q));
      emit(os, j);
      return 0;
    }
    if (cfg.command == "surface.flow") {
      const int given = (!cfg.g.empty()) + (!cfg.h.empty()) + (!cfg.r.empty());
      if (given != 1) throw ParseError("surface flow wants exactly one of --g / --h / --r");
      Mat2 mat;
      if (!cfg.g.empty()) mat = geodesic_matrix(parse_double_token(cfg.g, "--g"));
      else if (!cfg.h.empty()) mat = horocycle_matrix(parse_double_token(cfg.h, "--h"));
      else mat = rotation_matrix(parse_double_token(cfg.r, "--r"));
      const TranslationSurface<double> moved = apply_matrix(to_double(q), mat);
      ojson j = surface_json(moved);
      if (!cfg.svg.empty()) write_polygon_svg(cfg.svg, moved);
      emit(os, j);
      return 0;
    }
    if (cfg.command == "surface.phi") {
      ojson j;
      j["sigma"] = p.image();
      const auto [len, best] = shortest_sc(q);
      j["phi"] = to_dbl(len);
      if constexpr (is_exact_v<K>) j["phi_exact"] = to_string(len);
      j["shortest"] = connection_json(best);
      if (!cfg.rho.empty()) {
        const K radius = token_to<K>(cfg.rho, "--rho");
        ojson list = ojson::array();
        for (const auto& sc : saddle_connections_up_to(q, radius))
          list.push_back(connection_json(sc));
        j["rho"] = to_dbl(radius);
        j["count"] = list.size();
        j["connections"] = std::move(list);
      }
      emit(os, j);
      return 0;
    }
    if (cfg.command == "surface.horiz") {
      ojson j;
      j["sigma"] = p.image();
      ojson list = ojson::array();
      for (const auto& sc : horizontal_saddle_connections(q))
        list.push_back(connection_json(sc));
      j["count"] = list.size();
      j["connections"] = std::move(list);
      emit(os, j);
      return 0;
    }
    // surface.rel
    const std::vector<K> r = parse_vec<K>(cfg.rel_dir, "--rel-dir");
    const K tv = token_to<K>(need(cfg.t, "--t"), "--t");
    const TranslationSurface<K> moved = rel_deform(q, r, tv);
    ojson j = surface_json(moved);
    if (!cfg.svg.empty()) write_polygon_svg(cfg.svg, to_double(moved));
    emit(os, j);
    return 0;
  });
}

ScanConfig scan_config_of(const RunConfig& cfg) {
  ScanConfig sc;
  const long cap = cfg.cap.empty() ? (1L << 20) : parse_long(cfg.cap, "--cap");
  sc.schedule = default_schedule(cap);
  if (!cfg.zeta.empty()) sc.zeta_scale = parse_double_token(cfg.zeta, "--zeta");
  if (!cfg.threads.empty()) sc.threads = static_cast<int>(parse_long(cfg.threads, "--threads"));
  return sc;
}

MeasureSampler sampler_of(const RunConfig& cfg) {
  MeasureSampler ms;
  const std::string kind = cfg.sampler.empty() ? "lebesgue" : cfg.sampler;
  if (kind == "lebesgue") ms.kind = MeasureSampler::Kind::Lebesgue;
  else if (kind == "cantor") ms.kind = MeasureSampler::Kind::CantorCoinToss;
  else if (kind == "grid") ms.kind = MeasureSampler::Kind::Grid;
  else throw ParseError("unknown sampler '" + kind + "' (lebesgue|cantor|grid)");
  const auto [lo, hi] = parse_window(cfg.window);
  ms.lo = lo;
  ms.hi = hi;
  if (!cfg.depth.empty()) ms.depth = static_cast<int>(parse_long(cfg.depth, "--depth"));
  if (!cfg.seed.empty()) ms.seed = parse_u64(cfg.seed, "--seed");
  return ms;
}

int cmd_exp_scan(const RunConfig& cfg, std::ostream& os) {
  const ScanConfig sc = scan_config_of(cfg);
  const MeasureSampler ms = sampler_of(cfg);
  const int count = static_cast<int>(parse_long(need(cfg.samples, "--samples"), "--samples"));
  if (count < 0) throw ParseError("--samples must be >= 0");

  ScanResult res;
  int dim = 0;
  if (cfg.command == "exp.line-scan") {
    const Permutation p = perm_of(cfg);
    const std::string b_text = expand_b0(need(cfg.b, "--b"), p);
    const Backend bk =
        literal_backend({split_commas(need(cfg.a, "--a")), split_commas(b_text)}, cfg.exact);
    dispatch_backend(bk, [&](auto zero) {
      using K = decltype(zero);
      res = line_scan(p, parse_vec<K>(cfg.a, "--a"), parse_vec<K>(b_text, "--b"), ms, count, sc);
      return 0;
    });
    dim = p.d();
  } else {  // exp.mahler
    dim = static_cast<int>(parse_long(need(cfg.d, "--d"), "--d"));
    res = mahler_scan(dim, ms, count, sc);
  }

  if (!cfg.out.empty()) {
    CsvSink sink(cfg.out, dim);
    for (const DiagnosticsRecord& rec : res.records)
      append_record_rows(sink, rec, /*with_s=*/true, /*with_t_phi=*/false);
  }
  const ojson summary = scan_summary_json(cfg, res);
  if (!cfg.out.empty()) write_text_file(summary_path(cfg.out), summary.dump(2) + "\n");
  if (!cfg.svg.empty() && !res.records.empty()) {
    // overview plot: classification-defining statistic per sample
    std::vector<std::array<double, 2>> pts;
    for (const DiagnosticsRecord& rec : res.records) {
      double top = 0.0;
      for (const TracePoint& tp : rec.eps_trace) top = std::max(top, tp.n_eps_n);
      pts.push_back({rec.s, top});
    }
    std::sort(pts.begin(), pts.end());
    write_trace_svg(cfg.svg, {{"max n*eps_n vs s", pts}});
  }
  emit(os, summary);
  return 0;
}

int cmd_exp_trace(const RunConfig& cfg, std::ostream& os) {
  const Permutation p = perm_of(cfg);
  const std::string b_text = expand_b0(need(cfg.b, "--b"), p);
  const std::vector<double> a = [&] {
    std::vector<double> v;
    for (const std::string& tok : split_commas(need(cfg.a, "--a")))
      v.push_back(parse_double_token(tok, "--a"));
    return v;
  }();
  const std::vector<double> b = [&] {
    std::vector<double> v;
    for (const std::string& tok : split_commas(b_text)) v.push_back(parse_double_token(tok, "--b"));
    return v;
  }();

  MeasureSampler grid;
  grid.kind = MeasureSampler::Kind::Grid;
  const auto [lo, hi] = parse_window(cfg.window.empty() ? "0,8" : cfg.window);
  grid.lo = lo;
  grid.hi = hi;
  const int count = cfg.samples.empty() ? 17
                                        : static_cast<int>(parse_long(cfg.samples, "--samples"));
  const double zeta = cfg.zeta.empty() ? 0.05 : parse_double_token(cfg.zeta, "--zeta");

  const CompactnessTrace tr = geodesic_compactness_trace(p, a, b, grid.draw(count), zeta);

  if (!cfg.out.empty()) {
    CsvSink sink(cfg.out, static_cast<int>(a.size()));
    append_record_rows(sink, tr.record, /*with_s=*/false, /*with_t_phi=*/true);
  }
  ojson j;
  j["config"] = ojson::parse(cfg.to_json());
  j["c1"] = tr.c1;
  j["c2"] = tr.c2;
  j["kappa1"] = tr.kappa1;
  j["kappa2"] = tr.kappa2;
  j["second_one_ok"] = true;  // a violation would have thrown
  ojson fo = ojson::array();
  for (const auto& pt : tr.first_one)
    fo.push_back({{"n", pt.n},
                  {"zeta", pt.zeta},
                  {"t", pt.t},
                  {"phi", pt.phi},
                  {"bound", pt.bound},
                  {"holds", pt.phi <= pt.bound}});
  j["first_one"] = std::move(fo);
  j["classification"] = recurrence_class_name(tr.record.classification);
  if (!cfg.out.empty()) write_text_file(summary_path(cfg.out), j.dump(2) + "\n");
  if (!cfg.svg.empty()) {
    std::vector<std::array<double, 2>> phis, neps;
    for (const PhiPoint& pp : tr.record.phi_trace) phis.push_back({pp.t, pp.phi});
    for (size_t k = 0; k < tr.record.eps_trace.size(); ++k)
      neps.push_back({tr.record.phi_trace[k].t, tr.record.eps_trace[k].n_eps_n});
    write_trace_svg(cfg.svg, {{"phi(g_t q) vs t", phis}, {"n(t)*eps_n vs t", neps}});
  }
  emit(os, j);
  return 0;
}

int cmd_exp_diagnose(const RunConfig& cfg, std::ostream& os) {
  const Permutation p = perm_of(cfg);
  std::vector<double> a;
  for (const std::string& tok : split_commas(need(cfg.a, "--a")))
    a.push_back(parse_double_token(tok, "--a"));
  const ScanConfig sc = scan_config_of(cfg);
  const DiagnosticsRecord rec = recurrence_diagnostic(p, a, sc.schedule, sc.zeta_scale);

  if (!cfg.out.empty()) {
    CsvSink sink(cfg.out, static_cast<int>(a.size()));
    append_record_rows(sink, rec, /*with_s=*/false, /*with_t_phi=*/false);
  }
  ojson j;
  j["sigma"] = p.image();
  j["a"] = rec.a_s;
  j["classification"] = recurrence_class_name(rec.classification);
  j["zeta_lo"] = rec.zeta_lo;
  j["schedule_cap"] = rec.schedule_cap;
  ojson trace = ojson::array();
  for (const TracePoint& pt : rec.eps_trace)
    trace.push_back({{"n", pt.n}, {"eps_n", pt.eps_n}, {"n_eps_n", pt.n_eps_n}});
  j["trace"] = std::move(trace);
  if (!cfg.svg.empty()) {
    std::vector<std::array<double, 2>> pts;
    for (const TracePoint& pt : rec.eps_trace)
      pts.push_back({std::log2(static_cast<double>(std::max(pt.n, 1L))), pt.n_eps_n});
    write_trace_svg(cfg.svg, {{"n*eps_n vs log2 n", pts}});
  }
  emit(os, j);
  return 0;
}

}  // namespace

// ------------------------------------------------------------- dispatch ----

int run(const RunConfig& cfg, std::ostream& os) {
  const std::string& c = cfg.command;
  if (c == "perm.info") return cmd_perm_info(cfg, os);
  if (c == "iet.eval" || c == "iet.orbit" || c == "iet.eps" || c == "iet.connections")
    return cmd_iet(cfg, os);
  if (c == "pair.q" || c == "pair.cone" || c == "pair.null" || c == "pair.positive")
    return cmd_pair(cfg, os);
  if (c == "surface.suspend" || c == "surface.flow" || c == "surface.phi" ||
      c == "surface.horiz" || c == "surface.rel")
    return cmd_surface(cfg, os);
  if (c == "exp.line-scan" || c == "exp.mahler") return cmd_exp_scan(cfg, os);
  if (c == "exp.trace") return cmd_exp_trace(cfg, os);
  if (c == "exp.diagnose") return cmd_exp_diagnose(cfg, os);
  throw ParseError("unknown command '" + c + "'");
}

}  // namespace ietsurf
