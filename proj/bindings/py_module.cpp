// Python bindings: the double-backend core operations plus run_json(), which
// drives the same dispatch as the CLI (and is the doorway to the exact
// backends from python: put rational literals in the config).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "json.hpp"

#include "ietsurf/experiments.hpp"
#include "ietsurf/iet.hpp"
#include "ietsurf/pairing.hpp"
#include "ietsurf/perm.hpp"
#include "ietsurf/runner.hpp"
#include "ietsurf/surface.hpp"

namespace py = pybind11;
using namespace ietsurf;

namespace {

Permutation perm_of(const std::vector<int>& image) { return Permutation(image); }

py::dict stratum_dict(const StratumData& st) {
  py::dict d;
  d["k"] = st.k;
  d["orders"] = st.orders;
  d["genus"] = st.genus;
  return d;
}

py::dict connection_dict(const SaddleConnection<double>& sc) {
  py::dict d;
  d["x"] = sc.hol.x;
  d["y"] = sc.hol.y;
  d["len"] = sc.len();
  d["from"] = sc.from;
  d["to"] = sc.to;
  return d;
}

py::dict surface_dict(const TranslationSurface<double>& q) {
  py::dict d;
  d["sigma"] = q.perm.image();
  d["a"] = q.a;
  d["b"] = q.b;
  d["area"] = q.area();
  std::vector<std::pair<double, double>> top, bot;
  for (const auto& v : q.top) top.emplace_back(v.x, v.y);
  for (const auto& v : q.bot) bot.emplace_back(v.x, v.y);
  d["top"] = top;
  d["bottom"] = bot;
  d["stratum"] = stratum_dict(q.strat);
  return d;
}

}  // namespace

PYBIND11_MODULE(_ietsurf, m) {
  m.doc() = "interval exchanges, suspended translation surfaces, recurrence experiments";

  py::register_exception<Error>(m, "IetsurfError");

  m.def("is_irreducible",
        [](const std::vector<int>& s) { return is_irreducible(perm_of(s)); });
  m.def("is_admissible", [](const std::vector<int>& s) { return is_admissible(perm_of(s)); });
  m.def("stratum", [](const std::vector<int>& s) { return stratum_dict(singularity_data(perm_of(s))); });
  m.def("universal_direction",
        [](const std::vector<int>& s) { return universal_direction(perm_of(s)); });

  m.def("evaluate", [](const std::vector<int>& s, const std::vector<double>& a, double x) {
    return Iet<double>(perm_of(s), a).evaluate(x);
  });
  m.def("orbit",
        [](const std::vector<int>& s, const std::vector<double>& a, double x, long n) {
          return Iet<double>(perm_of(s), a).orbit(x, n);
        });
  m.def("epsilon_trace",
        [](const std::vector<int>& s, const std::vector<double>& a, std::vector<long> schedule) {
          return Iet<double>(perm_of(s), a).epsilon_trace(schedule);
        });
  m.def("detect_connections",
        [](const std::vector<int>& s, const std::vector<double>& a, long mmax) {
          py::list out;
          for (const Connection& c : Iet<double>(perm_of(s), a).detect_connections(mmax)) {
            py::dict d;
            d["i"] = c.i;
            d["j"] = c.j;
            d["m"] = c.m;
            out.append(d);
          }
          return out;
        },
        py::arg("sigma"), py::arg("lengths"), py::arg("mmax") = 10000);

  m.def("q_matrix", [](const std::vector<int>& s) { return q_matrix(perm_of(s)).m; });
  m.def("null_space", [](const std::vector<int>& s) { return null_space(perm_of(s)); });
  m.def("cone_contains", [](const std::vector<int>& s, const std::vector<double>& b) {
    return cone_contains(perm_of(s), b);
  });
  m.def("is_positive_pair",
        [](const std::vector<int>& s, const std::vector<double>& a,
           const std::vector<double>& b) {
          const PositivityVerdict v = is_positive_pair(perm_of(s), a, b);
          py::dict d;
          d["verdict"] = positivity_name(v.status);
          d["margin"] = v.margin;
          d["witness_value"] = v.witness_value;
          d["note"] = v.note;
          return d;
        });

  m.def("suspend", [](const std::vector<int>& s, const std::vector<double>& a,
                      const std::vector<double>& b) {
    return surface_dict(suspend(perm_of(s), a, b));
  });
  m.def("phi", [](const std::vector<int>& s, const std::vector<double>& a,
                  const std::vector<double>& b) {
    return phi(suspend(perm_of(s), a, b));
  });
  m.def("saddle_connections",
        [](const std::vector<int>& s, const std::vector<double>& a,
           const std::vector<double>& b, double rho) {
          py::list out;
          for (const auto& sc : saddle_connections_up_to(suspend(perm_of(s), a, b), rho))
            out.append(connection_dict(sc));
          return out;
        });
  m.def("vertical_return_map", [](const std::vector<int>& s, const std::vector<double>& a,
                                  const std::vector<double>& b) {
    const Iet<double> r = vertical_return_map(suspend(perm_of(s), a, b));
    return py::make_tuple(r.perm().image(), r.lengths());
  });
  m.def("rel_deform", [](const std::vector<int>& s, const std::vector<double>& a,
                         const std::vector<double>& b, const std::vector<double>& r, double t) {
    return surface_dict(rel_deform(suspend(perm_of(s), a, b), r, t));
  });

  m.def("mahler_curve", [](int d, double s) {
    const CurvePoint<double> pt = mahler_curve(d, s);
    return py::make_tuple(pt.beta, pt.beta_prime);
  });
  m.def("recurrence_diagnostic",
        [](const std::vector<int>& s, const std::vector<double>& a, long cap) {
          const DiagnosticsRecord rec =
              recurrence_diagnostic(perm_of(s), a, default_schedule(cap));
          py::dict d;
          d["classification"] = recurrence_class_name(rec.classification);
          d["zeta_lo"] = rec.zeta_lo;
          py::list trace;
          for (const TracePoint& pt : rec.eps_trace)
            trace.append(py::make_tuple(pt.n, pt.eps_n, pt.n_eps_n));
          d["trace"] = trace;
          return d;
        },
        py::arg("sigma"), py::arg("lengths"), py::arg("cap") = (1L << 20));

  // same dispatch as the CLI; returns (exit_code, stdout, stderr_json)
  m.def("run_json", [](const std::string& config) {
    std::ostringstream os;
    try {
      const RunConfig cfg = RunConfig::from_json(config);
      const int code = run(cfg, os);
      return py::make_tuple(code, os.str(), std::string());
    } catch (const Error& e) {
      nlohmann::ordered_json err;
      err["error"] = e.code();
      err["message"] = e.what();
      return py::make_tuple(1, os.str(), err.dump());
    }
  });

  m.attr("__version__") = "0.3.0";
}
