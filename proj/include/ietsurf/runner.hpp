#pragma once

// Flat, string-typed run configuration shared by the CLI and the python
// bindings.  Keeping every field textual makes the JSON round-trip
// byte-stable and defers backend selection (rational / golden field /
// float) to run(), which inspects the literals.

#include <iosfwd>
#include <string>

namespace ietsurf {

struct RunConfig {
  std::string command;  // dotted op name, e.g. "perm.info", "exp.line-scan"
  std::string sigma;    // permutation image, "4,3,2,1"
  std::string a;        // lengths (--lengths / --a); tokens: p/q, ints, phi, decimals
  std::string b;        // suspension heights (--b); extra token "b0"
  std::string rel_dir;  // null-space direction for surface.rel
  std::string x;        // evaluation point for iet.eval / iet.orbit
  std::string g;        // geodesic time
  std::string h;        // horocycle shear
  std::string r;        // rotation angle
  std::string rho;      // saddle-connection search radius
  std::string t;        // rel time
  std::string n;        // step count / schedule horizon
  std::string mmax;     // connection horizon
  std::string seeds;    // positivity sampling overrides
  std::string orbit;
  std::string d;        // dimension for exp.mahler
  std::string samples;
  std::string sampler;  // lebesgue | cantor | grid
  std::string window;   // "LO,HI"
  std::string seed;
  std::string depth;    // cantor truncation depth
  std::string cap;      // schedule cap
  std::string zeta;     // classification threshold scale
  std::string threads;
  std::string out;      // CSV path (summary lands next to it)
  std::string svg;      // figure path
  bool exact = false;            // reject float literals
  bool require_positive = false; // NotPositive verdict exits 2

  bool operator==(const RunConfig&) const = default;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);  // ParseError on junk
};

// Executes one configured command.  The primary JSON record goes to `os`;
// CSV/summary/SVG artifacts go to the configured paths.  Returns the exit
// status (0, or 2 for a NotPositive verdict under require_positive).
// Errors are thrown; the CLI maps them to stderr JSON and status 1.
int run(const RunConfig& cfg, std::ostream& os);

}  // namespace ietsurf
