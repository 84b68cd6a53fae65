#pragma once

// Presentation input and report output in JSON, and replay of a stored
// certificate.

#include "tricover/parse.hpp"
#include "tricover/verifier.hpp"

#include "json.hpp"

#include <chrono>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tricover {

/// Keys keep insertion order, so the same run prints the same bytes.
using Json = nlohmann::ordered_json;

/// Parse or validation failure; line and column are 1-based, 0 when the
/// problem is not tied to a position in the text.
class InputError : public std::runtime_error {
public:
  InputError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                      ": " + what
                                : what),
        line(line), column(column) {}
  int line, column;
};

namespace detail {

inline std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Rational json_rational(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(mpz_class(v.dump()));
  if (!v.is_string()) throw InputError(where + ": expected a rational string such as \"3/7\"");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const AlgebraError& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline Json point_json(const Point2& p) { return Json::array({p[0].get_str(), p[1].get_str()}); }

inline Json map_json(const RationalMap2& f, const std::vector<std::string>& names) {
  return Json::array({f.components[0].to_string(names), f.components[1].to_string(names)});
}

inline Json polys_json(const std::vector<Poly>& ps, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(p.to_string(names));
  return out;
}

}  // namespace detail

/// {"base": "P2" | {"hirzebruch": n}, "centers": [{"level", "chart", "coords"}]}
inline SurfacePresentation parse_presentation(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw InputError(msg, line, col);
  }
  if (!doc.is_object()) throw InputError("presentation must be an object");
  for (const auto& [key, _] : doc.items())
    if (key != "base" && key != "centers") throw InputError("unknown key '" + key + "'");

  SurfacePresentation sp;
  if (!doc.contains("base")) throw InputError("missing 'base'");
  const Json& base = doc["base"];
  if (base.is_string() && base.get<std::string>() == "P2") {
    sp.base = MinimalModel::plane();
  } else if (base.is_object() && base.size() == 1 && base.contains("hirzebruch") &&
             base["hirzebruch"].is_number_integer()) {
    long n = base["hirzebruch"].get<long>();
    if (n < 0) throw InputError("n must be ≥ 0");
    if (n > 1000) throw InputError("n is too large");
    sp.base = MinimalModel::hirzebruch(static_cast<int>(n));
  } else {
    throw InputError("base must be \"P2\" or {\"hirzebruch\": n}");
  }

  if (doc.contains("centers")) {
    const Json& cs = doc["centers"];
    if (!cs.is_array()) throw InputError("centers must be an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "centers[" + std::to_string(i) + "]";
      const Json& c = cs[i];
      if (!c.is_object() || !c.contains("level") || !c.contains("chart") || !c.contains("coords"))
        throw InputError(where + ": expected {\"level\", \"chart\", \"coords\"}");
      if (!c["level"].is_number_integer()) throw InputError(where + ".level: expected an integer");
      if (!c["chart"].is_string()) throw InputError(where + ".chart: expected a chart name");
      if (!c["coords"].is_array() || c["coords"].size() != 2)
        throw InputError(where + ".coords: expected two coordinates");
      BlowupCenter b;
      b.level = c["level"].get<int>();
      b.chart = c["chart"].get<std::string>();
      b.coords = {detail::json_rational(c["coords"][0], where + ".coords[0]"),
                  detail::json_rational(c["coords"][1], where + ".coords[1]")};
      sp.centers.push_back(std::move(b));
    }
  }
  try {
    validate_presentation(sp);
  } catch (const PresentationError& e) {
    throw InputError(e.what());
  }
  return sp;
}

inline Json presentation_json(const SurfacePresentation& sp) {
  Json out;
  if (sp.base.is_plane()) out["base"] = "P2";
  else out["base"] = Json{{"hirzebruch", sp.base.n}};
  out["centers"] = Json::array();
  for (const auto& c : sp.centers)
    out["centers"].push_back({{"level", c.level}, {"chart", c.chart}, {"coords", detail::point_json(c.coords)}});
  return out;
}

inline Json chart_certificate_json(const ChartCertificate& c, const std::vector<std::string>& names) {
  Json out;
  out["chart"] = c.chart;
  out["coords"] = names;
  out["exceptional_var"] = c.exceptional_var ? Json(*c.exceptional_var) : Json(nullptr);
  out["removed"] = Json::array();
  for (const auto& p : c.removed) out["removed"].push_back(detail::point_json(p));
  out["traces"] = detail::polys_json(c.traces, names);
  out["factors"] = Json::array();
  for (const auto& fs : c.factors) out["factors"].push_back(detail::polys_json(fs, names));
  out["blocks"] = Json::array();
  for (const auto& b : c.blocks) {
    Json jb;
    jb["generators"] = detail::polys_json(b.generators, names);
    jb["basis"] = detail::polys_json(b.basis, names);
    jb["status"] = b.status;
    jb["passed"] = b.passed;
    if (b.witness) jb["witness"] = detail::point_json(*b.witness);
    out["blocks"].push_back(std::move(jb));
  }
  out["passed"] = c.passed;
  return out;
}

struct RunTimings {
  double construct = 0, certify = 0, transitions = 0;
};

/// The full structured report. Timings are left out unless given, so that
/// the same input and seed always print the same bytes.
inline Json report_json(const TriCover& cover, const CoverageCertificate& cert, const TransitionReport& tr,
                        std::uint64_t seed, const RunTimings* timings = nullptr) {
  const StandardAtlas& atlas = *cover.atlas;
  const auto& reg = *atlas.registry();
  Json out;
  out["input"] = presentation_json(atlas.presentation());
  out["seed"] = seed;
  out["level"] = cover.level;

  out["charts"] = Json::array();
  for (const auto& c : cover.charts) {
    Json j;
    j["name"] = c.id.name;
    j["coords"] = c.coords;
    j["reference"] = c.reference.name;
    j["to_reference"] = detail::map_json(c.to_reference, c.coords);
    j["from_reference"] = detail::map_json(c.from_reference, reg.get(c.reference).coords);
    out["charts"].push_back(std::move(j));
  }

  out["transitions"] = Json::array();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j)
        out["transitions"].push_back({{"from", cover.charts[i].id.name},
                                      {"to", cover.charts[j].id.name},
                                      {"map", detail::map_json(cover.transitions[i][j], cover.charts[i].coords)}});

  out["complements"] = Json::object();
  for (const auto& rec : cert.charts) {
    Json row = Json::object();
    const auto& names = atlas.chart(rec.chart).coords;
    for (int i = 0; i < 3; ++i) row[cover.charts[i].id.name] = rec.traces[i].to_string(names);
    out["complements"][rec.chart] = std::move(row);
  }

  out["audit"] = Json::array();
  for (const auto& e : cover.audit)
    out["audit"].push_back({{"level", e.level},
                            {"what", e.what},
                            {"value", e.value},
                            {"attempts", e.attempts},
                            {"predicates", e.predicates},
                            {"replayed", e.replay()}});

  Json c;
  c["passed"] = cert.passed() && tr.passed();
  c["emptiness"] = cert.emptiness_passed();
  c["pairwise_finite"] = cert.pairwise_finite();
  c["trace_mismatches"] = cert.trace_mismatches;
  c["charts"] = Json::array();
  for (const auto& rec : cert.charts)
    c["charts"].push_back(chart_certificate_json(rec, atlas.chart(rec.chart).coords));
  c["pairs"] = Json::array();
  for (const auto& p : cert.pairs)
    c["pairs"].push_back({{"chart", p.chart}, {"i", p.i}, {"j", p.j},
                          {"gcd", p.gcd.to_string(atlas.chart(p.chart).coords)}});
  c["sampling"] = Json::array();
  for (const auto& s : cert.sampling) {
    Json un = Json::array();
    for (const auto& [w, p] : s.uncovered) un.push_back({{"chart", w}, {"point", detail::point_json(p)}});
    c["sampling"].push_back({{"seed", s.seed}, {"count", s.count}, {"uncovered", std::move(un)}});
  }
  Json fails = Json::array();
  for (const auto& f : tr.failures)
    fails.push_back({{"from", f.i}, {"to", f.j}, {"point", detail::point_json(f.point)}, {"reason", f.reason}});
  c["transitions"] = {{"checked", tr.checked}, {"failures", std::move(fails)}};
  if (const auto* bad = cert.counterexample()) {
    Json ce{{"chart", bad->chart}};
    if (const auto* b = bad->failing_block()) {
      ce["status"] = b->status;
      if (b->witness) ce["witness"] = detail::point_json(*b->witness);
    }
    c["counterexample"] = std::move(ce);
  }
  out["certificate"] = std::move(c);

  if (timings)
    out["timings"] = {{"construct_s", timings->construct},
                      {"certify_s", timings->certify},
                      {"transitions_s", timings->transitions}};
  return out;
}

/// Short human-readable summary of a report.
inline std::string report_text(const Json& r) {
  std::ostringstream os;
  const Json& in = r["input"];
  os << "surface: " << (in["base"].is_string() ? in["base"].get<std::string>()
                                               : "Sigma_" + std::to_string(in["base"]["hirzebruch"].get<int>()))
     << " blown up at " << in["centers"].size() << " point(s), seed " << r["seed"].get<std::uint64_t>() << "\n";
  for (const auto& c : r["charts"]) {
    os << c["name"].get<std::string>() << " -> " << c["reference"].get<std::string>() << ": ("
       << c["to_reference"][0].get<std::string>() << ", " << c["to_reference"][1].get<std::string>() << ")\n";
  }
  os << "complements:\n";
  for (const auto& [w, row] : r["complements"].items()) {
    os << "  " << w << ":";
    for (const auto& [u, t] : row.items()) {
      const auto eq = t.get<std::string>();
      os << "  " << u << (eq == "1" ? " misses it" : " {" + eq + " = 0}");
    }
    os << "\n";
  }
  os << "audit: " << r["audit"].size() << " generic choices\n";
  for (const auto& e : r["audit"])
    os << "  level " << e["level"].get<int>() << " " << e["what"].get<std::string>() << " = "
       << e["value"].get<std::string>() << " (" << e["attempts"].get<int>() << " attempt(s))\n";
  const Json& c = r["certificate"];
  int ok = 0;
  for (const auto& w : c["charts"]) ok += w["passed"].get<bool>();
  os << "emptiness: " << ok << "/" << c["charts"].size() << " standard charts\n";
  os << "pairwise finite: " << (c["pairwise_finite"].get<bool>() ? "yes" : "no") << "\n";
  for (const auto& s : c["sampling"])
    os << "sampling (seed " << s["seed"].get<std::uint64_t>() << "): " << s["uncovered"].size() << " of "
       << s["count"].get<int>() << " uncovered\n";
  os << "transitions: " << c["transitions"]["checked"].get<int>() << " round trips, "
     << c["transitions"]["failures"].size() << " failure(s)\n";
  if (c.contains("counterexample")) os << "counterexample: " << c["counterexample"].dump() << "\n";
  os << "certificate: " << (c["passed"].get<bool>() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

/// Result of re-checking a stored certificate.
struct ReplayOutcome {
  bool certificate_passed = false;
  std::vector<std::string> problems;
  bool ok() const { return certificate_passed && problems.empty(); }
};

/// Recomputes every emptiness block and pairwise gcd of a stored report
/// and compares them with what it records.
inline ReplayOutcome replay_certificate(const Json& report) {
  ReplayOutcome out;
  if (!report.contains("certificate") || !report["certificate"].contains("charts"))
    throw InputError("not a report: missing certificate.charts");
  const Json& c = report["certificate"];
  bool all_charts = true;
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<Poly>>> traces;
  try {
    for (const auto& w : c["charts"]) {
      ChartCertificate rec;
      rec.chart = w["chart"].get<std::string>();
      auto names = w["coords"].get<std::vector<std::string>>();
      if (!w["exceptional_var"].is_null()) rec.exceptional_var = w["exceptional_var"].get<int>();
      for (const auto& p : w["removed"])
        rec.removed.push_back({detail::json_rational(p[0], rec.chart), detail::json_rational(p[1], rec.chart)});
      for (const auto& t : w["traces"]) rec.traces.push_back(parse_poly(t.get<std::string>(), names));
      for (const auto& fs : w["factors"]) {
        rec.factors.emplace_back();
        for (const auto& f : fs) rec.factors.back().push_back(parse_poly(f.get<std::string>(), names));
      }
      for (const auto& b : w["blocks"]) {
        EmptinessBlock blk;
        for (const auto& g : b["generators"]) blk.generators.push_back(parse_poly(g.get<std::string>(), names));
        for (const auto& g : b["basis"]) blk.basis.push_back(parse_poly(g.get<std::string>(), names));
        blk.status = b["status"].get<std::string>();
        blk.passed = b["passed"].get<bool>();
        rec.blocks.push_back(std::move(blk));
      }
      rec.passed = w["passed"].get<bool>();
      all_charts = all_charts && rec.passed;
      if (!replay_chart(rec)) out.problems.push_back(rec.chart + ": recomputed emptiness record differs");
      traces[rec.chart] = {names, rec.traces};
    }
    for (const auto& p : c["pairs"]) {
      auto it = traces.find(p["chart"].get<std::string>());
      if (it == traces.end()) {
        out.problems.push_back("pair record for unknown chart " + p["chart"].get<std::string>());
        continue;
      }
      const auto& ts = it->second.second;
      int i = p["i"].get<int>(), j = p["j"].get<int>();
      if (i < 0 || j < 0 || i >= int(ts.size()) || j >= int(ts.size())) {
        out.problems.push_back("pair record out of range in " + it->first);
        continue;
      }
      Poly g = poly_gcd(ts[i], ts[j]);
      if (g.to_string(it->second.first) != p["gcd"].get<std::string>())
        out.problems.push_back(it->first + ": recomputed gcd of traces " + std::to_string(i) + ", " +
                               std::to_string(j) + " differs");
    }
    out.certificate_passed = c["passed"].get<bool>() && all_charts;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  } catch (const AlgebraError& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  return out;
}

}  // namespace tricover
