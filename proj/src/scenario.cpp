#include "fintime/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include "fintime/errors.hpp"
#include "fintime/systems.hpp"

namespace fintime {

namespace fs = std::filesystem;

std::string strip_comments(const std::string& text) {
  std::string out = text;
  enum class State { Code, String, Line, Block };
  State st = State::Code;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const char c = out[i];
    const char next = i + 1 < out.size() ? out[i + 1] : '\0';
    switch (st) {
      case State::Code:
        if (c == '"') {
          st = State::String;
        } else if (c == '/' && next == '/') {
          st = State::Line;
          out[i] = ' ';
        } else if (c == '/' && next == '*') {
          st = State::Block;
          out[i] = ' ';
        }
        break;
      case State::String:
        if (c == '\\') {
          ++i;  // escaped character, skip it
        } else if (c == '"') {
          st = State::Code;
        }
        break;
      case State::Line:
        if (c == '\n') {
          st = State::Code;
        } else {
          out[i] = ' ';
        }
        break;
      case State::Block:
        if (c == '*' && next == '/') {
          out[i] = ' ';
          out[i + 1] = ' ';
          ++i;
          st = State::Code;
        } else if (c != '\n') {
          out[i] = ' ';
        }
        break;
    }
  }
  return out;
}

namespace {

constexpr const char* kAnalysisTypes[] = {"spectrum", "radius",     "cones",
                                          "domains",  "eta",        "m_curve",
                                          "ftle_field", "oracle_check"};

bool known_analysis(const std::string& t) {
  return std::find(std::begin(kAnalysisTypes), std::end(kAnalysisTypes), t) !=
         std::end(kAnalysisTypes);
}

// Analyses that operate on the linear(ized) process.
bool linear_analysis(const std::string& t) {
  return t == "spectrum" || t == "radius" || t == "cones" || t == "oracle_check";
}

bool nonlinear_analysis(const std::string& t) {
  return t == "domains" || t == "eta" || t == "m_curve";
}

struct Collector {
  std::vector<std::string> problems;
  void add(std::string msg) { problems.push_back(std::move(msg)); }
  bool ok() const { return problems.empty(); }
};

bool parse_matrix(const Json& j, Eigen::MatrixXd& out, const std::string& where,
                  Collector& errs) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    errs.add(where + ": expected an array of rows");
    return false;
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      errs.add(where + ": rows must have equal length");
      return false;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        errs.add(where + ": entries must be numbers");
        return false;
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return true;
}

bool parse_vector(const Json& j, Eigen::VectorXd& out, const std::string& where,
                  Collector& errs) {
  if (!j.is_array() || j.empty()) {
    errs.add(where + ": expected a nonempty array of numbers");
    return false;
  }
  out.resize(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      errs.add(where + ": entries must be numbers");
      return false;
    }
    out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return true;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_unknown_keys(const Json& obj, const std::set<std::string>& known,
                        const std::string& where, Collector& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      errs.add(where + ": unknown key '" + it.key() + "'");
    }
  }
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + p.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed: " + p.string());
}

}  // namespace

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.canonical == b.canonical;
}

ScenarioConfig parse_scenario(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(strip_comments(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }

  Collector errs;
  ScenarioConfig cfg;
  if (!doc.is_object()) {
    throw ValidationError({"config root must be an object"});
  }
  check_unknown_keys(doc,
                     {"system", "timeset", "norm", "seed", "step", "output", "analyses"},
                     "config", errs);

  // --- system ---------------------------------------------------------
  Json system_json;
  bool have_system = false;
  if (!doc.contains("system")) {
    errs.add("system: required");
  } else if (doc["system"].is_string()) {
    const std::string name = doc["system"].get<std::string>();
    try {
      cfg.system = make_system(name);
      system_json = Json{{"builtin", name}};
      have_system = true;
    } catch (const Error&) {
      std::string names;
      for (const auto& n : system_catalog()) names += (names.empty() ? "" : ", ") + n;
      errs.add("system: unknown name '" + name + "' (catalog: " + names + ")");
    }
  } else if (doc["system"].is_object()) {
    const Json& s = doc["system"];
    check_unknown_keys(s, {"builtin", "matrix", "polynomial"}, "system", errs);
    const int forms = s.contains("builtin") + s.contains("matrix") + s.contains("polynomial");
    if (forms != 1) {
      errs.add("system: exactly one of builtin/matrix/polynomial required");
    } else if (s.contains("builtin")) {
      if (!s["builtin"].is_string()) {
        errs.add("system.builtin: expected a string");
      } else {
        try {
          cfg.system = make_system(s["builtin"].get<std::string>());
          system_json = Json{{"builtin", s["builtin"].get<std::string>()}};
          have_system = true;
        } catch (const Error&) {
          errs.add("system.builtin: unknown name '" + s["builtin"].get<std::string>() + "'");
        }
      }
    } else if (s.contains("matrix")) {
      Eigen::MatrixXd A;
      if (parse_matrix(s["matrix"], A, "system.matrix", errs)) {
        if (A.rows() != A.cols()) {
          errs.add("system.matrix: must be square");
        } else {
          cfg.system = SystemSpec::linear_constant(A);
          system_json = Json{{"matrix", matrix_to_json(A)}};
          have_system = true;
        }
      }
    } else {
      const Json& pj = s["polynomial"];
      if (!pj.is_array() || pj.empty()) {
        errs.add("system.polynomial: expected a nonempty array of matrices");
      } else {
        std::vector<Eigen::MatrixXd> coeffs;
        bool good = true;
        for (std::size_t i = 0; i < pj.size() && good; ++i) {
          Eigen::MatrixXd C;
          good = parse_matrix(pj[i], C, "system.polynomial[" + std::to_string(i) + "]", errs);
          if (good && C.rows() != C.cols()) {
            errs.add("system.polynomial: coefficients must be square");
            good = false;
          }
          if (good && !coeffs.empty() && C.rows() != coeffs.front().rows()) {
            errs.add("system.polynomial: coefficient sizes differ");
            good = false;
          }
          if (good) coeffs.push_back(std::move(C));
        }
        if (good) {
          Json arr = Json::array();
          for (const auto& C : coeffs) arr.push_back(matrix_to_json(C));
          cfg.system = SystemSpec::linear_polynomial(std::move(coeffs));
          system_json = Json{{"polynomial", std::move(arr)}};
          have_system = true;
        }
      }
    }
  } else {
    errs.add("system: expected a name or an object");
  }
  const Eigen::Index n = have_system ? cfg.system.dimension : 0;

  // --- timeset --------------------------------------------------------
  Json timeset_json;
  if (!doc.contains("timeset")) {
    errs.add("timeset: required");
  } else if (!doc["timeset"].is_object()) {
    errs.add("timeset: expected an object");
  } else {
    const Json& t = doc["timeset"];
    const std::string kind = t.value("kind", std::string());
    if (kind == "interval") {
      check_unknown_keys(t, {"kind", "t_min", "t_max", "samples"}, "timeset", errs);
      if (!t.contains("t_min") || !t.contains("t_max") || !t["t_min"].is_number() ||
          !t["t_max"].is_number()) {
        errs.add("timeset: interval needs numeric t_min and t_max");
      } else {
        const double a = t["t_min"].get<double>();
        const double b = t["t_max"].get<double>();
        const auto m = t.value("samples", std::uint64_t{129});
        try {
          cfg.timeset = TimeSet::interval(a, b, static_cast<std::size_t>(m));
          timeset_json = Json{{"kind", "interval"}, {"t_min", a}, {"t_max", b}, {"samples", m}};
        } catch (const Error& e) {
          errs.add(std::string("timeset: ") + e.what());
        }
      }
    } else if (kind == "finite") {
      check_unknown_keys(t, {"kind", "points"}, "timeset", errs);
      if (!t.contains("points") || !t["points"].is_array() || t["points"].empty()) {
        errs.add("timeset: finite needs a nonempty points array");
      } else {
        std::vector<double> pts;
        bool good = true;
        for (const auto& p : t["points"]) {
          if (!p.is_number()) {
            errs.add("timeset.points: entries must be numbers");
            good = false;
            break;
          }
          pts.push_back(p.get<double>());
        }
        if (good) {
          try {
            cfg.timeset = TimeSet::finite(pts);
            Json arr = Json::array();
            for (double p : cfg.timeset.points()) arr.push_back(p);
            timeset_json = Json{{"kind", "finite"}, {"points", std::move(arr)}};
          } catch (const Error& e) {
            errs.add(std::string("timeset: ") + e.what());
          }
        }
      }
    } else {
      errs.add("timeset.kind: expected 'interval' or 'finite'");
    }
  }

  // --- norm -----------------------------------------------------------
  Json norm_json = Json{{"kind", "euclidean"}};
  if (doc.contains("norm")) {
    if (doc["norm"].is_string()) {
      if (doc["norm"].get<std::string>() != "euclidean") {
        errs.add("norm: unknown norm '" + doc["norm"].get<std::string>() + "'");
      }
    } else if (doc["norm"].is_object()) {
      const Json& nj = doc["norm"];
      check_unknown_keys(nj, {"kind", "gamma"}, "norm", errs);
      const std::string kind = nj.value("kind", std::string());
      if (kind == "euclidean") {
        // default already set
      } else if (kind == "weighted") {
        Eigen::MatrixXd G;
        if (!nj.contains("gamma")) {
          errs.add("norm: weighted norm needs 'gamma'");
        } else if (parse_matrix(nj["gamma"], G, "norm.gamma", errs)) {
          if (have_system && G.rows() != n) {
            errs.add("norm.gamma: dimension " + std::to_string(G.rows()) +
                     " does not match system dimension " + std::to_string(n));
          } else {
            try {
              cfg.norm = NormSpec::weighted(G);
              norm_json = Json{{"kind", "weighted"}, {"gamma", matrix_to_json(G)}};
            } catch (const Error& e) {
              errs.add(std::string("norm.gamma: ") + e.what());
            }
          }
        }
      } else {
        errs.add("norm.kind: expected 'euclidean' or 'weighted'");
      }
    } else {
      errs.add("norm: expected 'euclidean' or an object");
    }
  }

  // --- scalars ---------------------------------------------------------
  bool seed_given = false;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      errs.add("seed: expected a nonnegative integer");
    } else {
      cfg.seed = doc["seed"].get<std::uint64_t>();
      seed_given = true;
    }
  }
  if (doc.contains("step")) {
    if (!doc["step"].is_number() || doc["step"].get<double>() < 0.0) {
      errs.add("step: expected a nonnegative number");
    } else {
      cfg.step = doc["step"].get<double>();
    }
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) {
      errs.add("output: expected a string");
    } else {
      cfg.output_dir = doc["output"].get<std::string>();
    }
  }

  // --- analyses ---------------------------------------------------------
  Json analyses_json = Json::array();
  if (!doc.contains("analyses")) {
    errs.add("analyses: required");
  } else if (!doc["analyses"].is_array() || doc["analyses"].empty()) {
    errs.add("analyses: expected a nonempty array");
  } else {
    for (std::size_t i = 0; i < doc["analyses"].size(); ++i) {
      const Json& a = doc["analyses"][i];
      const std::string where = "analyses[" + std::to_string(i) + "]";
      if (!a.is_object() || !a.contains("type") || !a["type"].is_string()) {
        errs.add(where + ": expected an object with a 'type'");
        continue;
      }
      const std::string type = a["type"].get<std::string>();
      if (!known_analysis(type)) {
        errs.add(where + ".type: unknown analysis '" + type + "'");
        continue;
      }

      AnalysisSpec spec;
      spec.type = type;
      Json p;
      p["type"] = type;

      auto need_uint = [&](const char* key, std::uint64_t def) {
        std::uint64_t v = def;
        if (a.contains(key)) {
          if (!a[key].is_number_unsigned() || a[key].get<std::uint64_t>() == 0) {
            errs.add(where + "." + key + ": expected a positive integer");
          } else {
            v = a[key].get<std::uint64_t>();
          }
        }
        return v;
      };

      std::set<std::string> known = {"type"};
      if (have_system && !cfg.system.is_linear() && linear_analysis(type)) {
        known.insert("linearize_at");
        Eigen::VectorXd at;
        if (!a.contains("linearize_at")) {
          errs.add(where + ": nonlinear system needs 'linearize_at' for " + type);
        } else if (parse_vector(a["linearize_at"], at, where + ".linearize_at", errs)) {
          if (at.size() != n) {
            errs.add(where + ".linearize_at: wrong dimension");
          } else {
            Json av = Json::array();
            for (Eigen::Index k = 0; k < at.size(); ++k) av.push_back(at(k));
            p["linearize_at"] = std::move(av);
          }
        }
      }
      if (have_system && cfg.system.is_linear() && nonlinear_analysis(type)) {
        errs.add(where + ": " + type + " needs a nonlinear system");
      }

      if (type == "spectrum" || type == "radius") {
        known.insert("resolution");
        p["resolution"] = need_uint("resolution", 64);
      } else if (type == "cones") {
        known.insert("resolution");
        p["resolution"] = need_uint("resolution", 256);
      } else if (type == "oracle_check") {
        known.insert("resolution");
        p["resolution"] = need_uint("resolution", 128);
      } else if (type == "domains") {
        known.insert("points");
        known.insert("reference");
        Json pts = Json::array();
        if (!a.contains("points") || !a["points"].is_array() || a["points"].empty()) {
          errs.add(where + ".points: required nonempty array of states");
        } else {
          for (std::size_t k = 0; k < a["points"].size(); ++k) {
            Eigen::VectorXd x;
            if (parse_vector(a["points"][k],
                             x, where + ".points[" + std::to_string(k) + "]", errs)) {
              if (have_system && x.size() != n) {
                errs.add(where + ".points[" + std::to_string(k) + "]: wrong dimension");
              } else {
                Json xv = Json::array();
                for (Eigen::Index q = 0; q < x.size(); ++q) xv.push_back(x(q));
                pts.push_back(std::move(xv));
              }
            }
          }
        }
        p["points"] = std::move(pts);
        if (a.contains("reference")) {
          Eigen::VectorXd ref;
          if (parse_vector(a["reference"], ref, where + ".reference", errs)) {
            if (have_system && ref.size() != n) {
              errs.add(where + ".reference: wrong dimension");
            } else {
              Json rv = Json::array();
              for (Eigen::Index q = 0; q < ref.size(); ++q) rv.push_back(ref(q));
              p["reference"] = std::move(rv);
            }
          }
        }
      } else if (type == "eta") {
        known.insert("direction");
        known.insert("r_max");
        known.insert("tol");
        Eigen::VectorXd d;
        if (!a.contains("direction")) {
          errs.add(where + ".direction: required");
        } else if (parse_vector(a["direction"], d, where + ".direction", errs)) {
          if (have_system && d.size() != n) {
            errs.add(where + ".direction: wrong dimension");
          } else {
            Json dv = Json::array();
            for (Eigen::Index q = 0; q < d.size(); ++q) dv.push_back(d(q));
            p["direction"] = std::move(dv);
          }
        }
        double r_max = 1.0, tol = 1e-4;
        if (a.contains("r_max")) {
          if (!a["r_max"].is_number() || a["r_max"].get<double>() <= 0.0) {
            errs.add(where + ".r_max: expected a positive number");
          } else {
            r_max = a["r_max"].get<double>();
          }
        }
        if (a.contains("tol")) {
          if (!a["tol"].is_number() || a["tol"].get<double>() <= 0.0) {
            errs.add(where + ".tol: expected a positive number");
          } else {
            tol = a["tol"].get<double>();
          }
        }
        p["r_max"] = r_max;
        p["tol"] = tol;
      } else if (type == "m_curve") {
        known.insert("etas");
        known.insert("samples");
        Json etas = Json::array();
        if (!a.contains("etas") || !a["etas"].is_array() || a["etas"].empty()) {
          errs.add(where + ".etas: required nonempty array of radii");
        } else {
          for (const auto& e : a["etas"]) {
            if (!e.is_number() || e.get<double>() < 0.0) {
              errs.add(where + ".etas: entries must be nonnegative numbers");
              break;
            }
            etas.push_back(e.get<double>());
          }
        }
        p["etas"] = std::move(etas);
        p["samples"] = need_uint("samples", 64);
      } else if (type == "ftle_field") {
        known.insert("t0");
        known.insert("T");
        known.insert("grid");
        if (have_system && n != 2) {
          errs.add(where + ": ftle_field needs a planar system");
        }
        double t0 = cfg.timeset.points().empty() ? 0.0 : cfg.timeset.t_min();
        double T = cfg.timeset.points().empty() ? 1.0 : cfg.timeset.span();
        if (a.contains("t0")) {
          if (!a["t0"].is_number()) {
            errs.add(where + ".t0: expected a number");
          } else {
            t0 = a["t0"].get<double>();
          }
        }
        if (a.contains("T")) {
          if (!a["T"].is_number() || a["T"].get<double>() <= 0.0) {
            errs.add(where + ".T: expected a positive number");
          } else {
            T = a["T"].get<double>();
          }
        }
        p["t0"] = t0;
        p["T"] = T;
        if (!a.contains("grid") || !a["grid"].is_object()) {
          errs.add(where + ".grid: required object");
        } else {
          const Json& g = a["grid"];
          check_unknown_keys(g, {"x_min", "x_max", "y_min", "y_max", "nx", "ny"},
                             where + ".grid", errs);
          bool good = true;
          for (const char* key : {"x_min", "x_max", "y_min", "y_max"}) {
            if (!g.contains(key) || !g[key].is_number()) {
              errs.add(where + ".grid." + key + ": required number");
              good = false;
            }
          }
          for (const char* key : {"nx", "ny"}) {
            if (!g.contains(key) || !g[key].is_number_unsigned() ||
                g[key].get<std::uint64_t>() == 0) {
              errs.add(where + ".grid." + key + ": required positive integer");
              good = false;
            }
          }
          if (good && (g["x_min"].get<double>() >= g["x_max"].get<double>() ||
                       g["y_min"].get<double>() >= g["y_max"].get<double>())) {
            errs.add(where + ".grid: min bounds must be below max bounds");
            good = false;
          }
          if (good) {
            p["grid"] = Json{{"x_min", g["x_min"].get<double>()},
                             {"x_max", g["x_max"].get<double>()},
                             {"y_min", g["y_min"].get<double>()},
                             {"y_max", g["y_max"].get<double>()},
                             {"nx", g["nx"].get<std::uint64_t>()},
                             {"ny", g["ny"].get<std::uint64_t>()}};
          }
        }
      }

      check_unknown_keys(a, known, where, errs);
      spec.params = p;
      analyses_json.push_back(p);
      cfg.analyses.push_back(std::move(spec));
    }
  }

  if (have_system && n >= 4 && !seed_given) {
    errs.add("seed: required explicitly for dimension >= 4 (heuristic subspace search)");
  }

  if (!errs.ok()) throw ValidationError(errs.problems);

  cfg.canonical = Json{{"system", system_json}, {"timeset", timeset_json},
                       {"norm", norm_json},     {"seed", cfg.seed},
                       {"step", cfg.step},      {"output", cfg.output_dir},
                       {"analyses", analyses_json}};
  return cfg;
}

std::string serialize_config(const ScenarioConfig& cfg) {
  // nlohmann's own dumper round-trips doubles exactly; the %.12e contract is
  // for result documents, not configs.
  return cfg.canonical.dump(2) + "\n";
}

namespace {

struct RunContext {
  const ScenarioConfig& cfg;
  std::uint64_t seed;
  std::string hash;
  fs::path dir;
  SolveOptions sopts;

  std::optional<LinearProcess> linear;      // keyed by linearize_at
  Eigen::VectorXd linear_at;
  std::optional<NonlinearProcess> phi;

  const LinearProcess& linear_process(const Json& params) {
    Eigen::VectorXd at = Eigen::VectorXd::Zero(cfg.system.dimension);
    if (params.contains("linearize_at")) {
      for (Eigen::Index i = 0; i < at.size(); ++i) {
        at(i) = params["linearize_at"][static_cast<std::size_t>(i)].get<double>();
      }
    }
    if (!linear || linear_at.size() != at.size() || linear_at != at) {
      linear.emplace(linearize(cfg.system, cfg.timeset, at, sopts));
      linear_at = at;
    }
    return *linear;
  }

  const NonlinearProcess& nonlinear_process() {
    if (!phi) phi.emplace(cfg.system, cfg.timeset, sopts);
    return *phi;
  }
};

Json result_envelope(const RunContext& ctx, std::size_t index, const AnalysisSpec& a) {
  Json doc;
  doc["schema"] = kResultSchema;
  doc["tool_version"] = kToolVersion;
  doc["config_hash"] = ctx.hash;
  doc["seed"] = ctx.seed;
  doc["index"] = index;
  doc["type"] = a.type;
  doc["params"] = a.params;
  return doc;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_override,
                       std::optional<std::uint64_t> seed_override) {
  const auto t_start = std::chrono::steady_clock::now();

  ScenarioConfig effective = cfg;
  if (seed_override) {
    effective.seed = *seed_override;
    effective.canonical["seed"] = *seed_override;
  }
  // The hash identifies the analysis inputs, so it is taken before the
  // output-directory override: rerunning the same document elsewhere must
  // reproduce the result bytes, and a reader can recompute the hash from
  // the document alone.
  const std::string config_hash = fnv1a_hex(serialize_config(effective));
  if (!out_override.empty()) {
    effective.output_dir = out_override;
    effective.canonical["output"] = out_override;
  }

  RunContext ctx{effective, effective.seed, config_hash,
                 fs::path(effective.output_dir), SolveOptions{}, {}, {}, {}};
  ctx.sopts.step = effective.step;
  fs::create_directories(ctx.dir);

  RunReport report;
  report.output_dir = ctx.dir.string();
  report.all_ok = true;

  for (std::size_t i = 0; i < effective.analyses.size(); ++i) {
    const AnalysisSpec& a = effective.analyses[i];
    AnalysisOutcome outcome;
    outcome.index = i;
    outcome.type = a.type;
    const std::string stem = "result_" + std::to_string(i) + "_" + a.type;
    try {
      Json doc = result_envelope(ctx, i, a);
      std::vector<std::pair<std::string, std::string>> side_files;

      if (a.type == "spectrum") {
        const auto S = compute_spectrum(ctx.linear_process(a.params), effective.norm,
                                        a.params["resolution"].get<std::size_t>(), ctx.seed);
        doc["certified"] = S.certified;
        doc["result"] = to_json(S);
        side_files.emplace_back(stem + ".svg", spectrum_svg(S));
      } else if (a.type == "radius") {
        const auto S = compute_spectrum(ctx.linear_process(a.params), effective.norm,
                                        a.params["resolution"].get<std::size_t>(), ctx.seed);
        const double r = hyperbolicity_radius(S);  // throws when not hyperbolic
        doc["certified"] = S.certified;
        doc["result"] = Json{{"radius", r}, {"hyperbolic", true}};
      } else if (a.type == "cones") {
        const auto C = cone_sweep(ctx.linear_process(a.params), effective.norm,
                                  a.params["resolution"].get<std::size_t>(), ctx.seed);
        doc["certified"] = true;
        doc["result"] = to_json(C);
        side_files.emplace_back(stem + ".csv", cone_csv(C));
      } else if (a.type == "oracle_check") {
        const TimeSet two = TimeSet::finite({effective.timeset.t_min(),
                                             effective.timeset.t_max()});
        Eigen::VectorXd at = Eigen::VectorXd::Zero(effective.system.dimension);
        if (a.params.contains("linearize_at")) {
          for (Eigen::Index q = 0; q < at.size(); ++q) {
            at(q) = a.params["linearize_at"][static_cast<std::size_t>(q)].get<double>();
          }
        }
        const LinearProcess P2 = linearize(effective.system, two, at, ctx.sopts);
        const auto rep = two_point_oracle_check(P2, effective.norm,
                                                a.params["resolution"].get<std::size_t>(),
                                                ctx.seed);
        doc["certified"] = true;
        doc["result"] = to_json(rep);
      } else if (a.type == "domains") {
        Eigen::VectorXd ref = Eigen::VectorXd::Zero(effective.system.dimension);
        if (a.params.contains("reference")) {
          for (Eigen::Index q = 0; q < ref.size(); ++q) {
            ref(q) = a.params["reference"][static_cast<std::size_t>(q)].get<double>();
          }
        }
        std::vector<Eigen::VectorXd> pts;
        for (const auto& pj : a.params["points"]) {
          Eigen::VectorXd x(effective.system.dimension);
          for (Eigen::Index q = 0; q < x.size(); ++q) {
            x(q) = pj[static_cast<std::size_t>(q)].get<double>();
          }
          pts.push_back(std::move(x));
        }
        const auto D = domain_sweep(ctx.nonlinear_process(), effective.norm, ref, pts);
        doc["certified"] = true;
        doc["result"] = to_json(D);
        side_files.emplace_back(stem + ".csv", domain_csv(D));
      } else if (a.type == "eta") {
        Eigen::VectorXd d(effective.system.dimension);
        for (Eigen::Index q = 0; q < d.size(); ++q) {
          d(q) = a.params["direction"][static_cast<std::size_t>(q)].get<double>();
        }
        const LinearProcess P = linearize(effective.system, effective.timeset,
                                          Eigen::VectorXd::Zero(d.size()), ctx.sopts);
        const double eta =
            cone_radius_eta(ctx.nonlinear_process(), P, effective.norm, Subspace::line(d),
                            a.params["r_max"].get<double>(), a.params["tol"].get<double>());
        doc["certified"] = true;
        doc["result"] = Json{{"eta", eta}};
      } else if (a.type == "m_curve") {
        const LinearProcess P =
            linearize(effective.system, effective.timeset,
                      Eigen::VectorXd::Zero(effective.system.dimension), ctx.sopts);
        std::vector<std::pair<double, double>> curve;
        Json curve_json = Json::array();
        for (const auto& ej : a.params["etas"]) {
          const double eta = ej.get<double>();
          const double m = nonlinearity_measure(ctx.nonlinear_process(), P, effective.norm,
                                                eta, a.params["samples"].get<std::size_t>(),
                                                ctx.seed);
          curve.emplace_back(eta, m);
          curve_json.push_back(Json{{"eta", eta}, {"m", m}});
        }
        doc["certified"] = true;
        doc["result"] = Json{{"curve", std::move(curve_json)}};
        side_files.emplace_back(stem + ".csv", m_curve_csv(curve));
      } else if (a.type == "ftle_field") {
        const Json& g = a.params["grid"];
        FtleGridSpec grid;
        grid.x_min = g["x_min"].get<double>();
        grid.x_max = g["x_max"].get<double>();
        grid.y_min = g["y_min"].get<double>();
        grid.y_max = g["y_max"].get<double>();
        grid.nx = static_cast<Eigen::Index>(g["nx"].get<std::uint64_t>());
        grid.ny = static_cast<Eigen::Index>(g["ny"].get<std::uint64_t>());
        const auto field = ftle_field(effective.system, a.params["t0"].get<double>(),
                                      a.params["T"].get<double>(), grid, ctx.sopts);
        doc["certified"] = true;
        doc["result"] = to_json(field);
        side_files.emplace_back(stem + ".csv", ftle_csv(field));
      } else {
        throw Error("unreachable analysis type");
      }

      write_file(ctx.dir / (stem + ".json"), dump_json(doc));
      outcome.files.push_back(stem + ".json");
      for (const auto& [name, bytes] : side_files) {
        write_file(ctx.dir / name, bytes);
        outcome.files.push_back(name);
      }
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
      report.all_ok = false;
    }
    report.analyses.push_back(std::move(outcome));
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  Json manifest;
  manifest["schema"] = kResultSchema;
  manifest["tool_version"] = kToolVersion;
  manifest["config_hash"] = ctx.hash;
  manifest["seed"] = ctx.seed;
  manifest["wall_time_seconds"] = wall;
  Json entries = Json::array();
  for (const auto& o : report.analyses) {
    Json e;
    e["index"] = o.index;
    e["type"] = o.type;
    e["ok"] = o.ok;
    if (!o.error.empty()) e["error"] = o.error;
    Json files = Json::array();
    for (const auto& f : o.files) files.push_back(f);
    e["files"] = std::move(files);
    entries.push_back(std::move(e));
  }
  manifest["analyses"] = std::move(entries);
  const fs::path mpath = ctx.dir / "run_manifest.json";
  write_file(mpath, dump_json(manifest));
  report.manifest_path = mpath.string();
  return report;
}

}  // namespace fintime
