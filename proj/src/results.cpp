#include "fintime/results.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace fintime {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

const char* label_name(DirectionLabel l) {
  switch (l) {
    case DirectionLabel::Stable: return "Stable";
    case DirectionLabel::Unstable: return "Unstable";
    default: return "Neither";
  }
}

const char* label_name(PointLabel l) {
  switch (l) {
    case PointLabel::Attracted: return "Attracted";
    case PointLabel::Repelled: return "Repelled";
    default: return "Neither";
  }
}

const char* verdict_name(AttractionVerdict v) {
  switch (v) {
    case AttractionVerdict::Attractive: return "Attractive";
    case AttractionVerdict::Repulsive: return "Repulsive";
    case AttractionVerdict::HyperbolicSaddle: return "HyperbolicSaddle";
    default: return "NotHyperbolic";
  }
}

void dump_impl(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in;
        out += Json(it.key()).dump();  // escaped key
        out += ": ";
        dump_impl(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_impl(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();  // strings (escaped), integers, booleans, null
      return;
  }
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json direction_json(const DirectionClassification& d) {
  Json j;
  j["direction"] = vector_json(d.direction);
  j["label"] = label_name(d.label);
  j["lgr"] = d.lgr;
  j["ugr"] = d.ugr;
  return j;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_impl(j, out, indent, 0);
  out += "\n";
  return out;
}

Json to_json(const TimeSet& ts) {
  Json j;
  j["kind"] = ts.has_limit_points() ? "interval" : "finite";
  j["t_min"] = ts.t_min();
  j["t_max"] = ts.t_max();
  j["samples"] = ts.size();
  return j;
}

Json to_json(const Subspace& s) {
  Json j;
  j["dim"] = s.dim();
  j["ambient_dim"] = s.ambient_dim();
  j["frame"] = matrix_json(s.frame());
  return j;
}

Json to_json(const RateResult& r) {
  Json j;
  j["value"] = r.value;
  j["witness_direction"] = vector_json(r.witness_direction);
  if (r.witness_pair) {
    j["witness_pair"] = Json::array({r.witness_pair->t, r.witness_pair->s});
  }
  if (r.witness_time) j["witness_time"] = *r.witness_time;
  j["approximate"] = r.approximate;
  return j;
}

Json to_json(const DirectionRates& r) {
  Json j;
  j["lower"] = to_json(r.lower);
  j["upper"] = to_json(r.upper);
  return j;
}

Json to_json(const SubspaceRates& r) {
  Json j;
  j["lgr"] = to_json(r.lgr);
  j["ugr"] = to_json(r.ugr);
  return j;
}

Json to_json(const ExtremalRates& R) {
  Json j;
  j["n"] = R.n;
  Json elgr = Json::array();
  Json eugr = Json::array();
  for (std::size_t k = 0; k < R.elgr.size(); ++k) {
    elgr.push_back(R.elgr[k]);
    eugr.push_back(R.eugr[k]);
  }
  j["elgr"] = std::move(elgr);
  j["eugr"] = std::move(eugr);
  j["certified"] = R.certified;
  return j;
}

Json to_json(const SpectrumResult& S) {
  Json j;
  Json intervals = Json::array();
  for (const auto& iv : S.intervals) intervals.push_back(Json::array({iv.lo, iv.hi}));
  j["intervals"] = std::move(intervals);
  Json raw = Json::array();
  for (const auto& iv : S.raw_intervals) raw.push_back(Json::array({iv.lo, iv.hi}));
  j["raw_intervals"] = std::move(raw);
  Json gaps = Json::array();
  for (const auto& g : S.resolvent_gaps) {
    Json gj;
    gj["lo"] = g.lo;
    gj["hi"] = g.hi;
    gj["rank"] = g.rank;
    gaps.push_back(std::move(gj));
  }
  j["resolvent_gaps"] = std::move(gaps);
  j["hyperbolic"] = S.hyperbolic;
  if (S.emd_k) j["emd_k"] = *S.emd_k;
  if (S.radius) j["radius"] = *S.radius;
  if (S.emd_image) j["emd_image"] = to_json(*S.emd_image);
  if (S.emd_kernel) j["emd_kernel"] = to_json(*S.emd_kernel);
  j["extremal"] = to_json(S.extremal);
  j["certified"] = S.certified;
  return j;
}

Json to_json(const ConeClassification& c) {
  Json j;
  j["count"] = c.directions.size();
  std::size_t stable = 0, unstable = 0;
  for (const auto& d : c.directions) {
    stable += d.label == DirectionLabel::Stable;
    unstable += d.label == DirectionLabel::Unstable;
  }
  j["stable_count"] = stable;
  j["unstable_count"] = unstable;
  if (c.best_stable) {
    j["best_stable"] = direction_json(c.directions[*c.best_stable]);
  }
  if (c.best_unstable) {
    j["best_unstable"] = direction_json(c.directions[*c.best_unstable]);
  }
  j["stable_contiguous"] = c.stable_contiguous;
  j["unstable_contiguous"] = c.unstable_contiguous;
  return j;
}

Json to_json(const DomainClassification& d) {
  Json j;
  j["count"] = d.points.size();
  std::size_t attracted = 0, repelled = 0;
  for (const auto& p : d.points) {
    attracted += p.label == PointLabel::Attracted;
    repelled += p.label == PointLabel::Repelled;
  }
  j["attracted_count"] = attracted;
  j["repelled_count"] = repelled;
  return j;
}

Json to_json(const AttractionReport& a) {
  Json j;
  j["verdict"] = verdict_name(a.verdict);
  if (a.emd_k >= 0) j["emd_k"] = a.emd_k;
  j["neighborhood_radius"] = a.neighborhood_radius;
  return j;
}

Json to_json(const FiberReport& f) {
  Json j;
  j["t"] = f.t;
  Json probes = Json::array();
  for (const auto& p : f.probes) {
    Json pj;
    pj["direction"] = vector_json(p.direction);
    pj["radius"] = p.radius;
    pj["positive"] = p.positive;
    probes.push_back(std::move(pj));
  }
  j["probes"] = std::move(probes);
  j["all_positive"] = f.all_positive;
  return j;
}

Json to_json(const OracleReport& r) {
  Json j;
  j["max_deviation"] = r.max_deviation;
  Json el = Json::array();
  Json eu = Json::array();
  for (std::size_t k = 0; k < r.elgr_deviation.size(); ++k) {
    el.push_back(r.elgr_deviation[k]);
    eu.push_back(r.eugr_deviation[k]);
  }
  j["elgr_deviation"] = std::move(el);
  j["eugr_deviation"] = std::move(eu);
  return j;
}

Json to_json(const FtleField& f) {
  Json j;
  Json grid;
  grid["x_min"] = f.grid.x_min;
  grid["x_max"] = f.grid.x_max;
  grid["y_min"] = f.grid.y_min;
  grid["y_max"] = f.grid.y_max;
  grid["nx"] = f.grid.nx;
  grid["ny"] = f.grid.ny;
  j["grid"] = std::move(grid);
  j["t0"] = f.t0;
  j["T"] = f.T;
  j["blowup_count"] = f.blowup_count;
  return j;
}

std::string cone_csv(const ConeClassification& c) {
  std::string out;
  const bool planar = !c.directions.empty() && c.directions.front().direction.size() == 2;
  if (planar) {
    out = "theta,label,lgr,ugr\n";
  } else {
    const Eigen::Index n = c.directions.empty() ? 0 : c.directions.front().direction.size();
    for (Eigen::Index i = 0; i < n; ++i) out += "d" + std::to_string(i) + ",";
    out += "label,lgr,ugr\n";
  }
  for (const auto& d : c.directions) {
    if (planar) {
      out += format_double(std::atan2(d.direction(1), d.direction(0)));
      out += ",";
    } else {
      for (Eigen::Index i = 0; i < d.direction.size(); ++i) {
        out += format_double(d.direction(i));
        out += ",";
      }
    }
    out += label_name(d.label);
    out += ",";
    out += format_double(d.lgr);
    out += ",";
    out += format_double(d.ugr);
    out += "\n";
  }
  return out;
}

std::string domain_csv(const DomainClassification& d) {
  std::string out;
  const Eigen::Index n = d.points.empty() ? 0 : d.points.front().point.size();
  for (Eigen::Index i = 0; i < n; ++i) out += "x" + std::to_string(i) + ",";
  out += "label,mu_lower,mu_upper\n";
  for (const auto& p : d.points) {
    for (Eigen::Index i = 0; i < p.point.size(); ++i) {
      out += format_double(p.point(i));
      out += ",";
    }
    out += label_name(p.label);
    out += ",";
    out += format_double(p.mu_lower);
    out += ",";
    out += format_double(p.mu_upper);
    out += "\n";
  }
  return out;
}

std::string ftle_csv(const FtleField& f) {
  std::string out = "x,y,ftle\n";
  const double dx = f.grid.nx > 1 ? (f.grid.x_max - f.grid.x_min) / double(f.grid.nx - 1) : 0.0;
  const double dy = f.grid.ny > 1 ? (f.grid.y_max - f.grid.y_min) / double(f.grid.ny - 1) : 0.0;
  for (Eigen::Index iy = 0; iy < f.grid.ny; ++iy) {
    for (Eigen::Index ix = 0; ix < f.grid.nx; ++ix) {
      const double v = f.values[static_cast<std::size_t>(iy * f.grid.nx + ix)];
      out += format_double(f.grid.x_min + ix * dx);
      out += ",";
      out += format_double(f.grid.y_min + iy * dy);
      out += ",";
      out += std::isfinite(v) ? format_double(v) : "nan";
      out += "\n";
    }
  }
  return out;
}

std::string m_curve_csv(const std::vector<std::pair<double, double>>& curve) {
  std::string out = "eta,m\n";
  for (const auto& [eta, m] : curve) {
    out += format_double(eta);
    out += ",";
    out += format_double(m);
    out += "\n";
  }
  return out;
}

std::string spectrum_svg(const SpectrumResult& S) {
  double lo = 0.0, hi = 0.0;
  for (const auto& iv : S.intervals) {
    lo = std::min(lo, iv.lo);
    hi = std::max(hi, iv.hi);
  }
  const double span = std::max(hi - lo, 1e-6);
  lo -= 0.1 * span;
  hi += 0.1 * span;
  const double width = 600.0, height = 80.0, y = 40.0;
  auto xmap = [&](double v) { return (v - lo) / (hi - lo) * (width - 40.0) + 20.0; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  svg << "  <line x1=\"20\" y1=\"" << y << "\" x2=\"" << width - 20.0 << "\" y2=\"" << y
      << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  const double zx = xmap(0.0);
  svg << "  <line x1=\"" << num(zx) << "\" y1=\"" << y - 12.0 << "\" x2=\"" << num(zx)
      << "\" y2=\"" << y + 12.0 << "\" stroke=\"#c00\" stroke-width=\"1\"/>\n";
  for (const auto& iv : S.intervals) {
    const double a = xmap(iv.lo), b = std::max(xmap(iv.hi), xmap(iv.lo) + 2.0);
    svg << "  <line x1=\"" << num(a) << "\" y1=\"" << y << "\" x2=\"" << num(b) << "\" y2=\""
        << y << "\" stroke=\"#06c\" stroke-width=\"6\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fintime
