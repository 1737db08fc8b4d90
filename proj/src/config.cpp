#include "qms/config.hpp"

#include "qms/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qms {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Config, (where.empty() ? std::string("/") : where) + ": " + what);
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

long long get_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

// Dispatches each key of an object to its handler; unknown keys are errors.
using Handler = std::function<void(const json&, const std::string&)>;
void for_each_key(const json& obj, const std::string& where, const std::map<std::string, Handler>& handlers) {
  require_object(obj, where);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string at = where + "/" + it.key();
    auto h = handlers.find(it.key());
    if (h == handlers.end()) fail(at, "unknown key");
    h->second(it.value(), at);
  }
}

struct ParamField {
  const char* name;
  double PhysicalParams::*member;
};

constexpr ParamField kParamFields[] = {
    {"alpha_c", &PhysicalParams::alpha_c},
    {"lambda_p", &PhysicalParams::lambda_p},
    {"gamma", &PhysicalParams::gamma},
    {"mass", &PhysicalParams::mass},
    {"inductance", &PhysicalParams::inductance},
    {"omega_m", &PhysicalParams::omega_m},
    {"kappa_s", &PhysicalParams::kappa_s},
    {"kappa_i", &PhysicalParams::kappa_i},
    {"kappa_cs", &PhysicalParams::kappa_cs},
    {"kappa_ci", &PhysicalParams::kappa_ci},
    {"c1_x0", &PhysicalParams::c1_x0},
    {"c_d", &PhysicalParams::c_d},
    {"c_vs_min", &PhysicalParams::c_vs_min},
    {"c_vs_max", &PhysicalParams::c_vs_max},
    {"chi2", &PhysicalParams::chi2},
    {"refractive_index", &PhysicalParams::refractive_index},
    {"e_p0", &PhysicalParams::e_p0},
    {"e_c", &PhysicalParams::e_c},
    {"e_omega", &PhysicalParams::e_omega},
    {"v_d", &PhysicalParams::v_d},
    {"temperature", &PhysicalParams::temperature},
    {"d_cap", &PhysicalParams::d_cap},
    {"detuning_ocs", &PhysicalParams::detuning_ocs},
    {"detuning_oci", &PhysicalParams::detuning_oci},
    {"detuning_oos", &PhysicalParams::detuning_oos},
    {"detuning_ooi", &PhysicalParams::detuning_ooi},
};

const char* to_string(G11Convention c) {
  return c == G11Convention::Unrooted ? "unrooted" : "sqrt";
}

void apply_params(const json& obj, const std::string& where, PhysicalParams& p) {
  std::map<std::string, Handler> h;
  for (const auto& f : kParamFields) {
    h[f.name] = [&p, &f](const json& v, const std::string& at) { p.*(f.member) = get_number(v, at); };
  }
  h["g11_convention"] = [&p](const json& v, const std::string& at) {
    const std::string s = get_string(v, at);
    if (s == "sqrt") p.g11_convention = G11Convention::SqrtCoefficient;
    else if (s == "unrooted") p.g11_convention = G11Convention::Unrooted;
    else fail(at, "expected \"sqrt\" or \"unrooted\"");
  };
  for_each_key(obj, where, h);
}

void parse_range(const json& obj, const std::string& where, double& lo, double& hi, int& points,
                 std::vector<double>* values) {
  std::map<std::string, Handler> h{
      {"lo", [&](const json& v, const std::string& at) { lo = get_number(v, at); }},
      {"hi", [&](const json& v, const std::string& at) { hi = get_number(v, at); }},
      {"points",
       [&](const json& v, const std::string& at) {
         const long long n = get_integer(v, at);
         if (n < 0 || n > 10'000'000) fail(at, "out of range");
         points = static_cast<int>(n);
       }},
  };
  if (values) {
    h["values"] = [values](const json& v, const std::string& at) {
      if (!v.is_array()) fail(at, "expected an array of numbers");
      values->clear();
      for (std::size_t k = 0; k < v.size(); ++k) values->push_back(get_number(v[k], at + "/" + std::to_string(k)));
    };
  }
  for_each_key(obj, where, h);
}

SweepVariable parse_variable(const std::string& s, const std::string& at) {
  for (SweepVariable v : {SweepVariable::DetuningRatio, SweepVariable::Temperature, SweepVariable::Chi2,
                          SweepVariable::FExt, SweepVariable::FieldAngle, SweepVariable::VH1}) {
    if (s == to_string(v)) return v;
  }
  fail(at, "unknown sweep variable \"" + s + "\"");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return ss.str();
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, origin + ": malformed JSON (" + e.what() + ")");
  }
}

void apply_calibration(const std::filesystem::path& path, PhysicalParams& p) {
  const json doc = parse_json(read_file(path), path.string());
  require_object(doc, path.string());
  if (!doc.contains("params")) fail(path.string(), "calibration file has no \"params\" object");
  apply_params(doc.at("params"), path.string() + "#/params", p);
}

void check_range(bool ok, const std::string& where, const std::string& what) {
  if (!ok) fail(where, what);
}

}  // namespace

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::DetuningRatio: return "detuning_ratio";
    case SweepVariable::Temperature: return "temperature";
    case SweepVariable::Chi2: return "chi2";
    case SweepVariable::FExt: return "f_ext";
    case SweepVariable::FieldAngle: return "field_angle";
    case SweepVariable::VH1: return "v_h1";
  }
  return "?";
}

const char* to_string(DetuningNormalization v) {
  return v == DetuningNormalization::Microwave ? "microwave" : "mechanical";
}

std::vector<double> SweepSpec::grid() const {
  if (!values.empty()) return values;
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g[static_cast<std::size_t>(k)] = (lo * (points - 1 - k) + hi * k) / (points - 1);
  }
  return g;
}

std::vector<double> DetuningScan::grid() const {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g[static_cast<std::size_t>(k)] = points == 1 ? lo : (lo * (points - 1 - k) + hi * k) / (points - 1);
  }
  return g;
}

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const Error& e) {
    fail("/params", e.what());
  }
  try {
    varactor.validate();
  } catch (const Error& e) {
    fail("/varactor", e.what());
  }
  check_range(field.v_h1 >= 0.0 && field.v_h1 <= 1.0, "/field/v_h1", "must lie in [0, 1]");
  check_range(field.v_h2 >= 0.0 && field.v_h2 <= 1.0, "/field/v_h2", "must lie in [0, 1]");
  if (sweep.values.empty()) {
    check_range(sweep.lo < sweep.hi, "/sweep", "lo must be below hi");
    check_range(sweep.points >= 2, "/sweep/points", "at least 2 points required");
  }
  for (double v : sweep.grid()) {
    switch (sweep.variable) {
      case SweepVariable::Temperature: check_range(v >= 0.0, "/sweep", "temperature must be >= 0"); break;
      case SweepVariable::Chi2: check_range(v >= 0.0, "/sweep", "chi2 must be >= 0"); break;
      case SweepVariable::FExt: check_range(v >= 0.0, "/sweep", "f_ext must be >= 0"); break;
      case SweepVariable::VH1: check_range(v >= 0.0 && v <= 1.0, "/sweep", "v_h1 must lie in [0, 1]"); break;
      default: break;
    }
  }
  if (detuning_scan.points > 0) {
    check_range(detuning_scan.points == 1 || detuning_scan.lo < detuning_scan.hi, "/detuning_scan",
                "lo must be below hi");
  }
  check_range(f_ext >= 0.0, "/f_ext", "must be >= 0");
  check_range(field_magnitude >= 0.0, "/field_magnitude", "must be >= 0");
  check_range(b_ref > 0.0, "/b_ref", "must be positive");
  check_range(compass.pair_count >= 1 && compass.pair_count <= 100000, "/compass/pair_count",
              "must be between 1 and 100000");
  check_range(compass.b_ref > 0.0, "/compass/b_ref", "must be positive");
  check_range(compass.magnitude >= 0.0, "/compass/magnitude", "must be >= 0");
  check_range(threads >= 0, "/threads", "must be >= 0");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  bool blank = true;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      blank = false;
      break;
    }
  }
  if (blank) {
    cfg.validate();
    return cfg;
  }
  const json doc = parse_json(text, "config");
  require_object(doc, "");

  // The calibration overlay goes first so that explicit params win.
  if (doc.contains("calibration")) {
    cfg.calibration = get_string(doc.at("calibration"), "/calibration");
    std::filesystem::path p(cfg.calibration);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    apply_calibration(p, cfg.params);
  }

  const std::map<std::string, Handler> handlers{
      {"calibration", [](const json&, const std::string&) {}},
      {"mode",
       [&](const json& v, const std::string& at) {
         const std::string s = get_string(v, at);
         if (s == "sweep") cfg.mode = RunMode::Sweep;
         else if (s == "compass") cfg.mode = RunMode::Compass;
         else fail(at, "expected \"sweep\" or \"compass\"");
       }},
      {"params", [&](const json& v, const std::string& at) { apply_params(v, at, cfg.params); }},
      {"varactor",
       [&](const json& v, const std::string& at) {
         for_each_key(v, at,
                      {{"c_nominal", [&](const json& x, const std::string& a) { cfg.varactor.c_nominal = get_number(x, a); }},
                       {"parasitic_inductance",
                        [&](const json& x, const std::string& a) { cfg.varactor.parasitic_inductance = get_number(x, a); }},
                       {"series_resistance",
                        [&](const json& x, const std::string& a) { cfg.varactor.series_resistance = get_number(x, a); }}});
       }},
      {"field",
       [&](const json& v, const std::string& at) {
         for_each_key(v, at,
                      {{"v_h1", [&](const json& x, const std::string& a) { cfg.field.v_h1 = get_number(x, a); }},
                       {"v_h2", [&](const json& x, const std::string& a) { cfg.field.v_h2 = get_number(x, a); }}});
       }},
      {"sweep",
       [&](const json& v, const std::string& at) {
         require_object(v, at);
         json rest = v;
         if (rest.contains("variable")) {
           cfg.sweep.variable = parse_variable(get_string(rest.at("variable"), at + "/variable"), at + "/variable");
           rest.erase("variable");
         }
         parse_range(rest, at, cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.points, &cfg.sweep.values);
       }},
      {"detuning_scan",
       [&](const json& v, const std::string& at) {
         parse_range(v, at, cfg.detuning_scan.lo, cfg.detuning_scan.hi, cfg.detuning_scan.points, nullptr);
       }},
      {"normalization",
       [&](const json& v, const std::string& at) {
         const std::string s = get_string(v, at);
         if (s == "mechanical") cfg.normalization = DetuningNormalization::Mechanical;
         else if (s == "microwave") cfg.normalization = DetuningNormalization::Microwave;
         else fail(at, "expected \"mechanical\" or \"microwave\"");
       }},
      {"detuning_ratio", [&](const json& v, const std::string& at) { cfg.detuning_ratio = get_number(v, at); }},
      {"f_ext", [&](const json& v, const std::string& at) { cfg.f_ext = get_number(v, at); }},
      {"theta_ext", [&](const json& v, const std::string& at) { cfg.theta_ext = get_number(v, at); }},
      {"field_magnitude", [&](const json& v, const std::string& at) { cfg.field_magnitude = get_number(v, at); }},
      {"b_ref", [&](const json& v, const std::string& at) { cfg.b_ref = get_number(v, at); }},
      {"compass",
       [&](const json& v, const std::string& at) {
         for_each_key(
             v, at,
             {{"pair_count",
               [&](const json& x, const std::string& a) {
                 const long long n = get_integer(x, a);
                 if (n < 1 || n > 100000) fail(a, "must be between 1 and 100000");
                 cfg.compass.pair_count = static_cast<int>(n);
               }},
              {"b_ref", [&](const json& x, const std::string& a) { cfg.compass.b_ref = get_number(x, a); }},
              {"field_angle", [&](const json& x, const std::string& a) { cfg.compass.field_angle = get_number(x, a); }},
              {"magnitude", [&](const json& x, const std::string& a) { cfg.compass.magnitude = get_number(x, a); }}});
       }},
      {"output", [&](const json& v, const std::string& at) { cfg.output = get_string(v, at); }},
      {"seed",
       [&](const json& v, const std::string& at) {
         if (!v.is_number_unsigned()) fail(at, "expected a non-negative integer");
         cfg.seed = v.get<std::uint64_t>();
       }},
      {"threads",
       [&](const json& v, const std::string& at) {
         const long long n = get_integer(v, at);
         if (n < 0 || n > 4096) fail(at, "must be between 0 and 4096");
         cfg.threads = static_cast<int>(n);
       }},
      {"emit_timing", [&](const json& v, const std::string& at) { cfg.emit_timing = get_bool(v, at); }},
  };
  for_each_key(doc, "", handlers);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

void apply_params_json(const std::string& json_text, PhysicalParams& params, const std::string& location) {
  apply_params(parse_json(json_text, location), location, params);
}

std::string serialize_config(const RunConfig& c) {
  ordered_json doc;
  doc["mode"] = c.mode == RunMode::Compass ? "compass" : "sweep";
  ordered_json p;
  for (const auto& f : kParamFields) p[f.name] = c.params.*(f.member);
  p["g11_convention"] = to_string(c.params.g11_convention);
  doc["params"] = p;
  doc["varactor"] = {{"c_nominal", c.varactor.c_nominal},
                     {"parasitic_inductance", c.varactor.parasitic_inductance},
                     {"series_resistance", c.varactor.series_resistance}};
  doc["field"] = {{"v_h1", c.field.v_h1}, {"v_h2", c.field.v_h2}};
  ordered_json s;
  s["variable"] = to_string(c.sweep.variable);
  s["lo"] = c.sweep.lo;
  s["hi"] = c.sweep.hi;
  s["points"] = c.sweep.points;
  if (!c.sweep.values.empty()) s["values"] = c.sweep.values;
  doc["sweep"] = s;
  doc["detuning_scan"] = {{"lo", c.detuning_scan.lo}, {"hi", c.detuning_scan.hi}, {"points", c.detuning_scan.points}};
  doc["normalization"] = to_string(c.normalization);
  doc["detuning_ratio"] = c.detuning_ratio;
  doc["f_ext"] = c.f_ext;
  doc["theta_ext"] = c.theta_ext;
  doc["field_magnitude"] = c.field_magnitude;
  doc["b_ref"] = c.b_ref;
  doc["compass"] = {{"pair_count", c.compass.pair_count},
                    {"b_ref", c.compass.b_ref},
                    {"field_angle", c.compass.field_angle},
                    {"magnitude", c.compass.magnitude}};
  doc["output"] = c.output;
  doc["seed"] = c.seed;
  doc["threads"] = c.threads;
  doc["emit_timing"] = c.emit_timing;
  return doc.dump(2) + "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

}  // namespace qms
