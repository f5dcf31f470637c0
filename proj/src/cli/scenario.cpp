#include "cuspsheet/cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "cuspsheet/su2.hpp"

namespace cuspsheet::cli {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ScenarioError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& obj, const std::string& key, const std::string& where, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError("missing '" + key + "' in " + where);
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ScenarioError("'" + key + "' in " + where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ScenarioError("'" + key + "' in " + where + " must be finite");
  return x;
}

ChiralProfile parse_profile(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ScenarioError(where + " must be a list of bumps");
  std::vector<Bump> terms;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    only_keys(arr[k], {"center", "width", "re", "im"}, at);
    const double width = number(arr[k], "width", at);
    if (!(width > 0.0)) throw ScenarioError("bump width must be positive in " + at);
    terms.push_back({number(arr[k], "center", at), width, {number(arr[k], "re", at, 0.0), number(arr[k], "im", at, 0.0)}});
  }
  return ChiralProfile(std::move(terms));
}

Matrix2C parse_matrix(const json& v, const std::string& where) {
  Matrix2C m;
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "identity") return Matrix2C::Identity();
    if (name == "minus_i_sigma2") return minus_i_sigma2();
    throw ScenarioError(where + ": unknown matrix name '" + name + "' (identity | minus_i_sigma2)");
  }
  if (!v.is_array() || v.size() != 2) throw ScenarioError(where + " must be a name or a 2x2 array of [re, im]");
  for (int r = 0; r < 2; ++r) {
    if (!v[r].is_array() || v[r].size() != 2) throw ScenarioError(where + " must be a 2x2 array of [re, im]");
    for (int c = 0; c < 2; ++c) {
      const json& e = v[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ScenarioError(where + " entries must be [re, im] pairs");
      }
      m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  if (!is_su2(m, 1e-10)) throw ScenarioError(where + " is not an SU(2) matrix");
  return m;
}

std::vector<Vec3> parse_momenta(const json& v, const std::string& where) {
  if (!v.is_array()) throw ScenarioError(where + " must be a list of 3-vectors");
  std::vector<Vec3> out;
  for (const auto& p : v) {
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
      throw ScenarioError(where + " entries must be [px, py, pz]");
    }
    out.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("malformed scenario JSON: ") + e.what());
  }
  only_keys(doc,
            {"name", "rho_plus", "rho_minus", "gapped_pair", "initial_plus", "initial_minus", "kappa", "base_point",
             "grid", "cusp_tol", "singular_threshold", "beta", "kernel", "output_dir", "test_hooks"},
            "scenario");
  Scenario sc;
  sc.sourceText = text;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ScenarioError("'name' must be a string");
    sc.name = doc["name"].get<std::string>();
  }
  if (doc.contains("rho_plus")) sc.rhoPlus = parse_profile(doc["rho_plus"], "rho_plus");
  if (doc.contains("rho_minus")) sc.rhoMinus = parse_profile(doc["rho_minus"], "rho_minus");
  if (doc.contains("gapped_pair")) {
    const json& g = doc["gapped_pair"];
    only_keys(g, {"b", "re", "im", "edge_width"}, "gapped_pair");
    const double b = number(g, "b", "gapped_pair");
    if (!(b > 0.0)) throw ScenarioError("gapped_pair.b must be positive");
    const cplx amp(number(g, "re", "gapped_pair", 1.0), number(g, "im", "gapped_pair", 0.0));
    const double edge = number(g, "edge_width", "gapped_pair", b / 20.0);
    if (!(edge > 0.0) || edge > b / 2.0) throw ScenarioError("gapped_pair.edge_width must lie in (0, b/2]");
    const ProfilePair pair = make_gapped_pair(b, amp, edge);
    sc.rhoPlus = pair.plus + sc.rhoPlus;
    sc.rhoMinus = pair.minus + sc.rhoMinus;
  }
  if (doc.contains("initial_plus")) sc.initialPlus = parse_matrix(doc["initial_plus"], "initial_plus");
  if (doc.contains("initial_minus")) sc.initialMinus = parse_matrix(doc["initial_minus"], "initial_minus");
  sc.kappa = number(doc, "kappa", "scenario", 1.0);
  if (!(sc.kappa > 0.0)) throw ScenarioError("kappa must be positive");
  if (doc.contains("base_point")) {
    const json& x = doc["base_point"];
    if (!x.is_array() || x.size() != 4) throw ScenarioError("base_point must be [X0, X1, X2, X3]");
    for (int k = 0; k < 4; ++k) {
      if (!x[k].is_number()) throw ScenarioError("base_point entries must be numbers");
      sc.basePoint(k) = x[k].get<double>();
    }
  }
  if (!doc.contains("grid")) throw ScenarioError("missing 'grid'");
  {
    const json& g = doc["grid"];
    only_keys(g, {"t_min", "t_max", "s_min", "s_max", "step"}, "grid");
    sc.grid.tMin = number(g, "t_min", "grid");
    sc.grid.tMax = number(g, "t_max", "grid");
    sc.grid.sMin = number(g, "s_min", "grid");
    sc.grid.sMax = number(g, "s_max", "grid");
    sc.grid.step = number(g, "step", "grid");
    if (!(sc.grid.step > 0.0)) throw ScenarioError("grid.step must be positive");
    if (sc.grid.tMin > sc.grid.tMax || sc.grid.sMin > sc.grid.sMax) throw ScenarioError("grid ranges are empty");
  }
  sc.cuspTol = number(doc, "cusp_tol", "scenario", 1e-10);
  if (!(sc.cuspTol > 0.0)) throw ScenarioError("cusp_tol must be positive");
  sc.singularThreshold = number(doc, "singular_threshold", "scenario", 1e-6);
  if (!(sc.singularThreshold > 0.0)) throw ScenarioError("singular_threshold must be positive");
  sc.beta = number(doc, "beta", "scenario", 0.0);
  if (doc.contains("kernel")) {
    const json& k = doc["kernel"];
    only_keys(k, {"epsilon", "a", "R", "tail_width", "time", "momenta", "momenta_prime"}, "kernel");
    KernelSpec ks;
    ks.config.epsilon = number(k, "epsilon", "kernel", -1.0);
    ks.config.cutoffScale = number(k, "a", "kernel", 0.5);
    ks.config.plateauHalfWidth = number(k, "R", "kernel", 2.0);
    ks.config.tailWidth = number(k, "tail_width", "kernel", 0.5);
    ks.time = number(k, "time", "kernel", 0.0);
    try {
      ks.config.validate();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("kernel: ") + e.what());
    }
    if (!k.contains("momenta")) throw ScenarioError("kernel.momenta is required");
    ks.momenta = parse_momenta(k["momenta"], "kernel.momenta");
    ks.momentaPrime = k.contains("momenta_prime") ? parse_momenta(k["momenta_prime"], "kernel.momenta_prime") : ks.momenta;
    sc.kernel = std::move(ks);
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ScenarioError("output_dir must be a string");
    sc.outputDir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("test_hooks")) {
    only_keys(doc["test_hooks"], {"euler_transport"}, "test_hooks");
    if (doc["test_hooks"].contains("euler_transport")) {
      if (!doc["test_hooks"]["euler_transport"].is_boolean()) throw ScenarioError("euler_transport must be a boolean");
      sc.eulerTransport = doc["test_hooks"]["euler_transport"].get<bool>();
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  // A relative output_dir is taken from the working directory.
  return parse_scenario(buf.str());
}

}  // namespace cuspsheet::cli
