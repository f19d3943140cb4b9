// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fgmfc/harness.hpp"
#include "fgmfc/io.hpp"

namespace fgmfc {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void require_object(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail("unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!j.at(key).is_number_integer() && !j.at(key).is_number_unsigned())
      fail("key '" + std::string(key) + "' in " + where + " must be an integer");
  }
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.at(key).is_boolean()) fail("key '" + std::string(key) + "' in " + where + " must be a boolean");
  }
}

std::vector<int> read_mode(const json& j, const std::string& where, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    fail(where + ": a mode must be an array of " + std::to_string(dim) + " integers");
  std::vector<int> k;
  for (const auto& v : j) {
    if (!v.is_number_integer()) fail(where + ": mode entries must be integers");
    k.push_back(v.get<int>());
  }
  return k;
}

CostSpec parse_cost(const json& j, const std::string& where, int dim) {
  CostSpec c;
  c.type = "neg_sobolev";
  require_object(j, where, {"type", "r", "weight", "phi", "phi_weights", "psis"});
  read(j, "type", where, c.type);
  read(j, "r", where, c.r);
  read(j, "weight", where, c.weight);
  read(j, "phi", where, c.phi);
  read(j, "phi_weights", where, c.phi_weights);
  if (c.type != "zero" && c.type != "neg_sobolev" && c.type != "cylindrical")
    fail(where + ": type must be zero, neg_sobolev or cylindrical");
  if (c.r < 0) fail(where + ": r must be >= 0");
  if (!std::isfinite(c.weight) || c.weight < 0.0) fail(where + ": weight must be finite and >= 0");
  if (c.type == "cylindrical") {
    if (c.phi != "linear" && c.phi != "quadratic" && c.phi != "neg_quadratic")
      fail(where + ": phi must be linear, quadratic or neg_quadratic");
    if (!j.contains("psis") || !j.at("psis").is_array() || j.at("psis").empty())
      fail(where + ": cylindrical cost needs a non-empty psis array");
    for (const auto& p : j.at("psis")) {
      require_object(p, where + ".psis[]", {"mode", "amplitude"});
      if (!p.contains("mode")) fail(where + ".psis[]: missing mode");
      double amp = 1.0;
      read(p, "amplitude", where + ".psis[]", amp);
      c.psis.emplace_back(read_mode(p.at("mode"), where + ".psis[]", dim), amp);
    }
    if (c.phi_weights.empty()) c.phi_weights.assign(c.psis.size(), 1.0);
    if (c.phi_weights.size() != c.psis.size()) fail(where + ": phi_weights must match psis in length");
  }
  return c;
}

json cost_json(const CostSpec& c) {
  json j;
  j["type"] = c.type;
  if (c.type == "neg_sobolev") {
    j["r"] = c.r;
    j["weight"] = c.weight;
  } else if (c.type == "cylindrical") {
    j["phi"] = c.phi;
    j["phi_weights"] = c.phi_weights;
    json psis = json::array();
    for (const auto& [k, a] : c.psis) psis.push_back(json{{"mode", k}, {"amplitude", a}});
    j["psis"] = psis;
  }
  return j;
}

SpectralField cosine_field(int dim, const std::vector<int>& k, double amplitude, double mean) {
  int band = 0;
  for (int c : k) band = std::max(band, std::abs(c));
  SpectralField f(dim, band);
  f.set(std::vector<int>(static_cast<std::size_t>(dim), 0), mean);
  std::vector<int> neg(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) neg[i] = -k[i];
  f.set(k, f.at(k) + 0.5 * amplitude);
  f.set(neg, f.at(neg) + 0.5 * amplitude);
  return f;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("configuration is not valid JSON: ") + e.what());
  }
  const std::string top = "configuration";
  require_object(j, top,
                 {"dim", "horizon", "band", "q", "gamma", "grid", "steps", "remainder_band",
                  "init_truncated", "hamiltonian", "running_cost", "terminal_cost", "initial",
                  "picard", "sweep", "reference_band", "seed", "output_dir", "class_radius",
                  "class_samples"});
  ExperimentConfig ec;
  ProblemConfig& pc = ec.problem;
  pc.horizon = 0.5;
  read(j, "dim", top, pc.dim);
  read(j, "horizon", top, pc.horizon);
  read(j, "band", top, pc.band);
  read(j, "q", top, pc.smoothness);
  read(j, "gamma", top, pc.density_floor);
  read(j, "grid", top, pc.grid);
  read(j, "steps", top, pc.steps);
  read(j, "remainder_band", top, pc.remainder_band);
  read(j, "init_truncated", top, pc.init_truncated);
  read(j, "sweep", top, ec.sweep);
  read(j, "reference_band", top, ec.reference_band);
  read(j, "seed", top, ec.seed);
  read(j, "output_dir", top, ec.output_dir);
  read(j, "class_radius", top, ec.class_radius);
  read(j, "class_samples", top, ec.class_samples);
  if (pc.grid < 0) fail("grid must be >= 0");
  if (pc.remainder_band < 0) fail("remainder_band must be >= 0");
  ec.warnings = pc.validate();

  if (j.contains("hamiltonian")) {
    const auto& h = j.at("hamiltonian");
    const std::string where = "hamiltonian";
    require_object(h, where, {"type", "convexity", "cutoff", "drift_amplitude"});
    read(h, "type", where, ec.hamiltonian.type);
    read(h, "convexity", where, ec.hamiltonian.convexity);
    read(h, "cutoff", where, ec.hamiltonian.cutoff);
    read(h, "drift_amplitude", where, ec.hamiltonian.drift_amplitude);
  }
  if (ec.hamiltonian.type != "quadratic" && ec.hamiltonian.type != "quadratic_drift")
    fail("hamiltonian.type must be quadratic or quadratic_drift");
  if (!(ec.hamiltonian.convexity > 1.0)) fail("hamiltonian.convexity C_H must exceed 1");
  if (!(ec.hamiltonian.cutoff > 0.0)) fail("hamiltonian.cutoff M must be positive");
  if (!std::isfinite(ec.hamiltonian.drift_amplitude)) fail("hamiltonian.drift_amplitude must be finite");

  ec.running_cost = parse_cost(j.value("running_cost", json::object()), "running_cost", pc.dim);
  ec.terminal_cost = parse_cost(j.value("terminal_cost", json::object()), "terminal_cost", pc.dim);

  InitialSpec& in = ec.initial;
  in.mode.assign(static_cast<std::size_t>(pc.dim), 0);
  in.mode[0] = 1;
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    const std::string where = "initial";
    require_object(i, where, {"type", "amplitude", "mode", "coefficients", "path"});
    read(i, "type", where, in.type);
    read(i, "amplitude", where, in.amplitude);
    read(i, "path", where, in.path);
    if (i.contains("mode")) in.mode = read_mode(i.at("mode"), where + ".mode", pc.dim);
    if (i.contains("coefficients")) {
      if (!i.at("coefficients").is_array()) fail("initial.coefficients must be an array");
      for (const auto& c : i.at("coefficients")) {
        require_object(c, "initial.coefficients[]", {"k", "re", "im"});
        if (!c.contains("k")) fail("initial.coefficients[]: missing k");
        double re = 0.0, im = 0.0;
        read(c, "re", "initial.coefficients[]", re);
        read(c, "im", "initial.coefficients[]", im);
        in.coefficients.emplace_back(read_mode(c.at("k"), "initial.coefficients[]", pc.dim),
                                     Complex(re, im));
      }
    }
  }
  if (in.type != "uniform" && in.type != "cosine" && in.type != "coefficients" && in.type != "file")
    fail("initial.type must be uniform, cosine, coefficients or file");
  if (in.type == "file") {
    if (in.path.empty()) fail("initial.path is required for type file");
    fs::path p(in.path);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    in.path = fs::absolute(p).lexically_normal().string();
  }

  if (j.contains("picard")) {
    const auto& p = j.at("picard");
    require_object(p, "picard", {"tol", "max_iter", "damping"});
    read(p, "tol", "picard", ec.picard.tol);
    read(p, "max_iter", "picard", ec.picard.max_iter);
    read(p, "damping", "picard", ec.picard.damping);
  }
  if (!(ec.picard.tol > 0.0)) fail("picard.tol must be positive");
  if (ec.picard.max_iter < 1) fail("picard.max_iter must be >= 1");
  if (!(ec.picard.damping > 0.0 && ec.picard.damping <= 1.0)) fail("picard.damping must lie in (0, 1]");

  if (ec.sweep.empty()) fail("sweep must list at least one band");
  for (std::size_t i = 0; i < ec.sweep.size(); ++i) {
    if (ec.sweep[i] < 1) fail("sweep bands must be >= 1");
    if (i > 0 && ec.sweep[i] <= ec.sweep[i - 1]) fail("sweep must be strictly increasing");
  }
  if (ec.reference_band < 4 * ec.sweep.back())
    fail("reference_band must be >= 4 x the largest sweep band");
  if (!(ec.class_radius > 1.0)) fail("class_radius R must exceed 1");
  if (ec.class_samples < 0) fail("class_samples must be >= 0");

  // Resolve the initial datum now so that bad data is a configuration error.
  SpectralField m;
  try {
    m = make_initial(ec);
  } catch (const Error& e) {
    fail(std::string("initial: ") + e.what());
  }
  if (m.dim() != pc.dim) fail("initial datum has the wrong dimension");
  const int g = std::max(pc.grid_resolution(), 2 * m.band() + 1);
  const auto rep = is_probability_coeffs(m, g, 1e-12);
  if (!rep.ok) fail("initial datum is not a probability density (mass, symmetry or sign)");
  if (rep.min_density < pc.density_floor) {
    std::ostringstream os;
    os << "initial density minimum " << rep.min_density << " is below gamma = " << pc.density_floor;
    ec.warnings.push_back(os.str());
  }

  json c;
  c["dim"] = pc.dim;
  c["horizon"] = pc.horizon;
  c["band"] = pc.band;
  c["q"] = pc.smoothness;
  c["gamma"] = pc.density_floor;
  c["grid"] = pc.grid;
  c["steps"] = pc.steps;
  c["remainder_band"] = pc.remainder_band;
  c["init_truncated"] = pc.init_truncated;
  c["hamiltonian"] = json{{"type", ec.hamiltonian.type},
                          {"convexity", ec.hamiltonian.convexity},
                          {"cutoff", ec.hamiltonian.cutoff},
                          {"drift_amplitude", ec.hamiltonian.drift_amplitude}};
  c["running_cost"] = cost_json(ec.running_cost);
  c["terminal_cost"] = cost_json(ec.terminal_cost);
  json ij;
  ij["type"] = in.type;
  if (in.type == "cosine") {
    ij["amplitude"] = in.amplitude;
    ij["mode"] = in.mode;
  } else if (in.type == "coefficients") {
    json arr = json::array();
    for (const auto& [k, v] : in.coefficients)
      arr.push_back(json{{"k", k}, {"re", v.real()}, {"im", v.imag()}});
    ij["coefficients"] = arr;
  } else if (in.type == "file") {
    ij["path"] = in.path;
  }
  c["initial"] = ij;
  c["picard"] = json{{"tol", ec.picard.tol}, {"max_iter", ec.picard.max_iter}, {"damping", ec.picard.damping}};
  c["sweep"] = ec.sweep;
  c["reference_band"] = ec.reference_band;
  c["seed"] = ec.seed;
  c["output_dir"] = ec.output_dir;
  c["class_radius"] = ec.class_radius;
  c["class_samples"] = ec.class_samples;
  ec.canonical_json = c.dump(2) + "\n";
  return ec;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    fail(e.what());
  }
  return parse_config(text, fs::path(path).parent_path().string().empty()
                                ? std::string(".")
                                : fs::path(path).parent_path().string());
}

HamiltonianModel make_hamiltonian(const ExperimentConfig& ec) {
  const auto& h = ec.hamiltonian;
  if (h.type == "quadratic_drift")
    return quadratic_drift_hamiltonian(ec.problem.dim, h.drift_amplitude, h.convexity, h.cutoff);
  return quadratic_hamiltonian(ec.problem.dim, h.convexity, h.cutoff);
}

namespace {

CostModel make_cost(const CostSpec& c, int dim, std::vector<std::string>* warnings) {
  if (c.type == "zero") return zero_cost(dim);
  if (c.type == "neg_sobolev")
    return builtin_cost_negative_sobolev(SpectralField::constant(dim, 1.0), c.r, c.weight, warnings);
  std::vector<SpectralField> psis;
  for (const auto& [k, a] : c.psis) psis.push_back(cosine_field(dim, k, a, 0.0));
  std::vector<double> w = c.phi_weights;
  if (c.phi == "linear") return builtin_cost_cylindrical(phi_linear(w), std::move(psis));
  if (c.phi == "neg_quadratic")
    for (double& x : w) x = -x;
  return builtin_cost_cylindrical(phi_quadratic(w), std::move(psis));
}

}  // namespace

MfcCosts make_costs(const ExperimentConfig& ec, std::vector<std::string>* warnings) {
  return MfcCosts{make_cost(ec.running_cost, ec.problem.dim, warnings),
                  make_cost(ec.terminal_cost, ec.problem.dim, warnings)};
}

SpectralField make_initial(const ExperimentConfig& ec) {
  const int dim = ec.problem.dim;
  const auto& in = ec.initial;
  if (in.type == "uniform") return SpectralField::constant(dim, 1.0);
  if (in.type == "cosine") return cosine_field(dim, in.mode, in.amplitude, 1.0);
  if (in.type == "file") return read_field_csv(in.path);
  int band = 0;
  for (const auto& [k, v] : in.coefficients)
    for (int c : k) band = std::max(band, std::abs(c));
  SpectralField f(dim, band);
  f.set(std::vector<int>(static_cast<std::size_t>(dim), 0), 1.0);
  for (const auto& [k, v] : in.coefficients) f.set(k, v);
  return f;
}

SpectralField random_smooth_field(int dim, int band, double decay, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(dim, band);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const ModeIndex k = f.mode_at(i);
    double k2 = 0.0;
    for (int c : k.components) k2 += static_cast<double>(c) * c;
    const double scale = std::pow(1.0 + k2, -0.5 * decay);
    f[i] = scale * Complex(normal(rng), normal(rng));
  }
  return f.symmetrize();
}

SpectralField sample_class_member(int dim, int smoothness, double gamma, double radius,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> fraction(0.3, 0.95);
  const int band = 3;
  SpectralField f(dim, band);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const int kn = f.mode_norm(i);
    f[i] = Complex(normal(rng), normal(rng)) / (1.0 + kn * kn);
  }
  f[f.zero_index()] = 0.0;
  f.symmetrize();
  double l1 = 0.0;
  for (const auto& c : f.coeffs()) l1 += std::abs(c);
  f *= (1.0 - gamma) * fraction(rng) / l1;
  const double excess = std::pow(sobolev_norm(f, smoothness - 1.0), 2);
  if (1.0 + excess > radius) f *= std::sqrt((radius - 1.0) / excess);
  f[f.zero_index()] = 1.0;
  return f;
}

}  // namespace fgmfc
