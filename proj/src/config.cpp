#include "ctns/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ctns/error.hpp"

namespace ctns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + key + "' needs a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + key + "' needs an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("'" + key + "' needs true or false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dim", [](RunConfig& c, auto& k, auto& v) { c.dim = static_cast<int>(to_long(k, v)); }},
      {"n_grid", [](RunConfig& c, auto& k, auto& v) { c.n_grid = static_cast<int>(to_long(k, v)); }},
      {"box_length", [](RunConfig& c, auto& k, auto& v) { c.box_length = to_double(k, v); }},
      {"eps", [](RunConfig& c, auto& k, auto& v) { c.sim.eps = to_double(k, v); }},
      {"dt", [](RunConfig& c, auto& k, auto& v) { c.sim.dt = to_double(k, v); }},
      {"t_end", [](RunConfig& c, auto& k, auto& v) { c.sim.t_end = to_double(k, v); }},
      {"dealias", [](RunConfig& c, auto& k, auto& v) { c.sim.dealias = to_bool(k, v); }},
      {"cfl_guard", [](RunConfig& c, auto& k, auto& v) { c.sim.cfl_guard = to_double(k, v); }},
      {"snapshot_every",
       [](RunConfig& c, auto& k, auto& v) { c.sim.snapshot_every = static_cast<int>(to_long(k, v)); }},
      {"coeff", [](RunConfig& c, auto&, auto& v) { c.coeff = v; }},
      {"s0", [](RunConfig& c, auto& k, auto& v) { c.s0 = to_double(k, v); }},
      {"potential", [](RunConfig& c, auto&, auto& v) { c.potential = v; }},
      {"init",
       [](RunConfig& c, auto&, auto& v) {
         try {
           c.init.kind = parse_preset_kind(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"init_mass", [](RunConfig& c, auto& k, auto& v) { c.init.mass = to_double(k, v); }},
      {"init_n_amplitude", [](RunConfig& c, auto& k, auto& v) { c.init.n_amplitude = to_double(k, v); }},
      {"init_n_width", [](RunConfig& c, auto& k, auto& v) { c.init.n_width = to_double(k, v); }},
      {"init_c_amplitude", [](RunConfig& c, auto& k, auto& v) { c.init.c_amplitude = to_double(k, v); }},
      {"init_c_background", [](RunConfig& c, auto& k, auto& v) { c.init.c_background = to_double(k, v); }},
      {"init_c_width", [](RunConfig& c, auto& k, auto& v) { c.init.c_width = to_double(k, v); }},
      {"init_u_norm", [](RunConfig& c, auto& k, auto& v) { c.init.u_norm = to_double(k, v); }},
      {"init_band", [](RunConfig& c, auto& k, auto& v) { c.init.band = static_cast<int>(to_long(k, v)); }},
      {"seed",
       [](RunConfig& c, auto& k, auto& v) {
         const long s = to_long(k, v);
         if (s < 0) throw ConfigError("'seed' must be nonnegative");
         c.init.seed = static_cast<std::uint64_t>(s);
       }},
      {"kappa", [](RunConfig& c, auto& k, auto& v) { c.kappa = to_double(k, v); }},
      {"floor", [](RunConfig& c, auto& k, auto& v) { c.floor = to_double(k, v); }},
      {"output", [](RunConfig& c, auto&, auto& v) { c.output = v; }},
  };
  return table;
}

std::vector<std::string> split_args(const std::string& inner) {
  std::vector<std::string> out;
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Potential parse_potential(const std::string& text) {
  const std::string t = trim(text);
  if (t == "zero") return Potential::zero();
  const auto open = t.find('{');
  if (open == std::string::npos || t.back() != '}' || trim(t.substr(0, open)) != "cosine")
    throw ConfigError("potential must be 'zero' or 'cosine{amplitude, axis, mode}', got '" + text + "'");
  const auto args = split_args(t.substr(open + 1, t.size() - open - 2));
  if (args.size() != 3) throw ConfigError("cosine potential needs amplitude, axis and mode");
  const double amp = to_double("potential", args[0]);
  const long axis = to_long("potential", args[1]);
  const long mode = to_long("potential", args[2]);
  try {
    return Potential::cosine(amp, static_cast<int>(axis), static_cast<int>(mode));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

void RunConfig::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
  if (n_grid < 4 || n_grid % 2 != 0) throw ConfigError("n_grid must be an even integer >= 4");
  if (!(box_length > 0.0)) throw ConfigError("box_length must be positive");
  if (!(s0 >= 0.0)) throw ConfigError("s0 must be nonnegative");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(floor > 0.0)) throw ConfigError("floor must be positive");
  if (!(init.mass > 0.0)) throw ConfigError("init_mass must be positive");
  if (!(init.c_amplitude >= 0.0)) throw ConfigError("init_c_amplitude must be nonnegative");
  if (init.c_amplitude > s0) throw ConfigError("init_c_amplitude exceeds s0");
  if (!(init.u_norm >= 0.0)) throw ConfigError("init_u_norm must be nonnegative");
  if (init.band < 1 || 2 * init.band >= n_grid) throw ConfigError("init_band must lie in [1, n_grid/2)");
  if (output.empty()) throw ConfigError("output must not be empty");
  try {
    sim.validate();
    make_potential();
    coefficients();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

Grid RunConfig::grid() const { return Grid::cube(dim, n_grid, box_length); }

Potential RunConfig::make_potential() const { return parse_potential(potential); }

CoefficientSet RunConfig::coefficients() const {
  std::string spec = trim(coeff);
  // tabulated paths are relative to the config file
  const std::string prefix = "tabulated{";
  if (spec.rfind(prefix, 0) == 0 && spec.back() == '}') {
    std::filesystem::path p = trim(spec.substr(prefix.size(), spec.size() - prefix.size() - 1));
    if (p.is_relative()) p = base_dir / p;
    spec = prefix + p.string() + "}";
  }
  try {
    CoefficientSet c = make_family(spec, s0, make_potential());
    ctns::validate(c);
    return c;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::filesystem::path RunConfig::output_dir() const { return output.is_relative() ? base_dir / output : output; }

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "dim = " << dim << "\n"
     << "n_grid = " << n_grid << "\n"
     << "box_length = " << fmt(box_length) << "\n"
     << "eps = " << fmt(sim.eps) << "\n"
     << "dt = " << fmt(sim.dt) << "\n"
     << "t_end = " << fmt(sim.t_end) << "\n"
     << "dealias = " << (sim.dealias ? "true" : "false") << "\n"
     << "cfl_guard = " << fmt(sim.cfl_guard) << "\n"
     << "snapshot_every = " << sim.snapshot_every << "\n"
     << "coeff = " << coeff << "\n"
     << "s0 = " << fmt(s0) << "\n"
     << "potential = " << potential << "\n"
     << "init = " << to_string(init.kind) << "\n"
     << "init_mass = " << fmt(init.mass) << "\n"
     << "init_n_amplitude = " << fmt(init.n_amplitude) << "\n"
     << "init_n_width = " << fmt(init.n_width) << "\n"
     << "init_c_amplitude = " << fmt(init.c_amplitude) << "\n"
     << "init_c_background = " << fmt(init.c_background) << "\n"
     << "init_c_width = " << fmt(init.c_width) << "\n"
     << "init_u_norm = " << fmt(init.u_norm) << "\n"
     << "init_band = " << init.band << "\n"
     << "seed = " << init.seed << "\n"
     << "kappa = " << fmt(kappa) << "\n"
     << "floor = " << fmt(floor) << "\n"
     << "output = " << output.string() << "\n";
  return os.str();
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (seen.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": '" + key + "' repeats line " +
                        std::to_string(seen[key]));
    seen[key] = lineno;
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": '" + key + "' has no value");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  std::istringstream in(text);
  return parse_config(in, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace ctns
