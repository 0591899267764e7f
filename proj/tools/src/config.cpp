#include "lbmcf_cli/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace lbmcf::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected a number, got '" + text + "'");
  return v;
}

long long to_int(const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

Mat2 to_matrix(const std::string& text) {
  const auto parts = split(text, " \t,");
  if (parts.size() != 4) {
    throw ConfigError("expected four numbers 'a11 re12 im12 a22', got '" + text + "'");
  }
  return hermitian(to_double(parts[0]), to_double(parts[3]),
                   Complex(to_double(parts[1]), to_double(parts[2])));
}

std::vector<TrigProduct> to_modes(const std::string& text) {
  std::vector<TrigProduct> modes;
  for (const auto& token : split(text, " \t,")) {
    try {
      modes.push_back(parse_trig_product(token));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return modes;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_matrix(const Mat2& m) {
  return fmt(m(0, 0).real()) + " " + fmt(m(0, 1).real()) + " " + fmt(m(0, 1).imag()) + " " +
         fmt(m(1, 1).real());
}

std::string fmt_modes(const std::vector<TrigProduct>& modes) {
  std::string out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (i) out += ", ";
    out += format_trig_product(modes[i]);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n", [](RunConfig& c, const std::string& v) { c.flow.n = static_cast<int>(to_int(v)); }},
      {"scheme",
       [](RunConfig& c, const std::string& v) {
         try {
           c.flow.scheme = parse_scheme(v);
         } catch (const std::exception& e) {
           throw ConfigError(e.what());
         }
       }},
      {"cfl_sigma", [](RunConfig& c, const std::string& v) { c.flow.cfl_sigma = to_double(v); }},
      {"dt", [](RunConfig& c, const std::string& v) { c.flow.dt = to_double(v); }},
      {"t_max", [](RunConfig& c, const std::string& v) { c.flow.t_max = to_double(v); }},
      {"residual_tol", [](RunConfig& c, const std::string& v) { c.flow.residual_tol = to_double(v); }},
      {"sample_interval",
       [](RunConfig& c, const std::string& v) { c.flow.sample_interval = to_double(v); }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = to_int(v);
         if (s < 0) throw ConfigError("seed must be non-negative");
         c.flow.seed = static_cast<std::uint64_t>(s);
       }},
      {"hypercritical", [](RunConfig& c, const std::string& v) { c.flow.hypercritical = to_bool(v); }},
      {"alpha", [](RunConfig& c, const std::string& v) { c.flow.background.alpha = to_matrix(v); }},
      {"f_hat",
       [](RunConfig& c, const std::string& v) { c.flow.background.f_hat_const = to_matrix(v); }},
      {"bump_amplitude",
       [](RunConfig& c, const std::string& v) { c.flow.background.bump_amplitude = to_double(v); }},
      {"bump_modes",
       [](RunConfig& c, const std::string& v) { c.flow.background.bump_modes = to_modes(v); }},
      {"init_amplitude",
       [](RunConfig& c, const std::string& v) { c.flow.initial.amplitude = to_double(v); }},
      {"init_modes", [](RunConfig& c, const std::string& v) { c.flow.initial.modes = to_modes(v); }},
      {"init_noise",
       [](RunConfig& c, const std::string& v) { c.flow.initial.noise_amplitude = to_double(v); }},
      {"init_noise_kmax",
       [](RunConfig& c, const std::string& v) {
         c.flow.initial.noise_k_max = static_cast<int>(to_int(v));
       }},
      {"newton_tol", [](RunConfig& c, const std::string& v) { c.newton.tol = to_double(v); }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "repeated key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  try {
    config.flow.validate();
    if (!(config.newton.tol > 0.0)) throw ConfigError("newton_tol must be positive");
    if (config.flow.initial.noise_k_max < 1) throw ConfigError("init_noise_kmax must be >= 1");
    // Hermitian and positivity checks on alpha.
    (void)AlphaFrame(config.flow.background.alpha);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_config(const RunConfig& c) {
  const auto& f = c.flow;
  std::ostringstream out;
  out << "n = " << f.n << "\n"
      << "scheme = " << scheme_name(f.scheme) << "\n"
      << "cfl_sigma = " << fmt(f.cfl_sigma) << "\n"
      << "dt = " << fmt(f.dt) << "\n"
      << "t_max = " << fmt(f.t_max) << "\n"
      << "residual_tol = " << fmt(f.residual_tol) << "\n"
      << "sample_interval = " << fmt(f.sample_interval) << "\n"
      << "seed = " << f.seed << "\n"
      << "hypercritical = " << (f.hypercritical ? "true" : "false") << "\n"
      << "alpha = " << fmt_matrix(f.background.alpha) << "\n"
      << "f_hat = " << fmt_matrix(f.background.f_hat_const) << "\n"
      << "bump_amplitude = " << fmt(f.background.bump_amplitude) << "\n"
      << "bump_modes = " << fmt_modes(f.background.bump_modes) << "\n"
      << "init_amplitude = " << fmt(f.initial.amplitude) << "\n"
      << "init_modes = " << fmt_modes(f.initial.modes) << "\n"
      << "init_noise = " << fmt(f.initial.noise_amplitude) << "\n"
      << "init_noise_kmax = " << f.initial.noise_k_max << "\n"
      << "newton_tol = " << fmt(c.newton.tol) << "\n";
  return out.str();
}

}  // namespace lbmcf::cli
