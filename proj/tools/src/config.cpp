#include "mmot_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace mmot::cli {

namespace {

using boost::property_tree::ptree;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, "cli", what);
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error(key + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  config_error(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(to_double(key, item));
  }
  return out;
}

DensityFamily parse_family(const std::string& name) {
  if (name == "file") return DensityFamily::File;
  if (name == "uniform") return DensityFamily::Uniform;
  if (name == "exponential") return DensityFamily::Exponential;
  if (name == "gaussian_radial") return DensityFamily::GaussianRadial;
  config_error("density.family: unknown family '" + name + "'");
}

using Setter = void (*)(RunConfig&, const std::string&, const std::string&);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"density.family", [](RunConfig& c, const std::string&, const std::string& v) {
         c.density.family = parse_family(v);
       }},
      {"density.path", [](RunConfig& c, const std::string&, const std::string& v) {
         c.density.path = v;
       }},
      {"density.geometry", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "line") {
           c.density.geometry = GeometryKind::Line1D;
         } else if (v == "radial") {
           c.density.geometry = GeometryKind::RadialSymmetric;
         } else {
           config_error(k + ": expected line or radial");
         }
       }},
      {"density.dimension", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.density.dimension = static_cast<int>(to_unsigned(k, v));
       }},
      {"density.a", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.density.a = to_double(k, v);
       }},
      {"density.b", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.density.b = to_double(k, v);
       }},
      {"density.rate", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.density.rate = to_double(k, v);
       }},
      {"density.r_max", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.density.r_max = to_double(k, v);
       }},
      {"density.sigma", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.density.sigma = to_double(k, v);
       }},
      {"density.renormalize", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.density.renormalize = to_bool(k, v);
       }},
      {"density.grid_size", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.grid_size = to_unsigned(k, v);
       }},
      {"density.particles", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.particles = static_cast<int>(to_unsigned(k, v));
       }},
      {"cost.s", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.riesz_s = to_double(k, v);
       }},
      {"cost.eta", [](RunConfig& c, const std::string&, const std::string& v) {
         c.eta = parse_eta(v);
       }},
      {"solver.method", [](RunConfig& c, const std::string&, const std::string& v) {
         c.method = parse_method(v);
       }},
      {"solver.sinkhorn_factors", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.sinkhorn_factors = to_list(k, v);
       }},
      {"analysis.tail", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.analyses.tail = to_bool(k, v);
       }},
      {"analysis.dissociation", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.analyses.dissociation = to_bool(k, v);
       }},
      {"analysis.monotonicity", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.analyses.monotonicity = to_bool(k, v);
       }},
      {"analysis.ladder", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.analyses.ladder = to_bool(k, v);
       }},
      {"analysis.dualcharge", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.analyses.dualcharge = to_bool(k, v);
       }},
      {"analysis.audit_samples", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.audit_samples = to_unsigned(k, v);
       }},
      {"analysis.tail_r_min", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tail_r_min = to_double(k, v);
       }},
      {"analysis.tail_r_max", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tail_r_max = to_double(k, v);
       }},
      {"analysis.mollify", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.mollify = to_bool(k, v);
       }},
      {"tolerances.marginal", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.marginal = to_double(k, v);
       }},
      {"tolerances.gap_relative", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.gap_relative = to_double(k, v);
       }},
      {"tolerances.sinkhorn_gap_relative",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.sinkhorn_gap_relative = to_double(k, v);
       }},
      {"tolerances.normalize", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.normalize = to_double(k, v);
       }},
      {"tolerances.max_sweeps", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.max_sweeps = to_unsigned(k, v);
       }},
      {"tolerances.tail_relative", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.tail_relative = to_double(k, v);
       }},
      {"tolerances.ladder_equal", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.ladder_equal = to_double(k, v);
       }},
      {"tolerances.ladder_strict", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.ladder_strict = to_double(k, v);
       }},
      {"tolerances.swap", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.swap = to_double(k, v);
       }},
      {"tolerances.mass_relative", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.mass_relative = to_double(k, v);
       }},
      {"tolerances.positivity", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.tol.positivity = to_double(k, v);
       }},
      {"run.seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = to_unsigned(k, v);
       }},
      {"run.out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
      {"run.timings", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.timings = to_bool(k, v);
       }},
      {"run.corrupt_plan", [](RunConfig& c, const std::string& k, const std::string& v) {
         c.corrupt_plan = to_bool(k, v);
       }},
  };
  return table;
}

// Drops an inline comment (whitespace followed by ';' or '#') and trims.
std::string strip_value(std::string text) {
  for (std::size_t i = 1; i < text.size(); ++i) {
    if ((text[i] == ';' || text[i] == '#') && (text[i - 1] == ' ' || text[i - 1] == '\t')) {
      text.erase(i);
      break;
    }
  }
  text.erase(text.find_last_not_of(" \t") + 1);
  text.erase(0, text.find_first_not_of(" \t"));
  return text;
}

RunConfig from_tree(const ptree& tree) {
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) config_error("top-level key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const auto it = setters().find(name);
      if (it == setters().end()) config_error("unknown key '" + name + "'");
      it->second(config, name, strip_value(value.data()));
    }
  }
  return config;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    config_error(std::string("malformed config: ") + e.what());
  }
  return from_tree(tree);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cli", "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate(const RunConfig& c) {
  if (c.particles < 2) config_error("particles must be at least 2");
  if (c.density.family != DensityFamily::File && c.grid_size < 8) {
    config_error("grid_size must be at least 8");
  }
  if (c.density.family == DensityFamily::File && !std::filesystem::exists(c.density.path)) {
    config_error("density file '" + c.density.path.string() + "' does not exist");
  }
  if (!(c.riesz_s > 0.0)) config_error("riesz s must be positive");
  if (c.eta && *c.eta < 0.0) config_error("eta must be nonnegative");
  if (c.sinkhorn_factors.empty()) config_error("sinkhorn_factors is empty");
  for (std::size_t k = 0; k < c.sinkhorn_factors.size(); ++k) {
    if (!(c.sinkhorn_factors[k] > 0.0) ||
        (k > 0 && !(c.sinkhorn_factors[k] < c.sinkhorn_factors[k - 1]))) {
      config_error("sinkhorn_factors must be positive and strictly decreasing");
    }
  }
  const bool radial = c.density.family == DensityFamily::GaussianRadial ||
                      (c.density.family == DensityFamily::File &&
                       c.density.geometry == GeometryKind::RadialSymmetric);
  if (c.analyses.dualcharge) {
    if (!radial) config_error("dualcharge requires a radial density");
    if (c.density.dimension < 3) config_error("dualcharge requires dimension >= 3");
    if (c.riesz_s != c.density.dimension - 2.0) {
      config_error("dualcharge requires s = d - 2 (Coulomb case)");
    }
  }
}

SolveMethod parse_method(const std::string& name) {
  if (name == "lp") return SolveMethod::ExactLP;
  if (name == "sinkhorn") return SolveMethod::Sinkhorn;
  if (name == "seidl1d") return SolveMethod::Seidl1D;
  config_error("unknown method '" + name + "' (expected lp, sinkhorn or seidl1d)");
}

const char* method_flag(SolveMethod method) {
  switch (method) {
    case SolveMethod::ExactLP:
      return "lp";
    case SolveMethod::Sinkhorn:
      return "sinkhorn";
    case SolveMethod::Seidl1D:
      return "seidl1d";
  }
  return "?";
}

const char* to_string(DensityFamily family) {
  switch (family) {
    case DensityFamily::File:
      return "file";
    case DensityFamily::Uniform:
      return "uniform";
    case DensityFamily::Exponential:
      return "exponential";
    case DensityFamily::GaussianRadial:
      return "gaussian_radial";
  }
  return "?";
}

std::optional<double> parse_eta(const std::string& text) {
  if (text == "auto") return std::nullopt;
  const double v = to_double("eta", text);
  if (v < 0.0) config_error("eta must be nonnegative");
  return v;
}

}  // namespace mmot::cli
