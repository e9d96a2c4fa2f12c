#include "pvmincq/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace pvmincq::harness {

namespace pt = boost::property_tree;

std::string_view method_name(Method m) {
  switch (m) {
    case Method::mincq: return "mincq";
    case Method::nn_mincq: return "nn-mincq";
    case Method::pv_mincq: return "pv-mincq";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "mincq") return Method::mincq;
  if (name == "nn-mincq") return Method::nn_mincq;
  if (name == "pv-mincq") return Method::pv_mincq;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected mincq, nn-mincq or pv-mincq)");
}

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& key, const std::string& word) {
  double v = 0.0;
  const auto res = std::from_chars(word.data(), word.data() + word.size(), v);
  if (res.ec != std::errc() || res.ptr != word.data() + word.size() || !std::isfinite(v))
    throw ConfigError(key + ": '" + word + "' is not a finite number");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& word) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(word.data(), word.data() + word.size(), v);
  if (res.ec != std::errc() || res.ptr != word.data() + word.size())
    throw ConfigError(key + ": '" + word + "' is not a non-negative integer");
  return v;
}

std::string single(const std::string& key, const std::string& value) {
  const auto words = split_words(value);
  if (words.size() != 1) throw ConfigError(key + ": expected a single value");
  return words.front();
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string w = single(key, value);
  if (w == "true" || w == "yes" || w == "1") return true;
  if (w == "false" || w == "no" || w == "0") return false;
  throw ConfigError(key + ": expected true or false");
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ' ';
    if constexpr (std::is_floating_point_v<T>)
      out += format_number(v);
    else
      out += std::to_string(v);
  }
  return out;
}

using Setter = void (*)(BenchmarkConfig&, const std::string& key, const std::string& value);

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"data",
       {
           {"source_positives", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.source_positives = to_unsigned(k, single(k, v)); }},
           {"source_negatives", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.source_negatives = to_unsigned(k, single(k, v)); }},
           {"target_positives", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.target_positives = to_unsigned(k, single(k, v)); }},
           {"target_negatives", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.target_negatives = to_unsigned(k, single(k, v)); }},
           {"test_positives", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.test_positives = to_unsigned(k, single(k, v)); }},
           {"test_negatives", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.test_negatives = to_unsigned(k, single(k, v)); }},
           {"noise_sd", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.noise_sd = to_double(k, single(k, v)); }},
       }},
      {"shifts",
       {
           {"rotations",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) {
              c.rotations.clear();
              for (const auto& w : split_words(v)) c.rotations.push_back(to_double(k, w));
            }},
           {"translation",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) {
              const auto words = split_words(v);
              if (words.size() == 1 && words.front() == "none") {
                c.translation.reset();
                return;
              }
              if (words.size() != 2) throw ConfigError(k + ": expected two numbers or 'none'");
              c.translation = Eigen::Vector2d(to_double(k, words[0]), to_double(k, words[1]));
            }},
       }},
      {"seeds",
       {
           {"first", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.first_seed = to_unsigned(k, single(k, v)); }},
           {"count", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.seed_count = to_unsigned(k, single(k, v)); }},
       }},
      {"grid",
       {
           {"mus",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) {
              c.mus.clear();
              for (const auto& w : split_words(v)) c.mus.push_back(to_double(k, w));
            }},
           {"gammas",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) {
              c.gammas.clear();
              for (const auto& w : split_words(v)) c.gammas.push_back(to_double(k, w));
            }},
           {"eps_quantiles",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) {
              c.eps_quantiles.clear();
              for (const auto& w : split_words(v)) c.eps_quantiles.push_back(to_double(k, w));
            }},
           {"neighbors",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) {
              c.neighbors.clear();
              for (const auto& w : split_words(v)) c.neighbors.push_back(to_unsigned(k, w));
            }},
           {"folds", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.folds = to_unsigned(k, single(k, v)); }},
           {"reduced_source_matching",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.reduced_source_matching = to_bool(k, v); }},
       }},
      {"run",
       {
           {"methods",
            [](BenchmarkConfig& c, const std::string&, const std::string& v) {
              c.methods.clear();
              for (const auto& w : split_words(v)) c.methods.push_back(parse_method(w));
            }},
           {"out", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.out_dir = single(k, v); }},
           {"jobs", [](BenchmarkConfig& c, const std::string& k, const std::string& v) { c.jobs = to_unsigned(k, single(k, v)); }},
           {"plots",
            [](BenchmarkConfig& c, const std::string& k, const std::string& v) {
              const std::string w = single(k, v);
              if (w == "none")
                c.plots = PlotPolicy::none;
              else if (w == "first")
                c.plots = PlotPolicy::first_seed;
              else if (w == "all")
                c.plots = PlotPolicy::all;
              else
                throw ConfigError(k + ": expected none, first or all");
            }},
       }},
  };
  return s;
}

std::string rotation_name(double degrees) { return "rot" + format_number(degrees); }

}  // namespace

std::vector<ShiftCase> BenchmarkConfig::shift_cases() const {
  std::vector<ShiftCase> out;
  for (double deg : rotations) out.push_back({rotation_name(deg), Rotation{deg, std::nullopt}});
  if (translation) out.push_back({"trans", Translation{*translation}});
  return out;
}

std::vector<std::uint64_t> BenchmarkConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < seed_count; ++i) out.push_back(first_seed + i);
  return out;
}

void BenchmarkConfig::validate() const {
  if (source_positives == 0 || source_negatives == 0 || target_positives == 0 || target_negatives == 0 ||
      test_positives == 0 || test_negatives == 0)
    throw ConfigError("data: every class count must be positive");
  if (!(noise_sd >= 0.0)) throw ConfigError("data.noise_sd must be non-negative");
  for (double r : rotations)
    if (!(r > 0.0 && r <= 360.0)) throw ConfigError("shifts.rotations: angles must lie in (0, 360]");
  if (rotations.empty() && !translation) throw ConfigError("shifts: no shift configured");
  std::set<double> unique(rotations.begin(), rotations.end());
  if (unique.size() != rotations.size()) throw ConfigError("shifts.rotations: duplicate angle");
  if (seed_count == 0) throw ConfigError("seeds.count must be positive");
  auto positive = [](const std::vector<double>& v, const char* what) {
    if (v.empty()) throw ConfigError(std::string("grid.") + what + " is empty");
    for (double x : v)
      if (!(x > 0.0)) throw ConfigError(std::string("grid.") + what + " must be positive");
  };
  positive(mus, "mus");
  positive(gammas, "gammas");
  positive(eps_quantiles, "eps_quantiles");
  for (double q : eps_quantiles)
    if (q > 1.0) throw ConfigError("grid.eps_quantiles must lie in (0, 1]");
  if (neighbors.empty()) throw ConfigError("grid.neighbors is empty");
  for (std::size_t k : neighbors)
    if (k == 0) throw ConfigError("grid.neighbors must be positive");
  if (folds < 2) throw ConfigError("grid.folds must be at least 2");
  if (methods.empty()) throw ConfigError("run.methods is empty");
  if (jobs == 0) throw ConfigError("run.jobs must be positive");
}

BenchmarkConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  BenchmarkConfig config;
  for (const auto& [section, body] : tree) {
    const auto sec = schema().find(section);
    if (sec == schema().end()) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      setter->second(config, section + "." + key, value.data());
    }
  }
  config.validate();
  return config;
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const BenchmarkConfig& c) {
  std::ostringstream os;
  os << "[data]\n"
     << "source_positives = " << c.source_positives << "\n"
     << "source_negatives = " << c.source_negatives << "\n"
     << "target_positives = " << c.target_positives << "\n"
     << "target_negatives = " << c.target_negatives << "\n"
     << "test_positives = " << c.test_positives << "\n"
     << "test_negatives = " << c.test_negatives << "\n"
     << "noise_sd = " << format_number(c.noise_sd) << "\n\n"
     << "[shifts]\n"
     << "rotations = " << join(c.rotations) << "\n"
     << "translation = "
     << (c.translation ? format_number((*c.translation)[0]) + " " + format_number((*c.translation)[1]) : "none")
     << "\n\n"
     << "[seeds]\n"
     << "first = " << c.first_seed << "\n"
     << "count = " << c.seed_count << "\n\n"
     << "[grid]\n"
     << "mus = " << join(c.mus) << "\n"
     << "gammas = " << join(c.gammas) << "\n"
     << "eps_quantiles = " << join(c.eps_quantiles) << "\n"
     << "neighbors = " << join(c.neighbors) << "\n"
     << "folds = " << c.folds << "\n"
     << "reduced_source_matching = " << (c.reduced_source_matching ? "true" : "false") << "\n\n"
     << "[run]\n"
     << "methods =";
  for (Method m : c.methods) os << ' ' << method_name(m);
  os << "\n"
     << "out = " << c.out_dir.string() << "\n"
     << "jobs = " << c.jobs << "\n"
     << "plots = " << (c.plots == PlotPolicy::none ? "none" : c.plots == PlotPolicy::all ? "all" : "first") << "\n";
  return os.str();
}

ShiftCase find_shift(const BenchmarkConfig& config, std::string_view name) {
  for (auto& s : config.shift_cases())
    if (s.name == name) return s;
  if (name == "trans") throw ConfigError("translation is disabled in this config");
  if (name.starts_with("rot")) {
    const std::string rest(name.substr(3));
    const double deg = to_double("shift", rest);
    if (!(deg > 0.0 && deg <= 360.0)) throw ConfigError("shift: rotation angle must lie in (0, 360]");
    return {rotation_name(deg), Rotation{deg, std::nullopt}};
  }
  throw ConfigError("unknown shift '" + std::string(name) + "' (expected rot<degrees> or trans)");
}

}  // namespace pvmincq::harness
