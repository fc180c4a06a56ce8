#include "mfss/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/tokenizer.hpp>
#include "json.hpp"

#include "mfss/errors.hpp"

namespace mfss {

namespace {

using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

constexpr char kMagic[8] = {'M', 'F', 'S', 'S', 'D', 'R', 'A', 'W'};
constexpr std::uint32_t kArchiveVersion = 1;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  Tokenizer tok(line);
  for (const auto& t : tok) out.push_back(boost::trim_copy(t));
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

bool is_missing(const std::string& s) {
  if (s.empty()) return true;
  const std::string l = boost::to_lower_copy(s);
  return l == "nan" || l == "na" || l == "-nan";
}

std::string strip_comment(const std::string& v) {
  std::string out = v;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if ((out[i] == ';' || out[i] == '#') && (i == 0 || std::isspace(static_cast<unsigned char>(out[i - 1])))) {
      out.erase(i);
      break;
    }
  }
  boost::trim(out);
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is, const fs::path& path) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T)))
    throw IoError("'" + path.string() + "': truncated draw archive");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

std::uint32_t backend_code(Backend b) { return static_cast<std::uint32_t>(b); }

Backend backend_from_code(std::uint32_t c, const fs::path& path) {
  if (c > 3) throw IoError("'" + path.string() + "': unknown backend code " + std::to_string(c));
  return static_cast<Backend>(c);
}

}  // namespace

std::vector<std::string> default_names(Index n_m, Index n_q) {
  std::vector<std::string> out;
  for (Index i = 0; i < n_m; ++i) out.push_back("m" + std::to_string(i + 1));
  for (Index i = 0; i < n_q; ++i) out.push_back("q" + std::to_string(i + 1));
  return out;
}

DataFile read_data_csv(const fs::path& path, Index n_q, int calendar_offset) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "': empty file");
  std::vector<std::string> names = split_csv(line);
  const auto n = static_cast<Index>(names.size());
  if (n_q > n) throw ConfigError("'" + path.string() + "' has " + std::to_string(n) +
                                 " columns but " + std::to_string(n_q) + " are quarterly");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (boost::trim_copy(line).empty()) continue;
    std::vector<std::string> cells = split_csv(line);
    // A trailing empty cell is dropped by some writers.
    if (static_cast<Index>(cells.size()) == n - 1 && !line.empty() && line.back() == ',')
      cells.emplace_back();
    if (static_cast<Index>(cells.size()) != n)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(n) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> row(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      const std::string& c = cells[static_cast<std::size_t>(j)];
      double v = NAN;
      if (!is_missing(c) && !parse_double(c, v))
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": column '" +
                      names[static_cast<std::size_t>(j)] + "': not a number: '" + c + "'");
      row[static_cast<std::size_t>(j)] = v;
    }
    rows.push_back(std::move(row));
  }
  Mat values(static_cast<Index>(rows.size()), n);
  for (Index i = 0; i < values.rows(); ++i)
    for (Index j = 0; j < n; ++j)
      values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return {std::move(names), MixedFreqData(std::move(values), n - n_q, n_q, calendar_offset)};
}

void write_data_csv(const fs::path& path, const Mat& values, const std::vector<std::string>& names) {
  std::ofstream out = open_out(path);
  out << boost::join(names, ",") << "\n";
  out << std::setprecision(17);
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ",";
      if (!std::isnan(values(i, j))) out << values(i, j);
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Config Config::load(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  Config cfg = parse(ss.str(), path.string());
  cfg.base_ = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return cfg;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  cfg.base_ = ".";
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      cfg.values_[""][section] = strip_comment(body.data());
      continue;
    }
    for (const auto& [key, value] : body) cfg.values_[section][key] = strip_comment(value.data());
  }

  std::istringstream scan(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(scan, line)) {
    ++lineno;
    const std::string t = boost::trim_copy(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t[0] == '[') {
      section = boost::trim_copy(t.substr(1, t.find(']') - 1));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) cfg.lines_[section][boost::trim_copy(t.substr(0, eq))] = lineno;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  return it != values_.end() && it->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return values_.count(section) > 0; }

std::string Config::where(const std::string& section, const std::string& key) const {
  std::string out = origin_;
  auto s = lines_.find(section);
  if (s != lines_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) out += ":" + std::to_string(k->second);
  }
  return out + ": [" + section + "] " + key + ": ";
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::optional<std::string>& fallback) const {
  if (has(section, key)) return values_.at(section).at(key);
  if (fallback) return *fallback;
  throw ConfigError(origin_ + ": missing required key '" + key + "' in section [" + section + "]");
}

long Config::get_int(const std::string& section, const std::string& key,
                     std::optional<long> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    get_string(section, key);
  }
  const std::string& s = values_.at(section).at(key);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(where(section, key) + "expected an integer, got '" + s + "'");
  return v;
}

double Config::get_double(const std::string& section, const std::string& key,
                          std::optional<double> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    get_string(section, key);
  }
  const std::string& s = values_.at(section).at(key);
  double v = 0.0;
  if (!parse_double(s, v)) throw ConfigError(where(section, key) + "expected a number, got '" + s + "'");
  return v;
}

std::vector<std::string> Config::get_string_list(
    const std::string& section, const std::string& key,
    const std::optional<std::vector<std::string>>& fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    get_string(section, key);
  }
  std::vector<std::string> parts;
  boost::split(parts, values_.at(section).at(key), boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<long> Config::get_int_list(const std::string& section, const std::string& key,
                                       const std::optional<std::vector<long>>& fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    get_string(section, key);
  }
  std::vector<long> out;
  for (const auto& item : get_string_list(section, key)) {
    // "a:b:c" expands to a, a+c, ..., b.
    std::vector<std::string> range;
    boost::split(range, item, boost::is_any_of(":"));
    std::vector<long> nums;
    for (auto& r : range) {
      long v = 0;
      auto [ptr, ec] = std::from_chars(r.data(), r.data() + r.size(), v);
      if (ec != std::errc() || ptr != r.data() + r.size())
        throw ConfigError(where(section, key) + "expected integers, got '" + item + "'");
      nums.push_back(v);
    }
    if (nums.size() == 1) {
      out.push_back(nums[0]);
    } else if (nums.size() == 3 && nums[2] > 0 && nums[0] <= nums[1]) {
      for (long v = nums[0]; v <= nums[1]; v += nums[2]) out.push_back(v);
    } else {
      throw ConfigError(where(section, key) + "bad range '" + item + "' (use first:last:step)");
    }
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_string_list(section, key)) {
    double v = 0.0;
    if (!parse_double(item, v))
      throw ConfigError(where(section, key) + "expected numbers, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

fs::path Config::get_path(const std::string& section, const std::string& key) const {
  fs::path p = get_string(section, key);
  if (p.is_relative()) p = base_ / p;
  return p;
}

void Config::check_keys(const std::string& section, const std::vector<std::string>& allowed) const {
  auto it = values_.find(section);
  if (it == values_.end()) return;
  for (const auto& [key, value] : it->second)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where(section, key) + "unknown key (allowed: " + boost::join(allowed, ", ") +
                        ")");
}

ModelSpec model_spec(const Config& cfg) {
  cfg.check_keys("model", {"n_m", "n_q", "p", "aggregation", "weights", "calendar_offset"});
  cfg.check_keys("init", {"mode", "kappa"});
  ModelSpec spec;
  spec.n_m = cfg.get_int("model", "n_m");
  spec.n_q = cfg.get_int("model", "n_q");
  spec.p = cfg.get_int("model", "p");
  if (spec.n_m < 1) throw ConfigError(cfg.where("model", "n_m") + "need at least one monthly variable");
  if (spec.n_q < 0) throw ConfigError(cfg.where("model", "n_q") + "must be non-negative");
  if (spec.p < 1) throw ConfigError(cfg.where("model", "p") + "must be at least 1");
  const std::string agg = cfg.get_string("model", "aggregation", "average");
  if (agg == "average") {
    spec.scheme = AggregationScheme::intra_quarterly_average();
  } else if (agg == "custom") {
    spec.scheme = AggregationScheme::custom(cfg.get_double_list("model", "weights"));
  } else {
    throw ConfigError(cfg.where("model", "aggregation") + "expected 'average' or 'custom', got '" +
                      agg + "'");
  }
  if (spec.scheme.p_q() > spec.p)
    throw ConfigError(cfg.where("model", "p") + "lag order " + std::to_string(spec.p) +
                      " is shorter than the aggregation window " +
                      std::to_string(spec.scheme.p_q()));
  const long offset = cfg.get_int("model", "calendar_offset", 0L);
  if (offset < 0 || offset > 2)
    throw ConfigError(cfg.where("model", "calendar_offset") + "must be 0, 1 or 2");
  spec.calendar_offset = static_cast<int>(offset);

  const std::string mode = cfg.get_string("init", "mode", "stationary");
  if (mode == "stationary")
    spec.init.mode = InitMode::Stationary;
  else if (mode == "diffuse")
    spec.init.mode = InitMode::DiffuseProxy;
  else
    throw ConfigError(cfg.where("init", "mode") + "expected 'stationary' or 'diffuse', got '" + mode +
                      "'");
  spec.init.kappa = cfg.get_double("init", "kappa", 1e4);
  if (!(spec.init.kappa > 0.0)) throw ConfigError(cfg.where("init", "kappa") + "must be positive");
  return spec;
}

void write_model_section(std::ostream& os, const ModelSpec& spec) {
  os << "[model]\n"
     << "n_m = " << spec.n_m << "\n"
     << "n_q = " << spec.n_q << "\n"
     << "p = " << spec.p << "\n";
  if (spec.scheme.kind == AggregationKind::IntraQuarterlyAverage) {
    os << "aggregation = average\n";
  } else {
    os << "aggregation = custom\nweights = " << std::setprecision(17);
    for (std::size_t i = 0; i < spec.scheme.weights.size(); ++i)
      os << (i ? ", " : "") << spec.scheme.weights[i];
    os << "\n";
  }
  os << "calendar_offset = " << spec.calendar_offset << "\n\n[init]\n"
     << "mode = " << (spec.init.mode == InitMode::Stationary ? "stationary" : "diffuse") << "\n"
     << "kappa = " << spec.init.kappa << "\n";
}

namespace {

Mat json_matrix(const nlohmann::json& j, Index rows, Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw ConfigError("params: '" + what + "' must have " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ConfigError("params: row " + std::to_string(i) + " of '" + what + "' must have " +
                        std::to_string(cols) + " entries");
    for (Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

nlohmann::json matrix_json(const Mat& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

VarParams read_params_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
  try {
    const Index n_m = j.at("n_m").get<Index>();
    const Index n_q = j.at("n_q").get<Index>();
    const Index p = j.at("p").get<Index>();
    const Index n = n_m + n_q;
    const auto& ic = j.at("intercept");
    if (!ic.is_array() || static_cast<Index>(ic.size()) != n)
      throw ConfigError("params: 'intercept' must have " + std::to_string(n) + " entries");
    Vec intercept(n);
    for (Index i = 0; i < n; ++i) intercept(i) = ic[static_cast<std::size_t>(i)].get<double>();
    Mat lags = json_matrix(j.at("lags"), n, n * p, "lags");
    std::vector<Mat> chol;
    for (const auto& c : j.at("chol")) chol.push_back(json_matrix(c, n, n, "chol"));
    return VarParams(n_m, n_q, p, std::move(intercept), std::move(lags), std::move(chol));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

void write_params_json(const fs::path& path, const VarParams& params) {
  nlohmann::json j;
  j["n_m"] = params.n_m();
  j["n_q"] = params.n_q();
  j["p"] = params.p();
  j["intercept"] = std::vector<double>(params.intercept().data(),
                                       params.intercept().data() + params.intercept().size());
  j["lags"] = matrix_json(params.lags());
  j["chol"] = nlohmann::json::array();
  for (const Mat& w : params.chol_factors()) j["chol"].push_back(matrix_json(w));
  std::ofstream out = open_out(path);
  out << std::setprecision(17) << j.dump(1) << "\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

DrawArchive make_archive(const std::vector<LatentDraw>& draws, Index n_q, Backend backend,
                         std::uint64_t param_hash, Index T, Index n) {
  DrawArchive a;
  a.T = T;
  a.n = n;
  a.n_q = n_q;
  a.backend = backend;
  a.param_hash = param_hash;
  for (const auto& d : draws) {
    a.seeds.push_back(d.seed);
    a.draws.push_back(d.X);
  }
  return a;
}

void write_archive(const fs::path& path, const DrawArchive& a) {
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kArchiveVersion);
  put_le<std::uint32_t>(out, backend_code(a.backend));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.T));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.n));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.n_q));
  put_le<std::uint64_t>(out, a.draws.size());
  put_le<std::uint64_t>(out, a.param_hash);
  for (std::size_t d = 0; d < a.draws.size(); ++d)
    put_le<std::uint64_t>(out, d < a.seeds.size() ? a.seeds[d] : 0);
  for (const Mat& x : a.draws)
    for (Index i = 0; i < a.T; ++i)
      for (Index j = 0; j < a.n; ++j) put_le<double>(out, x(i, j));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

DrawArchive read_archive(const fs::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw IoError("'" + path.string() + "' is not a draw archive");
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != kArchiveVersion)
    throw IoError("'" + path.string() + "': unsupported archive version " + std::to_string(version));
  DrawArchive a;
  a.backend = backend_from_code(get_le<std::uint32_t>(in, path), path);
  a.T = static_cast<Index>(get_le<std::uint64_t>(in, path));
  a.n = static_cast<Index>(get_le<std::uint64_t>(in, path));
  a.n_q = static_cast<Index>(get_le<std::uint64_t>(in, path));
  const auto count = get_le<std::uint64_t>(in, path);
  a.param_hash = get_le<std::uint64_t>(in, path);
  for (std::uint64_t d = 0; d < count; ++d) a.seeds.push_back(get_le<std::uint64_t>(in, path));
  for (std::uint64_t d = 0; d < count; ++d) {
    Mat x(a.T, a.n);
    for (Index i = 0; i < a.T; ++i)
      for (Index j = 0; j < a.n; ++j) x(i, j) = get_le<double>(in, path);
    a.draws.push_back(std::move(x));
  }
  return a;
}

void write_archive_csv(const fs::path& path, const DrawArchive& a,
                       const std::vector<std::string>& names) {
  std::ofstream out = open_out(path);
  out << "# T=" << a.T << " n=" << a.n << " n_q=" << a.n_q << " backend=" << backend_name(a.backend)
      << " param_hash=" << a.param_hash << "\n";
  out << "draw,seed,row,variable,value\n" << std::setprecision(17);
  for (std::size_t d = 0; d < a.draws.size(); ++d)
    for (Index i = 0; i < a.T; ++i)
      for (Index j = 0; j < a.n; ++j)
        out << d << "," << a.seeds[d] << "," << i << ","
            << (static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                           : std::to_string(j))
            << "," << a.draws[d](i, j) << "\n";
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

DrawArchive read_archive_csv(const fs::path& path, Index n_q) {
  std::ifstream in = open_in(path);
  std::string line;
  DrawArchive a;
  a.n_q = n_q;
  struct Entry {
    std::size_t draw;
    std::uint64_t seed;
    Index row;
    std::string var;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<std::string> vars;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = kv.substr(0, eq);
        const std::string v = kv.substr(eq + 1);
        if (k == "n_q") a.n_q = std::stol(v);
        if (k == "backend") a.backend = parse_backend(v);
        if (k == "param_hash") a.param_hash = std::stoull(v);
      }
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 5) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields");
    Entry e{};
    try {
      e.draw = std::stoul(cells[0]);
      e.seed = std::stoull(cells[1]);
      e.row = std::stol(cells[2]);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed entry");
    }
    e.var = cells[3];
    if (!parse_double(cells[4], e.value) && !is_missing(cells[4]))
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cells[4] + "'");
    if (is_missing(cells[4])) e.value = NAN;
    if (std::find(vars.begin(), vars.end(), e.var) == vars.end()) vars.push_back(e.var);
    entries.push_back(std::move(e));
  }
  std::size_t count = 0;
  for (const auto& e : entries) {
    count = std::max(count, e.draw + 1);
    a.T = std::max(a.T, e.row + 1);
  }
  a.n = static_cast<Index>(vars.size());
  a.seeds.assign(count, 0);
  a.draws.assign(count, Mat::Constant(a.T, a.n, NAN));
  for (const auto& e : entries) {
    const auto j = std::find(vars.begin(), vars.end(), e.var) - vars.begin();
    a.draws[e.draw](e.row, j) = e.value;
    a.seeds[e.draw] = e.seed;
  }
  return a;
}

void save_archive(const fs::path& path, const DrawArchive& archive,
                  const std::vector<std::string>& names) {
  if (path.extension() == ".csv")
    write_archive_csv(path, archive, names);
  else
    write_archive(path, archive);
}

DrawArchive load_archive(const fs::path& path, Index n_q) {
  if (!fs::exists(path)) throw IoError("'" + path.string() + "' does not exist");
  return path.extension() == ".csv" ? read_archive_csv(path, n_q) : read_archive(path);
}

void write_golden(const fs::path& path, const Mat& m,
                  const std::vector<std::pair<std::string, std::string>>& meta) {
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ",";
      if (std::isnan(m(i, j)))
        out << "nan";
      else
        out << m(i, j);
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Mat read_golden(const fs::path& path, std::map<std::string, std::string>* meta) {
  std::ifstream in = open_in(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (meta && eq != std::string::npos)
        (*meta)[boost::trim_copy(line.substr(1, eq - 1))] = boost::trim_copy(line.substr(eq + 1));
      continue;
    }
    std::vector<double> row;
    for (const auto& c : split_csv(line)) {
      double v = NAN;
      if (!is_missing(c) && !parse_double(c, v)) throw IoError("'" + path.string() + "': bad value '" + c + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("'" + path.string() + "': ragged golden file");
    rows.push_back(std::move(row));
  }
  Mat m(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

}  // namespace mfss
