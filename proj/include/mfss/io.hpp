#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfss/kalman.hpp"
#include "mfss/simsmooth.hpp"

namespace mfss {

namespace fs = std::filesystem;

/// Panel read from CSV together with its column names.
struct DataFile {
  std::vector<std::string> names;
  MixedFreqData data;
};

/// Header row of names, one row per month, empty cells or NaN/NA for missing
/// values, the last `n_q` columns quarterly.
DataFile read_data_csv(const fs::path& path, Index n_q, int calendar_offset = 0);
void write_data_csv(const fs::path& path, const Mat& values, const std::vector<std::string>& names);
std::vector<std::string> default_names(Index n_m, Index n_q);

/// INI configuration with the line of every key kept for diagnostics.
class Config {
 public:
  static Config load(const fs::path& path);
  static Config parse(const std::string& text, const std::string& origin = "<config>");

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::optional<std::string>& fallback = std::nullopt) const;
  long get_int(const std::string& section, const std::string& key,
               std::optional<long> fallback = std::nullopt) const;
  double get_double(const std::string& section, const std::string& key,
                    std::optional<double> fallback = std::nullopt) const;
  std::vector<long> get_int_list(const std::string& section, const std::string& key,
                                 const std::optional<std::vector<long>>& fallback = std::nullopt) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_string_list(
      const std::string& section, const std::string& key,
      const std::optional<std::vector<std::string>>& fallback = std::nullopt) const;
  // Relative paths resolve against the directory holding the config file.
  fs::path get_path(const std::string& section, const std::string& key) const;

  // Rejects keys outside `allowed` within `section`.
  void check_keys(const std::string& section, const std::vector<std::string>& allowed) const;

  // "file:line: [section] key: " prefix for error messages.
  std::string where(const std::string& section, const std::string& key) const;
  const fs::path& base_dir() const { return base_; }

 private:
  std::string origin_;
  fs::path base_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::map<std::string, std::map<std::string, int>> lines_;
};

struct ModelSpec {
  Index n_m = 0;
  Index n_q = 0;
  Index p = 0;
  AggregationScheme scheme;
  int calendar_offset = 0;
  InitOptions init;
};

ModelSpec model_spec(const Config& cfg);
void write_model_section(std::ostream& os, const ModelSpec& spec);

/// Parameters as JSON: {"n_m", "n_q", "p", "intercept": [n], "lags": n rows of
/// np entries, "chol": list of n x n lower-triangular factors}.
VarParams read_params_json(const fs::path& path);
void write_params_json(const fs::path& path, const VarParams& params);

/// Draw archive. Binary layout, all integers and floats little-endian:
///   8 bytes  magic "MFSSDRAW"
///   u32      version (1)
///   u32      backend code (0 baseline, 1 blocked, 2 adaptive, 3 oracle)
///   u64      T, n, n_q, draw count, parameter hash
///   u64      seed of each draw
///   f64      T x n values of each draw, row-major
struct DrawArchive {
  Index T = 0;
  Index n = 0;
  Index n_q = 0;
  Backend backend = Backend::Adaptive;
  std::uint64_t param_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<Mat> draws;
};

DrawArchive make_archive(const std::vector<LatentDraw>& draws, Index n_q, Backend backend,
                         std::uint64_t param_hash, Index T, Index n);
void write_archive(const fs::path& path, const DrawArchive& archive);
DrawArchive read_archive(const fs::path& path);
/// Long format: draw,seed,row,variable,value (one line per entry).
void write_archive_csv(const fs::path& path, const DrawArchive& archive,
                       const std::vector<std::string>& names);
DrawArchive read_archive_csv(const fs::path& path, Index n_q);
/// Dispatch on extension: ".csv" selects the long format, anything else binary.
void save_archive(const fs::path& path, const DrawArchive& archive,
                  const std::vector<std::string>& names);
DrawArchive load_archive(const fs::path& path, Index n_q = 0);

/// Golden matrix file: "# key=value" header comments, then plain CSV rows
/// printed with 17 significant digits. NaN is written as "nan".
void write_golden(const fs::path& path, const Mat& m,
                  const std::vector<std::pair<std::string, std::string>>& meta);
Mat read_golden(const fs::path& path, std::map<std::string, std::string>* meta = nullptr);

}  // namespace mfss
