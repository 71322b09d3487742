#pragma once

#include "cohere/error.hpp"
#include "cohere/phantom.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cohere
{
using json = nlohmann::json;

std::string read_file(std::filesystem::path const& path);

/// Write to a sibling temporary then rename over `path`.
void write_atomic(std::filesystem::path const& path, std::string const& bytes);

std::string sha256_hex(std::string const& bytes);

struct PgmImage
{
  long width = 0;
  long height = 0;
  unsigned maxval = 255;
  std::vector<std::uint16_t> pixels; // row-major, first row = top
};

std::string encode_pgm(PgmImage const& img);
PgmImage decode_pgm(std::string const& bytes);

/// 2-D raster to PGM, linearly scaled from [lo, hi] to [0, maxval]. Row 0 of the
/// image is the top (largest axis-1 coordinate).
PgmImage raster_to_pgm(Raster const& r, unsigned maxval, double lo, double hi);

/// Little-endian float32 dump.
std::string encode_f32(std::vector<double> const& values);
std::vector<float> decode_f32(std::string const& bytes);

/// %.17g, so values round-trip.
std::string fmt_double(double v);

/// Collects named outputs, then writes them and manifest.json in one step.
class RunOutputs
{
public:
  explicit RunOutputs(std::filesystem::path dir);

  void add(std::string name, std::string bytes);
  bool has(std::string const& name) const;

  /// Writes every file atomically, then the manifest. Returns the manifest.
  json commit(std::string const& command, json const& config, std::uint64_t seed) const;

private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

extern char const* const tool_version;

/// doc[key] as T; ConfigError names "where.key" when missing or mistyped.
template <class T>
T json_field(json const& doc, std::string const& key, std::string const& where)
{
  std::string const path = where.empty() ? key : where + "." + key;
  if (!doc.is_object() || !doc.contains(key))
    throw ConfigError(path, "missing required field");
  try
  {
    return doc.at(key).get<T>();
  }
  catch (json::exception const&)
  {
    throw ConfigError(path, "wrong type");
  }
}

template <class T>
T json_field_or(json const& doc, std::string const& key, std::string const& where, T fallback)
{
  if (!doc.is_object() || !doc.contains(key))
    return fallback;
  return json_field<T>(doc, key, where);
}

} // namespace cohere
