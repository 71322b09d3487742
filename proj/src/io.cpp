#include "cohere/io.hpp"

#include "cohere/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace cohere
{
char const* const tool_version = "0.1.0";

std::string read_file(std::filesystem::path const& path)
{
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(std::filesystem::path const& path, std::string const& bytes)
{
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorCode::io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec)
  {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::io, "cannot rename into " + path.string());
  }
}

std::string sha256_hex(std::string const& bytes)
{
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorCode::io,
          "sha256 failed");
  static char const* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i)
  {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string encode_pgm(PgmImage const& img)
{
  require(img.width >= 1 && img.height >= 1, ErrorCode::invalid_argument, "encode_pgm: empty image");
  require(img.maxval >= 1 && img.maxval <= 65535, ErrorCode::invalid_argument, "encode_pgm: maxval out of range");
  require(img.pixels.size() == static_cast<std::size_t>(img.width * img.height), ErrorCode::invalid_argument,
          "encode_pgm: pixel count mismatch");
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                    std::to_string(img.maxval) + "\n";
  bool const wide = img.maxval > 255;
  out.reserve(out.size() + img.pixels.size() * (wide ? 2 : 1));
  for (auto p : img.pixels)
  {
    require(p <= img.maxval, ErrorCode::invalid_argument, "encode_pgm: pixel exceeds maxval");
    if (wide)
      out.push_back(static_cast<char>(p >> 8));
    out.push_back(static_cast<char>(p & 0xff));
  }
  return out;
}

PgmImage decode_pgm(std::string const& bytes)
{
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size())
    {
      if (bytes[pos] == '#')
        while (pos < bytes.size() && bytes[pos] != '\n')
          ++pos;
      else if (std::isspace(static_cast<unsigned char>(bytes[pos])))
        ++pos;
      else
        break;
    }
    std::size_t const start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])))
      ++pos;
    return bytes.substr(start, pos - start);
  };
  require(token() == "P5", ErrorCode::io, "decode_pgm: not a binary PGM");
  PgmImage img;
  try
  {
    img.width = std::stol(token());
    img.height = std::stol(token());
    img.maxval = static_cast<unsigned>(std::stoul(token()));
  }
  catch (std::exception const&)
  {
    fail(ErrorCode::io, "decode_pgm: malformed header");
  }
  require(img.width >= 1 && img.height >= 1 && img.maxval >= 1 && img.maxval <= 65535, ErrorCode::io,
          "decode_pgm: malformed header");
  ++pos; // single whitespace after maxval
  bool const wide = img.maxval > 255;
  std::size_t const count = static_cast<std::size_t>(img.width * img.height);
  require(bytes.size() >= pos + count * (wide ? 2 : 1), ErrorCode::io, "decode_pgm: truncated pixel data");
  img.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i)
  {
    auto const b = [&](std::size_t k) { return static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[k])); };
    img.pixels[i] = wide ? static_cast<std::uint16_t>((b(pos + 2 * i) << 8) | b(pos + 2 * i + 1)) : b(pos + i);
  }
  return img;
}

PgmImage raster_to_pgm(Raster const& r, unsigned maxval, double lo, double hi)
{
  require(r.d == 2, ErrorCode::invalid_argument, "raster_to_pgm: raster must be 2-D");
  PgmImage img;
  img.width = img.height = r.n;
  img.maxval = maxval;
  img.pixels.resize(r.v.size());
  double const span = hi > lo ? hi - lo : 1.0;
  for (long row = 0; row < r.n; ++row)
    for (long col = 0; col < r.n; ++col)
    {
      double const v = r.v[static_cast<std::size_t>((r.n - 1 - row) * r.n + col)];
      double const t = std::clamp((v - lo) / span, 0.0, 1.0);
      img.pixels[static_cast<std::size_t>(row * r.n + col)] =
          static_cast<std::uint16_t>(std::lround(t * static_cast<double>(maxval)));
    }
  return img;
}

std::string encode_f32(std::vector<double> const& values)
{
  std::string out(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    for (int b = 0; b < 4; ++b)
      out[4 * i + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  return out;
}

std::vector<float> decode_f32(std::string const& bytes)
{
  require(bytes.size() % 4 == 0, ErrorCode::io, "decode_f32: size is not a multiple of 4");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + static_cast<std::size_t>(b)]))
              << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

std::string fmt_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunOutputs::RunOutputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

void RunOutputs::add(std::string name, std::string bytes)
{
  require(name != "manifest.json" && !has(name), ErrorCode::invalid_argument, "RunOutputs: duplicate output " + name);
  files_.emplace_back(std::move(name), std::move(bytes));
}

bool RunOutputs::has(std::string const& name) const
{
  return std::any_of(files_.begin(), files_.end(), [&](auto const& f) { return f.first == name; });
}

json RunOutputs::commit(std::string const& command, json const& config, std::uint64_t seed) const
{
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["version"] = tool_version;
  json digests = json::object();
  for (auto const& [name, bytes] : files_)
  {
    write_atomic(dir_ / name, bytes);
    digests[name] = sha256_hex(bytes);
  }
  manifest["outputs"] = digests;
  write_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

} // namespace cohere
