#include "cohere/cli.hpp"
#include "cohere/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cohere;
namespace fs = std::filesystem;

namespace
{
struct TempDir
{
  fs::path path;
  TempDir()
  {
    path = fs::temp_directory_path() / ("cohere_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run
{
  int code;
  std::string err;
};

Run run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  int const code = run_cli(args, out, err);
  return {code, err.str()};
}

fs::path write_config(fs::path const& dir, std::string const& name, std::string const& text)
{
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> lines(std::string const& s)
{
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    out.push_back(l);
  return out;
}
} // namespace

TEST_CASE("coherence: 1-D profile")
{
  TempDir t;
  auto const cfg = write_config(t.path, "c.json",
                                R"({"schema_version": 1, "basis": {"family": "haar", "d": 1},
                                    "ordering": {"name": "standard"}, "horizon": 4096})");
  auto const r = run({"coherence", "--config", cfg.string(), "--out", (t.path / "o").string()});
  REQUIRE(r.code == 0);
  auto const rows = lines(read_file(t.path / "o" / "profile.csv"));
  REQUIRE(rows.size() == 4097);
  CHECK(rows[0] == "rank,row,suffix");
  CHECK(rows[1].rfind("1,0.5,", 0) == 0);

  // manifest digests match the files
  auto const man = json::parse(read_file(t.path / "o" / "manifest.json"));
  CHECK(man["command"] == "coherence");
  CHECK(man.contains("version"));
  for (auto const& [name, digest] : man["outputs"].items())
    CHECK(digest.get<std::string>() == sha256_hex(read_file(t.path / "o" / name)));
}

TEST_CASE("coherence: 2-D image")
{
  TempDir t;
  auto const cfg = write_config(t.path, "c.json",
                                R"({"schema_version": 1, "basis": {"family": "haar", "d": 2},
                                    "ordering": {"name": "l_inf"}, "horizon": 100, "image_extent": 250})");
  REQUIRE(run({"coherence", "--config", cfg.string(), "--out", t.path.string()}).code == 0);
  auto const img = decode_pgm(read_file(t.path / "coherence.pgm"));
  CHECK(img.width == 501);
  CHECK(img.height == 501);
  CHECK(img.maxval == 65535);
  // frequency 0 sits in the middle and is the brightest pixel
  CHECK(img.pixels[250 * 501 + 250] == 65535);
}

TEST_CASE("coherence: 3-D volume")
{
  TempDir t;
  auto const cfg = write_config(t.path, "c.json",
                                R"({"schema_version": 1, "basis": {"family": "haar", "d": 3},
                                    "ordering": {"name": "l_inf"}, "horizon": 50, "image_extent": 4})");
  REQUIRE(run({"coherence", "--config", cfg.string(), "--out", t.path.string()}).code == 0);
  auto const vol = decode_f32(read_file(t.path / "coherence.f32"));
  CHECK(vol.size() == 9 * 9 * 9);
  auto const side = json::parse(read_file(t.path / "coherence.json"));
  CHECK(side["dims"] == json({9, 9, 9}));
  CHECK(vol[(4 * 9 + 4) * 9 + 4] == doctest::Approx(0.125));
}

TEST_CASE("config errors exit 2 and write nothing")
{
  TempDir t;
  auto const out = t.path / "o";
  auto const missing = write_config(t.path, "m.json",
                                    R"({"schema_version": 1, "basis": {"d": 1},
                                        "ordering": {"name": "standard"}, "horizon": 16})");
  auto const r = run({"coherence", "--config", missing.string(), "--out", out.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("basis.family") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  auto const family = write_config(t.path, "f.json",
                                   R"({"schema_version": 1, "basis": {"family": "daubechies", "p": 12},
                                       "ordering": {"name": "standard"}, "horizon": 16})");
  CHECK(run({"coherence", "--config", family.string(), "--out", out.string()}).code == 2);

  auto const broken = write_config(t.path, "b.json", "{ not json");
  CHECK(run({"counts", "--config", broken.string(), "--out", out.string()}).code == 2);
  CHECK(run({"counts", "--config", (t.path / "nope.json").string(), "--out", out.string()}).code == 2);
  CHECK(run({"counts", "--out", out.string()}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"counts", "--threads", "0"}).code == 2);

  auto const variant = write_config(t.path, "v.json", R"({"schema_version": 1, "variant": "spiral", "values": [3]})");
  CHECK(run({"counts", "--config", variant.string(), "--out", out.string()}).code == 2);

  auto const zero_budget = write_config(t.path, "z.json", R"({
    "schema_version": 1, "resolution": 16,
    "phantom": {"type": "block", "boxes": [{"lo": [-0.5, -0.5], "hi": [0.5, 0.5]}]},
    "reconstructions": [{"name": "a", "basis": "separable",
                         "sampling": {"ordering": "l_inf", "levels": [64, 256], "budget": 0}}]})");
  auto const z = run({"reconstruct", "--config", zero_budget.string(), "--out", out.string()});
  CHECK(z.code == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("counts")
{
  TempDir t;
  auto check = [&](std::string const& variant, int d, double K, long long expect) {
    json j = {{"schema_version", 1}, {"variant", variant}, {"d", d}, {"values", {K}}};
    auto const cfg = write_config(t.path, "k.json", j.dump());
    REQUIRE(run({"counts", "--config", cfg.string(), "--out", t.path.string()}).code == 0);
    auto const rows = lines(read_file(t.path / "counts.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].substr(0, rows[1].find(',', rows[1].find(',') + 1)) ==
          fmt_double(K) + "," + std::to_string(expect));
  };
  check("hyperbolic_n", 2, 3, 5);
  check("hyperbolic_z", 2, 2, 21);
  check("hyperbolic_n", 1, 7, 7);
  check("l_inf", 2, 1, 9);
}

TEST_CASE("ordering export")
{
  TempDir t;
  auto const cfg = write_config(t.path, "p.json",
                                R"({"schema_version": 1, "d": 2, "ordering": {"name": "hyperbolic_z"}, "count": 21})");
  REQUIRE(run({"ordering", "--config", cfg.string(), "--out", t.path.string()}).code == 0);
  auto const rows = lines(read_file(t.path / "prefix.csv"));
  REQUIRE(rows.size() == 22);
  CHECK(rows[0] == "rank,n0,n1,F");
  CHECK(rows[1] == "1,-1,-1,1");

  auto const wcfg = write_config(t.path, "w.json",
                                 R"({"schema_version": 1, "ordering": {"name": "level"},
                                     "basis": {"family": "haar", "d": 1}, "count": 6})");
  REQUIRE(run({"ordering", "--config", wcfg.string(), "--out", t.path.string()}).code == 0);
  auto const wrows = lines(read_file(t.path / "prefix.csv"));
  CHECK(wrows[0] == "rank,s,j,k0,F");
  CHECK(wrows.size() == 7);
}

TEST_CASE("pattern export")
{
  TempDir t;
  auto const cfg = write_config(t.path, "m.json",
                                R"({"schema_version": 1, "d": 2, "ordering": {"name": "l_inf"},
                                    "levels": [9, 81], "m": [9, 0], "extent": 2, "seed": 3})");
  REQUIRE(run({"pattern", "--config", cfg.string(), "--out", t.path.string()}).code == 0);
  auto const img = decode_pgm(read_file(t.path / "mask.pgm"));
  REQUIRE(img.width == 5);
  for (long row = 0; row < 5; ++row)
    for (long col = 0; col < 5; ++col)
    {
      bool const inner = row >= 1 && row <= 3 && col >= 1 && col <= 3;
      CHECK((img.pixels[static_cast<std::size_t>(row * 5 + col)] == 255) == inner);
    }
  CHECK(lines(read_file(t.path / "samples.csv")).size() == 10);

  auto const wide = write_config(t.path, "w.json",
                                 R"({"schema_version": 1, "d": 2, "ordering": {"name": "l_inf"},
                                     "levels": [9, 81], "m": [9, 30], "extent": 2, "seed": 3})");
  CHECK(run({"pattern", "--config", wide.string(), "--out", (t.path / "lax").string()}).code == 0);
  auto const info = json::parse(read_file(t.path / "lax" / "pattern.json"));
  // ranks 1..25 fill the 5x5 box; every other sample is reported as outside
  auto const lax = decode_pgm(read_file(t.path / "lax" / "mask.pgm"));
  long long const inside = std::count(lax.pixels.begin(), lax.pixels.end(), 255);
  CHECK(info["samples"] == 39);
  CHECK(static_cast<long long>(info["outside_extent"].size()) + inside == 39);
  for (auto const& r : info["outside_extent"])
    CHECK(r.get<long long>() > 25);
  CHECK(run({"pattern", "--config", wide.string(), "--out", (t.path / "strict").string(), "--strict"}).code == 2);
  CHECK_FALSE(fs::exists(t.path / "strict"));

  // seed flag overrides the config and is recorded
  REQUIRE(run({"pattern", "--config", wide.string(), "--out", (t.path / "s9").string(), "--seed", "9"}).code == 0);
  auto const man = json::parse(read_file(t.path / "s9" / "manifest.json"));
  CHECK(man["seed"] == 9);
  CHECK(man["config"]["seed"] == 9);
}

TEST_CASE("reconstruct is byte-reproducible")
{
  TempDir t;
  auto const cfg = write_config(t.path, "r.json", R"({
    "schema_version": 1, "resolution": 16, "seed": 5,
    "phantom": {"type": "block", "boxes": [{"lo": [-0.5, -0.25], "hi": [0.5, 0.75]}]},
    "reconstructions": [{"name": "ml", "basis": "separable",
                         "sampling": {"ordering": "l_inf", "levels": [16, 100, 256], "budget": 120}}]})");
  REQUIRE(run({"reconstruct", "--config", cfg.string(), "--out", (t.path / "a").string()}).code == 0);
  REQUIRE(run({"reconstruct", "--config", cfg.string(), "--out", (t.path / "b").string(), "--threads", "2"}).code == 0);
  for (char const* f : {"manifest.json", "ml.pgm", "ml.f32", "ml_mask.pgm", "reference.pgm", "results.json"})
  {
    CAPTURE(f);
    CHECK(read_file(t.path / "a" / f) == read_file(t.path / "b" / f));
  }
  auto const res = json::parse(read_file(t.path / "a" / "results.json"));
  CHECK(res.dump().find("l1_error") != std::string::npos);
}

TEST_CASE("reconstruct reports non-convergence with exit 3")
{
  TempDir t;
  auto const cfg = write_config(t.path, "r.json", R"({
    "schema_version": 1, "resolution": 16, "seed": 5,
    "phantom": {"type": "block", "boxes": [{"lo": [-0.5, -0.25], "hi": [0.5, 0.75]}]},
    "solver": {"max_iterations": 3},
    "reconstructions": [{"name": "ml", "basis": "separable",
                         "sampling": {"ordering": "l_inf", "levels": [16, 100, 256], "budget": 120}}]})");
  auto const r = run({"reconstruct", "--config", cfg.string(), "--out", t.path.string()});
  CHECK(r.code == 3);
  CHECK(lines(read_file(t.path / "residuals.csv")).size() == 4);
  CHECK_FALSE(fs::exists(t.path / "manifest.json"));
}

TEST_CASE("verify command")
{
  TempDir t;
  auto const r = run({"verify", "--out", t.path.string()});
  CHECK(r.code == 0);
  auto const v = json::parse(read_file(t.path / "verify.json"));
  CHECK(v.size() >= 10);
  for (auto const& c : v)
    CHECK(c["passed"] == true);
}

TEST_CASE("installed binary")
{
  TempDir t;
  std::string const cmd = std::string(COHERE_CLI_PATH) + " verify --out " + t.path.string() + " > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  std::string const bad = std::string(COHERE_CLI_PATH) + " counts --config /nonexistent > /dev/null 2>&1";
  int const status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
