#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "emsca/trace_io.hpp"
#include <json.hpp>

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = emsca::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("emsca_cli_" + name)).string();
}

}  // namespace

TEST_CASE("encrypt and decrypt") {
  auto r = run({"encrypt", "--key", "00000000000000000000", "--pt", "0000000000000000"});
  CHECK(r.code == 0);
  CHECK(r.out == "5579C1387B228445\n");
  r = run({"decrypt", "--key", "00000000000000000000", "--ct", "5579C1387B228445"});
  CHECK(r.out == "0000000000000000\n");
  r = run({"encrypt", "--key", "FFFFFFFFFFFFFFFFFFFF", "--pt", "FFFFFFFFFFFFFFFF", "--json"});
  CHECK(nlohmann::json::parse(r.out)["ct"] == "3333DCD3213210D2");
}

TEST_CASE("usage errors exit 1 and name the flag") {
  auto r = run({"gen", "--traces", "4", "--key", "ZZZ", "--out", temp("bad.emts")});
  CHECK(r.code == 1);
  CHECK(r.err.find("--key") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"nonsense"}).code == 1);
  CHECK(run({"sr", "--pattern", "12"}).code == 1);
  CHECK(run({"attack", "--in", temp("x.emts"), "--filter", "abc"}).code == 1);
}

TEST_CASE("data errors exit 2") {
  const std::string path = temp("garbage.emts");
  {
    std::ofstream f(path, std::ios::binary);
    f << "XXXXnot a trace set at all, definitely longer than the header";
  }
  CHECK(run({"attack", "--in", path}).code == 2);
  CHECK(run({"attack", "--in", temp("missing.emts")}).code == 2);
}

TEST_CASE("gen, attack, sema, semfa, filter, bfa pipeline") {
  const std::string active = temp("active.emts");
  const std::string idle = temp("idle.emts");
  const std::string filtered = temp("filtered.emts");
  const std::string surface = temp("surface.csv");

  auto r = run({"gen", "--traces", "256", "--key", "0123456789ABCDEF4567", "--seed", "7", "--out", active,
                "--threads", "1"});
  REQUIRE(r.code == 0);
  auto gen = nlohmann::json::parse(r.out);
  CHECK(gen["traces"] == 256);
  CHECK(gen["bytes"] == emsca::emts_file_size(256, 4096));
  CHECK(gen["config"]["rng"].get<std::string>().find("mt19937_64") != std::string::npos);
  // Same seed, same bytes.
  const std::string again = temp("again.emts");
  run({"gen", "--traces", "256", "--key", "0123456789ABCDEF4567", "--seed", "7", "--out", again, "--threads", "3"});
  {
    std::ifstream a(active, std::ios::binary), b(again, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }

  r = run({"attack", "--in", active, "--surface-out", surface, "--surface-byte", "3"});
  CHECK(r.code == 0);
  auto report = nlohmann::json::parse(r.out);
  CHECK(report["recovered_high"] == "0123456789ABCDEF");
  CHECK(report["correct_bytes"] == 8);
  CHECK(report["bytes"][0]["ranking"].size() == 5);
  CHECK(std::filesystem::file_size(surface) > 256 * 4096 * 5);

  r = run({"attack", "--in", active, "--csv", "--top", "2"});
  CHECK(r.out.rfind("byte,rank,candidate,abs_rho,sample\n", 0) == 0);

  r = run({"attack", "--in", active, "--filter", "44.08e6:46.08e6"});
  CHECK((r.code == 0 || r.code == 3));
  CHECK(nlohmann::json::parse(r.out)["bytes"].size() == 8);

  r = run({"gen", "--traces", "64", "--idle", "--seed", "8", "--out", idle});
  REQUIRE(r.code == 0);
  r = run({"attack", "--in", idle});
  CHECK(r.code == 3);
  for (const auto& b : nlohmann::json::parse(r.out)["bytes"]) CHECK(b["confident"] == false);

  r = run({"sema", "--active", active, "--idle", temp("idle_full.emts")});
  CHECK(r.code == 2);
  run({"gen", "--traces", "64", "--idle", "--seed", "9", "--noise", "0.05", "--out", temp("idle_full.emts")});
  r = run({"sema", "--active", active, "--idle", temp("idle_full.emts")});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).contains("ratio_rms"));

  r = run({"semfa", "--in", active, "--peaks", "3"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["spectrum"]["peaks"].size() == 3);
  r = run({"semfa", "--in", active, "--spectrogram", "--window", "512", "--overlap", "256", "--csv"});
  CHECK(r.out.rfind("frame,bin_hz,magnitude\n", 0) == 0);
  r = run({"semfa", "--in", active, "--spectrogram", "--window", "5000"});
  CHECK(r.code == 1);

  r = run({"filter", "--in", active, "--out", filtered, "--preset", "paper", "--mode", "notch"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["bands"].size() == 7);
  CHECK(emsca::load_trace_set(filtered).trace_count() == 256);
  CHECK(run({"filter", "--in", active, "--out", filtered, "--band", "1e6:2e9"}).code == 1);

  r = run({"bfa", "--in", active});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["key"] == "0123456789ABCDEF4567");
  r = run({"bfa", "--known", "0123456789ABCDEE", "--pt", "0000000000000000", "--ct", "5579C1387B228445"});
  CHECK(r.code == 3);
  CHECK(nlohmann::json::parse(r.out)["status"] == "not_found");

  for (const auto& p : {active, idle, filtered, surface, again, temp("idle_full.emts")}) std::filesystem::remove(p);
}

TEST_CASE("sr command is reproducible") {
  const std::vector<std::string> args{"sr", "--pattern", "ff", "--runs", "2", "--traces", "64", "--seed", "9",
                                      "--samples", "1024", "--leak-offset", "64", "--leak-spacing", "112"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["pattern_bits"] == "11111111b");
  CHECK(doc["bytes"].size() == 8);
}
