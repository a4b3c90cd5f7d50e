#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(ERL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json payload_of(const Run& r) {
  const json j = json::parse(r.out);
  return j.at("payload");
}

std::set<std::string> dumps(const json& list) {
  std::set<std::string> out;
  for (const auto& x : list) out.insert(x.at("sets").dump());
  return out;
}

}  // namespace

TEST_CASE("count on the middle level") {
  const Run r = cli("count --n 4 --family middle:1 --r 3 --k 2");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("command") == "count");
  CHECK(j.at("payload") == json{{"count", "729"}, {"method", "antichain"}});
  CHECK(j.at("parameters").at("r") == "3");
  CHECK(j.contains("wall_time_ms"));
  CHECK(j.contains("version"));
}

TEST_CASE("partition on the middle level") {
  const Run r = cli("partition --n 4 --family middle:1 --k 2 --omega 0 --verify");
  REQUIRE(r.code == 0);
  const json p = payload_of(r);
  CHECK(p.at("all_pass") == true);
  CHECK(p.at("qualities").size() == 9);
  CHECK(p.at("properties").size() == 5);
  for (const auto& [name, ok] : p.at("qualities").items()) CHECK_MESSAGE(ok == true, name);
  for (const auto& [name, ok] : p.at("properties").items()) CHECK_MESSAGE(ok == true, name);
  const json a = p.at("parts").at("A");
  REQUIRE(a.size() == 1);
  CHECK(a[0].size() == 6);
  CHECK(p.at("parts").at("R")[0].empty());
}

TEST_CASE("exhaustive search on n=3") {
  const Run r = cli("search --n 3 --r 2 --k 2 --exhaustive");
  REQUIRE(r.code == 0);
  const json p = payload_of(r);
  CHECK(p.at("best") == "8");
  CHECK(dumps(p.at("maximisers")) == std::set<std::string>{"[[1],[2],[3]]", "[[1,2],[1,3],[2,3]]"});
}

TEST_CASE("exit codes") {
  CHECK(cli("count --n 4 --family nonsense --r 3 --k 2").code == 2);
  CHECK(cli("count --n 4 --family middle:1 --r 3").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("partition --n 2 --family all --k 2").code == 2);
  CHECK(cli("count --n 4 --family all --r 3 --k 3 --method layered").code == 3);
  CHECK(cli("construct --kind assignment --r 4 --k 2").code == 3);
  CHECK(cli("validate --n 2 --family all --r 1 --k 3 --colouring 0,0,0,0").code == 4);
  CHECK(cli("validate --n 2 --family all --r 2 --k 3 --colouring 0,1,1,0").code == 0);
  CHECK(cli("--version").code == 0);
}

TEST_CASE("identical arguments give identical payloads") {
  const std::string args = "search --n 4 --r 3 --k 2 --budget 100 --seed 9 --restarts 2";
  const Run a = cli(args);
  const Run b = cli(args);
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  json ja = json::parse(a.out);
  json jb = json::parse(b.out);
  ja.erase("wall_time_ms");
  jb.erase("wall_time_ms");
  CHECK(ja == jb);

  const Run c = cli("partition --n 3 --family random:0.5,4 --k 3 --omega 1 --verify --trace");
  const Run d = cli("partition --n 3 --family random:0.5,4 --k 3 --omega 1 --verify --trace");
  REQUIRE(c.out.size() > 0);
  CHECK(c.code == d.code);
  CHECK(payload_of(c) == payload_of(d));
}

TEST_CASE("family files round trip through the CLI") {
  const std::string path = std::string(ERL_TEST_TMP) + "/cli_family.json";
  {
    std::ofstream out(path);
    out << R"({"n": 3, "sets": [[1], [1, 2], [3]]})";
  }
  const Run r = cli("mirsky --family file:" + path);
  REQUIRE(r.code == 0);
  CHECK(payload_of(r).at("height") == 2);
  const Run c = cli("count --family file:" + path + " --r 2 --k 2");
  REQUIRE(c.code == 0);
  CHECK(payload_of(c).at("count") == "4");
  CHECK(cli("count --n 4 --family file:" + path + " --r 2 --k 2").code == 2);
  std::remove(path.c_str());
}

TEST_CASE("csv output") {
  const Run r = cli("count --n 4 --family middle:1 --r 3 --k 2 --csv");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("729") != std::string::npos);
  CHECK(r.out.find('{') == std::string::npos);
  const Run s = cli("search --n 3 --r 2 --k 2 --exhaustive --csv");
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("family,class_size,count", 0) == 0);
}

TEST_CASE("other subcommands") {
  CHECK(payload_of(cli("cp --n 2 --family all")).at("pairs") == 5);
  CHECK(cli("kleitman --n 3 --family all").code == 0);
  CHECK(cli("lym --n 4 --family level:2").code == 0);
  CHECK(cli("weight --n 4 --family level:2 --k 2 --delta 1/4").code == 0);
  const Run m = cli("construct --kind middle --n 5 --j 2");
  REQUIRE(m.code == 0);
  CHECK(payload_of(m).at("family").at("sets").size() == 20);
  CHECK(cli("construct --kind paired --n 3").code == 0);
  CHECK(cli("construct --kind assignment --r 3 --k 4 --n 4").code == 0);
}
