#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tagdl/cli/cli.hpp"
#include "tagdl/cli/csv.hpp"

using namespace tagdl;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tagdl");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int status = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

struct Workspace {
  std::filesystem::path dir;
  Workspace() {
    dir = std::filesystem::temp_directory_path() / ("tagdl_cli_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
  }
  ~Workspace() { std::filesystem::remove_all(dir); }
  std::string file(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

const RelationSignature kPair{{ValueType::USize, ValueType::USize}};

}  // namespace

TEST_CASE("kinship rules under the unit provenance") {
  Workspace ws;
  const auto prog = ws.file("family.scl", R"(
    rel father = {("Bob", "Christine")}
    rel mother = {("Alice", "Bob"), ("Christine", "Emma")}
    rel parent(a, b) = father(a, b) or mother(a, b)
    rel grandmother(a, c) = mother(a, b), parent(b, c)
    query grandmother
  )");
  auto r = run_cli({prog});
  CHECK(r.status == 0);
  CHECK(lines(r.out) == std::vector<std::string>{"grandmother(\"Alice\", \"Christine\")"});
}

TEST_CASE("most likely kinship under a probabilistic provenance") {
  Workspace ws;
  const auto prog = ws.file("kin.scl", R"(
    const FATHER = 0, MOTHER = 1, UNCLE = 2, BROTHER = 3
    rel kinship = {0.95::(FATHER, "A", "B"); 0.01::(MOTHER, "A", "B"); 0.02::(UNCLE, "A", "B"); 0.02::(BROTHER, "A", "B")}
    rel top_1_kinship(r, a, b) = r := top<1>(rp: kinship(rp, a, b))
    query top_1_kinship
  )");
  for (std::string prov : {"minmaxprob", "addmultprob", "topkproofs", "difftopkproofs"}) {
    auto r = run_cli({prog, "--provenance", prov});
    CHECK(r.status == 0);
    CHECK(lines(r.out) == std::vector<std::string>{"0.950000::top_1_kinship(0, \"A\", \"B\")"});
  }
}

TEST_CASE("an unstratified program exits with status 1") {
  Workspace ws;
  const auto prog = ws.file("bad.scl", "rel edge = {(0, 1)}\nrel path(a, b) = edge(a, b) and not path(b, a)\n");
  auto r = run_cli({prog});
  CHECK(r.status == 1);
  CHECK(r.err.find("not stratified") != std::string::npos);
  CHECK(r.err.find("bad.scl:2:") != std::string::npos);
}

TEST_CASE("usage errors exit with status 1") {
  Workspace ws;
  const auto prog = ws.file("p.scl", "rel a = {1}\n");
  CHECK(run_cli({prog, "--provenance", "nope"}).status == 1);
  CHECK(run_cli({prog, "--provenance", "topkproofs", "--k", "0"}).status == 1);
  CHECK(run_cli({prog, "--output", "xml"}).status == 1);
  CHECK(run_cli({prog, "--query", "zzz"}).status == 1);
  CHECK(run_cli({(ws.dir / "missing.scl").string()}).status == 1);
  CHECK(run_cli({"--help"}).status == 0);
}

TEST_CASE("exceeding the iteration limit exits with status 2") {
  Workspace ws;
  const auto prog = ws.file("n.scl", "rel n = {0}\nrel n(x + 1) = n(x)\n");
  auto r = run_cli({prog, "--iter-limit", "10"});
  CHECK(r.status == 2);
  CHECK(r.err.find("10") != std::string::npos);
}

TEST_CASE("CSV parsing") {
  auto rows = parse_csv("a,b\n\"x,y\",\"say \"\"hi\"\"\"\r\n3,\n", "t.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == std::vector<std::string>{"x,y", "say \"hi\""});
  CHECK(rows[2] == std::vector<std::string>{"3", ""});
  CHECK_THROWS_AS(parse_csv("a\n\"open\n", "t.csv"), LoadError);
}

TEST_CASE("CSV facts") {
  auto plain = load_edb_csv("edge", kPair, "from,to\n0,1\n1,2\n", "e.csv");
  REQUIRE(plain.size() == 2);
  CHECK_FALSE(plain[0].tag.prob);
  CHECK(plain[1].tuple == Tuple{Value::usize(1), Value::usize(2)});

  auto tagged = load_edb_csv("edge", kPair, "prob,from,to\n0.9,0,1\n,1,2\n", "e.csv");
  CHECK(tagged[0].tag.prob == 0.9);
  CHECK_FALSE(tagged[1].tag.prob);

  auto me = load_edb_csv("edge", kPair, "prob,me,from,to\n0.5,3,0,1\n0.5,3,0,2\n", "e.csv");
  REQUIRE(me[0].tag.exclusion);
  CHECK(me[0].tag.exclusion == me[1].tag.exclusion);
  CHECK(*me[0].tag.exclusion >= kCsvExclusionBase);
}

TEST_CASE("malformed CSV rows name the row") {
  auto fails_at = [](std::string_view text, const std::string& row) {
    try {
      load_edb_csv("edge", kPair, text, "e.csv");
    } catch (const LoadError& e) {
      CHECK(std::string(e.what()).find("row " + row) != std::string::npos);
      return;
    }
    FAIL("expected a load error for: " << text);
  };
  fails_at("prob,from,to\n0.5,0,1\n1.5,1,2\n", "3");
  fails_at("prob,from,to\n-0.1,0,1\n", "2");
  fails_at("from,to\n0,1,2\n", "2");
  fails_at("from,to\n0,x\n", "2");
  fails_at("me,from,to\n3,0,1\n", "2");
  CHECK_THROWS_AS(load_edb_csv("edge", kPair, "", "e.csv"), LoadError);
}

TEST_CASE("CSV files replace a relation's facts") {
  Workspace ws;
  const auto prog = ws.file("paths.scl", R"(
    rel edge = {(0, 1)}
    rel path(a, b) = edge(a, b) or (path(a, c) and edge(c, b))
    query path
  )");
  const auto csv = ws.file("edge.csv", "prob,from,to\n0.5,5,6\n0.4,6,7\n");
  auto r = run_cli({prog, "--provenance", "minmaxprob", "--edb", "edge=" + csv});
  CHECK(r.status == 0);
  CHECK(lines(r.out) ==
        std::vector<std::string>{"0.500000::path(5, 6)", "0.400000::path(5, 7)", "0.400000::path(6, 7)"});
  CHECK(run_cli({prog, "--edb", "zzz=" + csv}).status == 1);
  CHECK(run_cli({prog, "--edb", "edge"}).status == 1);
  const auto bad = ws.file("bad.csv", "prob,from,to\n2,5,6\n");
  auto b = run_cli({prog, "--edb", "edge=" + bad});
  CHECK(b.status == 1);
  CHECK(b.err.find("load error") != std::string::npos);
}

TEST_CASE("JSON output") {
  Workspace ws;
  const auto prog = ws.file("d.scl", R"(
    rel g = {0.9::(1, 2), 0.8::(2, 3)}
    rel e = {0.3::(2, 3)}
    rel d(a, b) = g(a, b) and not e(a, b)
    query d
  )");
  auto r = run_cli({prog, "--provenance", "diffaddmultprob", "--output", "json"});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["provenance"] == "diffaddmultprob");
  REQUIRE(j["inputs"].size() == 3);
  CHECK(j["inputs"][2]["relation"] == "e");
  const auto& facts = j["relations"][0]["facts"];
  REQUIRE(facts.size() == 2);
  CHECK(facts[1]["tuple"] == nlohmann::json::array({2, 3}));
  CHECK(facts[1]["prob"].get<double>() == doctest::Approx(0.8 * 0.7));
  const auto grad = facts[1]["grad"].get<std::vector<double>>();
  REQUIRE(grad.size() == 3);
  CHECK(grad[1] == doctest::Approx(0.7));
  CHECK(grad[2] == doctest::Approx(-0.8));
}

TEST_CASE("property: JSON output round-trips exactly") {
  Workspace ws;
  std::mt19937_64 rng(61);
  for (int round = 0; round < 20; ++round) {
    std::string src = "type edge(usize, usize)\n";
    std::map<std::pair<int, int>, double> edges;
    for (int i = 0; i < 6; ++i) {
      const int a = static_cast<int>(rng() % 5), b = static_cast<int>(rng() % 5);
      const double p = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
      if (!edges.emplace(std::pair{a, b}, p).second) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", p);
      src += "rel " + std::string(buf) + "::edge(" + std::to_string(a) + ", " + std::to_string(b) + ")\n";
    }
    src += "query edge\n";
    const auto prog = ws.file("r.scl", src);
    auto r = run_cli({prog, "--provenance", "minmaxprob", "--output", "json"});
    REQUIRE(r.status == 0);
    std::map<std::pair<int, int>, double> back;
    const auto j = nlohmann::json::parse(r.out);
    for (const auto& f : j["relations"][0]["facts"]) {
      back[{f["tuple"][0].get<int>(), f["tuple"][1].get<int>()}] = f["prob"].get<double>();
    }
    CHECK(back == edges);
  }
}

TEST_CASE("identical runs print identical bytes") {
  Workspace ws;
  const auto prog = ws.file("s.scl", R"(
    rel score = {0.9::(0, 1), 0.6::(0, 2), 0.3::(0, 3), 0.8::(1, 1), 0.2::(1, 4)}
    rel pick(g, s) = s := categorical<2>(t: score(g, t))
    rel any_one(s) = s := uniform<1>(t: score(_, t))
  )");
  for (std::string prov : {"unit", "minmaxprob", "difftopkproofs"}) {
    auto a = run_cli({prog, "--provenance", prov, "--seed", "9", "--output", "json"});
    auto b = run_cli({prog, "--provenance", prov, "--seed", "9", "--output", "json"});
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("batch evaluation is independent of the job count") {
  Workspace ws;
  const auto prog = ws.file("paths.scl", R"(
    type edge(usize, usize)
    rel path(a, b) = edge(a, b) or (path(a, c) and edge(c, b))
    query path
  )");
  std::vector<std::string> args{prog, "--provenance", "difftopkproofs", "--output", "json"};
  for (int i = 0; i < 6; ++i) {
    std::string csv = "prob,from,to\n";
    for (int j = 0; j < 4; ++j) csv += "0.5," + std::to_string((i + j) % 4) + "," + std::to_string((i + 2 * j + 1) % 4) + "\n";
    args.push_back("--edb-set");
    args.push_back("edge=" + ws.file("e" + std::to_string(i) + ".csv", csv));
  }
  auto serial = run_cli(args);
  args.push_back("--jobs");
  args.push_back("4");
  auto parallel = run_cli(args);
  REQUIRE(serial.status == 0);
  CHECK(serial.out == parallel.out);
  CHECK(nlohmann::json::parse(serial.out).size() == 6);
}

TEST_CASE("dumping the RAM program") {
  Workspace ws;
  const auto prog = ws.file("d.scl", "rel g = {(1, 2)}\nrel e = {(2, 3)}\nrel d(a, b) = g(a, b) and not e(a, b)\n");
  auto r = run_cli({prog, "--dump-ram"});
  CHECK(r.status == 0);
  CHECK(r.out.find("d <- difference(g, e)") != std::string::npos);
}

TEST_CASE("listing foreign functions") {
  auto r = run_cli({"--list-functions"});
  CHECK(r.status == 0);
  for (const char* fn : {"string_concat", "string_length", "abs", "hash"}) CHECK(r.out.find(fn) != std::string::npos);
}

TEST_CASE("statistics go to stderr") {
  Workspace ws;
  const auto prog = ws.file("f.scl", "rel denominator = {0, 1, 2}\nrel result(6 / x) = denominator(x)\nquery result\n");
  auto r = run_cli({prog, "--stats"});
  CHECK(r.status == 0);
  CHECK(lines(r.out) == std::vector<std::string>{"result(3)", "result(6)"});
  CHECK(r.err.find("stratum 0:") != std::string::npos);
  CHECK(r.err.find("foreign-function failures: 1") != std::string::npos);
}
