#include <cstdlib>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "foundry/board/notation.hpp"
#include "foundry/pipeline/rank.hpp"
#include "foundry/review/service.hpp"
#include "support/engines.hpp"
#include "support/fixtures.hpp"
#include "support/stores.hpp"

using namespace foundry;
using namespace foundry::pipeline;
using test_engines::fresh_path;
using test_stores::report_for;

namespace {

// Runs a service over its own journal for the lifetime of the object.
struct Running {
  std::string path = fresh_path("store");
  Journal journal{path};
  review::ReviewService service;
  int port = -1;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;

  explicit Running(review::ServiceOptions opts = {}) : service(journal, opts) {}

  void start() {
    port = service.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { service.listen_after_bind(); });
    service.server().wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  ~Running() {
    service.stop();
    if (thread.joinable()) thread.join();
  }

  json get_json(const std::string& url, int expect = 200) {
    auto res = client->Get(url);
    REQUIRE(res);
    CHECK(res->status == expect);
    return json::parse(res->body);
  }

  httplib::Result post(const std::string& url, const std::string& body) { return client->Post(url, body, "application/json"); }
};

std::string main_puzzle_id(Journal& j) {
  const auto& h = fixtures::booklet()["highlighted"][0];
  Position p = parse_fen(h["fen"].get<std::string>());
  auto id = j.add_candidate(p, "ngram");
  auto line = parse_san_line(p, h["line"].get<std::vector<std::string>>());
  auto r = report_for(p, 1.0, 1.0);
  r.solution_line = line;
  r.uniqueness.winning_move = line.front();
  r.uniqueness.pv = line;
  j.append(events::scored(id, r, 18, 4));
  j.append(events::labeled(id, {{themes::Theme::Sacrifice, {{1, ""}}}}));
  j.append(events::novelty(id, {{"c1", 0.3, "6k1/p1q2np1/4Qb1p/1p1B4/4PP2/BP1p3P/P7/6K1 w - - 0 32"}}, false));
  return id;
}

}  // namespace

TEST_CASE("listing filters, sorts and paginates") {
  Running r;
  test_stores::seed_candidates(r.journal, 300, 31);
  r.start();

  auto page = r.get_json("/candidates?theme=underpromotion&sort=reward");
  REQUIRE(page["items"].size() > 0);
  double prev = 2.0;
  for (const auto& it : page["items"]) {
    CHECK(it["reward"].get<double>() <= prev);
    prev = it["reward"].get<double>();
    auto themes = it["themes"].get<std::vector<std::string>>();
    CHECK(std::find(themes.begin(), themes.end(), "underpromotion") != themes.end());
    CHECK(it["verdict"] == "pending");
  }

  r.get_json("/candidates?theme=zugzwang-foo", 400);
  r.get_json("/candidates?sort=popularity", 400);
  r.get_json("/candidates?status=maybe", 400);
  r.get_json("/candidates?limit=ten", 400);

  // limit=50 is exactly the ranked top 50 for the theme.
  auto manifest = r.journal.read([](const Store& s) { return rank_and_select(s, 50); });
  REQUIRE_FALSE(manifest.themes.empty());
  for (const auto& sel : manifest.themes) {
    auto got = r.get_json("/candidates?sort=reward&limit=50&theme=" + themes::to_string(sel.theme));
    std::vector<std::string> ids;
    for (const auto& it : got["items"]) ids.push_back(it["id"]);
    CHECK(ids == sel.ids);
  }

  // Pages tile the full list.
  auto all = r.get_json("/candidates?limit=100000");
  std::size_t total = all["total"];
  std::vector<std::string> tiled;
  for (std::size_t off = 0; off < total; off += 7) {
    auto p = r.get_json("/candidates?limit=7&offset=" + std::to_string(off));
    for (const auto& it : p["items"]) tiled.push_back(it["id"]);
  }
  std::vector<std::string> whole;
  for (const auto& it : all["items"]) whole.push_back(it["id"]);
  CHECK(tiled == whole);

  auto by_id = r.get_json("/candidates?sort=id&limit=100000");
  std::vector<std::string> ids;
  for (const auto& it : by_id["items"]) ids.push_back(it["id"]);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  auto by_ci = r.get_json("/candidates?sort=ci&limit=100000");
  double last = 2.0;
  for (const auto& it : by_ci["items"]) {
    CHECK(it["ci"].get<double>() <= last);
    last = it["ci"].get<double>();
  }
}

TEST_CASE("candidate detail") {
  Running r;
  auto id = main_puzzle_id(r.journal);
  r.start();
  auto c = r.get_json("/candidates/" + id);
  CHECK(c["id"] == id);
  CHECK(c["solution"]["san"][0] == "Rg6+");
  CHECK(c["solution"]["uci"][0] == c["reward_report"]["solution_line"][0]);
  CHECK(c["neighbors"][0]["lichess_url"].get<std::string>().rfind("https://lichess.org/analysis/6k1/", 0) == 0);
  CHECK(c["themes"][0]["evidence"][0]["ply"] == 1);
  CHECK(c["status"] == "pending");
  r.get_json("/candidates/0000000000000000", 404);
}

TEST_CASE("verdicts over HTTP") {
  Running r;
  auto id = main_puzzle_id(r.journal);
  r.start();
  auto url = "/candidates/" + id + "/verdict";
  auto seq = [&] { return r.journal.read([](const Store& s) { return s.next_seq(); }); };

  auto res = r.post(url, R"({"decision":"accepted","note":"","reviewer":"ann"})");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = r.post(url, R"({"decision":"rejected","note":"flat","reviewer":"ann"})");
  CHECK(json::parse(res->body)["status"] == "rejected");
  CHECK(r.get_json("/candidates/" + id)["status"] == "rejected");

  auto before = seq();
  auto a = r.post(url, R"({"decision":"rejected","note":"flat","reviewer":"ann"})");
  auto b = r.post(url, R"({"decision":"rejected","note":"flat","reviewer":"ann"})");
  CHECK(a->status == 200);
  CHECK(b->status == 200);
  CHECK(a->body == b->body);
  CHECK(seq() == before);

  r.post(url, R"({"decision":"accepted","note":"the quiet Qa1","reviewer":"bo"})");
  auto c = r.get_json("/candidates/" + id);
  CHECK(c["verdicts"].size() == 2);
  CHECK(c["status"] == "accepted");  // any-accept

  CHECK(r.post(url, "not json")->status == 422);
  CHECK(r.post(url, R"({"decision":"maybe","reviewer":"ann"})")->status == 422);
  CHECK(r.post(url, R"({"decision":"accepted"})")->status == 422);
  CHECK(r.post(url, R"({"decision":"accepted","reviewer":"ann","note":7})")->status == 422);
  CHECK(r.post(url, R"([1,2])")->status == 422);
  CHECK(r.post("/candidates/ffffffffffffffff/verdict", R"({"decision":"accepted","reviewer":"ann"})")->status == 404);

  // Verdicts leave scoring fields alone.
  CHECK(c["reward_report"] == r.get_json("/candidates/" + id)["reward_report"]);
  CHECK(r.get_json("/candidates?status=accepted")["items"].size() == 1);
  CHECK(r.get_json("/candidates?status=pending")["items"].size() == 0);
}

TEST_CASE("unanimous policy") {
  Running r({ExportPolicy::Unanimous, "*"});
  auto id = main_puzzle_id(r.journal);
  r.start();
  auto url = "/candidates/" + id + "/verdict";
  r.post(url, R"({"decision":"accepted","reviewer":"ann"})");
  r.post(url, R"({"decision":"rejected","reviewer":"bo"})");
  CHECK(r.get_json("/candidates/" + id)["status"] == "rejected");
  CHECK(r.client->Get("/export/booklet.md")->status == 409);
}

TEST_CASE("booklet export over HTTP matches the CLI byte for byte") {
  Running r;
  auto id = main_puzzle_id(r.journal);
  r.start();
  CHECK(r.client->Get("/export/booklet.md")->status == 409);
  r.post("/candidates/" + id + "/verdict", R"({"decision":"accepted","reviewer":"ann"})");
  auto res = r.client->Get("/export/booklet.md");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.find("[Analyse on Lichess](https://lichess.org/analysis/1r1r2k1/Q2p1R1p/2p2R2/1p3pB1/1P4q1/8/5K2/8%20w%20-%20-%200%201)") !=
        std::string::npos);

  auto out = fresh_path("booklet");
  std::string cmd = std::string(FOUNDRY_CLI_PATH) + " --store " + r.path + " export --format markdown -o " + out;
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::ifstream in(out, std::ios::binary);
  std::string cli{std::istreambuf_iterator<char>(in), {}};
  CHECK(cli == res->body);

  auto js = r.client->Get("/export/booklet.json");
  CHECK(import_booklet_json(js->body).front().id == id);
}

TEST_CASE("restart loses nothing") {
  std::string path;
  json before;
  std::string id;
  {
    Running r;
    id = main_puzzle_id(r.journal);
    r.start();
    r.post("/candidates/" + id + "/verdict", R"({"decision":"accepted","reviewer":"ann"})");
    before = r.get_json("/candidates/" + id);
    path = r.path;
  }
  Journal j(path);
  review::ReviewService svc(j);
  int port = svc.bind("127.0.0.1", 0);
  std::thread t([&] { svc.listen_after_bind(); });
  svc.server().wait_until_ready();
  httplib::Client cl("127.0.0.1", port);
  auto res = cl.Get("/candidates/" + id);
  CHECK(json::parse(res->body) == before);
  svc.stop();
  t.join();
}

TEST_CASE("CORS") {
  Running r;
  main_puzzle_id(r.journal);
  r.start();
  auto res = r.client->Get("/candidates");
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  auto pre = r.client->Options("/candidates/x/verdict");
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
}

TEST_CASE("concurrent verdicts are serialized") {
  Running r;
  auto ids = test_stores::seed_candidates(r.journal, 40, 41);
  r.start();
  std::vector<std::thread> ts;
  for (int w = 0; w < 4; ++w) {
    ts.emplace_back([&, w] {
      httplib::Client cl("127.0.0.1", r.port);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        std::string body = json{{"decision", (i + w) % 2 ? "accepted" : "rejected"}, {"reviewer", "r" + std::to_string(w)}}.dump();
        auto res = cl.Post("/candidates/" + ids[i] + "/verdict", body, "application/json");
        CHECK(res);
        if (res) CHECK(res->status == 200);
        cl.Get("/candidates?limit=5");
      }
    });
  }
  for (auto& t : ts) t.join();
  auto live = r.journal.read([](const Store& s) { return s.snapshot(); });
  CHECK(replay(r.path).snapshot() == live);
  r.journal.read([&](const Store& s) {
    for (const auto& id : ids) CHECK(s.at(id).verdicts.size() == 4);
    return 0;
  });
}
