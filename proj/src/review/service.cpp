#include "foundry/review/service.hpp"

#include <algorithm>
#include <charconv>

#include "httplib.h"
#include "foundry/board/notation.hpp"
#include "foundry/pipeline/rank.hpp"

namespace foundry::review {

using pipeline::json;
using pipeline::PuzzleCandidate;
using pipeline::Store;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) { send_json(res, status, {{"error", msg}}); }

std::string status_name(const PuzzleCandidate& c, pipeline::ExportPolicy policy) {
  auto s = c.status(policy);
  return s ? pipeline::to_string(*s) : "pending";
}

json theme_names(const PuzzleCandidate& c) {
  json out = json::array();
  if (c.themes)
    for (const auto& l : *c.themes) out.push_back(themes::to_string(l.theme));
  return out;
}

json summary(const PuzzleCandidate& c, pipeline::ExportPolicy policy) {
  const auto& r = *c.reward_report;
  return {{"id", c.id},
          {"fen", c.fen},
          {"reward", r.reward},
          {"ci", r.ci_score},
          {"themes", theme_names(c)},
          {"verdict", status_name(c, policy)}};
}

json detail(const PuzzleCandidate& c, pipeline::ExportPolicy policy) {
  json j = to_json(c);
  j["status"] = status_name(c, policy);
  j["lichess_url"] = pipeline::lichess_analysis_url(c.fen);
  std::vector<Move> line = c.reward_report ? c.reward_report->solution_line : std::vector<Move>{};
  j["solution"] = {{"uci", to_uci_line(line)}, {"san", to_san_line(c.position(), line)}};
  if (c.neighbors)
    for (auto& n : j["neighbors"]) n["lichess_url"] = pipeline::lichess_analysis_url(n["fen"].get<std::string>());
  return j;
}

std::optional<std::size_t> parse_count(const std::string& text) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

}  // namespace

ReviewService::ReviewService(pipeline::Journal& journal, ServiceOptions opts)
    : journal_(journal), opts_(std::move(opts)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

ReviewService::~ReviewService() = default;

int ReviewService::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ReviewService::listen_after_bind() { return server_->listen_after_bind(); }

void ReviewService::stop() { server_->stop(); }

void ReviewService::routes() {
  auto& srv = *server_;
  const auto origin = opts_.cors_origin;
  srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
  });
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  srv.Get("/candidates", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<themes::Theme> theme;
    if (req.has_param("theme") && !req.get_param_value("theme").empty()) {
      theme = themes::theme_from_string(req.get_param_value("theme"));
      if (!theme) return send_error(res, 400, "unknown theme " + req.get_param_value("theme"));
    }
    std::optional<std::string> status;
    if (req.has_param("status") && !req.get_param_value("status").empty()) {
      status = req.get_param_value("status");
      if (*status != "pending" && *status != "accepted" && *status != "rejected")
        return send_error(res, 400, "unknown status " + *status);
    }
    std::string sort = req.has_param("sort") ? req.get_param_value("sort") : "reward";
    if (sort.empty()) sort = "reward";
    if (sort != "reward" && sort != "ci" && sort != "id") return send_error(res, 400, "unknown sort " + sort);
    std::size_t limit = 50;
    std::size_t offset = 0;
    if (req.has_param("limit")) {
      auto v = parse_count(req.get_param_value("limit"));
      if (!v) return send_error(res, 400, "bad limit");
      limit = *v;
    }
    if (req.has_param("offset")) {
      auto v = parse_count(req.get_param_value("offset"));
      if (!v) return send_error(res, 400, "bad offset");
      offset = *v;
    }

    auto body = journal_.read([&](const Store& s) {
      auto list = pipeline::ranked(s, theme);
      if (sort == "ci")
        std::stable_sort(list.begin(), list.end(),
                         [](auto* a, auto* b) { return a->reward_report->ci_score > b->reward_report->ci_score; });
      else if (sort == "id")
        std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->id < b->id; });
      if (status)
        std::erase_if(list, [&](auto* c) { return status_name(*c, opts_.policy) != *status; });
      json items = json::array();
      for (std::size_t i = offset; i < list.size() && i < offset + limit; ++i) items.push_back(summary(*list[i], opts_.policy));
      return json{{"total", list.size()}, {"offset", offset}, {"limit", limit}, {"items", items}};
    });
    send_json(res, 200, body);
  });

  srv.Get(R"(/candidates/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    auto body = journal_.read([&](const Store& s) -> std::optional<json> {
      auto* c = s.find(id);
      if (!c) return std::nullopt;
      return detail(*c, opts_.policy);
    });
    if (!body) return send_error(res, 404, "no candidate " + id);
    send_json(res, 200, *body);
  });

  srv.Post(R"(/candidates/([^/]+)/verdict)", [this](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    bool exists = journal_.read([&](const Store& s) { return s.find(id) != nullptr; });
    if (!exists) return send_error(res, 404, "no candidate " + id);
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return send_error(res, 422, "body must be a JSON object");
    if (!body.contains("decision") || !body["decision"].is_string()) return send_error(res, 422, "decision required");
    auto decision = pipeline::decision_from_string(body["decision"].get<std::string>());
    if (!decision) return send_error(res, 422, "decision must be accepted or rejected");
    if (!body.contains("reviewer") || !body["reviewer"].is_string() || body["reviewer"].get<std::string>().empty())
      return send_error(res, 422, "reviewer required");
    std::string note;
    if (body.contains("note")) {
      if (!body["note"].is_string()) return send_error(res, 422, "note must be a string");
      note = body["note"].get<std::string>();
    }
    auto updated = journal_.record_verdict(id, *decision, note, body["reviewer"].get<std::string>());
    send_json(res, 200, detail(updated, opts_.policy));
  });

  auto booklet = [this](pipeline::BookletFormat fmt, const char* mime) {
    return [this, fmt, mime](const httplib::Request&, httplib::Response& res) {
      try {
        auto doc = journal_.read([&](const Store& s) { return pipeline::export_booklet(s, fmt, opts_.policy); });
        res.set_content(doc, mime);
      } catch (const pipeline::NothingAccepted& e) {
        send_error(res, 409, e.what());
      }
    };
  };
  srv.Get("/export/booklet.md", booklet(pipeline::BookletFormat::Markdown, "text/markdown; charset=utf-8"));
  srv.Get("/export/booklet.json", booklet(pipeline::BookletFormat::Json, "application/json"));
}

}  // namespace foundry::review
