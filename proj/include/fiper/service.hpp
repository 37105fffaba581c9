#pragma once

// HTTP API over an immutable Store snapshot. Routing lives in `Api`, which
// answers plain (method, path, query, body) requests so it can be exercised
// without sockets; `Server` wires it into cpp-httplib.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <httplib.h>

#include "fiper/serialize.hpp"
#include "fiper/store.hpp"
#include "fiper/study.hpp"

namespace fiper {

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using QueryParams = std::multimap<std::string, std::string>;

/// One uploaded part of a multipart ingest request.
struct UploadPart {
  std::string name;      // form field: schema, dataset, bundles
  std::string filename;  // for error messages
  std::string content;
};

class Api {
 public:
  explicit Api(Store store = {}) : store_(std::make_shared<const Store>(std::move(store))) {}

  std::shared_ptr<const Store> snapshot() const {
    std::lock_guard lock(mutex_);
    return store_;
  }

  void replace(Store store) {
    auto next = std::make_shared<const Store>(std::move(store));
    std::lock_guard lock(mutex_);
    store_ = std::move(next);
  }

  ApiResponse get(std::string_view path, const QueryParams& query = {}) const {
    const auto store = snapshot();
    try {
      return route_get(*store, path, query);
    } catch (const ValidationError& e) {
      return error(422, e.code(), e.what(), std::string(path), &e.violations());
    } catch (const Error& e) {
      return error(e.code() == "bad-option" ? 400 : 422, e.code(), e.what(), e.path().empty() ? std::string(path) : e.path());
    }
  }

  /// POST /api/study/score. Body: {"truths": [...], "responses": [...],
  /// "baseline": "text", optional "tlx", "ues", "ues_reverse_items"}.
  ApiResponse score_study(std::string_view body) const {
    try {
      const Json doc = parse_json(body, "body");
      study::StudyInput input;
      input.truths = truths_from_json(doc);
      responses_from_json(doc, input);
      study::Modality baseline = study::Modality::text;
      if (doc.is_object())
        if (auto it = doc.find("baseline"); it != doc.end() && it->is_string())
          baseline = study::parse_modality(it->get<std::string>());
      return json_response(report_to_json(study::score_study(input, baseline)));
    } catch (const Error& e) {
      return error(400, e.code(), e.what(), e.path().empty() ? "body" : e.path());
    }
  }

  /// POST /api/ingest. Validates the uploaded schema, dataset and bundles
  /// against a copy of the current store and swaps it in only if all pass.
  ApiResponse ingest(const std::vector<UploadPart>& parts) {
    std::lock_guard writer(ingest_mutex_);
    try {
      const UploadPart* schema = nullptr;
      const UploadPart* dataset = nullptr;
      std::vector<const UploadPart*> bundles;
      for (const auto& p : parts) {
        if (p.name == "schema") schema = &p;
        else if (p.name == "dataset") dataset = &p;
        else if (p.name == "bundles" || p.name == "bundle") bundles.push_back(&p);
      }
      Store next = *snapshot();
      std::string dataset_id;
      if (schema || dataset) {
        if (!schema || !dataset)
          throw Error("bad-request", "ingest needs both a schema and a dataset part", schema ? "dataset" : "schema");
        DatasetEntry entry = load_dataset(schema->content, dataset->content, label(*schema), label(*dataset));
        dataset_id = entry.schema().id;
        // Replacing a dataset drops the bundles that pointed at the old one.
        std::erase_if(next.bundles, [&](const auto& kv) { return kv.second.schema_ref == dataset_id; });
        next.add_dataset(std::move(entry));
      }
      Json ids = Json::array();
      for (const auto* b : bundles) {
        const std::string source = label(*b);
        const Json doc = parse_json(b->content, source);
        if (doc.is_object() && doc.contains("id") && doc["id"].is_string()) next.bundles.erase(doc["id"].get<std::string>());
        ids.push_back(next.add_bundle(b->content, source).id);
      }
      replace(std::move(next));
      return json_response(Json{{"dataset", dataset_id.empty() ? Json(nullptr) : Json(dataset_id)}, {"bundles", ids}});
    } catch (const ValidationError& e) {
      return error(422, e.code(), e.what(), e.path(), &e.violations());
    } catch (const Error& e) {
      return error(e.code() == "bad-request" ? 400 : 422, e.code(), e.what(), e.path());
    }
  }

  static ApiResponse error(int status, const std::string& code, const std::string& message, const std::string& path,
                           const ValidationReport* violations = nullptr) {
    Json body{{"code", code}, {"message", message}, {"path", path}};
    if (violations) {
      Json list = Json::array();
      for (const auto& v : *violations) list.push_back(Json{{"code", v.code}, {"path", v.path}, {"message", v.message}});
      body["violations"] = std::move(list);
    }
    return {status, "application/json", dump(body) + "\n"};
  }

 private:
  static std::string label(const UploadPart& p) { return p.filename.empty() ? p.name : p.filename; }

  static ApiResponse json_response(const Json& doc) { return {200, "application/json", dump(doc) + "\n"}; }

  static ApiResponse not_found(std::string_view path, const std::string& what) {
    return error(404, "not-found", what, std::string(path));
  }

  static std::string param(const QueryParams& q, const char* key, const char* fallback) {
    auto it = q.find(key);
    return it == q.end() ? fallback : it->second;
  }

  static std::vector<std::string> split(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
      while (i < path.size() && path[i] == '/') ++i;
      std::size_t j = i;
      while (j < path.size() && path[j] != '/') ++j;
      if (j > i) parts.emplace_back(path.substr(i, j - i));
      i = j;
    }
    return parts;
  }

  static ApiResponse route_get(const Store& store, std::string_view path, const QueryParams& query) {
    const auto parts = split(path);
    if (parts.size() < 2 || parts[0] != "api") return not_found(path, "no such endpoint");
    const std::string& resource = parts[1];

    if (resource == "datasets") {
      if (parts.size() == 2) {
        Json list = Json::array();
        for (const auto& [id, e] : store.datasets)
          list.push_back(Json{{"id", id},
                              {"target_name", e.schema().target_name},
                              {"features", e.schema().features.size()},
                              {"rows", e.data.rows.size()}});
        return json_response(Json{{"datasets", std::move(list)}});
      }
      if (parts.size() == 4 && parts[3] == "schema") {
        const DatasetEntry* e = store.dataset(parts[2]);
        if (!e) return not_found(path, "unknown dataset '" + parts[2] + "'");
        return json_response(schema_to_json(e->schema()));
      }
      return not_found(path, "no such endpoint");
    }

    if (resource == "features" && parts.size() == 4) {
      const DatasetEntry* e = store.dataset(parts[2]);
      if (!e) return not_found(path, "unknown dataset '" + parts[2] + "'");
      const FeatureSummary* s = find_summary(e->summaries, parts[3]);
      if (!s) return not_found(path, "unknown feature '" + parts[3] + "'");
      return json_response(summary_to_json(*s));
    }

    if (resource == "explanations") {
      if (parts.size() == 2) {
        Json list = Json::array();
        for (const auto& [id, b] : store.bundles)
          list.push_back(Json{{"id", id}, {"schema_ref", b.schema_ref}, {"prediction", b.prediction}});
        return json_response(Json{{"explanations", std::move(list)}});
      }
      const ExplanationBundle* b = store.bundle(parts[2]);
      if (!b) return not_found(path, "unknown explanation '" + parts[2] + "'");
      if (parts.size() == 3) return json_response(bundle_to_json(*b));
      const DatasetEntry* e = store.dataset(b->schema_ref);
      if (!e) return not_found(path, "unknown dataset '" + b->schema_ref + "'");

      ViewOptions options;
      options.filter = parse_filter(param(query, "filter", "all"));
      options.sort = parse_sort(param(query, "sort", "abs"));
      OutputFormat format;
      if (parts.size() == 4 && parts[3] == "view") format = OutputFormat::view;
      else if (parts.size() == 4 && parts[3] == "svg") format = OutputFormat::svg;
      else if (parts.size() == 5 && parts[3] == "modality" && (parts[4] == "text" || parts[4] == "blocks"))
        format = parse_format(parts[4]);
      else
        return not_found(path, "no such endpoint");
      return {200, std::string(content_type(format)), render_explanation(*b, *e, format, options)};
    }
    return not_found(path, "no such endpoint");
  }

  mutable std::mutex mutex_;
  std::mutex ingest_mutex_;
  std::shared_ptr<const Store> store_;
};

/// Placeholder landing page; a built UI can be mounted with `ui_dir`.
inline constexpr std::string_view kIndexHtml = R"HTML(<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>fiper</title></head>
<body>
<h1>fiper</h1>
<p>Explanation views are served under <code>/api</code>.</p>
<ul id="list"></ul>
<script>
fetch('/api/explanations').then(r => r.json()).then(doc => {
  const ul = document.getElementById('list');
  for (const e of doc.explanations) {
    const li = document.createElement('li');
    const a = document.createElement('a');
    a.href = '/api/explanations/' + encodeURIComponent(e.id) + '/svg';
    a.textContent = e.id + ' (' + e.prediction + ')';
    li.appendChild(a);
    ul.appendChild(li);
  }
});
</script>
</body>
</html>
)HTML";

class Server {
 public:
  explicit Server(Api& api, std::string ui_dir = {}) : api_(api) {
    if (!ui_dir.empty()) http_.set_mount_point("/", ui_dir);

    http_.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(kIndexHtml), "text/html; charset=utf-8");
    });
    http_.Get(R"(/api(/.*)?)", [this](const httplib::Request& req, httplib::Response& res) {
      QueryParams q(req.params.begin(), req.params.end());
      send(res, api_.get(req.path, q));
    });
    http_.Post("/api/study/score", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, api_.score_study(req.body));
    });
    http_.Post("/api/ingest", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.is_multipart_form_data()) {
        send(res, Api::error(400, "bad-request", "ingest expects multipart/form-data", "/api/ingest"));
        return;
      }
      std::vector<UploadPart> parts;
      for (const auto& [name, file] : req.files) parts.push_back({name, file.filename, file.content});
      send(res, api_.ingest(parts));
    });
  }

  bool bind(const std::string& host, int port) { return http_.bind_to_port(host, port); }
  int bind_any(const std::string& host) { return http_.bind_to_any_port(host); }
  bool listen_after_bind() { return http_.listen_after_bind(); }
  void stop() { http_.stop(); }
  void wait_until_ready() { http_.wait_until_ready(); }

 private:
  static void send(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  }

  Api& api_;
  httplib::Server http_;
};

}  // namespace fiper
