#include "mapcolor/service.hpp"

#include <httplib.h>

#include <condition_variable>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <unordered_map>

namespace mapcolor {

using nlohmann::json;

namespace {

// First-come, first-served mutual exclusion for one session.
class TicketLock {
 public:
  void lock() {
    std::unique_lock l(mu_);
    const auto ticket = next_++;
    cv_.wait(l, [&] { return serving_ == ticket; });
  }
  void unlock() {
    {
      std::lock_guard l(mu_);
      ++serving_;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t next_ = 0;
  std::uint64_t serving_ = 0;
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadRequest, std::string("request body is not JSON: ") + e.what());
  }
}

json require_object(const json& body) {
  if (!body.is_object()) throw Error(Errc::BadRequest, "request body must be a JSON object");
  return body;
}

json classification_json(const Session& s) {
  const auto& c = *s.classification;
  return json{{"k", c.k},
              {"selected", method_token(c.selected)},
              {"results", c.ranked},
              {"notes", c.notes},
              {"analysis", s.analysis ? json(*s.analysis) : json(nullptr)},
              {"scheme_type", s.scheme_type ? json(scheme_type_token(*s.scheme_type)) : json(nullptr)}};
}

json scheme_json(const Session& s) {
  return json{{"scheme", displayed_scheme(s)},
              {"generated", *s.scheme},
              {"match", s.match ? json(*s.match) : json(nullptr)},
              {"lint", s.lint ? json(*s.lint) : json(nullptr)},
              {"active", active_scheme_token(s.active_scheme)},
              {"warnings", s.warnings}};
}

json stage_json(const Session& s) {
  json out{{"concept", s.color_concept ? json(*s.color_concept) : json(nullptr)}, {"scheme", nullptr}};
  if (s.scheme) out["scheme"] = scheme_json(s);
  return out;
}

}  // namespace

int http_status(Errc code) {
  switch (code) {
    case Errc::MalformedInput:
    case Errc::MissingField:
    case Errc::DataInvalid:
    case Errc::InvalidGeoJSON:
    case Errc::DegenerateData:
    case Errc::BadK:
    case Errc::TieCollapse:
    case Errc::TooFewValues:
    case Errc::ValueOutOfRange:
    case Errc::BadHex:
    case Errc::LengthMismatch:
    case Errc::PatchOutOfRange:
    case Errc::BadRequest:
      return 400;
    case Errc::SessionNotFound:
    case Errc::NotFound:
      return 404;
    case Errc::StageIncomplete:
      return 409;
    case Errc::PayloadTooLarge:
      return 413;
    case Errc::AllMethodsFailed:
    case Errc::NoCandidates:
    case Errc::UnparseableResponse:
    case Errc::BadSchemeType:
    case Errc::WrongColorCount:
    case Errc::ConceptInvalid:
      return 422;
    case Errc::AuthFailure:
    case Errc::RateLimited:
    case Errc::ProviderError:
    case Errc::FixtureMiss:
      return 502;
    case Errc::Timeout:
      return 504;
    case Errc::CorruptPaletteFile:
    case Errc::Internal:
      return 500;
  }
  return 500;
}

json error_body(Errc code, const std::string& message, const json& details) {
  return json{{"error", {{"code", token(code)}, {"message", message}, {"details", details}}}};
}

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig cfg;
  if (auto v = env("MAPCOLOR_HOST")) cfg.host = *v;
  try {
    if (auto v = env("MAPCOLOR_PORT")) cfg.port = std::stoi(*v);
    if (auto v = env("MAPCOLOR_MAX_BODY_MB")) cfg.max_body_bytes = std::stoul(*v) * 1024u * 1024u;
  } catch (const std::logic_error&) {
    throw Error(Errc::BadRequest, "MAPCOLOR_PORT and MAPCOLOR_MAX_BODY_MB must be integers");
  }
  if (auto v = env("MAPCOLOR_SESSION_DIR")) cfg.session_dir = *v;
  if (auto v = env("MAPCOLOR_OFFLINE")) cfg.offline = *v != "0" && *v != "false";
  if (auto v = env("MAPCOLOR_FIXTURE_DIR")) cfg.fixture_dir = *v;
  cfg.provider = ProviderConfig::from_env();
  return cfg;
}

struct Service::State {
  ServiceConfig cfg;
  std::shared_ptr<SessionStore> store;
  std::unique_ptr<Designer> designer;
  std::mutex locks_mu;
  std::unordered_map<std::string, std::shared_ptr<TicketLock>> locks;
  std::mutex log_mu;

  std::shared_ptr<TicketLock> lock_for(const std::string& id) {
    std::lock_guard l(locks_mu);
    auto& slot = locks[id];
    if (!slot) slot = std::make_shared<TicketLock>();
    return slot;
  }

  Session load(const std::string& id) const {
    auto doc = store->get(id);
    if (!doc) throw Error(Errc::SessionNotFound, "no session " + id, {{"session_id", id}});
    return json::parse(*doc).get<Session>();
  }

  // Serialized read-modify-write of one session.
  template <typename Fn>
  json mutate(const std::string& id, Fn fn) {
    auto lock = lock_for(id);
    std::lock_guard guard(*lock);
    Session s = load(id);
    json out = fn(s);
    store->put(id, json(s).dump());
    return out;
  }
};

Service::Service(ServiceConfig cfg) : Service(cfg, nullptr, nullptr) {}

Service::Service(ServiceConfig cfg, std::shared_ptr<LlmBackend> backend, std::shared_ptr<SessionStore> store)
    : state_(std::make_unique<State>()), server_(std::make_unique<httplib::Server>()) {
  if (!backend) {
    if (cfg.offline) {
      backend = std::make_shared<FixtureBackend>(cfg.fixture_dir);
    } else {
      backend = std::make_shared<HttpBackend>();
    }
  }
  if (!store) {
    if (cfg.session_dir) {
      store = std::make_shared<FileSessionStore>(*cfg.session_dir);
    } else {
      store = std::make_shared<MemorySessionStore>();
    }
  }
  auto palettes = std::make_shared<const PaletteDB>(PaletteDB::load(default_data_dir() / "colorbrewer.json"));
  auto gateway = std::make_shared<Gateway>(cfg.provider, std::move(backend));
  state_->designer = std::make_unique<Designer>(std::move(gateway), std::move(palettes));
  state_->store = std::move(store);
  state_->cfg = std::move(cfg);
  install_routes();
}

Service::~Service() { stop(); }

void Service::install_routes() {
  auto& svr = *server_;
  State& st = *state_;
  const int threads = st.cfg.worker_threads;
  svr.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
  svr.set_payload_max_length(st.cfg.max_body_bytes);

  svr.set_error_handler([&st](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const Errc code = res.status == 413 ? Errc::PayloadTooLarge
                      : res.status == 404 ? Errc::NotFound
                      : res.status >= 500 ? Errc::Internal
                                          : Errc::BadRequest;
    const std::string message = res.status == 413
                                    ? "request body exceeds " + std::to_string(st.cfg.max_body_bytes) + " bytes"
                                    : std::string(httplib::status_message(res.status));
    res.set_content(error_body(code, message).dump(), "application/json");
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    res.status = 500;
    res.set_content(error_body(Errc::Internal, "internal error").dump(), "application/json");
  });
  svr.set_logger([&st](const httplib::Request& req, const httplib::Response& res) {
    if (!st.cfg.log_requests) return;
    const json line{{"method", req.method}, {"path", req.path}, {"status", res.status}};
    std::lock_guard l(st.log_mu);
    std::cout << line.dump() << std::endl;
  });

  using Handler = std::function<json(const httplib::Request&, httplib::Response&)>;
  auto wrap = [](Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        res.status = 200;
        body = h(req, res);
      } catch (const Error& e) {
        res.status = http_status(e.code());
        body = error_body(e.code(), e.what(), e.details());
        if (e.code() == Errc::RateLimited && e.details().contains("retry_after") &&
            e.details()["retry_after"].is_string()) {
          res.set_header("Retry-After", e.details()["retry_after"].get<std::string>());
        }
      } catch (const json::exception& e) {
        res.status = 400;
        body = error_body(Errc::BadRequest, std::string("malformed request: ") + e.what());
      } catch (const std::exception&) {
        res.status = 500;
        body = error_body(Errc::Internal, "internal error");
      }
      res.set_content(body.dump(), "application/json");
    };
  };
  const Designer& d = *st.designer;
  const std::string sid = "/sessions/([^/]+)";

  svr.Post("/sessions", wrap([&st](const httplib::Request&, httplib::Response& res) {
             Session s;
             s.id = new_session_id();
             st.store->put(s.id, json(s).dump());
             res.status = 201;
             return json{{"session_id", s.id}};
           }));

  svr.Get(sid, wrap([&st](const httplib::Request& req, httplib::Response&) {
            return json(st.load(req.matches[1]));
          }));

  svr.Post(sid + "/data", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
             const json body = require_object(parse_body(req));
             if (!body.contains("dataset")) throw Error(Errc::BadRequest, "body needs \"dataset\"");
             if (!body.contains("value_field") || !body["value_field"].is_string()) {
               throw Error(Errc::BadRequest, "body needs a \"value_field\" string");
             }
             const auto& ds = body["dataset"];
             const std::string text = ds.is_string() ? ds.get<std::string>() : ds.dump();
             std::optional<json> geo;
             if (auto it = body.find("geojson"); it != body.end() && !it->is_null()) geo = *it;
             const std::string name_property = body.value("name_property", "name");
             return st.mutate(req.matches[1], [&](Session& s) {
               const auto r = d.upload(s, text, body["value_field"].get<std::string>(), geo, name_property);
               return json{{"report", r.report},
                           {"summary", r.summary},
                           {"join", r.join ? json(*r.join) : json(nullptr)}};
             });
           }));

  svr.Post(sid + "/classify", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
             const json body = require_object(parse_body(req));
             if (!body.contains("k") || !body["k"].is_number_integer()) {
               throw Error(Errc::BadRequest, "body needs an integer \"k\"");
             }
             return st.mutate(req.matches[1], [&](Session& s) {
               d.run_stage1(s, body["k"].get<int>());
               return classification_json(s);
             });
           }));

  svr.Patch(sid + "/classify", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
              const json body = require_object(parse_body(req));
              return st.mutate(req.matches[1], [&](Session& s) {
                if (auto it = body.find("method"); it != body.end()) {
                  const auto m = it->is_string() ? parse_method(it->get<std::string>()) : std::nullopt;
                  if (!m) throw Error(Errc::BadRequest, "unknown method " + it->dump());
                  d.select_method(s, *m);
                }
                if (auto it = body.find("scheme_type"); it != body.end()) {
                  const auto t = it->is_string() ? parse_scheme_type(it->get<std::string>()) : std::nullopt;
                  if (!t) throw Error(Errc::BadSchemeType, "unknown scheme type " + it->dump());
                  d.set_scheme_type(s, *t);
                }
                if (!s.classification) throw Error(Errc::StageIncomplete, "classify the data first");
                return classification_json(s);
              });
            }));

  svr.Post(sid + "/concept", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
             const json body = require_object(parse_body(req));
             if (!body.contains("intent") || !body["intent"].is_string()) {
               throw Error(Errc::BadRequest, "body needs an \"intent\" string");
             }
             return st.mutate(req.matches[1], [&](Session& s) {
               d.run_stage2(s, body["intent"].get<std::string>());
               return stage_json(s);
             });
           }));

  svr.Patch(sid + "/concept", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
              const json body = require_object(parse_body(req));
              const ConceptPatch patch = concept_patch_from_json(body);
              return st.mutate(req.matches[1], [&](Session& s) {
                d.apply_patch(s, patch);
                return stage_json(s);
              });
            }));

  svr.Post(sid + "/scheme", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
             return st.mutate(req.matches[1], [&](Session& s) {
               d.run_stage3(s);
               return scheme_json(s);
             });
           }));

  svr.Patch(sid + "/scheme", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
              const json body = require_object(parse_body(req));
              return st.mutate(req.matches[1], [&](Session& s) {
                if (!s.scheme) throw Error(Errc::StageIncomplete, "no colour scheme yet");
                if (body.contains("index") || body.contains("color")) {
                  if (!body.value("index", json()).is_number_integer() || !body.value("color", json()).is_string()) {
                    throw Error(Errc::BadRequest, "a direct edit needs an integer \"index\" and a \"color\"");
                  }
                  d.apply_patch(s, DirectEdit{body["index"].get<int>(), parse_hex(body["color"].get<std::string>())});
                } else {
                  const auto patch = scheme_patch_from_json(body, s.scheme->k());
                  if (patch.empty()) throw Error(Errc::BadRequest, "the patch changes nothing");
                  d.apply_patch(s, patch);
                }
                return scheme_json(s);
              });
            }));

  svr.Post(sid + "/scheme/active", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
             const json body = require_object(parse_body(req));
             const auto a = body.value("active", json()).is_string()
                                ? parse_active_scheme(body["active"].get<std::string>())
                                : std::nullopt;
             if (!a) throw Error(Errc::BadRequest, "\"active\" must be Generated or Matched");
             return st.mutate(req.matches[1], [&](Session& s) {
               d.set_active(s, *a);
               return scheme_json(s);
             });
           }));

  svr.Post(sid + "/chat", wrap([&st, &d](const httplib::Request& req, httplib::Response&) {
             const json body = require_object(parse_body(req));
             if (!body.value("utterance", json()).is_string()) {
               throw Error(Errc::BadRequest, "body needs an \"utterance\" string");
             }
             const auto utterance = body["utterance"].get<std::string>();
             if (trim(utterance).empty()) throw Error(Errc::BadRequest, "utterance must not be empty");
             return st.mutate(req.matches[1], [&](Session& s) {
               const auto outcome = d.chat(s, utterance);
               json out = stage_json(s);
               out["effect"] = chat_effect_token(outcome.effect);
               out["reply"] = outcome.reply;
               return out;
             });
           }));

  svr.Get(sid + "/map", wrap([&st](const httplib::Request& req, httplib::Response&) {
            return json(render_styled_map(st.load(req.matches[1])));
          }));

  svr.Get(sid + "/export", wrap([&st](const httplib::Request& req, httplib::Response&) {
            return export_bundle(st.load(req.matches[1]));
          }));
}

int Service::bind() {
  const auto& cfg = state_->cfg;
  const int port = cfg.port == 0 ? server_->bind_to_any_port(cfg.host) : (server_->bind_to_port(cfg.host, cfg.port)
                                                                             ? cfg.port
                                                                             : -1);
  if (port < 0) throw Error(Errc::Internal, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  return port;
}

int Service::start() {
  const int port = bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Service::run() {
  bind();
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mapcolor
