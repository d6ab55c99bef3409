#include "gtseq/session.hpp"

#include <httplib.h>

#include "gtseq/estimation.hpp"
#include "gtseq/io.hpp"

namespace gtseq {

std::string SessionRegistry::create(const SequentialConfig& cfg)
{
    validate(cfg);
    auto session = std::make_shared<Session>();
    session->cfg = cfg;
    session->state = initial_state();
    std::unique_lock lock(mutex_);
    std::string id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, std::move(session));
    return id;
}

std::shared_ptr<SessionRegistry::Session> SessionRegistry::find(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw SessionNotFound("no session '" + id + "'");
    }
    return it->second;
}

SequentialState SessionRegistry::record(const std::string& id, bool positive)
{
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    session->state = advance(session->state, positive, session->cfg);
    return session->state;
}

SequentialState SessionRegistry::state(const std::string& id) const
{
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    return session->state;
}

SequentialConfig SessionRegistry::config(const std::string& id) const
{
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    return session->cfg;
}

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, const std::string& message)
{
    reply(res, status, json{{"error", message}});
}

// Maps library exceptions onto HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& f)
{
    try {
        f();
    } catch (const SessionNotFound& e) {
        error(res, 404, e.what());
    } catch (const ContractError& e) {
        error(res, 409, e.what());
    } catch (const json::exception& e) {
        error(res, 400, std::string("bad request body: ") + e.what());
    } catch (const std::invalid_argument& e) {
        error(res, 400, e.what());
    } catch (const std::out_of_range& e) {
        error(res, 400, e.what());
    } catch (const std::exception& e) {
        error(res, 400, e.what());
    }
}

double query_double(const httplib::Request& req, const char* key, double fallback)
{
    if (!req.has_param(key)) {
        return fallback;
    }
    std::size_t used = 0;
    const std::string raw = req.get_param_value(key);
    const double v = std::stod(raw, &used);
    if (used != raw.size()) {
        throw DomainError(std::string("query parameter ") + key + " is not a number");
    }
    return v;
}

}  // namespace

void register_routes(httplib::Server& server, SessionRegistry& registry)
{
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
    });

    server.Post("/session", [&registry](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = req.body.empty() ? json::object() : json::parse(req.body);
            const DesignParams d(body.value("alpha", 0.05), body.value("gamma", 0.1));
            SequentialConfig cfg{body.value("k", 2), body.value("m", 1LL), d,
                                 body.value("n_max", 1'000'000LL)};
            reply(res, 201, json{{"id", registry.create(cfg)}});
        });
    });

    server.Post(R"(/session/([^/]+)/result)",
                [&registry](const httplib::Request& req, httplib::Response& res) {
                    guarded(res, [&] {
                        const json body = json::parse(req.body);
                        const bool positive = body.at("positive").get<bool>();
                        reply(res, 200, json(registry.record(req.matches[1], positive)));
                    });
                });

    server.Get(R"(/session/([^/]+))", [&registry](const httplib::Request& req,
                                                   httplib::Response& res) {
        guarded(res, [&] { reply(res, 200, json(registry.state(req.matches[1]))); });
    });

    server.Get("/design", [](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            if (!req.has_param("p")) {
                throw DomainError("query parameter p is required");
            }
            const double p = query_double(req, "p", 0.0);
            if (!(p > 0.0 && p < 1.0)) {
                throw DomainError("p must lie in (0,1)");
            }
            const DesignParams d(query_double(req, "alpha", 0.05), query_double(req, "gamma", 0.1));
            const std::string k = req.has_param("k") ? req.get_param_value("k") : "auto";
            const GroupPlan plan = k == "auto" ? optimal_group_size(p, d)
                                               : n_star_group(p, std::stoi(k), d);
            reply(res, 200, json(plan));
        });
    });
}

}  // namespace gtseq
