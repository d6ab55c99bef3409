#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>

#include "gtseq/sequential.hpp"

namespace httplib {
class Server;
}

namespace gtseq {

class SessionNotFound : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Live sequential studies held in memory and keyed by id. Each session is
/// mutated under its own lock; the map is only locked to look one up.
class SessionRegistry {
public:
    std::string create(const SequentialConfig& cfg);
    /// Throws SessionNotFound, or ContractError when the session has stopped.
    SequentialState record(const std::string& id, bool positive);
    SequentialState state(const std::string& id) const;
    SequentialConfig config(const std::string& id) const;

private:
    struct Session {
        SequentialConfig cfg;
        SequentialState state;
        mutable std::mutex mutex;
    };

    std::shared_ptr<Session> find(const std::string& id) const;

    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    unsigned long long next_id_ = 1;
};

/// Registers the JSON endpoints on server:
///   POST /session              {alpha, gamma, k, m[, n_max]} -> {id}
///   POST /session/{id}/result  {positive}                   -> state
///   GET  /session/{id}                                       -> state
///   GET  /design?p=&gamma=&alpha=&k=                         -> {k, n_required, n_ceil}
void register_routes(httplib::Server& server, SessionRegistry& registry);

}  // namespace gtseq
