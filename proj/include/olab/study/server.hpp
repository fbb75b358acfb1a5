#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <thread>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/study/analysis.hpp"
#include "olab/study/session.hpp"

namespace httplib {
class Server;
}

namespace olab::study {

using Clock = std::function<std::int64_t()>;
using Sleeper = std::function<void(std::int64_t ms)>;
using PngProvider = std::function<std::vector<std::uint8_t>(const gen::ManifestEntry&)>;

/// Milliseconds on the process steady clock.
std::int64_t steadyNowMs();
/// Renders the entry's grid to PNG bytes.
PngProvider renderedPngs();
/// Reads `dir / entry.imagePath`.
PngProvider directoryPngs(const std::filesystem::path& dir);

struct ServerOptions {
    std::uint64_t seed = 1;
    std::string operatorToken;  ///< required by the export endpoint; empty disables it
    std::optional<std::filesystem::path> logDir;
    std::string configHash;  ///< stamped into every session log
    Clock clock = steadyNowMs;
    Sleeper sleep;  ///< defaults to a real sleep
    PngProvider images = renderedPngs();
};

struct Reply {
    int status = 200;
    std::string body;
    std::string contentType = "application/json";

    nlohmann::json json() const { return nlohmann::json::parse(body); }
};

/// Study backend. The handle* methods implement the HTTP endpoints and can be
/// driven directly; listen() binds them to cpp-httplib routes.
class StudyServer {
public:
    StudyServer(reducer::TrialSet trials, ServerOptions options);
    ~StudyServer();
    StudyServer(const StudyServer&) = delete;
    StudyServer& operator=(const StudyServer&) = delete;

    Reply handleCreate(const std::string& body);
    /// Holds the caller until the inter-trial gap has elapsed.
    Reply handleNext(const std::string& sessionId);
    Reply handleAnswer(const std::string& sessionId, const std::string& body);
    Reply handleResume(const std::string& sessionId);
    Reply handleQuestionnaire(const std::string& sessionId, const std::string& body);
    Reply handleExport(const std::string& authorization);
    Reply handleImage(const std::string& imageId);

    /// Opaque id under which an entry's PNG is served.
    std::string imageIdOf(const gen::ManifestEntry& entry) const;
    /// Order shift for a session id; exposed for the uniformity check.
    int orderShiftFor(const std::string& sessionId) const;
    /// Snapshot of the records of every live session.
    std::vector<TrialRecord> liveRecords() const;

    /// Binds routes and listens on host:port (0 = any free port); returns the
    /// port. Serving runs on a background thread until stop().
    int start(const std::string& host, int port);
    /// Binds and serves on the calling thread.
    void listen(const std::string& host, int port);
    void stop();

private:
    struct Slot {
        std::mutex mutex;
        std::unique_ptr<Session> session;
    };
    Slot* find(const std::string& id);
    void persist(Session& session);
    nlohmann::json trialPayload(const TrialPayload& t) const;
    void bindRoutes();

    reducer::TrialSet trials_;
    ServerOptions options_;
    std::unique_ptr<EventLog> log_;
    std::map<std::string, const gen::ManifestEntry*> images_;
    mutable std::shared_mutex sessionsMutex_;
    std::map<std::string, std::unique_ptr<Slot>> sessions_;
    std::uint64_t created_ = 0;
    std::unique_ptr<httplib::Server> http_;
    std::unique_ptr<std::thread> thread_;
};

}  // namespace olab::study
