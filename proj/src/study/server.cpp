#include "olab/study/server.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

#include "olab/core/random.hpp"
#include "olab/generator/dataset.hpp"
#include "olab/generator/render.hpp"

namespace olab::study {

namespace {

constexpr const char* kStatements =
    "Each trial shows an 8x8 grid of colored shapes. Exactly one item is unlike all the others. "
    "Click it as quickly and accurately as you can. Trials time out after 30 seconds.";

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

Reply jsonReply(int status, const nlohmann::json& body) { return {status, body.dump(), "application/json"}; }
Reply errorReply(int status, const std::string& message) { return jsonReply(status, {{"error", message}}); }

nlohmann::json parseBody(const std::string& body) {
    if (body.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw std::invalid_argument("request body is not a JSON object");
    return j;
}

}  // namespace

std::int64_t steadyNowMs() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

PngProvider renderedPngs() {
    return [](const gen::ManifestEntry& e) { return gen::encodePng(gen::renderGrid(gen::entryGrid(e))); };
}

PngProvider directoryPngs(const std::filesystem::path& dir) {
    return [dir](const gen::ManifestEntry& e) {
        std::ifstream in(dir / e.imagePath, std::ios::binary);
        if (!in) throw std::runtime_error("image for entry " + e.id + " not found");
        return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
    };
}

StudyServer::StudyServer(reducer::TrialSet trials, ServerOptions options)
    : trials_(std::move(trials)), options_(std::move(options)) {
    if (trials_.trials.empty()) throw std::invalid_argument("trial set has no evaluation trials");
    if (!options_.clock) options_.clock = steadyNowMs;
    if (!options_.sleep) {
        options_.sleep = [](std::int64_t ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
    }
    if (!options_.images) options_.images = renderedPngs();
    if (options_.logDir) log_ = std::make_unique<EventLog>(*options_.logDir);
    for (const auto* list : {&trials_.tutorialSolved, &trials_.tutorialFeedback, &trials_.practice, &trials_.trials}) {
        for (const auto& e : *list) images_[imageIdOf(e)] = &e;
    }
}

StudyServer::~StudyServer() { stop(); }

std::string StudyServer::imageIdOf(const gen::ManifestEntry& entry) const {
    return hex64(deriveSeed(deriveSeed(options_.seed, "image-secret"), entry.id));
}

int StudyServer::orderShiftFor(const std::string& sessionId) const {
    Engine rng(deriveSeed(options_.seed, "order-shift:" + sessionId));
    return static_cast<int>(uniformBelow(rng, trials_.trials.size()));
}

StudyServer::Slot* StudyServer::find(const std::string& id) {
    const std::shared_lock lock(sessionsMutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second.get();
}

void StudyServer::persist(Session& session) {
    auto events = session.drainEvents();
    for (auto& e : events) {
        if (e.at("type") == "session_created") e["configHash"] = options_.configHash;
    }
    if (log_) log_->append(session.id(), events);
}

std::vector<TrialRecord> StudyServer::liveRecords() const {
    std::vector<TrialRecord> out;
    const std::shared_lock lock(sessionsMutex_);
    for (const auto& [id, slot] : sessions_) {
        const std::lock_guard guard(slot->mutex);
        const auto& r = slot->session->records();
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

nlohmann::json StudyServer::trialPayload(const TrialPayload& t) const {
    const auto id = imageIdOf(*t.entry);
    nlohmann::json j{{"kind", "trial"},
                     {"trialId", t.trialId},
                     {"phase", nameOf(t.phase)},
                     {"trialIndex", t.trialIndex},
                     {"phaseLength", t.phaseLength},
                     {"imageId", id},
                     {"imageUrl", "/images/" + id + ".png"},
                     {"deadlineMs", nullptr}};
    if (t.deadlineMs) j["deadlineMs"] = *t.deadlineMs - t.servedAtMs;
    if (t.solution) j["solution"] = *t.solution;
    return j;
}

Reply StudyServer::handleCreate(const std::string& body) {
    try {
        const auto j = parseBody(body);
        SubjectMeta meta;
        meta.details = j.value("meta", nlohmann::json::object());
        std::string id;
        {
            const std::unique_lock lock(sessionsMutex_);
            id = hex64(deriveSeed(options_.seed, ++created_));
        }
        meta.subjectId = j.value("subjectId", id);
        auto slot = std::make_unique<Slot>();
        slot->session = std::make_unique<Session>(id, meta, trials_, orderShiftFor(id), options_.clock());
        persist(*slot->session);
        {
            const std::unique_lock lock(sessionsMutex_);
            sessions_[id] = std::move(slot);
        }
        return jsonReply(201, {{"sessionId", id},
                               {"subjectId", meta.subjectId},
                               {"phase", nameOf(Phase::Statements)},
                               {"statements", kStatements},
                               {"evaluationTrials", trials_.trials.size()},
                               {"practiceTrials", trials_.practice.size()}});
    } catch (const std::invalid_argument& e) {
        return errorReply(400, e.what());
    }
}

Reply StudyServer::handleNext(const std::string& sessionId) {
    Slot* slot = find(sessionId);
    if (!slot) return errorReply(404, "unknown session");
    for (;;) {
        NextResult r;
        {
            const std::lock_guard lock(slot->mutex);
            r = slot->session->next(options_.clock());
            persist(*slot->session);
        }
        switch (r.kind) {
            case NextResult::Kind::Wait: {
                const auto wait = r.notBeforeMs - options_.clock();
                if (wait > 0) options_.sleep(wait);
                continue;
            }
            case NextResult::Kind::Trial: return jsonReply(200, trialPayload(*r.trial));
            case NextResult::Kind::Pause:
                return jsonReply(200, {{"kind", "pause"}, {"remainingMs", r.pauseEndsMs - options_.clock()}});
            case NextResult::Kind::Questionnaire: return jsonReply(200, {{"kind", "questionnaire"}});
            case NextResult::Kind::Done: return jsonReply(200, {{"kind", "done"}});
        }
    }
}

Reply StudyServer::handleAnswer(const std::string& sessionId, const std::string& body) {
    Slot* slot = find(sessionId);
    if (!slot) return errorReply(404, "unknown session");
    try {
        const auto j = parseBody(body);
        if (!j.contains("trialId")) throw std::invalid_argument("trialId is required");
        std::optional<int> pos;
        if (j.contains("answerPos") && !j.at("answerPos").is_null()) pos = j.at("answerPos").get<int>();
        const auto client = j.value("clientTimestamps", nlohmann::json::object());
        AnswerResult r;
        {
            const std::lock_guard lock(slot->mutex);
            const auto now = options_.clock();
            try {
                r = slot->session->answer(j.at("trialId").get<int>(), pos, client, now);
            } catch (...) {
                persist(*slot->session);
                throw;
            }
            persist(*slot->session);
        }
        if (r.status == AnswerResult::Status::Duplicate) return errorReply(409, "duplicate submission; first answer kept");
        if (r.status == AnswerResult::Status::NoTrial) return errorReply(409, "no such outstanding trial");
        nlohmann::json out{{"status", "recorded"}, {"oot", r.record->oot}, {"rtMs", r.record->rtMs}};
        // Correctness is revealed only where the protocol gives feedback.
        if (r.truth) {
            out["truth"] = *r.truth;
            if (r.record->correct) out["correct"] = *r.record->correct;
        }
        return jsonReply(200, out);
    } catch (const nlohmann::json::exception& e) {
        return errorReply(400, e.what());
    } catch (const std::invalid_argument& e) {
        return errorReply(400, e.what());
    }
}

Reply StudyServer::handleResume(const std::string& sessionId) {
    Slot* slot = find(sessionId);
    if (!slot) return errorReply(404, "unknown session");
    const std::lock_guard lock(slot->mutex);
    const bool resumed = slot->session->resume(options_.clock());
    persist(*slot->session);
    if (!resumed) return errorReply(409, "session is not paused");
    return jsonReply(200, {{"phase", nameOf(slot->session->phase())}});
}

Reply StudyServer::handleQuestionnaire(const std::string& sessionId, const std::string& body) {
    Slot* slot = find(sessionId);
    if (!slot) return errorReply(404, "unknown session");
    try {
        const auto q = questionnaireFromJson(parseBody(body));
        const std::lock_guard lock(slot->mutex);
        slot->session->submitQuestionnaire(q, options_.clock());
        persist(*slot->session);
        return jsonReply(200, {{"phase", nameOf(slot->session->phase())}});
    } catch (const std::logic_error& e) {
        // invalid_argument derives from logic_error; keep them apart.
        if (dynamic_cast<const std::invalid_argument*>(&e)) return errorReply(400, e.what());
        return errorReply(409, e.what());
    } catch (const nlohmann::json::exception& e) {
        return errorReply(400, e.what());
    }
}

Reply StudyServer::handleExport(const std::string& authorization) {
    if (options_.operatorToken.empty() || authorization != "Bearer " + options_.operatorToken) {
        return errorReply(401, "operator token required");
    }
    std::ostringstream out;
    writeRecordsJsonl(log_ ? loadRecords(log_->dir()) : liveRecords(), out);
    return {200, out.str(), "application/x-ndjson"};
}

Reply StudyServer::handleImage(const std::string& imageId) {
    auto it = images_.find(imageId);
    if (it == images_.end()) return errorReply(404, "unknown image");
    const auto png = options_.images(*it->second);
    return {200, std::string(png.begin(), png.end()), "image/png"};
}

void StudyServer::bindRoutes() {
    auto& s = *http_;
    auto send = [](httplib::Response& res, const Reply& r) {
        res.status = r.status;
        res.set_content(r.body, r.contentType);
    };
    s.Post("/sessions", [this, send](const httplib::Request& req, httplib::Response& res) { send(res, handleCreate(req.body)); });
    s.Get(R"(/sessions/([0-9a-f]+)/next)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handleNext(req.matches[1]));
    });
    s.Post(R"(/sessions/([0-9a-f]+)/answer)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handleAnswer(req.matches[1], req.body));
    });
    s.Post(R"(/sessions/([0-9a-f]+)/resume)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handleResume(req.matches[1]));
    });
    s.Post(R"(/sessions/([0-9a-f]+)/questionnaire)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handleQuestionnaire(req.matches[1], req.body));
    });
    s.Get("/export/records.jsonl", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handleExport(req.get_header_value("Authorization")));
    });
    s.Get(R"(/images/([0-9a-f]+)\.png)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handleImage(req.matches[1]));
    });
}

int StudyServer::start(const std::string& host, int port) {
    if (http_) throw std::logic_error("server already started");
    http_ = std::make_unique<httplib::Server>();
    bindRoutes();
    const int bound = port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::make_unique<std::thread>([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    return bound;
}

void StudyServer::listen(const std::string& host, int port) {
    if (http_) throw std::logic_error("server already started");
    http_ = std::make_unique<httplib::Server>();
    bindRoutes();
    if (!http_->listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void StudyServer::stop() {
    if (http_) http_->stop();
    if (thread_ && thread_->joinable()) thread_->join();
    thread_.reset();
}

}  // namespace olab::study
