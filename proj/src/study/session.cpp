#include "olab/study/session.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "olab/core/json_io.hpp"

namespace olab::study {

namespace {

constexpr std::array<std::pair<Phase, std::string_view>, 8> kPhaseNames{{
    {Phase::Statements, "statements"},
    {Phase::TutorialSolved, "tutorialSolved"},
    {Phase::TutorialFeedback, "tutorialFeedback"},
    {Phase::Practice, "practice"},
    {Phase::Evaluation, "evaluation"},
    {Phase::Pause, "pause"},
    {Phase::Questionnaire, "questionnaire"},
    {Phase::Done, "done"},
}};

bool hasDeadline(Phase phase) { return phase == Phase::Practice || phase == Phase::Evaluation; }
bool revealsTruth(Phase phase) { return phase == Phase::TutorialSolved || phase == Phase::TutorialFeedback; }

}  // namespace

std::string_view nameOf(Phase phase) {
    for (const auto& [p, name] : kPhaseNames) {
        if (p == phase) return name;
    }
    throw std::invalid_argument("unknown phase");
}

Phase phaseFromString(std::string_view name) {
    for (const auto& [p, n] : kPhaseNames) {
        if (n == name) return p;
    }
    throw std::invalid_argument("unknown phase: " + std::string(name));
}

nlohmann::json toJson(const TrialRecord& r) {
    nlohmann::json j{{"sessionId", r.sessionId},
                     {"subjectId", r.subjectId},
                     {"phase", nameOf(r.phase)},
                     {"trialIndex", r.trialIndex},
                     {"trialId", r.trialId},
                     {"entryId", r.entryId},
                     {"config", r.config},
                     {"answerPos", nullptr},
                     {"correct", nullptr},
                     {"rtMs", r.rtMs},
                     {"oot", r.oot},
                     {"servedAtMs", r.servedAtMs},
                     {"closedAtMs", r.closedAtMs},
                     {"clientTimestamps", r.clientTimestamps}};
    if (r.answerPos) j["answerPos"] = *r.answerPos;
    if (r.correct) j["correct"] = *r.correct;
    return j;
}

TrialRecord trialRecordFromJson(const nlohmann::json& j) {
    TrialRecord r;
    r.sessionId = j.value("sessionId", "");
    r.subjectId = j.at("subjectId").get<std::string>();
    r.phase = phaseFromString(j.at("phase").get<std::string>());
    r.trialIndex = j.at("trialIndex").get<int>();
    r.trialId = j.value("trialId", 0);
    r.entryId = j.at("entryId").get<std::string>();
    r.config = j.at("config").get<GridConfig>();
    if (j.contains("answerPos") && !j.at("answerPos").is_null()) r.answerPos = j.at("answerPos").get<int>();
    if (j.contains("correct") && !j.at("correct").is_null()) r.correct = j.at("correct").get<bool>();
    r.rtMs = j.at("rtMs").get<std::int64_t>();
    r.oot = j.at("oot").get<bool>();
    r.servedAtMs = j.value("servedAtMs", std::int64_t{0});
    r.closedAtMs = j.value("closedAtMs", std::int64_t{0});
    r.clientTimestamps = j.value("clientTimestamps", nlohmann::json::object());
    if (r.oot && r.answerPos) throw std::invalid_argument("record " + r.entryId + " is out of time but has an answer");
    return r;
}

void checkQuestionnaire(const Questionnaire& q) {
    std::set<OutlierType> seen;
    for (const auto& name : q.typeRanking) {
        try {
            seen.insert(outlierTypeFromString(name));
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("typeRanking has an unknown type: " + name);
        }
    }
    if (q.typeRanking.size() != kAllTypes.size() || seen.size() != kAllTypes.size()) {
        throw std::invalid_argument("typeRanking must list each of the 4 types exactly once");
    }
}

nlohmann::json toJson(const Questionnaire& q) {
    return {{"typeRanking", q.typeRanking},   {"easyColors", q.easyColors},
            {"hardColors", q.hardColors},     {"easyShapes", q.easyShapes},
            {"hardShapes", q.hardShapes},     {"hardCountsEstimate", q.hardCountsEstimate},
            {"strategy", q.strategy},         {"overallDifficulty", q.overallDifficulty}};
}

Questionnaire questionnaireFromJson(const nlohmann::json& j) {
    Questionnaire q;
    q.typeRanking = j.at("typeRanking").get<std::vector<std::string>>();
    q.easyColors = j.value("easyColors", "");
    q.hardColors = j.value("hardColors", "");
    q.easyShapes = j.value("easyShapes", "");
    q.hardShapes = j.value("hardShapes", "");
    q.hardCountsEstimate = j.value("hardCountsEstimate", "");
    q.strategy = j.value("strategy", "");
    q.overallDifficulty = j.value("overallDifficulty", "");
    return q;
}

Session::Session(std::string id, SubjectMeta meta, const reducer::TrialSet& trials, int orderShift, std::int64_t nowMs)
    : id_(std::move(id)), meta_(std::move(meta)), trials_(&trials), orderShift_(orderShift) {
    if (trials.trials.empty()) throw std::invalid_argument("trial set has no evaluation trials");
    if (orderShift < 0 || orderShift >= static_cast<int>(trials.trials.size())) {
        throw std::invalid_argument("orderShift out of range: " + std::to_string(orderShift));
    }
    emit("session_created", nowMs,
         {{"subjectId", meta_.subjectId},
          {"details", meta_.details},
          {"orderShift", orderShift_},
          {"orderSeed", trials.orderSeed},
          {"manifestHash", trials.manifestHash}});
}

std::vector<const gen::ManifestEntry*> Session::evaluationOrder() const {
    std::vector<const gen::ManifestEntry*> out;
    for (int k = 0; k < static_cast<int>(trials_->trials.size()); ++k) out.push_back(&entryAt(Phase::Evaluation, k));
    return out;
}

const std::vector<gen::ManifestEntry>* Session::phaseEntries(Phase phase) const {
    switch (phase) {
        case Phase::TutorialSolved: return &trials_->tutorialSolved;
        case Phase::TutorialFeedback: return &trials_->tutorialFeedback;
        case Phase::Practice: return &trials_->practice;
        case Phase::Evaluation: return &trials_->trials;
        default: return nullptr;
    }
}

const gen::ManifestEntry& Session::entryAt(Phase phase, int index) const {
    const auto& list = *phaseEntries(phase);
    if (phase == Phase::Evaluation) {
        const auto n = static_cast<int>(list.size());
        return list[static_cast<std::size_t>((index + orderShift_) % n)];
    }
    return list[static_cast<std::size_t>(index)];
}

void Session::emit(std::string type, std::int64_t nowMs, nlohmann::json fields) {
    fields["type"] = std::move(type);
    fields["sessionId"] = id_;
    fields["t"] = nowMs;
    events_.push_back(std::move(fields));
}

std::vector<nlohmann::json> Session::drainEvents() {
    std::vector<nlohmann::json> out;
    out.swap(events_);
    return out;
}

void Session::advancePhase(std::int64_t nowMs) {
    static constexpr std::array<Phase, 6> kOrder{Phase::Statements, Phase::TutorialSolved, Phase::TutorialFeedback,
                                                 Phase::Practice,   Phase::Evaluation,     Phase::Questionnaire};
    auto it = std::find(kOrder.begin(), kOrder.end(), phase_);
    if (it == kOrder.end()) throw std::logic_error("cannot advance from phase " + std::string(nameOf(phase_)));
    // Phases without entries are skipped.
    do {
        ++it;
    } while (it != kOrder.end() && phaseEntries(*it) && phaseEntries(*it)->empty());
    phase_ = it == kOrder.end() ? Phase::Done : *it;
    index_ = 0;
    emit("phase", nowMs, {{"phase", nameOf(phase_)}});
}

void Session::expire(std::int64_t nowMs) {
    if (outstanding_ && outstanding_->deadlineMs && nowMs > *outstanding_->deadlineMs) {
        close(std::nullopt, true, nlohmann::json::object(), *outstanding_->deadlineMs, nowMs);
    }
}

void Session::close(std::optional<int> answerPos, bool oot, const nlohmann::json& client, std::int64_t closedAtMs,
                    std::int64_t nowMs) {
    const TrialPayload t = *outstanding_;
    outstanding_.reset();
    TrialRecord r;
    r.sessionId = id_;
    r.subjectId = meta_.subjectId;
    r.phase = t.phase;
    r.trialIndex = t.trialIndex;
    r.trialId = t.trialId;
    r.entryId = t.entry->id;
    r.config = t.entry->config;
    r.oot = oot;
    if (!oot) {
        r.answerPos = answerPos;
        if (answerPos) r.correct = *answerPos == t.entry->groundTruth();
    }
    r.rtMs = closedAtMs - t.servedAtMs;
    r.servedAtMs = t.servedAtMs;
    r.closedAtMs = closedAtMs;
    r.clientTimestamps = client.is_null() ? nlohmann::json::object() : client;
    records_.push_back(r);
    closedIds_.push_back(t.trialId);
    lastClosedMs_ = closedAtMs;
    emit("record", nowMs, {{"record", toJson(r)}});

    ++index_;
    if (index_ >= t.phaseLength) {
        advancePhase(nowMs);
    } else if (t.phase == Phase::Evaluation && index_ == kPauseAfterTrial) {
        phase_ = Phase::Pause;
        pauseEndsMs_ = closedAtMs + kPauseMs;
        emit("pause_started", nowMs, {{"endsAtMs", pauseEndsMs_}});
    }
}

NextResult Session::next(std::int64_t nowMs) {
    NextResult out;
    expire(nowMs);
    if (phase_ == Phase::Statements) advancePhase(nowMs);
    if (phase_ == Phase::Pause) {
        if (nowMs < pauseEndsMs_) {
            out.kind = NextResult::Kind::Pause;
            out.pauseEndsMs = pauseEndsMs_;
            return out;
        }
        phase_ = Phase::Evaluation;
        emit("resumed", nowMs, {{"early", false}});
    }
    if (phase_ == Phase::Questionnaire) {
        out.kind = NextResult::Kind::Questionnaire;
        return out;
    }
    if (phase_ == Phase::Done) {
        out.kind = NextResult::Kind::Done;
        return out;
    }
    if (outstanding_) {
        out.kind = NextResult::Kind::Trial;
        out.trial = outstanding_;
        return out;
    }
    if (lastClosedMs_ && nowMs < *lastClosedMs_ + kInterTrialGapMs) {
        out.kind = NextResult::Kind::Wait;
        out.notBeforeMs = *lastClosedMs_ + kInterTrialGapMs;
        return out;
    }
    TrialPayload t;
    t.trialId = ++served_;
    t.phase = phase_;
    t.trialIndex = index_;
    t.phaseLength = static_cast<int>(phaseEntries(phase_)->size());
    t.entry = &entryAt(phase_, index_);
    t.servedAtMs = nowMs;
    if (hasDeadline(phase_)) t.deadlineMs = nowMs + kTrialDeadlineMs;
    if (phase_ == Phase::TutorialSolved) t.solution = t.entry->groundTruth();
    outstanding_ = t;
    emit("served", nowMs,
         {{"trialId", t.trialId}, {"phase", nameOf(t.phase)}, {"trialIndex", t.trialIndex}, {"entryId", t.entry->id}});
    out.kind = NextResult::Kind::Trial;
    out.trial = t;
    return out;
}

AnswerResult Session::answer(int trialId, std::optional<int> answerPos, const nlohmann::json& clientTimestamps,
                             std::int64_t nowMs) {
    AnswerResult out;
    if (answerPos && (*answerPos < 0 || *answerPos >= kGridCells)) {
        throw std::invalid_argument("answerPos out of range: " + std::to_string(*answerPos));
    }
    if (std::find(closedIds_.begin(), closedIds_.end(), trialId) != closedIds_.end()) {
        out.status = AnswerResult::Status::Duplicate;
        emit("duplicate", nowMs, {{"trialId", trialId}});
        return out;
    }
    if (!outstanding_ || outstanding_->trialId != trialId) {
        out.status = AnswerResult::Status::NoTrial;
        return out;
    }
    const Phase phase = outstanding_->phase;
    const int truth = outstanding_->entry->groundTruth();
    if (outstanding_->deadlineMs && nowMs > *outstanding_->deadlineMs) {
        close(std::nullopt, true, clientTimestamps, *outstanding_->deadlineMs, nowMs);
    } else {
        if (!answerPos && phase != Phase::TutorialSolved) throw std::invalid_argument("answerPos is required");
        close(answerPos, false, clientTimestamps, nowMs, nowMs);
    }
    out.status = AnswerResult::Status::Recorded;
    out.record = records_.back();
    if (revealsTruth(phase)) out.truth = truth;
    return out;
}

bool Session::resume(std::int64_t nowMs) {
    if (phase_ != Phase::Pause) return false;
    phase_ = Phase::Evaluation;
    emit("resumed", nowMs, {{"early", nowMs < pauseEndsMs_}});
    return true;
}

void Session::submitQuestionnaire(const Questionnaire& q, std::int64_t nowMs) {
    if (phase_ != Phase::Questionnaire) {
        throw std::logic_error("questionnaire not expected in phase " + std::string(nameOf(phase_)));
    }
    checkQuestionnaire(q);
    questionnaire_ = q;
    emit("questionnaire", nowMs, {{"questionnaire", toJson(q)}});
    advancePhase(nowMs);
}

}  // namespace olab::study
