#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/reducer/reducer.hpp"

namespace olab::study {

enum class Phase { Statements, TutorialSolved, TutorialFeedback, Practice, Evaluation, Pause, Questionnaire, Done };
std::string_view nameOf(Phase phase);
Phase phaseFromString(std::string_view name);

inline constexpr std::int64_t kInterTrialGapMs = 3000;
inline constexpr std::int64_t kTrialDeadlineMs = 30000;
inline constexpr std::int64_t kPauseMs = 60000;
inline constexpr int kPauseAfterTrial = 26;

struct SubjectMeta {
    std::string subjectId;
    nlohmann::json details = nlohmann::json::object();  ///< age, vision, ...; stored, never analysed
};

struct TrialRecord {
    std::string sessionId;
    std::string subjectId;
    Phase phase = Phase::Evaluation;
    int trialIndex = 0;  ///< index within the phase
    int trialId = 0;     ///< session-wide serve counter
    std::string entryId;
    GridConfig config;
    std::optional<int> answerPos;
    std::optional<bool> correct;
    std::int64_t rtMs = 0;
    bool oot = false;
    std::int64_t servedAtMs = 0;
    std::int64_t closedAtMs = 0;
    nlohmann::json clientTimestamps = nlohmann::json::object();

    bool analysed() const { return phase == Phase::Evaluation; }
};

nlohmann::json toJson(const TrialRecord& r);
TrialRecord trialRecordFromJson(const nlohmann::json& j);

struct Questionnaire {
    std::vector<std::string> typeRanking;  ///< easiest to hardest, all 4 type names
    std::string easyColors, hardColors, easyShapes, hardShapes;
    std::string hardCountsEstimate, strategy, overallDifficulty;
};

/// Throws std::invalid_argument unless typeRanking is a permutation of the types.
void checkQuestionnaire(const Questionnaire& q);
nlohmann::json toJson(const Questionnaire& q);
Questionnaire questionnaireFromJson(const nlohmann::json& j);

struct TrialPayload {
    int trialId = 0;
    Phase phase = Phase::Evaluation;
    int trialIndex = 0;
    int phaseLength = 0;
    const gen::ManifestEntry* entry = nullptr;
    std::int64_t servedAtMs = 0;
    std::optional<std::int64_t> deadlineMs;  ///< absolute server time
    std::optional<int> solution;             ///< shown for solved tutorial trials
};

struct NextResult {
    enum class Kind { Trial, Wait, Pause, Questionnaire, Done };
    Kind kind = Kind::Done;
    std::optional<TrialPayload> trial;
    std::int64_t notBeforeMs = 0;  ///< Wait: earliest serve time
    std::int64_t pauseEndsMs = 0;  ///< Pause
};

struct AnswerResult {
    enum class Status { Recorded, Duplicate, NoTrial };
    Status status = Status::NoTrial;
    std::optional<TrialRecord> record;
    std::optional<int> truth;  ///< revealed for tutorial trials only
};

/// Protocol state machine for one subject. Every call takes the server time
/// in milliseconds; nothing reads a clock internally.
class Session {
public:
    Session(std::string id, SubjectMeta meta, const reducer::TrialSet& trials, int orderShift, std::int64_t nowMs);

    const std::string& id() const { return id_; }
    const SubjectMeta& meta() const { return meta_; }
    Phase phase() const { return phase_; }
    int orderShift() const { return orderShift_; }
    /// Evaluation entries in the order this subject sees them.
    std::vector<const gen::ManifestEntry*> evaluationOrder() const;

    /// Serves the next trial once the inter-trial gap has elapsed. Repeated
    /// calls while a trial is outstanding return that same trial.
    NextResult next(std::int64_t nowMs);
    /// Closes the outstanding trial `trialId`. Answers after the deadline are
    /// recorded as out of time. A trial already closed is a duplicate.
    AnswerResult answer(int trialId, std::optional<int> answerPos, const nlohmann::json& clientTimestamps, std::int64_t nowMs);
    /// Ends the pause early; false when not paused.
    bool resume(std::int64_t nowMs);
    /// Throws std::logic_error outside the questionnaire phase.
    void submitQuestionnaire(const Questionnaire& q, std::int64_t nowMs);

    const std::vector<TrialRecord>& records() const { return records_; }
    const std::optional<Questionnaire>& questionnaire() const { return questionnaire_; }

    /// Events produced since the last call, for the append-only log.
    std::vector<nlohmann::json> drainEvents();

private:
    const std::vector<gen::ManifestEntry>* phaseEntries(Phase phase) const;
    const gen::ManifestEntry& entryAt(Phase phase, int index) const;
    void expire(std::int64_t nowMs);
    void close(std::optional<int> answerPos, bool oot, const nlohmann::json& client, std::int64_t closedAtMs, std::int64_t nowMs);
    void advancePhase(std::int64_t nowMs);
    void emit(std::string type, std::int64_t nowMs, nlohmann::json fields = nlohmann::json::object());

    std::string id_;
    SubjectMeta meta_;
    const reducer::TrialSet* trials_;
    int orderShift_ = 0;
    Phase phase_ = Phase::Statements;
    int index_ = 0;
    int served_ = 0;
    std::optional<TrialPayload> outstanding_;
    std::optional<std::int64_t> lastClosedMs_;
    std::int64_t pauseEndsMs_ = 0;
    std::vector<TrialRecord> records_;
    std::vector<int> closedIds_;
    std::optional<Questionnaire> questionnaire_;
    std::vector<nlohmann::json> events_;
};

}  // namespace olab::study
