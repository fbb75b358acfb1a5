#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/stats/report.hpp"
#include "olab/study/session.hpp"

namespace olab::study {

/// Append-only JSON-lines event log, one file per session.
class EventLog {
public:
    explicit EventLog(std::filesystem::path dir);
    const std::filesystem::path& dir() const { return dir_; }
    /// Appends and flushes; throws std::runtime_error on write failure.
    void append(const std::string& sessionId, const std::vector<nlohmann::json>& events);

private:
    std::filesystem::path dir_;
    std::mutex mutex_;
};

/// Trial records from every session log in `dir`, deduplicated on
/// (sessionId, trialId) so replayed or retried appends count once.
std::vector<TrialRecord> loadRecords(const std::filesystem::path& dir);
/// Config hash recorded by each session log, keyed by session id.
std::map<std::string, std::string> sessionConfigHashes(const std::filesystem::path& dir);
/// Questionnaire answers keyed by subject id.
std::vector<std::pair<std::string, Questionnaire>> loadQuestionnaires(const std::filesystem::path& dir);

void writeRecordsJsonl(const std::vector<TrialRecord>& records, std::ostream& out);
std::vector<TrialRecord> readRecordsJsonl(std::istream& in);

struct SubjectSummary {
    std::string subjectId;
    std::size_t evaluated = 0;  ///< evaluation records
    double meanRtMs = 0.0;      ///< over answered, in-time trials; NaN if none
    double erRate = 0.0;        ///< wrong / answered in time; NaN if none
    std::size_t ootCount = 0;
    bool excluded = false;  ///< flagged; advisory until the operator confirms
    std::string exclusionReason;
};

inline constexpr double kFlagSigmas = 1.5;

/// Flags subjects with mean RT < mu - k*sd, or with both ER > mu + k*sd and
/// mean RT > mu + k*sd (strict, sample sd across subjects). Evaluation-phase
/// records only. Throws std::invalid_argument with fewer than 3 subjects.
std::vector<SubjectSummary> flagOutlierSubjects(const std::vector<TrialRecord>& records, double sigmas = kFlagSigmas);
nlohmann::json toJson(const std::vector<SubjectSummary>& summaries);

/// Evaluation-phase observations; OOT trials carry neither an error nor an RT.
std::vector<stats::Observation> observationsFrom(const std::vector<TrialRecord>& records,
                                                 const std::set<std::string>& excludedSubjects = {});

/// ER/RT/OOT report over the remaining subjects. Throws std::invalid_argument
/// when nothing is left after exclusion.
stats::PerformanceReport aggregatePerformance(const std::vector<TrialRecord>& records,
                                              const std::set<std::string>& excludedSubjects = {},
                                              const stats::ReportOptions& options = {});

}  // namespace olab::study
