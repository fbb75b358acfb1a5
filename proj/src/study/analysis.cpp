#include "olab/study/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace olab::study {

EventLog::EventLog(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

void EventLog::append(const std::string& sessionId, const std::vector<nlohmann::json>& events) {
    if (events.empty()) return;
    const std::lock_guard lock(mutex_);
    const auto file = dir_ / (sessionId + ".jsonl");
    std::ofstream out(file, std::ios::app);
    for (const auto& e : events) out << e.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("cannot append to " + file.string());
}

namespace {

template <typename Fn>
void forEachEvent(const std::filesystem::path& dir, Fn&& fn) {
    if (!std::filesystem::is_directory(dir)) throw std::runtime_error("log directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(dir)) {
        if (f.path().extension() == ".jsonl") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            if (line.empty()) continue;
            nlohmann::json e;
            try {
                e = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error&) {
                // A crash can leave a torn final line; anything earlier is corruption.
                if (in.peek() == std::char_traits<char>::eof()) break;
                throw std::runtime_error(file.string() + ":" + std::to_string(lineNo) + ": malformed event");
            }
            fn(e);
        }
    }
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sampleSd(const std::vector<double>& v, double m) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<TrialRecord> loadRecords(const std::filesystem::path& dir) {
    std::vector<TrialRecord> out;
    std::set<std::pair<std::string, int>> seen;
    forEachEvent(dir, [&](const nlohmann::json& e) {
        if (e.value("type", "") != "record") return;
        auto r = trialRecordFromJson(e.at("record"));
        if (seen.insert({r.sessionId, r.trialId}).second) out.push_back(std::move(r));
    });
    return out;
}

std::map<std::string, std::string> sessionConfigHashes(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    forEachEvent(dir, [&](const nlohmann::json& e) {
        if (e.value("type", "") == "session_created") out[e.at("sessionId").get<std::string>()] = e.value("configHash", "");
    });
    return out;
}

std::vector<std::pair<std::string, Questionnaire>> loadQuestionnaires(const std::filesystem::path& dir) {
    std::map<std::string, std::string> subjectOf;
    std::vector<std::pair<std::string, Questionnaire>> out;
    forEachEvent(dir, [&](const nlohmann::json& e) {
        const auto type = e.value("type", "");
        if (type == "session_created") subjectOf[e.at("sessionId").get<std::string>()] = e.at("subjectId").get<std::string>();
        if (type == "questionnaire") {
            out.emplace_back(subjectOf[e.at("sessionId").get<std::string>()], questionnaireFromJson(e.at("questionnaire")));
        }
    });
    return out;
}

void writeRecordsJsonl(const std::vector<TrialRecord>& records, std::ostream& out) {
    for (const auto& r : records) out << toJson(r).dump() << '\n';
}

std::vector<TrialRecord> readRecordsJsonl(std::istream& in) {
    std::vector<TrialRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(trialRecordFromJson(nlohmann::json::parse(line)));
    }
    return out;
}

std::vector<SubjectSummary> flagOutlierSubjects(const std::vector<TrialRecord>& records, double sigmas) {
    std::map<std::string, SubjectSummary> bySubject;
    std::map<std::string, std::pair<double, std::size_t>> rt, wrong;
    for (const auto& r : records) {
        if (!r.analysed()) continue;
        auto& s = bySubject[r.subjectId];
        s.subjectId = r.subjectId;
        ++s.evaluated;
        if (r.oot) {
            ++s.ootCount;
            continue;
        }
        if (!r.correct) continue;
        rt[r.subjectId].first += static_cast<double>(r.rtMs);
        ++rt[r.subjectId].second;
        wrong[r.subjectId].first += *r.correct ? 0.0 : 1.0;
        ++wrong[r.subjectId].second;
    }
    if (bySubject.size() < 3) throw std::invalid_argument("flagOutlierSubjects needs at least 3 subjects");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> rts, ers;
    for (auto& [id, s] : bySubject) {
        const auto [rtSum, n] = rt[id];
        s.meanRtMs = n ? rtSum / static_cast<double>(n) : nan;
        s.erRate = n ? wrong[id].first / static_cast<double>(n) : nan;
        if (n) {
            rts.push_back(s.meanRtMs);
            ers.push_back(s.erRate);
        }
    }
    const double rtMean = rts.empty() ? nan : mean(rts), rtSd = rts.empty() ? nan : sampleSd(rts, rtMean);
    const double erMean = ers.empty() ? nan : mean(ers), erSd = ers.empty() ? nan : sampleSd(ers, erMean);

    std::vector<SubjectSummary> out;
    for (auto& [id, s] : bySubject) {
        if (std::isnan(s.meanRtMs)) {
            s.excluded = true;
            s.exclusionReason = "no in-time answers";
        } else if (s.meanRtMs < rtMean - sigmas * rtSd) {
            s.excluded = true;
            s.exclusionReason = "mean RT below mean - " + std::to_string(sigmas) + " sd";
        } else if (s.erRate > erMean + sigmas * erSd && s.meanRtMs > rtMean + sigmas * rtSd) {
            s.excluded = true;
            s.exclusionReason = "ER and mean RT above mean + " + std::to_string(sigmas) + " sd";
        }
        out.push_back(s);
    }
    return out;
}

nlohmann::json toJson(const std::vector<SubjectSummary>& summaries) {
    auto num = [](double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : summaries) {
        out.push_back({{"subjectId", s.subjectId},
                       {"evaluated", s.evaluated},
                       {"meanRtMs", num(s.meanRtMs)},
                       {"erRate", num(s.erRate)},
                       {"ootCount", s.ootCount},
                       {"excluded", s.excluded},
                       {"exclusionReason", s.exclusionReason}});
    }
    return out;
}

std::vector<stats::Observation> observationsFrom(const std::vector<TrialRecord>& records,
                                                 const std::set<std::string>& excludedSubjects) {
    std::vector<stats::Observation> out;
    for (const auto& r : records) {
        if (!r.analysed() || excludedSubjects.count(r.subjectId)) continue;
        stats::Observation o;
        o.subject = r.subjectId;
        o.config = r.config;
        o.oot = r.oot;
        if (!r.oot && r.correct) {
            o.error = *r.correct ? 0.0 : 1.0;
            o.rtMs = static_cast<double>(r.rtMs);
        }
        out.push_back(o);
    }
    return out;
}

stats::PerformanceReport aggregatePerformance(const std::vector<TrialRecord>& records,
                                              const std::set<std::string>& excludedSubjects,
                                              const stats::ReportOptions& options) {
    const auto obs = observationsFrom(records, excludedSubjects);
    if (obs.empty()) throw std::invalid_argument("no evaluation records left after exclusion");
    return stats::buildPerformanceReport(obs, options);
}

}  // namespace olab::study
