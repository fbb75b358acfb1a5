#include "olab/core/log.hpp"

#include <iostream>
#include <mutex>

namespace olab {

namespace {

std::mutex sinkMutex;
WarningSink currentSink;

}  // namespace

void warn(std::string_view message) {
    std::lock_guard lock(sinkMutex);
    if (currentSink) {
        currentSink(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

WarningSink setWarningSink(WarningSink sink) {
    std::lock_guard lock(sinkMutex);
    auto previous = std::move(currentSink);
    currentSink = std::move(sink);
    return previous;
}

}  // namespace olab
