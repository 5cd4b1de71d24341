#include "mppstat/log.hpp"

#include <iostream>
#include <mutex>

namespace mppstat {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

WarningSink& sink() {
    static WarningSink s;
    return s;
}

} // namespace

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) {
        sink()(message);
    } else {
        std::cerr << "mppstat: warning: " << message << '\n';
    }
}

WarningSink set_warning_sink(WarningSink s) {
    std::lock_guard lock(sink_mutex());
    return std::exchange(sink(), std::move(s));
}

} // namespace mppstat
