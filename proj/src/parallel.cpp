#include "mppstat/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mppstat::parallel {

namespace {

unsigned initial_threads() {
    if (const char* env = std::getenv("MPPSTAT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::atomic<unsigned>& slot() {
    static std::atomic<unsigned> value{initial_threads()};
    return value;
}

} // namespace

unsigned default_threads() { return slot().load(); }

void set_default_threads(unsigned n) { slot().store(n == 0 ? initial_threads() : n); }

} // namespace mppstat::parallel
