#include "fronfix/parallel.hpp"

#include <cstdlib>
#include <string>

namespace fronfix {

unsigned thread_budget() {
    if (const char* env = std::getenv("FRONFIX_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

}  // namespace fronfix
