#pragma once

#include <string>

#include "cavc/errors.hpp"

namespace cavc {

// The three decoding problems plus compound-state identification alone.
enum class Task { Com, And, Or, Identify };

inline std::string to_string(Task t) {
    switch (t) {
        case Task::Com: return "com";
        case Task::And: return "and";
        case Task::Or: return "or";
        case Task::Identify: return "identify";
    }
    return "?";
}

inline Task task_from_string(const std::string& s) {
    if (s == "com") return Task::Com;
    if (s == "and") return Task::And;
    if (s == "or") return Task::Or;
    if (s == "identify") return Task::Identify;
    throw ModelError("unknown task: " + s);
}

}  // namespace cavc
