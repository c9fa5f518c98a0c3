#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cavc/errors.hpp"

namespace cavc {

// Finite symbol set. Labels are optional display names; when present they
// must be distinct and match the size.
struct Alphabet {
    int size = 0;
    std::vector<std::string> labels;
};

inline void validate(const Alphabet& a) {
    if (a.size < 1) throw ModelError("alphabet size must be >= 1");
    if (!a.labels.empty()) {
        if (static_cast<int>(a.labels.size()) != a.size)
            throw ModelError("alphabet label count does not match size");
        std::set<std::string> seen(a.labels.begin(), a.labels.end());
        if (static_cast<int>(seen.size()) != a.size)
            throw ModelError("alphabet labels are not distinct");
    }
}

inline Alphabet make_alphabet(int size) {
    Alphabet a{size, {}};
    validate(a);
    return a;
}

inline Alphabet make_alphabet(std::vector<std::string> labels) {
    Alphabet a{static_cast<int>(labels.size()), std::move(labels)};
    validate(a);
    return a;
}

}  // namespace cavc
