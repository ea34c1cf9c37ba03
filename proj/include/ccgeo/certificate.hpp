#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ccgeo {

// Outcome of one numeric verification: pass/fail, the numeric margin that
// decided it, and (on failure) a witness describing where it broke.
struct Certificate {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string witness;                 // human-readable location of the worst case
    nlohmann::json details = nlohmann::json::object();

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["name"] = name;
        j["pass"] = pass;
        j["margin"] = margin;
        if (!witness.empty()) j["witness"] = witness;
        if (!details.empty()) j["details"] = details;
        return j;
    }
};

}  // namespace ccgeo
