#pragma once

// Run manifest written alongside every output set: input path and content
// hash, subcommand, all parameters with defaults materialized, toolkit
// version. Re-running with an identical manifest reproduces byte-identical
// outputs.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dspec/version.hpp"

namespace dspec {

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t hash = fnv1a64(data);
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

struct RunManifest {
    std::string input_path;       // empty when the subcommand takes no input file
    std::string input_hash;       // fnv1a64 of the raw input bytes
    std::string subcommand;
    std::map<std::string, std::string> parameters;  // resolved, defaults included
    std::string version = toolkit_version;

    std::string to_json_string() const {
        nlohmann::json doc;
        doc["input_path"] = input_path;
        doc["input_hash"] = input_hash;
        doc["subcommand"] = subcommand;
        doc["parameters"] = parameters;
        doc["version"] = version;
        return doc.dump(2) + "\n";
    }
};

}
