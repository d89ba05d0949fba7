// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/event_log.hpp"

#include <fstream>

#include "stratus/errors.hpp"

namespace stratus {

void EventLog::append(SimTime time, const std::string& kind,
                      std::initializer_list<Field> fields) {
    append(time, kind, std::vector<Field>(fields));
}

void EventLog::append(SimTime time, const std::string& kind,
                      const std::vector<Field>& fields) {
    std::string line = std::to_string(time);
    line += ' ';
    line += std::to_string(next_seq_++);
    line += ' ';
    line += kind;
    for (const Field& f : fields) {
        line += ' ';
        line += f.first;
        line += '=';
        line += f.second;
    }
    lines_.push_back(std::move(line));
}

std::string EventLog::text() const {
    std::string out;
    for (const std::string& line : lines_) {
        out += line;
        out += '\n';
    }
    return out;
}

std::uint64_t EventLog::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const std::string& line : lines_) {
        for (char c : line) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= static_cast<unsigned char>('\n');
        h *= 1099511628211ull;
    }
    return h;
}

void EventLog::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text();
    if (!out) throw IoError("short write to " + path);
}

}  // namespace stratus
