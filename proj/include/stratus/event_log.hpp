// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "stratus/types.hpp"

namespace stratus {

/// Append-only run journal. One line per record:
///
///   <time> <seq> <kind> key=value key=value ...
///
/// `seq` is a global line counter, so two logs are comparable byte for byte
/// and a replay can reconstruct the exact order of same-time records.
class EventLog {
public:
    using Field = std::pair<std::string, std::string>;

    void append(SimTime time, const std::string& kind,
                std::initializer_list<Field> fields);
    void append(SimTime time, const std::string& kind,
                const std::vector<Field>& fields);

    const std::vector<std::string>& lines() const { return lines_; }
    std::string text() const;

    /// FNV-1a over the full text; cheap fingerprint for determinism checks.
    std::uint64_t hash() const;

    /// Writes the log to `path`, one record per line. Throws IoError.
    void write(const std::string& path) const;

private:
    std::vector<std::string> lines_;
    std::uint64_t next_seq_ = 1;
};

}  // namespace stratus
