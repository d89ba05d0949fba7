// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace stratus {

/// Base class for all engine errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scenario failed validation; message carries a field-path diagnostic such
/// as "clouds[0].total_cores: must be positive".
struct InvalidScenario : Error {
    using Error::Error;
};

struct UnknownImage : Error {
    explicit UnknownImage(const std::string& id) : Error("unknown image: " + id) {}
};

struct UnknownDependency : Error {
    explicit UnknownDependency(const std::string& what) : Error("unknown dependency: " + what) {}
};

struct DuplicateId : Error {
    explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id) {}
};

struct NoVariant : Error {
    NoVariant(const std::string& image, const std::string& hv)
        : Error("image " + image + " has no " + hv + " variant") {}
};

struct UnknownInstance : Error {
    explicit UnknownInstance(const std::string& id) : Error("unknown instance: " + id) {}
};

struct InvalidState : Error {
    using Error::Error;
};

struct TimeInPast : Error {
    using Error::Error;
};

/// Boot rejections from a cloud connector.
struct BootError : Error {
    using Error::Error;
};

struct NoCapacity : BootError {
    explicit NoCapacity(const std::string& why) : BootError("no capacity: " + why) {}
};

struct ScratchExhausted : BootError {
    ScratchExhausted() : BootError("scratch pool exhausted") {}
};

struct MaintenanceMode : BootError {
    explicit MaintenanceMode(const std::string& cloud)
        : BootError("cloud in maintenance: " + cloud) {}
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace stratus
