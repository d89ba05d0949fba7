// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace stratus {

/// Simulation time in whole seconds since scenario start. All durations are
/// integer seconds so that runs are exactly replayable.
using SimTime = std::int64_t;
using Seconds = std::int64_t;
using JobId = std::int64_t;

inline constexpr SimTime kMaxSimTime = INT64_MAX;

enum class Hypervisor { Kvm, Xen };
enum class CloudFamily { NimbusLike, OpenstackLike };

/// Authentication mode of a cloud site, and equally the kind of a credential.
enum class AuthKind { PerUserProxy, SharedGroupKey };

enum class CloudStatus { Active, Maintenance };

enum class JobState { Idle, Running, Completed, Held };

enum class VmState { Requested, Booting, Running, Retiring, Error, Terminated };

std::string to_string(Hypervisor v);
std::string to_string(CloudFamily v);
std::string to_string(AuthKind v);
std::string to_string(CloudStatus v);
std::string to_string(JobState v);
std::string to_string(VmState v);

std::optional<Hypervisor> parse_hypervisor(const std::string& s);
std::optional<CloudFamily> parse_cloud_family(const std::string& s);
std::optional<AuthKind> parse_auth_kind(const std::string& s);
std::optional<CloudStatus> parse_cloud_status(const std::string& s);

/// True iff `from -> to` is an edge of the instance lifecycle state machine.
/// The edge set is closed; every transition the engine performs is checked
/// against it (and replay tooling re-checks transitions from event logs).
bool vm_transition_allowed(VmState from, VmState to);

/// True iff `from -> to` is a legal job state transition.
bool job_transition_allowed(JobState from, JobState to);

}  // namespace stratus
