// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/model.hpp"

#include <algorithm>

namespace stratus {

const ImageVariant* VMImage::variant_for(Hypervisor h) const {
    for (const auto& v : variants) {
        if (v.hypervisor == h) return &v;
    }
    return nullptr;
}

bool VMImage::dual_hypervisor() const {
    return variant_for(Hypervisor::Kvm) != nullptr &&
           variant_for(Hypervisor::Xen) != nullptr;
}

int VMInstance::occupied_slots() const {
    return static_cast<int>(std::count_if(slot_occupancy.begin(), slot_occupancy.end(),
                                          [](const auto& s) { return s.has_value(); }));
}

int VMInstance::free_slots() const {
    return slots - occupied_slots();
}

std::optional<int> VMInstance::first_free_slot() const {
    for (int i = 0; i < static_cast<int>(slot_occupancy.size()); ++i) {
        if (!slot_occupancy[i]) return i;
    }
    return std::nullopt;
}

std::string Validation::describe() const {
    switch (code) {
        case ValidationCode::Ok: return "ok";
        case ValidationCode::MissingField: return "MissingField(" + field + ")";
        case ValidationCode::HypervisorMismatch: return "HypervisorMismatch";
        case ValidationCode::ExpiredCredential: return "ExpiredCredential";
    }
    return "?";
}

Validation validate_boot_parameters(const Job& job, const CloudSite& cloud,
                                    const VMImage& image, const Credential& cred,
                                    SimTime now) {
    const ImageVariant* variant = image.variant_for(cloud.hypervisor);
    if (variant == nullptr) {
        return {ValidationCode::HypervisorMismatch, {}};
    }

    const ResourceRequest& req = job.request;
    if (cloud.family == CloudFamily::NimbusLike) {
        if (variant->location.empty()) return Validation::missing("location");
        if (req.arch.empty()) return Validation::missing("arch");
        if (req.cores < 1) return Validation::missing("cores");
        if (req.memory_mb < 1) return Validation::missing("memory_mb");
        if (cred.kind != AuthKind::PerUserProxy) return Validation::missing("proxy");
        if (cred.expired(now)) return {ValidationCode::ExpiredCredential, {}};
    } else {
        if (!req.instance_type || req.instance_type->empty()) {
            return Validation::missing("instance_type");
        }
        if (cred.kind != AuthKind::SharedGroupKey) {
            return Validation::missing("group_key");
        }
    }
    return Validation::good();
}

}  // namespace stratus
