// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "stratus/model.hpp"

namespace stratus {

/// Current credentials by owner. Instances reference their owner's proxy,
/// not a frozen copy, so renewing a proxy immediately protects every
/// instance it manages.
class CredentialStore {
public:
    void set_proxy(Credential cred) { proxies_[cred.owner] = std::move(cred); }

    void renew_proxy(const std::string& owner, SimTime now, Seconds lifetime = 43200) {
        Credential& c = proxies_[owner];
        c.owner = owner;
        c.issued_at = now;
        c.lifetime = lifetime;
        c.kind = AuthKind::PerUserProxy;
    }

    const Credential* proxy(const std::string& owner) const {
        auto it = proxies_.find(owner);
        return it == proxies_.end() ? nullptr : &it->second;
    }

    void set_group_key(Credential cred) {
        group_key_ = std::move(cred);
        has_group_key_ = true;
    }

    const Credential* group_key() const { return has_group_key_ ? &group_key_ : nullptr; }

    /// The credential a boot on `site` would use for `owner`: the user's
    /// proxy on per-user-proxy sites, the shared key otherwise. Null when
    /// not configured.
    const Credential* credential_for(const CloudSite& site, const std::string& owner) const {
        if (site.auth_mode == AuthKind::PerUserProxy) return proxy(owner);
        return group_key();
    }

private:
    std::map<std::string, Credential> proxies_;
    Credential group_key_;
    bool has_group_key_ = false;
};

}  // namespace stratus
