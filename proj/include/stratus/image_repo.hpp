// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "stratus/model.hpp"

namespace stratus {

/// Image catalog with per-hypervisor variant resolution, a save-time model
/// (one minute per started gigabyte) and a per-cloud transfer cache.
class ImageRepository {
public:
    /// Seconds needed to save an image of `size_gb` into the catalog.
    static Seconds save_duration(double size_gb);

    /// Registers a new image whose save starts at `now`; the image becomes
    /// visible to lookups at the returned completion time. Throws DuplicateId.
    SimTime save_image(const std::string& owner, const std::string& image_id,
                       double size_gb, std::vector<ImageVariant> variants,
                       SimTime now);

    /// Adds an already-saved image (visible from `image.available_at` on).
    void add(VMImage image);

    /// Catalog lookup; images still saving are not found.
    const VMImage* lookup(const std::string& image_id, SimTime now) const;

    /// Location of the variant matching `hv`. Throws NoVariant.
    const std::string& resolve_variant(const std::string& image_id, Hypervisor hv,
                                       SimTime now) const;

    /// Seconds to transfer the image to `cloud`: zero when a prior boot on
    /// that cloud completed, otherwise size / bandwidth rounded up to whole
    /// seconds. The pair enters the cache only via mark_cached.
    Seconds transfer_time(const std::string& image_id, const CloudSite& cloud,
                          SimTime now) const;

    /// Records a completed boot of (image, cloud); later transfers are free.
    void mark_cached(const std::string& image_id, const std::string& cloud);

    bool is_cached(const std::string& image_id, const std::string& cloud) const;

    /// All images, catalog order (insertion order), including pending saves.
    std::vector<const VMImage*> list() const;

private:
    std::map<std::string, VMImage> catalog_;
    std::vector<std::string> order_;
    std::set<std::pair<std::string, std::string>> cache_;  // (image, cloud)
};

}  // namespace stratus
