// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/image_repo.hpp"

#include <cmath>

#include "stratus/errors.hpp"

namespace stratus {

namespace {
constexpr Seconds kSaveSecondsPerGb = 60;
}

Seconds ImageRepository::save_duration(double size_gb) {
    return static_cast<Seconds>(std::ceil(size_gb)) * kSaveSecondsPerGb;
}

SimTime ImageRepository::save_image(const std::string& owner, const std::string& image_id,
                                    double size_gb, std::vector<ImageVariant> variants,
                                    SimTime now) {
    if (catalog_.count(image_id) > 0) throw DuplicateId(image_id);
    VMImage img;
    img.image_id = image_id;
    img.owner = owner;
    img.size_gb = size_gb;
    img.variants = std::move(variants);
    img.available_at = now + save_duration(size_gb);
    const SimTime done = img.available_at;
    order_.push_back(image_id);
    catalog_.emplace(image_id, std::move(img));
    return done;
}

void ImageRepository::add(VMImage image) {
    if (catalog_.count(image.image_id) > 0) throw DuplicateId(image.image_id);
    order_.push_back(image.image_id);
    catalog_.emplace(image.image_id, std::move(image));
}

const VMImage* ImageRepository::lookup(const std::string& image_id, SimTime now) const {
    auto it = catalog_.find(image_id);
    if (it == catalog_.end() || it->second.available_at > now) return nullptr;
    return &it->second;
}

const std::string& ImageRepository::resolve_variant(const std::string& image_id,
                                                    Hypervisor hv, SimTime now) const {
    const VMImage* img = lookup(image_id, now);
    if (img == nullptr) throw UnknownImage(image_id);
    const ImageVariant* v = img->variant_for(hv);
    if (v == nullptr) throw NoVariant(image_id, to_string(hv));
    return v->location;
}

Seconds ImageRepository::transfer_time(const std::string& image_id, const CloudSite& cloud,
                                       SimTime now) const {
    const VMImage* img = lookup(image_id, now);
    if (img == nullptr) throw UnknownImage(image_id);
    if (is_cached(image_id, cloud.name)) return 0;
    return static_cast<Seconds>(std::ceil(img->size_gb / cloud.image_bandwidth_gb_per_s));
}

void ImageRepository::mark_cached(const std::string& image_id, const std::string& cloud) {
    cache_.emplace(image_id, cloud);
}

bool ImageRepository::is_cached(const std::string& image_id, const std::string& cloud) const {
    return cache_.count({image_id, cloud}) > 0;
}

std::vector<const VMImage*> ImageRepository::list() const {
    std::vector<const VMImage*> out;
    out.reserve(order_.size());
    for (const auto& id : order_) out.push_back(&catalog_.at(id));
    return out;
}

}  // namespace stratus
