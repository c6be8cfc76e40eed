#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "histoprompt/core/manifest.hpp"

namespace histoprompt {

struct BalancedManifest {
    DatasetManifest manifest;
    /// prompt text -> number of records drawn
    std::map<std::string, std::size_t> per_prompt_quota;
    std::uint64_t seed = 0;

    std::size_t total() const;
};

inline constexpr std::size_t kDefaultPromptsPerClass = 21;
inline constexpr std::size_t kDefaultBalancedTotal = 51'000;
inline constexpr std::size_t kDefaultTrainCount = 50'000;
inline constexpr std::size_t kDefaultValCount = 1'000;

/// Quotas for P prompts sharing `total`: floor(total/P) each, with the
/// remainder handed out one by one in the given priority order.
std::vector<std::size_t> uniform_quotas(std::size_t prompts, std::size_t total);

/// Keeps the prompts_per_class most populated prompts of each label (ties by
/// prompt text) and undersamples them to near-uniform counts. Records must
/// carry a prompt. Throws InsufficientPrompts / InsufficientExamples.
BalancedManifest balance(const DatasetManifest& m, std::size_t prompts_per_class, std::size_t total,
                         std::uint64_t seed);

/// Per-prompt proportional train/validation split. Validation counts per
/// prompt differ by at most one. Throws CountMismatch when
/// train + val != total.
std::pair<DatasetManifest, DatasetManifest> split(const BalancedManifest& b, std::size_t train,
                                                  std::size_t val, std::uint64_t seed);

}  // namespace histoprompt
