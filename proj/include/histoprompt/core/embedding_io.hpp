#pragma once

#include <filesystem>

#include "histoprompt/core/feature_set.hpp"
#include "histoprompt/core/manifest.hpp"

namespace histoprompt {

// .emb layout: "EMB1" | u32le n | u32le d | n*d f32le row-major.
inline constexpr std::size_t kEmbeddingHeaderBytes = 12;

/// Path of the sibling manifest: features.emb -> features.jsonl.
std::filesystem::path sibling_manifest_path(const std::filesystem::path& emb_path);

/// Writes the binary file and its sibling manifest (ids/labels per row).
void save_embeddings(const FeatureSet& fs, const std::filesystem::path& path);

/// Reads a .emb file. When the sibling manifest exists its ids/labels are
/// attached and its row count must equal n; otherwise ids are row indices
/// and labels are empty.
FeatureSet load_embeddings(const std::filesystem::path& path);

}  // namespace histoprompt
