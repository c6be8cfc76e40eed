#include "histoprompt/core/embedding_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'M', 'B', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::filesystem::path sibling_manifest_path(const std::filesystem::path& emb_path) {
    auto p = emb_path;
    p.replace_extension(".jsonl");
    return p;
}

void save_embeddings(const FeatureSet& fs, const std::filesystem::path& path) {
    fs.check();
    if (fs.rows > std::numeric_limits<std::uint32_t>::max() || fs.dim > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::InvalidFeatureSet, "dimensions exceed 32-bit header fields");
    }
    std::vector<unsigned char> bytes;
    bytes.reserve(kEmbeddingHeaderBytes + fs.values.size() * 4);
    bytes.insert(bytes.end(), kMagic.begin(), kMagic.end());
    put_u32(bytes, static_cast<std::uint32_t>(fs.rows));
    put_u32(bytes, static_cast<std::uint32_t>(fs.dim));
    for (float v : fs.values) put_u32(bytes, std::bit_cast<std::uint32_t>(v));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());

    DatasetManifest m;
    m.records.reserve(fs.rows);
    for (std::size_t i = 0; i < fs.rows; ++i) m.records.push_back({fs.ids[i], fs.labels[i], {}, {}, {}});
    save_manifest(m, sibling_manifest_path(path));
}

FeatureSet load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
        throw Error(ErrorCode::BadMagic, path.string() + " does not start with EMB1");
    }
    if (bytes.size() < kEmbeddingHeaderBytes) {
        throw Error(ErrorCode::TruncatedFile, path.string() + ": header shorter than 12 bytes");
    }
    const std::uint64_t n = get_u32(bytes.data() + 4);
    const std::uint64_t d = get_u32(bytes.data() + 8);
    if (n == 0) throw Error(ErrorCode::EmptySet, path.string() + " holds zero records");
    const std::uint64_t expected = kEmbeddingHeaderBytes + 4 * n * d;
    if (bytes.size() < expected) {
        throw Error(ErrorCode::TruncatedFile, path.string() + ": " + std::to_string(bytes.size()) +
                                                  " bytes, header requires " + std::to_string(expected));
    }
    if (bytes.size() > expected) {
        throw Error(ErrorCode::TruncatedFile, path.string() + ": " + std::to_string(bytes.size() - expected) +
                                                  " trailing bytes after the declared payload");
    }

    FeatureSet fs;
    fs.rows = n;
    fs.dim = d;
    fs.values.resize(n * d);
    const unsigned char* p = bytes.data() + kEmbeddingHeaderBytes;
    for (std::size_t i = 0; i < fs.values.size(); ++i, p += 4) fs.values[i] = std::bit_cast<float>(get_u32(p));

    const auto manifest_path = sibling_manifest_path(path);
    if (std::filesystem::exists(manifest_path)) {
        const auto m = load_manifest(manifest_path);
        if (m.records.size() != n) {
            throw Error(ErrorCode::ManifestMismatch, manifest_path.string() + " has " +
                                                         std::to_string(m.records.size()) + " records, expected " +
                                                         std::to_string(n));
        }
        fs.ids.reserve(n);
        fs.labels.reserve(n);
        for (const auto& r : m.records) {
            fs.ids.push_back(r.id);
            fs.labels.push_back(r.label);
        }
    } else {
        fs.ids.reserve(n);
        for (std::size_t i = 0; i < n; ++i) fs.ids.push_back(std::to_string(i));
        fs.labels.assign(n, std::string{});
    }
    fs.check();
    return fs;
}

}  // namespace histoprompt
