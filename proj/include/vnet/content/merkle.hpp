#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vnet/content/hash.hpp"

namespace vnet::content {

enum class ComponentKind : std::uint8_t { Animation, Sound, Texture, Script, Other };

struct FileContent {
    std::string name;
    std::string bytes;
};

struct ComponentContent {
    std::string id;
    ComponentKind kind = ComponentKind::Other;
    std::vector<FileContent> files;
};

struct ObjectContent {
    std::string id;
    std::vector<ComponentContent> components;
};

struct Inventory {
    std::string user_id;
    std::vector<ObjectContent> objects;
};

struct FileNode {
    std::string name;
    Digest file_id{};  // hash of the file bytes
};

struct ComponentNode {
    std::string id;
    ComponentKind kind = ComponentKind::Other;
    Digest hash{};
    std::vector<FileNode> files;  // sorted by name
};

struct ObjectNode {
    std::string id;
    Digest hash{};
    std::vector<ComponentNode> components;  // sorted by id
};

struct ContentTree {
    Digest inventory_id{};    // hash of the user id
    Digest inventory_hash{};  // root
    std::vector<ObjectNode> objects;  // sorted by id

    std::size_t file_count() const;
};

// Non-leaf hash = hash of the children's hashes concatenated in hash order.
ContentTree build_tree(const Inventory& inv, const HashProvider& h = default_provider());

// Changed files are named "object/component/file".
struct VerifyResult {
    std::set<std::string> changed;
    std::size_t comparisons = 0;
};

// Descends only into mismatching branches; the root comparison counts as 1.
VerifyResult verify(const ContentTree& local, const ContentTree& remote);
// Pairwise file comparison; comparisons = number of local files.
VerifyResult flat_verify(const ContentTree& local, const ContentTree& remote);

// Nearest id by absolute difference, ties to the smaller id.
std::uint64_t resolve_master(std::uint64_t file_id, const std::vector<std::uint64_t>& node_ids);
std::uint64_t id_prefix(const Digest& d);  // first 8 bytes, big-endian

Inventory generate_corpus(std::size_t objects, std::size_t components_per_object, std::size_t files_per_component,
                          std::uint64_t seed, std::size_t file_bytes = 64);

// Rewrites `count` distinct files; returns their "object/component/file" names.
std::vector<std::string> mutate_files(Inventory& inv, std::size_t count, std::mt19937_64& rng);

}  // namespace vnet::content
