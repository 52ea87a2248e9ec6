#include "vnet/content/merkle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace vnet::content {

namespace {

Digest combine(std::vector<Digest> children, const HashProvider& h) {
    std::sort(children.begin(), children.end());
    std::string buf;
    buf.reserve(children.size() * 32);
    for (const auto& c : children) buf.append(reinterpret_cast<const char*>(c.data()), c.size());
    return h.hash(buf);
}

std::string path(const std::string& o, const std::string& c, const std::string& f) { return o + "/" + c + "/" + f; }

void all_files(const ComponentNode& c, const std::string& obj, std::set<std::string>& out) {
    for (const auto& f : c.files) out.insert(path(obj, c.id, f.name));
}

void all_files(const ObjectNode& o, std::set<std::string>& out) {
    for (const auto& c : o.components) all_files(c, o.id, out);
}

// Walks two id-sorted child lists, calling both(a, b) for shared ids and
// one(x) for ids present on one side only.
template <typename T, typename Both, typename One>
void zip_by_id(const std::vector<T>& a, const std::vector<T>& b, Both both, One one) {
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].id < b[j].id)) {
            one(a[i++]);
        } else if (i == a.size() || b[j].id < a[i].id) {
            one(b[j++]);
        } else {
            both(a[i++], b[j++]);
        }
    }
}

}  // namespace

std::size_t ContentTree::file_count() const {
    std::size_t n = 0;
    for (const auto& o : objects)
        for (const auto& c : o.components) n += c.files.size();
    return n;
}

ContentTree build_tree(const Inventory& inv, const HashProvider& h) {
    ContentTree t;
    t.inventory_id = h.hash(inv.user_id);
    std::vector<Digest> obj_hashes;
    for (const auto& o : inv.objects) {
        ObjectNode on;
        on.id = o.id;
        std::vector<Digest> comp_hashes;
        for (const auto& c : o.components) {
            ComponentNode cn;
            cn.id = c.id;
            cn.kind = c.kind;
            std::vector<Digest> file_ids;
            for (const auto& f : c.files) {
                cn.files.push_back(FileNode{f.name, h.hash(f.bytes)});
                file_ids.push_back(cn.files.back().file_id);
            }
            std::sort(cn.files.begin(), cn.files.end(),
                      [](const FileNode& a, const FileNode& b) { return a.name < b.name; });
            cn.hash = combine(std::move(file_ids), h);
            comp_hashes.push_back(cn.hash);
            on.components.push_back(std::move(cn));
        }
        std::sort(on.components.begin(), on.components.end(),
                  [](const ComponentNode& a, const ComponentNode& b) { return a.id < b.id; });
        on.hash = combine(std::move(comp_hashes), h);
        obj_hashes.push_back(on.hash);
        t.objects.push_back(std::move(on));
    }
    std::sort(t.objects.begin(), t.objects.end(), [](const ObjectNode& a, const ObjectNode& b) { return a.id < b.id; });
    t.inventory_hash = combine(std::move(obj_hashes), h);
    return t;
}

VerifyResult verify(const ContentTree& local, const ContentTree& remote) {
    VerifyResult r;
    r.comparisons = 1;
    if (local.inventory_hash == remote.inventory_hash) return r;
    zip_by_id(
        local.objects, remote.objects,
        [&](const ObjectNode& a, const ObjectNode& b) {
            ++r.comparisons;
            if (a.hash == b.hash) return;
            zip_by_id(
                a.components, b.components,
                [&](const ComponentNode& x, const ComponentNode& y) {
                    ++r.comparisons;
                    if (x.hash == y.hash) return;
                    std::map<std::string, const Digest*> theirs;
                    for (const auto& f : y.files) theirs[f.name] = &f.file_id;
                    for (const auto& f : x.files) {
                        auto it = theirs.find(f.name);
                        if (it == theirs.end()) {
                            r.changed.insert(path(a.id, x.id, f.name));
                            continue;
                        }
                        ++r.comparisons;
                        if (*it->second != f.file_id) r.changed.insert(path(a.id, x.id, f.name));
                        theirs.erase(it);
                    }
                    for (const auto& [name, d] : theirs) r.changed.insert(path(a.id, x.id, name));
                },
                [&](const ComponentNode& only) { all_files(only, a.id, r.changed); });
        },
        [&](const ObjectNode& only) { all_files(only, r.changed); });
    return r;
}

VerifyResult flat_verify(const ContentTree& local, const ContentTree& remote) {
    std::map<std::string, Digest> theirs;
    for (const auto& o : remote.objects)
        for (const auto& c : o.components)
            for (const auto& f : c.files) theirs[path(o.id, c.id, f.name)] = f.file_id;
    VerifyResult r;
    for (const auto& o : local.objects)
        for (const auto& c : o.components)
            for (const auto& f : c.files) {
                const auto p = path(o.id, c.id, f.name);
                ++r.comparisons;
                auto it = theirs.find(p);
                if (it == theirs.end() || it->second != f.file_id) r.changed.insert(p);
                if (it != theirs.end()) theirs.erase(it);
            }
    for (const auto& [p, d] : theirs) r.changed.insert(p);
    return r;
}

std::uint64_t resolve_master(std::uint64_t file_id, const std::vector<std::uint64_t>& node_ids) {
    if (node_ids.empty()) throw std::invalid_argument("resolve_master: no nodes");
    auto dist = [&](std::uint64_t n) { return n > file_id ? n - file_id : file_id - n; };
    std::uint64_t best = node_ids.front();
    for (auto n : node_ids) {
        const auto d = dist(n), db = dist(best);
        if (d < db || (d == db && n < best)) best = n;
    }
    return best;
}

std::uint64_t id_prefix(const Digest& d) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
    return v;
}

Inventory generate_corpus(std::size_t objects, std::size_t components_per_object, std::size_t files_per_component,
                          std::uint64_t seed, std::size_t file_bytes) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    Inventory inv;
    inv.user_id = "user-" + std::to_string(seed);
    char buf[32];
    for (std::size_t o = 0; o < objects; ++o) {
        ObjectContent oc;
        std::snprintf(buf, sizeof buf, "obj%04zu", o);
        oc.id = buf;
        for (std::size_t c = 0; c < components_per_object; ++c) {
            ComponentContent cc;
            std::snprintf(buf, sizeof buf, "cmp%02zu", c);
            cc.id = buf;
            cc.kind = static_cast<ComponentKind>(c % 5);
            for (std::size_t f = 0; f < files_per_component; ++f) {
                FileContent fc;
                std::snprintf(buf, sizeof buf, "f%03zu", f);
                fc.name = buf;
                fc.bytes.resize(file_bytes);
                for (auto& ch : fc.bytes) ch = static_cast<char>(byte(rng));
                cc.files.push_back(std::move(fc));
            }
            oc.components.push_back(std::move(cc));
        }
        inv.objects.push_back(std::move(oc));
    }
    return inv;
}

std::vector<std::string> mutate_files(Inventory& inv, std::size_t count, std::mt19937_64& rng) {
    std::vector<FileContent*> files;
    std::vector<std::string> names;
    for (auto& o : inv.objects)
        for (auto& c : o.components)
            for (auto& f : c.files) {
                files.push_back(&f);
                names.push_back(path(o.id, c.id, f.name));
            }
    if (count > files.size()) throw std::invalid_argument("more changes than files");
    std::vector<std::size_t> idx(files.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::string> changed;
    for (std::size_t k = 0; k < count; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
        std::swap(idx[k], idx[pick(rng)]);
        FileContent* f = files[idx[k]];
        if (f->bytes.empty()) f->bytes.push_back('\0');
        f->bytes[0] = static_cast<char>(f->bytes[0] ^ 0x5a);
        changed.push_back(names[idx[k]]);
    }
    return changed;
}

}  // namespace vnet::content
