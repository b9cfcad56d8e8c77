#include "causalcite/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "causalcite/error.hpp"

namespace causalcite::embed {
namespace {

constexpr char kMagic[6] = {'C', 'C', 'E', 'M', 'B', '1'};
constexpr double kNormTolerance = 1e-3;

// FNV-1a over the token bytes plus a splitmix64 finalizer so that the
// bucket assignment has no platform dependence.
std::uint64_t token_hash(std::string_view token) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : token) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

template <typename T>
void read_le(std::istream& in, T& out) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        acc |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    std::memcpy(&out, &acc, sizeof(T));
}

template <typename T>
void write_le(std::ostream& out, T value) {
    std::uint64_t acc = 0;
    std::memcpy(&acc, &value, sizeof(T));
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>((acc >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

float read_f32_le(std::istream& in) {
    std::uint32_t bits = 0;
    read_le(in, bits);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

void write_f32_le(std::ostream& out, float f) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof(f));
    write_le(out, bits);
}

}  // namespace

double l2_norm(const Vector& v) {
    double acc = 0.0;
    for (float x : v) acc += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(acc);
}

void normalize(Vector& v) {
    double norm = l2_norm(v);
    if (norm == 0.0 || !std::isfinite(norm))
        throw ContractError("cannot normalize zero or non-finite vector");
    for (float& x : v) x = static_cast<float>(x / norm);
}

double cosine_similarity(const Vector& u, const Vector& v) {
    if (u.size() != v.size())
        throw ContractError("cosine: dimension mismatch (" + std::to_string(u.size()) +
                            " vs " + std::to_string(v.size()) + ")");
    if (u.empty()) throw ContractError("cosine: empty vectors");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<double>(u[i]) * static_cast<double>(v[i]);
        nu += static_cast<double>(u[i]) * static_cast<double>(u[i]);
        nv += static_cast<double>(v[i]) * static_cast<double>(v[i]);
    }
    if (nu == 0.0 || nv == 0.0) throw ContractError("cosine: zero-norm vector");
    double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return std::clamp(c, -1.0, 1.0);
}

Vector fallback_encode(const std::vector<std::string>& tokens, std::uint32_t dims) {
    if (dims == 0) throw ContractError("fallback encoder: dims must be positive");
    Vector v(dims, 0.0f);
    if (tokens.empty()) {
        v[0] = 1.0f;  // degenerate text still gets a valid unit vector
        return v;
    }
    for (const auto& tok : tokens) {
        std::uint64_t h = token_hash(tok);
        auto bucket = static_cast<std::size_t>(h % dims);
        // Top bit picks the sign so collisions partially cancel.
        v[bucket] += (h & 0x8000000000000000ull) ? -1.0f : 1.0f;
    }
    double norm = l2_norm(v);
    if (norm == 0.0) {
        // All contributions cancelled (possible but rare); fall back to
        // a deterministic one-hot on the first token's bucket.
        v.assign(dims, 0.0f);
        v[token_hash(tokens.front()) % dims] = 1.0f;
        return v;
    }
    for (float& x : v) x = static_cast<float>(x / norm);
    return v;
}

LoadReport EmbeddingStore::load(const std::filesystem::path& path,
                                const std::vector<std::string>* known_ids) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embedding file: " + path.string());

    char magic[6];
    in.read(magic, 6);
    if (!in || std::memcmp(magic, kMagic, 6) != 0)
        throw FormatError("bad embedding file magic in " + path.string());

    std::uint32_t dims = 0;
    std::uint64_t count = 0;
    read_le(in, dims);
    read_le(in, count);
    if (!in) throw FormatError("truncated embedding header in " + path.string());
    if (dims == 0) throw FormatError("embedding dims must be positive in " + path.string());
    if (dims_ != 0 && dims != dims_)
        throw FormatError("embedding dims mismatch: store has " + std::to_string(dims_) +
                          ", file has " + std::to_string(dims));
    dims_ = dims;

    std::unordered_set<std::string_view> known;
    if (known_ids)
        for (const auto& id : *known_ids) known.insert(id);

    LoadReport report;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint16_t id_len = 0;
        read_le(in, id_len);
        if (!in) throw FormatError("truncated embedding record " + std::to_string(i));
        if (id_len == 0) throw FormatError("empty paper_id in embedding record " +
                                           std::to_string(i));
        std::string id(id_len, '\0');
        in.read(id.data(), id_len);
        Vector v(dims);
        for (std::uint32_t d = 0; d < dims; ++d) v[d] = read_f32_le(in);
        if (!in) throw FormatError("truncated embedding record " + std::to_string(i));

        double norm = l2_norm(v);
        if (!std::isfinite(norm) || norm == 0.0)
            throw FormatError("zero or non-finite vector for paper_id '" + id + "'");
        if (std::abs(norm - 1.0) > kNormTolerance) ++report.renormalized;
        for (float& x : v) x = static_cast<float>(x / norm);

        if (known_ids && !known.contains(id)) report.unknown_ids.push_back(id);
        vectors_[std::move(id)] = std::move(v);
        ++report.loaded;
    }
    std::sort(report.unknown_ids.begin(), report.unknown_ids.end());
    return report;
}

void EmbeddingStore::put(const std::string& paper_id, Vector v) {
    if (paper_id.empty()) throw ContractError("embedding paper_id must be non-empty");
    if (dims_ == 0) dims_ = static_cast<std::uint32_t>(v.size());
    if (v.size() != dims_)
        throw ContractError("embedding dims mismatch for '" + paper_id + "'");
    normalize(v);
    vectors_[paper_id] = std::move(v);
}

const Vector* EmbeddingStore::find(std::string_view paper_id) const {
    auto it = vectors_.find(std::string(paper_id));
    return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write embedding file: " + path.string());
    out.write(kMagic, 6);
    write_le(out, dims_);
    write_le(out, static_cast<std::uint64_t>(vectors_.size()));

    std::vector<std::string_view> ids;
    ids.reserve(vectors_.size());
    for (const auto& [id, v] : vectors_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (auto id : ids) {
        if (id.size() > 0xffff)
            throw ContractError("paper_id too long for embedding format");
        write_le(out, static_cast<std::uint16_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        for (float x : vectors_.at(std::string(id))) write_f32_le(out, x);
    }
    if (!out) throw IoError("failed writing embedding file: " + path.string());
}

std::optional<Vector> StoreProvider::vector_for(
    std::string_view paper_id, const std::vector<std::string>& cleaned_tokens) const {
    if (const Vector* v = store_.find(paper_id)) return *v;
    if (cleaned_tokens.empty()) return std::nullopt;
    return fallback_encode(cleaned_tokens, store_.dims());
}

std::optional<Vector> FallbackProvider::vector_for(
    std::string_view /*paper_id*/, const std::vector<std::string>& cleaned_tokens) const {
    if (cleaned_tokens.empty()) return std::nullopt;
    return fallback_encode(cleaned_tokens, dims_);
}

}  // namespace causalcite::embed
