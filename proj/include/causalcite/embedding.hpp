#pragma once
// Paper embeddings: binary store I/O, the deterministic fallback
// encoder, and cosine similarity.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace causalcite::embed {

using Vector = std::vector<float>;

// cos(u, v) in [-1, 1]; inputs must be same-dimension and non-zero.
double cosine_similarity(const Vector& u, const Vector& v);

double l2_norm(const Vector& v);
void normalize(Vector& v);  // throws ContractError on zero norm

// Hashed bag-of-words encoder used when no precomputed store is
// supplied. Same tokens => same vector, on any platform. Unit norm.
Vector fallback_encode(const std::vector<std::string>& tokens, std::uint32_t dims);

struct LoadReport {
    std::size_t loaded = 0;
    std::size_t renormalized = 0;          // ||v|| drifted past tolerance
    std::vector<std::string> unknown_ids;  // present in file, absent from corpus
};

class EmbeddingStore {
public:
    // Binary format: magic "CCEMB1", u32 dims, u64 count, then per
    // record u16 id length, id bytes, dims little-endian f32. Vectors
    // are renormalized to unit length on load; zero-norm or non-finite
    // vectors are a format error. `known_ids` (optional) flags ids that
    // the corpus does not contain.
    LoadReport load(const std::filesystem::path& path,
                    const std::vector<std::string>* known_ids = nullptr);

    void put(const std::string& paper_id, Vector v);  // normalizes; rejects zero norm
    const Vector* find(std::string_view paper_id) const;
    std::uint32_t dims() const { return dims_; }
    std::size_t size() const { return vectors_.size(); }

    // Writes the same binary format, records in ascending id byte order.
    void save(const std::filesystem::path& path) const;

private:
    std::uint32_t dims_ = 0;
    std::unordered_map<std::string, Vector> vectors_;
};

// Where a paper's vector comes from: a loaded store, or the fallback
// encoder applied to cleaned tokens on demand. nullopt means the paper
// has neither a stored vector nor cleanable text; callers skip (and
// count) such candidates. Implementations must be safe for concurrent
// calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::optional<Vector> vector_for(
        std::string_view paper_id,
        const std::vector<std::string>& cleaned_tokens) const = 0;
    virtual std::uint32_t dims() const = 0;
};

// Serves vectors from a store; ids absent from the store fall back to
// the encoder so partially-covered stores still work.
class StoreProvider final : public EmbeddingProvider {
public:
    explicit StoreProvider(const EmbeddingStore& store) : store_(store) {}
    std::optional<Vector> vector_for(
        std::string_view paper_id,
        const std::vector<std::string>& cleaned_tokens) const override;
    std::uint32_t dims() const override { return store_.dims(); }

private:
    const EmbeddingStore& store_;
};

class FallbackProvider final : public EmbeddingProvider {
public:
    explicit FallbackProvider(std::uint32_t dims) : dims_(dims) {}
    std::optional<Vector> vector_for(
        std::string_view paper_id,
        const std::vector<std::string>& cleaned_tokens) const override;
    std::uint32_t dims() const override { return dims_; }

private:
    std::uint32_t dims_;
};

}  // namespace causalcite::embed
