#pragma once
// Confounder-text preparation: mediator removal followed by tokenization.
//
// The cleaned text is what both the lexical index and the embedding side
// see. Numeric expressions and performance phrases describe how well a
// paper did (an effect of the treatment), so they are stripped before
// any similarity is computed. Only the topical words survive.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace causalcite::text_prep {

// One phrase per line, UTF-8, '#' comments and blank lines allowed.
// Matching is case-insensitive and word-boundary delimited.
class Blocklist {
public:
    // {"state-of-the-art", "state of the art", "sota", "outperform", ...}
    static const Blocklist& default_blocklist();
    static Blocklist from_file(const std::filesystem::path& path);
    static Blocklist from_phrases(std::vector<std::string> phrases);

    const std::vector<std::string>& phrases() const { return phrases_; }

private:
    // Lowercased, longest-first.
    std::vector<std::string> phrases_;
};

struct CleanedText {
    std::string paper_id;
    std::string text;                 // mediator-removed, whitespace-normalized
    std::vector<std::string> tokens;  // lowercase, order-preserving
};

// Strips numeric expressions (integers, decimals, comma-grouped numbers,
// percentages, ordinal suffixes attached to digits) and blocklist phrases,
// then collapses whitespace. Total and idempotent; output never contains
// a digit character.
std::string remove_mediator(std::string_view raw,
                            const Blocklist& blocklist = Blocklist::default_blocklist());

// Lowercases ASCII letters and splits on any character that is neither
// ASCII alphanumeric nor part of a multi-byte UTF-8 sequence. Empty
// tokens are dropped, order is preserved.
std::vector<std::string> tokenize(std::string_view text);

// title + " " + abstract -> remove_mediator -> tokenize.
CleanedText clean(std::string paper_id, std::string_view title, std::string_view abstract_text,
                  const Blocklist& blocklist = Blocklist::default_blocklist());

}  // namespace causalcite::text_prep
