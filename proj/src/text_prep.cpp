#include "causalcite/text_prep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "causalcite/error.hpp"

namespace causalcite::text_prep {

namespace {

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_alnum(char c) { return is_ascii_digit(c) || is_ascii_alpha(c); }
inline bool is_token_char(char c) {
    // Multi-byte UTF-8 sequences pass through as token characters.
    return is_ascii_alnum(c) || static_cast<unsigned char>(c) >= 0x80;
}
inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }

std::string ascii_lower_copy(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

// Consumes one numeric expression starting at s[i] (a digit, or a '.' that
// opens a decimal like ".5"). Returns one past the end of the expression.
size_t numeric_expression_end(std::string_view s, size_t i) {
    size_t j = i;
    if (s[j] == '.') ++j;  // leading decimal point
    while (j < s.size() && is_ascii_digit(s[j])) ++j;
    // Group/decimal separators followed by more digits: 1,000,000 or 3.14.15
    while (j + 1 < s.size() && (s[j] == '.' || s[j] == ',') && is_ascii_digit(s[j + 1])) {
        ++j;
        while (j < s.size() && is_ascii_digit(s[j])) ++j;
    }
    if (j < s.size() && s[j] == '%') {
        ++j;
    } else if (j + 1 < s.size()) {
        // Ordinal suffix directly attached to the digits: 1st, 2nd, 3rd, 4th.
        char a = ascii_lower(s[j]);
        char b = ascii_lower(s[j + 1]);
        bool ordinal = (a == 's' && b == 't') || (a == 'n' && b == 'd') ||
                       (a == 'r' && b == 'd') || (a == 't' && b == 'h');
        bool delimited = (j + 2 == s.size()) || !is_token_char(s[j + 2]);
        if (ordinal && delimited) j += 2;
    }
    return j;
}

std::string strip_numbers(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (is_ascii_digit(c) || (c == '.' && i + 1 < s.size() && is_ascii_digit(s[i + 1]))) {
            i = numeric_expression_end(s, i);
            out.push_back(' ');
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // also trims leading whitespace
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_ws) out.push_back(' ');
            in_ws = true;
        } else {
            out.push_back(c);
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

// Word-boundary delimited, case-insensitive literal phrase removal.
std::string strip_phrases(const std::string& s, const std::vector<std::string>& phrases) {
    if (phrases.empty() || s.empty()) return s;
    std::string lower = ascii_lower_copy(s);
    std::vector<bool> erase(s.size(), false);
    for (const std::string& phrase : phrases) {
        if (phrase.empty()) continue;
        size_t pos = 0;
        while ((pos = lower.find(phrase, pos)) != std::string::npos) {
            size_t end = pos + phrase.size();
            bool left_ok = pos == 0 || !is_token_char(lower[pos - 1]);
            bool right_ok = end == lower.size() || !is_token_char(lower[end]);
            if (left_ok && right_ok) {
                std::fill(erase.begin() + long(pos), erase.begin() + long(end), true);
                pos = end;
            } else {
                ++pos;
            }
        }
    }
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (erase[i]) {
            if (out.empty() || out.back() != ' ') out.push_back(' ');
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

}  // namespace

const Blocklist& Blocklist::default_blocklist() {
    static const Blocklist instance = Blocklist::from_phrases({
        "state-of-the-art",
        "state of the art",
        "sota",
        "outperform",
        "outperforms",
        "outperformed",
        "new record",
        "best performance",
    });
    return instance;
}

Blocklist Blocklist::from_phrases(std::vector<std::string> phrases) {
    Blocklist b;
    for (std::string& p : phrases) {
        std::string low = collapse_whitespace(ascii_lower_copy(p));
        if (!low.empty()) b.phrases_.push_back(std::move(low));
    }
    std::sort(b.phrases_.begin(), b.phrases_.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return x < y;
    });
    b.phrases_.erase(std::unique(b.phrases_.begin(), b.phrases_.end()), b.phrases_.end());
    return b;
}

Blocklist Blocklist::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("blocklist file not found: " + path.string());
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = collapse_whitespace(line);
        if (!line.empty()) phrases.push_back(line);
    }
    return from_phrases(std::move(phrases));
}

std::string remove_mediator(std::string_view raw, const Blocklist& blocklist) {
    std::string cur = collapse_whitespace(raw);
    // Phrase removal can, in pathological inputs, splice a new blocklist
    // phrase together; iterate to a fixpoint so the op is idempotent.
    for (int round = 0; round < 8; ++round) {
        std::string next = collapse_whitespace(strip_numbers(cur));
        next = collapse_whitespace(strip_phrases(next, blocklist.phrases()));
        if (next == cur) break;
        cur = std::move(next);
    }
    return cur;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (is_token_char(c)) {
            cur.push_back(ascii_lower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

CleanedText clean(std::string paper_id, std::string_view title, std::string_view abstract_text,
                  const Blocklist& blocklist) {
    std::string raw;
    raw.reserve(title.size() + abstract_text.size() + 1);
    raw.append(title);
    if (!abstract_text.empty()) {
        raw.push_back(' ');
        raw.append(abstract_text);
    }
    CleanedText out;
    out.paper_id = std::move(paper_id);
    out.text = remove_mediator(raw, blocklist);
    out.tokens = tokenize(out.text);
    return out;
}

}  // namespace causalcite::text_prep
