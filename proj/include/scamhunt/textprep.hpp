#pragma once

#include "scamhunt/net.hpp"

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace scamhunt::textprep {

/// Classifier-ready text of one list.
struct NormalizedText {
    std::string source_list_id;
    std::string text;  // lowercase, single-spaced, emoji replaced by :name: shortcodes
    std::size_t word_count = 0;

    friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
};

/// Turns arbitrary-language text into English. Implementations may throw;
/// the normalizer then keeps the original text.
class Translator {
public:
    virtual ~Translator() = default;
    virtual std::string translate(std::string_view text) = 0;
};

class IdentityTranslator final : public Translator {
public:
    std::string translate(std::string_view text) override { return std::string(text); }
};

/// LibreTranslate-style service: POST {endpoint} with {"q","source":"auto","target":"en"}.
class HttpTranslator final : public Translator {
public:
    HttpTranslator(net::HttpTransport& transport, std::string endpoint, std::string api_key = {});
    std::string translate(std::string_view text) override;

private:
    net::HttpTransport& transport_;
    std::string endpoint_;
    std::string api_key_;
};

/// Emoji sequence -> ":name:" shortcode, matched longest-first.
class EmojiTable {
public:
    /// Rows are "<sequence>\t:<name>:"; lines starting with "# " are comments.
    static EmojiTable parse(std::string_view tsv);
    static const EmojiTable& builtin();

    /// Replaces known sequences by " :name: " and deletes any remaining
    /// emoji codepoint.
    std::string replace(std::string_view text) const;
    const std::string* lookup(std::string_view sequence) const;
    /// True for codepoints of the Unicode emoji blocks and for every
    /// non-ASCII codepoint used by a table key.
    bool is_emoji_codepoint(char32_t cp) const;

    std::size_t size() const noexcept { return map_.size(); }
    const std::unordered_map<std::string, std::string>& entries() const noexcept { return map_; }

private:
    std::unordered_map<std::string, std::string> map_;
    std::unordered_set<char32_t> key_codepoints_;
    std::size_t max_key_bytes_ = 0;
};

/// Word-level slang expansion ("u" -> "you"), case-insensitive.
class SlangTable {
public:
    /// Rows are "<surface>\t<ascii replacement>"; "# " comments allowed.
    static SlangTable parse(std::string_view tsv);
    static const SlangTable& builtin();

    /// Expands each whitespace-separated word whose core (surrounding
    /// punctuation removed) is in the table. Whitespace is kept as is.
    std::string expand(std::string_view text) const;
    const std::string* lookup(std::string_view word) const;
    std::size_t size() const noexcept { return map_.size(); }

private:
    std::unordered_map<std::string, std::string> map_;
};

/// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters.
/// Invalid UTF-8 bytes pass through unchanged.
std::string lowercase(std::string_view text);
/// Collapses runs of Unicode whitespace into one ASCII space and trims.
std::string collapse_whitespace(std::string_view text);
/// Number of maximal non-whitespace runs.
std::size_t count_words(std::string_view text);

/// Decodes one codepoint at `pos`, advancing it. Returns nullopt (advancing
/// by one byte) on a malformed sequence.
std::optional<char32_t> next_codepoint(std::string_view s, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

/// translate -> emoji -> slang -> lowercase -> whitespace collapse.
class Normalizer {
public:
    Normalizer();
    Normalizer(EmojiTable emoji, SlangTable slang, std::shared_ptr<Translator> translator);

    NormalizedText normalize(std::string_view list_id, std::string_view title,
                             std::string_view description) const;
    std::string normalize_text(std::string_view title, std::string_view description) const;

    /// Translator calls that threw and fell back to the original text.
    std::size_t translation_failures() const noexcept { return failures_->load(); }

private:
    EmojiTable emoji_;
    SlangTable slang_;
    std::shared_ptr<Translator> translator_;
    std::shared_ptr<std::atomic<std::size_t>> failures_;
};

/// Drops repeated texts (first occurrence wins) and texts of fewer than two words.
std::vector<NormalizedText> dedup_and_filter(std::vector<NormalizedText> records);

}  // namespace scamhunt::textprep
