#include "scamhunt/textprep.hpp"

#include "scamhunt/errors.hpp"
#include "scamhunt/tables.hpp"

#include "json.hpp"

#include <algorithm>

namespace scamhunt::textprep {

namespace {

/// Splits a table file into (line number, key, value) rows.
template <typename F>
void for_each_row(std::string_view tsv, F&& f) {
    std::size_t line_no = 0;
    while (!tsv.empty()) {
        const auto nl = tsv.find('\n');
        std::string_view line = tsv.substr(0, nl);
        tsv.remove_prefix(nl == std::string_view::npos ? tsv.size() : nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.starts_with("# ")) continue;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0) throw ParseError(line_no, "expected <key>\\t<value>");
        f(line_no, line.substr(0, tab), line.substr(tab + 1));
    }
}

bool in_emoji_blocks(char32_t cp) {
    return (cp >= 0x1F000 && cp <= 0x1FAFF)   // mahjong .. symbols & pictographs ext-A
           || (cp >= 0x2600 && cp <= 0x27BF)  // misc symbols, dingbats
           || (cp >= 0xFE00 && cp <= 0xFE0F)  // variation selectors
           || cp == 0x200D || cp == 0x20E3    // ZWJ, combining keycap
           || (cp >= 0xE0020 && cp <= 0xE007F);  // tag characters (subdivision flags)
}

bool is_space(char32_t cp) {
    switch (cp) {
        case ' ': case '\t': case '\n': case '\v': case '\f': case '\r':
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

char32_t lower_cp(char32_t c) {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    if ((c >= 0x100 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) return (c % 2 == 0) ? c + 1 : c;
    if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
    if (c == 0x178) return 0xFF;
    if ((c >= 0x391 && c <= 0x3A1) || (c >= 0x3A3 && c <= 0x3AB)) return c + 32;
    if (c == 0x386) return 0x3AC;
    if (c >= 0x388 && c <= 0x38A) return c + 37;
    if (c == 0x38C) return 0x3CC;
    if (c == 0x38E || c == 0x38F) return c + 63;
    if (c >= 0x410 && c <= 0x42F) return c + 32;
    if (c >= 0x400 && c <= 0x40F) return c + 80;
    return c;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return out;
}

constexpr std::string_view kLeadPunct = "\"'([";
constexpr std::string_view kTrailPunct = ".,!?;:)]\"'";

}  // namespace

std::optional<char32_t> next_codepoint(std::string_view s, std::size_t& pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return std::nullopt;
    }
    if (pos + len > s.size()) {
        ++pos;
        return std::nullopt;
    }
    for (int i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return std::nullopt;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return std::nullopt;
    }
    pos += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string lowercase(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t start = pos;
        auto cp = next_codepoint(text, pos);
        if (!cp) {
            out += text[start];
            continue;
        }
        append_utf8(out, lower_cp(*cp));
    }
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t start = pos;
        auto cp = next_codepoint(text, pos);
        if (cp && is_space(*cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out.append(text.substr(start, pos - start));
    }
    return out;
}

std::size_t count_words(std::string_view text) {
    std::size_t words = 0;
    bool in_word = false;
    for (std::size_t pos = 0; pos < text.size();) {
        auto cp = next_codepoint(text, pos);
        const bool space = cp && is_space(*cp);
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

EmojiTable EmojiTable::parse(std::string_view tsv) {
    EmojiTable t;
    for_each_row(tsv, [&](std::size_t line_no, std::string_view key, std::string_view value) {
        if (value.size() < 3 || value.front() != ':' || value.back() != ':') {
            throw ParseError(line_no, "emoji replacement must be a :name: shortcode");
        }
        for (std::size_t pos = 0; pos < key.size();) {
            auto cp = next_codepoint(key, pos);
            if (!cp) throw ParseError(line_no, "emoji key is not valid UTF-8");
            if (*cp >= 0x80) t.key_codepoints_.insert(*cp);
        }
        t.map_.emplace(std::string(key), std::string(value));
        t.max_key_bytes_ = std::max(t.max_key_bytes_, key.size());
    });
    return t;
}

const EmojiTable& EmojiTable::builtin() {
    static const EmojiTable table = parse(tables::load("emoji.tsv"));
    return table;
}

const std::string* EmojiTable::lookup(std::string_view sequence) const {
    auto it = map_.find(std::string(sequence));
    return it == map_.end() ? nullptr : &it->second;
}

bool EmojiTable::is_emoji_codepoint(char32_t cp) const {
    return in_emoji_blocks(cp) || key_codepoints_.count(cp) > 0;
}

std::string EmojiTable::replace(std::string_view text) const {
    std::string out;
    out.reserve(text.size());
    std::string probe;
    for (std::size_t pos = 0; pos < text.size();) {
        const auto c = static_cast<unsigned char>(text[pos]);
        // Keys start with a non-ASCII byte or with a keycap base (#, *, 0-9).
        if (c >= 0x80 || c == '#' || c == '*' || (c >= '0' && c <= '9')) {
            const std::size_t longest = std::min(max_key_bytes_, text.size() - pos);
            bool matched = false;
            for (std::size_t len = longest; len > 0; --len) {
                probe.assign(text.substr(pos, len));
                if (auto it = map_.find(probe); it != map_.end()) {
                    out += ' ';
                    out += it->second;
                    out += ' ';
                    pos += len;
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
        }
        const std::size_t start = pos;
        auto cp = next_codepoint(text, pos);
        if (cp && *cp >= 0x80 && is_emoji_codepoint(*cp)) continue;  // unknown emoji: dropped
        out.append(text.substr(start, pos - start));
    }
    return out;
}

SlangTable SlangTable::parse(std::string_view tsv) {
    SlangTable t;
    for_each_row(tsv, [&](std::size_t line_no, std::string_view key, std::string_view value) {
        if (value.empty() || std::any_of(value.begin(), value.end(),
                                         [](char ch) { return static_cast<unsigned char>(ch) >= 0x80; })) {
            throw ParseError(line_no, "slang replacement must be non-empty ASCII");
        }
        t.map_.emplace(ascii_lower(key), std::string(value));
    });
    return t;
}

const SlangTable& SlangTable::builtin() {
    static const SlangTable table = parse(tables::load("slang.tsv"));
    return table;
}

const std::string* SlangTable::lookup(std::string_view word) const {
    auto it = map_.find(ascii_lower(word));
    return it == map_.end() ? nullptr : &it->second;
}

std::string SlangTable::expand(std::string_view text) const {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto ws = text.find_first_of(" \t\n\r\v\f", pos);
        const std::size_t end = ws == std::string_view::npos ? text.size() : ws;
        std::string_view word = text.substr(pos, end - pos);
        const bool shortcode = word.size() > 2 && word.front() == ':' && word.back() == ':';
        if (!word.empty() && !shortcode) {
            const auto lead = std::min(word.find_first_not_of(kLeadPunct), word.size());
            const auto last = word.find_last_not_of(kTrailPunct);
            const std::size_t core_end = last == std::string_view::npos ? lead : std::max(lead, last + 1);
            if (auto rep = lookup(word.substr(lead, core_end - lead)); rep && core_end > lead) {
                out.append(word.substr(0, lead));
                out.append(*rep);
                out.append(word.substr(core_end));
            } else {
                out.append(word);
            }
        } else {
            out.append(word);
        }
        if (end < text.size()) out += text[end];
        pos = end + 1;
    }
    return out;
}

HttpTranslator::HttpTranslator(net::HttpTransport& transport, std::string endpoint, std::string api_key)
    : transport_(transport), endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {}

std::string HttpTranslator::translate(std::string_view text) {
    nlohmann::json req = {{"q", text}, {"source", "auto"}, {"target", "en"}, {"format", "text"}};
    if (!api_key_.empty()) req["api_key"] = api_key_;
    auto resp = transport_.post(endpoint_, {}, req.dump(), "application/json");
    net::raise_for_status(resp, endpoint_);
    auto body = nlohmann::json::parse(resp.body, nullptr, false);
    if (body.is_discarded() || !body.contains("translatedText")) {
        throw Error("translation service returned no translatedText");
    }
    return body["translatedText"].get<std::string>();
}

Normalizer::Normalizer()
    : Normalizer(EmojiTable::builtin(), SlangTable::builtin(), std::make_shared<IdentityTranslator>()) {}

Normalizer::Normalizer(EmojiTable emoji, SlangTable slang, std::shared_ptr<Translator> translator)
    : emoji_(std::move(emoji)),
      slang_(std::move(slang)),
      translator_(translator ? std::move(translator) : std::make_shared<IdentityTranslator>()),
      failures_(std::make_shared<std::atomic<std::size_t>>(0)) {}

std::string Normalizer::normalize_text(std::string_view title, std::string_view description) const {
    std::string text = std::string(title) + " " + std::string(description);
    if (collapse_whitespace(text).size() > 0) {
        try {
            text = translator_->translate(text);
        } catch (const std::exception&) {
            ++*failures_;
        }
    }
    return collapse_whitespace(lowercase(slang_.expand(emoji_.replace(text))));
}

NormalizedText Normalizer::normalize(std::string_view list_id, std::string_view title,
                                     std::string_view description) const {
    NormalizedText out;
    out.source_list_id = std::string(list_id);
    out.text = normalize_text(title, description);
    out.word_count = count_words(out.text);
    return out;
}

std::vector<NormalizedText> dedup_and_filter(std::vector<NormalizedText> records) {
    std::unordered_set<std::string> seen;
    std::vector<NormalizedText> out;
    for (auto& r : records) {
        if (!seen.insert(r.text).second) continue;
        if (r.word_count < 2) continue;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace scamhunt::textprep
