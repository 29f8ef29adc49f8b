#include "nephrodose/rule_dsl.hpp"

#include <cctype>
#include <cmath>

#include "nephrodose/util.hpp"

namespace nephrodose {

std::string ParseError::message() const {
    return "parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
           ": expected " + expected + ", found " + found;
}

namespace {

enum class TokenKind { Word, Number, String, Punct, Cmp, Eol, Eof };

struct Token {
    TokenKind kind = TokenKind::Eof;
    std::string text;   // raw lexeme; decoded content for strings
    int line = 1;
    int column = 1;
};

std::string describe(const Token& token) {
    switch (token.kind) {
    case TokenKind::Word: return "'" + token.text + "'";
    case TokenKind::Number: return "number '" + token.text + "'";
    case TokenKind::String: return "string";
    case TokenKind::Punct:
    case TokenKind::Cmp: return "'" + token.text + "'";
    case TokenKind::Eol: return "end of line";
    case TokenKind::Eof: return "end of input";
    }
    return "token";
}

bool is_word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Lexer {
public:
    explicit Lexer(std::string_view source) : source_(source) {}

    std::vector<Token> run() {
        while (pos_ < source_.size()) {
            const char c = source_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (pos_ < source_.size() && source_[pos_] != '\n') advance();
            } else if (c == '\n') {
                // Collapse blank and comment-only lines: at most one Eol
                // between payload tokens.
                if (!tokens_.empty() && tokens_.back().kind != TokenKind::Eol) {
                    push(TokenKind::Eol, "\n");
                }
                newline();
            } else if (c == '"') {
                lex_string();
            } else if (is_digit(c) || (c == '-' && pos_ + 1 < source_.size() &&
                                       (is_digit(source_[pos_ + 1]) || source_[pos_ + 1] == '.'))) {
                lex_number();
            } else if (is_word_start(c)) {
                lex_word();
            } else if (c == '{' || c == '}' || c == '[' || c == ')' || c == ',') {
                push(TokenKind::Punct, std::string(1, c));
                advance();
            } else if (c == '<' || c == '>') {
                std::string text(1, c);
                advance();
                if (pos_ < source_.size() && source_[pos_] == '=') {
                    text.push_back('=');
                    advance();
                }
                push_at(TokenKind::Cmp, text, line_, column_ - static_cast<int>(text.size()));
            } else {
                fail("a token", "'" + std::string(1, c) + "'", line_, column_);
            }
        }
        if (!tokens_.empty() && tokens_.back().kind != TokenKind::Eol) push(TokenKind::Eol, "\n");
        push(TokenKind::Eof, "");
        return std::move(tokens_);
    }

private:
    void advance() {
        ++pos_;
        ++column_;
    }
    void newline() {
        ++pos_;
        ++line_;
        column_ = 1;
    }
    void push(TokenKind kind, std::string text) { push_at(kind, std::move(text), line_, column_); }
    void push_at(TokenKind kind, std::string text, int line, int column) {
        tokens_.push_back({kind, std::move(text), line, column});
    }
    [[noreturn]] void fail(std::string expected, std::string found, int line, int column) {
        throw RuleParseError({line, column, std::move(expected), std::move(found)});
    }

    void lex_string() {
        const int start_line = line_;
        const int start_col = column_;
        advance(); // opening quote
        std::string decoded;
        while (pos_ < source_.size()) {
            const char c = source_[pos_];
            if (c == '"') {
                advance();
                push_at(TokenKind::String, decoded, start_line, start_col);
                return;
            }
            if (c == '\n') break;
            if (c == '\\') {
                advance();
                if (pos_ >= source_.size()) break;
                const char esc = source_[pos_];
                if (esc == '"' || esc == '\\') {
                    decoded.push_back(esc);
                    advance();
                } else {
                    fail("escape '\\\"' or '\\\\'", "'\\" + std::string(1, esc) + "'", line_,
                         column_ - 1);
                }
            } else {
                decoded.push_back(c);
                advance();
            }
        }
        fail("closing '\"'", "end of line", start_line, start_col);
    }

    void lex_number() {
        const int start_line = line_;
        const int start_col = column_;
        const std::size_t start = pos_;
        if (source_[pos_] == '-') advance();
        while (pos_ < source_.size() && (is_digit(source_[pos_]) || source_[pos_] == '.')) advance();
        if (pos_ < source_.size() && (source_[pos_] == 'e' || source_[pos_] == 'E')) {
            advance();
            if (pos_ < source_.size() && (source_[pos_] == '+' || source_[pos_] == '-')) advance();
            while (pos_ < source_.size() && is_digit(source_[pos_])) advance();
        }
        std::string text(source_.substr(start, pos_ - start));
        if (!parse_number(text)) fail("a number", "'" + text + "'", start_line, start_col);
        push_at(TokenKind::Number, std::move(text), start_line, start_col);
    }

    void lex_word() {
        const int start_line = line_;
        const int start_col = column_;
        const std::size_t start = pos_;
        while (pos_ < source_.size() && is_word_char(source_[pos_])) advance();
        push_at(TokenKind::Word, std::string(source_.substr(start, pos_ - start)), start_line,
                start_col);
    }

    std::string_view source_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    std::vector<Token> tokens_;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    RulePack parse() {
        RulePack pack;
        if (peek().kind == TokenKind::Eof) {
            fail("pack header ('pack \"<name>\" version \"<version>\"')", peek());
        }
        expect_word("pack");
        pack.name = expect_string("pack name string");
        expect_word("version");
        pack.version = expect_string("version string");
        expect_eol();
        while (peek().kind != TokenKind::Eof) {
            pack.rulesets.push_back(parse_medication());
        }
        return pack;
    }

private:
    const Token& peek() const { return tokens_[index_]; }
    const Token& take() { return tokens_[index_++]; }

    [[noreturn]] void fail(std::string expected, const Token& found) {
        throw RuleParseError({found.line, found.column, std::move(expected), describe(found)});
    }

    void expect_word(std::string_view word) {
        const Token& token = peek();
        if (token.kind != TokenKind::Word || token.text != word) {
            fail("'" + std::string(word) + "'", token);
        }
        take();
    }

    bool peek_word(std::string_view word) const {
        return peek().kind == TokenKind::Word && peek().text == word;
    }

    std::string expect_identifier(std::string what) {
        const Token& token = peek();
        if (token.kind != TokenKind::Word) fail(std::move(what), token);
        return take().text;
    }

    std::string expect_string(std::string what) {
        const Token& token = peek();
        if (token.kind != TokenKind::String) fail(std::move(what), token);
        return take().text;
    }

    double expect_number(std::string what) {
        const Token& token = peek();
        if (token.kind != TokenKind::Number) fail(std::move(what), token);
        return *parse_number(take().text);
    }

    int expect_int(std::string what) {
        const Token& token = peek();
        if (token.kind != TokenKind::Number) fail(what, token);
        const auto value = parse_integer(token.text);
        if (!value) fail(std::move(what), token);
        take();
        return static_cast<int>(*value);
    }

    void expect_punct(char c) {
        const Token& token = peek();
        if (token.kind != TokenKind::Punct || token.text[0] != c) {
            fail("'" + std::string(1, c) + "'", token);
        }
        take();
    }

    bool peek_punct(char c) const {
        return peek().kind == TokenKind::Punct && peek().text[0] == c;
    }

    void expect_eol() {
        const Token& token = peek();
        if (token.kind == TokenKind::Eof) return;
        if (token.kind != TokenKind::Eol) fail("end of line", token);
        take();
    }

    MedicationRuleSet parse_medication() {
        MedicationRuleSet ruleset;
        expect_word("medication");
        ruleset.medication_code = expect_identifier("medication code");
        ruleset.medication_name = expect_string("medication name string");
        expect_word("unit");
        const Token& unit_token = peek();
        const auto unit = parse_dose_unit(expect_identifier("dose unit (mg, g, MIU or mg_per_kg)"));
        if (!unit) fail("dose unit (mg, g, MIU or mg_per_kg)", unit_token);
        ruleset.dose_unit = *unit;
        expect_punct('{');
        expect_eol();
        while (!peek_punct('}')) {
            ruleset.bands.push_back(parse_band());
        }
        expect_punct('}');
        expect_eol();
        return ruleset;
    }

    EgfrBandRule parse_band() {
        EgfrBandRule band;
        if (!peek_word("band")) fail("'band' or '}'", peek());
        take();
        expect_punct('[');
        band.egfr_low = expect_number("band lower bound");
        expect_punct(',');
        if (peek_word("inf")) {
            take();
            band.egfr_high = std::numeric_limits<double>::infinity();
        } else {
            band.egfr_high = expect_number("band upper bound or 'inf'");
        }
        expect_punct(')');
        expect_punct('{');
        expect_eol();

        // Fields follow the canonical order; a repeated key therefore
        // fails with the key named in "found" rather than self-overwriting.
        expect_word("id");
        band.rule_id = expect_identifier("rule id");
        expect_eol();
        if (peek_word("max_daily")) {
            take();
            band.max_daily_dose = expect_number("max_daily value");
            expect_eol();
        }
        if (peek_word("min_daily")) {
            take();
            band.min_daily_dose = expect_number("min_daily value");
            expect_eol();
        }
        if (peek_word("max_freq")) {
            take();
            band.max_frequency_per_day = expect_int("max_freq integer");
            expect_eol();
        }
        while (peek_word("guard")) {
            take();
            CovariateGuard guard;
            const Token& cov_token = peek();
            const auto covariate = parse_covariate(expect_identifier("guard covariate"));
            if (!covariate) {
                fail("guard covariate (weight_kg, systolic_bp_mmHg, "
                     "plasma_concentration_mg_per_l or treatment_duration_days)",
                     cov_token);
            }
            guard.covariate = *covariate;
            const Token& cmp_token = peek();
            if (cmp_token.kind != TokenKind::Cmp) fail("comparator (<, <=, > or >=)", cmp_token);
            guard.comparator = *parse_comparator(take().text);
            guard.threshold = expect_number("guard threshold");
            expect_eol();
            band.guards.push_back(guard);
        }
        expect_word("recommend");
        band.recommendation = expect_string("recommendation string");
        expect_eol();
        expect_punct('}');
        expect_eol();
        return band;
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
};

void append_escaped(std::string& out, std::string_view text) {
    out.push_back('"');
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
}

} // namespace

RulePack parse_rule_pack(std::string_view source) {
    return Parser(Lexer(source).run()).parse();
}

std::string serialize_rule_pack(const RulePack& pack) {
    std::string out;
    out += "pack ";
    append_escaped(out, pack.name);
    out += " version ";
    append_escaped(out, pack.version);
    out += "\n";
    for (const auto& ruleset : pack.rulesets) {
        out += "medication " + ruleset.medication_code + " ";
        append_escaped(out, ruleset.medication_name);
        out += " unit ";
        out += dose_unit_token(ruleset.dose_unit);
        out += " {\n";
        for (const auto& band : ruleset.bands) {
            out += "  band [" + format_number(band.egfr_low) + ", ";
            out += std::isinf(band.egfr_high) ? "inf" : format_number(band.egfr_high);
            out += ") {\n";
            out += "    id " + band.rule_id + "\n";
            if (band.max_daily_dose) {
                out += "    max_daily " + format_number(*band.max_daily_dose) + "\n";
            }
            if (band.min_daily_dose) {
                out += "    min_daily " + format_number(*band.min_daily_dose) + "\n";
            }
            if (band.max_frequency_per_day) {
                out += "    max_freq " + std::to_string(*band.max_frequency_per_day) + "\n";
            }
            for (const auto& guard : band.guards) {
                out += "    guard ";
                out += covariate_token(guard.covariate);
                out += " ";
                out += comparator_token(guard.comparator);
                out += " " + format_number(guard.threshold) + "\n";
            }
            out += "    recommend ";
            append_escaped(out, band.recommendation);
            out += "\n  }\n";
        }
        out += "}\n";
    }
    return out;
}

} // namespace nephrodose
