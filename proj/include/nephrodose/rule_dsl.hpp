#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "nephrodose/rulepack.hpp"

namespace nephrodose {

// Position and expectation at the first syntax error. line/column are
// 1-based and point into the source text.
struct ParseError {
    int line = 1;
    int column = 1;
    std::string expected;
    std::string found;

    std::string message() const;
};

class RuleParseError : public std::runtime_error {
public:
    explicit RuleParseError(ParseError info)
        : std::runtime_error(info.message()), info_(std::move(info)) {}

    const ParseError& info() const { return info_; }

private:
    ParseError info_;
};

// Parses rule-pack text (see docs/formats.md for the grammar). Returns the
// pack AST without running validate_pack; structural validity is a
// separate, reportable step. Throws RuleParseError on the first syntax
// error.
RulePack parse_rule_pack(std::string_view source);

// Canonical text form: parse_rule_pack(serialize_rule_pack(pack)) is
// structurally equal to pack.
std::string serialize_rule_pack(const RulePack& pack);

} // namespace nephrodose
