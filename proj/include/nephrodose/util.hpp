#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace nephrodose {

using Date = std::chrono::year_month_day;

// ISO-8601 calendar date, YYYY-MM-DD. Rejects non-existent dates.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);

// Calendar days from first to last (negative if last precedes first).
int days_between(const Date& first, const Date& last);

// Completed years between birth and the reference date.
int age_in_years(const Date& birth, const Date& at);

// Strict numeric parsing: the whole string must be consumed.
// '.' decimal separator, optional exponent; "inf" accepted for doubles.
std::optional<double> parse_number(std::string_view text);
std::optional<long> parse_integer(std::string_view text);

// Shortest representation that parses back to the same double.
std::string format_number(double value);
// Fixed decimals, '.' separator regardless of locale.
std::string format_fixed(double value, int decimals);

std::string trim(std::string_view text);

} // namespace nephrodose
