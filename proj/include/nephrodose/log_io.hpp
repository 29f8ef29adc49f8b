#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nephrodose/analytics.hpp"
#include "nephrodose/engine.hpp"
#include "nephrodose/expected.hpp"
#include "nephrodose/prescription.hpp"

namespace nephrodose {

struct LogIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RowError {
    int row_number = 0; // 1-based file row (the header is row 1)
    std::string message;
};

struct LogParseResult {
    std::vector<PrescriptionLine> lines;
    std::vector<RowError> row_errors;
};

// Prescription-log CSV (column set in docs/formats.md). Malformed data
// rows are collected, never fatal; a missing or wrong header throws
// LogIoError.
LogParseResult parse_prescription_log(std::string_view text);
LogParseResult parse_prescription_log_file(const std::string& path);

void write_prescription_log(std::span<const PrescriptionLine> lines, std::ostream& out);
std::string prescription_log_to_string(std::span<const PrescriptionLine> lines);

struct ExclusionSummary {
    long total = 0;
    long conditional_excluded = 0;
    long unanalyzed_excluded = 0;
    long analyzed = 0;

    double conditional_pct() const;
    double unanalyzed_pct() const;
    double analyzed_pct() const;
};

// Study-flow exclusions: conditional lines (no dose) first, then lines
// without a reference verdict. A line that is both counts as conditional.
struct ExclusionResult {
    std::vector<PrescriptionLine> analysis_set;
    ExclusionSummary summary;
};

ExclusionResult apply_exclusions(std::span<const PrescriptionLine> lines);

// Compact regimen notation: "<number><unit> x<int>", unit one of
// mg, g, MIU, mg/kg. On failure the error carries the offending fragment.
Expected<DoseRegimen, std::string> parse_regimen(std::string_view text);

// Verdict-log CSV: one row per record, engine and reference verdicts side
// by side. Reading back reproduces the records exactly.
void write_verdict_log(std::span<const VerdictRecord> records, std::ostream& out);
void write_verdict_log_file(std::span<const VerdictRecord> records, const std::string& path);
std::string verdict_log_to_string(std::span<const VerdictRecord> records);

struct VerdictLogParseResult {
    std::vector<VerdictRecord> records;
    std::vector<RowError> row_errors;
};

VerdictLogParseResult parse_verdict_log(std::string_view text);
VerdictLogParseResult parse_verdict_log_file(const std::string& path);

// Adjudication CSV: {record_ref, agrees_with, reason_category, severity}.
struct AdjudicationParseResult {
    std::vector<AdjudicationRow> rows;
    std::vector<RowError> row_errors;
};

AdjudicationParseResult parse_adjudications(std::string_view text);
AdjudicationParseResult parse_adjudications_file(const std::string& path);
void write_adjudications(std::span<const AdjudicationRow> rows, std::ostream& out);

// Gold-label CSV: {record_ref, should_fire} with should_fire in {yes, no}.
struct GoldParseResult {
    std::map<std::string, bool> labels;
    std::vector<RowError> row_errors;
};

GoldParseResult parse_gold_labels(std::string_view text);
GoldParseResult parse_gold_labels_file(const std::string& path);
void write_gold_labels(const std::map<std::string, bool>& labels, std::ostream& out);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

} // namespace nephrodose
