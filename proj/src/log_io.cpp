#include "nephrodose/log_io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nephrodose/csv.hpp"
#include "nephrodose/util.hpp"

namespace nephrodose {

namespace {

constexpr std::array<std::string_view, 18> kLogColumns = {
    "patient_id",     "encounter_id",     "birth_date",
    "sex",            "department",       "medication_code",
    "medication_name", "dose_amount",     "dose_unit",
    "frequency_per_day", "start_date",    "end_date",
    "egfr",           "serum_creatinine", "weight",
    "systolic_bp",    "plasma_concentration", "reference_verdict",
};

constexpr std::array<std::string_view, 10> kVerdictColumns = {
    "patient_id", "encounter_id", "medication_code",    "engine_verdict", "alert_kind",
    "rule_id",    "recommendation", "reference_verdict", "egfr",          "daily_dose_mg",
};

bool header_matches(const std::vector<std::string>& row, std::span<const std::string_view> expected) {
    if (row.size() != expected.size()) return false;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (trim(row[i]) != expected[i]) return false;
    }
    return true;
}

std::string join_columns(std::span<const std::string_view> columns) {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i != 0) out += ",";
        out += columns[i];
    }
    return out;
}

struct RowCursor {
    const std::vector<std::string>& fields;
    std::string error; // first problem wins

    void complain(std::string_view column, std::string_view detail) {
        if (error.empty()) {
            error = std::string(column) + ": " + std::string(detail);
        }
    }
};

std::optional<double> optional_number(RowCursor& cursor, std::size_t index,
                                      std::string_view column, double min_value,
                                      bool exclusive) {
    const std::string& field = cursor.fields[index];
    if (field.empty()) return std::nullopt;
    const auto value = parse_number(field);
    const bool in_range = value && std::isfinite(*value) &&
                          (exclusive ? *value > min_value : *value >= min_value);
    if (!in_range) {
        cursor.complain(column, "invalid number '" + field + "'");
        return std::nullopt;
    }
    return value;
}

Date required_date(RowCursor& cursor, std::size_t index, std::string_view column) {
    const auto date = parse_iso_date(cursor.fields[index]);
    if (!date) {
        cursor.complain(column, "invalid date '" + cursor.fields[index] + "'");
        return Date{};
    }
    return *date;
}

} // namespace

LogParseResult parse_prescription_log(std::string_view text) {
    csv::Reader reader(text);
    const auto header = reader.next();
    if (!header) throw LogIoError("missing header row");
    if (!header_matches(*header, kLogColumns)) {
        throw LogIoError("header must be: " + join_columns(kLogColumns));
    }

    LogParseResult result;
    while (auto row = reader.next()) {
        const int row_number = reader.record_line();
        if (row->size() != kLogColumns.size()) {
            result.row_errors.push_back({row_number, "expected " +
                                                         std::to_string(kLogColumns.size()) +
                                                         " fields, found " +
                                                         std::to_string(row->size())});
            continue;
        }
        RowCursor cursor{*row, {}};
        PrescriptionLine line;
        line.patient_id = (*row)[0];
        line.encounter_id = (*row)[1];
        line.birth_date = required_date(cursor, 2, "birth_date");
        if (const auto sex = parse_sex((*row)[3])) line.sex = *sex;
        else cursor.complain("sex", "expected male or female, got '" + (*row)[3] + "'");
        line.department = (*row)[4];
        line.medication_code = (*row)[5];
        if (line.medication_code.empty()) cursor.complain("medication_code", "must not be empty");
        line.medication_name = (*row)[6];

        const std::string& amount_field = (*row)[7];
        const std::string& unit_field = (*row)[8];
        const std::string& freq_field = (*row)[9];
        const bool any_regimen = !amount_field.empty() || !unit_field.empty() || !freq_field.empty();
        if (any_regimen) {
            DoseRegimen regimen;
            const auto amount = parse_number(amount_field);
            if (!amount || !std::isfinite(*amount) || !(*amount > 0.0)) {
                cursor.complain("dose_amount", "invalid dose '" + amount_field + "'");
            } else {
                regimen.amount = *amount;
            }
            if (const auto unit = parse_dose_unit(unit_field)) regimen.unit = *unit;
            else cursor.complain("dose_unit", "unknown unit '" + unit_field + "'");
            const auto freq = parse_integer(freq_field);
            if (!freq || *freq < 1) {
                cursor.complain("frequency_per_day", "invalid frequency '" + freq_field + "'");
            } else {
                regimen.frequency_per_day = static_cast<int>(*freq);
            }
            line.regimen = regimen;
        }

        line.start_date = required_date(cursor, 10, "start_date");
        line.end_date = required_date(cursor, 11, "end_date");
        if (cursor.error.empty() && days_between(line.start_date, line.end_date) < 0) {
            cursor.complain("end_date", "precedes start_date");
        }
        line.egfr = optional_number(cursor, 12, "egfr", 0.0, false);
        line.serum_creatinine = optional_number(cursor, 13, "serum_creatinine", 0.0, true);
        line.weight = optional_number(cursor, 14, "weight", 0.0, true);
        line.systolic_bp = optional_number(cursor, 15, "systolic_bp", 0.0, true);
        line.plasma_concentration = optional_number(cursor, 16, "plasma_concentration", 0.0, false);
        const std::string& verdict_field = (*row)[17];
        if (!verdict_field.empty()) {
            if (const auto verdict = parse_reference_verdict(verdict_field)) {
                line.reference_verdict = verdict;
            } else {
                cursor.complain("reference_verdict",
                                "expected ACCEPT, OVER or UNDER, got '" + verdict_field + "'");
            }
        }

        if (!cursor.error.empty()) {
            result.row_errors.push_back({row_number, cursor.error});
        } else {
            result.lines.push_back(std::move(line));
        }
    }
    return result;
}

LogParseResult parse_prescription_log_file(const std::string& path) {
    return parse_prescription_log(read_text_file(path));
}

void write_prescription_log(std::span<const PrescriptionLine> lines, std::ostream& out) {
    std::vector<std::string> row;
    row.assign(kLogColumns.begin(), kLogColumns.end());
    csv::write_row(out, row);
    for (const PrescriptionLine& line : lines) {
        row.clear();
        row.push_back(line.patient_id);
        row.push_back(line.encounter_id);
        row.push_back(format_iso_date(line.birth_date));
        row.push_back(std::string(sex_token(line.sex)));
        row.push_back(line.department);
        row.push_back(line.medication_code);
        row.push_back(line.medication_name);
        if (line.regimen) {
            row.push_back(format_number(line.regimen->amount));
            row.push_back(std::string(dose_unit_token(line.regimen->unit)));
            row.push_back(std::to_string(line.regimen->frequency_per_day));
        } else {
            row.insert(row.end(), 3, std::string{});
        }
        row.push_back(format_iso_date(line.start_date));
        row.push_back(format_iso_date(line.end_date));
        auto optional_field = [](const std::optional<double>& value) {
            return value ? format_number(*value) : std::string{};
        };
        row.push_back(optional_field(line.egfr));
        row.push_back(optional_field(line.serum_creatinine));
        row.push_back(optional_field(line.weight));
        row.push_back(optional_field(line.systolic_bp));
        row.push_back(optional_field(line.plasma_concentration));
        row.push_back(line.reference_verdict
                          ? std::string(reference_verdict_token(*line.reference_verdict))
                          : std::string{});
        csv::write_row(out, row);
    }
}

std::string prescription_log_to_string(std::span<const PrescriptionLine> lines) {
    std::ostringstream out;
    write_prescription_log(lines, out);
    return out.str();
}

double ExclusionSummary::conditional_pct() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(conditional_excluded) / total;
}
double ExclusionSummary::unanalyzed_pct() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(unanalyzed_excluded) / total;
}
double ExclusionSummary::analyzed_pct() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(analyzed) / total;
}

ExclusionResult apply_exclusions(std::span<const PrescriptionLine> lines) {
    ExclusionResult result;
    result.summary.total = static_cast<long>(lines.size());
    for (const PrescriptionLine& line : lines) {
        if (line.is_conditional()) {
            ++result.summary.conditional_excluded;
        } else if (!line.reference_verdict) {
            ++result.summary.unanalyzed_excluded;
        } else {
            result.analysis_set.push_back(line);
        }
    }
    result.summary.analyzed = static_cast<long>(result.analysis_set.size());
    return result;
}

Expected<DoseRegimen, std::string> parse_regimen(std::string_view text) {
    const std::string trimmed = trim(text);
    const auto space = trimmed.find(' ');
    if (space == std::string::npos) {
        return std::string("expected '<number><unit> x<int>', got '" + trimmed + "'");
    }
    const std::string dose_part = trimmed.substr(0, space);
    const std::string freq_part = trim(trimmed.substr(space + 1));

    std::size_t unit_start = 0;
    while (unit_start < dose_part.size() &&
           (std::isdigit(static_cast<unsigned char>(dose_part[unit_start])) ||
            dose_part[unit_start] == '.')) {
        ++unit_start;
    }
    if (unit_start == 0) return std::string("missing dose number in '" + dose_part + "'");
    const auto amount = parse_number(dose_part.substr(0, unit_start));
    if (!amount || !(*amount > 0.0)) {
        return std::string("invalid dose number in '" + dose_part + "'");
    }
    const std::string unit_text = dose_part.substr(unit_start);
    DoseRegimen regimen;
    regimen.amount = *amount;
    if (unit_text == "mg") regimen.unit = DoseUnit::Mg;
    else if (unit_text == "g") regimen.unit = DoseUnit::G;
    else if (unit_text == "MIU") regimen.unit = DoseUnit::Miu;
    else if (unit_text == "mg/kg") regimen.unit = DoseUnit::MgPerKg;
    else return std::string("unknown unit '" + unit_text + "'");

    if (freq_part.size() < 2 || freq_part[0] != 'x') {
        return std::string("expected frequency 'x<int>', got '" + freq_part + "'");
    }
    const auto freq = parse_integer(freq_part.substr(1));
    if (!freq || *freq < 1) {
        return std::string("invalid frequency '" + freq_part + "'");
    }
    regimen.frequency_per_day = static_cast<int>(*freq);
    return regimen;
}

namespace {

std::string optional_to_field(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string{};
}

std::string alert_kind_field(const Verdict& verdict) {
    switch (verdict.kind) {
    case VerdictKind::Accept: return {};
    case VerdictKind::AlertOverMaxDailyDose: return "OVER";
    case VerdictKind::AlertUnderDose: return "UNDER";
    case VerdictKind::Indeterminate: {
        std::string token{indeterminate_reason_token(*verdict.indeterminate_reason)};
        if (*verdict.indeterminate_reason == IndeterminateReason::MissingCovariate) {
            token += ":" + verdict.missing_covariate;
        }
        return token;
    }
    }
    return {};
}

} // namespace

void write_verdict_log(std::span<const VerdictRecord> records, std::ostream& out) {
    std::vector<std::string> row;
    row.assign(kVerdictColumns.begin(), kVerdictColumns.end());
    csv::write_row(out, row);
    for (const VerdictRecord& record : records) {
        row.clear();
        row.push_back(record.patient_id);
        row.push_back(record.encounter_id);
        row.push_back(record.medication_code);
        row.push_back(std::string(verdict_kind_token(record.verdict.kind)));
        row.push_back(alert_kind_field(record.verdict));
        row.push_back(record.verdict.rule_id);
        row.push_back(record.verdict.recommendation);
        row.push_back(record.reference_verdict
                          ? std::string(reference_verdict_token(*record.reference_verdict))
                          : std::string{});
        row.push_back(optional_to_field(record.egfr));
        row.push_back(optional_to_field(record.daily_dose));
        csv::write_row(out, row);
    }
}

void write_verdict_log_file(std::span<const VerdictRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LogIoError("cannot write " + path);
    write_verdict_log(records, out);
    if (!out.good()) throw LogIoError("write failed: " + path);
}

std::string verdict_log_to_string(std::span<const VerdictRecord> records) {
    std::ostringstream out;
    write_verdict_log(records, out);
    return out.str();
}

VerdictLogParseResult parse_verdict_log(std::string_view text) {
    csv::Reader reader(text);
    const auto header = reader.next();
    if (!header) throw LogIoError("missing header row");
    if (!header_matches(*header, kVerdictColumns)) {
        throw LogIoError("header must be: " + join_columns(kVerdictColumns));
    }

    VerdictLogParseResult result;
    while (auto row = reader.next()) {
        const int row_number = reader.record_line();
        if (row->size() != kVerdictColumns.size()) {
            result.row_errors.push_back({row_number, "expected " +
                                                         std::to_string(kVerdictColumns.size()) +
                                                         " fields, found " +
                                                         std::to_string(row->size())});
            continue;
        }
        RowCursor cursor{*row, {}};
        VerdictRecord record;
        record.patient_id = (*row)[0];
        record.encounter_id = (*row)[1];
        record.medication_code = (*row)[2];
        const std::string& verdict_field = (*row)[3];
        const std::string& alert_field = (*row)[4];
        record.verdict.rule_id = (*row)[5];
        record.verdict.recommendation = (*row)[6];
        if (verdict_field == "ACCEPT") {
            record.verdict.kind = VerdictKind::Accept;
            if (!alert_field.empty()) cursor.complain("alert_kind", "must be empty for ACCEPT");
        } else if (verdict_field == "ALERT") {
            if (alert_field == "OVER") record.verdict.kind = VerdictKind::AlertOverMaxDailyDose;
            else if (alert_field == "UNDER") record.verdict.kind = VerdictKind::AlertUnderDose;
            else cursor.complain("alert_kind", "expected OVER or UNDER, got '" + alert_field + "'");
        } else if (verdict_field == "INDETERMINATE") {
            record.verdict.kind = VerdictKind::Indeterminate;
            std::string reason_token = alert_field;
            const auto colon = alert_field.find(':');
            if (colon != std::string::npos) {
                reason_token = alert_field.substr(0, colon);
                record.verdict.missing_covariate = alert_field.substr(colon + 1);
            }
            if (const auto reason = parse_indeterminate_reason(reason_token)) {
                record.verdict.indeterminate_reason = reason;
            } else {
                cursor.complain("alert_kind", "unknown reason '" + alert_field + "'");
            }
        } else {
            cursor.complain("engine_verdict",
                            "expected ACCEPT, ALERT or INDETERMINATE, got '" + verdict_field + "'");
        }
        const std::string& reference_field = (*row)[7];
        if (!reference_field.empty()) {
            if (const auto verdict = parse_reference_verdict(reference_field)) {
                record.reference_verdict = verdict;
            } else {
                cursor.complain("reference_verdict", "unknown verdict '" + reference_field + "'");
            }
        }
        record.egfr = optional_number(cursor, 8, "egfr", 0.0, false);
        if (!(*row)[9].empty()) {
            const auto dose = parse_number((*row)[9]);
            if (!dose || !std::isfinite(*dose)) {
                cursor.complain("daily_dose_mg", "invalid number '" + (*row)[9] + "'");
            } else {
                record.daily_dose = dose;
            }
        }

        if (!cursor.error.empty()) {
            result.row_errors.push_back({row_number, cursor.error});
        } else {
            result.records.push_back(std::move(record));
        }
    }
    return result;
}

VerdictLogParseResult parse_verdict_log_file(const std::string& path) {
    return parse_verdict_log(read_text_file(path));
}

namespace {

constexpr std::array<std::string_view, 4> kAdjudicationColumns = {
    "record_ref",
    "agrees_with",
    "reason_category",
    "severity",
};

constexpr std::array<std::string_view, 2> kGoldColumns = {"record_ref", "should_fire"};

} // namespace

AdjudicationParseResult parse_adjudications(std::string_view text) {
    csv::Reader reader(text);
    const auto header = reader.next();
    if (!header) throw LogIoError("missing header row");
    if (!header_matches(*header, kAdjudicationColumns)) {
        throw LogIoError("header must be: " + join_columns(kAdjudicationColumns));
    }
    AdjudicationParseResult result;
    while (auto row = reader.next()) {
        const int row_number = reader.record_line();
        if (row->size() != kAdjudicationColumns.size()) {
            result.row_errors.push_back({row_number, "expected 4 fields"});
            continue;
        }
        AdjudicationRow adjudication;
        adjudication.record_ref = (*row)[0];
        const auto agrees = parse_agrees_with((*row)[1]);
        const auto reason = parse_reason_category((*row)[2]);
        const auto severity = parse_severity((*row)[3]);
        if (adjudication.record_ref.empty() || !agrees || !reason || !severity) {
            result.row_errors.push_back({row_number, "invalid adjudication row"});
            continue;
        }
        adjudication.agrees_with = *agrees;
        adjudication.reason_category = *reason;
        adjudication.severity = *severity;
        result.rows.push_back(std::move(adjudication));
    }
    return result;
}

AdjudicationParseResult parse_adjudications_file(const std::string& path) {
    return parse_adjudications(read_text_file(path));
}

void write_adjudications(std::span<const AdjudicationRow> rows, std::ostream& out) {
    std::vector<std::string> fields;
    fields.assign(kAdjudicationColumns.begin(), kAdjudicationColumns.end());
    csv::write_row(out, fields);
    for (const AdjudicationRow& row : rows) {
        fields.clear();
        fields.push_back(row.record_ref);
        fields.push_back(std::string(agrees_with_token(row.agrees_with)));
        fields.push_back(std::string(reason_category_token(row.reason_category)));
        fields.push_back(std::string(severity_token(row.severity)));
        csv::write_row(out, fields);
    }
}

GoldParseResult parse_gold_labels(std::string_view text) {
    csv::Reader reader(text);
    const auto header = reader.next();
    if (!header) throw LogIoError("missing header row");
    if (!header_matches(*header, kGoldColumns)) {
        throw LogIoError("header must be: " + join_columns(kGoldColumns));
    }
    GoldParseResult result;
    while (auto row = reader.next()) {
        const int row_number = reader.record_line();
        if (row->size() != kGoldColumns.size() || (*row)[0].empty() ||
            ((*row)[1] != "yes" && (*row)[1] != "no")) {
            result.row_errors.push_back({row_number, "invalid gold row"});
            continue;
        }
        result.labels[(*row)[0]] = (*row)[1] == "yes";
    }
    return result;
}

GoldParseResult parse_gold_labels_file(const std::string& path) {
    return parse_gold_labels(read_text_file(path));
}

void write_gold_labels(const std::map<std::string, bool>& labels, std::ostream& out) {
    std::vector<std::string> fields;
    fields.assign(kGoldColumns.begin(), kGoldColumns.end());
    csv::write_row(out, fields);
    for (const auto& [ref, should_fire] : labels) {
        fields.clear();
        fields.push_back(ref);
        fields.push_back(should_fire ? "yes" : "no");
        csv::write_row(out, fields);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LogIoError("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LogIoError("cannot write " + path);
    out << content;
    if (!out.good()) throw LogIoError("write failed: " + path);
}

} // namespace nephrodose
