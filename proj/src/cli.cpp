#include "nephrodose/cli.hpp"

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nephrodose/analytics.hpp"
#include "nephrodose/engine.hpp"
#include "nephrodose/log_io.hpp"
#include "nephrodose/renal.hpp"
#include "nephrodose/render.hpp"
#include "nephrodose/rule_dsl.hpp"
#include "nephrodose/util.hpp"

namespace nephrodose {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFileOrParse = 2;
constexpr int kExitValidationFindings = 3;
constexpr int kExitAlert = 4;
constexpr int kExitIndeterminate = 5;

struct FormatOption {
    std::string value = "text";

    bool structured() const { return value == "structured"; }
};

void add_format_flag(CLI::App* cmd, FormatOption& format) {
    cmd->add_option("--format", format.value, "output format")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();
}

void emit(const FormatOption& format, const std::string& text, const Json& json) {
    if (format.structured()) std::cout << json.dump(2) << "\n";
    else std::cout << text;
}

// Parses and validates a pack; on findings prints them to stderr and
// returns nullopt after setting *exit_code.
std::optional<RulePack> load_validated_pack(const std::string& path, int* exit_code) {
    const RulePack pack = parse_rule_pack(read_text_file(path));
    const ValidationReport report = validate_pack(pack);
    if (!report.ok()) {
        std::cerr << path << ": rule pack has validation findings\n"
                  << render_validation_text(report);
        *exit_code = kExitValidationFindings;
        return std::nullopt;
    }
    return pack;
}

void report_row_errors(const std::string& path, std::span<const RowError> errors) {
    for (const RowError& error : errors) {
        std::cerr << path << ": row " << error.row_number << ": " << error.message << "\n";
    }
    if (!errors.empty()) {
        std::cerr << path << ": skipped " << errors.size() << " malformed row(s)\n";
    }
}

std::vector<VerdictRecord> load_verdicts(const std::string& path) {
    VerdictLogParseResult parsed = parse_verdict_log_file(path);
    report_row_errors(path, parsed.row_errors);
    return std::move(parsed.records);
}

std::vector<AdjudicationRow> load_adjudications(const std::string& path) {
    AdjudicationParseResult parsed = parse_adjudications_file(path);
    report_row_errors(path, parsed.row_errors);
    return std::move(parsed.rows);
}

JoinedAdjudications join_or_warn(const std::string& path,
                                 std::span<const VerdictRecord> records,
                                 std::span<const AdjudicationRow> rows) {
    JoinedAdjudications joined = join_adjudications(records, rows);
    if (!joined.unmatched_refs.empty()) {
        std::cerr << path << ": " << joined.unmatched_refs.size()
                  << " adjudication row(s) match no verdict record\n";
    }
    return joined;
}

int cmd_rules_check(const std::string& pack_path, const FormatOption& format) {
    const RulePack pack = parse_rule_pack(read_text_file(pack_path));
    const ValidationReport report = validate_pack(pack);
    emit(format, render_validation_text(report), validation_to_json(report));
    return report.ok() ? kExitOk : kExitValidationFindings;
}

int cmd_egfr(double scr, int age, const std::string& sex_text) {
    const auto sex = parse_sex(sex_text);
    if (!sex) {
        std::cerr << "--sex must be m or f\n";
        return kExitUsage;
    }
    try {
        const double egfr = mdrd_egfr({scr, age, *sex});
        std::cout << format_fixed(egfr, 1) << "\n";
        return kExitOk;
    } catch (const InvalidRenalInput& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
}

struct CheckArgs {
    std::string pack_path;
    std::string medication;
    double egfr = 0.0;
    double dose = 0.0;
    std::string unit = "mg";
    int freq = 1;
    double weight = 0.0;
    bool has_weight = false;
    std::string regimen_text; // compact alternative to --dose/--unit/--freq
    bool has_dose = false;
};

int cmd_check(const CheckArgs& args, const FormatOption& format) {
    int exit_code = kExitOk;
    const auto pack = load_validated_pack(args.pack_path, &exit_code);
    if (!pack) return exit_code;

    DoseRegimen regimen;
    if (!args.regimen_text.empty()) {
        if (args.has_dose) {
            std::cerr << "--regimen and --dose/--unit/--freq are mutually exclusive\n";
            return kExitUsage;
        }
        const auto parsed = parse_regimen(args.regimen_text);
        if (!parsed) {
            std::cerr << "--regimen: " << parsed.error() << "\n";
            return kExitUsage;
        }
        regimen = *parsed;
    } else {
        if (!args.has_dose) {
            std::cerr << "either --regimen or --dose/--unit/--freq is required\n";
            return kExitUsage;
        }
        const auto unit = parse_dose_unit(args.unit);
        if (!unit) {
            std::cerr << "--unit must be one of mg, g, MIU, mg_per_kg\n";
            return kExitUsage;
        }
        if (!(args.dose > 0.0) || args.freq < 1) {
            std::cerr << "--dose must be > 0 and --freq >= 1\n";
            return kExitUsage;
        }
        regimen = DoseRegimen{args.dose, *unit, args.freq};
    }
    if (!(args.egfr >= 0.0)) {
        std::cerr << "--egfr must be >= 0\n";
        return kExitUsage;
    }

    PrescriptionLine line;
    line.patient_id = "cli";
    line.encounter_id = "cli";
    line.medication_code = args.medication;
    line.regimen = regimen;
    line.egfr = args.egfr;
    line.birth_date = *parse_iso_date("1950-01-01");
    line.start_date = *parse_iso_date("2011-01-01");
    line.end_date = line.start_date;
    if (args.has_weight) line.weight = args.weight;

    const Verdict verdict = evaluate_line(*pack, line);
    emit(format, render_verdict_text(verdict), verdict_to_json(verdict));
    switch (verdict.kind) {
    case VerdictKind::Accept: return kExitOk;
    case VerdictKind::AlertOverMaxDailyDose:
    case VerdictKind::AlertUnderDose: return kExitAlert;
    case VerdictKind::Indeterminate: return kExitIndeterminate;
    }
    return kExitOk;
}

struct ReplayArgs {
    std::string pack_path;
    std::string log_path;
    std::string out_path;
    bool summary = false;
};

int cmd_replay(const ReplayArgs& args, const FormatOption& format) {
    int exit_code = kExitOk;
    const auto pack = load_validated_pack(args.pack_path, &exit_code);
    if (!pack) return exit_code;

    LogParseResult parsed = parse_prescription_log_file(args.log_path);
    report_row_errors(args.log_path, parsed.row_errors);

    ExclusionResult exclusions = apply_exclusions(parsed.lines);

    // Lines whose regimen unit family contradicts the ruleset cannot be
    // checked; keep the batch going and say so.
    std::vector<PrescriptionLine> checkable;
    checkable.reserve(exclusions.analysis_set.size());
    long unit_mismatches = 0;
    for (PrescriptionLine& line : exclusions.analysis_set) {
        const MedicationRuleSet* ruleset = pack->find_medication(line.medication_code);
        if (ruleset != nullptr && line.regimen &&
            !units_compatible(line.regimen->unit, ruleset->dose_unit)) {
            ++unit_mismatches;
            continue;
        }
        checkable.push_back(std::move(line));
    }
    if (unit_mismatches > 0) {
        std::cerr << args.log_path << ": dropped " << unit_mismatches
                  << " line(s) with a regimen unit incompatible with the ruleset unit\n";
    }

    const std::vector<VerdictRecord> records = evaluate_log(*pack, checkable);
    write_verdict_log_file(records, args.out_path);
    if (args.summary) {
        emit(format, render_exclusions_text(exclusions.summary),
             exclusions_to_json(exclusions.summary));
    }
    return kExitOk;
}

int cmd_agree(const std::string& verdicts_path, const FormatOption& format) {
    const auto records = load_verdicts(verdicts_path);
    const ContingencyBuild build = contingency(records);
    try {
        const KappaResult kappa = cohen_kappa(build.table);
        emit(format, render_agreement_text(build, kappa), agreement_to_json(build, kappa));
        return kExitOk;
    } catch (const DegenerateTableError& e) {
        std::cerr << e.what() << "\n";
        return kExitFileOrParse;
    }
}

int cmd_diagnose(const std::string& verdicts_path, const std::string& gold_path,
                 const FormatOption& format) {
    const auto records = load_verdicts(verdicts_path);
    GoldParseResult gold = parse_gold_labels_file(gold_path);
    report_row_errors(gold_path, gold.row_errors);
    const DiagnosticMetrics metrics = diagnostic_metrics(records, gold.labels);
    emit(format, render_diagnostics_text(metrics), diagnostics_to_json(metrics));
    return kExitOk;
}

int cmd_discord(const std::string& verdicts_path, const FormatOption& format) {
    const auto records = load_verdicts(verdicts_path);
    const auto classified = classify_discordances(records);
    const DiscordanceCounts counts = count_discordances(classified);
    emit(format, render_discordance_text(counts), discordance_to_json(counts));
    return kExitOk;
}

int cmd_report_freq(const std::string& verdicts_path, const FormatOption& format) {
    const auto records = load_verdicts(verdicts_path);
    const FrequencyTable table = alert_frequency_table(records);
    emit(format, render_frequency_text(table), frequency_to_json(table));
    return kExitOk;
}

struct ReportRulesArgs {
    std::string verdicts_path;
    std::string adjudications_path;
    std::string pack_path;
    long total_rules = 0;
};

int cmd_report_rules(const ReportRulesArgs& args, const FormatOption& format) {
    const auto records = load_verdicts(args.verdicts_path);
    const auto rows = load_adjudications(args.adjudications_path);
    const JoinedAdjudications joined = join_or_warn(args.adjudications_path, records, rows);

    long total_rules = args.total_rules;
    if (total_rules == 0 && !args.pack_path.empty()) {
        const RulePack pack = parse_rule_pack(read_text_file(args.pack_path));
        total_rules = static_cast<long>(pack.total_rules());
    }
    const RuleImpactReport report = rule_impact(records, joined.cases, total_rules);
    emit(format, render_rule_impact_text(report), rule_impact_to_json(report));
    return kExitOk;
}

int cmd_report_severity(const std::string& adjudications_path, const FormatOption& format) {
    const auto rows = load_adjudications(adjudications_path);
    std::vector<AdjudicatedCase> cases;
    cases.reserve(rows.size());
    for (const AdjudicationRow& row : rows) {
        AdjudicatedCase item;
        item.agrees_with = row.agrees_with;
        item.reason_category = row.reason_category;
        item.severity = row.severity;
        cases.push_back(item);
    }
    const SeveritySummary summary = severity_summary(cases);
    emit(format, render_severity_text(summary), severity_to_json(summary));
    return kExitOk;
}

int cmd_report_correct(const std::string& verdicts_path, const std::string& adjudications_path,
                       const FormatOption& format) {
    const auto records = load_verdicts(verdicts_path);
    const auto rows = load_adjudications(adjudications_path);
    const JoinedAdjudications joined = join_or_warn(adjudications_path, records, rows);
    const CorrectAnalysisSummary summary = correct_analysis(records, joined.cases);
    emit(format, render_correct_analysis_text(summary), correct_analysis_to_json(summary));
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"nephrodose: renal dose rule engine and prescription-log evaluation harness"};
    app.require_subcommand(1);
    std::function<int()> action;

    // rules check <pack>
    auto* rules = app.add_subcommand("rules", "rule pack tools");
    rules->require_subcommand(1);
    auto* rules_check = rules->add_subcommand("check", "parse and validate a rule pack");
    {
        static std::string pack_path;
        static FormatOption format;
        rules_check->add_option("pack", pack_path, "rule pack file")->required();
        add_format_flag(rules_check, format);
        rules_check->callback([&]() { action = [&]() { return cmd_rules_check(pack_path, format); }; });
    }

    auto* egfr = app.add_subcommand("egfr", "MDRD eGFR from creatinine, age and sex");
    {
        static double scr = 0.0;
        static int age = 0;
        static std::string sex;
        egfr->add_option("--scr", scr, "serum creatinine, mg/dL")->required();
        egfr->add_option("--age", age, "age in years")->required();
        egfr->add_option("--sex", sex, "m or f")->required();
        egfr->callback([&]() { action = [&]() { return cmd_egfr(scr, age, sex); }; });
    }

    auto* check = app.add_subcommand("check", "evaluate a single prescription line");
    {
        static CheckArgs args;
        static FormatOption format;
        check->add_option("--pack", args.pack_path, "rule pack file")->required();
        check->add_option("--med", args.medication, "medication code")->required();
        check->add_option("--egfr", args.egfr, "patient eGFR, mL/min/1.73 m^2")->required();
        auto* dose_opt = check->add_option("--dose", args.dose, "dose per administration");
        check->add_option("--unit", args.unit, "mg, g, MIU or mg_per_kg");
        check->add_option("--freq", args.freq, "administrations per day");
        check->add_option("--regimen", args.regimen_text,
                          "compact regimen, e.g. \"500mg x3\" (alternative to --dose/--unit/--freq)");
        auto* weight_opt = check->add_option("--weight", args.weight, "patient weight, kg");
        add_format_flag(check, format);
        check->callback([&, dose_opt, weight_opt]() {
            args.has_dose = dose_opt->count() > 0;
            args.has_weight = weight_opt->count() > 0;
            action = [&]() { return cmd_check(args, format); };
        });
    }

    auto* replay = app.add_subcommand("replay", "evaluate a prescription log in silent mode");
    {
        static ReplayArgs args;
        static FormatOption format;
        replay->add_option("--pack", args.pack_path, "rule pack file")->required();
        replay->add_option("--log", args.log_path, "prescription log CSV")->required();
        replay->add_option("--out", args.out_path, "verdict log CSV to write")->required();
        replay->add_flag("--summary", args.summary, "print the exclusion summary");
        add_format_flag(replay, format);
        replay->callback([&]() { action = [&]() { return cmd_replay(args, format); }; });
    }

    auto* agree = app.add_subcommand("agree", "contingency table and Cohen's kappa");
    {
        static std::string verdicts_path;
        static FormatOption format;
        agree->add_option("--verdicts", verdicts_path, "verdict log CSV")->required();
        add_format_flag(agree, format);
        agree->callback([&]() { action = [&]() { return cmd_agree(verdicts_path, format); }; });
    }

    auto* diagnose = app.add_subcommand("diagnose", "diagnostic accuracy against gold labels");
    {
        static std::string verdicts_path;
        static std::string gold_path;
        static FormatOption format;
        diagnose->add_option("--verdicts", verdicts_path, "verdict log CSV")->required();
        diagnose->add_option("--gold", gold_path, "gold label CSV")->required();
        add_format_flag(diagnose, format);
        diagnose->callback(
            [&]() { action = [&]() { return cmd_diagnose(verdicts_path, gold_path, format); }; });
    }

    auto* discord = app.add_subcommand("discord", "classify discordant verdict pairs");
    {
        static std::string verdicts_path;
        static FormatOption format;
        discord->add_option("--verdicts", verdicts_path, "verdict log CSV")->required();
        add_format_flag(discord, format);
        discord->callback([&]() { action = [&]() { return cmd_discord(verdicts_path, format); }; });
    }

    auto* report = app.add_subcommand("report", "evaluation reports");
    report->require_subcommand(1);
    {
        auto* freq = report->add_subcommand("freq", "per-medication alert frequencies");
        static std::string freq_verdicts;
        static FormatOption freq_format;
        freq->add_option("--verdicts", freq_verdicts, "verdict log CSV")->required();
        add_format_flag(freq, freq_format);
        freq->callback([&]() { action = [&]() { return cmd_report_freq(freq_verdicts, freq_format); }; });

        auto* rules_report = report->add_subcommand("rules", "per-rule impact and refinement summary");
        static ReportRulesArgs rules_args;
        static FormatOption rules_format;
        rules_report->add_option("--verdicts", rules_args.verdicts_path, "verdict log CSV")->required();
        rules_report->add_option("--adjudications", rules_args.adjudications_path, "adjudication CSV")
            ->required();
        rules_report->add_option("--pack", rules_args.pack_path,
                                 "rule pack (denominator = its rule count)");
        rules_report->add_option("--total-rules", rules_args.total_rules,
                                 "explicit rule-base size for the summary fraction");
        add_format_flag(rules_report, rules_format);
        rules_report->callback(
            [&]() { action = [&]() { return cmd_report_rules(rules_args, rules_format); }; });

        auto* severity = report->add_subcommand("severity", "severity histogram of adjudicated cases");
        static std::string severity_adjudications;
        static FormatOption severity_format;
        severity->add_option("--adjudications", severity_adjudications, "adjudication CSV")->required();
        add_format_flag(severity, severity_format);
        severity->callback([&]() {
            action = [&]() { return cmd_report_severity(severity_adjudications, severity_format); };
        });

        auto* correct = report->add_subcommand("correct", "correct-analysis summary per rater");
        static std::string correct_verdicts;
        static std::string correct_adjudications;
        static FormatOption correct_format;
        correct->add_option("--verdicts", correct_verdicts, "verdict log CSV")->required();
        correct->add_option("--adjudications", correct_adjudications, "adjudication CSV")->required();
        add_format_flag(correct, correct_format);
        correct->callback([&]() {
            action = [&]() {
                return cmd_report_correct(correct_verdicts, correct_adjudications, correct_format);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const RuleParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitFileOrParse;
    } catch (const LogIoError& e) {
        std::cerr << e.what() << "\n";
        return kExitFileOrParse;
    } catch (const UnitMismatchError& e) {
        std::cerr << e.what() << "\n";
        return kExitFileOrParse;
    }
}

} // namespace nephrodose
