#pragma once

#include <string>

#include <json.hpp>

#include "nephrodose/analytics.hpp"
#include "nephrodose/log_io.hpp"
#include "nephrodose/rulepack.hpp"

namespace nephrodose {

// Reports render two ways: aligned plain text and a structured document
// with fixed key order (docs/reports.md). Both are locale-independent.
using Json = nlohmann::ordered_json;

enum class OutputFormat { Text, Structured };

std::string render_validation_text(const ValidationReport& report);
Json validation_to_json(const ValidationReport& report);

std::string render_verdict_text(const Verdict& verdict);
Json verdict_to_json(const Verdict& verdict);

std::string render_exclusions_text(const ExclusionSummary& summary);
Json exclusions_to_json(const ExclusionSummary& summary);

std::string render_agreement_text(const ContingencyBuild& build, const KappaResult& kappa);
Json agreement_to_json(const ContingencyBuild& build, const KappaResult& kappa);

std::string render_diagnostics_text(const DiagnosticMetrics& metrics);
Json diagnostics_to_json(const DiagnosticMetrics& metrics);

std::string render_discordance_text(const DiscordanceCounts& counts);
Json discordance_to_json(const DiscordanceCounts& counts);

std::string render_frequency_text(const FrequencyTable& table);
Json frequency_to_json(const FrequencyTable& table);

std::string render_rule_impact_text(const RuleImpactReport& report);
Json rule_impact_to_json(const RuleImpactReport& report);

std::string render_severity_text(const SeveritySummary& summary);
Json severity_to_json(const SeveritySummary& summary);

std::string render_correct_analysis_text(const CorrectAnalysisSummary& summary);
Json correct_analysis_to_json(const CorrectAnalysisSummary& summary);

} // namespace nephrodose
