#pragma once

namespace nephrodose {

// Exit codes: 0 success/accept, 1 usage error, 2 file or parse error,
// 3 rule-pack validation findings, 4 alert verdict (single-check mode),
// 5 indeterminate verdict.
int run_cli(int argc, const char* const* argv);

} // namespace nephrodose
