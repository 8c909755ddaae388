#ifndef LIPFREE_VERIFY_HPP
#define LIPFREE_VERIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace lipfree {

struct VerifyConfig {
    std::string suite = "all";
    /// Overrides each criterion's own exponent list when non-empty.
    std::vector<double> ps;
    std::size_t max_points = 8;
    std::uint64_t seed = 42;
    /// Report directory; nothing is written when empty.
    std::string out;
    /// 0 keeps the current worker count.
    unsigned workers = 0;
    /// Replaces every pinned tolerance when set.
    std::optional<double> tolerance;
};

/// One checked instance. For inequalities `bound` is the ceiling; for
/// equalities it is the expected value. margin >= 0 iff the row passes.
struct Record {
    std::string instance;
    double p = 0.0;
    double bound = 0.0;
    double measured = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Record> records;
    /// Suite-specific extras (goldens, tables).
    nlohmann::json extra;
    bool pass = false;
};

constexpr int kCriterionCount = 14;

[[nodiscard]] std::vector<std::string> suite_names();
/// Criterion ids run by a suite ("all" runs 1..14).
[[nodiscard]] std::vector<int> suite_criteria(const std::string& suite);

[[nodiscard]] std::string criterion_title(int id);
[[nodiscard]] CriterionResult run_criterion(int id, const VerifyConfig& config);

struct SuiteResult {
    std::string suite;
    std::vector<CriterionResult> criteria;
    [[nodiscard]] bool pass() const;
    [[nodiscard]] std::size_t passed_rows() const;
    [[nodiscard]] std::size_t failed_rows() const;
};

[[nodiscard]] SuiteResult run_suite(const VerifyConfig& config);

/// CSV with header "criterion,instance,p,bound,measured,margin,pass".
[[nodiscard]] std::string records_csv(const SuiteResult& result);
[[nodiscard]] nlohmann::json suite_json(const SuiteResult& result);
/// Writes <out>/<suite>.csv and <out>/<suite>.json (plus bases_constants.csv
/// for suites that include the Haar and natural bases).
void write_reports(const SuiteResult& result, const std::string& out);

/// Flat "key = value" lines; '#' starts a comment.
[[nodiscard]] VerifyConfig read_config_file(const std::string& path);

}  // namespace lipfree

#endif
