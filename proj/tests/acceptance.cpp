// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>

#include "lipfree/verify.hpp"

int main() {
    lipfree::VerifyConfig config;
    bool all = true;
    for (int id = 1; id <= lipfree::kCriterionCount; ++id) {
        const auto start = std::chrono::steady_clock::now();
        const auto r = lipfree::run_criterion(id, config);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        double worst = 0.0;
        bool first = true;
        for (const auto& rec : r.records)
            if (first || rec.margin < worst) worst = rec.margin, first = false;
        std::printf("%s %d %s [rows=%zu min_margin=%.3g %.2fs]\n", r.pass ? "PASS" : "FAIL", id, r.title.c_str(),
                    r.records.size(), worst, secs);
        for (const auto& rec : r.records)
            if (!rec.pass)
                std::printf("  failed %s p=%.17g bound=%.17g measured=%.17g\n", rec.instance.c_str(), rec.p, rec.bound,
                            rec.measured);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
