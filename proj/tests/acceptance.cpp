// Acceptance suite: runs every verification criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exits nonzero
// if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qfl/verify.hpp"

int main() {
    using qfl::verify::VerificationReport;
    struct Item {
        const char* name;
        std::function<VerificationReport()> fn;
    };
    const std::vector<Item> items = {
        {"1. QFS error exactness", qfl::verify::check_qfs_exactness},
        {"2. FPE decomposition", qfl::verify::check_fpe_decomposition},
        {"3. bad-set bound", qfl::verify::check_bad_set_bound},
        {"4. adder", qfl::verify::check_adder},
        {"5. long-range gadget", qfl::verify::check_longrange_gadget},
        {"6. end-to-end QFT_uni", qfl::verify::check_qft_uni},
        {"7. end-to-end general QFT", qfl::verify::check_qft_general},
        {"8. width table", qfl::verify::check_width_table},
        {"9. depth scaling regression", qfl::verify::check_depth_scaling},
        {"10. variant equivalence", qfl::verify::check_variants},
    };

    bool all_ok = true;
    for (const Item& item : items) {
        auto t0 = std::chrono::steady_clock::now();
        VerificationReport rep = item.fn();
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        bool ok = rep.all_pass();
        all_ok = all_ok && ok;
        std::printf("%-32s %s  (%.1fs)\n", item.name, ok ? "PASS" : "FAIL", secs);
        if (!ok) {
            for (const auto& e : rep.entries)
                if (!e.pass)
                    std::printf("    failed: %s  measured=%.6g bound=%.6g %s\n",
                                e.name.c_str(), e.measured, e.bound, e.note.c_str());
        }
    }
    return all_ok ? 0 : 1;
}
