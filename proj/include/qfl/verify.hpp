#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qfl/builders.hpp"

namespace qfl::verify {

struct CheckEntry {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string note;
};

struct VerificationReport {
    std::string suite;
    std::map<std::string, std::string> params;
    std::vector<CheckEntry> entries;

    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass)
                return false;
        return true;
    }
};

std::string report_json(const VerificationReport& r);

/// One row of the resource sweep (mirrors the table columns of the
/// writeup: builder, n, epsilon, k, widths, depth, size, measurements,
/// measured error, bound).
struct SweepRow {
    std::string builder;
    int n = 0;
    double eps = 0.0;
    int k = 0;
    int width_qubits = 0;
    int clbits = 0;
    int depth = 0;
    int size = 0;
    int measurements = 0;
    double measured_error = 0.0;
    double bound = 0.0;
};

std::string sweep_csv(const std::vector<SweepRow>& rows);

// acceptance suites; each prints nothing and returns a report
VerificationReport check_qfs_exactness();       // criterion 1
VerificationReport check_fpe_decomposition();   // criterion 2
VerificationReport check_bad_set_bound();       // criterion 3
VerificationReport check_adder();               // criterion 4
VerificationReport check_longrange_gadget();    // criterion 5
VerificationReport check_qft_uni();             // criterion 6
VerificationReport check_qft_general();         // criterion 7
VerificationReport check_width_table();         // criterion 8
VerificationReport check_depth_scaling();       // criterion 9
VerificationReport check_variants();            // criterion 10

std::vector<VerificationReport> run_all_suites();

/// Suite lookup by name ("qfs", "fpe", "badset", "adder", "longrange",
/// "qft-uni", "qft-general", "width", "depth", "variants", "all").
std::vector<VerificationReport> run_suites(const std::string& name);

/// Resource/error sweep for the report command.
std::vector<SweepRow> sweep(const std::string& builder, int n_lo, int n_hi, double eps,
                            std::uint64_t seed);

}  // namespace qfl::verify
