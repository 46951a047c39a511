#include <doctest.h>

#include <cmath>

#include "qfl/builders.hpp"
#include "qfl/sim.hpp"

using namespace qfl;
namespace bl = qfl::builders;

namespace {

/// Runs the adder on basis operands and reads back (sum register, operand
/// register, ancilla cleanliness).
struct AdderRun {
    std::uint64_t b_out = 0;
    std::uint64_t a_out = 0;
    bool anc_clean = true;
    bool deterministic = true;
};

AdderRun run_adder_basis(const Circuit& c, std::uint64_t b, std::uint64_t a_or_unused,
                         bool quantum, std::uint64_t seed) {
    std::map<std::string, std::uint64_t> vals;
    vals["B"] = b;
    if (quantum)
        vals["A"] = a_or_unused;
    auto in = prepare_basis(c.width(), c.registers(), vals);
    SimOptions opts;
    opts.seed = seed;
    auto r = run(c, in, opts);

    std::size_t peak = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < r.state.dim(); ++i)
        if (std::norm(r.state.amps[i]) > best) {
            best = std::norm(r.state.amps[i]);
            peak = i;
        }
    AdderRun out;
    out.deterministic = best > 1.0 - 1e-9;
    const auto& b_pos = c.registers().positions("B");
    for (std::size_t l = 0; l < b_pos.size(); ++l)
        if (peak & (std::size_t(1) << b_pos[l]))
            out.b_out |= 1ull << l;
    if (quantum) {
        const auto& a_pos = c.registers().positions("A");
        for (std::size_t l = 0; l < a_pos.size(); ++l)
            if (peak & (std::size_t(1) << a_pos[l]))
                out.a_out |= 1ull << l;
    }
    if (c.registers().has("ANC"))
        for (int p : c.registers().positions("ANC"))
            if (peak & (std::size_t(1) << p))
                out.anc_clean = false;
    return out;
}

}  // namespace

TEST_CASE("quantum adder exhaustive, gadget mode") {
    for (int n = 1; n <= 3; ++n) {
        bl::AdderParams p;
        p.n = n;
        p.long_range = bl::LongRange::Gadget;
        auto c = bl::build_adder(p);
        CHECK(audit_connectivity(c).empty());
        CHECK(c.width() <= 5 * n);
        const std::uint64_t N = 1ull << n;
        for (std::uint64_t b = 0; b < N; ++b)
            for (std::uint64_t a = 0; a < N; ++a)
                for (std::uint64_t seed : {7ull, 99ull}) {
                    auto r = run_adder_basis(c, b, a, true, seed);
                    CHECK(r.deterministic);
                    CHECK(r.b_out == ((a + b) & (N - 1)));
                    CHECK(r.a_out == a);
                    CHECK(r.anc_clean);
                }
    }
}

TEST_CASE("quantum adder exhaustive, direct mode") {
    for (int n = 1; n <= 4; ++n) {
        bl::AdderParams p;
        p.n = n;
        p.long_range = bl::LongRange::Direct;
        auto c = bl::build_adder(p);
        const std::uint64_t N = 1ull << n;
        for (std::uint64_t b = 0; b < N; ++b)
            for (std::uint64_t a = 0; a < N; ++a) {
                auto r = run_adder_basis(c, b, a, true, 0);
                CHECK(r.deterministic);
                CHECK(r.b_out == ((a + b) & (N - 1)));
                CHECK(r.anc_clean);
            }
    }
}

TEST_CASE("classical-constant adder") {
    for (int n = 1; n <= 4; ++n) {
        const std::uint64_t N = 1ull << n;
        for (std::uint64_t cval = 0; cval < N; ++cval) {
            bl::AdderParams p;
            p.n = n;
            p.classical_c = cval;
            p.long_range = bl::LongRange::Gadget;
            auto c = bl::build_adder(p);
            CHECK(audit_connectivity(c).empty());
            CHECK(c.width() <= 3 * n);
            for (std::uint64_t b = 0; b < N; ++b) {
                auto r = run_adder_basis(c, b, 0, false, 11);
                CHECK(r.deterministic);
                CHECK(r.b_out == ((b + cval) & (N - 1)));
                CHECK(r.anc_clean);
            }
        }
    }
}

TEST_CASE("adjoint adder subtracts") {
    const int n = 3;
    const std::uint64_t N = 1ull << n;
    bl::AdderParams p;
    p.n = n;
    p.adjoint = true;
    p.long_range = bl::LongRange::Direct;
    auto c = bl::build_adder(p);
    for (std::uint64_t b = 0; b < N; ++b)
        for (std::uint64_t a = 0; a < N; ++a) {
            auto r = run_adder_basis(c, b, a, true, 0);
            CHECK(r.b_out == ((b - a) & (N - 1)));
        }

    bl::AdderParams pc;
    pc.n = n;
    pc.classical_c = 5;
    pc.adjoint = true;
    auto cc = bl::build_adder(pc);
    for (std::uint64_t b = 0; b < N; ++b) {
        auto r = run_adder_basis(cc, b, 0, false, 0);
        CHECK(r.b_out == ((b - 5) & (N - 1)));
    }
}

TEST_CASE("adder example from the arithmetic table") {
    bl::AdderParams p;
    p.n = 3;
    p.long_range = bl::LongRange::Gadget;
    auto c = bl::build_adder(p);
    auto r = run_adder_basis(c, 5, 6, true, 3);
    CHECK(r.b_out == 3);  // 5 + 6 mod 8
}

TEST_CASE("gadget-mode adder really uses dynamic gadgets") {
    bl::AdderParams p;
    p.n = 3;
    p.long_range = bl::LongRange::Gadget;
    auto c = bl::build_adder(p);
    auto rep = depth_report(c);
    CHECK(rep.n_measurements > 0);
    CHECK(rep.n_conditioned > 0);
}

TEST_CASE("fourier-basis contract") {
    // on Fourier inputs the adder acts as phi(j), phi(l+j) -> phi(j), phi(l)
    const int n = 3;
    const std::uint64_t N = 1ull << n;
    bl::AdderParams p;
    p.n = n;
    p.long_range = bl::LongRange::Direct;
    auto c = bl::build_adder(p);
    const auto& a_pos = c.registers().positions("A");
    const auto& b_pos = c.registers().positions("B");

    auto fourier_pair = [&](std::uint64_t jb, std::uint64_t ja) {
        StateVector s(c.width());
        s.amps[0] = 0.0;
        for (std::uint64_t x = 0; x < N; ++x)
            for (std::uint64_t y = 0; y < N; ++y) {
                std::size_t idx = 0;
                for (int l = 0; l < n; ++l) {
                    if ((x >> l) & 1)
                        idx |= std::size_t(1) << b_pos[l];
                    if ((y >> l) & 1)
                        idx |= std::size_t(1) << a_pos[l];
                }
                double frac = double((jb * x + ja * y) % N) / double(N);
                s.amps[idx] = std::polar(1.0, 2.0 * M_PI * frac) / double(N);
            }
        return s;
    };

    SimOptions opts;
    opts.mode = SimMode::Deferred;
    for (std::uint64_t j = 0; j < N; ++j)
        for (std::uint64_t l : {0ull, 1ull, 5ull}) {
            auto in = fourier_pair(j, (l + j) % N);
            auto out = run(c, in, opts).state;
            auto want = fourier_pair(j, l);
            CHECK(state_distance(want, out).phase_aligned < 1e-9);
        }
}

TEST_CASE("adder depth grows logarithmically in direct mode") {
    std::vector<int> depths;
    for (int n : {2, 4, 8})
        depths.push_back(depth(bl::build_adder({.n = n, .long_range = bl::LongRange::Direct})));
    CHECK(depths[1] >= depths[0]);
    CHECK(depths[2] >= depths[1]);
    // doubling n costs a bounded number of extra tree rounds
    CHECK(depths[2] - depths[1] <= 14);
    CHECK(double(depths[2]) / depths[1] <= 1.6);
}
