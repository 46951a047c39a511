#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "qfl/sim.hpp"

using namespace qfl;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("single hadamard") {
    Circuit c(1, 0);
    c.h(0);
    auto r = run(c, {});
    CHECK(std::abs(r.state.amps[0] - cplx(kInvSqrt2)) < 1e-12);
    CHECK(std::abs(r.state.amps[1] - cplx(kInvSqrt2)) < 1e-12);
}

TEST_CASE("measurement is deterministic per seed") {
    Circuit c(1, 1);
    c.h(0);
    c.measure(0, 0);
    SimOptions opts;
    opts.seed = 1234;
    auto r1 = run(c, opts);
    auto r2 = run(c, opts);
    CHECK(r1.record.bits == r2.record.bits);
    CHECK(r1.record.entries.size() == 1);
}

TEST_CASE("hadamard layer produces the j=0 fourier state") {
    const int n = 3;
    Circuit c(n, 0);
    for (int q = 0; q < n; ++q)
        c.h(q);
    auto r = run(c, {});
    RegisterMap m;
    m.regs["A"] = {0, 1, 2};
    auto phi0 = fourier_state(n, m, "A", 0);
    auto d = state_distance(r.state, phi0);
    CHECK(d.two_norm < 1e-12);
}

TEST_CASE("prepare_basis places register values by bit convention") {
    RegisterMap m;
    m.regs["A"] = {0, 2, 4};
    auto s = prepare_basis(5, m, {{"A", 5}});
    CHECK(std::abs(s.amps[0b10001] - cplx(1.0)) < 1e-15);

    auto z = prepare_basis(5, m, {{"A", 0}});
    CHECK(std::abs(z.amps[0] - cplx(1.0)) < 1e-15);

    CHECK_THROWS_AS(prepare_basis(5, m, {{"A", 8}}), std::invalid_argument);
}

TEST_CASE("fourier_state values") {
    RegisterMap m1;
    m1.regs["A"] = {0};
    auto s = fourier_state(1, m1, "A", 1);
    CHECK(std::abs(s.amps[0] - cplx(kInvSqrt2)) < 1e-12);
    CHECK(std::abs(s.amps[1] + cplx(kInvSqrt2)) < 1e-12);

    RegisterMap m2;
    m2.regs["A"] = {0, 1};
    auto t = fourier_state(2, m2, "A", 1);
    CHECK(std::abs(t.amps[0] - cplx(0.5, 0.0)) < 1e-12);
    CHECK(std::abs(t.amps[1] - cplx(0.0, 0.5)) < 1e-12);
    CHECK(std::abs(t.amps[2] - cplx(-0.5, 0.0)) < 1e-12);
    CHECK(std::abs(t.amps[3] - cplx(0.0, -0.5)) < 1e-12);

    CHECK_THROWS_AS(fourier_state(2, m2, "A", 4), std::invalid_argument);
}

TEST_CASE("state distance") {
    StateVector u(2), v(2);
    auto d = state_distance(u, v);
    CHECK(d.two_norm == doctest::Approx(0.0));
    CHECK(d.fidelity == doctest::Approx(1.0));
    CHECK(d.phase_aligned == doctest::Approx(0.0));

    StateVector w(2);
    w.amps[0] = 0.0;
    w.amps[1] = 1.0;
    d = state_distance(u, w);
    CHECK(d.two_norm == doctest::Approx(std::sqrt(2.0)));
    CHECK(d.fidelity == doctest::Approx(0.0));
    CHECK(d.phase_aligned == doctest::Approx(std::sqrt(2.0)));

    StateVector p(2);
    for (auto& a : p.amps)
        a *= std::polar(1.0, 0.25 * M_PI);
    d = state_distance(p, u);
    CHECK(d.two_norm > 0.1);
    CHECK(d.phase_aligned == doctest::Approx(0.0).epsilon(1e-9));
}

namespace {

Circuit random_unitary_circuit(int width, int n_ops, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Circuit c(width, 0);
    for (int i = 0; i < n_ops; ++i) {
        int q = int(rng() % width);
        int r = int(rng() % width);
        switch (rng() % 6) {
            case 0: c.h(q); break;
            case 1: c.s(q); break;
            case 2: c.rk(q, 1 + int(rng() % 5), rng() % 2 ? 1 : -1); break;
            case 3:
                if (r != q)
                    c.cx(q, r);
                break;
            case 4:
                if (r != q)
                    c.cp(q, r, 1 + int(rng() % 4));
                break;
            default:
                if (r != q)
                    c.swap(q, r);
                break;
        }
    }
    return c;
}

}  // namespace

TEST_CASE("norm preserved across random circuits") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Circuit c = random_unitary_circuit(5, 60, seed);
        auto r = run(c, {});
        CHECK(std::abs(r.state.norm2() - 1.0) < 1e-10);
    }
}

TEST_CASE("deferred equals sampled on measurement-free circuits") {
    Circuit c = random_unitary_circuit(4, 40, 99);
    SimOptions s;
    s.mode = SimMode::Sampled;
    SimOptions d;
    d.mode = SimMode::Deferred;
    auto rs = run(c, s);
    auto rd = run(c, d);
    CHECK(state_distance(rs.state, rd.state).two_norm < 1e-12);
}

TEST_CASE("conditioned gates follow the record in sampled mode") {
    // deterministic measurement of |1> controls an X via parity
    Circuit c(2, 1);
    c.x(0);
    c.measure(0, 0);
    Operation op{Gate::X, {1}};
    op.cond = ClassicalExpr{{0}, false};
    c.append(op);
    auto r = run(c, {});
    CHECK(std::abs(r.state.amps[3] - cplx(1.0)) < 1e-12);

    // negated condition: not applied
    Circuit c2(2, 1);
    c2.x(0);
    c2.measure(0, 0);
    Operation op2{Gate::X, {1}};
    op2.cond = ClassicalExpr{{0}, true};
    c2.append(op2);
    auto r2 = run(c2, {});
    CHECK(std::abs(r2.state.amps[1] - cplx(1.0)) < 1e-12);
}

TEST_CASE("measurement collapses and renormalizes") {
    Circuit c(2, 1);
    c.h(0);
    c.cx(0, 1);
    c.measure(0, 0);
    SimOptions opts;
    opts.seed = 5;
    auto r = run(c, opts);
    CHECK(std::abs(r.state.norm2() - 1.0) < 1e-12);
    int outcome = r.record.bits[0];
    std::size_t idx = outcome ? 3 : 0;
    CHECK(std::abs(std::abs(r.state.amps[idx]) - 1.0) < 1e-12);
}

TEST_CASE("reset rejected in deferred mode, projects in sampled mode") {
    Circuit c(1, 0);
    c.h(0);
    c.reset(0);
    SimOptions d;
    d.mode = SimMode::Deferred;
    CHECK_THROWS_AS(run(c, d), std::invalid_argument);
    auto r = run(c, {});
    CHECK(std::abs(r.state.amps[0] - cplx(1.0)) < 1e-12);
}
