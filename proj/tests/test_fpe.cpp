#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qfl/analysis.hpp"
#include "qfl/builders.hpp"
#include "qfl/sim.hpp"

using namespace qfl;
namespace bl = qfl::builders;
namespace an = qfl::analysis;

namespace {

/// |b>_A |phi(j)>_B on the canonical mesh.
StateVector fpe_input(int n, std::uint64_t b, std::uint64_t j) {
    auto map = bl::mesh_2n(n);
    const auto& a_pos = map.positions("A");
    const auto& b_pos = map.positions("B");
    const std::uint64_t N = 1ull << n;
    StateVector s(2 * n);
    s.amps[0] = 0.0;
    for (std::uint64_t k = 0; k < N; ++k) {
        std::size_t idx = 0;
        for (int l = 0; l < n; ++l)
            if ((b >> l) & 1)
                idx |= std::size_t(1) << a_pos[l];
        for (int l = 0; l < n; ++l)
            if ((k >> l) & 1)
                idx |= std::size_t(1) << b_pos[l];
        double frac = double((j * k) % N) / double(N);
        s.amps[idx] = std::polar(1.0, 2.0 * M_PI * frac) / std::sqrt(double(N));
    }
    return s;
}

cplx overlap(const StateVector& u, const StateVector& v) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i)
        acc += std::conj(u.amps[i]) * v.amps[i];
    return acc;
}

StateVector run_deferred(const Circuit& c, const StateVector& in) {
    SimOptions opts;
    opts.mode = SimMode::Deferred;
    return run(c, in, opts).state;
}

}  // namespace

TEST_CASE("small qft matches the dense dft") {
    for (int w : {1, 2, 3, 4}) {
        auto c = bl::build_small_qft(w);
        auto u = an::circuit_unitary(c);
        auto f = an::dft_oracle(w);
        CHECK((u - f).norm() < 1e-11);

        auto cadj = bl::build_small_qft(w, 0, true);
        auto uadj = an::circuit_unitary(cadj);
        CHECK((uadj - Eigen::MatrixXcd(f.adjoint())).norm() < 1e-11);
    }
}

TEST_CASE("small qft gate multiset for one qubit pair") {
    auto c = bl::build_small_qft(2);
    int h = 0, cp = 0, sw = 0;
    for (const auto& op : c.ops()) {
        h += op.g == Gate::H;
        cp += op.g == Gate::CP;
        sw += op.g == Gate::SWAP;
    }
    CHECK(h == 2);
    CHECK(cp == 1);
    CHECK(c.ops()[1].k == 2);
    CHECK(sw == 1);
    CHECK(audit_connectivity(c).empty());
}

TEST_CASE("small qft adjoint maps aligned fourier blocks to basis states") {
    // j a multiple of 2^{2km}: the block holds an exact fourier state
    const int w = 4;
    auto c = bl::build_small_qft(w, 0, true);
    RegisterMap m;
    m.regs["B"] = {0, 1, 2, 3};
    for (std::uint64_t x = 0; x < (1u << w); ++x) {
        auto in = fourier_state(w, m, "B", x);
        auto out = run_deferred(c, in);
        CHECK(std::abs(std::abs(out.amps[x]) - 1.0) < 1e-10);
    }
}

TEST_CASE("fpe with a single full window is exact") {
    const int n = 2, k = 1;
    auto c = bl::build_fpe({.n = n, .k = k});
    CHECK(audit_connectivity(c).empty());
    for (std::uint64_t j = 0; j < 4; ++j) {
        auto in = fpe_input(n, 0, j);
        auto out = run_deferred(c, in);
        auto want = fpe_input(n, j, j);
        CHECK(std::abs(overlap(want, out) - cplx(1.0)) < 1e-10);
    }
}

TEST_CASE("fpe overlap equals one minus epsilon_j") {
    const int n = 4, k = 1;
    auto c = bl::build_fpe({.n = n, .k = k});
    CHECK(audit_connectivity(c).empty());
    for (std::uint64_t j = 0; j < 16; ++j) {
        auto in = fpe_input(n, 0, j);
        auto out = run_deferred(c, in);
        auto want = fpe_input(n, j, j);
        double expected = 1.0 - an::epsilon_j(j, n, k).eps_j;
        cplx ov = overlap(want, out);
        INFO("j = ", j, " overlap = ", ov.real(), " expected = ", expected);
        CHECK(std::abs(ov - cplx(expected)) < 1e-9);
    }
}

TEST_CASE("fpe xors the estimate into a nonzero b register") {
    const int n = 4, k = 2;
    auto c = bl::build_fpe({.n = n, .k = k});
    for (std::uint64_t j : {3ull, 9ull})
        for (std::uint64_t b : {1ull, 13ull}) {
            auto in = fpe_input(n, b, j);
            auto out = run_deferred(c, in);
            auto want = fpe_input(n, b ^ j, j);
            double expected = 1.0 - an::epsilon_j(j, n, k).eps_j;
            CHECK(std::abs(overlap(want, out) - cplx(expected)) < 1e-9);
        }
}

TEST_CASE("fpe adjoint composes to identity") {
    const int n = 4, k = 2;
    auto f = bl::build_fpe({.n = n, .k = k});
    auto a = bl::reverse_conjugate(f);
    Circuit both(2 * n, 0);
    for (const auto& op : f.ops())
        both.append(op);
    for (const auto& op : a.ops())
        both.append(op);
    auto in = fpe_input(n, 5, 11);
    auto out = run_deferred(both, in);
    CHECK(state_distance(out, in).two_norm < 1e-10);
}

TEST_CASE("fpe depth tracks the block size") {
    for (int n : {4, 6, 8}) {
        auto c1 = bl::build_fpe({.n = n, .k = 1});
        CHECK(depth(c1) <= 70);  // constant for fixed k
    }
}

TEST_CASE("fpe superposition overlap matches the per-j product") {
    const int n = 4, k = 1;
    auto c = bl::build_fpe({.n = n, .k = k});
    const std::uint64_t N = 1ull << n;
    // environment: one extra register of n qubits marking j
    const int width = 2 * n + n;
    StateVector in(width);
    in.amps[0] = 0.0;
    auto mesh = bl::mesh_2n(n);
    const auto& a_pos = mesh.positions("A");
    const auto& b_pos = mesh.positions("B");
    for (std::uint64_t j = 0; j < N; ++j)
        for (std::uint64_t kk = 0; kk < N; ++kk) {
            std::size_t idx = std::size_t(j) << (2 * n);
            for (int l = 0; l < n; ++l) {
                if ((j >> l) & 1)
                    idx |= std::size_t(1) << a_pos[l];
                if ((kk >> l) & 1)
                    idx |= std::size_t(1) << b_pos[l];
            }
            double frac = double((j * kk) % N) / double(N);
            in.amps[idx] = std::polar(1.0, 2.0 * M_PI * frac) / double(N);
        }
    Circuit wide(width, 0);
    for (const auto& op : c.ops())
        wide.append(op);
    auto out = run_deferred(wide, in);

    // projector onto (A=0, B=phi(j), E=j): mass = (1/N) sum (1-eps_j)^2
    double want = 0.0;
    for (std::uint64_t j = 0; j < N; ++j) {
        double e = an::epsilon_j(j, n, k).eps_j;
        want += (1.0 - e) * (1.0 - e) / double(N);
    }
    double got = 0.0;
    for (std::uint64_t j = 0; j < N; ++j) {
        cplx acc = 0.0;
        for (std::uint64_t kk = 0; kk < N; ++kk) {
            std::size_t idx = std::size_t(j) << (2 * n);
            for (int l = 0; l < n; ++l)
                if ((kk >> l) & 1)
                    idx |= std::size_t(1) << b_pos[l];
            double frac = double((j * kk) % N) / double(N);
            acc += std::conj(std::polar(1.0, 2.0 * M_PI * frac) / std::sqrt(double(N))) *
                   out.amps[idx];
        }
        got += std::norm(acc);
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
}
