#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qfl/analysis.hpp"

using namespace qfl;
namespace an = qfl::analysis;

TEST_CASE("eps prime inverts the sine bound") {
    for (double eps : {0.01, 0.1, 0.5}) {
        double ep = an::choose_eps_prime(eps);
        CHECK(std::abs(2.0 * std::sin(2.0 * M_PI * ep) - eps) < 1e-12);
        CHECK(ep < eps / (4.0 * M_PI) + eps * eps * eps);
    }
    CHECK(an::choose_eps_prime(0.1) == doctest::Approx(0.0079615).epsilon(1e-4));
    CHECK_THROWS_AS(an::choose_eps_prime(1.5), std::invalid_argument);
}

TEST_CASE("xi vanishes when nothing is truncated") {
    for (std::uint64_t j = 0; j < 16; ++j)
        for (std::uint64_t k = 0; k < 16; ++k)
            CHECK(an::xi(j, k, 4, 4) == 0.0);
    for (std::uint64_t k = 0; k < 16; ++k)
        CHECK(an::xi(0, k, 4, 1) == 0.0);
}

TEST_CASE("xi magnitude bound") {
    int n = 6;
    for (int kmax = 1; kmax <= n; ++kmax) {
        double bound = std::ldexp(1.0, -kmax) * std::max(0, n - kmax - 1) +
                       std::ldexp(1.0, -n);
        for (std::uint64_t j = 0; j < 64; j += 7)
            for (std::uint64_t k = 0; k < 64; k += 5)
                CHECK(std::abs(an::xi(j, k, n, kmax)) <= bound + 1e-15);
    }
}

TEST_CASE("wrap distance") {
    CHECK(an::wrap_distance(0, 16) == 0);
    CHECK(an::wrap_distance(5, 16) == 5);
    CHECK(an::wrap_distance(8, 16) == 8);
    CHECK(an::wrap_distance(13, 16) == 3);
    for (std::uint64_t x = 0; x < 16; ++x)
        CHECK(an::wrap_distance(x, 16) == an::wrap_distance(16 - x, 16));
}

TEST_CASE("fpe windows partition the estimated bits") {
    for (int n : {2, 4, 5, 6, 8, 9, 12})
        for (int k = 1; 2 * k <= n + 1; ++k) {
            auto ws = an::fpe_windows(n, k);
            std::vector<int> covered(n, 0);
            for (const auto& w : ws) {
                CHECK(w.size >= 1);
                CHECK(w.offset + w.size <= n);
                for (int i = w.est_lo; i < w.est_hi; ++i)
                    covered[i]++;
            }
            for (int i = 0; i < n; ++i)
                CHECK(covered[i] == 1);
        }
}

TEST_CASE("epsilon_j vanishes on exact multiples") {
    // j a multiple of 2^{2km} for every window offset: all fractions zero
    int n = 6, k = 3;
    auto p = an::epsilon_j(0, n, k);
    CHECK(p.eps_j == 0.0);
    // 2k = n: single window, every j exact
    for (std::uint64_t j = 0; j < 64; ++j)
        CHECK(an::epsilon_j(j, n, k).eps_j == 0.0);
}

TEST_CASE("epsilon_j bound off the bad set") {
    for (int n : {4, 6, 8})
        for (int k = 1; k <= n / 2; ++k) {
            if (n % (2 * k) != 0)
                continue;
            double bound = double(n) / (double(k) * std::ldexp(1.0, k / 2.0));
            for (std::uint64_t j = 0; j < (1ull << n); ++j) {
                auto p = an::epsilon_j(j, n, k);
                CHECK(p.eps_j >= -1e-15);
                CHECK(p.eps_j <= 1.0 + 1e-15);
                if (!p.in_bad_set)
                    CHECK(p.eps_j <= bound + 1e-12);
            }
        }
}

TEST_CASE("bad set count and bound") {
    for (int n : {4, 6, 8, 10, 12})
        for (int k = 1; k <= n / 2; ++k) {
            if (n % k != 0)
                continue;
            auto b = an::bad_set(n, k, n <= 10);
            CHECK(double(b.count) <= b.bound + 1e-9);
            if (!b.members.empty())
                CHECK(b.members.size() == b.count);
        }
    // degenerate small-k regime: everything is bad
    auto b1 = an::bad_set(4, 1);
    CHECK(b1.count == (1ull << 4));
    // j = 0 sits in B (blocks equal zero, |0| <= 2^{k/2})
    auto b2 = an::bad_set(8, 4);
    REQUIRE(!b2.members.empty());
    CHECK(b2.members.front() == 0);
}

TEST_CASE("block size choice") {
    for (int n : {4, 8, 16})
        for (double eps : {0.1, 0.25, 0.5})
            for (double p : {1.0, 2.0}) {
                auto kc = an::choose_block_k(n, eps, p);
                CHECK(an::fpe_bound(n, eps, p, kc.theoretical) <= eps + 1e-12);
                CHECK(kc.clamped >= 1);
            }
    auto kc = an::choose_block_k(8, 0.5, 1.0);
    bool ok = kc.clamped == 1 || kc.clamped == 2 || kc.clamped == 4;
    CHECK(ok);
    // doubling p raises the theoretical size by exactly 2
    auto k1 = an::choose_block_k(8, 0.25, 1.0);
    auto k2 = an::choose_block_k(8, 0.25, 2.0);
    CHECK(k2.theoretical - k1.theoretical == 2);
}

TEST_CASE("dft oracle") {
    auto h = an::dft_oracle(1);
    CHECK(std::abs(h(0, 0) - cplx(1.0 / std::sqrt(2.0))) < 1e-12);
    CHECK(std::abs(h(1, 1) + cplx(1.0 / std::sqrt(2.0))) < 1e-12);

    for (int n : {2, 4, 6, 8}) {
        auto f = an::dft_oracle(n);
        Eigen::MatrixXcd id = f.adjoint() * f;
        CHECK((id - Eigen::MatrixXcd::Identity(id.rows(), id.cols())).norm() < 1e-10);
    }

    auto f2 = an::dft_oracle(2);
    CHECK(std::abs(f2(1, 1) - cplx(0.0, 0.5)) < 1e-12);
    CHECK(std::abs(f2(2, 1) - cplx(-0.5, 0.0)) < 1e-12);
    CHECK(std::abs(f2(3, 1) - cplx(0.0, -0.5)) < 1e-12);
}

TEST_CASE("uniform state sampler satisfies the correlation condition") {
    const int n = 3, e = 3;
    std::vector<int> a_pos = {0, 1, 2}, e_pos = {3, 4, 5};
    auto s = an::sample_uniform_state(6, a_pos, e_pos, 42);
    const std::uint64_t N = 1 << n, M = 1 << e;
    // beta_{j,m} = amp at index (j, m); check sum_m beta_j beta_l^*
    for (std::uint64_t j = 0; j < N; ++j)
        for (std::uint64_t l = 0; l < N; ++l) {
            cplx acc = 0.0;
            for (std::uint64_t m = 0; m < M; ++m)
                acc += s.amps[j | (m << n)] * std::conj(s.amps[l | (m << n)]);
            if (j == l)
                CHECK(std::abs(acc - cplx(1.0 / N)) < 1e-12);
            else
                CHECK(std::abs(acc) < 1e-12);
        }
}

TEST_CASE("spectral distance basics") {
    auto f = an::dft_oracle(2);
    auto d = an::distance_spectral(f, f);
    CHECK(d.spectral < 1e-12);

    Eigen::MatrixXcd g = std::polar(1.0, 0.7) * f;
    d = an::distance_spectral(g, f);
    CHECK(d.spectral > 0.1);
    CHECK(d.phase_minimized < 1e-8);
    CHECK(d.entangled_witness <= d.spectral + 1e-12);
}
