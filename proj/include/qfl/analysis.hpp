#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qfl/sim.hpp"

namespace qfl::analysis {

/// eps' = arcsin(eps/2) / (2 pi); guarantees 2 sin(2 pi eps') = eps.
double choose_eps_prime(double eps);

/// k_max = max(1, ceil(log2(n / eps'))). Warns (returns flag) when the
/// working assumption 2^-n <= eps' is violated.
struct KmaxChoice {
    int k_max;
    bool small_n_assumption_ok;
};
KmaxChoice choose_k_max(int n, double eps_prime);

/// Truncated-phase defect xi_{jk} = sum_l sum_{m=0}^{n-l-kmax-1}
/// 2^{l+m-n} j_l k_m for the QFS with threshold k_max.
double xi(std::uint64_t j, std::uint64_t k_bits, int n, int k_max);

/// max_{j,k} |1 - e^{-2 pi i xi_{jk}}|, scanned exhaustively.
double xi_scan_distance(int n, int k_max);

/// Wrap-around distance |x|_N: x mod N if <= N/2, else N - (x mod N).
std::uint64_t wrap_distance(std::uint64_t x, std::uint64_t N);

/// One estimation window of the block-QFT phase estimation. Window
/// [offset, offset+size) of the Fourier register estimates j bits
/// [est_lo, est_hi); the fractional part below `offset` smears the
/// estimate. Windows with offset 0 are exact.
struct FpeWindow {
    int pass;     // 1 or 2
    int offset;
    int size;
    int est_lo;
    int est_hi;
};

/// Window layout for block size k on n bits. For 2k | n this reproduces
/// the aligned block structure (pass 1 estimates odd blocks plus both
/// halves of the lowest window, pass 2 the even blocks); otherwise the
/// top windows shrink and estimation stays a partition of [0, n).
std::vector<FpeWindow> fpe_windows(int n, int k);

struct BlockProfile {
    std::uint64_t j = 0;
    int n = 0;
    int k = 0;
    std::vector<double> window_eps;   // leakage per window, aligned with fpe_windows
    std::vector<double> window_frac;  // fractional part per window
    double eps_j = 0.0;               // exact: 1 - <phi| Pi_2 Pi_1 |phi>
    double eps_j_product = 0.0;       // leading term 1 - prod(1 - eps_m)
    bool in_bad_set = false;          // only meaningful when k | n
};

/// Per-window leakage from the closed-form gamma amplitudes, plus the
/// total eps_j. The two estimation passes share window qubits, so the
/// residuals of overlapping windows interfere; eps_j contracts the
/// filtered pass states exactly, while eps_j_product keeps the
/// per-window product (the two agree whenever at most one pass leaks).
BlockProfile epsilon_j(std::uint64_t j, int n, int k);

struct BadSetResult {
    std::uint64_t count = 0;
    double bound = 0.0;                  // n N / (k 2^{k/2-1})
    std::vector<std::uint64_t> members;  // materialized for n <= 20
};

/// Exact bad set B: j in B iff some block q_m (m >= 1) has
/// |j_{q_m}|_{2^k} <= 2^{k/2}. Requires k | n.
BadSetResult bad_set(int n, int k, bool materialize = true);

struct BlockKChoice {
    int theoretical;
    int clamped;
};

/// Theoretical k = ceil(2 log2(6 n p / eps^2)); clamped to the largest
/// feasible block size on n qubits (2k | n preferred, single full window
/// when the theory asks for more than n/2).
BlockKChoice choose_block_k(int n, double eps, double p = 1.0);

/// sqrt(6 n p / (k 2^{k/2})), the FPE error bound at block size k.
double fpe_bound(int n, double eps_unused, double p, int k);

/// Error budget for one synthesis run of the composed transform.
struct ErrorBudget {
    double eps = 0.0;
    double eps_qfs = 0.0;     // sub-budget handed to the phase stage
    double eps_fpe = 0.0;     // sub-budget handed to the estimation stage
    double eps_prime = 0.0;   // arcsin(eps_qfs/2)/(2 pi)
    int k_max = 0;
    int k_theoretical = 0;
    int k_clamped = 0;
    double p = 1.0;
    double qfs_bound = 0.0;       // 2 sin(2 pi eps')
    double fpe_bound_val = 0.0;   // at the theoretical k
    double composite_bound = 0.0; // eps_qfs + eps_fpe
};

ErrorBudget make_error_budget(int n, double eps, double p = 1.0);

/// N x N matrix with entries omega_N^{jk} / sqrt(N).
Eigen::MatrixXcd dft_oracle(int n);

/// Applies the ideal transform |j>_{in} -> |phi(sign*j)>_{out} to a state,
/// with the input register erased to |0>. Input and output position lists
/// may coincide or be disjoint; any other qubits ride along unchanged.
StateVector dft_reference(const StateVector& in, const std::vector<int>& in_pos,
                          const std::vector<int>& out_pos, int sign = 1);

/// Seeded member of S_uni^(p): (A register uniform over a block of size
/// N/p, entangled with a scrambled environment; B fixed to |0>).
/// Guarantees sum_m beta_{j,m} beta*_{l,m} = (p/N) delta_{jl} on the
/// support. p must be a power of two dividing N.
StateVector sample_uniform_state(int width, const std::vector<int>& a_pos,
                                 const std::vector<int>& env_pos, std::uint64_t seed,
                                 int p = 1);

/// Dense unitary of a measurement-free (or deferred-able) circuit,
/// columns in position-basis order. Total deferred width <= 12.
Eigen::MatrixXcd circuit_unitary(const Circuit& c);

struct SpectralDistance {
    double spectral;          // largest singular value of (U - V) P
    double phase_minimized;   // min over global phase
    double entangled_witness; // ||(U-V)P||_F / sqrt(#cols), lower witness
};

/// Operator distances restricted to the subspace spanned by the given
/// basis columns (all columns when empty).
SpectralDistance distance_spectral(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& V,
                                   const std::vector<std::size_t>& subspace_columns = {});

}  // namespace qfl::analysis
