#include "qfl/analysis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qfl::analysis {

namespace {
constexpr double kPi = std::numbers::pi;
}

double choose_eps_prime(double eps) {
    if (eps <= 0.0 || eps >= 1.0)
        throw std::invalid_argument("eps must lie in (0, 1)");
    return std::asin(eps / 2.0) / (2.0 * kPi);
}

KmaxChoice choose_k_max(int n, double eps_prime) {
    if (n < 1 || eps_prime <= 0.0)
        throw std::invalid_argument("invalid k_max inputs");
    int k = std::max(1, (int)std::ceil(std::log2(double(n) / eps_prime)));
    bool ok = std::ldexp(1.0, -n) <= eps_prime;
    return {k, ok};
}

double xi(std::uint64_t j, std::uint64_t k_bits, int n, int k_max) {
    double acc = 0.0;
    for (int l = 0; l < n; ++l) {
        if (!((j >> l) & 1))
            continue;
        int m_hi = n - l - k_max;  // exclusive
        for (int m = 0; m < m_hi; ++m) {
            if ((k_bits >> m) & 1)
                acc += std::ldexp(1.0, l + m - n);
        }
    }
    return acc;
}

double xi_scan_distance(int n, int k_max) {
    const std::uint64_t N = 1ull << n;
    double worst = 0.0;
    for (std::uint64_t j = 0; j < N; ++j)
        for (std::uint64_t kb = 0; kb < N; ++kb) {
            double x = xi(j, kb, n, k_max);
            worst = std::max(worst, std::abs(2.0 * std::sin(kPi * x)));
        }
    return worst;
}

std::uint64_t wrap_distance(std::uint64_t x, std::uint64_t N) {
    std::uint64_t r = x % N;
    return r <= N / 2 ? r : N - r;
}

std::vector<FpeWindow> fpe_windows(int n, int k) {
    if (k < 1 || n < 1)
        throw std::invalid_argument("invalid window parameters");
    std::vector<FpeWindow> out;
    for (int o = 0; o < n; o += 2 * k) {
        int s = std::min(2 * k, n - o);
        if (o == 0) {
            out.push_back({1, o, s, 0, s});
        } else if (s > k) {
            out.push_back({1, o, s, o + k, o + s});
        }
    }
    for (int o = k; o < n; o += 2 * k) {
        int s = std::min(2 * k, n - o);
        if (s > k)
            out.push_back({2, o, s, o + k, o + s});
    }
    return out;
}

namespace {

/// Leakage of one window: total |gamma_x|^2 mass on estimates x whose
/// bits [est_lo-o, est_hi-o) differ from j's.
double window_leakage(std::uint64_t j, const FpeWindow& w) {
    const std::uint64_t M = 1ull << w.size;
    const std::uint64_t mod = w.offset ? (1ull << w.offset) : 1;
    const std::uint64_t frac_num = w.offset ? (j & (mod - 1)) : 0;
    if (frac_num == 0)
        return 0.0;  // smeared pointmass collapses to an exact estimate

    const double delta = double(frac_num) / double(mod);
    const std::uint64_t X = (j >> w.offset) & (M - 1);
    const int lo = w.est_lo - w.offset;
    const int hi = w.est_hi - w.offset;
    const std::uint64_t est_mask = ((1ull << (hi - lo)) - 1) << lo;
    const std::uint64_t want = (X & est_mask);

    const double num = std::sin(kPi * delta);  // |1 - e^{2 pi i delta}| / 2
    double good = 0.0;
    for (std::uint64_t x = 0; x < M; ++x) {
        if ((x & est_mask) != want)
            continue;
        double theta = (double(X) - double(x) + delta) / double(M);
        double den = double(M) * std::sin(kPi * theta);
        good += (num * num) / (den * den);
    }
    return std::max(0.0, 1.0 - good);
}

}  // namespace

namespace {

/// Filtered window vector Q P Q^dag applied to the window's slice of
/// phi(j): V[y] = sum over good estimates x of gamma_x omega^{xy}/sqrt(M),
/// where "good" means the estimated bits of x agree with j.
std::vector<cplx> filtered_window_vector(std::uint64_t j, const FpeWindow& w) {
    const std::uint64_t M = 1ull << w.size;
    const std::uint64_t mod = w.offset ? (1ull << w.offset) : 1;
    const double delta = w.offset ? double(j & (mod - 1)) / double(mod) : 0.0;
    const double X = double((j >> w.offset) & (M - 1)) + delta;

    std::vector<cplx> gamma(M);
    for (std::uint64_t x = 0; x < M; ++x) {
        cplx acc = 0.0;
        if (delta == 0.0) {
            gamma[x] = (double(x) == X) ? 1.0 : 0.0;
            continue;
        }
        for (std::uint64_t r = 0; r < M; ++r)
            acc += std::polar(1.0, 2.0 * kPi * double(r) * (X - double(x)) / double(M));
        gamma[x] = acc / double(M);
    }

    const int lo = w.est_lo - w.offset;
    const int hi = w.est_hi - w.offset;
    const std::uint64_t est_mask = ((1ull << (hi - lo)) - 1) << lo;
    const std::uint64_t want = (std::uint64_t((j >> w.offset)) & est_mask);

    std::vector<cplx> v(M, cplx(0.0));
    const double scale = 1.0 / std::sqrt(double(M));
    for (std::uint64_t x = 0; x < M; ++x) {
        if ((x & est_mask) != want)
            continue;
        for (std::uint64_t y = 0; y < M; ++y) {
            double frac = double((x * y) % M) / double(M);
            v[y] += gamma[x] * scale * std::polar(1.0, 2.0 * kPi * frac);
        }
    }
    return v;
}

/// The filtered state of one pass as a full 2^n vector over the Fourier
/// register slots: filtered windows in place, untouched slots keep their
/// phi(j) single-qubit factors. Window [o, o+s) of j-bits sits on slots
/// [n-o-s, n-o).
std::vector<cplx> pass_vector(std::uint64_t j, int n, const std::vector<FpeWindow>& ws,
                              int pass) {
    const std::uint64_t N = 1ull << n;
    std::vector<int> slot_window(n, -1);
    std::vector<std::vector<cplx>> vecs;
    std::vector<int> slot_lo, sizes;
    for (const FpeWindow& w : ws) {
        if (w.pass != pass)
            continue;
        int lo = n - w.offset - w.size;
        vecs.push_back(filtered_window_vector(j, w));
        slot_lo.push_back(lo);
        sizes.push_back(w.size);
        for (int s = lo; s < lo + w.size; ++s)
            slot_window[s] = static_cast<int>(vecs.size()) - 1;
    }
    std::vector<cplx> out(N, cplx(1.0));
    for (std::uint64_t y = 0; y < N; ++y) {
        cplx v = 1.0;
        for (std::size_t wi = 0; wi < vecs.size(); ++wi) {
            std::uint64_t local = 0;
            for (int b = 0; b < sizes[wi]; ++b)
                if ((y >> (slot_lo[wi] + b)) & 1)
                    local |= 1ull << b;
            v *= vecs[wi][local];
        }
        for (int s = 0; s < n; ++s) {
            if (slot_window[s] >= 0)
                continue;
            // untouched slot: single-qubit factor of phi(j)
            if ((y >> s) & 1) {
                double frac = double((j << s) & (N - 1)) / double(N);
                v *= std::polar(1.0, 2.0 * kPi * frac) / std::sqrt(2.0);
            } else {
                v *= 1.0 / std::sqrt(2.0);
            }
        }
        out[y] = v;
    }
    return out;
}

}  // namespace

BlockProfile epsilon_j(std::uint64_t j, int n, int k) {
    BlockProfile p;
    p.j = j;
    p.n = n;
    p.k = k;
    auto ws = fpe_windows(n, k);
    double keep = 1.0;
    for (const FpeWindow& w : ws) {
        double e = window_leakage(j, w);
        p.window_eps.push_back(e);
        p.window_frac.push_back(w.offset ? double(j & ((1ull << w.offset) - 1)) /
                                               std::ldexp(1.0, w.offset)
                                         : 0.0);
        keep *= 1.0 - e;
    }
    p.eps_j_product = 1.0 - keep;

    // Exact amplitude <phi(j)| Pi_2 Pi_1 |phi(j)>: the two passes share
    // window slots, so their residuals interfere; the per-window product
    // is only the leading term. Contract the filtered pass states.
    bool pass2_empty = true;
    for (const FpeWindow& w : ws)
        if (w.pass == 2)
            pass2_empty = false;
    if (pass2_empty) {
        p.eps_j = p.eps_j_product;
    } else {
        auto v1 = pass_vector(j, n, ws, 1);
        auto v2 = pass_vector(j, n, ws, 2);
        cplx amp = 0.0;
        for (std::size_t y = 0; y < v1.size(); ++y)
            amp += std::conj(v2[y]) * v1[y];
        p.eps_j = 1.0 - amp.real();
        if (std::abs(amp.imag()) > 1e-9)
            throw std::logic_error("fpe overlap amplitude should be real");
    }
    if (n % k == 0) {
        const std::uint64_t bk = 1ull << k;
        // integer comparison |v|^2 <= 2^k, exact also for odd k
        for (int m = 1; m < n / k; ++m) {
            std::uint64_t v = (j >> (k * m)) & (bk - 1);
            std::uint64_t d = wrap_distance(v, bk);
            if (double(d) * double(d) <= std::ldexp(1.0, k)) {
                p.in_bad_set = true;
                break;
            }
        }
    }
    return p;
}

BadSetResult bad_set(int n, int k, bool materialize) {
    if (k < 1 || n % k != 0)
        throw std::invalid_argument("bad_set requires k | n");
    BadSetResult r;
    const std::uint64_t N = 1ull << n;
    const std::uint64_t bk = 1ull << k;
    const int blocks = n / k;

    std::uint64_t good_per_block = 0;
    for (std::uint64_t v = 0; v < bk; ++v) {
        std::uint64_t d = wrap_distance(v, bk);
        if (double(d) * double(d) > std::ldexp(1.0, k))
            ++good_per_block;
    }
    // block q_0 is unconstrained; blocks are independent digits
    std::uint64_t good_total = bk;
    for (int m = 1; m < blocks; ++m)
        good_total *= good_per_block;
    r.count = N - good_total;
    r.bound = double(n) * double(N) / (double(k) * std::ldexp(1.0, k / 2.0 - 1.0));

    if (materialize && n <= 20) {
        r.members.reserve(r.count);
        for (std::uint64_t j = 0; j < N; ++j) {
            bool bad = false;
            for (int m = 1; m < blocks && !bad; ++m) {
                std::uint64_t v = (j >> (k * m)) & (bk - 1);
                std::uint64_t d = wrap_distance(v, bk);
                bad = double(d) * double(d) <= std::ldexp(1.0, k);
            }
            if (bad)
                r.members.push_back(j);
        }
        if (r.members.size() != r.count)
            throw std::logic_error("bad set product count disagrees with enumeration");
    }
    return r;
}

double fpe_bound(int n, double /*eps*/, double p, int k) {
    return std::sqrt(6.0 * n * p / (double(k) * std::ldexp(1.0, k / 2.0)));
}

BlockKChoice choose_block_k(int n, double eps, double p) {
    if (eps <= 0.0 || eps >= 1.0 || p < 1.0)
        throw std::invalid_argument("invalid block-size inputs");
    int theo = std::max(1, (int)std::ceil(2.0 * std::log2(6.0 * n * p / (eps * eps))));
    int half = (n + 1) / 2;  // 2k >= n: a single full window, exact estimation
    int cap = std::min(theo, half);
    int clamped = 0;
    for (int k = cap; k >= 1; --k) {
        if (2 * k >= n || n % (2 * k) == 0) {
            clamped = k;
            break;
        }
    }
    if (clamped == 0)
        clamped = std::max(1, cap);
    return {theo, clamped};
}

ErrorBudget make_error_budget(int n, double eps, double p) {
    ErrorBudget b;
    b.eps = eps;
    b.eps_qfs = eps / 2.0;
    b.eps_fpe = eps / 2.0;
    b.p = p;
    b.eps_prime = choose_eps_prime(b.eps_qfs);
    b.k_max = choose_k_max(n, b.eps_prime).k_max;
    auto kc = choose_block_k(n, b.eps_fpe, p);
    b.k_theoretical = kc.theoretical;
    b.k_clamped = kc.clamped;
    b.qfs_bound = 2.0 * std::sin(2.0 * kPi * b.eps_prime);
    b.fpe_bound_val = fpe_bound(n, b.eps_fpe, p, kc.theoretical);
    b.composite_bound = b.eps_qfs + b.eps_fpe;
    return b;
}

Eigen::MatrixXcd dft_oracle(int n) {
    if (n > 12)
        throw std::invalid_argument("dense DFT capped at n = 12");
    const std::uint64_t N = 1ull << n;
    Eigen::MatrixXcd F(N, N);
    const double scale = 1.0 / std::sqrt(double(N));
    for (std::uint64_t j = 0; j < N; ++j)
        for (std::uint64_t k = 0; k < N; ++k) {
            double frac = double((j * k) % N) / double(N);
            F(k, j) = scale * std::polar(1.0, 2.0 * kPi * frac);
        }
    return F;
}

StateVector dft_reference(const StateVector& in, const std::vector<int>& in_pos,
                          const std::vector<int>& out_pos, int sign) {
    const int n = static_cast<int>(in_pos.size());
    if (out_pos.size() != in_pos.size())
        throw std::invalid_argument("register size mismatch");
    const std::uint64_t N = 1ull << n;
    std::size_t in_mask = 0, out_mask = 0;
    for (int p : in_pos)
        in_mask |= std::size_t(1) << p;
    for (int p : out_pos)
        out_mask |= std::size_t(1) << p;

    StateVector out(in.width);
    out.amps.assign(in.dim(), cplx(0.0));
    const double scale = 1.0 / std::sqrt(double(N));
    for (std::size_t i = 0; i < in.dim(); ++i) {
        if (in.amps[i] == cplx(0.0))
            continue;
        std::uint64_t j = 0;
        for (int b = 0; b < n; ++b)
            if (i & (std::size_t(1) << in_pos[b]))
                j |= 1ull << b;
        std::size_t base = i & ~in_mask;
        if (base & out_mask)
            throw std::invalid_argument("output register must start in |0>");
        for (std::uint64_t kv = 0; kv < N; ++kv) {
            std::size_t idx = base;
            for (int b = 0; b < n; ++b)
                if ((kv >> b) & 1)
                    idx |= std::size_t(1) << out_pos[b];
            std::uint64_t prod = (j * kv) % N;
            double frac = double(sign > 0 ? prod : (N - prod) % N) / double(N);
            out.amps[idx] += in.amps[i] * scale * std::polar(1.0, 2.0 * kPi * frac);
        }
    }
    return out;
}

namespace {

void apply_dense_2q(StateVector& s, int q0, int q1, const Eigen::Matrix4cd& U) {
    const std::size_t b0 = std::size_t(1) << q0, b1 = std::size_t(1) << q1;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        if (i & (b0 | b1))
            continue;
        Eigen::Vector4cd v;
        v << s.amps[i], s.amps[i | b0], s.amps[i | b1], s.amps[i | b0 | b1];
        Eigen::Vector4cd w = U * v;
        s.amps[i] = w(0);
        s.amps[i | b0] = w(1);
        s.amps[i | b1] = w(2);
        s.amps[i | b0 | b1] = w(3);
    }
}

Eigen::Matrix4cd haar_like_4(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::Matrix4cd A;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            A(r, c) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::Matrix4cd> qr(A);
    Eigen::Matrix4cd Q = qr.householderQ();
    Eigen::Matrix4cd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < 4; ++c) {
        cplx d = R(c, c);
        Q.col(c) *= d / std::abs(d);
    }
    return Q;
}

}  // namespace

StateVector sample_uniform_state(int width, const std::vector<int>& a_pos,
                                 const std::vector<int>& env_pos, std::uint64_t seed,
                                 int p) {
    const int n = static_cast<int>(a_pos.size());
    const int e = static_cast<int>(env_pos.size());
    if (e < n)
        throw std::invalid_argument("environment too small for the correlation pattern");
    if (p < 1 || (p & (p - 1)) != 0 || (1 << n) % p != 0)
        throw std::invalid_argument("p must be a power of two dividing N");

    const std::uint64_t support = (1ull << n) / p;
    StateVector s(width);
    s.amps[0] = 0.0;
    const double amp = 1.0 / std::sqrt(double(support));
    for (std::uint64_t j = 0; j < support; ++j) {
        std::size_t idx = 0;
        for (int b = 0; b < n; ++b)
            if ((j >> b) & 1)
                idx |= std::size_t(1) << a_pos[b];
        for (int b = 0; b < e; ++b)
            if ((j >> b) & 1)
                idx |= std::size_t(1) << env_pos[b];
        s.amps[idx] = amp;
    }

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    for (int round = 0; round < 2; ++round)
        for (int b = round % 2; b + 1 < e; b += 2)
            apply_dense_2q(s, env_pos[b], env_pos[b + 1], haar_like_4(rng));
    return s;
}

Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
    int n_meas = 0;
    for (const Operation& op : c.ops())
        if (op.g == Gate::M)
            ++n_meas;
    if (c.width() + n_meas > 12)
        throw std::invalid_argument("circuit too wide for a dense unitary");

    const std::size_t dim = std::size_t(1) << c.width();
    const std::size_t out_dim = std::size_t(1) << (c.width() + n_meas);
    Eigen::MatrixXcd U(out_dim, dim);
    SimOptions opts;
    opts.mode = SimMode::Deferred;
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector basis(c.width());
        basis.amps[0] = 0.0;
        basis.amps[col] = 1.0;
        SimResult r = run(c, basis, opts);
        for (std::size_t row = 0; row < out_dim; ++row)
            U(row, col) = r.state.amps[row];
    }
    return U;
}

SpectralDistance distance_spectral(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& V,
                                   const std::vector<std::size_t>& subspace_columns) {
    if (U.rows() != V.rows() || U.cols() != V.cols())
        throw std::invalid_argument("dimension mismatch");

    Eigen::MatrixXcd Mu, Mv;
    if (subspace_columns.empty()) {
        Mu = U;
        Mv = V;
    } else {
        Mu.resize(U.rows(), subspace_columns.size());
        Mv.resize(V.rows(), subspace_columns.size());
        for (std::size_t c = 0; c < subspace_columns.size(); ++c) {
            Mu.col(c) = U.col(subspace_columns[c]);
            Mv.col(c) = V.col(subspace_columns[c]);
        }
    }

    auto sigma_max = [](const Eigen::MatrixXcd& M) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        return svd.singularValues()(0);
    };

    SpectralDistance d;
    d.spectral = sigma_max(Mu - Mv);
    d.entangled_witness = (Mu - Mv).norm() / std::sqrt(double(Mu.cols()));

    // golden-section refinement of min_phi sigma_max(e^{i phi} U - V)
    auto eval = [&](double phi) { return sigma_max(std::polar(1.0, phi) * Mu - Mv); };
    double best_phi = 0.0, best = d.spectral;
    for (int g = 0; g < 64; ++g) {
        double phi = 2.0 * kPi * g / 64.0;
        double v = eval(phi);
        if (v < best) {
            best = v;
            best_phi = phi;
        }
    }
    double lo = best_phi - 2.0 * kPi / 64.0, hi = best_phi + 2.0 * kPi / 64.0;
    for (int it = 0; it < 48; ++it) {
        double m1 = lo + (hi - lo) * 0.381966;
        double m2 = hi - (hi - lo) * 0.381966;
        if (eval(m1) < eval(m2))
            hi = m2;
        else
            lo = m1;
    }
    d.phase_minimized = std::min(best, eval(0.5 * (lo + hi)));
    return d;
}

}  // namespace qfl::analysis
