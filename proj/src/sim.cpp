#include "qfl/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qfl {

namespace {

constexpr double kPi = std::numbers::pi;

cplx dyadic_phase(int k, int sign) {
    // exp(sign * 2*pi*i / 2^k), k >= 1
    double angle = sign * 2.0 * kPi / std::ldexp(1.0, k);
    return std::polar(1.0, angle);
}

struct Kernel {
    std::vector<cplx>& a;
    int width;

    std::size_t dim() const { return a.size(); }

    void apply_1q(int q, cplx m00, cplx m01, cplx m10, cplx m11,
                  std::uint64_t cmask = 0, bool cneg = false) {
        const std::size_t bit = std::size_t(1) << q;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (i & bit)
                continue;
            if (cmask || cneg) {
                bool on = (std::popcount(i & cmask) & 1) != 0;
                if (cneg)
                    on = !on;
                if (!on)
                    continue;
            }
            cplx a0 = a[i], a1 = a[i | bit];
            a[i] = m00 * a0 + m01 * a1;
            a[i | bit] = m10 * a0 + m11 * a1;
        }
    }

    void phase_on_bit(int q, cplx phase) {
        const std::size_t bit = std::size_t(1) << q;
        for (std::size_t i = 0; i < dim(); ++i)
            if (i & bit)
                a[i] *= phase;
    }

    void cp(int q1, int q2, cplx phase) {
        const std::size_t m = (std::size_t(1) << q1) | (std::size_t(1) << q2);
        for (std::size_t i = 0; i < dim(); ++i)
            if ((i & m) == m)
                a[i] *= phase;
    }

    void cx(int c, int t) {
        const std::size_t bc = std::size_t(1) << c, bt = std::size_t(1) << t;
        for (std::size_t i = 0; i < dim(); ++i)
            if ((i & bc) && !(i & bt))
                std::swap(a[i], a[i | bt]);
    }

    void ccx(int c1, int c2, int t) {
        const std::size_t bc = (std::size_t(1) << c1) | (std::size_t(1) << c2);
        const std::size_t bt = std::size_t(1) << t;
        for (std::size_t i = 0; i < dim(); ++i)
            if ((i & bc) == bc && !(i & bt))
                std::swap(a[i], a[i | bt]);
    }

    void swap_q(int p, int q) {
        const std::size_t bp = std::size_t(1) << p, bq = std::size_t(1) << q;
        for (std::size_t i = 0; i < dim(); ++i)
            if ((i & bp) && !(i & bq))
                std::swap(a[i], a[i ^ bp ^ bq]);
    }

    double prob_one(int q) const {
        const std::size_t bit = std::size_t(1) << q;
        double p = 0.0;
        for (std::size_t i = 0; i < dim(); ++i)
            if (i & bit)
                p += std::norm(a[i]);
        return p;
    }

    void collapse(int q, int outcome, double p) {
        const std::size_t bit = std::size_t(1) << q;
        const double scale = 1.0 / std::sqrt(p);
        for (std::size_t i = 0; i < dim(); ++i) {
            bool one = (i & bit) != 0;
            if (one == (outcome == 1))
                a[i] *= scale;
            else
                a[i] = 0.0;
        }
    }
};

}  // namespace

double StateVector::norm2() const {
    double s = 0.0;
    for (const cplx& v : amps)
        s += std::norm(v);
    return s;
}

SimResult run(const Circuit& c, const StateVector& initial, const SimOptions& opts) {
    if (initial.width != c.width())
        throw std::invalid_argument("initial state width mismatch");
    if (std::abs(initial.norm2() - 1.0) > 1e-8)
        throw std::invalid_argument("initial state is not normalized");

    const bool deferred = opts.mode == SimMode::Deferred;
    int n_meas = 0;
    for (const Operation& op : c.ops())
        if (op.g == Gate::M)
            ++n_meas;

    SimResult res;
    res.record.seed = opts.seed;
    res.record.bits.assign(c.n_clbits(), -1);

    int total_width = c.width() + (deferred ? n_meas : 0);
    if (total_width > 30)
        throw std::invalid_argument("state too wide for dense simulation");
    res.state.width = total_width;
    res.state.amps.assign(std::size_t(1) << total_width, cplx(0.0));
    std::copy(initial.amps.begin(), initial.amps.end(), res.state.amps.begin());

    Kernel K{res.state.amps, total_width};
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    int next_record = c.width();
    // latest writer record qubit per classical bit (deferred mode)
    std::vector<int> record_qubit(c.n_clbits(), -1);

    for (std::size_t i = 0; i < c.ops().size(); ++i) {
        const Operation& op = c.ops()[i];

        std::uint64_t cmask = 0;
        bool cneg = false;
        bool skip = false;
        if (op.cond) {
            if (deferred) {
                for (int b : op.cond->parity)
                    cmask |= std::uint64_t(1) << record_qubit[b];
                cneg = op.cond->negate;
                if (cmask == 0 && !cneg)
                    skip = true;  // constant-false condition
            } else {
                int par = 0;
                for (int b : op.cond->parity)
                    par ^= res.record.bits[b];
                if (op.cond->negate)
                    par ^= 1;
                skip = (par == 0);
            }
        }
        if (skip)
            continue;

        switch (op.g) {
            case Gate::H: {
                const double r = 1.0 / std::sqrt(2.0);
                K.apply_1q(op.qubits[0], r, r, r, -r, cmask, cneg);
                break;
            }
            case Gate::X:
                K.apply_1q(op.qubits[0], 0, 1, 1, 0, cmask, cneg);
                break;
            case Gate::Z:
                K.apply_1q(op.qubits[0], 1, 0, 0, -1, cmask, cneg);
                break;
            case Gate::S:
                K.apply_1q(op.qubits[0], 1, 0, 0, cplx(0, 1), cmask, cneg);
                break;
            case Gate::RK:
                K.apply_1q(op.qubits[0], 1, 0, 0, dyadic_phase(op.k, op.sign), cmask, cneg);
                break;
            case Gate::CP:
                K.cp(op.qubits[0], op.qubits[1], dyadic_phase(op.k, op.sign));
                break;
            case Gate::CX:
                K.cx(op.qubits[0], op.qubits[1]);
                break;
            case Gate::CZ:
                K.cp(op.qubits[0], op.qubits[1], -1.0);
                break;
            case Gate::SWAP:
                K.swap_q(op.qubits[0], op.qubits[1]);
                break;
            case Gate::CCX:
                K.ccx(op.qubits[0], op.qubits[1], op.qubits[2]);
                break;
            case Gate::M: {
                if (deferred) {
                    int rec = next_record++;
                    K.cx(op.qubits[0], rec);
                    record_qubit[op.clbits[0]] = rec;
                    res.record.entries.push_back({op.clbits[0], i, -1});
                } else {
                    double p1 = K.prob_one(op.qubits[0]);
                    int outcome = unif(rng) < p1 ? 1 : 0;
                    double p = outcome ? p1 : 1.0 - p1;
                    if (p <= 0.0) {  // numerically impossible branch
                        outcome ^= 1;
                        p = 1.0 - p;
                    }
                    K.collapse(op.qubits[0], outcome, p);
                    res.record.bits[op.clbits[0]] = outcome;
                    res.record.entries.push_back({op.clbits[0], i, outcome});
                }
                break;
            }
            case Gate::RESET: {
                if (deferred)
                    throw std::invalid_argument("Reset is not supported in deferred mode");
                double p1 = K.prob_one(op.qubits[0]);
                int outcome = unif(rng) < p1 ? 1 : 0;
                double p = outcome ? p1 : 1.0 - p1;
                if (p <= 0.0) {
                    outcome ^= 1;
                    p = 1.0 - p;
                }
                K.collapse(op.qubits[0], outcome, p);
                if (outcome == 1)
                    K.apply_1q(op.qubits[0], 0, 1, 1, 0);
                break;
            }
        }
    }

    double n2 = res.state.norm2();
    if (std::abs(n2 - 1.0) > std::max(opts.norm_tol * 100.0, 1e-8))
        throw std::runtime_error("simulation lost normalization");
    return res;
}

SimResult run(const Circuit& c, const SimOptions& opts) {
    return run(c, StateVector(c.width()), opts);
}

StateVector prepare_basis(int width, const RegisterMap& map,
                          const std::map<std::string, std::uint64_t>& values) {
    std::size_t index = 0;
    for (const auto& [name, value] : values) {
        const std::vector<int>& pos = map.positions(name);
        if (pos.size() < 64 && value >= (std::uint64_t(1) << pos.size()))
            throw std::invalid_argument("value does not fit register " + name);
        for (std::size_t l = 0; l < pos.size(); ++l)
            if ((value >> l) & 1)
                index |= std::size_t(1) << pos[l];
    }
    StateVector s(width);
    s.amps[0] = 0.0;
    s.amps[index] = 1.0;
    return s;
}

StateVector fourier_state(int width, const RegisterMap& map, const std::string& reg,
                          std::uint64_t j) {
    const std::vector<int>& pos = map.positions(reg);
    int n = static_cast<int>(pos.size());
    std::uint64_t N = std::uint64_t(1) << n;
    if (j >= N)
        throw std::invalid_argument("fourier index out of range");

    StateVector s(width);
    s.amps[0] = 0.0;
    const double scale = 1.0 / std::sqrt(double(N));
    for (std::uint64_t k = 0; k < N; ++k) {
        std::size_t index = 0;
        for (int l = 0; l < n; ++l)
            if ((k >> l) & 1)
                index |= std::size_t(1) << pos[l];
        // exact reduction of j*k mod N before the float division
        double frac = double((j * k) % N) / double(N);
        s.amps[index] = scale * std::polar(1.0, 2.0 * kPi * frac);
    }
    return s;
}

StateDistance state_distance(const StateVector& u, const StateVector& v) {
    if (u.width != v.width)
        throw std::invalid_argument("state width mismatch");
    double d2 = 0.0;
    cplx inner(0.0);
    for (std::size_t i = 0; i < u.dim(); ++i) {
        d2 += std::norm(u.amps[i] - v.amps[i]);
        inner += std::conj(u.amps[i]) * v.amps[i];
    }
    double ov = std::abs(inner);
    // evaluate || e^{i phi} u - v || elementwise at the optimal phase;
    // the closed form sqrt(2 - 2|<u|v>|) loses half the digits near zero
    cplx rot = ov > 0 ? inner / ov : cplx(1.0);
    double a2 = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i)
        a2 += std::norm(rot * u.amps[i] - v.amps[i]);
    return {std::sqrt(d2), ov * ov, std::sqrt(a2)};
}

StateVector project_keep(const StateVector& s, const std::vector<int>& keep) {
    const int kw = static_cast<int>(keep.size());
    StateVector out(kw);
    out.amps.assign(std::size_t(1) << kw, cplx(0.0));

    // locate the discarded-part pattern with the largest mass
    std::size_t keep_mask = 0;
    for (int q : keep)
        keep_mask |= std::size_t(1) << q;

    std::map<std::size_t, double> rest_mass;
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (std::norm(s.amps[i]) > 0)
            rest_mass[i & ~keep_mask] += std::norm(s.amps[i]);
    std::size_t best = 0;
    double best_mass = -1.0;
    for (const auto& [r, m] : rest_mass)
        if (m > best_mass) {
            best_mass = m;
            best = r;
        }

    for (std::size_t i = 0; i < s.dim(); ++i) {
        if ((i & ~keep_mask) != best)
            continue;
        std::size_t packed = 0;
        for (int b = 0; b < kw; ++b)
            if (i & (std::size_t(1) << keep[b]))
                packed |= std::size_t(1) << b;
        out.amps[packed] = s.amps[i];
    }
    double n2 = out.norm2();
    if (n2 > 0)
        for (cplx& a : out.amps)
            a /= std::sqrt(n2);
    return out;
}

}  // namespace qfl
