#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qfl/circuit.hpp"

namespace qfl {

using cplx = std::complex<double>;

/// Dense amplitudes over line qubits; basis index bit p corresponds to
/// line position p, position 0 being the least significant index bit.
struct StateVector {
    int width = 0;
    std::vector<cplx> amps;

    StateVector() = default;
    explicit StateVector(int w) : width(w), amps(std::size_t(1) << w, cplx(0.0)) {
        amps[0] = 1.0;
    }

    std::size_t dim() const { return amps.size(); }
    double norm2() const;
};

struct MeasEntry {
    int clbit;
    std::size_t op_index;
    int outcome;  // -1 while deferred
};

struct MeasRecord {
    std::uint64_t seed = 0;
    std::vector<MeasEntry> entries;
    std::vector<int> bits;  // latest value per classical bit, -1 if unwritten

    int bit(int c) const { return bits.at(c); }
};

enum class SimMode { Sampled, Deferred };

struct SimOptions {
    SimMode mode = SimMode::Sampled;
    std::uint64_t seed = 0;
    double norm_tol = 1e-10;
};

struct SimResult {
    StateVector state;
    MeasRecord record;
};

/// Runs a dynamic circuit on an initial state.
///
/// Sampled mode collapses each measurement by the Born rule with the
/// seeded generator and applies conditioned gates iff their classical
/// expression evaluates true; identical seeds give identical records.
///
/// Deferred mode keeps measured qubits coherent: each measurement
/// entangles the qubit with a fresh record qubit appended above the
/// circuit width, and conditioned gates act as parity-controlled
/// quantum gates on the records. The returned state has
/// width + n_measurements qubits. Reset is rejected in deferred mode.
SimResult run(const Circuit& c, const StateVector& initial, const SimOptions& opts);

SimResult run(const Circuit& c, const SimOptions& opts);

/// Computational basis state with each named register holding its
/// integer per the j = sum_l 2^l j_l convention.
StateVector prepare_basis(int width, const RegisterMap& map,
                          const std::map<std::string, std::uint64_t>& values);

/// |phi(j)> on the given register, |0> elsewhere: amplitude
/// omega_N^{jk} / sqrt(N) on register value k.
StateVector fourier_state(int width, const RegisterMap& map, const std::string& reg,
                          std::uint64_t j);

struct StateDistance {
    double two_norm;
    double fidelity;            // |<u|v>|^2
    double phase_aligned;       // min over global phase of ||e^{i phi} u - v||
};

StateDistance state_distance(const StateVector& u, const StateVector& v);

/// Keeps only the qubits in `keep` (ascending); the discarded qubits must
/// be unentangled or the projection below loses norm. Used to strip
/// deferred-measurement records: returns the normalized restriction of the
/// dominant branch together with the norm captured by it.
StateVector project_keep(const StateVector& s, const std::vector<int>& keep);

}  // namespace qfl
