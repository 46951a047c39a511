#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qfl {

/// Gate set of the line IR. Phase gates store the dyadic exponent k
/// (angle = sign * 2*pi / 2^k) as an integer, never as a float.
enum class Gate {
    H,
    X,
    Z,
    S,
    RK,    // single-qubit phase, angle sign*2pi/2^k
    CP,    // controlled phase, same angle convention
    CX,
    CZ,
    SWAP,
    CCX,
    M,     // Z-basis measurement (X-basis measures are lowered to H + M)
    RESET,
};

const char* gate_name(Gate g);
int gate_arity(Gate g);
Gate gate_from_name(const std::string& name);

/// Parity (XOR) of a set of classical bits, optionally negated.
/// An empty parity set encodes a constant: false, or true when negated.
struct ClassicalExpr {
    std::vector<int> parity;
    bool negate = false;

    bool operator==(const ClassicalExpr&) const = default;
};

struct Operation {
    Gate g;
    std::vector<int> qubits;
    std::vector<int> clbits;               // measurement targets
    int k = 0;                             // RK/CP only
    int sign = 1;                          // RK/CP only, +1 or -1
    std::optional<ClassicalExpr> cond;     // single-qubit gates only

    bool operator==(const Operation&) const = default;
};

/// Logical register -> line positions. Bit l of register R sits at
/// positions[l]; integer values follow j = sum_l 2^l j_l.
struct RegisterMap {
    std::map<std::string, std::vector<int>> regs;

    const std::vector<int>& positions(const std::string& name) const;
    bool has(const std::string& name) const { return regs.count(name) != 0; }
    int size(const std::string& name) const;
    /// Checks all mapped positions are distinct and inside [0, width).
    void validate(int width) const;

    bool operator==(const RegisterMap&) const = default;
};

struct Violation {
    std::size_t op_index;
    int distance;
};

struct DepthReport {
    int width = 0;
    int n_layers = 0;
    int n_gates = 0;
    int n_measurements = 0;
    int n_conditioned = 0;
    int max_gate_distance = 0;
};

/// Ordered list of operations over line-indexed qubits plus classical bits.
/// Circuits are plain values: builders construct them, analyses treat them
/// as immutable.
class Circuit {
public:
    Circuit() = default;
    Circuit(int width, int n_clbits = 0);

    int width() const { return width_; }
    int n_clbits() const { return n_clbits_; }
    const std::vector<Operation>& ops() const { return ops_; }
    const RegisterMap& registers() const { return registers_; }
    RegisterMap& registers() { return registers_; }
    const std::map<std::string, std::string>& metadata() const { return metadata_; }

    void set_metadata(const std::string& key, const std::string& value);
    std::string metadata_at(const std::string& key) const;

    /// Grows the classical bit count (used while building dynamic circuits).
    int add_clbit();

    /// Validates and appends one operation, preserving program order.
    /// Throws std::invalid_argument on out-of-range indices, arity
    /// mismatches, or a condition reading a classical bit that no earlier
    /// measurement wrote.
    void append(Operation op);

    // convenience emitters
    void h(int q) { append({Gate::H, {q}}); }
    void x(int q) { append({Gate::X, {q}}); }
    void z(int q) { append({Gate::Z, {q}}); }
    void s(int q) { append({Gate::S, {q}}); }
    void rk(int q, int k, int sign = 1) { append({Gate::RK, {q}, {}, k, sign}); }
    void cp(int a, int b, int k, int sign = 1) { append({Gate::CP, {a, b}, {}, k, sign}); }
    void cx(int c, int t) { append({Gate::CX, {c, t}}); }
    void cz(int a, int b) { append({Gate::CZ, {a, b}}); }
    void swap(int a, int b) { append({Gate::SWAP, {a, b}}); }
    void ccx(int c1, int c2, int t) { append({Gate::CCX, {c1, c2, t}}); }
    void measure(int q, int clbit) { append({Gate::M, {q}, {clbit}}); }
    void measure_x(int q, int clbit) { h(q); measure(q, clbit); }
    void reset(int q) { append({Gate::RESET, {q}}); }

    bool operator==(const Circuit& other) const;

private:
    int width_ = 0;
    int n_clbits_ = 0;
    std::vector<Operation> ops_;
    RegisterMap registers_;
    std::map<std::string, std::string> metadata_;
    std::vector<bool> clbit_written_;
};

/// Greedy as-soon-as-possible schedule. Returns the layer index of every
/// op; ops in one layer touch disjoint qubits, and an op conditioned on a
/// classical bit lands strictly after the measurement writing it.
/// Evaluating the classical condition itself is free.
std::vector<int> layerize(const Circuit& c);

int depth(const Circuit& c);

/// Pass iff every multi-qubit gate acts on contiguous line positions
/// (adjacent pair, or three consecutive positions for CCX).
std::vector<Violation> audit_connectivity(const Circuit& c);

DepthReport depth_report(const Circuit& c);

/// Checks that a layer assignment is consistent with per-qubit and
/// per-classical-bit dependencies of the circuit (test oracle for
/// layerize).
bool schedule_respects_dependencies(const Circuit& c, const std::vector<int>& layers);

std::string serialize(const Circuit& c);
Circuit deserialize(const std::string& doc);

}  // namespace qfl
