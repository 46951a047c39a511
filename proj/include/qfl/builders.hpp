#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qfl/circuit.hpp"

namespace qfl::builders {

/// Tracks which logical token sits at which line position while SWAP
/// networks move qubits around. Builders derive the final RegisterMap
/// from it.
class LineLayout {
public:
    explicit LineLayout(int width)
        : token_at_(width, -1), pos_of_(width, -1) {}

    int width() const { return static_cast<int>(token_at_.size()); }
    int pos(int token) const { return pos_of_.at(token); }
    int token(int position) const { return token_at_.at(position); }

    void place(int position, int token) {
        if (token >= static_cast<int>(pos_of_.size()))
            pos_of_.resize(token + 1, -1);
        token_at_.at(position) = token;
        pos_of_.at(token) = position;
    }

    /// Emits SWAP(p, q) and updates the tracking; p, q must be adjacent.
    void emit_swap(Circuit& c, int p, int q);

private:
    std::vector<int> token_at_;
    std::vector<int> pos_of_;
};

/// Canonical meshed layout on 2n positions: A_l at 2(n-1-l), B_m at 2m+1
/// (registers interleaved, A reversed relative to B).
RegisterMap mesh_2n(int n);

struct QfsParams {
    int n = 0;
    int k_max = 0;           // ignored when exact
    bool exact = false;
    bool adjoint = false;
    // classical integer replacing the quantum control register
    std::optional<std::uint64_t> classical_control;
};

/// Quantum Fourier state computation on the canonical mesh: the diagonal
/// phase omega_N^{jk} with rotations beyond k_max dropped, realized as
/// ascending-band phase/SWAP brickwork that returns to the input layout.
/// With classical_control set, emits the exact phase pattern for the
/// known integer as plain single-qubit rotations on an n-qubit line.
Circuit build_qfs(const QfsParams& p);

/// Exact QFT mod 2^W on W contiguous qubits starting at `base`, nearest
/// neighbor gates only, bit t at position base+t on input and output.
Circuit build_small_qft(int w, int base = 0, bool adjoint = false);

struct FpeParams {
    int n = 0;
    int k = 0;
    bool barred = false;   // variant for |phi(-j)> inputs (conjugated blocks)
};

/// Fourier phase estimation |b>|phi(j)> -> |b xor j>|phi(j)> on the
/// canonical mesh via parallel block transforms; window layout per
/// analysis::fpe_windows.
Circuit build_fpe(const FpeParams& p);

/// Measurement-based CX between two distant line positions using the
/// ancillas strictly between them (all |0>, returned to |0>). Constant
/// depth (6 layers) for every distance >= 2.
Circuit build_longrange_cx(int control, int target, int width);

enum class LongRange {
    Direct,   // emit tree gates at distance (audit waived)
    Gadget,   // dynamic gadgets + SWAP co-location, audit clean
};

struct AdderParams {
    int n = 0;
    std::optional<std::uint64_t> classical_c;  // classical addend
    bool adjoint = false;                      // subtract instead of add
    LongRange long_range = LongRange::Gadget;
};

/// In-place carry-lookahead adder |b>|c> -> |b+c mod 2^n>|c> (register B
/// holds the sum; quantum operand in A or a classical constant).
Circuit build_adder(const AdderParams& p);

enum class Direction { Forward, Backward };
enum class McmOpt { None, MeasureEarly, PostselectFlag };

struct QftVariant {
    Direction direction = Direction::Forward;
    McmOpt mcm = McmOpt::None;
    std::optional<int> force_k;      // override the clamped block size
    std::optional<int> force_k_max;  // override the phase truncation
};

/// Composed approximate QFT for uniform inputs on a 2n line:
/// H layer, QFS^(eps/2), FPE^(eps/2), final register relabeling.
Circuit build_qft_uni(int n, double eps, const QftVariant& v = {});

/// General-input approximate QFT on <= 4n qubits: classical phase and
/// adder wrappers around build_qft_uni, with (c1, c2) drawn from the seed.
struct GeneralQft {
    Circuit circuit;
    std::uint64_t c1 = 0;
    std::uint64_t c2 = 0;
};
GeneralQft build_qft_general(int n, double eps, std::uint64_t seed,
                             const QftVariant& v = {});

/// Reversed op order with conjugated phases; rejects measurements.
Circuit reverse_conjugate(const Circuit& c);

}  // namespace qfl::builders
