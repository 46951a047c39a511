#include "qfl/builders.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "qfl/analysis.hpp"

namespace qfl::builders {

void LineLayout::emit_swap(Circuit& c, int p, int q) {
    c.swap(p, q);
    int tp = token_at_[p], tq = token_at_[q];
    token_at_[p] = tq;
    token_at_[q] = tp;
    if (tp >= 0)
        pos_of_[tp] = q;
    if (tq >= 0)
        pos_of_[tq] = p;
}

RegisterMap mesh_2n(int n) {
    RegisterMap m;
    std::vector<int> a(n), b(n);
    for (int l = 0; l < n; ++l)
        a[l] = 2 * (n - 1 - l);
    for (int i = 0; i < n; ++i)
        b[i] = 2 * i + 1;
    m.regs["A"] = a;
    m.regs["B"] = b;
    return m;
}

namespace {

/// Odd-even transposition routing: rearranges the tokens of positions
/// [lo, lo+len) into `want` (want[i] = token that must end at lo+i).
void route_region(Circuit& c, LineLayout& lay, int lo, const std::vector<int>& want) {
    const int len = static_cast<int>(want.size());
    std::map<int, int> goal;
    for (int i = 0; i < len; ++i)
        goal[want[i]] = i;
    for (int sweep = 0; sweep <= len; ++sweep) {
        bool changed = false;
        for (int parity = 0; parity < 2; ++parity) {
            for (int i = parity; i + 1 < len; i += 2) {
                int ta = lay.token(lo + i), tb = lay.token(lo + i + 1);
                if (goal.at(ta) > goal.at(tb)) {
                    lay.emit_swap(c, lo + i, lo + i + 1);
                    changed = true;
                }
            }
        }
        if (!changed)
            return;
    }
    throw std::logic_error("routing did not converge");
}

/// Bubbled nearest-neighbor QFT mod 2^W on the given contiguous
/// positions: value bit t enters and leaves at pos[t]. The adjoint is the
/// reversed, phase-conjugated schedule. Net qubit movement is zero.
void emit_lnn_qft(Circuit& c, const std::vector<int>& pos, bool adjoint) {
    const int w = static_cast<int>(pos.size());
    struct Item {
        Gate g;
        int a, b, k;
    };
    std::vector<Item> items;
    for (int r = 0; r < w; ++r) {
        items.push_back({Gate::H, pos[w - 1], -1, 0});
        for (int d = w - 2; d >= r; --d) {
            items.push_back({Gate::CP, pos[d], pos[d + 1], w - d});
            items.push_back({Gate::SWAP, pos[d], pos[d + 1], 0});
        }
    }
    if (adjoint)
        std::reverse(items.begin(), items.end());
    const int sign = adjoint ? -1 : 1;
    for (const Item& it : items) {
        switch (it.g) {
            case Gate::H: c.h(it.a); break;
            case Gate::CP: c.cp(it.a, it.b, it.k, sign); break;
            case Gate::SWAP: c.swap(it.a, it.b); break;
            default: break;
        }
    }
}

constexpr int tok_a(int l) { return l; }
constexpr int tok_b(int n, int m) { return n + m; }
bool is_a(int n, int t) { return t >= 0 && t < n; }
bool is_b(int n, int t) { return t >= n && t < 2 * n; }

void mesh_place(LineLayout& lay, int n) {
    for (int l = 0; l < n; ++l)
        lay.place(2 * (n - 1 - l), tok_a(l));
    for (int m = 0; m < n; ++m)
        lay.place(2 * m + 1, tok_b(n, m));
}

/// Ascending-band phase/SWAP brickwork for the QFS on the canonical
/// mesh, followed by the reversed SWAP schedule so the layout is
/// restored. Bands k = 1..k_max; band k couples A_l with B_m where
/// k = n - l - m.
void emit_qfs(Circuit& c, LineLayout& lay, int n, int k_max, int sign) {
    const int bands = std::min(k_max, n);
    std::vector<std::vector<bool>> applied(n, std::vector<bool>(n, false));
    std::size_t needed = 0;
    for (int k = 1; k <= bands; ++k)
        needed += n - k + 1;
    std::size_t done = 0;

    auto phase_pass = [&]() {
        for (int p = 0; p + 1 < 2 * n; ++p) {
            int t1 = lay.token(p), t2 = lay.token(p + 1);
            int l = -1, m = -1;
            if (is_a(n, t1) && is_b(n, t2)) {
                l = t1;
                m = t2 - n;
            } else if (is_b(n, t1) && is_a(n, t2)) {
                l = t2;
                m = t1 - n;
            } else {
                continue;
            }
            int k = n - l - m;
            if (k >= 1 && k <= bands && !applied[l][m]) {
                c.cp(p, p + 1, k, sign);
                applied[l][m] = true;
                ++done;
            }
        }
    };

    std::vector<std::vector<int>> swap_layers;
    phase_pass();
    while (done < needed) {
        std::vector<int> swaps;
        int p = 0;
        while (p + 1 < 2 * n) {
            if (is_b(n, lay.token(p)) && is_a(n, lay.token(p + 1))) {
                swaps.push_back(p);
                p += 2;
            } else {
                ++p;
            }
        }
        if (swaps.empty())
            break;
        for (int q : swaps)
            lay.emit_swap(c, q, q + 1);
        swap_layers.push_back(swaps);
        phase_pass();
    }
    if (done != needed)
        throw std::logic_error("QFS brickwork missed phase pairs");

    for (auto it = swap_layers.rbegin(); it != swap_layers.rend(); ++it)
        for (int q : *it)
            lay.emit_swap(c, q, q + 1);
}

/// Exact diagonal phases for a classically known control integer:
/// for every pair (l of value, m of target) with k = n - l - m in [1, n],
/// an Rk on target bit m whenever bit l of `value` is set.
void emit_classical_qfs(Circuit& c, const std::vector<int>& target_pos,
                        std::uint64_t value, int sign) {
    const int n = static_cast<int>(target_pos.size());
    for (int m = 0; m < n; ++m)
        for (int l = 0; l < n; ++l) {
            if (!((value >> l) & 1))
                continue;
            int k = n - l - m;
            if (k >= 1 && k <= n)
                c.rk(target_pos[m], k, sign);
        }
}

/// One estimation window of the FPE on the canonical mesh. Gathers the
/// window's Fourier qubits, runs the block transform, pairs estimate bits
/// with their A targets, erases, and restores everything.
void emit_fpe_window(Circuit& c, LineLayout& lay, int n, const analysis::FpeWindow& w,
                     bool barred, const std::vector<int>* a_clbits) {
    const int s = w.size;
    const int b0 = n - w.offset - s;  // lowest B slot of the window
    const int lo = 2 * b0;

    std::vector<int> mesh_tokens(2 * s);
    for (int i = 0; i < 2 * s; ++i)
        mesh_tokens[i] = lay.token(lo + i);

    // stage A: window Fourier bits to the low half, A bits parked high
    std::vector<int> gathered(2 * s);
    for (int t = 0; t < s; ++t)
        gathered[t] = tok_b(n, b0 + t);
    for (int u = 0; u < s; ++u)
        gathered[s + u] = tok_a(w.offset + u);
    route_region(c, lay, lo, gathered);

    // stage B: estimation transform (QFT^dag, or QFT for the barred flavor)
    std::vector<int> block(s);
    for (int t = 0; t < s; ++t)
        block[t] = lo + t;
    emit_lnn_qft(c, block, /*adjoint=*/!barred);

    // stage C: pair estimate bit t with A bit offset+t
    std::vector<int> paired(2 * s);
    for (int t = 0; t < s; ++t) {
        paired[2 * t] = tok_b(n, b0 + t);
        paired[2 * t + 1] = tok_a(w.offset + t);
    }
    route_region(c, lay, lo, paired);

    for (int i = w.est_lo; i < w.est_hi; ++i) {
        int t = i - w.offset;
        if (a_clbits) {
            // measured-early variant: the CNOT target was X-measured,
            // leaving a classically controlled Z on the estimate qubit
            Operation op{Gate::Z, {lo + 2 * t}};
            op.cond = ClassicalExpr{{(*a_clbits)[i]}, false};
            c.append(op);
        } else {
            c.cx(lo + 2 * t, lo + 2 * t + 1);
        }
    }

    route_region(c, lay, lo, gathered);
    emit_lnn_qft(c, block, /*adjoint=*/barred);
    route_region(c, lay, lo, mesh_tokens);
}

void emit_fpe(Circuit& c, LineLayout& lay, int n, int k, bool barred,
              const std::vector<int>* a_clbits) {
    auto windows = analysis::fpe_windows(n, k);
    for (int pass = 1; pass <= 2; ++pass)
        for (const auto& w : windows)
            if (w.pass == pass)
                emit_fpe_window(c, lay, n, w, barred, a_clbits);
}

/// Measurement-based long-range CX; constant depth (6 layers) at every
/// distance. Intermediate positions must hold |0> ancillas; they are
/// measured out and returned to |0> by the conditioned corrections.
void emit_longrange_cx(Circuit& c, int control, int target) {
    const int step = target > control ? 1 : -1;
    std::vector<int> inter;
    for (int p = control + step; p != target; p += step)
        inter.push_back(p);
    const int m = static_cast<int>(inter.size());
    if (m < 1)
        throw std::invalid_argument("long-range CX needs distance >= 2");

    if (m == 1) {
        // Bell half formed with the target through a CZ, one relay qubit;
        // the correction is applied in the rotated frame before the
        // closing Hadamard
        int a = inter[0];
        c.h(a);
        c.h(target);
        c.cz(a, target);
        c.cx(control, a);
        int bit = c.add_clbit();
        c.measure(a, bit);
        Operation fix_t{Gate::Z, {target}};
        fix_t.cond = ClassicalExpr{{bit}, false};
        c.append(fix_t);
        Operation fix_a{Gate::X, {a}};
        fix_a.cond = ClassicalExpr{{bit}, false};
        c.append(fix_a);
        c.h(target);
        return;
    }

    const bool has_relay = (m % 2) == 1;
    const int relay = has_relay ? inter[0] : -1;
    std::vector<int> us, vs;  // Bell halves: u (value side), v (phase side)
    for (int i = has_relay ? 1 : 0; i + 1 < m; i += 2) {
        us.push_back(inter[i]);
        vs.push_back(inter[i + 1]);
    }

    for (int u : us)
        c.h(u);
    for (std::size_t i = 0; i < us.size(); ++i)
        c.cx(us[i], vs[i]);
    if (has_relay)
        c.cx(control, relay);

    // couplings: value flows control -> u_1 -> ... -> target
    std::vector<int> sources, sinks;
    sources.push_back(has_relay ? relay : control);
    for (std::size_t i = 0; i + 1 < vs.size(); ++i)
        sources.push_back(vs[i]);
    for (int u : us)
        sinks.push_back(u);
    if (!vs.empty())
        sources.push_back(vs.back());
    sinks.push_back(target);
    for (std::size_t i = 0; i < sources.size(); ++i)
        c.cx(sources[i], sinks[i]);

    // X-basis readout of the phase carriers, Z-basis of the value carriers
    std::vector<int> value_bits, phase_bits;
    std::vector<std::pair<int, int>> anc_bits;  // (position, clbit)
    if (has_relay) {
        c.h(relay);
        int bit = c.add_clbit();
        c.measure(relay, bit);
        phase_bits.push_back(bit);
        anc_bits.push_back({relay, bit});
    }
    for (int v : vs)
        c.h(v);
    for (int u : us) {
        int bit = c.add_clbit();
        c.measure(u, bit);
        value_bits.push_back(bit);
        anc_bits.push_back({u, bit});
    }
    for (int v : vs) {
        int bit = c.add_clbit();
        c.measure(v, bit);
        phase_bits.push_back(bit);
        anc_bits.push_back({v, bit});
    }

    Operation fix_t{Gate::X, {target}};
    fix_t.cond = ClassicalExpr{value_bits, false};
    c.append(fix_t);
    Operation fix_c{Gate::Z, {control}};
    fix_c.cond = ClassicalExpr{phase_bits, false};
    c.append(fix_c);
    for (const auto& [pos, bit] : anc_bits) {
        Operation rst{Gate::X, {pos}};
        rst.cond = ClassicalExpr{{bit}, false};
        c.append(rst);
    }
}

// ---------------------------------------------------------------------
// carry-lookahead adder
// ---------------------------------------------------------------------

struct AdderTokens {
    int n = 0;
    bool quantum = false;
    bool gadget = false;
    int n_tokens = 0;
    std::vector<int> a, b, z, w, u;  // token ids (z[i] is carry into bit i+1)
};

struct LogicalOp {
    Gate g;
    std::vector<int> tokens;  // control(s) first, target last for CX/CCX
};

/// Register-level op list for the in-place adder; `cbits` holds the
/// classical addend when there is no quantum A register.
std::vector<LogicalOp> adder_logical_ops(const AdderTokens& tk,
                                         std::uint64_t classical_c) {
    const int n = tk.n;
    std::vector<LogicalOp> ops;
    auto cbit = [&](int i) { return ((classical_c >> i) & 1) != 0; };

    auto emit_g_forward = [&]() {  // Z_{i+1} ^= a_i b_i
        for (int i = 0; i + 1 < n; ++i) {
            if (tk.quantum)
                ops.push_back({Gate::CCX, {tk.a[i], tk.b[i], tk.z[i]}});
            else if (cbit(i))
                ops.push_back({Gate::CX, {tk.b[i], tk.z[i]}});
        }
    };
    auto emit_p_forward = [&]() {  // B_i ^= a_i
        for (int i = 0; i < n; ++i) {
            if (tk.quantum)
                ops.push_back({Gate::CX, {tk.a[i], tk.b[i]}});
            else if (cbit(i))
                ops.push_back({Gate::X, {tk.b[i]}});
        }
    };

    // Brent-Kung tree rounds; P_0[m] lives in B, P_t[m] (t>=1) in W slots.
    const int T = n > 1 ? (int)std::floor(std::log2((double)n)) : 0;
    std::map<std::pair<int, int>, int> p_slot;  // (t, m) -> W token
    {
        // collect the P products the G and C rounds actually reference
        std::set<std::pair<int, int>> needed;
        for (int t = 1; t <= T; ++t)
            for (int mm = 0;; ++mm) {
                long idx = (2L * mm + 2) << (t - 1);
                if (idx > n - 1)
                    break;
                if (t - 1 >= 1)
                    needed.insert({t - 1, 2 * mm + 1});
            }
        for (int t = T; t >= 1; --t)
            for (int mm = 1;; ++mm) {
                long idx = (2L * mm + 1) << (t - 1);
                if (idx > n - 1)
                    break;
                if (t - 1 >= 1)
                    needed.insert({t - 1, 2 * mm});
            }
        // children of needed products are needed too
        for (int t = T; t >= 2; --t)
            for (auto& [tt, mm] : std::set<std::pair<int, int>>(needed))
                if (tt == t)
                    for (int child : {2 * mm, 2 * mm + 1})
                        if (t - 1 >= 1)
                            needed.insert({t - 1, child});
        int next = 0;
        for (auto& [t, mm] : needed) {
            if (next >= (int)tk.w.size())
                throw std::logic_error("adder workspace undersized");
            p_slot[{t, mm}] = tk.w[next++];
        }
    }

    auto p_token = [&](int t, int mm) -> int {
        if (t == 0)
            return tk.b[mm];
        auto it = p_slot.find({t, mm});
        if (it == p_slot.end())
            return -1;
        return it->second;
    };

    std::vector<LogicalOp> tree;
    for (int t = 1; t <= T; ++t)  // P rounds
        for (auto& [key, slot] : p_slot) {
            if (key.first != t)
                continue;
            int mm = key.second;
            int c0 = p_token(t - 1, 2 * mm), c1 = p_token(t - 1, 2 * mm + 1);
            if (c0 < 0 || c1 < 0)
                throw std::logic_error("missing propagate child");
            tree.push_back({Gate::CCX, {c0, c1, slot}});
        }
    for (int t = 1; t <= T; ++t)  // G rounds
        for (int mm = 0;; ++mm) {
            long tgt = (2L * mm + 2) << (t - 1);
            if (tgt > n - 1)
                break;
            long src = (2L * mm + 1) << (t - 1);
            int pc = p_token(t - 1, 2 * mm + 1);
            if (pc < 0)
                throw std::logic_error("missing propagate for G round");
            tree.push_back({Gate::CCX, {tk.z[src - 1], pc, tk.z[tgt - 1]}});
        }
    for (int t = T; t >= 1; --t)  // C rounds
        for (int mm = 1;; ++mm) {
            long tgt = (2L * mm + 1) << (t - 1);
            if (tgt > n - 1)
                break;
            long src = (2L * mm) << (t - 1);
            int pc = p_token(t - 1, 2 * mm);
            if (pc < 0)
                throw std::logic_error("missing propagate for C round");
            tree.push_back({Gate::CCX, {tk.z[src - 1], pc, tk.z[tgt - 1]}});
        }
    for (int t = T; t >= 1; --t)  // inverse P rounds
        for (auto it = p_slot.rbegin(); it != p_slot.rend(); ++it) {
            if (it->first.first != t)
                continue;
            int mm = it->first.second;
            tree.push_back({Gate::CCX,
                            {p_token(t - 1, 2 * mm), p_token(t - 1, 2 * mm + 1), it->second}});
        }

    emit_g_forward();
    emit_p_forward();
    for (const auto& op : tree)
        ops.push_back(op);
    for (int i = 1; i < n; ++i)  // B_i ^= c_i
        ops.push_back({Gate::CX, {tk.z[i - 1], tk.b[i]}});
    for (int i = 1; i < n; ++i)  // Z -> complement carries of the (not a, s) chain
        ops.push_back({Gate::X, {tk.z[i - 1]}});
    // B -> p~ = (not a) xor s
    for (int i = 0; i < n; ++i) {
        if (tk.quantum)
            ops.push_back({Gate::CX, {tk.a[i], tk.b[i]}});
        else if (cbit(i))
            ops.push_back({Gate::X, {tk.b[i]}});
        ops.push_back({Gate::X, {tk.b[i]}});
    }
    for (auto it = tree.rbegin(); it != tree.rend(); ++it)  // inverse tree
        ops.push_back(*it);
    // B back to s
    for (int i = 0; i < n; ++i) {
        ops.push_back({Gate::X, {tk.b[i]}});
        if (tk.quantum)
            ops.push_back({Gate::CX, {tk.a[i], tk.b[i]}});
        else if (cbit(i))
            ops.push_back({Gate::X, {tk.b[i]}});
    }
    // clear the residual generate array: Z_1 ^= (not a_0) or s_0,
    // Z_{i+1} ^= (not a_i) s_i
    if (n >= 2) {
        if (tk.quantum) {
            ops.push_back({Gate::X, {tk.z[0]}});
            ops.push_back({Gate::X, {tk.b[0]}});
            ops.push_back({Gate::CCX, {tk.a[0], tk.b[0], tk.z[0]}});
            ops.push_back({Gate::X, {tk.b[0]}});
        } else if (cbit(0)) {
            ops.push_back({Gate::CX, {tk.b[0], tk.z[0]}});
        } else {
            ops.push_back({Gate::X, {tk.z[0]}});
        }
        for (int i = 1; i + 1 < n; ++i) {
            if (tk.quantum) {
                ops.push_back({Gate::X, {tk.a[i]}});
                ops.push_back({Gate::CCX, {tk.a[i], tk.b[i], tk.z[i]}});
                ops.push_back({Gate::X, {tk.a[i]}});
            } else if (!cbit(i)) {
                ops.push_back({Gate::CX, {tk.b[i], tk.z[i]}});
            }
        }
    }
    return ops;
}

/// Emits a logical op at current positions, inserting SWAP chains or
/// dynamic gadgets so every emitted gate is nearest-neighbor.
struct AdderEmitter {
    Circuit& c;
    LineLayout& lay;
    LongRange mode;
    std::vector<bool> clean;  // token -> guaranteed |0> right now

    bool span_clean(int lo, int hi) const {
        for (int p = lo + 1; p < hi; ++p) {
            int t = lay.token(p);
            if (t < 0 || t >= (int)clean.size() || !clean[t])
                return false;
        }
        return true;
    }

    void mark(int token, bool is_clean) {
        if (token >= 0 && token < (int)clean.size())
            clean[token] = is_clean;
    }

    /// Bubbles the token at `from` next to `to` (one step short), returns
    /// the swap trail for undoing.
    std::vector<std::pair<int, int>> bubble(int from, int to) {
        std::vector<std::pair<int, int>> trail;
        int step = to > from ? 1 : -1;
        int p = from;
        while (p + step != to) {
            lay.emit_swap(c, std::min(p, p + step), std::max(p, p + step));
            trail.push_back({std::min(p, p + step), std::max(p, p + step)});
            p += step;
        }
        return trail;
    }

    void unwind(const std::vector<std::pair<int, int>>& trail) {
        for (auto it = trail.rbegin(); it != trail.rend(); ++it)
            lay.emit_swap(c, it->first, it->second);
    }

    void cx(int ctrl_tok, int tgt_tok) {
        int pc = lay.pos(ctrl_tok), pt = lay.pos(tgt_tok);
        if (std::abs(pc - pt) == 1) {
            c.cx(pc, pt);
            return;
        }
        if (mode == LongRange::Direct) {
            c.append({Gate::CX, {pc, pt}});
            return;
        }
        if (span_clean(std::min(pc, pt), std::max(pc, pt))) {
            emit_longrange_cx(c, pc, pt);
            return;
        }
        // try vacating one dirty neighbor of the target
        int toward = pt > pc ? -1 : 1;
        int nb = pt + toward;
        int nb_tok = lay.token(nb);
        if (nb_tok >= 0 && !(nb_tok < (int)clean.size() && clean[nb_tok])) {
            lay.emit_swap(c, std::min(pt, nb), std::max(pt, nb));
            int pt2 = lay.pos(tgt_tok);
            if (std::abs(pc - pt2) == 1) {
                c.cx(pc, pt2);
            } else if (span_clean(std::min(pc, pt2), std::max(pc, pt2))) {
                emit_longrange_cx(c, pc, pt2);
            } else {
                auto trail = bubble(pc, pt2);
                c.cx(lay.pos(ctrl_tok), pt2);
                unwind(trail);
            }
            lay.emit_swap(c, std::min(pt, nb), std::max(pt, nb));
            return;
        }
        auto trail = bubble(pc, pt);
        c.cx(lay.pos(ctrl_tok), pt);
        unwind(trail);
    }

    void ccx(int c1_tok, int c2_tok, int tgt_tok) {
        int p1 = lay.pos(c1_tok), p2 = lay.pos(c2_tok), pt = lay.pos(tgt_tok);
        std::vector<int> ps = {p1, p2, pt};
        std::sort(ps.begin(), ps.end());
        if (ps[1] - ps[0] == 1 && ps[2] - ps[1] == 1) {
            c.ccx(p1, p2, pt);
            return;
        }
        if (mode == LongRange::Direct) {
            c.append({Gate::CCX, {p1, p2, pt}});
            return;
        }
        // co-locate around the median operand, then restore
        int median = ps[1];
        std::vector<std::pair<int, int>> trail_left, trail_right;
        if (ps[0] < median - 1)
            trail_left = bubble(ps[0], median);
        if (ps[2] > median + 1)
            trail_right = bubble(ps[2], median);
        c.ccx(lay.pos(c1_tok), lay.pos(c2_tok), lay.pos(tgt_tok));
        unwind(trail_right);
        unwind(trail_left);
    }

    void emit(const LogicalOp& op) {
        switch (op.g) {
            case Gate::X:
                c.x(lay.pos(op.tokens[0]));
                break;
            case Gate::CX:
                cx(op.tokens[0], op.tokens[1]);
                break;
            case Gate::CCX:
                ccx(op.tokens[0], op.tokens[1], op.tokens[2]);
                break;
            default:
                throw std::logic_error("unexpected adder op");
        }
    }
};

/// Plays the op list through the emitter, marking written ancillas dirty
/// so gadget spans are only claimed over untouched workspace.
void run_adder_ops(AdderEmitter& em, const std::vector<LogicalOp>& ops,
                   const AdderTokens& tk) {
    auto is_anc = [&](int t) {
        for (int z : tk.z)
            if (z == t)
                return true;
        for (int w : tk.w)
            if (w == t)
                return true;
        return false;
    };
    for (const LogicalOp& op : ops) {
        em.emit(op);
        int t = op.tokens.back();
        if (is_anc(t))
            em.mark(t, false);
    }
}

void emit_adder(Circuit& c, const AdderParams& p, const std::vector<int>& a_pos,
                const std::vector<int>& b_pos, const std::vector<int>& anc_pos) {
    const int n = p.n;
    if (n < 1)
        throw std::invalid_argument("adder needs n >= 1");
    const bool quantum = !p.classical_c.has_value();
    if (!quantum && *p.classical_c >= (1ull << n))
        throw std::invalid_argument("classical addend out of range");
    const int width = c.width();

    AdderTokens tk;
    tk.n = n;
    tk.quantum = quantum;
    tk.gadget = p.long_range == LongRange::Gadget;

    // token ids: foreign positions keep identity tokens, adder lanes get
    // semantic tokens above the position range
    int next_tok = width;
    auto alloc = [&]() { return next_tok++; };
    if (quantum)
        for (int i = 0; i < n; ++i)
            tk.a.push_back(alloc());
    for (int i = 0; i < n; ++i)
        tk.b.push_back(alloc());
    for (int i = 1; i < n; ++i)
        tk.z.push_back(alloc());

    LineLayout lay(width);
    for (int q = 0; q < width; ++q)
        lay.place(q, q);
    if (quantum)
        for (int i = 0; i < n; ++i)
            lay.place(a_pos[i], tk.a[i]);
    for (int i = 0; i < n; ++i)
        lay.place(b_pos[i], tk.b[i]);
    std::size_t anc_used = 0;
    for (int i = 1; i < n; ++i) {
        if (anc_used >= anc_pos.size())
            throw std::invalid_argument("not enough adder ancillas");
        lay.place(anc_pos[anc_used++], tk.z[i - 1]);
    }
    while (anc_used < anc_pos.size()) {  // remaining ancillas: workspace + bus
        int t = alloc();
        tk.w.push_back(t);
        lay.place(anc_pos[anc_used++], t);
    }

    auto ops = adder_logical_ops(tk, quantum ? 0 : *p.classical_c);
    if (p.adjoint)
        std::reverse(ops.begin(), ops.end());

    AdderEmitter em{c, lay, p.long_range, std::vector<bool>(next_tok, false)};
    for (int z : tk.z)
        em.mark(z, true);
    for (int w : tk.w)
        em.mark(w, true);
    run_adder_ops(em, ops, tk);
}

}  // namespace

Circuit build_qfs(const QfsParams& p) {
    if (p.n < 1)
        throw std::invalid_argument("QFS needs n >= 1");
    int k_max = p.exact ? p.n : p.k_max;
    if (k_max < 1 || k_max > p.n)
        throw std::invalid_argument("QFS needs 1 <= k_max <= n");
    const int sign = p.adjoint ? -1 : 1;

    if (p.classical_control) {
        if (*p.classical_control >= (1ull << p.n))
            throw std::invalid_argument("classical control value out of range");
        Circuit c(p.n, 0);
        std::vector<int> pos(p.n);
        for (int i = 0; i < p.n; ++i)
            pos[i] = i;
        emit_classical_qfs(c, pos, *p.classical_control, sign);
        c.registers().regs["B"] = pos;
        c.set_metadata("builder", "qfs-classical");
        c.set_metadata("n", std::to_string(p.n));
        c.set_metadata("c", std::to_string(*p.classical_control));
        return c;
    }

    Circuit c(2 * p.n, 0);
    LineLayout lay(2 * p.n);
    mesh_place(lay, p.n);
    emit_qfs(c, lay, p.n, k_max, sign);
    c.registers() = mesh_2n(p.n);
    c.set_metadata("builder", "qfs");
    c.set_metadata("n", std::to_string(p.n));
    c.set_metadata("k_max", std::to_string(k_max));
    c.set_metadata("adjoint", p.adjoint ? "1" : "0");
    return c;
}

Circuit build_small_qft(int w, int base, bool adjoint) {
    if (w < 1 || base < 0)
        throw std::invalid_argument("invalid block size");
    Circuit c(base + w, 0);
    std::vector<int> pos(w);
    for (int i = 0; i < w; ++i)
        pos[i] = base + i;
    emit_lnn_qft(c, pos, adjoint);
    c.registers().regs["B"] = pos;
    c.set_metadata("builder", "small-qft");
    c.set_metadata("w", std::to_string(w));
    c.set_metadata("adjoint", adjoint ? "1" : "0");
    return c;
}

Circuit build_fpe(const FpeParams& p) {
    if (p.n < 1 || p.k < 1 || 2 * p.k > p.n + p.k)
        throw std::invalid_argument("invalid FPE parameters");
    Circuit c(2 * p.n, 0);
    LineLayout lay(2 * p.n);
    mesh_place(lay, p.n);
    emit_fpe(c, lay, p.n, p.k, p.barred, nullptr);
    c.registers() = mesh_2n(p.n);
    c.set_metadata("builder", "fpe");
    c.set_metadata("n", std::to_string(p.n));
    c.set_metadata("k", std::to_string(p.k));
    c.set_metadata("barred", p.barred ? "1" : "0");
    return c;
}

Circuit build_longrange_cx(int control, int target, int width) {
    if (control < 0 || target < 0 || control >= width || target >= width)
        throw std::invalid_argument("positions out of range");
    if (std::abs(control - target) < 2)
        throw std::invalid_argument("long-range CX needs distance >= 2");
    Circuit c(width, 0);
    emit_longrange_cx(c, control, target);
    c.set_metadata("builder", "longrange-cx");
    c.set_metadata("control", std::to_string(control));
    c.set_metadata("target", std::to_string(target));
    return c;
}

Circuit build_adder(const AdderParams& p) {
    const int n = p.n;
    if (n < 1)
        throw std::invalid_argument("adder needs n >= 1");
    const bool quantum = !p.classical_c.has_value();

    // referenced propagate products determine the workspace size; dry-run
    // the logical op generation with a generous workspace and count
    int w_cnt = 0;
    {
        AdderTokens tk;
        tk.n = n;
        tk.quantum = quantum;
        int next = 0;
        if (quantum)
            for (int i = 0; i < n; ++i)
                tk.a.push_back(next++);
        for (int i = 0; i < n; ++i)
            tk.b.push_back(next++);
        for (int i = 1; i < n; ++i)
            tk.z.push_back(next++);
        for (int i = 0; i < n; ++i)
            tk.w.push_back(next++);
        auto ops = adder_logical_ops(tk, quantum ? 0 : *p.classical_c);
        std::set<int> used;
        for (auto& op : ops)
            for (int t : op.tokens)
                if (t >= tk.w.front() && t <= tk.w.back())
                    used.insert(t);
        w_cnt = static_cast<int>(used.size());
    }

    // meshed cells: [A_i, B_i, Z_{i+1}, W?, U?]
    const bool gadget = p.long_range == LongRange::Gadget;
    std::vector<int> a_pos, b_pos, anc_pos, u_pos;
    int pos = 0;
    std::vector<int> w_remaining;
    for (int i = 0; i < n; ++i) {
        if (quantum)
            a_pos.push_back(pos++);
        b_pos.push_back(pos++);
        if (i + 1 < n)
            anc_pos.push_back(pos++);  // Z_{i+1}
        if (i < w_cnt)
            w_remaining.push_back(pos++);
        if (gadget)
            u_pos.push_back(pos++);
    }
    const int width = pos;
    // Z slots first, then W, then U at the tail of the ancilla list
    for (int q : w_remaining)
        anc_pos.push_back(q);
    for (int q : u_pos)
        anc_pos.push_back(q);

    Circuit c(width, 0);
    emit_adder(c, p, a_pos, b_pos, anc_pos);

    if (quantum)
        c.registers().regs["A"] = a_pos;
    c.registers().regs["B"] = b_pos;
    c.registers().regs["ANC"] = anc_pos;
    c.set_metadata("builder", "adder");
    c.set_metadata("n", std::to_string(n));
    c.set_metadata("quantum", quantum ? "1" : "0");
    if (!quantum)
        c.set_metadata("c", std::to_string(*p.classical_c));
    c.set_metadata("adjoint", p.adjoint ? "1" : "0");
    c.set_metadata("long_range", gadget ? "gadget" : "direct");
    return c;
}

Circuit reverse_conjugate(const Circuit& c) {
    Circuit out(c.width(), c.n_clbits());
    out.registers() = c.registers();
    const auto& ops = c.ops();
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        Operation op = *it;
        if (op.g == Gate::M || op.g == Gate::RESET || op.g == Gate::S || op.cond)
            throw std::invalid_argument("circuit is not reversible as emitted");
        if (op.g == Gate::RK || op.g == Gate::CP)
            op.sign = -op.sign;
        out.append(op);
    }
    return out;
}

namespace {

std::string join_positions(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

Circuit build_qft_uni(int n, double eps, const QftVariant& v) {
    if (n < 1)
        throw std::invalid_argument("qft-uni needs n >= 1");
    if (eps <= 0.0 || eps >= 1.0)
        throw std::invalid_argument("eps must lie in (0, 1)");

    auto budget = analysis::make_error_budget(n, eps);
    int k_max = v.force_k_max.value_or(budget.k_max);
    k_max = std::min(k_max, n);
    int k = v.force_k.value_or(budget.k_clamped);

    std::vector<int> a_in(n), b_lane(n);
    for (int l = 0; l < n; ++l)
        a_in[l] = 2 * (n - 1 - l);
    for (int m = 0; m < n; ++m)
        b_lane[m] = 2 * m + 1;

    Circuit c(2 * n, 0);
    LineLayout lay(2 * n);
    mesh_place(lay, n);

    if (v.direction == Direction::Forward) {
        for (int q : b_lane)
            c.h(q);
        emit_qfs(c, lay, n, k_max, +1);
        if (v.mcm == McmOpt::MeasureEarly) {
            std::vector<int> a_clbits(n);
            for (int i = 0; i < n; ++i) {
                a_clbits[i] = c.add_clbit();
                c.measure_x(a_in[i], a_clbits[i]);
            }
            emit_fpe(c, lay, n, k, false, &a_clbits);
        } else {
            emit_fpe(c, lay, n, k, false, nullptr);
            if (v.mcm == McmOpt::PostselectFlag) {
                std::string flags;
                for (int i = 0; i < n; ++i) {
                    int bit = c.add_clbit();
                    c.measure(a_in[i], bit);
                    if (i)
                        flags += ",";
                    flags += std::to_string(bit);
                }
                c.set_metadata("flag_clbits", flags);
            }
        }
        c.registers().regs["A"] = a_in;
        c.registers().regs["B"] = b_lane;
        c.set_metadata("in_positions", join_positions(a_in));
        c.set_metadata("out_positions", join_positions(b_lane));
    } else {
        // adjoint pipeline, then reversed and conjugated: input arrives on
        // the B lane, the transform lands on the A lane
        Circuit adj(2 * n, 0);
        LineLayout alay(2 * n);
        mesh_place(alay, n);
        for (int q : b_lane)
            adj.h(q);
        emit_qfs(adj, alay, n, k_max, -1);
        emit_fpe(adj, alay, n, k, /*barred=*/true, nullptr);

        if (v.mcm == McmOpt::MeasureEarly) {
            // reversed order: estimation stages first, then the phase
            // stage as exact classically controlled rotations on the
            // measured lane's partners
            Circuit fpe_only(2 * n, 0);
            LineLayout flay(2 * n);
            mesh_place(flay, n);
            emit_fpe(fpe_only, flay, n, k, true, nullptr);
            Circuit rc = reverse_conjugate(fpe_only);
            for (const Operation& op : rc.ops())
                c.append(op);
            std::vector<int> b_clbits(n);
            for (int m = 0; m < n; ++m) {
                b_clbits[m] = c.add_clbit();
                c.measure(b_lane[m], b_clbits[m]);
            }
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) {
                    int kk = n - l - m;
                    if (kk < 1 || kk > n)
                        continue;
                    Operation op{Gate::RK, {a_in[l]}, {}, kk, +1};
                    op.cond = ClassicalExpr{{b_clbits[m]}, false};
                    c.append(op);
                }
        } else {
            Circuit rc = reverse_conjugate(adj);
            for (const Operation& op : rc.ops())
                c.append(op);
        }
        c.registers().regs["A"] = b_lane;  // input register
        c.registers().regs["B"] = a_in;
        c.set_metadata("in_positions", join_positions(b_lane));
        c.set_metadata("out_positions", join_positions(a_in));
    }

    c.set_metadata("builder", "qft-uni");
    c.set_metadata("n", std::to_string(n));
    c.set_metadata("eps", std::to_string(eps));
    c.set_metadata("eps_qfs", std::to_string(budget.eps_qfs));
    c.set_metadata("eps_fpe", std::to_string(budget.eps_fpe));
    c.set_metadata("k_max", std::to_string(k_max));
    c.set_metadata("k_theoretical", std::to_string(budget.k_theoretical));
    c.set_metadata("k_clamped", std::to_string(k));
    c.set_metadata("direction", v.direction == Direction::Forward ? "forward" : "backward");
    c.set_metadata("mcm",
                   v.mcm == McmOpt::None ? "none"
                   : v.mcm == McmOpt::MeasureEarly ? "measure-early"
                                                   : "postselect-flag");
    return c;
}

GeneralQft build_qft_general(int n, double eps, std::uint64_t seed, const QftVariant& v) {
    if (n < 1)
        throw std::invalid_argument("qft-general needs n >= 1");
    if (eps <= 0.0 || eps >= 1.0)
        throw std::invalid_argument("eps must lie in (0, 1)");

    std::mt19937_64 rng(seed);
    const std::uint64_t N = 1ull << n;
    std::uint64_t c1 = rng() % N;
    std::uint64_t c2 = rng() % N;

    std::vector<int> a_in(n), b_lane(n), anc;
    for (int l = 0; l < n; ++l)
        a_in[l] = 2 * (n - 1 - l);
    for (int m = 0; m < n; ++m)
        b_lane[m] = 2 * m + 1;
    const int width = 4 * n - 2 > 2 * n ? 4 * n - 2 : 2 * n;
    for (int q = 2 * n; q < width; ++q)
        anc.push_back(q);

    Circuit c(width, 0);

    // encode: phase by c1, shift by c2
    emit_classical_qfs(c, a_in, c1, +1);
    if (n >= 2) {
        AdderParams ap;
        ap.n = n;
        ap.classical_c = c2;
        ap.long_range = LongRange::Gadget;
        emit_adder(c, ap, {}, a_in, anc);
    } else if (c2 & 1) {
        c.x(a_in[0]);
    }
    c.set_metadata("encode_end", std::to_string(c.ops().size()));

    Circuit uni = build_qft_uni(n, eps, v);
    for (const Operation& op : uni.ops())
        c.append(op);

    // decode on the output register: unphase c2, unshift c1
    emit_classical_qfs(c, b_lane, c2, -1);
    if (n >= 2) {
        AdderParams ap;
        ap.n = n;
        ap.classical_c = c1;
        ap.long_range = LongRange::Gadget;
        emit_adder(c, ap, {}, b_lane, anc);
    } else if (c1 & 1) {
        c.x(b_lane[0]);
    }

    // the classical register C: 2n bits documented in the interface
    while (c.n_clbits() < 2 * n)
        c.add_clbit();

    c.registers().regs["A"] = a_in;
    c.registers().regs["B"] = b_lane;
    c.registers().regs["ANC"] = anc;
    c.set_metadata("builder", "qft-general");
    c.set_metadata("n", std::to_string(n));
    c.set_metadata("eps", std::to_string(eps));
    c.set_metadata("seed", std::to_string(seed));
    c.set_metadata("c1", std::to_string(c1));
    c.set_metadata("c2", std::to_string(c2));
    c.set_metadata("in_positions", join_positions(a_in));
    c.set_metadata("out_positions", join_positions(b_lane));

    GeneralQft g;
    g.circuit = std::move(c);
    g.c1 = c1;
    g.c2 = c2;
    return g;
}

}  // namespace qfl::builders
