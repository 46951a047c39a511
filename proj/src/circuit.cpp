#include "qfl/circuit.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace qfl {

using nlohmann::json;

const char* gate_name(Gate g) {
    switch (g) {
        case Gate::H: return "H";
        case Gate::X: return "X";
        case Gate::Z: return "Z";
        case Gate::S: return "S";
        case Gate::RK: return "RK";
        case Gate::CP: return "CP";
        case Gate::CX: return "CX";
        case Gate::CZ: return "CZ";
        case Gate::SWAP: return "SWAP";
        case Gate::CCX: return "CCX";
        case Gate::M: return "M";
        case Gate::RESET: return "RESET";
    }
    throw std::logic_error("unreachable gate kind");
}

int gate_arity(Gate g) {
    switch (g) {
        case Gate::H:
        case Gate::X:
        case Gate::Z:
        case Gate::S:
        case Gate::RK:
        case Gate::M:
        case Gate::RESET:
            return 1;
        case Gate::CP:
        case Gate::CX:
        case Gate::CZ:
        case Gate::SWAP:
            return 2;
        case Gate::CCX:
            return 3;
    }
    throw std::logic_error("unreachable gate kind");
}

Gate gate_from_name(const std::string& name) {
    static const std::map<std::string, Gate> table = {
        {"H", Gate::H},   {"X", Gate::X},     {"Z", Gate::Z},
        {"S", Gate::S},   {"RK", Gate::RK},   {"CP", Gate::CP},
        {"CX", Gate::CX}, {"CZ", Gate::CZ},   {"SWAP", Gate::SWAP},
        {"CCX", Gate::CCX}, {"M", Gate::M},   {"RESET", Gate::RESET},
    };
    auto it = table.find(name);
    if (it == table.end())
        throw std::invalid_argument("unknown gate kind: " + name);
    return it->second;
}

const std::vector<int>& RegisterMap::positions(const std::string& name) const {
    auto it = regs.find(name);
    if (it == regs.end())
        throw std::invalid_argument("no register named " + name);
    return it->second;
}

int RegisterMap::size(const std::string& name) const {
    auto it = regs.find(name);
    return it == regs.end() ? 0 : static_cast<int>(it->second.size());
}

void RegisterMap::validate(int width) const {
    std::vector<bool> used(width, false);
    for (const auto& [name, pos] : regs) {
        for (int p : pos) {
            if (p < 0 || p >= width)
                throw std::invalid_argument("register " + name + " maps bit outside the line");
            if (used[p])
                throw std::invalid_argument("register map is not injective at position " +
                                            std::to_string(p));
            used[p] = true;
        }
    }
}

Circuit::Circuit(int width, int n_clbits) : width_(width), n_clbits_(n_clbits) {
    if (width < 0 || n_clbits < 0)
        throw std::invalid_argument("negative circuit dimensions");
    clbit_written_.assign(n_clbits, false);
}

void Circuit::set_metadata(const std::string& key, const std::string& value) {
    metadata_[key] = value;
}

std::string Circuit::metadata_at(const std::string& key) const {
    auto it = metadata_.find(key);
    return it == metadata_.end() ? std::string() : it->second;
}

int Circuit::add_clbit() {
    clbit_written_.push_back(false);
    return n_clbits_++;
}

void Circuit::append(Operation op) {
    if (static_cast<int>(op.qubits.size()) != gate_arity(op.g))
        throw std::invalid_argument("operation arity mismatch");
    for (int q : op.qubits)
        if (q < 0 || q >= width_)
            throw std::invalid_argument("qubit position out of range");
    std::vector<int> sorted = op.qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate qubit in operation");

    if (op.g == Gate::RK || op.g == Gate::CP) {
        if (op.k < 1)
            throw std::invalid_argument("phase exponent k must be >= 1");
        if (op.sign != 1 && op.sign != -1)
            throw std::invalid_argument("phase sign must be +1 or -1");
    }
    if (op.g == Gate::M) {
        if (op.clbits.size() != 1)
            throw std::invalid_argument("measurement writes exactly one classical bit");
    } else if (!op.clbits.empty()) {
        throw std::invalid_argument("only measurements carry classical targets");
    }
    for (int c : op.clbits)
        if (c < 0 || c >= n_clbits_)
            throw std::invalid_argument("classical bit out of range");

    if (op.cond) {
        if (gate_arity(op.g) != 1 || op.g == Gate::M || op.g == Gate::RESET)
            throw std::invalid_argument("only single-qubit gates may be conditioned");
        for (int c : op.cond->parity) {
            if (c < 0 || c >= n_clbits_)
                throw std::invalid_argument("condition references classical bit out of range");
            if (!clbit_written_[c])
                throw std::invalid_argument(
                    "condition references classical bit not yet written by a measurement");
        }
    }

    if (op.g == Gate::M)
        clbit_written_[op.clbits[0]] = true;
    ops_.push_back(std::move(op));
}

bool Circuit::operator==(const Circuit& other) const {
    return width_ == other.width_ && n_clbits_ == other.n_clbits_ && ops_ == other.ops_ &&
           registers_ == other.registers_ && metadata_ == other.metadata_;
}

std::vector<int> layerize(const Circuit& c) {
    std::vector<int> layers(c.ops().size(), 0);
    std::vector<int> qubit_free(c.width(), 0);
    std::vector<int> clbit_layer(c.n_clbits(), -1);

    for (std::size_t i = 0; i < c.ops().size(); ++i) {
        const Operation& op = c.ops()[i];
        int layer = 0;
        for (int q : op.qubits)
            layer = std::max(layer, qubit_free[q]);
        if (op.cond)
            for (int b : op.cond->parity)
                layer = std::max(layer, clbit_layer[b] + 1);
        layers[i] = layer;
        for (int q : op.qubits)
            qubit_free[q] = layer + 1;
        for (int b : op.clbits)
            clbit_layer[b] = layer;
    }
    return layers;
}

int depth(const Circuit& c) {
    auto layers = layerize(c);
    int d = 0;
    for (int l : layers)
        d = std::max(d, l + 1);
    return d;
}

namespace {

int op_distance(const Operation& op) {
    int lo = op.qubits[0], hi = op.qubits[0];
    for (int q : op.qubits) {
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return hi - lo;
}

bool op_contiguous(const Operation& op) {
    std::vector<int> s = op.qubits;
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] != s[i - 1] + 1)
            return false;
    return true;
}

}  // namespace

std::vector<Violation> audit_connectivity(const Circuit& c) {
    std::vector<Violation> out;
    for (std::size_t i = 0; i < c.ops().size(); ++i) {
        const Operation& op = c.ops()[i];
        if (op.qubits.size() < 2)
            continue;
        if (!op_contiguous(op))
            out.push_back({i, op_distance(op)});
    }
    return out;
}

DepthReport depth_report(const Circuit& c) {
    DepthReport r;
    r.width = c.width();
    r.n_layers = depth(c);
    r.n_gates = static_cast<int>(c.ops().size());
    for (const Operation& op : c.ops()) {
        if (op.g == Gate::M)
            ++r.n_measurements;
        if (op.cond)
            ++r.n_conditioned;
        if (op.qubits.size() >= 2)
            r.max_gate_distance = std::max(r.max_gate_distance, op_distance(op));
    }
    return r;
}

bool schedule_respects_dependencies(const Circuit& c, const std::vector<int>& layers) {
    if (layers.size() != c.ops().size())
        return false;
    std::vector<int> last_on_qubit(c.width(), -1);
    std::vector<int> clbit_layer(c.n_clbits(), -1);
    for (std::size_t i = 0; i < c.ops().size(); ++i) {
        const Operation& op = c.ops()[i];
        for (int q : op.qubits) {
            if (last_on_qubit[q] >= layers[i])
                return false;
            last_on_qubit[q] = layers[i];
        }
        if (op.cond)
            for (int b : op.cond->parity)
                if (clbit_layer[b] < 0 || clbit_layer[b] >= layers[i])
                    return false;
        for (int b : op.clbits)
            clbit_layer[b] = layers[i];
    }
    return true;
}

std::string serialize(const Circuit& c) {
    json doc;
    doc["version"] = 1;
    doc["width"] = c.width();
    doc["n_clbits"] = c.n_clbits();
    json regs = json::object();
    for (const auto& [name, pos] : c.registers().regs)
        regs[name] = pos;
    doc["registers"] = regs;
    json meta = json::object();
    for (const auto& [k, v] : c.metadata())
        meta[k] = v;
    doc["metadata"] = meta;
    json ops = json::array();
    for (const Operation& op : c.ops()) {
        json o;
        o["g"] = gate_name(op.g);
        o["q"] = op.qubits;
        if (op.g == Gate::RK || op.g == Gate::CP) {
            o["k"] = op.k;
            o["sign"] = op.sign;
        }
        if (op.g == Gate::M)
            o["c"] = op.clbits;
        if (op.cond) {
            o["cond"] = {{"parity", op.cond->parity}, {"neg", op.cond->negate}};
        }
        ops.push_back(o);
    }
    doc["ops"] = ops;
    return doc.dump();
}

Circuit deserialize(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed circuit document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("version"))
        throw std::invalid_argument("malformed circuit document: missing version");
    if (doc["version"].get<int>() != 1)
        throw std::invalid_argument("unsupported circuit document version");

    Circuit c(doc.at("width").get<int>(), doc.at("n_clbits").get<int>());
    if (doc.contains("registers"))
        for (auto& [name, pos] : doc["registers"].items())
            c.registers().regs[name] = pos.get<std::vector<int>>();
    c.registers().validate(c.width());
    if (doc.contains("metadata"))
        for (auto& [k, v] : doc["metadata"].items())
            c.set_metadata(k, v.get<std::string>());

    for (const json& o : doc.at("ops")) {
        Operation op;
        op.g = gate_from_name(o.at("g").get<std::string>());
        op.qubits = o.at("q").get<std::vector<int>>();
        if (op.g == Gate::RK || op.g == Gate::CP) {
            op.k = o.at("k").get<int>();
            op.sign = o.at("sign").get<int>();
        }
        if (op.g == Gate::M)
            op.clbits = o.at("c").get<std::vector<int>>();
        if (o.contains("cond")) {
            ClassicalExpr e;
            e.parity = o["cond"].at("parity").get<std::vector<int>>();
            e.negate = o["cond"].at("neg").get<bool>();
            op.cond = e;
        }
        c.append(std::move(op));
    }
    return c;
}

}  // namespace qfl
