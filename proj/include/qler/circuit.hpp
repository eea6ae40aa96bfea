// Copyright 2026 The qler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qler/error.hpp"

namespace qler {

/// Clifford circuit instruction set. Every operation acts on one qubit except
/// Cnot (two qubits) and Tick (none). Multi-target source lines are expanded
/// into one Operation per gate application when parsing.
enum class OpKind : std::uint8_t {
    Reset,         // R: force qubit to |0>
    Measure,       // M: destructive Z-basis readout, appends one record bit
    MeasureReset,  // MR: Z-basis readout then reset, appends one record bit
    PauliX,        // X
    PauliY,        // Y
    PauliZ,        // Z
    Hadamard,      // H
    Phase,         // S
    Cnot,          // CX control target
    Idle,          // I: explicit wait on one qubit
    Tick,          // TICK: layer separator, no qubits
};

inline const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Reset: return "R";
        case OpKind::Measure: return "M";
        case OpKind::MeasureReset: return "MR";
        case OpKind::PauliX: return "X";
        case OpKind::PauliY: return "Y";
        case OpKind::PauliZ: return "Z";
        case OpKind::Hadamard: return "H";
        case OpKind::Phase: return "S";
        case OpKind::Cnot: return "CX";
        case OpKind::Idle: return "I";
        case OpKind::Tick: return "TICK";
    }
    return "?";
}

inline bool op_kind_is_two_qubit(OpKind k) { return k == OpKind::Cnot; }
inline bool op_kind_is_measurement(OpKind k) {
    return k == OpKind::Measure || k == OpKind::MeasureReset;
}

/// True for operations that count as potential fault sites: unitary gates,
/// measurements, and explicit idles. Resets and ticks host no faults (a fault
/// immediately before a reset is erased by it, and a tick is not a physical
/// operation), so listing them would only add rows that can never fire.
inline bool op_kind_is_faultable(OpKind k) {
    switch (k) {
        case OpKind::Reset:
        case OpKind::Tick:
            return false;
        default:
            return true;
    }
}

struct Operation {
    OpKind kind;
    std::uint32_t q0 = 0;  // single target, or control for Cnot
    std::uint32_t q1 = 0;  // Cnot target; unused otherwise

    friend bool operator==(const Operation& a, const Operation& b) {
        return a.kind == b.kind && a.q0 == b.q0 && a.q1 == b.q1;
    }
};

/// A parity check over measurement record bits, stored as absolute 0-based
/// measurement indices in the order the measurements occur.
struct Detector {
    std::vector<std::uint32_t> measurements;
    friend bool operator==(const Detector& a, const Detector& b) {
        return a.measurements == b.measurements;
    }
};

/// A logical readout: the parity of the referenced measurement record bits.
struct Observable {
    std::vector<std::uint32_t> measurements;
    friend bool operator==(const Observable& a, const Observable& b) {
        return a.measurements == b.measurements;
    }
};

class Circuit {
  public:
    std::uint32_t num_qubits = 0;
    std::vector<Operation> ops;
    std::vector<Detector> detectors;
    std::vector<Observable> observables;

    std::uint32_t num_measurements() const {
        std::uint32_t n = 0;
        for (const Operation& op : ops) {
            if (op_kind_is_measurement(op.kind)) {
                ++n;
            }
        }
        return n;
    }

    void append(OpKind kind, std::uint32_t q) {
        require(kind != OpKind::Cnot, ErrorKind::ArityError, "CX needs two targets");
        require(kind != OpKind::Tick, ErrorKind::ArityError, "TICK takes no targets");
        ops.push_back(Operation{kind, q, 0});
        grow_to_fit(q);
    }

    void append_cx(std::uint32_t control, std::uint32_t target) {
        require(control != target, ErrorKind::ArityError, "CX needs two distinct targets");
        ops.push_back(Operation{OpKind::Cnot, control, target});
        grow_to_fit(control);
        grow_to_fit(target);
    }

    void append_tick() { ops.push_back(Operation{OpKind::Tick, 0, 0}); }

    friend bool operator==(const Circuit& a, const Circuit& b) {
        return a.num_qubits == b.num_qubits && a.ops == b.ops && a.detectors == b.detectors &&
               a.observables == b.observables;
    }

  private:
    void grow_to_fit(std::uint32_t q) {
        if (q + 1 > num_qubits) {
            num_qubits = q + 1;
        }
    }
};

/// One potential fault site: a (gate application, touched qubit) pair. A
/// two-qubit gate contributes one location per touched qubit. `index` is the
/// position in the canonical enumeration order: all locations on qubit 0 in
/// program order, then qubit 1, and so on (wire-major).
struct FaultLocation {
    std::uint32_t index;
    std::uint32_t op_index;
    std::uint32_t qubit;

    friend bool operator==(const FaultLocation& a, const FaultLocation& b) {
        return a.index == b.index && a.op_index == b.op_index && a.qubit == b.qubit;
    }
};

/// Enumerates fault locations in the canonical wire-major order.
inline std::vector<FaultLocation> enumerate_fault_locations(const Circuit& circuit) {
    std::vector<FaultLocation> out;
    for (std::uint32_t q = 0; q < circuit.num_qubits; ++q) {
        for (std::uint32_t i = 0; i < circuit.ops.size(); ++i) {
            const Operation& op = circuit.ops[i];
            if (!op_kind_is_faultable(op.kind)) {
                continue;
            }
            bool touches = (op.kind == OpKind::Cnot) ? (op.q0 == q || op.q1 == q) : (op.q0 == q);
            if (touches) {
                out.push_back(FaultLocation{static_cast<std::uint32_t>(out.size()), i, q});
            }
        }
    }
    return out;
}

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            tokens.push_back(line.substr(start, i - start));
        }
    }
    return tokens;
}

inline std::uint32_t parse_qubit(std::string_view token, int line_no) {
    std::uint64_t value = 0;
    require(!token.empty(), ErrorKind::ArityError, "missing qubit index", line_no);
    for (char c : token) {
        require(c >= '0' && c <= '9', ErrorKind::ArityError,
                "bad qubit index '" + std::string(token) + "'", line_no);
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
        require(value <= 0xFFFFFFFFull, ErrorKind::ArityError, "qubit index too large", line_no);
    }
    return static_cast<std::uint32_t>(value);
}

/// Parses a `rec[-k]` token and resolves it against the number of measurement
/// record bits seen so far.
inline std::uint32_t parse_record_ref(std::string_view token, std::uint32_t measurements_so_far,
                                      int line_no) {
    constexpr std::string_view prefix = "rec[-";
    require(token.size() > prefix.size() + 1 && token.substr(0, prefix.size()) == prefix &&
                token.back() == ']',
            ErrorKind::BadRecordReference, "expected rec[-k], got '" + std::string(token) + "'",
            line_no);
    std::string_view digits = token.substr(prefix.size(), token.size() - prefix.size() - 1);
    std::uint64_t k = 0;
    require(!digits.empty(), ErrorKind::BadRecordReference, "empty record offset", line_no);
    for (char c : digits) {
        require(c >= '0' && c <= '9', ErrorKind::BadRecordReference,
                "bad record offset in '" + std::string(token) + "'", line_no);
        k = k * 10 + static_cast<std::uint64_t>(c - '0');
    }
    require(k >= 1 && k <= measurements_so_far, ErrorKind::BadRecordReference,
            "record offset " + std::string(token) + " reaches before the first measurement",
            line_no);
    return measurements_so_far - static_cast<std::uint32_t>(k);
}

}  // namespace detail

/// Parses the text form of a circuit.
///
/// Grammar, one instruction per line ('#' starts a comment):
///   R|M|MR|X|Y|Z|H|S|I q0 [q1 ...]     one operation per listed qubit
///   CX c0 t0 [c1 t1 ...]               control/target pairs
///   TICK
///   DETECTOR rec[-k] [...]             parity of earlier record bits
///   OBSERVABLE_INCLUDE(j) rec[-k] [...] accumulate into logical observable j
inline Circuit parse_circuit(std::string_view text) {
    Circuit circuit;
    std::uint32_t measurements = 0;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::vector<std::string_view> tokens = detail::split_tokens(line);
        if (tokens.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        std::string_view name = tokens[0];

        if (name == "TICK") {
            require(tokens.size() == 1, ErrorKind::ArityError, "TICK takes no targets", line_no);
            circuit.append_tick();
        } else if (name == "CX") {
            require(tokens.size() >= 3 && (tokens.size() - 1) % 2 == 0, ErrorKind::ArityError,
                    "CX takes control/target pairs", line_no);
            for (std::size_t i = 1; i + 1 < tokens.size(); i += 2) {
                std::uint32_t c = detail::parse_qubit(tokens[i], line_no);
                std::uint32_t t = detail::parse_qubit(tokens[i + 1], line_no);
                require(c != t, ErrorKind::ArityError, "CX control equals target", line_no);
                circuit.append_cx(c, t);
            }
        } else if (name == "DETECTOR") {
            require(tokens.size() >= 2, ErrorKind::ArityError,
                    "DETECTOR needs at least one record reference", line_no);
            Detector det;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                det.measurements.push_back(
                    detail::parse_record_ref(tokens[i], measurements, line_no));
            }
            circuit.detectors.push_back(std::move(det));
        } else if (name.size() > 20 && name.substr(0, 19) == "OBSERVABLE_INCLUDE(" &&
                   name.back() == ')') {
            std::string_view digits = name.substr(19, name.size() - 20);
            std::uint64_t obs_index = 0;
            bool ok = !digits.empty();
            for (char c : digits) {
                if (c < '0' || c > '9') {
                    ok = false;
                    break;
                }
                obs_index = obs_index * 10 + static_cast<std::uint64_t>(c - '0');
            }
            require(ok, ErrorKind::UnknownInstruction,
                    "bad observable index in '" + std::string(name) + "'", line_no);
            require(tokens.size() >= 2, ErrorKind::ArityError,
                    "OBSERVABLE_INCLUDE needs at least one record reference", line_no);
            if (circuit.observables.size() <= obs_index) {
                circuit.observables.resize(obs_index + 1);
            }
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                circuit.observables[obs_index].measurements.push_back(
                    detail::parse_record_ref(tokens[i], measurements, line_no));
            }
        } else {
            OpKind kind;
            if (name == "R") {
                kind = OpKind::Reset;
            } else if (name == "M") {
                kind = OpKind::Measure;
            } else if (name == "MR") {
                kind = OpKind::MeasureReset;
            } else if (name == "X") {
                kind = OpKind::PauliX;
            } else if (name == "Y") {
                kind = OpKind::PauliY;
            } else if (name == "Z") {
                kind = OpKind::PauliZ;
            } else if (name == "H") {
                kind = OpKind::Hadamard;
            } else if (name == "S") {
                kind = OpKind::Phase;
            } else if (name == "I") {
                kind = OpKind::Idle;
            } else {
                fail(ErrorKind::UnknownInstruction, "unknown instruction '" + std::string(name) + "'",
                     line_no);
            }
            require(tokens.size() >= 2, ErrorKind::ArityError,
                    std::string(name) + " needs at least one target", line_no);
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                circuit.append(kind, detail::parse_qubit(tokens[i], line_no));
                if (op_kind_is_measurement(kind)) {
                    ++measurements;
                }
            }
        }
        if (end == text.size()) {
            break;
        }
    }
    return circuit;
}

/// Serializes a circuit to its canonical text form: one operation per line in
/// program order, then all detectors, then all observables. Record references
/// are emitted relative to the full record (`rec[-k]` with k counted from the
/// end), so parse(serialize(c)) == c for any valid circuit even though the
/// original source may have interleaved detectors with operations.
inline std::string serialize_circuit(const Circuit& circuit) {
    std::ostringstream out;
    std::uint32_t total_measurements = circuit.num_measurements();
    for (const Operation& op : circuit.ops) {
        switch (op.kind) {
            case OpKind::Tick:
                out << "TICK\n";
                break;
            case OpKind::Cnot:
                out << "CX " << op.q0 << ' ' << op.q1 << '\n';
                break;
            default:
                out << op_kind_name(op.kind) << ' ' << op.q0 << '\n';
                break;
        }
    }
    for (const Detector& det : circuit.detectors) {
        out << "DETECTOR";
        for (std::uint32_t m : det.measurements) {
            out << " rec[-" << (total_measurements - m) << ']';
        }
        out << '\n';
    }
    for (std::size_t k = 0; k < circuit.observables.size(); ++k) {
        out << "OBSERVABLE_INCLUDE(" << k << ')';
        for (std::uint32_t m : circuit.observables[k].measurements) {
            out << " rec[-" << (total_measurements - m) << ']';
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace qler
