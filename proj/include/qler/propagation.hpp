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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qler/bitvec.hpp"
#include "qler/circuit.hpp"
#include "qler/digest.hpp"
#include "qler/error.hpp"

namespace qler {

enum class Pauli : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline char pauli_name(Pauli p) { return p == Pauli::X ? 'X' : (p == Pauli::Y ? 'Y' : 'Z'); }

struct Fault {
    std::uint32_t location;
    Pauli pauli;
};

struct ShotOutcome {
    BitVec detectors;
    BitVec observables;
};

/// Precompiled propagation table: for every (fault location, Pauli) pair, one
/// bit row recording which detectors and observables flip when exactly that
/// fault occurs. Faults compose linearly, so any fault set is evaluated by
/// XORing its rows together.
///
/// Rows are packed as [detector words | observable words] with the observable
/// bits starting on a fresh 64-bit word so syndrome and observable spans can
/// be used independently.
class PropagationTable {
  public:
    std::uint32_t num_locations = 0;
    std::uint32_t num_detectors = 0;
    std::uint32_t num_observables = 0;
    std::string circuit_digest;  // sha256 hex of the canonical circuit text

    std::size_t det_words() const { return (num_detectors + 63) / 64; }
    std::size_t obs_words() const { return (num_observables + 63) / 64; }
    std::size_t row_words() const { return det_words() + obs_words(); }

    const std::uint64_t* row(std::uint32_t location, Pauli pauli) const {
        return rows_.data() +
               (static_cast<std::size_t>(location) * 3 + static_cast<std::size_t>(pauli)) *
                   row_words();
    }
    const std::uint64_t* row_detectors(std::uint32_t location, Pauli pauli) const {
        return row(location, pauli);
    }
    const std::uint64_t* row_observables(std::uint32_t location, Pauli pauli) const {
        return row(location, pauli) + det_words();
    }

    bool detector_bit(std::uint32_t location, Pauli pauli, std::uint32_t detector) const {
        return (row_detectors(location, pauli)[detector >> 6] >> (detector & 63)) & 1u;
    }
    bool observable_bit(std::uint32_t location, Pauli pauli, std::uint32_t observable) const {
        return (row_observables(location, pauli)[observable >> 6] >> (observable & 63)) & 1u;
    }

    /// Low-level fault-set evaluation into caller-owned word buffers of
    /// det_words() and obs_words() length. Buffers are overwritten.
    void evaluate_into(const std::vector<Fault>& faults, std::uint64_t* det_out,
                       std::uint64_t* obs_out) const {
        for (std::size_t w = 0; w < det_words(); ++w) {
            det_out[w] = 0;
        }
        for (std::size_t w = 0; w < obs_words(); ++w) {
            obs_out[w] = 0;
        }
        for (const Fault& f : faults) {
            require(f.location < num_locations, ErrorKind::LocationOutOfRange,
                    "fault location " + std::to_string(f.location) + " out of range [0, " +
                        std::to_string(num_locations) + ")");
            const std::uint64_t* det = row_detectors(f.location, f.pauli);
            const std::uint64_t* obs = row_observables(f.location, f.pauli);
            for (std::size_t w = 0; w < det_words(); ++w) {
                det_out[w] ^= det[w];
            }
            for (std::size_t w = 0; w < obs_words(); ++w) {
                obs_out[w] ^= obs[w];
            }
        }
    }

    /// Evaluates a fault set. Rejects out-of-range or duplicate locations: a
    /// location can host at most one Pauli per sample.
    ShotOutcome evaluate(const std::vector<Fault>& faults) const {
        for (std::size_t i = 0; i < faults.size(); ++i) {
            for (std::size_t j = i + 1; j < faults.size(); ++j) {
                require(faults[i].location != faults[j].location, ErrorKind::DuplicateLocation,
                        "duplicate fault location " + std::to_string(faults[i].location));
            }
        }
        ShotOutcome out{BitVec(num_detectors), BitVec(num_observables)};
        std::vector<std::uint64_t> det(det_words(), 0), obs(obs_words(), 0);
        evaluate_into(faults, det.data(), obs.data());
        for (std::size_t w = 0; w < det_words(); ++w) {
            out.detectors.data()[w] = det[w];
        }
        for (std::size_t w = 0; w < obs_words(); ++w) {
            out.observables.data()[w] = obs[w];
        }
        return out;
    }

    std::vector<ShotOutcome> evaluate_batch(const std::vector<std::vector<Fault>>& batch) const {
        std::vector<ShotOutcome> out;
        out.reserve(batch.size());
        for (const auto& faults : batch) {
            out.push_back(evaluate(faults));
        }
        return out;
    }

    std::vector<std::uint64_t>& mutable_rows() { return rows_; }
    const std::vector<std::uint64_t>& raw_rows() const { return rows_; }

  private:
    std::vector<std::uint64_t> rows_;
};

/// Compiles a circuit into its propagation table by symbolic Pauli-frame
/// propagation: for each fault location and each of X, Y, Z, the fault is
/// placed immediately before the faulted operation executes and pushed
/// through the remainder of the circuit.
///
/// Frame update rules (conjugation through Clifford operations):
///   H q        swap x[q], z[q]
///   S q        z[q] ^= x[q]
///   X/Y/Z q    no change (Paulis commute up to phase, which parities ignore)
///   CX c t     x[t] ^= x[c]; z[c] ^= z[t]
///   R q        x[q] = z[q] = 0
///   M q        record flip = x[q]; z[q] = 0
///   MR q       record flip = x[q]; x[q] = z[q] = 0
/// A detector or observable flips iff the XOR of its referenced record flips
/// is 1.
inline PropagationTable compile_circuit(const Circuit& circuit) {
    const std::vector<FaultLocation> locations = enumerate_fault_locations(circuit);
    const std::uint32_t num_meas = circuit.num_measurements();
    for (const Detector& det : circuit.detectors) {
        for (std::uint32_t m : det.measurements) {
            require(m < num_meas, ErrorKind::BadRecordReference,
                    "detector references measurement " + std::to_string(m) + " of " +
                        std::to_string(num_meas));
        }
    }
    for (const Observable& obs : circuit.observables) {
        for (std::uint32_t m : obs.measurements) {
            require(m < num_meas, ErrorKind::BadRecordReference,
                    "observable references measurement " + std::to_string(m) + " of " +
                        std::to_string(num_meas));
        }
    }

    // Measurement record index produced by each measuring op.
    std::vector<std::uint32_t> meas_index(circuit.ops.size(), 0);
    std::uint32_t meas_counter = 0;
    for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
        if (op_kind_is_measurement(circuit.ops[i].kind)) {
            meas_index[i] = meas_counter++;
        }
    }

    PropagationTable table;
    table.num_locations = static_cast<std::uint32_t>(locations.size());
    table.num_detectors = static_cast<std::uint32_t>(circuit.detectors.size());
    table.num_observables = static_cast<std::uint32_t>(circuit.observables.size());
    table.circuit_digest = sha256_hex(serialize_circuit(circuit));
    table.mutable_rows().assign(static_cast<std::size_t>(table.num_locations) * 3 *
                                    table.row_words(),
                                0);

    std::vector<std::uint8_t> frame_x(circuit.num_qubits), frame_z(circuit.num_qubits);
    std::vector<std::uint8_t> record_flip(num_meas);
    const std::size_t dw = table.det_words();

    for (const FaultLocation& loc : locations) {
        for (Pauli pauli : {Pauli::X, Pauli::Y, Pauli::Z}) {
            std::fill(frame_x.begin(), frame_x.end(), 0);
            std::fill(frame_z.begin(), frame_z.end(), 0);
            std::fill(record_flip.begin(), record_flip.end(), 0);
            frame_x[loc.qubit] = (pauli != Pauli::Z);
            frame_z[loc.qubit] = (pauli != Pauli::X);

            for (std::size_t i = loc.op_index; i < circuit.ops.size(); ++i) {
                const Operation& op = circuit.ops[i];
                switch (op.kind) {
                    case OpKind::Hadamard:
                        std::swap(frame_x[op.q0], frame_z[op.q0]);
                        break;
                    case OpKind::Phase:
                        frame_z[op.q0] ^= frame_x[op.q0];
                        break;
                    case OpKind::Cnot:
                        frame_x[op.q1] ^= frame_x[op.q0];
                        frame_z[op.q0] ^= frame_z[op.q1];
                        break;
                    case OpKind::Reset:
                        frame_x[op.q0] = 0;
                        frame_z[op.q0] = 0;
                        break;
                    case OpKind::Measure:
                        record_flip[meas_index[i]] = frame_x[op.q0];
                        frame_z[op.q0] = 0;
                        break;
                    case OpKind::MeasureReset:
                        record_flip[meas_index[i]] = frame_x[op.q0];
                        frame_x[op.q0] = 0;
                        frame_z[op.q0] = 0;
                        break;
                    case OpKind::PauliX:
                    case OpKind::PauliY:
                    case OpKind::PauliZ:
                    case OpKind::Idle:
                    case OpKind::Tick:
                        break;
                }
            }

            std::uint64_t* row =
                table.mutable_rows().data() +
                (static_cast<std::size_t>(loc.index) * 3 + static_cast<std::size_t>(pauli)) *
                    table.row_words();
            for (std::size_t d = 0; d < circuit.detectors.size(); ++d) {
                std::uint8_t parity = 0;
                for (std::uint32_t m : circuit.detectors[d].measurements) {
                    parity ^= record_flip[m];
                }
                if (parity) {
                    row[d >> 6] |= std::uint64_t{1} << (d & 63);
                }
            }
            for (std::size_t k = 0; k < circuit.observables.size(); ++k) {
                std::uint8_t parity = 0;
                for (std::uint32_t m : circuit.observables[k].measurements) {
                    parity ^= record_flip[m];
                }
                if (parity) {
                    row[dw + (k >> 6)] |= std::uint64_t{1} << (k & 63);
                }
            }
        }
    }
    return table;
}

namespace detail {

inline constexpr char kTableMagic[8] = {'Q', 'L', 'E', 'R', 'P', 'T', '0', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    require(static_cast<bool>(in), ErrorKind::FormatError, "truncated propagation table stream");
}

}  // namespace detail

/// Binary serialization of a compiled table (little-endian host layout).
inline void dump_propagation_table(const PropagationTable& table, std::ostream& out) {
    out.write(detail::kTableMagic, sizeof(detail::kTableMagic));
    detail::write_raw(out, table.num_locations);
    detail::write_raw(out, table.num_detectors);
    detail::write_raw(out, table.num_observables);
    std::uint32_t digest_len = static_cast<std::uint32_t>(table.circuit_digest.size());
    detail::write_raw(out, digest_len);
    out.write(table.circuit_digest.data(), digest_len);
    std::uint64_t word_count = table.raw_rows().size();
    detail::write_raw(out, word_count);
    out.write(reinterpret_cast<const char*>(table.raw_rows().data()),
              static_cast<std::streamsize>(word_count * sizeof(std::uint64_t)));
    require(static_cast<bool>(out), ErrorKind::IoError, "failed to write propagation table");
}

/// Loads a dumped table. When `expected_circuit_digest` is non-empty it must
/// match the stored digest, guarding against stale caches.
inline PropagationTable load_propagation_table(std::istream& in,
                                               const std::string& expected_circuit_digest = "") {
    char magic[8];
    in.read(magic, sizeof(magic));
    require(static_cast<bool>(in) && std::equal(magic, magic + 8, detail::kTableMagic),
            ErrorKind::FormatError, "not a propagation table file (bad magic)");
    PropagationTable table;
    detail::read_raw(in, table.num_locations);
    detail::read_raw(in, table.num_detectors);
    detail::read_raw(in, table.num_observables);
    std::uint32_t digest_len = 0;
    detail::read_raw(in, digest_len);
    require(digest_len <= 128, ErrorKind::FormatError, "unreasonable digest length");
    table.circuit_digest.resize(digest_len);
    in.read(table.circuit_digest.data(), digest_len);
    require(static_cast<bool>(in), ErrorKind::FormatError, "truncated propagation table stream");
    std::uint64_t word_count = 0;
    detail::read_raw(in, word_count);
    require(word_count == static_cast<std::uint64_t>(table.num_locations) * 3 * table.row_words(),
            ErrorKind::FormatError, "propagation table size mismatch");
    table.mutable_rows().resize(word_count);
    in.read(reinterpret_cast<char*>(table.mutable_rows().data()),
            static_cast<std::streamsize>(word_count * sizeof(std::uint64_t)));
    require(static_cast<bool>(in), ErrorKind::FormatError, "truncated propagation table stream");
    require(expected_circuit_digest.empty() || expected_circuit_digest == table.circuit_digest,
            ErrorKind::FormatError, "propagation table was compiled from a different circuit");
    return table;
}

}  // namespace qler
