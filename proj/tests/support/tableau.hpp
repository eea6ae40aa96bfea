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

// Test-only brute-force oracle: a dense stabilizer-tableau simulator with
// destabilizer rows and exact phase tracking, plus helpers that run whole
// circuits with injected Pauli faults and a generator for random Clifford
// circuits whose detectors/observables are verified to be deterministic.
//
// The production propagation table is never consulted here; agreement between
// the two is what the tests establish.

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "qler/circuit.hpp"
#include "qler/error.hpp"
#include "qler/propagation.hpp"

namespace qler::testing {

/// Dense tableau over at most 64 qubits. Row i < n is the i-th destabilizer,
/// row n + i the i-th stabilizer; each row is a Pauli with sign (-1)^r.
class TableauSim {
  public:
    explicit TableauSim(int num_qubits, std::mt19937_64& rng)
        : n_(num_qubits), rng_(&rng), x_(2 * num_qubits, 0), z_(2 * num_qubits, 0),
          r_(2 * num_qubits, 0) {
        require(num_qubits >= 1 && num_qubits <= 64, ErrorKind::ConfigError,
                "tableau oracle supports 1..64 qubits");
        for (int i = 0; i < n_; ++i) {
            x_[static_cast<std::size_t>(i)] = bit(i);          // destabilizer X_i
            z_[static_cast<std::size_t>(n_ + i)] = bit(i);     // stabilizer Z_i
        }
    }

    void h(int q) {
        for (std::size_t row = 0; row < x_.size(); ++row) {
            r_[row] ^= static_cast<std::uint8_t>(((x_[row] & z_[row]) >> q) & 1u);
            std::uint64_t xb = (x_[row] >> q) & 1u, zb = (z_[row] >> q) & 1u;
            x_[row] = (x_[row] & ~bit(q)) | (zb << q);
            z_[row] = (z_[row] & ~bit(q)) | (xb << q);
        }
    }

    void s(int q) {
        for (std::size_t row = 0; row < x_.size(); ++row) {
            r_[row] ^= static_cast<std::uint8_t>(((x_[row] & z_[row]) >> q) & 1u);
            z_[row] ^= x_[row] & bit(q);
        }
    }

    // Pauli gates only flip row signs: conjugation by X negates Z and Y, etc.
    void x(int q) {
        for (std::size_t row = 0; row < x_.size(); ++row) {
            r_[row] ^= static_cast<std::uint8_t>((z_[row] >> q) & 1u);
        }
    }
    void z(int q) {
        for (std::size_t row = 0; row < x_.size(); ++row) {
            r_[row] ^= static_cast<std::uint8_t>((x_[row] >> q) & 1u);
        }
    }
    void y(int q) {
        for (std::size_t row = 0; row < x_.size(); ++row) {
            r_[row] ^= static_cast<std::uint8_t>(((x_[row] ^ z_[row]) >> q) & 1u);
        }
    }

    void cx(int c, int t) {
        for (std::size_t row = 0; row < x_.size(); ++row) {
            std::uint64_t xc = (x_[row] >> c) & 1u, zc = (z_[row] >> c) & 1u;
            std::uint64_t xt = (x_[row] >> t) & 1u, zt = (z_[row] >> t) & 1u;
            r_[row] ^= static_cast<std::uint8_t>(xc & zt & (xt ^ zc ^ 1u));
            x_[row] ^= (xc << t);
            z_[row] ^= (zt << c);
        }
    }

    int measure(int q) {
        int p = -1;
        for (int i = n_; i < 2 * n_; ++i) {
            if ((x_[static_cast<std::size_t>(i)] >> q) & 1u) {
                p = i;
                break;
            }
        }
        if (p >= 0) {
            // Random outcome: all other anticommuting rows absorb row p.
            // Row p - n is skipped: it anticommutes with row p (its product
            // would carry an odd phase) and is overwritten below anyway.
            for (int i = 0; i < 2 * n_; ++i) {
                if (i != p && i != p - n_ && ((x_[static_cast<std::size_t>(i)] >> q) & 1u)) {
                    rowsum(i, p);
                }
            }
            std::size_t sp = static_cast<std::size_t>(p);
            std::size_t dp = static_cast<std::size_t>(p - n_);
            x_[dp] = x_[sp];
            z_[dp] = z_[sp];
            r_[dp] = r_[sp];
            x_[sp] = 0;
            z_[sp] = bit(q);
            r_[sp] = static_cast<std::uint8_t>((*rng_)() & 1u);
            return r_[sp];
        }
        // Deterministic outcome: accumulate the stabilizer product pointed to
        // by the destabilizers that anticommute with Z_q.
        std::uint64_t sx = 0, sz = 0;
        int phase = 0;  // exponent of i, mod 4
        for (int i = 0; i < n_; ++i) {
            if ((x_[static_cast<std::size_t>(i)] >> q) & 1u) {
                accumulate(sx, sz, phase, static_cast<std::size_t>(n_ + i));
            }
        }
        require((phase & 1) == 0, ErrorKind::Internal, "tableau phase left the real axis");
        return (phase & 2) ? 1 : 0;
    }

    void reset(int q) {
        if (measure(q) == 1) {
            x(q);
        }
    }

    int measure_reset(int q) {
        int outcome = measure(q);
        if (outcome == 1) {
            x(q);
        }
        return outcome;
    }

  private:
    static std::uint64_t bit(int q) { return std::uint64_t{1} << q; }

    // Phase exponent (power of i, mod 4) acquired when multiplying Pauli
    // (x1,z1) by (x2,z2) on one qubit; the usual g function.
    static int g(int x1, int z1, int x2, int z2) {
        if (x1 == 0 && z1 == 0) {
            return 0;
        }
        if (x1 == 1 && z1 == 1) {
            return z2 - x2;
        }
        if (x1 == 1) {
            return z2 * (2 * x2 - 1);
        }
        return x2 * (1 - 2 * z2);
    }

    // Row h <- row i * row h, with exact sign bookkeeping.
    void rowsum(int h, int i) {
        std::size_t sh = static_cast<std::size_t>(h), si = static_cast<std::size_t>(i);
        int phase = 2 * r_[sh] + 2 * r_[si];
        for (int q = 0; q < n_; ++q) {
            phase += g(static_cast<int>((x_[si] >> q) & 1u), static_cast<int>((z_[si] >> q) & 1u),
                       static_cast<int>((x_[sh] >> q) & 1u), static_cast<int>((z_[sh] >> q) & 1u));
        }
        phase = ((phase % 4) + 4) % 4;
        require(phase == 0 || phase == 2, ErrorKind::Internal, "tableau rowsum phase odd");
        r_[sh] = static_cast<std::uint8_t>(phase == 2);
        x_[sh] ^= x_[si];
        z_[sh] ^= z_[si];
    }

    // Multiply the scratch Pauli (for deterministic measurements) by row `row`.
    void accumulate(std::uint64_t& sx, std::uint64_t& sz, int& phase, std::size_t row) const {
        phase += 2 * r_[row];
        for (int q = 0; q < n_; ++q) {
            phase += g(static_cast<int>((x_[row] >> q) & 1u), static_cast<int>((z_[row] >> q) & 1u),
                       static_cast<int>((sx >> q) & 1u), static_cast<int>((sz >> q) & 1u));
        }
        phase = ((phase % 4) + 4) % 4;
        sx ^= x_[row];
        sz ^= z_[row];
    }

    int n_;
    std::mt19937_64* rng_;
    std::vector<std::uint64_t> x_, z_;
    std::vector<std::uint8_t> r_;
};

/// A fault pinned to a specific (operation, qubit) slot, injected immediately
/// before that operation executes.
struct OracleFault {
    std::uint32_t op_index;
    std::uint32_t qubit;
    Pauli pauli;
};

/// Runs the circuit on the tableau simulator with the given faults and RNG
/// seed; returns the raw measurement record.
inline std::vector<std::uint8_t> run_circuit_tableau(const Circuit& circuit,
                                                     const std::vector<OracleFault>& faults,
                                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TableauSim sim(static_cast<int>(circuit.num_qubits), rng);
    std::multimap<std::uint32_t, const OracleFault*> by_op;
    for (const OracleFault& f : faults) {
        by_op.emplace(f.op_index, &f);
    }
    std::vector<std::uint8_t> record;
    for (std::uint32_t i = 0; i < circuit.ops.size(); ++i) {
        auto [begin, end] = by_op.equal_range(i);
        for (auto it = begin; it != end; ++it) {
            int q = static_cast<int>(it->second->qubit);
            switch (it->second->pauli) {
                case Pauli::X: sim.x(q); break;
                case Pauli::Y: sim.y(q); break;
                case Pauli::Z: sim.z(q); break;
            }
        }
        const Operation& op = circuit.ops[i];
        int q0 = static_cast<int>(op.q0), q1 = static_cast<int>(op.q1);
        switch (op.kind) {
            case OpKind::Reset: sim.reset(q0); break;
            case OpKind::Measure: record.push_back(static_cast<std::uint8_t>(sim.measure(q0))); break;
            case OpKind::MeasureReset:
                record.push_back(static_cast<std::uint8_t>(sim.measure_reset(q0)));
                break;
            case OpKind::PauliX: sim.x(q0); break;
            case OpKind::PauliY: sim.y(q0); break;
            case OpKind::PauliZ: sim.z(q0); break;
            case OpKind::Hadamard: sim.h(q0); break;
            case OpKind::Phase: sim.s(q0); break;
            case OpKind::Cnot: sim.cx(q0, q1); break;
            case OpKind::Idle:
            case OpKind::Tick: break;
        }
    }
    return record;
}

struct ParityOutcome {
    std::vector<std::uint8_t> detectors;
    std::vector<std::uint8_t> observables;
};

inline ParityOutcome circuit_parities(const Circuit& circuit,
                                      const std::vector<std::uint8_t>& record) {
    ParityOutcome out;
    for (const Detector& det : circuit.detectors) {
        std::uint8_t parity = 0;
        for (std::uint32_t m : det.measurements) {
            parity ^= record[m];
        }
        out.detectors.push_back(parity);
    }
    for (const Observable& obs : circuit.observables) {
        std::uint8_t parity = 0;
        for (std::uint32_t m : obs.measurements) {
            parity ^= record[m];
        }
        out.observables.push_back(parity);
    }
    return out;
}

/// Detector/observable flips of a faulted run relative to the fault-free run.
/// Sound whenever the declared parities are deterministic in the fault-free
/// circuit: inserting Paulis keeps every deterministic parity deterministic,
/// so the XOR is independent of the measurement-randomness coupling.
inline ParityOutcome oracle_flips(const Circuit& circuit, const std::vector<OracleFault>& faults,
                                  std::uint64_t seed) {
    ParityOutcome reference = circuit_parities(circuit, run_circuit_tableau(circuit, {}, seed));
    ParityOutcome faulted = circuit_parities(circuit, run_circuit_tableau(circuit, faults, seed));
    for (std::size_t i = 0; i < reference.detectors.size(); ++i) {
        faulted.detectors[i] ^= reference.detectors[i];
    }
    for (std::size_t i = 0; i < reference.observables.size(); ++i) {
        faulted.observables[i] ^= reference.observables[i];
    }
    return faulted;
}

/// True when the parity of `measurements` takes the same value in the
/// fault-free circuit across `replicas` independently seeded runs. A
/// nondeterministic stabilizer parity is a fair coin, so a surviving
/// candidate is deterministic except with probability 2^-(replicas-1).
inline bool parity_deterministic(const Circuit& circuit,
                                 const std::vector<std::uint32_t>& measurements, int replicas = 30,
                                 std::uint64_t seed_base = 0x6f7261636c65ull) {
    int first = -1;
    for (int rep = 0; rep < replicas; ++rep) {
        std::vector<std::uint8_t> record =
            run_circuit_tableau(circuit, {}, seed_base + static_cast<std::uint64_t>(rep));
        int parity = 0;
        for (std::uint32_t m : measurements) {
            parity ^= record[m];
        }
        if (first < 0) {
            first = parity;
        } else if (parity != first) {
            return false;
        }
    }
    return true;
}

/// Random Clifford circuit (2..10 qubits, 10..40 operations before the final
/// readout layer) whose detectors and observables are all replica-verified
/// deterministic parities. Regenerates until at least one detector and one
/// observable survive the filter.
inline Circuit random_clifford_circuit(std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::uniform_int_distribution<int> qubit_count(2, 10);
        int n = qubit_count(rng);
        std::uniform_int_distribution<int> op_count(10, 40);
        int num_ops = op_count(rng);
        std::uniform_int_distribution<int> pick_q(0, n - 1);
        std::uniform_int_distribution<int> pick_kind(0, 99);

        Circuit c;
        for (int q = 0; q < n; ++q) {
            c.append(OpKind::Reset, static_cast<std::uint32_t>(q));
        }
        for (int k = 0; k < num_ops; ++k) {
            int roll = pick_kind(rng);
            int q = pick_q(rng);
            if (roll < 30) {
                c.append(OpKind::Hadamard, static_cast<std::uint32_t>(q));
            } else if (roll < 42) {
                c.append(OpKind::Phase, static_cast<std::uint32_t>(q));
            } else if (roll < 62) {
                int q2 = pick_q(rng);
                if (q2 == q) {
                    q2 = (q + 1) % n;
                }
                c.append_cx(static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(q2));
            } else if (roll < 72) {
                c.append(OpKind::Measure, static_cast<std::uint32_t>(q));
            } else if (roll < 78) {
                c.append(OpKind::MeasureReset, static_cast<std::uint32_t>(q));
            } else if (roll < 84) {
                c.append(OpKind::Reset, static_cast<std::uint32_t>(q));
            } else if (roll < 88) {
                c.append(OpKind::PauliX, static_cast<std::uint32_t>(q));
            } else if (roll < 91) {
                c.append(OpKind::PauliZ, static_cast<std::uint32_t>(q));
            } else if (roll < 93) {
                c.append(OpKind::PauliY, static_cast<std::uint32_t>(q));
            } else if (roll < 97) {
                c.append(OpKind::Idle, static_cast<std::uint32_t>(q));
            } else {
                c.append_tick();
            }
        }
        for (int q = 0; q < n; ++q) {
            c.append(OpKind::Measure, static_cast<std::uint32_t>(q));
        }
        std::uint32_t num_meas = c.num_measurements();

        // Candidate parities: every singleton plus random small subsets.
        std::vector<std::vector<std::uint32_t>> candidates;
        for (std::uint32_t m = 0; m < num_meas; ++m) {
            candidates.push_back({m});
        }
        std::uniform_int_distribution<int> subset_size(2, 4);
        std::uniform_int_distribution<std::uint32_t> pick_m(0, num_meas - 1);
        for (int k = 0; k < 20; ++k) {
            std::vector<std::uint32_t> subset;
            int size = subset_size(rng);
            for (int j = 0; j < size; ++j) {
                std::uint32_t m = pick_m(rng);
                bool dup = false;
                for (std::uint32_t seen : subset) {
                    dup |= (seen == m);
                }
                if (!dup) {
                    subset.push_back(m);
                }
            }
            if (!subset.empty()) {
                candidates.push_back(std::move(subset));
            }
        }

        std::vector<std::vector<std::uint32_t>> surviving;
        for (const auto& cand : candidates) {
            if (parity_deterministic(c, cand)) {
                surviving.push_back(cand);
            }
        }
        if (surviving.size() < 2) {
            continue;
        }
        // Last survivor becomes the observable, the rest (up to 6) detectors.
        c.observables.push_back(Observable{surviving.back()});
        surviving.pop_back();
        std::size_t num_det = std::min<std::size_t>(surviving.size(), 6);
        for (std::size_t i = 0; i < num_det; ++i) {
            c.detectors.push_back(Detector{surviving[i]});
        }
        return c;
    }
    fail(ErrorKind::Internal, "random circuit generator failed to find deterministic parities");
}

}  // namespace qler::testing
