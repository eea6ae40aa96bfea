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

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qler/circuit.hpp"
#include "qler/error.hpp"

namespace qler {

enum class CodeFamily : std::uint8_t {
    Repetition,  // bit-flip repetition code, logical |0>
    Surface,     // rotated surface code, Z-basis memory experiment
};

struct CodeSpec {
    CodeFamily family = CodeFamily::Surface;
    int distance = 3;
    int rounds = 0;  // 0 means the default: 3*distance

    int effective_rounds() const { return rounds > 0 ? rounds : 3 * distance; }
};

namespace detail {

inline void check_code_spec(const CodeSpec& spec) {
    require(spec.distance >= 3 && spec.distance % 2 == 1, ErrorKind::UnsupportedDistance,
            "code distance must be odd and >= 3, got " + std::to_string(spec.distance));
    require(spec.rounds >= 0, ErrorKind::ConfigError, "rounds must be >= 1 (or 0 for default)");
}

}  // namespace detail

/// Distance-d repetition code protecting logical |0> against bit flips.
///
/// Data qubits 0..d-1, ancillas d..2d-2; ancilla i checks the ZZ parity of
/// data i and i+1 via two sequential CX gates per round.
///
/// With rounds == 1 this emits the minimal teaching layout: plain M on each
/// ancilla, one single-reference detector per ancilla, and a final readout of
/// data qubit 0 alone as the observable. With rounds > 1 it emits the
/// fault-tolerant layout: MR ancillas every round, detectors comparing
/// consecutive rounds, a full data readout, and boundary detectors tying the
/// final data parities to the last ancilla readouts.
inline Circuit generate_repetition_memory(int distance, int rounds) {
    CodeSpec spec{CodeFamily::Repetition, distance, rounds};
    detail::check_code_spec(spec);
    rounds = spec.effective_rounds();
    const int d = distance;
    const auto data = [](int i) { return static_cast<std::uint32_t>(i); };
    const auto anc = [d](int i) { return static_cast<std::uint32_t>(d + i); };

    Circuit c;
    for (int q = 0; q < 2 * d - 1; ++q) {
        c.append(OpKind::Reset, static_cast<std::uint32_t>(q));
    }
    c.append_tick();

    std::uint32_t meas_count = 0;
    std::vector<std::uint32_t> prev_anc_meas(static_cast<std::size_t>(d - 1));
    std::vector<std::uint32_t> last_anc_meas(static_cast<std::size_t>(d - 1));

    for (int round = 1; round <= rounds; ++round) {
        for (int i = 0; i < d - 1; ++i) {
            c.append_cx(data(i), anc(i));
            c.append_cx(data(i + 1), anc(i));
        }
        c.append_tick();
        for (int i = 0; i < d - 1; ++i) {
            c.append(rounds == 1 ? OpKind::Measure : OpKind::MeasureReset, anc(i));
            last_anc_meas[static_cast<std::size_t>(i)] = meas_count++;
        }
        for (int i = 0; i < d - 1; ++i) {
            Detector det;
            if (round == 1) {
                det.measurements = {last_anc_meas[static_cast<std::size_t>(i)]};
            } else {
                det.measurements = {prev_anc_meas[static_cast<std::size_t>(i)],
                                    last_anc_meas[static_cast<std::size_t>(i)]};
            }
            c.detectors.push_back(std::move(det));
        }
        prev_anc_meas = last_anc_meas;
        if (round < rounds) {
            c.append_tick();
        }
    }

    if (rounds == 1) {
        c.append(OpKind::Measure, data(0));
        c.observables.push_back(Observable{{meas_count}});
        return c;
    }

    std::vector<std::uint32_t> data_meas(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        c.append(OpKind::Measure, data(i));
        data_meas[static_cast<std::size_t>(i)] = meas_count++;
    }
    for (int i = 0; i < d - 1; ++i) {
        c.detectors.push_back(Detector{{data_meas[static_cast<std::size_t>(i)],
                                        data_meas[static_cast<std::size_t>(i + 1)],
                                        last_anc_meas[static_cast<std::size_t>(i)]}});
    }
    c.observables.push_back(Observable{{data_meas[0]}});
    return c;
}

/// Rotated surface code, distance-d, Z-basis memory experiment.
///
/// Geometry (doubled coordinates): data qubits at (2i+1, 2j+1) for
/// i,j in [0,d); stabilizer centers at (2i, 2j). A center is X-type when
/// i+j is odd, Z-type when even. Interior centers (weight 4) are all kept;
/// top/bottom edge centers are kept only when X-type and left/right edge
/// centers only when Z-type (weight 2); corners are dropped. This yields
/// (d*d-1)/2 stabilizers of each type and logical Z along the data row y=1.
///
/// Each round: H on X-ancillas, four CX layers, H again, MR on all ancillas.
/// The CX layer order (offsets from the center to the data qubit) is
///   X-type (ancilla is control): (1,1), (-1,1), (1,-1), (-1,-1)
///   Z-type (ancilla is target):  (1,1), (1,-1), (-1,1), (-1,-1)
/// which gives every data qubit at most one gate per layer and orients both
/// types' hook errors perpendicular to the logical operator they could
/// shorten, preserving full circuit-level distance.
///
/// Detectors: round 1 on Z-ancillas only (X outcomes start out random), every
/// later round compares both types against the previous round, and the final
/// data readout closes each Z-stabilizer against its last ancilla readout.
inline Circuit generate_surface_memory_z(int distance, int rounds) {
    CodeSpec spec{CodeFamily::Surface, distance, rounds};
    detail::check_code_spec(spec);
    rounds = spec.effective_rounds();
    const int d = distance;

    struct Site {
        int x, y;
        bool is_data;
        bool is_x_type;  // valid for ancillas
    };
    // Deterministic qubit numbering: row-major over (y, x).
    std::map<std::pair<int, int>, std::uint32_t> index_of;
    std::vector<Site> sites;
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            sites.push_back(Site{2 * i + 1, 2 * j + 1, true, false});
        }
    }
    for (int j = 0; j <= d; ++j) {
        for (int i = 0; i <= d; ++i) {
            bool x_type = ((i + j) % 2) == 1;
            bool interior = i >= 1 && i <= d - 1 && j >= 1 && j <= d - 1;
            bool top_bottom = (j == 0 || j == d) && i >= 1 && i <= d - 1;
            bool left_right = (i == 0 || i == d) && j >= 1 && j <= d - 1;
            if (interior || (top_bottom && x_type) || (left_right && !x_type)) {
                sites.push_back(Site{2 * i, 2 * j, false, x_type});
            }
        }
    }
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
        return std::pair(a.y, a.x) < std::pair(b.y, b.x);
    });
    for (std::size_t k = 0; k < sites.size(); ++k) {
        index_of[{sites[k].x, sites[k].y}] = static_cast<std::uint32_t>(k);
    }

    std::vector<std::uint32_t> x_ancillas, all_ancillas, data_qubits;
    std::vector<Site> ancilla_sites;
    for (const Site& s : sites) {
        std::uint32_t q = index_of[{s.x, s.y}];
        if (s.is_data) {
            data_qubits.push_back(q);
        } else {
            all_ancillas.push_back(q);
            ancilla_sites.push_back(s);
            if (s.is_x_type) {
                x_ancillas.push_back(q);
            }
        }
    }

    static constexpr int kXOffsets[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
    static constexpr int kZOffsets[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

    Circuit c;
    for (std::uint32_t q = 0; q < sites.size(); ++q) {
        c.append(OpKind::Reset, q);
    }
    c.append_tick();

    std::uint32_t meas_count = 0;
    std::map<std::uint32_t, std::uint32_t> prev_meas, last_meas;

    for (int round = 1; round <= rounds; ++round) {
        for (std::uint32_t q : x_ancillas) {
            c.append(OpKind::Hadamard, q);
        }
        c.append_tick();
        for (int layer = 0; layer < 4; ++layer) {
            for (const Site& a : ancilla_sites) {
                const int* off = a.is_x_type ? kXOffsets[layer] : kZOffsets[layer];
                auto it = index_of.find({a.x + off[0], a.y + off[1]});
                if (it == index_of.end()) {
                    continue;
                }
                std::uint32_t anc = index_of[{a.x, a.y}];
                if (a.is_x_type) {
                    c.append_cx(anc, it->second);
                } else {
                    c.append_cx(it->second, anc);
                }
            }
            c.append_tick();
        }
        for (std::uint32_t q : x_ancillas) {
            c.append(OpKind::Hadamard, q);
        }
        c.append_tick();
        for (std::uint32_t q : all_ancillas) {
            c.append(OpKind::MeasureReset, q);
            last_meas[q] = meas_count++;
        }
        for (std::size_t k = 0; k < all_ancillas.size(); ++k) {
            std::uint32_t q = all_ancillas[k];
            if (round == 1) {
                if (!ancilla_sites[k].is_x_type) {
                    c.detectors.push_back(Detector{{last_meas[q]}});
                }
            } else {
                c.detectors.push_back(Detector{{prev_meas[q], last_meas[q]}});
            }
        }
        prev_meas = last_meas;
        if (round < rounds) {
            c.append_tick();
        }
    }

    std::map<std::uint32_t, std::uint32_t> data_meas;
    for (std::uint32_t q : data_qubits) {
        c.append(OpKind::Measure, q);
        data_meas[q] = meas_count++;
    }
    for (std::size_t k = 0; k < all_ancillas.size(); ++k) {
        const Site& a = ancilla_sites[k];
        if (a.is_x_type) {
            continue;
        }
        Detector det;
        for (const auto& off : kZOffsets) {
            auto it = index_of.find({a.x + off[0], a.y + off[1]});
            if (it != index_of.end()) {
                det.measurements.push_back(data_meas[it->second]);
            }
        }
        std::sort(det.measurements.begin(), det.measurements.end());
        det.measurements.push_back(last_meas[all_ancillas[k]]);
        c.detectors.push_back(std::move(det));
    }
    Observable obs;
    for (const Site& s : sites) {
        if (s.is_data && s.y == 1) {
            obs.measurements.push_back(data_meas[index_of[{s.x, s.y}]]);
        }
    }
    c.observables.push_back(std::move(obs));
    return c;
}

inline Circuit generate_code(const CodeSpec& spec) {
    detail::check_code_spec(spec);
    switch (spec.family) {
        case CodeFamily::Repetition:
            return generate_repetition_memory(spec.distance, spec.rounds);
        case CodeFamily::Surface:
            return generate_surface_memory_z(spec.distance, spec.rounds);
    }
    fail(ErrorKind::ConfigError, "unknown code family");
}

}  // namespace qler
