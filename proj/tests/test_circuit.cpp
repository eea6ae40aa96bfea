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

// Circuit text format, code generators, and fault-location enumeration.

#include <functional>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "qler/circuit.hpp"
#include "qler/codes.hpp"

namespace {

using qler::Circuit;
using qler::CodeFamily;
using qler::CodeSpec;
using qler::Error;
using qler::ErrorKind;
using qler::FaultLocation;
using qler::OpKind;

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a qler::Error");
    return ErrorKind::Internal;
}

}  // namespace

TEST_CASE("single-round distance-3 repetition layout is the minimal teaching circuit") {
    Circuit expected;
    for (std::uint32_t q = 0; q < 5; ++q) {
        expected.append(OpKind::Reset, q);
    }
    expected.append_tick();
    expected.append_cx(0, 3);
    expected.append_cx(1, 3);
    expected.append_cx(1, 4);
    expected.append_cx(2, 4);
    expected.append_tick();
    expected.append(OpKind::Measure, 3);
    expected.append(OpKind::Measure, 4);
    expected.detectors.push_back(qler::Detector{{0}});
    expected.detectors.push_back(qler::Detector{{1}});
    expected.append(OpKind::Measure, 0);
    expected.observables.push_back(qler::Observable{{2}});

    Circuit actual = qler::generate_repetition_memory(3, 1);
    CHECK(actual == expected);
    CHECK(actual.num_qubits == 5);
    CHECK(actual.num_measurements() == 3);
}

TEST_CASE("fault locations enumerate wire-major, resets and ticks host none") {
    Circuit c = qler::generate_repetition_memory(3, 1);
    std::vector<FaultLocation> locs = qler::enumerate_fault_locations(c);
    REQUIRE(locs.size() == 11);

    // (op_index, qubit) pairs: all of qubit 0's touches in program order,
    // then qubit 1's, and so on. Ops: 0-4 R, 5 TICK, 6-9 CX, 10 TICK,
    // 11 M3, 12 M4, 13 M0.
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> expected = {
        {6, 0}, {13, 0},          // qubit 0: CX(0,3), final M
        {7, 1}, {8, 1},           // qubit 1: CX(1,3), CX(1,4)
        {9, 2},                   // qubit 2: CX(2,4)
        {6, 3}, {7, 3}, {11, 3},  // qubit 3: two CX touches, then M
        {8, 4}, {9, 4}, {12, 4},  // qubit 4: two CX touches, then M
    };
    for (std::size_t i = 0; i < locs.size(); ++i) {
        CAPTURE(i);
        CHECK(locs[i].index == i);
        CHECK(locs[i].op_index == expected[i].first);
        CHECK(locs[i].qubit == expected[i].second);
    }

    // Enumeration is a pure function of the circuit.
    CHECK(qler::enumerate_fault_locations(c) == locs);
}

TEST_CASE("generated code sizes") {
    SECTION("repetition d=3, 3 rounds") {
        Circuit c = qler::generate_repetition_memory(3, 3);
        CHECK(c.num_qubits == 5);
        CHECK(qler::enumerate_fault_locations(c).size() == 33);
        CHECK(c.detectors.size() == 8);
        CHECK(c.observables.size() == 1);
    }
    SECTION("surface d=3, 9 rounds") {
        Circuit c = qler::generate_surface_memory_z(3, 9);
        CHECK(c.num_qubits == 17);
        CHECK(qler::enumerate_fault_locations(c).size() == 585);
        CHECK(c.detectors.size() == 72);
        CHECK(c.observables.size() == 1);
        CHECK(c.observables[0].measurements.size() == 3);  // logical Z spans one data row
    }
    SECTION("surface d=5, 15 rounds") {
        Circuit c = qler::generate_surface_memory_z(5, 15);
        CHECK(c.num_qubits == 49);
        CHECK(qler::enumerate_fault_locations(c).size() == 3145);
        CHECK(c.detectors.size() == 12 + 14 * 24 + 12);
    }
    SECTION("surface d=7, 21 rounds") {
        Circuit c = qler::generate_surface_memory_z(7, 21);
        CHECK(c.num_qubits == 97);
        CHECK(qler::enumerate_fault_locations(c).size() == 9121);
        CHECK(c.detectors.size() == 1008);
    }
}

TEST_CASE("default rounds is three times the distance") {
    CHECK(CodeSpec{CodeFamily::Surface, 3, 0}.effective_rounds() == 9);
    CHECK(CodeSpec{CodeFamily::Repetition, 5, 0}.effective_rounds() == 15);
    CHECK(CodeSpec{CodeFamily::Surface, 7, 21}.effective_rounds() == 21);

    Circuit via_spec = qler::generate_code(CodeSpec{CodeFamily::Surface, 3, 0});
    Circuit direct = qler::generate_surface_memory_z(3, 9);
    CHECK(via_spec == direct);
}

TEST_CASE("unsupported distances are rejected") {
    CHECK(kind_of([] { qler::generate_repetition_memory(2, 1); }) ==
          ErrorKind::UnsupportedDistance);
    CHECK(kind_of([] { qler::generate_surface_memory_z(4, 3); }) ==
          ErrorKind::UnsupportedDistance);
    CHECK(kind_of([] { qler::generate_surface_memory_z(1, 3); }) ==
          ErrorKind::UnsupportedDistance);
}

TEST_CASE("parse then serialize is the identity on canonical text") {
    for (const Circuit& c : {qler::generate_repetition_memory(3, 1),
                             qler::generate_repetition_memory(5, 4),
                             qler::generate_surface_memory_z(3, 2)}) {
        std::string text = qler::serialize_circuit(c);
        Circuit reparsed = qler::parse_circuit(text);
        CHECK(reparsed == c);
        CHECK(qler::serialize_circuit(reparsed) == text);
    }
}

TEST_CASE("parser accepts multi-target lines, comments, and interleaving") {
    const std::string text =
        "# prepare\n"
        "R 0 1 2\n"
        "X 0 2   # flip the ends\n"
        "CX 0 1 1 2\n"
        "\n"
        "M 1\n"
        "DETECTOR rec[-1]\n"
        "M 0 2\n"
        "OBSERVABLE_INCLUDE(0) rec[-2] rec[-1]\n";
    Circuit c = qler::parse_circuit(text);
    CHECK(c.num_qubits == 3);
    REQUIRE(c.ops.size() == 3 + 2 + 2 + 1 + 2);
    CHECK(c.ops[3] == qler::Operation{OpKind::PauliX, 0, 0});
    CHECK(c.ops[4] == qler::Operation{OpKind::PauliX, 2, 0});
    CHECK(c.ops[5] == qler::Operation{OpKind::Cnot, 0, 1});
    CHECK(c.ops[6] == qler::Operation{OpKind::Cnot, 1, 2});
    REQUIRE(c.detectors.size() == 1);
    CHECK(c.detectors[0].measurements == std::vector<std::uint32_t>{0});
    REQUIRE(c.observables.size() == 1);
    CHECK(c.observables[0].measurements == std::vector<std::uint32_t>{1, 2});

    // A detector declared mid-circuit keeps its absolute reference when the
    // canonical form re-expresses it relative to the full record.
    Circuit round_trip = qler::parse_circuit(qler::serialize_circuit(c));
    CHECK(round_trip == c);
}

TEST_CASE("parser rejects malformed input with the offending line") {
    auto parse_kind_line = [](const std::string& text, int expected_line) {
        try {
            qler::parse_circuit(text);
        } catch (const Error& e) {
            CHECK(e.line() == expected_line);
            return e.kind();
        }
        FAIL("expected a parse error");
        return ErrorKind::Internal;
    };

    CHECK(parse_kind_line("R 0\nCZ 0 1\n", 2) == ErrorKind::UnknownInstruction);
    CHECK(parse_kind_line("M 0\nDETECTOR rec[-0]\n", 2) == ErrorKind::BadRecordReference);
    CHECK(parse_kind_line("M 0\nDETECTOR rec[-2]\n", 2) == ErrorKind::BadRecordReference);
    CHECK(parse_kind_line("DETECTOR rec[-1]\n", 1) == ErrorKind::BadRecordReference);
    CHECK(parse_kind_line("CX 0 1 2\n", 1) == ErrorKind::ArityError);
    CHECK(parse_kind_line("CX 0 0\n", 1) == ErrorKind::ArityError);
    CHECK(parse_kind_line("TICK 0\n", 1) == ErrorKind::ArityError);
    CHECK(parse_kind_line("M\n", 1) == ErrorKind::ArityError);
    CHECK(parse_kind_line("H 0\nDETECTOR\n", 2) == ErrorKind::ArityError);
    CHECK(parse_kind_line("M 0\nOBSERVABLE_INCLUDE(a) rec[-1]\n", 2) ==
          ErrorKind::UnknownInstruction);
    CHECK(parse_kind_line("X banana\n", 1) == ErrorKind::ArityError);
}

TEST_CASE("append guards arity at the library level") {
    Circuit c;
    CHECK(kind_of([&] { c.append(OpKind::Cnot, 0); }) == ErrorKind::ArityError);
    CHECK(kind_of([&] { c.append(OpKind::Tick, 0); }) == ErrorKind::ArityError);
    CHECK(kind_of([&] { c.append_cx(2, 2); }) == ErrorKind::ArityError);
}
