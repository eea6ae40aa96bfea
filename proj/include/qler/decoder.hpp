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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "qler/bitvec.hpp"
#include "qler/error.hpp"
#include "qler/propagation.hpp"

namespace qler {

/// Syndrome -> predicted observable flips.
class Decoder {
  public:
    virtual ~Decoder() = default;
    virtual std::uint32_t num_detectors() const = 0;
    virtual std::uint32_t num_observables() const = 0;

    /// Hot path: syndrome as packed words (ceil(num_detectors/64) long),
    /// prediction written into obs_out (ceil(num_observables/64) long).
    virtual void predict_into(const std::uint64_t* syndrome_words,
                              std::uint64_t* obs_out) const = 0;

    BitVec predict(const BitVec& syndrome) const {
        require(syndrome.size() == num_detectors(), ErrorKind::Internal,
                "syndrome length mismatch");
        BitVec out(num_observables());
        predict_into(syndrome.data(), out.data());
        return out;
    }
};

namespace detail {

inline BitVec bitvec_from_words(const std::uint64_t* words, std::size_t num_bits) {
    BitVec v(num_bits);
    for (std::size_t w = 0; w < v.num_words(); ++w) {
        v.data()[w] = words[w];
    }
    return v;
}

}  // namespace detail

/// Exact-syndrome table decoder. Every single fault's syndrome maps to the
/// majority observable mask among the single faults producing that syndrome
/// (ties favor the smallest mask, so "no flip" wins a split vote). Unknown
/// syndromes — including the empty one — predict no flips.
///
/// This reproduces representative-fault decoding on small circuits where
/// single faults cover all syndromes; it makes no attempt to generalize to
/// syndromes only reachable by multi-fault samples.
class LookupDecoder : public Decoder {
  public:
    static LookupDecoder build(const PropagationTable& table) {
        LookupDecoder dec;
        dec.num_detectors_ = table.num_detectors;
        dec.num_observables_ = table.num_observables;
        std::map<BitVec, std::map<BitVec, std::uint32_t>> votes;
        for (std::uint32_t loc = 0; loc < table.num_locations; ++loc) {
            for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
                BitVec syndrome =
                    detail::bitvec_from_words(table.row_detectors(loc, p), table.num_detectors);
                if (syndrome.none()) {
                    continue;
                }
                BitVec obs =
                    detail::bitvec_from_words(table.row_observables(loc, p), table.num_observables);
                votes[syndrome][obs] += 1;
            }
        }
        for (const auto& [syndrome, masks] : votes) {
            const BitVec* best = nullptr;
            std::uint32_t best_count = 0;
            for (const auto& [mask, count] : masks) {
                if (count > best_count) {  // ties keep the earlier (smaller) mask
                    best = &mask;
                    best_count = count;
                }
            }
            dec.table_.emplace(syndrome, *best);
        }
        return dec;
    }

    std::uint32_t num_detectors() const override { return num_detectors_; }
    std::uint32_t num_observables() const override { return num_observables_; }

    void predict_into(const std::uint64_t* syndrome_words, std::uint64_t* obs_out) const override {
        std::size_t ow = (num_observables_ + 63) / 64;
        BitVec key = detail::bitvec_from_words(syndrome_words, num_detectors_);
        auto it = table_.find(key);
        for (std::size_t w = 0; w < ow; ++w) {
            obs_out[w] = (it == table_.end()) ? 0 : it->second.data()[w];
        }
    }

    std::size_t table_size() const { return table_.size(); }

  private:
    std::uint32_t num_detectors_ = 0;
    std::uint32_t num_observables_ = 0;
    std::unordered_map<BitVec, BitVec, BitVecHash> table_;
};

/// Weighted syndrome graph: nodes are detectors plus one boundary node; each
/// edge class is a distinct (detector pair or detector+boundary, observable
/// mask) reachable by a single fault component.
///
/// Y faults decompose into their X and Z frame components, each of which must
/// flip at most 2 detectors; a component flipping more makes the circuit not
/// matchable. Components flipping no detectors carry no syndrome information
/// and are skipped. Edge weights are -ln(q0 * multiplicity) where q0 = p/3 is
/// the per-Pauli location rate and multiplicity counts the fault components
/// in the class, so likelier error mechanisms get cheaper edges.
class DetectorGraph {
  public:
    struct Edge {
        std::uint32_t u;
        std::uint32_t v;  // == boundary_id() for boundary edges
        double weight;
        BitVec observables;
        std::uint32_t multiplicity;
    };

    std::uint32_t num_detectors = 0;
    std::uint32_t num_observables = 0;
    std::vector<Edge> edges;

    std::uint32_t boundary_id() const { return num_detectors; }

    static DetectorGraph build(const PropagationTable& table, double p_nominal = 5e-4) {
        require(p_nominal > 0 && p_nominal < 1, ErrorKind::ConfigError,
                "nominal physical rate must be in (0,1)");
        DetectorGraph g;
        g.num_detectors = table.num_detectors;
        g.num_observables = table.num_observables;
        std::map<std::tuple<std::uint32_t, std::uint32_t, BitVec>, std::uint32_t> classes;

        auto add_component = [&](std::uint32_t loc, Pauli pauli, Pauli component) {
            BitVec det = detail::bitvec_from_words(table.row_detectors(loc, component),
                                                   table.num_detectors);
            std::size_t flips = det.popcount();
            if (flips == 0) {
                return;  // undetectable: nothing a syndrome decoder can see
            }
            require(flips <= 2, ErrorKind::NotMatchable,
                    "fault location " + std::to_string(loc) + " Pauli " +
                        std::string(1, pauli_name(pauli)) + " flips " + std::to_string(flips) +
                        " detectors; graph decoding needs <= 2 per component");
            BitVec obs = detail::bitvec_from_words(table.row_observables(loc, component),
                                                   table.num_observables);
            std::vector<std::size_t> bits = det.set_bits();
            std::uint32_t u = static_cast<std::uint32_t>(bits[0]);
            std::uint32_t v =
                flips == 2 ? static_cast<std::uint32_t>(bits[1]) : g.boundary_id();
            classes[{u, v, obs}] += 1;
        };

        for (std::uint32_t loc = 0; loc < table.num_locations; ++loc) {
            add_component(loc, Pauli::X, Pauli::X);
            add_component(loc, Pauli::Z, Pauli::Z);
            // Y acts as its X and Z components simultaneously.
            add_component(loc, Pauli::Y, Pauli::X);
            add_component(loc, Pauli::Y, Pauli::Z);
        }

        double q0 = p_nominal / 3.0;
        for (const auto& [key, multiplicity] : classes) {
            double weight = -std::log(q0 * static_cast<double>(multiplicity));
            weight = std::max(weight, 1e-9);
            g.edges.push_back(Edge{std::get<0>(key), std::get<1>(key), weight, std::get<2>(key),
                                   multiplicity});
        }
        return g;
    }
};

/// Minimum-weight matching decoder over a DetectorGraph.
///
/// Build: all-pairs shortest paths between detectors (and to the boundary)
/// with the observable-flip parity of each shortest path. Decode: defects are
/// paired up (or sent to the boundary) at minimum total path weight — exactly,
/// by subset dynamic programming, for up to kExactLimit defects; beyond that a
/// deterministic greedy pairing is used (or TooManyDefects is raised when
/// greedy fallback is disabled). The predicted observable mask is the XOR of
/// the matched paths' masks.
class MatchingDecoder : public Decoder {
  public:
    static constexpr int kExactLimit = 16;

    explicit MatchingDecoder(const DetectorGraph& graph, bool allow_greedy_fallback = true)
        : allow_greedy_(allow_greedy_fallback) {
        num_detectors_ = graph.num_detectors;
        num_observables_ = graph.num_observables;
        obs_words_ = (std::size_t{num_observables_} + 63) / 64;
        build_shortest_paths(graph);
    }

    std::uint32_t num_detectors() const override { return num_detectors_; }
    std::uint32_t num_observables() const override { return num_observables_; }

    /// Number of decodes that exceeded kExactLimit and used the greedy path.
    std::uint64_t greedy_decode_count() const { return greedy_decodes_.load(); }

    /// Total path weight of the optimal pairing for a defect list, without
    /// side effects. Exact-matching limits apply.
    double matching_cost(const std::vector<std::uint32_t>& defects) const {
        require(defects.size() <= kExactLimit, ErrorKind::TooManyDefects,
                "matching_cost is exact-only");
        if (defects.empty()) {
            return 0.0;
        }
        std::vector<std::uint64_t> scratch(obs_words_, 0);
        return match_exact(defects, scratch.data());
    }

    void predict_into(const std::uint64_t* syndrome_words, std::uint64_t* obs_out) const override {
        for (std::size_t w = 0; w < obs_words_; ++w) {
            obs_out[w] = 0;
        }
        std::vector<std::uint32_t> defects;
        std::size_t dw = (std::size_t{num_detectors_} + 63) / 64;
        for (std::size_t wi = 0; wi < dw; ++wi) {
            std::uint64_t word = syndrome_words[wi];
            while (word != 0) {
                int bit = std::countr_zero(word);
                defects.push_back(static_cast<std::uint32_t>(wi * 64 + static_cast<std::size_t>(bit)));
                word &= word - 1;
            }
        }
        if (defects.empty()) {
            return;
        }
        if (defects.size() <= kExactLimit) {
            match_exact(defects, obs_out);
        } else {
            require(allow_greedy_, ErrorKind::TooManyDefects,
                    std::to_string(defects.size()) + " defects exceeds the exact-matching limit of " +
                        std::to_string(kExactLimit));
            greedy_decodes_.fetch_add(1, std::memory_order_relaxed);
            match_greedy(defects, obs_out);
        }
    }

  private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    void build_shortest_paths(const DetectorGraph& graph) {
        std::uint32_t n = num_detectors_ + 1;  // + boundary

        // For path-finding keep only the lightest edge per node pair; the map
        // over (u, v, observables) is already deterministically ordered, so
        // ties resolve to the smallest observable mask.
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, const BitVec*>> best;
        for (const DetectorGraph::Edge& e : graph.edges) {
            std::uint32_t a = std::min(e.u, e.v), b = std::max(e.u, e.v);
            auto it = best.find({a, b});
            if (it == best.end() || e.weight < it->second.first) {
                best[{a, b}] = {e.weight, &e.observables};
            }
        }
        struct Arc {
            std::uint32_t to;
            double weight;
            const BitVec* obs;
        };
        std::vector<std::vector<Arc>> adj(n);
        for (const auto& [pair, wobs] : best) {
            adj[pair.first].push_back(Arc{pair.second, wobs.first, wobs.second});
            adj[pair.second].push_back(Arc{pair.first, wobs.first, wobs.second});
        }

        dist_.assign(std::size_t{n} * n, kInf);
        path_obs_.assign(std::size_t{n} * n * obs_words_, 0);
        std::vector<double> dist(n);
        std::vector<std::uint8_t> done(n);
        std::vector<std::pair<std::uint32_t, const BitVec*>> pred(n);
        using QueueItem = std::pair<double, std::uint32_t>;
        for (std::uint32_t src = 0; src < n; ++src) {
            std::fill(dist.begin(), dist.end(), kInf);
            std::fill(done.begin(), done.end(), 0);
            std::fill(pred.begin(), pred.end(), std::pair<std::uint32_t, const BitVec*>{src, nullptr});
            std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
            dist[src] = 0;
            queue.push({0.0, src});
            while (!queue.empty()) {
                auto [d, u] = queue.top();
                queue.pop();
                if (done[u]) {
                    continue;
                }
                done[u] = 1;
                for (const Arc& arc : adj[u]) {
                    if (d + arc.weight < dist[arc.to]) {
                        dist[arc.to] = d + arc.weight;
                        pred[arc.to] = {u, arc.obs};
                        queue.push({dist[arc.to], arc.to});
                    }
                }
            }
            // Accumulate observable parities along the predecessor tree in
            // BFS-from-src order (parents are always finalized first).
            std::vector<std::uint32_t> order(n);
            for (std::uint32_t v = 0; v < n; ++v) {
                order[v] = v;
            }
            std::sort(order.begin(), order.end(),
                      [&dist](std::uint32_t a, std::uint32_t b) { return dist[a] < dist[b]; });
            for (std::uint32_t v : order) {
                dist_[std::size_t{src} * n + v] = dist[v];
                if (v == src || dist[v] == kInf || pred[v].second == nullptr) {
                    continue;
                }
                std::uint64_t* out = pair_obs(src, v);
                const std::uint64_t* parent = pair_obs(src, pred[v].first);
                for (std::size_t w = 0; w < obs_words_; ++w) {
                    out[w] = parent[w] ^ pred[v].second->data()[w];
                }
            }
        }
    }

    std::uint64_t* pair_obs(std::uint32_t a, std::uint32_t b) {
        return path_obs_.data() + (std::size_t{a} * (num_detectors_ + 1) + b) * obs_words_;
    }
    const std::uint64_t* pair_obs(std::uint32_t a, std::uint32_t b) const {
        return path_obs_.data() + (std::size_t{a} * (num_detectors_ + 1) + b) * obs_words_;
    }
    double pair_dist(std::uint32_t a, std::uint32_t b) const {
        return dist_[std::size_t{a} * (num_detectors_ + 1) + b];
    }

    double match_exact(const std::vector<std::uint32_t>& defects, std::uint64_t* obs_out) const {
        const int n = static_cast<int>(defects.size());
        const std::uint32_t boundary = num_detectors_;
        const std::uint32_t full = (n == 32) ? 0xFFFFFFFFu : ((1u << n) - 1u);
        std::vector<double> cost(full + 1u, kInf);
        // choice[S]: index j matched with the lowest set bit i of S, or i
        // itself to mean "i goes to the boundary".
        std::vector<std::uint8_t> choice(full + 1u, 0);
        cost[0] = 0;
        for (std::uint32_t s = 1; s <= full; ++s) {
            int i = std::countr_zero(s);
            std::uint32_t rest = s & (s - 1u);
            double best_cost = pair_dist(defects[static_cast<std::size_t>(i)], boundary);
            if (best_cost != kInf && cost[rest] != kInf) {
                best_cost += cost[rest];
            } else {
                best_cost = kInf;
            }
            std::uint8_t best_choice = static_cast<std::uint8_t>(i);
            std::uint32_t others = rest;
            while (others != 0) {
                int j = std::countr_zero(others);
                others &= others - 1u;
                double dij = pair_dist(defects[static_cast<std::size_t>(i)],
                                       defects[static_cast<std::size_t>(j)]);
                std::uint32_t without = s & ~(1u << i) & ~(1u << j);
                if (dij != kInf && cost[without] != kInf && dij + cost[without] < best_cost) {
                    best_cost = dij + cost[without];
                    best_choice = static_cast<std::uint8_t>(j);
                }
            }
            cost[s] = best_cost;
            choice[s] = best_choice;
        }
        require(cost[full] != kInf, ErrorKind::NotMatchable,
                "no finite-weight matching exists for this syndrome");
        std::uint32_t s = full;
        while (s != 0) {
            int i = std::countr_zero(s);
            int j = choice[s];
            std::uint32_t u = defects[static_cast<std::size_t>(i)];
            std::uint32_t v = (j == i) ? boundary : defects[static_cast<std::size_t>(j)];
            const std::uint64_t* path = pair_obs(u, v);
            for (std::size_t w = 0; w < obs_words_; ++w) {
                obs_out[w] ^= path[w];
            }
            s &= ~(1u << i);
            if (j != i) {
                s &= ~(1u << j);
            }
        }
        return cost[full];
    }

    void match_greedy(const std::vector<std::uint32_t>& defects, std::uint64_t* obs_out) const {
        const std::uint32_t boundary = num_detectors_;
        struct Option {
            double cost;
            std::uint32_t i, j;  // i == j means boundary
        };
        std::vector<Option> options;
        options.reserve(defects.size() * (defects.size() + 1) / 2);
        for (std::uint32_t i = 0; i < defects.size(); ++i) {
            double bd = pair_dist(defects[i], boundary);
            if (bd != kInf) {
                options.push_back({bd, i, i});
            }
            for (std::uint32_t j = i + 1; j < defects.size(); ++j) {
                double dij = pair_dist(defects[i], defects[j]);
                if (dij != kInf) {
                    options.push_back({dij, i, j});
                }
            }
        }
        std::sort(options.begin(), options.end(), [](const Option& a, const Option& b) {
            return std::tie(a.cost, a.i, a.j) < std::tie(b.cost, b.i, b.j);
        });
        std::vector<std::uint8_t> matched(defects.size(), 0);
        std::size_t remaining = defects.size();
        for (const Option& opt : options) {
            if (remaining == 0) {
                break;
            }
            if (matched[opt.i] || matched[opt.j]) {
                continue;
            }
            matched[opt.i] = 1;
            matched[opt.j] = 1;
            remaining -= (opt.i == opt.j) ? 1 : 2;
            std::uint32_t v = (opt.i == opt.j) ? boundary : defects[opt.j];
            const std::uint64_t* path = pair_obs(defects[opt.i], v);
            for (std::size_t w = 0; w < obs_words_; ++w) {
                obs_out[w] ^= path[w];
            }
        }
        require(remaining == 0, ErrorKind::NotMatchable,
                "greedy matching could not pair all defects");
    }

    std::uint32_t num_detectors_ = 0;
    std::uint32_t num_observables_ = 0;
    std::size_t obs_words_ = 0;
    bool allow_greedy_ = true;
    mutable std::atomic<std::uint64_t> greedy_decodes_{0};
    std::vector<double> dist_;
    std::vector<std::uint64_t> path_obs_;
};

enum class DecoderKind { Auto, Lookup, Matching };

/// Builds the decoder for a compiled circuit. Auto picks the exact lookup
/// table for small circuits (< 32 detectors and a complete single-fault
/// syndrome cover is plausible) and matching otherwise; callers that know the
/// code family should pass an explicit kind.
inline std::unique_ptr<Decoder> make_decoder(const PropagationTable& table, DecoderKind kind,
                                             double p_nominal = 5e-4) {
    if (kind == DecoderKind::Auto) {
        kind = table.num_detectors <= 32 ? DecoderKind::Lookup : DecoderKind::Matching;
    }
    if (kind == DecoderKind::Lookup) {
        return std::make_unique<LookupDecoder>(LookupDecoder::build(table));
    }
    return std::make_unique<MatchingDecoder>(DetectorGraph::build(table, p_nominal));
}

}  // namespace qler
