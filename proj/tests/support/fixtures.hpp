#pragma once

#include "natpatl/cgs.hpp"

namespace natpatl::fixtures {

// One state, one agent, action noop, self-loop with probability 1.
inline RawModel unit_raw() {
    RawModel m;
    m.agents = {"a"};
    m.atoms = {};
    m.actions = {"noop"};
    m.states = {{"s0", {}}};
    m.legality = {{"s0", "a", {"noop"}}};
    m.transitions = {{"s0", {"noop"}, {{"s0", Rational(1)}}}};
    m.initial = "s0";
    return m;
}

// The coin fixture: s0 --toss--> {sH: 1/2, sT: 1/2}, sH/sT absorbing.
// toss is legal everywhere (absorbing self-loops), noop only at sH/sT.
inline RawModel coin_raw() {
    RawModel m;
    m.agents = {"a"};
    m.atoms = {"heads", "tails"};
    m.actions = {"toss", "noop"};
    m.states = {{"s0", {}}, {"sH", {"heads"}}, {"sT", {"tails"}}};
    m.legality = {
        {"s0", "a", {"toss"}},
        {"sH", "a", {"toss", "noop"}},
        {"sT", "a", {"toss", "noop"}},
    };
    m.transitions = {
        {"s0", {"toss"}, {{"sH", Rational(1, 2)}, {"sT", Rational(1, 2)}}},
        {"sH", {"toss"}, {{"sH", Rational(1)}}},
        {"sH", {"noop"}, {{"sH", Rational(1)}}},
        {"sT", {"toss"}, {{"sT", Rational(1)}}},
        {"sT", {"noop"}, {{"sT", Rational(1)}}},
    };
    m.initial = "s0";
    return m;
}

inline Cgs coin() { return validate_cgs(coin_raw()); }

// Two fully connected states u (no labels) and v ({p}); every state
// sequence is a valid history.
inline Cgs two_state() {
    RawModel m;
    m.agents = {"a"};
    m.atoms = {"p"};
    m.actions = {"go"};
    m.states = {{"u", {}}, {"v", {"p"}}};
    m.legality = {{"u", "a", {"go"}}, {"v", "a", {"go"}}};
    m.transitions = {
        {"u", {"go"}, {{"u", Rational(1, 2)}, {"v", Rational(1, 2)}}},
        {"v", {"go"}, {{"u", Rational(1, 2)}, {"v", Rational(1, 2)}}},
    };
    m.initial = "u";
    return validate_cgs(m);
}

// Two states u ({}) and v ({p}) with actions x, y whose effects differ:
// x explores from u and stays at v, y resets to u.
inline Cgs chooser() {
    RawModel m;
    m.agents = {"a"};
    m.atoms = {"p"};
    m.actions = {"x", "y"};
    m.states = {{"u", {}}, {"v", {"p"}}};
    m.legality = {{"u", "a", {"x", "y"}}, {"v", "a", {"x", "y"}}};
    m.transitions = {
        {"u", {"x"}, {{"u", Rational(1, 2)}, {"v", Rational(1, 2)}}},
        {"u", {"y"}, {{"u", Rational(1)}}},
        {"v", {"x"}, {{"v", Rational(1)}}},
        {"v", {"y"}, {{"u", Rational(1)}}},
    };
    m.initial = "u";
    return validate_cgs(m);
}

// Two agents; the joint action (l, l) from g0 wins, everything else loops.
inline Cgs two_agent() {
    RawModel m;
    m.agents = {"a", "b"};
    m.atoms = {"win"};
    m.actions = {"l", "r"};
    m.states = {{"g0", {}}, {"g1", {"win"}}};
    for (const auto& s : {"g0", "g1"}) {
        m.legality.push_back({s, "a", {"l", "r"}});
        m.legality.push_back({s, "b", {"l", "r"}});
    }
    for (const auto& x : {"l", "r"})
        for (const auto& y : {"l", "r"}) {
            bool wins = std::string(x) == "l" && std::string(y) == "l";
            m.transitions.push_back(
                {"g0", {x, y}, {{wins ? "g1" : "g0", Rational(1)}}});
            m.transitions.push_back({"g1", {x, y}, {{"g1", Rational(1)}}});
        }
    m.initial = "g0";
    return validate_cgs(m);
}

// Voting pipeline snapshots for strategy-matching tests: one state per
// stage of the voter protocol, all actions legal everywhere, self-loops.
inline Cgs voting_states() {
    RawModel m;
    m.agents = {"v"};
    m.atoms = {"hasBallot", "scanned", "entVote", "sigOk", "sigFail",
               "vot", "rec", "shreded"};
    m.actions = {"scanBallot", "enterVote", "checkSig", "cnlVote",
                 "conf", "shred", "noop"};
    m.states = {
        {"p1", {"hasBallot"}},
        {"p2", {"hasBallot", "scanned"}},
        {"p3", {"hasBallot", "scanned", "entVote"}},
        {"p4", {"hasBallot", "scanned", "entVote", "sigFail"}},
        {"p5", {"hasBallot", "scanned", "entVote", "sigOk"}},
        {"p6", {"vot", "rec"}},
        {"p7", {"vot", "rec", "shreded"}},
    };
    for (const auto& [name, labels] : m.states) {
        m.legality.push_back({name, "v", m.actions});
        for (const auto& act : m.actions)
            m.transitions.push_back({name, {act}, {{name, Rational(1)}}});
    }
    m.initial = "p1";
    return validate_cgs(m);
}

}  // namespace natpatl::fixtures
